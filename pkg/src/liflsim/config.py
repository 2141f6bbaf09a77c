"""Experiment configuration files.

A config is a TOML document with the sections ``[neuron]``, ``[memristor]``,
``[stdp]``, ``[pipeline]``, ``[network]``, ``[stimuli]`` and ``[run]``.  The
first four take the field names of :class:`NeuronParams`,
:class:`MemristorParams`, :class:`StdpIdealParams` and
:class:`StdpPipelineConfig`; anything left out keeps the library default.
Unknown sections and keys are rejected, and every error message starts with
``<file>:<line>:`` and names the key.  ``docs/example.toml`` documents every
key.
"""
from __future__ import annotations

import dataclasses
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .engine import PAIRING_POLICIES, Network, Stimulus
from .memristor import DEFAULT_V_READ, MemristorParams
from .neuron import NeuronParams, NeuronState
from .oracle import OracleConfig
from .plasticity import StdpIdealParams, StdpPipelineConfig

SECTIONS = ("neuron", "memristor", "stdp", "pipeline", "network", "stimuli", "run")


class ConfigError(ValueError):
    def __init__(self, source: str, line: int, key: Optional[str], message: str):
        self.source, self.line, self.key = source, line, key
        where = f"{source}:{line}: "
        super().__init__(where + (f"key '{key}': " if key else "") + message)


@dataclass(frozen=True)
class RunSettings:
    """Settings for the runners; every field is a ``[run]`` key."""

    t_end: float = 1000.0
    dense_dt: float = 0.0            # > 0 adds a regular grid of state samples
    oracle_dt: float = 1e-3
    oracle_mem_dt: float = 5e-7
    oracle_interpolate: bool = True
    # latency-curve
    input_min: float = math.nan      # nan means "exactly S_th"
    input_max: float = 3.0
    input_points: int = 100
    # stdp-curve
    delta_t_min: float = -80.0
    delta_t_max: float = 80.0
    delta_t_step: float = 2.0
    probe_x: float = 0.35
    calibrate: bool = False
    # hysteresis
    sine_amplitude: float = 0.45
    sine_period: float = 1000.0
    sine_cycles: int = 3
    samples_per_cycle: int = 400
    x0: float = 0.5
    hysteresis_dt_max: float = 0.5
    # motif
    cycles: int = 6
    period: float = 250.0
    swap: bool = False
    motif_x0: float = 0.6

    def __post_init__(self):
        for name in ("oracle_dt", "oracle_mem_dt", "delta_t_step", "sine_period",
                     "hysteresis_dt_max", "period"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("t_end", "dense_dt", "sine_amplitude"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        for name, low in (("input_points", 1), ("sine_cycles", 1), ("samples_per_cycle", 2), ("cycles", 1)):
            if getattr(self, name) < low:
                raise ValueError(f"{name} must be >= {low}, got {getattr(self, name)}")
        for name in ("x0", "motif_x0"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must lie in [0, 1], got {getattr(self, name)}")
        if not 0 < self.probe_x < 1:
            raise ValueError(f"probe_x must lie in (0, 1), got {self.probe_x}")
        if not self.delta_t_min < self.delta_t_max:
            raise ValueError("delta_t_min must be below delta_t_max")
        if not self.input_max > 1:
            raise ValueError(f"input_max must exceed 1, got {self.input_max}")

    def oracle(self, **overrides) -> OracleConfig:
        base = OracleConfig(dt=self.oracle_dt, t_end=self.t_end, mem_dt=self.oracle_mem_dt,
                            interpolate=self.oracle_interpolate)
        return dataclasses.replace(base, **overrides)


SYNAPSE_KEYS = {"pre": int, "post": int, "x0": float, "plastic": bool, "delay": float}
NEURON_ENTRY_KEYS = {"d": float, "L_d": float, "t_arp": float, "S": float}
SPIKE_KEYS = {"target": int, "time": float, "amplitude": float}
NETWORK_KEYS = {"neurons": None, "synapses": list, "pairing": str, "v_read": float}
STIMULI_KEYS = {"spikes": list, "period": float, "repeat": int}


@dataclass
class ExperimentConfig:
    neuron: NeuronParams = NeuronParams()
    memristor: MemristorParams = MemristorParams()
    stdp: StdpIdealParams = StdpIdealParams()
    pipeline: StdpPipelineConfig = field(default_factory=StdpPipelineConfig)
    run: RunSettings = RunSettings()
    network: Optional[dict] = None
    stimuli: list = field(default_factory=list)
    source: str = "<config>"

    def build_network(self) -> Network:
        """Network described by ``[network]`` and ``[stimuli]``."""
        if self.network is None:
            raise ConfigError(self.source, 1, None, "no [network] section")
        desc = self.network
        net = Network(pairing=desc["pairing"], v_read=desc["v_read"])
        for entry in desc["neurons"]:
            entry = dict(entry)
            S = entry.pop("S", 0.0)
            net.add_neuron(dataclasses.replace(self.neuron, **entry), NeuronState(S=S))
        for syn in desc["synapses"]:
            net.connect(mem_params=self.memristor, pipeline=self.pipeline, **syn)
        net.stimuli.extend(self.stimuli)
        net.validate()
        return net


# -- locating keys in the source text -------------------------------------------

_HEADER = re.compile(r"^\s*\[\s*([A-Za-z0-9_.\-]+)\s*\]")


class _Locator:
    def __init__(self, text: str):
        self.lines = text.splitlines()

    def section(self, name: str) -> int:
        for n, line in enumerate(self.lines, 1):
            m = _HEADER.match(line)
            if m and m.group(1) == name:
                return n
        return 1

    def key(self, section: str, key: str, nth: int = 0) -> int:
        """Line of the ``nth`` assignment to ``key`` inside ``section``."""
        start = self.section(section)
        pat = re.compile(r'(^|[\s{,])"?' + re.escape(key) + r'"?\s*=')
        seen = 0
        for n in range(start, len(self.lines) + 1):
            line = self.lines[n - 1]
            if n > start and _HEADER.match(line):
                break
            code = line.split("#", 1)[0]
            for _ in pat.finditer(code):
                if seen == nth:
                    return n
                seen += 1
        return start


# -- value checking ------------------------------------------------------------

def _coerce(value: Any, kind, err):
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            err(f"expected a number, got {value!r}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            err(f"expected an integer, got {value!r}")
        return value
    if kind is bool:
        if not isinstance(value, bool):
            err(f"expected true or false, got {value!r}")
        return value
    if kind is str:
        if not isinstance(value, str):
            err(f"expected a string, got {value!r}")
        return value
    if kind is list:
        if not isinstance(value, list):
            err(f"expected an array, got {value!r}")
        return value
    return value


def _field_kinds(cls) -> dict:
    kinds = {}
    for f in dataclasses.fields(cls):
        kinds[f.name] = {"float": float, "int": int, "bool": bool, "str": str}[
            f.type if isinstance(f.type, str) else f.type.__name__]
    return kinds


class _Reader:
    def __init__(self, text: str, source: str):
        self.source = source
        self.loc = _Locator(text)

    def fail(self, section: str, key: Optional[str], message: str, nth: int = 0):
        line = self.loc.key(section, key, nth) if key else self.loc.section(section)
        raise ConfigError(self.source, line, key, f"[{section}] {message}")

    def table(self, section: str, raw: dict, kinds: dict) -> dict:
        out = {}
        for key, value in raw.items():
            if key not in kinds:
                self.fail(section, key, f"unknown key; expected one of {sorted(kinds)}")
            out[key] = _coerce(value, kinds[key], lambda m, k=key: self.fail(section, k, m))
        return out

    def params(self, section: str, raw: Any, cls):
        if not isinstance(raw, dict):
            self.fail(section, None, "must be a table")
        values = self.table(section, raw, _field_kinds(cls))
        try:
            return cls(**values)
        except ValueError as exc:
            msg = str(exc)
            # blame the key the validator mentions first, else the first one given
            named = [k for k in values if re.search(r"\b" + re.escape(k) + r"\b", msg)]
            named.sort(key=lambda k: re.search(r"\b" + re.escape(k) + r"\b", msg).start())
            self.fail(section, (named or list(values) or [None])[0], msg)

    def entries(self, section: str, key: str, raw: list, kinds: dict, required: tuple) -> list[dict]:
        out = []
        for idx, entry in enumerate(raw):
            if not isinstance(entry, dict):
                self.fail(section, key, f"entry {idx} must be an inline table")
            for k in entry:
                if k not in kinds:
                    # count earlier entries using the same unknown key to find its line
                    nth = sum(k in e for e in raw[:idx] if isinstance(e, dict))
                    self.fail(section, k, f"unknown key in {key}[{idx}]; expected one of {sorted(kinds)}", nth)
            for k in required:
                if k not in entry:
                    self.fail(section, key, f"{key}[{idx}] is missing '{k}'")
            item = {}
            for k, v in entry.items():
                nth = sum(k in e for e in raw[:idx] if isinstance(e, dict))
                item[k] = _coerce(v, kinds[k], lambda m, k=k, nth=nth: self.fail(section, k, f"{key}[{idx}]: {m}", nth))
            out.append(item)
        return out


def loads(text: str, source: str = "<config>") -> ExperimentConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ConfigError(source, int(m.group(1)) if m else 1, None, f"syntax error: {exc}") from None
    rd = _Reader(text, source)
    loc = rd.loc
    for name, value in doc.items():
        if name not in SECTIONS:
            line = loc.section(name) if isinstance(value, dict) else _top_level_line(loc, name)
            raise ConfigError(source, line, name, f"unknown section; expected one of {list(SECTIONS)}")

    cfg = ExperimentConfig(source=source)
    if "neuron" in doc:
        cfg.neuron = rd.params("neuron", doc["neuron"], NeuronParams)
    if "memristor" in doc:
        cfg.memristor = rd.params("memristor", doc["memristor"], MemristorParams)
    if "stdp" in doc:
        cfg.stdp = rd.params("stdp", doc["stdp"], StdpIdealParams)
    if "pipeline" in doc:
        cfg.pipeline = rd.params("pipeline", doc["pipeline"], StdpPipelineConfig)
    if "run" in doc:
        cfg.run = rd.params("run", doc["run"], RunSettings)
    if "network" in doc:
        cfg.network = _network(rd, doc["network"])
    if "stimuli" in doc:
        cfg.stimuli = _stimuli(rd, doc["stimuli"])
    if cfg.stimuli and cfg.network is None:
        rd.fail("stimuli", None, "stimuli need a [network] section")
    if cfg.network is not None:
        n = len(cfg.network["neurons"])
        for k, s in enumerate(cfg.network["synapses"]):
            for end in ("pre", "post"):
                if not 0 <= s[end] < n:
                    rd.fail("network", end, f"synapses[{k}] references neuron {s[end]} but there are {n}", k)
            if s["pre"] == s["post"]:
                rd.fail("network", "pre", f"synapses[{k}] is a self-loop", k)
        for k, s in enumerate(cfg.stimuli):
            if not 0 <= s.target < n:
                rd.fail("stimuli", "target", f"spike {k} targets neuron {s.target} but there are {n}")
        try:
            cfg.build_network()
        except ValueError as exc:
            rd.fail("network", None, str(exc))
    return cfg


def _top_level_line(loc: _Locator, name: str) -> int:
    pat = re.compile(r'^\s*"?' + re.escape(name) + r'"?\s*=')
    for n, line in enumerate(loc.lines, 1):
        if pat.match(line):
            return n
    return 1


def _network(rd: _Reader, raw) -> dict:
    if not isinstance(raw, dict):
        rd.fail("network", None, "must be a table")
    values = rd.table("network", raw, NETWORK_KEYS)
    neurons = values.get("neurons", None)
    if neurons is None:
        rd.fail("network", None, "missing key 'neurons'")
    if isinstance(neurons, bool) or not isinstance(neurons, (int, list)):
        rd.fail("network", "neurons", "expected a neuron count or an array of inline tables")
    if isinstance(neurons, int):
        if neurons < 1:
            rd.fail("network", "neurons", f"need at least one neuron, got {neurons}")
        neurons = [{} for _ in range(neurons)]
    else:
        neurons = rd.entries("network", "neurons", neurons, NEURON_ENTRY_KEYS, ())
        for idx, entry in enumerate(neurons):
            S = entry.get("S", 0.0)
            if S < 0:
                rd.fail("network", "S", f"neurons[{idx}]: initial S must be >= 0, got {S}")
    pairing = values.get("pairing", "nearest")
    if pairing not in PAIRING_POLICIES:
        rd.fail("network", "pairing", f"unknown policy {pairing!r}; expected one of {list(PAIRING_POLICIES)}")
    synapses = rd.entries("network", "synapses", values.get("synapses", []), SYNAPSE_KEYS, ("pre", "post"))
    return {"neurons": neurons, "synapses": synapses, "pairing": pairing,
            "v_read": values.get("v_read", DEFAULT_V_READ)}


def _stimuli(rd: _Reader, raw) -> list[Stimulus]:
    if not isinstance(raw, dict):
        rd.fail("stimuli", None, "must be a table")
    values = rd.table("stimuli", raw, STIMULI_KEYS)
    spikes = rd.entries("stimuli", "spikes", values.get("spikes", []), SPIKE_KEYS, ("target", "time"))
    repeat = values.get("repeat", 1)
    period = values.get("period", 0.0)
    if repeat < 1:
        rd.fail("stimuli", "repeat", f"must be >= 1, got {repeat}")
    if repeat > 1 and not period > 0:
        rd.fail("stimuli", "period", "a positive period is required when repeat > 1")
    out = []
    for r in range(repeat):
        for k, s in enumerate(spikes):
            t = s["time"] + r * period
            amp = s.get("amplitude", 1.0)
            if not (math.isfinite(t) and t >= 0):
                rd.fail("stimuli", "time", f"spikes[{k}]: time must be finite and >= 0, got {t}", k)
            if not amp >= 0:
                rd.fail("stimuli", "amplitude", f"spikes[{k}]: amplitude must be >= 0, got {amp}", k)
            out.append(Stimulus(s["target"], t, amp))
    return out


def load(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(str(path), 0, None, f"cannot read file: {exc.strerror}") from None
    return loads(text, str(path))
