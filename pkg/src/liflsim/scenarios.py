"""Ready-made networks: the three-neuron STDP motif and random test networks."""
from __future__ import annotations

import numpy as np

from .engine import Network
from .memristor import DEFAULT_PARAMS, MemristorParams
from .neuron import NeuronParams
from .plasticity import StdpPipelineConfig

N1, N2, N3 = 0, 1, 2
S1, S2 = 0, 1


def motif_network(cycles: int = 6, period: float = 250.0, swap: bool = False,
                  x0: float = 0.6, pipeline: StdpPipelineConfig = StdpPipelineConfig(),
                  neuron: NeuronParams = NeuronParams(),
                  mem_params: MemristorParams = DEFAULT_PARAMS) -> Network:
    """N1 -> N3 (S1) and N2 -> N3 (S2), driven so that N1 fires before N3 and N2 after.

    Each cycle N1 gets a doublet of 1.2 at t and t + 8 and spikes 5 ms after
    each input.  With both devices at ``x0 = 0.6`` the two spikes sum on N3
    past threshold, so N3 fires a few ms after N1's second spike.  N2 gets one
    1.2 input at t + 30 and fires after N3.  A single unit spike through a
    weight <= 1 can never reach threshold on its own, hence the doublet.
    Cycles are spaced beyond the pairing window, so each one yields one LTP
    pairing on the early synapse and one LTD pairing on the late one.
    ``swap`` exchanges the two stimulus trains.
    """
    net = Network()
    for _ in range(3):
        net.add_neuron(neuron)
    net.connect(N1, N3, x0=x0, pipeline=pipeline, mem_params=mem_params)
    net.connect(N2, N3, x0=x0, pipeline=pipeline, mem_params=mem_params)
    early, late = (N2, N1) if swap else (N1, N2)
    for c in range(cycles):
        t = 10.0 + c * period
        net.stimulate(early, t, 1.2)
        net.stimulate(early, t + 8.0, 1.2)
        net.stimulate(late, t + 30.0, 1.2)
    return net


def motif_duration(cycles: int = 6, period: float = 250.0) -> float:
    return 10.0 + cycles * period


def random_network(rng: np.random.Generator, n_neurons=(2, 5), n_stimuli=(6, 20), max_synapses: int = 8,
                   t_stim: float = 150.0, grid: float = 0.5) -> Network:
    """Small random network for engine/oracle cross-checks.

    Stimulus times sit on a ``grid`` ms lattice; connections are random and
    may be recurrent.
    """
    n = int(rng.integers(n_neurons[0], n_neurons[1] + 1))
    net = Network()
    for _ in range(n):
        net.add_neuron(NeuronParams(d=float(rng.choice([0.04, 0.1])),
                                    L_d=float(rng.choice([0.0, 0.01, 0.02])),
                                    t_arp=float(rng.choice([1.0, 2.0]))))
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    n_syn = int(rng.integers(1, min(max_synapses, len(pairs)) + 1))
    for k in rng.choice(len(pairs), size=n_syn, replace=False):
        pre, post = pairs[int(k)]
        net.connect(pre, post, x0=float(np.round(rng.uniform(0.2, 0.8), 3)),
                    delay=float(rng.choice([0.0, 0.0, 1.5])))
    for _ in range(int(rng.integers(n_stimuli[0], n_stimuli[1] + 1))):
        net.stimulate(int(rng.integers(n)), float(rng.integers(0, int(t_stim / grid)) * grid),
                      float(np.round(rng.uniform(0.3, 1.6), 2)))
    return net
