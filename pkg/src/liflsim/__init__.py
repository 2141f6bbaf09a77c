"""Event-driven LIFL neurons with memristive STDP synapses.

The submodules are usable on their own:

* :mod:`liflsim.neuron` -- latency neuron update rules
* :mod:`liflsim.memristor` -- device model and integrator
* :mod:`liflsim.plasticity` -- STDP window, write pipeline and calibration
* :mod:`liflsim.engine` -- discrete-event network simulation
* :mod:`liflsim.oracle` -- clock-driven reference simulator for testing
* :mod:`liflsim.experiments`, :mod:`liflsim.config`, :mod:`liflsim.cli`
"""
from .engine import Network, Result, Simulation, SimulationError, Stimulus, Synapse, Trace, run
from .memristor import (DEFAULT_PARAMS, MemristorParams, MemristorState, Pulse, Sine,
                        integrate, normalized_weight, read_conductance)
from .neuron import Mode, NeuronParams, NeuronState, time_to_fire
from .oracle import OracleConfig, run_clocked
from .plasticity import (StdpIdealParams, StdpPipelineConfig, apply_pairing, calibrate,
                         ideal_stdp)
from .scenarios import motif_network

__version__ = "0.1.0"
