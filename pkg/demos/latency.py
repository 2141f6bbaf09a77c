"""
Spike latency of a single neuron
================================

A resting neuron receives one input of size S.  Below the threshold
S_th = 1 + d nothing happens; at or above it the neuron fires after
1 / (S - 1) ms, so the longest possible wait is 1 / d.
"""

import numpy as np

from liflsim import NeuronParams
from liflsim.experiments import latency_curve

params = NeuronParams()
print(f"threshold {params.s_th}, longest latency {1 / params.d} ms")

# a handful of inputs, from just below threshold to a large kick
amps = np.array([1.0, params.s_th, 1.1, 1.25, 1.5, 2.0, 3.0])
for amp, S, measured, ideal in latency_curve(amps, params):
    if measured is None:
        print(f"input {amp:5.3f}: no spike")
    else:
        print(f"input {amp:5.3f}: fires after {measured:8.4f} ms (1/(S-1) = {ideal:8.4f})")

# a second, smaller input while the neuron is counting down brings the spike forward
from liflsim import Network, run

net = Network()
net.add_neuron(params)
net.stimulate(0, 0.0, 1.1)
alone = run(net, 50.0).trace.spike_times(0)[0]
net.stimulate(0, 3.0, 0.2)
helped = run(net, 50.0).trace.spike_times(0)[0]
print(f"1.1 alone fires at {alone:.4f} ms; with 0.2 more at t=3 it fires at {helped:.4f} ms")
