"""
Event-driven against clock-driven
=================================

The event engine jumps from one spike to the next.  The reference
simulator instead walks a fixed time grid and keeps its own countdown
for each neuron.  Both should tell the same story about random networks.
"""

import numpy as np

from liflsim import OracleConfig, run, run_clocked
from liflsim.scenarios import random_network

rng = np.random.default_rng(1)
for k in range(5):
    net = random_network(rng)
    eng = run(net, 200.0)
    trace, xs = run_clocked(net, OracleConfig(t_end=200.0))
    a, b = eng.trace.spikes(), trace.spikes()
    same = [i for _, i in a] == [i for _, i in b]
    gap = max((abs(p - q) for (p, _), (q, _) in zip(a, b)), default=0.0)
    dx = max((abs(m.x - x) for m, x in zip(eng.memristors, xs)), default=0.0)
    print(f"network {k}: {len(net.neurons)} neurons, {len(a)} spikes, same order {same}, "
          f"max spike gap {gap:.1e} ms, max weight gap {dx:.1e}")

# rounding every spike to the grid instead makes each synaptic hop a little late
net = random_network(np.random.default_rng(3))
exact = run(net, 200.0).trace.spikes()
for dt in (4e-3, 1e-3):
    late, _ = run_clocked(net, OracleConfig(dt=dt, t_end=200.0, interpolate=False))
    gap = max((q - p for (p, _), (q, _) in zip(exact, late.spikes())), default=0.0)
    print(f"grid-rounded at dt={dt}: largest delay {gap / dt:.2f} steps")
