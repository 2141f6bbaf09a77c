"""
Learning which input predicts the output
========================================

Two neurons N1 and N2 both connect to N3 through plastic synapses S1 and
S2.  N1 is driven so that N3 fires shortly after it, while N2 fires
later.  Repeating the pattern strengthens S1 (pre before post) and
weakens S2 (post before pre).  Swapping the inputs swaps the outcome.
"""

from liflsim import run
from liflsim.scenarios import S1, S2, motif_duration, motif_network

res = run(motif_network(), motif_duration())
print("N3 spikes at", [round(float(t), 3) for t in res.trace.spike_times(2)])

for name, k in (("S1", S1), ("S2", S2)):
    steps = [f"{r.values[1]:.3f}" for r in res.trace.pairings(k)]
    print(f"{name}: 0.600 -> " + " -> ".join(steps))

swapped = run(motif_network(swap=True), motif_duration())
print("swapped inputs, final S1 and S2:", [round(m.x, 3) for m in swapped.memristors])
