"""
Pinched hysteresis of the device
================================

Under a slow sine drive the current-voltage curve of the device forms a
loop that passes through the origin: no voltage means no current,
whatever the internal state.
"""

import numpy as np

from liflsim.experiments import HysteresisSettings, hysteresis, loop_area

rows = hysteresis(HysteresisSettings(amplitude=0.45, period=1000.0, cycles=3))
t, V, I, x = (np.array(col) for col in zip(*rows))

print(f"{len(rows)} samples over {t[-1]:.0f} ms")
print(f"state range {x.min():.4f} .. {x.max():.4f}")
print(f"largest |I| at V = 0: {np.abs(I[np.abs(V) < 1e-9]).max():.1e} A")
print(f"enclosed loop area {loop_area(rows):.3e} V*A")

# the two branches differ at the same voltage because the state moved in between:
# 0.15 V on the way up (before any switching) and on the way down in the first cycle
k_up = int(np.argmin(np.abs(V[t < 250] - 0.15)))
late = np.flatnonzero((t > 250) & (t < 500))
k_down = int(late[np.argmin(np.abs(V[late] - 0.15))])
print(f"at V = 0.15: x = {x[k_up]:.3f}, I = {I[k_up]:.3e} A going up; "
      f"x = {x[k_down]:.3f}, I = {I[k_down]:.3e} A coming down")
