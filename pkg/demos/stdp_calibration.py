"""
Calibrating the STDP converter
==============================

Each pre/post pair turns its delay into one write pulse on the synapse.
The pulse amplitude falls off exponentially with the delay, and the
potentiating side is scaled down by a mitigation gain because the
device moves more easily in one direction than the other.  Calibration
searches the converter settings so the device response matches the
shape of an ideal exponential window.
"""

from liflsim import StdpIdealParams, calibrate, ideal_stdp
from liflsim.memristor import write_asymmetry

# the raw device is asymmetric: the same pulse does not move it equally up and down
up, down = write_asymmetry(amplitude=0.3, width=5e-4)
print(f"+0.3 V pulse: dx = {up:+.4f}, -0.3 V pulse: dx = {down:+.4f}")

ideal = StdpIdealParams()
print(f"ideal peak ratio {ideal.peak_ratio:.3f}, decay ratio {ideal.tau_ratio:.3f}")

# grid search; a few seconds
report = calibrate()
c = report.config
print(f"V_write_max {c.V_write_max}, V_write_min {c.V_write_min}, tau_conv {c.tau_conv}, "
      f"mitigation_gain {c.mitigation_gain}")
print(f"peak ratio {report.peak_ratio:.3f} (without mitigation {report.unmitigated_ratio:.3f}), "
      f"decay ratio {report.tau_ratio:.3f}")

# the measured window next to the ideal one, scaled to the same size
for dt, dx in zip(report.delta_ts, report.changes):
    if dt in (-60, -30, -10, -2, 2, 10, 30, 60):
        print(f"dt {dt:+5.0f} ms: dx {dx:+.5f}, ideal {report.scale * ideal_stdp(dt, ideal):+.5f}")
