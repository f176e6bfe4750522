# Force needed to close one handle, with and without the elastic band.
#
# Uses the reference constant set. Run from anywhere:
#   python demos/01_force_displacement.py

import numpy as np

import kiriutensil as ku

geom = ku.TABLE1_GEOMETRY
spring = ku.TABLE1_SPRING
material = ku.TABLE1_MATERIAL
band = ku.TABLE1_BAND

# The force-displacement map stops being invertible past the mesh-moment peak.
rng = ku.operating_range(geom)
print(f"operating range: 0 .. {rng.delta_x_max:.3f} mm (limited by {rng.limiting_reason.value})")

dx = np.linspace(0, rng.delta_x_max, 7)
with_band = ku.applied_force(geom, spring, material, band, dx)
without = ku.applied_force(geom, spring, material, ku.BandSpec.absent(), dx)

print(f"{'dx [mm]':>9} {'F_A band [N]':>14} {'F_A no band [N]':>16}")
for x, a, b in zip(dx, with_band, without):
    print(f"{x:9.3f} {a:14.3f} {b:16.3f}")

# Full state at 10 mm, including the moment arms.
state = ku.evaluate_state(geom, spring, material, band, 10.0)
print()
print(f"at dx = 10 mm: F_K = {state.kirigami_force:.2f} N, F_B = {state.band_force:.3f} N, "
      f"L_K = {state.kirigami_moment_arm:.2f} mm, L_B = {state.band_moment_arm:.2f} mm")
print(f"handle force F_A = {state.applied_force:.2f} N, pivot torque = {state.pivot_torque:.1f} N*mm")

# These constants give several hundred newtons at 10 mm, far more than a hand
# squeezes. The numbers are reproduced as printed, not rescaled.

# Going the other way: which displacement does a given squeeze reach?
for force in (50.0, 200.0, 495.38):
    x, info = ku.invert_applied_force(geom, spring, material, band, force, full_output=True)
    print(f"F_A = {force:7.2f} N  ->  dx = {x:.6f} mm  ({info.iterations} Brent iterations)")

try:
    ku.invert_applied_force(geom, spring, material, band, 5000.0)
except ku.OutOfRangeError as exc:
    print(f"5000 N is out of reach: peak force is {exc.peak_force:.2f} N")

# Optional plot, if matplotlib is around.
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None
if plt is not None and __name__ == "__main__":
    xs = np.linspace(0, geom.domain_limit, 300)
    plt.plot(xs, ku.applied_force(geom, spring, material, band, xs), label="with band")
    plt.plot(xs, ku.applied_force(geom, spring, material, ku.BandSpec.absent(), xs), label="no band")
    plt.axvline(rng.delta_x_max, ls="--", c="k", lw=0.8)
    plt.xlabel("mesh displacement [mm]")
    plt.ylabel("handle force [N]")
    plt.legend()
    plt.savefig("force_displacement.png", dpi=120)
    print("wrote force_displacement.png")
