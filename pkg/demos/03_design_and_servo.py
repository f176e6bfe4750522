# Tuning a utensil for one user and sizing the servo of the robot-mounted one.

import math

import kiriutensil as ku

geom, spring, material, band = (ku.TABLE1_GEOMETRY, ku.TABLE1_SPRING,
                                ku.TABLE1_MATERIAL, ku.TABLE1_BAND)

# A user should close the spoon (dx = 20 mm) with 300 N on the handle.
# Option 1: pick a softer mesh material and keep the band.
target = ku.DesignTarget(300.0, 20.0, ku.Objective.SOLVE_MODULUS)
mat = ku.solve_material_modulus(geom, spring, band, target)
print(f"mesh modulus for 300 N at 20 mm: E = {mat.youngs_modulus:.2f} MPa")

# Option 2: keep the material and stiffen the band. The mesh alone already
# needs ~837 N at 20 mm, so only a higher target can be met this way.
target = ku.DesignTarget(900.0, 20.0, ku.Objective.SOLVE_BAND_STIFFNESS)
try:
    b = ku.solve_band_stiffness(geom, spring, material, target)
    print(f"band stiffness for 900 N at 20 mm: K_B = {b.stiffness:.2f} N/mm")
except ku.InfeasibleDesignError as exc:
    print("band design infeasible:", exc)

# Scaling the whole utensil changes the lever geometry but not K_K.
for s in (1.0, 1.25, 1.5):
    g = ku.scale_geometry(geom, s)
    f = ku.evaluate_state(g, spring, material, band, 10.0).applied_force
    print(f"scale {s:4.2f}x: F_A(10 mm) = {f:7.2f} N, range up to "
          f"{ku.operating_range(g).delta_x_max:.2f} mm")

# A small sweep, emitted row by row in lexicographic order.
rows = ku.parameter_sweep(geom, spring, band, {
    "youngs_modulus": [10.0, 14.9, 20.0], "delta_x": [10.0, 20.0, 40.0]})
for r in rows:
    val = "  (outside the mesh triangle)" if r.error else f"{r.applied_force:8.2f} N"
    print(f"E={r.youngs_modulus:5.1f}  dx={r.delta_x:4.1f}  {val}")

# Servo: close from flat to 20 mm; a peg on a 25 mm arm driven through 55 deg
# gives a similar stroke.
traj = ku.ClosureTrajectory.linear(0.0, 20.0, 21)
prof = ku.torque_profile(geom, spring, material, band, traj, gear_ratio=3.0, safety_factor=1.5)
print(f"peak pivot torque {prof.peak_torque / 1000:.2f} N*m at phase {prof.peak_phase:.2f}; "
      f"motor needs {prof.required_motor_torque / 1000:.2f} N*m through a 3:1 gear")

arc = ku.ClosureTrajectory.from_peg_arc(25.0, 0.0, math.radians(55), 12)
prof = ku.torque_profile(geom, spring, material, band, arc)
print(f"peg-arc stroke {arc.samples[-1][1]:.2f} mm, "
      f"required motor torque {prof.required_motor_torque / 1000:.2f} N*m")
