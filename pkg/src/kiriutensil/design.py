"""Inverse design and servo torque planning on top of :mod:`.statics`."""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    InfeasibleDesignError,
    InputError,
    KiriError,
    ModelDomainError,
    SingularDesignError,
)
from .statics import (
    BandSpec,
    KirigamiSpringModel,
    MaterialSpec,
    UtensilGeometry,
    band_displacement,
    evaluate_state,
    operating_range,
    _check_delta_x,
    _moment_arms,
)

DEFAULT_GEAR_RATIO = 1.0
DEFAULT_SAFETY_FACTOR = 1.5

# Relative slack under which the kirigami moment "equals" the target moment.
_EQUALITY_RTOL = 1e-12


class Objective(str, enum.Enum):
    SOLVE_MODULUS = "solve_modulus"
    SOLVE_BAND_STIFFNESS = "solve_band_stiffness"


@dataclass(frozen=True)
class DesignTarget:
    """Handle force (N) wanted at a given mesh displacement (mm)."""

    target_applied_force: float
    at_displacement: float
    objective: Objective

    def __post_init__(self):
        object.__setattr__(self, "objective", Objective(self.objective))
        object.__setattr__(self, "target_applied_force", float(self.target_applied_force))
        object.__setattr__(self, "at_displacement", float(self.at_displacement))
        if not self.target_applied_force > 0:
            raise InfeasibleDesignError(
                f"target force must be > 0 N, got {self.target_applied_force}"
            )


def _target_state(geom, target):
    dx = _check_delta_x(geom, target.at_displacement)
    limit = operating_range(geom).delta_x_max
    if dx > limit:
        raise ModelDomainError(
            f"target displacement {dx} mm lies beyond the operating range ({limit:.9g} mm)"
        )
    dy = band_displacement(geom, dx)
    l_k, l_b = _moment_arms(geom, dx)
    return dx, dy, l_k, l_b


def solve_material_modulus(geom: UtensilGeometry, spring: KirigamiSpringModel,
                           band: BandSpec, target: DesignTarget) -> MaterialSpec:
    """Young's modulus giving ``target`` force at the target displacement.

    ``E = (F_A L_A - K_B dy L_B) / (K_K dx L_K)``.
    """
    if target.objective is not Objective.SOLVE_MODULUS:
        raise InputError(f"objective must be {Objective.SOLVE_MODULUS.value}")
    dx, dy, l_k, l_b = _target_state(geom, target)
    lever = spring.stiffness_factor * dx * l_k
    if lever == 0:
        raise SingularDesignError(
            f"no kirigami leverage at delta_x={dx} mm; modulus is undetermined"
        )
    target_moment = target.target_applied_force * geom.applied_moment_arm
    band_moment = band.effective_stiffness * dy * l_b
    if band_moment >= target_moment:
        raise InfeasibleDesignError(
            f"band moment {band_moment:.9g} N*mm alone meets the target moment "
            f"{target_moment:.9g} N*mm; no positive modulus fits"
        )
    return MaterialSpec((target_moment - band_moment) / lever)


def solve_band_stiffness(geom: UtensilGeometry, spring: KirigamiSpringModel,
                         material: MaterialSpec, target: DesignTarget) -> BandSpec:
    """Band stiffness giving ``target`` force at the target displacement.

    ``K_B = (F_A L_A - K_K E dx L_K) / (dy L_B)``. When the mesh alone already
    meets the target the band is unnecessary and ``BandSpec(0, present=False)``
    is returned.
    """
    if target.objective is not Objective.SOLVE_BAND_STIFFNESS:
        raise InputError(f"objective must be {Objective.SOLVE_BAND_STIFFNESS.value}")
    dx, dy, l_k, l_b = _target_state(geom, target)
    target_moment = target.target_applied_force * geom.applied_moment_arm
    mesh_moment = spring.spring_constant(material) * dx * l_k
    needed = target_moment - mesh_moment
    if abs(needed) <= _EQUALITY_RTOL * max(target_moment, mesh_moment):
        return BandSpec.absent()
    if needed < 0:
        raise InfeasibleDesignError(
            f"kirigami moment {mesh_moment:.9g} N*mm already exceeds the target "
            f"moment {target_moment:.9g} N*mm"
        )
    lever = dy * l_b
    if not lever > 0:
        raise SingularDesignError(
            f"band is slack (dy={dy:.9g} mm) or has no leverage at delta_x={dx} mm"
        )
    return BandSpec(needed / lever)


def scale_geometry(geom: UtensilGeometry, s: float) -> UtensilGeometry:
    """Scale every length by ``s``.

    ``K_K`` and ``K_B`` are left to the caller: the mesh stiffness factor is
    size-independent, and a band must be re-measured after rescaling.
    """
    s = float(s)
    if not (math.isfinite(s) and s > 0):
        raise ModelDomainError(f"scale factor must be > 0, got {s}")
    return UtensilGeometry(
        applied_moment_arm=geom.applied_moment_arm * s,
        kirigami_hypotenuse=geom.kirigami_hypotenuse * s,
        band_hypotenuse=geom.band_hypotenuse * s,
        kirigami_offset=geom.kirigami_offset * s,
        band_offset=geom.band_offset * s,
    )


SWEEP_AXES = ("youngs_modulus", "band_stiffness", "scale", "delta_x")


@dataclass(frozen=True)
class SweepRow:
    youngs_modulus: float
    band_stiffness: float | None
    scale: float
    delta_x: float
    delta_y: float = math.nan
    kirigami_force: float = math.nan
    band_force: float = math.nan
    applied_force: float = math.nan
    pivot_torque: float = math.nan
    delta_x_max: float = math.nan
    error: str | None = None


def _error_code(exc: Exception) -> str:
    if isinstance(exc, ModelDomainError):
        return "domain"
    return "invalid_parameter"


def parameter_sweep(geom: UtensilGeometry, spring: KirigamiSpringModel, band: BandSpec,
                    grid: Mapping[str, Sequence[float]],
                    material: MaterialSpec | None = None) -> list[SweepRow]:
    """Evaluate the model over the Cartesian product of ``grid``.

    ``grid`` maps any of :data:`SWEEP_AXES` to values; missing axes fall back
    to ``material``, ``band`` and scale 1. ``delta_x`` is required. Each axis
    is sorted ascending, so rows come out in lexicographic order of
    ``(E, K_B, s, dx)``. A band-stiffness axis implies a present band. Cells
    that fail carry an error code and NaN outputs instead of being dropped.
    """
    unknown = set(grid) - set(SWEEP_AXES)
    if unknown:
        raise InputError(f"unknown sweep axes: {sorted(unknown)}")
    dxs = sorted(float(v) for v in grid.get("delta_x", ()))
    if not dxs:
        raise ModelDomainError("sweep grid has no delta_x values")

    if "youngs_modulus" in grid:
        es = sorted(float(v) for v in grid["youngs_modulus"])
    elif material is not None:
        es = [material.youngs_modulus]
    else:
        raise InputError("no youngs_modulus axis and no base material")
    if "band_stiffness" in grid:
        kbs = sorted(float(v) for v in grid["band_stiffness"])
    else:
        kbs = [band.stiffness if band.present else None]
    scales = sorted(float(v) for v in grid.get("scale", (1.0,)))
    if not (es and kbs and scales):
        raise ModelDomainError("sweep grid has an empty axis")

    rows = []
    for e, kb, s, dx in itertools.product(es, kbs, scales, dxs):
        try:
            mat = MaterialSpec(e)
            bnd = BandSpec.absent() if kb is None else BandSpec(kb)
            g = geom if s == 1.0 else scale_geometry(geom, s)
            limit = operating_range(g).delta_x_max
            st = evaluate_state(g, spring, mat, bnd, dx)
        except KiriError as exc:
            rows.append(SweepRow(e, kb, s, dx, error=_error_code(exc)))
            continue
        rows.append(SweepRow(
            e, kb, s, dx,
            delta_y=st.delta_y,
            kirigami_force=st.kirigami_force,
            band_force=st.band_force,
            applied_force=st.applied_force,
            pivot_torque=st.pivot_torque,
            delta_x_max=limit,
        ))
    return rows


@dataclass(frozen=True)
class ClosureTrajectory:
    """Ordered ``(phase, delta_x)`` samples; phases rise strictly from 0 to 1.

    A single sample is allowed and must sit at phase 0 (a hold, not a motion).
    """

    samples: tuple[tuple[float, float], ...]

    def __post_init__(self):
        samples = tuple((float(p), float(x)) for p, x in self.samples)
        object.__setattr__(self, "samples", samples)
        if not samples:
            raise InputError("trajectory is empty")
        phases = [p for p, _ in samples]
        if phases[0] != 0.0:
            raise InputError("trajectory must start at phase 0")
        if len(phases) > 1 and phases[-1] != 1.0:
            raise InputError("trajectory must end at phase 1")
        if any(b <= a for a, b in zip(phases, phases[1:])):
            raise InputError("trajectory phases must be strictly increasing")

    @classmethod
    def from_displacements(cls, delta_x: Sequence[float]) -> ClosureTrajectory:
        """Evenly spaced phases over the given displacements."""
        delta_x = [float(v) for v in delta_x]
        n = len(delta_x)
        if n == 1:
            return cls(((0.0, delta_x[0]),))
        phases = np.linspace(0.0, 1.0, n)
        return cls(tuple(zip(phases.tolist(), delta_x)))

    @classmethod
    def linear(cls, start: float, end: float, steps: int) -> ClosureTrajectory:
        if steps < 2:
            raise InputError("a ramp needs at least 2 steps")
        return cls.from_displacements(np.linspace(start, end, steps).tolist())

    @classmethod
    def from_peg_arc(cls, radius: float, rest_angle: float, sweep_angle: float,
                     steps: int) -> ClosureTrajectory:
        """Servo-angle ramp mapped to displacement by ``R (sin(phi0 + t) - sin phi0)``.

        This peg-on-an-arc mapping is an assumed convenience, not a measured
        servo kinematics; angles are in radians.
        """
        if radius <= 0:
            raise InputError("peg radius must be > 0")
        if steps < 2:
            raise InputError("an arc needs at least 2 steps")
        theta = np.linspace(0.0, sweep_angle, steps)
        dx = radius * (np.sin(rest_angle + theta) - math.sin(rest_angle))
        dx[0] = 0.0
        phases = np.linspace(0.0, 1.0, steps)
        return cls(tuple(zip(phases.tolist(), dx.tolist())))


@dataclass(frozen=True)
class TorqueProfile:
    samples: tuple[tuple[float, float, float], ...]
    peak_torque: float
    gear_ratio: float
    safety_factor: float
    required_motor_torque: float

    @property
    def peak_phase(self) -> float:
        return max(self.samples, key=lambda s: s[2])[0]


def torque_profile(geom, spring, material, band, traj: ClosureTrajectory,
                   gear_ratio: float = DEFAULT_GEAR_RATIO,
                   safety_factor: float = DEFAULT_SAFETY_FACTOR) -> TorqueProfile:
    """Quasi-static pivot torque along ``traj`` and the servo torque it implies.

    ``required_motor_torque = peak_torque * safety_factor / gear_ratio``. The
    peak is the maximum over the samples themselves; nothing is interpolated.
    """
    if not gear_ratio > 0:
        raise InputError(f"gear_ratio must be > 0, got {gear_ratio}")
    if not safety_factor >= 1:
        raise InputError(f"safety_factor must be >= 1, got {safety_factor}")
    limit = operating_range(geom).delta_x_max
    out = []
    for phase, dx in traj.samples:
        if not 0 <= dx <= limit:
            raise ModelDomainError(
                f"trajectory leaves the operating range at phase {phase:.9g} "
                f"(delta_x={dx:.9g} mm, limit {limit:.9g} mm)"
            )
        out.append((phase, dx, evaluate_state(geom, spring, material, band, dx).pivot_torque))
    peak = max(t for _, _, t in out)
    return TorqueProfile(
        samples=tuple(out),
        peak_torque=peak,
        gear_ratio=float(gear_ratio),
        safety_factor=float(safety_factor),
        required_motor_torque=peak * safety_factor / gear_ratio,
    )
