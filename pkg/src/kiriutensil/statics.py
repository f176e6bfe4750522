"""Quasi-static force-displacement model of one utensil handle.

One handle rotates about the pivot under three forces: the user's squeeze
``F_A`` acting on arm ``L_A``, the kirigami mesh tension ``F_K`` and the
band tension ``F_B``. Equilibrium of moments about the pivot reads::

    F_A * L_A = F_K * L_K + F_B * L_B

with the mesh modelled as a linear spring ``F_K = K_K * E * dx`` and the
band as ``F_B = K_B * dy``. Both moment arms shrink as the handle closes::

    L_K = sqrt(H_K**2 - (dx + b)**2)
    L_B = sqrt(H_B**2 - ((H_B / H_K) * (dx + b))**2)

and the band stretch follows the mesh stretch through similar triangles,
``dy + c = (H_B / H_K) * (dx + b)``.

Units are fixed: mm, N, MPa (N/mm**2) and N*mm. All quantities describe a
single handle.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, fields
from typing import NamedTuple

import numpy as np
from scipy import optimize

from .errors import (
    ConvergenceError,
    DegenerateGeometryError,
    InputError,
    ModelDomainError,
    OutOfRangeError,
)

#: Absolute tolerance (mm) of the inverse solver.
INVERSE_XTOL = 1e-9
#: Iteration cap of the inverse solver.
INVERSE_MAXITER = 200

# Internal bracketing tolerance; tighter than INVERSE_XTOL so the reported
# root is comfortably inside the promised accuracy.
_SOLVER_XTOL = 1e-12

NEGATIVE_APPLIED_FORCE = "negative_applied_force"
NEGATIVE_BAND_DISPLACEMENT = "negative_band_displacement"


def _require_finite(name, value):
    if not math.isfinite(value):
        raise InputError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class UtensilGeometry:
    """Pivot-frame lengths of one handle, in mm.

    Attributes:
        applied_moment_arm: ``L_A``, pivot to the point where the user squeezes.
        kirigami_hypotenuse: ``H_K``, hypotenuse of the mesh triangle.
        band_hypotenuse: ``H_B``, hypotenuse of the band triangle.
        kirigami_offset: ``b``, mesh peg offset from the neutral axis at rest.
        band_offset: ``c``, band post offset from the neutral axis.
    """

    applied_moment_arm: float
    kirigami_hypotenuse: float
    band_hypotenuse: float
    kirigami_offset: float
    band_offset: float

    def __post_init__(self):
        for f in fields(self):
            value = float(getattr(self, f.name))
            _require_finite(f.name, value)
            object.__setattr__(self, f.name, value)
        for name in ("applied_moment_arm", "kirigami_hypotenuse",
                     "band_hypotenuse", "kirigami_offset"):
            if getattr(self, name) <= 0:
                raise InputError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.band_offset < 0:
            raise InputError(f"band_offset must be >= 0, got {self.band_offset}")
        if self.kirigami_offset >= self.kirigami_hypotenuse:
            raise DegenerateGeometryError(
                f"kirigami_offset b={self.kirigami_offset} must be smaller than "
                f"kirigami_hypotenuse H_K={self.kirigami_hypotenuse}"
            )
        if self.band_ratio * self.kirigami_offset - self.band_offset < -self.band_hypotenuse:
            raise InputError("band displacement at rest lies below -H_B")

    @property
    def band_ratio(self) -> float:
        """Similar-triangle ratio ``H_B / H_K``."""
        return self.band_hypotenuse / self.kirigami_hypotenuse

    @property
    def domain_limit(self) -> float:
        """Largest mesh displacement before the mesh triangle collapses."""
        return self.kirigami_hypotenuse - self.kirigami_offset


@dataclass(frozen=True)
class MaterialSpec:
    """Mesh material: Young's modulus in MPa plus an optional Shore label."""

    youngs_modulus: float
    shore_label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "youngs_modulus", float(self.youngs_modulus))
        _require_finite("youngs_modulus", self.youngs_modulus)
        if self.youngs_modulus <= 0:
            raise InputError(f"youngs_modulus must be > 0, got {self.youngs_modulus}")


@dataclass(frozen=True)
class KirigamiSpringModel:
    """Material-normalised mesh spring: ``F_K = stiffness_factor * E * dx``.

    ``stiffness_factor`` (``K_K``) has units of mm so that ``K_K * E`` is N/mm.
    """

    stiffness_factor: float

    def __post_init__(self):
        object.__setattr__(self, "stiffness_factor", float(self.stiffness_factor))
        _require_finite("stiffness_factor", self.stiffness_factor)
        if self.stiffness_factor <= 0:
            raise InputError(f"stiffness_factor must be > 0, got {self.stiffness_factor}")

    def spring_constant(self, material: MaterialSpec) -> float:
        """Mesh spring constant ``K_K * E`` in N/mm."""
        return self.stiffness_factor * material.youngs_modulus


@dataclass(frozen=True)
class BandSpec:
    """Elastic band spanning the handles.

    A removed band is ``present=False``; it is never encoded as a zero
    stiffness so that reports can tell the two apart.
    """

    stiffness: float
    present: bool = True

    def __post_init__(self):
        object.__setattr__(self, "stiffness", float(self.stiffness))
        _require_finite("stiffness", self.stiffness)
        if self.stiffness < 0:
            raise InputError(f"band stiffness must be >= 0, got {self.stiffness}")

    @classmethod
    def absent(cls) -> BandSpec:
        return cls(0.0, present=False)

    @property
    def effective_stiffness(self) -> float:
        return self.stiffness if self.present else 0.0


@dataclass(frozen=True)
class ActuationState:
    """One quasi-static configuration of a handle.

    ``warnings`` holds flag strings (see :data:`NEGATIVE_APPLIED_FORCE` and
    :data:`NEGATIVE_BAND_DISPLACEMENT`); values are never clamped.
    """

    delta_x: float
    delta_y: float
    kirigami_force: float
    band_force: float
    applied_force: float
    kirigami_moment_arm: float
    band_moment_arm: float
    pivot_torque: float
    warnings: tuple[str, ...] = ()


def moment_residual(state: ActuationState, geom: UtensilGeometry) -> float:
    """Moment-balance residual of ``state`` about the pivot, in N*mm."""
    return (state.applied_force * geom.applied_moment_arm
            - state.kirigami_force * state.kirigami_moment_arm
            - state.band_force * state.band_moment_arm)


class LimitReason(str, enum.Enum):
    PEAK = "peak"
    DOMAIN = "domain"


class OperatingRange(NamedTuple):
    delta_x_max: float
    limiting_reason: LimitReason


class InverseInfo(NamedTuple):
    iterations: int
    function_calls: int
    residual: float
    window: OperatingRange


#: Table I geometry, mm.
TABLE1_GEOMETRY = UtensilGeometry(
    applied_moment_arm=69.6,
    kirigami_hypotenuse=59.2,
    band_hypotenuse=22.5,
    kirigami_offset=20.7,
    band_offset=7.8,
)
TABLE1_SPRING = KirigamiSpringModel(stiffness_factor=4.55)
TABLE1_MATERIAL = MaterialSpec(youngs_modulus=14.9)
TABLE1_BAND = BandSpec(stiffness=2.18)


def kirigami_force(spring: KirigamiSpringModel, material: MaterialSpec,
                   delta_x: float) -> float:
    """Mesh tension ``K_K * E * dx`` (N). Compression is outside the model."""
    delta_x = float(delta_x)
    if not delta_x >= 0:
        raise ModelDomainError(f"mesh displacement must be >= 0, got {delta_x}")
    return spring.spring_constant(material) * delta_x


def band_displacement(geom: UtensilGeometry, delta_x: float) -> float:
    """Band stretch implied by the mesh stretch, via similar triangles.

    Reported as-is: inconsistent rest constants can make it slightly
    negative near ``delta_x = 0``.
    """
    u = float(delta_x) + geom.kirigami_offset
    if not 0 <= u <= geom.kirigami_hypotenuse:
        raise ModelDomainError(
            f"delta_x + b = {u} outside [0, H_K={geom.kirigami_hypotenuse}]; "
            "mesh triangle collapsed"
        )
    return geom.band_ratio * u - geom.band_offset


def _moment_arms(geom: UtensilGeometry, delta_x: float) -> tuple[float, float]:
    u = delta_x + geom.kirigami_offset
    hk = geom.kirigami_hypotenuse
    hb = geom.band_hypotenuse
    ub = geom.band_ratio * u
    # u <= H_K is checked by the caller; ub can overshoot H_B by an ulp.
    l_k = math.sqrt(max(hk * hk - u * u, 0.0))
    l_b = math.sqrt(max(hb * hb - ub * ub, 0.0))
    return l_k, l_b


def _check_delta_x(geom: UtensilGeometry, delta_x: float) -> float:
    delta_x = float(delta_x)
    if not delta_x >= 0:
        raise ModelDomainError(f"mesh displacement must be >= 0, got {delta_x}")
    if delta_x > geom.domain_limit:
        raise ModelDomainError(
            f"delta_x={delta_x} exceeds H_K - b = {geom.domain_limit}; "
            "mesh triangle collapsed"
        )
    return delta_x


def evaluate_state(geom: UtensilGeometry, spring: KirigamiSpringModel,
                   material: MaterialSpec, band: BandSpec,
                   delta_x: float) -> ActuationState:
    """Evaluate every force, moment arm and the pivot torque at ``delta_x``."""
    delta_x = _check_delta_x(geom, delta_x)
    delta_y = band_displacement(geom, delta_x)
    l_k, l_b = _moment_arms(geom, delta_x)
    f_k = kirigami_force(spring, material, delta_x)
    f_b = band.stiffness * delta_y if band.present else 0.0
    torque = f_k * l_k + f_b * l_b
    f_a = torque / geom.applied_moment_arm

    flags = []
    if f_a < 0:
        flags.append(NEGATIVE_APPLIED_FORCE)
    if band.present and delta_y < 0:
        flags.append(NEGATIVE_BAND_DISPLACEMENT)
    return ActuationState(
        delta_x=delta_x,
        delta_y=delta_y,
        kirigami_force=f_k,
        band_force=f_b,
        applied_force=f_a,
        kirigami_moment_arm=l_k,
        band_moment_arm=l_b,
        pivot_torque=torque,
        warnings=tuple(flags),
    )


def applied_force(geom, spring, material, band, delta_x):
    """Vectorised ``F_A`` over an array of mesh displacements.

    Same arithmetic as :func:`evaluate_state`; out-of-domain entries are NaN.
    """
    x = np.asarray(delta_x, dtype=float)
    u = x + geom.kirigami_offset
    hk, hb, r = geom.kirigami_hypotenuse, geom.band_hypotenuse, geom.band_ratio
    valid = (x >= 0) & (u <= hk)
    with np.errstate(invalid="ignore"):
        l_k = np.sqrt(np.maximum(hk * hk - u * u, 0.0))
        l_b = np.sqrt(np.maximum(hb * hb - (r * u) ** 2, 0.0))
        torque = spring.spring_constant(material) * x * l_k
        if band.present:
            torque = torque + band.stiffness * (r * u - geom.band_offset) * l_b
    out = np.where(valid, torque / geom.applied_moment_arm, np.nan)
    return out if out.ndim else float(out)


def pivot_torque(geom, spring, material, band, delta_x) -> float:
    """Torque (N*mm) the pivot must supply to hold ``delta_x``.

    Equal to ``F_K*L_K + F_B*L_B``, i.e. ``F_A*L_A`` of the same state.
    """
    return evaluate_state(geom, spring, material, band, delta_x).pivot_torque


def kirigami_peak(geom: UtensilGeometry) -> float:
    """Argmax of ``x * sqrt(H_K**2 - (x + b)**2)`` over ``x >= 0``."""
    b = geom.kirigami_offset
    hk = geom.kirigami_hypotenuse
    return (-3.0 * b + math.sqrt(b * b + 8.0 * hk * hk)) / 4.0


def operating_range(geom: UtensilGeometry) -> OperatingRange:
    """Upper end of the window where the mesh moment rises monotonically.

    The mesh moment ``dx * sqrt(H_K**2 - (dx + b)**2)`` peaks analytically at
    ``(-3b + sqrt(b**2 + 8 H_K**2)) / 4``; past that the force-displacement
    map folds back and stops being invertible.
    """
    if geom.kirigami_offset >= geom.kirigami_hypotenuse:
        raise DegenerateGeometryError("b >= H_K: mesh triangle is degenerate")
    peak = kirigami_peak(geom)
    limit = geom.domain_limit
    if peak <= limit:
        return OperatingRange(peak, LimitReason.PEAK)
    return OperatingRange(limit, LimitReason.DOMAIN)


def monotonic_window(geom, spring, material, band) -> OperatingRange:
    """Monotonic window of the full model, band included.

    Clearing the square roots from ``dF_A/dx = 0`` leaves a quadratic in
    ``u = dx + b``::

        2A u**2 - B u - A H_K**2 = 0,  A = k + K_B r**2,  B = k b + K_B r c

    with ``k = K_K E`` and ``r = H_B / H_K``. A band taut at rest can pull
    this peak slightly below the mesh-only peak; the window is the smaller of
    the two, so it never extends past :func:`operating_range`.
    """
    mesh = operating_range(geom)
    if not band.present:
        return mesh
    k = spring.spring_constant(material)
    r = geom.band_ratio
    kb = band.stiffness
    a = k + kb * r * r
    bq = k * geom.kirigami_offset + kb * r * geom.band_offset
    hk = geom.kirigami_hypotenuse
    u = (bq + math.sqrt(bq * bq + 8.0 * a * a * hk * hk)) / (4.0 * a)
    peak = max(u - geom.kirigami_offset, 0.0)
    if peak < mesh.delta_x_max:
        return OperatingRange(peak, LimitReason.PEAK)
    return mesh


def invert_applied_force(geom, spring, material, band, target_force,
                         full_output=False):
    """Mesh displacement at which the handle needs ``target_force`` (N).

    Solved by Brent's method on the monotonic window ``[0, dx_max]``, so the
    root is unique. Raises :class:`OutOfRangeError` when the target lies
    outside ``[F_A(0), F_A(dx_max)]`` and :class:`ConvergenceError` if the
    iteration cap is hit.

    With ``full_output=True`` returns ``(delta_x, InverseInfo)``.
    """
    target = float(target_force)
    _require_finite("target_force", target)
    window = monotonic_window(geom, spring, material, band)
    x_hi = window.delta_x_max

    def g(x):
        return evaluate_state(geom, spring, material, band, x).applied_force - target

    f_lo = g(0.0)
    f_hi = g(x_hi)
    if f_hi < 0:
        peak = f_hi + target
        raise OutOfRangeError(
            f"target force {target:.9g} N exceeds the peak force {peak:.9g} N "
            f"reached at delta_x={x_hi:.9g} mm",
            limit_force=peak, above=True,
        )
    if f_lo > 0:
        rest = f_lo + target
        raise OutOfRangeError(
            f"target force {target:.9g} N is below the rest force {rest:.9g} N",
            limit_force=rest, above=False,
        )

    if f_lo == 0:
        root, iters, calls = 0.0, 0, 2
    elif f_hi == 0:
        root, iters, calls = x_hi, 0, 2
    else:
        try:
            root, res = optimize.brentq(
                g, 0.0, x_hi, xtol=_SOLVER_XTOL, maxiter=INVERSE_MAXITER,
                full_output=True, disp=True,
            )
        except RuntimeError as exc:
            raise ConvergenceError(str(exc)) from exc
        iters, calls = res.iterations, res.function_calls + 2

    if not full_output:
        return root
    return root, InverseInfo(iters, calls, g(root), window)
