"""Spring-constant identification from force-displacement measurements.

Fits are least squares constrained through the origin, since neither spring
law has a pre-load. Sums use :func:`math.fsum`, which makes every fit
independent of sample order down to the last bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import AlignmentError, GroupingError, InputError, MetadataError, SingularFitError
from .statics import MaterialSpec

#: ``trial_id`` of a series produced by :func:`average_trials`.
AVERAGED = -1
#: Tolerance (mm) under which two displacement grids count as identical.
GRID_TOL = 1e-6
DEFAULT_SPREAD_THRESHOLD = 0.10


@dataclass(frozen=True)
class MeasurementSeries:
    """One trial of a tensile test: ordered ``(displacement mm, force N)`` pairs.

    ``n_trials`` counts the raw trials behind the series (1 unless it came out
    of :func:`average_trials`). ``synthetic`` marks model-generated data.
    """

    samples: tuple[tuple[float, float], ...]
    trial_id: int = 1
    material: MaterialSpec | None = None
    size_scale: float = 1.0
    label: str = ""
    n_trials: int = 1
    synthetic: bool = False

    def __post_init__(self):
        samples = tuple((float(x), float(f)) for x, f in self.samples)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "size_scale", float(self.size_scale))
        prev = None
        for x, f in samples:
            if not (math.isfinite(x) and math.isfinite(f)):
                raise InputError(f"non-finite sample ({x}, {f})")
            if x < 0:
                raise InputError(f"negative displacement {x}")
            if prev is not None and x <= prev:
                raise InputError(
                    f"displacements must be strictly increasing within a trial "
                    f"({prev} then {x})"
                )
            prev = x
        if not (math.isfinite(self.size_scale) and self.size_scale > 0):
            raise InputError(f"size_scale must be > 0, got {self.size_scale}")
        if self.n_trials < 1:
            raise InputError("n_trials must be >= 1")

    @property
    def displacement(self) -> np.ndarray:
        return np.array([x for x, _ in self.samples])

    @property
    def force(self) -> np.ndarray:
        return np.array([f for _, f in self.samples])

    def __len__(self):
        return len(self.samples)


@dataclass(frozen=True)
class FitResult:
    """Outcome of a through-origin fit.

    ``r_squared`` is ``1 - SS_res / SS_tot`` with ``SS_tot`` taken about the
    mean observed force. It can go negative for a poor through-origin fit and
    is reported as computed; it is NaN when every force is identical and the
    fit is not exact. ``free_slope`` and ``free_intercept`` come from an
    unconstrained line and are diagnostic only.
    """

    constant: float
    r_squared: float
    n_points: int
    max_abs_residual: float
    free_slope: float | None = None
    free_intercept: float | None = None
    n_series: int = 1
    n_trials: int = 1


def fit_through_origin(x: Sequence[float], y: Sequence[float]) -> FitResult:
    """Least-squares slope of ``y = k x``: ``k = sum(x y) / sum(x**2)``."""
    xs = [float(v) for v in x]
    ys = [float(v) for v in y]
    if len(xs) != len(ys):
        raise InputError("x and y differ in length")
    n = len(xs)
    if n < 2:
        raise SingularFitError(f"need at least 2 samples, got {n}")
    sxx = math.fsum(v * v for v in xs)
    if sxx == 0:
        raise SingularFitError("all regressors are zero; slope undefined")
    k = math.fsum(a * b for a, b in zip(xs, ys)) / sxx

    residuals = [b - k * a for a, b in zip(xs, ys)]
    ss_res = math.fsum(r * r for r in residuals)
    mean_y = math.fsum(ys) / n
    ss_tot = math.fsum((b - mean_y) ** 2 for b in ys)
    if ss_tot > 0:
        r2 = 1.0 - ss_res / ss_tot
    else:
        r2 = 1.0 if ss_res == 0 else math.nan

    free_slope = free_intercept = None
    mean_x = math.fsum(xs) / n
    sxx_c = math.fsum((a - mean_x) ** 2 for a in xs)
    if sxx_c > 0:
        free_slope = math.fsum((a - mean_x) * (b - mean_y) for a, b in zip(xs, ys)) / sxx_c
        free_intercept = mean_y - free_slope * mean_x

    return FitResult(
        constant=k,
        r_squared=r2,
        n_points=n,
        max_abs_residual=max(abs(r) for r in residuals),
        free_slope=free_slope,
        free_intercept=free_intercept,
    )


def _grids_match(a: MeasurementSeries, b: MeasurementSeries) -> bool:
    return len(a) == len(b) and all(
        abs(p[0] - q[0]) <= GRID_TOL for p, q in zip(a.samples, b.samples)
    )


def average_trials(series: Sequence[MeasurementSeries]) -> MeasurementSeries:
    """Pointwise mean force over repeated trials on a shared grid."""
    series = list(series)
    if not series:
        raise AlignmentError("no series to average")
    ref = series[0]
    for i, s in enumerate(series[1:], start=1):
        if not _grids_match(ref, s):
            raise AlignmentError(
                f"series {i} (trial {s.trial_id}) has a different displacement grid"
            )
        if s.material != ref.material:
            raise AlignmentError(f"series {i} (trial {s.trial_id}) has a different material")
        if s.size_scale != ref.size_scale:
            raise AlignmentError(f"series {i} (trial {s.trial_id}) has a different size_scale")

    samples = tuple(
        (pts[0][0], math.fsum(f for _, f in pts) / len(pts))
        for pts in zip(*(s.samples for s in series))
    )
    return MeasurementSeries(
        samples=samples,
        trial_id=AVERAGED,
        material=ref.material,
        size_scale=ref.size_scale,
        label=ref.label,
        n_trials=sum(s.n_trials for s in series),
        synthetic=any(s.synthetic for s in series),
    )


def fit_spring_constant(series: MeasurementSeries) -> FitResult:
    """Spring constant (N/mm) of a single series."""
    res = fit_through_origin(series.displacement, series.force)
    return _with_counts(res, [series])


def _with_counts(res: FitResult, series: Sequence[MeasurementSeries]) -> FitResult:
    return FitResult(
        **{**res.__dict__, "n_series": len(series),
           "n_trials": sum(s.n_trials for s in series)}
    )


def fit_spring_constant_pooled(datasets: Sequence[MeasurementSeries]) -> FitResult:
    """Spring constant fitted to the union of several series' samples."""
    datasets = list(datasets)
    if not datasets:
        raise MetadataError("no datasets given")
    xs = [x for s in datasets for x, _ in s.samples]
    ys = [f for s in datasets for _, f in s.samples]
    return _with_counts(fit_through_origin(xs, ys), datasets)


def fit_kirigami_stiffness_factor(datasets: Sequence[MeasurementSeries]) -> FitResult:
    """Pool ``(E * dx, F)`` over every series and fit ``K_K`` (mm)."""
    datasets = list(datasets)
    if not datasets:
        raise MetadataError("no datasets given")
    xs, ys = [], []
    for s in datasets:
        if s.material is None:
            raise MetadataError(
                f"series {s.label!r} trial {s.trial_id} has no Young's modulus"
            )
        e = s.material.youngs_modulus
        xs.extend(e * x for x, _ in s.samples)
        ys.extend(f for _, f in s.samples)
    return _with_counts(fit_through_origin(xs, ys), datasets)


@dataclass(frozen=True)
class ScaleInvarianceReport:
    """Per-size ``K_K`` fits and their relative spread ``(max - min) / min``."""

    groups: dict[float, FitResult]
    spread: float
    threshold: float
    consistent: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "consistent", self.spread <= self.threshold)


def group_by_scale(datasets: Iterable[MeasurementSeries]) -> dict[float, list[MeasurementSeries]]:
    groups: dict[float, list[MeasurementSeries]] = {}
    for s in datasets:
        groups.setdefault(s.size_scale, []).append(s)
    return dict(sorted(groups.items()))


def scale_invariance_report(datasets, threshold: float = DEFAULT_SPREAD_THRESHOLD):
    """Fit ``K_K`` per size group and test whether the groups agree.

    ``datasets`` is either a flat iterable of series (grouped by their
    ``size_scale``) or a mapping ``scale -> list of series``.
    """
    if hasattr(datasets, "items"):
        groups = dict(sorted(datasets.items()))
    else:
        groups = group_by_scale(datasets)
    if len(groups) < 2:
        raise GroupingError(f"need at least 2 size groups, got {len(groups)}")
    fits = {scale: fit_kirigami_stiffness_factor(g) for scale, g in groups.items()}
    slopes = [f.constant for f in fits.values()]
    lo, hi = min(slopes), max(slopes)
    spread = (hi - lo) / lo if lo > 0 else math.inf
    return ScaleInvarianceReport(groups=fits, spread=spread, threshold=float(threshold))
