"""Statics, identification and design tools for pivot-actuated kirigami utensils."""

from .design import (
    ClosureTrajectory,
    DesignTarget,
    Objective,
    TorqueProfile,
    parameter_sweep,
    scale_geometry,
    solve_band_stiffness,
    solve_material_modulus,
    torque_profile,
)
from .errors import *  # noqa: F401,F403
from .identification import (
    AVERAGED,
    FitResult,
    MeasurementSeries,
    average_trials,
    fit_kirigami_stiffness_factor,
    fit_spring_constant,
    fit_spring_constant_pooled,
    fit_through_origin,
    scale_invariance_report,
)
from .io import ToolConfig, config_from_dict, load_config, read_measurements, write_measurements
from .statics import (
    TABLE1_BAND,
    TABLE1_GEOMETRY,
    TABLE1_MATERIAL,
    TABLE1_SPRING,
    ActuationState,
    BandSpec,
    KirigamiSpringModel,
    LimitReason,
    MaterialSpec,
    OperatingRange,
    UtensilGeometry,
    applied_force,
    band_displacement,
    evaluate_state,
    invert_applied_force,
    kirigami_force,
    moment_residual,
    monotonic_window,
    operating_range,
    pivot_torque,
)

__version__ = "0.1.0"
