"""Curve shortening flow for nested curves with conformal-modulus tracking."""

from .analytic import (
    ORACLES,
    AnalyticOracle,
    CapExtinctionError,
    ExtinctCircleError,
    circle_curve,
    circle_radius,
    concentric_annulus,
    concentric_modulus,
    cylinder_band,
    cylinder_circle,
    fourier_circle,
    grim_reaper,
    grim_reaper_translation_check,
    latitude_circle,
    mobius_transform,
    sphere_latitude_angle,
)
from .capacity import (
    CapacitySolution,
    ResolutionError,
    SolverAccuracyError,
    SolverParams,
    boundary_gradient,
    energy_variation_rhs,
    kappa_identity_residual,
    modulus,
    solve_capacity_fd,
    solve_capacity_mfs,
)
from .config import ConfigError, ExperimentConfig, load_config
from .experiment import build_annulus, run_experiment
from .flow import (
    AnnulusCollapseError,
    DegenerateFlowError,
    FlowConfig,
    FlowError,
    FlowState,
    csf_run,
    csf_step,
    csf_velocity,
    flow_open_curve,
    stable_dt,
)
from .geometry import (
    AmbientSurface,
    AnnulusError,
    CurveError,
    DomainError,
    NestedAnnulus,
    PolyCurve,
    curve_length,
    discrete_curvature,
    enclosed_area,
    gauss_curvature,
    hausdorff_distance,
    min_separation,
    read_curve_csv,
    resample_uniform,
    write_curve_csv,
)
from .svg import emit_svg
from .trace import FlowTrace, TraceRecord
from .verify import CheckResult, format_report, run_checks

__version__ = "0.1.0"
