"""Experiment configuration: JSON files with exact field names."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields

from .analytic import circle_curve, cylinder_circle, fourier_circle
from .geometry import AmbientSurface, PolyCurve, read_curve_csv, resample_uniform


class ConfigError(ValueError):
    """Malformed experiment configuration."""


@dataclass
class ExperimentConfig:
    ambient: dict
    inner: dict
    outer: dict
    t_end: float
    n_vertices: int = 256
    dt_safety: float = 0.4
    resample_threshold: float = 2.0
    min_sep_floor: float = 1e-3
    record_every: int = 50
    n_sources_per_boundary: int = 64
    collocation_factor: int = 2
    offset_ratio_in: float = 0.7
    offset_ratio_out: float = 1.3
    grid_n: int = 256
    residual_tol: float = 1e-3
    modulus_every: int = 50
    output_dir: str | None = None
    emit_svg: bool = False
    svg_every: int = 200

    @staticmethod
    def from_dict(data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(ExperimentConfig)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        required = {"ambient", "inner", "outer", "t_end"}
        missing = required - set(data)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        return ExperimentConfig(**data)

    def to_dict(self) -> dict:
        return asdict(self)


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return ExperimentConfig.from_dict(data)


def build_ambient(spec: dict) -> AmbientSurface:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("ambient spec needs a 'kind' key")
    kind = spec["kind"]
    if kind == "plane":
        return AmbientSurface.plane()
    if kind == "cylinder":
        return AmbientSurface.cylinder(spec.get("circumference", 1.0))
    if kind == "sphere":
        return AmbientSurface.sphere(spec.get("K0", 1.0))
    if kind == "hyperbolic":
        return AmbientSurface.hyperbolic(spec.get("K0", -1.0))
    raise ConfigError(f"unknown ambient kind {kind!r}")


def build_curve(spec: dict, ambient: AmbientSurface, n_vertices: int) -> PolyCurve:
    """Instantiate a curve spec; generated curves are validated at load time."""
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ConfigError("curve spec must be a one-key object")
    (variant, params), = spec.items()
    if variant == "circle":
        if ambient.period is not None:
            raise ConfigError("chart circles do not wind around the cylinder; "
                              "use geodesic_circle")
        return circle_curve(params["radius"], n_vertices,
                            center=tuple(params.get("center", (0.0, 0.0))))
    if variant == "fourier_circle":
        if ambient.period is not None:
            raise ConfigError("fourier_circle is not available on the cylinder")
        modes = [tuple(m) for m in params["modes"]]
        return fourier_circle(params["radius"], modes, n_vertices,
                              center=tuple(params.get("center", (0.0, 0.0))))
    if variant == "geodesic_circle":
        if ambient.period is None:
            raise ConfigError("geodesic_circle needs a cylinder ambient")
        return cylinder_circle(params["x"], n_vertices, ambient.period)
    if variant == "file":
        curve = read_curve_csv(params["path"], period=ambient.period)
        if curve.n != n_vertices:
            curve = resample_uniform(curve, n_vertices)
        return curve
    raise ConfigError(f"unknown curve spec variant {variant!r}")
