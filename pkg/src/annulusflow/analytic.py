"""Closed-form solutions and curve generators used as oracles.

Each oracle documents its own derivation so the numerical pipeline can be
checked against something computed independently of it:

* shrinking circle: r' = -1/r integrates to r(t)^2 = r0^2 - 2 t;
* concentric annulus: z -> log(z) / (2 pi) maps {r1 < |z| < r2} onto the band
  (log r1 / 2 pi, log r2 / 2 pi) x S^1 with unit circumference, so the
  modulus is log(r2 / r1) / (2 pi);
* grim reaper: the graph x = -log cos y translates at unit speed in x;
* sphere latitude circle: on the unit sphere a latitude circle at polar angle
  theta has geodesic curvature cot(theta), so theta' = -cot(theta), i.e.
  d(cos theta)/dt = cos theta and cos theta(t) = cos theta0 * e^t;
* Moebius transform: disc automorphisms preserve the modulus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import AmbientSurface, NestedAnnulus, PolyCurve


class ExtinctCircleError(ValueError):
    """Requested a shrinking circle past its extinction time."""


class CapExtinctionError(ValueError):
    """Requested a shrinking latitude circle past cap extinction."""


# ---------------------------------------------------------------------------
# curve generators


def circle_curve(radius: float, n: int, center=(0.0, 0.0)) -> PolyCurve:
    """Regular n-gon inscribed in the circle, counter-clockwise."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    angles = 2.0 * np.pi * np.arange(n) / n
    v = np.column_stack([np.cos(angles), np.sin(angles)]) * radius + np.asarray(center, dtype=float)
    return PolyCurve(v, closed=True)


def fourier_circle(radius: float, modes, n: int, center=(0.0, 0.0)) -> PolyCurve:
    """Radially perturbed circle r(s) = radius (1 + sum a cos(2 pi m s + p)).

    modes is a list of (mode, amplitude, phase) triples; small amplitudes keep
    the curve simple and star-shaped.
    """
    s = np.arange(n) / n
    r = np.ones(n)
    for mode, amplitude, phase in modes:
        r += amplitude * np.cos(2.0 * np.pi * mode * s + phase)
    r *= radius
    angles = 2.0 * np.pi * s
    v = np.column_stack([r * np.cos(angles), r * np.sin(angles)]) + np.asarray(center, dtype=float)
    return PolyCurve(v, closed=True)


def cylinder_circle(x: float, n: int, circumference: float = 1.0) -> PolyCurve:
    """Geodesic circle at fixed axial coordinate, winding once in +y."""
    y = circumference * np.arange(n) / n
    v = np.column_stack([np.full(n, float(x)), y])
    return PolyCurve(v, closed=True, period=circumference)


def latitude_circle(theta: float, n: int, K0: float = 1.0) -> PolyCurve:
    """Stereographic-chart image of the latitude circle at polar angle theta."""
    if not 0.0 < theta < math.pi:
        raise ValueError("theta must be in (0, pi)")
    R = 1.0 / math.sqrt(K0)
    return circle_curve(R * math.tan(theta / 2.0), n)


def concentric_annulus(r1: float, r2: float, n: int = 256) -> NestedAnnulus:
    """Planar annulus bounded by concentric regular n-gons of radii r1 < r2."""
    return NestedAnnulus(circle_curve(r1, n), circle_curve(r2, n), AmbientSurface.plane())


def cylinder_band(x1: float, x2: float, n: int = 256,
                  circumference: float = 1.0) -> NestedAnnulus:
    """Annulus between two geodesic circles on the flat cylinder."""
    return NestedAnnulus(cylinder_circle(x1, n, circumference),
                         cylinder_circle(x2, n, circumference),
                         AmbientSurface.cylinder(circumference))


# ---------------------------------------------------------------------------
# exact laws


def circle_radius(r0: float, t: float) -> float:
    """Radius of a shrinking circle: sqrt(r0^2 - 2 t)."""
    if r0 <= 0:
        raise ValueError("r0 must be positive")
    rem = r0 * r0 - 2.0 * t
    if rem <= 0.0:
        raise ExtinctCircleError(f"circle of radius {r0} is extinct by t = {r0 * r0 / 2}")
    return math.sqrt(rem)


def concentric_modulus(r1: float, r2: float) -> float:
    """Modulus of the concentric annulus r1 < |z| < r2: log(r2/r1) / (2 pi)."""
    if not 0.0 < r1 < r2:
        raise ValueError(f"need 0 < r1 < r2, got ({r1}, {r2})")
    return math.log(r2 / r1) / (2.0 * math.pi)


def sphere_latitude_angle(theta0: float, t: float) -> float:
    """Polar angle of a latitude circle on the unit sphere after time t.

    Solves theta' = -cot(theta): cos(theta(t)) = cos(theta0) e^t.  The circle
    disappears into the cap when the right-hand side reaches 1.
    """
    if not 0.0 < theta0 <= math.pi / 2.0:
        raise ValueError("theta0 must lie in (0, pi/2]")
    c = math.cos(theta0) * math.exp(t)
    if c >= 1.0:
        raise CapExtinctionError(
            f"latitude circle at theta0 = {theta0} extinct by t = {-math.log(math.cos(theta0))}")
    return math.acos(c)


def grim_reaper(n: int, y_max: float) -> PolyCurve:
    """Open polyline on the translating-soliton graph x = -log cos y.

    Vertices sample y uniformly in [-y_max, y_max]; the array is constructed
    symmetrically so the curve is bitwise invariant under y -> -y.
    """
    if n < 2:
        raise ValueError("need at least 2 vertices")
    if not 0.0 < y_max < math.pi / 2.0:
        raise ValueError("y_max must lie in (0, pi/2)")
    top = y_max * np.arange(n - 1, 0, -2) / (n - 1)
    if n % 2:
        y = np.concatenate([-top, [0.0], top[::-1]])
    else:
        y = np.concatenate([-top, top[::-1]])
    x = -np.log(np.cos(y))
    return PolyCurve(np.column_stack([x, y]), closed=False)


def grim_reaper_translation_check(n: int, y_max: float, tau: float,
                                  dt_safety: float = 0.4) -> float:
    """Evolve the truncated grim reaper and compare with its exact translate.

    The open polyline flows by its discrete curvature with both endpoints
    pinned to the exactly translated curve (the truncation policy); returns
    the Hausdorff distance to the x-translate by tau.
    """
    from .flow import flow_open_curve
    from .geometry import hausdorff_distance

    curve = grim_reaper(n, y_max)
    ends = curve.vertices[[0, -1]].copy()

    def pin(t):
        return ends + np.array([t, 0.0])

    if tau == 0.0:
        evolved = curve
    else:
        evolved = flow_open_curve(curve, tau, dt_safety=dt_safety, pin=pin)
    target = curve.translated((tau, 0.0))
    return hausdorff_distance(evolved, target)


def mobius_transform(annulus: NestedAnnulus, a: complex) -> tuple[NestedAnnulus, float]:
    """Image of a planar annulus under z -> (z - a) / (1 - conj(a) z).

    The annulus is first scaled by 1 / (2 max |z|) so it sits inside the unit
    disc; the scale is returned alongside the image.  Both the pre-scaling and
    the disc automorphism are conformal, so the modulus is unchanged.
    """
    if annulus.ambient.kind != "plane":
        raise ValueError("mobius_transform needs a planar annulus")
    a = complex(a)
    if abs(a) >= 1.0:
        raise ValueError("|a| must be < 1")
    rmax = max(np.hypot(*c.vertices.T).max() for c in (annulus.inner, annulus.outer))
    scale = 1.0 / (2.0 * rmax)

    def image(curve: PolyCurve) -> PolyCurve:
        z = scale * (curve.vertices[:, 0] + 1j * curve.vertices[:, 1])
        w = (z - a) / (1.0 - np.conj(a) * z)
        return PolyCurve(np.column_stack([w.real, w.imag]), closed=True)

    inner = image(annulus.inner)
    outer = image(annulus.outer)
    from .geometry import enclosed_area
    if enclosed_area(inner) < 0:
        inner = inner.reversed()
    if enclosed_area(outer) < 0:
        outer = outer.reversed()
    return NestedAnnulus(inner, outer, AmbientSurface.plane()), scale


# ---------------------------------------------------------------------------
# oracle registry (CLI-facing)


@dataclass(frozen=True)
class AnalyticOracle:
    """A named generator plus the closed form it satisfies."""

    name: str
    generate: Callable[..., PolyCurve]
    exact_value: Callable[..., float]
    doc: str


ORACLES: dict[str, AnalyticOracle] = {
    "circle": AnalyticOracle(
        "circle", lambda n=256, radius=1.0: circle_curve(radius, n),
        lambda radius=1.0, t=0.0: circle_radius(radius, t),
        "shrinking circle, r(t) = sqrt(r0^2 - 2t)"),
    "grim_reaper": AnalyticOracle(
        "grim_reaper", lambda n=512, y_max=1.4: grim_reaper(n, y_max),
        lambda t=0.0, **_: t,
        "translating soliton x = -log cos y, unit speed in x"),
    "cylinder_circle": AnalyticOracle(
        "cylinder_circle",
        lambda n=256, x=0.0, circumference=1.0: cylinder_circle(x, n, circumference),
        lambda **_: 0.0,
        "geodesic circle on the flat cylinder, stationary under the flow"),
    "latitude_circle": AnalyticOracle(
        "latitude_circle", lambda n=256, theta=1.0: latitude_circle(theta, n),
        lambda theta=1.0, t=0.0: sphere_latitude_angle(theta, t),
        "sphere latitude circle, cos theta(t) = cos theta0 e^t"),
}
