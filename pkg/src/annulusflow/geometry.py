"""Discrete curves in conformal coordinate charts.

Curves are plain polylines (closed or open) in a 2-D chart.  On the flat
cylinder the second coordinate is identified modulo the circumference; curves
carry the period so that lengths, curvature stencils and separation tests all
unwrap to the nearest period copy.

Conventions
-----------
Closed curves are stored counter-clockwise (positive shoelace area); on the
cylinder the analogue is winding number +1 in the periodic direction.  The
disc-outward unit normal at a vertex is the unit chord rotated by -90 degrees.
The scalar curvature follows kappa_vec = -kappa * nu with nu outward, so a
convex counter-clockwise curve of radius r has kappa = +1/r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels


class CurveError(ValueError):
    """Invalid polyline (too few vertices, repeated points, self-intersection)."""


class DomainError(ValueError):
    """Chart point outside the domain of the conformal chart."""


class AnnulusError(ValueError):
    """Curve pair does not bound a valid nested annulus."""


def _wrap(values, period):
    """Map values to the representative in (-period/2, period/2]."""
    return values - period * np.round(values / period)


# ---------------------------------------------------------------------------
# curves


@dataclass(frozen=True)
class PolyCurve:
    """An ordered polyline in chart coordinates.

    vertices : (n, 2) float array
    closed   : whether the last vertex connects back to the first
    period   : identification period of the second coordinate (cylinder chart),
               or None for non-periodic charts
    """

    vertices: np.ndarray
    closed: bool = True
    period: float | None = None

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.vertices, dtype=float))
        if v.ndim != 2 or v.shape[1] != 2:
            raise CurveError(f"vertices must be (n, 2), got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise CurveError("vertices must be finite")
        minimum = 8 if self.closed else 2
        if len(v) < minimum:
            raise CurveError(f"need at least {minimum} vertices, got {len(v)}")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        if np.any(self.edge_lengths() <= 0.0):
            raise CurveError("consecutive vertices must be distinct")
        if self.closed and not is_simple(self):
            raise CurveError("closed curve is not simple")

    @property
    def n(self) -> int:
        return len(self.vertices)

    def edge_vectors(self) -> np.ndarray:
        """Edge i -> i+1 (with the closing edge for closed curves), unwrapped."""
        v = self.vertices
        if self.closed:
            e = np.roll(v, -1, axis=0) - v
        else:
            e = v[1:] - v[:-1]
        if self.period is not None:
            e = e.copy()
            e[:, 1] = _wrap(e[:, 1], self.period)
        return e

    def edge_lengths(self) -> np.ndarray:
        e = self.edge_vectors()
        return np.hypot(e[:, 0], e[:, 1])

    def unwrapped(self) -> np.ndarray:
        """Vertices with the periodic coordinate made continuous along the curve."""
        v = self.vertices
        if self.period is None:
            return np.array(v)
        dy = _wrap(np.diff(v[:, 1]), self.period)
        y = v[0, 1] + np.concatenate(([0.0], np.cumsum(dy)))
        return np.column_stack([v[:, 0], y])

    def segments(self) -> tuple[np.ndarray, np.ndarray]:
        """Segment start/end points (unwrapped); includes the closing segment."""
        u = self.unwrapped()
        if not self.closed:
            return u[:-1], u[1:]
        close = u[-1] + (self.vertices[0] - self.vertices[-1]) if self.period is None \
            else u[-1] + np.array([self.vertices[0, 0] - self.vertices[-1, 0],
                                   _wrap(self.vertices[0, 1] - self.vertices[-1, 1], self.period)])
        starts = u
        ends = np.vstack([u[1:], close])
        return starts, ends

    def reversed(self) -> "PolyCurve":
        return PolyCurve(self.vertices[::-1], self.closed, self.period)

    def rolled(self, k: int) -> "PolyCurve":
        """Same closed polyline with the vertex indexing rotated by k."""
        if not self.closed:
            raise CurveError("can only roll closed curves")
        return PolyCurve(np.roll(self.vertices, -k, axis=0), True, self.period)

    def translated(self, offset) -> "PolyCurve":
        return PolyCurve(self.vertices + np.asarray(offset, dtype=float),
                         self.closed, self.period)


def curve_length(curve: PolyCurve) -> float:
    """Total chart length of the polyline."""
    return float(curve.edge_lengths().sum())


def enclosed_area(curve: PolyCurve) -> float:
    """Signed chart area, positive for counter-clockwise orientation.

    On the cylinder this is the contour integral of x dy with wrapped
    increments, which for a once-winding curve measures the area between the
    curve and the x = 0 circle, and reduces to the shoelace formula otherwise.
    """
    if not curve.closed:
        raise CurveError("enclosed_area requires a closed curve")
    v = curve.vertices
    x = v[:, 0]
    dy = np.roll(v[:, 1], -1) - v[:, 1]
    if curve.period is not None:
        dy = _wrap(dy, curve.period)
    xm = 0.5 * (x + np.roll(x, -1))
    return float(np.sum(xm * dy))


def winding_number(curve: PolyCurve) -> int:
    """Signed number of times the curve winds around the periodic direction."""
    if curve.period is None:
        return 0
    dy = np.roll(curve.vertices[:, 1], -1) - curve.vertices[:, 1] if curve.closed \
        else np.diff(curve.vertices[:, 1])
    total = _wrap(dy, curve.period).sum()
    return int(round(total / curve.period))


def resample_uniform(curve: PolyCurve, n: int) -> PolyCurve:
    """Redistribute n vertices equally spaced in arc length along the polyline.

    The first vertex stays fixed and the orientation is preserved, so the
    operation is idempotent for a curve that is already uniform.
    """
    minimum = 8 if curve.closed else 2
    if n < minimum:
        raise CurveError(f"resample target {n} below minimum {minimum}")
    u = curve.unwrapped()
    if curve.closed:
        starts, ends = curve.segments()
        pts = np.vstack([starts, ends[-1]])
    else:
        pts = u
    seg = np.hypot(*(pts[1:] - pts[:-1]).T)
    s = np.concatenate(([0.0], np.cumsum(seg)))
    total = s[-1]
    if curve.closed:
        targets = total * np.arange(n) / n
    else:
        targets = np.linspace(0.0, total, n)
    new = np.column_stack([np.interp(targets, s, pts[:, 0]),
                           np.interp(targets, s, pts[:, 1])])
    if curve.period is not None:
        new[:, 1] = np.mod(new[:, 1], curve.period)
    return PolyCurve(new, curve.closed, curve.period)


def discrete_curvature(curve: PolyCurve) -> np.ndarray:
    """Curvature vectors from the three-point polyline Laplace-Beltrami stencil.

    kappa_i = (2 / (l_i + l_{i+1})) * ((v_{i+1}-v_i)/l_{i+1} - (v_i-v_{i-1})/l_i)

    Closed curves use cyclic indexing; open-curve endpoints get the zero vector.
    For a regular polygon inscribed in a circle of radius r the stencil returns
    exactly 1/r, pointing at the centre.
    """
    e = curve.edge_vectors()
    ell = np.hypot(e[:, 0], e[:, 1])
    t = e / ell[:, None]
    if curve.closed:
        e_prev = np.roll(t, 1, axis=0)
        l_prev = np.roll(ell, 1)
        k = 2.0 / (l_prev + ell)[:, None] * (t - e_prev)
        return k
    k = np.zeros_like(curve.vertices)
    k[1:-1] = 2.0 / (ell[:-1] + ell[1:])[:, None] * (t[1:] - t[:-1])
    return k


def outward_normals(curve: PolyCurve) -> np.ndarray:
    """Unit disc-outward normals at vertices for a counter-clockwise curve.

    The vertex normal is the unit chord v_{i+1} - v_{i-1} rotated by -90
    degrees; endpoints of open curves use the single adjacent edge.
    """
    e = curve.edge_vectors()
    if curve.closed:
        chord = e + np.roll(e, 1, axis=0)
    else:
        chord = np.empty_like(curve.vertices)
        chord[1:-1] = e[1:] + e[:-1]
        chord[0] = e[0]
        chord[-1] = e[-1]
    norm = np.hypot(chord[:, 0], chord[:, 1])
    t = chord / norm[:, None]
    return np.column_stack([t[:, 1], -t[:, 0]])


def scalar_curvature(curve: PolyCurve, normals: np.ndarray | None = None) -> np.ndarray:
    """Scalar curvature from kappa_vec = -kappa * nu against the given normals.

    Defaults to the curve's own disc-outward normals; pass the negated normals
    to get the annulus-outward convention on the inner boundary of an annulus.
    """
    if normals is None:
        normals = outward_normals(curve)
    k = discrete_curvature(curve)
    return -np.einsum("ij,ij->i", k, normals)


# ---------------------------------------------------------------------------
# intersection and separation tests


def is_simple(curve: PolyCurve) -> bool:
    """O(n^2) proper-crossing test; touching adjacent endpoints are exempt.

    On the cylinder the unwrapped polyline is also tested against its period
    translates.
    """
    starts, ends = curve.segments()
    if _kernels.self_cross(starts, ends, curve.closed):
        return False
    if curve.period is not None:
        extent = starts[:, 1].max() - starts[:, 1].min() + curve.period
        kmax = max(1, int(math.ceil(extent / curve.period)))
        for k in range(1, kmax + 1):
            shift = np.array([0.0, k * curve.period])
            if _kernels.any_cross(starts, ends, starts + shift, ends + shift):
                return False
    return True


def curves_cross(a: PolyCurve, b: PolyCurve) -> bool:
    """Whether any segment of a properly crosses any segment of b."""
    sa, ea = a.segments()
    for sb, eb in _shifted_segments(a, b):
        if _kernels.any_cross(sa, ea, sb, eb):
            return True
    return False


def _shifted_segments(a: PolyCurve, b: PolyCurve):
    sb, eb = b.segments()
    period = a.period if a.period is not None else b.period
    if period is None:
        yield sb, eb
        return
    sa, _ = a.segments()
    lo = math.floor((sa[:, 1].min() - eb[:, 1].max()) / period) - 1
    hi = math.ceil((sa[:, 1].max() - eb[:, 1].min()) / period) + 1
    for k in range(lo, hi + 1):
        shift = np.array([0.0, k * period])
        yield sb + shift, eb + shift


def min_separation(a: PolyCurve, b: PolyCurve) -> float:
    """Minimum chart distance between the two polylines.

    Exact for disjoint polylines (the minimum between non-crossing segments is
    attained at an endpoint); crossing polylines return 0.
    """
    sa, ea = a.segments()
    pa = np.vstack([sa, ea[-1:]])
    best = np.inf
    for sb, eb in _shifted_segments(a, b):
        if _kernels.any_cross(sa, ea, sb, eb):
            return 0.0
        pb = np.vstack([sb, eb[-1:]])
        best = min(best,
                   _kernels.min_sq_point_seg(pa, sb, eb),
                   _kernels.min_sq_point_seg(pb, sa, ea))
    return float(math.sqrt(best))


def hausdorff_distance(a: PolyCurve, b: PolyCurve) -> float:
    """Symmetric Hausdorff distance between two planar polylines."""
    sa, ea = a.segments()
    sb, eb = b.segments()
    pa = np.vstack([sa, ea[-1:]])
    pb = np.vstack([sb, eb[-1:]])
    d_ab = _kernels._point_segment_sq_np(pa, sb, eb).min(axis=1).max()
    d_ba = _kernels._point_segment_sq_np(pb, sa, ea).min(axis=1).max()
    return float(math.sqrt(max(d_ab, d_ba)))


# ---------------------------------------------------------------------------
# ambient surfaces


@dataclass(frozen=True)
class AmbientSurface:
    """A constant-curvature surface described by one conformal chart.

    The metric is e^{2 phi} (dx^2 + dy^2); the Gauss curvature is
    K = -e^{-2 phi} laplacian(phi) and equals the declared constant K0
    everywhere for the built-in kinds.

    kinds: "plane", "cylinder" (second coordinate mod circumference),
    "sphere" (stereographic chart, K0 > 0),
    "hyperbolic" (Poincare disc chart, K0 < 0).
    """

    kind: str
    K0: float = 0.0
    circumference: float | None = None
    chart_radius_max: float = 10.0

    def __post_init__(self):
        if self.kind not in ("plane", "cylinder", "sphere", "hyperbolic"):
            raise ValueError(f"unknown ambient kind {self.kind!r}")
        if self.kind == "cylinder" and (self.circumference is None or self.circumference <= 0):
            raise ValueError("cylinder needs a positive circumference")
        if self.kind == "sphere" and self.K0 <= 0:
            raise ValueError("sphere needs K0 > 0")
        if self.kind == "hyperbolic" and self.K0 >= 0:
            raise ValueError("hyperbolic disc needs K0 < 0")
        if self.kind in ("plane", "cylinder") and self.K0 != 0.0:
            raise ValueError("flat ambients have K0 = 0")

    @staticmethod
    def plane() -> "AmbientSurface":
        return AmbientSurface("plane")

    @staticmethod
    def cylinder(circumference: float = 1.0) -> "AmbientSurface":
        return AmbientSurface("cylinder", circumference=circumference)

    @staticmethod
    def sphere(K0: float = 1.0) -> "AmbientSurface":
        return AmbientSurface("sphere", K0=K0)

    @staticmethod
    def hyperbolic(K0: float = -1.0) -> "AmbientSurface":
        return AmbientSurface("hyperbolic", K0=K0)

    @property
    def period(self) -> float | None:
        return self.circumference if self.kind == "cylinder" else None

    def _check_domain(self, p: np.ndarray):
        r2 = np.einsum("...d,...d->...", p, p)
        if self.kind == "sphere":
            if np.any(r2 > self.chart_radius_max ** 2):
                raise DomainError("point beyond the stereographic chart-safety radius")
        elif self.kind == "hyperbolic":
            if np.any(r2 >= 1.0):
                raise DomainError("point outside the Poincare disc")
        return r2

    def in_domain(self, p) -> bool:
        try:
            self._check_domain(np.asarray(p, dtype=float))
        except DomainError:
            return False
        return True

    def phi(self, p) -> np.ndarray:
        """Conformal factor phi at chart point(s) p."""
        p = np.asarray(p, dtype=float)
        r2 = self._check_domain(p)
        if self.kind in ("plane", "cylinder"):
            return np.zeros(np.shape(r2))
        if self.kind == "sphere":
            R2 = 1.0 / self.K0
            return np.log(2.0 * R2 / (R2 + r2))
        k = -self.K0
        return np.log(2.0 / (math.sqrt(k) * (1.0 - r2)))

    def grad_phi(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        r2 = self._check_domain(p)
        if self.kind in ("plane", "cylinder"):
            return np.zeros_like(p)
        if self.kind == "sphere":
            R2 = 1.0 / self.K0
            return -2.0 * p / (R2 + r2)[..., None]
        return 2.0 * p / (1.0 - r2)[..., None]

    def laplace_phi(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        r2 = self._check_domain(p)
        if self.kind in ("plane", "cylinder"):
            return np.zeros(np.shape(r2))
        if self.kind == "sphere":
            R2 = 1.0 / self.K0
            return -4.0 * R2 / (R2 + r2) ** 2
        return 4.0 / (1.0 - r2) ** 2

    def gauss_curvature(self, p) -> np.ndarray:
        """K = -e^{-2 phi} laplacian(phi), evaluated at chart point(s) p."""
        return -np.exp(-2.0 * self.phi(p)) * self.laplace_phi(p)


def gauss_curvature(ambient: AmbientSurface, p) -> float | np.ndarray:
    """Gauss curvature of the ambient surface at chart point(s) p."""
    out = ambient.gauss_curvature(p)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# nested annulus


@dataclass
class NestedAnnulus:
    """Two disjoint nested closed curves bounding a doubly connected region.

    Validated on construction; treat instances as immutable.  min_sep caches
    the minimum boundary separation computed during validation.
    """

    inner: PolyCurve
    outer: PolyCurve
    ambient: AmbientSurface = field(default_factory=AmbientSurface.plane)
    min_sep: float = field(init=False, repr=False)

    def __post_init__(self):
        inner, outer, ambient = self.inner, self.outer, self.ambient
        if not (inner.closed and outer.closed):
            raise AnnulusError("annulus boundaries must be closed curves")
        period = ambient.period
        if inner.period != period or outer.period != period:
            raise AnnulusError("curve period does not match the ambient chart")
        for curve in (inner, outer):
            if not ambient.in_domain(curve.vertices):
                raise AnnulusError("curve leaves the chart domain")
        if period is not None:
            if winding_number(inner) != 1 or winding_number(outer) != 1:
                raise AnnulusError("cylinder curves must wind once (+1) around the periodic direction")
            if inner.unwrapped()[:, 0].max() >= outer.unwrapped()[:, 0].min():
                raise AnnulusError("inner curve must lie strictly below the outer in the axial coordinate")
        else:
            if enclosed_area(inner) <= 0 or enclosed_area(outer) <= 0:
                raise AnnulusError("annulus boundaries must be counter-clockwise")
            if not _kernels.all_points_in_polygon(inner.vertices, outer.vertices):
                raise AnnulusError("inner curve must lie inside the outer curve")
        sep = min_separation(inner, outer)
        if sep <= 0.0:
            raise AnnulusError("boundary curves intersect")
        self.min_sep = sep


# ---------------------------------------------------------------------------
# curve file format


def write_curve_csv(curve: PolyCurve, path):
    """Write the curve as CSV: a '# closed=...' header then one 'x,y' per line."""
    with open(path, "w") as fh:
        fh.write(f"# closed={'true' if curve.closed else 'false'}\n")
        for x, y in curve.vertices:
            fh.write(f"{x:.17g},{y:.17g}\n")


def read_curve_csv(path, period: float | None = None) -> PolyCurve:
    """Read a curve written by write_curve_csv; round-trips bit-faithfully."""
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("# closed="):
            raise CurveError(f"{path}: missing '# closed=' header")
        closed = header.split("=", 1)[1].strip().lower() == "true"
        rows = [line.strip().split(",") for line in fh if line.strip()]
    vertices = np.array([[float(a), float(b)] for a, b in rows])
    return PolyCurve(vertices, closed=closed, period=period)
