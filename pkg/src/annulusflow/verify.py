"""Built-in verification suite.

Each check exercises one guarantee of the numerical laboratory end to end
against an independently derived value (closed-form law, conformal-map
oracle, or cross-solver comparison) and reports PASS/FAIL with the measured
and expected quantities.  The acceptance tests are thin wrappers over this
module, and the CLI `verify` subcommand runs it directly.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .analytic import (
    circle_radius,
    concentric_annulus,
    concentric_modulus,
    cylinder_band,
    fourier_circle,
    grim_reaper,
    grim_reaper_translation_check,
    latitude_circle,
    mobius_transform,
    sphere_latitude_angle,
)
from .capacity import (
    SolverParams,
    energy_variation_rhs,
    kappa_identity_residual,
    modulus,
    solve_capacity_fd,
    solve_capacity_mfs,
)
from .flow import FlowConfig, FlowState, csf_run, csf_step, csf_velocity
from .geometry import AmbientSurface, NestedAnnulus, curve_length, outward_normals

log = logging.getLogger(__name__)

H_CONCENTRIC_12 = math.log(2.0) / (2.0 * math.pi)


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: str
    expected: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: measured {self.measured}; expected {self.expected}"


CHECKS: dict = {}


def _check(name):
    def register(fn):
        CHECKS[name] = fn
        return fn
    return register


# ---------------------------------------------------------------------------
# shared runs


def _csf_normal_speeds(annulus):
    """Outward-normal speeds (out of the annulus) of CSF on both boundaries."""
    return tuple(
        np.einsum("ij,ij->i", csf_velocity(c, annulus.ambient), s * outward_normals(c))
        for c, s in ((annulus.inner, -1.0), (annulus.outer, 1.0)))


def _modulus_recorder(params=None):
    params = params or SolverParams()

    def recorder(state, rec):
        sol = solve_capacity_mfs(state.annulus, params)
        rec.h = sol.h
        rec.E = sol.E
    return recorder


def _fourier_pair(seed: int) -> NestedAnnulus:
    rng = np.random.default_rng(seed)

    def modes():
        ms = rng.choice(np.arange(2, 7), size=3, replace=False)
        return [(int(m), float(rng.uniform(0.01, 0.05)), float(rng.uniform(0, 2 * np.pi)))
                for m in ms]

    inner = fourier_circle(1.0, modes(), 256)
    outer = fourier_circle(2.0, modes(), 256)
    return NestedAnnulus(inner, outer, AmbientSurface.plane())


@lru_cache(maxsize=1)
def _fourier_traces():
    traces = []
    cfg = FlowConfig(t_end=0.05, record_every=25)
    for i in range(5):
        ann = _fourier_pair(1000 + i)
        traces.append(csf_run(ann, cfg, _modulus_recorder()))
    return tuple(traces)


@lru_cache(maxsize=1)
def _sphere_trace():
    ann = NestedAnnulus(latitude_circle(0.8, 128), latitude_circle(1.2, 128),
                        AmbientSurface.sphere(1.0))
    cfg = FlowConfig(t_end=0.2, n_vertices=128, record_every=200)
    return csf_run(ann, cfg, _modulus_recorder())


def _analytic_concentric_rate(r1: float, r2: float) -> float:
    """dE/dt of the shrinking concentric pair: differentiate E = pi/log(r2/r1)."""
    return -math.pi * (1.0 / r1 ** 2 - 1.0 / r2 ** 2) / math.log(r2 / r1) ** 2


# ---------------------------------------------------------------------------
# checks


@_check("concentric_modulus")
def check_concentric_modulus() -> CheckResult:
    """Modulus of the (1, 2) annulus against the log-map value, both solvers."""
    t0 = time.perf_counter()
    ann = concentric_annulus(1.0, 2.0, 256)
    err_mfs = abs(solve_capacity_mfs(ann).h - H_CONCENTRIC_12)
    err_fd = abs(solve_capacity_fd(ann).h - H_CONCENTRIC_12)
    elapsed = time.perf_counter() - t0
    ok = err_mfs < 1e-6 and err_fd < 2e-3 and elapsed < 1.0
    return CheckResult("concentric_modulus", ok,
                       f"MFS err {err_mfs:.2e}, FD err {err_fd:.2e}, {elapsed:.2f} s",
                       "MFS err < 1e-6, FD err < 2e-3, runtime < 1 s")


@_check("circle_law")
def check_circle_law() -> CheckResult:
    """Concentric circles follow r(t) = sqrt(r0^2 - 2t) and lose area at 2 pi."""
    ann = concentric_annulus(1.0, 2.0, 256)
    cfg = FlowConfig(t_end=0.45, record_every=50)
    radius_errs = []

    def rec(state, r):
        for curve, r0 in ((state.annulus.inner, 1.0), (state.annulus.outer, 2.0)):
            radius_errs.append(abs(curve_length(curve) / (2 * math.pi)
                                   - circle_radius(r0, state.t)))

    trace = csf_run(ann, cfg, rec)
    first, last = trace.records[0], trace.records[-1]
    dt = last.t - first.t
    rate_errs = [abs((first.area_inner - last.area_inner) / dt - 2 * math.pi) / (2 * math.pi),
                 abs((first.area_outer - last.area_outer) / dt - 2 * math.pi) / (2 * math.pi)]
    ok = max(radius_errs) < 1e-3 and max(rate_errs) < 0.01
    return CheckResult("circle_law", ok,
                       f"radius err {max(radius_errs):.2e}, area rate err {max(rate_errs):.2e}",
                       "radius err < 1e-3, area decay within 1% of 2 pi")


@_check("plane_monotonicity")
def check_plane_monotonicity() -> CheckResult:
    """h strictly increases along the flow for generic nested planar pairs."""
    worst_rate = math.inf
    worst_margin = math.inf
    strict = True
    for trace in _fourier_traces():
        h = trace.column("h")
        strict &= bool(np.all(np.diff(h) > 0))
        worst_rate = min(worst_rate, float(np.nanmin(trace.column("dlogh_dt"))))
        worst_margin = min(worst_margin, float(h[-1] - h[0]))
    ok = strict and worst_rate >= -1e-6 and worst_margin > 1e-4
    return CheckResult("plane_monotonicity", ok,
                       f"strict={strict}, min dlogh_dt {worst_rate:.3e}, min gain {worst_margin:.3e}",
                       "strictly increasing, dlogh_dt >= -1e-6, gain > 1e-4")


@_check("sphere_rate")
def check_sphere_rate() -> CheckResult:
    """d/dt log h >= K0 on the sphere, and h matches the latitude-law oracle."""
    trace = _sphere_trace()
    interior = trace.records[1:-1]
    min_rate = min(r.dlogh_dt for r in interior)
    h_err = 0.0
    for r in trace.records:
        t1 = sphere_latitude_angle(0.8, r.t)
        t2 = sphere_latitude_angle(1.2, r.t)
        h_exact = math.log(math.tan(t2 / 2) / math.tan(t1 / 2)) / (2 * math.pi)
        h_err = max(h_err, abs(r.h - h_exact))
    ok = min_rate >= 0.98 and h_err < 1e-3
    return CheckResult("sphere_rate", ok,
                       f"min dlogh_dt {min_rate:.4f}, h err {h_err:.2e}",
                       "dlogh_dt >= 0.98 (K0 = 1), h err < 1e-3")


@_check("cylinder_rigidity")
def check_cylinder_rigidity() -> CheckResult:
    """Geodesic circles on the flat cylinder are exact fixed points."""
    ann = cylinder_band(0.3, 0.8, 64)
    v0 = (ann.inner.vertices.copy(), ann.outer.vertices.copy())
    h0 = modulus(ann)
    cfg = FlowConfig(t_end=math.inf, n_vertices=64)
    state = FlowState(0.0, ann)
    for _ in range(1000):
        state = csf_step(state, cfg)
    drift = max(np.abs(state.annulus.inner.vertices - v0[0]).max(),
                np.abs(state.annulus.outer.vertices - v0[1]).max())
    h1 = modulus(state.annulus)
    rate = (math.log(h1) - math.log(h0)) / state.t
    ok = drift <= 1e-10 and abs(rate) <= 1e-6
    return CheckResult("cylinder_rigidity", ok,
                       f"drift {drift:.1e}, |dlogh_dt| {abs(rate):.1e} over 1000 steps",
                       "drift <= 1e-10, |dlogh_dt| <= 1e-6")


@_check("energy_variation")
def check_energy_variation() -> CheckResult:
    """Boundary-integral dE/dt vs centered differences vs the analytic rate."""
    ann = concentric_annulus(1.0, 2.0, 256)
    cfg = FlowConfig(t_end=0.01, record_every=10)
    samples = []

    def rec(state, r):
        sol = solve_capacity_mfs(state.annulus)
        r.h, r.E = sol.h, sol.E
        samples.append((state.t, sol.E,
                        energy_variation_rhs(state.annulus, sol, _csf_normal_speeds(state.annulus))))

    trace = csf_run(ann, cfg, rec)
    k = len(samples) // 2
    t, _, boundary = samples[k]
    centered = (samples[k + 1][1] - samples[k - 1][1]) / (samples[k + 1][0] - samples[k - 1][0])
    analytic = _analytic_concentric_rate(circle_radius(1.0, t), circle_radius(2.0, t))
    errs = [abs(boundary - centered) / abs(analytic),
            abs(boundary - analytic) / abs(analytic),
            abs(centered - analytic) / abs(analytic)]
    ok = max(errs) < 0.02
    return CheckResult("energy_variation", ok,
                       f"dE/dt boundary {boundary:.4f}, centered {centered:.4f}, "
                       f"analytic {analytic:.4f}, worst rel err {max(errs):.2e}",
                       "pairwise agreement within 2%")


@_check("bochner_consistency")
def check_bochner_consistency() -> CheckResult:
    """-1/2 int |Hess u|^2 equals the boundary energy rate on concentric circles.

    For u = log(r/r1)/log(r2/r1), |Hess u|^2 = 2 a^2 / r^4 with
    a = 1/log(r2/r1); the radial quadrature must reproduce the closed-form
    rate exactly, and the numerical boundary integral must agree within 2%.
    """
    r1, r2 = 1.0, 2.0
    a = 1.0 / math.log(r2 / r1)
    closed_form = _analytic_concentric_rate(r1, r2)
    integral, _ = quad(lambda r: 2.0 * a * a / r ** 4 * 2.0 * math.pi * r, r1, r2)
    hess_side = -0.5 * integral
    analytic_gap = abs(hess_side - closed_form)
    ann = concentric_annulus(r1, r2, 256)
    sol = solve_capacity_mfs(ann)
    numeric = energy_variation_rhs(ann, sol, _csf_normal_speeds(ann))
    rel = abs(numeric - closed_form) / abs(closed_form)
    ok = analytic_gap < 1e-12 and rel < 0.02
    return CheckResult("bochner_consistency", ok,
                       f"analytic gap {analytic_gap:.1e}, numeric rel err {rel:.2e}",
                       "analytic gap < 1e-12, numeric within 2%")


@_check("kappa_identity")
def check_kappa_identity() -> CheckResult:
    """Level-set identity 1/2 d|grad u|^2/dnu = -kappa |grad u|^2 on boundaries."""
    conc = concentric_annulus(1.0, 2.0, 256)
    res_conc = kappa_identity_residual(conc, solve_capacity_mfs(conc))
    ecc, _ = mobius_transform(conc, 0.3)
    res_ecc = kappa_identity_residual(ecc, solve_capacity_mfs(ecc))
    ok = res_conc <= 0.01 and res_ecc <= 0.02
    return CheckResult("kappa_identity", ok,
                       f"concentric {res_conc:.2e}, eccentric {res_ecc:.2e}",
                       "concentric <= 0.01, eccentric <= 0.02")


@_check("conformal_invariance")
def check_conformal_invariance() -> CheckResult:
    """Moebius images of the (1, 2) annulus keep the same modulus."""
    conc = concentric_annulus(1.0, 2.0, 256)
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        a = 0.6 * math.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        image, _ = mobius_transform(conc, complex(a))
        worst = max(worst, abs(modulus(image) - H_CONCENTRIC_12))
    ok = worst < 1e-4
    return CheckResult("conformal_invariance", ok,
                       f"worst modulus err {worst:.2e} over 20 images",
                       "err < 1e-4")


@_check("grim_reaper")
def check_grim_reaper() -> CheckResult:
    """Translation at unit speed and the e^z half-space image of the soliton."""
    d1 = grim_reaper_translation_check(512, 1.4, 0.2)
    d2 = grim_reaper_translation_check(1024, 1.4, 0.2)
    v = grim_reaper(512, 1.4).vertices
    re_err = float(np.abs(np.exp(v[:, 0]) * np.cos(v[:, 1]) - 1.0).max())
    ok = d1 <= 5e-3 and d1 / d2 >= 3.0 and re_err <= 1e-12
    return CheckResult("grim_reaper", ok,
                       f"dist {d1:.2e} (n=512), refinement factor {d1 / d2:.1f}, "
                       f"Re(e^z) err {re_err:.1e}",
                       "dist <= 5e-3, factor >= 3, Re err <= 1e-12")


@_check("area_conservation")
def check_area_conservation() -> CheckResult:
    """Annulus area is conserved along planar flows (both boundaries lose 2 pi t)."""
    worst = 0.0
    for trace in _fourier_traces():
        a0 = trace.records[0].area_annulus
        for r in trace.records[1:]:
            worst = max(worst, abs(r.area_annulus - a0) / r.t)
    ok = worst <= 0.02
    return CheckResult("area_conservation", ok,
                       f"max |area drift| / t = {worst:.2e}",
                       "<= 0.02")


# ---------------------------------------------------------------------------
# driver


def run_checks(name_filter: str = "") -> list[CheckResult]:
    """Run all checks whose name contains the filter (empty filter = all)."""
    names = [n for n in CHECKS if name_filter in n]
    if name_filter and not names:
        log.warning("no verification check matches %r", name_filter)
    return [CHECKS[n]() for n in names]


def format_report(results: list[CheckResult]) -> str:
    lines = [r.line() for r in results]
    if results:
        n_pass = sum(r.passed for r in results)
        lines.append(f"{n_pass}/{len(results)} checks passed")
    return "\n".join(lines)
