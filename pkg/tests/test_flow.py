import math

import numpy as np
import pytest

from annulusflow.analytic import (
    circle_curve,
    circle_radius,
    concentric_annulus,
    cylinder_band,
    cylinder_circle,
    latitude_circle,
)
from annulusflow.flow import (
    AnnulusCollapseError,
    FlowConfig,
    FlowError,
    FlowState,
    csf_run,
    csf_step,
    csf_velocity,
    stable_dt,
)
from annulusflow.geometry import AmbientSurface, NestedAnnulus, curve_length


# ---------------------------------------------------------------------------
# velocity


def test_plane_circle_velocity():
    c = circle_curve(1.0, 256)
    v = csf_velocity(c, AmbientSurface.plane())
    speed = np.hypot(*v.T)
    assert np.abs(speed - 1.0).max() < 1e-3
    # pointing inward
    assert np.all(np.einsum("ij,ij->i", v, c.vertices) < 0)


def test_cylinder_geodesic_velocity_zero():
    c = cylinder_circle(0.3, 64)
    v = csf_velocity(c, AmbientSurface.cylinder(1.0))
    assert np.abs(v).max() <= 1e-12


def test_sphere_latitude_velocity_matches_chart_ode():
    # latitude theta = pi/4 maps to chart radius r = tan(theta/2); the chart
    # radius obeys rdot = (1 + r^2)(r^2 - 1)/(4 r)
    theta = math.pi / 4
    r = math.tan(theta / 2)
    c = latitude_circle(theta, 256)
    v = csf_velocity(c, AmbientSurface.sphere(1.0))
    radial = np.einsum("ij,ij->i", v, c.vertices) / r
    rdot = (1 + r * r) * (r * r - 1) / (4 * r)
    assert np.abs(radial - rdot).max() < 1e-3


def test_velocity_rejects_out_of_domain():
    from annulusflow.geometry import DomainError
    c = circle_curve(0.99, 64)
    with pytest.raises(DomainError):
        csf_velocity(c.translated((0.5, 0.0)), AmbientSurface.hyperbolic(-1.0))


# ---------------------------------------------------------------------------
# step control


def test_stable_dt_parabolic_cap():
    ann = concentric_annulus(1.0, 2.0, 256)
    dt = stable_dt(ann, FlowConfig(t_end=1.0))
    expected = 0.4 * (2 * math.sin(math.pi / 256)) ** 2 / 2
    assert dt == pytest.approx(expected, rel=1e-6)
    assert dt == pytest.approx(1.205e-4, rel=1e-3)


def test_stable_dt_uses_finer_curve():
    coarse = concentric_annulus(1.0, 2.0, 64)
    fine = NestedAnnulus(circle_curve(1.0, 256), circle_curve(2.0, 64))
    assert stable_dt(fine, FlowConfig(t_end=1.0)) < stable_dt(coarse, FlowConfig(t_end=1.0))


def test_stable_dt_separation_cap():
    # separation 4e-4 with near-unit speeds forces dt <= min_sep / 4
    ann = NestedAnnulus(circle_curve(1.0, 256), circle_curve(1.0004, 256))
    dt = stable_dt(ann, FlowConfig(t_end=1.0))
    assert dt <= 1.0001e-4


def test_flow_config_validation():
    with pytest.raises(ValueError):
        FlowConfig(t_end=-1.0)
    with pytest.raises(ValueError):
        FlowConfig(t_end=1.0, dt_safety=0.6)
    with pytest.raises(ValueError):
        FlowConfig(t_end=1.0, resample_threshold=0.9)


# ---------------------------------------------------------------------------
# single steps


def test_single_step_radii():
    ann = concentric_annulus(1.0, 2.0, 256)
    cfg = FlowConfig(t_end=1.0)
    state = csf_step(FlowState(0.0, ann), cfg)
    dt = state.t
    r_in = curve_length(state.annulus.inner) / (2 * math.pi)
    r_out = curve_length(state.annulus.outer) / (2 * math.pi)
    tol = dt * dt + 1e-3
    assert abs(r_in - math.sqrt(1 - 2 * dt)) < tol
    assert abs(r_out - math.sqrt(4 - 2 * dt)) < tol


def test_cylinder_step_is_identity():
    ann = cylinder_band(0.3, 0.8, 64)
    cfg = FlowConfig(t_end=1.0, n_vertices=64)
    state = csf_step(FlowState(0.0, ann), cfg)
    assert state.t > 0
    assert np.array_equal(state.annulus.inner.vertices, ann.inner.vertices)
    assert np.array_equal(state.annulus.outer.vertices, ann.outer.vertices)


def test_cylinder_fixed_point_1000_steps():
    ann = cylinder_band(0.25, 0.75, 64)
    cfg = FlowConfig(t_end=math.inf, n_vertices=64)
    state = FlowState(0.0, ann)
    for _ in range(1000):
        state = csf_step(state, cfg)
    drift = max(np.abs(state.annulus.inner.vertices - ann.inner.vertices).max(),
                np.abs(state.annulus.outer.vertices - ann.outer.vertices).max())
    assert drift <= 1e-10


# ---------------------------------------------------------------------------
# full runs


def test_run_final_radius():
    ann = concentric_annulus(1.0, 2.0, 256)
    trace = csf_run(ann, FlowConfig(t_end=0.45))
    r_final = trace.records[-1].len_inner / (2 * math.pi)
    assert abs(r_final - math.sqrt(1 - 0.9)) < 1e-3


def test_run_zero_duration():
    ann = concentric_annulus(1.0, 2.0, 64)
    trace = csf_run(ann, FlowConfig(t_end=0.0, n_vertices=64))
    assert len(trace.records) == 2
    assert trace.records[0].t == trace.records[1].t == 0.0


def test_run_collapse_error():
    ann = concentric_annulus(1.0, 2.0, 64)
    with pytest.raises(AnnulusCollapseError) as err:
        csf_run(ann, FlowConfig(t_end=0.55, n_vertices=64))
    # the inner circle vanishes at t = 0.5
    assert abs(err.value.t - 0.5) < 0.02
    trace = err.value.partial_trace
    assert trace is not None and len(trace.records) >= 1
    assert trace.metadata["error"]["type"] == "AnnulusCollapseError"


def test_run_area_law():
    ann = concentric_annulus(1.0, 2.0, 256)
    trace = csf_run(ann, FlowConfig(t_end=0.2))
    first, last = trace.records[0], trace.records[-1]
    dt = last.t - first.t
    for a0, a1 in ((first.area_inner, last.area_inner),
                   (first.area_outer, last.area_outer)):
        assert abs((a1 - a0) + 2 * math.pi * dt) <= 0.01 * dt


def test_run_annulus_area_conserved():
    ann = concentric_annulus(1.0, 2.0, 256)
    trace = csf_run(ann, FlowConfig(t_end=0.2))
    a0 = trace.records[0].area_annulus
    for rec in trace.records[1:]:
        assert abs(rec.area_annulus - a0) <= 0.02 * rec.t


def test_run_lengths_non_increasing():
    ann = concentric_annulus(1.0, 2.0, 256)
    trace = csf_run(ann, FlowConfig(t_end=0.3, record_every=10))
    li = [r.len_inner for r in trace.records]
    lo = [r.len_outer for r in trace.records]
    for seq in (li, lo):
        assert all(b <= a + 1e-6 for a, b in zip(seq, seq[1:]))


def test_run_times_strictly_increasing():
    ann = concentric_annulus(1.0, 2.0, 64)
    trace = csf_run(ann, FlowConfig(t_end=0.05, n_vertices=64, record_every=5))
    t = [r.t for r in trace.records]
    assert all(b > a for a, b in zip(t, t[1:]))


def test_run_convergence_against_circle_law():
    # halving dt (via dt_safety) and doubling N improves the radius error by
    # a factor >= 3
    def err(n, safety):
        ann = concentric_annulus(1.0, 2.0, n)
        trace = csf_run(ann, FlowConfig(t_end=0.3, n_vertices=n, dt_safety=safety))
        r = trace.records[-1].len_inner / (2 * math.pi)
        return abs(r - circle_radius(1.0, 0.3))

    coarse = err(64, 0.4)
    fine = err(128, 0.2)
    assert coarse / fine >= 3.0


def test_flow_error_reports_time():
    ann = concentric_annulus(1.0, 2.0, 64)
    try:
        csf_run(ann, FlowConfig(t_end=0.55, n_vertices=64))
    except FlowError as exc:
        assert "t =" in str(exc)
    else:  # pragma: no cover
        pytest.fail("expected a flow error")
