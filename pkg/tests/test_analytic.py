import math

import numpy as np
import pytest

from annulusflow.analytic import (
    ORACLES,
    CapExtinctionError,
    ExtinctCircleError,
    circle_curve,
    circle_radius,
    concentric_modulus,
    cylinder_circle,
    fourier_circle,
    grim_reaper,
    grim_reaper_translation_check,
    latitude_circle,
    mobius_transform,
    sphere_latitude_angle,
)
from annulusflow.analytic import concentric_annulus
from annulusflow.capacity import modulus
from annulusflow.geometry import discrete_curvature


# ---------------------------------------------------------------------------
# shrinking circle


def test_circle_radius_values():
    assert circle_radius(2.0, 1.5) == pytest.approx(1.0, abs=1e-15)
    assert circle_radius(1.0, 0.0) == 1.0


def test_circle_radius_extinction():
    with pytest.raises(ExtinctCircleError):
        circle_radius(1.0, 0.5)


# ---------------------------------------------------------------------------
# concentric modulus


def test_concentric_modulus_values():
    assert concentric_modulus(1.0, 2.0) == pytest.approx(0.11031782, abs=2e-8)
    assert concentric_modulus(1.0, math.exp(2 * math.pi)) == pytest.approx(1.0, abs=1e-14)


def test_concentric_modulus_ordering_error():
    with pytest.raises(ValueError):
        concentric_modulus(2.0, 2.0)


def test_concentric_modulus_additive():
    r1, r2, r3 = 0.7, 1.9, 5.3
    assert abs(concentric_modulus(r1, r2) + concentric_modulus(r2, r3)
               - concentric_modulus(r1, r3)) <= 1e-14


def test_domain_monotonicity_analytic():
    assert concentric_modulus(1.1, 1.9) < concentric_modulus(1.0, 2.0)


# ---------------------------------------------------------------------------
# sphere latitude law


def test_latitude_equator_stationary():
    assert sphere_latitude_angle(math.pi / 2, 0.7) == pytest.approx(math.pi / 2)


def test_latitude_ode_solution():
    # cos theta(t) = cos(pi/3) e^t = 0.5 e^t; at t = log 1.8, theta = arccos 0.9
    t = math.log(1.8)
    assert sphere_latitude_angle(math.pi / 3, t) == pytest.approx(math.acos(0.9), abs=1e-14)


def test_latitude_cap_extinction():
    with pytest.raises(CapExtinctionError):
        sphere_latitude_angle(math.pi / 3, math.log(2.0) + 1e-6)


def test_latitude_circle_chart_radius():
    c = latitude_circle(math.pi / 2, 64)
    assert np.hypot(*c.vertices.T).max() == pytest.approx(1.0, abs=1e-14)


# ---------------------------------------------------------------------------
# grim reaper


def test_grim_reaper_three_vertices():
    c = grim_reaper(3, math.pi / 3)
    expected = np.array([[math.log(2.0), -math.pi / 3], [0.0, 0.0],
                         [math.log(2.0), math.pi / 3]])
    assert np.abs(c.vertices - expected).max() < 1e-15


def test_grim_reaper_apex_curvature():
    c = grim_reaper(2001, 1.0)
    k = discrete_curvature(c)
    apex = np.hypot(*k[1000])
    assert apex == pytest.approx(1.0, abs=1e-3)


def test_grim_reaper_halfspace_image():
    v = grim_reaper(512, 1.4).vertices
    re = np.exp(v[:, 0]) * np.cos(v[:, 1])
    assert np.abs(re - 1.0).max() <= 1e-12


@pytest.mark.parametrize("n", [256, 257])
def test_grim_reaper_reflection_symmetric(n):
    v = grim_reaper(n, 1.2).vertices
    flipped = v[::-1] * np.array([1.0, -1.0])
    assert np.array_equal(v, flipped)


def test_grim_reaper_validation():
    with pytest.raises(ValueError):
        grim_reaper(1, 1.0)
    with pytest.raises(ValueError):
        grim_reaper(16, math.pi / 2)


def test_grim_reaper_translation_zero_time():
    assert grim_reaper_translation_check(64, 1.0, 0.0) <= 1e-12


def test_grim_reaper_translation_converges():
    d256 = grim_reaper_translation_check(256, 1.4, 0.2)
    d512 = grim_reaper_translation_check(512, 1.4, 0.2)
    assert d512 <= 5e-3
    assert d256 / d512 >= 3.0


# ---------------------------------------------------------------------------
# Moebius transform


def test_mobius_identity_up_to_scale():
    ann = concentric_annulus(1.0, 2.0, 64)
    image, scale = mobius_transform(ann, 0.0)
    assert scale == pytest.approx(0.25, abs=1e-12)
    assert np.abs(image.inner.vertices - scale * ann.inner.vertices).max() < 1e-14


def test_mobius_preserves_modulus():
    ann = concentric_annulus(1.0, 2.0, 256)
    image, _ = mobius_transform(ann, 0.3)
    assert modulus(image) == pytest.approx(concentric_modulus(1.0, 2.0), abs=1e-5)


def test_mobius_rejects_boundary_parameter():
    ann = concentric_annulus(1.0, 2.0, 64)
    with pytest.raises(ValueError):
        mobius_transform(ann, 1.0)
    with pytest.raises(ValueError):
        mobius_transform(ann, complex(0.8, 0.8))


# ---------------------------------------------------------------------------
# oracle registry


def test_oracle_registry_generates_curves():
    assert set(ORACLES) == {"circle", "grim_reaper", "cylinder_circle", "latitude_circle"}
    c = ORACLES["circle"].generate(n=64, radius=2.0)
    assert c.n == 64 and c.closed
    g = ORACLES["grim_reaper"].generate(n=33, y_max=1.0)
    assert not g.closed
    cc = ORACLES["cylinder_circle"].generate(n=16, x=0.25)
    assert cc.period == 1.0
    lat = ORACLES["latitude_circle"].generate(n=64, theta=1.0)
    assert np.hypot(*lat.vertices.T).max() == pytest.approx(math.tan(0.5), abs=1e-12)


def test_oracle_exact_values():
    assert ORACLES["circle"].exact_value(radius=2.0, t=1.5) == pytest.approx(1.0)
    assert ORACLES["cylinder_circle"].exact_value() == 0.0


def test_generators_match_helpers():
    assert np.array_equal(ORACLES["circle"].generate(n=32, radius=1.5).vertices,
                          circle_curve(1.5, 32).vertices)
    assert np.array_equal(ORACLES["cylinder_circle"].generate(n=32, x=0.1).vertices,
                          cylinder_circle(0.1, 32).vertices)


def test_fourier_circle_reduces_to_circle():
    a = fourier_circle(1.2, [], 64)
    b = circle_curve(1.2, 64)
    assert np.abs(a.vertices - b.vertices).max() < 1e-14
