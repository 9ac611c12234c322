"""Characteristic-point location and horizontal normal conversions."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest

from heiscalc.coeff import Point, PolyCoeff
from heiscalc.frame import MultiVector, frame_apply, wedge
from heiscalc.surface import (
    CharPoint,
    HeisVector,
    ParamSurface,
    ScanResult,
    find_characteristic_points,
    heis_cross,
    heis_frame_components,
    heis_tangent_bivector,
    is_characteristic_normal,
    mobius_characteristic_closed_form,
    mobius_normal_components,
    mobius_surface,
    orientability_e_to_h,
    orientability_h_to_e,
    scan_grid,
    surface_normal,
)
from heiscalc.sampling import random_poly, seeded_rng


def _var(i):
    return PolyCoeff.var(1, i)


# -- frame conversion of tangent vectors --------------------------------------


def test_heis_vector_validation():
    HeisVector(1.0, 2.0, 3.0)
    with pytest.raises(ValueError):
        HeisVector(float("inf"), 0.0, 0.0)


def test_heis_frame_components_oracle():
    # v = v_x dx + v_y dy + v_t dt at p has T-component v_t + y v_x / 2 - x v_y / 2
    v = heis_frame_components((1.0, 2.0, 3.0), (10.0, 20.0, 0.0))
    assert v.c_X == 1.0
    assert v.c_Y == 2.0
    assert v.c_T == pytest.approx(3.0 + 20.0 * 1.0 / 2 - 10.0 * 2.0 / 2)


def test_heis_cross_frame_basis():
    X = HeisVector(1.0, 0.0, 0.0)
    Y = HeisVector(0.0, 1.0, 0.0)
    T = HeisVector(0.0, 0.0, 1.0)
    assert heis_cross(X, Y).as_tuple() == (0.0, 0.0, 1.0)
    assert heis_cross(Y, T).as_tuple() == (1.0, 0.0, 0.0)
    assert heis_cross(T, X).as_tuple() == (0.0, 1.0, 0.0)
    assert heis_cross(X, X).as_tuple() == (0.0, 0.0, 0.0)


# -- the Mobius strip ----------------------------------------------------------


def test_mobius_surface_validation():
    with pytest.raises(ValueError):
        mobius_surface(0.2, 0.2)  # needs w < R
    with pytest.raises(ValueError):
        mobius_surface(0.2, 0.0)


def test_mobius_gamma_oracle():
    surf = mobius_surface(0.5, 0.25)
    x, y, t = surf.gamma(0.0, 0.1)
    assert x == pytest.approx(0.6)
    assert y == pytest.approx(0.0)
    assert t == pytest.approx(0.0)


def test_mobius_half_twist_seam():
    # gamma(2 pi, s) = gamma(0, -s): one loop flips the width coordinate
    surf = mobius_surface(0.4, 0.3)
    for s in (-0.25, 0.0, 0.2):
        a = surf.gamma(2 * math.pi, s)
        b = surf.gamma(0.0, -s)
        assert a == pytest.approx(b, abs=1e-12)


@pytest.mark.parametrize("R", [0.1, 0.2, 0.5, 1.0])
def test_closed_form_normal_matches_constructive(R):
    """The polynomial normal formulas agree with frame-cross evaluation."""
    surf = mobius_surface(R, 0.75 * R)
    constructive = surface_normal(surf)
    closed = mobius_normal_components(R)
    rng = np.random.default_rng(2026)
    rs = rng.uniform(0.0, 2 * math.pi, 400)
    ss = rng.uniform(-0.75 * R, 0.75 * R, 400)
    got = constructive(rs, ss)
    want = closed(rs, ss)
    for g, w in zip(got, want):
        assert np.max(np.abs(g - w)) < 1e-9


def test_mobius_normal_seam_section():
    # along r = 0 the second component is the quadratic -s^2/2 + (1/2 - R)s - R^2/2
    R = 0.2
    closed = mobius_normal_components(R)
    for s in (-0.1, 0.0, 0.05, 0.12):
        _, n2, _ = closed(0.0, s)
        assert n2 == pytest.approx(-0.5 * s * s + (0.5 - R) * s - 0.5 * R * R, abs=1e-14)


def test_mobius_closed_form_root():
    for R in (0.05, 0.1, 0.2, 0.24):
        root = mobius_characteristic_closed_form(R)
        assert root is not None
        r0, s0 = root
        assert r0 == 0.0
        # solves the seam quadratic
        assert -0.5 * s0 * s0 + (0.5 - R) * s0 - 0.5 * R * R == pytest.approx(0.0, abs=1e-15)
        assert 0.0 < s0 < 0.75 * R
    for R in (0.25, 0.26, 0.5, 1.0):
        assert mobius_characteristic_closed_form(R) is None


def test_scan_grid_shapes():
    surf = mobius_surface(0.2, 0.15)
    data = scan_grid(surf, (64, 64))
    for key in ("N1", "N2", "N3"):
        assert data[key].shape == (64, 64)
    assert data["r"].shape == (64,) and data["s"].shape == (64,)
    # non-periodic surfaces sample the closed rectangle
    assert data["r"][0] == pytest.approx(0.0)
    assert data["r"][-1] == pytest.approx(2 * math.pi)


def test_find_characteristic_points_mobius():
    R = 0.2
    result = find_characteristic_points(mobius_surface(R, 0.75 * R), grid=(256, 128))
    assert isinstance(result, ScanResult)
    assert len(result.points) == 1
    assert not result.failures
    p = result.points[0]
    r0, s0 = mobius_characteristic_closed_form(R)
    assert abs(p.r - r0) < 1e-8
    assert abs(p.s - s0) < 1e-8
    assert p.residual < 1e-10
    assert not p.boundary
    assert p.ambient[0] == pytest.approx(0.5 - math.sqrt(0.25 - R), abs=1e-8)
    assert p.ambient[1] == pytest.approx(0.0, abs=1e-8)
    assert p.ambient[2] == pytest.approx(0.0, abs=1e-8)
    # the third frame component does not vanish there: the point is
    # characteristic, not singular
    n3 = mobius_normal_components(R)(p.r, p.s)[2]
    assert abs(n3) > 1e-3


def test_find_characteristic_points_empty_above_quarter():
    result = find_characteristic_points(mobius_surface(0.5, 0.375), grid=(256, 128))
    assert result.points == ()


def test_grid_minimum_enforced():
    with pytest.raises(ValueError):
        find_characteristic_points(mobius_surface(0.2, 0.15), grid=(32, 128))


def test_worker_count_does_not_change_results():
    surf = mobius_surface(0.1, 0.075)
    a = find_characteristic_points(surf, grid=(128, 64), workers=1)
    b = find_characteristic_points(surf, grid=(128, 64), workers=4)
    assert a.to_json() == b.to_json()


def test_char_point_json_shape():
    p = CharPoint(r=1.0, s=-0.5, residual=1e-12, ambient=(0.1, 0.2, 0.3), boundary=True)
    assert p.to_json() == {
        "r": 1.0, "s": -0.5, "residual": 1e-12,
        "ambient": [0.1, 0.2, 0.3], "boundary": True,
    }


def test_flat_graph_boundary_point():
    # the plane t = 0 has horizontal normal (-s/2, r/2, .): characteristic at
    # the origin, which sits on the s-boundary of this window
    surf = ParamSurface(
        r_range=(-1.0, 1.0),
        s_range=(0.0, 1.0),
        gamma=lambda r, s: (np.asarray(r, dtype=float) + 0 * s, np.asarray(s, dtype=float) + 0 * r, 0.0 * r * s),
        gamma_r=lambda r, s: (1.0 + 0 * r, 0.0 * r, 0.0 * r * s),
        gamma_s=lambda r, s: (0.0 * s, 1.0 + 0 * s, 0.0 * r * s),
        name="flat-graph",
    )
    result = find_characteristic_points(surf, grid=(64, 64), tol=1e-10)
    assert len(result.points) == 1
    p = result.points[0]
    assert abs(p.r) < 1e-9 and abs(p.s) < 1e-9
    assert p.boundary


def test_partial_validation_rejects_wrong_derivative():
    with pytest.raises(ValueError, match="finite differences"):
        ParamSurface(
            r_range=(0.0, 1.0),
            s_range=(0.0, 1.0),
            gamma=lambda r, s: (r * r, s, 0.0 * r),
            gamma_r=lambda r, s: (1.0 + 0 * r, 0.0 * r, 0.0 * r),  # should be 2r
            gamma_s=lambda r, s: (0.0 * s, 1.0 + 0 * s, 0.0 * s),
        )


# -- orientation field conversions ----------------------------------------------


def test_e_to_h_matches_horizontal_gradient():
    rng = seeded_rng(53)
    for _ in range(10):
        g = random_poly(rng, 1, max_degree=3)
        grad_e = tuple(g.partial(i) for i in (1, 2, 3))
        nH = orientability_e_to_h(grad_e)
        assert nH == (frame_apply(1, g), frame_apply(2, g))


def test_h_to_e_reconstructs_euclidean_gradient():
    rng = seeded_rng(59)
    for _ in range(10):
        g = random_poly(rng, 1, max_degree=3)
        nH = (frame_apply(1, g), frame_apply(2, g))
        nE = orientability_h_to_e(nH)
        assert nE == tuple(g.partial(i) for i in (1, 2, 3))


def test_e_to_h_numeric():
    # numeric tilt at a concrete point: n_H = (n_x - y n_t / 2, n_y + x n_t / 2)
    nH = orientability_e_to_h((1.0, 0.0, 2.0), p=Point((3.0, 5.0, 0.0)))
    assert nH[0] == pytest.approx(1.0 - 5.0 * 2.0 / 2)
    assert nH[1] == pytest.approx(0.0 + 3.0 * 2.0 / 2)


def test_round_trip_conversions():
    rng = seeded_rng(61)
    for _ in range(5):
        g = random_poly(rng, 1, max_degree=3)
        grad_e = tuple(g.partial(i) for i in (1, 2, 3))
        assert orientability_h_to_e(orientability_e_to_h(grad_e)) == grad_e


def test_is_characteristic_normal():
    zero = (PolyCoeff.zero(1), PolyCoeff.zero(1))
    assert is_characteristic_normal(zero)
    assert not is_characteristic_normal((PolyCoeff.var(1, 1), PolyCoeff.zero(1)))
    assert is_characteristic_normal((1e-14, -1e-13), tol=1e-12)
    assert not is_characteristic_normal((1e-3, 0.0), tol=1e-12)


def test_heis_tangent_bivector():
    a, b = _var(1), _var(2)
    bivec = heis_tangent_bivector((a, b))
    expected = wedge(MultiVector.from_blade(1, (2,)), MultiVector.from_blade(1, (3,))).scale(a) \
        - wedge(MultiVector.from_blade(1, (1,)), MultiVector.from_blade(1, (3,))).scale(b)
    assert bivec == expected
