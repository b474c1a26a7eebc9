import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize_scalar

from adiabatic_topology.model import ThreeLevelParams, h3
from adiabatic_topology.spectrum import (AmbiguousPathError, DegenerateCaseError, ParameterPath, TopologyCase,
                                         classify_case, conical_intersections, eigen2_closed, eigen3_numeric,
                                         mixing_angle, surface_grid, track_path)


def cubic_roots(dp, ds, op, os_):
    """Eigenvalues from the characteristic cubic, solved with the trigonometric formula."""
    a, b, d2, d3 = op / 2, os_ / 2, dp, dp - ds
    tr = d2 + d3
    minors = d2 * d3 - a * a - b * b
    det = -a * a * d3
    # lambda^3 - tr lambda^2 + minors lambda - det = 0, shift lambda = x + tr/3
    p = minors - tr * tr / 3
    q = -2 * tr ** 3 / 27 + tr * minors / 3 - det
    if -p <= 1e-24 * max(1.0, tr * tr):
        x = [np.cbrt(-q)] * 3
    else:
        m = 2 * math.sqrt(-p / 3)
        arg = max(-1.0, min(1.0, 3 * q / (p * m)))
        phi = math.acos(arg) / 3
        x = [m * math.cos(phi - 2 * math.pi * k / 3) for k in range(3)]
    return np.sort(np.array(x) + tr / 3)


def min_gap(dp, ds, op, os_):
    return np.min(np.diff(np.linalg.eigvalsh(h3(dp, ds, op, os_))))


@pytest.mark.parametrize("o, d, expected", [(0, 1, (0, 1)), (1, 0, (-0.5, 0.5)), (3, 4, (-0.5, 4.5))])
def test_eigen2_closed_examples(o, d, expected):
    assert eigen2_closed(o, d) == pytest.approx(expected, abs=1e-15)


@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
def test_eigen2_closed_matches_eigh(o, d):
    lo, hi = eigen2_closed(o, d)
    ref = np.linalg.eigvalsh(np.array([[0, o / 2], [o / 2, d]]))
    assert lo <= hi
    assert abs(lo - ref[0]) <= 1e-12 and abs(hi - ref[1]) <= 1e-12


def test_mixing_angle_examples():
    assert mixing_angle(1, 0) == pytest.approx(-math.pi / 4)
    assert mixing_angle(1e-300, -1) == pytest.approx(0.0, abs=1e-15)
    assert mixing_angle(0.0, -1) == 0.0
    assert mixing_angle(1e-300, 1) == pytest.approx(-math.pi / 2)
    assert mixing_angle(1, 1) == pytest.approx(-3 * math.pi / 8)
    with pytest.raises(ValueError):
        mixing_angle(0, 0)


@pytest.mark.parametrize("o, d", [(1, 1), (1, -1), (0.3, 2.0), (5, -0.1), (1, 0)])
def test_mixing_angle_gives_upper_eigenvector(o, d):
    # with the Stokes field off the 1-2 block is the two-level Hamiltonian; level 3 is pushed far away
    es = eigen3_numeric(ThreeLevelParams(d, d - 100.0, o, 0.0))
    theta = mixing_angle(o, d)
    upper = np.array([math.cos(theta), -math.sin(theta), 0.0])
    overlaps = np.abs(es.vectors.T @ upper)
    lo, hi = eigen2_closed(o, d)
    k = int(np.argmin(np.abs(es.values - hi)))
    assert overlaps[k] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("p, expected", [
    (ThreeLevelParams(1, 0.5, 0, 0), [0, 0.5, 1]),
    (ThreeLevelParams(0, 0, 2, 2), [-math.sqrt(2), 0, math.sqrt(2)]),
])
def test_eigen3_examples(p, expected):
    np.testing.assert_allclose(eigen3_numeric(p).values, expected, atol=1e-14)


def test_eigen3_cubic_oracle_example():
    got = eigen3_numeric(ThreeLevelParams(0.5, -0.5, 1, 3)).values
    np.testing.assert_allclose(got, cubic_roots(0.5, -0.5, 1, 3), atol=1e-12)


@settings(max_examples=300)
@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(0, 10), st.floats(0, 10))
def test_eigen3_contract(dp, ds, op, os_):
    es = eigen3_numeric(dp, ds, op, os_)
    h = h3(dp, ds, op, os_)
    scale = max(1.0, np.linalg.norm(h, 2))
    assert np.all(np.diff(es.values) >= 0)
    np.testing.assert_allclose(es.vectors.T @ es.vectors, np.eye(3), atol=1e-12)
    assert np.linalg.norm(h @ es.vectors - es.vectors * es.values, axis=0).max() <= 1e-12 * scale
    for k in range(3):
        v = es.vectors[:, k]
        assert v[np.argmax(np.abs(v))] >= 0
    assert es.values.sum() == pytest.approx(np.trace(h), abs=1e-12 * max(1, abs(np.trace(h))))
    # the trigonometric root formula only keeps ~sqrt(eps) accuracy at double roots
    np.testing.assert_allclose(es.values, cubic_roots(dp, ds, op, os_), atol=1e-6 * scale)


@pytest.mark.parametrize("dp, ds, tag", [
    (-0.5, -1.5, "213"), (1.5, 0.5, "132"), (0.5, -0.5, "123"),
    (0.5, 1.5, "312"), (-1.5, -0.5, "231"), (-0.5, 0.5, "321"),
    (0, -1, "degenerate"), (1, 1, "degenerate"), (0, 0, "degenerate"),
])
def test_classify_case(dp, ds, tag):
    assert classify_case(dp, ds).value == tag


@given(st.floats(-10, 10), st.floats(-10, 10))
def test_classify_digit_reversal(dp, ds):
    c = classify_case(dp, ds)
    if c is not TopologyCase.DEGENERATE:
        assert classify_case(-dp, -ds).value == c.value[::-1]
        assert c.reversed() is classify_case(-dp, -ds)


def test_conical_intersection_examples():
    assert conical_intersections(0.5, -0.5) == pytest.approx([(math.sqrt(2), 0), (0, math.sqrt(2))])
    assert conical_intersections(-0.5, -1.5) == pytest.approx([(math.sqrt(6), 0)])
    assert conical_intersections(1, 1) == []
    with pytest.raises(DegenerateCaseError):
        conical_intersections(0, 1)


@pytest.mark.parametrize("dp, ds", [(0.5, -0.5), (-0.5, -1.5), (1.5, 0.5), (0.3, -1.7), (-2.0, 0.4)])
def test_conical_intersections_match_gap_minimisation(dp, ds):
    for op, os_ in conical_intersections(dp, ds):
        assert min_gap(dp, ds, op, os_) <= 1e-10
        # independent locator: minimise the gap along the same edge
        if os_ == 0:
            res = minimize_scalar(lambda x: min_gap(dp, ds, x, 0.0), bounds=(0.5 * op, 1.5 * op), method="bounded",
                                  options={"xatol": 1e-12})
            assert res.x == pytest.approx(op, rel=1e-6)
        else:
            res = minimize_scalar(lambda x: min_gap(dp, ds, 0.0, x), bounds=(0.5 * os_, 1.5 * os_), method="bounded",
                                  options={"xatol": 1e-12})
            assert res.x == pytest.approx(os_, rel=1e-6)
        # cone: gap grows linearly in both directions
        for direction in ((1, 0), (0, 1), (-1, 0)):
            eps = 1e-4
            g1 = min_gap(dp, ds, op + eps * direction[0], os_ + eps * direction[1])
            g2 = min_gap(dp, ds, op + 2 * eps * direction[0], os_ + 2 * eps * direction[1])
            if direction == (-1, 0) and op == 0:
                continue
            assert g2 / g1 == pytest.approx(2.0, rel=0.1)


@given(st.floats(-5, 5).filter(lambda x: abs(x) > 1e-3), st.floats(-5, 5).filter(lambda x: abs(x) > 1e-3))
def test_crossing_count(dp, ds):
    if abs(dp - ds) < 1e-3:
        return
    n = len(conical_intersections(dp, ds))
    assert n == (1 if dp * ds > 0 else 2)


def test_surface_grid_origin():
    g = surface_grid(0.5, -0.5, [0.0], [0.0])
    np.testing.assert_allclose(g.sheets[0, 0], [0, 0.5, 1])
    np.testing.assert_array_equal(g.labels[0, 0], [1, 2, 3])


def test_surface_grid_edge_swap_213():
    axis = np.linspace(0, 4, 81)
    g = surface_grid(-0.5, -1.5, axis, [0.0, 0.5])
    assert np.all(np.diff(g.sheets, axis=-1) >= 0)
    np.testing.assert_array_equal(g.labels[0, 0], classify_case(-0.5, -1.5).ordering)
    star = math.sqrt(6)
    for i, x in enumerate(axis):
        lab = g.labels[i, 0]
        if abs(x - star) < 1e-9:
            continue
        # closed form on the edge: level 3 isolated at delta = 1, pump pair from the 2x2 block
        lo, hi = eigen2_closed(x, -0.5)
        expected = [2, 1, 3] if hi < 1.0 else [2, 3, 1]
        np.testing.assert_array_equal(lab, expected)
        np.testing.assert_allclose(sorted([lo, hi, 1.0]), g.sheets[i, 0], atol=1e-12)
    # interior keeps the zero-field ordering
    np.testing.assert_array_equal(g.labels[40, 1], [2, 1, 3])


def test_surface_grid_degenerate():
    with pytest.raises(DegenerateCaseError):
        surface_grid(0.0, -1.0, [0.0, 1.0], [0.0, 1.0])
    g = surface_grid(0.0, -1.0, [0.0, 1.0], [0.0, 1.0], allow_degenerate=True)
    assert g.sheets.shape == (2, 2, 3) and np.all(g.labels == 0)
    with pytest.raises(ValueError):
        surface_grid(0.5, -0.5, [0.1, 1.0], [0.0])


def stirap_path(first, peak_first, peak_second, n=400):
    """(rabi_p, rabi_s) trace of two overlapping sine-squared pulses delayed by half their length."""
    t = np.linspace(0, 1.5, n)
    a = np.where(t < 1, np.sin(np.pi * t) ** 2, 0.0)
    b = np.where(t > 0.5, np.sin(np.pi * (t - 0.5)) ** 2, 0.0)
    b[-1] = 0.0
    if first == "pump":
        return np.column_stack([peak_first * a, peak_second * b])
    return np.column_stack([peak_second * b, peak_first * a])


def test_track_path_reference_paths():
    # 213, counterintuitive: pump falls last through the rabi_s = 0 crossing
    assert track_path(-0.5, -1.5, stirap_path("stokes", 4, 4), 1) == 3
    # 213, intuitive
    assert track_path(-0.5, -1.5, stirap_path("pump", 4, 4), 1) == 3
    # 123, intuitive -> 2, counterintuitive -> 3
    assert track_path(0.5, -0.5, stirap_path("pump", 3, 3), 1) == 2
    assert track_path(0.5, -0.5, stirap_path("stokes", 3, 3), 1) == 3
    # amplitudes below the crossings: back to the start
    assert track_path(0.5, -0.5, stirap_path("stokes", 1, 1), 1) == 1


def test_track_path_identity_and_resampling():
    zero = np.zeros((5, 2))
    for k in (1, 2, 3):
        assert track_path(0.5, -0.5, zero, k) == k
    for dp, ds in [(-0.5, -1.5), (0.5, -0.5), (1.5, 0.5)]:
        for first in ("pump", "stokes"):
            path = ParameterPath(stirap_path(first, 3, 3))
            for k in (1, 2, 3):
                assert track_path(dp, ds, path, k) == track_path(dp, ds, path.resampled(2), k)


def test_track_path_errors():
    with pytest.raises(DegenerateCaseError):
        track_path(0.0, -1.0, stirap_path("pump", 3, 3), 1)
    with pytest.raises(AmbiguousPathError):
        track_path(0.05, -0.05, stirap_path("pump", 3, 3, n=6), 1)
    with pytest.raises(ValueError):
        track_path(0.5, -0.5, [[0.1, 0.0], [0.0, 0.0]], 1)
