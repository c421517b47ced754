import math

import pytest
from hypothesis import given, settings, strategies as st

from dmfields import (
    AtomicMeasure,
    CurveField,
    DimensionMismatch,
    PolyCurve,
    field_divergence,
    field_mass,
    pair_vector,
)

coord = st.floats(-5, 5, allow_nan=False, allow_infinity=False)
point2 = st.tuples(coord, coord)


def test_polycurve_dedups_consecutive_duplicates():
    c = PolyCurve([(0, 0), (0, 0), (1, 0), (1, 0), (1, 1)], 1.0)
    assert c.vertices == ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0))


def test_polycurve_needs_two_vertices():
    with pytest.raises(ValueError):
        PolyCurve([(2, 3)], 1.0)
    # a repeated point collapses to a degenerate (still two-vertex) curve
    c = PolyCurve([(2, 3), (2, 3)], 1.0)
    assert c.length() == 0.0


def test_length_and_endpoints():
    c = PolyCurve([(0, 0), (3, 4), (3, 5)], 2.0)
    assert c.length() == pytest.approx(6.0)
    assert c.start == (0.0, 0.0)
    assert c.end == (3.0, 5.0)
    assert not c.is_closed


def test_point_at_integer_parameters_are_exact_vertices():
    # interpolation must not introduce roundoff at the vertices
    verts = [(0.1, 0.2), (0.30000000000000004, 0.7), (0.15422822158444902, 1.0)]
    c = PolyCurve(verts, 1.0)
    for i, v in enumerate(verts):
        assert c.point_at(float(i)) == v
    assert c.point_at(0.5) == pytest.approx((0.2, 0.45))


def test_reversed_flips_orientation():
    c = PolyCurve([(0, 0), (1, 0), (1, 1)], 1.5)
    r = c.reversed()
    assert r.vertices == c.vertices[::-1]
    assert r.weight == c.weight


def test_field_rejects_mixed_dimension():
    with pytest.raises(DimensionMismatch):
        CurveField([PolyCurve([(0, 0), (1, 0)], 1.0), PolyCurve([(0, 0, 0), (1, 0, 0)], 1.0)])


def test_field_mass_is_weighted_length():
    f = CurveField([PolyCurve([(0, 0), (1, 0)], 2.0), PolyCurve([(0, 0), (0, 3)], -1.0)])
    assert field_mass(f) == pytest.approx(2.0 + 3.0)


def test_divergence_sign_convention():
    # +w at the start, -w at the end
    f = CurveField([PolyCurve([(0, 0), (1, 0)], 2.0)])
    div = field_divergence(f)
    assert div.coefficient((0.0, 0.0)) == 2.0
    assert div.coefficient((1.0, 0.0)) == -2.0


def test_closed_curves_have_no_divergence():
    loop = PolyCurve([(0, 0), (1, 0), (1, 1), (0, 0)], 3.0)
    assert field_divergence(CurveField([loop])).atoms == ()


def test_atomic_measure_merges_and_drops_zero():
    m = AtomicMeasure([((0.0, 0.0), 1.0), ((0.0, 0.0), -1.0), ((1.0, 0.0), 0.5)])
    assert m.atoms == (((1.0, 0.0), 0.5),)
    assert m.total() == 0.5


def test_measure_coalesce_merges_nearby_atoms():
    m = AtomicMeasure([((0.0, 0.0), 1.0), ((0.0, 1e-10), 2.0)])
    c = m.coalesced(1e-9)
    assert len(c.atoms) == 1
    assert c.atoms[0][1] == 3.0


def test_measure_arithmetic():
    a = AtomicMeasure([((0.0, 0.0), 1.0)])
    b = AtomicMeasure([((0.0, 0.0), 2.0), ((1.0, 1.0), -1.0)])
    s = a + b
    assert s.coefficient((0.0, 0.0)) == 3.0
    assert (-b).coefficient((1.0, 1.0)) == 1.0
    assert b.scaled(2.0).total_mass() == 6.0


@given(st.lists(point2, min_size=2, max_size=6), st.floats(-3, 3, allow_nan=False).filter(lambda w: w != 0))
@settings(max_examples=100, deadline=None)
def test_divergence_total_vanishes_per_curve(pts, w):
    """Each open curve carries a +w/-w dipole, so coefficients sum to 0."""
    div = field_divergence(CurveField([PolyCurve(pts, w)]))
    assert abs(div.total()) <= 1e-12 * (1 + abs(w))


@given(st.lists(point2, min_size=2, max_size=5), point2)
@settings(max_examples=100, deadline=None)
def test_pair_vector_constant_field_telescopes(pts, v):
    """Pairing a constant vector against a curve gives v . (end - start)."""
    c = PolyCurve(pts, 1.25)
    got = pair_vector(CurveField([c]), lambda x: v)
    want = 1.25 * (v[0] * (c.end[0] - c.start[0]) + v[1] * (c.end[1] - c.start[1]))
    assert got == pytest.approx(want, abs=1e-9)


def test_pair_vector_linear_gradient_matches_divergence_pairing():
    f = CurveField([PolyCurve([(0.0, 0.0), (0.7, 0.1), (0.3, 0.9)], 1.5)])
    grad = lambda x: (2.0, -1.0)  # gradient of 2 x1 - x2
    phi = lambda x: 2.0 * x[0] - x[1]
    div_term = sum(c * phi(p) for p, c in field_divergence(f).atoms)
    assert pair_vector(f, grad) + div_term == pytest.approx(0.0, abs=1e-12)
