import math

import pytest

from dmfields import (
    Disconnected,
    InfeasibleDelta,
    LRCViolation,
    PolyRegion,
    PolygonalDomain,
    TopologyViolation,
    box_region,
    complement_region,
    domain_preset,
    koch_preset,
    net_boundary_dist,
    route,
    select_lambda,
    separation,
)
from dmfields.domain import polyline_in_domain, segment_in_domain

SQUARE = domain_preset("square")
LSHAPE = domain_preset("lshape")


def test_domain_needs_parts_and_valid_constants():
    with pytest.raises(ValueError):
        PolygonalDomain(())
    with pytest.raises(ValueError):
        PolygonalDomain(box_region(0, 0, 1, 1), declared_eps=1.5)
    with pytest.raises(ValueError):
        PolygonalDomain(box_region(0, 0, 1, 1), declared_delta=-0.1)


def test_membership_across_parts():
    two = PolygonalDomain((box_region(0, 0, 1, 1), box_region(2, 0, 3, 1)))
    assert two.contains((0.5, 0.5))
    assert two.contains((2.5, 0.5))
    assert not two.contains((1.5, 0.5))
    assert two.on_boundary((2.0, 0.5))


def test_segment_visibility():
    assert segment_in_domain(SQUARE, (0.1, 0.1), (0.9, 0.9))
    # endpoints on the boundary are fine, crossing it is not
    assert segment_in_domain(SQUARE, (0.0, 0.5), (1.0, 0.5))
    assert not segment_in_domain(SQUARE, (0.5, 0.5), (1.5, 0.5))
    # riding along a boundary edge counts as outside
    assert not segment_in_domain(SQUARE, (0.0, 0.0), (1.0, 0.0))


def test_route_is_straight_when_possible():
    c = route(SQUARE, (0.1, 0.1), (0.3, 0.35))
    assert c.vertices == ((0.1, 0.1), (0.3, 0.35))


def test_route_is_symmetric():
    p, q = (0.9, 0.1), (0.1, 0.85)
    assert route(SQUARE, p, q).vertices == route(SQUARE, q, p).vertices[::-1]


def test_route_around_reentrant_corner():
    p, q = (1.5, 0.9), (0.9, 1.5)
    c = route(LSHAPE, p, q)
    assert polyline_in_domain(LSHAPE, c.vertices)
    # certified against the declared constants: |p-q| <= 0.4 would be
    # needed for the automatic check, so verify the bound by hand
    d = math.dist(p, q)
    assert c.length() <= d / LSHAPE.declared_eps


def test_route_certifies_declared_constants():
    # an impossible declaration trips the per-route certificate
    brag = LSHAPE.with_constants(0.999, 2.0)
    with pytest.raises(LRCViolation):
        # the detour around the reentrant corner is about 20% longer
        # than the straight chord, far above the 1/0.999 allowance
        route(brag, (1.5, 0.9), (0.9, 1.5))


def test_select_lambda_covers_and_respects_clearance():
    delta = 0.4
    lam = select_lambda(SQUARE, delta)
    assert lam
    assert net_boundary_dist(SQUARE, lam) >= delta / 2 - 1e-9
    # every interior grid point sits within delta of the net
    for ix in range(1, 50):
        for iy in range(1, 50):
            p = (ix * 0.02, iy * 0.02)
            assert min(math.dist(p, q) for q in lam) <= delta + 1e-9


def test_select_lambda_touches_every_component():
    two = PolygonalDomain((box_region(0, 0, 1, 1), box_region(2, 0, 3, 1)))
    lam = select_lambda(two, 0.4)
    assert any(p[0] < 1.0 for p in lam)
    assert any(p[0] > 2.0 for p in lam)


def test_select_lambda_infeasible_when_too_deep():
    # a thin sliver has no point with clearance delta/2
    thin = PolygonalDomain(box_region(0, 0, 1, 0.08))
    with pytest.raises(InfeasibleDelta):
        select_lambda(thin, 0.5, h=0.02)


def test_separation_bounds_boundary_distance():
    lam = select_lambda(SQUARE, 0.4)
    s = separation(SQUARE, lam, M=100)
    assert 0.0 < s <= 0.75  # half-diagonal plus grid slack


def test_separation_requires_a_net():
    with pytest.raises(Disconnected):
        separation(SQUARE, [])


def test_complement_region_frame_and_islands():
    d = PolygonalDomain(
        PolyRegion(
            [(0, 0), (4, 0), (4, 4), (0, 4)],
            [[(1, 1), (3, 1), (3, 3), (1, 3)]],
        )
    )
    comp = complement_region(d, box_region(-1, -1, 5, 5))
    assert len(comp.parts) == 2
    assert comp.contains((-0.5, -0.5))  # frame
    assert comp.contains((2.0, 2.0))  # island from the hole
    assert not comp.contains((0.5, 0.5))


def test_complement_rejects_overflow_and_slits():
    with pytest.raises(ValueError):
        complement_region(SQUARE, box_region(0, 0, 1, 1))
    slit = PolygonalDomain(
        PolyRegion([(0, 0), (2, 0), (2, 2), (1, 2), (1, 0.5), (1, 2), (0, 2)])
    )
    with pytest.raises(TopologyViolation):
        complement_region(slit, box_region(-1, -1, 3, 3))


def test_koch_preset_edge_count():
    assert len(koch_preset(0).region.outer) == 3
    assert len(koch_preset(2).region.outer) == 48
    with pytest.raises(ValueError):
        koch_preset(8)


def test_presets_have_certified_constants():
    for name in ("square", "annulus", "lshape", "koch2"):
        d = domain_preset(name)
        assert d.declared_eps is not None
        assert d.declared_delta is not None
    with pytest.raises(ValueError):
        domain_preset("pentagon")
