"""Polygonal regions, curve/boundary crossings, clipping, pairings, traces.

Membership always means the open interior: a region's boundary belongs
to neither side. Everything here reduces to one primitive, the split of
a curve into maximal pieces that are entirely inside or entirely
outside, computed from exact segment intersections. Pairings and normal
traces are then pure telescoping sums of test-function values, with no
gradients and no quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DegenerateGeometry, DimensionMismatch
from .core import AtomicMeasure, CurveField, Point, PolyCurve, dist
from .lipfun import LipFunc

# collinearity / on-boundary threshold; inputs closer than this to a
# boundary line are ambiguous and rejected rather than classified
EPS = 1e-12


def _signed_area(ring: Sequence[Point]) -> float:
    s = 0.0
    n = len(ring)
    for i in range(n):
        x1, y1 = ring[i]
        x2, y2 = ring[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return 0.5 * s


def _point_seg_dist(p: Point, a: Point, b: Point) -> float:
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    L2 = dx * dx + dy * dy
    if L2 == 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * dx + (py - ay) * dy) / L2
    t = min(max(t, 0.0), 1.0)
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


def _in_ring(p: Point, ring: Sequence[Point]) -> bool:
    # even-odd ray cast; callers guarantee p is off the ring itself
    x, y = p
    inside = False
    n = len(ring)
    for i in range(n):
        x1, y1 = ring[i]
        x2, y2 = ring[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xi = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < xi:
                inside = not inside
    return inside


@dataclass(frozen=True)
class PolyRegion:
    """A simple polygon with optional polygonal holes, in the plane.

    Rings are stored without a repeated closing vertex; the outer ring is
    normalized to counterclockwise orientation and holes to clockwise.
    """

    outer: tuple[Point, ...]
    holes: tuple[tuple[Point, ...], ...] = ()

    def __init__(
        self,
        outer: Sequence[Sequence[float]],
        holes: Iterable[Sequence[Sequence[float]]] = (),
    ):
        def norm(ring, ccw: bool):
            pts = [tuple(float(c) for c in v) for v in ring]
            if any(len(p) != 2 for p in pts):
                raise DimensionMismatch("regions are planar")
            if len(pts) > 1 and pts[0] == pts[-1]:
                pts = pts[:-1]
            if len(pts) < 3:
                raise ValueError("a ring needs at least 3 distinct vertices")
            area = _signed_area(pts)
            if area == 0.0:
                raise DegenerateGeometry("zero-area ring")
            if (area > 0) != ccw:
                pts = pts[::-1]
            return tuple(pts)

        object.__setattr__(self, "outer", norm(outer, True))
        object.__setattr__(
            self, "holes", tuple(norm(h, False) for h in holes)
        )

    def rings(self) -> list[tuple[Point, ...]]:
        return [self.outer, *self.holes]

    def boundary_edges(self) -> list[tuple[Point, Point]]:
        out = []
        for ring in self.rings():
            n = len(ring)
            for i in range(n):
                out.append((ring[i], ring[(i + 1) % n]))
        return out

    def on_boundary(self, p: Point, tol: float = EPS) -> bool:
        return any(
            _point_seg_dist(p, a, b) <= tol for a, b in self.boundary_edges()
        )

    def contains(self, p: Point) -> bool:
        """Open-interior membership; boundary points are outside."""
        if self.on_boundary(p):
            return False
        if not _in_ring(p, self.outer):
            return False
        return not any(_in_ring(p, h) for h in self.holes)

    def classify(self, p: Point) -> int:
        """+1 open interior, 0 boundary (within EPS), -1 outside."""
        if self.on_boundary(p):
            return 0
        return 1 if self.contains(p) else -1

    def bbox(self) -> tuple[float, float, float, float]:
        xs = [p[0] for p in self.outer]
        ys = [p[1] for p in self.outer]
        return min(xs), min(ys), max(xs), max(ys)


def box_region(x0: float, y0: float, x1: float, y1: float) -> PolyRegion:
    return PolyRegion([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])


def half_plane(normal: Sequence[float], offset: float, extent: float = 1e6) -> PolyRegion:
    """The set {x . n > offset} clipped to a huge box: a rectangle with
    one side on the line x . n = offset, extending `extent` past it."""
    nx, ny = float(normal[0]), float(normal[1])
    L = math.hypot(nx, ny)
    nx, ny = nx / L, ny / L
    off = float(offset) / L
    tx, ty = -ny, nx
    c = (nx * off, ny * off)
    a = (c[0] - extent * tx, c[1] - extent * ty)
    b = (c[0] + extent * tx, c[1] + extent * ty)
    return PolyRegion(
        [a, b, (b[0] + extent * nx, b[1] + extent * ny),
         (a[0] + extent * nx, a[1] + extent * ny)]
    )


# ---------------------------------------------------------------------------
# curve splitting


@dataclass(frozen=True)
class Crossing:
    curve_index: int
    t: float  # global curve parameter (segment index + fraction)
    location: Point
    kind: str  # "entering" | "exiting"


def _seg_intersections(a: Point, b: Point, p: Point, q: Point) -> list[float]:
    """Parameters t on [a,b] where it meets [p,q]. Raises on collinear
    overlap of positive length."""
    d1 = (b[0] - a[0], b[1] - a[1])
    d2 = (q[0] - p[0], q[1] - p[1])
    L1 = math.hypot(*d1)
    L2 = math.hypot(*d2)
    if L1 == 0.0 or L2 == 0.0:
        return []
    denom = d1[0] * d2[1] - d1[1] * d2[0]
    ap = (p[0] - a[0], p[1] - a[1])
    if abs(denom) <= EPS * L1 * L2:
        # parallel; collinear iff p sits on the line through a,b
        off = abs(ap[0] * d1[1] - ap[1] * d1[0]) / L1
        if off > EPS:
            return []
        s0 = (ap[0] * d1[0] + ap[1] * d1[1]) / (L1 * L1)
        s1 = ((q[0] - a[0]) * d1[0] + (q[1] - a[1]) * d1[1]) / (L1 * L1)
        lo, hi = min(s0, s1), max(s0, s1)
        if min(hi, 1.0) - max(lo, 0.0) > EPS:
            raise DegenerateGeometry(
                f"curve segment {a}->{b} overlaps boundary edge {p}->{q}"
            )
        return []
    t = (ap[0] * d2[1] - ap[1] * d2[0]) / denom
    u = (ap[0] * d1[1] - ap[1] * d1[0]) / denom
    tol_t = EPS / max(L1, EPS)
    tol_u = EPS / max(L2, EPS)
    if -tol_t <= t <= 1.0 + tol_t and -tol_u <= u <= 1.0 + tol_u:
        return [min(max(t, 0.0), 1.0)]
    return []


def _curve_on_boundary(c: PolyCurve, E: PolyRegion) -> bool:
    pts = list(c.vertices)
    mids = [
        ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2) for a, b in c.segments()
    ]
    return all(E.on_boundary(p) for p in pts + mids)


def _pieces(c: PolyCurve, E: PolyRegion) -> list[tuple[float, float, int]]:
    """Split the curve at every boundary intersection and classify each
    resulting piece by its midpoint: (t0, t1, +1 inside / -1 outside) in
    global parameter. Raises DegenerateGeometry for overlaps, ambiguous
    pieces and interior vertices sitting exactly on the boundary."""
    if c.dimension != 2:
        raise DimensionMismatch("regions are planar")
    edges = E.boundary_edges()
    for v in c.vertices[1:-1]:
        if E.on_boundary(v):
            raise DegenerateGeometry(f"interior curve vertex {v} lies on the boundary")
    cuts: list[float] = []
    for i, (a, b) in enumerate(c.segments()):
        for p, q in edges:
            for t in _seg_intersections(a, b, p, q):
                cuts.append(i + t)
    n = len(c.vertices) - 1
    cuts.extend(float(i) for i in range(n + 1))
    cuts.sort()
    merged = [cuts[0]]
    for t in cuts[1:]:
        if t - merged[-1] > EPS:
            merged.append(t)
    merged[0], merged[-1] = 0.0, float(n)
    pieces = []
    for t0, t1 in zip(merged, merged[1:]):
        mid = c.point_at((t0 + t1) / 2)
        cls = E.classify(mid)
        if cls == 0:
            raise DegenerateGeometry(
                f"curve runs along the boundary near {mid}"
            )
        if pieces and pieces[-1][2] == cls:
            pieces[-1] = (pieces[-1][0], t1, cls)
        else:
            pieces.append((t0, t1, cls))
    return pieces


def crossings(c: PolyCurve, E: PolyRegion, curve_index: int = 0) -> list[Crossing]:
    """Boundary crossings in curve order, classified entering/exiting.
    Tangential touches (no side change) are not crossings."""
    if _curve_on_boundary(c, E):
        return []
    pieces = _pieces(c, E)
    out = []
    for (_, t1a, ca), (_, _, cb) in zip(pieces, pieces[1:]):
        kind = "entering" if cb > ca else "exiting"
        out.append(Crossing(curve_index, t1a, c.point_at(t1a), kind))
    return out


def _inside_intervals(c: PolyCurve, E: PolyRegion) -> list[tuple[float, float]]:
    return [(t0, t1) for t0, t1, cls in _pieces(c, E) if cls > 0]


def clip_field(f: CurveField, E: PolyRegion) -> CurveField:
    """Maximal sub-curves lying in the open interior of E, weights kept,
    crossing points inserted as vertices. Curves lying entirely on the
    boundary contribute nothing (they carry no interior mass)."""
    out = []
    for c in f:
        if _curve_on_boundary(c, E):
            continue
        for t0, t1 in _inside_intervals(c, E):
            verts = [c.point_at(t0)]
            for i in range(math.ceil(t0), math.floor(t1) + 1):
                p = c.vertices[i]
                if abs(i - t0) > EPS and abs(i - t1) > EPS:
                    verts.append(p)
            verts.append(c.point_at(t1))
            if len(verts) >= 2:
                out.append(PolyCurve(verts, c.weight))
    return CurveField(out)


def pairing_over_set(f: CurveField, phi: LipFunc, E: PolyRegion) -> float:
    """The pairing measure of phi with the field, evaluated on E:
    sum over maximal inside-intervals [s,t] of weight*(phi(end)-phi(start)).
    Exact in phi evaluations."""
    total = 0.0
    for c in f:
        if _curve_on_boundary(c, E):
            continue
        for t0, t1 in _inside_intervals(c, E):
            total += c.weight * (phi(c.point_at(t1)) - phi(c.point_at(t0)))
    return total


def normal_trace(f: CurveField, E: PolyRegion) -> AtomicMeasure:
    """The distributional normal trace of the field on the boundary of E,
    as an atomic measure: +weight where an inside-interval starts on the
    boundary, -weight where one ends on it. Interval ends strictly inside
    E are divergence atoms, not trace atoms."""
    atoms: list[tuple[Point, float]] = []
    for c in f:
        if _curve_on_boundary(c, E):
            continue
        for t0, t1 in _inside_intervals(c, E):
            p0, p1 = c.point_at(t0), c.point_at(t1)
            if E.on_boundary(p0):
                atoms.append((p0, c.weight))
            if E.on_boundary(p1):
                atoms.append((p1, -c.weight))
    return AtomicMeasure(atoms)


def _grad_cd(func: LipFunc, x: Point, h: float = 1e-5) -> tuple[float, ...]:
    g = []
    for i in range(len(x)):
        xp = tuple(v + (h if j == i else 0.0) for j, v in enumerate(x))
        xm = tuple(v - (h if j == i else 0.0) for j, v in enumerate(x))
        g.append((func(xp) - func(xm)) / (2 * h))
    return tuple(g)


def product_rule_residual(
    f: CurveField,
    phi: LipFunc,
    test: LipFunc,
    order: int = 8,
    stieltjes_sub: int = 5000,
) -> float:
    """Absolute defect in the product rule
    div(phi F) = (pairing of phi with F) + phi div F, all paired against
    a smooth compactly supported test function.

    The left side uses Gauss-Green on the product field: the gradient of
    test is taken by central differences (phi is only ever evaluated) and
    the line integral by adaptive quadrature, which tolerates the kinks
    of Min/Max trees. The pairing term is summed independently as a
    Riemann-Stieltjes sum of test against the increments of phi along
    each curve, so agreement is a genuine cross-check between two
    discretizations.
    """
    from scipy.integrate import quad

    lhs = 0.0  # <div(phi F), test> = -int phi * grad(test) . dF
    for c in f:
        for a, b in c.segments():
            d = tuple(y - x for x, y in zip(a, b))

            def integrand(t, a=a, d=d):
                pt = tuple(x + t * dd for x, dd in zip(a, d))
                g = _grad_cd(test, pt)
                return phi(pt) * sum(gi * dd for gi, dd in zip(g, d))

            val, _ = quad(integrand, 0.0, 1.0, epsabs=1e-12, limit=400)
            lhs -= c.weight * val

    def stieltjes(m: int) -> float:
        # int test d(phi o gamma), composite midpoint in the test factor
        acc = 0.0
        for c in f:
            for a, b in c.segments():
                prev = phi(a)
                for j in range(m):
                    t1 = (j + 1) / m
                    pt1 = tuple(x + t1 * (y - x) for x, y in zip(a, b))
                    tm = (j + 0.5) / m
                    ptm = tuple(x + tm * (y - x) for x, y in zip(a, b))
                    cur = phi(pt1)
                    acc += c.weight * test(ptm) * (cur - prev)
                    prev = cur
        return acc

    # midpoint error is O(m^-2) with an even expansion for smooth data,
    # so one Richardson step buys two extra orders
    m = stieltjes_sub
    pairing = (4.0 * stieltjes(2 * m) - stieltjes(m)) / 3.0

    from .core import field_divergence

    atom_term = sum(
        coeff * phi(loc) * test(loc)
        for loc, coeff in field_divergence(f).atoms
    )
    return abs(lhs - pairing - atom_term)


def setwise_probe(
    f: CurveField,
    phi_sequence,
    phi_limit: LipFunc,
    E: PolyRegion,
    K: int,
) -> tuple[list[float], bool]:
    """Pairing values v_k = pairing_over_set(f, phi_k, E) for k = 1..K,
    plus a flag checking |v_K - v_inf| <= C_f / K with
    C_f = field_mass(f) * (uniform Lipschitz bound of the family)."""
    from .core import field_mass
    from .lipfun import lip_bound

    values = [pairing_over_set(f, phi_sequence(k), E) for k in range(1, K + 1)]
    v_inf = pairing_over_set(f, phi_limit, E)
    fam_lip = max(lip_bound(phi_sequence(K)), lip_bound(phi_limit), 1.0)
    tol = field_mass(f) * fam_lip / K if K else float("inf")
    return values, abs(values[-1] - v_inf) <= tol
