"""Exact two-dimensional lattice geometry.

All predicates use arbitrary-precision rationals (``gmpy2.mpq``); no floating
point enters this module.  The integer program solver works by lattice-width
branching: a flat direction is found by Gauss-reducing the integer lattice
under the vertex scatter form of the polygon.  If the polygon is wide in that
direction it must contain lattice points, so the solver bisects on the
objective level; otherwise it branches over the few lattice lines
orthogonal to the flat direction and solves each line exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from gmpy2 import mpq

from .model import EMPTY, INFEASIBLE, ContractError

Rational2 = tuple  # pair of mpq

_ZERO = mpq(0)
_MPQ = type(_ZERO)
# 4 (1 + 2/sqrt 3)^2 < 18.6: widths above sqrt(18.6 m) force a lattice point.
_FAT = mpq(186, 10)


def q(v) -> mpq:
    """Exact rational from int, float, Fraction, str or mpq."""
    if type(v) is _MPQ:
        return v
    if isinstance(v, Fraction):
        return mpq(v.numerator, v.denominator)
    return mpq(v)


def pt(a, b=None) -> Rational2:
    """Exact rational point from two coordinates or a pair."""
    if b is None:
        a, b = a
    return (q(a), q(b))


def floor_q(v: mpq) -> int:
    return int(v.numerator // v.denominator)


def ceil_q(v: mpq) -> int:
    return int(-((-v.numerator) // v.denominator))


def det(u, v):
    return u[0] * v[1] - u[1] * v[0]


def dot(u, v):
    return u[0] * v[0] + u[1] * v[1]


def sub(u, v):
    return (u[0] - v[0], u[1] - v[1])


def add(u, v):
    return (u[0] + v[0], u[1] + v[1])


def scale(s, u):
    return (s * u[0], s * u[1])


def lerp(u, v, s):
    """``(1 - s) u + s v``."""
    return (u[0] + s * (v[0] - u[0]), u[1] + s * (v[1] - u[1]))


def primitive(v) -> tuple[int, int]:
    """Primitive integer vector with the direction of rational ``v``."""
    a, b = q(v[0]), q(v[1])
    if a == 0 and b == 0:
        raise ValueError("zero vector has no direction")
    den = math.lcm(int(a.denominator), int(b.denominator))
    ia, ib = int(a * den), int(b * den)
    g = math.gcd(ia, ib)
    return (ia // g, ib // g)


def lex_positive(d: tuple[int, int]) -> tuple[int, int]:
    return d if (d[0] > 0 or (d[0] == 0 and d[1] > 0)) else (-d[0], -d[1])


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        t = a // b
        a, b = b, a - t * b
        x0, x1 = x1, x0 - t * x1
        y0, y1 = y1, y0 - t * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


# ------------------------------------------------------------- halfplanes


@dataclass(frozen=True)
class Halfplane:
    """Closed halfplane ``<a, y> <= b`` with exact coefficients."""

    a: tuple
    b: mpq

    def __post_init__(self):
        a = (q(self.a[0]), q(self.a[1]))
        if a[0] == 0 and a[1] == 0:
            raise ValueError("halfplane normal must be nonzero")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", q(self.b))

    @classmethod
    def at_least(cls, h, value) -> "Halfplane":
        """``<h, y> >= value``."""
        return cls((-q(h[0]), -q(h[1])), -q(value))

    @classmethod
    def strict_cut(cls, h: tuple[int, int], point) -> "Halfplane":
        """Integer cut ``<h, y> >= <h, point> + 1`` for primitive integer h."""
        if math.gcd(int(h[0]), int(h[1])) != 1:
            raise ValueError("cut normal must be primitive")
        return cls.at_least(h, dot((q(h[0]), q(h[1])), pt(point)) + 1)

    def slack(self, y) -> mpq:
        return self.b - dot(self.a, y)

    def contains(self, y) -> bool:
        return self.slack(y) >= 0


def _hull(points: Iterable[Rational2]) -> list[Rational2]:
    """Counterclockwise strict convex hull (monotone chain)."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and det(sub(out[-1], out[-2]), sub(p, out[-2])) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    return hull if len(hull) >= 2 else pts[:1]


def _polygon_halfplanes(verts: Sequence[Rational2]) -> list[Halfplane]:
    if len(verts) == 1:
        p = verts[0]
        return [Halfplane((1, 0), p[0]), Halfplane((-1, 0), -p[0]),
                Halfplane((0, 1), p[1]), Halfplane((0, -1), -p[1])]
    if len(verts) == 2:
        p, r = verts
        e = sub(r, p)
        nrm = (e[1], -e[0])
        return [Halfplane(nrm, dot(nrm, p)), Halfplane(scale(-1, nrm), -dot(nrm, p)),
                Halfplane(e, dot(e, r)), Halfplane(scale(-1, e), -dot(e, p))]
    hps = []
    for i, p in enumerate(verts):
        r = verts[(i + 1) % len(verts)]
        e = sub(r, p)
        hps.append(Halfplane((e[1], -e[0]), e[1] * p[0] - e[0] * p[1]))
    return hps


class Region:
    """Bounded convex polygon: halfplane description plus exact vertices."""

    __slots__ = ("halfplanes", "vertices")

    def __init__(self, halfplanes: Sequence[Halfplane], vertices: Sequence[Rational2]):
        self.halfplanes = tuple(halfplanes)
        self.vertices = list(vertices)

    @classmethod
    def polygon(cls, points: Iterable) -> "Region":
        """Convex hull of the given points (may be degenerate)."""
        verts = _hull(pt(p) for p in points)
        if not verts:
            raise ValueError("polygon needs at least one point")
        return cls(_polygon_halfplanes(verts), verts)

    @classmethod
    def from_halfplanes(cls, halfplanes: Sequence[Halfplane]) -> "Region":
        hps = list(halfplanes)
        if not hps:
            raise ValueError("unbounded region: no halfplanes")
        verts = []
        for i in range(len(hps)):
            for j in range(i + 1, len(hps)):
                a1, a2 = hps[i].a, hps[j].a
                dd = det(a1, a2)
                if dd == 0:
                    continue
                y = ((hps[i].b * a2[1] - hps[j].b * a1[1]) / dd,
                     (a1[0] * hps[j].b - a2[0] * hps[i].b) / dd)
                if all(hp.contains(y) for hp in hps):
                    verts.append(y)
        region = cls(hps, _hull(verts))
        # recession directions of a 2D polyhedron lie along some a_i^perp
        for hp in hps:
            for d in ((-hp.a[1], hp.a[0]), (hp.a[1], -hp.a[0])):
                if all(dot(o.a, d) <= 0 for o in hps):
                    if region.vertices or _has_point(hps):
                        raise ValueError("unbounded region")
        return region

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def clip(self, hp: Halfplane) -> "Region":
        verts = self.vertices
        if not verts:
            return Region(self.halfplanes + (hp,), [])
        s = [hp.slack(v) for v in verts]
        if all(v >= 0 for v in s):
            return Region(self.halfplanes + (hp,), verts)
        out = []
        k = len(verts)
        for i in range(k):
            j = (i + 1) % k
            if s[i] >= 0:
                out.append(verts[i])
            if k > 1 and (s[i] > 0 > s[j] or s[i] < 0 < s[j]):
                lam = s[i] / (s[i] - s[j])
                out.append(lerp(verts[i], verts[j], lam))
        return Region(self.halfplanes + (hp,), _hull(out))

    def clip_all(self, hps: Iterable[Halfplane]) -> "Region":
        r = self
        for hp in hps:
            r = r.clip(hp)
        return r

    def area(self) -> mpq:
        v = self.vertices
        if len(v) < 3:
            return _ZERO
        s = _ZERO
        for i in range(len(v)):
            s += det(v[i], v[(i + 1) % len(v)])
        return abs(s) / 2

    def contains(self, y) -> bool:
        y = pt(y)
        return all(hp.contains(y) for hp in self.halfplanes)

    def bounding_box(self) -> tuple[int, int, int, int]:
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        return ceil_q(min(xs)), floor_q(max(xs)), ceil_q(min(ys)), floor_q(max(ys))


def _has_point(hps) -> bool:
    # a nonempty unbounded region always has a vertex or is a strip/halfplane;
    # test a few candidate points on the boundary lines
    for hp in hps:
        a = hp.a
        base = scale(hp.b / dot(a, a), a)
        if all(o.contains(base) for o in hps):
            return True
    return False


@dataclass(frozen=True)
class TriangleRegion:
    """Triangle ``conv{apex, v0, v1}`` with exact rational vertices."""

    apex: Rational2
    v0: Rational2
    v1: Rational2

    def __post_init__(self):
        object.__setattr__(self, "apex", pt(self.apex))
        object.__setattr__(self, "v0", pt(self.v0))
        object.__setattr__(self, "v1", pt(self.v1))

    @property
    def signed_area(self) -> mpq:
        return det(sub(self.v0, self.apex), sub(self.v1, self.apex)) / 2

    @property
    def area(self) -> mpq:
        return abs(self.signed_area)

    @property
    def orientation(self) -> int:
        s = self.signed_area
        return (s > 0) - (s < 0)

    @property
    def is_degenerate(self) -> bool:
        return self.signed_area == 0

    def region(self) -> Region:
        return Region.polygon([self.apex, self.v0, self.v1])


# ------------------------------------------------------------ lattice lines


@dataclass(frozen=True)
class LatticeLine:
    """Lattice points ``base + t*direction`` for integer ``t`` in ``[t_lo, t_hi]``.

    ``direction`` is primitive and lexicographically positive, so increasing
    ``t`` walks the points in lexicographic order.
    """

    base: tuple[int, int]
    direction: tuple[int, int]
    t_lo: int
    t_hi: int

    def point(self, t: int) -> tuple[int, int]:
        return (self.base[0] + t * self.direction[0], self.base[1] + t * self.direction[1])

    def points(self) -> list[tuple[int, int]]:
        return [self.point(t) for t in range(self.t_lo, self.t_hi + 1)]

    def __len__(self) -> int:
        return max(0, self.t_hi - self.t_lo + 1)

    def index_of(self, y) -> Optional[int]:
        """Parameter of lattice point ``y`` on the line, or None."""
        dy = (int(y[0]) - self.base[0], int(y[1]) - self.base[1])
        if dy[0] * self.direction[1] - dy[1] * self.direction[0] != 0:
            return None
        k = 0 if self.direction[0] != 0 else 1
        return dy[k] // self.direction[k]


def _line_t_range(hps: Sequence[Halfplane], p, d) -> Optional[tuple[int, int]]:
    lo, hi = None, None
    for hp in hps:
        alpha = hp.a[0] * d[0] + hp.a[1] * d[1]
        beta = hp.b - hp.a[0] * p[0] - hp.a[1] * p[1]
        if alpha == 0:
            if beta < 0:
                return None
        elif alpha > 0:
            t = floor_q(beta / alpha)
            hi = t if hi is None or t < hi else hi
        else:
            t = ceil_q(beta / alpha)
            lo = t if lo is None or t > lo else lo
    if lo is None or hi is None:
        raise ValueError("line is unbounded in region")
    if lo > hi:
        return None
    return lo, hi


def line_in_region(region: Region, base, direction) -> Optional[LatticeLine]:
    """Clip the lattice line through integer ``base`` along ``direction``."""
    d = lex_positive(primitive(direction))
    b = (int(base[0]), int(base[1]))
    rng = _line_t_range(region.halfplanes, b, d)
    if rng is None:
        return None
    return LatticeLine(b, d, rng[0], rng[1])


def _level_line(c: tuple[int, int], k: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """Integer point and direction of the line ``<c, y> = k`` (c primitive)."""
    _, a, b = _ext_gcd(c[0], c[1])
    return (k * a, k * b), lex_positive((-c[1], c[0]))


# ------------------------------------------------------------- flatness


def _flat_direction(verts: Sequence[Rational2]) -> tuple[int, int]:
    if len(verts) == 1:
        return (1, 0)
    if len(verts) == 2:
        e = sub(verts[1], verts[0])
        return primitive((-e[1], e[0]))
    # covariance of the vertices, scaled to integers (the reduction is scale-free)
    m = len(verts)
    den = 1
    for v in verts:
        den = math.lcm(den, int(v[0].denominator), int(v[1].denominator))
    X = [int(v[0].numerator) * (den // int(v[0].denominator)) for v in verts]
    Y = [int(v[1].numerator) * (den // int(v[1].denominator)) for v in verts]
    sx, sy = sum(X), sum(Y)
    a = b = c = 0
    for x, y in zip(X, Y):
        dx, dy = m * x - sx, m * y - sy
        a += dx * dx
        b += dx * dy
        c += dy * dy

    def form(u):
        return a * u[0] * u[0] + 2 * b * u[0] * u[1] + c * u[1] * u[1]

    def bil(u, w):
        return a * u[0] * w[0] + b * (u[0] * w[1] + u[1] * w[0]) + c * u[1] * w[1]

    b1, b2 = (1, 0), (0, 1)
    while True:
        f1, f2 = form(b1), form(b2)
        if f1 > f2:
            b1, b2, f1 = b2, b1, f2
        mu = (2 * bil(b1, b2) + f1) // (2 * f1)
        if mu == 0:
            break
        b2 = (b2[0] - mu * b1[0], b2[1] - mu * b1[1])
    return b1


def _width(verts, c):
    vals = [c[0] * v[0] + c[1] * v[1] for v in verts]
    return min(vals), max(vals)


class _Flat:
    __slots__ = ("c", "kmin", "kmax", "fat")

    def __init__(self, region: Region):
        verts = region.vertices
        c = _flat_direction(verts)
        lo, hi = _width(verts, c)
        self.c = c
        self.kmin, self.kmax = ceil_q(lo), floor_q(hi)
        w = hi - lo
        self.fat = w * w > _FAT * len(verts)


def _best_on_lines(region: Region, c, kmin: int, kmax: int, h, first_only=False):
    best = None
    for k in range(kmin, kmax + 1):
        p, d = _level_line(c, k)
        rng = _line_t_range(region.halfplanes, p, d)
        if rng is None:
            continue
        slope = h[0] * d[0] + h[1] * d[1]
        t = rng[0] if slope >= 0 else rng[1]
        y = (p[0] + t * d[0], p[1] + t * d[1])
        if first_only:
            return y
        key = (h[0] * y[0] + h[1] * y[1], y)
        if best is None or key < best:
            best = key
    return None if best is None else best[1]


def _box_lattice_free(verts) -> bool:
    xs = [v[0] for v in verts]
    ys = [v[1] for v in verts]
    return ceil_q(min(xs)) > floor_q(max(xs)) or ceil_q(min(ys)) > floor_q(max(ys))


def _any_point(region: Region):
    if region.is_empty or _box_lattice_free(region.vertices):
        return None
    fl = _Flat(region)
    if fl.kmin > fl.kmax:
        return None
    if fl.fat:
        return True
    return _best_on_lines(region, fl.c, fl.kmin, fl.kmax, (0, 0), first_only=True)


def _ilp(region: Region, h: tuple[int, int]):
    if region.is_empty or _box_lattice_free(region.vertices):
        return None
    fl = _Flat(region)
    if fl.kmin > fl.kmax:
        return None
    if not fl.fat:
        return _best_on_lines(region, fl.c, fl.kmin, fl.kmax, h)
    lo_r, hi_r = _width(region.vertices, h)
    lo, hi = ceil_q(lo_r), floor_q(hi_r)
    hq = (mpq(h[0]), mpq(h[1]))

    def feasible(tau):
        return _any_point(region.clip(Halfplane(hq, tau))) is not None

    prev, step, tau = lo - 1, 1, lo
    while not feasible(tau):
        prev = tau
        tau = min(hi, lo + 2 * step - 1)
        step *= 2
    while tau - prev > 1:
        mid = (prev + tau) // 2
        if feasible(mid):
            tau = mid
        else:
            prev = mid
    return _best_on_lines(region, h, tau, tau, h)


def _normalise_objective(h) -> tuple[int, int]:
    hq = (q(h[0]), q(h[1]))
    if hq[0] == 0 and hq[1] == 0:
        return (1, 0)
    return primitive(hq)


def ilp2_min(h, region) -> object:
    """Minimise ``<h, y>`` over the lattice points of a bounded polygon.

    ``region`` is a :class:`Region` or a sequence of :class:`Halfplane`.
    Returns the lexicographically smallest optimal point as an integer pair,
    or ``INFEASIBLE`` when the polygon holds no lattice point.  ``h = 0``
    yields the lexicographic minimum.
    """
    if not isinstance(region, Region):
        region = Region.from_halfplanes(list(region))
    hh = _normalise_objective(h)
    y = _ilp(region, hh)
    if y is None:
        return INFEASIBLE
    return (int(y[0]), int(y[1]))


def has_lattice_point(region: Region) -> bool:
    return _any_point(region) is not None


# ------------------------------------------------------------ thin regions


def thin_region_line(region: Region, probe=(1, 0), certify: bool = True):
    """Line holding every lattice point of a region known to have them collinear.

    The line joins the minimiser and maximiser of ``<probe, y>``; when they
    coincide it is the line through that point orthogonal to ``probe``.
    Returns a clipped :class:`LatticeLine` or ``EMPTY``.  With ``certify`` a
    lattice point off the line raises :class:`ContractError`.
    """
    c = _normalise_objective(probe)
    lo = _ilp(region, c)
    if lo is None:
        return EMPTY
    hi = _ilp(region, (-c[0], -c[1]))
    lo_i = (int(lo[0]), int(lo[1]))
    hi_i = (int(hi[0]), int(hi[1]))
    if lo_i != hi_i:
        d = primitive((hi_i[0] - lo_i[0], hi_i[1] - lo_i[1]))
    else:
        d = (-c[1], c[0])
    line = line_in_region(region, lo_i, d)
    if certify:
        nrm = (mpq(-line.direction[1]), mpq(line.direction[0]))
        val = dot(nrm, (mpq(lo_i[0]), mpq(lo_i[1])))
        for hp in (Halfplane.at_least(nrm, val + 1), Halfplane(nrm, val - 1)):
            if has_lattice_point(region.clip(hp)):
                raise ContractError("region has non-collinear lattice points")
    return line


def collinear_points_line(region: Region):
    """Single-pass variant of :func:`thin_region_line`.

    Walks the few lattice lines crossing the region along its flat
    direction instead of solving two integer programs.  Returns a
    :class:`LatticeLine` or ``EMPTY`` and raises :class:`ContractError` if the
    lattice points turn out not to be collinear.
    """
    if region.is_empty or _box_lattice_free(region.vertices):
        return EMPTY
    line = _lines_through(_Flat(region), region.halfplanes)
    if line is None:
        raise ContractError("region is too wide for collinear lattice points")
    return line


def _lines_through(fl: "_Flat", hps):
    """Collinear lattice points of ``hps`` scanned along level lines of ``fl``.

    ``fl`` describes a thin superset of the region.  Returns ``EMPTY``, a
    :class:`LatticeLine`, or None when the superset is too wide.
    """
    if fl.kmin > fl.kmax:
        return EMPTY
    if fl.fat:
        return None
    found = []
    for k in range(fl.kmin, fl.kmax + 1):
        p, d = _level_line(fl.c, k)
        rng = _line_t_range(hps, p, d)
        if rng is not None:
            found.append((p, d, rng))
    if not found:
        return EMPTY
    if len(found) == 1:
        p, d, (lo, hi) = found[0]
        return LatticeLine(p, d, lo, hi)
    if any(lo != hi for _, _, (lo, hi) in found):
        raise ContractError("region has non-collinear lattice points")
    pts = [(p[0] + lo * d[0], p[1] + lo * d[1]) for p, d, (lo, _) in found]
    d = lex_positive(primitive((pts[-1][0] - pts[0][0], pts[-1][1] - pts[0][1])))
    rng = _line_t_range(hps, pts[0], d)
    line = LatticeLine(pts[0], d, rng[0], rng[1])
    if any(line.index_of(y) is None for y in pts):
        raise ContractError("region has non-collinear lattice points")
    return line


class _VertexFlat(_Flat):
    __slots__ = ()

    def __init__(self, verts):
        c = _flat_direction(verts)
        lo, hi = _width(verts, c)
        self.c = c
        self.kmin, self.kmax = ceil_q(lo), floor_q(hi)
        w = hi - lo
        self.fat = w * w > _FAT * len(verts)


def shrinking_lines(u, v, w, cuts: Sequence[Halfplane] = (), certify: bool = False,
                    fast: bool = False) -> list[LatticeLine]:
    """Lines covering the lattice points of ``conv{u, u+v, u+v-w}``.

    Valid when ``conv{u, u+v, u+v+w}`` has no lattice point other than ``u``
    and those on the edge ``[u+v, u+v+w]``.  The triangle is split into three
    translates of ``P = conv{0, v/2, w/2, (v+w)/2}``, each of which holds
    collinear lattice points.  Optional ``cuts`` restrict every region.  With
    ``fast`` the lines come from :func:`collinear_points_line`.
    """
    u, v, w = pt(u), pt(v), pt(w)
    if det(v, w) == 0:
        raise ValueError("u, u+v, u+v+w must be affinely independent")
    half = mpq(1, 2)
    target = Region.polygon([u, add(u, v), sub(add(u, v), w)])
    P = [(_ZERO, _ZERO), scale(half, v), scale(half, w), scale(half, add(v, w))]
    shifts = [scale(-half, w), sub(scale(half, v), w), sub(scale(half, v), scale(half, w))]
    lines = []
    # parallelogram vertices in counterclockwise order
    ccw = [P[0], P[1], P[3], P[2]] if det(v, w) > 0 else [P[0], P[2], P[3], P[1]]
    for s in shifts:
        corner = add(u, s)
        if fast:
            verts = [add(corner, p) for p in ccw]
            if _box_lattice_free(verts):
                continue
            hps = _polygon_halfplanes(verts) + list(target.halfplanes) + list(cuts)
            line = _lines_through(_VertexFlat(verts), hps)
            if line is not None:
                if line is not EMPTY:
                    lines.append(line)
                continue
        reg = Region.polygon([add(corner, p) for p in P])
        reg = reg.clip_all(target.halfplanes).clip_all(cuts)
        if reg.is_empty:
            continue
        if fast:
            line = collinear_points_line(reg)
        else:
            line = thin_region_line(reg, certify=certify)
        if line is not EMPTY:
            lines.append(line)
    return lines


def enumerate_lattice_points(region: Region) -> list[tuple[int, int]]:
    """Brute-force list of lattice points in a region, sorted."""
    if region.is_empty:
        return []
    x0, x1, y0, y1 = region.bounding_box()
    out = []
    for a in range(x0, x1 + 1):
        for b in range(y0, y1 + 1):
            y = (mpq(a), mpq(b))
            if all(hp.contains(y) for hp in region.halfplanes):
                out.append((a, b))
    return out
