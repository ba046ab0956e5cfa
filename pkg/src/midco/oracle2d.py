"""Pure-integer problems in two variables.

The search covers the box ``[-B, B]^2`` by triangles with a common apex and
shrinks each of them towards the part that may still hold good lattice
points.  Every step solves one small integer program over the middle third
of the current triangle; the region that is discarded is certified by
convexity along a line through the apex, and the region that is kept aside is
searched on at most a handful of lattice lines.

The same machinery, started from the hull vertices of the best points found
so far, enumerates k-th best points.  Function evaluations go through a
:class:`PlaneOps` layer so that the mixed-integer solver can run the search on
approximate fiber values.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from gmpy2 import mpq

from .bisect import (WIDTH_MIN, NoisyFn, ScaledLattice, _golden, golden_budget,
                     golden_min_integer, integer_min_exact, lattice_interpolant)
from .lattice2d import (Halfplane, LatticeLine, Region, _hull, add, collinear_points_line, det,
                        dot, ilp2_min, lerp, line_in_region, primitive, pt, shrinking_lines, sub)
from .model import (EMPTY, INFEASIBLE, NO_MORE_POINTS, TOL_FEAS, ContractError,
                    DimensionError, ImprovementOutcome, MixedPoint, Problem)

HALF = mpq(1, 2)
THIRD = mpq(1, 3)
TWO_THIRDS = mpq(2, 3)

# facets of the box: (corner a, corner b, outward normal), bottom/right/top/left
_FACETS = (((-1, -1), (1, -1), (0, -1)),
           ((1, -1), (1, 1), (1, 0)),
           ((1, 1), (-1, 1), (0, 1)),
           ((-1, 1), (-1, -1), (-1, 0)))


def iteration_bound(B: int) -> int:
    """Per-triangle cap ``ceil(ln(4 B^2) / ln(3/2))`` on shrink iterations."""
    return math.ceil(math.log(4.0 * B * B) / math.log(1.5))


def _f2(p) -> tuple[float, float]:
    return (float(p[0]), float(p[1]))


def _area(a, b, c) -> mpq:
    return abs(det(sub(b, a), sub(c, a))) / 2


# ------------------------------------------------------------- statistics


@dataclass
class TriangleTrace:
    """Shrink history of one search triangle."""

    apex: tuple
    base: tuple
    bound: int
    iterations: int = 0
    ratios: list = field(default_factory=list)
    case1_exit: bool = False


@dataclass
class SearchStats:
    """Per-triangle iteration counts and exact volume ratios."""

    triangles: list = field(default_factory=list)

    def violations(self) -> list[str]:
        out = []
        for tr in self.triangles:
            if tr.iterations > tr.bound:
                out.append(f"{tr.iterations} iterations > {tr.bound} at apex {tr.apex}")
            for r in tr.ratios:
                if r > TWO_THIRDS:
                    out.append(f"shrink ratio {r} > 2/3 at apex {tr.apex}")
        return out

    @property
    def max_ratio(self) -> mpq:
        rs = [r for tr in self.triangles for r in tr.ratios]
        return max(rs) if rs else mpq(0)


# ----------------------------------------------------------- evaluations


class PlaneOps:
    """Function access for the planar search.

    Subclasses provide ``value``/``gvalue`` at real points; lattice values
    are cached.  ``gamma`` is the evaluation accuracy of ``value``
    (0 for exact evaluation); constraint values are taken as exact.
    """

    gamma: float = 0.0
    spread: float = 1.0
    constrained: bool = True

    def __init__(self):
        self._fcache: dict = {}
        self._gcache: dict = {}

    def value(self, p) -> float:
        raise NotImplementedError

    def gvalue(self, p) -> float:
        raise NotImplementedError

    def lattice_value(self, y) -> float:
        y = (int(y[0]), int(y[1]))
        if y not in self._fcache:
            self._fcache[y] = float(self.value(y))
        return self._fcache[y]

    def lattice_g(self, y) -> float:
        if not self.constrained:
            return -math.inf
        y = (int(y[0]), int(y[1]))
        if y not in self._gcache:
            self._gcache[y] = float(self.gvalue(y))
        return self._gcache[y]

    def feasible(self, y) -> bool:
        return self.lattice_g(y) <= TOL_FEAS

    # ---- one lattice line

    def _feasible_range(self, line: LatticeLine, lo: int, hi: int):
        if not self.constrained:
            return lo, hi

        def G(t):
            return self.lattice_g(line.point(t))

        ts, gmin, _ = integer_min_exact(G, lo, hi)
        if gmin > TOL_FEAS:
            return None
        a, b = lo, ts
        if G(a) > TOL_FEAS:
            while b - a > 1:
                m = (a + b) // 2
                if G(m) <= TOL_FEAS:
                    b = m
                else:
                    a = m
            a = b
        left = a
        a, b = ts, hi
        if G(b) > TOL_FEAS:
            while b - a > 1:
                m = (a + b) // 2
                if G(m) <= TOL_FEAS:
                    a = m
                else:
                    b = m
            b = a
        return left, b

    def _min_on(self, line: LatticeLine, a: int, b: int) -> tuple[float, int]:
        def F(t):
            return self.lattice_value(line.point(t))

        if self.gamma == 0 or b - a < 3:
            t, v, _ = integer_min_exact(F, a, b)
            if self.gamma > 0:
                t = min(range(a, b + 1), key=lambda s: (F(s), s))
                v = F(t)
            return v, t
        fn = NoisyFn(lattice_interpolant(F), self.gamma, self.spread, a, b)
        res = golden_min_integer(fn, ScaledLattice.integers(a, b))
        return res.value, int(res.index)

    def line_best(self, line: LatticeLine, exclude=()) -> Optional[tuple[float, tuple]]:
        """Best feasible lattice point of ``line`` outside ``exclude``."""
        if line is EMPTY or len(line) == 0:
            return None
        rng = self._feasible_range(line, line.t_lo, line.t_hi)
        if rng is None:
            return None
        lo, hi = rng
        ex = sorted(t for t in (line.index_of(y) for y in exclude)
                    if t is not None and lo <= t <= hi)
        pieces = [(lo, hi)]
        if ex:
            if ex[-1] - ex[0] + 1 != len(ex):
                raise ContractError("excluded points are not contiguous on a line")
            pieces = [(lo, ex[0] - 1), (ex[-1] + 1, hi)]
        best = None
        for a, b in pieces:
            if a > b:
                continue
            v, t = self._min_on(line, a, b)
            cand = (v, line.point(t))
            if best is None or cand < best:
                best = cand
        return best

    # ---- side test

    def _golden_below(self, fun, zhat, p, ref: float, gamma: float) -> bool:
        zf, pf = np.array(_f2(zhat)), np.array(_f2(p))
        fn = NoisyFn(lambda s: fun(zf + s * (pf - zf)), gamma, self.spread)
        units = golden_budget(gamma, self.spread)
        res = _golden(fn, 0.0, 1.0, units, WIDTH_MIN, stop_below=ref)
        return res.stop == "found"

    def decreases(self, zhat, p, use_g: bool) -> bool:
        """Is there a point of ``[zhat, p]`` with a certified smaller value?

        Compares ``g`` when ``use_g`` is set and the objective otherwise.
        """
        if use_g:
            return self._golden_below(self.gvalue, zhat, p, self.lattice_g(zhat), 0.0)
        ref = self.lattice_value(zhat) - self.gamma
        return self._golden_below(self.value, zhat, p, ref, self.gamma)


_SMOOTH_OBJECTIVES = ("quadratic",)
_SMOOTH_CONSTRAINTS = ("linear", "ball")


class ExactOps(PlaneOps):
    """Exact evaluation of a pure-integer problem with ``n = 2, d = 0``.

    For differentiable registered families the side test reads the sign of
    the directional derivative at the lattice point, which is a certificate
    in both directions; otherwise it falls back to golden search.
    """

    def __init__(self, problem: Problem):
        super().__init__()
        if problem.n != 2 or problem.d != 0:
            raise DimensionError("planar search needs n = 2 and d = 0")
        self.problem = problem
        self.spread = problem.spread
        self.constrained = bool(problem.constraints)
        self.smooth = (problem.objective.family in _SMOOTH_OBJECTIVES
                       and all(c.family in _SMOOTH_CONSTRAINTS for c in problem.constraints))

    def value(self, p) -> float:
        return self.problem.f(np.array(_f2(p)))

    def gvalue(self, p) -> float:
        return self.problem.g(np.array(_f2(p)))

    def decreases(self, zhat, p, use_g: bool) -> bool:
        if not self.smooth:
            return super().decreases(zhat, p, use_g)
        z = np.array(_f2(zhat))
        d = np.array(_f2(p)) - z
        if use_g:
            vals = self.problem.g_all(z)
            top = max(vals)
            slopes = [float(c.grad(z) @ d) for c, v in zip(self.problem.constraints, vals)
                      if v == top]
            return max(slopes) < 0
        _, grad = self.problem.f_grad(z)
        return float(grad @ d) < 0


# ----------------------------------------------------------------- engine


class _Search:
    """Triangle-shrinking search around one apex."""

    def __init__(self, ops: PlaneOps, B: int, apex, exclude=(), cut_apex: bool = False,
                 stop_at: Optional[float] = None, stats: Optional[SearchStats] = None):
        self.ops = ops
        self.B = B
        self.x = pt(apex)
        self.exclude = frozenset((int(a), int(b)) for a, b in exclude)
        self.cut_apex = cut_apex
        self.stop_at = stop_at
        self.stats = stats if stats is not None else SearchStats()
        self.best: Optional[tuple[float, tuple]] = None
        self._seen_lines: dict = {}

    @property
    def done(self) -> bool:
        return (self.stop_at is not None and self.best is not None
                and self.best[0] <= self.stop_at)

    def offer(self, cand) -> None:
        if cand is not None and (self.best is None or cand < self.best):
            self.best = cand

    def offer_point(self, y) -> None:
        y = (int(y[0]), int(y[1]))
        if y in self.exclude or not self.ops.feasible(y):
            return
        self.offer((self.ops.lattice_value(y), y))

    def search_line(self, line) -> None:
        if line is EMPTY or line is None or len(line) == 0:
            return
        key = (line.direction, line.point(line.t_lo), line.point(line.t_hi))
        if key in self._seen_lines:
            return
        self._seen_lines[key] = True
        self.offer(self.ops.line_best(line, self.exclude))

    def search_lemma2(self, u, v, w) -> None:
        """Lattice points of ``conv{u, u+v, u+v-w}`` on at most three lines."""
        if det(v, w) == 0:
            self.search_polygon([u, add(u, v), sub(add(u, v), w)])
            return
        for line in shrinking_lines(u, v, w, fast=True):
            self.search_line(line)

    def search_polygon(self, points) -> None:
        """Region known to hold collinear lattice points."""
        self.search_line(collinear_points_line(Region.polygon(points)))

    def search_segment(self, a, b, through) -> None:
        """Lattice points of segment ``[a, b]`` on the lattice line through ``through``."""
        reg = Region.polygon([a, b])
        d = sub(b, a)
        self.search_line(line_in_region(reg, through, d))

    def run_triangle(self, v0, v1, h: tuple[int, int]) -> None:
        x = self.x
        v0, v1 = pt(v0), pt(v1)
        trace = TriangleTrace(apex=_f2(x), base=(_f2(v0), _f2(v1)), bound=iteration_bound(self.B))
        self.stats.triangles.append(trace)
        hq = (mpq(h[0]), mpq(h[1]))
        hx = dot(hq, x)
        hF = dot(hq, v0)
        # a lattice apex is searched separately; cutting it keeps H-levels apart
        integral = x[0].denominator == 1 and x[1].denominator == 1
        apex_cut = Halfplane.strict_cut(h, x) if self.cut_apex or integral else None
        area = _area(x, v0, v1)
        while area >= HALF and not self.done:
            trace.iterations += 1
            v13, v23 = lerp(v0, v1, THIRD), lerp(v0, v1, TWO_THIRDS)
            tbar = Region.polygon([x, v13, v23])
            if apex_cut is not None:
                tbar = tbar.clip(apex_cut)
            zhat = ilp2_min(h, tbar)
            if zhat is INFEASIBLE:
                # middle third is lattice-free: both outer thirds are thin
                self.search_lemma2(x, sub(v13, x), sub(v13, v0))
                self.search_lemma2(x, sub(v23, x), sub(v13, v23))
                trace.case1_exit = True
                return
            self.offer_point(zhat)
            if self.done:
                return
            zq = pt(zhat)
            s = (hF - hx) / (dot(hq, zq) - hx)
            v = lerp(x, zq, s)
            sig = (dot(hq, zq) - hx) / (hF - hx)
            z0, z1 = lerp(x, v0, sig), lerp(x, v1, sig)
            z13, z23 = lerp(z0, z1, THIRD), lerp(z0, z1, TWO_THIRDS)
            feasible = (zhat not in self.exclude and self.ops.feasible(zhat)) or \
                (zhat in self.exclude)
            left = self.ops.decreases(zhat, z0, use_g=not feasible)
            if left:
                self.search_lemma2(x, sub(z23, x), sub(z13, z23))
                self.search_segment(z13, z1, zhat)
                new = (v0, v)
            else:
                self.search_lemma2(x, sub(z13, x), sub(z23, z13))
                self.search_segment(z0, z23, zhat)
                new = (v, v1)
            if self.done:
                return
            new_area = _area(x, *new)
            trace.ratios.append(new_area / area)
            v0, v1, area = new[0], new[1], new_area
        if not self.done:
            self.search_polygon([x, v0, v1])


def _facet_triangles(B: int):
    for a, b, h in _FACETS:
        yield (mpq(a[0] * B), mpq(a[1] * B)), (mpq(b[0] * B), mpq(b[1] * B)), h


def _integral_corners(x) -> list[tuple[int, int]]:
    fx = [math.floor(x[0]), math.ceil(x[0])]
    fy = [math.floor(x[1]), math.ceil(x[1])]
    return sorted({(a, b) for a in fx for b in fy})


# --------------------------------------------------------------- results


@dataclass
class PlanarResult:
    """Best lattice point found by a planar search."""

    point: tuple
    value: float
    stats: SearchStats

    @property
    def mixed_point(self) -> MixedPoint:
        return MixedPoint.integral(self.point)


def _query(problem: Problem, x) -> tuple:
    if isinstance(x, MixedPoint):
        x = x.vector()
    xs = np.asarray(x, dtype=float).ravel()
    if xs.shape != (2,):
        raise DimensionError("query must have two coordinates")
    if np.any(np.abs(xs) > problem.B + TOL_FEAS):
        raise ValueError("query lies outside the box")
    xs = np.clip(xs, -problem.B, problem.B)
    return (mpq(float(xs[0])), mpq(float(xs[1])))


def run_planar(ops: PlaneOps, B: int, apex, stop_at: Optional[float],
               stats: Optional[SearchStats] = None, seed_corners: bool = True) -> _Search:
    """Full search over the four facet triangles of ``apex``."""
    search = _Search(ops, B, apex, stop_at=stop_at, stats=stats)
    if seed_corners:
        for y in _integral_corners(_f2(search.x)):
            if abs(y[0]) <= B and abs(y[1]) <= B:
                search.offer_point(y)
    for v0, v1, h in _facet_triangles(B):
        if search.done:
            break
        search.run_triangle(v0, v1, h)
    return search


def improve_2d(problem: Problem, query, stats: Optional[SearchStats] = None
               ) -> ImprovementOutcome:
    """Improvement oracle for two integer variables.

    Returns ``improved`` with a feasible lattice point whose value is at most
    ``f(query)``, or ``no_better`` when no such lattice point exists.
    """
    x = _query(problem, query)
    ops = ExactOps(problem)
    xf = np.array(_f2(x))
    if ops.constrained and problem.g(xf) > TOL_FEAS:
        raise ValueError("query is infeasible")
    c = problem.f(xf)
    search = run_planar(ops, problem.B, x, stop_at=c, stats=stats)
    if search.best is not None and search.best[0] <= c:
        return ImprovementOutcome.improved(MixedPoint.integral(search.best[1]), search.best[0])
    return ImprovementOutcome.no_better()


def minimize_2d(problem: Problem, x, stats: Optional[SearchStats] = None):
    """Integer minimiser over the box given a point with ``f(x) <= f*``.

    Returns a :class:`PlanarResult` (lexicographically smallest optimum) or
    ``INFEASIBLE``.
    """
    x = _query(problem, x)
    ops = ExactOps(problem)
    xf = np.array(_f2(x))
    if ops.constrained and problem.g(xf) > TOL_FEAS:
        raise ValueError("start point is infeasible")
    lower = problem.f(xf)
    stats = stats if stats is not None else SearchStats()
    search = run_planar(ops, problem.B, x, stop_at=lower, stats=stats)
    if search.best is None:
        return INFEASIBLE
    return PlanarResult(search.best[1], search.best[0], stats)


def _phase1(problem: Problem):
    """Point of the box minimising ``max_i g_i``, found by SLSQP."""
    from scipy.optimize import minimize

    B, dim = problem.B, problem.dim
    cons = [{"type": "ineq", "fun": (lambda w, c=c: w[-1] - c.value(w[:-1])),
             "jac": (lambda w, c=c: np.append(-np.asarray(c.grad(w[:-1])), 1.0))}
            for c in problem.constraints]
    z0 = np.zeros(dim)
    w0 = np.append(z0, max(c.value(z0) for c in problem.constraints) + 1.0)
    res = minimize(lambda w: w[-1], w0, jac=lambda w: np.eye(dim + 1)[-1], method="SLSQP",
                   bounds=[(-B, B)] * dim + [(None, None)], constraints=cons,
                   options={"ftol": 1e-15, "maxiter": 1000})
    return np.clip(res.x[:-1], -B, B)


def relaxation_min(problem: Problem):
    """Continuous minimiser of a planar problem over the box, or ``INFEASIBLE``."""
    from scipy.optimize import minimize

    B = problem.B
    obj = problem.objective
    cons = [{"type": "ineq", "fun": (lambda z, c=c: -c.value(z)),
             "jac": (lambda z, c=c: -np.asarray(c.grad(z)))} for c in problem.constraints]

    def gmax(z):
        return max((c.value(z) for c in problem.constraints), default=-np.inf)

    interior = [None]

    def repaired(z):
        # pull a slightly infeasible point towards a most-feasible point
        if gmax(z) <= TOL_FEAS:
            return z
        if interior[0] is None:
            interior[0] = _phase1(problem)
        zi = interior[0]
        if gmax(zi) > TOL_FEAS:
            return None
        lo, hi = 0.0, 1.0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if gmax(z + mid * (zi - z)) <= TOL_FEAS:
                hi = mid
            else:
                lo = mid
        return z + hi * (zi - z)

    best = None
    for start in (np.zeros(problem.dim), np.full(problem.dim, 0.5 * B),
                  np.full(problem.dim, -0.5 * B)):
        res = minimize(obj.value, start, jac=obj.grad, method="SLSQP",
                       bounds=[(-B, B)] * problem.dim, constraints=cons,
                       options={"ftol": 1e-14, "maxiter": 500})
        z = repaired(np.clip(res.x, -B, B))
        if z is None:
            return INFEASIBLE
        if best is None or obj.value(z) < obj.value(best):
            best = z
    return best


# ---------------------------------------------------------- k-th best points


class BestPointSet:
    """Ordered best points ``Pi`` with their counterclockwise hull vertices."""

    def __init__(self, points: Sequence = ()):
        self.points: list[tuple[int, int]] = []
        self.values: list[float] = []
        self.hull: list[tuple[int, int]] = []
        for p in points:
            self.add(p)

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, y) -> bool:
        return (int(y[0]), int(y[1])) in set(self.points)

    def add(self, p, value: Optional[float] = None) -> None:
        p = (int(p[0]), int(p[1]))
        if p in self.points:
            raise ValueError(f"{p} is already in the set")
        self.points.append(p)
        self.values.append(value)
        verts = _hull([pt(y) for y in self.points])
        self.hull = [(int(v[0]), int(v[1])) for v in verts]

    def lattice_points(self) -> list[tuple[int, int]]:
        """All lattice points of the hull (brute force)."""
        from .lattice2d import enumerate_lattice_points

        return enumerate_lattice_points(Region.polygon([pt(y) for y in self.points]))

    def hull_invariant_holds(self) -> bool:
        if not self.points:
            return True
        return sorted(self.lattice_points()) == sorted(self.points)


def _ray_exit(y, d, B: int):
    t = None
    for j in range(2):
        if d[j] != 0:
            bound = B if d[j] > 0 else -B
            tj = (bound - y[j]) / d[j]
            t = tj if t is None or tj < t else t
    return (y[0] + t * d[0], y[1] + t * d[1])


def _common_facet(p, q, B: int):
    if p[0] == q[0] == B:
        return (1, 0)
    if p[0] == q[0] == -B:
        return (-1, 0)
    if p[1] == q[1] == B:
        return (0, 1)
    if p[1] == q[1] == -B:
        return (0, -1)
    raise ContractError("search triangle base is not on a facet")


def search_triangles(hull: Sequence[tuple[int, int]], B: int):
    """Cover the box minus the hull by triangles ``(apex, b1, b2, h)``.

    Each triangle has a hull vertex as apex and a piece of one facet (outward
    normal ``h``) as opposite side.
    """
    out = []
    if len(hull) == 1:
        for v0, v1, h in _facet_triangles(B):
            out.append((hull[0], v0, v1, h))
        return out
    nu = len(hull)
    corners = [(mpq(a * B), mpq(b * B)) for a, b in ((-1, -1), (1, -1), (1, 1), (-1, 1))]
    for i in range(nu):
        y = pt(hull[i])
        e_next = sub(pt(hull[(i + 1) % nu]), y)
        e_prev = sub(y, pt(hull[i - 1]))
        rb, ra = _ray_exit(y, e_prev, B), _ray_exit(y, e_next, B)
        inside = [c for c in corners
                  if det(sub(c, y), e_next) > 0 and det(sub(c, y), e_prev) < 0]

        def ccw(c1, c2, y=y):
            s = det(sub(c1, y), sub(c2, y))
            return -1 if s > 0 else (1 if s < 0 else 0)

        seq = [rb] + sorted(inside, key=functools.cmp_to_key(ccw)) + [ra]
        for p, q in zip(seq, seq[1:]):
            if p == q:
                continue
            out.append((hull[i], p, q, _common_facet(p, q, B)))
    return out


def adjust_kth_point(best: BestPointSet, cand) -> tuple[int, int]:
    """Move a k-th best candidate so the hull gains no other lattice point.

    Walks along the hull edges visible from the candidate, each time taking
    the lattice point of the new triangle nearest to the edge.  Every point
    picked lies in the hull of ``Pi`` and the candidate, so by convexity it is
    as good as the candidate.
    """
    z = (int(cand[0]), int(cand[1]))
    if z in best:
        raise ValueError("candidate is already one of the best points")
    for _ in range(4 * len(best.points) + 8):
        z = _adjust_pass(best, z)
        bad = _hull_violation(best, z)
        if bad is None:
            return z
        z = bad
    raise ContractError("hull adjustment did not settle")


def _walk(y, z) -> tuple[int, int]:
    d = primitive((z[0] - y[0], z[1] - y[1]))
    return (y[0] + d[0], y[1] + d[1])


def _edge_normal(e) -> tuple[int, int]:
    # det(d, e) = <(e_y, -e_x), d>
    return primitive((e[1], -e[0]))


def _adjust_pass(best: BestPointSet, z) -> tuple[int, int]:
    hull = best.hull
    nu = len(hull)
    if nu == 1:
        return _walk(hull[0], z)
    vis = [det(sub(pt(z), pt(hull[i])), sub(pt(hull[(i + 1) % nu]), pt(hull[i]))) > 0
           for i in range(nu)]
    if not any(vis):
        return _collinear_walk(hull, z)
    start = next(i for i in range(nu) if vis[i] and not vis[i - 1]) if not all(vis) else 0
    for step in range(nu):
        i = (start + step) % nu
        yi, yj = pt(hull[i]), pt(hull[(i + 1) % nu])
        e = sub(yj, yi)
        s = det(sub(pt(z), yi), e)
        if s < 0:
            break
        if s == 0:
            continue
        h = _edge_normal(e)
        tri = Region.polygon([pt(z), yi, yj]).clip(Halfplane.strict_cut(h, hull[i]))
        y = ilp2_min(h, tri)
        if y is not INFEASIBLE:
            z = y
    return z


def _collinear_walk(hull, z) -> tuple[int, int]:
    # the candidate lies on the line of a hull edge, outside the hull
    nu = len(hull)
    for i in range(nu):
        yi, yj = hull[i], hull[(i + 1) % nu]
        e = (yj[0] - yi[0], yj[1] - yi[1])
        if det(sub(pt(z), pt(yi)), pt(e)) == 0:
            near = min((yi, yj), key=lambda y: abs(z[0] - y[0]) + abs(z[1] - y[1]))
            return _walk(near, z)
    raise ContractError("candidate is inside the hull of the best points")


def _hull_violation(best: BestPointSet, z):
    """A lattice point of ``conv(Pi + z)`` outside ``Pi + z``, or None."""
    hull = best.hull
    nu = len(hull)
    if nu == 1:
        w = _walk(hull[0], z)
        return None if w == z else w
    found_visible = False
    for i in range(nu):
        yi, yj = pt(hull[i]), pt(hull[(i + 1) % nu])
        e = sub(yj, yi)
        s = det(sub(pt(z), yi), e)
        if s > 0:
            found_visible = True
            h = _edge_normal(e)
            tri = Region.polygon([pt(z), yi, yj]).clip(Halfplane.strict_cut(h, hull[i]))
            hz = h[0] * z[0] + h[1] * z[1]
            tri = tri.clip(Halfplane((mpq(h[0]), mpq(h[1])), mpq(hz - 1)))
            y = ilp2_min(h, tri)
            if y is not INFEASIBLE:
                return y
    if not found_visible:
        w = _collinear_walk(hull, z)
        return None if w == z else w
    return None


def kth_search(ops: PlaneOps, B: int, best: BestPointSet,
               stats: Optional[SearchStats] = None):
    """Best feasible lattice point outside ``best`` (before hull adjustment)."""
    stop_at = max(ops.lattice_value(y) for y in best.points)
    stats = stats if stats is not None else SearchStats()
    found = None
    for apex, b1, b2, h in search_triangles(best.hull, B):
        search = _Search(ops, B, apex, exclude=best.points, cut_apex=True,
                         stop_at=stop_at, stats=stats)
        if found is not None:
            search.best = found
        search.run_triangle(b1, b2, h)
        found = search.best
        if search.done:
            break
    return found


def kth_best_integer(problem: Problem, best: BestPointSet,
                     stats: Optional[SearchStats] = None):
    """Next best feasible lattice point after the points of ``best``.

    Returns ``(point, value)`` or ``NO_MORE_POINTS``.  ``best`` is not
    modified; callers append the result themselves.
    """
    ops = ExactOps(problem)
    if len(best) == 0:
        x = relaxation_min(problem)
        if x is INFEASIBLE:
            return NO_MORE_POINTS
        res = minimize_2d(problem, x, stats=stats)
        if res is INFEASIBLE:
            return NO_MORE_POINTS
        return res.point, res.value
    found = kth_search(ops, problem.B, best, stats)
    if found is None:
        return NO_MORE_POINTS
    z = adjust_kth_point(best, found[1])
    return z, ops.lattice_value(z)


def kth_best_sequence(problem: Problem, k: int) -> list[tuple[tuple[int, int], float]]:
    """The first ``k`` best points, stopping early when points run out."""
    best = BestPointSet()
    out = []
    for _ in range(k):
        r = kth_best_integer(problem, best)
        if r is NO_MORE_POINTS:
            break
        best.add(r[0], r[1])
        out.append(r)
    return out


def level_side_test(f, zhat, p, threshold: Optional[float] = None,
                    gamma: float = 0.0, spread: float = 1.0) -> bool:
    """Does ``f`` drop below ``f(zhat)`` (or ``threshold``) on ``[zhat, p]``?

    ``f`` takes a real 2-vector.  A golden search along the segment stops
    at the first value below the reference; with ``gamma > 0`` the reference
    is lowered by ``gamma`` so that a positive answer is certified.
    """
    zf = np.asarray(zhat, dtype=float)
    pf = np.asarray(p, dtype=float)
    ref = f(zf) if threshold is None else threshold
    fn = NoisyFn(lambda s: f(zf + s * (pf - zf)), gamma, spread)
    res = _golden(fn, 0.0, 1.0, golden_budget(gamma, spread), WIDTH_MIN,
                  stop_below=ref - gamma)
    return res.stop == "found"
