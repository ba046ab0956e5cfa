"""Mixed-integer layer: partial minimisation over the continuous variables.

For a fixed integer part ``x`` the *fiber* value is
``phi(x) = min_y f(x, y)`` subject to the constraints.  The planar search of
:mod:`midco.oracle2d` runs unchanged on ``phi`` (and on the aggregated fiber
constraint ``g(x) = min_y max_i g_i(x, y)``), which yields improvement oracles
for one and two integer variables, k-th best fibers, and a solver for any
number of integer variables that fixes them two at a time.

Fiber values may be reported with an error in ``[0, gamma]``; the searches
then use the noise-tolerant golden search and the results carry accuracy
``kappa * gamma`` per enumerated point.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog, minimize

from .bisect import (KAPPA, NoisyFn, ScaledLattice, golden_min_integer, integer_min_exact,
                     lattice_interpolant)
from .model import (INFEASIBLE, NO_MORE_POINTS, TOL_FEAS, ContractError, DimensionError,
                    ImprovementOutcome, MixedPoint, Problem, _as_vector)
from .oracle2d import (BestPointSet, PlaneOps, SearchStats, _f2, adjust_kth_point, kth_search,
                       run_planar)

KKT_TOL = 1e-9
DEFAULT_BUDGET = 1_000_000


class FiberInfeasible(ValueError):
    """No continuous completion satisfies the constraints."""


class BudgetExhausted(RuntimeError):
    """The fiber-evaluation budget ran out."""


# ------------------------------------------------------------ inner solver


def _qp_active_set(H, q, A, b):
    """KKT point of ``min u'Hu/2 + q'u`` s.t. ``A u <= b`` by active-set enumeration.

    Candidate active sets are tried in increasing size; the first one whose
    solution is primal and dual feasible is optimal.  Returns
    ``(u, multipliers)`` or None.
    """
    k, r = H.shape[0], A.shape[0]
    scale = 1.0 + float(np.abs(H).max(initial=0.0)) + float(np.abs(q).max(initial=0.0))
    for size in range(0, min(k, r) + 1):
        for S in itertools.combinations(range(r), size):
            AS = A[list(S)]
            K = np.block([[H, AS.T], [AS, np.zeros((size, size))]])
            rhs = np.concatenate([-q, b[list(S)]])
            sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
            if np.linalg.norm(K @ sol - rhs) > KKT_TOL * scale * (1.0 + np.linalg.norm(rhs)):
                continue
            u, lam = sol[:k], sol[k:]
            if size and lam.min() < -KKT_TOL * scale:
                continue
            if r and np.any(A @ u - b > KKT_TOL * (1.0 + np.abs(b))):
                continue
            mult = np.zeros(r)
            mult[list(S)] = np.maximum(lam, 0.0)
            return u, mult
    return None


@dataclass
class FiberResult:
    """Solution of one partial minimisation.

    ``value`` is what the search sees (exact value plus the simulated
    error); ``exact`` is ``f`` at the returned point ``z``.  ``subgrad`` is a
    subgradient of the optimal value as a function of the full vector, valid
    in the fixed coordinates, or None when unavailable.
    """

    z: np.ndarray
    value: float
    exact: float
    subgrad: Optional[np.ndarray] = None


def _noise_unit(key, seed: int) -> float:
    h = hashlib.sha256(f"{seed}:{key!r}".encode()).hexdigest()[:12]
    return int(h, 16) / float(16 ** 12)


class FiberEvaluator:
    """Partial minimisation with a per-fiber cache.

    ``solve(fixed, boxed)`` minimises ``f`` over every coordinate not in
    ``fixed``; coordinates listed in ``boxed`` (relaxed integer variables)
    are kept in ``[-B, B]``.  With ``gamma > 0`` reported values are raised
    by a deterministic amount in ``[0, gamma]``.
    """

    def __init__(self, problem: Problem, gamma: float = 0.0, seed: int = 0,
                 budget: float = DEFAULT_BUDGET):
        if gamma < 0:
            raise ValueError("gamma must be nonnegative")
        self.problem = problem
        self.gamma = float(gamma)
        self.seed = int(seed)
        self.budget = budget
        self.evaluations = 0
        self._cache: dict = {}
        self._gcache: dict = {}
        obj = problem.objective
        self._quadratic = obj.family == "quadratic"
        self._linear = all(c.family == "linear" for c in problem.constraints)
        if self._linear and problem.constraints:
            self._A = np.array([c.params["a"] for c in problem.constraints])
            self._b = np.array([c.params["b"] for c in problem.constraints])
        else:
            self._A = np.zeros((0, problem.dim))
            self._b = np.zeros(0)

    # ---- public

    def __call__(self, x) -> tuple[np.ndarray, float]:
        """Fiber of an integer point: ``(y_x, reported value)``."""
        res = self.fiber(x)
        return res.z[self.problem.n:], res.value

    def fiber(self, x) -> FiberResult:
        x = np.asarray(x, dtype=float).ravel()
        if x.shape != (self.problem.n,):
            raise DimensionError(f"expected {self.problem.n} integer coordinates")
        return self.solve(dict(enumerate(x)))

    def relaxation(self) -> FiberResult:
        """Continuous relaxation over the box."""
        return self.solve({}, range(self.problem.n))

    def solve(self, fixed: dict, boxed: Sequence[int] = ()) -> FiberResult:
        key = (tuple(sorted((int(i), float(v)) for i, v in fixed.items())),
               tuple(sorted(int(i) for i in boxed)))
        hit = self._cache.get(key)
        if hit is not None:
            if isinstance(hit, FiberInfeasible):
                raise hit
            return hit
        self.evaluations += 1
        if self.evaluations > self.budget:
            raise BudgetExhausted(f"more than {self.budget} fiber evaluations")
        try:
            res = self._solve(dict(key[0]), key[1])
        except FiberInfeasible as exc:
            self._cache[key] = exc
            raise
        if self.gamma > 0:
            res.value = res.exact + self.gamma * _noise_unit(key, self.seed)
        self._cache[key] = res
        return res

    def gfib(self, fixed: dict, boxed: Sequence[int] = ()) -> float:
        """``min max_i g_i`` over the free coordinates (``-inf`` if unbounded)."""
        return self._gfib(fixed, boxed)[0]

    def gfib_subgrad(self, fixed: dict, boxed: Sequence[int] = ()):
        return self._gfib(fixed, boxed)[1]

    # ---- internals

    def _split(self, fixed: dict, boxed):
        dim = self.problem.dim
        free = [i for i in range(dim) if i not in fixed]
        z = np.zeros(dim)
        for i, v in fixed.items():
            z[i] = v
        return free, z

    def _solve(self, fixed: dict, boxed) -> FiberResult:
        p = self.problem
        free, z = self._split(fixed, boxed)
        if not free:
            if p.constraints and p.g(z) > TOL_FEAS:
                raise FiberInfeasible("fixed point violates the constraints")
            return self._result(z, None)
        if self._quadratic and self._linear:
            res = self._solve_qp(fixed, boxed, free, z)
            if res is not None:
                return res
        return self._solve_generic(fixed, boxed, free, z)

    def _result(self, z, grad) -> FiberResult:
        v = self.problem.f(z)
        return FiberResult(z, v, v, grad)

    def _rows(self, boxed, free, z):
        """Linear rows ``A_F u <= rhs`` over the free coordinates."""
        pos = {j: k for k, j in enumerate(free)}
        fixed_mask = np.ones(self.problem.dim, bool)
        fixed_mask[free] = False
        A = self._A[:, free]
        rhs = self._b - self._A[:, fixed_mask] @ z[fixed_mask]
        rows, vals, origin = [], [], []
        for i in range(A.shape[0]):
            if not np.any(A[i]):
                if rhs[i] < -TOL_FEAS:
                    raise FiberInfeasible("constraint violated by the fixed coordinates")
                continue
            rows.append(A[i])
            vals.append(rhs[i])
            origin.append(i)
        B = self.problem.B
        for j in boxed:
            if j in pos:
                e = np.zeros(len(free))
                e[pos[j]] = 1.0
                rows += [e, -e]
                vals += [B, B]
                origin += [-1, -1]
        A_ = np.array(rows).reshape(len(rows), len(free))
        return A_, np.array(vals, dtype=float), origin

    def _solve_qp(self, fixed, boxed, free, z) -> Optional[FiberResult]:
        obj = self.problem.objective.params
        Q, c = obj["Q"], obj["c"]
        fixed_mask = np.ones(self.problem.dim, bool)
        fixed_mask[free] = False
        H = Q[np.ix_(free, free)]
        qv = Q[np.ix_(free, np.flatnonzero(fixed_mask))] @ z[fixed_mask] + c[free]
        A, rhs, origin = self._rows(boxed, free, z)
        out = _qp_active_set(H, qv, A, rhs)
        if out is None:
            return None
        u, mult = out
        zz = z.copy()
        zz[free] = u
        grad = Q @ zz + c
        for lam, i in zip(mult, origin):
            if i >= 0 and lam > 0:
                grad = grad + lam * self._A[i]
        if self.problem.constraints and self.problem.g(zz) > TOL_FEAS:
            return None
        return self._result(zz, grad)

    def _solve_generic(self, fixed, boxed, free, z) -> FiberResult:
        p = self.problem
        B = p.B
        bounds = [(-B, B) if j in boxed else (None, None) for j in free]

        def full(u):
            zz = z.copy()
            zz[free] = u
            return zz

        g0, u0 = self._gfib_solve(fixed, boxed)
        if g0 > TOL_FEAS:
            raise FiberInfeasible("empty fiber")
        cons = [{"type": "ineq", "fun": (lambda u, con=con: -con.value(full(u))),
                 "jac": (lambda u, con=con: -np.asarray(con.grad(full(u)))[free])}
                for con in p.constraints]
        obj = p.objective
        res = minimize(lambda u: obj.value(full(u)), u0,
                       jac=lambda u: np.asarray(obj.grad(full(u)))[free], method="SLSQP",
                       bounds=bounds, constraints=cons,
                       options={"ftol": 1e-14, "maxiter": 1000})
        cands = [u0]
        if np.all(np.isfinite(res.x)):
            cands.append(res.x)
        best = None
        for u in cands:
            zz = full(u)
            if p.constraints and max(con.value(zz) for con in p.constraints) > TOL_FEAS:
                continue
            if best is None or obj.value(zz) < obj.value(best):
                best = zz
        if best is None:
            raise FiberInfeasible("inner solver found no feasible completion")
        return self._result(best, None)

    def _gfib(self, fixed: dict, boxed):
        key = (tuple(sorted((int(i), float(v)) for i, v in fixed.items())),
               tuple(sorted(int(i) for i in boxed)))
        hit = self._gcache.get(key)
        if hit is None:
            val, _, sub = self._gfib_full(dict(key[0]), key[1])
            hit = self._gcache[key] = (val, sub)
        return hit

    def _gfib_solve(self, fixed, boxed):
        val, u, _ = self._gfib_full(fixed, boxed)
        return val, u

    def _gfib_full(self, fixed, boxed):
        p = self.problem
        free, z = self._split(fixed, boxed)
        if not p.constraints:
            return -math.inf, np.zeros(len(free)), None
        self.problem.counter.g_evals += p.m
        if not free:
            return max(c.value(z) for c in p.constraints), np.zeros(0), None
        B = p.B
        bounds = [(-B, B) if j in boxed else (None, None) for j in free]
        if self._linear:
            fixed_mask = np.ones(p.dim, bool)
            fixed_mask[free] = False
            A = np.hstack([self._A[:, free], -np.ones((p.m, 1))])
            rhs = self._b - self._A[:, fixed_mask] @ z[fixed_mask]
            cost = np.zeros(len(free) + 1)
            cost[-1] = 1.0
            res = linprog(cost, A_ub=A, b_ub=rhs, bounds=bounds + [(None, None)],
                          method="highs")
            if res.status == 3:
                return -math.inf, np.zeros(len(free)), None
            if res.status != 0:
                raise ContractError(f"fiber feasibility LP failed: {res.message}")
            marg = res.ineqlin.marginals
            sub = -(marg @ self._A)
            return float(res.fun), res.x[:-1], sub

        def full(u):
            zz = z.copy()
            zz[free] = u
            return zz

        cons = [{"type": "ineq", "fun": (lambda w, con=con: w[-1] - con.value(full(w[:-1]))),
                 "jac": (lambda w, con=con: np.append(-np.asarray(con.grad(full(w[:-1])))[free],
                                                      1.0))}
                for con in p.constraints]
        u0 = np.zeros(len(free))
        w0 = np.append(u0, max(con.value(full(u0)) for con in p.constraints) + 1.0)
        res = minimize(lambda w: w[-1], w0, jac=lambda w: np.eye(len(w))[-1], method="SLSQP",
                       bounds=bounds + [(None, None)], constraints=cons,
                       options={"ftol": 1e-15, "maxiter": 1000})
        u = res.x[:-1]
        return max(con.value(full(u)) for con in p.constraints), u, None


def inner_min(problem: Problem, x, gamma: float = 0.0, fibers: Optional[FiberEvaluator] = None):
    """``(y_x, value)`` with ``value - gamma <= phi(x) <= value``."""
    fibers = fibers if fibers is not None else FiberEvaluator(problem, gamma)
    return fibers(x)


# ----------------------------------------------------------- planar fibers


class FiberOps(PlaneOps):
    """Fiber values over a pair of integer coordinates for the planar search."""

    def __init__(self, fibers: FiberEvaluator, pair: tuple[int, int],
                 fixed: Optional[dict] = None, boxed: Sequence[int] = ()):
        super().__init__()
        self.fibers = fibers
        self.pair = pair
        self.base = dict(fixed or {})
        self.boxed = tuple(boxed)
        self.gamma = fibers.gamma
        self.spread = fibers.problem.spread
        self.constrained = bool(fibers.problem.constraints)

    def _fixed(self, p) -> dict:
        d = dict(self.base)
        d[self.pair[0]], d[self.pair[1]] = float(p[0]), float(p[1])
        return d

    def result(self, p) -> FiberResult:
        return self.fibers.solve(self._fixed(p), self.boxed)

    def value(self, p) -> float:
        try:
            return self.result(p).value
        except FiberInfeasible:
            return math.inf

    def gvalue(self, p) -> float:
        return self.fibers.gfib(self._fixed(p), self.boxed)

    def feasible(self, y) -> bool:
        return super().feasible(y) and self.lattice_value(y) < math.inf

    def _feasible_end(self, zhat, p) -> float:
        zf, pf = np.array(_f2(zhat)), np.array(_f2(p))
        if self.gvalue(pf) <= TOL_FEAS:
            return 1.0
        lo, hi = 0.0, 1.0
        for _ in range(40):
            mid = 0.5 * (lo + hi)
            if self.gvalue(zf + mid * (pf - zf)) <= TOL_FEAS:
                lo = mid
            else:
                hi = mid
        return lo

    def decreases(self, zhat, p, use_g: bool) -> bool:
        zf = np.array(_f2(zhat))
        d = np.array(_f2(p)) - zf
        if use_g:
            sub = self.fibers.gfib_subgrad(self._fixed(zf), self.boxed)
            if sub is not None and float(sub[list(self.pair)] @ d) >= 0:
                return False
            return self._golden_below(self.gvalue, zhat, p, self.lattice_g(zhat), 0.0)
        if self.gamma == 0:
            try:
                sub = self.result(zf).subgrad
            except FiberInfeasible:
                sub = None
            if sub is not None and float(sub[list(self.pair)] @ d) >= 0:
                return False
        if self.constrained:
            t = self._feasible_end(zhat, p)
            if t <= 0:
                return False
            p = tuple(zf + t * d)
        ref = self.lattice_value(zhat) - self.gamma
        return self._golden_below(self.value, zhat, p, ref, self.gamma)


def _mixed_point(problem: Problem, res: FiberResult) -> MixedPoint:
    x = [int(round(v)) for v in res.z[:problem.n]]
    return MixedPoint.integral(x, res.z[problem.n:])


def _query_point(problem: Problem, query) -> np.ndarray:
    z = _as_vector(problem, query)
    if not problem.in_box(z):
        raise ValueError("query lies outside the box")
    if problem.constraints and problem.g(z) > TOL_FEAS:
        raise ValueError("query is infeasible")
    return z


# ----------------------------------------------------------- one variable


def feasible_integer_range(G, lo: int, hi: int):
    """Integers of ``[lo, hi]`` where the convex ``G`` is ``<= TOL_FEAS``, or None."""
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


def _min_1d(fibers: FiberEvaluator, coord: int, fixed: dict, boxed=()):
    """Best integer value of one coordinate: ``(t, value)`` or None."""
    B = fibers.problem.B

    def point(t):
        d = dict(fixed)
        d[coord] = float(t)
        return d

    def G(t):
        return fibers.gfib(point(t), boxed)

    def F(t):
        try:
            return fibers.solve(point(t), boxed).value
        except FiberInfeasible:
            return math.inf

    if fibers.problem.constraints:
        rng = feasible_integer_range(G, -B, B)
        if rng is None:
            return None
    else:
        rng = (-B, B)
    a, b = rng
    if fibers.gamma == 0 or b - a < 3:
        t, v, _ = integer_min_exact(F, a, b)
        if fibers.gamma > 0:
            t = min(range(a, b + 1), key=lambda s: (F(s), s))
            v = F(t)
    else:
        fn = NoisyFn(lattice_interpolant(F), fibers.gamma, fibers.problem.spread, a, b)
        res = golden_min_integer(fn, ScaledLattice.integers(a, b))
        t, v = int(res.index), res.value
    if v == math.inf:
        return None
    return t, v


def improve_mixed_1d(problem: Problem, fibers: FiberEvaluator, query) -> ImprovementOutcome:
    """Improvement oracle for one integer variable with accuracy ``kappa * gamma``.

    Never answers ``both``.
    """
    if problem.n != 1:
        raise DimensionError("improve_mixed_1d needs n = 1")
    z = _query_point(problem, query)
    c = problem.f(z)
    r = _min_1d(fibers, 0, {})
    if r is None:
        return ImprovementOutcome.no_better()
    t, v = r
    if v - KAPPA * fibers.gamma > c:
        return ImprovementOutcome.no_better()
    res = fibers.solve({0: float(t)})
    return ImprovementOutcome.improved(_mixed_point(problem, res), res.value)


# ----------------------------------------------------------- two variables


def improve_mixed_2d(problem: Problem, fibers: FiberEvaluator, query,
                     stats: Optional[SearchStats] = None) -> ImprovementOutcome:
    """Improvement oracle for two integer variables with accuracy ``kappa * gamma``.

    Returns ``improved`` with a point of reported value at most
    ``f(query) + kappa * gamma``, else ``no_better``; never ``both``.
    """
    if problem.n != 2:
        raise DimensionError("improve_mixed_2d needs n = 2")
    z = _query_point(problem, query)
    c = problem.f(z)
    ops = FiberOps(fibers, (0, 1))
    threshold = c + KAPPA * fibers.gamma
    search = run_planar(ops, problem.B, (z[0], z[1]), stop_at=threshold, stats=stats)
    if search.best is not None and search.best[0] <= threshold:
        res = ops.result(search.best[1])
        return ImprovementOutcome.improved(_mixed_point(problem, res), res.value)
    return ImprovementOutcome.no_better()


def _planar_min(ops: FiberOps, B: int, stats=None):
    """Best lattice pair of ``ops`` as ``(pair, value)`` or None."""
    f = ops.fibers
    try:
        rel = f.solve(ops.base, tuple(ops.boxed) + tuple(ops.pair))
    except FiberInfeasible:
        return None
    apex = (rel.z[ops.pair[0]], rel.z[ops.pair[1]])
    apex = tuple(min(B, max(-B, float(a))) for a in apex)
    search = run_planar(ops, B, apex, stop_at=rel.exact, stats=stats)
    if search.best is None:
        return None
    return search.best[1], search.best[0]


def minimize_mixed_2d(problem: Problem, fibers: FiberEvaluator,
                      stats: Optional[SearchStats] = None):
    """Minimiser over two integer variables: ``(MixedPoint, value)`` or ``INFEASIBLE``."""
    if problem.n != 2:
        raise DimensionError("minimize_mixed_2d needs n = 2")
    ops = FiberOps(fibers, (0, 1))
    r = _planar_min(ops, problem.B, stats)
    if r is None:
        return INFEASIBLE
    res = ops.result(r[0])
    return _mixed_point(problem, res), res.value


class FiberEnumerator:
    """k-th best lattice pairs of a :class:`FiberOps`, in order."""

    def __init__(self, ops: FiberOps, B: int, stats: Optional[SearchStats] = None):
        self.ops = ops
        self.B = B
        self.best = BestPointSet()
        self.stats = stats
        self.done = False

    def next(self):
        """``(pair, value)`` of the next point, or ``NO_MORE_POINTS``."""
        if self.done:
            return NO_MORE_POINTS
        if len(self.best) == 0:
            r = _planar_min(self.ops, self.B, self.stats)
        else:
            found = kth_search(self.ops, self.B, self.best, self.stats)
            if found is None:
                r = None
            else:
                z = adjust_kth_point(self.best, found[1])
                r = (z, self.ops.lattice_value(z))
        if r is None:
            self.done = True
            return NO_MORE_POINTS
        self.best.add(r[0], r[1])
        return r

    def __iter__(self):
        while True:
            r = self.next()
            if r is NO_MORE_POINTS:
                return
            yield r


def kth_fiber(problem: Problem, fibers: FiberEvaluator, best: BestPointSet,
              stats: Optional[SearchStats] = None):
    """Next best integer pair after ``best``: ``(MixedPoint, value)`` or ``NO_MORE_POINTS``.

    The k-th returned point satisfies ``phi <= (k-th best value) + k kappa gamma``.
    ``best`` is not modified.
    """
    if problem.n != 2:
        raise DimensionError("kth_fiber needs n = 2")
    ops = FiberOps(fibers, (0, 1))
    if len(best) == 0:
        r = _planar_min(ops, problem.B, stats)
    else:
        found = kth_search(ops, problem.B, best, stats)
        r = None if found is None else adjust_kth_point(best, found[1])
        r = None if r is None else (r, ops.lattice_value(r))
    if r is None:
        return NO_MORE_POINTS
    res = ops.result(r[0])
    return _mixed_point(problem, res), res.value


# -------------------------------------------------------- general solver


@dataclass
class StageRecord:
    """One fixing stage: its coordinates and how deep its enumerations went."""

    coords: tuple
    k_max: int = 0
    visits: int = 0
    bounds: list = field(default_factory=list)


@dataclass
class FixingTrace:
    stages: list
    incumbents: list = field(default_factory=list)

    def accuracy(self, gamma: float) -> float:
        """Reported accuracy ``sum_s k_s kappa gamma``."""
        return sum(s.k_max for s in self.stages) * KAPPA * gamma


@dataclass
class SolveResult:
    status: str  # "optimal", "infeasible", "budget"
    point: Optional[MixedPoint]
    value: Optional[float]
    lower_bound: float
    accuracy: float
    trace: FixingTrace
    evaluations: int = 0

    @property
    def nonoptimal(self) -> bool:
        return self.status == "budget"


def fixing_stages(n: int) -> list[tuple]:
    """Index pairs ``(0, 1), (2, 3), ...`` with a final single index for odd n."""
    out = [(i, i + 1) for i in range(0, n - 1, 2)]
    if n % 2:
        out.append((n - 1,))
    return out


def solve_general(problem: Problem, fibers: Optional[FiberEvaluator] = None,
                  budget: float = DEFAULT_BUDGET, gamma: float = 0.0,
                  seed: int = 0) -> SolveResult:
    """Mixed-integer minimisation by fixing the integer variables two at a time.

    At each stage the next pair is enumerated in order of its relaxed fiber
    value (later integer variables relaxed to the box); the enumeration stops
    as soon as its lower bound reaches the incumbent.
    """
    if problem.n < 1:
        raise DimensionError("solve_general needs n >= 1")
    if fibers is None:
        fibers = FiberEvaluator(problem, gamma, seed=seed, budget=budget)
    fibers.budget = budget
    gam = fibers.gamma
    stages = fixing_stages(problem.n)
    trace = FixingTrace([StageRecord(s) for s in stages])
    state = {"value": math.inf, "seen": math.inf, "res": None}

    def offer(res: FiberResult):
        if res.value < state["seen"]:
            state["seen"], state["res"] = res.value, res
            trace.incumbents.append(res.value)

    def visit(s: int, fixed: dict):
        coords = stages[s]
        rec = trace.stages[s]
        rec.visits += 1
        later = [i for st in stages[s + 1:] for i in st]
        last = s == len(stages) - 1
        if len(coords) == 1:
            r = _min_1d(fibers, coords[0], fixed, later)
            rec.k_max = max(rec.k_max, 1)
            if r is None:
                return
            d = dict(fixed)
            d[coords[0]] = float(r[0])
            if last:
                offer(fibers.solve(d))
            else:
                visit(s + 1, d)
            return
        ops = FiberOps(fibers, coords, fixed, later)
        if last:
            r = _planar_min(ops, problem.B)
            rec.k_max = max(rec.k_max, 1)
            if r is not None:
                offer(ops.result(r[0]))
            return
        bounds = []
        for k, (pair, val) in enumerate(FiberEnumerator(ops, problem.B), 1):
            rec.k_max = max(rec.k_max, k)
            lb = val - (k * KAPPA * gam + gam if gam > 0 else 0.0)
            bounds.append(lb)
            if lb >= state["seen"]:
                break
            d = dict(fixed)
            d[coords[0]], d[coords[1]] = float(pair[0]), float(pair[1])
            visit(s + 1, d)
        rec.bounds.append(bounds)

    status = "optimal"
    try:
        visit(0, {})
    except BudgetExhausted:
        status = "budget"
    res = state["res"]
    acc = trace.accuracy(gam)
    if res is None:
        return SolveResult("budget" if status == "budget" else "infeasible", None, None,
                           -math.inf if status == "budget" else math.inf, acc, trace,
                           fibers.evaluations)
    point = _mixed_point(problem, res)
    lower = res.value - acc - gam if status == "optimal" else -math.inf
    if status == "budget":
        try:
            lower = fibers.relaxation().exact
        except (FiberInfeasible, BudgetExhausted):
            lower = -math.inf
    return SolveResult(status, point, res.exact, lower, acc, trace, fibers.evaluations)


def enumerate_fibers(problem: Problem, fibers: Optional[FiberEvaluator] = None):
    """Brute force: ``(best x, value)`` over every integer point, or ``INFEASIBLE``.

    Ties go to the lexicographically smallest ``x``.
    """
    fibers = fibers if fibers is not None else FiberEvaluator(problem, 0.0, budget=math.inf)
    B = problem.B
    best = None
    for x in itertools.product(range(-B, B + 1), repeat=problem.n):
        try:
            res = fibers.fiber(x)
        except FiberInfeasible:
            continue
        if best is None or res.exact < best[1]:
            best = (x, res.exact)
    return INFEASIBLE if best is None else best
