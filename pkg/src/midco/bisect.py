"""One-dimensional minimisation.

``integer_min_exact`` is plain integer bisection for exactly evaluated convex
functions.  The golden-section variants accept evaluations carrying a
one-sided error ``phi~(t)`` in ``[phi(t), phi(t) + gamma]`` and return
certified approximate minimisers on ``[0, 1]`` or on a scaled lattice
``(t0 + tau Z) & [0, 1]``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from .model import NO_FEASIBLE_POINT_LOCATED

WIDTH_MIN = 1e-12


@dataclass(frozen=True)
class GoldenConstants:
    lambda1: float = (math.sqrt(5.0) - 1.0) / 2.0

    @property
    def lambda0(self) -> float:
        return 1.0 - self.lambda1

    @property
    def lambda0_plus(self) -> float:
        return 2.0 * self.lambda0 * self.lambda1

    @property
    def lambda1_plus(self) -> float:
        return 1.0 - 2.0 * self.lambda0 * self.lambda1

    @property
    def kappa(self) -> float:
        return 2.0 / self.lambda0


GOLDEN = GoldenConstants()
KAPPA = GOLDEN.kappa


class NoisyFn:
    """Counted univariate oracle on ``[0, 1]``.

    ``fn`` is evaluated at ``lo + t (hi - lo)``; its values must lie in
    ``[phi, phi + gamma]`` for a convex ``phi`` whose spread on the interval
    is at most ``spread``.
    """

    def __init__(self, fn: Callable[[float], float], gamma: float = 0.0,
                 spread: float = 1.0, lo: float = 0.0, hi: float = 1.0):
        if gamma < 0:
            raise ValueError("gamma must be nonnegative")
        if not hi > lo:
            raise ValueError("need lo < hi")
        self.fn = fn
        self.gamma = float(gamma)
        self.spread = float(spread)
        self.lo, self.hi = float(lo), float(hi)
        self.evals = 0

    def outer(self, t: float) -> float:
        """Map a unit-interval parameter to the original coordinate."""
        return self.lo + t * (self.hi - self.lo)

    def __call__(self, t: float) -> float:
        self.evals += 1
        return float(self.fn(self.outer(t)))


@dataclass(frozen=True)
class ScaledLattice:
    """The points ``t0 + k tau`` lying in ``[0, 1]``."""

    t0: float
    tau: float

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError("tau must be positive")

    @classmethod
    def integers(cls, lo: float, hi: float) -> "ScaledLattice":
        """Integers of ``[lo, hi]`` in the unit scaling used by :class:`NoisyFn`."""
        width = hi - lo
        return cls(-lo / width, 1.0 / width)

    def _index(self, t: float) -> float:
        return (t - self.t0) / self.tau

    @property
    def k_lo(self) -> int:
        k = math.ceil(self._index(0.0))
        return k - 1 if self.contains(self.point(k - 1)) else k

    @property
    def k_hi(self) -> int:
        k = math.floor(self._index(1.0))
        return k + 1 if self.contains(self.point(k + 1)) else k

    def point(self, k: int) -> float:
        return self.t0 + k * self.tau

    def contains(self, t: float, tol: float = 1e-9) -> bool:
        k = round(self._index(t))
        return (abs(self.point(k) - t) <= tol * max(1.0, self.tau)
                and -tol <= t <= 1.0 + tol)

    def __len__(self) -> int:
        return max(0, self.k_hi - self.k_lo + 1)


@dataclass
class GoldenResult:
    x: float
    value: float
    evaluations: int
    stop: str  # "lemma5", "budget", "width", "lattice", "trivial"
    interval: tuple = (0.0, 1.0)
    index: Optional[int] = None
    history: list = field(default_factory=list)


# ------------------------------------------------------------ exact search


def integer_min_exact(f: Callable[[int], float], lo: int, hi: int) -> tuple[int, float, int]:
    """Leftmost minimiser of an exact convex function on ``{lo, ..., hi}``.

    Returns ``(x, f(x), evaluations)``.  Each step compares ``f(m)`` with
    ``f(m + 1)``, so at most ``2 ceil(log2(hi - lo + 1)) + 1`` calls occur.
    """
    lo, hi = int(lo), int(hi)
    if lo > hi:
        raise ValueError("empty integer interval")
    cache: dict[int, float] = {}

    def ev(m):
        if m not in cache:
            cache[m] = float(f(m))
        return cache[m]

    while lo < hi:
        m = (lo + hi) // 2
        if ev(m) <= ev(m + 1):
            hi = m
        else:
            lo = m + 1
    return lo, ev(lo), len(cache)


def lattice_min_exact(f: Callable[[float], float], lattice: ScaledLattice
                      ) -> tuple[float, float, int]:
    """``integer_min_exact`` over the points of a scaled lattice."""
    if len(lattice) == 0:
        raise ValueError("lattice has no point in [0, 1]")
    k, v, n = integer_min_exact(lambda k: f(lattice.point(k)), lattice.k_lo, lattice.k_hi)
    return lattice.point(k), v, n


# ----------------------------------------------------------- golden search


def golden_budget(gamma: float, spread: float) -> int:
    """``ceil(ln((kappa - 1) gamma / V) / ln lambda1)``, clamped at 0."""
    if gamma <= 0:
        return math.inf
    if spread <= 0:
        raise ValueError("spread must be positive")
    k = math.ceil(math.log((KAPPA - 1.0) * gamma / spread) / math.log(GOLDEN.lambda1))
    return max(0, k)


HISTORY_SPAN = 2


def history_lower_bound(pts, gamma, lo=0.0, hi=1.0):
    """Certified lower bound on ``min phi`` over ``[lo, hi]`` from noisy samples.

    Every pair of nearby samples ``ti < tj`` gives two chord
    extrapolations, valid to the right of ``tj`` and to the left of ``ti``.
    The bound is the minimum over ``t`` of the largest applicable one.
    """
    pts = sorted(pts)
    lines = []  # (slope, intercept, tmin, tmax)
    pairs = [(pts[i], pts[j]) for i in range(len(pts))
             for j in range(i + 1, min(len(pts), i + 1 + HISTORY_SPAN))]
    for (ti, vi), (tj, vj) in pairs:
        if tj <= ti:
            continue
        s = ((vj - gamma) - vi) / (tj - ti)
        lines.append((s, (vj - gamma) - s * tj, tj, hi))
        s = (vj - (vi - gamma)) / (tj - ti)
        lines.append((s, (vi - gamma) - s * ti, lo, ti))
    cand = {lo, hi} | {t for t, _ in pts}
    for (s1, c1, _, _), (s2, c2, _, _) in itertools.combinations(lines, 2):
        if s1 != s2:
            t = (c2 - c1) / (s1 - s2)
            if lo < t < hi:
                cand.add(t)

    def side(t, left):
        # one-sided limit of the piecewise maximum at t
        vals = [s * t + c for s, c, a, b in lines
                if (a < t <= b if left else a <= t < b)]
        return max(vals) if vals else -math.inf

    out = math.inf
    for t in cand:
        if t > lo:
            out = min(out, side(t, True))
        if t < hi:
            out = min(out, side(t, False))
    return out


def _golden(fn: NoisyFn, a: float, b: float, stop_units: float,
            width_min: float = WIDTH_MIN, stop_below: Optional[float] = None
            ) -> GoldenResult:
    """Noise-tolerant golden search on ``[a, b]`` inside ``[0, 1]``.

    ``stop_units`` caps the number of lambda1-shrinks of the interval.  With
    ``stop_below`` the search also returns as soon as a value below it is
    observed.
    """
    g = fn.gamma
    lam0, lam1 = GOLDEN.lambda0, GOLDEN.lambda1
    start = fn.evals
    best = [None, math.inf]
    history = []

    def ev(t):
        v = fn(t)
        history.append((t, v))
        if v < best[1]:
            best[0], best[1] = t, v
        return v

    def done(stop, lo, hi):
        return GoldenResult(best[0], best[1], fn.evals - start, stop, (lo, hi), history=history)

    if stop_units <= 0:
        ev(0.5 * (a + b))
        return done("trivial", a, b)

    units = 0
    p0, p1 = a + lam0 * (b - a), a + lam1 * (b - a)
    v0, v1 = None, None
    while True:
        if units >= stop_units:
            return done("budget", a, b)
        if v0 is None:
            v0 = ev(p0)
            if stop_below is not None and v0 < stop_below:
                return done("found", a, b)
        if v1 is None:
            v1 = ev(p1)
            if stop_below is not None and v1 < stop_below:
                return done("found", a, b)
        if units >= stop_units:
            return done("budget", a, b)
        if b - a <= width_min:
            return done("width", a, b)
        if v0 <= v1 - g:
            b, p1, v1 = p1, p0, v0
            p0, v0 = a + lam0 * (b - a), None
            units += 1
        elif v0 >= v1 + g:
            a, p0, v0 = p0, p1, v1
            p1, v1 = a + lam1 * (b - a), None
            units += 1
        else:
            cut = min(v0, v1) - g
            m0 = a + GOLDEN.lambda0_plus * (b - a)
            m1 = a + GOLDEN.lambda1_plus * (b - a)
            if v0 > v1:
                # probe next to the smaller outer value first
                m0, m1 = m1, m0
            last = fn.evals - start + 2 > 2 + stop_units
            w0 = ev(m0)
            if stop_below is not None and w0 < stop_below:
                return done("found", a, b)
            if w0 <= cut:
                a, b = p0, p1
                p0, v0, p1, v1 = (m0, w0, m1, None) if m0 < m1 else (m1, None, m0, w0)
                units += 3
                continue
            if last and best[1] - history_lower_bound(history, g) <= (KAPPA - 1.0) * g:
                return done("history", a, b)
            w1 = ev(m1)
            if stop_below is not None and w1 < stop_below:
                return done("found", a, b)
            if w1 <= cut:
                a, b = p0, p1
                p0, v0, p1, v1 = (m0, w0, m1, w1) if m0 < m1 else (m1, w1, m0, w0)
                units += 3
                continue
            return done("lemma5", a, b)


def golden_min_continuous(fn: NoisyFn, width_min: float = WIDTH_MIN) -> GoldenResult:
    """Approximate minimiser of ``phi`` on ``[0, 1]``.

    Guarantees ``phi~(x) - (kappa - 1) gamma <= min phi``.  For ``gamma = 0``
    the search runs until the interval is narrower than ``width_min``.
    """
    if fn.spread <= 0:
        raise ValueError("spread must be positive")
    return _golden(fn, 0.0, 1.0, golden_budget(fn.gamma, fn.spread), width_min)


def lattice_interpolant(F: Callable[[int], float]) -> Callable[[float], float]:
    """Piecewise-linear extension of an integer sequence.

    Convex sequences extend to convex functions, and values within
    ``[phi, phi + gamma]`` stay within that band, so the noisy golden search
    applies to integer-only oracles through this extension.
    """

    def ext(s: float) -> float:
        k = math.floor(s)
        fr = s - k
        if fr <= 1e-12:
            return F(k)
        if fr >= 1.0 - 1e-12:
            return F(k + 1)
        a, b = F(k), F(k + 1)
        if math.isinf(a) or math.isinf(b):
            return math.inf
        return (1.0 - fr) * a + fr * b

    return ext


def golden_min_integer(fn: NoisyFn, lattice: ScaledLattice,
                       width_min: float = WIDTH_MIN) -> GoldenResult:
    """Approximate minimiser of ``phi`` over a scaled lattice in ``[0, 1]``.

    Guarantees ``phi~(x) - kappa gamma <= min over the lattice of phi``.
    """
    if len(lattice) == 0:
        raise ValueError("lattice has no point in [0, 1]")
    start = fn.evals
    cache: dict[int, float] = {}

    def ev(k):
        if k not in cache:
            cache[k] = fn(lattice.point(k))
        return cache[k]

    def finish(ks, stop, interval):
        ks = sorted({k for k in ks if lattice.k_lo <= k <= lattice.k_hi})
        best = min(ks, key=lambda k: (ev(k), k))
        return GoldenResult(lattice.point(best), cache[best], fn.evals - start,
                            stop, interval, index=best)

    if len(lattice) <= 3:
        return finish(range(lattice.k_lo, lattice.k_hi + 1), "lattice", (0.0, 1.0))
    tau_units = math.ceil(math.log(lattice.tau) / math.log(GOLDEN.lambda1))
    units = min(golden_budget(fn.gamma, fn.spread), tau_units)
    res = _golden(fn, 0.0, 1.0, units, width_min)
    a, b = res.interval
    if res.stop in ("budget", "width") and b - a <= lattice.tau * (1 + 1e-12):
        # the continuous minimiser lies in [a, b]; by convexity the lattice
        # minimiser is inside or adjacent to it
        k_a = math.ceil(lattice._index(a) - 1e-9)
        k_b = math.floor(lattice._index(b) + 1e-9)
        ks = [k_a, k_b] if k_b > k_a else [k_a - 1, k_a, k_b + 1]
        return finish(ks, "lattice", (a, b))
    km = math.floor(lattice._index(res.x))
    return finish([km, km + 1], res.stop, (a, b))


# --------------------------------------------------------- constrained case


@dataclass
class ConstrainedResult:
    t_minus: float
    x: float
    t_plus: float
    value: float
    phi_evals: int
    g_evals: int


def _bisect_root(fng: NoisyFn, feasible: float, infeasible: float, steps: int) -> float:
    """Shrink towards the boundary keeping ``g~ <= 0`` at the returned end."""
    a, b = infeasible, feasible
    for _ in range(steps):
        m = 0.5 * (a + b)
        if fng(m) <= 0:
            b = m
        else:
            a = m
    return b


def constrained_min(fn_phi: NoisyFn, fn_g: NoisyFn, theta: float,
                    Vg: Optional[float] = None, width_min: float = WIDTH_MIN):
    """Approximate ``min {phi(t) : t in [0, 1], g(t) <= 0}``.

    Returns :class:`ConstrainedResult` with ``g~ <= 0`` at ``t_minus`` and
    ``t_plus``, or ``NO_FEASIBLE_POINT_LOCATED`` when the search for a point
    with ``g~ < 0`` fails (then ``g >= -(kappa - 1) gamma`` everywhere).
    """
    if theta <= 0:
        raise ValueError("theta must be positive")
    gamma = fn_g.gamma
    Vg = fn_g.spread if Vg is None else Vg
    g0, p0 = fn_g.evals, fn_phi.evals
    search = _golden(fn_g, 0.0, 1.0, golden_budget(gamma, Vg), width_min, stop_below=0.0)
    if not search.value < 0:
        return NO_FEASIBLE_POINT_LOCATED
    tbar = search.x
    if gamma > 0:
        steps = max(0, math.ceil(math.log2(theta / gamma)))
    else:
        steps = math.ceil(math.log2(1.0 / width_min))
    t_minus = _bisect_root(fn_g, tbar, 0.0, steps)
    t_plus = _bisect_root(fn_g, tbar, 1.0, steps)
    sub = NoisyFn(fn_phi.fn, fn_phi.gamma, fn_phi.spread,
                  fn_phi.outer(t_minus), fn_phi.outer(t_plus)) if t_plus > t_minus else None
    if sub is None:
        value = fn_phi(t_minus)
        x = t_minus
    else:
        res = golden_min_continuous(sub, width_min)
        fn_phi.evals += sub.evals
        x = t_minus + res.x * (t_plus - t_minus)
        value = res.value
    return ConstrainedResult(t_minus, x, t_plus, value,
                             fn_phi.evals - p0, fn_g.evals - g0)
