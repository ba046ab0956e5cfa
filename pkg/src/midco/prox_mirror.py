"""Mirror descent driven by an improvement oracle, and the termination procedure.

An *improvement oracle* is any callable ``oracle(z) -> ImprovementOutcome``
taking a feasible point ``z`` (vector of length n + d).  It either returns a
feasible point with integral x-part and value at most
``(1 + alpha) f(z) + delta`` or certifies that no such point has value
``<= f(z)`` (or both).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .model import (TOL_FEAS, ContractError, ImprovementOutcome,
                    Problem, _as_vector, check_feasible)

Oracle = Callable[[np.ndarray], ImprovementOutcome]

DYKSTRA_SWEEPS = 10_000
DYKSTRA_TOL = 1e-10


# ------------------------------------------------------------------ setup


@dataclass
class ProxSetup:
    """Prox function ``V`` with its conjugate maximiser.

    ``conj_argmax(s) = argmax <s, z> - V(z)``; ``M`` bounds ``V`` at the
    optimum.
    """

    V: Callable[[np.ndarray], float]
    conj_argmax: Callable[[np.ndarray], np.ndarray]
    sigma: float
    M: float
    grad: Optional[Callable[[np.ndarray], np.ndarray]] = None

    @classmethod
    def euclidean(cls, problem: Problem, center) -> "ProxSetup":
        """``V(z) = ||z - center||^2 / 2`` with ``M = diam^2 / 2`` of the box.

        Centring at the start point makes ``w_0 = z_0`` consistent with
        ``s_0 = 0``.
        """
        c = np.asarray(center, dtype=float).copy()
        diam = 2.0 * problem.B * math.sqrt(problem.dim)
        return cls(V=lambda z: 0.5 * float(np.sum((np.asarray(z) - c) ** 2)),
                   conj_argmax=lambda s: c + np.asarray(s, dtype=float),
                   sigma=1.0, M=0.5 * diam * diam,
                   grad=lambda z: np.asarray(z, dtype=float) - c)


@dataclass
class StepSchedule:
    """Step sizes ``h_k = c / sqrt(k + 1)`` with fixed oracle quality."""

    c: float
    alpha: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("step constant must be positive")

    @classmethod
    def default(cls, prox: ProxSetup, lipschitz: float, alpha: float = 0.0,
                delta: float = 0.0) -> "StepSchedule":
        c = math.sqrt(prox.sigma * prox.M / 2.0)
        # any positive step works when the objective is constant
        return cls(c / lipschitz if lipschitz > 0 else c, alpha, delta)

    def h(self, k: int) -> float:
        return self.c / math.sqrt(k + 1)


def mirror_bound(L: float, M: float, sigma: float, N: int) -> float:
    """Right-hand side ``L sqrt(M / 2 sigma) (ln(N+1) + 2) / (sqrt(N+2) - 1)``."""
    return L * math.sqrt(M / (2.0 * sigma)) * (math.log(N + 1) + 2.0) / (math.sqrt(N + 2) - 1.0)


@dataclass
class IterRecord:
    k: int
    z: np.ndarray
    w: np.ndarray
    s: np.ndarray
    f_z: float
    f_best: float


@dataclass
class DescentTrace:
    """Result of :func:`mirror_descent`.

    ``status`` is one of ``"budget"`` (N steps done), ``"both"`` (oracle
    answered both), ``"terminated"`` (termination procedure ran) or
    ``"no_better"`` (the start point already beats every mixed-integer point;
    ``lower_bound`` then holds ``f(z0)``).
    """

    records: list = field(default_factory=list)
    best_point: Optional[np.ndarray] = None
    best_value: float = math.inf
    best_history: list = field(default_factory=list)
    lower_bound: float = -math.inf
    status: str = "budget"
    termination: Optional["TerminationResult"] = None


# ------------------------------------------------------------- projection


def _project_box(problem: Problem, w: np.ndarray) -> np.ndarray:
    z = w.copy()
    z[: problem.n] = np.clip(z[: problem.n], -problem.B, problem.B)
    return z


def _project_constraint(con, w: np.ndarray) -> np.ndarray:
    if con.family == "linear":
        a, b = con.params["a"], con.params["b"]
        viol = float(a @ w) - b
        return w if viol <= 0 else w - viol / float(a @ a) * a
    if con.family == "ball":
        c, r = con.params["center"], con.params["radius"]
        dist = float(np.linalg.norm(w - c))
        return w if dist <= r else c + (w - c) * (r / dist)
    raise ValueError(f"no projection for constraint family {con.family!r}")


def project_to_feasible(problem: Problem, w) -> tuple[np.ndarray, float, np.ndarray]:
    """Euclidean projection onto the continuous feasible set.

    Returns ``(z, rho, rho_subgrad)`` with ``rho = ||w - z||`` and a
    subgradient of the distance function at ``w``.
    """
    w = _as_vector(problem, w)
    z = _project_box(problem, w)
    cons = problem.constraints
    if cons:
        single = _project_constraint(cons[0], w) if len(cons) == 1 else None
        if single is not None and problem.in_box(single):
            z = single
        elif not (problem.in_box(w) and all(c.value(w) <= 0 for c in cons)):
            z = _dykstra(problem, w)
        else:
            z = w.copy()
    d = w - z
    rho = float(np.linalg.norm(d))
    if rho <= TOL_FEAS:
        return z, 0.0, np.zeros_like(w)
    return z, rho, d / rho


def _dykstra(problem: Problem, w: np.ndarray) -> np.ndarray:
    projs = [lambda v: _project_box(problem, v)]
    projs += [lambda v, c=c: _project_constraint(c, v) for c in problem.constraints]
    x = w.copy()
    incs = [np.zeros_like(w) for _ in projs]
    for _ in range(DYKSTRA_SWEEPS):
        prev = x.copy()
        moved = 0.0
        for i, proj in enumerate(projs):
            y = proj(x + incs[i])
            inc = x + incs[i] - y
            moved += float(np.linalg.norm(inc - incs[i]))
            incs[i] = inc
            x = y
        # x can stall for a sweep while the corrections still move
        if np.linalg.norm(x - prev) <= DYKSTRA_TOL and moved <= DYKSTRA_TOL:
            return x
    raise ContractError(f"projection did not converge in {DYKSTRA_SWEEPS} sweeps")


# --------------------------------------------------------------- descent


def _checked(problem: Problem, z: np.ndarray, out: ImprovementOutcome,
             alpha: float, delta: float, f_z: float) -> Optional[float]:
    """Validate an oracle answer; returns the value of its point if any."""
    if out.point is None:
        return None
    x = out.point.x
    if any(float(v) != round(float(v)) for v in x):
        raise ContractError("oracle returned a point with fractional integer part")
    p = _as_vector(problem, out.point)
    if not check_feasible(problem, p):
        raise ContractError("oracle returned an infeasible point")
    val = problem.f(p)
    slack = 1e-9 * max(1.0, abs(f_z))
    if val > (1.0 + alpha) * f_z + delta + slack:
        raise ContractError(
            f"oracle point value {val} exceeds (1+alpha) f(z) + delta = "
            f"{(1.0 + alpha) * f_z + delta}")
    return val


def mirror_descent(problem: Problem, oracle: Oracle, z0, N: int,
                   prox: Optional[ProxSetup] = None,
                   schedule: Optional[StepSchedule] = None,
                   eps: float = 1e-3, eps_sub: float = 1e-6) -> DescentTrace:
    """Mirror descent with an improvement oracle, ``N`` steps at most."""
    z0 = _as_vector(problem, z0)
    if not check_feasible(problem, z0):
        raise ValueError("start point is infeasible")
    prox = prox or ProxSetup.euclidean(problem, z0)
    schedule = schedule or StepSchedule.default(prox, problem.lipschitz)
    alpha, delta = schedule.alpha, schedule.delta
    trace = DescentTrace()

    f0 = problem.f(z0)
    out = oracle(z0)
    val = _checked(problem, z0, out, alpha, delta, f0)
    if out.is_both:
        trace.best_point, trace.best_value, trace.status = _as_vector(problem, out.point), val, "both"
        trace.best_history.append(val)
        return trace
    if out.is_no_better:
        trace.status, trace.lower_bound = "no_better", f0
        return trace
    trace.best_point, trace.best_value = _as_vector(problem, out.point), val
    trace.best_history.append(val)

    z, w, s = z0.copy(), z0.copy(), np.zeros_like(z0)
    f_z = f0
    for k in range(N):
        _, grad = problem.f_grad(z)
        _, _, rho_sub = project_to_feasible(problem, w)
        gnorm = float(np.linalg.norm(grad))
        h = schedule.h(k)
        trace.records.append(IterRecord(k, z.copy(), w.copy(), s.copy(), f_z, trace.best_value))
        s = s - h * grad - h * gnorm * rho_sub
        w = np.asarray(prox.conj_argmax(s), dtype=float)
        z, _, _ = project_to_feasible(problem, w)
        f_z = problem.f(z)
        if f_z >= trace.best_value:
            trace.best_history.append(trace.best_value)
            continue
        out = oracle(z)
        val = _checked(problem, z, out, alpha, delta, f_z)
        if out.is_both:
            trace.best_point, trace.best_value = _as_vector(problem, out.point), min(val, trace.best_value)
            trace.best_history.append(trace.best_value)
            trace.status = "both"
            return trace
        if out.is_improved:
            if val < trace.best_value:
                trace.best_point, trace.best_value = _as_vector(problem, out.point), val
            trace.best_history.append(trace.best_value)
            continue
        res = termination_procedure(problem, oracle, z, trace.best_point,
                                    alpha=alpha, delta=delta, eps_sub=eps_sub, eps=eps)
        trace.termination = res
        trace.best_point, trace.best_value = res.point, res.value
        trace.lower_bound = res.lower
        trace.best_history.append(res.value)
        trace.status = "terminated"
        return trace
    return trace


# ------------------------------------------------------------ termination


@dataclass
class TerminationResult:
    point: np.ndarray
    value: float
    lower: float
    iterations: int
    iteration_bound: int
    status: str  # "gap", "bound", "both"
    gaps: list = field(default_factory=list)


def termination_iteration_bound(f_hat0: float, f_z0: float, eps: float, alpha: float = 0.0) -> int:
    """``max(ceil(ln((f_hat0 - f_z0) / (f_z0 eps)) / ln((2+alpha)/(1+alpha))), 0)``."""
    if f_hat0 <= f_z0:
        return 0
    r = (f_hat0 - f_z0) / (f_z0 * eps)
    return max(math.ceil(math.log(r) / math.log((2.0 + alpha) / (1.0 + alpha))), 0)


def segment_bisect_to_target(f: Callable[[np.ndarray], float], a, b, target: float,
                             eps_sub: float, lipschitz: Optional[float] = None,
                             fa: Optional[float] = None, fb: Optional[float] = None
                             ) -> np.ndarray:
    """Point ``z`` of ``[a, b]`` with ``|f(z) - target| <= eps_sub``.

    Requires ``f(a) <= target <= f(b)`` with ``f`` convex along the segment.
    """
    if not eps_sub > 0:
        raise ValueError("eps_sub must be positive")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    fa = f(a) if fa is None else fa
    fb = f(b) if fb is None else fb
    if not fa <= target <= fb:
        raise ValueError(f"target {target} not bracketed by [{fa}, {fb}]")
    if target - fa <= eps_sub:
        return a
    if fb - target <= eps_sub:
        return b
    cap = None
    if lipschitz is not None and lipschitz > 0:
        span = float(np.linalg.norm(b - a)) * lipschitz
        cap = max(1, math.ceil(math.log2(span / eps_sub))) if span > eps_sub else 1
    lo, hi, it = 0.0, 1.0, 0
    while True:
        it += 1
        m = 0.5 * (lo + hi)
        z = a + m * (b - a)
        fm = f(z)
        if abs(fm - target) <= eps_sub:
            return z
        if fm < target:
            lo = m
        else:
            hi = m
        if cap is not None and it > cap:
            raise ContractError("bisection exceeded its Lipschitz iteration cap")
        if hi - lo < 1e-15:
            raise ContractError("bisection stalled; function is not continuous")


def termination_procedure(problem: Problem, oracle: Oracle, z0, zhat0,
                          alpha: float = 0.0, delta: float = 0.0,
                          eps_sub: float = 1e-6, eps: float = 1e-3,
                          max_iter: Optional[int] = None) -> TerminationResult:
    """Close the gap between a lower-bound point ``z0`` and an integral ``zhat0``.

    ``f(z0)`` must be a positive lower bound of the mixed-integer optimum.
    Returns a point with ``f - f* <= eps f* + (2+alpha)(alpha f* +
    (1+alpha) eps_sub + delta)``.
    """
    z_low = _as_vector(problem, z0)
    zhat = _as_vector(problem, zhat0)
    lo = problem.f(z_low)
    up = problem.f(zhat)
    if lo <= 0:
        raise ValueError("termination procedure needs f(z0) > 0")
    if up < lo:
        raise ValueError("need f(zhat0) >= f(z0)")
    bound = termination_iteration_bound(up, lo, eps, alpha)
    limit = bound if max_iter is None else min(bound, max_iter)
    lam = (1.0 + alpha) / (2.0 + alpha)
    gaps = [up - lo]

    def slack(l):
        return eps * l + (2.0 + alpha) * (alpha * l + (1.0 + alpha) * eps_sub + delta)

    k = 0
    status = "bound"
    while True:
        if up - lo <= slack(lo):
            status = "gap"
            break
        if k >= limit:
            break
        target = lam * lo + (1.0 - lam) * up
        zq = segment_bisect_to_target(problem.f, z_low, zhat, target, eps_sub, fa=lo, fb=up)
        fq = problem.f(zq)
        k += 1
        out = oracle(zq)
        val = _checked(problem, zq, out, alpha, delta, fq)
        if out.is_both:
            if val < up:
                zhat, up = _as_vector(problem, out.point), val
            status = "both"
            gaps.append(up - lo)
            break
        if out.is_improved:
            if val < up:
                zhat, up = _as_vector(problem, out.point), val
        else:
            z_low, lo = zq, fq
        gaps.append(up - lo)
    return TerminationResult(zhat, up, lo, k, bound, status, gaps)
