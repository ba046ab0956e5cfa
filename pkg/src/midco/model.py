"""Problem representation, evaluation contracts and accounting.

A :class:`Problem` bundles a convex objective, a list of convex constraint
oracles ``g_i(z) <= 0`` and the box bound ``B`` on the integer part.  Points
are :class:`MixedPoint` values with ``n`` integer coordinates followed by
``d`` continuous ones.  Every oracle call made through a problem is counted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.typing import NDArray

Vector = NDArray[np.float64]

TOL_FEAS = 1e-9


class DimensionError(ValueError):
    """Raised when a point does not match the problem dimensions."""


class ContractError(RuntimeError):
    """Raised when an oracle or caller violates a stated contract."""


class _Sentinel:
    """Named, falsy marker for certified negative outcomes."""

    def __init__(self, name: str):
        self._name = name

    def __repr__(self) -> str:
        return self._name

    def __bool__(self) -> bool:
        return False

    def __reduce__(self):
        return self._name


INFEASIBLE = _Sentinel("INFEASIBLE")
NO_MORE_POINTS = _Sentinel("NO_MORE_POINTS")
NO_FEASIBLE_POINT_LOCATED = _Sentinel("NO_FEASIBLE_POINT_LOCATED")
EMPTY = _Sentinel("EMPTY")


# ---------------------------------------------------------------- points


@dataclass(frozen=True)
class MixedPoint:
    """Point with integer part ``x`` (length n) and continuous part ``y``."""

    x: tuple
    y: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(self.x))
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))

    @classmethod
    def integral(cls, x: Sequence[int], y: Sequence[float] = ()) -> "MixedPoint":
        xs = []
        for v in x:
            if float(v) != int(round(float(v))):
                raise ValueError(f"non-integral coordinate {v!r}")
            xs.append(int(round(float(v))))
        return cls(tuple(xs), tuple(y))

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def d(self) -> int:
        return len(self.y)

    @property
    def is_integral(self) -> bool:
        return all(isinstance(v, (int, np.integer)) for v in self.x)

    def vector(self) -> Vector:
        return np.array([float(v) for v in self.x] + list(self.y), dtype=float)


# ------------------------------------------------------------- functions


@dataclass
class Objective:
    """Convex objective with first-order oracle.

    ``lipschitz`` bounds the dual norm of subgradients on the box and
    ``spread`` bounds ``max f - min f`` over the feasible set.
    """

    value_fn: Callable[[Vector], float]
    grad_fn: Callable[[Vector], Vector]
    lipschitz: float = float("nan")
    spread: float = float("nan")
    family: str = "callable"
    params: dict = field(default_factory=dict)

    def value(self, z: Vector) -> float:
        return float(self.value_fn(np.asarray(z, dtype=float)))

    def grad(self, z: Vector) -> Vector:
        return np.asarray(self.grad_fn(np.asarray(z, dtype=float)), dtype=float)


def quadratic(Q, c=None, c0: float = 0.0) -> Objective:
    """``z -> <z, Q z>/2 + <c, z> + c0`` with ``Q`` symmetric PSD."""
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    dim = Q.shape[0]
    c = np.zeros(dim) if c is None else np.asarray(c, dtype=float)
    if Q.shape != (dim, dim) or c.shape != (dim,):
        raise DimensionError("quadratic: Q must be square and match c")
    if not np.allclose(Q, Q.T):
        raise ValueError("quadratic: Q must be symmetric")
    c0 = float(c0)

    def val(z):
        return 0.5 * float(z @ Q @ z) + float(c @ z) + c0

    def grad(z):
        return Q @ z + c

    return Objective(val, grad, family="quadratic",
                     params={"Q": Q, "c": c, "c0": c0})


@dataclass
class Constraint:
    """Convex constraint ``g(z) <= 0`` with first-order oracle."""

    value_fn: Callable[[Vector], float]
    grad_fn: Callable[[Vector], Vector]
    family: str = "callable"
    params: dict = field(default_factory=dict)

    def value(self, z: Vector) -> float:
        return float(self.value_fn(np.asarray(z, dtype=float)))

    def grad(self, z: Vector) -> Vector:
        return np.asarray(self.grad_fn(np.asarray(z, dtype=float)), dtype=float)

    @property
    def is_linear(self) -> bool:
        return self.family == "linear"


def linear(a, b: float) -> Constraint:
    """Halfspace ``<a, z> <= b``."""
    a = np.asarray(a, dtype=float)
    b = float(b)
    if not np.any(a):
        raise ValueError("linear: a must be nonzero")
    return Constraint(lambda z: float(a @ z) - b, lambda z: a.copy(),
                      family="linear", params={"a": a, "b": b})


def ball(center, radius: float) -> Constraint:
    """Euclidean ball ``||z - center|| <= radius``."""
    center = np.asarray(center, dtype=float)
    radius = float(radius)
    if radius < 0:
        raise ValueError("ball: negative radius")

    def val(z):
        return float(np.linalg.norm(z - center)) - radius

    def grad(z):
        r = z - center
        nr = np.linalg.norm(r)
        return r / nr if nr > 0 else np.zeros_like(r)

    return Constraint(val, grad, family="ball",
                      params={"center": center, "radius": radius})


# -------------------------------------------------------------- problem


@dataclass
class EvalCounter:
    """Monotone counters of oracle calls."""

    f_evals: int = 0
    g_evals: int = 0

    def snapshot(self) -> tuple[int, int]:
        return (self.f_evals, self.g_evals)

    def merge(self, other: "EvalCounter") -> None:
        self.f_evals += other.f_evals
        self.g_evals += other.g_evals


class Problem:
    """Mixed-integer convex problem over ``[-B, B]^n x R^d``.

    The objective must be finite and nonnegative on the feasible set.  When
    ``lipschitz``/``spread`` are not supplied they are bounded over the box
    ``[-B, B]^(n+d)``.
    """

    def __init__(self, n: int, d: int, B: int, objective: Objective,
                 constraints: Sequence[Constraint] = (),
                 lipschitz: Optional[float] = None,
                 spread: Optional[float] = None):
        if n < 0 or d < 0 or n + d < 1:
            raise DimensionError("need n, d >= 0 and n + d >= 1")
        if int(B) != B or B < 1:
            raise ValueError("B must be a positive integer")
        self.n, self.d, self.B = int(n), int(d), int(B)
        self.objective = objective
        self.constraints = list(constraints)
        self.counter = EvalCounter()
        dim = self.n + self.d
        if objective.family == "quadratic":
            if objective.params["Q"].shape[0] != dim:
                raise DimensionError("objective dimension mismatch")
        for con in self.constraints:
            key = "a" if con.family == "linear" else "center"
            if con.family in ("linear", "ball") and con.params[key].shape != (dim,):
                raise DimensionError("constraint dimension mismatch")
        if lipschitz is None:
            lipschitz = objective.lipschitz
        if lipschitz is None or not np.isfinite(lipschitz):
            lipschitz = self._default_lipschitz()
        self.lipschitz = float(lipschitz)
        if spread is None:
            spread = objective.spread
        if spread is None or not np.isfinite(spread):
            spread = 2.0 * np.sqrt(dim) * self.B * self.lipschitz
        self.spread = float(spread)

    @property
    def dim(self) -> int:
        return self.n + self.d

    @property
    def m(self) -> int:
        return len(self.constraints)

    def _default_lipschitz(self) -> float:
        dim = self.dim
        if self.objective.family == "quadratic":
            Q = self.objective.params["Q"]
            c = self.objective.params["c"]
            return float(np.linalg.norm(Q, 2) * np.sqrt(dim) * self.B
                         + np.linalg.norm(c))
        raise ValueError("lipschitz bound required for callable objectives")

    # ---- counted oracles

    def f(self, z) -> float:
        self.counter.f_evals += 1
        return self.objective.value(np.asarray(z, dtype=float))

    def f_grad(self, z) -> tuple[float, Vector]:
        self.counter.f_evals += 1
        z = np.asarray(z, dtype=float)
        return self.objective.value(z), self.objective.grad(z)

    def g(self, z) -> float:
        """Aggregate ``max_i g_i(z)``; ``-inf`` when there are no constraints."""
        z = np.asarray(z, dtype=float)
        self.counter.g_evals += self.m
        if not self.constraints:
            return float("-inf")
        return max(c.value(z) for c in self.constraints)

    def g_all(self, z) -> list[float]:
        z = np.asarray(z, dtype=float)
        self.counter.g_evals += self.m
        return [c.value(z) for c in self.constraints]

    def copy_fresh(self) -> "Problem":
        """Same problem with zeroed counters."""
        return Problem(self.n, self.d, self.B, self.objective,
                       self.constraints, self.lipschitz, self.spread)

    def in_box(self, z: Vector) -> bool:
        xs = np.asarray(z[: self.n], dtype=float)
        return bool(np.all(np.abs(xs) <= self.B + TOL_FEAS))


# -------------------------------------------------------------- outcome


@dataclass(frozen=True)
class ImprovementOutcome:
    """Answer of an improvement oracle: improved, no_better or both."""

    kind: str
    point: Optional[MixedPoint] = None
    value: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("improved", "no_better", "both"):
            raise ValueError(f"unknown outcome kind {self.kind!r}")
        if (self.kind == "no_better") != (self.point is None):
            raise ValueError("no_better carries no point; others carry one")

    @classmethod
    def improved(cls, point: MixedPoint, value: float) -> "ImprovementOutcome":
        return cls("improved", point, float(value))

    @classmethod
    def both(cls, point: MixedPoint, value: float) -> "ImprovementOutcome":
        return cls("both", point, float(value))

    @classmethod
    def no_better(cls) -> "ImprovementOutcome":
        return cls("no_better")

    @property
    def is_improved(self) -> bool:
        return self.kind == "improved"

    @property
    def is_no_better(self) -> bool:
        return self.kind == "no_better"

    @property
    def is_both(self) -> bool:
        return self.kind == "both"


def _as_vector(problem: Problem, z) -> Vector:
    if isinstance(z, MixedPoint):
        if z.n != problem.n or z.d != problem.d:
            raise DimensionError(
                f"expected n={problem.n}, d={problem.d}; got n={z.n}, d={z.d}")
        return z.vector()
    v = np.asarray(z, dtype=float).ravel()
    if v.shape != (problem.dim,):
        raise DimensionError(f"expected {problem.dim} coordinates, got {v.size}")
    return v


def check_feasible(problem: Problem, z, tol: float = TOL_FEAS) -> bool:
    """True iff ``z`` lies in the box and satisfies every ``g_i(z) <= tol``."""
    v = _as_vector(problem, z)
    vals = problem.g_all(v)
    if not problem.in_box(v):
        return False
    return all(val <= tol for val in vals)
