"""Brute-force reference solvers and instance generators shared by the tests."""

import hashlib
import itertools
import math

import numpy as np

from midco.model import TOL_FEAS, Problem, ball, linear, quadratic


def feasible_raw(problem, z):
    """Feasibility without touching the evaluation counters."""
    return all(c.value(z) <= TOL_FEAS for c in problem.constraints)


def lattice_values(problem):
    """Sorted ``(value, point)`` over every feasible integer point (d = 0)."""
    B = problem.B
    out = []
    for x in itertools.product(range(-B, B + 1), repeat=problem.n):
        z = np.array(x, dtype=float)
        if feasible_raw(problem, z):
            out.append((problem.objective.value(z), x))
    out.sort()
    return out


def lattice_min_2d(problem):
    """Vectorised exhaustive minimum for n = 2, d = 0 with linear constraints.

    Candidates within a small margin of the vectorised minimum are re-evaluated
    through the objective itself so that values are bit-identical to the
    solver's.  Returns ``None`` when no point is feasible.
    """
    B = problem.B
    g = np.arange(-B, B + 1)
    X, Y = np.meshgrid(g, g, indexing="ij")
    Z = np.stack([X.ravel(), Y.ravel()], 1).astype(float)
    ok = np.ones(len(Z), bool)
    for con in problem.constraints:
        ok &= (Z @ con.params["a"] - con.params["b"]) <= TOL_FEAS
    Z = Z[ok]
    if len(Z) == 0:
        return None
    P = problem.objective.params
    v = 0.5 * np.einsum("ij,jk,ik->i", Z, P["Q"], Z) + Z @ P["c"] + P["c0"]
    cand = Z[v <= v.min() + 1e-6 * (1 + abs(v.min()))]
    return min(problem.objective.value(z) for z in cand if feasible_raw(problem, z))


def random_psd(rng, dim, scale=1.0, ridge=0.0):
    A = rng.normal(size=(dim, dim)) * scale
    return A @ A.T + ridge * np.eye(dim)


def quadratic_2d(rng, B, n_linear=(1, 3), ridge=(0.0, 0.5), offset=0.0):
    """PSD quadratic around a random centre plus random halfplanes."""
    Q = random_psd(rng, 2, ridge=rng.uniform(*ridge))
    ctr = rng.uniform(-B, B, 2)
    cons = []
    for _ in range(rng.integers(*n_linear)):
        a = rng.normal(size=2)
        cons.append(linear(a, float(a @ rng.uniform(-B, B, 2))))
    return Problem(2, 0, B, quadratic(Q, -Q @ ctr, float(ctr @ Q @ ctr) / 2 + offset), cons)


def mixed_instance(rng, n, d, B):
    """PSD quadratic in (x, y) with up to two halfspaces and |y_j| <= 3."""
    D = n + d
    Q = random_psd(rng, D, scale=rng.choice([0.45, 1.0]), ridge=0.05)
    ctr = np.concatenate([rng.uniform(-B, B, n), rng.uniform(-2, 2, d)])
    cons = []
    for _ in range(rng.integers(0, 3)):
        a = rng.normal(size=D)
        anchor = np.concatenate([rng.uniform(-B, B, n), np.zeros(d)])
        cons.append(linear(a, float(a @ anchor) + rng.uniform(0, 2)))
    for j in range(d):
        e = np.zeros(D)
        e[n + j] = 1.0
        cons += [linear(e, 3.0), linear(-e, 3.0)]
    return Problem(n, d, B, quadratic(Q, -Q @ ctr, float(ctr @ Q @ ctr) / 2 + 0.1), cons)


def hash_unit(*key):
    """Deterministic pseudo-random number in [0, 1) keyed by ``key``."""
    h = hashlib.sha256(repr(key).encode()).digest()
    return int.from_bytes(h[:8], "big") / 2.0 ** 64


def cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def hull_lattice_points(points):
    """Integer points of ``conv(points)`` by exact integer arithmetic."""
    pts = sorted(set(points))
    if len(pts) == 1:
        return set(pts)
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    out = set()
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            q = (x, y)
            if len(hull) == 2:
                a, b = hull
                inside = (cross(a, b, q) == 0 and min(a[0], b[0]) <= x <= max(a[0], b[0])
                          and min(a[1], b[1]) <= y <= max(a[1], b[1]))
            else:
                inside = all(cross(hull[i], hull[(i + 1) % len(hull)], q) >= 0
                             for i in range(len(hull)))
            if inside:
                out.add(q)
    return out


def ball_problem(n, d, B, center, radius, Q=None, c=None, c0=0.0):
    dim = n + d
    Q = np.eye(dim) if Q is None else Q
    return Problem(n, d, B, quadratic(Q, c, c0), [ball(center, radius)])


def ceil_log(x, base):
    return math.ceil(math.log(x) / math.log(base))
