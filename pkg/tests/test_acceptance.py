"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import math
import time
from fractions import Fraction

import numpy as np

from midco.bisect import (GOLDEN, KAPPA, NoisyFn, ScaledLattice, golden_min_continuous,
                          golden_min_integer)
from midco.mi_solver import FiberEvaluator, enumerate_fibers, improve_mixed_2d, solve_general
from midco.model import INFEASIBLE, NO_MORE_POINTS, Problem, linear, quadratic
from midco.oracle2d import (BestPointSet, SearchStats, improve_2d, kth_best_integer, minimize_2d,
                            relaxation_min)
from midco.prox_mirror import (ProxSetup, mirror_bound, mirror_descent,
                               termination_iteration_bound, termination_procedure)

from helpers import (feasible_raw, hash_unit, hull_lattice_points, lattice_min_2d,
                     lattice_values, mixed_instance, quadratic_2d, random_psd)

# stats gathered by the planar criteria, re-audited by criterion 3
COLLECTED: list = []


def _feasible_lattice(problem, rng):
    B = problem.B
    pts = [np.array([a, b], float) for a in range(-B, B + 1) for b in range(-B, B + 1)]
    pts = [z for z in pts if feasible_raw(problem, z)]
    return pts[int(rng.integers(len(pts)))] if pts else None


def test_c1_exact_2d_correctness(verdict):
    rng = np.random.default_rng(2024)
    mismatches, solver_time = 0, 0.0
    start = time.perf_counter()
    for i in range(1000):
        B = (10, 30, 100)[i % 3]
        p = quadratic_2d(rng, B)
        t = time.perf_counter()
        x = relaxation_min(p)
        stats = SearchStats()
        r = INFEASIBLE if x is INFEASIBLE else minimize_2d(p, x, stats=stats)
        solver_time += time.perf_counter() - t
        COLLECTED.append((B, stats))
        want = lattice_min_2d(p)
        got = None if r is INFEASIBLE else r.value
        mismatches += got != want
    total = time.perf_counter() - start
    ok = mismatches == 0 and total < 60.0
    verdict("C1 exact 2D correctness", ok,
            f"{mismatches} mismatches / 1000, solver {solver_time:.1f}s, total {total:.1f}s")
    assert ok


def _scaling_family(rng, B):
    Q = random_psd(rng, 2, ridge=0.1)
    ctr = rng.uniform(-0.8, 0.8, 2) * B
    a = rng.normal(size=2)
    b = float(a @ ctr) + rng.uniform(-1, 1) * np.linalg.norm(a) * B * 0.1
    return Problem(2, 0, B, quadratic(Q, -Q @ ctr, float(ctr @ Q @ ctr) / 2 + 1), [linear(a, b)])


def test_c2_polylog_scaling(verdict):
    start = time.perf_counter()
    means = {}
    for B in (2 ** 10, 2 ** 20):
        rng = np.random.default_rng(0)
        counts = []
        for _ in range(30):
            p = _scaling_family(rng, B)
            x = relaxation_min(p)
            q = x + rng.uniform(-3, 3, 2)
            while not feasible_raw(p, q) or np.any(np.abs(q) > B):
                q = x + rng.uniform(-3, 3, 2) * 0.5
            p.counter.f_evals = 0
            stats = SearchStats()
            improve_2d(p, q, stats=stats)
            COLLECTED.append((B, stats))
            counts.append(p.counter.f_evals)
        means[B] = float(np.mean(counts))
    ratio = means[2 ** 20] / means[2 ** 10]
    elapsed = time.perf_counter() - start
    ok = ratio <= 3.0 and elapsed < 120.0
    verdict("C2 polylog scaling", ok,
            f"mean f-evals {means[2 ** 10]:.1f} -> {means[2 ** 20]:.1f}, ratio {ratio:.2f}, "
            f"{elapsed:.1f}s")
    assert ok


def test_c4_golden_accuracy(verdict):
    rng = np.random.default_rng(4)
    lam1 = GOLDEN.lambda1
    bad, worst_c, worst_i = 0, 0.0, 0.0
    for i in range(200):
        a, c = rng.uniform(0.1, 10), rng.uniform(-0.2, 1.2)
        phi = lambda t, a=a, c=c: a * (t - c) ** 2
        lo = phi(min(max(c, 0.0), 1.0))
        spread = max(phi(0.0), phi(1.0)) - lo
        N = int(rng.integers(3, 2000))
        tau = rng.uniform(0.9, 1.0) / N
        lat = ScaledLattice(rng.uniform(0, tau), tau)
        lat_min = min(phi(lat.point(k)) for k in range(lat.k_lo, lat.k_hi + 1))
        for g in (1e-2, 1e-4):
            fn = NoisyFn(lambda t: phi(t) + g * hash_unit("c", i, t), g, spread)
            res = golden_min_continuous(fn)
            cap = 2 + math.ceil(math.log((KAPPA - 1) * g / spread) / math.log(lam1))
            err = res.value - lo
            bad += err > (KAPPA - 1) * g or fn.evals > cap
            worst_c = max(worst_c, err / g)

            fn = NoisyFn(lambda t: phi(t) + g * hash_unit("i", i, t), g, spread)
            res = golden_min_integer(fn, lat)
            cap = min(4 + math.ceil(math.log((KAPPA - 1) * g / spread) / math.log(lam1)),
                      5 + math.ceil(math.log(tau) / math.log(lam1)))
            err = res.value - lat_min
            bad += err > KAPPA * g or fn.evals > cap or not lat.contains(res.x)
            worst_i = max(worst_i, err / g)
    ok = bad == 0
    verdict("C4 golden-search accuracy", ok,
            f"{bad} failures / 800 runs, worst error {worst_c:.2f}g continuous, "
            f"{worst_i:.2f}g lattice")
    assert ok


def _small_instance(rng):
    B = int(rng.integers(3, 12))
    Q = random_psd(rng, 2, ridge=0.2)
    ctr = rng.uniform(-0.7, 0.7, 2) * B
    cons = []
    if rng.random() < 0.5:
        a = rng.normal(size=2)
        cons = [linear(a, float(a @ ctr) + rng.uniform(0, 1) * np.linalg.norm(a))]
    return Problem(2, 0, B, quadratic(Q, -Q @ ctr, float(ctr @ Q @ ctr) / 2 + rng.uniform(0.1, 2)),
                   cons)


def test_c5_mirror_descent_bound(verdict):
    rng = np.random.default_rng(5)
    bad, checks, worst = 0, 0, 0.0
    for _ in range(20):
        p = _small_instance(rng)
        f_star = lattice_values(p)[0][0]
        z0 = _feasible_lattice(p, rng)
        for N in (10, 100, 1000):
            q = p.copy_fresh()
            tr = mirror_descent(q, lambda z: improve_2d(q, z), z0, N)
            prox = ProxSetup.euclidean(q, z0)
            rhs = mirror_bound(q.lipschitz, prox.M, prox.sigma, N)
            lhs = tr.best_value - f_star
            bad += not lhs <= rhs
            checks += 1
            worst = max(worst, lhs / rhs)
    ok = bad == 0
    verdict("C5 mirror-descent bound", ok,
            f"{bad} violations / {checks} checks, max LHS/RHS {worst:.3g}")
    assert ok


def test_c6_termination_procedure(verdict):
    rng = np.random.default_rng(6)
    bad, iters = 0, []
    for _ in range(50):
        p = _small_instance(rng)
        f_star = lattice_values(p)[0][0]
        z0 = relaxation_min(p)
        zhat0 = _feasible_lattice(p, rng)
        eps = float(rng.choice([0.1, 0.01, 1e-3]))
        eps_sub = 1e-6
        res = termination_procedure(p, lambda z: improve_2d(p, z), z0, zhat0,
                                    eps=eps, eps_sub=eps_sub)
        cap = termination_iteration_bound(p.objective.value(zhat0), p.objective.value(z0), eps)
        accurate = res.value - f_star <= eps * f_star + 2 * eps_sub
        bad += res.iterations > cap or not accurate
        iters.append((res.iterations, cap))
    ok = bad == 0
    verdict("C6 termination procedure", ok,
            f"{bad} failures / 50, max iterations {max(i for i, _ in iters)}, "
            f"max bound {max(c for _, c in iters)}")
    assert ok


def test_c7_kbest_equivalence(verdict):
    rng = np.random.default_rng(7)
    seq_bad, hull_bad, adjusts = 0, 0, 0
    for _ in range(100):
        B = int(rng.integers(1, 31))
        p = quadratic_2d(rng, B, n_linear=(0, 3), ridge=(0.0, 0.3), offset=rng.uniform(0, 1))
        vals = lattice_values(p)
        best = BestPointSet()
        stats = SearchStats()
        got = []
        for k in range(10):
            r = kth_best_integer(p, best, stats=stats)
            if r is NO_MORE_POINTS:
                break
            best.add(*r)
            got.append(r[1])
            if k > 0:
                adjusts += 1
                hull_bad += hull_lattice_points(best.points) != set(best.points)
        COLLECTED.append((B, stats))
        seq_bad += got != [v for v, _ in vals[:10]]
    ok = seq_bad == 0 and hull_bad == 0
    verdict("C7 k-best equivalence", ok,
            f"{seq_bad} sequence mismatches / 100, {hull_bad} hull violations / {adjusts} adjusts")
    assert ok


def test_c8_general_solver(verdict):
    rng = np.random.default_rng(8)
    bad, cases, solver_time = 0, 0, 0.0
    details = []
    for n in (3, 4):
        for d in (0, 1, 2):
            for B in range(1, 7):
                p = mixed_instance(rng, n, d, B)
                ref = enumerate_fibers(p.copy_fresh())
                for g in (0.0, 1e-3):
                    t = time.perf_counter()
                    r = solve_general(p.copy_fresh(), gamma=g, seed=B)
                    solver_time += time.perf_counter() - t
                    cases += 1
                    if ref is INFEASIBLE:
                        good = r.status == "infeasible"
                    elif g == 0.0:
                        good = r.status == "optimal" and r.value == ref[1]
                    else:
                        good = ref[1] - 1e-9 <= r.value <= ref[1] + r.accuracy
                    if not good:
                        bad += 1
                        details.append((n, d, B, g))
    ok = bad == 0 and solver_time < 600.0
    verdict("C8 general solver", ok,
            f"{bad} failures / {cases} runs, solver {solver_time:.1f}s" +
            (f", failing {details}" if details else ""))
    assert ok


# runs last so that it also audits the stats gathered above
def _audit(B, stats):
    bad = 0
    bound = math.ceil(math.log(4 * B * B) / math.log(1.5))
    for tr in stats.triangles:
        bad += tr.iterations > bound
        bad += sum(Fraction(int(r.numerator), int(r.denominator)) > Fraction(2, 3)
                   for r in tr.ratios)
    return bad


def test_c3_shrink_and_iteration_invariants(verdict):
    rng = np.random.default_rng(33)
    runs = list(COLLECTED)
    for i in range(150):
        B = int(2 ** rng.integers(1, 21))
        p = quadratic_2d(rng, B, n_linear=(0, 3), offset=rng.uniform(0, 1))
        x = relaxation_min(p)
        if x is INFEASIBLE:
            continue
        stats = SearchStats()
        if i % 3 == 0:
            improve_2d(p, x, stats=stats)
        elif i % 3 == 1:
            minimize_2d(p, x, stats=stats)
        else:
            best = BestPointSet()
            for _ in range(3):
                r = kth_best_integer(p, best, stats=stats)
                if r is NO_MORE_POINTS:
                    break
                best.add(*r)
        runs.append((B, stats))
    for seed in range(10):
        rng_m = np.random.default_rng(seed)
        p = mixed_instance(rng_m, 2, 1, 4)
        fib = FiberEvaluator(p, gamma=1e-3, seed=seed)
        rel = fib.relaxation()
        stats = SearchStats()
        improve_mixed_2d(p, fib, rel.z, stats=stats)
        runs.append((4, stats))
    steps = sum(len(tr.ratios) for _, s in runs for tr in s.triangles)
    triangles = sum(len(s.triangles) for _, s in runs)
    violations = sum(_audit(B, s) for B, s in runs)
    own = sum(len(s.violations()) for _, s in runs)
    ok = violations == 0 and own == 0 and steps > 0
    verdict("C3 shrink and iteration invariants", ok,
            f"{violations} violations over {triangles} triangles and {steps} shrink steps")
    assert ok
