import math

import numpy as np
import pytest
from hypothesis import example, given, settings, strategies as st

from midco.model import INFEASIBLE, NO_MORE_POINTS, Problem, ball, linear, quadratic
from midco.oracle2d import (BestPointSet, SearchStats, adjust_kth_point, improve_2d,
                            iteration_bound, kth_best_integer, kth_best_sequence,
                            level_side_test, minimize_2d, relaxation_min, search_triangles)

from helpers import cross, feasible_raw, hull_lattice_points, lattice_values


def shifted(center, B=5, cons=(), c0=0.0):
    """``||x - center||^2 + c0``."""
    center = np.asarray(center, dtype=float)
    return Problem(2, 0, B, quadratic(2 * np.eye(2), -2 * center, float(center @ center) + c0),
                   cons)


def random_problem(seed, B_max=12):
    rng = np.random.default_rng(seed)
    B = int(rng.integers(1, B_max + 1))
    A = rng.normal(size=(2, 2)) * rng.choice([0.2, 1.0, 4.0])
    Q = A @ A.T + rng.choice([0.0, 1e-3, 0.5]) * np.eye(2)
    ctr = rng.uniform(-B, B, 2)
    cons = []
    for _ in range(rng.integers(0, 3)):
        if rng.random() < 0.5:
            a = rng.normal(size=2)
            cons.append(linear(a, float(a @ rng.uniform(-B, B, 2)) + rng.uniform(0, 2)))
        else:
            cons.append(ball(rng.uniform(-B, B, 2), rng.uniform(0.5, B + 1)))
    return Problem(2, 0, B, quadratic(Q, -Q @ ctr, float(ctr @ Q @ ctr) / 2 + rng.uniform(0, 1)),
                   cons)


def test_iteration_bound():
    for B in (1, 5, 100, 2 ** 20):
        assert iteration_bound(B) == math.ceil(math.log(4 * B * B) / math.log(1.5))


class TestImprove:
    def test_origin_beats_query(self):
        out = improve_2d(shifted([0, 0]), [0.4, 0.4])
        assert out.is_improved and out.point.x == (0, 0)

    def test_no_better(self):
        assert improve_2d(shifted([0.5, 0.5]), [0.5, 0.5]).is_no_better

    def test_improved_value(self):
        p = shifted([0.3, -0.7])
        out = improve_2d(p, [0.1, 0.2])
        assert out.is_improved and out.value <= 0.85 + 1e-12

    def test_infeasible_query(self):
        p = shifted([0, 0], cons=[linear([1, 0], -1)])
        with pytest.raises(ValueError):
            improve_2d(p, [0.0, 0.0])

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10 ** 6), st.floats(0, 1), st.floats(0, 1))
    @example(133, 1.0, 1.0)
    def test_against_enumeration(self, seed, s, t):
        p = random_problem(seed)
        x = relaxation_min(p)
        if x is INFEASIBLE:
            return
        vals = lattice_values(p)
        # a feasible query between the relaxed optimum and a box point
        q = x + s * (np.array([p.B, -p.B]) * (2 * t - 1) - x)
        while not feasible_raw(p, q):
            q = 0.5 * (q + x)
        c = p.objective.value(q)
        stats = SearchStats()
        out = improve_2d(p, q, stats=stats)
        assert not stats.violations()
        if out.is_improved:
            assert out.value <= c and feasible_raw(p, np.array(out.point.x, float))
        else:
            assert not vals or vals[0][0] > c


class TestMinimize:
    def test_shifted_centre(self):
        p = shifted([0.3, -0.7])
        r = minimize_2d(p, [0.3, -0.7])
        assert r.point == (0, -1) and r.value == pytest.approx(0.18)

    def test_lattice_optimum(self):
        r = minimize_2d(shifted([0, 0]), [0, 0])
        assert r.point == (0, 0) and r.value == 0

    def test_constrained_lexicographic(self):
        p = shifted([0, 0], cons=[linear([-1, -1], -3)])
        r = minimize_2d(p, [1.5, 1.5])
        assert r.point == (1, 2) and r.value == 5

    def test_no_lattice_point(self):
        p = shifted([0, 0], cons=[ball([0.5, 0.5], 0.3)])
        x = relaxation_min(p)
        assert minimize_2d(p, x) is INFEASIBLE

    def test_empty_relaxation(self):
        p = shifted([0, 0], B=2, cons=[linear([1, 0], -5)])
        assert relaxation_min(p) is INFEASIBLE

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10 ** 6))
    def test_against_enumeration(self, seed):
        p = random_problem(seed)
        vals = lattice_values(p)
        x = relaxation_min(p)
        stats = SearchStats()
        r = INFEASIBLE if x is INFEASIBLE else minimize_2d(p, x, stats=stats)
        assert not stats.violations()
        if not vals:
            assert r is INFEASIBLE
            return
        assert r.value == vals[0][0]
        ties = [pnt for v, pnt in vals if v == vals[0][0]]
        assert r.point == min(ties)


class TestKBest:
    def test_second_point(self):
        best = BestPointSet([(0, 0)])
        z, v = kth_best_integer(shifted([0, 0]), best)
        assert z == (-1, 0) and v == 1

    def test_sixth_value(self):
        seq = kth_best_sequence(shifted([0, 0]), 6)
        assert [v for _, v in seq] == [0, 1, 1, 1, 1, 2]

    def test_exhaustion(self):
        p = shifted([0, 0], B=1)
        seq = kth_best_sequence(p, 12)
        assert len(seq) == 9
        best = BestPointSet([pnt for pnt, _ in seq])
        assert kth_best_integer(p, best) is NO_MORE_POINTS

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10 ** 6))
    def test_against_enumeration(self, seed):
        p = random_problem(seed, B_max=8)
        vals = lattice_values(p)
        k = min(8, len(vals) + 1)
        best = BestPointSet()
        for i in range(k):
            r = kth_best_integer(p, best)
            if i >= len(vals):
                assert r is NO_MORE_POINTS
                break
            assert r[1] == vals[i][0]
            best.add(*r)
            assert hull_lattice_points(best.points) == set(best.points)


class TestAdjust:
    def test_collinear_walk(self):
        assert adjust_kth_point(BestPointSet([(0, 0)]), (2, 0)) == (1, 0)

    def test_already_valid(self):
        assert adjust_kth_point(BestPointSet([(0, 0), (1, 0)]), (0, 1)) == (0, 1)

    def test_member_rejected(self):
        with pytest.raises(ValueError):
            adjust_kth_point(BestPointSet([(0, 0)]), (0, 0))

    @settings(max_examples=80, deadline=None)
    @given(st.integers(0, 10 ** 6))
    def test_random_hulls(self, seed):
        rng = np.random.default_rng(seed)
        best = BestPointSet([(0, 0)])
        while len(best) < rng.integers(1, 7):
            cand = tuple(int(v) for v in rng.integers(-4, 5, 2))
            if cand in best:
                continue
            best.add(adjust_kth_point(best, cand))
        cand = tuple(int(v) for v in rng.integers(-6, 7, 2))
        if cand in best:
            return
        z = adjust_kth_point(best, cand)
        new = best.points + [z]
        assert hull_lattice_points(new) == set(new)
        assert z in hull_lattice_points(best.points + [cand])


class TestSearchTriangles:
    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10 ** 6))
    def test_cover_box_minus_hull(self, seed):
        rng = np.random.default_rng(seed)
        B = int(rng.integers(2, 7))
        best = BestPointSet()
        for _ in range(rng.integers(1, 6)):
            cand = tuple(int(v) for v in rng.integers(-B + 1, B, 2))
            if cand not in best:
                best.add(cand)
        inside = hull_lattice_points(best.points)
        tris = search_triangles(best.hull, B)
        for a in range(-B, B + 1):
            for b in range(-B, B + 1):
                if (a, b) in inside:
                    continue
                assert any(_in_triangle((a, b), t[:3]) for t in tris), (a, b)


def _in_triangle(q, tri):
    a, b, c = [(float(p[0]), float(p[1])) for p in tri]
    s = cross(a, b, c)
    if s == 0:
        return False
    sign = 1 if s > 0 else -1
    return all(sign * cross(p, r, q) >= -1e-12 for p, r in ((a, b), (b, c), (c, a)))


class TestLevelSideTest:
    f = staticmethod(lambda z: (z[0] - 0.2) ** 2)

    def test_side_with_minimum(self):
        assert level_side_test(self.f, (0.9, 0.0), (0.0, 0.0))
        assert not level_side_test(self.f, (0.9, 0.0), (1.0, 0.0))

    def test_empty_level_set(self):
        g = lambda z: abs(z[0] - 0.5)
        assert not level_side_test(g, (0.5, 0.0), (0.0, 0.0))
        assert not level_side_test(g, (0.5, 0.0), (1.0, 0.0))

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.1, 5), st.floats(-1, 2), st.floats(0, 1))
    def test_against_dense_scan(self, a, c, zh):
        f = lambda z: a * (z[0] - c) ** 2
        ts = np.linspace(0, 1, 10 ** 4)
        ref = f((zh, 0))
        for end in (0.0, 1.0):
            seg = zh + ts * (end - zh)
            scan = np.min(a * (seg - c) ** 2) < ref - 1e-9
            got = level_side_test(f, (zh, 0.0), (end, 0.0))
            if scan:
                assert got
