import math
from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from midco.lattice2d import (Halfplane, LatticeLine, Region, collinear_points_line,
                             enumerate_lattice_points, ilp2_min, primitive, shrinking_lines,
                             thin_region_line)
from midco.model import EMPTY, INFEASIBLE, ContractError


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def brute_triangle_points(tri):
    """Lattice points of a nondegenerate triangle with rational vertices."""
    tri = [(Fr(p[0]), Fr(p[1])) for p in tri]
    D = math.lcm(*[c.denominator for p in tri for c in p])
    a, b, c = [(int(p[0] * D), int(p[1] * D)) for p in tri]
    s = 1 if _cross(a, b, c) > 0 else -1
    xs = [p[0] for p in tri]
    ys = [p[1] for p in tri]
    out = []
    for x in range(math.ceil(min(xs)), math.floor(max(xs)) + 1):
        for y in range(math.ceil(min(ys)), math.floor(max(ys)) + 1):
            q = (x * D, y * D)
            if all(s * _cross(p, r, q) >= 0 for p, r in ((a, b), (b, c), (c, a))):
                out.append((x, y))
    return out


def rational_triangle(rng, span=50, den=7):
    while True:
        tri = [(Fr(int(rng.integers(-span * den, span * den)), den),
                Fr(int(rng.integers(-span * den, span * den)), den)) for _ in range(3)]
        if _cross(*tri) != 0:
            return tri


class TestIlp:
    def test_small_triangle_lexicographic(self):
        assert ilp2_min((0, 1), Region.polygon([(0, 0), (2, 0), (0, 2)])) == (0, 0)

    def test_inside_unit_cell(self):
        reg = Region.polygon([(Fr(1, 5), Fr(1, 5)), (Fr(4, 5), Fr(3, 10)), (Fr(1, 2), Fr(4, 5))])
        assert ilp2_min((1, 0), reg) is INFEASIBLE

    def test_halfplane_input(self):
        hps = [Halfplane((1, 0), 3), Halfplane((0, 1), 3), Halfplane((-1, -1), -5)]
        assert ilp2_min((1, 1), hps) in {(2, 3), (3, 2)}

    def test_random_against_enumeration(self):
        rng = np.random.default_rng(7)
        for _ in range(500):
            tri = rational_triangle(rng)
            h = (int(rng.integers(-9, 10)), int(rng.integers(-9, 10)))
            pts = brute_triangle_points(tri)
            got = ilp2_min(h, Region.polygon(tri))
            if not pts:
                assert got is INFEASIBLE
                continue
            best = min(h[0] * x + h[1] * y for x, y in pts)
            want = min(p for p in pts if h[0] * p[0] + h[1] * p[1] == best)
            assert got == want


class TestThinRegion:
    def test_sliver_on_axis(self):
        eps = Fr(1, 10)
        reg = Region.polygon([(-eps, -eps), (3 + eps, -eps), (3 + eps, eps), (-eps, eps)])
        line = thin_region_line(reg)
        assert line.points() == [(0, 0), (1, 0), (2, 0), (3, 0)]

    def test_single_point(self):
        reg = Region.polygon([(Fr(9, 10), Fr(9, 10)), (Fr(6, 5), Fr(9, 10)), (1, Fr(6, 5))])
        line = thin_region_line(reg, probe=(1, 0))
        assert line.points() == [(1, 1)]
        assert line.direction in {(0, 1), (0, -1)}

    def test_empty(self):
        reg = Region.polygon([(Fr(1, 5), Fr(1, 5)), (Fr(4, 5), Fr(1, 5)), (Fr(1, 2), Fr(4, 5))])
        assert thin_region_line(reg) is EMPTY
        assert collinear_points_line(reg) is EMPTY

    def test_fat_region_rejected(self):
        reg = Region.polygon([(0, 0), (3, 0), (0, 3)])
        with pytest.raises(ContractError):
            thin_region_line(reg)
        with pytest.raises(ContractError):
            collinear_points_line(reg)

    def test_diagonal(self):
        eps = Fr(1, 20)
        reg = Region.polygon([(-eps, 0), (0, -eps), (5 + eps, 5), (5, 5 + eps)])
        assert collinear_points_line(reg).points() == [(i, i) for i in range(6)]


def _hypothesis_holds(u, v, w):
    """``conv{u, u+v, u+v+w}`` holds only ``u`` and points of ``[u+v, u+v+w]``."""
    uv = (u[0] + v[0], u[1] + v[1])
    uvw = (uv[0] + w[0], uv[1] + w[1])
    for q in brute_triangle_points([u, uv, uvw]):
        if q == u:
            continue
        if _cross(uv, uvw, q) != 0:
            return False
    return True


class TestShrinkingLines:
    @pytest.mark.parametrize("fast", [False, True])
    def test_scaled_example(self, fast):
        u = (Fr(1, 2), Fr(1, 2))
        v, w = (Fr(0), Fr(1, 2)), (Fr(1, 2), Fr(0))
        assert _hypothesis_holds(u, v, w)
        lines = shrinking_lines(u, v, w, fast=fast)
        covered = {p for ln in lines for p in ln.points()}
        target = brute_triangle_points([u, (u[0] + v[0], u[1] + v[1]),
                                        (u[0] + v[0] - w[0], u[1] + v[1] - w[1])])
        assert set(target) <= covered

    def test_lattice_free_triangle(self):
        u = (Fr(1, 5), Fr(1, 5))
        assert shrinking_lines(u, (Fr(0), Fr(1, 5)), (Fr(1, 5), Fr(0))) == []

    def test_degenerate(self):
        with pytest.raises(ValueError):
            shrinking_lines((0, 0), (1, 1), (2, 2))

    @pytest.mark.parametrize("fast", [False, True])
    def test_random_covering(self, fast):
        rng = np.random.default_rng(11)
        done = 0
        while done < 150:
            # short edges keep the emptiness hypothesis likely
            u = (Fr(int(rng.integers(-40, 40)), 8), Fr(int(rng.integers(-40, 40)), 8))
            v = (Fr(int(rng.integers(-16, 17)), 8), Fr(int(rng.integers(-16, 17)), 8))
            w = (Fr(int(rng.integers(-16, 17)), 8), Fr(int(rng.integers(-16, 17)), 8))
            if _cross((0, 0), v, w) == 0 or not _hypothesis_holds(u, v, w):
                continue
            done += 1
            tri = [u, (u[0] + v[0], u[1] + v[1]), (u[0] + v[0] - w[0], u[1] + v[1] - w[1])]
            target = set(brute_triangle_points(tri))
            lines = shrinking_lines(u, v, w, fast=fast)
            assert len(lines) <= 3
            covered = {p for ln in lines for p in ln.points()}
            assert target <= covered
            assert covered <= target


class TestPrimitives:
    @given(st.integers(-50, 50), st.integers(-50, 50))
    def test_primitive(self, a, b):
        if a == 0 and b == 0:
            return
        p = primitive((a, b))
        assert math.gcd(*p) == 1
        assert p[0] * b - p[1] * a == 0

    def test_strict_cut(self):
        hp = Halfplane.strict_cut((1, 0), (2, 5))
        assert not hp.contains((2, 0)) and hp.contains((3, 0))

    def test_region_clip_area(self):
        reg = Region.polygon([(0, 0), (4, 0), (0, 4)]).clip(Halfplane((1, 0), 2))
        assert reg.area() == 6

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10 ** 6))
    def test_enumeration_matches_brute(self, seed):
        tri = rational_triangle(np.random.default_rng(seed), span=8)
        assert enumerate_lattice_points(Region.polygon(tri)) == sorted(brute_triangle_points(tri))

    def test_line_index(self):
        line = LatticeLine((0, 0), (1, 2), -1, 3)
        assert line.index_of((2, 4)) == 2 and line.index_of((1, 1)) is None
        assert len(line) == 5
