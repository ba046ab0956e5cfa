"""Command-line interface.

Problem files are line oriented, ``section.key = value``, with numeric lists
separated by semicolons and matrices written row-major::

    problem.n = 2
    problem.d = 0
    problem.B = 5
    objective.family = quadratic
    objective.Q = 2;0;0;2
    objective.c = -0.6;1.4
    objective.c0 = 0.58
    constraints.1.family = linear
    constraints.1.a = -1;-1
    constraints.1.b = -3
    accuracy.gamma = 0
    solver.algorithm = 2d-exact

Exit codes: 0 solved or verified, 1 verification failed, 2 infeasible,
3 budget exhausted with an incumbent, 64 usage error, 65 parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import logging
import math
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import mi_solver, oracle2d
from .bisect import KAPPA
from .model import (INFEASIBLE, TOL_FEAS, DimensionError, Problem, ball, check_feasible,
                    linear, quadratic)
from .prox_mirror import mirror_descent, project_to_feasible

EXIT_OK, EXIT_FAIL, EXIT_INFEASIBLE, EXIT_BUDGET, EXIT_USAGE, EXIT_PARSE = 0, 1, 2, 3, 64, 65
ALGORITHMS = ("mirror", "2d-exact", "kbest", "mixed-2d", "general")
PSD_FLOOR = -1e-9
MAX_ENUMERATION = 10 ** 7

log = logging.getLogger("midco")


class ParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UsageError(ValueError):
    pass


# ------------------------------------------------------------ problem files


_SCALAR_KEYS = {
    "problem": {"n": int, "d": int, "B": int},
    "objective": {"family": str, "Q": "list", "c": "list", "c0": float,
                  "lipschitz": float, "spread": float},
    "accuracy": {"gamma": float, "eps_sub": float, "eps": float, "theta": float},
    "solver": {"algorithm": str, "budget": int, "seed": int, "iterations": int, "k": int,
               "start": "list"},
}
_CONSTRAINT_KEYS = {"family": str, "a": "list", "b": float, "center": "list", "radius": float}
_DEFAULTS = {
    "accuracy": {"gamma": 0.0, "eps_sub": 1e-6, "eps": 1e-3, "theta": 1.0},
    "solver": {"algorithm": "general", "budget": mi_solver.DEFAULT_BUDGET, "seed": 0,
               "iterations": 100, "k": 1, "start": None},
}


@dataclass
class ProblemFile:
    """Parsed problem file: the problem plus accuracy and solver settings."""

    n: int
    d: int
    B: int
    Q: np.ndarray
    c: np.ndarray
    c0: float
    constraints: list
    lipschitz: Optional[float] = None
    spread: Optional[float] = None
    accuracy: dict = field(default_factory=lambda: dict(_DEFAULTS["accuracy"]))
    solver: dict = field(default_factory=lambda: dict(_DEFAULTS["solver"]))

    @property
    def dim(self) -> int:
        return self.n + self.d

    def problem(self, B: Optional[int] = None) -> Problem:
        cons = []
        for con in self.constraints:
            if con["family"] == "linear":
                cons.append(linear(con["a"], con["b"]))
            else:
                cons.append(ball(con["center"], con["radius"]))
        return Problem(self.n, self.d, self.B if B is None else B,
                       quadratic(self.Q, self.c, self.c0), cons,
                       lipschitz=self.lipschitz, spread=self.spread)


def _num(text: str, kind, line: int):
    try:
        if kind is int:
            v = float(text)
            if not v.is_integer():
                raise ValueError
            return int(v)
        if kind is float:
            return float(text)
    except ValueError:
        raise ParseError(f"expected {kind.__name__}, got {text!r}", line) from None
    return text


def _list(text: str, line: int) -> np.ndarray:
    parts = [p.strip() for p in text.split(";")]
    try:
        return np.array([float(p) for p in parts if p != ""], dtype=float)
    except ValueError:
        raise ParseError(f"bad numeric list {text!r}", line) from None


def parse_problem_file(text: str) -> ProblemFile:
    """Parse and validate a problem file."""
    seen: dict = {}
    cons: dict = {}
    where: dict = {}
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ParseError("expected 'section.key = value'", no)
        lhs, rhs = (s.strip() for s in body.split("=", 1))
        parts = lhs.split(".")
        if parts[0] == "constraints":
            if len(parts) != 3 or not parts[1].isdigit() or parts[2] not in _CONSTRAINT_KEYS:
                raise ParseError(f"unknown key {lhs!r}", no)
            idx, key = int(parts[1]), parts[2]
            kind = _CONSTRAINT_KEYS[key]
            slot = cons.setdefault(idx, {})
            if key in slot:
                raise ParseError(f"duplicate key {lhs!r}", no)
            slot[key] = _list(rhs, no) if kind == "list" else _num(rhs, kind, no)
            where[(idx, key)] = no
            continue
        if len(parts) != 2 or parts[0] not in _SCALAR_KEYS or parts[1] not in _SCALAR_KEYS[parts[0]]:
            raise ParseError(f"unknown key {lhs!r}", no)
        if lhs in seen:
            raise ParseError(f"duplicate key {lhs!r}", no)
        kind = _SCALAR_KEYS[parts[0]][parts[1]]
        seen[lhs] = _list(rhs, no) if kind == "list" else _num(rhs, kind, no)
        where[lhs] = no

    def need(key):
        if key not in seen:
            raise ParseError(f"missing key {key!r}")
        return seen[key]

    n, d, B = need("problem.n"), need("problem.d"), need("problem.B")
    if n < 0 or d < 0 or n + d < 1:
        raise ParseError("need n, d >= 0 and n + d >= 1", where.get("problem.n"))
    if B < 1:
        raise ParseError("B must be at least 1", where.get("problem.B"))
    dim = n + d
    fam = seen.get("objective.family", "quadratic")
    if fam != "quadratic":
        raise ParseError(f"unknown objective family {fam!r}", where.get("objective.family"))
    Qf = need("objective.Q")
    if Qf.size != dim * dim:
        raise ParseError(f"objective.Q needs {dim * dim} entries, got {Qf.size}",
                         where["objective.Q"])
    Q = Qf.reshape(dim, dim)
    if not np.allclose(Q, Q.T, rtol=0, atol=1e-12):
        raise ParseError("objective.Q is not symmetric", where["objective.Q"])
    if np.linalg.eigvalsh(Q).min() < PSD_FLOOR:
        raise ParseError("objective.Q is not positive semidefinite", where["objective.Q"])
    c = seen.get("objective.c", np.zeros(dim))
    if c.size != dim:
        raise ParseError(f"objective.c needs {dim} entries", where.get("objective.c"))
    constraints = []
    for idx in sorted(cons):
        slot = cons[idx]
        line = min(v for k, v in where.items() if isinstance(k, tuple) and k[0] == idx)
        fam = slot.get("family")
        if fam == "linear":
            if set(slot) != {"family", "a", "b"}:
                raise ParseError(f"constraints.{idx}: linear needs exactly a and b", line)
            if slot["a"].size != dim:
                raise ParseError(f"constraints.{idx}.a needs {dim} entries", line)
            if not np.any(slot["a"]):
                raise ParseError(f"constraints.{idx}.a must be nonzero", line)
        elif fam == "ball":
            if set(slot) != {"family", "center", "radius"}:
                raise ParseError(f"constraints.{idx}: ball needs exactly center and radius", line)
            if slot["center"].size != dim:
                raise ParseError(f"constraints.{idx}.center needs {dim} entries", line)
            if slot["radius"] < 0:
                raise ParseError(f"constraints.{idx}.radius must be nonnegative", line)
        else:
            raise ParseError(f"constraints.{idx}: unknown family {fam!r}", line)
        constraints.append(slot)
    acc = dict(_DEFAULTS["accuracy"])
    sol = dict(_DEFAULTS["solver"])
    for key, val in seen.items():
        sec, name = key.split(".")
        if sec == "accuracy":
            acc[name] = val
        elif sec == "solver":
            sol[name] = val
    if acc["gamma"] < 0:
        raise ParseError("accuracy.gamma must be nonnegative", where.get("accuracy.gamma"))
    if sol["algorithm"] not in ALGORITHMS:
        raise ParseError(f"unknown algorithm {sol['algorithm']!r}", where.get("solver.algorithm"))
    if sol["start"] is not None and sol["start"].size != dim:
        raise ParseError(f"solver.start needs {dim} entries", where.get("solver.start"))
    return ProblemFile(n, d, B, Q, c, float(seen.get("objective.c0", 0.0)), constraints,
                       seen.get("objective.lipschitz"), seen.get("objective.spread"), acc, sol)


def parse_problem(text: str) -> Problem:
    """Parse a problem file into a :class:`Problem`."""
    return parse_problem_file(text).problem()


def _fmt(v) -> str:
    v = float(v)
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _fmt_list(a) -> str:
    return ";".join(_fmt(v) for v in np.asarray(a, dtype=float).ravel())


def serialize(pf: ProblemFile) -> str:
    """Canonical text of a problem file (``parse`` of it gives the same file)."""
    out = [f"problem.n = {pf.n}", f"problem.d = {pf.d}", f"problem.B = {pf.B}",
           "objective.family = quadratic", f"objective.Q = {_fmt_list(pf.Q)}",
           f"objective.c = {_fmt_list(pf.c)}", f"objective.c0 = {_fmt(pf.c0)}"]
    if pf.lipschitz is not None:
        out.append(f"objective.lipschitz = {_fmt(pf.lipschitz)}")
    if pf.spread is not None:
        out.append(f"objective.spread = {_fmt(pf.spread)}")
    for i, con in enumerate(pf.constraints, 1):
        out.append(f"constraints.{i}.family = {con['family']}")
        if con["family"] == "linear":
            out += [f"constraints.{i}.a = {_fmt_list(con['a'])}",
                    f"constraints.{i}.b = {_fmt(con['b'])}"]
        else:
            out += [f"constraints.{i}.center = {_fmt_list(con['center'])}",
                    f"constraints.{i}.radius = {_fmt(con['radius'])}"]
    for key in ("gamma", "eps_sub", "eps", "theta"):
        out.append(f"accuracy.{key} = {_fmt(pf.accuracy[key])}")
    for key in ("algorithm", "budget", "seed", "iterations", "k"):
        val = pf.solver[key]
        out.append(f"solver.{key} = {val if isinstance(val, str) else _fmt(val)}")
    if pf.solver.get("start") is not None:
        out.append(f"solver.start = {_fmt_list(pf.solver['start'])}")
    return "\n".join(out) + "\n"


# ------------------------------------------------------------------ drivers


def _oracle_for(problem: Problem, gamma: float, seed: int):
    """Improvement oracle matching the problem's integer dimension."""
    if problem.n == 2 and problem.d == 0 and gamma == 0:
        return lambda z: oracle2d.improve_2d(problem, z)
    fibers = mi_solver.FiberEvaluator(problem, gamma, seed=seed)
    if problem.n == 1:
        return lambda z: mi_solver.improve_mixed_1d(problem, fibers, z)
    if problem.n == 2:
        return lambda z: mi_solver.improve_mixed_2d(problem, fibers, z)
    raise UsageError("improvement oracles exist for n = 1 and n = 2 only")


def _point_json(problem: Problem, z) -> dict:
    z = np.asarray(z, dtype=float)
    return {"x": [int(round(v)) for v in z[:problem.n]], "y": [float(v) for v in z[problem.n:]]}


def _report(status, problem, point=None, value=None, lower=None, accuracy=0.0, trace=None):
    return {"status": status,
            "incumbent": None if point is None else _point_json(problem, point),
            "value": value, "lower_bound": lower, "accuracy": accuracy,
            "f_evals": problem.counter.f_evals, "g_evals": problem.counter.g_evals,
            "trace": trace or {}}


def run_solve(pf: ProblemFile, algorithm: Optional[str] = None, seed: Optional[int] = None,
              problem: Optional[Problem] = None) -> dict:
    """Run one algorithm and return a report dictionary."""
    algo = algorithm or pf.solver["algorithm"]
    seed = pf.solver["seed"] if seed is None else seed
    if algo not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {algo!r}")
    problem = problem or pf.problem()
    gamma = pf.accuracy["gamma"]
    log.info("solving with %s (n=%d, d=%d, B=%d)", algo, problem.n, problem.d, problem.B)
    if algo in ("2d-exact", "kbest") and (problem.n != 2 or problem.d != 0):
        raise UsageError(f"{algo} needs n = 2 and d = 0")
    if algo == "mixed-2d" and problem.n != 2:
        raise UsageError("mixed-2d needs n = 2")

    if algo == "2d-exact":
        x = oracle2d.relaxation_min(problem)
        if x is INFEASIBLE:
            return _report("infeasible", problem)
        stats = oracle2d.SearchStats()
        res = oracle2d.minimize_2d(problem, x, stats=stats)
        if res is INFEASIBLE:
            return _report("infeasible", problem)
        tr = {"triangles": len(stats.triangles),
              "iterations": [t.iterations for t in stats.triangles],
              "violations": stats.violations()}
        return _report("optimal", problem, res.point, res.value, res.value, 0.0, tr)

    if algo == "kbest":
        seq = oracle2d.kth_best_sequence(problem, pf.solver["k"])
        if not seq:
            return _report("infeasible", problem)
        tr = {"points": [{"x": list(p), "value": v} for p, v in seq]}
        return _report("optimal", problem, seq[0][0], seq[0][1], seq[0][1], 0.0, tr)

    if algo == "mixed-2d":
        fibers = mi_solver.FiberEvaluator(problem, gamma, seed=seed, budget=pf.solver["budget"])
        try:
            r = mi_solver.minimize_mixed_2d(problem, fibers)
        except mi_solver.BudgetExhausted:
            return _report("budget", problem)
        if r is INFEASIBLE:
            return _report("infeasible", problem)
        acc = KAPPA * gamma
        return _report("optimal", problem, r[0].vector(), problem.f(r[0].vector()),
                       r[1] - acc - gamma if gamma else r[1], acc,
                       {"fiber_evals": fibers.evaluations})

    if algo == "general":
        res = mi_solver.solve_general(problem, budget=pf.solver["budget"], gamma=gamma, seed=seed)
        tr = {"stages": [{"coords": list(s.coords), "k_max": s.k_max, "visits": s.visits}
                         for s in res.trace.stages],
              "incumbents": res.trace.incumbents, "fiber_evals": res.evaluations}
        if res.point is None:
            return _report(res.status, problem, trace=tr)
        lower = None if not math.isfinite(res.lower_bound) else res.lower_bound
        return _report(res.status, problem, res.point.vector(), res.value, lower,
                       res.accuracy, tr)

    # mirror descent
    oracle = _oracle_for(problem, gamma, seed)
    start = pf.solver.get("start")
    z0 = np.zeros(problem.dim) if start is None else np.asarray(start, dtype=float)
    if not check_feasible(problem, z0):
        z0 = project_to_feasible(problem, z0)[0]
        if not check_feasible(problem, z0):
            return _report("infeasible", problem)
    tr = mirror_descent(problem, oracle, z0, pf.solver["iterations"],
                        eps=pf.accuracy["eps"], eps_sub=pf.accuracy["eps_sub"])
    info = {"status": tr.status, "iterations": len(tr.records),
            "best_history": tr.best_history}
    if tr.best_point is None:
        # no_better at the start point proves nothing about feasibility
        return _report("budget", problem, trace=info)
    lower = tr.lower_bound if tr.status == "terminated" else None
    status = "optimal" if tr.status in ("terminated", "both") else "budget"
    acc = KAPPA * gamma if problem.n <= 2 and gamma else 0.0
    return _report(status, problem, tr.best_point, tr.best_value,
                   None if lower is None or not math.isfinite(lower) else lower, acc, info)


def enumerate_optimum(problem: Problem):
    """Exhaustive optimum ``(x, value)`` over every integer point, or ``INFEASIBLE``."""
    if (2 * problem.B + 1) ** problem.n > MAX_ENUMERATION:
        raise UsageError("instance too large to enumerate")
    if problem.d == 0:
        B = problem.B
        best = None
        for x in itertools.product(range(-B, B + 1), repeat=problem.n):
            z = np.array(x, dtype=float)
            if problem.constraints and problem.g(z) > TOL_FEAS:
                continue
            v = problem.f(z)
            if best is None or v < best[1]:
                best = (x, v)
        return INFEASIBLE if best is None else best
    return mi_solver.enumerate_fibers(problem)


def run_verify(pf: ProblemFile, report: dict) -> dict:
    """Compare a report against exhaustive enumeration."""
    problem = pf.problem()
    enum = enumerate_optimum(problem)
    status = report.get("status")
    if enum is INFEASIBLE:
        ok = status == "infeasible"
        return {"verdict": "PASS" if ok else "FAIL", "enumerated": None, "gap": None}
    if report.get("value") is None or status == "infeasible":
        return {"verdict": "FAIL", "enumerated": enum[1], "gap": None}
    gap = float(report["value"]) - enum[1]
    tol = float(report.get("accuracy") or 0.0)
    ok = -1e-9 * (1.0 + abs(enum[1])) <= gap <= tol + 1e-12 if tol > 0 else gap == 0.0
    inc = report.get("incumbent")
    if ok and inc is not None:
        z = np.array(inc["x"] + inc["y"], dtype=float)
        ok = check_feasible(problem, z)
    return {"verdict": "PASS" if ok else "FAIL", "enumerated": enum[1], "gap": gap,
            "enumerated_x": list(enum[0])}


def _bench_problem(pf: ProblemFile, B: int, rng: np.random.Generator) -> Problem:
    center = np.zeros(pf.dim)
    center[:pf.n] = rng.uniform(-0.5 * B, 0.5 * B, pf.n)
    c = pf.c - pf.Q @ center
    c0 = pf.c0 + 0.5 * float(center @ pf.Q @ center)
    q = ProblemFile(pf.n, pf.d, B, pf.Q, c, c0, pf.constraints, None, None,
                    pf.accuracy, pf.solver)
    return q.problem()


def run_bench(pf: ProblemFile, b_list, trials: int, algorithm: Optional[str] = None,
              seed: Optional[int] = None):
    """Rows ``(B, algorithm, mean_f_evals, mean_g_evals, wall_ms)`` and the fitted slope."""
    algo = algorithm or pf.solver["algorithm"]
    seed = pf.solver["seed"] if seed is None else seed
    rows = []
    for B in b_list:
        rng = np.random.default_rng([seed, B])
        fs, gs, ts = [], [], []
        for _ in range(trials):
            problem = _bench_problem(pf, B, rng)
            t0 = time.perf_counter()
            run_solve(pf, algo, seed, problem=problem)
            ts.append(1000.0 * (time.perf_counter() - t0))
            fs.append(problem.counter.f_evals)
            gs.append(problem.counter.g_evals)
        rows.append((B, algo, float(np.mean(fs)), float(np.mean(gs)), float(np.mean(ts))))
    slope = None
    if len(rows) >= 2:
        slope = float(np.polyfit([math.log(r[0]) for r in rows], [r[2] for r in rows], 1)[0])
    return rows, slope


# ---------------------------------------------------------------------- CLI


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _b_value(text: str) -> int:
    text = text.strip()
    if "^" in text:
        base, exp = text.split("^", 1)
        return int(base) ** int(exp)
    return int(text)


def _configure_logging() -> None:
    level = os.environ.get("MIDCO_LOG", "quiet").strip().lower()
    levels = {"quiet": logging.WARNING, "info": logging.INFO, "trace": logging.DEBUG}
    if level not in levels:
        raise UsageError(f"MIDCO_LOG must be one of {sorted(levels)}")
    logging.basicConfig(level=levels[level], stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    log.setLevel(levels[level])


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(str(exc)) from None


def _emit(text: str, out: Optional[str]) -> None:
    if out and out != "-":
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


_STATUS_EXIT = {"optimal": EXIT_OK, "infeasible": EXIT_INFEASIBLE, "budget": EXIT_BUDGET}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="midco", description="Mixed-integer convex optimisation toolkit.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("solve", help="solve a problem file")
    s.add_argument("file")
    s.add_argument("--algo", choices=ALGORITHMS)
    s.add_argument("--seed", type=int)
    s.add_argument("--out", help="write the report here instead of stdout")
    s.add_argument("--timing", action="store_true", help="add wall time to the report")

    s = sub.add_parser("improve", help="call the improvement oracle once")
    s.add_argument("file")
    s.add_argument("--query", required=True, help="semicolon-separated coordinates")
    s.add_argument("--seed", type=int)

    s = sub.add_parser("kbest", help="k best integer points (n = 2, d = 0)")
    s.add_argument("file")
    s.add_argument("--k", type=int, required=True)

    s = sub.add_parser("verify", help="check a report by enumeration")
    s.add_argument("file")
    s.add_argument("report")

    s = sub.add_parser("bench", help="evaluation counts against B")
    s.add_argument("file")
    s.add_argument("--b-list", required=True, help="e.g. '2^10;2^14;2^20'")
    s.add_argument("--trials", type=int, default=5)
    s.add_argument("--algo", choices=ALGORITHMS)
    s.add_argument("--seed", type=int)
    s.add_argument("--out", default="-")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _configure_logging()
        pf = parse_problem_file(_read(args.file))
        if args.command == "solve":
            t0 = time.perf_counter()
            rep = run_solve(pf, args.algo, args.seed)
            if args.timing:
                rep["wall_ms"] = 1000.0 * (time.perf_counter() - t0)
            _emit(_dumps(rep), args.out)
            return _STATUS_EXIT.get(rep["status"], EXIT_OK)
        if args.command == "improve":
            problem = pf.problem()
            q = _list(args.query, None)
            if q.size != problem.dim:
                raise UsageError(f"--query needs {problem.dim} coordinates")
            seed = pf.solver["seed"] if args.seed is None else args.seed
            out = _oracle_for(problem, pf.accuracy["gamma"], seed)(q)
            rep = {"outcome": out.kind, "value": out.value,
                   "point": None if out.point is None
                   else {"x": list(out.point.x), "y": list(out.point.y)},
                   "query_value": problem.f(q)}
            _emit(_dumps(rep), None)
            return EXIT_OK
        if args.command == "kbest":
            problem = pf.problem()
            if problem.n != 2 or problem.d != 0:
                raise UsageError("kbest needs n = 2 and d = 0")
            if args.k < 1:
                raise UsageError("--k must be positive")
            seq = oracle2d.kth_best_sequence(problem, args.k)
            rep = {"points": [{"k": i + 1, "x": list(p), "value": v}
                              for i, (p, v) in enumerate(seq)],
                   "exhausted": len(seq) < args.k,
                   "f_evals": problem.counter.f_evals, "g_evals": problem.counter.g_evals}
            _emit(_dumps(rep), None)
            return EXIT_OK if seq else EXIT_INFEASIBLE
        if args.command == "verify":
            try:
                report = json.loads(_read(args.report))
            except json.JSONDecodeError as exc:
                raise ParseError(f"report is not JSON: {exc}") from None
            verdict = run_verify(pf, report)
            _emit(_dumps(verdict), None)
            return EXIT_OK if verdict["verdict"] == "PASS" else EXIT_FAIL
        if args.command == "bench":
            try:
                b_list = [_b_value(t) for t in args.b_list.split(";") if t.strip()]
            except ValueError:
                raise UsageError(f"bad --b-list {args.b_list!r}") from None
            if not b_list or min(b_list) < 1 or args.trials < 1:
                raise UsageError("--b-list needs positive values and --trials >= 1")
            rows, slope = run_bench(pf, b_list, args.trials, args.algo, args.seed)
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["B", "algorithm", "mean_f_evals", "mean_g_evals", "wall_ms"])
            for r in rows:
                w.writerow([r[0], r[1], f"{r[2]:.3f}", f"{r[3]:.3f}", f"{r[4]:.3f}"])
            if slope is not None:
                buf.write(f"# slope_f_evals_per_lnB = {slope:.6f}\n")
            _emit(buf.getvalue(), args.out)
            if slope is not None:
                sys.stderr.write(f"slope of mean_f_evals against ln B: {slope:.6f}\n")
            return EXIT_OK
    except ParseError as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except (UsageError, DimensionError) as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
