"""Acceptance gate: ten end-to-end checks with pinned tolerances.

Each test prints one ACCEPTANCE line so a plain pytest run doubles as a
go/no-go report. Tolerances are frozen from oracle measurements; loosening
them should be a deliberate act, not a drive-by edit.
"""
import json
import math
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from fracvar import (
    Constraint,
    ExactField,
    Grid,
    SampledFn,
    SolveConfig,
    VarProblem,
    assemble,
    build_left_rlfd,
    build_left_rlfi,
    build_right_adjoint,
    build_right_rlfi,
    check_convexity,
    excess,
    gamma,
    minimize,
    solve_isoperimetric,
    verify_field_minimizer,
)
from fracvar.cli import main as cli_main
from fracvar.expressions import evaluate, free_vars, parse, to_string, differentiate

from helpers import random_expr, random_smooth_expr, random_smooth_samples

PROBLEM_DIR = Path(__file__).resolve().parent.parent / "demos" / "problems"


@contextmanager
def reported(capsys, num, name):
    try:
        yield
    except BaseException:
        with capsys.disabled():
            print(f"ACCEPTANCE {num:02d} {name}: FAIL")
        raise
    with capsys.disabled():
        print(f"ACCEPTANCE {num:02d} {name}: PASS")


def test_01_operator_oracles(capsys):
    with reported(capsys, 1, "operator oracles"):
        g = Grid(0.0, 1.0, 1024)
        t0 = time.perf_counter()
        got = build_left_rlfi(g, 0.5).apply(np.ones(g.n_nodes))
        exact = 2.0 * np.sqrt(g.nodes) / math.sqrt(math.pi)
        assert np.max(np.abs(got - exact)) <= 1e-5
        assert time.perf_counter() - t0 < 1.0

        t0 = time.perf_counter()
        got = build_left_rlfd(g, 0.5).apply(np.sqrt(g.nodes))
        rel = np.abs(got[g.interior()] - gamma(1.5)) / gamma(1.5)
        assert np.max(rel) <= 2e-2
        assert time.perf_counter() - t0 < 1.0

        # derivative of a constant blows up like x^(-1/2) under refinement
        t0 = time.perf_counter()
        first = []
        for n in (256, 512, 1024):
            gn = Grid(0.0, 1.0, n)
            first.append(build_left_rlfd(gn, 0.5).apply(np.ones(gn.n_nodes))[1])
        ratios = np.array(first[1:]) / np.array(first[:-1])
        assert np.all(np.diff(first) > 0)
        assert np.all(np.abs(ratios - math.sqrt(2.0)) <= 0.2 * math.sqrt(2.0))
        assert time.perf_counter() - t0 < 1.0


def test_02_convergence_orders(capsys):
    with reported(capsys, 2, "convergence orders"):
        t0 = time.perf_counter()
        ns = (128, 256, 512, 1024)
        logh = np.log([1.0 / n for n in ns])
        for nu in (2.0, 3.0):
            errs = []
            for n in ns:
                g = Grid(0.0, 1.0, n)
                got = build_left_rlfi(g, 0.5).apply(g.nodes**nu)
                errs.append(abs(got[-1] - gamma(nu + 1.0) / gamma(nu + 1.5)))
            assert np.polyfit(logh, np.log(errs), 1)[0] >= 1.8
        for nu in (1.0, 2.0):
            errs = []
            for n in ns:
                g = Grid(0.0, 1.0, n)
                got = build_left_rlfd(g, 0.5).apply(g.nodes**nu)
                errs.append(abs(got[-1] - gamma(nu + 1.0) / gamma(nu + 0.5)))
            assert np.polyfit(logh, np.log(errs), 1)[0] >= 0.8
        assert time.perf_counter() - t0 < 10.0


def test_03_integration_by_parts(capsys):
    with reported(capsys, 3, "discrete integration by parts"):
        g = Grid(0.0, 1.0, 256)
        w = g.quad_weights
        rng = np.random.default_rng(17)
        ops = (build_left_rlfi(g, 0.5), build_left_rlfd(g, 0.5))
        adjs = tuple(build_right_adjoint(op) for op in ops)
        for k in range(100):
            op, adj = ops[k % 2], adjs[k % 2]
            f = rng.standard_normal(g.n_nodes)
            h = rng.standard_normal(g.n_nodes)
            lhs = float(w @ (op.apply(f) * h))
            rhs = float(w @ (f * adj.apply(h)))
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))
        gaps = []
        for n in (128, 256, 512):
            gn = Grid(0.0, 1.0, n)
            direct = build_right_rlfi(gn, 0.5).apply(np.ones(gn.n_nodes))
            adj = build_right_adjoint(build_left_rlfi(gn, 0.5)).apply(
                np.ones(gn.n_nodes)
            )
            gaps.append(float(np.max(np.abs(direct - adj)[gn.interior()])))
        assert gaps[0] > gaps[1] > gaps[2]


def test_04_gradient_identity(capsys):
    with reported(capsys, 4, "gradient identity"):
        t0 = time.perf_counter()
        rng = np.random.default_rng(41)
        g = Grid(0.0, 1.0, 64)
        eps = 1e-6
        n_checked = 0
        while n_checked < 10:
            L = random_smooth_expr(rng, 3)
            if not ({"u", "v"} & free_vars(L)):
                continue
            n_checked += 1
            p = VarProblem(0.0, 1.0, alphas=0.5, betas=0.5, lagrangian=L)
            dp = assemble(p, g)
            Y = random_smooth_samples(rng, g)[None, :]
            grad = dp.gradient(Y)[0]
            weighted = g.quad_weights * dp.residual_values(Y)[0]
            assert np.max(np.abs(grad - weighted)) <= 1e-12
            fd = np.zeros_like(grad)
            for i in range(g.n_nodes):
                Yp = Y.copy()
                Yp[0, i] += eps
                Ym = Y.copy()
                Ym[0, i] -= eps
                fd[i] = (dp.functional(Yp) - dp.functional(Ym)) / (2 * eps)
            dev = np.max(np.abs(grad - fd)) / max(1.0, np.max(np.abs(grad)))
            assert dev <= 1e-6
        assert time.perf_counter() - t0 < 30.0


def test_05_driver_solve(capsys):
    with reported(capsys, 5, "driver solve"):
        t0 = time.perf_counter()
        p = VarProblem(0.0, 1.0, alphas=0.5, betas=0.5,
                       lagrangian="(v - 1)^2", pins=(0.0, None))
        g = Grid(0.0, 1.0, 256)
        report = minimize(p, g, SolveConfig(max_iters=5000, grad_tol=1e-8))
        assert report.iters <= 5000
        assert report.J <= 1e-6
        I_y = build_left_rlfi(g, 0.5).apply(report.y.values)
        assert np.max(np.abs(I_y - g.nodes)) <= 2e-2
        assert time.perf_counter() - t0 < 60.0


def test_06_isoperimetric(capsys):
    with reported(capsys, 6, "isoperimetric multiplier"):
        g = Grid(0.0, 1.0, 256)
        cfg = SolveConfig(max_iters=8000, grad_tol=1e-6)

        def iso(ell):
            p = VarProblem(0.0, 1.0, alphas=0.5, betas=0.5, lagrangian="v^2",
                           constraint=Constraint("v", ell), pins=(0.0, None))
            return solve_isoperimetric(p, g, cfg)

        r1 = iso(1.0)
        assert abs(r1.lam - (-2.0)) <= 1e-2
        assert abs(r1.J - 1.0) <= 1e-2
        assert abs(r1.constraint_gap) <= 1e-3
        r2 = iso(2.0)
        assert abs(r2.lam - (-4.0)) <= 0.05 * 4.0
        assert abs(r2.J - 4.0) <= 0.05 * 4.0


def test_07_classical_limit_sweep(capsys, tmp_path):
    with reported(capsys, 7, "classical limit sweep"):
        out = tmp_path / "sweep"
        rc = cli_main(["run", str(PROBLEM_DIR / "limit_sweep_classical.json"),
                       "--out", str(out), "--quiet"])
        assert rc == 0
        rows = [line.split(",") for line in
                (out / "sweep.csv").read_text().strip().splitlines()[1:]]
        assert len(rows) == 3
        assert all(r[3] == "ok" for r in rows)
        dists = [float(r[2]) for r in rows]
        assert dists[0] > dists[1] > dists[2]


def test_08_certify_suite(capsys):
    with reported(capsys, 8, "certify suite"):
        box = ((0.0, 1.0), (-1.0, 1.0), (-1.0, 1.0))
        assert check_convexity("v^2", box).convex
        rep = check_convexity("-(v^2)", box)
        assert not rep.convex and rep.counterexample is not None
        assert check_convexity("u^2 + u*v + v^2", box).convex

        zs = np.linspace(-1.0, 1.0, 100)
        ws = np.linspace(-1.0, 1.0, 100)
        for L in ("v^2", "u^2 + u*v + v^2"):
            vals = [excess(L, 0.5, 0.25, z, w) for z in zs for w in ws]
            assert min(vals) >= -1e-9

        g = Grid(0.0, 1.0, 1024)
        field = ExactField(phi="1", s_fn="y - x/2", box=((0.0, 1.0), (-1.0, 1.5)))
        y0 = SampledFn(g, np.sqrt(g.nodes) / gamma(1.5))
        rep = verify_field_minimizer("v^2/2", field, y0, 0.5, g)
        assert rep.trajectory
        assert abs(rep.J - 0.5) <= 1e-2
        assert abs(rep.field_value - 0.5) <= 1e-2
        assert abs(rep.gap) <= 1e-2

        field2 = ExactField(phi="2", s_fn="2*y - 2*x", box=((0.0, 1.0), (-1.0, 3.0)))
        y2 = SampledFn(g, 2.0 * np.sqrt(g.nodes) / gamma(1.5))
        rep2 = verify_field_minimizer("v^2/2", field2, y2, 0.5, g)
        assert abs(rep2.J - 2.0) <= 4e-2
        assert abs(rep2.gap) <= 4e-2


def test_09_expression_layer(capsys):
    with reported(capsys, 9, "expression layer"):
        rng = np.random.default_rng(91)
        for _ in range(1000):
            e = random_expr(rng, 4)
            assert parse(to_string(e)) == e
        for _ in range(1000):
            e = random_smooth_expr(rng, 3)
            for var in sorted(free_vars(e)):
                d = differentiate(e, var)
                for _ in range(3):
                    pt = {v: float(rng.uniform(0.3, 1.7)) for v in free_vars(e)}

                    def f(t, pt=pt, var=var, e=e):
                        q = dict(pt)
                        q[var] = t
                        return float(evaluate(e, q))

                    fd = (f(pt[var] + 1e-6) - f(pt[var] - 1e-6)) / 2e-6
                    ds = float(evaluate(d, pt))
                    assert abs(ds - fd) <= 1e-6 * max(1.0, abs(ds))


def test_10_cli_determinism(capsys, tmp_path):
    with reported(capsys, 10, "cli determinism"):
        fixtures = sorted(PROBLEM_DIR.glob("*.json"))
        assert fixtures, "no shipped problem files found"
        for fixture in fixtures:
            out_a = tmp_path / f"{fixture.stem}_a"
            out_b = tmp_path / f"{fixture.stem}_b"
            rc_a = cli_main(["run", str(fixture), "--out", str(out_a), "--quiet"])
            rc_b = cli_main(["run", str(fixture), "--out", str(out_b), "--quiet"])
            assert rc_a == rc_b == 0, fixture.name
            sa = json.loads((out_a / "summary.json").read_text())
            sb = json.loads((out_b / "summary.json").read_text())
            assert sa["summary_hash"] == sb["summary_hash"], fixture.name
            sa.pop("timings")
            sb.pop("timings")
            assert sa == sb, fixture.name
            # tables must agree byte for byte as well
            for csv_a in sorted(out_a.glob("*.csv")):
                csv_b = out_b / csv_a.name
                assert csv_a.read_bytes() == csv_b.read_bytes(), csv_a.name

        # schema violations exit 2
        bad = tmp_path / "bad.json"
        doc = json.loads((PROBLEM_DIR / "solve_quadratic.json").read_text())
        doc["orders"] = {"alpha": 1.5, "beta": 0.5}
        bad.write_text(json.dumps(doc))
        assert cli_main(["run", str(bad), "--out", str(tmp_path / "bad_out")]) == 2
