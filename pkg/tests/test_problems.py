"""Functional evaluation and Euler-Lagrange residuals on known fixtures."""
import math

import numpy as np
import pytest

from fracvar import (
    Constraint,
    Grid,
    VarProblem,
    augmented_lagrangian,
    build_left_rlfd,
    constraint_value,
    el_residual,
    el_residual_general,
    evaluate_functional,
    gamma,
)
from fracvar.expressions import parse


def half_problem(lagrangian, **kw):
    return VarProblem(0.0, 1.0, alphas=0.5, betas=0.5, lagrangian=lagrangian, **kw)


# ---------------------------------------------------------------- construction

def test_rejects_undeclared_variable():
    with pytest.raises(ValueError):
        half_problem("v + w")


def test_rejects_out_of_range_orders():
    with pytest.raises(ValueError):
        VarProblem(0.0, 1.0, alphas=1.5, betas=0.5, lagrangian="v^2")


def test_multi_channel_names():
    p = VarProblem(0.0, 1.0, alphas=(0.5, 0.75), betas=0.5, lagrangian="u1 + u2")
    assert p.u_names() == ("u1", "u2")
    # bare "u" is ambiguous once there are two integral channels
    with pytest.raises(ValueError):
        VarProblem(0.0, 1.0, alphas=(0.5, 0.75), betas=0.5, lagrangian="u")


def test_pins_shorthand():
    p = half_problem("v^2", pins=(0.0, 1.0))
    assert p.pins == ((0.0, 1.0),)


# ---------------------------------------------------------------- functional

def test_functional_zero_candidate(grid64):
    p = half_problem("v^2")
    assert evaluate_functional(p, np.zeros(grid64.n_nodes), grid64) == 0.0


def test_functional_zero_lagrangian(grid64):
    p = half_problem("0")
    y = np.sin(grid64.nodes)
    assert evaluate_functional(p, y, grid64) == 0.0


def test_functional_sqrt_fixture(grid1k):
    # L = v with y = sqrt(t): J -> int_0^1 Gamma(1.5) dt
    p = half_problem("v")
    J = evaluate_functional(p, np.sqrt(grid1k.nodes), grid1k)
    assert abs(J - gamma(1.5)) <= 2e-2


def test_functional_u_fixture(grid1k):
    # L = u with y = 1: J -> int_0^1 2 sqrt(x/pi) dx = Gamma(2)/Gamma(2.5)
    p = half_problem("u")
    J = evaluate_functional(p, np.ones(grid1k.n_nodes), grid1k)
    assert abs(J - 0.7522527781) <= 1e-4


def test_functional_accepts_sequences(grid64):
    p = half_problem("u + v")
    y_list = list(np.linspace(0.0, 1.0, grid64.n_nodes))
    y_arr = np.linspace(0.0, 1.0, grid64.n_nodes)
    assert evaluate_functional(p, y_list, grid64) == evaluate_functional(p, y_arr, grid64)


# ---------------------------------------------------------------- residuals

def test_residual_zero_for_quadratic_at_zero(grid256):
    p = half_problem("v^2/2")
    r = el_residual(p, np.zeros(grid256.n_nodes), grid256)
    assert np.all(r.values == 0.0)
    assert r.norm == 0.0


def test_residual_constant_u_lagrangian(grid1k):
    # L = u gives r = right I^{1/2} of 1 = 2 sqrt((1-x)/pi)
    p = half_problem("u")
    r = el_residual(p, np.zeros(grid1k.n_nodes), grid1k)
    exact = 2.0 * np.sqrt(1.0 - grid1k.nodes) / math.sqrt(math.pi)
    vals = r.values[0]
    assert np.max(np.abs(vals - exact)[grid1k.interior()]) <= 2e-3
    # the adjoint construction is one order worse at the first node
    assert abs(vals[0] - exact[0]) <= 1.5 * math.sqrt(grid1k.h)


def test_residual_small_at_extremal(grid1k):
    # y = sqrt(x)/Gamma(1.5) solves the problem for L = (v-1)^2
    p = half_problem("(v - 1)^2")
    y = np.sqrt(grid1k.nodes) / gamma(1.5)
    r = el_residual(p, y, grid1k)
    assert np.max(np.abs(r.values[0][grid1k.interior()])) <= 5e-2


def test_residual_noncommensurate(grid1k):
    # integral channels of orders 0.5 and 0.25 acting on one unknown
    p = VarProblem(0.0, 1.0, alphas=(0.5, 0.75), betas=0.5, lagrangian="u1 + u2")
    r = el_residual_general(p, np.zeros(grid1k.n_nodes), grid1k)
    x = grid1k.nodes
    exact = (1.0 - x) ** 0.5 / gamma(1.5) + (1.0 - x) ** 0.25 / gamma(1.25)
    assert exact[0] == pytest.approx(2.2316842, abs=2e-3)
    assert np.max(np.abs(r.values[0] - exact)[grid1k.interior()]) <= 2e-3
    # first-node defect from the two adjoints, each one order down
    budget = 1.5 * (grid1k.h**0.5 + grid1k.h**0.25)
    assert abs(r.values[0][0] - exact[0]) <= budget


def test_general_matches_basic_bitwise(grid256):
    p = half_problem("v^2 + u*v + x*u")
    rng = np.random.default_rng(3)
    y = rng.standard_normal(grid256.n_nodes)
    a = el_residual(p, y, grid256)
    b = el_residual_general(p, y, grid256)
    assert np.array_equal(a.values, b.values)
    assert a.norm == b.norm


def test_el_residual_requires_basic_shape(grid256):
    p = VarProblem(0.0, 1.0, alphas=(0.5, 0.75), betas=0.5, lagrangian="u1 + u2")
    with pytest.raises(ValueError):
        el_residual(p, np.zeros(grid256.n_nodes), grid256)


def test_two_unknowns_decoupled(grid256):
    p = VarProblem(0.0, 1.0, alphas=0.5, betas=0.5, n_unknowns=2,
                   lagrangian="(v1 - 1)^2 + v2^2")
    y1 = np.sqrt(grid256.nodes) / gamma(1.5)
    y2 = np.zeros(grid256.n_nodes)
    r = el_residual_general(p, (y1, y2), grid256)
    assert r.values.shape == (2, grid256.n_nodes)
    assert np.max(np.abs(r.values[0][grid256.interior()])) <= 5e-2
    assert np.all(r.values[1] == 0.0)


def test_residual_values_read_only(grid64):
    p = half_problem("v^2")
    r = el_residual(p, np.zeros(grid64.n_nodes), grid64)
    with pytest.raises(ValueError):
        r.values[0, 0] = 1.0


# ---------------------------------------------------------------- constraints

def test_augmented_lagrangian_structure():
    p = half_problem("v^2", constraint=Constraint("v", 1.0))
    aug = augmented_lagrangian(p, 0.0)
    assert aug.lagrangian == parse("v^2")
    assert aug.constraint is None
    aug2 = augmented_lagrangian(p, -2.0)
    env = {"x": 0.3, "u": 0.7, "v": 1.4}
    from fracvar import evaluate

    assert evaluate(aug2.lagrangian, env) == pytest.approx(1.4**2 - 2.0 * 1.4)


def test_constraint_value_fixtures(grid1k):
    p = half_problem("v^2", constraint=Constraint("v", 1.0))
    assert constraint_value(p, np.zeros(grid1k.n_nodes), grid1k) == 0.0
    y = np.sqrt(grid1k.nodes) / gamma(1.5)
    assert abs(constraint_value(p, y, grid1k) - 1.0) <= 2e-2
    pu = half_problem("v^2", constraint=Constraint("u", 0.75))
    got = constraint_value(pu, np.ones(grid1k.n_nodes), grid1k)
    assert abs(got - 0.7522527781) <= 1e-4


def test_constraint_value_requires_constraint(grid64):
    p = half_problem("v^2")
    with pytest.raises(ValueError):
        constraint_value(p, np.zeros(grid64.n_nodes), grid64)


# ---------------------------------------------------------------- classical limit

def test_classical_limit_of_residual():
    # as the orders approach 1 the residual of the classical extremal of
    # L = (y'^2 + y^2)/2 with y(0)=0, y(1)=1 (namely sinh(x)/sinh(1)) vanishes
    g = Grid(0.0, 1.0, 512)
    y = np.sinh(g.nodes) / math.sinh(1.0)
    norms = []
    for order in (0.9, 0.99, 0.999):
        p = VarProblem(0.0, 1.0, alphas=order, betas=order,
                       lagrangian="v^2/2 + u^2/2", pins=(0.0, 1.0))
        norms.append(el_residual(p, y, g).interior_norm())
    assert norms[0] > norms[1] > norms[2]
    for got, ref in zip(norms, (0.4038, 0.04928, 0.0050294)):
        assert got == pytest.approx(ref, rel=0.05)


def test_d_channel_feeds_residual(grid256):
    # sanity: for L = v^2/2 the residual is the right-adjoint of D y
    p = half_problem("v^2/2")
    rng = np.random.default_rng(19)
    y = np.cumsum(rng.uniform(0.0, 0.1, grid256.n_nodes))
    y[0] = 0.0
    r = el_residual(p, y, grid256)
    assert r.norm > 0.0
    dvals = build_left_rlfd(grid256, 0.5).apply(y)
    assert np.isfinite(dvals).all()
