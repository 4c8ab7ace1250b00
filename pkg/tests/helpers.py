"""Shared test utilities: seeded expression generators, finite differences.

Generated trees stay inside the parser's image: numeric literals are
nonnegative and negation is spelled with an explicit unary node, so a
print/parse round trip can be compared structurally.
"""

import numpy as np

from fracvar.expressions import Bin, Call, Expr, Neg, Num, Var

ALL_FUNCS = ("sin", "cos", "exp", "log", "sqrt")
BIN_OPS = ("+", "-", "*", "/", "^")


def _leaf(rng, names) -> Expr:
    if rng.random() < 0.4:
        return Num(round(float(rng.uniform(0.0, 4.0)), 2))
    return Var(str(rng.choice(names)))


def random_expr(rng, depth: int, names=("x", "u", "v")) -> Expr:
    """Arbitrary tree over the full grammar; for round-trip tests."""
    if depth <= 0 or rng.random() < 0.25:
        return _leaf(rng, names)
    r = rng.random()
    if r < 0.15:
        return Neg(random_expr(rng, depth - 1, names))
    if r < 0.35:
        fn = str(rng.choice(ALL_FUNCS))
        return Call(fn, random_expr(rng, depth - 1, names))
    op = str(rng.choice(BIN_OPS))
    return Bin(op, random_expr(rng, depth - 1, names),
               random_expr(rng, depth - 1, names))


def random_smooth_expr(rng, depth: int, names=("x", "u", "v")) -> Expr:
    """Everywhere-smooth tree with moderate magnitudes; safe for finite
    differences: no log/sqrt, integer exponents, division by constants only,
    exponentials of linear arguments only."""
    if depth <= 0 or rng.random() < 0.3:
        if rng.random() < 0.5:
            c = Num(round(float(rng.uniform(0.0, 2.0)), 1))
            return Neg(c) if rng.random() < 0.3 else c
        return Var(str(rng.choice(names)))
    r = rng.random()
    if r < 0.12:
        return Neg(random_smooth_expr(rng, depth - 1, names))
    if r < 0.24:
        fn = str(rng.choice(("sin", "cos")))
        return Call(fn, random_smooth_expr(rng, depth - 1, names))
    if r < 0.30:
        arg = Bin("*", Num(round(float(rng.uniform(0.0, 1.0)), 2)),
                  Var(str(rng.choice(names))))
        if rng.random() < 0.5:
            arg = Neg(arg)
        return Call("exp", arg)
    if r < 0.42:
        base = random_smooth_expr(rng, max(depth - 2, 0), names)
        return Bin("^", base, Num(float(rng.integers(2, 4))))
    if r < 0.52:
        return Bin("/", random_smooth_expr(rng, depth - 1, names),
                   Num(round(float(rng.uniform(1.5, 3.0)), 1)))
    op = str(rng.choice(("+", "-", "*")))
    return Bin(op, random_smooth_expr(rng, depth - 1, names),
               random_smooth_expr(rng, depth - 1, names))


def central_diff(f, x: float, step: float = 1e-6) -> float:
    return (f(x + step) - f(x - step)) / (2.0 * step)


def random_smooth_samples(rng, grid, amplitude: float = 1.0) -> np.ndarray:
    """Low-frequency random function on the grid nodes, zero at the left end."""
    x = (grid.nodes - grid.a) / (grid.b - grid.a)
    out = np.zeros_like(x)
    for k in range(1, 4):
        out += float(rng.uniform(-1.0, 1.0)) * np.sin(k * np.pi * x)
    out += float(rng.uniform(-1.0, 1.0)) * x
    return amplitude * out
