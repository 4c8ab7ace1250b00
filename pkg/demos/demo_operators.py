"""Evaluate the discrete fractional operators against closed-form answers.

Runs the half-order integral and derivative on a few functions whose
fractional calculus is known in closed form, and prints the worst-case
errors so you can see what the schemes actually deliver.
"""
import argparse
import math

import numpy as np

from fracvar import (
    Grid,
    build_left_rlfd,
    build_left_rlfi,
    build_right_adjoint,
    build_right_rlfi,
    gamma,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-cells", type=int, default=256)
    ap.add_argument("--order", type=float, default=0.5)
    args = ap.parse_args()

    g = Grid(0.0, 1.0, args.n_cells)
    x = g.nodes
    al = args.order

    I = build_left_rlfi(g, al)
    D = build_left_rlfd(g, al)

    print(f"grid: [0,1] with {args.n_cells} cells, order {al}")
    print()

    # integral of a constant: x^al / Gamma(1+al)
    got = I.apply(np.ones(g.n_nodes))
    exact = x**al / gamma(1.0 + al)
    print(f"I^{al} 1        max error {np.max(np.abs(got - exact)):.3e}")

    # integral of x: x^(1+al) / Gamma(2+al)
    got = I.apply(x.copy())
    exact = x ** (1.0 + al) / gamma(2.0 + al) * gamma(2.0)
    print(f"I^{al} x        max error {np.max(np.abs(got - exact)):.3e}")

    # derivative of x^al: Gamma(1+al), a constant
    got = D.apply(x**al)
    exact = gamma(1.0 + al)
    sl = g.interior()
    print(f"D^{al} x^{al}    interior rel error "
          f"{np.max(np.abs(got[sl] - exact)) / exact:.3e}")

    # derivative of a constant blows up like x^(-al) near the left end
    got = D.apply(np.ones(g.n_nodes))
    exact = x[1:] ** (-al) / gamma(1.0 - al)
    rel = np.abs(got[1:] - exact) / exact
    print(f"D^{al} 1        rel error away from 0: {np.max(rel[len(rel) // 16:]):.3e}")
    print(f"                value at first node grows like h^-{al}: {got[1]:.4f}")

    # right operators: mirror and adjoint agree in the interior
    adj_op = build_right_adjoint(I)
    direct = build_right_rlfi(g, al).apply(np.ones(g.n_nodes))
    adj = adj_op.apply(np.ones(g.n_nodes))
    print()
    print(f"right I^{al} 1  mirror vs adjoint interior gap "
          f"{np.max(np.abs(direct - adj)[sl]):.3e}")

    # discrete integration by parts holds to round-off
    rng = np.random.default_rng(1)
    f = rng.standard_normal(g.n_nodes)
    h = rng.standard_normal(g.n_nodes)
    w = g.quad_weights
    lhs = float(w @ (I.apply(f) * h))
    rhs = float(w @ (f * adj_op.apply(h)))
    print(f"<I f, g> vs <f, I* g>: {abs(lhs - rhs):.3e}  (random f, g)")


if __name__ == "__main__":
    main()
