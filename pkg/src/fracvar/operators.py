"""Discrete Riemann-Liouville operators on uniform grids.

Four operator kinds at a fixed order in (0, 1):

* left RLFI   (I^a f)(x) = (1/Gamma(a)) int_a^x (x-t)^(a-1) f(t) dt
  discretized by the product-trapezoid rule: f is interpolated piecewise
  linearly and the kernel moments are integrated exactly, which makes the
  scheme exact for piecewise-linear f and second-order for C^2 f.
* left RLFD   Grunwald-Letnikov: (D^b f)(x_i) ~ h^-b sum_k w_k f(x_{i-k})
  with w_0 = 1, w_k = w_{k-1} (1 - (b+1)/k).  First order where the RL
  derivative is smooth; reproduces the RL (not Caputo) derivative,
  including the (x-a)^-b blow-up when f(a) != 0.
* right operators, adjoint built: R = W^-1 L^T W with W = diag(trapezoid
  weights), so the discrete integration-by-parts identity
  <g, L f>_w = <f, R g>_w holds to machine precision by construction.
* right operators, direct: mirror of the left scheme (reverse, apply,
  reverse).  Pointwise accurate everywhere but does not satisfy discrete
  integration by parts exactly; kept as a cross-check.

Operators are immutable; applying one is a pure function.  Endpoint rows
of derivative-kind operators are reported but unreliable, and the first
row of an adjoint-built right operator carries an O(h^order) defect from
the halved endpoint quadrature weight; accuracy claims hold on interior
nodes (see Grid.interior).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .grids import Grid, SampledFn
from .special import gamma

__all__ = [
    "FracOrder",
    "OperatorKind",
    "FracOperator",
    "build_left_rlfi",
    "build_left_rlfd",
    "build_right_adjoint",
    "build_right_rlfi",
    "build_right_rlfd",
]


@dataclass(frozen=True)
class FracOrder:
    """Fractional order restricted to the open interval (0, 1)."""

    value: float

    def __post_init__(self) -> None:
        v = float(self.value)
        if not np.isfinite(v) or not 0.0 < v < 1.0:
            raise ValueError(f"fractional order must lie in (0, 1), got {self.value!r}")
        object.__setattr__(self, "value", v)


class OperatorKind(enum.Enum):
    LEFT_RLFI = "left-rlfi"
    RIGHT_RLFI = "right-rlfi"
    LEFT_RLFD = "left-rlfd"
    RIGHT_RLFD = "right-rlfd"

    @property
    def is_left(self) -> bool:
        return self in (OperatorKind.LEFT_RLFI, OperatorKind.LEFT_RLFD)


_ADJOINT_KIND = {
    OperatorKind.LEFT_RLFI: OperatorKind.RIGHT_RLFI,
    OperatorKind.LEFT_RLFD: OperatorKind.RIGHT_RLFD,
}


@dataclass(frozen=True)
class FracOperator:
    """A dense triangular coefficient table realizing one RL operator.

    coeffs[i, j] is the weight of sample f(x_j) in the output at x_i;
    left kinds are lower triangular, right kinds upper triangular.
    """

    kind: OperatorKind
    order: FracOrder
    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        c = np.asarray(self.coeffs, dtype=float)
        n = self.grid.n_cells + 1
        if c.shape != (n, n):
            raise ValueError(f"coefficient table must be {n}x{n}, got {c.shape}")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def apply(self, f: SampledFn | np.ndarray) -> SampledFn | np.ndarray:
        """Apply the operator to node samples.

        SampledFn in, SampledFn out (grids must match); a bare array of
        node values returns a bare array.
        """
        if isinstance(f, SampledFn):
            if f.grid != self.grid:
                raise ValueError("sample grid does not match operator grid")
            return SampledFn(self.grid, self.coeffs @ f.values)
        vals = np.asarray(f, dtype=float)
        if vals.shape != (self.grid.n_cells + 1,):
            raise ValueError(
                f"expected {self.grid.n_cells + 1} samples, got shape {vals.shape}"
            )
        return self.coeffs @ vals


def build_left_rlfi(grid: Grid, order: FracOrder | float) -> FracOperator:
    """Left Riemann-Liouville fractional integral, product-trapezoid rule.

    Row 0 is identically zero (integral over an empty interval).
    """
    order = _as_order(order)
    a = order.value
    n = grid.n_cells
    p = a + 1.0
    kappa = grid.h**a / gamma(a + 2.0)

    idx = np.arange(n + 1)
    d = idx[:, None] - idx[None, :]
    # interior band: second difference of m**(a+1) at lag m = i - j >= 1
    m = np.maximum(d, 1).astype(float)
    table = np.where(d >= 1, (m + 1.0) ** p - 2.0 * m**p + (m - 1.0) ** p, 0.0)
    np.fill_diagonal(table, 1.0)
    # boundary column j = 0 absorbs the non-Toeplitz endpoint correction
    i_f = idx.astype(float)
    im1 = np.maximum(i_f - 1.0, 0.0)
    col0 = im1**p - i_f**a * (i_f - a - 1.0)
    table[1:, 0] = col0[1:]
    table[0, :] = 0.0
    return FracOperator(OperatorKind.LEFT_RLFI, order, grid, kappa * table)


def build_left_rlfd(grid: Grid, order: FracOrder | float) -> FracOperator:
    """Left Riemann-Liouville fractional derivative, Grunwald-Letnikov."""
    order = _as_order(order)
    b = order.value
    n = grid.n_cells
    k = np.arange(1, n + 1)
    w = np.concatenate(([1.0], np.cumprod(1.0 - (b + 1.0) / k)))
    idx = np.arange(n + 1)
    d = idx[:, None] - idx[None, :]
    table = np.where(d >= 0, w[np.clip(d, 0, n)], 0.0)
    return FracOperator(OperatorKind.LEFT_RLFD, order, grid, grid.h ** (-b) * table)


def build_right_adjoint(op: FracOperator) -> FracOperator:
    """Right operator as the quadrature adjoint of a left one.

    R = W^-1 L^T W, the unique table satisfying the discrete
    integration-by-parts identity sum_i w_i g_i (Lf)_i = sum_i w_i f_i (Rg)_i
    exactly for all f, g.
    """
    if not op.kind.is_left:
        raise ValueError(f"adjoint construction expects a left operator, got {op.kind}")
    w = op.grid.quad_weights
    coeffs = (op.coeffs.T * w[None, :]) / w[:, None]
    return FracOperator(_ADJOINT_KIND[op.kind], op.order, op.grid, coeffs)


def build_right_rlfi(grid: Grid, order: FracOrder | float) -> FracOperator:
    """Right RLFI by direct mirroring of the left scheme (cross-check only)."""
    left = build_left_rlfi(grid, order)
    return FracOperator(
        OperatorKind.RIGHT_RLFI, left.order, grid, left.coeffs[::-1, ::-1]
    )


def build_right_rlfd(grid: Grid, order: FracOrder | float) -> FracOperator:
    """Right RLFD by direct mirroring of the left scheme (cross-check only)."""
    left = build_left_rlfd(grid, order)
    return FracOperator(
        OperatorKind.RIGHT_RLFD, left.order, grid, left.coeffs[::-1, ::-1]
    )


def _as_order(order: FracOrder | float) -> FracOrder:
    return order if isinstance(order, FracOrder) else FracOrder(order)
