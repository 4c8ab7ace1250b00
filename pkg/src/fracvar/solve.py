"""Direct minimization of discretized fractional functionals.

Plain gradient descent with Armijo backtracking on the free node values;
pinned endpoint values never move.  The isoperimetric mode wraps the same
descent in a secant iteration on the multiplier.

The channel maps are linear, so each line search evaluates trial points by
shifting precomputed channel images of the descent direction; no operator
products happen inside the backtracking loop.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .grids import Grid, SampledFn
from .problems import (
    DiscreteProblem,
    VarProblem,
    assemble,
    augmented_lagrangian,
    _normalize_samples,
)

__all__ = ["SolveConfig", "SolveReport", "gradient", "minimize", "solve_isoperimetric"]

# outer secant iteration budget and stagnation window for the multiplier search
_MAX_OUTER = 50
_STAGNATION_WINDOW = 5


@dataclass(frozen=True)
class SolveConfig:
    """Descent and multiplier-search parameters."""

    max_iters: int = 5000
    grad_tol: float = 1e-8
    step_init: float = 1.0
    armijo_c: float = 1e-4
    armijo_shrink: float = 0.5
    multiplier_tol: float = 1e-3

    def __post_init__(self) -> None:
        if int(self.max_iters) < 1:
            raise ValueError(f"max_iters must be positive, got {self.max_iters}")
        object.__setattr__(self, "max_iters", int(self.max_iters))
        for name in ("grad_tol", "step_init", "multiplier_tol"):
            val = float(getattr(self, name))
            if not val > 0:
                raise ValueError(f"{name} must be positive, got {val}")
            object.__setattr__(self, name, val)
        for name in ("armijo_c", "armijo_shrink"):
            val = float(getattr(self, name))
            if not 0 < val < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {val}")
            object.__setattr__(self, name, val)


@dataclass(frozen=True)
class SolveReport:
    """Outcome of a solve.

    y is a SampledFn for a single unknown and a tuple of SampledFn otherwise.
    residual_norm is the weighted Euler-Lagrange residual norm over free
    (unpinned) nodes; for constrained solves it refers to the multiplier-
    augmented problem.  history holds one (J, grad_norm) row per visited
    iterate, final point included.
    """

    y: SampledFn | tuple[SampledFn, ...]
    J: float
    residual_norm: float
    lam: float | None
    constraint_gap: float | None
    iters: int
    converged: bool
    history: np.ndarray

    def __post_init__(self) -> None:
        h = np.asarray(self.history, dtype=float).reshape(-1, 2).copy()
        h.setflags(write=False)
        object.__setattr__(self, "history", h)


def _pack_y(grid: Grid, Y: np.ndarray):
    fns = tuple(SampledFn(grid, row) for row in Y)
    return fns[0] if len(fns) == 1 else fns


def _default_y0(problem: VarProblem, grid: Grid) -> np.ndarray:
    """Zero samples bent linearly through whatever endpoints are pinned."""
    K = problem.n_unknowns
    x = grid.nodes
    Y = np.zeros((K, grid.n_nodes))
    for k, (left, right) in enumerate(problem.pins):
        lo = 0.0 if left is None else left
        hi = 0.0 if right is None else right
        if left is not None or right is not None:
            Y[k] = lo + (hi - lo) * (x - grid.a) / (grid.b - grid.a)
    return Y


def _free_mask(problem: VarProblem, grid: Grid) -> np.ndarray:
    mask = np.ones((problem.n_unknowns, grid.n_nodes), dtype=bool)
    for k, (left, right) in enumerate(problem.pins):
        if left is not None:
            mask[k, 0] = False
        if right is not None:
            mask[k, -1] = False
    return mask


def _apply_pins(problem: VarProblem, Y: np.ndarray) -> np.ndarray:
    Y = Y.copy()
    for k, (left, right) in enumerate(problem.pins):
        if left is not None:
            Y[k, 0] = left
        if right is not None:
            Y[k, -1] = right
    return Y


def _free_residual_norm(dp: DiscreteProblem, r: np.ndarray, mask: np.ndarray) -> float:
    w = dp.grid.quad_weights
    return float(np.sqrt(np.sum(w * r * r * mask)))


def gradient(problem: VarProblem, y, grid: Grid) -> np.ndarray:
    """Exact gradient of the discrete functional with respect to node values.

    Equals quad_weights * el_residual values componentwise.  Returns a flat
    vector for one unknown, one row per unknown otherwise.
    """
    dp = assemble(problem, grid)
    g = dp.gradient(_normalize_samples(problem, grid, y))
    return g[0] if problem.n_unknowns == 1 else g


def _descend(
    dp: DiscreteProblem,
    cfg: SolveConfig,
    Y: np.ndarray,
    mask: np.ndarray,
) -> tuple[np.ndarray, float, float, int, bool, list]:
    """Armijo gradient descent; returns (Y, J, residual_norm, iters, converged, history)."""
    problem = dp.problem
    u, v = dp.channels(Y)
    J = dp.functional_value(problem.lagrangian, u, v)
    history = []
    step = cfg.step_init
    iters = 0
    converged = False
    norm = np.inf
    for _ in range(cfg.max_iters + 1):
        r = dp._residual_from(u, v)
        g = dp.grid.quad_weights * r * mask
        if not np.isfinite(J) or not np.all(np.isfinite(g)):
            raise ArithmeticError(
                f"non-finite functional value or gradient at iteration {iters}"
            )
        norm = _free_residual_norm(dp, r * mask, mask)
        history.append((J, norm))
        if norm <= cfg.grad_tol:
            converged = True
            break
        if iters >= cfg.max_iters:
            break
        d = -g
        du, dv = dp.channels(d)
        slope = -float(np.sum(g * g))  # <g, d> with d = -g
        t = 2.0 * step  # optimistic warm start from the last accepted step
        while True:
            trial_u = [a + t * b for a, b in zip(u, du)]
            trial_v = [a + t * b for a, b in zip(v, dv)]
            J_t = dp.functional_value(problem.lagrangian, trial_u, trial_v)
            if np.isfinite(J_t) and J_t <= J + cfg.armijo_c * t * slope:
                break
            t *= cfg.armijo_shrink
            if t < 1e-18:
                break
        if t < 1e-18:
            # no admissible step; numerically stuck
            break
        Y = Y + t * d
        u, v = trial_u, trial_v
        J = J_t
        step = t
        iters += 1
    return Y, J, norm, iters, converged, history


def minimize(
    problem: VarProblem,
    grid: Grid,
    cfg: SolveConfig | None = None,
    y0=None,
) -> SolveReport:
    """Gradient descent with Armijo backtracking on the free node values.

    Pinned entries of y0 are overwritten with the pin values; the default
    start interpolates linearly through the pins (zero at unpinned ends).
    Hitting max_iters sets converged=False without raising.
    """
    if problem.constraint is not None:
        raise ValueError("minimize handles unconstrained problems; "
                         "use solve_isoperimetric when a constraint is present")
    cfg = cfg or SolveConfig()
    dp = assemble(problem, grid)
    if y0 is None:
        Y = _default_y0(problem, grid)
    else:
        Y = _normalize_samples(problem, grid, y0)
    Y = _apply_pins(problem, Y)
    mask = _free_mask(problem, grid)
    Y, J, norm, iters, converged, history = _descend(dp, cfg, Y, mask)
    return SolveReport(
        y=_pack_y(grid, Y),
        J=J,
        residual_norm=norm,
        lam=None,
        constraint_gap=None,
        iters=iters,
        converged=converged,
        history=np.array(history),
    )


def solve_isoperimetric(
    problem: VarProblem,
    grid: Grid,
    cfg: SolveConfig | None = None,
    y0=None,
) -> SolveReport:
    """Secant iteration on the multiplier around inner unconstrained solves.

    phi(lam) is the constraint gap of the minimizer of J + lam*constraint;
    the secant starts from lam = 0 and lam = 1 and each inner solve warm
    starts at the previous minimizer.  A numerically zero constraint
    gradient at the start, or a stalled |phi|, signals the degenerate case
    in which the candidate may be an extremal of the constraint functional
    itself; that is reported with a warning, not solved.
    """
    if problem.constraint is None:
        raise ValueError("solve_isoperimetric requires a problem with a constraint")
    cfg = cfg or SolveConfig()
    con = problem.constraint

    if y0 is None:
        Y = _default_y0(problem, grid)
    else:
        Y = _normalize_samples(problem, grid, y0)
    Y = _apply_pins(problem, Y)
    mask = _free_mask(problem, grid)

    base = augmented_lagrangian(problem, 0.0)
    dp0 = assemble(base, grid)

    # degenerate-case screen: gradient of the constraint functional at the start
    con_problem = VarProblem(
        a=problem.a,
        b=problem.b,
        alphas=problem.alphas,
        betas=problem.betas,
        lagrangian=con.g,
        n_unknowns=problem.n_unknowns,
        pins=problem.pins,
    )
    dp_con = assemble(con_problem, grid)
    con_grad_norm = _free_residual_norm(dp_con, dp_con.residual_values(Y) * mask, mask)
    if con_grad_norm <= 1e-10:
        warnings.warn(
            "constraint gradient is numerically zero at the starting point; "
            "the candidate may be an extremal of the constraint functional "
            "(degenerate multiplier case), not solving",
            RuntimeWarning,
            stacklevel=2,
        )
        u, v = dp0.channels(Y)
        gap = dp0.functional_value(con.g, u, v) - con.ell
        return SolveReport(
            y=_pack_y(grid, Y),
            J=dp0.functional_value(problem.lagrangian, u, v),
            residual_norm=_free_residual_norm(dp0, dp0._residual_from(u, v) * mask, mask),
            lam=None,
            constraint_gap=gap,
            iters=0,
            converged=False,
            history=np.empty((0, 2)),
        )

    def inner(lam: float, Y_start: np.ndarray):
        aug = augmented_lagrangian(problem, lam)
        dp = assemble(aug, grid)
        Y_min, J_aug, norm, iters, conv, hist = _descend(dp, cfg, Y_start, mask)
        u, v = dp.channels(Y_min)
        gap = dp.functional_value(con.g, u, v) - con.ell
        J_orig = dp.functional_value(problem.lagrangian, u, v)
        return Y_min, J_orig, norm, iters, conv, hist, gap

    lam_prev, lam_cur = 0.0, 1.0
    Y, J, norm, it0, conv, hist, phi_prev = inner(lam_prev, Y)
    total_iters = it0
    best = (abs(phi_prev), lam_prev, Y, J, norm, conv, hist, phi_prev)
    best_outer = 0
    outer = 0
    abnormal = False
    if abs(phi_prev) > cfg.multiplier_tol:
        while outer < _MAX_OUTER:
            outer += 1
            Y, J, norm, it, conv, hist, phi_cur = inner(lam_cur, Y)
            total_iters += it
            if abs(phi_cur) < best[0]:
                best = (abs(phi_cur), lam_cur, Y, J, norm, conv, hist, phi_cur)
                best_outer = outer
            if abs(phi_cur) <= cfg.multiplier_tol:
                break
            if outer - best_outer >= _STAGNATION_WINDOW:
                # |phi| has not improved for several outer steps
                abnormal = True
                break
            denom = phi_cur - phi_prev
            if denom == 0.0:
                abnormal = True
                break
            lam_next = lam_cur - phi_cur * (lam_cur - lam_prev) / denom
            lam_prev, phi_prev = lam_cur, phi_cur
            lam_cur = lam_next
        else:
            abnormal = True
    else:
        # lam = 0 already satisfies the constraint
        best = (abs(phi_prev), 0.0, Y, J, norm, conv, hist, phi_prev)

    if abnormal:
        warnings.warn(
            "multiplier search stalled: |constraint gap| stopped decreasing; "
            "the minimizer may be an extremal of the constraint functional "
            "(degenerate multiplier case), returning the best iterate found",
            RuntimeWarning,
            stacklevel=2,
        )

    _, lam_best, Y, J, norm, inner_conv, hist, gap = best
    converged = (not abnormal) and inner_conv and abs(gap) <= cfg.multiplier_tol
    return SolveReport(
        y=_pack_y(grid, Y),
        J=J,
        residual_norm=norm,
        lam=lam_best,
        constraint_gap=gap,
        iters=total_iters,
        converged=converged,
        history=np.array(hist),
    )
