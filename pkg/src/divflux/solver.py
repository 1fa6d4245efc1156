"""Split-gradient solvers for non-negative and sum-constrained inversion.

The model is q = H x with H entrywise non-negative, and the objective is a
divergence D(y || H x), optionally composed with an invariance factor. The
descent direction is always of the form x * f(x) * (-grad D), which keeps
zero components at zero and turns into the classical multiplicative updates
when f = 1/V for a split -grad D = U - V with U, V >= 0.

Sum constraints are handled two ways: through the normalized variable
change x -> x C / sum(x), whose directions have exactly zero sum, or by
minimizing a scale-invariant divergence, whose gradient satisfies
sum_l x_l dJ/dx_l = 0 on its own.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .catalog import DivergenceSpec, evaluate, get_entry, gradient_q
from .convex import as_field
from .errors import (ConstraintError, DecompositionError, DomainError,
                     InvariantError, ParamError, ShapeError, StallError)
from .invariance import InvariantDivergence, fundamental_residual

__all__ = [
    "LinearModelProblem",
    "SolverConfig",
    "SolveResult",
    "KKTReport",
    "max_step",
    "at_float_floor",
    "armijo_search",
    "sgm_step",
    "multiplicative_step",
    "accelerated_direction",
    "solve_nonneg",
    "solve_sum_constrained",
    "solve_invariant",
    "FunctionObjective",
    "composite_objective",
    "laplacian_operator",
    "penalty_laplacian_invariant",
    "make_laplacian_penalty",
    "kkt_report",
    "write_trace_header",
    "write_trace_row",
]

STEP_CAP = 1e6


def _div_value(div, p, q) -> float:
    if isinstance(div, InvariantDivergence):
        return div.value(p, q)
    return evaluate(div, p, q)


def _div_grad(div, p, q) -> np.ndarray:
    if isinstance(div, InvariantDivergence):
        return div.gradient_q(p, q)
    return gradient_q(div, p, q)


@dataclass(frozen=True)
class LinearModelProblem:
    """Measurements y, non-negative operator H, divergence, start point."""

    y: np.ndarray
    H: np.ndarray
    divergence: object  # DivergenceSpec or InvariantDivergence
    x0: np.ndarray
    column_normalized: bool = False

    def __post_init__(self):
        H = np.asarray(self.H, dtype=float)
        if H.ndim != 2:
            raise ShapeError("H must be a 2-D matrix")
        if np.any(H < 0.0):
            raise DomainError("H must be entrywise non-negative")
        if not np.all(H.max(axis=1) > 0.0):
            raise DomainError("every row of H needs a positive entry")
        if self.column_normalized:
            sums = H.sum(axis=0)
            if np.any(np.abs(sums - 1.0) > 1e-12):
                raise ConstraintError("columns are not normalized to unit sum")
        y = as_field(self.y, strict=False, name="y")
        x0 = as_field(self.x0, strict=True, name="x0")
        if y.size != H.shape[0] or x0.size != H.shape[1]:
            raise ShapeError("y/H/x0 dimensions disagree")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x0", x0)

    def model(self, x) -> np.ndarray:
        return self.H @ np.asarray(x, dtype=float)

    def objective(self, x) -> float:
        return _div_value(self.divergence, self.y, self.model(x))

    def gradient(self, x) -> np.ndarray:
        return self.H.T @ _div_grad(self.divergence, self.y, self.model(x))

    def neg_gradient_split(self, x, eps: float | None = None):
        """-grad as U - V with U, V >= 0: natural per-point split when the
        family ships one, otherwise the shift rule on the raw gradient."""
        div = self.divergence
        if isinstance(div, DivergenceSpec):
            entry = get_entry(div.family)
            if entry.uv is not None:
                u, v = entry.uv(div.params_dict, self.y, self.model(x))
                return self.H.T @ u, self.H.T @ v
        g = self.gradient(x)
        neg = -g
        scale = float(np.max(np.abs(g)))
        if eps is None:
            eps = 1e-12 * scale if scale > 0.0 else 1e-12
        shift = min(0.0, float(np.min(neg)))
        return neg - shift + eps, np.full_like(neg, eps - shift)


@dataclass
class SolverConfig:
    max_iters: int = 5000
    objective_tol: float = 1e-9
    step_policy: str = "line_search"
    c1: float = 1e-4
    rho: float = 0.5
    shift_epsilon: float | None = None
    sum_target: float | None = None
    acceleration_exponent: int = 1
    step_cap: float = STEP_CAP

    def __post_init__(self):
        if self.step_policy not in ("line_search", "fixed"):
            raise ParamError(f"unknown step policy {self.step_policy!r}")
        if not (0.0 < self.c1 < 1.0):
            raise ParamError("c1 must lie in (0, 1)")
        if not (0.0 < self.rho < 1.0):
            raise ParamError("rho must lie in (0, 1)")
        if self.shift_epsilon is not None and self.shift_epsilon <= 0.0:
            raise ParamError("shift_epsilon must be positive")
        n = self.acceleration_exponent
        if int(n) != n or n < 1:
            raise ParamError("acceleration_exponent must be an integer >= 1")


@dataclass(frozen=True)
class SolveResult:
    x: np.ndarray
    objective: float
    objectives: tuple
    iterations: int
    converged: bool


@dataclass(frozen=True)
class KKTReport:
    satisfied: bool
    worst_interior: float
    worst_boundary: float
    scale: float


def kkt_report(x, grad, x_tol: float = 1e-8, grad_tol: float = 1e-6) -> KKTReport:
    """Componentwise first-order conditions under non-negativity.

    Interior components need a vanishing gradient relative to the gradient
    sup-norm; components pinned at zero only need a non-negative one.
    """
    x = np.asarray(x, dtype=float)
    g = np.asarray(grad, dtype=float)
    scale = max(float(np.max(np.abs(g))), 1e-300)
    interior = x > x_tol
    worst_int = float(np.max(np.abs(g[interior]) / scale)) if interior.any() else 0.0
    worst_bnd = float(np.min(g[~interior])) if (~interior).any() else 0.0
    ok = worst_int <= grad_tol and worst_bnd >= -grad_tol
    if scale <= grad_tol:
        ok = True  # the whole gradient is below the absolute tolerance
    return KKTReport(ok, worst_int, worst_bnd, scale)


# ---------------------------------------------------------------------------
# steps
# ---------------------------------------------------------------------------

def max_step(x, direction, cap: float = STEP_CAP) -> float:
    """Largest step keeping x + a*direction non-negative, capped."""
    x = np.asarray(x, dtype=float)
    d = np.asarray(direction, dtype=float)
    if x.shape != d.shape:
        raise ShapeError("x and direction must have matching shapes")
    neg = d < 0.0
    if not neg.any():
        return cap
    return min(cap, float(np.min(x[neg] / -d[neg])))


_EPS = float(np.finfo(float).eps)


def at_float_floor(f0: float, slope: float, alpha_max: float) -> bool:
    """True when a line search could only chase rounding noise.

    The achievable decrease is capped both by the first-order prediction
    -slope*alpha_max and by the objective value itself (it cannot go below
    zero); when the smaller of the two is within a few ulps of f0 the iterate
    is converged at float resolution and must be left alone, else a noise-fed
    backtracking loop ends in a spurious StallError.
    """
    limit = 64.0 * _EPS * (1.0 + abs(f0))
    return min(abs(f0), -slope * alpha_max) <= limit


def armijo_search(objective: Callable, x, direction, alpha_max: float,
                  config: SolverConfig, *, slope: float) -> float:
    """Backtracking search for sufficient decrease from alpha_max down."""
    if not (slope < 0.0):
        raise ParamError("direction is not a descent direction")
    x = np.asarray(x, dtype=float)
    d = np.asarray(direction, dtype=float)
    f0 = objective(x)
    alpha = alpha_max
    for _ in range(60):
        if objective(x + alpha * d) <= f0 + config.c1 * alpha * slope:
            return alpha
        alpha *= config.rho
    raise StallError("no acceptable step after 60 backtracks")


def _step_once(problem: LinearModelProblem, x, config: SolverConfig):
    u, v = problem.neg_gradient_split(x, config.shift_epsilon)
    if np.any(v <= 0.0):
        raise DecompositionError("split denominator has a nonpositive entry")
    d = x * accelerated_direction(u, v, config.acceleration_exponent)
    if not np.any(d):
        return x.copy(), 0.0
    slope = float(np.sum((v - u) * d))
    if config.step_policy == "fixed":
        return x + d, 1.0  # a = 1: the purely multiplicative update
    alpha_max = 0.99 * max_step(x, d, config.step_cap)
    if alpha_max <= 0.0:
        raise StallError("no positive step is available")
    alpha = armijo_search(problem.objective, x, d, alpha_max, config, slope=slope)
    return x + alpha * d, alpha


def sgm_step(problem: LinearModelProblem, x_k, config: SolverConfig) -> np.ndarray:
    """One split-gradient step x + a x (U/V - 1) with safeguarded a."""
    return _step_once(problem, np.asarray(x_k, dtype=float), config)[0]


def multiplicative_step(problem: LinearModelProblem, x_k, U, V,
                        step: float = 1.0) -> np.ndarray:
    """x * (U/V) at unit step; the split must reproduce -grad exactly."""
    x = np.asarray(x_k, dtype=float)
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    if np.any(V == 0.0):
        raise DecompositionError("split denominator has a zero entry")
    g = problem.gradient(x)
    mismatch = float(np.max(np.abs((U - V) - (-g))))
    if mismatch > 1e-10 * max(1.0, float(np.max(np.abs(g)))):
        raise DecompositionError(f"U - V deviates from -grad by {mismatch:g}")
    return x * (1.0 + step * (U / V - 1.0))


def accelerated_direction(U, V, n: int) -> np.ndarray:
    """Per-component factor (U/V)^n - 1; multiply by x for the direction."""
    if int(n) != n or n < 1:
        raise ParamError("exponent must be an integer >= 1")
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    if np.any(V == 0.0):
        raise DecompositionError("split denominator has a zero entry")
    return (U / V) ** n - 1.0


# ---------------------------------------------------------------------------
# trace output
# ---------------------------------------------------------------------------

def write_trace_header(stream) -> None:
    if stream is not None:
        stream.write("# k obj step res_sum res_nonneg\n")


def write_trace_row(stream, k: int, obj: float, step: float,
                    res_sum: float, res_nonneg: float) -> None:
    if stream is not None:
        stream.write(f"{k} {obj!r} {step!r} {res_sum!r} {res_nonneg!r}\n")


def _residuals(x, target: float | None):
    rs = abs(float(np.sum(x)) - target) if target is not None else 0.0
    rn = max(0.0, -float(np.min(x)))
    return rs, rn


# ---------------------------------------------------------------------------
# drivers
# ---------------------------------------------------------------------------

def _run_loop(problem, config, trace, stepper, sum_target=None) -> SolveResult:
    x = problem.x0.copy()
    obj = problem.objective(x)
    objs = [obj]
    write_trace_header(trace)
    rs, rn = _residuals(x, sum_target)
    write_trace_row(trace, 0, obj, 0.0, rs, rn)
    converged = False
    iters = 0
    for k in range(1, config.max_iters + 1):
        x_new, alpha = stepper(x)
        new_obj = problem.objective(x_new)
        rs, rn = _residuals(x_new, sum_target)
        write_trace_row(trace, k, new_obj, alpha, rs, rn)
        objs.append(new_obj)
        x, prev, obj = x_new, obj, new_obj
        iters = k
        if abs(prev - new_obj) <= config.objective_tol * max(1.0, abs(prev)):
            converged = True
            break
    return SolveResult(x, obj, tuple(objs), iters, converged)


def solve_nonneg(problem: LinearModelProblem, config: SolverConfig | None = None,
                 trace=None) -> SolveResult:
    """Minimize D(y || Hx) over x >= 0 by split-gradient iterations."""
    config = config or SolverConfig()
    if config.step_policy == "fixed":
        warnings.warn("fixed-step multiplicative mode: nothing guarantees "
                      "a monotone objective", RuntimeWarning, stacklevel=2)
    return _run_loop(problem, config, trace,
                     lambda x: _step_once(problem, x, config))


def solve_sum_constrained(problem: LinearModelProblem,
                          config: SolverConfig | None = None,
                          trace=None) -> SolveResult:
    """Minimize under sum(x) = C via the normalized variable change.

    The direction x (C (-grad) - sum(x (-grad))) has exactly zero sum, and
    every iterate is renormalized through the change of variables, so the
    constraint holds to rounding error at each iteration.
    """
    config = config or SolverConfig()
    if config.sum_target is None:
        raise ParamError("solve_sum_constrained needs config.sum_target")
    target = float(config.sum_target)
    if abs(float(np.sum(problem.x0)) - target) > 1e-12 * max(1.0, target):
        raise ConstraintError("x0 does not satisfy the sum constraint")

    def stepper(x):
        g = problem.gradient(x)
        neg = -g
        d = x * (target * neg - float(np.sum(x * neg)))
        if not np.any(d):
            return x.copy(), 0.0
        slope = float(np.sum(g * d))
        if slope >= 0.0:
            return x.copy(), 0.0

        def along(z):
            # renormalize inside the search so the accepted point is feasible
            return problem.objective(z * (target / float(np.sum(z))))

        alpha_max = 0.99 * max_step(x, d, config.step_cap)
        if alpha_max <= 0.0:
            raise StallError("no positive step is available")
        alpha = armijo_search(along, x, d, alpha_max, config, slope=slope)
        z = x + alpha * d
        return z * (target / float(np.sum(z))), alpha

    return _run_loop(problem, config, trace, stepper, sum_target=target)


def solve_invariant(problem: LinearModelProblem,
                    config: SolverConfig | None = None,
                    trace=None) -> SolveResult:
    """Sum-conserving minimization of a scale-invariant divergence.

    No variable change: the weighted-gradient identity sum q_j dD/dq_j = 0
    makes the plain direction x(-grad) zero-sum by itself. Iterates are
    renormalized afterwards, which cannot change the objective.
    """
    config = config or SolverConfig()
    q0 = problem.model(problem.x0)
    g0 = _div_grad(problem.divergence, problem.y, q0)
    res = abs(float(np.sum(q0 * g0)))
    scale = float(np.linalg.norm(g0) * np.linalg.norm(q0))
    if res > 1e-8 * max(1.0, scale):
        raise InvariantError(
            f"divergence is not scale-invariant (weighted-gradient sum {res:g})")
    if isinstance(problem.divergence, InvariantDivergence):
        res2 = fundamental_residual(problem.divergence, problem.y, q0)
        if res2 > 1e-8 * max(1.0, scale):
            raise InvariantError("invariant divergence fails its own identity")
    target = float(np.sum(problem.x0))

    def stepper(x):
        g = problem.gradient(x)
        d = -x * g
        if not np.any(d):
            return x.copy(), 0.0
        slope = float(np.sum(g * d))
        if slope >= 0.0:
            return x.copy(), 0.0

        def along(z):
            return problem.objective(z * (target / float(np.sum(z))))

        alpha_max = 0.99 * max_step(x, d, config.step_cap)
        if alpha_max <= 0.0:
            raise StallError("no positive step is available")
        alpha = armijo_search(along, x, d, alpha_max, config, slope=slope)
        z = x + alpha * d
        return z * (target / float(np.sum(z))), alpha

    return _run_loop(problem, config, trace, stepper, sum_target=target)


# ---------------------------------------------------------------------------
# composite objectives and smoothness penalties
# ---------------------------------------------------------------------------

class FunctionObjective:
    """Value/gradient pair over one variable vector."""

    def __init__(self, value: Callable, gradient: Callable):
        self._value = value
        self._gradient = gradient

    def value(self, x) -> float:
        return float(self._value(np.asarray(x, dtype=float)))

    def gradient(self, x) -> np.ndarray:
        return np.asarray(self._gradient(np.asarray(x, dtype=float)), dtype=float)


def composite_objective(data_term: FunctionObjective,
                        penalty_term: FunctionObjective,
                        gamma: float) -> FunctionObjective:
    """Data term plus gamma times penalty, with the summed gradient."""
    if gamma < 0.0:
        raise ParamError("gamma must be non-negative")
    return FunctionObjective(
        lambda x: data_term.value(x) + gamma * penalty_term.value(x),
        lambda x: data_term.gradient(x) + gamma * penalty_term.gradient(x))


def laplacian_operator(shape) -> np.ndarray:
    """Neighbor-averaging matrix T: mask (1/2, 0, 1/2) in 1-D, the 1/4
    4-neighbor mask in 2-D, with edge samples reflected onto themselves so
    every column sums to one and T stays symmetric."""
    if np.isscalar(shape):
        n = int(shape)
        if n < 3:
            raise ShapeError("need at least 3 points per axis")
        T = np.zeros((n, n))
        for i in range(n):
            for j in (i - 1, i + 1):
                T[i, min(max(j, 0), n - 1)] += 0.5
        return T
    rows, cols = (int(v) for v in shape)
    if rows < 3 or cols < 3:
        raise ShapeError("need at least 3 points per axis")
    N = rows * cols
    T = np.zeros((N, N))
    for u in range(rows):
        for v in range(cols):
            i = u * cols + v
            for du, dv in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                uu = min(max(u + du, 0), rows - 1)
                vv = min(max(v + dv, 0), cols - 1)
                T[i, uu * cols + vv] += 0.25
    return T


def _kl_grad_p(p, q):
    return np.log(p / q)


def _eqm_grad_p(p, q):
    return 2.0 * (p - q)


def _neyman_grad_p(p, q):
    return 2.0 * (p - q) / q


def _pearson_grad_p(p, q):
    return 1.0 - (q / p) ** 2


_NORMALIZED_KINDS = {
    "eqmI": (DivergenceSpec("eqm"), _eqm_grad_p),
    "klI": (DivergenceSpec("kl"), _kl_grad_p),
    "chi2NI": (DivergenceSpec("neyman_chi2"), _neyman_grad_p),
    "chi2PI": (DivergenceSpec("pearson_chi2"), _pearson_grad_p),
}


def penalty_laplacian_invariant(kind: str, x, param: float | None = None,
                                operator: np.ndarray | None = None):
    """Smoothness penalty D_I(x || Tx) with a flux-compatible gradient.

    Returns (value, gradient). The log kinds evaluate their two-sided
    invariant forms directly; the others evaluate the plain divergence on
    sum-normalized fields, which is scale-free in x by construction. Either
    way sum_l x_l grad_l = 0 identically.
    """
    xa = as_field(x, strict=True, name="x")
    T = laplacian_operator(xa.size) if operator is None else operator
    tx = T @ xa

    if kind in ("LAI", "LBI"):
        if param is None:
            raise ParamError(f"{kind} needs its order parameter")
        lam = float(param)
        from .invariance import NOMINAL, log_form, make_invariant
        fam = "alpha" if kind == "LAI" else "beta"
        div = log_form(make_invariant(
            DivergenceSpec(fam, {"lambda": lam}), NOMINAL))
        value = div.value(xa, tx)
        gq = div.gradient_q(xa, tx)
        if kind == "LAI":
            s = float(np.sum(xa ** lam * tx ** (1.0 - lam)))
            gp = (xa ** (lam - 1.0) * tx ** (1.0 - lam) / s
                  - 1.0 / float(np.sum(xa))) / (lam - 1.0)
        else:
            gp = (xa ** (lam - 1.0) / float(np.sum(xa ** lam))
                  - tx ** (lam - 1.0) / float(np.sum(xa * tx ** (lam - 1.0)))
                  ) / (lam - 1.0)
        return value, gp + T.T @ gq

    if kind not in _NORMALIZED_KINDS:
        raise ParamError(f"unknown penalty kind {kind!r}")
    spec, grad_p = _NORMALIZED_KINDS[kind]
    s = float(np.sum(xa))
    pb, qb = xa / s, tx / s
    value = evaluate(spec, pb, qb)
    gp = grad_p(pb, qb)
    gq = gradient_q(spec, pb, qb)
    grad = (gp - float(np.sum(pb * gp))
            + T.T @ gq - float(np.sum(qb * gq))) / s
    return value, grad


def make_laplacian_penalty(kind: str, param: float | None = None,
                           operator: np.ndarray | None = None) -> FunctionObjective:
    return FunctionObjective(
        lambda x: penalty_laplacian_invariant(kind, x, param, operator)[0],
        lambda x: penalty_laplacian_invariant(kind, x, param, operator)[1])
