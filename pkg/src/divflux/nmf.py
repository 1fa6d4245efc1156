"""Alternating non-negative factorization Y ~ HX under column constraints.

Both factors are updated by split-gradient directions that preserve the
constraint set exactly: H keeps unit column sums through the centered
direction H (g - <H, g>), X keeps its column sums equal to those of Y either
through the analogous variable-change direction (plain divergences) or
through the weighted-gradient identity of scale-invariant divergences, which
makes the raw direction -X grad zero-sum per column on its own.

Penalty gradients with mixed signs are never folded into a multiplicative
denominator one-sidedly; they enter either the line-searched additive
direction or a shifted/split non-negative decomposition.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .catalog import DivergenceSpec, evaluate, get_entry, gradient_q
from .errors import (ConstraintError, DecompositionError, DomainError,
                     ParamError, ShapeError, StallError)
from .invariance import InvariantDivergence, nominal_factor
from .solver import (SolverConfig, armijo_search, at_float_floor,
                     laplacian_operator, max_step)

__all__ = [
    "NmfProblem",
    "NmfState",
    "NmfRunResult",
    "init_state",
    "divergence_value",
    "matrix_grad_q",
    "grad_wrt_X",
    "grad_wrt_H",
    "update_H",
    "update_H_multiplicative",
    "update_X_changevar",
    "per_column_factor",
    "update_X_invariant",
    "hoyer_sparsity",
    "hoyer_target",
    "hoyer_penalty",
    "hoyer_penalty_invariant",
    "tikhonov_H_penalty",
    "penalty_gradient_split",
    "nmf_run",
]

H_PENALTY_KINDS = ("norm_to_constant", "laplacian")
X_PENALTY_KINDS = ("hoyer", "hoyer_invariant")


# ---------------------------------------------------------------------------
# matrix-shaped divergence plumbing
# ---------------------------------------------------------------------------

def _check_shapes(Y, H, X):
    if Y.ndim != 2 or H.ndim != 2 or X.ndim != 2:
        raise ShapeError("Y, H, X must all be 2-D")
    L, C = Y.shape
    if H.shape[0] != L or X.shape[1] != C or H.shape[1] != X.shape[0]:
        raise ShapeError(
            f"shapes do not conform: Y {Y.shape}, H {H.shape}, X {X.shape}")


def divergence_value(divergence, Y, Q) -> float:
    """D(Y || Q) summed over the matrix; invariant divergences apply their
    factor column by column."""
    Y = np.asarray(Y, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if Y.shape != Q.shape:
        raise ShapeError("Y and Q must have matching shapes")
    if isinstance(divergence, InvariantDivergence):
        return float(sum(divergence.value(Y[:, m], Q[:, m])
                         for m in range(Y.shape[1])))
    return evaluate(divergence, Y.ravel(), Q.ravel())


def matrix_grad_q(divergence, Y, Q) -> np.ndarray:
    """Entrywise dD/dQ at Q, same shape as Q."""
    Y = np.asarray(Y, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if Y.shape != Q.shape:
        raise ShapeError("Y and Q must have matching shapes")
    if isinstance(divergence, InvariantDivergence):
        return np.column_stack([divergence.gradient_q(Y[:, m], Q[:, m])
                                for m in range(Y.shape[1])])
    return gradient_q(divergence, Y.ravel(), Q.ravel()).reshape(Y.shape)


def _column_local(divergence) -> bool:
    """True when D(Y||Q) splits into independent per-column terms, so a
    column of X can be updated from its own column of Q alone."""
    if isinstance(divergence, InvariantDivergence):
        return True
    return get_entry(divergence.family).terms is not None


def _value_1d(divergence, y, q) -> float:
    if isinstance(divergence, InvariantDivergence):
        return divergence.value(y, q)
    return evaluate(divergence, y, q)


def _grad_q_1d(divergence, y, q) -> np.ndarray:
    if isinstance(divergence, InvariantDivergence):
        return divergence.gradient_q(y, q)
    return gradient_q(divergence, y, q)


def grad_wrt_X(divergence, Y, H, X) -> np.ndarray:
    Y, H, X = (np.asarray(a, dtype=float) for a in (Y, H, X))
    _check_shapes(Y, H, X)
    return H.T @ matrix_grad_q(divergence, Y, H @ X)


def grad_wrt_H(divergence, Y, H, X) -> np.ndarray:
    Y, H, X = (np.asarray(a, dtype=float) for a in (Y, H, X))
    _check_shapes(Y, H, X)
    return matrix_grad_q(divergence, Y, H @ X) @ X.T


# ---------------------------------------------------------------------------
# problem and state
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NmfProblem:
    """Data matrix, rank, divergence, and the two regularization weights."""

    Y: np.ndarray
    rank: int
    divergence: object  # DivergenceSpec or InvariantDivergence
    gamma: float = 0.0
    h_penalty_kind: str = "norm_to_constant"
    mu: float = 0.0
    x_penalty_kind: str = "hoyer"
    sparsity_target: float = 0.5

    def __post_init__(self):
        Y = np.asarray(self.Y, dtype=float)
        if Y.ndim != 2:
            raise ShapeError("Y must be a 2-D matrix")
        if Y.shape[0] < 1 or Y.shape[1] < 1:
            raise ShapeError("Y needs at least one row and one column")
        bad = np.flatnonzero(Y < 0.0)
        if bad.size:
            raise DomainError("Y must be entrywise non-negative",
                              index=int(bad[0]))
        if int(self.rank) != self.rank or self.rank < 1:
            raise ParamError("rank must be an integer >= 1")
        L, C = Y.shape
        if self.rank >= L * C / (L + C):
            warnings.warn(
                f"rank {self.rank} leaves fewer data than unknowns "
                f"(advisory bound {L * C / (L + C):.2f})", RuntimeWarning,
                stacklevel=2)
        if self.gamma < 0.0 or self.mu < 0.0:
            raise ParamError("regularization weights must be non-negative")
        if self.h_penalty_kind not in H_PENALTY_KINDS:
            raise ParamError(f"unknown H penalty {self.h_penalty_kind!r}")
        if self.x_penalty_kind not in X_PENALTY_KINDS:
            raise ParamError(f"unknown X penalty {self.x_penalty_kind!r}")
        if not (0.0 <= self.sparsity_target <= 1.0):
            raise ParamError("sparsity target must lie in [0, 1]")
        if (self.mu > 0.0 and isinstance(self.divergence, InvariantDivergence)
                and self.x_penalty_kind != "hoyer_invariant"):
            raise ParamError("invariant data term needs the invariant X "
                             "penalty to keep zero-sum directions")
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "rank", int(self.rank))


@dataclass(frozen=True)
class NmfState:
    """Factor pair with the constraints checked on construction."""

    H: np.ndarray
    X: np.ndarray
    k: int
    x_sums: np.ndarray  # target column sums for X, fixed by Y

    def __post_init__(self):
        H = np.asarray(self.H, dtype=float)
        X = np.asarray(self.X, dtype=float)
        t = np.asarray(self.x_sums, dtype=float)
        if H.ndim != 2 or X.ndim != 2 or H.shape[1] != X.shape[0]:
            raise ShapeError("H and X do not conform")
        if np.any(H <= 0.0) or np.any(X <= 0.0):
            raise DomainError("factors must stay strictly positive")
        hd = float(np.max(np.abs(H.sum(axis=0) - 1.0)))
        if hd > 1e-10:
            raise ConstraintError(f"H column sums drifted by {hd:g}")
        xd = float(np.max(np.abs(X.sum(axis=0) - t) / t))
        if xd > 1e-10:
            raise ConstraintError(f"X column sums drifted by {xd:g} relative")
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "x_sums", t)

    def h_drift(self) -> float:
        return float(np.max(np.abs(self.H.sum(axis=0) - 1.0)))

    def x_drift(self) -> float:
        return float(np.max(np.abs(self.X.sum(axis=0) - self.x_sums)
                            / self.x_sums))


def init_state(problem: NmfProblem, seed: int = 0) -> NmfState:
    """Uniform-positive start: H columns sum to 1, X columns to the Y sums."""
    rng = np.random.default_rng(seed)
    L, C = problem.Y.shape
    M = problem.rank
    H = rng.uniform(0.5, 1.5, (L, M))
    H /= H.sum(axis=0)
    X = rng.uniform(0.5, 1.5, (M, C))
    ysums = problem.Y.sum(axis=0)
    if np.any(ysums <= 0.0):
        raise DomainError("every column of Y needs a positive sum")
    X *= ysums / X.sum(axis=0)
    return NmfState(H, X, 0, ysums)


# ---------------------------------------------------------------------------
# H updates
# ---------------------------------------------------------------------------

def _h_penalty(kind: str, H):
    return tikhonov_H_penalty(kind, H)


def update_H(H, X, divergence, Y, config: SolverConfig | None = None,
             gamma: float = 0.0,
             h_penalty_kind: str = "norm_to_constant") -> np.ndarray:
    """One sweep of centered column updates on H.

    The direction H_col (g_hat - <H_col, g_hat>) has exactly zero sum for
    unit-sum columns, so the sum constraint survives any step length; the
    step itself is clipped to the positive cone and line-searched. The fixed
    policy is the unit-step multiplicative sweep instead.
    """
    config = config or SolverConfig()
    if config.step_policy == "fixed":
        return update_H_multiplicative(H, X, divergence, Y,
                                       config.shift_epsilon, gamma,
                                       h_penalty_kind)
    H = np.asarray(H, dtype=float).copy()
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    _check_shapes(Y, H, X)
    for m in range(H.shape[1]):
        A = matrix_grad_q(divergence, Y, H @ X)
        g = (A @ X.T)[:, m]
        if gamma > 0.0:
            g = g + gamma * _h_penalty(h_penalty_kind, H)[1][:, m]
        col = H[:, m]
        neg = -g
        d = col * (neg - float(np.sum(col * neg)))
        if not np.any(d):
            continue
        slope = float(np.sum(g * d))
        if slope >= 0.0:
            continue
        alpha_max = 0.99 * max_step(col, d, config.step_cap)
        if alpha_max <= 0.0:
            raise StallError(f"H column {m}: no positive step")

        def along(c):
            Hm = H.copy()
            Hm[:, m] = c
            val = divergence_value(divergence, Y, Hm @ X)
            if gamma > 0.0:
                val += gamma * _h_penalty(h_penalty_kind, Hm)[0]
            return val

        if at_float_floor(along(col), slope, alpha_max):
            continue
        delta = armijo_search(along, col, d, alpha_max, config, slope=slope)
        H[:, m] = col + delta * d
    return H


def update_H_multiplicative(H, X, divergence, Y, eps: float | None = None,
                            gamma: float = 0.0,
                            h_penalty_kind: str = "norm_to_constant"
                            ) -> np.ndarray:
    """Unit-step multiplicative sweep H <- H w / <H, w> per column, where w
    is the per-column min-shifted negative composite gradient (entrywise
    positive whatever the penalty sign pattern).

    The gradient is evaluated once for the whole sweep; a constant gradient
    down a column then leaves that column unchanged to rounding, which a
    per-column re-evaluation would not (rounding wiggle from earlier columns
    gets divided by the shift and amplified into real moves)."""
    H = np.asarray(H, dtype=float).copy()
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    _check_shapes(Y, H, X)
    if eps is None:
        eps = 1e-12
    G = matrix_grad_q(divergence, Y, H @ X) @ X.T
    if gamma > 0.0:
        G = G + gamma * _h_penalty(h_penalty_kind, H)[1]
    for m in range(H.shape[1]):
        neg = -G[:, m]
        w = neg - float(np.min(neg)) + eps
        denom = float(np.sum(H[:, m] * w))
        if denom <= 0.0:
            raise DecompositionError(f"H column {m}: nonpositive denominator")
        H[:, m] = H[:, m] * w / denom
    return H


# ---------------------------------------------------------------------------
# X updates
# ---------------------------------------------------------------------------

def update_X_changevar(H, X, divergence, Y, config: SolverConfig | None = None,
                       mu: float = 0.0, x_targets=None) -> np.ndarray:
    """Column updates X_col (S_y g_hat - <X_col, g_hat>) with S_y the Y
    column sum; zero-sum for matched column sums, so the X constraint holds
    at every step length. The fixed policy rescales the column by the shifted
    weights, X_col w (S_y / <X_col, w>), which lands on S_y exactly.

    When the divergence separates over columns the sweep touches only the
    current column's fit term; non-separable families fall back to the full
    matrix objective.
    """
    config = config or SolverConfig()
    H = np.asarray(H, dtype=float)
    X = np.asarray(X, dtype=float).copy()
    Y = np.asarray(Y, dtype=float)
    _check_shapes(Y, H, X)
    ysums = Y.sum(axis=0)
    local = _column_local(divergence)
    targets = _as_targets(x_targets, X.shape[1]) if mu > 0.0 else None
    eps = config.shift_epsilon if config.shift_epsilon is not None else 1e-12
    for m in range(X.shape[1]):
        if local:
            g = H.T @ _grad_q_1d(divergence, Y[:, m], H @ X[:, m])
        else:
            g = (H.T @ matrix_grad_q(divergence, Y, H @ X))[:, m]
        if mu > 0.0:
            g = g + mu * _hoyer_col(X[:, m], targets[m], ysums[m])[1]
        col = X[:, m]
        neg = -g
        if config.step_policy == "fixed":
            w = neg - float(np.min(neg)) + eps
            denom = float(np.sum(col * w))
            if denom <= 0.0:
                raise DecompositionError(
                    f"X column {m}: nonpositive denominator")
            X[:, m] = col * w * (ysums[m] / denom)
            continue
        d = col * (ysums[m] * neg - float(np.sum(col * neg)))
        if not np.any(d):
            continue
        slope = float(np.sum(g * d))
        if slope >= 0.0:
            continue
        alpha_max = 0.99 * max_step(col, d, config.step_cap)
        if alpha_max <= 0.0:
            raise StallError(f"X column {m}: no positive step")

        if local:
            ym = Y[:, m]

            def along(c):
                val = _value_1d(divergence, ym, H @ c)
                if mu > 0.0:
                    val += mu * _hoyer_col(c, targets[m], ysums[m])[0]
                return val
        else:
            def along(c):
                Xm = X.copy()
                Xm[:, m] = c
                val = divergence_value(divergence, Y, H @ Xm)
                if mu > 0.0:
                    val += mu * hoyer_penalty(Xm, targets,
                                              column_sums=ysums)[0]
                return val

        if at_float_floor(along(col), slope, alpha_max):
            continue
        delta = armijo_search(along, col, d, alpha_max, config, slope=slope)
        X[:, m] = col + delta * d
    return X


def _hoyer_col(c, target: float, column_sum: float):
    """Value and gradient of the sparsity penalty on a single column."""
    value, grad = hoyer_penalty(np.asarray(c, dtype=float)[:, None],
                                np.array([target]),
                                column_sums=np.array([column_sum]))
    return value, grad[:, 0]


def _hoyer_inv_col(c, target: float):
    value, grad = hoyer_penalty_invariant(
        np.asarray(c, dtype=float)[:, None], np.array([target]))
    return value, grad[:, 0]


def per_column_factor(spec: DivergenceSpec, Y, Q, m: int) -> float:
    """Closed-form nominal invariance factor of column m of (Y, Q)."""
    Y = np.asarray(Y, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if Y.shape != Q.shape or Y.ndim != 2:
        raise ShapeError("Y and Q must be matching 2-D matrices")
    return nominal_factor(spec, Y[:, m], Q[:, m])


def update_X_invariant(H, X, divergence: InvariantDivergence, Y,
                       config: SolverConfig | None = None, mu: float = 0.0,
                       x_targets=None) -> np.ndarray:
    """Column updates -X grad for a per-column invariant divergence.

    No variable change: the weighted-gradient identity makes the direction
    zero-sum per column, with the per-column factor recomputed from the
    current Q at every call. The optional sparsity penalty must be the
    invariant one so its gradient satisfies the same identity.
    """
    if not isinstance(divergence, InvariantDivergence):
        raise ParamError("update_X_invariant needs an invariant divergence")
    config = config or SolverConfig()
    H = np.asarray(H, dtype=float)
    X = np.asarray(X, dtype=float).copy()
    Y = np.asarray(Y, dtype=float)
    _check_shapes(Y, H, X)
    targets = _as_targets(x_targets, X.shape[1]) if mu > 0.0 else None
    eps = config.shift_epsilon if config.shift_epsilon is not None else 1e-12
    for m in range(X.shape[1]):
        ym = Y[:, m]
        g = H.T @ divergence.gradient_q(ym, H @ X[:, m])
        if mu > 0.0:
            g = g + mu * _hoyer_inv_col(X[:, m], targets[m])[1]
        col = X[:, m]
        if config.step_policy == "fixed":
            # shift split plus rescale; the rescale costs nothing because the
            # objective is scale-invariant in the column
            shift = eps - min(0.0, float(np.min(-g)))
            trial = col * (-g + shift) / shift
            X[:, m] = trial * (float(np.sum(col)) / float(np.sum(trial)))
            continue
        d = -col * g
        if not np.any(d):
            continue
        slope = float(np.sum(g * d))
        if slope >= 0.0:
            continue
        alpha_max = 0.99 * max_step(col, d, config.step_cap)
        if alpha_max <= 0.0:
            raise StallError(f"X column {m}: no positive step")

        def along(c):
            val = divergence.value(ym, H @ c)
            if mu > 0.0:
                val += mu * _hoyer_inv_col(c, targets[m])[0]
            return val

        if at_float_floor(along(col), slope, alpha_max):
            continue
        delta = armijo_search(along, col, d, alpha_max, config, slope=slope)
        X[:, m] = col + delta * d
    return X


# ---------------------------------------------------------------------------
# sparsity and smoothness penalties
# ---------------------------------------------------------------------------

def hoyer_sparsity(column) -> float:
    """(sqrt(N) - |x|_1/|x|_2) / (sqrt(N) - 1): 1 on a single spike, 0 on a
    constant column."""
    x = np.asarray(column, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise ShapeError("need a 1-D column with at least 2 entries")
    if np.any(x < 0.0):
        raise DomainError("column must be non-negative")
    n2 = float(np.linalg.norm(x))
    if n2 == 0.0:
        raise DomainError("column is identically zero")
    rn = np.sqrt(x.size)
    return float((rn - float(np.sum(x)) / n2) / (rn - 1.0))


def hoyer_target(s: float, n: int) -> float:
    """Norm-ratio target A with |x|_2/|x|_1 = A at sparsity s for length n."""
    if not (0.0 <= s <= 1.0):
        raise ParamError("sparsity must lie in [0, 1]")
    if n < 2:
        raise ParamError("need at least 2 entries")
    return float(1.0 / (np.sqrt(n) - s * (np.sqrt(n) - 1.0)))


def _as_targets(targets, ncols) -> np.ndarray:
    if targets is None:
        raise ParamError("sparsity penalty needs per-column targets")
    t = np.asarray(targets, dtype=float)
    if t.ndim == 0:
        t = np.full(ncols, float(t))
    if t.shape != (ncols,):
        raise ShapeError("one target per column required")
    return t


def hoyer_penalty(X, targets, column_sums=None):
    """Sum over columns of [|X_m|_2^2/2 - A_m^2 |X_m|_1^2/2]^2.

    Returns (value, gradient). With column_sums given, the gradient uses
    those fixed sums in place of |X_m|_1 (identical on the constraint set
    where the sums match; the exact gradient otherwise).
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ShapeError("X must be 2-D")
    A = _as_targets(targets, X.shape[1])
    n1 = X.sum(axis=0)
    n2sq = np.sum(X ** 2, axis=0)
    bracket = 0.5 * n2sq - 0.5 * A ** 2 * n1 ** 2
    value = float(np.sum(bracket ** 2))
    s1 = n1 if column_sums is None else np.asarray(column_sums, dtype=float)
    grad = (X * n2sq + A ** 4 * s1 ** 3
            - A ** 2 * X * s1 ** 2 - A ** 2 * s1 * n2sq)
    return value, grad


def hoyer_penalty_invariant(X, targets):
    """Scale-free variant: sum over columns of [R_m - A_m^2]^2 / 2 with
    R = |X|_2^2/|X|_1^2. Its gradient satisfies sum_n X_nm grad_nm = 0, so it
    can ride along invariant-divergence directions."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ShapeError("X must be 2-D")
    A = _as_targets(targets, X.shape[1])
    n1 = X.sum(axis=0)
    R = np.sum(X ** 2, axis=0) / n1 ** 2
    value = float(0.5 * np.sum((R - A ** 2) ** 2))
    grad = 2.0 * (A ** 2 - R) * (R - X / n1) / n1
    return value, grad


def tikhonov_H_penalty(kind: str, H):
    """Smoothness penalty on the columns of H: squared distance to the
    uniform column, or squared norm of the neighbor-averaging residual."""
    H = np.asarray(H, dtype=float)
    if H.ndim != 2:
        raise ShapeError("H must be 2-D")
    if kind == "norm_to_constant":
        c = 1.0 / H.shape[0]
        return float(0.5 * np.sum((H - c) ** 2)), H - c
    if kind == "laplacian":
        T = laplacian_operator(H.shape[0])
        R = H - T @ H
        return float(0.5 * np.sum(R ** 2)), R - T @ R  # (I-T)^T (I-T) H
    raise ParamError(f"unknown H penalty {kind!r}")


def penalty_gradient_split(grad, eps: float = 0.0):
    """Decompose -grad = UR - VR with UR, VR >= 0 (entrywise max split).

    Folding a mixed-sign penalty gradient into a multiplicative denominator
    without this split can flip the denominator's sign and turn descent into
    ascent; the split denominator V + mu VR + eps stays positive.
    """
    g = np.asarray(grad, dtype=float)
    return np.maximum(-g, 0.0) + eps, np.maximum(g, 0.0) + eps


# ---------------------------------------------------------------------------
# alternation driver
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NmfRunResult:
    state: NmfState
    objective: float
    objectives: tuple
    iterations: int
    converged: bool


def _composite_value(problem: NmfProblem, H, X, x_targets) -> float:
    val = divergence_value(problem.divergence, problem.Y, H @ X)
    if problem.gamma > 0.0:
        val += problem.gamma * tikhonov_H_penalty(problem.h_penalty_kind, H)[0]
    if problem.mu > 0.0:
        if problem.x_penalty_kind == "hoyer_invariant":
            val += problem.mu * hoyer_penalty_invariant(X, x_targets)[0]
        else:
            val += problem.mu * hoyer_penalty(
                X, x_targets, column_sums=problem.Y.sum(axis=0))[0]
    return val


def nmf_run(problem: NmfProblem, config: SolverConfig | None = None,
            seed: int = 0, trace=None) -> NmfRunResult:
    """Alternate one H sweep then one X sweep until the composite objective
    settles. Each sweep is line-searched on the composite, so the recorded
    objective never increases; both constraint sets hold at every state."""
    config = config or SolverConfig()
    if config.step_policy == "fixed":
        warnings.warn("fixed-step multiplicative mode: nothing guarantees "
                      "a monotone objective", RuntimeWarning, stacklevel=2)
    state = init_state(problem, seed)
    x_targets = None
    if problem.mu > 0.0:
        x_targets = np.full(problem.Y.shape[1],
                            hoyer_target(problem.sparsity_target,
                                         problem.rank))
    invariant = isinstance(problem.divergence, InvariantDivergence)
    if trace is not None:
        trace.write(f"# seed {seed}\n")
        trace.write("# k obj h_drift x_drift\n")

    def record(k, obj, st):
        if trace is not None:
            trace.write(f"{k} {obj!r} {st.h_drift()!r} {st.x_drift()!r}\n")

    obj = _composite_value(problem, state.H, state.X, x_targets)
    objs = [obj]
    record(0, obj, state)
    converged = False
    iters = 0
    for k in range(1, config.max_iters + 1):
        H = update_H(state.H, state.X, problem.divergence, problem.Y, config,
                     problem.gamma, problem.h_penalty_kind)
        if invariant:
            X = update_X_invariant(H, state.X, problem.divergence, problem.Y,
                                   config, problem.mu, x_targets)
        else:
            X = update_X_changevar(H, state.X, problem.divergence, problem.Y,
                                   config, problem.mu, x_targets)
        state = NmfState(H, X, k, state.x_sums)
        new_obj = _composite_value(problem, H, X, x_targets)
        objs.append(new_obj)
        record(k, new_obj, state)
        prev, obj = obj, new_obj
        iters = k
        if abs(prev - new_obj) <= config.objective_tol * max(1.0, abs(prev)):
            converged = True
            break
    return NmfRunResult(state, obj, tuple(objs), iters, converged)
