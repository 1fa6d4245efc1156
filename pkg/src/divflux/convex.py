"""Convex-function machinery and the three divergence constructors.

Everything downstream (the divergence catalog, the invariant forms, the
solvers) is built from the pieces in this module: strictly convex scalar
functions with their first two derivatives, the standardizing / mirror
transforms, the Csiszar, Bregman and Jensen constructions, the generalized
logarithm pair, and weighted generalized means.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, ParamError, ShapeError

# Dispatch half-width for removable singularities (d -> 1, t -> 0, ...).
LIMIT_EPS = 1e-8


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Field:
    """A non-negative sample vector, the universal divergence argument.

    Parameters
    ----------
    values : sequence of float
        Sample values; must all be >= 0.
    positivity_class : {"nonneg", "strictly_positive"}
        Declared positivity. ``strictly_positive`` additionally requires
        every entry to be > 0.
    """

    values: np.ndarray
    positivity_class: str = "nonneg"

    def __init__(self, values, positivity_class: str = "nonneg"):
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 1 or arr.size < 1:
            raise ShapeError("a field is a 1-D sequence with at least one entry")
        if positivity_class not in ("nonneg", "strictly_positive"):
            raise ParamError(f"unknown positivity class {positivity_class!r}")
        bad = np.flatnonzero(~np.isfinite(arr))
        if bad.size:
            raise DomainError("field entries must be finite", index=int(bad[0]))
        if positivity_class == "strictly_positive":
            bad = np.flatnonzero(arr <= 0.0)
        else:
            bad = np.flatnonzero(arr < 0.0)
        if bad.size:
            raise DomainError(
                f"field entry violates positivity class {positivity_class!r}",
                index=int(bad[0]),
            )
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "positivity_class", positivity_class)

    def __len__(self) -> int:
        return self.values.size


def as_field(x, *, strict: bool = False, name: str = "field") -> np.ndarray:
    """Validate an array-like as a (strictly) positive 1-D field.

    Returns the underlying float ndarray; raises DomainError with the first
    offending index otherwise.
    """
    if isinstance(x, Field):
        arr = x.values
    else:
        arr = np.atleast_1d(np.asarray(x, dtype=float))
    if arr.ndim != 1:
        raise ShapeError(f"{name} must be 1-D, got shape {arr.shape}")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        raise DomainError(f"{name} must be finite", index=int(bad[0]))
    bad = np.flatnonzero(arr <= 0.0) if strict else np.flatnonzero(arr < 0.0)
    if bad.size:
        kind = "strictly positive" if strict else "non-negative"
        raise DomainError(f"{name} must be {kind}", index=int(bad[0]))
    return arr


def conform(p, q, *, strict_p: bool = False, strict_q: bool = True):
    """Validate a (p, q) pair of equal length; returns two ndarrays."""
    pa = as_field(p, strict=strict_p, name="p")
    qa = as_field(q, strict=strict_q, name="q")
    if pa.size != qa.size:
        raise ShapeError(f"length mismatch: |p|={pa.size}, |q|={qa.size}")
    return pa, qa


def floor_field(x, eps: float = 1e-12) -> np.ndarray:
    """Clamp entries of ``x`` below ``eps`` up to ``eps`` (preprocessing aid).

    The library itself never floors silently; divergences with ratio or log
    kernels reject zero entries instead. Use this explicitly on noisy data.
    """
    if eps <= 0:
        raise ParamError("floor_field eps must be > 0")
    return np.maximum(np.asarray(x, dtype=float), eps)


# ---------------------------------------------------------------------------
# convex functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvexFn:
    """A strictly convex scalar function with its first two derivatives.

    Parameters
    ----------
    fn, d1, d2 : callables
        The function and its first and second derivative, vectorized over
        numpy arrays.
    domain : pair of floats
        Open interval of validity; defaults to (0, inf).
    name : str
        Display name used in error messages.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    d1: Callable[[np.ndarray], np.ndarray]
    d2: Callable[[np.ndarray], np.ndarray]
    domain: tuple[float, float] = (0.0, math.inf)
    name: str = "f"

    def _check(self, x):
        arr = np.asarray(x, dtype=float)
        lo, hi = self.domain
        bad = np.flatnonzero((arr <= lo) | (arr >= hi))
        if bad.size:
            raise DomainError(
                f"{self.name} evaluated outside open domain ({lo}, {hi})",
                index=int(bad[0]),
            )
        return arr

    def __call__(self, x):
        return self.fn(self._check(x))

    def deriv1(self, x):
        return self.d1(self._check(x))

    def deriv2(self, x):
        return self.d2(self._check(x))

    def is_standard(self, tol: float = 1e-12) -> bool:
        """True when f(1)=0 and f'(1)=0 (a *standard* convex function)."""
        lo, hi = self.domain
        if not (lo < 1.0 < hi):
            return False
        return abs(float(self(1.0))) <= tol and abs(float(self.deriv1(1.0))) <= tol


def sample_grid(domain: tuple[float, float], n: int = 64) -> np.ndarray:
    """Logarithmic sampling grid on [1e-3, 1e3] clipped into ``domain``."""
    lo = max(domain[0], 1e-3)
    hi = min(domain[1], 1e3)
    if not (lo < hi):
        raise DomainError(f"domain {domain} has no overlap with [1e-3, 1e3]")
    # keep strictly inside the open interval
    pad = 1e-9
    return np.geomspace(lo * (1 + pad), hi * (1 - pad), n)


def check_strict_convexity(f: ConvexFn, n: int = 64) -> None:
    """Sample f'' on the log grid; raise DomainError if any value <= 0."""
    grid = sample_grid(f.domain, n)
    vals = f.deriv2(grid)
    bad = np.flatnonzero(np.asarray(vals) <= 0.0)
    if bad.size:
        raise DomainError(
            f"{f.name} is not strictly convex at sampled point {grid[bad[0]]:g}"
        )


def standardize(f: ConvexFn) -> ConvexFn:
    """Return g(x) = f(x) - f(1) - (x-1) f'(1): zero value and slope at 1.

    The second derivative is untouched, so the Bregman divergence built on
    g is the one built on f.
    """
    lo, hi = f.domain
    if not (lo < 1.0 < hi):
        raise DomainError(f"cannot standardize {f.name}: 1 not in domain ({lo}, {hi})")
    f1 = float(f(1.0))
    s1 = float(f.deriv1(1.0))
    return ConvexFn(
        fn=lambda x: f.fn(x) - f1 - (x - 1.0) * s1,
        d1=lambda x: f.d1(x) - s1,
        d2=f.d2,
        domain=f.domain,
        name=f"std[{f.name}]",
    )


def mirror(f: ConvexFn) -> ConvexFn:
    """Return the mirror function x -> x f(1/x) on the positive axis.

    Generates the dual Csiszar divergence; mirror is an involution.
    """
    lo, hi = f.domain
    if lo < 0.0:
        lo = 0.0
    # domain of the mirror: x with 1/x in (lo, hi)
    mlo = 0.0 if hi == math.inf else 1.0 / hi
    mhi = math.inf if lo == 0.0 else 1.0 / lo

    def m(x):
        return x * f.fn(1.0 / x)

    def m1(x):
        u = 1.0 / x
        return f.fn(u) - u * f.d1(u)

    def m2(x):
        u = 1.0 / x
        return f.d2(u) * u ** 3

    return ConvexFn(fn=m, d1=m1, d2=m2, domain=(mlo, mhi), name=f"mirror[{f.name}]")


def symmetrize(f: ConvexFn) -> ConvexFn:
    """Half-sum of f and its mirror; generates the symmetrized divergence."""
    g = mirror(f)
    lo = max(f.domain[0], g.domain[0])
    hi = min(f.domain[1], g.domain[1])
    return ConvexFn(
        fn=lambda x: 0.5 * (f.fn(x) + g.fn(x)),
        d1=lambda x: 0.5 * (f.d1(x) + g.d1(x)),
        d2=lambda x: 0.5 * (f.d2(x) + g.d2(x)),
        domain=(lo, hi),
        name=f"sym[{f.name}]",
    )


# ---------------------------------------------------------------------------
# the three constructions
# ---------------------------------------------------------------------------

def csiszar(f: ConvexFn, p, q) -> float:
    """Sum of q_i f(p_i / q_i). Non-negative when f is standard."""
    pa, qa = conform(p, q, strict_p=False, strict_q=True)
    return float(np.sum(qa * f(pa / qa)))


def csiszar_grad_q(f: ConvexFn, p, q) -> np.ndarray:
    """Gradient of the Csiszar construction with respect to q.

    d/dq_j [q f(p/q)] = f(x) - x f'(x) with x = p_j/q_j; valid for any f,
    standard or simple.
    """
    pa, qa = conform(p, q, strict_p=False, strict_q=True)
    x = pa / qa
    return np.asarray(f(x) - x * f.deriv1(x))


def bregman(f: ConvexFn, p, q) -> float:
    """Sum of f(p) - f(q) - (p-q) f'(q): the tangent-gap divergence."""
    pa, qa = conform(p, q, strict_p=False, strict_q=False)
    return float(np.sum(f(pa) - f(qa) - (pa - qa) * f.deriv1(qa)))


def bregman_grad_q(f: ConvexFn, p, q) -> np.ndarray:
    """Gradient wrt q: (q - p) f''(q)."""
    pa, qa = conform(p, q, strict_p=False, strict_q=False)
    return np.asarray((qa - pa) * f.deriv2(qa))


def jensen(f: ConvexFn, alpha: float, p, q) -> float:
    """Weighted Jensen-inequality gap of f between p and q.

    The mixture is computed as q + alpha (p - q) and the summand grouped as
    alpha (f(p) - f(m)) + (1-alpha)(f(q) - f(m)) so the result is exactly
    zero at p = q.
    """
    if not (0.0 < alpha < 1.0):
        raise ParamError(f"jensen weight alpha must lie in (0,1), got {alpha}")
    pa, qa = conform(p, q, strict_p=False, strict_q=False)
    m = qa + alpha * (pa - qa)
    fp, fq, fm = f(pa), f(qa), f(m)
    return float(np.sum(alpha * (fp - fm) + (1.0 - alpha) * (fq - fm)))


def jensen_grad_q(f: ConvexFn, alpha: float, p, q) -> np.ndarray:
    """Gradient wrt q: (1-alpha)[f'(q) - f'(m)], m the alpha-mixture."""
    if not (0.0 < alpha < 1.0):
        raise ParamError(f"jensen weight alpha must lie in (0,1), got {alpha}")
    pa, qa = conform(p, q, strict_p=False, strict_q=False)
    m = qa + alpha * (pa - qa)
    return np.asarray((1.0 - alpha) * (f.deriv1(qa) - f.deriv1(m)))


def burbea_rao(f: ConvexFn, p, q) -> float:
    """Symmetric Bregman sum B_f(p||q) + B_f(q||p); not itself a Bregman
    divergence, provided as the sum only."""
    return bregman(f, p, q) + bregman(f, q, p)


# ---------------------------------------------------------------------------
# generalized logarithm / exponential
# ---------------------------------------------------------------------------

def gen_log(x, d: float):
    """Deformed logarithm (x^(1-d) - 1)/(1-d); natural log at d = 1.

    Computed as expm1((1-d) log x)/(1-d), which stays accurate arbitrarily
    close to the d = 1 limit instead of cancelling.
    """
    arr = np.asarray(x, dtype=float)
    bad = np.flatnonzero(np.atleast_1d(arr) <= 0.0)
    if bad.size:
        raise DomainError("gen_log requires x > 0", index=int(bad[0]))
    if abs(d - 1.0) < LIMIT_EPS:
        out = np.log(arr)
    else:
        out = np.expm1((1.0 - d) * np.log(arr)) / (1.0 - d)
    return float(out) if np.isscalar(x) else out


def gen_exp(x, d: float):
    """Deformed exponential [1 + (1-d) x]^(1/(1-d)), inverse of gen_log."""
    arr = np.asarray(x, dtype=float)
    if abs(d - 1.0) < LIMIT_EPS:
        out = np.exp(arr)
    else:
        u = (1.0 - d) * arr
        bad = np.flatnonzero(np.atleast_1d(u) < -1.0)
        if bad.size:
            raise DomainError(
                "gen_exp bracket 1+(1-d)x must be >= 0", index=int(bad[0])
            )
        with np.errstate(divide="ignore"):
            out = np.exp(np.log1p(u) / (1.0 - d))
    return float(out) if np.isscalar(x) else out


# ---------------------------------------------------------------------------
# generalized means
# ---------------------------------------------------------------------------

def _check_weights(a: np.ndarray, w) -> np.ndarray:
    wa = np.asarray(w, dtype=float)
    if wa.shape != a.shape:
        raise ShapeError(f"weights shape {wa.shape} != values shape {a.shape}")
    if np.any(wa < 0.0):
        raise ParamError("weights must be non-negative")
    if abs(float(wa.sum()) - 1.0) > 1e-12:
        raise ParamError(f"weights must sum to 1, got {float(wa.sum())!r}")
    return wa


def power_mean(a, w, t: float) -> float:
    """Weighted power (Holder) mean of order t; geometric mean at t -> 0."""
    aa = as_field(a, strict=True, name="power_mean values")
    wa = _check_weights(aa, w)
    if abs(t) < LIMIT_EPS:
        return float(np.exp(np.sum(wa * np.log(aa))))
    return float(np.sum(wa * aa ** t) ** (1.0 / t))


def f_mean(a, w, psi: Callable[[float], float],
           psi_inv: Callable[[float], float] | None = None) -> float:
    """Weighted quasi-arithmetic mean in the sense of a monotone psi.

    If ``psi_inv`` is not supplied the inverse is found by bisection on
    [min(a), max(a)], which always brackets the mean.
    """
    aa = as_field(a, strict=True, name="f_mean values")
    wa = _check_weights(aa, w)
    target = float(np.sum(wa * np.asarray([psi(v) for v in aa])))
    if psi_inv is not None:
        return float(psi_inv(target))
    lo, hi = float(aa.min()), float(aa.max())
    if lo == hi:
        return lo
    increasing = psi(hi) >= psi(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        v = psi(mid)
        if (v < target) == increasing:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


# weighted two-point means used by the mean-divergence families (weight on p)

def mean_arith(p, q, w: float):
    return q + w * (p - q)


def mean_geo(p, q, w: float):
    return p ** w * q ** (1.0 - w)


def mean_harm(p, q, w: float):
    return p * q / (w * q + (1.0 - w) * p)


def mean_quad(p, q, w: float):
    return np.sqrt(q * q + w * (p * p - q * q))
