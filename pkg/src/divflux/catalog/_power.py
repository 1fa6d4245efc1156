"""Power-parameterized divergence families.

The single-parameter ratio family (exponent on p/q), the single-parameter
difference family (exponent on each field), their two-parameter superset,
the duals, and the quadratic/log endpoints those parameters reach.

Each value is grouped as a weighted sum of a bracket in x = p/q that is
computed so the bracket is bitwise 0.0 at x == 1.
"""
from __future__ import annotations

import numpy as np

from ..convex import LIMIT_EPS, conform
from ..errors import NotDecomposable, ParamError
from ._base import (DivergenceSpec, FamilyEntry, ParamSpec, evaluate, mix,
                    register)
from ._classic import (_jhc_grad, _jhc_terms, _jsw_grad, _kl_grad, _kl_terms,
                       _kl_value, _kld_terms, _kld_value, _open01)

_ANY = ParamSpec("lambda", np.isfinite, "any real; removable limits are dispatched")


# -- quadratic and log endpoints ---------------------------------------------

def _eqm_terms(par, p, q):
    return (p - q) ** 2


register(FamilyEntry(
    name="eqm",
    value=lambda par, p, q: float(np.sum(_eqm_terms(par, p, q))),
    grad=lambda par, p, q: 2.0 * (q - p),
    terms=_eqm_terms,
    strict_q=False,
    symmetric=True,
    k0=lambda par, p, q: float(np.sum(p * q) / np.sum(q * q)),
    uv=lambda par, p, q: (2.0 * p, 2.0 * q),
    note="plain squared Euclidean gap; defined for any non-negative fields",
))


def _is_terms(par, p, q):
    x = p / q
    return x - np.log(x) - 1.0


register(FamilyEntry(
    name="itakura_saito",
    value=lambda par, p, q: float(np.sum(_is_terms(par, p, q))),
    grad=lambda par, p, q: (1.0 - p / q) / q,
    terms=_is_terms,
    strict_p=True,
    k0=lambda par, p, q: float(np.mean(p / q)),
    uv=lambda par, p, q: (p / (q * q), 1.0 / q),
    note="ratio minus its log; scale factor is the mean ratio",
))


# -- ratio power family --------------------------------------------------------

def _alpha_bracket(x: np.ndarray, lam: float) -> np.ndarray:
    # (x^lam - lam*x) - (1 - lam) is bitwise 0.0 at x == 1
    return (x ** lam - lam * x) - (1.0 - lam)


def _alpha_terms(par, p, q):
    lam = par["lambda"]
    if abs(lam - 1.0) < LIMIT_EPS:
        return _kl_terms(par, p, q)
    if abs(lam) < LIMIT_EPS:
        return _kld_terms(par, p, q)
    return q * _alpha_bracket(p / q, lam) / (lam * (lam - 1.0))


def _alpha_grad(par, p, q):
    lam = par["lambda"]
    if abs(lam - 1.0) < LIMIT_EPS:
        return _kl_grad(par, p, q)
    if abs(lam) < LIMIT_EPS:
        return np.log(q / p)
    return (1.0 - (p / q) ** lam) / lam


def _alpha_k0(par, p, q):
    lam = par["lambda"]
    if abs(lam - 1.0) < LIMIT_EPS:
        return float(np.sum(p) / np.sum(q))
    if abs(lam) < LIMIT_EPS:
        return float(np.exp(np.sum((q / np.sum(q)) * np.log(p / q))))
    return float((np.sum(q * (p / q) ** lam) / np.sum(q)) ** (1.0 / lam))


def _alpha_uv(par, p, q):
    lam = par["lambda"]
    if abs(lam - 1.0) < LIMIT_EPS:
        return p / q, np.ones_like(q)
    if abs(lam) < LIMIT_EPS:
        raise NotDecomposable("no non-negative gradient split at the dual-log limit")
    xl = (p / q) ** lam
    if lam > 0.0:
        return xl / lam, np.full_like(q, 1.0 / lam)
    return np.full_like(q, -1.0 / lam), xl / (-lam)


def _alpha_reduce(par):
    lam = par["lambda"]
    if abs(lam - 1.0) < LIMIT_EPS:
        return DivergenceSpec("kl")
    if abs(lam) < LIMIT_EPS:
        return DivergenceSpec("kl_dual")
    return None


register(FamilyEntry(
    name="alpha",
    value=lambda par, p, q: float(np.sum(_alpha_terms(par, p, q))),
    grad=_alpha_grad,
    terms=_alpha_terms,
    params=(_ANY,),
    strict_p=lambda par: par["lambda"] < LIMIT_EPS,
    k0=_alpha_k0,
    uv=_alpha_uv,
    reduces=_alpha_reduce,
    samples=({"lambda": 0.5}, {"lambda": 2.0}, {"lambda": -1.0}),
    note="power of the ratio p/q; lambda=1/2 is twice hellinger, lambda=2 is "
         "half of neyman_chi2 (proportionality constants, kept distinct)",
))


def _alphad_value(par, p, q):
    lam = par["lambda"]
    if abs(lam - 1.0) < LIMIT_EPS:
        return _kld_value(par, p, q)
    if abs(lam) < LIMIT_EPS:
        return _kl_value(par, q, p)
    return float(np.sum(p * _alpha_bracket(q / p, lam)) / (lam * (lam - 1.0)))


def _alphad_grad(par, p, q):
    lam = par["lambda"]
    if abs(lam - 1.0) < LIMIT_EPS:
        return np.log(q / p)
    if abs(lam) < LIMIT_EPS:
        return 1.0 - p / q
    return ((p / q) ** (1.0 - lam) - 1.0) / (lam - 1.0)


def _alphad_reduce(par):
    lam = par["lambda"]
    if abs(lam - 1.0) < LIMIT_EPS:
        return DivergenceSpec("kl_dual")
    if abs(lam) < LIMIT_EPS:
        return DivergenceSpec("kl")
    return None


register(FamilyEntry(
    name="alpha_dual",
    value=_alphad_value,
    grad=_alphad_grad,
    terms=lambda par, p, q: _alpha_terms(par, q, p),
    params=(_ANY,),
    strict_p=True,
    dual_of="alpha",
    # equal to the direct family at the reflected parameter, factor included
    k0=lambda par, p, q: _alpha_k0({"lambda": 1.0 - par["lambda"]}, p, q),
    reduces=_alphad_reduce,
    samples=({"lambda": 0.5}, {"lambda": 2.0}),
    note="ratio family with the fields exchanged; equals alpha at 1 - lambda",
))


# -- difference power family ---------------------------------------------------

def _beta_terms(par, p, q):
    lam = par["lambda"]
    if abs(lam - 1.0) < LIMIT_EPS:
        return _kl_terms(par, p, q)
    if abs(lam) < LIMIT_EPS:
        return _is_terms(par, p, q)
    return q ** lam * _alpha_bracket(p / q, lam) / (lam * (lam - 1.0))


def _beta_grad(par, p, q):
    lam = par["lambda"]
    if abs(lam - 1.0) < LIMIT_EPS:
        return _kl_grad(par, p, q)
    if abs(lam) < LIMIT_EPS:
        return (1.0 - p / q) / q
    return q ** (lam - 1.0) * (1.0 - p / q)


def _beta_reduce(par):
    lam = par["lambda"]
    if abs(lam - 1.0) < LIMIT_EPS:
        return DivergenceSpec("kl")
    if abs(lam) < LIMIT_EPS:
        return DivergenceSpec("itakura_saito")
    return None


register(FamilyEntry(
    name="beta",
    value=lambda par, p, q: float(np.sum(_beta_terms(par, p, q))),
    grad=_beta_grad,
    terms=_beta_terms,
    params=(_ANY,),
    strict_p=lambda par: par["lambda"] < LIMIT_EPS,
    k0=lambda par, p, q: _beta_k0(par, p, q),
    uv=lambda par, p, q: _beta_uv(par, p, q),
    reduces=_beta_reduce,
    samples=({"lambda": 0.5}, {"lambda": 2.0}, {"lambda": 1.5}),
    note="power of each field separately; lambda=2 is half of eqm "
         "(proportionality constant, kept distinct)",
))


def _beta_k0(par, p, q):
    lam = par["lambda"]
    if abs(lam - 1.0) < LIMIT_EPS:
        return float(np.sum(p) / np.sum(q))
    if abs(lam) < LIMIT_EPS:
        return float(np.mean(p / q))
    return float(np.sum(p * q ** (lam - 1.0)) / np.sum(q ** lam))


def _beta_uv(par, p, q):
    lam = par["lambda"]
    if abs(lam - 1.0) < LIMIT_EPS:
        return p / q, np.ones_like(q)
    if abs(lam) < LIMIT_EPS:
        return p / (q * q), 1.0 / q
    return p * q ** (lam - 2.0), q ** (lam - 1.0)


def _betad_value(par, p, q):
    lam = par["lambda"]
    if abs(lam - 1.0) < LIMIT_EPS:
        return _kld_value(par, p, q)
    if abs(lam) < LIMIT_EPS:
        return float(np.sum(_is_terms(par, q, p)))
    return float(np.sum(p ** lam * _alpha_bracket(q / p, lam)) / (lam * (lam - 1.0)))


def _betad_grad(par, p, q):
    lam = par["lambda"]
    if abs(lam - 1.0) < LIMIT_EPS:
        return np.log(q / p)
    return (q ** (lam - 1.0) - p ** (lam - 1.0)) / (lam - 1.0)


def _betad_k0(par, p, q):
    lam = par["lambda"]
    if abs(lam - 1.0) < LIMIT_EPS:
        return float(np.exp(np.sum((q / np.sum(q)) * np.log(p / q))))
    return float((np.sum(p ** (lam - 1.0) * q) / np.sum(q ** lam)) ** (1.0 / (lam - 1.0)))


register(FamilyEntry(
    name="beta_dual",
    value=_betad_value,
    grad=_betad_grad,
    terms=lambda par, p, q: _beta_terms(par, q, p),
    params=(_ANY,),
    strict_p=True,
    dual_of="beta",
    k0=_betad_k0,
    reduces=lambda par: (DivergenceSpec("kl_dual")
                         if abs(par["lambda"] - 1.0) < LIMIT_EPS else None),
    samples=({"lambda": 0.5}, {"lambda": 2.0}),
    note="difference family with the fields exchanged; lambda -> 0 is the "
         "exchanged ratio-minus-log form, which has no separate catalog name",
))


# -- two-parameter superset ------------------------------------------------------

_AB_A = ParamSpec("a", np.isfinite, "any real; removable limits are dispatched")
_AB_B = ParamSpec("b", np.isfinite, "any real; removable limits are dispatched")


def _ab_value(par, p, q):
    a, b = par["a"], par["b"]
    c = a + b - 1.0
    x = p / q
    a0 = abs(a) < LIMIT_EPS
    b1 = abs(b - 1.0) < LIMIT_EPS
    if a0 and b1:
        return 0.5 * float(np.sum(np.log(x) ** 2))
    if a0:
        return float(np.sum(q ** c * ((x ** c - 1.0) - c * np.log(x)))) / (c * c)
    if b1:
        return float(np.sum(q ** a * ((a * x ** a * np.log(x) - x ** a) + 1.0))) / (a * a)
    if abs(c) < LIMIT_EPS:
        return float(np.sum((x ** a - a * np.log(x)) - 1.0)) / (a * a)
    r = a / c
    return -float(np.sum(q ** c * ((x ** a - r * x ** c) - (1.0 - r)))) / (a * (b - 1.0))


def _ab_grad(par, p, q):
    a, b = par["a"], par["b"]
    c = a + b - 1.0
    x = p / q
    if abs(a) < LIMIT_EPS:
        return q ** (c - 1.0) * np.log(q / p)
    return q ** (c - 1.0) * (1.0 - x ** a) / a


def _ab_k0(par, p, q):
    a, b = par["a"], par["b"]
    c = a + b - 1.0
    x = p / q
    w = q ** c
    if abs(a) < LIMIT_EPS:
        return float(np.exp(np.sum(w * np.log(x)) / np.sum(w)))
    return float((np.sum(w * x ** a) / np.sum(w)) ** (1.0 / a))


def _ab_uv(par, p, q):
    a, b = par["a"], par["b"]
    c = a + b - 1.0
    if abs(a) < LIMIT_EPS:
        raise NotDecomposable("no non-negative gradient split on the a = 0 line")
    w = q ** (c - 1.0)
    xa = (p / q) ** a
    if a > 0.0:
        return w * xa / a, w / a
    return w / (-a), w * xa / (-a)


def _ab_strict_p(par):
    a, b = par["a"], par["b"]
    return (a < LIMIT_EPS or abs(b - 1.0) < LIMIT_EPS
            or a + b - 1.0 < LIMIT_EPS)


def _ab_reduce(par):
    a, b = par["a"], par["b"]
    if abs(a - 1.0) < LIMIT_EPS:
        return DivergenceSpec("beta", **{"lambda": b})
    if abs(a + b - 2.0) < LIMIT_EPS:
        return DivergenceSpec("alpha", **{"lambda": a})
    return None


register(FamilyEntry(
    name="ab",
    value=_ab_value,
    grad=_ab_grad,
    params=(_AB_A, _AB_B),
    strict_p=_ab_strict_p,
    k0=_ab_k0,
    uv=_ab_uv,
    reduces=_ab_reduce,
    samples=({"a": 2.0, "b": 0.5}, {"a": 0.5, "b": 2.5}, {"a": -0.5, "b": 3.0}),
    note="two exponents, one on each field; a+b-1=1 recovers the ratio family "
         "and a=1 the difference family",
))


def _abd_grad(par, p, q):
    a, b = par["a"], par["b"]
    c = a + b - 1.0
    if abs(b - 1.0) < LIMIT_EPS:
        if abs(a) < LIMIT_EPS:
            return np.log(q / p) / q
        return q ** (a - 1.0) * np.log(q / p)
    return q ** (c - 1.0) * (1.0 - (p / q) ** (b - 1.0)) / (b - 1.0)


def _abd_k0(par, p, q):
    a, b = par["a"], par["b"]
    c = a + b - 1.0
    if abs(b - 1.0) < LIMIT_EPS:
        w = q ** a
        return float(np.exp(np.sum(w * np.log(p / q)) / np.sum(w)))
    return float((np.sum(q ** a * p ** (b - 1.0)) / np.sum(q ** c)) ** (1.0 / (b - 1.0)))


def _abd_reduce(par):
    a, b = par["a"], par["b"]
    if abs(a - 1.0) < LIMIT_EPS:
        return DivergenceSpec("beta_dual", **{"lambda": b})
    if abs(a + b - 2.0) < LIMIT_EPS:
        return DivergenceSpec("alpha_dual", **{"lambda": a})
    return None


register(FamilyEntry(
    name="ab_dual",
    value=lambda par, p, q: _ab_value(par, q, p),
    grad=_abd_grad,
    params=(_AB_A, _AB_B),
    strict_p=True,
    dual_of="ab",
    k0=_abd_k0,
    reduces=_abd_reduce,
    samples=({"a": 2.0, "b": 0.5}, {"a": 0.5, "b": 2.5}),
    note="two-exponent family with the fields exchanged",
))


# -- Jensen construction on the power core -------------------------------------

def _jp_par(par):
    return {"alpha": par["lambda"], "beta": par["alpha"]}


register(FamilyEntry(
    name="jensen_power",
    value=lambda par, p, q: float(np.sum(_jhc_terms(_jp_par(par), p, q))),
    grad=lambda par, p, q: _jhc_grad(_jp_par(par), p, q),
    terms=lambda par, p, q: _jhc_terms(_jp_par(par), p, q),
    params=(_ANY, _open01("alpha")),
    strict_p=lambda par: par["lambda"] < LIMIT_EPS,
    reduces=lambda par: (DivergenceSpec("jensen_shannon_w", beta=par["alpha"])
                         if abs(par["lambda"] - 1.0) < LIMIT_EPS else None),
    samples=({"lambda": 2.0, "alpha": 0.5}, {"lambda": 0.5, "alpha": 0.3}),
    note="weighted Jensen gap of the power core; value-identical to jensen_hc "
         "with the parameter names swapped, kept as its own catalog row",
))


# -- conformance check for the two-index generalization -------------------------

def ghosh_conformance(A: float, B: float, p, q) -> float:
    """Residual between the direct two-index closed form and the catalog
    two-exponent family at (a=A, b=B+1); the two are algebraically equal,
    so the residual is floating-point noise."""
    if not np.isfinite(A) or A <= 0.0:
        raise ParamError(f"ghosh index A must be > 0, got {A!r}")
    if not np.isfinite(B) or abs(B) < LIMIT_EPS:
        raise ParamError(f"ghosh index B must be nonzero, got {B!r}")
    s = A + B
    if abs(s) < LIMIT_EPS:
        raise ParamError("ghosh indices must satisfy A + B != 0")
    pa, qa = conform(p, q, strict_p=True)
    direct = (np.sum(qa ** s) + (A / B) * np.sum(pa ** s)
              - (s / B) * np.sum(pa ** A * qa ** B)) / (A * s)
    via_ab = evaluate(DivergenceSpec("ab", a=A, b=B + 1.0), pa, qa)
    return float(abs(direct - via_ab))
