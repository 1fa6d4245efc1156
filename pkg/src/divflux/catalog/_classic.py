"""Logarithmic divergences, their power-entropy extensions, and the
weighted Jensen constructions built on the same convex cores.

Values are written in ratio/mixture groupings chosen so that D(p, p) is
bitwise 0.0 and gradients vanish exactly at identical fields.
"""
from __future__ import annotations

import numpy as np

from ..convex import LIMIT_EPS
from ..errors import DomainError, ParamError
from ._base import (DivergenceSpec, FamilyEntry, ParamSpec, geo_mix, mix,
                    plog, register, xlogx)


def _open01(name: str) -> ParamSpec:
    return ParamSpec(name, lambda v: 0.0 < v < 1.0, f"0 < {name} < 1")


# -- Kullback-Leibler group -------------------------------------------------

def _kl_terms(par, p, q):
    return plog(p, p / q) + (q - p)


def _kl_value(par, p, q):
    return float(np.sum(_kl_terms(par, p, q)))


def _kl_grad(par, p, q):
    return 1.0 - p / q


register(FamilyEntry(
    name="kl",
    value=_kl_value,
    grad=_kl_grad,
    terms=_kl_terms,
    k0=lambda par, p, q: float(np.sum(p) / np.sum(q)),
    uv=lambda par, p, q: (p / q, np.ones_like(q)),
    note="sum of p*log(p/q) + q - p; zero entries of p allowed",
))


def _kld_terms(par, p, q):
    return q * np.log(q / p) + (p - q)


def _kld_value(par, p, q):
    return float(np.sum(_kld_terms(par, p, q)))


register(FamilyEntry(
    name="kl_dual",
    value=_kld_value,
    grad=lambda par, p, q: np.log(q / p),
    terms=_kld_terms,
    strict_p=True,
    dual_of="kl",
    k0=lambda par, p, q: float(np.exp(np.sum((q / np.sum(q)) * np.log(p / q)))),
    note="kl with the fields exchanged; scale factor is a weighted geometric mean",
))


def _kls_terms(par, p, q):
    return (p - q) * np.log(p / q)


register(FamilyEntry(
    name="kl_sym",
    value=lambda par, p, q: float(np.sum(_kls_terms(par, p, q))),
    grad=lambda par, p, q: np.log(q / p) + 1.0 - p / q,
    terms=_kls_terms,
    strict_p=True,
    symmetric=True,
    note="sum of kl and kl_dual; no closed-form scale factor",
))


register(FamilyEntry(
    name="ikl",
    value=lambda par, p, q: float(np.sum(plog(p, p / q))),
    grad=lambda par, p, q: -p / q,
    terms=lambda par, p, q: plog(p, p / q),
    standard=False,
    diagnostic=True,
    nonneg_on_normalized_only=True,
    note="bare cross-entropy difference; gradient is -1 at p == q, so it is "
         "non-negative only on equal-sum fields and unusable in descent solvers",
))


# -- power-entropy extensions ------------------------------------------------

def _hc_terms(par, p, q):
    a = par["alpha"]
    if abs(a - 1.0) < LIMIT_EPS:
        return _kl_terms(par, p, q)
    if a < LIMIT_EPS:
        return _kld_terms(par, p, q)
    x = p / q
    return (q * ((x ** a - a * x) - (1.0 - a))) / (a * (a - 1.0))


def _hc_grad(par, p, q):
    a = par["alpha"]
    if abs(a - 1.0) < LIMIT_EPS:
        return _kl_grad(par, p, q)
    if a < LIMIT_EPS:
        return np.log(q / p)
    return (1.0 - (p / q) ** a) / a


def _hc_reduce(par):
    a = par["alpha"]
    if abs(a - 1.0) < LIMIT_EPS:
        return DivergenceSpec("kl")
    if a < LIMIT_EPS:
        return DivergenceSpec("kl_dual")
    return None


register(FamilyEntry(
    name="havrda_charvat",
    value=lambda par, p, q: float(np.sum(_hc_terms(par, p, q))),
    grad=_hc_grad,
    terms=_hc_terms,
    params=(ParamSpec("alpha", lambda v: v > 0.0, "alpha > 0"),),
    strict_p=lambda par: par["alpha"] < LIMIT_EPS,
    k0=lambda par, p, q: float(
        (np.sum(q * (p / q) ** par["alpha"]) / np.sum(q)) ** (1.0 / par["alpha"])),
    uv=lambda par, p, q: ((p / q) ** par["alpha"] / par["alpha"],
                          np.full_like(q, 1.0 / par["alpha"])),
    reduces=_hc_reduce,
    samples=({"alpha": 0.5}, {"alpha": 2.0}),
    note="degree-alpha entropy difference; alpha->1 gives kl, alpha->0 gives kl_dual",
))


def _sm_sums(par, p, q):
    a = par["alpha"]
    x = p / q
    A = float(np.sum(q * x ** a))
    B = float(np.sum(mix(q, p, a)))
    if B <= 0.0:
        raise DomainError("arithmetic-mixture sum is not positive", index=None)
    return a, x, A, B


def _sm_value(par, p, q):
    a, x, A, B = _sm_sums(par, p, q)
    s = par["s"]
    if abs(s - 1.0) < LIMIT_EPS:
        return (np.log(A) - np.log(B)) / (a * (a - 1.0))
    e = (s - 1.0) / (a - 1.0)
    return (A ** e - B ** e) / (a * (s - 1.0))


def _sm_grad(par, p, q):
    a, x, A, B = _sm_sums(par, p, q)
    s = par["s"]
    if abs(s - 1.0) < LIMIT_EPS:
        return (1.0 / B - x ** a / A) / a
    ee = (s - a) / (a - 1.0)
    return (B ** ee - A ** ee * x ** a) / a


def _sm_reduce(par):
    a, s = par["alpha"], par["s"]
    if abs(s - 1.0) < LIMIT_EPS:
        return DivergenceSpec("renyi_ext", alpha=a)
    if abs(s - a) < LIMIT_EPS and a > 0.0:
        return DivergenceSpec("havrda_charvat", alpha=a)
    return None


_NOT01 = ParamSpec("alpha",
                   lambda v: abs(v) >= LIMIT_EPS and abs(v - 1.0) >= LIMIT_EPS,
                   "alpha not in {0, 1}")

register(FamilyEntry(
    name="sharma_mittal",
    value=_sm_value,
    grad=_sm_grad,
    params=(_NOT01, ParamSpec("s", lambda v: True, "any real")),
    strict_p=lambda par: par["alpha"] < 0.0,
    reduces=_sm_reduce,
    samples=({"alpha": 0.5, "s": 2.0}, {"alpha": 2.0, "s": 0.5}),
    note="two-parameter entropy difference; s->1 gives renyi_ext, s=alpha gives havrda_charvat",
))


def _renyi_value(par, p, q):
    a, x, A, B = _sm_sums(par, p, q)
    return (np.log(A) - np.log(B)) / (a * (a - 1.0))


def _renyi_grad(par, p, q):
    a, x, A, B = _sm_sums(par, p, q)
    return (1.0 / B - x ** a / A) / a


register(FamilyEntry(
    name="renyi_ext",
    value=_renyi_value,
    grad=_renyi_grad,
    params=(_NOT01,),
    strict_p=lambda par: par["alpha"] < 0.0,
    samples=({"alpha": 0.3}, {"alpha": 0.7}),
    note="log-ratio of a power sum and an arithmetic-mixture sum; the mixture "
         "sum must stay positive, which alpha in (0, 1) guarantees",
))


# -- unweighted and weighted power-mean differences --------------------------

def _pm_ratio(x: np.ndarray, t: float, a: float) -> np.ndarray:
    # ratio m_t(p, q)/q of the weighted power mean, weight a on p
    if abs(t) < LIMIT_EPS:
        return x ** a
    return (1.0 + a * (x ** t - 1.0)) ** (1.0 / t)


def _arimoto_value(par, p, q):
    d = par["delta"]
    x = p / q
    if abs(d) < LIMIT_EPS:
        r = np.sqrt(x)
    else:
        r = ((x ** d + 1.0) / 2.0) ** (1.0 / d)
    return float(np.sum(q * (r - (x + 1.0) / 2.0)) / (d - 1.0))


def _arimoto_grad(par, p, q):
    d = par["delta"]
    x = p / q
    if abs(d) < LIMIT_EPS:
        return 0.5 * (1.0 - np.sqrt(x))
    R = (x ** d + 1.0) / 2.0
    return (R ** ((1.0 - d) / d) - 1.0) / (2.0 * (d - 1.0))


register(FamilyEntry(
    name="arimoto",
    value=_arimoto_value,
    grad=_arimoto_grad,
    terms=lambda par, p, q: q * (
        (np.sqrt(p / q) if abs(par["delta"]) < LIMIT_EPS
         else (((p / q) ** par["delta"] + 1.0) / 2.0) ** (1.0 / par["delta"]))
        - (p / q + 1.0) / 2.0) / (par["delta"] - 1.0),
    params=(ParamSpec("delta", lambda v: abs(v - 1.0) >= LIMIT_EPS, "delta != 1"),),
    strict_p=lambda par: par["delta"] < 0.0,
    symmetric=True,
    samples=({"delta": 0.5}, {"delta": 2.0}),
    note="gap between the unweighted power mean of order delta and the "
         "arithmetic mean; delta -> 0 uses the geometric-mean branch",
))


def _arw_value(par, p, q):
    d, a = par["delta"], par["alpha"]
    x = p / q
    gd = _pm_ratio(x, d, a)
    g1 = 1.0 + a * (x - 1.0)
    return float(np.sum(q * (gd - g1)) / ((1.0 - a) * (d - 1.0)))


def _arw_grad(par, p, q):
    d, a = par["delta"], par["alpha"]
    gd = _pm_ratio(p / q, d, a)
    return (gd ** (1.0 - d) - 1.0) / (d - 1.0)


register(FamilyEntry(
    name="arimoto_w",
    value=_arw_value,
    grad=_arw_grad,
    terms=lambda par, p, q: q * (
        _pm_ratio(p / q, par["delta"], par["alpha"])
        - (1.0 + par["alpha"] * (p / q - 1.0)))
        / ((1.0 - par["alpha"]) * (par["delta"] - 1.0)),
    params=(ParamSpec("delta", lambda v: abs(v - 1.0) >= LIMIT_EPS, "delta != 1"),
            _open01("alpha")),
    strict_p=lambda par: par["delta"] < 0.0,
    reduces=lambda par: (DivergenceSpec("m_ag", alpha=par["alpha"])
                         if abs(par["delta"]) < LIMIT_EPS else None),
    samples=({"delta": 2.0, "alpha": 0.3}, {"delta": 0.5, "alpha": 0.6}),
    note="weighted power mean of order delta against the arithmetic mean",
))


def _arx_validate(par):
    d, g = par["delta"], par["gamma"]
    if (d - g) * (d - 1.0) <= 0.0:
        raise ParamError("arimoto_ext requires (delta - gamma)*(delta - 1) > 0")


def _arx_value(par, p, q):
    d, g, a = par["delta"], par["gamma"], par["alpha"]
    x = p / q
    return float(np.sum(q * (_pm_ratio(x, d, a) - _pm_ratio(x, g, a)))
                 / ((1.0 - a) * (d - 1.0)))


def _arx_grad(par, p, q):
    d, g, a = par["delta"], par["gamma"], par["alpha"]
    x = p / q
    return (_pm_ratio(x, d, a) ** (1.0 - d)
            - _pm_ratio(x, g, a) ** (1.0 - g)) / (d - 1.0)


register(FamilyEntry(
    name="arimoto_ext",
    value=_arx_value,
    grad=_arx_grad,
    terms=lambda par, p, q: q * (
        _pm_ratio(p / q, par["delta"], par["alpha"])
        - _pm_ratio(p / q, par["gamma"], par["alpha"]))
        / ((1.0 - par["alpha"]) * (par["delta"] - 1.0)),
    params=(ParamSpec("delta", lambda v: abs(v - 1.0) >= LIMIT_EPS, "delta != 1"),
            ParamSpec("gamma", lambda v: True, "any real with (delta-gamma)*(delta-1) > 0"),
            _open01("alpha")),
    validate=_arx_validate,
    strict_p=lambda par: par["delta"] < 0.0 or par["gamma"] < 0.0,
    samples=({"delta": 2.0, "gamma": 0.5, "alpha": 0.4},
             {"delta": 0.25, "gamma": 0.75, "alpha": 0.5}),
    note="gap between weighted power means of two orders; the sign condition "
         "keeps the ordered mean difference and the prefactor consistent",
))


# -- weighted Jensen constructions --------------------------------------------

def _jsw_terms(par, p, q):
    b = par["beta"]
    m = mix(q, p, b)
    fm = xlogx(m)
    return b * (xlogx(p) - fm) + (1.0 - b) * (xlogx(q) - fm)


def _jsw_grad(par, p, q):
    b = par["beta"]
    return (1.0 - b) * (np.log(q) - np.log(mix(q, p, b)))


register(FamilyEntry(
    name="jensen_shannon_w",
    value=lambda par, p, q: float(np.sum(_jsw_terms(par, p, q))),
    grad=_jsw_grad,
    terms=_jsw_terms,
    params=(_open01("beta"),),
    samples=({"beta": 0.5}, {"beta": 0.25}),
    note="weighted Jensen gap of x*log(x); beta is the weight on the first field",
))


def _jhc_terms(par, p, q):
    a, b = par["alpha"], par["beta"]
    if abs(a - 1.0) < LIMIT_EPS:
        return _jsw_terms({"beta": b}, p, q)
    m = mix(q, p, b)
    if abs(a) < LIMIT_EPS:
        return b * np.log(m / p) + (1.0 - b) * np.log(m / q)
    fm = m ** a
    return (b * (p ** a - fm) + (1.0 - b) * (q ** a - fm)) / (a * (a - 1.0))


def _jhc_grad(par, p, q):
    a, b = par["alpha"], par["beta"]
    if abs(a - 1.0) < LIMIT_EPS:
        return _jsw_grad({"beta": b}, p, q)
    m = mix(q, p, b)
    return (1.0 - b) * (q ** (a - 1.0) - m ** (a - 1.0)) / (a - 1.0)


register(FamilyEntry(
    name="jensen_hc",
    value=lambda par, p, q: float(np.sum(_jhc_terms(par, p, q))),
    grad=_jhc_grad,
    terms=_jhc_terms,
    params=(ParamSpec("alpha", np.isfinite, "any real; alpha->1 gives jensen_shannon_w"),
            _open01("beta")),
    strict_p=lambda par: par["alpha"] < LIMIT_EPS,
    reduces=lambda par: (DivergenceSpec("jensen_shannon_w", beta=par["beta"])
                         if abs(par["alpha"] - 1.0) < LIMIT_EPS else None),
    samples=({"alpha": 2.0, "beta": 0.5}, {"alpha": 0.5, "beta": 0.3}),
    note="weighted Jensen gap of the degree-alpha power core over the "
         "arithmetic mixture",
))


def _geo_alpha_ok(v: float) -> bool:
    return (v < -LIMIT_EPS or v > 1.0 + LIMIT_EPS)


def _jhcg_terms(par, p, q):
    a, b = par["alpha"], par["beta"]
    g = geo_mix(q, p, b) ** a
    return (b * (p ** a - g) + (1.0 - b) * (q ** a - g)) / (a * (a - 1.0))


def _jhcg_grad(par, p, q):
    a, b = par["alpha"], par["beta"]
    g = geo_mix(q, p, b)
    return ((1.0 - b) / (a - 1.0)) * (q ** (a - 1.0)
                                      - g ** (a - 1.0) * (p / q) ** b)


register(FamilyEntry(
    name="jensen_hc_geo",
    value=lambda par, p, q: float(np.sum(_jhcg_terms(par, p, q))),
    grad=_jhcg_grad,
    terms=_jhcg_terms,
    params=(ParamSpec("alpha", _geo_alpha_ok, "alpha outside [0, 1]"),
            _open01("beta")),
    strict_p=lambda par: par["alpha"] < 0.0,
    samples=({"alpha": 2.0, "beta": 0.5}, {"alpha": -0.5, "beta": 0.3}),
    note="power Jensen gap over the geometric mixture; the prefactor is "
         "positive only outside [0, 1], which the weighted AM-GM bound needs",
))


def _jr_sums(par, p, q, gmean):
    a, b = par["alpha"], par["beta"]
    m = geo_mix(q, p, b) if gmean else mix(q, p, b)
    A = float(np.sum(p ** a))
    B = float(np.sum(q ** a))
    C = float(np.sum(m ** a))
    return a, b, m, A, B, C


def _jr_value(par, p, q, gmean=False):
    a, b, m, A, B, C = _jr_sums(par, p, q, gmean)
    lc = np.log(C)
    return (b * (np.log(A) - lc) + (1.0 - b) * (np.log(B) - lc)) / (a * (a - 1.0))


def _jr_grad(par, p, q):
    a, b, m, A, B, C = _jr_sums(par, p, q, False)
    return ((1.0 - b) / (a - 1.0)) * (q ** (a - 1.0) / B - m ** (a - 1.0) / C)


def _jrg_grad(par, p, q):
    a, b, m, A, B, C = _jr_sums(par, p, q, True)
    return ((1.0 - b) / (a - 1.0)) * (q ** (a - 1.0) / B
                                      - m ** (a - 1.0) * (p / q) ** b / C)


register(FamilyEntry(
    name="jensen_renyi",
    value=lambda par, p, q: _jr_value(par, p, q, gmean=False),
    grad=_jr_grad,
    params=(ParamSpec("alpha", lambda v: 0.0 < v < 1.0, "0 < alpha < 1"),
            _open01("beta")),
    samples=({"alpha": 0.5, "beta": 0.5}, {"alpha": 0.3, "beta": 0.7}),
    note="Jensen gap of the log power sum over the arithmetic mixture; "
         "not a pointwise sum, so no per-point terms",
))


register(FamilyEntry(
    name="jensen_renyi_geo",
    value=lambda par, p, q: _jr_value(par, p, q, gmean=True),
    grad=_jrg_grad,
    params=(ParamSpec("alpha", _geo_alpha_ok, "alpha outside [0, 1]"),
            _open01("beta")),
    strict_p=lambda par: par["alpha"] < 0.0,
    samples=({"alpha": 2.0, "beta": 0.5}, {"alpha": -0.5, "beta": 0.6}),
    note="log power sums over the geometric mixture; non-negativity comes "
         "from the Hoelder bound, valid for alpha outside [0, 1]",
))
