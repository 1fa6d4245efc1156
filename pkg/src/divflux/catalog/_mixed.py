"""Divergences whose first argument is an alpha-mixture of the two fields,
plus the two-mean power family that interpolates between whole-field sums
of ordered means.
"""
from __future__ import annotations

import numpy as np

from ..convex import LIMIT_EPS
from ._base import (DivergenceSpec, FamilyEntry, ParamSpec, geo_mix, harm_mix,
                    mix, plog, quad_mix, register)
from ._classic import _open01

_S_ANY = ParamSpec("s", np.isfinite, "any real; removable limits are dispatched")


# -- mixture against a single field ------------------------------------------------

def _f_terms(par, p, q):
    a = par["alpha"]
    m = mix(q, p, a)
    return plog(p, p / m) + (1.0 - a) * (q - p)


def _f_grad(par, p, q):
    a = par["alpha"]
    return (1.0 - a) * (1.0 - p / mix(q, p, a))


register(FamilyEntry(
    name="f_div",
    value=lambda par, p, q: float(np.sum(_f_terms(par, p, q))),
    grad=_f_grad,
    terms=_f_terms,
    params=(_open01("alpha"),),
    uv=lambda par, p, q: ((1.0 - par["alpha"]) * p / mix(q, p, par["alpha"]),
                          np.full_like(q, 1.0 - par["alpha"])),
    samples=({"alpha": 0.5}, {"alpha": 0.3}),
    note="kl of the first field against the alpha-mixture; alpha -> 0 "
         "recovers plain kl",
))


def _g_terms(par, p, q):
    a = par["alpha"]
    m = mix(q, p, a)
    return m * np.log(m / p) + (1.0 - a) * (p - q)


register(FamilyEntry(
    name="g_div",
    value=lambda par, p, q: float(np.sum(_g_terms(par, p, q))),
    grad=lambda par, p, q: (1.0 - par["alpha"]) * np.log(mix(q, p, par["alpha"]) / p),
    terms=_g_terms,
    params=(_open01("alpha"),),
    strict_p=True,
    samples=({"alpha": 0.5}, {"alpha": 0.7}),
    note="kl of the alpha-mixture against the first field",
))


def _t_terms(par, p, q):
    a = par["alpha"]
    m = mix(q, p, a)
    mp = p + a * (q - p)
    return m * np.log(m / p) + mp * np.log(mp / q)


def _t_grad(par, p, q):
    a = par["alpha"]
    m = mix(q, p, a)
    mp = p + a * (q - p)
    return ((1.0 - a) * np.log(m / p) + a * np.log(mp / q)
            + (1.0 - a) * (1.0 - p / q))


register(FamilyEntry(
    name="t_sym",
    value=lambda par, p, q: float(np.sum(_t_terms(par, p, q))),
    grad=_t_grad,
    terms=_t_terms,
    params=(_open01("alpha"),),
    strict_p=True,
    symmetric=True,
    samples=({"alpha": 0.5}, {"alpha": 0.3}),
    note="sum of the mixture-vs-field kl in both directions; symmetric for "
         "every weight, not only 1/2",
))


def _fg_terms(par, p, q):
    s, a = par["s"], par["alpha"]
    if abs(s - 1.0) < LIMIT_EPS:
        return _g_terms({"alpha": a}, p, q)
    if abs(s) < LIMIT_EPS:
        return _f_terms({"alpha": a}, p, q)
    u = mix(q, p, a) / p
    return p * ((u ** s - s * u) - (1.0 - s)) / (s * (s - 1.0))


def _fg_grad(par, p, q):
    s, a = par["s"], par["alpha"]
    if abs(s - 1.0) < LIMIT_EPS:
        return (1.0 - a) * np.log(mix(q, p, a) / p)
    if abs(s) < LIMIT_EPS:
        return _f_grad({"alpha": a}, p, q)
    u = mix(q, p, a) / p
    return (1.0 - a) * (u ** (s - 1.0) - 1.0) / (s - 1.0)


def _fg_reduce(par):
    s, a = par["s"], par["alpha"]
    if abs(s - 1.0) < LIMIT_EPS:
        return DivergenceSpec("g_div", alpha=a)
    if abs(s) < LIMIT_EPS:
        return DivergenceSpec("f_div", alpha=a)
    return None


register(FamilyEntry(
    name="fg",
    value=lambda par, p, q: float(np.sum(_fg_terms(par, p, q))),
    grad=_fg_grad,
    terms=_fg_terms,
    params=(_S_ANY, _open01("alpha")),
    strict_p=True,
    reduces=_fg_reduce,
    samples=({"s": 2.0, "alpha": 0.5}, {"s": 0.5, "alpha": 0.3}),
    note="degree-s power core of the mixture against the first field; s -> 1 "
         "and s -> 0 give the two mixture-kl directions",
))


# -- signed-gap times log-gap families ----------------------------------------------

def _jd_w(par, p, q):
    # mixture with weight (1 - alpha) on the first field
    a = par["alpha"]
    return (q + (1.0 - a) * (p - q)) / q


def _jd_terms(par, p, q):
    a = par["alpha"]
    return (1.0 - a) * (p - q) * np.log(_jd_w(par, p, q))


def _jd_grad(par, p, q):
    a = par["alpha"]
    w = _jd_w(par, p, q)
    mp = q * w
    return (1.0 - a) * (-np.log(w) + a * (p - q) / mp - p / q + 1.0)


register(FamilyEntry(
    name="dragomir_jd",
    value=lambda par, p, q: float(np.sum(_jd_terms(par, p, q))),
    grad=_jd_grad,
    terms=_jd_terms,
    params=(_open01("alpha"),),
    samples=({"alpha": 0.5}, {"alpha": 0.3}),
    note="field gap times the log of the mixture ratio; each summand is a "
         "product of two factors with the same sign",
))


def _jdd_terms(par, p, q):
    a, d = par["alpha"], par["d"]
    if abs(d - 1.0) < LIMIT_EPS:
        return _jd_terms({"alpha": a}, p, q)
    w = _jd_w(par, p, q)
    return (1.0 - a) * (p - q) * (w ** (1.0 - d) - 1.0) / (1.0 - d)


def _jdd_grad(par, p, q):
    a, d = par["alpha"], par["d"]
    if abs(d - 1.0) < LIMIT_EPS:
        return _jd_grad({"alpha": a}, p, q)
    w = _jd_w(par, p, q)
    x = p / q
    return (-(1.0 - a) * (w ** (1.0 - d) - 1.0) / (1.0 - d)
            - (1.0 - a) ** 2 * x * (x - 1.0) * w ** (-d))


register(FamilyEntry(
    name="dragomir_jd_d",
    value=lambda par, p, q: float(np.sum(_jdd_terms(par, p, q))),
    grad=_jdd_grad,
    terms=_jdd_terms,
    params=(_open01("alpha"),
            ParamSpec("d", lambda v: 0.0 <= v <= 2.0,
                      "0 <= d <= 2 (convexity of the summand)")),
    reduces=lambda par: (DivergenceSpec("dragomir_jd", alpha=par["alpha"])
                         if abs(par["d"] - 1.0) < LIMIT_EPS else None),
    samples=({"alpha": 0.5, "d": 2.0}, {"alpha": 0.3, "d": 0.5}),
    note="deformed-log variant of dragomir_jd; d = 2 collapses to a "
         "quadratic-over-mixture form, d -> 1 is dispatched to the log form",
))


# -- two-mean power family ------------------------------------------------------------

_MEAN = {"a": mix, "g": geo_mix, "h": harm_mix, "q": quad_mix}


def _mean_dq(tag: str, par_b: float, p, q, m):
    b = par_b
    if tag == "a":
        return np.full_like(q, 1.0 - b)
    if tag == "g":
        return (1.0 - b) * (p / q) ** b
    if tag == "h":
        r = p / (p + b * (q - p))
        return (1.0 - b) * r * r
    return (1.0 - b) * q / m


def _t3_sums(par, p, q, lo, hi):
    r, b = par["r"], par["beta"]
    m1 = _MEAN[lo](q, p, b)
    m2 = _MEAN[hi](q, p, b)
    A = float(np.sum(m2 * (m1 / m2) ** (1.0 - r)))
    B = float(np.sum(m2))
    return r, b, m1, m2, A, B


def _t3_value(lo: str, hi: str):
    def value(par, p, q):
        r, b, m1, m2, A, B = _t3_sums(par, p, q, lo, hi)
        s = par["s"]
        if abs(s - 1.0) < LIMIT_EPS:
            return (np.log(A) - np.log(B)) / (r - 1.0)
        e = (s - 1.0) / (r - 1.0)
        return (A ** e - B ** e) / (s - 1.0)
    return value


def _t3_grad(lo: str, hi: str):
    def grad(par, p, q):
        r, b, m1, m2, A, B = _t3_sums(par, p, q, lo, hi)
        s = par["s"]
        d1 = _mean_dq(lo, b, p, q, m1)
        d2 = _mean_dq(hi, b, p, q, m2)
        rt = m2 / m1
        # grouped so dA == d2 bitwise when the means coincide
        dA = rt ** (r - 1.0) * (d2 + (1.0 - r) * (rt * d1 - d2))
        if abs(s - 1.0) < LIMIT_EPS:
            return (dA / A - d2 / B) / (r - 1.0)
        ee = (s - r) / (r - 1.0)
        return (A ** ee * dA - B ** ee * d2) / (r - 1.0)
    return grad


def _t3_register(name: str, lo: str, hi: str, note: str) -> None:
    register(FamilyEntry(
        name=name,
        value=_t3_value(lo, hi),
        grad=_t3_grad(lo, hi),
        params=(ParamSpec("r", lambda v: abs(v - 1.0) >= LIMIT_EPS, "r != 1"),
                _S_ANY, _open01("beta")),
        strict_p=(lambda par: par["r"] > 1.0) if lo != "a" else False,
        samples=({"r": 0.5, "s": 0.5, "beta": 0.5},
                 {"r": 2.0, "s": 2.0, "beta": 0.3},
                 {"r": 2.0, "s": 1.0, "beta": 0.5}),
        note=note,
    ))


_t3_register("taneja3", "g", "a",
             "two-mean power family on the geometric/arithmetic pair; "
             "s -> 1 takes the log branch, s = r needs no special case")
_t3_register("taneja3_hg", "h", "g",
             "two-mean power family on the harmonic/geometric pair")
_t3_register("taneja3_ha", "h", "a",
             "two-mean power family on the harmonic/arithmetic pair")
_t3_register("taneja3_hq", "h", "q",
             "two-mean power family on the harmonic/quadratic pair")
_t3_register("taneja3_gq", "g", "q",
             "two-mean power family on the geometric/quadratic pair")
_t3_register("taneja3_aq", "a", "q",
             "two-mean power family on the arithmetic/quadratic pair")
