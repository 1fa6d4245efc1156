"""Quadratic-ratio divergences and the occupancy-statistics families.

The quadratic entries differ in which field (or mixture of fields) sits in
the denominator.  The occupancy entries extend the log core with an additive
offset and a deformation order d through the generalized logarithm.
"""
from __future__ import annotations

import numpy as np

from ..convex import LIMIT_EPS
from ..errors import DomainError
from ._base import (FamilyEntry, ParamSpec, gen_log_arr, mix, plog, register,
                    DivergenceSpec)
from ._classic import _open01


# -- chi-squared style ---------------------------------------------------------

register(FamilyEntry(
    name="neyman_chi2",
    value=lambda par, p, q: float(np.sum((p - q) ** 2 / q)),
    grad=lambda par, p, q: 1.0 - (p / q) ** 2,
    terms=lambda par, p, q: (p - q) ** 2 / q,
    k0=lambda par, p, q: float(np.sqrt(np.sum(p * p / q) / np.sum(q))),
    uv=lambda par, p, q: ((p / q) ** 2, np.ones_like(q)),
    note="squared gap over the second field",
))


register(FamilyEntry(
    name="pearson_chi2",
    value=lambda par, p, q: float(np.sum((q - p) ** 2 / p)),
    grad=lambda par, p, q: 2.0 * (q / p - 1.0),
    terms=lambda par, p, q: (q - p) ** 2 / p,
    strict_p=True,
    dual_of="neyman_chi2",
    k0=lambda par, p, q: float(np.sum(q) / np.sum(q * q / p)),
    uv=lambda par, p, q: (np.full_like(q, 2.0), 2.0 * q / p),
    note="squared gap over the first field",
))


def _rukhin_terms(par, p, q):
    a = par["alpha"]
    m = p + a * (q - p)
    return (p - q) ** 2 / m


def _rukhin_grad(par, p, q):
    a = par["alpha"]
    m = p + a * (q - p)
    return (p - q) * (a * p - a * q - 2.0 * p) / (m * m)


def _rukhin_uv(par, p, q):
    a = par["alpha"]
    m = p + a * (q - p)
    g = ((2.0 - a) * p + a * q) / (m * m)
    return p * g, q * g


def _rukhin_reduce(par):
    a = par["alpha"]
    if abs(a - 1.0) < LIMIT_EPS:
        return DivergenceSpec("neyman_chi2")
    if abs(a) < LIMIT_EPS:
        return DivergenceSpec("pearson_chi2")
    return None


register(FamilyEntry(
    name="rukhin",
    value=lambda par, p, q: float(np.sum(_rukhin_terms(par, p, q))),
    grad=_rukhin_grad,
    terms=_rukhin_terms,
    params=(ParamSpec("alpha", lambda v: 0.0 <= v <= 1.0, "0 <= alpha <= 1"),),
    strict_p=lambda par: par["alpha"] < LIMIT_EPS,
    uv=_rukhin_uv,
    reduces=_rukhin_reduce,
    samples=({"alpha": 0.5}, {"alpha": 0.25}),
    note="squared gap over the alpha-mixture of the fields; the endpoints are "
         "the two chi-squared forms",
))


register(FamilyEntry(
    name="hellinger",
    value=lambda par, p, q: float(np.sum((np.sqrt(p) - np.sqrt(q)) ** 2)),
    grad=lambda par, p, q: 1.0 - np.sqrt(p / q),
    terms=lambda par, p, q: (np.sqrt(p) - np.sqrt(q)) ** 2,
    symmetric=True,
    k0=lambda par, p, q: float((np.sum(np.sqrt(p * q)) / np.sum(q)) ** 2),
    uv=lambda par, p, q: (np.sqrt(p / q), np.ones_like(q)),
    note="squared gap of the square roots",
))


def _tri_grad(par, p, q):
    return 1.0 - (2.0 * p / (p + q)) ** 2


register(FamilyEntry(
    name="triangular",
    value=lambda par, p, q: float(np.sum((p - q) ** 2 / (p + q))),
    grad=_tri_grad,
    terms=lambda par, p, q: (p - q) ** 2 / (p + q),
    symmetric=True,
    uv=lambda par, p, q: ((2.0 * p / (p + q)) ** 2, np.ones_like(q)),
    note="squared gap over the plain sum of the fields",
))


register(FamilyEntry(
    name="toussaint",
    value=lambda par, p, q: 0.5 * float(np.sum((p - q) ** 2 / (p + q))),
    grad=lambda par, p, q: 0.5 * _tri_grad(par, p, q),
    terms=lambda par, p, q: 0.5 * (p - q) ** 2 / (p + q),
    symmetric=True,
    uv=lambda par, p, q: (0.5 * (2.0 * p / (p + q)) ** 2, np.full_like(q, 0.5)),
    note="half of triangular; also the arithmetic-harmonic mean gap at "
         "weight one half",
))


def _hp_nd(b: float, u):
    return (b * b * u * u + (1.0 - b) * (1.0 - b)) / (b * u + (1.0 - b))


def _hp_terms(par, p, q):
    b = par["beta"]
    x = p / q
    slope = 2.0 * b ** 3 - 4.0 * b * b + b
    return q * ((_hp_nd(b, x) - _hp_nd(b, 1.0)) + slope * (x - 1.0))


def _hp_grad(par, p, q):
    b = par["beta"]
    m = mix(q, p, b)
    return 2.0 * b * b * (1.0 - b) * (1.0 - (p / m) ** 2)


register(FamilyEntry(
    name="henze_penrose",
    value=lambda par, p, q: float(np.sum(_hp_terms(par, p, q))),
    grad=_hp_grad,
    terms=_hp_terms,
    params=(_open01("beta"),),
    uv=lambda par, p, q: (
        2.0 * par["beta"] ** 2 * (1.0 - par["beta"]) * (p / mix(q, p, par["beta"])) ** 2,
        np.full_like(q, 2.0 * par["beta"] ** 2 * (1.0 - par["beta"]))),
    samples=({"beta": 0.5}, {"beta": 0.3}),
    note="standardized quadratic-over-mixture core; only the standardized "
         "form is exposed, the raw core does not vanish at p == q",
))


# -- offset-log family -----------------------------------------------------------

def _polya_terms(par, p, q):
    g = par["gamma"]
    x = p / q
    t1 = plog(p, (1.0 + g) * x / (1.0 + g * x))
    t2 = (q / g) * np.log((1.0 + g) / (1.0 + g * x))
    return t1 + t2


def _polya_grad(par, p, q):
    g = par["gamma"]
    return np.log((1.0 + g) / (1.0 + g * (p / q))) / g


register(FamilyEntry(
    name="polya",
    value=lambda par, p, q: float(np.sum(_polya_terms(par, p, q))),
    grad=_polya_grad,
    terms=_polya_terms,
    params=(ParamSpec("gamma", lambda v: v > 0.0, "gamma > 0"),),
    uv=lambda par, p, q: (np.log1p(par["gamma"] * p / q) / par["gamma"],
                          np.full_like(q, np.log1p(par["gamma"]) / par["gamma"])),
    samples=({"gamma": 1.0}, {"gamma": 0.5}),
    note="log core with a gamma-weighted contamination of the denominator; "
         "gamma -> 0 recovers kl, no closed-form scale factor",
))


register(FamilyEntry(
    name="polya_dual",
    value=lambda par, p, q: float(np.sum(_polya_terms(par, q, p))),
    grad=lambda par, p, q: np.log((1.0 + par["gamma"]) / (p / q + par["gamma"])),
    terms=lambda par, p, q: _polya_terms(par, q, p),
    params=(ParamSpec("gamma", lambda v: v > 0.0, "gamma > 0"),),
    strict_p=True,
    dual_of="polya",
    samples=({"gamma": 1.0}, {"gamma": 0.5}),
    note="offset-log family with the fields exchanged",
))


def _pb_terms(par, p, q):
    g = par["gamma"]
    return plog(p, p / q) - ((1.0 + g * p) / g) * np.log((1.0 + g * p) / (1.0 + g * q))


register(FamilyEntry(
    name="polya_bregman",
    value=lambda par, p, q: float(np.sum(_pb_terms(par, p, q))),
    grad=lambda par, p, q: ((1.0 + par["gamma"] * p)
                            / (1.0 + par["gamma"] * q) - p / q),
    terms=_pb_terms,
    params=(ParamSpec("gamma", lambda v: v > 0.0, "gamma > 0"),),
    diagnostic=True,
    uv=lambda par, p, q: (p / q, (1.0 + par["gamma"] * p) / (1.0 + par["gamma"] * q)),
    samples=({"gamma": 1.0},),
    note="gradient-matching construction on the same offset-log core, kept "
         "as a diagnostic companion entry; no joint-convexity claim is made",
))


# -- occupancy-statistics families ------------------------------------------------

def _be1_pieces(par, p, q):
    a, d = par["alpha"], par["d"]
    num = a * q + q
    den = a * q + p
    return a, d, p / q, num / den, den


def _be1_terms(par, p, q):
    a, d, x, R, den = _be1_pieces(par, p, q)
    return p * gen_log_arr(x, d) + den * gen_log_arr(R, d)


def _be1_grad(par, p, q):
    a, d, x, R, den = _be1_pieces(par, p, q)
    return -x ** (2.0 - d) + a * gen_log_arr(R, d) + x * R ** (1.0 - d)


register(FamilyEntry(
    name="bose_einstein1",
    value=lambda par, p, q: float(np.sum(_be1_terms(par, p, q))),
    grad=_be1_grad,
    terms=_be1_terms,
    params=(ParamSpec("alpha", lambda v: v > 0.0, "alpha > 0"),
            ParamSpec("d", lambda v: v <= 1.0,
                      "d <= 1; d = 1 is the plain log form, and any d > 1 "
                      "loses positivity at large first/second ratios")),
    strict_p=True,
    samples=({"alpha": 1.0, "d": 1.0}, {"alpha": 0.5, "d": 0.5},
             {"alpha": 2.0, "d": -1.0}),
    note="occupancy form with the offset proportional to the second field; "
         "the deformation order is capped at 1 to keep the core convex",
))


def _be2_terms(par, p, q):
    a, d = par["alpha"], par["d"]
    S = (a + q) / (a + p)
    return p * gen_log_arr(p / q, d) + (a + p) * gen_log_arr(S, d)


register(FamilyEntry(
    name="bose_einstein2",
    value=lambda par, p, q: float(np.sum(_be2_terms(par, p, q))),
    grad=lambda par, p, q: (-(p / q) ** (2.0 - par["d"])
                            + ((par["alpha"] + p) / (par["alpha"] + q)) ** par["d"]),
    terms=_be2_terms,
    params=(ParamSpec("alpha", lambda v: v > 0.0, "alpha > 0"),
            ParamSpec("d", lambda v: v <= 1.0,
                      "d <= 1; d = 1 is the plain log form, and any d > 1 "
                      "loses positivity as the second field grows")),
    strict_p=True,
    samples=({"alpha": 1.0, "d": 1.0}, {"alpha": 2.0, "d": 0.5},
             {"alpha": 0.5, "d": -2.0}),
    note="occupancy form with an absolute offset, so it is not scale-invariant "
         "in the offset; deformation order capped at 1 for positivity",
))


def _fd1_pieces(par, p, q):
    b = par["beta"]
    num = b * q - p
    if np.any(num <= 0.0):
        idx = int(np.argmax(num <= 0.0))
        raise DomainError(
            "fermi_dirac1 requires beta*q > p at every point; choose beta "
            "larger than max(p_i/q_i)", index=idx)
    den = b * q - q
    return b, par["d"], p / q, num, num / den


def _fd1_terms(par, p, q):
    b, d, x, num, T = _fd1_pieces(par, p, q)
    return p * gen_log_arr(x, d) + num * gen_log_arr(T, d)


def _fd1_grad(par, p, q):
    b, d, x, num, T = _fd1_pieces(par, p, q)
    return -x ** (2.0 - d) + b * gen_log_arr(T, d) + x * T ** (1.0 - d)


register(FamilyEntry(
    name="fermi_dirac1",
    value=lambda par, p, q: float(np.sum(_fd1_terms(par, p, q))),
    grad=_fd1_grad,
    terms=_fd1_terms,
    params=(ParamSpec("beta", lambda v: v > 1.0, "beta > 1"),
            ParamSpec("d", lambda v: v < 2.0,
                      "d < 2; d = 1 is the plain log form, d = 2 collapses "
                      "to the zero function and larger d flips the sign")),
    strict_p=True,
    samples=({"beta": 40.0, "d": 1.0}, {"beta": 40.0, "d": 1.5},
             {"beta": 40.0, "d": -0.5}),
    note="exclusion form with the ceiling proportional to the second field; "
         "a point with beta*q <= p is a domain error, never clamped",
))


def _fd2_pieces(par, p, q):
    b = par["beta"]
    nb = b - p
    if np.any(nb <= 0.0):
        idx = int(np.argmax(nb <= 0.0))
        raise DomainError("fermi_dirac2 requires p < beta at every point", index=idx)
    db = b - q
    if np.any(db <= 0.0):
        idx = int(np.argmax(db <= 0.0))
        raise DomainError("fermi_dirac2 requires q < beta at every point", index=idx)
    return b, par["d"], p / q, nb, nb / db


def _fd2_terms(par, p, q):
    b, d, x, nb, U = _fd2_pieces(par, p, q)
    return p * gen_log_arr(x, d) + nb * gen_log_arr(U, d)


register(FamilyEntry(
    name="fermi_dirac2",
    value=lambda par, p, q: float(np.sum(_fd2_terms(par, p, q))),
    grad=lambda par, p, q: (lambda b, d, x, nb, U:
                            -x ** (2.0 - d) + U ** (2.0 - d))(*_fd2_pieces(par, p, q)),
    terms=_fd2_terms,
    params=(ParamSpec("beta", lambda v: v > 0.0, "beta > 0, with both fields below beta"),
            ParamSpec("d", lambda v: v < 2.0,
                      "d < 2; d = 1 is the plain log form, d = 2 collapses "
                      "to the zero function and larger d flips the sign")),
    strict_p=True,
    samples=({"beta": 40.0, "d": 1.0}, {"beta": 40.0, "d": 1.5},
             {"beta": 40.0, "d": 0.5}),
    note="exclusion form with an absolute ceiling on both fields; violations "
         "are domain errors, never clamped",
))


# -- hyperbolic interpolation ------------------------------------------------------

def _bs_terms(par, p, q):
    a = par["alpha"]
    x = p / q
    return q * (x * np.sinh(a * np.log(x)) + a * (1.0 - x)) / np.sinh(a)


register(FamilyEntry(
    name="bathia_singh",
    value=lambda par, p, q: float(np.sum(_bs_terms(par, p, q))),
    grad=lambda par, p, q: (par["alpha"] / np.sinh(par["alpha"]))
    * (1.0 - (p / q) * np.cosh(par["alpha"] * np.log(p / q))),
    terms=_bs_terms,
    params=(ParamSpec("alpha", lambda v: 0.0 < v <= 1.0, "0 < alpha <= 1"),),
    strict_p=True,
    samples=({"alpha": 0.5}, {"alpha": 1.0}),
    note="hyperbolic-sine core; convex on the positive axis only when abs(alpha) "
         "is at most 1, and even in alpha, so the positive half is exposed",
))
