"""Divergences built as gaps between weighted pointwise means.

Each family is the (possibly log-transformed) difference of two of the four
classical weighted means, ordered harmonic <= geometric <= arithmetic <=
quadratic.  The weight alpha sits on the first field.  Everything is written
in ratio form (mean divided by q) so values vanish bitwise at p == q.
"""
from __future__ import annotations

import numpy as np

from ._base import FamilyEntry, register
from ._classic import _open01

_ALPHA = (_open01("alpha"),)


def _ratios(par, p, q):
    a = par["alpha"]
    x = p / q
    ra = 1.0 + a * (x - 1.0)
    rg = x ** a
    rh = p / (p + a * (q - p))
    rq = np.sqrt(1.0 + a * (x * x - 1.0))
    return a, x, ra, rg, rh, rq


# -- plain mean gaps -----------------------------------------------------------

def _msa_terms(par, p, q):
    a, x, ra, rg, rh, rq = _ratios(par, p, q)
    return q * (rq - ra)


register(FamilyEntry(
    name="m_sa",
    value=lambda par, p, q: float(np.sum(_msa_terms(par, p, q))),
    grad=lambda par, p, q: (lambda a, x, ra, rg, rh, rq:
                            (1.0 - a) * (1.0 / rq - 1.0))(*_ratios(par, p, q)),
    terms=_msa_terms,
    params=_ALPHA,
    uv=lambda par, p, q: (lambda a, x, ra, rg, rh, rq:
                          (np.full_like(q, 1.0 - a), (1.0 - a) / rq))(*_ratios(par, p, q)),
    samples=({"alpha": 0.5}, {"alpha": 0.3}),
    note="quadratic minus arithmetic mean; symmetric only at alpha = 1/2",
))


def _msg_terms(par, p, q):
    a, x, ra, rg, rh, rq = _ratios(par, p, q)
    return q * (rq - rg)


register(FamilyEntry(
    name="m_sg",
    value=lambda par, p, q: float(np.sum(_msg_terms(par, p, q))),
    grad=lambda par, p, q: (lambda a, x, ra, rg, rh, rq:
                            (1.0 - a) * (1.0 / rq - rg))(*_ratios(par, p, q)),
    terms=_msg_terms,
    params=_ALPHA,
    uv=lambda par, p, q: (lambda a, x, ra, rg, rh, rq:
                          ((1.0 - a) * rg, (1.0 - a) / rq))(*_ratios(par, p, q)),
    samples=({"alpha": 0.5}, {"alpha": 0.7}),
    note="quadratic minus geometric mean",
))


def _msh_terms(par, p, q):
    a, x, ra, rg, rh, rq = _ratios(par, p, q)
    return q * (rq - rh)


register(FamilyEntry(
    name="m_sh",
    value=lambda par, p, q: float(np.sum(_msh_terms(par, p, q))),
    grad=lambda par, p, q: (lambda a, x, ra, rg, rh, rq:
                            (1.0 - a) * (1.0 / rq - rh * rh))(*_ratios(par, p, q)),
    terms=_msh_terms,
    params=_ALPHA,
    uv=lambda par, p, q: (lambda a, x, ra, rg, rh, rq:
                          ((1.0 - a) * rh * rh, (1.0 - a) / rq))(*_ratios(par, p, q)),
    samples=({"alpha": 0.5}, {"alpha": 0.4}),
    note="quadratic minus harmonic mean",
))


def _mag_terms(par, p, q):
    a, x, ra, rg, rh, rq = _ratios(par, p, q)
    return q * (ra - rg) / (1.0 - a)


register(FamilyEntry(
    name="m_ag",
    value=lambda par, p, q: float(np.sum(_mag_terms(par, p, q))),
    grad=lambda par, p, q: 1.0 - (p / q) ** par["alpha"],
    terms=_mag_terms,
    params=_ALPHA,
    k0=lambda par, p, q: float(
        (np.sum(q * (p / q) ** par["alpha"]) / np.sum(q)) ** (1.0 / par["alpha"])),
    uv=lambda par, p, q: ((p / q) ** par["alpha"], np.ones_like(q)),
    samples=({"alpha": 0.5}, {"alpha": 0.25}),
    note="arithmetic minus geometric mean with a 1/(1-alpha) prefactor that "
         "keeps the same gradient scale across the weight range",
))


def _mah_terms(par, p, q):
    a, x, ra, rg, rh, rq = _ratios(par, p, q)
    return q * (ra - rh)


register(FamilyEntry(
    name="m_ah",
    value=lambda par, p, q: float(np.sum(_mah_terms(par, p, q))),
    grad=lambda par, p, q: (lambda a, x, ra, rg, rh, rq:
                            (1.0 - a) * (1.0 - rh * rh))(*_ratios(par, p, q)),
    terms=_mah_terms,
    params=_ALPHA,
    uv=lambda par, p, q: (lambda a, x, ra, rg, rh, rq:
                          ((1.0 - a) * rh * rh, np.full_like(q, 1.0 - a)))(*_ratios(par, p, q)),
    samples=({"alpha": 0.5}, {"alpha": 0.6}),
    note="arithmetic minus harmonic mean; at alpha = 1/2 equals toussaint",
))


# -- log-of-sum variants --------------------------------------------------------

def _lm_value(hi: str, lo: str, signed: bool = False):
    def value(par, p, q):
        a, x, ra, rg, rh, rq = _ratios(par, p, q)
        pick = {"a": ra, "g": rg, "h": rh, "q": rq}
        s_hi = float(np.sum(q * pick[hi]))
        s_lo = float(np.sum(q * pick[lo]))
        if signed:
            return (np.log(s_lo) - np.log(s_hi)) / (par["alpha"] - 1.0)
        return float(np.log(s_hi) - np.log(s_lo))
    return value


def _lmsa_grad(par, p, q):
    a, x, ra, rg, rh, rq = _ratios(par, p, q)
    sq, sa = float(np.sum(q * rq)), float(np.sum(q * ra))
    return (1.0 - a) * ((1.0 / rq) / sq - 1.0 / sa)


def _lmsg_grad(par, p, q):
    a, x, ra, rg, rh, rq = _ratios(par, p, q)
    sq, sg = float(np.sum(q * rq)), float(np.sum(q * rg))
    return (1.0 - a) * ((1.0 / rq) / sq - rg / sg)


def _lmsh_grad(par, p, q):
    a, x, ra, rg, rh, rq = _ratios(par, p, q)
    sq, sh = float(np.sum(q * rq)), float(np.sum(q * rh))
    return (1.0 - a) * ((1.0 / rq) / sq - rh * rh / sh)


def _lmag_grad(par, p, q):
    a, x, ra, rg, rh, rq = _ratios(par, p, q)
    sa, sg = float(np.sum(q * ra)), float(np.sum(q * rg))
    # the 1/(alpha - 1) prefactor of the value cancels against the log slopes
    return 1.0 / sa - rg / sg


def _lmah_grad(par, p, q):
    a, x, ra, rg, rh, rq = _ratios(par, p, q)
    sa, sh = float(np.sum(q * ra)), float(np.sum(q * rh))
    return (1.0 - a) * (1.0 / sa - rh * rh / sh)


register(FamilyEntry(
    name="lm_sa", value=_lm_value("q", "a"), grad=_lmsa_grad, params=_ALPHA,
    uv=lambda par, p, q: (lambda a, x, ra, rg, rh, rq:
                          (np.full_like(q, (1.0 - a) / float(np.sum(q * ra))),
                           (1.0 - a) / rq / float(np.sum(q * rq))))(*_ratios(par, p, q)),
    samples=({"alpha": 0.5}, {"alpha": 0.3}),
    note="log of the quadratic-mean sum minus log of the arithmetic-mean sum; "
         "a whole-field functional, so no per-point terms",
))

register(FamilyEntry(
    name="lm_sg", value=_lm_value("q", "g"), grad=_lmsg_grad, params=_ALPHA,
    samples=({"alpha": 0.5}, {"alpha": 0.7}),
    note="log-sum gap between the quadratic and geometric means",
))

register(FamilyEntry(
    name="lm_sh", value=_lm_value("q", "h"), grad=_lmsh_grad, params=_ALPHA,
    samples=({"alpha": 0.5}, {"alpha": 0.4}),
    note="log-sum gap between the quadratic and harmonic means",
))

register(FamilyEntry(
    name="lm_ag", value=_lm_value("a", "g", signed=True), grad=_lmag_grad,
    params=_ALPHA,
    samples=({"alpha": 0.5}, {"alpha": 0.25}),
    note="log-sum gap between the arithmetic and geometric means, scaled by "
         "1/(alpha-1); on unit-sum fields it matches the log power-sum family",
))

register(FamilyEntry(
    name="lm_ah", value=_lm_value("a", "h"), grad=_lmah_grad, params=_ALPHA,
    samples=({"alpha": 0.5}, {"alpha": 0.6}),
    note="log-sum gap between the arithmetic and harmonic means",
))
