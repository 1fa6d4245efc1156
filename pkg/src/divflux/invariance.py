"""Scale-invariance machinery: factors, invariant divergences, log forms.

A divergence D(p||q) becomes scale-invariant in q by composing it with a
positive factor K(p, q) that is homogeneous of degree -1 in q:
DI(p||q) = D(p || K(p,q) q). Three factor kinds are supported:

* nominal: the minimizer of D(p || K q) over K > 0, available in closed
  form for the power-type families (each registry entry that knows its
  factor exposes it); requesting it elsewhere raises NoClosedForm.
* kstar: the universal factor sum(p)/sum(q), usable with any family.
* general: (sum p^a q^b / sum p^d q^g)^mu with the two constraints
  a + b = d + g and mu (g - b) = 1, which are exactly what the invariance
  differential equation K + sum_j q_j dK/dq_j = 0 requires.

Applying a logarithm to each of the two positive terms of a nominal
invariant divergence gives the log form, which is invariant under scale
changes of BOTH arguments. The per-family positive splits live here, not
in the registry, because they are a property of the composed (invariant)
expression rather than of the raw divergence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .catalog import DivergenceSpec, evaluate, get_entry, gradient_q
from .convex import LIMIT_EPS, conform
from .errors import DomainError, NoClosedForm, NotDecomposable, ParamError

__all__ = [
    "InvarianceFactorKind",
    "NOMINAL",
    "KSTAR",
    "general_kind",
    "nominal_factor",
    "kstar_factor",
    "numeric_factor",
    "factor_value",
    "factor_grad_q",
    "diffeq_residual",
    "InvariantDivergence",
    "make_invariant",
    "log_form",
    "fundamental_residual",
    "ordering_check",
    "general_params_for",
]


# ---------------------------------------------------------------------------
# factor kinds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InvarianceFactorKind:
    """Invariance-factor descriptor: nominal, kstar, or general(a,b,d,g,mu)."""

    kind: str
    params: tuple[float, float, float, float, float] | None = None

    def __post_init__(self):
        if self.kind not in ("nominal", "kstar", "general"):
            raise ParamError(f"unknown factor kind {self.kind!r}")
        if self.kind == "general":
            if self.params is None or len(self.params) != 5:
                raise ParamError("general factor needs (alpha, beta, delta, gamma, mu)")
            a, b, d, g, mu = self.params
            if abs((a + b) - (d + g)) > 1e-12:
                raise ParamError(
                    f"general factor requires alpha+beta = delta+gamma, "
                    f"got {a + b!r} vs {d + g!r}")
            if abs(mu * (g - b) - 1.0) > 1e-12:
                raise ParamError(
                    f"general factor requires mu*(gamma-beta) = 1, got {mu * (g - b)!r}")
        elif self.params is not None:
            raise ParamError(f"{self.kind} factor takes no parameters")


NOMINAL = InvarianceFactorKind("nominal")
KSTAR = InvarianceFactorKind("kstar")


def general_kind(alpha: float, beta: float, delta: float, gamma: float,
                 mu: float) -> InvarianceFactorKind:
    return InvarianceFactorKind("general", (float(alpha), float(beta),
                                            float(delta), float(gamma), float(mu)))


def kstar_factor(p, q) -> float:
    pa, qa = conform(p, q, strict_p=False, strict_q=False)
    sq = float(np.sum(qa))
    if sq <= 0.0:
        raise DomainError("kstar factor needs sum(q) > 0")
    return float(np.sum(pa)) / sq


def nominal_factor(spec: DivergenceSpec, p, q) -> float:
    """Closed-form minimizer of D(p || K q) over K > 0, when the family has one."""
    entry = get_entry(spec.family)
    if entry.k0 is None:
        raise NoClosedForm(
            f"{spec.family} has no closed-form nominal factor; "
            "fall back to the kstar factor or numeric_factor")
    pa, qa = conform(p, q, strict_p=True, strict_q=True)
    return float(entry.k0(spec.params_dict, pa, qa))


def numeric_factor(spec: DivergenceSpec, p, q, tol: float = 1e-10) -> float:
    """Golden-section minimizer of K -> D(p || K q), for experimentation.

    Brackets around the kstar value, expanding until the minimum is interior.
    """
    pa, qa = conform(p, q, strict_p=True, strict_q=True)

    def obj(k: float) -> float:
        return evaluate(spec, pa, k * qa)

    center = kstar_factor(pa, qa)
    lo, hi = center / 4.0, center * 4.0
    for _ in range(80):
        if obj(lo) > obj(lo * 1.01):
            break
        lo /= 4.0
    for _ in range(80):
        if obj(hi) > obj(hi / 1.01):
            break
        hi *= 4.0
    phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = obj(c), obj(d)
    while b - a > tol * max(1.0, abs(a) + abs(b)):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = obj(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = obj(d)
    return 0.5 * (a + b)


def _general_value(params, pa, qa) -> float:
    a, b, d, g, mu = params
    s1 = float(np.sum(pa ** a * qa ** b))
    s2 = float(np.sum(pa ** d * qa ** g))
    if s1 <= 0.0 or s2 <= 0.0:
        raise DomainError("general factor sums must be positive")
    return (s1 / s2) ** mu


def _general_grad(params, pa, qa) -> np.ndarray:
    a, b, d, g, mu = params
    s1 = float(np.sum(pa ** a * qa ** b))
    s2 = float(np.sum(pa ** d * qa ** g))
    k = (s1 / s2) ** mu
    return mu * k * (b * pa ** a * qa ** (b - 1.0) / s1
                     - g * pa ** d * qa ** (g - 1.0) / s2)


def factor_value(kind, p, q, spec: DivergenceSpec | None = None) -> float:
    """Evaluate a factor kind; nominal needs the divergence spec.

    A plain callable (p, q) -> float is also accepted, mainly so that
    candidate factors can be run through diffeq_residual.
    """
    if not isinstance(kind, InvarianceFactorKind):
        return float(kind(p, q))
    if kind.kind == "kstar":
        return kstar_factor(p, q)
    if kind.kind == "general":
        pa, qa = conform(p, q, strict_p=True, strict_q=True)
        return _general_value(kind.params, pa, qa)
    if spec is None:
        raise ParamError("nominal factor evaluation needs the divergence spec")
    return nominal_factor(spec, p, q)


def factor_grad_q(kind: InvarianceFactorKind, p, q,
                  spec: DivergenceSpec | None = None,
                  h: float = 1e-6) -> np.ndarray:
    """Gradient of the factor with respect to q.

    Closed form for kstar and general; central finite differences with a
    relative step for nominal (its closed forms vary per family).
    """
    pa, qa = conform(p, q, strict_p=True, strict_q=True)
    if kind.kind == "kstar":
        return np.full_like(qa, -kstar_factor(pa, qa) / float(np.sum(qa)))
    if kind.kind == "general":
        return _general_grad(kind.params, pa, qa)
    out = np.zeros_like(qa)
    for j in range(qa.size):
        step = h * qa[j]
        qp, qm = qa.copy(), qa.copy()
        qp[j] += step
        qm[j] -= step
        out[j] = (factor_value(kind, pa, qp, spec)
                  - factor_value(kind, pa, qm, spec)) / (2.0 * step)
    return out


def diffeq_residual(kind, p, q, spec: DivergenceSpec | None = None) -> float:
    """Residual of K + sum_j q_j dK/dq_j, the scale-invariance condition.

    Any valid factor satisfies it (the factor is homogeneous of degree -1
    in q); the derivative is taken by central differences, step 1e-6 q_j.
    """
    pa, qa = conform(p, q, strict_p=True, strict_q=True)
    k = factor_value(kind, pa, qa, spec)
    total = k
    for j in range(qa.size):
        step = 1e-6 * qa[j]
        qp, qm = qa.copy(), qa.copy()
        qp[j] += step
        qm[j] -= step
        dk = (factor_value(kind, pa, qp, spec)
              - factor_value(kind, pa, qm, spec)) / (2.0 * step)
        total += qa[j] * dk
    return abs(total)


# general-family parameters reproducing each closed-form nominal factor;
# the dual-log family is an exponential mean and has no such parameters
def general_params_for(spec: DivergenceSpec):
    par = spec.params_dict
    fam = spec.family
    if fam in ("kl",):
        return (1.0, 0.0, 0.0, 1.0, 1.0)
    if fam == "eqm":
        return (1.0, 1.0, 0.0, 2.0, 1.0)
    if fam == "neyman_chi2":
        return (2.0, -1.0, 0.0, 1.0, 0.5)
    if fam == "pearson_chi2":
        return (0.0, 1.0, -1.0, 2.0, 1.0)
    if fam == "hellinger":
        return (0.5, 0.5, 0.0, 1.0, 2.0)
    if fam == "itakura_saito":
        return (1.0, -1.0, 0.0, 0.0, 1.0)
    if fam in ("alpha", "havrda_charvat", "m_ag"):
        lam = par.get("lambda", par.get("alpha"))
        if abs(lam) < LIMIT_EPS:
            return None
        return (lam, 1.0 - lam, 0.0, 1.0, 1.0 / lam)
    if fam == "alpha_dual":
        lam = 1.0 - par["lambda"]
        if abs(lam) < LIMIT_EPS:
            return None
        return (lam, 1.0 - lam, 0.0, 1.0, 1.0 / lam)
    if fam == "beta":
        lam = par["lambda"]
        return (1.0, lam - 1.0, 0.0, lam, 1.0)
    if fam == "beta_dual":
        lam = par["lambda"]
        if abs(lam - 1.0) < LIMIT_EPS:
            return None
        return (lam - 1.0, 1.0, 0.0, lam, 1.0 / (lam - 1.0))
    if fam == "ab":
        a, b = par["a"], par["b"]
        if abs(a) < LIMIT_EPS:
            return None
        return (a, b - 1.0, 0.0, a + b - 1.0, 1.0 / a)
    if fam == "ab_dual":
        a, b = par["a"], par["b"]
        if abs(b - 1.0) < LIMIT_EPS:
            return None
        return (b - 1.0, a, 0.0, a + b - 1.0, 1.0 / (b - 1.0))
    return None


# ---------------------------------------------------------------------------
# invariant divergences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InvariantDivergence:
    """A divergence composed with an invariance factor, optionally log-form."""

    base: DivergenceSpec
    factor: InvarianceFactorKind
    log_form: bool = False

    def factor_value(self, p, q) -> float:
        return factor_value(self.factor, p, q, self.base)

    def value(self, p, q) -> float:
        if self.log_form:
            split = _log_split(self.base)
            pa, qa = conform(p, q, strict_p=True, strict_q=True)
            return split.value(self.base.params_dict, pa, qa)
        k = factor_value(self.factor, p, q, self.base)
        qa = np.asarray(q, dtype=float)
        return evaluate(self.base, p, k * qa)

    def gradient_q(self, p, q) -> np.ndarray:
        pa, qa = conform(p, q, strict_p=True, strict_q=True)
        if self.log_form:
            split = _log_split(self.base)
            return split.grad(self.base.params_dict, pa, qa)
        k = factor_value(self.factor, pa, qa, self.base)
        g = gradient_q(self.base, pa, k * qa)
        if self.factor.kind == "nominal":
            # the dK/dq chain term carries sum_i q_i g_i(p, K0 q), which is
            # K0's own stationarity condition: it vanishes identically
            return k * g
        if self.factor.kind == "kstar":
            qbar = qa / float(np.sum(qa))
            return k * (g - float(np.sum(qbar * g)))
        dk = _general_grad(self.factor.params, pa, qa)
        return k * g + dk * float(np.sum(qa * g))


def make_invariant(base: DivergenceSpec,
                   factor: InvarianceFactorKind) -> InvariantDivergence:
    if factor.kind == "nominal" and get_entry(base.family).k0 is None:
        raise NoClosedForm(
            f"{base.family} has no closed-form nominal factor; use KSTAR "
            "or a general kind")
    return InvariantDivergence(base, factor)


def fundamental_residual(inv: InvariantDivergence, p, q) -> float:
    """|sum_j q_j dDI/dq_j|, identically zero for scale-invariant forms."""
    pa, qa = conform(p, q, strict_p=True, strict_q=True)
    return abs(float(np.sum(qa * inv.gradient_q(pa, qa))))


def ordering_check(spec: DivergenceSpec, p, q,
                   k1: InvarianceFactorKind) -> tuple[float, float, float]:
    """(D(p||K0 q), D(p||K1 q), D(p||q)): the first is lowest by definition."""
    pa, qa = conform(p, q, strict_p=True, strict_q=True)
    k0 = nominal_factor(spec, pa, qa)
    kv = factor_value(k1, pa, qa, spec)
    return (evaluate(spec, pa, k0 * qa),
            evaluate(spec, pa, kv * qa),
            evaluate(spec, pa, qa))


# ---------------------------------------------------------------------------
# log forms: per-family positive splits of the nominal invariant value
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _LogSplit:
    value: Callable[[dict, np.ndarray, np.ndarray], float]
    grad: Callable[[dict, np.ndarray, np.ndarray], np.ndarray]


def _split_guard(cond: bool, why: str):
    if cond:
        raise NotDecomposable(why)


# power family: invariant value (1/(lam-1)) [K0 sum(q) - sum(p)] with
# K0 = (sum p^lam q^(1-lam) / sum q)^(1/lam)
def _power_log_value(lam: float, pa, qa) -> float:
    _split_guard(abs(lam) < LIMIT_EPS or abs(lam - 1.0) < LIMIT_EPS,
                 "power-family log form undefined at the 0/1 limit orders")
    s = float(np.sum(pa ** lam * qa ** (1.0 - lam)))
    t1 = np.log(s) / lam + (1.0 - 1.0 / lam) * np.log(float(np.sum(qa)))
    return (t1 - np.log(float(np.sum(pa)))) / (lam - 1.0)


def _power_log_grad(lam: float, pa, qa) -> np.ndarray:
    _split_guard(abs(lam) < LIMIT_EPS or abs(lam - 1.0) < LIMIT_EPS,
                 "power-family log form undefined at the 0/1 limit orders")
    s = float(np.sum(pa ** lam * qa ** (1.0 - lam)))
    return (1.0 / float(np.sum(qa)) - (pa / qa) ** lam / s) / lam


def _alpha_split(key: str, transform=lambda v: v, scale=lambda v: 1.0) -> _LogSplit:
    def val(par, pa, qa):
        lam = transform(par[key])
        return scale(lam) * _power_log_value(lam, pa, qa)

    def grd(par, pa, qa):
        lam = transform(par[key])
        return scale(lam) * _power_log_grad(lam, pa, qa)

    return _LogSplit(val, grd)


# beta family: invariant value (1/(lam(lam-1))) [sum p^lam - K0^lam sum q^lam]
def _beta_log_value(par, pa, qa) -> float:
    lam = par["lambda"]
    _split_guard(abs(lam) < LIMIT_EPS or abs(lam - 1.0) < LIMIT_EPS,
                 "beta log form undefined at the 0/1 limit orders")
    t1 = np.log(float(np.sum(pa ** lam)))
    t2 = (lam * np.log(float(np.sum(pa * qa ** (lam - 1.0))))
          + (1.0 - lam) * np.log(float(np.sum(qa ** lam))))
    return (t1 - t2) / (lam * (lam - 1.0))


def _beta_log_grad(par, pa, qa) -> np.ndarray:
    lam = par["lambda"]
    _split_guard(abs(lam) < LIMIT_EPS or abs(lam - 1.0) < LIMIT_EPS,
                 "beta log form undefined at the 0/1 limit orders")
    return (qa ** (lam - 1.0) / float(np.sum(qa ** lam))
            - pa * qa ** (lam - 2.0) / float(np.sum(pa * qa ** (lam - 1.0))))


def _beta_dual_log_value(par, pa, qa) -> float:
    lam = par["lambda"]
    _split_guard(abs(lam) < LIMIT_EPS or abs(lam - 1.0) < LIMIT_EPS,
                 "beta log form undefined at the 0/1 limit orders")
    t2 = (lam * np.log(float(np.sum(qa * pa ** (lam - 1.0))))
          - np.log(float(np.sum(qa ** lam)))) / (lam - 1.0)
    return (np.log(float(np.sum(pa ** lam))) - t2) / lam


def _beta_dual_log_grad(par, pa, qa) -> np.ndarray:
    lam = par["lambda"]
    _split_guard(abs(lam) < LIMIT_EPS or abs(lam - 1.0) < LIMIT_EPS,
                 "beta log form undefined at the 0/1 limit orders")
    return (qa ** (lam - 1.0) / float(np.sum(qa ** lam))
            - pa ** (lam - 1.0) / float(np.sum(qa * pa ** (lam - 1.0)))) / (lam - 1.0)


# two-parameter family: invariant value [sum p^c - K0^c sum q^c]/((b-1) c)
def _ab_log_value_g(a: float, b: float, pa, qa) -> float:
    c = a + b - 1.0
    _split_guard(abs(a) < LIMIT_EPS or abs(b - 1.0) < LIMIT_EPS
                 or abs(c) < LIMIT_EPS,
                 "two-parameter log form undefined on its limit lines")
    t1 = np.log(float(np.sum(pa ** c)))
    t2 = ((c / a) * np.log(float(np.sum(pa ** a * qa ** (b - 1.0))))
          + (1.0 - c / a) * np.log(float(np.sum(qa ** c))))
    return (t1 - t2) / ((b - 1.0) * c)


def _ab_log_grad_g(a: float, b: float, pa, qa) -> np.ndarray:
    c = a + b - 1.0
    _split_guard(abs(a) < LIMIT_EPS or abs(b - 1.0) < LIMIT_EPS
                 or abs(c) < LIMIT_EPS,
                 "two-parameter log form undefined on its limit lines")
    return (qa ** (c - 1.0) / float(np.sum(qa ** c))
            - pa ** a * qa ** (b - 2.0)
            / float(np.sum(pa ** a * qa ** (b - 1.0)))) / a


def _simple_split(value_terms: Callable, grad_terms: Callable) -> _LogSplit:
    return _LogSplit(lambda par, pa, qa: value_terms(pa, qa),
                     lambda par, pa, qa: grad_terms(pa, qa))


def _eqm_log_value(pa, qa) -> float:
    return float(np.log(np.sum(pa * pa)) - 2.0 * np.log(np.sum(pa * qa))
                 + np.log(np.sum(qa * qa)))


def _eqm_log_grad(pa, qa) -> np.ndarray:
    return 2.0 * (qa / float(np.sum(qa * qa)) - pa / float(np.sum(pa * qa)))


def _is_log_value(pa, qa) -> float:
    x = pa / qa
    n = pa.size
    return float(n * np.log(np.sum(x) / n) - np.sum(np.log(x)))


def _is_log_grad(pa, qa) -> np.ndarray:
    x = pa / qa
    return (1.0 - x.size * x / float(np.sum(x))) / qa


def _neyman_log_value(pa, qa) -> float:
    return float(np.log(np.sum(pa * pa / qa)) + np.log(np.sum(qa))
                 - 2.0 * np.log(np.sum(pa)))


def _neyman_log_grad(pa, qa) -> np.ndarray:
    return 1.0 / float(np.sum(qa)) - (pa / qa) ** 2 / float(np.sum(pa * pa / qa))


def _pearson_log_value(pa, qa) -> float:
    return float(np.log(np.sum(pa)) - 2.0 * np.log(np.sum(qa))
                 + np.log(np.sum(qa * qa / pa)))


def _pearson_log_grad(pa, qa) -> np.ndarray:
    return 2.0 * ((qa / pa) / float(np.sum(qa * qa / pa)) - 1.0 / float(np.sum(qa)))


def _hellinger_log_value(pa, qa) -> float:
    return float(np.log(np.sum(pa)) + np.log(np.sum(qa))
                 - 2.0 * np.log(np.sum(np.sqrt(pa * qa))))


def _hellinger_log_grad(pa, qa) -> np.ndarray:
    return 1.0 / float(np.sum(qa)) - np.sqrt(pa / qa) / float(np.sum(np.sqrt(pa * qa)))


_LOG_SPLITS: dict[str, _LogSplit] = {
    "alpha": _alpha_split("lambda"),
    "havrda_charvat": _alpha_split("alpha"),
    "alpha_dual": _alpha_split("lambda", transform=lambda v: 1.0 - v),
    # the arithmetic-geometric gap is alpha times the power-family value
    "m_ag": _alpha_split("alpha", scale=lambda v: v),
    "beta": _LogSplit(_beta_log_value, _beta_log_grad),
    "beta_dual": _LogSplit(_beta_dual_log_value, _beta_dual_log_grad),
    "ab": _LogSplit(lambda par, pa, qa: _ab_log_value_g(par["a"], par["b"], pa, qa),
                    lambda par, pa, qa: _ab_log_grad_g(par["a"], par["b"], pa, qa)),
    "ab_dual": _LogSplit(
        lambda par, pa, qa: _ab_log_value_g(par["b"] - 1.0, par["a"] + 1.0, pa, qa),
        lambda par, pa, qa: _ab_log_grad_g(par["b"] - 1.0, par["a"] + 1.0, pa, qa)),
    "eqm": _simple_split(_eqm_log_value, _eqm_log_grad),
    "itakura_saito": _simple_split(_is_log_value, _is_log_grad),
    "neyman_chi2": _simple_split(_neyman_log_value, _neyman_log_grad),
    "pearson_chi2": _simple_split(_pearson_log_value, _pearson_log_grad),
    "hellinger": _simple_split(_hellinger_log_value, _hellinger_log_grad),
}


def _log_split(base: DivergenceSpec) -> _LogSplit:
    split = _LOG_SPLITS.get(base.family)
    if split is None:
        raise NotDecomposable(
            f"{base.family} has no two-positive-term split; no log form exists")
    return split


def log_form(inv: InvariantDivergence) -> InvariantDivergence:
    """Log version of a nominal invariant divergence, invariant in both fields."""
    if inv.factor.kind != "nominal":
        raise NotDecomposable(
            "log forms are defined for the nominal-factor composition only")
    _log_split(inv.base)  # fail fast when the family has no split
    return InvariantDivergence(inv.base, inv.factor, log_form=True)
