"""Registry plumbing for the divergence catalog.

Every catalog family is a FamilyEntry: a pair of closed-form callables
(value, gradient with respect to the second field) plus machine-readable
parameter metadata and capability flags.  Entries are registered at import
time by the chapter modules and frozen afterwards.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Mapping

import numpy as np

from ..convex import LIMIT_EPS, conform
from ..errors import ParamError

__all__ = [
    "DivergenceSpec",
    "FamilyEntry",
    "ParamSpec",
    "evaluate",
    "family_names",
    "get_entry",
    "gradient_q",
    "metadata_table",
    "reduce_special_case",
    "value_terms",
]


# ---------------------------------------------------------------------------
# small numeric helpers shared by the family closures

def mix(q: np.ndarray, p: np.ndarray, w: float) -> np.ndarray:
    """Pointwise mixture w*p + (1-w)*q, grouped as q + w*(p-q).

    The grouping makes the result bitwise equal to q when p == q, which is
    what keeps divergence values exactly zero at identical fields.
    """
    return q + w * (p - q)


def geo_mix(q: np.ndarray, p: np.ndarray, w: float) -> np.ndarray:
    """Pointwise geometric mixture p^w * q^(1-w), grouped as q*(p/q)^w."""
    return q * (p / q) ** w


def quad_mix(q: np.ndarray, p: np.ndarray, w: float) -> np.ndarray:
    """Pointwise quadratic mixture sqrt(w*p^2 + (1-w)*q^2), grouped so that
    the result is bitwise q when p == q (sqrt(q*q) == q in IEEE arithmetic)."""
    return np.sqrt(q * q + w * (p * p - q * q))


def harm_mix(q: np.ndarray, p: np.ndarray, w: float) -> np.ndarray:
    """Pointwise harmonic mixture p*q/(w*q + (1-w)*p), grouped as q*(p/d)."""
    d = p + w * (q - p)
    return q * (p / d)


def xlogx(v: np.ndarray) -> np.ndarray:
    """v*log(v) with the 0*log(0) -> 0 convention."""
    out = np.zeros_like(v, dtype=float)
    m = v > 0.0
    out[m] = v[m] * np.log(v[m])
    return out


def plog(p: np.ndarray, ratio: np.ndarray) -> np.ndarray:
    """p*log(ratio) where entries with p == 0 contribute 0."""
    out = np.zeros_like(p, dtype=float)
    m = p > 0.0
    out[m] = p[m] * np.log(ratio[m])
    return out


def gen_log_arr(u: np.ndarray, d: float) -> np.ndarray:
    """Generalized logarithm (u^(1-d) - 1)/(1-d), plain log at d = 1.

    expm1 keeps the value accurate for d arbitrarily close to 1, where the
    direct power bracket would cancel.
    """
    if abs(d - 1.0) < LIMIT_EPS:
        return np.log(u)
    return np.expm1((1.0 - d) * np.log(u)) / (1.0 - d)


# ---------------------------------------------------------------------------
# registry records

@dataclass(frozen=True)
class ParamSpec:
    """One named scalar parameter: admissibility test plus a range string
    that is shown to users in errors and in the metadata table."""

    name: str
    check: Callable[[float], bool]
    range_text: str


@dataclass(frozen=True)
class FamilyEntry:
    name: str
    value: Callable[[Mapping[str, float], np.ndarray, np.ndarray], float]
    grad: Callable[[Mapping[str, float], np.ndarray, np.ndarray], np.ndarray]
    params: tuple[ParamSpec, ...] = ()
    # cross-parameter admissibility; raises ParamError itself
    validate: Callable[[Mapping[str, float]], None] | None = None
    # per-point summands (sum == value); None when the value is not separable
    terms: Callable[[Mapping[str, float], np.ndarray, np.ndarray], np.ndarray] | None = None
    strict_p: bool | Callable[[Mapping[str, float]], bool] = False
    strict_q: bool = True
    symmetric: bool = False
    standard: bool = True
    diagnostic: bool = False
    dual_of: str | None = None
    nonneg_on_normalized_only: bool = False
    # nominal scale factor K0(p, q) minimizing D(p || K q); None if no closed form
    k0: Callable[[Mapping[str, float], np.ndarray, np.ndarray], float] | None = None
    # split of -gradient into (U, V), both componentwise >= 0, for
    # multiplicative updates; None when no natural nonnegative split exists
    uv: Callable[[Mapping[str, float], np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]] | None = None
    # canonical equivalent spec for parameter values at a limit; None otherwise
    reduces: Callable[[Mapping[str, float]], "DivergenceSpec | None"] | None = None
    samples: tuple[Mapping[str, float], ...] = (MappingProxyType({}),)
    note: str = ""

    def needs_strict_p(self, par: Mapping[str, float]) -> bool:
        if callable(self.strict_p):
            return bool(self.strict_p(par))
        return self.strict_p

    def check_params(self, par: Mapping[str, float]) -> None:
        wanted = {ps.name for ps in self.params}
        got = set(par)
        if got != wanted:
            missing = sorted(wanted - got)
            extra = sorted(got - wanted)
            bits = []
            if missing:
                bits.append(f"missing {missing}")
            if extra:
                bits.append(f"unexpected {extra}")
            raise ParamError(f"family '{self.name}': " + ", ".join(bits)
                             + f"; required parameters: {sorted(wanted) or 'none'}")
        for ps in self.params:
            v = par[ps.name]
            if not np.isfinite(v) or not ps.check(float(v)):
                raise ParamError(
                    f"family '{self.name}': parameter {ps.name}={v!r} outside "
                    f"admissible range ({ps.range_text})")
        if self.validate is not None:
            self.validate(par)


_REGISTRY: dict[str, FamilyEntry] = {}


def register(entry: FamilyEntry) -> FamilyEntry:
    if entry.name in _REGISTRY:
        raise ValueError(f"duplicate family '{entry.name}'")
    _REGISTRY[entry.name] = entry
    return entry


def get_entry(family: str) -> FamilyEntry:
    try:
        return _REGISTRY[family]
    except KeyError:
        known = ", ".join(sorted(_REGISTRY))
        raise ParamError(f"unknown family '{family}'; known families: {known}") from None


def family_names() -> tuple[str, ...]:
    return tuple(sorted(_REGISTRY))


# ---------------------------------------------------------------------------
# user-facing spec

@dataclass(frozen=True, init=False)
class DivergenceSpec:
    """A catalog family plus a concrete, validated parameter assignment."""

    family: str
    params: tuple[tuple[str, float], ...]

    def __init__(self, family: str, params: Mapping[str, float] | None = None,
                 **kw: float) -> None:
        merged: dict[str, float] = dict(params or {})
        merged.update(kw)
        entry = get_entry(family)
        entry.check_params(merged)
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "params",
                           tuple(sorted((k, float(v)) for k, v in merged.items())))

    @property
    def params_dict(self) -> dict[str, float]:
        return dict(self.params)

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        inner = ", ".join(f"{k}={v:g}" for k, v in self.params)
        return f"DivergenceSpec({self.family}{', ' + inner if inner else ''})"


def _prepared(spec: DivergenceSpec, p, q) -> tuple[FamilyEntry, dict, np.ndarray, np.ndarray]:
    entry = get_entry(spec.family)
    par = spec.params_dict
    pa, qa = conform(p, q, strict_p=entry.needs_strict_p(par), strict_q=entry.strict_q)
    return entry, par, pa, qa


def evaluate(spec: DivergenceSpec, p, q) -> float:
    """Closed-form divergence value D(p || q) for the given family."""
    entry, par, pa, qa = _prepared(spec, p, q)
    return float(entry.value(par, pa, qa))


def gradient_q(spec: DivergenceSpec, p, q) -> np.ndarray:
    """Closed-form gradient of evaluate with respect to the second field."""
    entry, par, pa, qa = _prepared(spec, p, q)
    out = np.asarray(entry.grad(par, pa, qa), dtype=float)
    return np.broadcast_to(out, qa.shape).copy() if out.shape != qa.shape else out


def value_terms(spec: DivergenceSpec, p, q) -> np.ndarray | None:
    """Per-point summands of evaluate, or None when the value does not
    decompose into a pointwise sum (logarithms of whole-field sums)."""
    entry, par, pa, qa = _prepared(spec, p, q)
    if entry.terms is None:
        return None
    return np.asarray(entry.terms(par, pa, qa), dtype=float)


def reduce_special_case(spec: DivergenceSpec) -> DivergenceSpec:
    """Canonical equivalent of a spec whose parameters sit at a documented
    reduction (e.g. a power-family parameter at a removable limit).  Returns
    the input unchanged when no reduction applies."""
    seen = {spec}
    cur = spec
    for _ in range(4):
        entry = get_entry(cur.family)
        if entry.reduces is None:
            return cur
        nxt = entry.reduces(cur.params_dict)
        if nxt is None or nxt in seen:
            return cur
        seen.add(nxt)
        cur = nxt
    return cur


def metadata_table() -> str:
    """Registry metadata as a delimited text table (one family per line)."""
    rows = ["family|params|constraints|flags|note"]
    for name in family_names():
        e = _REGISTRY[name]
        pnames = ",".join(ps.name for ps in e.params)
        ranges = "; ".join(f"{ps.name}: {ps.range_text}" for ps in e.params)
        flags = []
        if e.symmetric:
            flags.append("symmetric")
        if not e.standard:
            flags.append("non-standard")
        if e.diagnostic:
            flags.append("diagnostic")
        if e.dual_of:
            flags.append(f"dual_of={e.dual_of}")
        if e.nonneg_on_normalized_only:
            flags.append("nonneg-needs-normalized")
        if e.strict_p is True:
            flags.append("strict-p")
        elif callable(e.strict_p):
            flags.append("strict-p(param-dependent)")
        cells = [name, pnames, ranges, ",".join(flags), e.note]
        # the delimiter must never appear inside a cell
        rows.append("|".join(c.replace("|", "/") for c in cells))
    return "\n".join(rows) + "\n"
