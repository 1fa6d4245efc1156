"""Tests for the divergence registry: values, gradients, flags, reductions."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from divflux.catalog import (
    DivergenceSpec,
    evaluate,
    family_names,
    get_entry,
    ghosh_conformance,
    gradient_q,
    metadata_table,
    reduce_special_case,
    value_terms,
)
from divflux.errors import DomainError, ParamError, ShapeError


def rnd_pair(n=16, seed=0, lo=0.5, hi=3.0):
    rng = np.random.default_rng(seed)
    return rng.uniform(lo, hi, n), rng.uniform(lo, hi, n)


def all_sample_specs():
    """One DivergenceSpec per (family, sample-parameter) combination."""
    out = []
    for name in family_names():
        for par in get_entry(name).samples:
            out.append(DivergenceSpec(name, dict(par)))
    return out


SAMPLE_SPECS = all_sample_specs()
SPEC_IDS = [f"{s.family}{dict(s.params)}" for s in SAMPLE_SPECS]


# ---------------------------------------------------------------------------
# pinned values
# ---------------------------------------------------------------------------

def test_neyman_chi2_pinned():
    assert evaluate(DivergenceSpec("neyman_chi2"), [1.0, 2.0],
                    [2.0, 1.0]) == pytest.approx(1.5, abs=1e-14)


def test_hellinger_pinned():
    assert evaluate(DivergenceSpec("hellinger"), [4.0, 1.0],
                    [1.0, 1.0]) == pytest.approx(1.0, abs=1e-14)


def test_kl_pinned():
    assert evaluate(DivergenceSpec("kl"), [2.0, 1.0], [1.0, 1.0]) == pytest.approx(
        2.0 * math.log(2.0) - 1.0, abs=1e-14)
    g = gradient_q(DivergenceSpec("kl"), [2.0, 1.0], [1.0, 1.0])
    assert np.allclose(g, [-1.0, 0.0], atol=1e-14)


# ---------------------------------------------------------------------------
# identity of indiscernibles
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("spec", SAMPLE_SPECS, ids=SPEC_IDS)
def test_exact_zero_at_identity(spec):
    p, _ = rnd_pair(seed=1)
    assert evaluate(spec, p, p.copy()) == 0.0


@pytest.mark.parametrize("spec", SAMPLE_SPECS, ids=SPEC_IDS)
def test_gradient_vanishes_at_identity(spec):
    if not get_entry(spec.family).standard:
        pytest.skip("non-standard diagnostic entry")
    p, _ = rnd_pair(seed=2)
    g = gradient_q(spec, p, p.copy())
    assert np.max(np.abs(g)) <= 1e-10


def test_ikl_gradient_never_vanishes():
    # reversed-argument log entry: gradient is -1 componentwise at p=q
    p, _ = rnd_pair(seed=3)
    g = gradient_q(DivergenceSpec("ikl"), p, p.copy())
    assert np.allclose(g, -1.0, atol=1e-14)
    assert np.all(g != 0.0)


# ---------------------------------------------------------------------------
# non-negativity sweeps
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("name", family_names())
def test_nonnegativity_1000_pairs(name):
    entry = get_entry(name)
    spec = DivergenceSpec(name, dict(entry.samples[0]))
    rng = np.random.default_rng(abs(hash(name)) % 2 ** 32)
    normalized = entry.nonneg_on_normalized_only
    worst = 0.0
    for _ in range(1000):
        p = rng.uniform(0.5, 3.0, 8)
        q = rng.uniform(0.5, 3.0, 8)
        if normalized:
            p, q = p / p.sum(), q / q.sum()
        worst = min(worst, evaluate(spec, p, q))
    assert worst >= -1e-12


def test_secondary_samples_nonneg():
    rng = np.random.default_rng(99)
    for spec in SAMPLE_SPECS:
        if get_entry(spec.family).nonneg_on_normalized_only:
            continue
        for _ in range(50):
            p = rng.uniform(0.5, 3.0, 8)
            q = rng.uniform(0.5, 3.0, 8)
            assert evaluate(spec, p, q) >= -1e-12, spec.family


# ---------------------------------------------------------------------------
# duality and symmetry
# ---------------------------------------------------------------------------

DUAL_PAIRS = [(n, get_entry(n).dual_of) for n in family_names()
              if get_entry(n).dual_of]


@pytest.mark.parametrize("dual,base", DUAL_PAIRS)
def test_dual_entries_swap_arguments(dual, base):
    par = dict(get_entry(dual).samples[0])
    p, q = rnd_pair(seed=5)
    a = evaluate(DivergenceSpec(dual, par), p, q)
    b = evaluate(DivergenceSpec(base, par), q, p)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-14)


SYMMETRIC = [n for n in family_names() if get_entry(n).symmetric]


@pytest.mark.parametrize("name", SYMMETRIC)
def test_symmetric_entries(name):
    par = dict(get_entry(name).samples[0])
    p, q = rnd_pair(seed=7)
    a = evaluate(DivergenceSpec(name, par), p, q)
    b = evaluate(DivergenceSpec(name, par), q, p)
    assert a == pytest.approx(b, rel=1e-12)


def test_half_weight_symmetry_of_mean_gaps():
    # the arithmetic/geometric vs quadratic gaps are symmetric at weight 1/2
    p, q = rnd_pair(seed=8)
    for name in ("m_sa", "m_sg", "m_sh"):
        s = DivergenceSpec(name, alpha=0.5)
        assert evaluate(s, p, q) == pytest.approx(evaluate(s, q, p), rel=1e-12)


# ---------------------------------------------------------------------------
# gradients against finite differences (full sweep lives in acceptance tests)
# ---------------------------------------------------------------------------

def fd_grad(spec, p, q, h=1e-6):
    g = np.zeros_like(q)
    for j in range(q.size):
        qp, qm = q.copy(), q.copy()
        qp[j] += h
        qm[j] -= h
        g[j] = (evaluate(spec, p, qp) - evaluate(spec, p, qm)) / (2.0 * h)
    return g


@pytest.mark.parametrize("name,par", [
    ("ab", {"a": 0.6, "b": 1.8}),
    ("taneja3_hq", {"r": 2.5, "s": 1.0, "beta": 0.4}),
    ("dragomir_jd_d", {"alpha": 0.35, "d": 1.6}),
    ("fermi_dirac1", {"beta": 40.0, "d": 0.7}),
    ("lm_ah", {"alpha": 0.25}),
    ("jensen_renyi_geo", {"alpha": 1.8, "beta": 0.3}),
    ("sharma_mittal", {"alpha": 2.0, "s": 0.5}),
    ("henze_penrose", {"beta": 0.3}),
])
def test_gradient_matches_finite_difference(name, par):
    spec = DivergenceSpec(name, par)
    p, q = rnd_pair(n=10, seed=11)
    g = gradient_q(spec, p, q)
    fd = fd_grad(spec, p, q)
    assert np.max(np.abs(g - fd) / np.maximum(1.0, np.abs(g))) <= 1e-6


@given(st.integers(0, 2 ** 31 - 1))
@settings(max_examples=40, deadline=None)
def test_beta_family_gradient_property(seed):
    rng = np.random.default_rng(seed)
    lam = float(rng.uniform(-1.5, 3.0))
    spec = DivergenceSpec("beta", {"lambda": lam})
    p = rng.uniform(0.4, 2.5, 6)
    q = rng.uniform(0.4, 2.5, 6)
    g = gradient_q(spec, p, q)
    fd = fd_grad(spec, p, q)
    assert np.max(np.abs(g - fd) / np.maximum(1.0, np.abs(g))) <= 2e-6


# ---------------------------------------------------------------------------
# mean orderings, summand-wise
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("name", ["m_sa", "m_sg", "m_sh", "m_ag", "m_ah"])
def test_mean_gap_summands_nonnegative(name):
    p, q = rnd_pair(seed=13)
    for alpha in (0.1, 0.5, 0.9):
        t = value_terms(DivergenceSpec(name, alpha=alpha), p, q)
        assert t is not None
        assert np.min(t) >= -1e-15


def test_log_composed_mean_entries_have_no_terms():
    p, q = rnd_pair(seed=13)
    for name in ("lm_sa", "lm_sg", "lm_sh", "lm_ag", "lm_ah"):
        assert value_terms(DivergenceSpec(name, alpha=0.4), p, q) is None


def test_terms_sum_to_value():
    p, q = rnd_pair(seed=15)
    for spec in SAMPLE_SPECS:
        t = value_terms(spec, p, q) if spec.family not in (
            "fermi_dirac1", "fermi_dirac2") else None
        if t is None:
            continue
        v = evaluate(spec, p, q)
        assert float(np.sum(t)) == pytest.approx(v, rel=1e-9, abs=1e-12), spec.family


# ---------------------------------------------------------------------------
# special-case reductions
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("src,par,target", [
    ("alpha", {"lambda": 1.0}, "kl"),
    ("alpha", {"lambda": 0.0}, "kl_dual"),
    ("beta", {"lambda": 1.0}, "kl"),
    ("beta", {"lambda": 0.0}, "itakura_saito"),
    ("ab", {"a": 1.0, "b": 1.4}, "beta"),
    ("ab", {"a": 0.3, "b": 1.7}, "alpha"),     # a+b-1 = 1
    ("arimoto_w", {"delta": 0.0, "alpha": 0.3}, "m_ag"),
])
def test_reduce_special_case(src, par, target):
    red = reduce_special_case(DivergenceSpec(src, par))
    assert red.family == target
    p, q = rnd_pair(seed=17)
    a = evaluate(DivergenceSpec(src, par), p, q)
    b = evaluate(red, p, q)
    assert a == pytest.approx(b, rel=1e-8)


def test_reduce_chains_to_fixpoint():
    # a=1, b=1 collapses through the one-parameter family down to kl
    red = reduce_special_case(DivergenceSpec("ab", a=1.0, b=1.0))
    assert red.family == "kl"


def test_reduce_returns_input_unchanged_when_no_rule():
    s = DivergenceSpec("hellinger")
    assert reduce_special_case(s) is s
    s2 = DivergenceSpec("beta", {"lambda": 1.7})
    assert reduce_special_case(s2) == s2


# ---------------------------------------------------------------------------
# two-power-parameter conformance residual
# ---------------------------------------------------------------------------

def test_ghosh_conformance_residuals():
    p, q = rnd_pair(seed=19)
    assert ghosh_conformance(1.0, 1.0, p, q) <= 1e-10
    assert ghosh_conformance(0.7, 0.6, p, q) <= 1e-10
    assert ghosh_conformance(0.7, 0.6, p, p.copy()) == 0.0


def test_ghosh_conformance_param_errors():
    p, q = rnd_pair(seed=19)
    with pytest.raises(ParamError):
        ghosh_conformance(-1.0, 0.5, p, q)
    with pytest.raises(ParamError):
        ghosh_conformance(0.7, 0.0, p, q)


# ---------------------------------------------------------------------------
# cross-family identities (proportionality constants recorded in the docs)
# ---------------------------------------------------------------------------

def test_power_family_half_is_twice_hellinger():
    p, q = rnd_pair(seed=21)
    a = evaluate(DivergenceSpec("alpha", {"lambda": 0.5}), p, q)
    h = evaluate(DivergenceSpec("hellinger"), p, q)
    assert a == pytest.approx(2.0 * h, rel=1e-12)


def test_power_family_two_is_half_eqm():
    p, q = rnd_pair(seed=21)
    b = evaluate(DivergenceSpec("beta", {"lambda": 2.0}), p, q)
    e = evaluate(DivergenceSpec("eqm"), p, q)
    assert b == pytest.approx(0.5 * e, rel=1e-12)


def test_toussaint_is_half_triangular():
    p, q = rnd_pair(seed=23)
    t = evaluate(DivergenceSpec("toussaint"), p, q)
    tr = evaluate(DivergenceSpec("triangular"), p, q)
    assert t == pytest.approx(0.5 * tr, rel=1e-12)
    m = evaluate(DivergenceSpec("m_ah", alpha=0.5), p, q)
    assert m == pytest.approx(t, rel=1e-12)


def test_jensen_power_equals_jensen_hc():
    p, q = rnd_pair(seed=25)
    for lam, w in ((2.0, 0.3), (0.5, 0.6), (-1.0, 0.5)):
        jp = evaluate(DivergenceSpec("jensen_power", {"lambda": lam, "alpha": w}),
                      p, q)
        jh = evaluate(DivergenceSpec("jensen_hc", alpha=lam, beta=w), p, q)
        assert jp == pytest.approx(jh, rel=1e-12)


def test_jensen_power_two_is_scaled_eqm():
    p, q = rnd_pair(seed=25)
    w = 0.3
    jp = evaluate(DivergenceSpec("jensen_power", {"lambda": 2.0, "alpha": w}), p, q)
    e = evaluate(DivergenceSpec("eqm"), p, q)
    assert jp == pytest.approx(w * (1.0 - w) * 0.5 * e, rel=1e-12)


def test_dragomir_second_order_at_d_two():
    p, q = rnd_pair(seed=27)
    a = 0.3
    v = evaluate(DivergenceSpec("dragomir_jd_d", alpha=a, d=2.0), p, q)
    w = q + (1.0 - a) * (p - q)
    assert v == pytest.approx(float(np.sum((1.0 - a) ** 2 * (p - q) ** 2 / w)),
                              rel=1e-12)


def test_log_mean_gap_on_normalized_fields():
    # with both fields summing to 1 the arithmetic-mean sum is 1 and the
    # log gap reduces to the weighted-power-sum log, alpha times renyi_ext
    p, q = rnd_pair(seed=29)
    p, q = p / p.sum(), q / q.sum()
    for al in (0.3, 0.6):
        v = evaluate(DivergenceSpec("lm_ag", alpha=al), p, q)
        r = evaluate(DivergenceSpec("renyi_ext", alpha=al), p, q)
        assert v == pytest.approx(al * r, rel=1e-10)


# ---------------------------------------------------------------------------
# validation and errors
# ---------------------------------------------------------------------------

def test_unknown_family_rejected():
    with pytest.raises(ParamError):
        DivergenceSpec("nope")
    with pytest.raises(ParamError):
        get_entry("nope")


def test_missing_and_unexpected_params():
    with pytest.raises(ParamError):
        DivergenceSpec("alpha")                      # missing lambda
    with pytest.raises(ParamError):
        DivergenceSpec("kl", alpha=1.0)              # takes no params
    with pytest.raises(ParamError):
        DivergenceSpec("beta", **{"lambda": 1.0, "s": 2.0})


@pytest.mark.parametrize("name,par", [
    ("henze_penrose", {"beta": 1.0}),
    ("henze_penrose", {"beta": 0.0}),
    ("polya", {"gamma": 0.0}),
    ("bose_einstein1", {"alpha": 1.0, "d": 1.5}),
    ("fermi_dirac1", {"beta": 40.0, "d": 2.0}),
    ("fermi_dirac1", {"beta": 1.0, "d": 1.0}),
    ("sharma_mittal", {"alpha": 1.0, "s": 0.5}),
    ("bathia_singh", {"alpha": 1.5}),
    ("rukhin", {"alpha": -0.1}),
])
def test_out_of_range_params(name, par):
    with pytest.raises(ParamError):
        DivergenceSpec(name, par)


def test_arimoto_ext_cross_param_constraint():
    DivergenceSpec("arimoto_ext", delta=2.0, gamma=1.5, alpha=0.3)
    with pytest.raises(ParamError):
        DivergenceSpec("arimoto_ext", delta=2.0, gamma=2.5, alpha=0.3)


def test_fermi_dirac1_domain_error_carries_index():
    spec = DivergenceSpec("fermi_dirac1", beta=2.0, d=1.0)
    with pytest.raises(DomainError) as err:
        evaluate(spec, [1.0, 5.0, 1.0], [1.0, 1.0, 1.0])
    assert err.value.index == 1


def test_fermi_dirac2_domain_errors():
    spec = DivergenceSpec("fermi_dirac2", beta=2.0, d=1.0)
    with pytest.raises(DomainError):
        evaluate(spec, [1.0, 3.0], [1.0, 1.0])
    with pytest.raises(DomainError):
        evaluate(spec, [1.0, 1.0], [1.0, 3.0])


def test_shape_and_positivity_errors():
    with pytest.raises(ShapeError):
        evaluate(DivergenceSpec("kl"), [1.0, 2.0], [1.0])
    with pytest.raises(DomainError):
        evaluate(DivergenceSpec("kl"), [1.0, 2.0], [1.0, 0.0])
    # strict-p families reject zero entries in p as well
    with pytest.raises(DomainError):
        evaluate(DivergenceSpec("itakura_saito"), [0.0, 1.0], [1.0, 1.0])


def test_eqm_allows_zero_q():
    assert evaluate(DivergenceSpec("eqm"), [1.0, 2.0],
                    [0.0, 2.0]) == pytest.approx(1.0, abs=1e-14)


def test_sharma_mittal_mixture_domain_error():
    spec = DivergenceSpec("sharma_mittal", alpha=3.0, s=2.0)
    with pytest.raises(DomainError):
        # alpha=3 mixture q + 3(p-q) goes nonpositive for p much below q
        evaluate(spec, [0.1, 0.1], [1.0, 1.0])


def test_spec_params_are_order_insensitive():
    s1 = DivergenceSpec("ab", a=0.5, b=1.5)
    s2 = DivergenceSpec("ab", b=1.5, a=0.5)
    assert s1 == s2
    assert s1.params_dict == {"a": 0.5, "b": 1.5}


def test_spec_accepts_lambda_keyword_via_dict():
    s = DivergenceSpec("alpha", {"lambda": 2.0})
    t = DivergenceSpec("alpha", **{"lambda": 2.0})
    assert s == t


# ---------------------------------------------------------------------------
# metadata export
# ---------------------------------------------------------------------------

def test_metadata_table_shape():
    table = metadata_table()
    lines = table.strip().splitlines()
    header, rows = lines[0], lines[1:]
    assert header.split("|")[0].strip() == "family"
    assert len(rows) == len(family_names())
    for row in rows:
        assert len(row.split("|")) == 5
    # spot-check a param range is carried
    be1 = next(r for r in rows if r.startswith("bose_einstein1"))
    assert "d <= 1" in be1
