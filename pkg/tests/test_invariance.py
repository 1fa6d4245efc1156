"""Scale-invariance tests: factors, composed divergences, log forms."""

import numpy as np
import pytest

import divflux.invariance as inv
from divflux.catalog import (DivergenceSpec, evaluate, family_names,
                             get_entry, gradient_q)
from divflux.errors import (DomainError, NoClosedForm, NotDecomposable,
                            ParamError)

P2 = np.array([2.0, 1.0])
Q2 = np.array([1.0, 1.0])

K0_FAMILIES = sorted(f for f in family_names() if get_entry(f).k0 is not None)

LOG_FAMILIES = sorted(inv._LOG_SPLITS)


def first_spec(fam: str) -> DivergenceSpec:
    entry = get_entry(fam)
    return DivergenceSpec(fam, dict(entry.samples[0]) if entry.samples else None)


def rnd_pair(seed: int, n: int = 9):
    r = np.random.default_rng(seed)
    return r.uniform(0.5, 3.0, n), r.uniform(0.5, 3.0, n)


def fd_grad(fun, q, h=1e-6):
    out = np.zeros_like(q)
    for j in range(q.size):
        step = h * q[j]
        qp, qm = q.copy(), q.copy()
        qp[j] += step
        qm[j] -= step
        out[j] = (fun(qp) - fun(qm)) / (2.0 * step)
    return out


# ---------------------------------------------------------------------------
# factor kinds and values
# ---------------------------------------------------------------------------

def test_general_kind_accepts_valid_parameters():
    k = inv.general_kind(2.0, -1.0, 0.0, 1.0, 0.5)
    assert k.kind == "general"
    assert k.params == (2.0, -1.0, 0.0, 1.0, 0.5)


@pytest.mark.parametrize("bad", [
    (1.0, 0.0, 0.0, 2.0, 1.0),    # alpha+beta != delta+gamma
    (1.0, 1.0, 0.0, 2.0, 2.0),    # mu*(gamma-beta) != 1
    (2.0, -1.0, 0.0, 1.0, 1.0),   # right exponents, wrong mu
])
def test_general_kind_rejects_broken_constraints(bad):
    with pytest.raises(ParamError):
        inv.general_kind(*bad)


def test_plain_kinds_take_no_parameters():
    with pytest.raises(ParamError):
        inv.InvarianceFactorKind("kstar", (1.0, 0.0, 0.0, 1.0, 1.0))
    with pytest.raises(ParamError):
        inv.InvarianceFactorKind("banana")


def test_kstar_factor_pinned():
    assert inv.kstar_factor(P2, Q2) == 1.5


def test_kstar_factor_zero_sum_raises():
    with pytest.raises(DomainError):
        inv.kstar_factor(np.array([1.0, 1.0]), np.array([0.0, 0.0]))


def test_nominal_factor_pinned_values():
    assert inv.nominal_factor(DivergenceSpec("kl"), P2, Q2) == 1.5
    # sum(p q) / sum(q q) = 3/2
    assert inv.nominal_factor(DivergenceSpec("eqm"), P2, Q2) == 1.5
    assert inv.nominal_factor(DivergenceSpec("kl_dual"), Q2, Q2) == 1.0


def test_nominal_factor_missing_closed_form():
    p, q = rnd_pair(0)
    for fam in ("triangular", "jensen_shannon_w", "renyi_ext"):
        with pytest.raises(NoClosedForm):
            inv.nominal_factor(first_spec(fam), p, q)


def test_dual_log_factor_is_exponential_mean():
    p, q = rnd_pair(1)
    k0 = inv.nominal_factor(DivergenceSpec("kl_dual"), p, q)
    qbar = q / q.sum()
    assert k0 == pytest.approx(np.exp(np.sum(qbar * np.log(p / q))), rel=1e-14)


@pytest.mark.parametrize("fam", K0_FAMILIES)
def test_nominal_factor_is_local_minimum(fam):
    spec = first_spec(fam)
    p, q = rnd_pair(abs(hash(fam)) % 2 ** 31)
    k0 = inv.nominal_factor(spec, p, q)
    d0 = evaluate(spec, p, k0 * q)
    for eps in (1e-4, -1e-4):
        assert evaluate(spec, p, k0 * (1.0 + eps) * q) >= d0 - 1e-12 * max(1.0, abs(d0))


@pytest.mark.parametrize("fam", K0_FAMILIES)
def test_nominal_factor_homogeneity(fam):
    spec = first_spec(fam)
    p, q = rnd_pair(100 + abs(hash(fam)) % 2 ** 20)
    k = inv.nominal_factor(spec, p, q)
    for c in (1e-3, 7.0, 1e3):
        assert inv.nominal_factor(spec, p, c * q) * c == pytest.approx(k, rel=1e-12)


def test_kstar_and_general_homogeneity():
    p, q = rnd_pair(2)
    for kind in (inv.KSTAR, inv.general_kind(2.0, -1.0, 0.0, 1.0, 0.5),
                 inv.general_kind(0.5, 0.5, 0.0, 1.0, 2.0)):
        k = inv.factor_value(kind, p, q)
        for c in (1e-3, 7.0, 1e3):
            assert inv.factor_value(kind, p, c * q) * c == pytest.approx(k, rel=1e-12)


@pytest.mark.parametrize("fam", K0_FAMILIES)
def test_general_parameters_reproduce_nominal(fam):
    entry = get_entry(fam)
    p, q = rnd_pair(200 + abs(hash(fam)) % 2 ** 20)
    for sample in entry.samples or ({},):
        spec = DivergenceSpec(fam, dict(sample))
        gp = inv.general_params_for(spec)
        if gp is None:
            continue
        k0 = inv.nominal_factor(spec, p, q)
        kg = inv.factor_value(inv.general_kind(*gp), p, q)
        assert kg == pytest.approx(k0, rel=1e-12)


def test_dual_log_has_no_general_parameters():
    # the exponential mean is not a ratio of power sums
    assert inv.general_params_for(DivergenceSpec("kl_dual")) is None


@pytest.mark.parametrize("fam,par", [
    ("kl", None), ("beta", {"lambda": 1.7}), ("hellinger", None),
    ("ab", {"a": 0.6, "b": 1.8}),
])
def test_numeric_factor_matches_closed_form(fam, par):
    spec = DivergenceSpec(fam, par)
    p, q = rnd_pair(3)
    k0 = inv.nominal_factor(spec, p, q)
    assert inv.numeric_factor(spec, p, q) == pytest.approx(k0, rel=1e-7)


def test_numeric_factor_without_closed_form():
    spec = first_spec("jensen_shannon_w")
    p, q = rnd_pair(4)
    k = inv.numeric_factor(spec, p, q)
    assert k > 0.0
    assert evaluate(spec, p, k * q) <= evaluate(spec, p, inv.kstar_factor(p, q) * q) + 1e-12


# ---------------------------------------------------------------------------
# the invariance differential equation
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("fam", ["kl", "eqm", "neyman_chi2", "itakura_saito", "ab"])
def test_diffeq_residual_nominal(fam):
    spec = first_spec(fam)
    p, q = rnd_pair(5)
    k = inv.nominal_factor(spec, p, q)
    assert inv.diffeq_residual(inv.NOMINAL, p, q, spec) <= 1e-6 * max(1.0, k)


def test_diffeq_residual_kstar_and_general():
    p, q = rnd_pair(6)
    assert inv.diffeq_residual(inv.KSTAR, p, q) <= 1e-6
    kind = inv.general_kind(2.0, -1.0, 0.0, 1.0, 0.5)
    assert inv.diffeq_residual(kind, p, q) <= 1e-6


def test_diffeq_residual_constant_factor_fails():
    # a constant is homogeneous of degree 0, not -1: residual is the constant
    p, q = rnd_pair(7)
    assert inv.diffeq_residual(lambda pp, qq: 1.0, p, q) == pytest.approx(1.0, abs=1e-9)


def test_factor_grad_q_closed_forms_match_fd():
    p, q = rnd_pair(8)
    for kind in (inv.KSTAR, inv.general_kind(0.5, 0.5, 0.0, 1.0, 2.0)):
        g = inv.factor_grad_q(kind, p, q)
        gf = fd_grad(lambda qq: inv.factor_value(kind, p, qq), q)
        assert np.max(np.abs(g - gf)) <= 1e-6 * max(1.0, np.max(np.abs(gf)))


def test_factor_grad_q_nominal_kl_equals_kstar_form():
    # the ratio-of-sums factor is the nominal one for the plain log family
    p, q = rnd_pair(9)
    g = inv.factor_grad_q(inv.NOMINAL, p, q, DivergenceSpec("kl"))
    gk = inv.factor_grad_q(inv.KSTAR, p, q)
    assert np.max(np.abs(g - gk)) <= 1e-8


# ---------------------------------------------------------------------------
# invariant divergences
# ---------------------------------------------------------------------------

def test_make_invariant_requires_closed_form_for_nominal():
    with pytest.raises(NoClosedForm):
        inv.make_invariant(first_spec("triangular"), inv.NOMINAL)
    # kstar composition works for any family
    div = inv.make_invariant(first_spec("triangular"), inv.KSTAR)
    p, q = rnd_pair(10)
    assert div.value(p, q) >= 0.0


def test_invariant_value_pinned_kl():
    div = inv.make_invariant(DivergenceSpec("kl"), inv.NOMINAL)
    expected = 2.0 * np.log(4.0 / 3.0) + np.log(2.0 / 3.0)
    assert div.value(P2, Q2) == pytest.approx(expected, rel=1e-14)
    assert div.value(P2, Q2) == pytest.approx(0.1698990367953972, rel=1e-12)


def test_invariant_value_eqm_kstar():
    div = inv.make_invariant(DivergenceSpec("eqm"), inv.KSTAR)
    assert div.value(P2, Q2) == pytest.approx(0.5, rel=1e-14)
    p, q = rnd_pair(11)
    pn, qn = p / p.sum(), q / q.sum()
    assert div.value(p, q) == pytest.approx(
        p.sum() ** 2 * np.sum((pn - qn) ** 2), rel=1e-12)


def test_invariant_kl_equals_normalized_form():
    # scale-invariant relative entropy collapses onto normalized fields
    p, q = rnd_pair(12)
    div = inv.make_invariant(DivergenceSpec("kl"), inv.NOMINAL)
    pn, qn = p / p.sum(), q / q.sum()
    assert div.value(p, q) == pytest.approx(
        p.sum() * np.sum(pn * np.log(pn / qn)), rel=1e-12)


@pytest.mark.parametrize("fam,factor", [
    ("kl", inv.NOMINAL), ("eqm", inv.NOMINAL), ("ab", inv.NOMINAL),
    ("itakura_saito", inv.NOMINAL), ("kl", inv.KSTAR),
    ("triangular", inv.KSTAR), ("jensen_shannon_w", inv.KSTAR),
    ("eqm", inv.general_kind(1.0, 1.0, 0.0, 2.0, 1.0)),
])
def test_invariance_under_q_scaling(fam, factor):
    spec = first_spec(fam)
    div = inv.make_invariant(spec, factor)
    p, q = rnd_pair(13)
    v = div.value(p, q)
    for c in (1e-3, 1.0, 7.0, 1e3):
        assert abs(div.value(p, c * q) - v) <= 1e-10 * max(1.0, abs(v))


@pytest.mark.parametrize("fam,factor", [
    ("kl", inv.NOMINAL), ("beta", inv.NOMINAL), ("ab", inv.NOMINAL),
    ("hellinger", inv.NOMINAL), ("itakura_saito", inv.NOMINAL),
    ("kl", inv.KSTAR), ("eqm", inv.KSTAR), ("triangular", inv.KSTAR),
    ("jensen_shannon_w", inv.KSTAR),
    ("eqm", inv.general_kind(1.0, 1.0, 0.0, 2.0, 1.0)),
    ("neyman_chi2", inv.general_kind(2.0, -1.0, 0.0, 1.0, 0.5)),
])
def test_invariant_gradient_matches_fd(fam, factor):
    spec = first_spec(fam)
    div = inv.make_invariant(spec, factor)
    p, q = rnd_pair(14)
    g = div.gradient_q(p, q)
    gf = fd_grad(lambda qq: div.value(p, qq), q)
    assert np.max(np.abs(g - gf)) <= 5e-6 * max(1.0, np.max(np.abs(gf)))


def test_gradient_branches_agree_where_factors_coincide():
    # the ratio-of-sums factor is simultaneously kstar, the nominal factor
    # of the plain log family, and a general kind; all three gradient
    # branches must produce the same vector
    p, q = rnd_pair(15)
    spec = DivergenceSpec("kl")
    g_nom = inv.make_invariant(spec, inv.NOMINAL).gradient_q(p, q)
    g_ks = inv.make_invariant(spec, inv.KSTAR).gradient_q(p, q)
    g_gen = inv.make_invariant(
        spec, inv.general_kind(1.0, 0.0, 0.0, 1.0, 1.0)).gradient_q(p, q)
    assert np.max(np.abs(g_nom - g_ks)) <= 1e-12
    assert np.max(np.abs(g_nom - g_gen)) <= 1e-12
    # same story for the quadratic family and its nominal general kind
    spec = DivergenceSpec("eqm")
    g_nom = inv.make_invariant(spec, inv.NOMINAL).gradient_q(p, q)
    g_gen = inv.make_invariant(
        spec, inv.general_kind(1.0, 1.0, 0.0, 2.0, 1.0)).gradient_q(p, q)
    assert np.max(np.abs(g_nom - g_gen)) <= 1e-12


@pytest.mark.parametrize("fam,factor", [
    ("kl", inv.NOMINAL), ("beta", inv.NOMINAL), ("eqm", inv.KSTAR),
    ("triangular", inv.KSTAR),
    ("neyman_chi2", inv.general_kind(2.0, -1.0, 0.0, 1.0, 0.5)),
])
def test_fundamental_residual_vanishes(fam, factor):
    div = inv.make_invariant(first_spec(fam), factor)
    p, q = rnd_pair(16)
    g = div.gradient_q(p, q)
    scale = np.linalg.norm(g) * np.linalg.norm(q)
    assert inv.fundamental_residual(div, p, q) <= 1e-10 * max(1.0, scale)


def test_fundamental_residual_positive_without_invariance():
    # negative control: the raw divergence fails the weighted-sum identity
    p, q = rnd_pair(17)
    g = gradient_q(DivergenceSpec("kl"), p, q)
    assert abs(np.sum(q * g)) == pytest.approx(abs(q.sum() - p.sum()), rel=1e-12)
    assert abs(np.sum(q * g)) > 0.1


# ---------------------------------------------------------------------------
# ordering and gap identities
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("fam", K0_FAMILIES)
def test_ordering_nominal_beats_kstar_and_identity(fam):
    spec = first_spec(fam)
    p, q = rnd_pair(300 + abs(hash(fam)) % 2 ** 20)
    d0, d1, dq = inv.ordering_check(spec, p, q, inv.KSTAR)
    assert d0 <= d1 + 1e-12 * max(1.0, abs(d1))
    assert d0 <= dq + 1e-12 * max(1.0, abs(dq))


def test_eqm_gap_formula():
    p, q = rnd_pair(18)
    spec = DivergenceSpec("eqm")
    k0 = inv.nominal_factor(spec, p, q)
    k1 = inv.kstar_factor(p, q)
    d0, d1, _ = inv.ordering_check(spec, p, q, inv.KSTAR)
    assert d1 - d0 == pytest.approx(np.sum(q * q) * (k1 - k0) ** 2, abs=1e-10)


def test_neyman_gap_formula():
    p, q = rnd_pair(19)
    spec = DivergenceSpec("neyman_chi2")
    k0 = inv.nominal_factor(spec, p, q)
    k1 = inv.kstar_factor(p, q)
    d0, d1, _ = inv.ordering_check(spec, p, q, inv.KSTAR)
    assert d1 - d0 == pytest.approx(np.sum(q) * (k0 - k1) ** 2 / k1, abs=1e-10)


@pytest.mark.parametrize("fam,prefactor_power", [
    ("kl", 1), ("eqm", 2), ("neyman_chi2", 1), ("pearson_chi2", 1),
])
def test_kstar_normalization_theorem(fam, prefactor_power):
    # composing with the ratio-of-sums factor collapses these families onto
    # normalized fields, times a power of sum(p)
    p, q = rnd_pair(20)
    spec = DivergenceSpec(fam)
    div = inv.make_invariant(spec, inv.KSTAR)
    pn, qn = p / p.sum(), q / q.sum()
    expected = p.sum() ** prefactor_power * evaluate(spec, pn, qn)
    assert div.value(p, q) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("fam,power", [
    ("kl", 1.0), ("eqm", 2.0), ("neyman_chi2", 1.0), ("pearson_chi2", 1.0),
])
def test_kstar_form_scaling_in_first_argument(fam, power):
    div = inv.make_invariant(DivergenceSpec(fam), inv.KSTAR)
    p, q = rnd_pair(21)
    assert div.value(3.0 * p, q) == pytest.approx(
        3.0 ** power * div.value(p, q), rel=1e-10)


# ---------------------------------------------------------------------------
# log forms
# ---------------------------------------------------------------------------

def test_log_form_requires_nominal_composition():
    div = inv.make_invariant(DivergenceSpec("eqm"), inv.KSTAR)
    with pytest.raises(NotDecomposable):
        inv.log_form(div)


def test_log_form_unwired_family_raises():
    div = inv.make_invariant(DivergenceSpec("kl"), inv.NOMINAL)
    with pytest.raises(NotDecomposable):
        inv.log_form(div)


def test_log_form_limit_orders_raise():
    p, q = rnd_pair(22)
    div = inv.log_form(inv.make_invariant(
        DivergenceSpec("alpha", {"lambda": 0.0}), inv.NOMINAL))
    with pytest.raises(NotDecomposable):
        div.value(p, q)
    div = inv.log_form(inv.make_invariant(
        DivergenceSpec("beta", {"lambda": 1.0}), inv.NOMINAL))
    with pytest.raises(NotDecomposable):
        div.value(p, q)
    div = inv.log_form(inv.make_invariant(
        DivergenceSpec("ab", {"a": 1.0, "b": 0.0}), inv.NOMINAL))
    with pytest.raises(NotDecomposable):
        div.value(p, q)  # a + b - 1 = 0 sits on a limit line


def log_specs():
    out = []
    for fam in LOG_FAMILIES:
        entry = get_entry(fam)
        for sample in entry.samples or ({},):
            spec = DivergenceSpec(fam, dict(sample))
            div = inv.log_form(inv.make_invariant(spec, inv.NOMINAL))
            p, q = rnd_pair(23)
            try:
                div.value(p, q)
            except NotDecomposable:
                continue
            out.append(pytest.param(div, id=f"{fam}-{sample}"))
    return out


@pytest.mark.parametrize("div", log_specs())
def test_log_value_nonnegative_and_zero_at_identity(div):
    p, q = rnd_pair(24)
    assert div.value(p, q) >= -1e-12
    assert abs(div.value(q, q.copy())) <= 1e-12


@pytest.mark.parametrize("div", log_specs())
def test_log_two_sided_invariance(div):
    p, q = rnd_pair(25)
    v = div.value(p, q)
    for c1, c2 in ((7.0, 1.0), (1.0, 0.013), (123.0, 5e3)):
        assert abs(div.value(c1 * p, c2 * q) - v) <= 1e-10 * max(1.0, abs(v))


@pytest.mark.parametrize("div", log_specs())
def test_log_gradient_matches_fd(div):
    p, q = rnd_pair(26)
    g = div.gradient_q(p, q)
    gf = fd_grad(lambda qq: div.value(p, qq), q)
    assert np.max(np.abs(g - gf)) <= 5e-6 * max(1.0, np.max(np.abs(gf)))


@pytest.mark.parametrize("div", log_specs())
def test_log_fundamental_residual(div):
    p, q = rnd_pair(27)
    assert inv.fundamental_residual(div, p, q) <= 1e-10


def test_power_log_value_three_term_expression():
    # (1/(lam(lam-1))) log sum p^lam q^(1-lam)
    #   + (1/lam) log sum q - (1/(lam-1)) log sum p
    p, q = rnd_pair(28)
    lam = 2.0
    div = inv.log_form(inv.make_invariant(
        DivergenceSpec("alpha", {"lambda": lam}), inv.NOMINAL))
    s = np.sum(p ** lam * q ** (1.0 - lam))
    expected = (np.log(s) / (lam * (lam - 1.0)) + np.log(q.sum()) / lam
                - np.log(p.sum()) / (lam - 1.0))
    assert div.value(p, q) == pytest.approx(expected, rel=1e-12)


def test_quadratic_log_value_expression():
    p, q = rnd_pair(29)
    div = inv.log_form(inv.make_invariant(DivergenceSpec("eqm"), inv.NOMINAL))
    expected = (np.log(np.sum(p * p)) - 2.0 * np.log(np.sum(p * q))
                + np.log(np.sum(q * q)))
    assert div.value(p, q) == pytest.approx(expected, rel=1e-12)


def test_ratio_log_value_expression():
    # n log(mean of ratios) - sum of log ratios
    p, q = rnd_pair(30)
    div = inv.log_form(inv.make_invariant(
        DivergenceSpec("itakura_saito"), inv.NOMINAL))
    x = p / q
    expected = x.size * np.log(np.mean(x)) - np.sum(np.log(x))
    assert div.value(p, q) == pytest.approx(expected, rel=1e-12)


def test_symmetric_log_forms():
    p, q = rnd_pair(31)
    for fam in ("eqm", "hellinger"):
        div = inv.log_form(inv.make_invariant(DivergenceSpec(fam), inv.NOMINAL))
        assert div.value(p, q) == pytest.approx(div.value(q, p), rel=1e-12)


def test_arith_geo_log_form_is_scaled_power_form():
    p, q = rnd_pair(32)
    for al in (0.3, 0.7):
        m = inv.log_form(inv.make_invariant(
            DivergenceSpec("m_ag", {"alpha": al}), inv.NOMINAL))
        a = inv.log_form(inv.make_invariant(
            DivergenceSpec("alpha", {"lambda": al}), inv.NOMINAL))
        assert m.value(p, q) == pytest.approx(al * a.value(p, q), rel=1e-12)


def test_symmetrized_beta_log_form():
    p, q = rnd_pair(33)
    div = inv.log_form(inv.make_invariant(
        DivergenceSpec("beta", {"lambda": 1.7}), inv.NOMINAL))
    sym = 0.5 * (div.value(p, q) + div.value(q, p))
    assert sym == pytest.approx(0.5 * (div.value(q, p) + div.value(p, q)))
    assert sym >= 0.0


@pytest.mark.parametrize("lam", [1.7, 2.5, 0.4, -0.8])
def test_beta_gradient_is_log_gradient_times_split_term(lam):
    # the plain invariant gradient equals the log-form gradient scaled by
    # the second split term K0^(lam-1) sum(p q^(lam-1))
    p, q = rnd_pair(34)
    spec = DivergenceSpec("beta", {"lambda": lam})
    plain = inv.make_invariant(spec, inv.NOMINAL)
    logd = inv.log_form(plain)
    k0 = inv.nominal_factor(spec, p, q)
    s = k0 ** (lam - 1.0) * np.sum(p * q ** (lam - 1.0))
    gp = plain.gradient_q(p, q)
    assert np.max(np.abs(gp - s * logd.gradient_q(p, q))) <= 1e-12 * max(
        1.0, np.max(np.abs(gp)))


@pytest.mark.parametrize("lam", [2.0, 0.5, -1.0])
def test_power_gradient_is_log_gradient_times_split_term(lam):
    # here the q-dependent split term is K0 sum(q)
    p, q = rnd_pair(35)
    spec = DivergenceSpec("alpha", {"lambda": lam})
    plain = inv.make_invariant(spec, inv.NOMINAL)
    logd = inv.log_form(plain)
    t1 = inv.nominal_factor(spec, p, q) * q.sum()
    gp = plain.gradient_q(p, q)
    assert np.max(np.abs(gp - t1 * logd.gradient_q(p, q))) <= 1e-12 * max(
        1.0, np.max(np.abs(gp)))


@pytest.mark.parametrize("lam", [1.7, 2.5, 0.5, -0.8])
def test_dual_beta_log_split_matches_plain_value(lam):
    # exp of the log-form terms reproduces the plain invariant value
    p, q = rnd_pair(36)
    spec = DivergenceSpec("beta_dual", {"lambda": lam})
    div = inv.make_invariant(spec, inv.NOMINAL)
    k0 = inv.nominal_factor(spec, p, q)
    closed = (np.sum(p ** lam) - k0 * np.sum(q * p ** (lam - 1.0))) / lam
    assert div.value(p, q) == pytest.approx(closed, rel=1e-10)


@pytest.mark.parametrize("a,b", [(0.6, 1.8), (1.3, 2.2), (2.0, 0.4)])
def test_dual_two_parameter_split_matches_plain_value(a, b):
    # the swapped two-parameter family maps onto parameters (b-1, a+1)
    p, q = rnd_pair(37)
    spec = DivergenceSpec("ab_dual", {"a": a, "b": b})
    div = inv.make_invariant(spec, inv.NOMINAL)
    k0 = inv.nominal_factor(spec, p, q)
    aa, bb = b - 1.0, a + 1.0
    c = aa + bb - 1.0
    closed = (np.sum(p ** c) - k0 ** c * np.sum(q ** c)) / ((bb - 1.0) * c)
    assert div.value(p, q) == pytest.approx(closed, rel=1e-9)


def test_log_form_first_order_agreement():
    # near p ~ q the log form agrees with the plain invariant value divided
    # by the q-dependent split term (both vanish to second order)
    r = np.random.default_rng(38)
    q = r.uniform(0.5, 3.0, 9)
    p = q * (1.0 + 1e-6 * r.standard_normal(9))
    spec = DivergenceSpec("beta", {"lambda": 1.7})
    plain = inv.make_invariant(spec, inv.NOMINAL)
    logd = inv.log_form(plain)
    lam = 1.7
    k0 = inv.nominal_factor(spec, p, q)
    s = k0 ** (lam - 1.0) * np.sum(p * q ** (lam - 1.0))
    assert logd.value(p, q) == pytest.approx(plain.value(p, q) / s, rel=1e-3)
