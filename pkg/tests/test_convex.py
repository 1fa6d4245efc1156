"""Tests for the convex-function machinery and the three constructions."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from divflux.convex import (
    ConvexFn,
    Field,
    bregman,
    bregman_grad_q,
    burbea_rao,
    check_strict_convexity,
    csiszar,
    csiszar_grad_q,
    f_mean,
    floor_field,
    gen_exp,
    gen_log,
    jensen,
    jensen_grad_q,
    mirror,
    power_mean,
    sample_grid,
    standardize,
    symmetrize,
)
from divflux.errors import DomainError, ParamError, ShapeError


# reference cores used throughout
XLOGX = ConvexFn(
    fn=lambda x: x * np.log(x),
    d1=lambda x: np.log(x) + 1.0,
    d2=lambda x: 1.0 / x,
    name="xlogx",
)
SQUARE = ConvexFn(fn=lambda x: x * x, d1=lambda x: 2.0 * x,
                  d2=lambda x: np.full_like(np.asarray(x, dtype=float), 2.0),
                  domain=(-math.inf, math.inf), name="square")
QUARTIC = ConvexFn(fn=lambda x: x ** 4, d1=lambda x: 4.0 * x ** 3,
                   d2=lambda x: 12.0 * x * x, name="quartic")
KL_CORE = ConvexFn(
    fn=lambda x: x * np.log(x) + 1.0 - x,
    d1=lambda x: np.log(x),
    d2=lambda x: 1.0 / x,
    name="kl-core",
)


def rnd_pair(n=16, seed=0):
    rng = np.random.default_rng(seed)
    return rng.uniform(0.2, 3.0, n), rng.uniform(0.2, 3.0, n)


# ---------------------------------------------------------------------------
# Field and ConvexFn basics
# ---------------------------------------------------------------------------

def test_field_rejects_negative_entries():
    with pytest.raises(DomainError) as err:
        Field([1.0, -0.5, 2.0])
    assert err.value.index == 1


def test_field_strict_class_rejects_zero():
    Field([1.0, 0.0], "nonneg")
    with pytest.raises(DomainError):
        Field([1.0, 0.0], "strictly_positive")
    with pytest.raises(ShapeError):
        Field([])
    with pytest.raises(ParamError):
        Field([1.0], "positive")


def test_convexfn_domain_guard():
    with pytest.raises(DomainError) as err:
        XLOGX(np.array([1.0, -2.0]))
    assert err.value.index == 1


def test_strict_convexity_sampler():
    check_strict_convexity(XLOGX)
    affine = ConvexFn(fn=lambda x: x - 1.0,
                      d1=lambda x: np.ones_like(np.asarray(x, dtype=float)),
                      d2=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
                      name="affine")
    with pytest.raises(DomainError):
        check_strict_convexity(affine)


@pytest.mark.parametrize("core", [XLOGX, QUARTIC, KL_CORE])
def test_deriv1_matches_finite_difference(core):
    grid = sample_grid(core.domain, 24)
    h = 1e-6 * np.maximum(1.0, grid)
    fd = (core(grid + h) - core(grid - h)) / (2.0 * h)
    an = core.deriv1(grid)
    assert np.max(np.abs(fd - an) / np.maximum(1.0, np.abs(an))) <= 1e-6


# ---------------------------------------------------------------------------
# standardize / mirror / symmetrize
# ---------------------------------------------------------------------------

def test_standardize_square_minus_one():
    f = ConvexFn(fn=lambda x: x * x - 1.0, d1=lambda x: 2.0 * x,
                 d2=lambda x: np.full_like(np.asarray(x, dtype=float), 2.0),
                 domain=(-math.inf, math.inf), name="sqm1")
    g = standardize(f)
    grid = np.linspace(-3.0, 3.0, 41)
    assert np.allclose(g(grid), (grid - 1.0) ** 2, atol=1e-14)
    assert g.is_standard()


def test_standardize_xlogx_gives_kl_core():
    g = standardize(XLOGX)
    grid = sample_grid(g.domain, 32)
    assert np.allclose(g(grid), KL_CORE(grid), atol=1e-13)


def test_standardize_fixed_point():
    g = standardize(KL_CORE)
    grid = sample_grid(g.domain, 32)
    assert np.allclose(g(grid), KL_CORE(grid), atol=1e-14)


def test_standardize_requires_one_in_domain():
    f = ConvexFn(fn=lambda x: -np.log(x - 2.0), d1=lambda x: -1.0 / (x - 2.0),
                 d2=lambda x: 1.0 / (x - 2.0) ** 2, domain=(2.0, math.inf))
    with pytest.raises(DomainError):
        standardize(f)


def test_mirror_of_kl_core():
    m = mirror(KL_CORE)
    grid = sample_grid((0.0, math.inf), 32)
    assert np.allclose(m(grid), np.log(1.0 / grid) + grid - 1.0, atol=1e-13)


def test_mirror_involution_and_self_mirror():
    mm = mirror(mirror(XLOGX))
    grid = sample_grid((0.0, math.inf), 32)
    assert np.allclose(mm(grid), XLOGX(grid), atol=1e-12)
    hell = ConvexFn(fn=lambda x: (np.sqrt(x) - 1.0) ** 2,
                    d1=lambda x: 1.0 - 1.0 / np.sqrt(x),
                    d2=lambda x: 0.5 * x ** -1.5, name="hellinger-core")
    m = mirror(hell)
    assert np.allclose(m(grid), hell(grid), atol=1e-12)


def test_symmetrize_is_symmetric_divergence():
    s = symmetrize(standardize(XLOGX))
    p, q = rnd_pair(seed=3)
    a = csiszar(s, p, q)
    b = csiszar(s, q, p)
    assert a > 0.0
    assert abs(a - b) <= 1e-12 * a


# ---------------------------------------------------------------------------
# the three constructions: pinned values
# ---------------------------------------------------------------------------

def test_csiszar_pinned_values():
    sq = ConvexFn(fn=lambda x: (x - 1.0) ** 2, d1=lambda x: 2.0 * (x - 1.0),
                  d2=lambda x: np.full_like(np.asarray(x, dtype=float), 2.0),
                  name="chi2-core")
    assert csiszar(sq, [1.0, 2.0], [1.0, 1.0]) == pytest.approx(1.0, abs=1e-14)
    assert csiszar(KL_CORE, [2.0, 1.0], [1.0, 1.0]) == pytest.approx(
        2.0 * math.log(2.0) - 1.0, abs=1e-14)
    p, _ = rnd_pair()
    assert csiszar(KL_CORE, p, p.copy()) == 0.0


def test_csiszar_errors():
    with pytest.raises(ShapeError):
        csiszar(KL_CORE, [1.0, 2.0], [1.0])
    with pytest.raises(DomainError):
        csiszar(KL_CORE, [1.0, 2.0], [1.0, 0.0])


def test_bregman_pinned_values():
    assert bregman(SQUARE, [1.0, 2.0], [2.0, 1.0]) == pytest.approx(2.0, abs=1e-14)
    p, _ = rnd_pair(seed=5)
    assert bregman(XLOGX, p, p.copy()) == 0.0


def test_bregman_affine_shift_invariance():
    # x^2 - x and (x-1)^2 differ by an affine term only
    fa = ConvexFn(fn=lambda x: x * x - x, d1=lambda x: 2.0 * x - 1.0,
                  d2=lambda x: np.full_like(np.asarray(x, dtype=float), 2.0),
                  domain=(-math.inf, math.inf))
    fb = ConvexFn(fn=lambda x: (x - 1.0) ** 2, d1=lambda x: 2.0 * (x - 1.0),
                  d2=lambda x: np.full_like(np.asarray(x, dtype=float), 2.0),
                  domain=(-math.inf, math.inf))
    p, q = np.array([1.0, 2.0]), np.array([2.0, 1.0])
    assert bregman(fa, p, q) == pytest.approx(bregman(fb, p, q), rel=1e-12)
    pr, qr = rnd_pair(seed=11)
    assert bregman(fa, pr, qr) == pytest.approx(bregman(fb, pr, qr), rel=1e-12)
    assert jensen(fa, 0.3, pr, qr) == pytest.approx(jensen(fb, 0.3, pr, qr), rel=1e-12)


def test_jensen_pinned_values():
    assert jensen(SQUARE, 0.5, [0.0, 2.0], [2.0, 0.0]) == pytest.approx(2.0, abs=1e-14)
    p, _ = rnd_pair(seed=7)
    assert jensen(XLOGX, 0.25, p, p.copy()) == 0.0
    with pytest.raises(ParamError):
        jensen(SQUARE, 1.0, [1.0], [1.0])


def test_jensen_half_weight_symmetry():
    p, q = rnd_pair(seed=9)
    assert jensen(XLOGX, 0.5, p, q) == pytest.approx(jensen(XLOGX, 0.5, q, p),
                                                     rel=1e-12)


# ---------------------------------------------------------------------------
# gradients
# ---------------------------------------------------------------------------

def fd_grad_q(fun, p, q, h=1e-7):
    g = np.zeros_like(q)
    for j in range(q.size):
        qp, qm = q.copy(), q.copy()
        qp[j] += h
        qm[j] -= h
        g[j] = (fun(p, qp) - fun(p, qm)) / (2.0 * h)
    return g


@pytest.mark.parametrize("core", [KL_CORE, QUARTIC])
def test_construction_gradients_match_fd(core):
    p, q = rnd_pair(seed=13)
    for fun, grad in [
        (lambda a, b: csiszar(core, a, b), csiszar_grad_q(core, p, q)),
        (lambda a, b: bregman(core, a, b), bregman_grad_q(core, p, q)),
        (lambda a, b: jensen(core, 0.3, a, b), jensen_grad_q(core, 0.3, p, q)),
    ]:
        fd = fd_grad_q(fun, p, q)
        assert np.max(np.abs(fd - grad) / np.maximum(1.0, np.abs(grad))) <= 2e-6


def test_csiszar_gradient_vanishes_at_identity():
    p, _ = rnd_pair(seed=15)
    fd = fd_grad_q(lambda a, b: csiszar(KL_CORE, a, b), p, p.copy())
    assert np.max(np.abs(fd)) <= 1e-8
    assert np.max(np.abs(csiszar_grad_q(KL_CORE, p, p.copy()))) <= 1e-12


def test_jensen_gradient_vanishes_at_identity():
    p, _ = rnd_pair(seed=17)
    assert np.max(np.abs(jensen_grad_q(XLOGX, 0.4, p, p.copy()))) == 0.0


# ---------------------------------------------------------------------------
# bridges between the constructions
# ---------------------------------------------------------------------------

def test_standard_core_equals_tangent_gap_at_one():
    # f_c(x) == bregman summand of f between x and 1, for any simple f
    for f in (XLOGX, QUARTIC):
        fc = standardize(f)
        for x in sample_grid(f.domain, 24):
            gap = bregman(f, [x], [1.0])
            assert abs(float(fc(x)) - gap) <= 1e-12 * max(1.0, abs(gap))


def test_jensen_to_bregman_limit():
    p, q = rnd_pair(seed=19)
    alpha = 1e-6
    for f in (XLOGX, SQUARE):
        b = bregman(f, p, q)
        j = jensen(f, alpha, p, q) / alpha
        assert abs(j - b) <= 1e-4 * max(1.0, abs(b))


def test_burbea_rao_is_symmetric_sum():
    p, q = rnd_pair(seed=21)
    v = burbea_rao(XLOGX, p, q)
    assert v == pytest.approx(bregman(XLOGX, p, q) + bregman(XLOGX, q, p),
                              rel=1e-14)
    assert v == pytest.approx(burbea_rao(XLOGX, q, p), rel=1e-12)


# ---------------------------------------------------------------------------
# joint-convexity criterion on the tangent-gap summand
# ---------------------------------------------------------------------------

def summand_hessian(f, p, q):
    # d2/dp2 = f''(p); d2/dpdq = -f''(q); d2/dq2 = f''(q) - (p-q) f'''(q)
    # third derivatives below are hand-derived per core
    if f is XLOGX:
        d3 = lambda t: -1.0 / (t * t)
    elif f is QUARTIC:
        d3 = lambda t: 24.0 * t
    else:
        raise AssertionError("no third derivative wired for this core")
    return np.array([
        [float(f.deriv2(p)), -float(f.deriv2(q))],
        [-float(f.deriv2(q)), float(f.deriv2(q)) - (p - q) * d3(q)],
    ])


def test_joint_convexity_holds_for_xlogx():
    # 1/f''(x) = x is concave, so every sampled 2x2 summand Hessian is PSD
    rng = np.random.default_rng(23)
    for _ in range(200):
        p, q = rng.uniform(0.05, 20.0, 2)
        w = np.linalg.eigvalsh(summand_hessian(XLOGX, p, q))
        assert w.min() >= -1e-10 * max(1.0, w.max())


def test_joint_convexity_fails_for_quartic():
    # 1/f''(x) = 1/(12 x^2) is strictly convex; the criterion predicts failure
    H = summand_hessian(QUARTIC, 2.0, 1.0)
    assert np.allclose(H, [[48.0, -12.0], [-12.0, -12.0]], atol=1e-12)
    assert np.linalg.eigvalsh(H).min() < 0.0


# ---------------------------------------------------------------------------
# generalized log / exp and means
# ---------------------------------------------------------------------------

def test_gen_log_pinned_values():
    assert gen_log(4.0, 0.5) == pytest.approx(2.0, abs=1e-14)
    assert gen_log(3.5, 0.0) == pytest.approx(2.5, abs=1e-14)
    assert gen_log(math.e, 1.0) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(DomainError):
        gen_log(-1.0, 0.5)
    with pytest.raises(DomainError):
        gen_exp(-3.0, 0.0)  # bracket 1 + x goes negative


@given(x=st.floats(0.1, 10.0), d=st.floats(-2.0, 3.0))
@settings(max_examples=200, deadline=None)
def test_gen_exp_inverts_gen_log(x, d):
    assert gen_exp(gen_log(x, d), d) == pytest.approx(x, rel=1e-12)


# when x^(1-d) is tiny the deformed log saturates toward -1/(1-d) and the
# stored float can no longer resolve x: roundtrip error grows like eps/x^(1-d)
@pytest.mark.parametrize("x,d,tol", [
    (1e-3, 0.0, 1e-14), (1e3, 0.0, 1e-14),
    (1e-3, 1.0, 1e-12), (1e3, 1.0, 1e-12),
    (1e-3, 3.0, 1e-12), (1e3, -2.0, 1e-12),   # x^(1-d) large, no compression
    (1e3, 3.0, 1e-9),                          # x^(1-d) = 1e-6
    (1e-3, -2.0, 1e-6),                        # x^(1-d) = 1e-9
])
def test_gen_exp_roundtrip_extremes(x, d, tol):
    assert gen_exp(gen_log(x, d), d) == pytest.approx(x, rel=tol)


def test_power_mean_pinned_values():
    a, w = [1.0, 4.0], [0.5, 0.5]
    assert power_mean(a, w, 2.0) == pytest.approx(math.sqrt(8.5), abs=1e-14)
    assert power_mean(a, w, 0.0) == pytest.approx(2.0, abs=1e-14)
    assert power_mean([3.0, 3.0, 3.0], [0.2, 0.3, 0.5], -4.0) == pytest.approx(3.0)
    with pytest.raises(ParamError):
        power_mean(a, [0.5, 0.6], 1.0)


@given(t1=st.floats(-4.0, 4.0), t2=st.floats(-4.0, 4.0))
@settings(max_examples=100, deadline=None)
def test_power_mean_monotone_in_order(t1, t2):
    lo, hi = min(t1, t2), max(t1, t2)
    a, w = [0.5, 2.0, 7.0], [0.2, 0.5, 0.3]
    assert power_mean(a, w, lo) <= power_mean(a, w, hi) + 1e-12


def test_f_mean_bounds_and_log_agreement():
    a, w = [1.0, 4.0, 2.0], [0.25, 0.35, 0.4]
    m = f_mean(a, w, math.log, math.exp)
    assert min(a) <= m <= max(a)
    assert m == pytest.approx(power_mean(a, w, 0.0), rel=1e-12)
    # bisection path, no inverse supplied
    m2 = f_mean(a, w, math.log)
    assert m2 == pytest.approx(m, rel=1e-10)


def test_floor_field():
    out = floor_field([0.0, 1e-15, 2.0], 1e-12)
    assert out[0] == 1e-12 and out[1] == 1e-12 and out[2] == 2.0
    with pytest.raises(ParamError):
        floor_field([1.0], 0.0)
