"""Pre-test verification of the NMF module against hand oracles."""
import io
import time
import warnings

import numpy as np

import divflux.nmf as nmf
from divflux.catalog import DivergenceSpec, gradient_q
from divflux.invariance import NOMINAL, make_invariant
from divflux.solver import SolverConfig

problems = []
rng = np.random.default_rng(7)

L, C, M = 5, 6, 3
Y = rng.uniform(0.5, 2.0, (L, C))
H0 = rng.uniform(0.5, 1.5, (L, M)); H0 /= H0.sum(0)
X0 = rng.uniform(0.5, 1.5, (M, C)); X0 *= Y.sum(0) / X0.sum(0)

# --- A-matrix closed forms ---
Q = H0 @ X0
A_eqm = nmf.matrix_grad_q(DivergenceSpec("eqm"), Y, Q)
if np.max(np.abs(A_eqm - 2.0 * (Q - Y))) > 1e-14:
    problems.append("eqm A != 2(HX-Y)")
A_kl = nmf.matrix_grad_q(DivergenceSpec("kl"), Y, Q)
if np.max(np.abs(A_kl - (1.0 - Y / Q))) > 1e-14:
    problems.append("kl A != 1 - Y/HX")

# --- gradient FD over X and H entries ---
divs = [DivergenceSpec("eqm"), DivergenceSpec("kl"),
        DivergenceSpec("alpha", {"lambda": 0.5}),
        DivergenceSpec("beta", {"lambda": 1.5}),
        make_invariant(DivergenceSpec("kl"), NOMINAL)]
for dv in divs:
    gX = nmf.grad_wrt_X(dv, Y, H0, X0)
    gH = nmf.grad_wrt_H(dv, Y, H0, X0)
    h = 1e-6
    worst = 0.0
    for n in range(M):
        for m in range(C):
            Xp, Xm_ = X0.copy(), X0.copy()
            Xp[n, m] += h; Xm_[n, m] -= h
            fd = (nmf.divergence_value(dv, Y, H0 @ Xp)
                  - nmf.divergence_value(dv, Y, H0 @ Xm_)) / (2 * h)
            worst = max(worst, abs(gX[n, m] - fd) / max(1.0, abs(fd)))
    for n in range(L):
        for m in range(M):
            Hp, Hm_ = H0.copy(), H0.copy()
            Hp[n, m] += h; Hm_[n, m] -= h
            fd = (nmf.divergence_value(dv, Y, Hp @ X0)
                  - nmf.divergence_value(dv, Y, Hm_ @ X0)) / (2 * h)
            worst = max(worst, abs(gH[n, m] - fd) / max(1.0, abs(fd)))
    name = getattr(dv, "family", None) or f"invariant-{dv.base.family}"
    print(f"grad FD {name}: {worst:.2e}")
    if worst > 1e-6:
        problems.append(f"{name} matrix gradient FD {worst}")

# --- exact fit -> zero gradients ---
Yfit = H0 @ X0
for dv in (DivergenceSpec("eqm"), DivergenceSpec("kl")):
    if np.max(np.abs(nmf.grad_wrt_X(dv, Yfit, H0, X0))) > 1e-12:
        problems.append(f"{dv.family} grad_X not zero at exact fit")
    if np.max(np.abs(nmf.grad_wrt_H(dv, Yfit, H0, X0))) > 1e-12:
        problems.append(f"{dv.family} grad_H not zero at exact fit")

# --- update_H: column sums for any step, line search and fixed ---
for policy in ("line_search", "fixed"):
    cfg = SolverConfig(step_policy=policy)
    H1 = nmf.update_H(H0, X0, DivergenceSpec("kl"), Y, cfg)
    drift = np.max(np.abs(H1.sum(0) - 1.0))
    print(f"update_H {policy}: col-sum drift {drift:.2e}")
    if drift > 1e-12:
        problems.append(f"update_H {policy} drift {drift}")
    if np.any(H1 <= 0):
        problems.append(f"update_H {policy} lost positivity")
v0 = nmf.divergence_value(DivergenceSpec("kl"), Y, H0 @ X0)
H1 = nmf.update_H(H0, X0, DivergenceSpec("kl"), Y, SolverConfig())
v1 = nmf.divergence_value(DivergenceSpec("kl"), Y, H1 @ X0)
if v1 > v0:
    problems.append("update_H line search increased the objective")

# constant gradient down columns -> no move (exact fit gives zero gradient)
Hsame = nmf.update_H(H0, X0, DivergenceSpec("kl"), Yfit, SolverConfig())
if np.max(np.abs(Hsame - H0)) > 1e-15:
    problems.append("update_H moved at exact fit")

# --- alpha specialization: centered kernel is (P/Q)^lambda ---
lam = 0.7
spec_a = DivergenceSpec("alpha", {"lambda": lam})
Qa = H0 @ X0
ghat = -(nmf.matrix_grad_q(spec_a, Y, Qa) @ X0.T)      # -grad wrt H
K = ((Y / Qa) ** lam @ X0.T) / lam                     # kernel route
for m in range(M):
    col = H0[:, m]
    d_code = col * (ghat[:, m] - float(np.sum(col * ghat[:, m])))
    d_kern = col * (K[:, m] - float(np.sum(col * K[:, m])))
    err = np.max(np.abs(d_code - d_kern))
    if err > 1e-12:
        problems.append(f"alpha H kernel mismatch col {m}: {err}")
print("alpha H kernel: ok")

# --- beta specialization on X: kernel Q^(l-2) P - Q^(l-1) ---
lam_b = 1.6
spec_b = DivergenceSpec("beta", {"lambda": lam_b})
negA = -nmf.matrix_grad_q(spec_b, Y, Qa)
kern = Qa ** (lam_b - 2.0) * Y - Qa ** (lam_b - 1.0)
if np.max(np.abs(negA - kern)) > 1e-12:
    problems.append("beta -dD/dQ is not Q^(l-2)P - Q^(l-1)")
print("beta X kernel: ok")

# --- update_H_multiplicative ---
H2 = nmf.update_H_multiplicative(H0, X0, DivergenceSpec("kl"), Y)
drift = np.max(np.abs(H2.sum(0) - 1.0))
print(f"update_H_multiplicative: drift {drift:.2e}")
if drift > 1e-12 or np.any(H2 <= 0):
    problems.append("multiplicative H update broke constraints")
H3 = nmf.update_H_multiplicative(H0, X0, DivergenceSpec("kl"), Yfit)
if np.max(np.abs(H3 - H0)) > 1e-12:
    problems.append("multiplicative H moved on constant (zero) gradient")

# --- update_X_changevar: column sums; no move at fit ---
X1 = nmf.update_X_changevar(H0, X0, DivergenceSpec("kl"), Y, SolverConfig())
drift = np.max(np.abs(X1.sum(0) - Y.sum(0)) / Y.sum(0))
print(f"update_X_changevar: drift {drift:.2e}")
if drift > 1e-12:
    problems.append(f"update_X drift {drift}")
Xsame = nmf.update_X_changevar(H0, X0, DivergenceSpec("kl"), Yfit, SolverConfig())
if np.max(np.abs(Xsame - X0)) > 1e-15:
    problems.append("update_X moved at exact fit")
Xf = nmf.update_X_changevar(H0, X0, DivergenceSpec("kl"), Y,
                            SolverConfig(step_policy="fixed"))
driftf = np.max(np.abs(Xf.sum(0) - Y.sum(0)) / Y.sum(0))
print(f"update_X_changevar fixed: drift {driftf:.2e}")
if driftf > 1e-12 or np.any(Xf <= 0):
    problems.append("fixed X update broke constraints")
vX0 = nmf.divergence_value(DivergenceSpec("kl"), Y, H0 @ X0)
vX1 = nmf.divergence_value(DivergenceSpec("kl"), Y, H0 @ X1)
if vX1 > vX0:
    problems.append("update_X line search increased the objective")

# --- per-column factor: alpha closed form; P=Q -> 1 ---
lam = 0.8
spec_a = DivergenceSpec("alpha", {"lambda": lam})
for m in range(C):
    k0 = nmf.per_column_factor(spec_a, Y, Qa, m)
    direct = (np.sum(Y[:, m] ** lam * Qa[:, m] ** (1 - lam))
              / np.sum(Qa[:, m])) ** (1 / lam)
    if abs(k0 - direct) > 1e-14:
        problems.append(f"per_column_factor alpha col {m}")
    if abs(nmf.per_column_factor(spec_a, Qa, Qa, m) - 1.0) > 1e-14:
        problems.append("per_column_factor P=Q != 1")
print("per_column_factor: ok")

# --- invariant KL column gradient equals the closed per-column form ---
ikl = make_invariant(DivergenceSpec("kl"), NOMINAL)
for m in range(C):
    g = ikl.gradient_q(Y[:, m], Qa[:, m])
    closed = np.sum(Y[:, m]) / np.sum(Qa[:, m]) - Y[:, m] / Qa[:, m]
    if np.max(np.abs(g - closed)) > 1e-12:
        problems.append(f"invariant kl column gradient col {m}")
print("invariant kl column gradient: ok")

# --- update_X_invariant: drift + per-column residual over 100 sweeps ---
Xi = X0.copy()
worst_drift = 0.0
worst_res = 0.0
for _ in range(100):
    Xi = nmf.update_X_invariant(H0, Xi, ikl, Y, SolverConfig())
    worst_drift = max(worst_drift,
                      float(np.max(np.abs(Xi.sum(0) - Y.sum(0)) / Y.sum(0))))
    Qi = H0 @ Xi
    for m in range(C):
        r = abs(float(np.sum(Qi[:, m] * ikl.gradient_q(Y[:, m], Qi[:, m]))))
        worst_res = max(worst_res, r)
print(f"update_X_invariant 100 sweeps: drift {worst_drift:.2e} residual {worst_res:.2e}")
if worst_drift > 1e-10:
    problems.append(f"invariant X drift {worst_drift}")
if worst_res > 1e-10:
    problems.append(f"invariant column residual {worst_res}")
Xif = nmf.update_X_invariant(H0, X0, ikl, Y,
                             SolverConfig(step_policy="fixed"))
driftif = np.max(np.abs(Xif.sum(0) - Y.sum(0)) / Y.sum(0))
print(f"update_X_invariant fixed: drift {driftif:.2e}")
if driftif > 1e-12 or np.any(Xif <= 0):
    problems.append("fixed invariant X update broke constraints")

# --- hoyer sparsity pinned values ---
if abs(nmf.hoyer_sparsity(np.array([1.0, 0, 0, 0])) - 1.0) > 1e-15:
    problems.append("spike sparsity != 1")
if abs(nmf.hoyer_sparsity(np.ones(4))) > 1e-15:
    problems.append("constant sparsity != 0")
if abs(nmf.hoyer_target(1.0, 4) - 1.0) > 1e-15:
    problems.append("target s=1 != 1")
if abs(nmf.hoyer_target(0.0, 4) - 0.5) > 1e-15:
    problems.append("target s=0 != 1/sqrt(N)")

# --- hoyer penalty: zero at ratio == A; FD; simplified == exact on constraint ---
col = np.array([3.0, 1.0, 2.0, 2.0])
Xamp = np.column_stack([col, 2 * col])
Aeq = np.linalg.norm(col) / col.sum()           # ratio actually attained
val, _ = nmf.hoyer_penalty(Xamp, np.array([Aeq, Aeq]))
if abs(val) > 1e-18:
    problems.append(f"hoyer penalty not zero at matched ratio: {val}")

Xr = rng.uniform(0.5, 2.0, (4, 3))
tg = np.full(3, nmf.hoyer_target(0.6, 4))
val, grad = nmf.hoyer_penalty(Xr, tg)
h = 1e-6
worst = 0.0
for n in range(4):
    for m in range(3):
        Xp, Xm_ = Xr.copy(), Xr.copy()
        Xp[n, m] += h; Xm_[n, m] -= h
        fd = (nmf.hoyer_penalty(Xp, tg)[0] - nmf.hoyer_penalty(Xm_, tg)[0]) / (2 * h)
        worst = max(worst, abs(grad[n, m] - fd) / max(1.0, abs(fd)))
print(f"hoyer FD: {worst:.2e}")
if worst > 1e-6:
    problems.append(f"hoyer gradient FD {worst}")
g_simpl = nmf.hoyer_penalty(Xr, tg, column_sums=Xr.sum(0))[1]
if np.max(np.abs(g_simpl - grad)) > 1e-10:
    problems.append("simplified hoyer gradient differs on the constraint set")

# --- invariant hoyer: FD (factor-2 check), weighted zero, scale-free ---
val, grad = nmf.hoyer_penalty_invariant(Xr, tg)
worst = 0.0
for n in range(4):
    for m in range(3):
        Xp, Xm_ = Xr.copy(), Xr.copy()
        Xp[n, m] += h; Xm_[n, m] -= h
        fd = (nmf.hoyer_penalty_invariant(Xp, tg)[0]
              - nmf.hoyer_penalty_invariant(Xm_, tg)[0]) / (2 * h)
        worst = max(worst, abs(grad[n, m] - fd) / max(1.0, abs(fd)))
print(f"invariant hoyer FD: {worst:.2e}")
if worst > 1e-6:
    problems.append(f"invariant hoyer FD {worst}")
wz = np.max(np.abs(np.sum(Xr * grad, axis=0)))
if wz > 1e-12:
    problems.append(f"invariant hoyer weighted sum {wz}")
if abs(nmf.hoyer_penalty_invariant(5.0 * Xr, tg)[0] - val) > 1e-12:
    problems.append("invariant hoyer not scale free")

# --- tikhonov penalties ---
for kind in ("norm_to_constant", "laplacian"):
    Hr = rng.uniform(0.1, 0.4, (5, 3))
    val, grad = nmf.tikhonov_H_penalty(kind, Hr)
    worst = 0.0
    for n in range(5):
        for m in range(3):
            Hp, Hm_ = Hr.copy(), Hr.copy()
            Hp[n, m] += h; Hm_[n, m] -= h
            fd = (nmf.tikhonov_H_penalty(kind, Hp)[0]
                  - nmf.tikhonov_H_penalty(kind, Hm_)[0]) / (2 * h)
            worst = max(worst, abs(grad[n, m] - fd) / max(1.0, abs(fd)))
    print(f"tikhonov {kind} FD: {worst:.2e}")
    if worst > 1e-6:
        problems.append(f"tikhonov {kind} FD {worst}")
Hu = np.full((5, 3), 0.2)
v, g = nmf.tikhonov_H_penalty("norm_to_constant", Hu)
if abs(v) > 1e-18 or np.max(np.abs(g)) > 1e-18:
    problems.append("uniform column penalty not zero")
v, g = nmf.tikhonov_H_penalty("laplacian", Hu)
if abs(v) > 1e-18 or np.max(np.abs(g)) > 1e-15:
    problems.append("laplacian on constant column not zero")

# --- full run: 20x30 rank 3 synthetic ---
rng2 = np.random.default_rng(123)
L2, C2, M2 = 20, 30, 3
Ht = rng2.uniform(0.1, 1.0, (L2, M2)); Ht /= Ht.sum(0)
Xt = rng2.uniform(0.1, 1.0, (M2, C2))
Ysyn = Ht @ Xt
for fam in ("eqm", "kl"):
    prob = nmf.NmfProblem(Ysyn, 3, DivergenceSpec(fam))
    buf = io.StringIO()
    t0 = time.time()
    res = nmf.nmf_run(prob, SolverConfig(max_iters=2000, objective_tol=1e-15),
                      seed=11, trace=buf)
    dt = time.time() - t0
    lines = buf.getvalue().splitlines()
    hmax = max(float(l.split()[2]) for l in lines[2:])
    xmax = max(float(l.split()[3]) for l in lines[2:])
    red = res.objectives[-1] / res.objectives[0]
    mono = all(res.objectives[i + 1] <= res.objectives[i]
               for i in range(len(res.objectives) - 1))
    print(f"nmf_run {fam}: iters={res.iterations} red={red:.2e} "
          f"hdrift={hmax:.1e} xdrift={xmax:.1e} mono={mono} {dt:.1f}s")
    if red > 1e-3:
        problems.append(f"nmf_run {fam}: reduction only {red}")
    if hmax > 1e-10 or xmax > 1e-10:
        problems.append(f"nmf_run {fam}: constraint drift")
    if not mono:
        problems.append(f"nmf_run {fam}: not monotone")

# gamma=mu=0 equals the plain path bit for bit
p1 = nmf.NmfProblem(Ysyn, 3, DivergenceSpec("kl"))
p2 = nmf.NmfProblem(Ysyn, 3, DivergenceSpec("kl"), gamma=0.0, mu=0.0,
                    sparsity_target=0.9)
r1 = nmf.nmf_run(p1, SolverConfig(max_iters=50, objective_tol=0.0), seed=5)
r2 = nmf.nmf_run(p2, SolverConfig(max_iters=50, objective_tol=0.0), seed=5)
if not (np.array_equal(r1.state.H, r2.state.H)
        and np.array_equal(r1.state.X, r2.state.X)):
    problems.append("zero-weight run is not bit-identical")
print("zero-weight bit-identity: ok")

# --- App-9 fixture: concentrated X, s=0.9 target -> mixed-sign gradient ---
# one entry holds 90% of each column, straddling the A^2*s1 threshold where
# the exact gradient (n2sq - A^2 s1^2)(X - A^2 s1) changes sign; the gradient
# scales with the cube of the column sums, so the fixture data is 10x Ysyn
Y9 = 10.0 * Ysyn
tg9 = np.full(C2, nmf.hoyer_target(0.9, M2))
Xd = np.full((M2, C2), 0.05)
Xd[rng2.integers(0, M2, C2), np.arange(C2)] = 0.9
Xd *= Y9.sum(0) / Xd.sum(0)
_, g9 = nmf.hoyer_penalty(Xd, tg9, column_sums=Y9.sum(0))
print(f"hoyer s=0.9 grad sign mix: min {g9.min():.3g} max {g9.max():.3g}")
if not (np.any(g9 < 0) and np.any(g9 > 0)):
    problems.append("fixture penalty gradient is not mixed-sign")
# OSL denominator: V from the kl split of the data term
Hd = rng2.uniform(0.1, 1.0, (L2, M2)); Hd /= Hd.sum(0)
V = Hd.T @ np.ones_like(Y9)            # kl: -grad = H^T(Y/Q) - H^T 1
mu9 = 2.0
osl = V + mu9 * g9
ur, vr = nmf.penalty_gradient_split(g9)
safe = V + mu9 * vr + 1e-12
print(f"OSL denominator min: {osl.min():.3g}; safe min: {safe.min():.3g}")
if not np.any(osl <= 0.0):
    problems.append("OSL denominator did not go nonpositive on the fixture")
if np.any(safe <= 0.0):
    problems.append("safe denominator went nonpositive")
rec = np.max(np.abs((ur - vr) - (-g9)))
if rec > 1e-15:
    problems.append("penalty split does not reconstruct -grad")

# regularized run on the same fixture stays positive and monotone
prob9 = nmf.NmfProblem(Y9, 3, DivergenceSpec("kl"), mu=mu9,
                       x_penalty_kind="hoyer", sparsity_target=0.9)
res9 = nmf.nmf_run(prob9, SolverConfig(max_iters=300, objective_tol=0.0), seed=11)
mono9 = all(res9.objectives[i + 1] <= res9.objectives[i]
            for i in range(len(res9.objectives) - 1))
print(f"regularized run: mono={mono9} minX={res9.state.X.min():.3g} "
      f"minH={res9.state.H.min():.3g}")
if not mono9:
    problems.append("regularized composite not monotone")
if res9.state.X.min() <= 0 or res9.state.H.min() <= 0:
    problems.append("regularized run lost positivity")

# invariant data term + invariant penalty
prob_i = nmf.NmfProblem(Ysyn, 3, ikl, mu=0.5,
                        x_penalty_kind="hoyer_invariant", sparsity_target=0.7)
res_i = nmf.nmf_run(prob_i, SolverConfig(max_iters=100, objective_tol=0.0), seed=3)
mono_i = all(res_i.objectives[i + 1] <= res_i.objectives[i]
             for i in range(len(res_i.objectives) - 1))
print(f"invariant regularized run: mono={mono_i} "
      f"xdrift={res_i.state.x_drift():.2e}")
if not mono_i:
    problems.append("invariant regularized run not monotone")
if res_i.state.x_drift() > 1e-10:
    problems.append("invariant run X drift")

print()
if problems:
    print("PROBLEMS:")
    for p in problems:
        print(" -", p)
else:
    print("nmf sweep: all clean")
