"""Pre-test verification of the solver module against hand oracles."""
import io

import numpy as np

import divflux.solver as sol
import divflux.invariance as inv
from divflux.catalog import DivergenceSpec
from divflux.errors import StallError

problems = []
rng = np.random.default_rng(42)

# --- 2-variable NNLS toy: H=[[1,1],[1,2]], y=(1,0) -> x*=(0.5, 0) ---
H = np.array([[1.0, 1.0], [1.0, 2.0]])
y = np.array([1.0, 0.0])
prob = sol.LinearModelProblem(y, H, DivergenceSpec("eqm"), np.array([0.3, 0.3]))
res = sol.solve_nonneg(prob, sol.SolverConfig(max_iters=500, objective_tol=1e-16))
print("nnls toy:", res.x, "iters", res.iterations, "converged", res.converged)
if abs(res.x[0] - 0.5) > 1e-6 or res.x[1] > 1e-6:
    problems.append(f"nnls toy off: {res.x}")
rep = sol.kkt_report(res.x, prob.gradient(res.x))
print("kkt:", rep)
if not rep.satisfied:
    problems.append(f"nnls kkt not satisfied: {rep}")
mono = all(res.objectives[i + 1] <= res.objectives[i] + 1e-15
           for i in range(len(res.objectives) - 1))
if not mono:
    problems.append("nnls objective not monotone")

# --- 10-unknown problem built backward from a strict-complementarity
# optimum: 3 components pinned at 0 with gradient +0.2, rest interior with
# gradient exactly 0 (acceptance 7 shape) ---
for fam in ("eqm", "kl"):
    m, n = 16, 10
    Hr = rng.uniform(0.05, 0.15, (m, n))
    Hr[:n, :] += 0.8 * np.eye(n)
    xstar = rng.uniform(0.5, 2.0, n)
    act = rng.choice(n, 3, replace=False)
    xstar[act] = 0.0
    t = np.zeros(n)
    t[act] = 0.2
    if fam == "eqm":
        yr = Hr @ xstar - np.linalg.lstsq(Hr.T, t / 2.0, rcond=None)[0]
    else:
        q = Hr @ xstar
        yr = q * (1.0 - np.linalg.lstsq(Hr.T, t, rcond=None)[0])
    assert np.all(yr > 0.0)
    pr = sol.LinearModelProblem(yr, Hr, DivergenceSpec(fam), np.full(n, 0.5))
    r = sol.solve_nonneg(pr, sol.SolverConfig(max_iters=5000, objective_tol=1e-16))
    rep = sol.kkt_report(r.x, pr.gradient(r.x))
    mono = all(r.objectives[i + 1] <= r.objectives[i]
               for i in range(len(r.objectives) - 1))
    xerr = np.max(np.abs(r.x - xstar))
    print(f"{fam}: iters={r.iterations} kkt={rep.satisfied} "
          f"interior={rep.worst_interior:.2e} boundary={rep.worst_boundary:.2e} "
          f"xerr={xerr:.1e} mono={mono}")
    if not rep.satisfied:
        problems.append(f"{fam} 10-unknown: KKT failed {rep}")
    if not mono:
        problems.append(f"{fam} 10-unknown: not monotone")
    if xerr > 1e-5:
        problems.append(f"{fam} 10-unknown: optimum missed by {xerr}")

# --- RL / ISRA textbook equivalence ---
m, n = 12, 7
Hr = rng.uniform(0.1, 1.0, (m, n))
yr = rng.uniform(0.5, 2.0, m)
x = rng.uniform(0.5, 2.0, n)
pr = sol.LinearModelProblem(yr, Hr, DivergenceSpec("kl"), x)
u, v = pr.neg_gradient_split(x)
stepped = sol.multiplicative_step(pr, x, u, v, 1.0)
rl = x * (Hr.T @ (yr / (Hr @ x))) / (Hr.T @ np.ones(m))
if np.max(np.abs(stepped - rl)) > 1e-12:
    problems.append(f"RL mismatch {np.max(np.abs(stepped - rl))}")
pr = sol.LinearModelProblem(yr, Hr, DivergenceSpec("eqm"), x)
u, v = pr.neg_gradient_split(x)
stepped = sol.multiplicative_step(pr, x, u, v, 1.0)
isra = x * (Hr.T @ yr) / (Hr.T @ (Hr @ x))
if np.max(np.abs(stepped - isra)) > 1e-12:
    problems.append(f"ISRA mismatch {np.max(np.abs(stepped - isra))}")
print("RL/ISRA forms match")

# --- accelerated direction pinned + n=2 run stays monotone with search ---
fac = sol.accelerated_direction(np.array([1.1]), np.array([1.0]), 2)
print("acc factor:", fac)
if abs(fac[0] - 0.21) > 1e-12:
    problems.append(f"acc factor {fac}")
pr = sol.LinearModelProblem(yr, Hr, DivergenceSpec("kl"), np.full(n, 0.5))
r = sol.solve_nonneg(pr, sol.SolverConfig(max_iters=2000, acceleration_exponent=2))
mono = all(r.objectives[i + 1] <= r.objectives[i] + 1e-12 for i in range(len(r.objectives) - 1))
print("accelerated kl: iters", r.iterations, "mono", mono)
if not mono:
    problems.append("accelerated run not monotone")

# --- sum-constrained KL toy: H=I, y=(1,2,3), C=2 -> x*=y/3 ---
H3 = np.eye(3)
y3 = np.array([1.0, 2.0, 3.0])
x0 = np.array([0.5, 0.5, 1.0])  # sums to 2
pr = sol.LinearModelProblem(y3, H3, DivergenceSpec("kl"), x0)
cfg = sol.SolverConfig(sum_target=2.0, objective_tol=1e-15)
r = sol.solve_sum_constrained(pr, cfg)
print("constrained toy:", r.x, "expected", y3 / 3)
if np.max(np.abs(r.x - y3 / 3.0)) > 1e-6:
    problems.append(f"constrained toy off {r.x}")
# conservation along the whole run
buf = io.StringIO()
r = sol.solve_sum_constrained(
    sol.LinearModelProblem(y3, H3, DivergenceSpec("kl"), x0), cfg, trace=buf)
for line in buf.getvalue().splitlines()[1:]:
    parts = line.split()
    if float(parts[3]) > 1e-10 * 2.0:
        problems.append(f"constraint residual {parts}")
        break

# constant gradient -> zero correction
pr = sol.LinearModelProblem(np.array([1.0, 1.0]), np.eye(2), DivergenceSpec("eqm"),
                            np.array([1.0, 1.0]))
r = sol.solve_sum_constrained(pr, sol.SolverConfig(sum_target=2.0, max_iters=3))
if not np.allclose(r.x, [1.0, 1.0]):
    problems.append(f"constant-gradient correction moved x: {r.x}")

# --- invariant solve: kl+nominal conserves the sum without variable change ---
m, n = 14, 8
Hr = rng.uniform(0.1, 1.0, (m, n))
xt = rng.uniform(0.2, 2.0, n)
yr = Hr @ xt
div = inv.make_invariant(DivergenceSpec("kl"), inv.NOMINAL)
x0 = np.full(n, float(np.sum(xt)) / n)
pr = sol.LinearModelProblem(yr, Hr, div, x0)
buf = io.StringIO()
r = sol.solve_invariant(pr, sol.SolverConfig(max_iters=300), trace=buf)
target = float(np.sum(x0))
bad = [l for l in buf.getvalue().splitlines()[1:]
       if float(l.split()[3]) > 1e-10 * target]
print("invariant solve: iters", r.iterations, "res lines bad:", len(bad),
      "final obj", r.objective)
if bad:
    problems.append(f"invariant sum drift: {bad[:2]}")
# renormalization leaves the objective unchanged
vx = pr.objective(r.x)
vs = pr.objective(r.x * (target / float(np.sum(r.x))) * 3.7)
if abs(vx - vs) > 1e-12 * max(1.0, abs(vx)):
    problems.append(f"renormalization changed objective {vx} vs {vs}")
# non-invariant divergence rejected
try:
    sol.solve_invariant(sol.LinearModelProblem(yr, Hr, DivergenceSpec("kl"), x0))
    problems.append("plain kl accepted by solve_invariant")
except Exception as e:
    print("plain kl rejected:", type(e).__name__)

# --- laplacian ---
T = sol.laplacian_operator(5)
imp = np.zeros(5)
imp[2] = 1.0
print("impulse:", T @ imp)
if not np.allclose(T @ imp, [0, 0.5, 0, 0.5, 0]):
    problems.append(f"impulse response {T @ imp}")
if not np.allclose(T.sum(axis=0), 1.0):
    problems.append("1-D column sums")
if not np.allclose(T, T.T):
    problems.append("1-D not symmetric")
T2 = sol.laplacian_operator((4, 5))
if not np.allclose(T2.sum(axis=0), 1.0):
    problems.append("2-D column sums")
if not np.allclose(T2, T2.T):
    problems.append("2-D not symmetric")
c = np.full(20, 3.3)
if not np.allclose(T2 @ c, c):
    problems.append("2-D constant not fixed")
x5 = rng.uniform(0.5, 2.0, 20)
if abs(np.sum(T2 @ x5) - np.sum(x5)) > 1e-12 * np.sum(x5):
    problems.append("2-D sum not preserved")

# --- penalties ---
def fd(fun, x, h=1e-7):
    out = np.zeros_like(x)
    for j in range(x.size):
        xp, xm = x.copy(), x.copy()
        xp[j] += h * x[j]
        xm[j] -= h * x[j]
        out[j] = (fun(xp) - fun(xm)) / (2 * h * x[j])
    return out

xr = rng.uniform(0.5, 2.0, 9)
for kind, param in (("LAI", 2.0), ("LAI", 0.4), ("LBI", 1.7), ("LBI", 2.5),
                    ("eqmI", None), ("klI", None), ("chi2NI", None), ("chi2PI", None)):
    val, grad = sol.penalty_laplacian_invariant(kind, xr, param)
    if val < -1e-12:
        problems.append(f"{kind}({param}) negative value {val}")
    gf = fd(lambda z: sol.penalty_laplacian_invariant(kind, z, param)[0], xr)
    rel = np.max(np.abs(grad - gf)) / max(1.0, np.max(np.abs(gf)))
    flux = abs(np.sum(xr * grad))
    const_val, const_grad = sol.penalty_laplacian_invariant(
        kind, np.full(9, 2.2), param)
    print(f"{kind}({param}): val={val:.3e} grad rel={rel:.2e} flux={flux:.2e} "
          f"const=({const_val:.1e},{np.max(np.abs(const_grad)):.1e})")
    if rel > 1e-6:
        problems.append(f"{kind}({param}) grad mismatch {rel}")
    if flux > 1e-10:
        problems.append(f"{kind}({param}) flux {flux}")
    if abs(const_val) > 1e-12 or np.max(np.abs(const_grad)) > 1e-10:
        problems.append(f"{kind}({param}) not zero at fixed point")

# negative control: plain (non-log, non-normalized) invariant composition
# of the power family does NOT have a flux-compatible total gradient
T = sol.laplacian_operator(9)
ai = inv.make_invariant(DivergenceSpec("alpha", {"lambda": 2.0}), inv.NOMINAL)
flux_plain = abs(np.sum(xr * fd(lambda z: ai.value(z, T @ z), xr)))
print("plain AI flux:", flux_plain)
if flux_plain < 1e-6:
    problems.append("negative control unexpectedly flux-compatible")

# --- composite objective ---
data = sol.FunctionObjective(lambda x: float(np.sum((x - y3) ** 2)),
                             lambda x: 2.0 * (x - y3))
t = np.array([2.0, 2.0, 2.0])
pen = sol.FunctionObjective(lambda x: float(np.sum((x - t) ** 2)),
                            lambda x: 2.0 * (x - t))
comp0 = sol.composite_objective(data, pen, 0.0)
xq = rng.uniform(0.5, 2.0, 3)
if comp0.value(xq) != data.value(xq):
    problems.append("gamma=0 composite differs from data term")
g = 1e6
comp = sol.composite_objective(data, pen, g)
xstar = (y3 + g * t) / (1 + g)
if np.max(np.abs(comp.gradient(xstar))) > 1e-9 * g:
    problems.append("closed-form minimizer gradient nonzero")
if np.max(np.abs(xstar - t)) > 1e-5:
    problems.append("gamma -> inf minimizer not near penalty target")

# both terms invariant -> composite flux compatibility
lai = sol.make_laplacian_penalty("LAI", 2.0)
lbi = sol.make_laplacian_penalty("LBI", 1.7)
comp = sol.composite_objective(lai, lbi, 0.37)
flux = abs(np.sum(xr * comp.gradient(xr)))
print("composite invariant flux:", flux)
if flux > 1e-10:
    problems.append(f"composite flux {flux}")

# --- pinned step helpers ---
if sol.max_step(np.array([1.0, 2.0]), np.array([-1.0, -4.0])) != 0.5:
    problems.append("max_step pinned 0.5")
if sol.max_step(np.array([1.0, 1.0]), np.array([-2.0, 1.0])) != 0.5:
    problems.append("max_step single negative")
if sol.max_step(np.array([1.0, 1.0]), np.array([2.0, 1.0])) != 1e6:
    problems.append("max_step cap")

print()
if problems:
    print("PROBLEMS:")
    for p in problems:
        print(" -", p)
else:
    print("solver sweep: all clean")
