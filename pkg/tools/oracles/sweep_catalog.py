"""Development sweep: finite-difference gradient check, exact-zero identity
check, and non-negativity spot check for every registry family and sample
parameter set.  Not part of the shipped test suite."""
import numpy as np

from divflux.catalog import (DivergenceSpec, evaluate, family_names,
                             get_entry, gradient_q, value_terms)

rng = np.random.default_rng(42)
N = 9


def fd_grad(spec, p, q, h=1e-6):
    g = np.empty_like(q)
    for j in range(q.size):
        qp = q.copy(); qp[j] += h
        qm = q.copy(); qm[j] -= h
        g[j] = (evaluate(spec, p, qp) - evaluate(spec, p, qm)) / (2 * h)
    return g


bad = 0
for name in family_names():
    entry = get_entry(name)
    for par in entry.samples:
        spec = DivergenceSpec(name, dict(par))
        for trial in range(3):
            p = rng.uniform(0.5, 3.0, N)
            q = rng.uniform(0.5, 3.0, N)
            if name.startswith("fermi_dirac"):
                p = rng.uniform(0.5, 3.0, N)
                q = rng.uniform(0.5, 3.0, N)  # beta=40 dominates both
            v = evaluate(spec, p, q)
            if not np.isfinite(v):
                print(f"NONFINITE {name} {par} -> {v}"); bad += 1; continue
            if v < -1e-12 and not entry.nonneg_on_normalized_only:
                print(f"NEGATIVE  {name} {par} -> {v}"); bad += 1
            g = gradient_q(spec, p, q)
            gf = fd_grad(spec, p, q)
            scale = np.maximum(1.0, np.abs(gf))
            err = np.max(np.abs(g - gf) / scale)
            if err > 2e-6:
                print(f"GRADFAIL  {name} {par} err={err:.3e}"); bad += 1
            t = value_terms(spec, p, q)
            if t is not None and abs(t.sum() - v) > 1e-9 * max(1.0, abs(v)):
                print(f"TERMSFAIL {name} {par} sum={t.sum()} v={v}"); bad += 1
        # identity: bitwise zero value, tiny gradient
        pp = rng.uniform(0.5, 3.0, N)
        spec_v = evaluate(spec, pp, pp.copy())
        if spec_v != 0.0:
            print(f"IDENT     {name} {par} -> {spec_v!r}"); bad += 1
        if entry.standard:
            gi = gradient_q(spec, pp, pp.copy())
            if np.max(np.abs(gi)) > 1e-10:
                print(f"IDENTGRAD {name} {par} -> {np.max(np.abs(gi)):.3e}"); bad += 1
        # uv split consistency where provided
        if entry.uv is not None:
            p = rng.uniform(0.5, 3.0, N)
            q = rng.uniform(0.5, 3.0, N)
            try:
                U, V = entry.uv(dict(par), p, q)
            except Exception as e:
                print(f"UVRAISE   {name} {par} {e}"); bad += 1
            else:
                if np.any(U < 0) or np.any(V < 0):
                    print(f"UVNEG     {name} {par}"); bad += 1
                resid = np.max(np.abs((U - V) + gradient_q(spec, p, q)))
                if resid > 1e-8:
                    print(f"UVSPLIT   {name} {par} resid={resid:.3e}"); bad += 1
        # k0 minimizes over the scale where provided
        if entry.k0 is not None:
            p = rng.uniform(0.5, 3.0, N)
            q = rng.uniform(0.5, 3.0, N)
            k0 = entry.k0(dict(par), p, q)
            f0 = evaluate(spec, p, k0 * q)
            for dk in (0.99, 1.01):
                if evaluate(spec, p, k0 * dk * q) < f0 - 1e-10:
                    print(f"K0FAIL    {name} {par} k0={k0}"); bad += 1

print(f"families: {len(family_names())}  problems: {bad}")
