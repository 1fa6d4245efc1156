"""Scan the occupancy-statistics cores for positivity over their deformation order.

Core functions (x = p/q ratio form where applicable):
  BE1: f(x) = x*Ld(x) + (a+x)*Ld((a+1)/(a+x))        claim: f >= 0 iff d <= 1
  BE2: phi(q) = p*Ld(p/q) + (a+p)*Ld((a+q)/(a+p))    claim: d <= 1 (proven)
  FD1: f(x) = x*Ld(x) + (b-x)*Ld((b-x)/(b-1)), x<b   claim: f >= 0 iff d < 2
  FD2: phi(q) = p*Ld(p/q) + (b-p)*Ld((b-p)/(b-q))    claim: d < 2 (proven)

Also checks the claimed failure just past each boundary.
"""

import numpy as np


def gl(u, d):
    if abs(d - 1.0) < 1e-12:
        return np.log(u)
    return (u ** (1.0 - d) - 1.0) / (1.0 - d)


def be1_core(x, a, d):
    return x * gl(x, d) + (a + x) * gl((a + 1.0) / (a + x), d)


def fd1_core(x, b, d):
    return x * gl(x, d) + (b - x) * gl((b - x) / (b - 1.0), d)


def main():
    xs = np.logspace(-8.0, 8.0, 20001)
    bad = 0

    # BE1, the open case 0 < d < 1 plus spot checks below 0 and at 1
    for a in (0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 1000.0):
        for d in list(np.linspace(0.01, 0.999, 40)) + [-3.0, -0.5, 0.0, 1.0]:
            v = be1_core(xs, a, d)
            m = float(v.min())
            if m < -1e-12:
                bad += 1
                print(f"BE1 NEG  a={a} d={d:.4f} min={m:.3e} at x={xs[v.argmin()]:.3e}")

    # BE1 just past the boundary must fail
    v = be1_core(xs, 0.5, 1.05)
    print(f"BE1 d=1.05 min={float(v.min()):.3e}  (expected negative)")

    # FD1 on x in (0, b), d < 2 must hold; d slightly above 2 must fail
    for b in (1.01, 1.5, 3.0, 40.0):
        grid = np.linspace(1e-8, b - 1e-8, 200001)
        for d in (-3.0, 0.0, 0.5, 1.0, 1.5, 1.9, 1.999):
            v = fd1_core(grid, b, d)
            m = float(v.min())
            if m < -1e-12:
                bad += 1
                print(f"FD1 NEG  b={b} d={d} min={m:.3e} at x={grid[v.argmin()]:.3e}")
        v2 = fd1_core(grid, b, 2.0)
        mx = float(np.abs(v2).max())
        if mx > 1e-9:
            print(f"FD1 b={b} d=2 not identically zero, max|f|={mx:.3e}")
        v3 = fd1_core(grid, b, 2.2)
        print(f"FD1 b={b} d=2.2 min={float(v3.min()):.3e}  (expected negative)")

    # FD2 pointwise form, proven analytically; numeric confirmation
    rng = np.random.default_rng(7)
    for b in (1.0, 2.5, 40.0):
        for d in (-2.0, 0.3, 1.0, 1.7, 1.95):
            p = rng.uniform(b * 1e-6, b * (1 - 1e-6), 4000)
            q = rng.uniform(b * 1e-6, b * (1 - 1e-6), 4000)
            v = p * gl(p / q, d) + (b - p) * gl((b - p) / (b - q), d)
            m = float(v.min())
            if m < -1e-12:
                bad += 1
                print(f"FD2 NEG  b={b} d={d} min={m:.3e}")

    # BE2 pointwise, proven; numeric confirmation plus failure past boundary
    for a in (0.05, 1.0, 8.0):
        for d in (-2.0, 0.3, 0.8, 1.0):
            p = rng.uniform(1e-5, 50.0, 4000)
            q = rng.uniform(1e-5, 50.0, 4000)
            v = p * gl(p / q, d) + (a + p) * gl((a + q) / (a + p), d)
            m = float(v.min())
            if m < -1e-12:
                bad += 1
                print(f"BE2 NEG  a={a} d={d} min={m:.3e}")
    q = np.array([1e4])
    p = np.array([1.0])
    a, d = 1.0, 1.3
    v = float(p * gl(p / q, d) + (a + p) * gl((a + q) / (a + p), d))
    print(f"BE2 d=1.3 large-q term = {v:.3e}  (expected negative)")

    print(f"violations inside claimed domains: {bad}")


if __name__ == "__main__":
    main()
