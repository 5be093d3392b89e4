"""Explicit exponential bounds for the screened error probability.

With only the mean and variance of the screening observable known (plus
a crude variance bound for F obtained from second moments), the
screened error probability admits a computable bound e^{-c n eps^2}.
Knowing the F-U covariance improves the constant c by a factor of about
seven.  This script prints the whole pipeline: normalization, margins,
the zero-event certificate, both bound families, and the headline
numbers table.
"""

import math

import screened_mc as sm

model, pair = sm.heavy_tail_pair()
norm = sm.normalize_observables(pair, var_f_bound=4.0, mu_lower=1.0)

print("normalized observables:")
print(f"  U(x) = 3x/(2*sqrt5) - sqrt5/2   check U(1) = {float(norm.u(1.0)):+.6f}")
print(f"  F(x) = (x^0.75 - mu)/2          check F(1) = {float(norm.f(1.0)):+.6f}")
print(f"  covariance after rescaling: gamma = {norm.gamma:.6f} = sqrt(5)/7")
print()

print("margin m(beta) = certified bound on sup[F - beta U]:")
for beta in (0.1, math.sqrt(5) / 4, 1.0, 10.0):
    print(f"  m({beta:7.4f}) = {sm.margin(norm, beta):9.5f}")
print()

for eps_raw in (0.1, 0.2, 0.5):
    u_raw = eps_raw / 20.0
    eps_n, u_n = norm.map_thresholds(eps_raw, u_raw)
    print(f"raw thresholds eps = {eps_raw}, u = {u_raw} (u = eps/20):")
    if sm.zero_event_check(norm, eps_n, u_n):
        print("  zero-event certificate fires: the screened error is impossible.")
    else:
        rep2 = sm.bound_thm31_ii(norm, eps_n, u_n)
        rep3 = sm.bound_thm31_iii(norm, eps_n, u_n / eps_n)
        worst = sm.bound_thm31_ii(sm.with_gamma(norm, -1.0), eps_n, u_n)
        print(f"  covariance-aware exponent: {rep2.exponent:.6f} (alpha* = {rep2.alpha_star:.4f})")
        print(f"  worst-case-covariance    : {worst.exponent:.6f}")
        print(f"  covariance-free          : {rep3.exponent:.6f}")
    print()

print("headline table (quoted constants 0.005 and 0.0367):")
for eps, n in [(0.2, 5000), (0.2, 10_000), (0.2, 15_000), (0.1, 5000), (0.1, 10_000)]:
    rep = sm.prop11_report(eps, 0.005, n)
    bound = rep.bound_iii if eps == 0.2 else rep.bound_iv
    which = "mean+variance" if eps == 0.2 else "with covariance"
    print(f"  eps = {eps}, n = {n:6d}: screened error <= {bound:.4f}   ({which})")

rep = sm.prop11_report(0.2, 0.01, 1000)
print()
print(f"recomputed constants: {rep.constant_iii_optimized:.6f} (quoted 0.005), "
      f"{rep.constant_iv_optimized:.6f} (quoted 0.0367)")
print("the quoted 0.0367 rounds the true supremum 0.036692 of its objective")
