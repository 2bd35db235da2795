# Abrupt convergence of the Gaussian mean-reverting process.
#
# With unit reversion and unit volatility started at x0 = 1, the distance to
# equilibrium drops from ~1 to ~0 around t = ln(1/eps)/2, and on the window
# t + c the limiting profile is erf(e^{-c}/2).

import math

import numpy as np
from scipy import special

import oucutoff as oc

model = oc.brownian_model()
spec = oc.validate_mplus([[1.0]])
x0 = [1.0]

print("=== schedule ===")
for eps in (1e-2, 1e-4, 1e-8):
    s = oc.cutoff_schedule(1.0, 1, eps)
    print(f"eps={eps:8.0e}   t_eps={s.t_eps:7.3f}   window={s.w_eps:.3f}")

print("\n=== distance curve at eps = 1e-6 ===")
sched = oc.cutoff_schedule(1.0, 1, 1e-6)
for t in np.linspace(0.25, 2.0, 8) * sched.t_eps:
    d = oc.distance_value(model, spec, 1e-6, x0, float(t))
    print(f"t/t_eps={t / sched.t_eps:4.2f}   d={d.value:8.5f}")

print("\n=== window profile vs closed form ===")
asym = oc.asymptotic_decomposition(spec, x0)
f_inf = oc.driftfree_invariant_density(model, spec)
print(" c     measured(1e-8)   limit G(c)   erf(e^-c/2)")
for c in np.linspace(-3, 3, 7):
    sched = oc.cutoff_schedule(1.0, 1, 1e-8)
    d = oc.distance_value(model, spec, 1e-8, x0, sched.time_at(c)).value
    g = oc.profile_value(model, spec, asym, c, f_inf=f_inf).value
    print(f"{c:+4.1f}   {d:13.5f}   {g:10.5f}   {special.erf(math.exp(-c) / 2):10.5f}")

print("\n=== three-level verification ===")
rep = oc.verify_cutoff(model, spec, [1e-2, 1e-4, 1e-6, 1e-8], x0,
                       level="profile", c_grid=np.linspace(-4, 4, 9))
print("profile cut-off verified:", rep["passed"],
      "| max deviation from the limit profile:",
      round(rep["max_profile_deviation"], 4))
