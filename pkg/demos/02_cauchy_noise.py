# Heavy-tailed noise: a Cauchy-driven mean-reverting process has no moments
# at all, yet the distance to equilibrium shows the same abrupt switch, with
# an arctan profile instead of an error function.

import math

import numpy as np

import oucutoff as oc

model = oc.stable_model(1.0)        # standard Cauchy increments
spec = oc.validate_mplus([[1.0]])
x0 = [2.0]

print("log-moment check:", oc.has_log_moment(model).verdict)
print("smoothness regime:", oc.smoothness_regime(model, spec)[0])

f_inf = oc.driftfree_invariant_density(model, spec)
xs = f_inf.axis()
mid = np.argmin(np.abs(xs))
print(f"invariant density at 0: {f_inf.values[mid]:.6f} "
      f"(standard Cauchy: {1 / math.pi:.6f})")

print("\n c    measured(1e-6)   (2/pi) atan(e^-c)")
asym = oc.asymptotic_decomposition(spec, x0)
sched = oc.cutoff_schedule(1.0, 1, 1e-6)
for c in np.linspace(-3, 3, 7):
    d = oc.distance_value(model, spec, 1e-6, x0, sched.time_at(c)).value
    target = 2 / math.pi * math.atan(math.exp(-c))
    print(f"{c:+4.1f}   {d:12.5f}   {target:12.5f}")

# exact sampling cross-check at the cut-off time
mc = oc.distance_value(model, spec, 1e-6, x0, sched.t_eps,
                       method="monte_carlo", n_mc=100_000,
                       rng=oc.RngStream(7))
den = oc.distance_value(model, spec, 1e-6, x0, sched.t_eps).value
print(f"\nat t_eps: density method {den:.4f}, "
      f"monte carlo {mc.value:.4f} +/- {mc.stderr:.4f}")
