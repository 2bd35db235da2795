# Averaging n independent stable-driven processes is itself a mean-reverting
# process with rescaled stable noise.  Its cut-off time grows with n through
# n^{2-2/alpha}, and the profile is a shift distance against a strictly
# stable law -- computable exactly and checkable by exact simulation.

import numpy as np

import oucutoff as oc
from oucutoff import ensembles as en

cfg = en.AverageConfig(stable=oc.StableParams(1.5), gamma=1.0, x0=1.0,
                       n=10**4, eps_n=1e-4)
sched = oc.average_schedule(cfg)
print(f"n = {cfg.n}, eps_n = {cfg.eps_n:g}: "
      f"cut-off time {sched.t_eps:.4f}, window {sched.w_eps}")
print("reference stable scale c/(alpha gamma):",
      en.reference_stable_scale(cfg))

f_ref = en.average_limit_density(cfg)
print("\n c    exact MC (1e5 paths)    limit profile")
for i, c in enumerate((-2.0, -1.0, 0.0, 1.0, 2.0)):
    mc = oc.average_distance_mc(cfg, sched.time_at(c), 100_000,
                                oc.RngStream(123, i))
    prof = oc.average_profile(cfg, c, f_ref=f_ref)
    print(f"{c:+4.1f}   {mc.value:8.4f} +/- {mc.stderr:6.4f}"
          f"      {prof.value:8.4f}")

print("\naggregated-noise exponent at z = 1 for n = 10^4:",
      en.aggregate_exponent(cfg, np.array([1.0]))[0])
