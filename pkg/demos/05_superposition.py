# A weighted series of independent one-dimensional processes mixes many
# reversion rates; the slowest stored rate dictates the cut-off time and the
# profile only sees the slowest blocks' starting points.

import math

import numpy as np
from scipy import special

import oucutoff as oc
from oucutoff import ensembles as en

config = en.SuperpositionConfig([
    en.SuperpositionBlock(0.5, 1.0, 1.0, oc.brownian_model()),
    en.SuperpositionBlock(0.45, 2.0, 1.0, oc.brownian_model()),
    en.SuperpositionBlock(0.05, 10.0, 1.0, oc.brownian_model()),
])

rep = oc.validate_superposition(config)
print("validation:", "ok" if rep["passed"] else rep["flags"])
print("slow-block set:", rep["leading_set"], " leading sum:",
      rep["leading_sum"])

trip = oc.superposition_limit_triple(config, 1e-4)
print("limit gaussian coefficient:",
      f"stated {trip['sigma_inf_stated']:.5f},",
      f"eps-scaled {trip['sigma_inf_scaled']:.2e}")

sched = oc.superposition_schedule(config, 1e-4)
print(f"schedule: t={sched.t_eps:.4f} (= ln(1/eps)/2 at slow rate 1), "
      f"window={sched.w_eps}")

sigma = math.sqrt(trip["sigma_inf_stated"])
lead = rep["leading_sum"]
f_ref = en.superposition_limit_density(config)
print("\n c    profile     erf closed form")
for c in np.linspace(-2, 2, 9):
    got = oc.superposition_profile(config, float(c), f_ref=f_ref).value
    want = special.erf(lead * math.exp(-c) / (2 * math.sqrt(2) * sigma))
    print(f"{c:+4.1f}  {got:9.5f}   {want:9.5f}")

print("\nthe fast third block moves nothing: it is not in the slow set and "
      "its variance share is m^2 sigma/(2*10) = {:.2e}".format(
          0.05**2 / 20.0))
