# Drift matrices beyond the symmetric case: Jordan blocks slow the decay by
# polynomial factors and complex pairs make the limit vector rotate.

import numpy as np

import oucutoff as oc

print("=== diagonal: clean exponential rates ===")
spec = oc.validate_mplus(np.diag([1.0, 3.0]))
print("decay constants:", oc.decay_constants(spec))
asym = oc.asymptotic_decomposition(spec, [0.0, 1.0])
print(f"x0 = (0,1): rate={asym.gamma}, chain index={asym.ell}, "
      f"limit={asym.v_sum.real}")

print("\n=== Jordan block: polynomial correction ===")
jordan = oc.validate_mplus([[1.0, 1.0], [0.0, 1.0]])
print("clusters:", jordan.clusters)
print("decay constants:", tuple(round(c, 3) for c in oc.decay_constants(jordan)))
asym = oc.asymptotic_decomposition(jordan, [0.0, 1.0])
print(f"x0 = (0,1): rate={asym.gamma}, chain index={asym.ell}, "
      f"limit={asym.v_sum.real}")
print("leading residual (decays like 1/t):",
      [(round(t, 1), float(f"{r:.2e}")) for t, r in asym.residual_curve(5)])

print("\n=== rotation: oscillatory limit of constant modulus ===")
rot = oc.validate_mplus([[1.0, -1.0], [1.0, 1.0]])
asym = oc.asymptotic_decomposition(rot, [1.0, 0.0])
print(f"frequencies (mod 2pi): {np.round(asym.thetas, 4)}")
lo, hi, samples = oc.oscillation_envelope(asym)
print(f"envelope of |limit vector|: [{lo:.6f}, {hi:.6f}] "
      f"({len(samples)} basin representatives)")

print("\n=== schedule consequences ===")
for name, s, x0 in (("diagonal", spec, [0.0, 1.0]),
                    ("jordan", jordan, [0.0, 1.0])):
    a = oc.asymptotic_decomposition(s, x0)
    sched = oc.cutoff_schedule(a.gamma, a.ell, 1e-8)
    print(f"{name:9s} gamma={a.gamma} ell={a.ell} -> t_eps={sched.t_eps:.3f}")
