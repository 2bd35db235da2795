# Small-jump activity and moment checks on the jump measure decide whether
# density-based distance methods apply.  The showcase measure puts mass n at
# 1/n!: singular noise whose induced transitions are nevertheless smooth --
# it passes the one-dimensional smoothness test while failing Kallenberg's
# condition.

import numpy as np

import oucutoff as oc

factorial = oc.LevyModel(jumps=[oc.reciprocal_factorial_atoms()])
r_grid = np.geomspace(1e-2, 1e-120, 60)

for variant in ("bk_1d", "kallenberg"):
    rep = oc.check_small_jump_activity(factorial, r_grid, variant)
    print(f"{variant:12s} -> {rep.verdict}   ({rep.note})")

print("\nstable noise passes everything:")
stable = oc.stable_model(1.2)
print("  kallenberg:",
      oc.check_small_jump_activity(stable, np.geomspace(0.1, 1e-10, 40),
                                   "kallenberg").verdict)
print("  orey-masuda (alpha=1.2, c=0.01):",
      oc.check_orey_masuda(stable, 1.2, 0.01).verdict)

print("\nlog-moment gate for invariant laws:")
for name, model in [
    ("gaussian", oc.brownian_model()),
    ("stable(1.5)", oc.stable_model(1.5)),
    ("1/(x ln^2 x) tail", oc.LevyModel(jumps=[
        oc.CompoundPoissonJumps(1.0, oc.PowerLogTailLaw(2.0))])),
    ("1/(x ln^3 x) tail", oc.LevyModel(jumps=[
        oc.CompoundPoissonJumps(1.0, oc.PowerLogTailLaw(3.0))])),
]:
    print(f"  {name:18s} -> {oc.has_log_moment(model).verdict}")

print("\nsmoothness regimes:")
spec = oc.validate_mplus([[1.0]])
for name, model in [
    ("gaussian", oc.brownian_model()),
    ("stable(1.5)", oc.stable_model(1.5)),
    ("factorial atoms", factorial),
    ("single-atom jumps", oc.LevyModel(jumps=[
        oc.CompoundPoissonJumps(1.0, oc.AtomLaw([1.0]))])),
]:
    print(f"  {name:18s} -> {oc.smoothness_regime(model, spec)[0]}")
