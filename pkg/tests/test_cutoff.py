"""Schedules, profiles, auxiliary and error distances, full curves, and the
three-level verification, against closed forms and quadrature oracles."""

import math

import numpy as np
import pytest
from scipy import integrate, linalg, special

import oucutoff as oc
from oucutoff.errors import (
    InsufficientEpsilonRange,
    NonpositiveCutoffTimeError,
    ValidationError,
)

ROTATION = np.array([[1.0, -1.0], [1.0, 1.0]])


def gaussian_shift_tv(delta, sigma):
    return special.erf(abs(delta) / (2.0 * math.sqrt(2.0) * sigma))


def two_density_tv(pdf_a, pdf_b, lo, hi):
    """Independent oracle: adaptive quadrature of |f - g| / 2."""
    val, _ = integrate.quad(lambda x: abs(pdf_a(x) - pdf_b(x)), lo, hi,
                            limit=400)
    return 0.5 * val


def normal_pdf(mean, var):
    return lambda x: math.exp(-((x - mean) ** 2) / (2 * var)) / math.sqrt(
        2 * math.pi * var)


# ---------------------------------------------------------------------------
# schedules
# ---------------------------------------------------------------------------


def test_schedule_simple_rate():
    s = oc.cutoff_schedule(1.0, 1, 1e-4)
    assert s.t_eps == pytest.approx(2.0 * math.log(10.0))
    assert s.w_eps == pytest.approx(1.0)


def test_schedule_iterated_log_term():
    s = oc.cutoff_schedule(2.0, 2, math.exp(-4.0))
    assert s.t_eps == pytest.approx(1.0 + 0.5 * math.log(4.0))
    assert s.w_eps == pytest.approx(0.5)


def test_schedule_rejects_large_eps():
    with pytest.raises(NonpositiveCutoffTimeError):
        oc.cutoff_schedule(1.0, 2, 0.9)


def test_schedule_fields_rederivable():
    s = oc.cutoff_schedule(1.7, 3, 1e-5, o_eps=0.01)
    log_term = math.log(1e5)
    want = log_term / (2 * 1.7) + 2 / 1.7 * math.log(log_term)
    assert s.t_eps == pytest.approx(want)
    assert s.w_eps == pytest.approx(1 / 1.7 + 0.01)


def test_scaling_limit_exact_for_first_order():
    # ell = 1: the ratio equals the target identically
    for gamma in (1.0, 2.0):
        for c in (-2.0, 0.0, 2.0):
            got = oc.scaling_limit_ratio(gamma, 1, c, 1e-10)
            assert got == pytest.approx(oc.scaling_limit_target(gamma, 1, c),
                                        rel=1e-12)


def test_scaling_limit_converges_along_eps():
    """The ratio tends to the target; with the iterated-log correction the
    approach is logarithmically slow, so convergence is checked across an
    extreme eps ladder evaluated in logs."""
    for gamma, ell in [(1.0, 2), (2.0, 3)]:
        target = oc.scaling_limit_target(gamma, ell, 0.0)
        errors = [abs(oc.scaling_limit_ratio(gamma, ell, 0.0, eps) / target - 1.0)
                  for eps in (1e-10, 1e-40, 1e-160)]
        assert errors[0] > errors[1] > errors[2]


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------


def test_profile_gaussian_closed_form(brownian, scalar_spec,
                                      gaussian_invariant_density):
    asym = oc.asymptotic_decomposition(scalar_spec, [1.0])
    got = oc.profile_value(brownian, scalar_spec, asym, 0.0,
                           f_inf=gaussian_invariant_density)
    assert got.value == pytest.approx(special.erf(0.5), abs=1e-4)
    for c in (-1.0, 1.5):
        got = oc.profile_value(brownian, scalar_spec, asym, c,
                               f_inf=gaussian_invariant_density)
        want = gaussian_shift_tv(math.exp(-c), math.sqrt(0.5))
        assert got.value == pytest.approx(want, abs=1e-4)


def test_profile_cauchy_closed_form(cauchy_noise, scalar_spec,
                                    cauchy_invariant_density):
    asym = oc.asymptotic_decomposition(scalar_spec, [2.0])
    got = oc.profile_value(cauchy_noise, scalar_spec, asym, 0.0,
                           f_inf=cauchy_invariant_density)
    assert got.value == pytest.approx(0.5, abs=1e-4)


def test_profile_two_sided_limits(brownian, scalar_spec,
                                  gaussian_invariant_density):
    asym = oc.asymptotic_decomposition(scalar_spec, [1.0])
    left = oc.profile_value(brownian, scalar_spec, asym, -6.0,
                            f_inf=gaussian_invariant_density)
    right = oc.profile_value(brownian, scalar_spec, asym, 6.0,
                             f_inf=gaussian_invariant_density)
    assert left.value >= 0.95
    assert right.value <= 0.05


def test_profile_monte_carlo_agrees(brownian, scalar_spec,
                                    gaussian_invariant_density):
    asym = oc.asymptotic_decomposition(scalar_spec, [1.0])
    mc = oc.profile_value(brownian, scalar_spec, asym, 0.0,
                          method="monte_carlo", n_mc=100_000,
                          rng=oc.RngStream(31))
    want = special.erf(0.5)
    assert abs(mc.value - want) <= max(0.02, 3.0 * mc.stderr)


def test_profile_curve_monotone(brownian, scalar_spec,
                                gaussian_invariant_density):
    asym = oc.asymptotic_decomposition(scalar_spec, [1.0])
    curve = oc.profile_curve(brownian, scalar_spec, asym,
                             np.linspace(-4, 4, 17),
                             f_inf=gaussian_invariant_density)
    assert curve.monotone_violation <= 1e-12
    assert curve.limits_check["left_ok"] and curve.limits_check["right_ok"]


def test_profile_rejects_oscillatory():
    spec = oc.validate_mplus(ROTATION)
    model = oc.LevyModel(gaussian=np.eye(2), dim=2)
    asym = oc.asymptotic_decomposition(spec, [1.0, 0.0])
    with pytest.raises(ValidationError):
        oc.profile_value(model, spec, asym, 0.0)


def test_profile_requires_density_regime(scalar_spec):
    model = oc.LevyModel(jumps=[oc.CompoundPoissonJumps(1.0, oc.AtomLaw([1.0]))])
    asym = oc.asymptotic_decomposition(scalar_spec, [1.0])
    with pytest.raises(ValidationError):
        oc.profile_value(model, scalar_spec, asym, 0.0)


# ---------------------------------------------------------------------------
# auxiliary and error distances
# ---------------------------------------------------------------------------


def test_auxiliary_distance_vanishes_late(brownian, scalar_spec,
                                          gaussian_invariant_density):
    d = oc.auxiliary_distance(brownian, scalar_spec, 1.0, [1.0], 30.0,
                              f_inf=gaussian_invariant_density)
    assert d.value == pytest.approx(0.0, abs=1e-6)


def test_auxiliary_distance_saturates_small_eps(brownian, scalar_spec,
                                                gaussian_invariant_density):
    d = oc.auxiliary_distance(brownian, scalar_spec, 1e-12, [1.0], 0.0,
                              f_inf=gaussian_invariant_density)
    assert d.value == 1.0
    assert d.diagnostics.get("beyond_resolution")


def test_auxiliary_distance_gaussian_spot(brownian, scalar_spec,
                                          gaussian_invariant_density):
    d = oc.auxiliary_distance(brownian, scalar_spec, 1.0, [1.0], 0.0,
                              f_inf=gaussian_invariant_density)
    assert d.value == pytest.approx(special.erf(0.5), abs=1e-4)


def test_error_term_decays_and_matches_oracle(brownian, scalar_spec):
    """Oracle: two centred normals, variances (1-e^{-2t})/2 and 1/2."""
    values = []
    for t in (0.01, 1.0, 2.0, 4.0, 8.0):
        got = oc.error_term(brownian, scalar_spec, t).value
        var_t = (1.0 - math.exp(-2.0 * t)) / 2.0
        oracle = two_density_tv(normal_pdf(0, var_t), normal_pdf(0, 0.5),
                                -8.0, 8.0)
        assert got == pytest.approx(oracle, abs=1e-3), t
        values.append(got)
    assert all(b < a for a, b in zip(values, values[1:]))
    assert values[0] > 0.7          # tiny t: variance ratio is extreme
    assert values[-1] < 1e-4


def test_sandwich_inequality(brownian, scalar_spec, gaussian_invariant_density):
    for eps in (1.0, 0.01):
        for t in (0.5, 1.0, 2.5):
            d = oc.distance_value(brownian, scalar_spec, eps, [1.0], t).value
            aux = oc.auxiliary_distance(brownian, scalar_spec, eps, [1.0], t,
                                        f_inf=gaussian_invariant_density).value
            r = oc.error_term(brownian, scalar_spec, t).value
            assert abs(d - aux) <= r + 0.01, (eps, t)


# ---------------------------------------------------------------------------
# distance curves
# ---------------------------------------------------------------------------


def test_distance_starts_near_one(brownian, scalar_spec):
    d = oc.distance_value(brownian, scalar_spec, 1e-4, [1.0], 1e-3)
    assert d.value >= 0.999


def test_distance_gaussian_matches_quadrature_oracle(brownian, scalar_spec):
    eps, x0 = 0.09, 1.0
    for t in (0.5, 1.5, 3.0):
        got = oc.distance_value(brownian, scalar_spec, eps, [x0], t).value
        mean = math.exp(-t) * x0 / math.sqrt(eps)
        var_t = (1.0 - math.exp(-2.0 * t)) / 2.0
        oracle = two_density_tv(normal_pdf(mean, var_t), normal_pdf(0.0, 0.5),
                                -10.0 - abs(mean), 10.0 + abs(mean))
        assert got == pytest.approx(oracle, abs=1e-3), t


def test_distance_methods_cross_check(brownian, scalar_spec):
    eps, t = 0.25, 1.0
    den = oc.distance_value(brownian, scalar_spec, eps, [1.0], t)
    mc = oc.distance_value(brownian, scalar_spec, eps, [1.0], t,
                           method="monte_carlo", n_mc=100_000,
                           rng=oc.RngStream(77))
    assert abs(den.value - mc.value) <= max(0.02, 3.0 * mc.stderr)


def test_distance_curve_shape(brownian, scalar_spec):
    curve = oc.distance_curve(brownian, scalar_spec, 1e-6, [1.0],
                              [1.0, 5.0, 9.0, 13.0])
    vals = [est.value for _, est in curve]
    assert vals[0] > 0.99
    assert vals[-1] < 0.01
    assert all(b <= a + 1e-9 for a, b in zip(vals, vals[1:]))


# ---------------------------------------------------------------------------
# oscillation bands and isotropy
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def rotation_spec():
    return oc.validate_mplus(ROTATION)


@pytest.fixture(scope="module")
def iso_gaussian_2d():
    return oc.LevyModel(gaussian=np.eye(2), dim=2)


@pytest.fixture(scope="module")
def aniso_gaussian_2d():
    return oc.LevyModel(gaussian=np.diag([1.0, 4.0]), dim=2)


def test_invariance_isotropic_gaussian(rotation_spec, iso_gaussian_2d):
    f_inf = oc.driftfree_invariant_density(iso_gaussian_2d, rotation_spec)
    rep = oc.check_invariance_property(f_inf, 1.0)
    assert rep["passed"], rep["spread"]


def test_invariance_anisotropic_gaussian_fails(rotation_spec,
                                               aniso_gaussian_2d):
    """Oracle: directional shift distances erf(|d|_{S^{-1}} / (2 sqrt 2))
    where S solves the stationary covariance equation."""
    f_inf = oc.driftfree_invariant_density(aniso_gaussian_2d, rotation_spec)
    rep = oc.check_invariance_property(f_inf, 1.0)
    assert not rep["passed"]
    s_inf = linalg.solve_continuous_lyapunov(ROTATION, np.diag([1.0, 4.0]))
    s_inv = np.linalg.inv(s_inf)
    # probe directions are the 8 equal angles: index 0 is +x, index 2 is +y
    for d_vec, got in zip([np.array([1.0, 0.0]), np.array([0.0, 1.0])],
                          [rep["values"][0], rep["values"][2]]):
        mah = math.sqrt(d_vec @ s_inv @ d_vec)
        assert got == pytest.approx(special.erf(mah / (2 * math.sqrt(2))),
                                    abs=2e-3)


def test_invariance_isotropic_stable(rotation_spec):
    model = oc.LevyModel(jumps=[oc.IsotropicStableJumps(1.0, 1.0, 2)], dim=2)
    f_inf = oc.driftfree_invariant_density(model, rotation_spec)
    rep = oc.check_invariance_property(f_inf, 1.0)
    assert rep["passed"], rep["spread"]


def test_band_collapses_for_isotropic(rotation_spec, iso_gaussian_2d):
    asym = oc.asymptotic_decomposition(rotation_spec, [1.0, 0.0])
    lower, upper, band = oc.oscillation_profile_band(
        iso_gaussian_2d, rotation_spec, asym, 0.0)
    assert upper.value - lower.value < 1e-3
    assert lower.diagnostics.get("isotropy") is True
    assert len(band) > 8


def test_band_positive_for_anisotropic(rotation_spec, aniso_gaussian_2d):
    asym = oc.asymptotic_decomposition(rotation_spec, [1.0, 0.0])
    lower, upper, _ = oc.oscillation_profile_band(
        aniso_gaussian_2d, rotation_spec, asym, 0.0)
    assert upper.value - lower.value > 0.05


def test_band_single_point_without_rotation(brownian, scalar_spec,
                                            gaussian_invariant_density):
    asym = oc.asymptotic_decomposition(scalar_spec, [1.0])
    lower, upper, band = oc.oscillation_profile_band(
        brownian, scalar_spec, asym, 0.0, f_inf=gaussian_invariant_density)
    assert lower.value == upper.value
    assert len(band) == 1


# ---------------------------------------------------------------------------
# verification reports
# ---------------------------------------------------------------------------


def test_verify_requires_eps_spread(brownian, scalar_spec):
    with pytest.raises(InsufficientEpsilonRange):
        oc.verify_cutoff(brownian, scalar_spec, [1e-2, 1e-3], [1.0])
    with pytest.raises(InsufficientEpsilonRange):
        oc.verify_cutoff(brownian, scalar_spec, [1e-2, 1e-3, 1e-4], [1.0])


def test_verify_gaussian_profile(brownian, scalar_spec):
    rep = oc.verify_cutoff(brownian, scalar_spec, [1e-2, 1e-4, 1e-6, 1e-8],
                           [1.0], level="profile",
                           c_grid=np.linspace(-4, 4, 9))
    assert rep["passed"], rep
    assert rep["max_profile_deviation"] <= 0.02


def test_verify_cauchy_profile(cauchy_noise, scalar_spec):
    rep = oc.verify_cutoff(cauchy_noise, scalar_spec, [1e-2, 1e-4, 1e-6],
                           [2.0], level="profile",
                           c_grid=np.linspace(-4, 4, 9))
    assert rep["passed"], rep
    assert rep["max_profile_deviation"] <= 0.02


def test_verify_cutoff_level(brownian, scalar_spec):
    rep = oc.verify_cutoff(brownian, scalar_spec, [1e-4, 1e-6, 1e-8],
                           [1.0], level="cutoff")
    assert rep["passed"], rep


def test_verify_window_level_rotation_anisotropic(rotation_spec,
                                                  aniso_gaussian_2d):
    rep = oc.verify_cutoff(aniso_gaussian_2d, rotation_spec,
                           [1e-2, 1e-4, 1e-6], [1.0, 0.0], level="window",
                           c_grid=np.linspace(-6, 6, 5))
    assert rep["passed"], rep


def test_verify_profile_fails_for_anisotropic_rotation(rotation_spec,
                                                       aniso_gaussian_2d):
    rep = oc.verify_cutoff(aniso_gaussian_2d, rotation_spec,
                           [1e-2, 1e-4, 1e-6], [1.0, 0.0], level="profile",
                           c_grid=np.linspace(-6, 6, 7))
    assert rep["window_ok"]
    assert not rep["profile_exists"]
    assert max(rep["band_widths"]) > 0.05


def test_no_cutoff_from_origin(brownian, scalar_spec):
    """Started at the origin the distance is eps-independent: the noise
    scaling cancels exactly, so there is nothing to verify."""
    for t in (0.5, 2.0):
        d1 = oc.distance_value(brownian, scalar_spec, 1e-2, [0.0], t).value
        d2 = oc.distance_value(brownian, scalar_spec, 1e-6, [0.0], t).value
        assert d1 == pytest.approx(d2, abs=1e-6)


def test_mixed_jump_model_density_vs_monte_carlo(scalar_spec):
    """Integration check on the generic quadrature path: a gaussian plus
    compound-Poisson model flows through exponent quadrature, inversion and
    the exact sampler, and the two distance methods agree."""
    model = oc.LevyModel(
        drift=[0.2], gaussian=[[0.5]],
        jumps=[oc.CompoundPoissonJumps(1.0,
                                       oc.AtomLaw([0.8, -0.5], [0.5, 0.5]))])
    for t in (0.7, 2.0):
        den = oc.distance_value(model, scalar_spec, 0.25, [1.0], t)
        mc = oc.distance_value(model, scalar_spec, 0.25, [1.0], t,
                               method="monte_carlo", n_mc=120_000,
                               rng=oc.RngStream(5))
        assert abs(den.value - mc.value) <= max(0.02, 3.0 * mc.stderr), t
