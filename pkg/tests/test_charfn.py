"""Characteristic functions, inversion, generating triples, and the tail /
smoothness gates, checked against closed forms and quadrature oracles."""

import math

import numpy as np
import pytest
from scipy import integrate, linalg

import oucutoff as oc
from oucutoff import charfn
from oucutoff.errors import UnderResolvedError, ValidationError

LAM = np.linspace(-6.0, 6.0, 25)


def test_driftfree_cf_gaussian_closed_form(brownian, scalar_spec):
    # unit volatility and rate: exp(-lam^2 (1 - e^{-2t}) / 4)
    for t in (0.3, 1.0, 4.0):
        got = oc.cf_driftfree(brownian, scalar_spec, t, LAM)
        want = np.exp(-(LAM**2) * (1.0 - math.exp(-2.0 * t)) / 4.0)
        assert np.allclose(got, want, atol=1e-13)


def test_driftfree_cf_at_zero_is_one(cauchy_noise, scalar_spec):
    assert oc.cf_driftfree(cauchy_noise, scalar_spec, 1.3, 0.0) == pytest.approx(1.0)


def test_driftfree_cf_cauchy_infinite_horizon(cauchy_noise, scalar_spec):
    got = oc.cf_driftfree(cauchy_noise, scalar_spec, np.inf, LAM)
    assert np.allclose(got, np.exp(-np.abs(LAM)), atol=1e-14)


def test_transition_cf_small_time_degenerate(brownian, scalar_spec):
    got = oc.cf_transition(brownian, scalar_spec, 0.5, [1.7], 1e-9, LAM)
    assert np.allclose(got, np.exp(1j * 1.7 * LAM), atol=1e-4)


def test_transition_cf_eps_scaling(brownian, scalar_spec):
    eps = 0.37
    lhs = oc.cf_transition(brownian, scalar_spec, eps, [0.0], 0.9, LAM)
    rhs = oc.cf_transition(brownian, scalar_spec, 1.0, [0.0], 0.9,
                           math.sqrt(eps) * LAM)
    assert np.allclose(lhs, rhs, atol=1e-14)


def test_transition_cf_gaussian_with_drift(scalar_spec):
    """Closed form: normal with mean e^{-t}x0 + sqrt(eps) a (1-e^{-t}) and
    variance eps (1 - e^{-2t}) / 2."""
    model = oc.brownian_model(drift=0.8)
    eps, x0, t = 0.3, 1.5, 0.7
    mean = math.exp(-t) * x0 + math.sqrt(eps) * 0.8 * (1 - math.exp(-t))
    var = eps * (1.0 - math.exp(-2.0 * t)) / 2.0
    got = oc.cf_transition(model, scalar_spec, eps, [x0], t, LAM)
    want = np.exp(1j * mean * LAM - 0.5 * var * LAM**2)
    assert np.allclose(got, want, atol=1e-13)


def test_quadrature_path_matches_closed_form(scalar_spec):
    """Force the generic quadrature (compound Poisson) and check against an
    independent dense-Simpson evaluation of the exponent integral."""
    model = oc.LevyModel(jumps=[oc.CompoundPoissonJumps(
        1.3, oc.AtomLaw([0.7, -1.1], [0.4, 0.6]))])
    t, lam = 1.7, 2.2
    got = charfn.exponent_time_integral(model, scalar_spec, t, np.array([lam]))

    part = model.jumps[0]
    a_cp = part.linear_drift()[0]

    def integrand(s):
        w = math.exp(-s) * lam
        val = part.exponent(np.array([w]))[0] - 1j * a_cp * w
        return val

    s_nodes = np.linspace(0.0, t, 20001)
    vals = np.array([integrand(s) for s in s_nodes])
    oracle = integrate.simpson(vals, x=s_nodes)
    assert got[0] == pytest.approx(oracle, abs=1e-9)


def test_invariant_cf_fixed_point(scalar_spec):
    model = oc.brownian_model(drift=0.5)
    eps = 0.7
    lam = np.array([0.4, -1.9, 3.1])
    inv = oc.cf_invariant(model, scalar_spec, eps, lam)
    for t in (0.5, 2.0):
        shifted = oc.cf_invariant(model, scalar_spec, eps, math.exp(-t) * lam)
        trans0 = oc.cf_transition(model, scalar_spec, eps, [0.0], t, lam)
        assert np.allclose(inv, shifted * trans0, atol=1e-12)


def test_invariant_modulus_below_driftfree(cauchy_noise, scalar_spec):
    lam = np.linspace(0.1, 5.0, 9)
    inv = np.abs(oc.cf_invariant(cauchy_noise, scalar_spec, 1.0, lam))
    for t in (0.4, 1.0, 3.0):
        upper = np.abs(oc.cf_driftfree(cauchy_noise, scalar_spec, t, lam))
        assert np.all(inv <= upper + 1e-12)


def test_flow_consistency_identity(cauchy_noise, scalar_spec):
    # CF at t+s equals CF at t evaluated along the flow times CF at s
    lam = np.linspace(-4.0, 4.0, 9)
    t, s = 0.8, 1.4
    lhs = oc.cf_driftfree(cauchy_noise, scalar_spec, t + s, lam)
    rhs = oc.cf_driftfree(cauchy_noise, scalar_spec, t, math.exp(-s) * lam) \
        * oc.cf_driftfree(cauchy_noise, scalar_spec, s, lam)
    assert np.allclose(lhs, rhs, atol=1e-8)


def test_infinite_horizon_requires_log_moment(scalar_spec):
    bad = oc.LevyModel(jumps=[oc.CompoundPoissonJumps(1.0,
                                                      oc.PowerLogTailLaw(2.0))])
    with pytest.raises(ValidationError):
        oc.cf_driftfree(bad, scalar_spec, np.inf, 1.0)


# ---------------------------------------------------------------------------
# grids and inversion
# ---------------------------------------------------------------------------


def test_cf_grid_invariants(brownian, scalar_spec):
    grid = oc.build_cf_grid(
        lambda lam: oc.cf_driftfree(brownian, scalar_spec, np.inf, lam),
        1, 40.0, 2**12)
    rep = grid.invariant_report()
    assert rep["at_zero"] == pytest.approx(1.0)
    assert rep["max_abs"] <= 1.0 + 1e-12
    assert rep["hermitian_defect"] < 1e-12


def test_inversion_standard_normal(normal_density):
    xs = normal_density.axis()
    target = np.exp(-xs**2 / 2.0) / math.sqrt(2.0 * math.pi)
    assert np.abs(normal_density.values - target).max() < 1e-6
    assert abs(normal_density.mass - 1.0) < 1e-3
    assert not normal_density.flags


def test_inversion_cauchy(cauchy_invariant_density):
    dens = cauchy_invariant_density
    xs = dens.axis()
    target = 1.0 / (math.pi * (1.0 + xs**2))
    assert np.abs(dens.values - target).max() < 1e-4
    assert not dens.flags


def test_inversion_rejects_point_mass():
    grid = oc.build_cf_grid(lambda lam: np.ones_like(np.asarray(lam, float),
                                                     dtype=complex),
                            1, 10.0, 2**10)
    with pytest.raises(UnderResolvedError):
        oc.invert_to_density(grid)


def test_inversion_round_trip(normal_density):
    """Forward-transforming the inverted density recovers the CF inside."""
    xs = normal_density.axis()
    lam = np.linspace(-4.0, 4.0, 9)
    forward = (normal_density.values[None, :]
               * np.exp(1j * lam[:, None] * xs[None, :])).sum(axis=1) \
        * normal_density.step
    assert np.abs(forward - np.exp(-lam**2 / 2.0)).max() < 1e-6


def test_two_dimensional_inversion_gaussian():
    cov = np.array([[1.0, 0.3], [0.3, 0.5]])

    def cf(lam):
        quad = np.einsum("...i,ij,...j->...", lam, cov, lam)
        return np.exp(-0.5 * quad)

    _, dens = oc.density_from_cf(cf, 2)
    xs = dens.axis()
    xx, yy = np.meshgrid(xs, xs, indexing="ij")
    pts = np.stack([xx, yy], axis=-1)
    inv = np.linalg.inv(cov)
    quad = np.einsum("...i,ij,...j->...", pts, inv, pts)
    target = np.exp(-0.5 * quad) / (2.0 * math.pi * math.sqrt(np.linalg.det(cov)))
    assert np.abs(dens.values - target).max() < 1e-5


# ---------------------------------------------------------------------------
# generating triples
# ---------------------------------------------------------------------------


def test_triple_gaussian_window(scalar_spec):
    model = oc.brownian_model(sigma2=1.3)
    eps = 0.6
    for t in (0.5, 2.0):
        trip = oc.generating_triple(model, scalar_spec, eps, [0.0], t)
        want = eps * 1.3 * (1.0 - math.exp(-2.0 * t)) / 2.0
        assert trip.sigma_t[0, 0] == pytest.approx(want, rel=1e-12)


def test_triple_at_time_zero(scalar_spec):
    model = oc.brownian_model(drift=0.4)
    trip = oc.generating_triple(model, scalar_spec, 0.5, [1.2], 0.0)
    assert trip.sigma_t[0, 0] == pytest.approx(0.0, abs=1e-15)
    assert trip.a_t[0] == pytest.approx(1.2)


def test_triple_jumpless_invariant_drift(scalar_spec):
    model = oc.brownian_model(drift=0.4)
    eps = 0.49
    trip = oc.generating_triple(model, scalar_spec, eps, [0.0], np.inf)
    assert trip.a_t[0] == pytest.approx(math.sqrt(eps) * 0.4)


def test_triple_sigma_monotone_in_t():
    q = np.array([[1.0, 0.4], [0.0, 2.0]])
    spec = oc.validate_mplus(q)
    model = oc.LevyModel(gaussian=np.array([[1.0, 0.2], [0.2, 0.8]]), dim=2)
    prev = np.zeros((2, 2))
    for t in (0.2, 0.5, 1.0, 3.0, np.inf):
        trip = oc.generating_triple(model, spec, 1.0, [0.0, 0.0], t)
        diff = trip.sigma_t - prev
        assert np.linalg.eigvalsh(diff).min() >= -1e-12
        prev = trip.sigma_t


def test_triple_stable_correction_matches_quadrature(scalar_spec):
    """Oracle: s-quadrature of the indicator-difference integral against
    the asymmetric stable measure."""
    params = oc.StableParams(1.5, 1.0, 0.6)
    model = oc.stable_model(1.5, 1.0, 0.6)
    part = model.jumps[0]
    kp, km = params.measure_weights()
    eps, t = 0.4, 1.2

    def g_of_a(a_thr):
        # int y (1{|y| <= A} - 1{|y| <= 1}) nu(dy), power-law sides
        return (kp - km) * (a_thr ** (1.0 - 1.5) - 1.0) / (1.0 - 1.5)

    oracle, _ = integrate.quad(
        lambda s: math.exp(-s) * g_of_a(math.exp(s) / math.sqrt(eps)), 0.0, t)
    trip = oc.generating_triple(model, scalar_spec, eps, [0.0], t)
    # a_t = sqrt(eps) * correction for the drift-free stable model
    assert trip.a_t[0] == pytest.approx(math.sqrt(eps) * oracle, rel=1e-9)


def test_stable_image_descriptor(scalar_spec):
    model = oc.stable_model(1.5)
    trip = oc.generating_triple(model, scalar_spec, 0.5, [0.0], 1.0)
    desc = trip.nu_t[0]
    assert desc["kind"] == "stable_image"
    want = 0.5 ** 0.75 * (1.0 - math.exp(-1.5)) / 1.5
    assert desc["c"] == pytest.approx(want, rel=1e-12)


def test_cp_image_descriptor_mass(scalar_spec):
    model = oc.LevyModel(jumps=[oc.CompoundPoissonJumps(2.0, oc.AtomLaw([1.0]))])
    trip = oc.generating_triple(model, scalar_spec, 1.0, [0.0], 3.0)
    image = trip.nu_t[0]
    assert image.total_mass() == pytest.approx(6.0)
    # atoms at e^{-s} stay outside radius r until s = ln(1/r); the step
    # integrand caps the quadrature accuracy near the jump
    assert image.mass_outside(0.5) == pytest.approx(2.0 * math.log(2.0),
                                                    rel=2e-4)


# ---------------------------------------------------------------------------
# tail condition and regimes
# ---------------------------------------------------------------------------


def _default_rule(spec):
    return charfn.default_t0_rule(spec)


def test_tail_condition_gaussian_passes(brownian, scalar_spec):
    rep = oc.check_cf_tail_condition(brownian, scalar_spec,
                                     np.array([2.0, 4.0, 8.0, 16.0]),
                                     _default_rule(scalar_spec))
    assert rep.verdict == "pass_numeric"


def test_tail_condition_cauchy_passes(cauchy_noise, scalar_spec):
    rep = oc.check_cf_tail_condition(cauchy_noise, scalar_spec,
                                     np.array([2.0, 4.0, 8.0, 16.0]),
                                     _default_rule(scalar_spec))
    assert rep.verdict == "pass_numeric"


def test_tail_condition_compound_poisson_fails(scalar_spec):
    """Finite-activity noise without a gaussian part keeps |CF| bounded
    below by e^{-2 rate t}: the lattice shell never empties."""
    model = oc.LevyModel(jumps=[oc.CompoundPoissonJumps(1.0, oc.AtomLaw([1.0]))])
    rep = oc.check_cf_tail_condition(model, scalar_spec,
                                     np.array([2.0, 4.0, 8.0]),
                                     _default_rule(scalar_spec))
    assert rep.verdict == "fail_numeric"


def test_smoothness_regime_gaussian(brownian, scalar_spec):
    regime, cert = oc.smoothness_regime(brownian, scalar_spec)
    assert regime == "gaussian_full_rank"
    assert cert["alpha"] == 2.0


def test_smoothness_regime_stable(scalar_spec):
    regime, cert = oc.smoothness_regime(oc.stable_model(1.5), scalar_spec)
    assert regime == "stable_tail"
    assert cert["alpha"] == pytest.approx(1.5)
    assert cert["coef"] > 0


def test_smoothness_regime_factorial_atoms(scalar_spec):
    """The reciprocal-factorial atoms admit no radial lower envelope that
    grows like g(r) ln r with g unbounded: at r = (N+1)! the truncated
    moment is N+1 while ln r is about (N+1) ln(N+1), so the ratio decays.
    The checker must not claim a radial certificate."""
    model = oc.LevyModel(jumps=[oc.reciprocal_factorial_atoms()])
    regime, _ = oc.smoothness_regime(model, scalar_spec)
    assert regime is None


def test_smoothness_regime_atom_cp_none(scalar_spec):
    model = oc.LevyModel(jumps=[oc.CompoundPoissonJumps(1.0, oc.AtomLaw([1.0]))])
    regime, _ = oc.smoothness_regime(model, scalar_spec)
    assert regime is None


def test_gaussian_window_matrix_lyapunov():
    q = np.array([[1.5, 0.3], [-0.2, 0.9]])
    spec = oc.validate_mplus(q)
    sigma = np.array([[1.0, 0.1], [0.1, 0.7]])
    model = oc.LevyModel(gaussian=sigma, dim=2)
    s_inf = charfn.stationary_gaussian_matrix(model, spec)
    assert np.allclose(q @ s_inf + s_inf @ q.T, sigma, atol=1e-12)
    t = 0.8
    got = charfn.gaussian_window_matrix(model, spec, t)
    e = linalg.expm(-t * q)
    assert np.allclose(got, s_inf - e @ s_inf @ e.T, atol=1e-12)
