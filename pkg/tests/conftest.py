import numpy as np
import pytest

import oucutoff as oc


@pytest.fixture(scope="session")
def scalar_spec():
    return oc.validate_mplus([[1.0]])


@pytest.fixture(scope="session")
def brownian():
    return oc.brownian_model()


@pytest.fixture(scope="session")
def cauchy_noise():
    return oc.stable_model(1.0)


@pytest.fixture(scope="session")
def gaussian_invariant_density(brownian, scalar_spec):
    # unit-rate reversion, unit volatility: invariant std is 1/sqrt(2)
    return oc.driftfree_invariant_density(brownian, scalar_spec)


@pytest.fixture(scope="session")
def cauchy_invariant_density(cauchy_noise, scalar_spec):
    # invariant law is standard Cauchy for unit rate and unit scale
    return oc.driftfree_invariant_density(cauchy_noise, scalar_spec)


@pytest.fixture(scope="session")
def normal_density():
    _, dens = oc.density_from_cf(lambda lam: np.exp(-(lam**2) / 2.0), 1)
    return dens
