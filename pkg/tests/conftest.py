import numpy as np
import pytest

from gaugelab.fockspace import CompositeSpace, ModeSpec
from gaugelab.matter1d import calibrate_potential, solve_double_well


@pytest.fixture(scope="session")
def calibrated_spec():
    return calibrate_potential(70.0, 1.0)


@pytest.fixture(scope="session")
def basis(calibrated_spec):
    return solve_double_well(calibrated_spec)


@pytest.fixture(scope="session")
def mode(basis):
    return ModeSpec(omega=basis.omega0, volume=1.0, n_ph=40)


@pytest.fixture(scope="session")
def make_space(basis, mode):
    def factory(eta, n_ph=None, n_mat=None, m_levels=2):
        md = mode if n_ph is None else ModeSpec(mode.omega, mode.volume, n_ph)
        nm = basis.n_mat if n_mat is None else n_mat
        return CompositeSpace.create(nm, md, m_levels, eta, basis.x10)
    return factory


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def random_hermitian(rng, n):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (m + m.conj().T) / 2
