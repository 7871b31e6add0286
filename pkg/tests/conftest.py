import numpy as np
import pytest

from monopole.model import Params, Profile
from monopole.reference import TABLE1_EPSILONS, TABLE1_LAMBDAS
from monopole.shooting import ShootingConfig, continuation_sweep, newton_solve

# Roots of the r = 1 problem from an independent route: scipy DOP853
# (rtol 1e-13) from an order-12 series at r = 0.001, solved with fsolve.
ORACLE_ROOTS = {
    (1.0, 0.0): (1.6708443860815736, -1.0288104551516477),
    (10.0, 0.0): (1.5360722169312326, -0.7313269072742583),
    (0.1, 30.0): (6.192747256435825, -8.464748702977156),
    (0.3, 10.0): (3.595490598850846, -2.868137351880794),
    (10.0, 30.0): (4.285658875514638, -0.7882521881633704),
}


@pytest.fixture(scope="session")
def default_config():
    return ShootingConfig()


@pytest.fixture(scope="session")
def solution_1_0(default_config):
    return newton_solve(Params(1.0, 0.0), None, default_config)


@pytest.fixture(scope="session")
def table_sweep(default_config):
    results = continuation_sweep(TABLE1_EPSILONS, TABLE1_LAMBDAS, default_config)
    return {(r.params.epsilon, r.params.lam): r for r in results}


@pytest.fixture(scope="session")
def lattice_sweep():
    results = continuation_sweep(TABLE1_EPSILONS, TABLE1_LAMBDAS, ShootingConfig.published_lattice())
    return {(r.params.epsilon, r.params.lam): r for r in results}


def smooth_profile(rng, params, n=401):
    """Random smooth profile on [0, 1] with gamma(0) = phi(0) = 0."""
    r = np.linspace(0.0, 1.0, n)
    c = rng.uniform(-1.0, 1.0, size=6)
    gamma = c[0] * r**2 + c[1] * r**4 * np.cos(3 * r)
    dgamma = 2 * c[0] * r + c[1] * (4 * r**3 * np.cos(3 * r) - 3 * r**4 * np.sin(3 * r))
    phi = c[2] * r + c[3] * np.sin(2 * r) * r**2 + c[4] * r**3
    dphi = c[2] + c[3] * (2 * np.cos(2 * r) * r**2 + 2 * r * np.sin(2 * r)) + 3 * c[4] * r**2
    return Profile(params, r, np.column_stack([gamma, dgamma, phi, dphi]))


# (number, title, passed, detail) rows filled in by test_acceptance.py
ACCEPTANCE: list[tuple[int, str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {title}: {detail}")
