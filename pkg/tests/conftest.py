import pytest

from hopf_lyap.hopf import solve_hopf_mu
from hopf_lyap.lyapunov import first_lyapunov


@pytest.fixture(scope="session")
def hopf_points():
    return {eps: solve_hopf_mu(eps) for eps in (0.0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2)}


@pytest.fixture(scope="session")
def breakdowns(hopf_points):
    return {eps: first_lyapunov(hp) for eps, hp in hopf_points.items()}
