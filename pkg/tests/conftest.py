import numpy as np
import pytest

from stefanctl.core import (
    DomainSpec,
    InitialData,
    MaterialParams,
    Profile,
    TwoPhaseInitialData,
    TwoPhaseParams,
)

# paraffin wax, liquid phase (per-gram heat data converted to SI)
PARAFFIN = dict(rho=790.0, cp=2380.0, k=0.220, latent_heat=210000.0, Tm=37.0)

# placeholder solid-phase constants (same order of magnitude as the liquid;
# not tied to any measured data set)
SOLID = dict(rho=910.0, cp=2100.0, k=0.25, latent_heat=210000.0, Tm=37.0)


@pytest.fixture(scope="session")
def paraffin() -> MaterialParams:
    return MaterialParams(**PARAFFIN)


@pytest.fixture(scope="session")
def two_phase_params(paraffin) -> TwoPhaseParams:
    return TwoPhaseParams(liquid=paraffin, solid=MaterialParams(**SOLID))


@pytest.fixture()
def default_init() -> InitialData:
    return InitialData(s0=0.001, profile=Profile(kind="linear", amplitude=1.0))


@pytest.fixture()
def default_dom() -> DomainSpec:
    return DomainSpec(L=0.1, N=200, cfl_safety=2.0)


@pytest.fixture()
def two_phase_init() -> TwoPhaseInitialData:
    return TwoPhaseInitialData(
        s0=0.006,
        liquid=Profile(kind="linear", amplitude=10.0),
        solid=Profile(kind="linear", amplitude=-10.0),
    )


@pytest.fixture()
def two_phase_dom() -> DomainSpec:
    return DomainSpec(L=0.02, N=100, cfl_safety=2.0)


def linear_state(N: int, s: float, amplitude: float = 1.0):
    """One-phase state with u = amplitude * (1 - xi)."""
    from stefanctl.one_phase import OnePhaseState

    xi = np.linspace(0.0, 1.0, N + 1)
    return OnePhaseState(t=0.0, s=s, u=amplitude * (1.0 - xi))
