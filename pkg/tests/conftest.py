import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from hybridom import DriveConfig, Linear, NoQubit, Nonlinear, SystemParams

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def rates(lo=0.0, hi=3.0):
    return st.floats(lo, hi, allow_nan=False, allow_infinity=False)


@st.composite
def couplings(draw):
    kind = draw(st.sampled_from(["none", "linear", "nonlinear"]))
    if kind == "linear":
        return Linear(g=draw(rates(0.01, 3.0)))
    if kind == "nonlinear":
        return Nonlinear(g_N=draw(rates(0.01, 3.0)))
    return NoQubit()


@st.composite
def systems(draw, lossless=False, passive=False):
    lo_sz = -1.0
    hi_sz = 0.0 if passive else 1.0
    return SystemParams(
        gamma_m=0.0 if lossless else draw(rates(0.0, 2.0)),
        k_d=0.0 if lossless else draw(rates(0.0, 2.0)),
        coupling=draw(couplings()),
        sigma_z=draw(st.floats(lo_sz, hi_sz)),
    )


@st.composite
def drives(draw, one_sided=False, equal=False):
    eps_L = draw(rates(0.1, 5.0))
    if one_sided:
        eps_R = 0.0
    elif equal:
        eps_R = eps_L
    else:
        eps_R = draw(st.one_of(st.just(0.0), rates(0.1, 5.0)))
    return DriveConfig(
        eps_L=eps_L,
        eps_R=eps_R,
        theta=draw(st.floats(0.0, 2 * math.pi)),
        n=draw(rates(0.1, 2.0)),
        G=draw(rates(0.05, 4.0)),
        G_N=draw(rates(0.0, 1.5)),
    )


detunings = st.floats(-8.0, 8.0, allow_nan=False)


@pytest.fixture
def grid():
    return np.linspace(-6.0, 6.0, 4001)


# filled by test_acceptance.report(); echoed after the run so the lines survive capture
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
