import math

import numpy as np
import pytest

from hybridom import (
    DriveConfig,
    Linear,
    Nonlinear,
    SystemParams,
    integrate_response,
    oracle_check,
    response_at,
)
from hybridom.oracle import default_transient, drift_matrix

LOSSY = dict(gamma_m=1e-3, k_d=1e-3)
DRIVE = DriveConfig(eps_L=1.0, eps_R=1.0, theta=3 * math.pi, G=1.0)


def test_zero_probe_stays_at_rest():
    d = DriveConfig(eps_L=0.0, eps_R=0.0, G=1.0)
    r = integrate_response(SystemParams(coupling=Linear(1.0), **LOSSY), d, 0.4)
    assert (r.db_plus, r.dsigma_plus, r.dc1_plus, r.dc2_plus) == (0, 0, 0, 0)


@pytest.mark.parametrize("x", [-1.3, 0.0, 0.8])
def test_bare_cavity_limit(x):
    d = DriveConfig(eps_L=1.0, eps_R=0.0, G=1.0)
    p = SystemParams(gamma_m=0.5)
    r = integrate_response(p, d, x)
    ref = response_at(p, d, x)
    assert abs(r.dc1_plus - ref.dc1_plus) < 1e-6
    assert abs(r.db_plus - ref.db_plus) < 1e-6


def test_step_halving_is_fourth_order():
    p = SystemParams(coupling=Linear(1.0), **LOSSY)
    x = 0.9
    ref = response_at(p, DRIVE, x).dc1_plus
    errs = []
    for dt in (0.2, 0.1, 0.05):
        r = integrate_response(p, DRIVE, x, dt=dt, tol=1e-2)
        errs.append(abs(r.dc1_plus - ref))
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    assert all(10 < q < 24 for q in ratios), ratios


def test_linear_and_nonlinear_integrations_agree():
    lin = SystemParams(coupling=Linear(0.6), **LOSSY)
    non = SystemParams(coupling=Nonlinear(1.0), **LOSSY)
    d_non = DriveConfig(DRIVE.eps_L, DRIVE.eps_R, DRIVE.theta, DRIVE.n, DRIVE.G, 0.3)
    for x in (-1.0, 0.25):
        a = integrate_response(lin, DRIVE, x)
        b = integrate_response(non, d_non, x)
        for u, v in ((a.db_plus, b.db_plus), (a.dc1_plus, b.dc1_plus), (a.dc2_plus, b.dc2_plus)):
            assert abs(u - v) <= 1e-4 * max(abs(u), 1e-6)


def test_oracle_check_rows():
    p = SystemParams(coupling=Linear(1.0), **LOSSY)
    rows = oracle_check(p, DRIVE, np.linspace(-2, 2, 3))
    assert [r.ok for r in rows] == [True] * 3
    assert rows[1].to_dict()["x"] == 0.0


def test_oracle_requires_losses():
    with pytest.raises(ValueError):
        integrate_response(SystemParams(coupling=Linear(1.0)), DRIVE, 0.0)


def test_transient_covers_slowest_mode():
    p = SystemParams(coupling=Linear(1.0), **LOSSY)
    slowest = -np.linalg.eigvals(drift_matrix(p, DRIVE)).real.min()
    assert default_transient(p, DRIVE) >= 25 / slowest
    assert default_transient(SystemParams(gamma_m=0.5), DRIVE) >= 20 / 0.5
