import math

import pytest

from hybridom import DriveConfig, Linear, NoQubit, Nonlinear, SystemParams, validate
from hybridom.params import (
    canonical_coupling,
    coupling_from_dict,
    coupling_to_dict,
    drive_from_dict,
    drive_to_dict,
    params_from_dict,
    params_to_dict,
)


def test_defaults_validate_cleanly():
    report = validate(SystemParams(), DriveConfig())
    assert report.ok
    assert report.warnings == []


@pytest.mark.parametrize("field,value,message", [
    ("sigma_z", 1.5, "sigma_z out of range [-1, 1]"),
    ("gamma_m", -0.1, "gamma_m must be non-negative"),
    ("kappa", 2.0, "kappa must be 1"),
    ("g0", math.nan, "g0 is not finite"),
])
def test_invalid_system_fields(field, value, message):
    report = validate(SystemParams(**{field: value}))
    assert not report.ok
    assert any(message in e for e in report.errors)


def test_negative_coupling_rejected():
    assert not validate(SystemParams(coupling=Linear(-1.0))).ok
    assert not validate(SystemParams(coupling=Nonlinear(-1.0))).ok


def test_unresolved_sideband_is_a_warning():
    report = validate(SystemParams(omega_m=0.5))
    assert report.ok
    assert "not resolved sideband (omega_m <= kappa)" in report.warnings


def test_G_N_without_nonlinear_coupling_warns():
    report = validate(SystemParams(coupling=Linear(1.0)), DriveConfig(G_N=0.3))
    assert report.ok and report.warnings


def test_negative_drive_rejected():
    assert not validate(SystemParams(), DriveConfig(eps_L=-1)).ok


def test_zero_strength_couplings_are_canonically_absent():
    assert canonical_coupling(Linear(0.0)) == NoQubit()
    assert canonical_coupling(Nonlinear(0.0)) == NoQubit()
    assert canonical_coupling(Linear(0.5)) == Linear(0.5)


@pytest.mark.parametrize("coupling", [NoQubit(), Linear(0.7), Nonlinear(0.2)])
def test_serialization_round_trip(coupling):
    p = SystemParams(gamma_m=1e-3, coupling=coupling, sigma_z=0.1)
    assert params_from_dict(params_to_dict(p)) == p
    assert coupling_from_dict(coupling_to_dict(coupling)) == coupling
    d = DriveConfig(eps_R=1.0, theta=1.5, G=3.0)
    assert drive_from_dict(drive_to_dict(d)) == d


def test_unknown_keys_rejected():
    with pytest.raises(ValueError):
        params_from_dict({"omega": 1.0})
    with pytest.raises(ValueError):
        drive_from_dict({"eps": 1.0})
    with pytest.raises(ValueError):
        coupling_from_dict({"kind": "cubic"})
