import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from hybridom import (
    DriveConfig,
    Linear,
    NoQubit,
    Nonlinear,
    SingularDenominator,
    SystemParams,
    UndefinedNormalization,
    response_at,
    sweep,
    transmission_eT,
    transmission_eT_reduced,
)
from hybridom.response import qubit_term

from conftest import detunings, drives, systems


def _finite(res):
    return not res.singular.any()


@given(systems(), drives(), detunings)
def test_input_output_identities(p, d, x):
    res = sweep(p, d, [x])
    assume(_finite(res))
    eR = d.eps_R * np.exp(1j * d.theta)
    assert res.eout_L[0] == pytest.approx(2 * res.dc1[0] - d.eps_L, rel=1e-12, abs=1e-12)
    assert res.eout_R[0] == pytest.approx(2 * res.dc2[0] - eR, rel=1e-12, abs=1e-12)


@given(systems(), drives(), detunings)
def test_transmission_is_reflection_plus_one(p, d, x):
    res = sweep(p, d, [x])
    assume(_finite(res))
    lhs = res.eps_T[0]
    rhs = res.eout_L[0] / d.eps_L + 1
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


@given(systems(lossless=False), drives(one_sided=True), st.floats(0.01, 8.0))
def test_conjugation_symmetry_one_sided(p, d, x):
    res = sweep(p, d, [-x, x])
    assume(_finite(res))
    for col in (res.dc1, res.dc2, res.eps_T):
        assert abs(col[0] - np.conj(col[1])) <= 1e-10 * max(1.0, abs(col[1]))
    # the -i prefactor makes the mechanical amplitude anti-conjugate
    assert abs(res.db[0] + np.conj(res.db[1])) <= 1e-10 * max(1.0, abs(res.db[1]))
    assert res.norm_L[0] == pytest.approx(res.norm_L[1], rel=1e-9, abs=1e-12)


@given(systems(), drives(), detunings, st.floats(0.1, 10.0))
def test_drive_homogeneity(p, d, x, s):
    a = sweep(p, d, [x])
    assume(_finite(a))
    b = sweep(p, DriveConfig(d.eps_L * s, d.eps_R * s, d.theta, d.n, d.G, d.G_N), [x])
    for u, v in ((a.db, b.db), (a.dc1, b.dc1), (a.dc2, b.dc2)):
        assert abs(s * u[0] - v[0]) <= 1e-11 * max(1.0, abs(v[0]))
    assert b.norm_L[0] == pytest.approx(a.norm_L[0], rel=1e-10, abs=1e-12)


@given(systems(lossless=True, passive=True), drives(), detunings)
def test_lossless_passive_system_conserves_flux(p, d, x):
    res = sweep(p, d, [x])
    assume(_finite(res))
    out = abs(res.eout_L[0]) ** 2 + abs(res.eout_R[0]) ** 2
    assert out == pytest.approx(d.eps_L ** 2 + d.eps_R ** 2, rel=1e-9)


@given(systems(), drives(), detunings)
def test_rational_transmission_matches_amplitudes(p, d, x):
    res = sweep(p, d, [x])
    assume(_finite(res))
    try:
        eT = transmission_eT(p, d, x)
    except SingularDenominator:
        assume(False)
    assert abs(eT - res.eps_T[0]) <= 1e-9 * max(1.0, abs(eT))


@given(drives(), detunings)
def test_reduced_form_matches_general_without_qubit(d, x):
    p = SystemParams()
    general = transmission_eT(p, d, x)
    reduced = transmission_eT_reduced(d.G, d.n, d.eps_R / d.eps_L, d.theta, x)
    assert abs(general - reduced) <= 1e-9 * max(1.0, abs(general))


@given(systems(), drives(), detunings)
def test_no_qubit_reduction_chain(p, d, x):
    """Linear with g = 0 and nonlinear with G_N = 0 both reduce to the bare system."""
    bare = sweep(p.with_coupling(NoQubit()), d, [x])
    lin = sweep(p.with_coupling(Linear(0.0)), d, [x])
    non = sweep(p.with_coupling(Nonlinear(1.0)), DriveConfig(d.eps_L, d.eps_R, d.theta, d.n, d.G, 0.0), [x])
    assume(_finite(bare))
    for other in (lin, non):
        assert abs(other.dc1[0] - bare.dc1[0]) <= 1e-12 * max(1.0, abs(bare.dc1[0]))


def test_linear_nonlinear_mapping():
    rng = np.random.default_rng(7)
    xs = np.linspace(-5, 5, 201)
    for _ in range(100):
        g = rng.uniform(0.01, 3)
        base = SystemParams(gamma_m=rng.uniform(0, 1), k_d=rng.uniform(0, 1),
                            sigma_z=rng.uniform(-1, 1))
        d = DriveConfig(eps_L=1.0, eps_R=rng.uniform(0, 2), theta=rng.uniform(0, 6),
                        n=rng.uniform(0.2, 2), G=rng.uniform(0.1, 4))
        lin = sweep(base.with_coupling(Linear(g)), d, xs)
        non = sweep(base.with_coupling(Nonlinear(1.0)),
                    DriveConfig(d.eps_L, d.eps_R, d.theta, d.n, d.G, g / 2), xs)
        ok = ~lin.singular
        for a, b in ((lin.db, non.db), (lin.dc1, non.dc1), (lin.dc2, non.dc2)):
            assert np.all(np.abs(a[ok] - b[ok]) <= 1e-12 * np.maximum(1, np.abs(a[ok])))


def test_qubit_term_variants():
    d = DriveConfig(G_N=0.25)
    assert qubit_term(SystemParams(coupling=Linear(0.5)), d) == pytest.approx(-0.25)
    assert qubit_term(SystemParams(coupling=Nonlinear(1.0)), d) == pytest.approx(-0.25)
    assert qubit_term(SystemParams(), d) == 0.0


def test_zero_optomechanical_coupling_is_bare_cavity():
    d = DriveConfig(eps_L=1.0, eps_R=0.5, theta=1.0, G=0.0)
    s = response_at(SystemParams(coupling=Linear(1.0)), d, 0.7)
    assert s.db_plus == 0
    assert s.dc1_plus == pytest.approx(1 / (1 - 0.7j))
    assert s.dc2_plus == pytest.approx(0.5 * np.exp(1j) / (1 - 0.7j))


def test_omia_centre_value():
    """Linear, sigma_z = -1, theta = 3 pi, G = g = 1: eps_T(0) = 2."""
    p = SystemParams(coupling=Linear(1.0))
    d = DriveConfig(eps_L=1.0, eps_R=1.0, theta=3 * math.pi, G=1.0)
    assert abs(transmission_eT(p, d, 0.0) - 2.0) < 1e-9


def test_destructive_phase_gives_transparency_without_qubit():
    d = DriveConfig(eps_L=1.0, eps_R=1.0, theta=3 * math.pi, G=1.0)
    assert abs(transmission_eT(SystemParams(), d, 0.0)) < 1e-12


def test_singular_point_is_flagged():
    p = SystemParams(coupling=Linear(1.0), sigma_z=0.1, k_d=0.1)
    d = DriveConfig(eps_L=1.0, eps_R=1.0, theta=3 * math.pi, G=1.0)
    res = sweep(p, d, [-0.5, 0.0, 0.5])
    assert res.singular.tolist() == [False, True, False]
    assert np.isnan(res.dc1[1])
    with pytest.raises(SingularDenominator):
        response_at(p, d, 0.0)
    with pytest.raises(SingularDenominator):
        transmission_eT(p, d, 0.0)


def test_undefined_normalization():
    d = DriveConfig(eps_L=0.0, eps_R=1.0)
    s = response_at(SystemParams(), d, 0.3)
    assert s.norm_L is None and s.norm_R_by_R is not None
    with pytest.raises(UndefinedNormalization):
        s.get("norm_L")
    with pytest.raises(UndefinedNormalization):
        transmission_eT(SystemParams(), d, 0.3)
    with pytest.raises(UndefinedNormalization):
        sweep(SystemParams(), d, [0.0]).column("re_eps_T")


@pytest.mark.parametrize("grid", [[], [1.0, 0.0], [[0.0, 1.0]]])
def test_bad_grid(grid):
    with pytest.raises(ValueError):
        sweep(SystemParams(), DriveConfig(), grid)


def test_sweep_indexing_and_columns():
    res = sweep(SystemParams(), DriveConfig(G=3.0), np.linspace(-1, 1, 5))
    assert len(res) == 5
    assert [s.x for s in res] == list(res.x)
    assert np.array_equal(res.column("re_eps_T"), res.eps_T.real)
    assert np.array_equal(res.column("norm_L"), res.norm_L)


def test_column_accepts_csv_spellings():
    res = sweep(SystemParams(), DriveConfig(eps_R=1.0, G=1.0), np.linspace(-1, 1, 3))
    assert np.array_equal(res.column("re_eT"), res.eps_T.real)
    assert np.array_equal(res.column("im_eoutR"), res.eout_R.imag)
    assert np.array_equal(res.column("norm_RbyR"), res.norm_R_by_R)
    with pytest.raises(KeyError):
        res.column("re_norm_L")
    with pytest.raises(KeyError):
        res.column("phase")
