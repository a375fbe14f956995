"""Time-domain cross-check of the closed-form response.

The deterministic part of the linearized fluctuation equations (slowly
varying frame, noise dropped) is integrated from rest with classical RK4
under the harmonic probe ``exp(-i x t)``. Once transients have died out the
``+`` amplitude is read off by projecting each signal onto ``exp(-i x t)``
over an integer number of drive periods.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .exceptions import NotSettled, StepTooLarge
from .params import DriveConfig, Linear, Nonlinear, SystemParams, canonical_coupling
from .response import sweep


@numba.njit(cache=True)
def _rk4_project(gm, kd, k, G, Gn, q, qsz, fL, fR, x, dt, n_transient, n_sample):
    """Integrate from zero state; return projections over the two half windows.

    State is (b, s, c1, c2) with
        b'  = -gm/2 b - i q s + i G c1 - i Gn c2
        s'  = i qsz b - kd/2 s
        c1' = -k c1 + i G b + fL e^{-ixt}
        c2' = -k c2 - i Gn b + fR e^{-ixt}
    """
    b = 0j
    s = 0j
    c1 = 0j
    c2 = 0j
    eh = np.exp(-0.5j * x * dt)
    acc = np.zeros(8, np.complex128)
    half = n_sample // 2
    h6 = dt / 6.0
    total = n_transient + n_sample
    for st in range(total):
        d0 = np.exp(-1j * x * (st * dt))
        d1 = d0 * eh
        d2 = d1 * eh

        kb1 = -0.5 * gm * b - 1j * q * s + 1j * G * c1 - 1j * Gn * c2
        ks1 = 1j * qsz * b - 0.5 * kd * s
        ka1 = -k * c1 + 1j * G * b + fL * d0
        kc1 = -k * c2 - 1j * Gn * b + fR * d0

        b2 = b + 0.5 * dt * kb1
        s2 = s + 0.5 * dt * ks1
        a2 = c1 + 0.5 * dt * ka1
        e2 = c2 + 0.5 * dt * kc1
        kb2 = -0.5 * gm * b2 - 1j * q * s2 + 1j * G * a2 - 1j * Gn * e2
        ks2 = 1j * qsz * b2 - 0.5 * kd * s2
        ka2 = -k * a2 + 1j * G * b2 + fL * d1
        kc2 = -k * e2 - 1j * Gn * b2 + fR * d1

        b3 = b + 0.5 * dt * kb2
        s3 = s + 0.5 * dt * ks2
        a3 = c1 + 0.5 * dt * ka2
        e3 = c2 + 0.5 * dt * kc2
        kb3 = -0.5 * gm * b3 - 1j * q * s3 + 1j * G * a3 - 1j * Gn * e3
        ks3 = 1j * qsz * b3 - 0.5 * kd * s3
        ka3 = -k * a3 + 1j * G * b3 + fL * d1
        kc3 = -k * e3 - 1j * Gn * b3 + fR * d1

        b4 = b + dt * kb3
        s4 = s + dt * ks3
        a4 = c1 + dt * ka3
        e4 = c2 + dt * kc3
        kb4 = -0.5 * gm * b4 - 1j * q * s4 + 1j * G * a4 - 1j * Gn * e4
        ks4 = 1j * qsz * b4 - 0.5 * kd * s4
        ka4 = -k * a4 + 1j * G * b4 + fL * d2
        kc4 = -k * e4 - 1j * Gn * b4 + fR * d2

        b += h6 * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4)
        s += h6 * (ks1 + 2.0 * ks2 + 2.0 * ks3 + ks4)
        c1 += h6 * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4)
        c2 += h6 * (kc1 + 2.0 * kc2 + 2.0 * kc3 + kc4)

        j = st + 1 - n_transient
        if j > 0:
            w = np.exp(1j * x * ((st + 1) * dt))
            o = 0 if j <= half else 4
            acc[o] += b * w
            acc[o + 1] += s * w
            acc[o + 2] += c1 * w
            acc[o + 3] += c2 * w
    for i in range(8):
        acc[i] /= half
    return acc


@dataclass(frozen=True)
class OracleResult:
    x: float
    db_plus: complex
    dsigma_plus: complex
    dc1_plus: complex
    dc2_plus: complex
    transient_time: float
    rel_error_estimate: float
    dt: float


def _coefficients(params: SystemParams, drive: DriveConfig):
    coupling = canonical_coupling(params.coupling)
    if isinstance(coupling, Linear):
        q = coupling.g
    elif isinstance(coupling, Nonlinear):
        # b_s taken real: -2i g_N b_s* and 2i g_N b_s sigma_z both reduce to 2 G_N
        q = 2.0 * drive.G_N
    else:
        q = 0.0
    return q


def drift_matrix(params: SystemParams, drive: DriveConfig) -> np.ndarray:
    """Homogeneous part of the fluctuation equations for (b, sigma, c1, c2)."""
    q = _coefficients(params, drive)
    G, Gn = drive.G, drive.G * drive.n
    return np.array([
        [-0.5 * params.gamma_m, -1j * q, 1j * G, -1j * Gn],
        [1j * q * params.sigma_z, -0.5 * params.k_d, 0, 0],
        [1j * G, 0, -params.kappa, 0],
        [-1j * Gn, 0, 0, -params.kappa],
    ], dtype=complex)


def default_dt(params: SystemParams, drive: DriveConfig) -> float:
    q = _coefficients(params, drive)
    fastest = max(params.kappa, params.k_d, q, drive.G, drive.G * drive.n)
    return 0.01 / fastest


def default_transient(params: SystemParams, drive: DriveConfig) -> float:
    """At least ``20 / min(rates)``, stretched if the slowest eigenmode decays slower."""
    rates = [params.kappa, params.gamma_m]
    if _coefficients(params, drive) != 0:
        rates.append(params.k_d)
    t = 20.0 / min(rates)
    slowest = -np.linalg.eigvals(drift_matrix(params, drive)).real.min()
    if slowest <= 0:
        raise NotSettled(float("nan"), math.inf)
    return max(t, 25.0 / slowest)


def _run(params, drive, x, dt_target, t_transient, t_sample):
    q = _coefficients(params, drive)
    fL = complex(drive.eps_L)
    fR = complex(drive.eps_R * np.exp(1j * drive.theta))
    if x != 0:
        period = 2 * math.pi / abs(x)
        n_periods = max(2, math.ceil(t_sample / period))
        n_periods += n_periods % 2
        per = math.ceil(period / dt_target)
        dt = period / per
        n_sample = n_periods * per
    else:
        dt = dt_target
        n_sample = 2 * math.ceil(t_sample / (2 * dt))
    n_transient = math.ceil(t_transient / dt)
    acc = _rk4_project(
        params.gamma_m, params.k_d, params.kappa, drive.G, drive.G * drive.n, q,
        q * params.sigma_z, fL, fR, float(x), dt, n_transient, n_sample,
    )
    first, second = acc[:4], acc[4:]
    return 0.5 * (first + second), first, second, dt


def _rel(a, b, floor):
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), floor)))


def integrate_response(
    params: SystemParams,
    drive: DriveConfig,
    x: float,
    t_transient: float | None = None,
    t_sample: float | None = None,
    dt: float | None = None,
    tol: float = 1e-4,
) -> OracleResult:
    """Steady oscillation amplitudes at detuning ``x`` from direct time stepping.

    Runs twice (``dt`` and ``dt/2``); the half-step result is returned and the
    difference provides the Richardson error estimate.

    Raises
    ------
    NotSettled
        The two halves of the sampling window disagree by more than ``tol``.
    StepTooLarge
        Halving ``dt`` changes the amplitudes by more than ``tol``.
    """
    coupled = _coefficients(params, drive) != 0
    if params.gamma_m <= 0 or (coupled and params.k_d <= 0):
        raise ValueError("time-domain oracle needs gamma_m > 0 and k_d > 0")
    x = float(x)
    dt = default_dt(params, drive) if dt is None else dt
    if t_transient is None:
        t_transient = default_transient(params, drive)
    if t_sample is None:
        t_sample = 10 * 2 * math.pi / max(abs(x), params.kappa)
    floor = 1e-6 * (drive.eps_L + drive.eps_R) / params.kappa
    if floor == 0:
        floor = 1e-300

    coarse, _, _, _ = _run(params, drive, x, dt, t_transient, t_sample)
    fine, first, second, dt_used = _run(params, drive, x, dt / 2, t_transient, t_sample)

    drift = _rel(first, second, floor)
    if drift > tol:
        raise NotSettled(x, drift)
    change = _rel(coarse, fine, floor)
    if change > tol:
        raise StepTooLarge(x, change)
    return OracleResult(
        x=x,
        db_plus=complex(fine[0]),
        dsigma_plus=complex(fine[1]),
        dc1_plus=complex(fine[2]),
        dc2_plus=complex(fine[3]),
        transient_time=float(t_transient),
        rel_error_estimate=change / 15.0,
        dt=dt_used,
    )


@dataclass(frozen=True)
class OracleComparison:
    x: float
    closed_form: tuple
    oracle: tuple
    rel_error: float
    ok: bool

    def to_dict(self) -> dict:
        names = ("db_plus", "dc1_plus", "dc2_plus")
        return {
            "x": self.x,
            "closed_form": {n: [z.real, z.imag] for n, z in zip(names, self.closed_form)},
            "oracle": {n: [z.real, z.imag] for n, z in zip(names, self.oracle)},
            "rel_error": self.rel_error,
            "ok": self.ok,
        }


def oracle_check(params: SystemParams, drive: DriveConfig, grid, tol: float = 1e-4,
                 **kwargs) -> list:
    """Compare the time-domain amplitudes with the closed form at each grid point."""
    res = sweep(params, drive, grid)
    floor = max(1e-6 * (drive.eps_L + drive.eps_R) / params.kappa, 1e-300)
    out = []
    for i, x in enumerate(res.x):
        ref = np.array([res.db[i], res.dc1[i], res.dc2[i]])
        orc = integrate_response(params, drive, x, tol=tol, **kwargs)
        got = np.array([orc.db_plus, orc.dc1_plus, orc.dc2_plus])
        err = _rel(got, ref, floor)
        out.append(OracleComparison(float(x), tuple(complex(z) for z in ref),
                                    tuple(complex(z) for z in got), err, bool(err <= tol)))
    return out
