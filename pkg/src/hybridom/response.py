"""Closed-form probe response of the linearized system.

Upper-sideband amplitudes follow the ``exp(-i x t)`` convention, with
``x = delta - omega_m`` the probe detuning from the red sideband. The
qubit enters only through ``chi``, which is ``g**2 * sigma_z`` for the
linear coupling and ``4 * G_N**2 * sigma_z`` for the nonlinear one, so the
two variants coincide whenever ``g = 2 G_N``.

A positive ``sigma_z`` flips the sign of the qubit term and acts like gain;
the expressions are evaluated as-is for any ``sigma_z`` in [-1, 1].
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import SingularDenominator, UndefinedNormalization
from .params import DriveConfig, Linear, Nonlinear, SystemParams, canonical_coupling

SINGULAR_RTOL = 1e-14


def qubit_term(params: SystemParams, drive: DriveConfig) -> float:
    """``chi`` such that the mechanical bracket reads ``(-ix+gm/2)(-ix+kd/2) - chi``."""
    coupling = canonical_coupling(params.coupling)
    if isinstance(coupling, Linear):
        return coupling.g ** 2 * params.sigma_z
    if isinstance(coupling, Nonlinear):
        return 4.0 * drive.G_N ** 2 * params.sigma_z
    return 0.0


def _amplitudes(params: SystemParams, drive: DriveConfig, x):
    """Return ``(db, dc1, dc2, singular)`` as arrays over ``x``."""
    x = np.asarray(x, dtype=float)
    kappa = params.kappa
    G, n = drive.G, drive.n
    eL = complex(drive.eps_L)
    eR = drive.eps_R * np.exp(1j * drive.theta)

    cav = kappa - 1j * x
    mech = 0.5 * params.gamma_m - 1j * x
    chi = qubit_term(params, drive)

    if G == 0:
        zeros = np.zeros_like(cav)
        return zeros, eL / cav, eR / cav, np.zeros(x.shape, dtype=bool)

    if chi == 0:
        # qubit decoupled: the (-ix + kd/2) factor is common to every term
        qf = np.ones_like(cav)
        bracket = mech
    else:
        qf = 0.5 * params.k_d - 1j * x
        bracket = mech * qf - chi
    load = G ** 2 * (n ** 2 + 1)

    den = cav * bracket + qf * load
    scale = np.abs(cav) * np.abs(bracket) + np.abs(qf) * load
    singular = np.abs(den) < SINGULAR_RTOL * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        safe = np.where(singular, np.nan, den)
        db = -1j * G * qf * (n * eR - eL) / safe
        dc1 = (G ** 2 * qf * (n * eR + n ** 2 * eL) + eL * cav * bracket) / (cav * safe)
        dc2 = (G ** 2 * qf * (n * eL + eR) + eR * cav * bracket) / (cav * safe)
    return db, dc1, dc2, singular


@dataclass(frozen=True)
class ResponseSample:
    x: float
    db_plus: complex
    dc1_plus: complex
    dc2_plus: complex
    eout_L_plus: complex
    eout_R_plus: complex
    eps_T: Optional[complex]
    norm_L: Optional[float]
    norm_R_by_L: Optional[float]
    norm_R_by_R: Optional[float]
    singular: bool = False

    def get(self, name: str):
        """Like attribute access, but raise if the quantity is undefined."""
        value = getattr(self, name)
        if value is None:
            raise UndefinedNormalization(f"{name} is undefined for a zero probe amplitude")
        return value


def response_at(params: SystemParams, drive: DriveConfig, x: float) -> ResponseSample:
    """Fluctuation amplitudes and output fields at a single detuning."""
    res = sweep(params, drive, np.array([float(x)]), _check_grid=False)
    sample = res[0]
    if sample.singular:
        raise SingularDenominator(x, "probe response")
    return sample


def transmission_eT(params: SystemParams, drive: DriveConfig, x):
    """``eps_T = 2 kappa dc1+ / eps_L`` written out as a single rational expression.

    Accepts a scalar or an array of detunings.
    """
    if drive.eps_L <= 0:
        raise UndefinedNormalization("eps_T needs eps_L > 0")
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    k = params.kappa
    G, n = drive.G, drive.n
    eL = drive.eps_L
    eR = drive.eps_R * np.exp(1j * drive.theta)
    chi = qubit_term(params, drive)

    cav = -1j * x + k
    if G == 0:
        out = 2 * k / cav
        return complex(out[0]) if scalar else out
    if chi == 0:
        q = np.ones_like(cav)
        br = -1j * x + 0.5 * params.gamma_m
    else:
        q = -1j * x + 0.5 * params.k_d
        br = (-1j * x + 0.5 * params.gamma_m) * q - chi
    num = G ** 2 * 2 * k * (n * eR * q + n ** 2 * eL * q) + 2 * k * eL * cav * br
    den = eL * br * cav ** 2 + q * G ** 2 * (n ** 2 + 1) * cav * eL
    scale = eL * (np.abs(br) * np.abs(cav) ** 2 + np.abs(q) * G ** 2 * (n ** 2 + 1) * np.abs(cav))
    bad = np.abs(den) < SINGULAR_RTOL * scale
    if bad.any():
        raise SingularDenominator(float(x[np.argmax(bad)]), "eps_T")
    out = num / den
    return complex(out[0]) if scalar else out


def transmission_eT_reduced(G, n, eps_ratio, theta, x, kappa=1.0):
    """Lossless, qubit-free transmission (cubic denominator form).

    ``eps_ratio`` is ``eps_R / eps_L``. Valid only for ``g = G_N = 0`` and
    ``gamma_m = k_d = 0``.
    """
    x = np.asarray(x, dtype=float)
    k = kappa
    num = G ** 2 * 2 * k * (n * eps_ratio * np.exp(1j * theta) + n ** 2) - 2 * k * x * (x + 1j * k)
    den = (k - 1j * x) * (G ** 2 * (n ** 2 + 1) - x * (x + 1j * k))
    return num / den


class SweepResult:
    """Column-oriented sweep output; indexing yields :class:`ResponseSample`."""

    def __init__(self, x, db, dc1, dc2, eout_L, eout_R, eps_T, norm_L, norm_R_by_L,
                 norm_R_by_R, singular):
        self.x = x
        self.db = db
        self.dc1 = dc1
        self.dc2 = dc2
        self.eout_L = eout_L
        self.eout_R = eout_R
        self.eps_T = eps_T
        self.norm_L = norm_L
        self.norm_R_by_L = norm_R_by_L
        self.norm_R_by_R = norm_R_by_R
        self.singular = singular

    def __len__(self):
        return len(self.x)

    def __getitem__(self, i) -> ResponseSample:
        def opt(arr, cast):
            return None if arr is None else cast(arr[i])

        return ResponseSample(
            x=float(self.x[i]),
            db_plus=complex(self.db[i]),
            dc1_plus=complex(self.dc1[i]),
            dc2_plus=complex(self.dc2[i]),
            eout_L_plus=complex(self.eout_L[i]),
            eout_R_plus=complex(self.eout_R[i]),
            eps_T=opt(self.eps_T, complex),
            norm_L=opt(self.norm_L, float),
            norm_R_by_L=opt(self.norm_R_by_L, float),
            norm_R_by_R=opt(self.norm_R_by_R, float),
            singular=bool(self.singular[i]),
        )

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    # CSV header spellings accepted alongside the attribute names
    _ALIASES = {"eT": "eps_T", "eoutL": "eout_L", "eoutR": "eout_R",
                "norm_RbyL": "norm_R_by_L", "norm_RbyR": "norm_R_by_R"}
    _COMPLEX = ("db", "dc1", "dc2", "eout_L", "eout_R", "eps_T")
    _REAL = ("norm_L", "norm_R_by_L", "norm_R_by_R")

    def column(self, name: str):
        """Real-valued series by name: ``norm_L``, ``re_eT``, ``im_db`` ..."""
        part, base = (name[:3], name[3:]) if name.startswith(("re_", "im_")) else ("", name)
        base = self._ALIASES.get(base, base)
        if base not in (self._COMPLEX if part else self._REAL):
            raise KeyError(f"unknown response quantity {name!r}")
        arr = getattr(self, base)
        if arr is None:
            raise UndefinedNormalization(f"{base} is undefined for this drive")
        if part == "re_":
            return arr.real
        return arr.imag if part == "im_" else arr


def sweep(params: SystemParams, drive: DriveConfig, grid, _check_grid=True) -> SweepResult:
    """Evaluate the response on every grid point.

    Singular points are flagged in ``result.singular`` and carry NaN values
    instead of aborting the sweep.
    """
    x = np.asarray(grid, dtype=float)
    if _check_grid:
        if x.ndim != 1 or x.size == 0:
            raise ValueError("grid must be a non-empty 1-D sequence")
        if x.size > 1 and not np.all(np.diff(x) > 0):
            raise ValueError("grid must be strictly increasing")
    db, dc1, dc2, singular = _amplitudes(params, drive, x)
    k = params.kappa
    eR = drive.eps_R * np.exp(1j * drive.theta)
    eout_L = 2 * k * dc1 - drive.eps_L
    eout_R = 2 * k * dc2 - eR

    eps_T = norm_L = norm_R_by_L = norm_R_by_R = None
    if drive.eps_L > 0:
        eps_T = 2 * k * dc1 / drive.eps_L
        norm_L = np.abs(eout_L / drive.eps_L) ** 2
        norm_R_by_L = np.abs(eout_R / drive.eps_L) ** 2
    if drive.eps_R > 0:
        norm_R_by_R = np.abs(eout_R / drive.eps_R) ** 2
    return SweepResult(x, db, dc1, dc2, eout_L, eout_R, eps_T, norm_L, norm_R_by_L,
                       norm_R_by_R, singular)
