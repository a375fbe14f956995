"""Physical parameters of the double-cavity / qubit system.

Every rate is stored in units of the cavity decay rate, so ``kappa`` is
always 1. The qubit coupling variant is a small tagged union
(:class:`NoQubit`, :class:`Linear`, :class:`Nonlinear`).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Union


@dataclass(frozen=True)
class NoQubit:
    kind = "none"


@dataclass(frozen=True)
class Linear:
    """Jaynes-Cummings coupling ``g (b s+ + b^dag s-)``."""

    g: float
    kind = "linear"


@dataclass(frozen=True)
class Nonlinear:
    """Two-phonon coupling ``g_N (b^2 s+ + b^dag^2 s-)``."""

    g_N: float
    kind = "nonlinear"


QubitCoupling = Union[NoQubit, Linear, Nonlinear]


def canonical_coupling(coupling: QubitCoupling) -> QubitCoupling:
    """Map every zero-strength coupling onto :class:`NoQubit`."""
    if isinstance(coupling, Linear) and coupling.g == 0:
        return NoQubit()
    if isinstance(coupling, Nonlinear) and coupling.g_N == 0:
        return NoQubit()
    return coupling


@dataclass(frozen=True)
class SystemParams:
    gamma_m: float = 0.0
    k_d: float = 0.0
    omega_m: float = 10.0
    omega_q: float = 10.0
    delta_c: float = 10.0
    g0: float = 0.1
    coupling: QubitCoupling = field(default_factory=NoQubit)
    sigma_z: float = -1.0
    eps_cL: float = 1.0
    eps_cR: float = 1.0
    kappa: float = 1.0

    def with_coupling(self, coupling: QubitCoupling) -> "SystemParams":
        return replace(self, coupling=coupling)

    def canonical(self) -> "SystemParams":
        return replace(self, coupling=canonical_coupling(self.coupling))


@dataclass(frozen=True)
class DriveConfig:
    """Probe drive plus the effective couplings the response depends on.

    ``G`` and ``G_N`` are given directly when reproducing a figure; use
    :func:`hybridom.steady_state.drive_from_steady` to derive them from a
    solved steady state instead.
    """

    eps_L: float = 1.0
    eps_R: float = 0.0
    theta: float = 0.0
    n: float = 1.0
    G: float = 1.0
    G_N: float = 0.0


@dataclass
class ValidationReport:
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def __bool__(self):
        return self.ok


def _check_finite(obj, report):
    for f in fields(obj):
        value = getattr(obj, f.name)
        if isinstance(value, (int, float)) and not math.isfinite(value):
            report.errors.append(f"{f.name} is not finite")


def validate(params: SystemParams, drive: DriveConfig | None = None) -> ValidationReport:
    """Check invariants; failures and warnings are collected, never raised."""
    report = ValidationReport()
    _check_finite(params, report)
    if params.kappa != 1.0:
        report.errors.append("kappa must be 1 (all rates are in units of kappa)")
    for name in ("gamma_m", "k_d", "g0", "eps_cL", "eps_cR"):
        if getattr(params, name) < 0:
            report.errors.append(f"{name} must be non-negative")
    if not -1.0 <= params.sigma_z <= 1.0:
        report.errors.append("sigma_z out of range [-1, 1]")

    c = params.coupling
    if isinstance(c, Linear):
        if not math.isfinite(c.g) or c.g < 0:
            report.errors.append("linear coupling g must be finite and non-negative")
    elif isinstance(c, Nonlinear):
        if not math.isfinite(c.g_N) or c.g_N < 0:
            report.errors.append("nonlinear coupling g_N must be finite and non-negative")
    elif not isinstance(c, NoQubit):
        report.errors.append(f"unknown coupling type {type(c).__name__}")

    if params.omega_m <= params.kappa:
        report.warnings.append("not resolved sideband (omega_m <= kappa)")

    if drive is not None:
        _check_finite(drive, report)
        for name in ("eps_L", "eps_R", "n", "G", "G_N"):
            if getattr(drive, name) < 0:
                report.errors.append(f"{name} must be non-negative")
        if drive.G_N > 0 and not isinstance(canonical_coupling(c), Nonlinear):
            report.warnings.append("G_N is ignored unless the coupling is nonlinear")
    return report


# -- serialization -----------------------------------------------------------

def coupling_to_dict(coupling: QubitCoupling) -> dict:
    out = {"kind": coupling.kind}
    out.update(asdict(coupling))
    return out


def coupling_from_dict(d: dict) -> QubitCoupling:
    kind = d.get("kind", "none")
    if kind == "none":
        return NoQubit()
    if kind == "linear":
        return Linear(g=float(d["g"]))
    if kind == "nonlinear":
        return Nonlinear(g_N=float(d["g_N"]))
    raise ValueError(f"unknown coupling kind {kind!r}")


def params_to_dict(params: SystemParams) -> dict:
    out = {f.name: getattr(params, f.name) for f in fields(params)}
    out["coupling"] = coupling_to_dict(params.coupling)
    return out


def params_from_dict(d: dict) -> SystemParams:
    d = dict(d)
    known = {f.name for f in fields(SystemParams)}
    unknown = set(d) - known
    if unknown:
        raise ValueError(f"unknown system keys: {sorted(unknown)}")
    if "coupling" in d:
        d["coupling"] = coupling_from_dict(d["coupling"])
    return SystemParams(**{k: v if k == "coupling" else float(v) for k, v in d.items()})


def drive_to_dict(drive: DriveConfig) -> dict:
    return asdict(drive)


def drive_from_dict(d: dict) -> DriveConfig:
    known = {f.name for f in fields(DriveConfig)}
    unknown = set(d) - known
    if unknown:
        raise ValueError(f"unknown drive keys: {sorted(unknown)}")
    return DriveConfig(**{k: float(v) for k, v in d.items()})
