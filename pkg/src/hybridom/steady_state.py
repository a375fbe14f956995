"""Mean-field steady state of the driven double cavity.

The mechanical mean ``b_s`` shifts both cavity detunings
(``Delta_{1,2} = Delta_c -/+ 2 g0 Re b_s``), which changes the intracavity
amplitudes, which in turn set ``b_s`` through the radiation-pressure
imbalance ``|c2s|^2 - |c1s|^2``. :func:`solve_steady` closes that loop with
a damped fixed-point iteration instead of assuming the detunings sit on the
red sideband.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from .exceptions import NonConvergence, SingularDenominator
from .params import DriveConfig, Linear, Nonlinear, SystemParams, canonical_coupling

_TINY = 1e-14


@dataclass(frozen=True)
class SteadyState:
    b_s: complex
    sigma_minus_s: complex
    c1_s: complex
    c2_s: complex
    delta_1: float
    delta_2: float
    residual: float
    iterations: int
    sideband_approx: bool = False

    def to_dict(self) -> dict:
        out = {}
        for name in ("b_s", "sigma_minus_s", "c1_s", "c2_s"):
            z = complex(getattr(self, name))
            out[name] = {"re": z.real, "im": z.imag}
        out.update(
            delta_1=self.delta_1,
            delta_2=self.delta_2,
            residual=self.residual,
            iterations=self.iterations,
            sideband_approx=self.sideband_approx,
        )
        return out


def _checked(den, scale, where):
    if abs(den) < _TINY * max(scale, 1.0):
        raise SingularDenominator(where=where)
    return den


def _detunings(p: SystemParams, b, sideband_approx):
    if sideband_approx:
        return p.omega_m, p.omega_m
    shift = p.g0 * 2.0 * b.real
    return p.delta_c - shift, p.delta_c + shift


def _b_update(p: SystemParams, b, sideband_approx):
    """One pass b -> (Delta1, Delta2) -> (c1, c2) -> b."""
    d1, d2 = _detunings(p, b, sideband_approx)
    c1 = p.eps_cL / (p.kappa + 1j * d1)
    c2 = p.eps_cR / (p.kappa + 1j * d2)
    force = -1j * p.g0 * (abs(c2) ** 2 - abs(c1) ** 2)
    mech = 0.5 * p.gamma_m + 1j * p.omega_m
    coupling = canonical_coupling(p.coupling)
    if isinstance(coupling, Linear):
        qd = 0.5 * p.k_d + 1j * p.omega_q
        chi = coupling.g ** 2 * p.sigma_z
    elif isinstance(coupling, Nonlinear):
        qd = 0.5 * p.k_d + 1j * p.omega_q
        chi = 2.0 * coupling.g_N ** 2 * abs(b) ** 2 * p.sigma_z
    else:
        # qubit factor cancels between numerator and denominator
        return force / _checked(mech, abs(mech), "mechanical response"), c1, c2
    den = _checked(mech * qd - chi, abs(mech * qd) + abs(chi), "b_s denominator")
    return force * qd / den, c1, c2


def _sigma_minus(p: SystemParams, b):
    coupling = canonical_coupling(p.coupling)
    if isinstance(coupling, Linear):
        qd = _checked(0.5 * p.k_d + 1j * p.omega_q, 1.0, "qubit response")
        return 1j * coupling.g * b * p.sigma_z / qd
    if isinstance(coupling, Nonlinear):
        qd = _checked(0.5 * p.k_d + 1j * p.omega_q, 1.0, "qubit response")
        return 1j * coupling.g_N * b * b * p.sigma_z / qd
    return 0j


def steady_residual(params: SystemParams, state: SteadyState) -> float:
    """Max-norm misfit of ``state`` substituted back into the mean-value equations.

    Written out independently of the iteration so it can serve as a check
    on it.
    """
    p = params
    b, s, c1, c2 = state.b_s, state.sigma_minus_s, state.c1_s, state.c2_s
    if state.sideband_approx:
        d1 = d2 = p.omega_m
    else:
        d1 = p.delta_c - p.g0 * (b + b.conjugate()).real
        d2 = p.delta_c + p.g0 * (b + b.conjugate()).real
    r_delta = max(abs(state.delta_1 - d1), abs(state.delta_2 - d2))
    r_c1 = abs(c1 * (p.kappa + 1j * d1) - p.eps_cL) / abs(p.kappa + 1j * d1)
    r_c2 = abs(c2 * (p.kappa + 1j * d2) - p.eps_cR) / abs(p.kappa + 1j * d2)

    mech = 0.5 * p.gamma_m + 1j * p.omega_m
    imbalance = abs(c2) ** 2 - abs(c1) ** 2
    coupling = canonical_coupling(p.coupling)
    if isinstance(coupling, Linear):
        qd = 0.5 * p.k_d + 1j * p.omega_q
        rhs_b = -1j * p.g0 * imbalance * qd / (mech * qd - coupling.g ** 2 * p.sigma_z)
        rhs_s = 1j * coupling.g * b * p.sigma_z / qd
    elif isinstance(coupling, Nonlinear):
        qd = 0.5 * p.k_d + 1j * p.omega_q
        G_N = coupling.g_N * abs(b)
        rhs_b = -1j * p.g0 * imbalance * qd / (mech * qd - 2.0 * G_N ** 2 * p.sigma_z)
        rhs_s = 1j * coupling.g_N * b ** 2 * p.sigma_z / qd
    else:
        rhs_b = -1j * p.g0 * imbalance / mech
        rhs_s = 0j
    return max(r_delta, r_c1, r_c2, abs(b - rhs_b), abs(s - rhs_s))


def _state_from_b(p, b, iterations, sideband_approx):
    d1, d2 = _detunings(p, b, sideband_approx)
    c1 = p.eps_cL / (p.kappa + 1j * d1)
    c2 = p.eps_cR / (p.kappa + 1j * d2)
    return SteadyState(
        b_s=complex(b),
        sigma_minus_s=complex(_sigma_minus(p, b)),
        c1_s=complex(c1),
        c2_s=complex(c2),
        delta_1=float(d1),
        delta_2=float(d2),
        residual=0.0,
        iterations=iterations,
        sideband_approx=sideband_approx,
    )


def solve_steady(
    params: SystemParams,
    tol: float = 1e-12,
    max_iter: int = 1000,
    damping: float = 0.5,
    sideband_approx: bool = False,
) -> SteadyState:
    """Solve the coupled mean-value equations by damped fixed-point iteration.

    Parameters
    ----------
    params : SystemParams
    tol : float
        Required back-substitution residual.
    max_iter : int
    damping : float
        Weight given to the new iterate, ``b <- (1 - damping) b + damping F(b)``.
    sideband_approx : bool
        Pin both effective detunings to ``omega_m`` rather than solving for
        them. The nonlinear variant still iterates, since ``G_N`` depends on
        ``|b_s|``.

    Raises
    ------
    NonConvergence
        If the residual still exceeds ``tol`` after ``max_iter`` iterations.
    SingularDenominator
        If a denominator magnitude drops below 1e-14 of its scale.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    p = params
    b = 0j
    residual = float("inf")
    for it in range(1, max_iter + 1):
        fb, _, _ = _b_update(p, b, sideband_approx)
        if abs(fb - b) <= tol:
            state = _state_from_b(p, fb, it, sideband_approx)
            residual = steady_residual(p, state)
            if residual <= tol:
                return _with_residual(state, residual)
        b = (1.0 - damping) * b + damping * fb
    state = _state_from_b(p, b, max_iter, sideband_approx)
    residual = steady_residual(p, state)
    if residual <= tol:
        return _with_residual(state, residual)
    raise NonConvergence(max_iter, residual)


def _with_residual(state, residual):
    return replace(state, residual=float(residual))


def drive_from_steady(
    params: SystemParams,
    state: SteadyState,
    eps_L: float = 1.0,
    eps_R: float = 0.0,
    theta: float = 0.0,
) -> DriveConfig:
    """Effective couplings ``G = g0 |c1s|``, ``n = |c2s / c1s|``, ``G_N = g_N |b_s|``.

    The intracavity amplitudes are taken real (only magnitudes are kept).
    """
    c1 = abs(state.c1_s)
    if c1 == 0:
        raise ValueError("c1_s vanishes; photon-number ratio n is undefined")
    coupling = canonical_coupling(params.coupling)
    G_N = coupling.g_N * abs(state.b_s) if isinstance(coupling, Nonlinear) else 0.0
    return DriveConfig(
        eps_L=eps_L,
        eps_R=eps_R,
        theta=theta,
        n=abs(state.c2_s) / c1,
        G=params.g0 * c1,
        G_N=G_N,
    )
