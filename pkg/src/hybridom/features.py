"""Locating transmission, synthesis and absorption features in a sweep.

Numeric extrema are bracketed on the grid, refined by golden-section
search and polished with a three-point parabolic step. CPT points are
additionally compared with the closed-form roots of the lossless quartic
``x^4 - A x^2 - e kappa^2 = 0`` (``e`` the effective qubit coupling squared).
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Callable, List

import numpy as np
from scipy.signal import find_peaks, peak_widths

from .exceptions import GridTooCoarse
from .params import DriveConfig, Linear, Nonlinear, QubitCoupling, SystemParams, canonical_coupling
from .response import _amplitudes, sweep

TOL_CPT = 1e-6
TOL_CPT_R = 1e-3
TOL_CPS = 1e-3
IMAG_TOL = 1e-9
CENTER_TOL = 1e-3

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


# -- closed form -------------------------------------------------------------

@dataclass(frozen=True)
class ClosedFormRoots:
    roots: tuple  # x1, x2 (inner pair), x3, x4 (outer pair)

    @property
    def real(self) -> List[float]:
        return sorted(z.real for z in self.roots if abs(z.imag) <= IMAG_TOL)

    @property
    def complex(self) -> List[complex]:
        return [z for z in self.roots if abs(z.imag) > IMAG_TOL]


def cpt_roots_closed_form(
    G: float,
    coupling: QubitCoupling,
    kappa: float = 1.0,
    G_N: float = 0.0,
    sigma_z: float = -1.0,
) -> ClosedFormRoots:
    """Detunings of perfect transmission for ``eps_R = 0``, ``n = 1`` and no losses.

    For the linear coupling the qubit strength is ``coupling.g``; for the
    nonlinear coupling it is the effective ``G_N`` (``4 G_N^2`` replaces
    ``g^2``). The usual form assumes the qubit ground state; other
    ``sigma_z`` values enter as ``g^2 -> -sigma_z g^2``. The four roots are
    returned unfiltered, inner pair first.
    """
    coupling = canonical_coupling(coupling)
    if isinstance(coupling, Linear):
        e = -sigma_z * coupling.g ** 2
    elif isinstance(coupling, Nonlinear):
        e = -sigma_z * 4.0 * G_N ** 2
    else:
        e = 0.0
    k2 = kappa ** 2
    a = 2.0 * G ** 2 + e - k2
    s = cmath.sqrt(a * a + 4.0 * e * k2)
    # roots y = x^2 of y^2 - a y - e k^2 = 0; take the larger-magnitude one
    # from the formula and the other from the product to avoid cancellation
    big = (a + s) / 2.0 if a.real >= 0 else (a - s) / 2.0
    small = -e * k2 / big if big != 0 else 0j
    y_out, y_in = (big, small) if a.real >= 0 else (small, big)
    inner, outer = cmath.sqrt(y_in), cmath.sqrt(y_out)
    return ClosedFormRoots((-inner, inner, -outer, outer))


# -- 1-D refinement -----------------------------------------------------------

def _golden_min(f: Callable[[float], float], a: float, b: float, xtol: float = 1e-12,
                max_iter: int = 200) -> float:
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) <= xtol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = c if fc <= fd else d
    fx = min(fc, fd)
    # parabolic polish through (a, x, b)
    fa, fb = f(a), f(b)
    den = (x - a) * (fx - fb) - (x - b) * (fx - fa)
    if den != 0 and all(map(math.isfinite, (fa, fb, fx))):
        num = (x - a) ** 2 * (fx - fb) - (x - b) ** 2 * (fx - fa)
        xp = x - 0.5 * num / den
        if a < xp < b:
            fp = f(xp)
            if fp < fx:
                x = xp
    return x


def _ripple_floor(y: np.ndarray) -> float:
    """Smallest prominence that is not roundoff ripple on a flat stretch."""
    top, bottom = np.max(y), np.min(y)
    return 1e-9 * (top - bottom) + 1e-13 * max(abs(top), abs(bottom), 1.0)


def _local_minima(y: np.ndarray) -> np.ndarray:
    """Indices of interior local minima; plateaus resolve to their leftmost point."""
    y = np.asarray(y, dtype=float)
    finite = np.isfinite(y)
    if not finite.any():
        return np.array([], dtype=int)
    filled = np.where(finite, y, np.max(y[finite]) + 1.0)
    idx, props = find_peaks(-filled, plateau_size=1, prominence=_ripple_floor(y[finite]))
    return props["left_edges"].astype(int)


def _refine(f, xs, i, j=None):
    """Minimize ``f`` inside the grid bracket around indices ``i..j``."""
    j = i if j is None else j
    lo = xs[max(i - 1, 0)]
    hi = xs[min(j + 1, len(xs) - 1)]
    x = _golden_min(f, lo, hi)
    span = hi - lo
    if min(x - lo, hi - x) < 1e-9 * max(span, 1e-300):
        warnings.warn(
            f"extremum near x = {x:.6g} ran into its grid bracket; refine the grid",
            GridTooCoarse,
            stacklevel=3,
        )
    return x


def _point_eval(params, drive):
    def at(x):
        db, dc1, dc2, sing = _amplitudes(params, drive, np.array([x]))
        return complex(dc1[0]), complex(dc2[0]), bool(sing[0])

    return at


def _nan_to_inf(v):
    return v if math.isfinite(v) else math.inf


# -- CPT ----------------------------------------------------------------------

@dataclass(frozen=True)
class CPTPoint:
    x: float
    norm_L: float
    norm_R_by_L: float
    source: str  # "closed_form" (confirmed by a closed-form root) or "numeric"
    strict: bool


def find_cpt_numeric(
    params: SystemParams,
    drive: DriveConfig,
    grid,
    tol_cpt: float = TOL_CPT,
    tol_cpt_r: float = TOL_CPT_R,
) -> List[CPTPoint]:
    """All refined dips of ``|eout_L/eps_L|^2`` for a one-sided probe.

    Dips meeting both tolerances are marked ``strict``; the rest are kept as
    near-CPT points with their achieved norms.
    """
    if drive.eps_R != 0 or drive.eps_L <= 0:
        raise ValueError("CPT search needs eps_R = 0 and eps_L > 0")
    res = sweep(params, drive, grid)
    xs = res.x
    at = _point_eval(params, drive)
    eL = drive.eps_L
    k = params.kappa

    def reflect(x):
        dc1, _, sing = at(x)
        return math.inf if sing else abs(2 * k * dc1 - eL) / eL

    roots = None
    if drive.n == 1:
        roots = cpt_roots_closed_form(drive.G, params.coupling, k, drive.G_N, params.sigma_z).real

    points = []
    for i in _local_minima(res.norm_L):
        j = i
        while j + 1 < len(xs) and res.norm_L[j + 1] == res.norm_L[i]:
            j += 1
        x = _refine(reflect, xs, i, j)
        dc1, dc2, _ = at(x)
        nL = abs(2 * k * dc1 - eL) ** 2 / eL ** 2
        nR = abs(2 * k * dc2) ** 2 / eL ** 2
        strict = nL <= tol_cpt and abs(nR - 1.0) <= tol_cpt_r
        source = "numeric"
        if roots and min(abs(x - r) for r in roots) < 1e-6:
            source = "closed_form"
        points.append(CPTPoint(float(x), float(nL), float(nR), source, bool(strict)))
    return points


# -- CPS ----------------------------------------------------------------------

@dataclass(frozen=True)
class CPSPoint:
    x: float
    norm_L: float
    norm_R_by_R: float
    side: str  # "left_dark" or "right_dark"


def find_cps(params: SystemParams, drive: DriveConfig, grid, tol: float = TOL_CPS) -> List[CPSPoint]:
    """Points where all output leaves through one port, for equal two-sided probes."""
    if drive.eps_L <= 0 or drive.eps_L != drive.eps_R:
        raise ValueError("CPS search needs eps_L = eps_R > 0")
    res = sweep(params, drive, grid)
    xs = res.x
    at = _point_eval(params, drive)
    k = params.kappa
    eL = drive.eps_L
    eR = drive.eps_R * cmath.exp(1j * drive.theta)

    def norms(x):
        dc1, dc2, sing = at(x)
        if sing:
            return math.inf, math.inf
        return (abs(2 * k * dc1 - eL) ** 2 / eL ** 2,
                abs(2 * k * dc2 - eR) ** 2 / drive.eps_R ** 2)

    points = []
    for side, series, pick in (("left_dark", res.norm_L, 0), ("right_dark", res.norm_R_by_R, 1)):
        for i in _local_minima(series):
            x = _refine(lambda t: math.sqrt(norms(t)[pick]), xs, i)
            nL, nR = norms(x)
            dark, bright = (nL, nR) if pick == 0 else (nR, nL)
            if dark <= tol and abs(bright - 2.0) <= tol:
                points.append(CPSPoint(float(x), float(nL), float(nR), side))
    points.sort(key=lambda p: p.x)
    return points


# -- OMIA / OMIT --------------------------------------------------------------

@dataclass(frozen=True)
class Peak:
    x: float
    re_eT: float
    kind: str  # "maximum" or "minimum"
    width: float  # full width at half prominence, NaN if not resolvable


@dataclass(frozen=True)
class OMIAResult:
    peaks: List[Peak]
    classification: str  # "OMIA", "OMIT" or "mixed"
    n_maxima: int
    central_width: float


def classify_omia(params: SystemParams, drive: DriveConfig, grid,
                  center_tol: float = CENTER_TOL) -> OMIAResult:
    """Extrema of Re[eps_T] and whether line centre is an absorption peak or a window."""
    if drive.eps_L <= 0:
        raise ValueError("eps_T needs eps_L > 0")
    res = sweep(params, drive, grid)
    keep = ~res.singular
    xs = res.x[keep]
    re = res.eps_T.real[keep]
    at = _point_eval(params, drive)
    k = params.kappa

    def re_eT(x):
        dc1, _, sing = at(x)
        return math.nan if sing else (2 * k * dc1 / drive.eps_L).real

    peaks = []
    for sign, kind in ((1.0, "maximum"), (-1.0, "minimum")):
        idx, props = find_peaks(sign * re, plateau_size=1, prominence=_ripple_floor(re))
        if len(idx):
            widths = peak_widths(sign * re, idx, rel_height=0.5)[0]
        else:
            widths = []
        for i, left, right, w in zip(idx, props["left_edges"], props["right_edges"], widths):
            x = _refine(lambda t: _nan_to_inf(-sign * re_eT(t)), xs, int(left), int(right))
            width = float(w) * float(np.interp(x, xs[1:], np.diff(xs)))
            peaks.append(Peak(float(x), float(re_eT(x)), kind, width))
    peaks.sort(key=lambda p: p.x)

    classification = "mixed"
    central_width = math.nan
    if peaks:
        central = min(peaks, key=lambda p: abs(p.x))
        if abs(central.x) <= center_tol:
            classification = "OMIA" if central.kind == "maximum" else "OMIT"
            central_width = central.width
    n_max = sum(p.kind == "maximum" for p in peaks)
    return OMIAResult(peaks, classification, n_max, central_width)


# -- combined report ----------------------------------------------------------

@dataclass
class FeatureReport:
    cpt_points: list = field(default_factory=list)
    near_cpt_dips: list = field(default_factory=list)
    cps_points: list = field(default_factory=list)
    omia_peaks: list = field(default_factory=list)
    classification: str = "mixed"
    n_maxima: int = 0
    central_width: float = math.nan
    closed_form_roots: list = field(default_factory=list)
    discarded_complex_roots: list = field(default_factory=list)

    def to_dict(self) -> dict:
        def enc(v):
            if isinstance(v, complex):
                return {"re": v.real, "im": v.imag}
            if isinstance(v, float) and not math.isfinite(v):
                return None
            return v

        out = {
            "cpt_points": [dict(asdict(p), cpt=p.strict) for p in self.cpt_points],
            "near_cpt_dips": [dict(asdict(p), cpt=p.strict) for p in self.near_cpt_dips],
            "cps_points": [asdict(p) for p in self.cps_points],
            "omia_peaks": [{k: enc(v) for k, v in asdict(p).items()} for p in self.omia_peaks],
            "classification": self.classification,
            "n_maxima": self.n_maxima,
            "central_width": enc(self.central_width),
            "closed_form_roots": [enc(complex(z)) for z in self.closed_form_roots],
            "discarded_complex_roots": [enc(complex(z)) for z in self.discarded_complex_roots],
        }
        return out


def analyze(params: SystemParams, drive: DriveConfig, grid, tol_cpt: float = TOL_CPT,
            tol_cpt_r: float = TOL_CPT_R, tol_cps: float = TOL_CPS) -> FeatureReport:
    """Run every feature search that applies to the given drive."""
    report = FeatureReport()
    if drive.eps_L <= 0:
        return report
    if drive.eps_R == 0:
        if drive.n == 1:
            cf = cpt_roots_closed_form(drive.G, params.coupling, params.kappa, drive.G_N,
                                       params.sigma_z)
            report.closed_form_roots = list(cf.roots)
            report.discarded_complex_roots = cf.complex
        for p in find_cpt_numeric(params, drive, grid, tol_cpt, tol_cpt_r):
            (report.cpt_points if p.strict else report.near_cpt_dips).append(p)
    elif drive.eps_R == drive.eps_L:
        report.cps_points = find_cps(params, drive, grid, tol_cps)
    omia = classify_omia(params, drive, grid)
    report.omia_peaks = omia.peaks
    report.classification = omia.classification
    report.n_maxima = omia.n_maxima
    report.central_width = omia.central_width
    return report
