"""Presets, JSON configuration files and CSV / JSON / plot-data output."""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import List, Optional

import numpy as np

from .params import (
    DriveConfig,
    SystemParams,
    coupling_from_dict,
    drive_from_dict,
    params_from_dict,
)

SCHEMA_VERSION = 1

CSV_HEADER = (
    "x_over_k,re_db,im_db,re_dc1,im_dc1,re_dc2,im_dc2,re_eoutL,im_eoutL,"
    "re_eoutR,im_eoutR,re_eT,im_eT,norm_L,norm_RbyL,norm_RbyR,singular"
)


@dataclass(frozen=True)
class Curve:
    label: str
    params: SystemParams
    drive: DriveConfig
    derive_from_steady: bool = False


@dataclass(frozen=True)
class Panel:
    name: str
    quantities: tuple
    curves: tuple  # indices into the figure's curve list
    xmin: float
    xmax: float


@dataclass(frozen=True)
class Figure:
    name: str
    title: str
    curves: tuple
    panels: tuple
    points: int
    stated: tuple = ()
    inferred: tuple = ()

    def curve_indices(self) -> List[int]:
        seen = []
        for p in self.panels:
            for i in p.curves:
                if i not in seen:
                    seen.append(i)
        return seen


def _drive_dict(d: dict) -> dict:
    d = dict(d)
    if "theta_over_pi" in d:
        d["theta"] = float(d.pop("theta_over_pi")) * math.pi
    d.pop("derive_from_steady", None)
    return d


def curve_from_dict(d: dict, label: str = "") -> Curve:
    system = params_from_dict(d.get("system", {}))
    raw_drive = d.get("drive", {})
    derive = bool(raw_drive.get("derive_from_steady", False))
    drive = drive_from_dict(_drive_dict(raw_drive))
    return Curve(d.get("label", label), system, drive, derive)


def _figure_from_dict(name: str, d: dict) -> Figure:
    curves = tuple(curve_from_dict(c) for c in d["curves"])
    panels = tuple(
        Panel(pname, tuple(p["quantities"]), tuple(p["curves"]), float(p["xmin"]), float(p["xmax"]))
        for pname, p in sorted(d["panels"].items())
    )
    return Figure(name, d.get("title", ""), curves, panels, int(d.get("points", 4001)),
                  tuple(d.get("stated", ())), tuple(d.get("inferred", ())))


def _load_registry() -> dict:
    text = resources.files("hybridom").joinpath("presets.json").read_text()
    return json.loads(text)


def preset_names() -> List[str]:
    names = list(_load_registry()["presets"])
    return sorted(names, key=lambda s: int(s[3:]))


def load_preset(name: str) -> Figure:
    """``figN`` gives the whole figure; ``figNa`` / ``figNb`` restrict to one panel."""
    m = re.fullmatch(r"(fig\d+)([a-z]?)", name)
    presets = _load_registry()["presets"]
    if not m or m.group(1) not in presets:
        raise KeyError(f"unknown preset {name!r}; try 'presets list'")
    fig = _figure_from_dict(m.group(1), presets[m.group(1)])
    if m.group(2):
        panels = tuple(p for p in fig.panels if p.name == m.group(2))
        if not panels:
            raise KeyError(f"preset {m.group(1)} has no panel {m.group(2)!r}")
        fig = replace(fig, name=name, panels=panels)
    return fig


def load_config(path) -> Figure:
    """Read a JSON config with top-level ``system``, ``drive`` and ``sweep`` keys."""
    path = Path(path)
    d = json.loads(path.read_text())
    missing = {"system", "drive"} - set(d)
    if missing:
        raise ValueError(f"{path}: missing keys {sorted(missing)}")
    sw = d.get("sweep", {})
    curve = curve_from_dict({"label": path.stem, "system": d["system"], "drive": d["drive"]})
    quantities = tuple(sw.get("quantities", ("norm_L",)))
    panel = Panel("a", quantities, (0,), float(sw.get("xmin", -6.0)), float(sw.get("xmax", 6.0)))
    return Figure(path.stem, d.get("title", ""), (curve,), (panel,), int(sw.get("points", 4001)))


def apply_override(curve: Curve, key: str, value: str) -> Curve:
    """``system.<field>=v``, ``drive.<field>=v`` or ``system.coupling=kind[:strength]``."""
    section, _, name = key.partition(".")
    if section == "system" and name == "coupling":
        kind, _, strength = value.partition(":")
        spec = {"kind": kind}
        if kind == "linear":
            spec["g"] = float(strength)
        elif kind == "nonlinear":
            spec["g_N"] = float(strength or 1.0)
        return replace(curve, params=replace(curve.params, coupling=coupling_from_dict(spec)))
    if section == "system":
        return replace(curve, params=replace(curve.params, **{name: float(value)}))
    if section == "drive":
        if name == "theta_over_pi":
            return replace(curve, drive=replace(curve.drive, theta=float(value) * math.pi))
        return replace(curve, drive=replace(curve.drive, **{name: float(value)}))
    raise KeyError(f"override key must start with 'system.' or 'drive.', got {key!r}")


# -- writers ------------------------------------------------------------------

def fmt(v) -> str:
    """17 significant digits, locale independent; empty for undefined values."""
    if v is None:
        return ""
    v = float(v)
    if math.isnan(v):
        return "nan"
    return repr(v) if v == 0 else format(v, ".17g")


def write_sweep_csv(result, path) -> None:
    path = Path(path)
    n = len(result)
    cols = [result.x]
    for arr in (result.db, result.dc1, result.dc2, result.eout_L, result.eout_R):
        cols += [arr.real, arr.imag]
    optional = [
        None if result.eps_T is None else result.eps_T.real,
        None if result.eps_T is None else result.eps_T.imag,
        result.norm_L,
        result.norm_R_by_L,
        result.norm_R_by_R,
    ]
    lines = [CSV_HEADER]
    for i in range(n):
        row = [fmt(c[i]) for c in cols]
        row += ["" if c is None else fmt(c[i]) for c in optional]
        row.append("true" if result.singular[i] else "false")
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n")


def read_sweep_csv(path) -> dict:
    """Columns of a sweep CSV as arrays (empty cells become NaN)."""
    lines = Path(path).read_text().splitlines()
    header = lines[0].split(",")
    if lines[0] != CSV_HEADER:
        raise ValueError(f"{path}: unexpected header")
    rows = [ln.split(",") for ln in lines[1:]]
    out = {}
    for j, name in enumerate(header):
        if name == "singular":
            out[name] = np.array([r[j] == "true" for r in rows])
        else:
            out[name] = np.array([float(r[j]) if r[j] else math.nan for r in rows])
    return out


def write_json(obj, path) -> None:
    Path(path).write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True, allow_nan=False) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_plot_data(path, x, columns: dict, comment: Optional[str] = None) -> None:
    """Whitespace-separated ``x value...`` table readable by gnuplot, numpy.loadtxt etc."""
    names = list(columns)
    lines = []
    if comment:
        lines.append(f"# {comment}")
    lines.append("# x_over_k " + " ".join(names))
    for i in range(len(x)):
        lines.append(" ".join([fmt(x[i])] + [fmt(columns[n][i]) for n in names]))
    Path(path).write_text("\n".join(lines) + "\n")


@dataclass
class SweepJob:
    preset: Optional[str] = None
    config: Optional[str] = None
    xmin: Optional[float] = None
    xmax: Optional[float] = None
    points: Optional[int] = None
    out_dir: str = "."
    tol_cpt: Optional[float] = None
    tol_cpt_r: Optional[float] = None
    tol_cps: Optional[float] = None
    variant: Optional[str] = None
    overrides: List[str] = field(default_factory=list)
