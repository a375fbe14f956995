"""scikit-learn style wrapper around :func:`hybridom.response.sweep`.

``ProbeResponse`` maps a column of probe detunings to selected response
quantities, so it can sit inside a ``Pipeline`` or be cloned and grid-searched
over coupling strengths like any other transformer.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import ValidationError
from .params import DriveConfig, SystemParams, validate
from .response import sweep
from .steady_state import drive_from_steady, solve_steady


class ProbeResponse(TransformerMixin, BaseEstimator):
    """Probe response at the detunings in ``X[:, 0]``.

    Parameters
    ----------
    system : SystemParams, optional
        Physical parameters; defaults to ``SystemParams()``.
    drive : DriveConfig, optional
        Probe and effective coupling configuration.
    quantities : tuple of str
        Output columns, any name accepted by ``SweepResult.column``
        (``norm_L``, ``re_eT``, ``im_db`` ...).
    from_steady : bool
        If true, ``G``, ``n`` and ``G_N`` are taken from the steady state of
        ``system`` during ``fit`` instead of from ``drive``.
    """

    def __init__(self, system=None, drive=None, quantities=("norm_L", "norm_R_by_L"),
                 from_steady=False):
        self.system = system
        self.drive = drive
        self.quantities = quantities
        self.from_steady = from_steady

    def fit(self, X=None, y=None):
        system = SystemParams() if self.system is None else self.system
        drive = DriveConfig() if self.drive is None else self.drive
        if self.from_steady:
            self.steady_state_ = solve_steady(system)
            drive = drive_from_steady(system, self.steady_state_, drive.eps_L,
                                      drive.eps_R, drive.theta)
        report = validate(system, drive)
        if not report.ok:
            raise ValidationError(report)
        self.system_, self.drive_ = system, drive
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "drive_")
        X = check_array(X, ensure_2d=True)
        if X.shape[1] != 1:
            raise ValueError(f"expected a single detuning column, got {X.shape[1]}")
        x = X[:, 0]
        order = np.argsort(x, kind="stable")
        res = sweep(self.system_, self.drive_, x[order], _check_grid=False)
        out = np.column_stack([res.column(q) for q in self.quantities])
        back = np.empty_like(out)
        back[order] = out
        return back

    def get_feature_names_out(self, input_features=None):
        return np.asarray(self.quantities, dtype=object)
