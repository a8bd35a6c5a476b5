"""scikit-learn style wrappers around the filters and the decay fit."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .analytics import canonical_filter
from .filters import FilterSpec, run_batch
from .optimizer import optimize

__all__ = ["TrackingFilter", "FidelityDecayRegressor"]


class TrackingFilter(TransformerMixin, BaseEstimator):
    """Encoding tracker over batches of parity signals.

    Parameters
    ----------
    filter : str
        'bayes', 'wonham', 'boxcar', 'halfbox' or 'double'.
    mu : float
        Flip rate assumed by the filter (and used to resolve 'auto' parameters).
    dt_box : float or 'auto'
        Box length in units of tau; 'auto' takes the optimizer's value.
    a : float or 'auto'
        Second threshold of the double filter.
    tau, dt : float
        Measurement time and sample spacing.

    Notes
    -----
    ``X`` has shape (n_trials, 2, n_steps); a single (2, n_steps) trial is
    also accepted.  ``transform`` returns per-step encoding indices and
    ``predict`` the final one.
    """

    def __init__(self, filter="bayes", mu=1e-3, dt_box="auto", a="auto", tau=1.0, dt=0.1):
        self.filter = filter
        self.mu = mu
        self.dt_box = dt_box
        self.a = a
        self.tau = tau
        self.dt = dt

    def fit(self, X=None, y=None):
        name = canonical_filter(self.filter)
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        dt_box, a = self.dt_box, self.a
        if name in ("boxcar", "halfbox", "double") and ("auto" in (dt_box, a)):
            opt = optimize(name, self.mu * self.tau)
            dt_box = opt.dt_over_tau if dt_box == "auto" else dt_box
            a = opt.a if a == "auto" else a
        if name != "double":
            a = 0.0
        if name in ("bayes", "wonham"):
            dt_box = None
        self.spec_ = FilterSpec(name, dt_box, float(a))
        self.dt_box_ = dt_box
        self.a_ = float(a)
        return self

    def _signals(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim == 2:
            X = X[None]
        if X.ndim != 3 or X.shape[1] != 2:
            raise ValueError(f"expected signals of shape (n_trials, 2, n_steps), got {X.shape}")
        check_array(X.reshape(X.shape[0], -1))
        return X

    def transform(self, X):
        check_is_fitted(self, "spec_")
        return run_batch(self.spec_, self._signals(X), mu=self.mu, tau=self.tau, dt=self.dt)

    def predict(self, X):
        return self.transform(X)[:, -1]

    def score(self, X, y):
        """Mean per-step fidelity against true encodings ``y`` of shape (n_trials, n_steps)."""
        est = self.transform(X)
        y = np.asarray(y)
        if y.ndim == 1:
            y = y[None]
        return float(np.mean(est == y))


class FidelityDecayRegressor(RegressorMixin, BaseEstimator):
    """Weighted linear fit of F(t) = 1 - drop - gamma (t - anchor).

    Parameters
    ----------
    anchor : float
        Time at which the initial drop is read off.
    """

    def __init__(self, anchor=0.0):
        self.anchor = anchor

    def fit(self, t, F, sample_weight=None):
        t, F = check_X_y(np.asarray(t).reshape(-1, 1), F, y_numeric=True)
        t = t[:, 0]
        if t.size < 3:
            raise ValueError("need at least 3 points")
        w = None if sample_weight is None else np.sqrt(np.asarray(sample_weight, dtype=float))
        slope, icpt = np.polyfit(t, 1.0 - F, 1, w=w)
        self.gamma_ = float(slope)
        self.delta_f_in_ = float(icpt + slope * self.anchor)
        self.n_features_in_ = 1
        return self

    def predict(self, t):
        check_is_fitted(self, "gamma_")
        t = check_array(np.asarray(t, dtype=float).reshape(-1, 1))[:, 0]
        return 1.0 - self.delta_f_in_ - self.gamma_ * (t - self.anchor)
