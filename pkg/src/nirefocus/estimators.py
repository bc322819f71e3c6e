"""scikit-learn style wrappers for fringe fitting and coherence evaluation."""
import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .analysis import MIN_FIT_POINTS, fit_fringe
from .geometry import GeometryKind
from .vibration import PhysicalParams, coherence
from . import constants as C


class FringeFitter(RegressorMixin, BaseEstimator):
    """Least-squares fringe model ``A + B sin(harmonic * phi + c)``.

    ``X`` is a single column of phases (rad), ``y`` the intensities.

    Attributes
    ----------
    offset_, amplitude_, phase_ : float
        Fitted A, B (>= 0) and c.
    modulation_depth_ : float
        B / A, the visibility of the fitted sinusoid.
    """

    def __init__(self, harmonic=2):
        self.harmonic = harmonic

    def fit(self, X, y):
        X, y = check_X_y(X, y, ensure_min_samples=MIN_FIT_POINTS)
        if X.shape[1] != 1:
            raise ValueError("FringeFitter expects a single phase column")
        self.n_features_in_ = 1
        self.offset_, self.amplitude_, self.phase_ = fit_fringe(X[:, 0], y, self.harmonic)
        self.modulation_depth_ = self.amplitude_ / self.offset_ if self.offset_ else np.nan
        return self

    def predict(self, X):
        check_is_fitted(self, "offset_")
        X = check_array(X)
        return self.offset_ + self.amplitude_ * np.sin(self.harmonic * X[:, 0] + self.phase_)


class CoherenceEstimator(TransformerMixin, BaseEstimator):
    """Maps a column of noise frequencies (rad/s) to coherence values.

    ``transform`` returns ``[|g|, arg g]`` per row, plus ``[|g'|, arg g']``
    for the five-blade geometry. There is nothing to learn; ``fit`` only
    validates parameters.
    """

    def __init__(self, kind="three", axis="y", wavelength=C.DEFAULT_WAVELENGTH,
                 d_spacing=C.DEFAULT_D_SPACING, L=C.DEFAULT_BLADE_SEPARATION, amplitude=None,
                 method="quadrature", model="lowfreq", tol=1e-9):
        self.kind = kind
        self.axis = axis
        self.wavelength = wavelength
        self.d_spacing = d_spacing
        self.L = L
        self.amplitude = amplitude
        self.method = method
        self.model = model
        self.tol = tol

    def fit(self, X=None, y=None):
        self.kind_ = GeometryKind.parse(self.kind)
        self.params_ = PhysicalParams(self.wavelength, self.d_spacing, self.L)
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "params_")
        X = check_array(X)
        if X.shape[1] != 1:
            raise ValueError("CoherenceEstimator expects a single omega column")
        rows = []
        for omega in X[:, 0]:
            res = coherence(self.kind_, self.axis, float(omega), self.params_, self.amplitude,
                            method=self.method, model=self.model, tol=self.tol)
            rows.append([v for r in res.values() for v in (r.abs, r.arg)])
        return np.array(rows)
