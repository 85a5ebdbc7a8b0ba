"""scikit-learn compatible wrapper around the theta <-> eta chart change."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .generator import make_generator


class DualCoordinateTransformer(TransformerMixin, BaseEstimator):
    """Map rows of primal coordinates to dual coordinates and back.

    Parameters
    ----------
    generator : str, default="itakura_saito"
        Built-in generator kind.
    q : array-like of shape (n_features, n_features), optional
        Matrix of the Mahalanobis generator; identity when omitted.

    Attributes
    ----------
    generator_ : BregmanGenerator
    n_features_in_ : int
    """

    def __init__(self, generator="itakura_saito", q=None):
        self.generator = generator
        self.q = q

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        self.n_features_in_ = X.shape[1]
        self.generator_ = make_generator(self.generator, X.shape[1], self.q)
        self.generator_.check_theta(X, "X")
        return self

    def transform(self, X):
        check_is_fitted(self, "generator_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return self.generator_.gradient(X)

    def inverse_transform(self, X):
        check_is_fitted(self, "generator_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return self.generator_.conjugate_gradient(X)

    def metric(self, X):
        """Hessian metric at each row, shape (n_samples, n_features, n_features)."""
        check_is_fitted(self, "generator_")
        return self.generator_.hessian(check_array(X, dtype=np.float64))
