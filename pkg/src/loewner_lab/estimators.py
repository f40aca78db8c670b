"""scikit-learn adapters.

The library is function-first; these wrappers let the entrywise powers and
the critical-exponent experiment sit inside sklearn pipelines and grid
searches. Inputs are stacks of symmetric matrices with shape
``(n_samples, n, n)``; a single matrix is treated as a stack of one.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .classifier import Cone, critical_exponent, power_set
from .exceptions import InputError
from .linalg import DEFAULT_TOL, check_symmetric, numeric_rank
from .powers import PowerMap, apply_power
from .verifier import empirical_critical_exponent


def _as_stack(X) -> np.ndarray:
    X = check_symmetric(X)
    return X[None] if X.ndim == 2 else X.reshape((-1,) + X.shape[-2:])


class EntrywisePowerTransformer(TransformerMixin, BaseEstimator):
    """Apply ``x -> f(x)`` to every entry of every matrix in a stack.

    Stateless apart from recording the matrix size seen in :meth:`fit`.
    """

    def __init__(self, family: str = "even", alpha: float = 1.0, blend_lambda: float = 0.5):
        self.family = family
        self.alpha = alpha
        self.blend_lambda = blend_lambda

    def _map(self) -> PowerMap:
        return PowerMap(self.family, self.alpha, self.blend_lambda)

    def fit(self, X, y=None):
        self.power_map_ = self._map()
        self.n_ = _as_stack(X).shape[-1]
        return self

    def transform(self, X):
        check_is_fitted(self, "power_map_")
        S = _as_stack(X)
        if S.shape[-1] != self.n_:
            raise InputError(f"fitted on {self.n_}x{self.n_} matrices, got {S.shape[-1]}x{S.shape[-1]}")
        return apply_power(self.power_map_, S)


class CriticalExponentEstimator(BaseEstimator):
    """Bracket the threshold beyond which every power has a Loewner property.

    :meth:`fit` reads the cone from the data (``n`` from the shape, ``k`` as
    the largest numeric rank in the stack, the domain from the sign of the
    entries), runs the bisection experiment and stores the bracket next to
    the closed-form value.
    """

    def __init__(
        self,
        prop: str = "positivity",
        family: str = "plain",
        resolution: float = 0.25,
        budget: int = 200,
        seed: int = 0,
        tol: float = DEFAULT_TOL,
    ):
        self.prop = prop
        self.family = family
        self.resolution = resolution
        self.budget = budget
        self.seed = seed
        self.tol = tol

    def fit(self, X, y=None):
        S = _as_stack(X)
        n = S.shape[-1]
        k = max(numeric_rank(A) for A in S)
        k = max(k, 1)
        domain = "nonneg" if np.all(S >= 0) else "real"
        if self.family == "plain" and domain != "nonneg":
            raise InputError("the plain power needs matrices with nonnegative entries")
        self.cone_ = Cone(n, k, "nonneg" if self.family == "plain" else "real")
        self.bracket_ = empirical_critical_exponent(
            self.prop, self.family, self.cone_, self.resolution, self.budget, self.seed, self.tol
        )
        self.critical_exponent_ = critical_exponent(self.prop, self.family, self.cone_)
        self.power_set_ = power_set(self.prop, self.family, self.cone_)
        return self

    def predict(self, alphas):
        """Classifier membership of each exponent as ``"in"``, ``"out"`` or ``"unknown"``."""
        check_is_fitted(self, "power_set_")
        return np.array([self.power_set_.contains(float(a)).value for a in np.ravel(alphas)])

    def score(self, X=None, y=None) -> float:
        """1.0 when the closed-form exponent lies inside the fitted bracket, else 0.0."""
        check_is_fitted(self, "bracket_")
        lo, hi = self.bracket_
        return float(lo <= self.critical_exponent_ <= hi + 1e-12)
