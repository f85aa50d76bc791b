"""scikit-learn style wrappers around the functional API.

Both estimators accept either a catalogued target function (``fit("expx")``)
or sampled data (``fit(X, y)``).  Catalogued targets go through the exact
solvers at any precision; sampled data is fitted in double precision by
truncated-SVD least squares on the same basis.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from .chebyshev import ChebExpansion, cheb_coeffs, cheb_eval
from .continuous import error_norms, evaluate_extension, solve_continuous
from .discrete import solve_discrete
from .linsolve import svd_solve
from .numkit.precision import DOUBLE, as_float
from .validation import check_degree, check_points, check_precision, check_T, check_target, check_values


def _is_data(X, y) -> bool:
    return y is not None or not isinstance(X, str) and not hasattr(X, "name")


class FourierExtension(RegressorMixin, BaseEstimator):
    """Fourier extension on [-1, 1] with period 2T.

    Parameters
    ----------
    n : int
        Highest frequency index.
    T : float or str
        Extension parameter, T > 1 (expression strings such as ``"sqrt(2)"`` allowed).
    scheme : {"continuous", "discrete"}
        Least-squares fit in L2 or collocation at mapped Chebyshev nodes.
        For sampled data this only selects the basis size (sines up to n or n+1).
    precision : str or int
        ``"double"``, ``"extended[:bits]"`` or, for the continuous scheme, ``"auto"``.
    tol : float, optional
        Relative SVD truncation threshold.

    Attributes
    ----------
    extension_ : the underlying extension object (catalogued targets only)
    cos_coef_, sin_coef_ : plain coefficients of cos(k pi x / T) and sin(k pi x / T)

    Examples
    --------
    >>> est = FourierExtension(n=12, T=2).fit("expx")
    >>> bool(abs(est.predict([0.5])[0] - np.exp(0.5)) < 1e-6)
    True
    """

    def __init__(self, n: int = 16, T=2, scheme: str = "continuous", precision="double", tol: Optional[float] = None):
        self.n = n
        self.T = T
        self.scheme = scheme
        self.precision = precision
        self.tol = tol

    def _validate(self):
        check_degree(self.n)
        check_T(self.T)
        if self.scheme not in ("continuous", "discrete"):
            raise ValueError(f"scheme must be 'continuous' or 'discrete', got {self.scheme!r}")
        check_precision(self.precision, allow_auto=self.scheme == "continuous")

    def fit(self, X, y=None, **params):
        """Fit a catalogued function (``X`` a name or TestFunction) or samples ``(X, y)``."""
        self._validate()
        if _is_data(X, y):
            return self._fit_data(X, y)
        f = check_target(X, **params)
        solve = solve_continuous if self.scheme == "continuous" else solve_discrete
        ext = solve(f, self.n, self.T, self.precision, self.tol)
        self.extension_ = ext
        self.target_ = f
        s = np.sqrt(2.0) if ext.cos_scale else 1.0
        cos_c = np.array([complex(v) if f.is_complex else float(v) for v in ext.cos_coeffs])
        sin_c = np.array([complex(v) if f.is_complex else float(v) for v in ext.sin_coeffs])
        self.cos_coef_ = np.concatenate([cos_c[:1], s * cos_c[1:]])
        self.sin_coef_ = s * sin_c
        self.condition_number_ = ext.report.condition_number
        return self

    def _fit_data(self, X, y):
        if y is None:
            raise ValueError("sampled data needs y")
        x = check_points(X)
        v = check_values(y, x.shape[0])
        Tf = as_float(self.T)
        n_sin = self.n + 1 if self.scheme == "discrete" else self.n
        A = self._design(x, Tf, n_sin)
        rep = svd_solve(A, v, tol=self.tol, prec=DOUBLE)
        self.extension_ = None
        self.target_ = None
        self.cos_coef_ = rep.solution[: self.n + 1]
        self.sin_coef_ = rep.solution[self.n + 1:]
        self.condition_number_ = rep.condition_number
        return self

    def _design(self, x, Tf, n_sin):
        th = np.pi * x / Tf
        cols = [np.cos(k * th) for k in range(self.n + 1)] + [np.sin(k * th) for k in range(1, n_sin + 1)]
        return np.column_stack(cols)

    def predict(self, X):
        """Values at points in [-1, 1], in double precision."""
        check_is_fitted(self, "cos_coef_")
        x = check_points(X)
        A = self._design(x, as_float(self.T), len(self.sin_coef_))
        return A @ np.concatenate([self.cos_coef_, self.sin_coef_])

    def predict_exact(self, X):
        """Values at the working precision of a catalogued fit (object array for extended)."""
        check_is_fitted(self, "cos_coef_")
        if self.extension_ is None:
            raise ValueError("predict_exact needs a catalogued target")
        return evaluate_extension(self.extension_, check_points(X))

    def error(self):
        """(L-infinity, L2) error against the catalogued target."""
        check_is_fitted(self, "cos_coef_")
        if self.extension_ is None:
            raise ValueError("error() needs a catalogued target")
        return error_norms(self.extension_, self.target_)

    @property
    def dof_(self) -> int:
        check_is_fitted(self, "cos_coef_")
        return len(self.cos_coef_) + len(self.sin_coef_)


class ChebyshevApproximation(RegressorMixin, BaseEstimator):
    """Truncated Chebyshev series of degree n.

    A catalogued target is expanded by quadrature at ``precision``; sampled
    data is fitted by least squares with :func:`numpy.polynomial.chebyshev.chebfit`.
    """

    def __init__(self, n: int = 16, precision="double"):
        self.n = n
        self.precision = precision

    def fit(self, X, y=None, **params):
        check_degree(self.n)
        check_precision(self.precision)
        if _is_data(X, y):
            if y is None:
                raise ValueError("sampled data needs y")
            x = check_points(X)
            v = check_values(y, x.shape[0])
            c = np.polynomial.chebyshev.chebfit(x, v, self.n)
            c[0] *= 2  # stored with the halved-first-term convention
            self.expansion_ = ChebExpansion(c, DOUBLE, None)
        else:
            self.expansion_ = cheb_coeffs(check_target(X, **params), self.n, self.precision)
        self.coef_ = np.array([complex(v) if np.iscomplexobj(v) or type(v).__name__ == "mpc" else float(v)
                               for v in self.expansion_.coeffs])
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        x = check_points(X)
        c = self.coef_.copy()
        c[0] /= 2
        return np.polynomial.chebyshev.chebval(x, c)

    def predict_exact(self, X):
        check_is_fitted(self, "expansion_")
        return cheb_eval(self.expansion_, check_points(X))

    @property
    def dof_(self) -> int:
        check_is_fitted(self, "coef_")
        return len(self.coef_)
