"""scikit-learn style wrappers around the decompositions.

``NPartitionTransformer`` turns n-potent matrices into their partitions of
unity; ``NHomDecomposer`` is fitted on an n-homomorphism and transforms
domain elements into the values of its orthogonal homomorphic parts.
Both round-trip through ``inverse_transform``.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .algebra import DEFAULT_TOL, AlgebraElement, as_element
from .nhom import DEFAULT_BUDGET, decompose_full, is_n_homomorphism, is_star_linear, split_involutive
from .npotent import lagrange_polynomial, partition_of_unity, roots_sigma
from .validation import check_map, check_n, check_stack, check_tol


class NPartitionTransformer(TransformerMixin, BaseEstimator):
    """Map n-potents to their n-partitions of unity.

    Parameters
    ----------
    n : int
        Exponent of the n-potents (x**n = x).
    tol : float
        Tolerance for the n-potency precondition and the partition invariants.

    ``transform`` returns an array of shape (m, n, d, d) (or (n, d, d) for a
    single matrix) whose k-th slice is e_k = p_k(x).
    """

    def __init__(self, n=3, tol=DEFAULT_TOL):
        self.n = n
        self.tol = tol

    def fit(self, X=None, y=None):
        n = check_n(self.n)
        check_tol(self.tol)
        self.roots_ = np.array(roots_sigma(n).roots)
        self.coefficients_ = np.array([lagrange_polynomial(n, k).coefficients for k in range(n)])
        return self

    def transform(self, X):
        check_is_fitted(self, "roots_")
        arr, single = check_stack(X)
        out = []
        for x in arr:
            element = X if single and isinstance(X, AlgebraElement) else as_element(x)
            part = partition_of_unity(element, self.n, self.tol)
            out.append(np.stack([e.matrix for e in part.idempotents]))
        out = np.stack(out)
        return out[0] if single else out

    def inverse_transform(self, parts):
        """sum_k w_k e_k."""
        check_is_fitted(self, "roots_")
        parts = np.asarray(parts, dtype=complex)
        return np.tensordot(self.roots_, parts, axes=([0], [-3]))


class NHomDecomposer(BaseEstimator):
    """Decompose an n-homomorphism with unital domain into orthogonal parts.

    After ``fit(phi)``:

    * ``e_`` is phi(1), an n-potent;
    * ``psi_`` is the associated homomorphism e**(n-2) phi;
    * ``parts_`` are the n-1 orthogonal homomorphisms with phi = sum w_k psi_k;
    * ``odd_split_`` is (psi_1, psi_2) with phi = psi_1 - psi_2 when phi is
      involutive and n is odd, else None;
    * ``report_`` is the n-homomorphism verification report.
    """

    def __init__(self, n=3, tol=DEFAULT_TOL, mode="auto", trials=200, budget=DEFAULT_BUDGET, seed=0):
        self.n = n
        self.tol = tol
        self.mode = mode
        self.trials = trials
        self.budget = budget
        self.seed = seed

    def fit(self, phi, y=None):
        phi = check_map(phi)
        n = check_n(self.n)
        tol = check_tol(self.tol)
        kwargs = dict(mode=self.mode, trials=self.trials, budget=self.budget, seed=self.seed)
        self.report_ = is_n_homomorphism(phi, n, tol, **kwargs)
        full = decompose_full(phi, n, tol, check=False) if self.report_.passed else \
            decompose_full(phi, n, tol, **kwargs)
        self.map_ = phi
        self.involutive_ = is_star_linear(phi, tol)
        self.e_ = full.e
        self.psi_ = full.psi
        self.parts_ = full.parts
        self.residuals_ = dict(full.residuals)
        self.odd_split_ = None
        if self.involutive_ and n % 2 == 1:
            self.odd_split_ = split_involutive(phi, n, tol, check=False).odd_split
        self.roots_ = np.array(roots_sigma(n).roots[1:])
        return self

    def transform(self, X):
        """Values psi_k(x), shape (m, n-1, d, d) or (n-1, d, d) for one element."""
        check_is_fitted(self, "parts_")
        arr, single = check_stack(X, self.map_.domain)
        out = np.stack([p.apply_matrix(arr) for p in self.parts_], axis=1)
        return out[0] if single else out

    def inverse_transform(self, parts):
        check_is_fitted(self, "parts_")
        parts = np.asarray(parts, dtype=complex)
        return np.tensordot(self.roots_, parts, axes=([0], [-3]))

    def predict(self, X):
        """phi(x) rebuilt from the parts."""
        return self.inverse_transform(self.transform(X))
