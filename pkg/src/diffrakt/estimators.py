"""scikit-learn style wrappers.

Each row of an input array is one density on a fixed group, listed in
lexicographic element order.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils import check_array
from sklearn.utils.validation import check_is_fitted

from .abelian import make_group
from .density import DEFAULT_REL_TOL, Density, diffraction
from .exceptions import ValidationError
from .inverse import density_from_phase, extract_phase_from_density
from .phaseforms import make_elementary, same_phase_form
from .relators import phase_group_structure

__all__ = ["check_densities", "DiffractionTransformer", "PhaseExtractor"]


def check_densities(X, order: int, allow_complex: bool = False) -> np.ndarray:
    """2-d array with one density per row and ``order`` columns."""
    dtype = complex if allow_complex else float
    X = check_array(X, dtype=None if allow_complex else "numeric", ensure_2d=True)
    X = np.asarray(X, dtype=dtype)
    if X.shape[1] != order:
        raise ValidationError(f"expected {order} columns (the group order), got {X.shape[1]}")
    return X


class DiffractionTransformer(TransformerMixin, BaseEstimator):
    """Map each density row to its diffraction row."""

    def __init__(self, moduli=(1,), tol=DEFAULT_REL_TOL):
        self.moduli = moduli
        self.tol = tol

    def fit(self, X=None, y=None):
        self.group_ = make_group(self.moduli)
        if X is not None:
            check_densities(X, self.group_.order, allow_complex=True)
        self.n_features_in_ = self.group_.order
        return self

    def transform(self, X):
        check_is_fitted(self, "group_")
        X = check_densities(X, self.group_.order, allow_complex=True)
        return np.vstack([diffraction(Density(self.group_, row), self.tol).weights for row in X])


class PhaseExtractor(TransformerMixin, BaseEstimator):
    """Phase parameters of homometric densities.

    ``fit`` takes densities sharing one diffraction and learns it together
    with the generator basis. ``transform`` returns, per row, the p angles
    (turns) followed by the q signs; ``inverse_transform`` rebuilds the
    densities. ``predict`` labels each row with the first training row in
    the same translation class, or -1.
    """

    def __init__(self, moduli=(1,), tol=DEFAULT_REL_TOL):
        self.moduli = moduli
        self.tol = tol

    def fit(self, X, y=None):
        self.group_ = make_group(self.moduli)
        X = check_densities(X, self.group_.order)
        extracted = [extract_phase_from_density(Density(self.group_, row), self.tol) for row in X]
        omega = extracted[0].omega
        for e in extracted[1:]:
            if not e.omega.allclose(omega, self.tol):
                raise ValidationError("training densities are not homometric")
        self.omega_ = omega
        self.basis_ = extracted[0].form.basis
        self.lattice_ = self.basis_.lattice
        self.class_group_ = str(phase_group_structure(self.lattice_))
        self.forms_ = [e.form for e in extracted]
        self.n_features_in_ = self.group_.order
        return self

    def _forms(self, X):
        check_is_fitted(self, "omega_")
        X = check_densities(X, self.group_.order)
        forms = []
        for row in X:
            e = extract_phase_from_density(Density(self.group_, row), self.tol)
            if e.negated or not e.omega.allclose(self.omega_, self.tol):
                raise ValidationError("row is not homometric to the training densities")
            if not e.form.basis.same_as(self.basis_):
                raise ValidationError("row has a different Bragg spectrum")
            forms.append(e.form)
        return forms

    def transform(self, X):
        forms = self._forms(X)
        p, q = self.basis_.p, self.basis_.q
        out = np.zeros((len(forms), p + q))
        for i, a in enumerate(forms):
            out[i, :p] = [float(t) for t in a.free_angles]
            out[i, p:] = a.torsion_signs
        return out

    def inverse_transform(self, P):
        check_is_fitted(self, "omega_")
        p, q = self.basis_.p, self.basis_.q
        P = check_array(P, ensure_2d=True, ensure_min_features=0)
        if P.shape[1] != p + q:
            raise ValidationError(f"expected {p + q} parameter columns, got {P.shape[1]}")
        rows = []
        for params in P:
            signs = [int(round(s)) for s in params[p:]]
            a = make_elementary(self.basis_, list(params[:p]), signs)
            rows.append(density_from_phase(self.omega_, a, self.tol).real_weights)
        return np.vstack(rows)

    def predict(self, X):
        labels = []
        for a in self._forms(X):
            hit = next((i for i, b in enumerate(self.forms_) if same_phase_form(b, a)), -1)
            labels.append(hit)
        return np.asarray(labels, dtype=int)
