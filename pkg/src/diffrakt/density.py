"""Weighted Dirac combs on a finite group and their diffraction.

Phase-bearing quantities use the *plus* coefficient

    c(k) = 1/|G| sum_x (k, x) rho(x),

which equals ``dft(rho)(-k)``. For a density built from an elementary phase
form ``a`` this gives c(k) = a(k) omega(k)^(1/2) directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .abelian import (
    ElementLike,
    FiniteAbelianGroup,
    GroupFunction,
    character_matrix,
    convolve,
    dft,
    idft,
    involute,
    make_group,
    translate,
)
from .exceptions import NumericalContractError, ValidationError

__all__ = [
    "DEFAULT_REL_TOL",
    "Density",
    "PointMeasure",
    "BraggSpectrum",
    "phase_coefficient",
    "phase_coefficients",
    "autocorrelation",
    "diffraction",
    "bragg_spectrum",
    "transform_identity_check",
    "homometric",
    "autocorrelation_from_diffraction",
]

DEFAULT_REL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Density:
    """Complex weight per group element."""

    group: FiniteAbelianGroup
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=complex).reshape(-1)
        if w.shape[0] != self.group.order:
            raise ValidationError(f"expected {self.group.order} weights, got {w.shape[0]}")
        if not np.all(np.isfinite(w)):
            raise ValidationError("weights must be finite")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_weights(cls, moduli: Sequence[int] | int, weights) -> "Density":
        if isinstance(moduli, int):
            moduli = (moduli,)
        return cls(make_group(moduli), weights)

    def is_real(self, atol: float = 1e-12) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.weights), initial=0.0)))
        return bool(np.all(np.abs(self.weights.imag) <= atol * scale))

    def is_nonnegative(self, atol: float = 1e-12) -> bool:
        return self.is_real(atol) and bool(np.all(self.weights.real >= -atol))

    @property
    def real_weights(self) -> np.ndarray:
        return self.weights.real.copy()

    def as_function(self) -> GroupFunction:
        return GroupFunction(self.group, self.weights)

    def translate(self, t: ElementLike) -> "Density":
        return Density(self.group, translate(self.as_function(), t).values)

    def __neg__(self) -> "Density":
        return Density(self.group, -self.weights)


@dataclass(frozen=True, eq=False)
class PointMeasure:
    """Nonnegative weights on the dual index set (a diffraction measure)."""

    group: FiniteAbelianGroup
    weights: np.ndarray = field(repr=False)
    tol: float = DEFAULT_REL_TOL

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if w.shape[0] != self.group.order:
            raise ValidationError(f"expected {self.group.order} weights, got {w.shape[0]}")
        if not np.all(np.isfinite(w)):
            raise ValidationError("weights must be finite")
        if np.any(w < 0):
            scale = float(np.max(np.abs(w)))
            if np.any(w < -self.tol * max(scale, 1.0)):
                raise ValidationError("point measure has negative weights")
            w = np.clip(w, 0.0, None)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def __call__(self, k: ElementLike) -> float:
        return float(self.weights[self.group.index(k)])

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def sqrt(self) -> np.ndarray:
        return np.sqrt(self.weights)

    def is_symmetric(self, rel_tol: float = DEFAULT_REL_TOL) -> bool:
        scale = float(np.max(self.weights, initial=0.0))
        reflected = self.weights[self.group.negation_index]
        return bool(np.all(np.abs(self.weights - reflected) <= rel_tol * max(scale, 1e-300)))

    def allclose(self, other: "PointMeasure", rel_tol: float = DEFAULT_REL_TOL) -> bool:
        self.group.check_compatible(other.group)
        scale = max(float(np.max(self.weights, initial=0.0)),
                    float(np.max(other.weights, initial=0.0)))
        if scale == 0.0:
            return True
        return bool(np.all(np.abs(self.weights - other.weights) <= rel_tol * scale))


@dataclass(frozen=True, eq=False)
class BraggSpectrum:
    """The support S of a diffraction measure, above a relative threshold."""

    group: FiniteAbelianGroup
    indices: tuple
    threshold: float

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(sorted(int(i) for i in self.indices)))

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return (self.group.coords(i) for i in self.indices)

    def __contains__(self, k: ElementLike) -> bool:
        return self.group.index(k) in self._index_set

    @cached_property
    def _index_set(self) -> frozenset:
        return frozenset(self.indices)

    def elements(self) -> list:
        return list(self)

    @property
    def contains_zero(self) -> bool:
        return 0 in self._index_set


def phase_coefficients(rho: Density) -> np.ndarray:
    """All plus coefficients c(k), k over the dual, as one array."""
    g = rho.group
    plus = idft(rho.as_function()).values / g.order
    return plus


def phase_coefficient(rho: Density, k: ElementLike) -> complex:
    g = rho.group
    row = character_matrix(g, np.asarray([g.element(k)]), g.elements)[0]
    return complex(row @ rho.weights / g.order)


def autocorrelation(rho: Density) -> GroupFunction:
    """gamma = rho * rho~ as a density on G (w.r.t. normalized Haar)."""
    f = rho.as_function()
    return convolve(f, involute(f))


def diffraction(rho: Density, tol: float = DEFAULT_REL_TOL, check: bool = True) -> PointMeasure:
    """omega(k) = |c(k)|^2.

    With ``check`` the result is compared against the transform of the
    autocorrelation, dft(gamma)(-k), and a mismatch raises.
    """
    g = rho.group
    c = phase_coefficients(rho)
    omega = np.abs(c) ** 2
    if check:
        via_gamma = dft(autocorrelation(rho)).values[g.negation_index]
        scale = max(float(omega.max(initial=0.0)), 1e-300)
        resid = float(np.max(np.abs(via_gamma - omega), initial=0.0))
        if resid > 1e-9 * scale and resid > 1e-12:
            raise NumericalContractError(
                f"Wiener-Khinchin mismatch: residual {resid:.3e} vs scale {scale:.3e}"
            )
    return PointMeasure(g, omega, tol)


def autocorrelation_from_diffraction(omega: PointMeasure) -> GroupFunction:
    """gamma(x) = sum_k omega(k) (k, x), so that dft(gamma) = omega."""
    return idft(GroupFunction(omega.group, omega.weights))


def bragg_spectrum(omega: PointMeasure, rel_tol: float | None = None) -> BraggSpectrum:
    """S = {k : omega(k) > rel_tol * max omega}, required to satisfy S = -S."""
    rel_tol = omega.tol if rel_tol is None else rel_tol
    w = omega.weights
    peak = float(w.max(initial=0.0))
    if peak <= 0.0:
        raise ValidationError("empty diffraction: every weight is zero")
    threshold = rel_tol * peak
    support = np.flatnonzero(w > threshold)
    neg = omega.group.negation_index
    if not np.array_equal(np.sort(neg[support]), support):
        raise ValidationError("Bragg spectrum is not centrally symmetric (S != -S)")
    return BraggSpectrum(omega.group, tuple(support.tolist()), threshold)


def transform_identity_check(rho: Density, f: GroupFunction) -> float:
    """Residual of sum_k |F^(k)|^2 omega(k) = gamma(F * F~), relative to the larger side."""
    rho.group.check_compatible(f.group)
    g = rho.group
    omega = diffraction(rho, check=False).weights
    lhs = float(np.sum(np.abs(dft(f).values) ** 2 * omega))
    gamma = autocorrelation(rho).values
    rhs = complex(np.sum(convolve(f, involute(f)).values * gamma) / g.order)
    scale = max(abs(lhs), abs(rhs), 1e-300)
    return abs(lhs - rhs) / scale


def homometric(rho1: Density, rho2: Density, rel_tol: float = DEFAULT_REL_TOL) -> bool:
    rho1.group.check_compatible(rho2.group)
    return diffraction(rho1).allclose(diffraction(rho2), rel_tol)
