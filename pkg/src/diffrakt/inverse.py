"""Solving the homometry problem: every density with a given diffraction.

For diffraction omega with Bragg spectrum S, each elementary phase form a
gives the density

    rho_a(x) = sum_{k in S} a(k) omega(k)^(1/2) conj((k, x)),

and two forms give translates of one another exactly when they agree on the
relator group Z. The solution set is therefore parameterized by p angles
and q signs, with the phase-form group as the space of translation classes.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .abelian import ElementLike, FiniteAbelianGroup, character_matrix, subgroup_generated, translate
from .density import (
    DEFAULT_REL_TOL,
    Density,
    PointMeasure,
    bragg_spectrum,
    diffraction,
    phase_coefficients,
)
from .exceptions import NumericalContractError, ValidationError
from .phaseforms import (
    ElementaryPhaseForm,
    elementary_from_values,
    make_elementary,
    random_form,
    twist_by_group_element,
)
from .relators import GeneratorBasis, PhaseGroupStructure, canonical_basis, phase_group_structure

__all__ = [
    "FamilyDescription",
    "PhaseExtraction",
    "RationalDensityReport",
    "CircleReport",
    "density_from_phase",
    "solve_family",
    "extract_phase_from_density",
    "twist_translation_residual",
    "polynomial_phase",
    "gm_support_check",
    "gm_rational_check",
    "circle_family_check",
]


def density_from_phase(omega: PointMeasure, a: ElementaryPhaseForm, rel_tol: float | None = None) -> Density:
    """rho_a on the ambient group; E^perp-periodic when S does not generate the dual."""
    g = omega.group
    S = bragg_spectrum(omega, rel_tol)
    if a.basis.group.moduli != g.moduli or not a.basis.same_as(canonical_basis(S)):
        raise ValidationError("phase form basis does not match the Bragg spectrum")
    idx = np.asarray(S.indices, dtype=np.int64)
    coeffs = np.array([a(k) for k in S], dtype=complex) * np.sqrt(omega.weights[idx])
    chars = character_matrix(g, g.elements[idx], g.elements)
    values = coeffs @ chars.conj()
    scale = max(float(np.max(np.abs(values))), 1e-300)
    if float(np.max(np.abs(values.imag))) > 1e-9 * scale:
        raise NumericalContractError("density from a phase form came out non-real")
    return Density(g, values.real)


@dataclass(frozen=True, eq=False)
class FamilyDescription:
    """All solutions with diffraction omega: p circle parameters, q signs."""

    omega: PointMeasure
    basis: GeneratorBasis
    class_group: PhaseGroupStructure
    periodic: bool  # S generates a proper subgroup of the dual
    rel_tol: float = DEFAULT_REL_TOL

    @property
    def p(self) -> int:
        return self.basis.p

    @property
    def q(self) -> int:
        return self.basis.q

    def form(self, angles: Sequence = (), signs: Sequence = ()) -> ElementaryPhaseForm:
        return make_elementary(self.basis, angles, signs)

    def sample(self, angles: Sequence = (), signs: Sequence = ()) -> Density:
        return density_from_phase(self.omega, self.form(angles, signs), self.rel_tol)

    def random_form(self, rng: np.random.Generator) -> ElementaryPhaseForm:
        return random_form(self.basis, rng)

    def random_sample(self, rng: np.random.Generator) -> Density:
        return density_from_phase(self.omega, self.random_form(rng), self.rel_tol)

    def to_json(self, sample: Density | None = None) -> dict:
        from .io import density_to_json

        out = {
            "p": self.p,
            "q": self.q,
            "class_group": str(self.class_group),
            "free_generators": [list(k) for k in self.basis.free],
            "torsion_generators": [list(k) for k in self.basis.torsion],
            "periodic": self.periodic,
        }
        if sample is None:
            sample = self.sample((0,) * self.p, (1,) * self.q)
        out["sample"] = density_to_json(sample)
        return out


def solve_family(omega: PointMeasure, rel_tol: float | None = None) -> FamilyDescription:
    rel_tol = omega.tol if rel_tol is None else rel_tol
    S = bragg_spectrum(omega, rel_tol)
    if not omega.is_symmetric():
        raise ValidationError("diffraction must be centrally symmetric")
    basis = canonical_basis(S)
    E = subgroup_generated(omega.group, list(S))
    return FamilyDescription(
        omega, basis, phase_group_structure(basis.lattice), E.order < omega.group.order, rel_tol
    )


@dataclass(frozen=True, eq=False)
class PhaseExtraction:
    omega: PointMeasure
    form: ElementaryPhaseForm
    negated: bool


def extract_phase_from_density(rho: Density, rel_tol: float = DEFAULT_REL_TOL) -> PhaseExtraction:
    """Recover (omega, a) from a real density, a(k) = c(k) / omega(k)^(1/2).

    When 0 is in S and the mean is negative the density is negated first so
    that a(0) = 1, and the result says so. The reconstruction is checked
    against the input.
    """
    if not rho.is_real():
        raise ValidationError("density must be real")
    g = rho.group
    c = phase_coefficients(rho)
    omega = diffraction(rho, rel_tol)
    S = bragg_spectrum(omega, rel_tol)
    negated = False
    zero = g.index(g.zero)
    # without 0 in S there is no mean to normalize
    if S.contains_zero and c[zero].real < 0:
        rho = -rho
        c = -c
        negated = True
    basis = canonical_basis(S)
    values = {g.coords(i): c[i] / math.sqrt(omega.weights[i]) for i in S.indices}
    form = elementary_from_values(basis, values, tol=1e-7)
    back = density_from_phase(omega, form, rel_tol)
    resid = float(np.max(np.abs(back.weights - rho.weights)))
    # coefficients below the threshold are dropped; allow for exactly that much
    dropped = np.ones(g.order, dtype=bool)
    dropped[list(S.indices)] = False
    allowance = float(np.sum(np.abs(c[dropped])))
    scale = max(float(np.max(np.abs(rho.weights))), 1e-300)
    if resid > 1e-9 * scale + allowance * (1 + 1e-9):
        raise NumericalContractError(f"reconstruction residual {resid:.3e} exceeds tolerance")
    return PhaseExtraction(omega, form, negated)


def twist_translation_residual(omega: PointMeasure, a: ElementaryPhaseForm, u: ElementLike) -> float:
    """max |rho_{(.,u) a} - T_u rho_a|; twisting the form by u translates the density by u."""
    twisted = density_from_phase(omega, twist_by_group_element(a, u))
    moved = translate(density_from_phase(omega, a).as_function(), u).values
    return float(np.max(np.abs(twisted.weights - moved)))


def polynomial_phase(factors: Sequence[Sequence[float]], modulus: int, k: int = 1) -> float:
    """Angle in turns of a product of polynomials evaluated at exp(2 pi i k / modulus).

    Each factor lists its coefficients from the constant term up. Summing the
    factor angles gives the phase without expanding the product.
    """
    w = cmath.exp(2j * math.pi * k / modulus)
    turn = 0.0
    for coeffs in factors:
        value = sum(c * w**n for n, c in enumerate(coeffs))
        turn += cmath.phase(value) / (2 * math.pi)
    return turn % 1.0


@dataclass(frozen=True)
class RationalDensityReport:
    is_rational: bool | None
    closed: bool
    violations: tuple  # ((k, j), ...)
    moment_bound: int

    def to_json(self) -> dict:
        return {
            "is_rational": self.is_rational,
            "closed": self.closed,
            "violations": [[k, j] for k, j in self.violations],
            "moment_bound": self.moment_bound,
        }


def _cyclic_modulus(g: FiniteAbelianGroup) -> int:
    if g.rank != 1:
        raise ValidationError("the rational support test needs a cyclic group Z/M")
    return g.moduli[0]


def gm_support_check(group: FiniteAbelianGroup, support: Sequence[ElementLike]) -> RationalDensityReport:
    """Whether S is closed under k -> j k for every j prime to the order of k.

    Rational densities force this closure; each failure is reported as (k, j).
    """
    M = _cyclic_modulus(group)
    S = {group.element(k)[0] for k in support}
    violations = []
    for k in sorted(S):
        order = group.element_order((k,))
        for j in range(2, order):
            if math.gcd(j, order) == 1 and (j * k) % M not in S:
                violations.append((k, j))
    return RationalDensityReport(None, not violations, tuple(violations), 6 if M % 2 == 0 else 4)


def _is_rational(values: np.ndarray, max_denominator: int = 10**4) -> bool:
    """Floats within 1e-12 (relative) of a fraction with denominator <= max_denominator."""
    scale = max(1.0, float(np.max(np.abs(values), initial=0.0)))
    for v in values:
        f = Fraction(float(v)).limit_denominator(max_denominator)
        if abs(float(f) - float(v)) > 1e-12 * scale:
            return False
    return True


def gm_rational_check(rho: Density, rel_tol: float = DEFAULT_REL_TOL) -> RationalDensityReport:
    _cyclic_modulus(rho.group)
    if not rho.is_real():
        raise ValidationError("density must be real")
    if not _is_rational(rho.real_weights):
        raise ValidationError("weights are not rational; the closure test does not apply")
    S = bragg_spectrum(diffraction(rho, rel_tol), rel_tol)
    report = gm_support_check(rho.group, list(S))
    return RationalDensityReport(True, report.closed, report.violations, report.moment_bound)


@dataclass(frozen=True, eq=False)
class CircleReport:
    window: tuple
    coefficients: np.ndarray = field(repr=False)
    max_deviation: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tol

    def to_json(self) -> dict:
        return {
            "window": list(self.window),
            "coefficients": [[float(z.real), float(z.imag)] for z in self.coefficients],
            "max_deviation": self.max_deviation,
            "passed": self.passed,
        }


def circle_family_check(values: Mapping[int, complex], window: int | None = None,
                        tol: float = 1e-12) -> CircleReport:
    """Fourier coefficients of delta_0 + sum_{k in K} (a(k) - 1) conj(chi_k) on the circle.

    The point mass contributes 1 to every coefficient and the trigonometric
    part is integrated by an exact uniform rule. Each coefficient on the
    window [-W, W] must have modulus 1.
    """
    vals = {int(k): complex(v) for k, v in values.items()}
    if 0 in vals:
        raise ValidationError("K must not contain 0")
    for k, v in vals.items():
        if -k not in vals:
            raise ValidationError(f"K is not symmetric: {k} without {-k}")
        if abs(vals[-k] - v.conjugate()) > 1e-12:
            raise ValidationError(f"a(-k) != conj(a(k)) at k = {k}")
        if abs(abs(v) - 1.0) > 1e-12:
            raise ValidationError(f"a({k}) is not unimodular")
    reach = max((abs(k) for k in vals), default=0)
    W = reach + 2 if window is None else int(window)
    if W < reach:
        raise ValidationError("window must contain K")
    n = 2 * W + 2  # more nodes than the widest frequency gap: the rule is exact
    x = np.arange(n) / n
    poly = np.zeros(n, dtype=complex)
    for k, v in vals.items():
        poly += (v - 1.0) * np.exp(-2j * np.pi * k * x)
    ks = np.arange(-W, W + 1)
    coeffs = 1.0 + np.exp(2j * np.pi * np.outer(ks, x)) @ poly / n
    dev = float(np.max(np.abs(np.abs(coeffs) - 1.0)))
    return CircleReport((-W, W), coeffs, dev, tol)
