"""Elementary phase forms (characters of F(S)) and phase forms (characters of Z).

An elementary phase form is stored by its angles, in turns, on the free
representatives together with a sign per torsion generator. The rules
a(0) = 1, a(-k) = conj(a(k)) and a(k) = +-1 for 2k = 0 therefore hold by
construction. All comparisons are done on angles modulo 1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Mapping, Sequence

import numpy as np

from .abelian import ElementLike, pairing_turn, unit_root
from .exceptions import ValidationError
from .relators import (
    FSVector,
    GeneratorBasis,
    RelatorLattice,
    phase_group_structure,
    relators_up_to,
    reduced_length,
    tuple_to_vector,
)

__all__ = [
    "PHASE_TOL",
    "ElementaryPhaseForm",
    "PhaseForm",
    "MomentTable",
    "make_elementary",
    "elementary_from_values",
    "trivial_form",
    "evaluate",
    "evaluate_vector",
    "evaluate_tuple",
    "moment_condition",
    "same_phase_form",
    "moments",
    "first_divergent_moment",
    "twist_by_group_element",
    "extends_to_character",
    "phase_group_structure",
]

PHASE_TOL = 1e-10

Turn = Real  # float or Fraction


def _wrap(t):
    """Reduce a turn into [0, 1), keeping Fractions exact."""
    if isinstance(t, Fraction):
        return t - math.floor(t)
    t = float(t) % 1.0
    return 0.0 if t == 1.0 else t


def turn_distance(t) -> float:
    """Distance from t to the nearest integer."""
    r = float(_wrap(t))
    return min(r, 1.0 - r)


def unit(t) -> complex:
    if isinstance(t, Fraction):
        return unit_root(t.numerator, t.denominator)
    return cmath.exp(2j * math.pi * float(_wrap(t)))


@dataclass(frozen=True, eq=False)
class ElementaryPhaseForm:
    basis: GeneratorBasis
    free_angles: tuple
    torsion_signs: tuple

    def __post_init__(self):
        object.__setattr__(self, "free_angles", tuple(_wrap(t) for t in self.free_angles))
        object.__setattr__(self, "torsion_signs", tuple(int(s) for s in self.torsion_signs))

    def turn(self, k: ElementLike):
        kind, pos, sign = self.basis.role(k)
        if kind == "zero":
            return 0
        if kind == "free":
            return _wrap(sign * self.free_angles[pos])
        return Fraction(1, 2) if self.torsion_signs[pos] < 0 else 0

    def vector_turn(self, v: FSVector):
        t = sum((a * th for a, th in zip(v.free, self.free_angles)), 0)
        flips = sum(b for b, s in zip(v.torsion, self.torsion_signs) if s < 0)
        return _wrap(t + Fraction(flips, 2))

    def __call__(self, k: ElementLike) -> complex:
        return unit(self.turn(k))

    def values(self) -> dict:
        """a(k) for every k in S, keyed by element coordinates."""
        return {k: self(k) for k in self.basis.support}

    def ratio(self, other: "ElementaryPhaseForm") -> "ElementaryPhaseForm":
        """other / self."""
        _check_same_basis(self, other)
        return ElementaryPhaseForm(
            self.basis,
            tuple(b - a for a, b in zip(self.free_angles, other.free_angles)),
            tuple(a * b for a, b in zip(self.torsion_signs, other.torsion_signs)),
        )

    def kills(self, v: FSVector, tol: float = PHASE_TOL) -> bool:
        return turn_distance(self.vector_turn(v)) < tol

    def to_json(self) -> dict:
        return {
            "free_angles": [float(t) for t in self.free_angles],
            "torsion_signs": list(self.torsion_signs),
            "basis": self.basis.to_json(),
        }


def _check_same_basis(a: ElementaryPhaseForm, b: ElementaryPhaseForm) -> None:
    if a.basis is not b.basis and not a.basis.same_as(b.basis):
        raise ValidationError("phase forms live on different generator bases")


def make_elementary(basis: GeneratorBasis, free_angles: Sequence = (), torsion_signs: Sequence = ()) -> ElementaryPhaseForm:
    """Elementary phase form from angles (turns) on the free representatives and torsion signs."""
    free_angles = tuple(free_angles)
    torsion_signs = tuple(torsion_signs)
    if len(free_angles) != basis.p:
        raise ValidationError(f"expected {basis.p} free angles, got {len(free_angles)}")
    if len(torsion_signs) != basis.q:
        raise ValidationError(f"expected {basis.q} torsion signs, got {len(torsion_signs)}")
    for t in free_angles:
        if not isinstance(t, (Real, Fraction)) or not math.isfinite(float(t)):
            raise ValidationError(f"angle {t!r} is not a finite real number of turns")
    for s in torsion_signs:
        if s not in (1, -1):
            raise ValidationError(f"torsion sign must be +1 or -1, got {s!r}")
    return ElementaryPhaseForm(basis, free_angles, torsion_signs)


def trivial_form(basis: GeneratorBasis) -> ElementaryPhaseForm:
    return ElementaryPhaseForm(basis, (0,) * basis.p, (1,) * basis.q)


def elementary_from_values(basis: GeneratorBasis, values: Mapping, tol: float = 1e-9) -> ElementaryPhaseForm:
    """Build a form from unit values a(k); checks the first and second moment conditions."""
    g = basis.group
    vals = {g.element(k): complex(v) for k, v in values.items()}
    for k in basis.support:
        if k not in vals:
            raise ValidationError(f"missing value at {k}")
        if abs(abs(vals[k]) - 1.0) > tol:
            raise ValidationError(f"value at {k} is not unimodular")
    if basis.has_zero and abs(vals[g.zero] - 1.0) > tol:
        raise ValidationError("a(0) must equal 1")
    angles = []
    for k in basis.free:
        if abs(vals[g.neg(k)] - vals[k].conjugate()) > tol:
            raise ValidationError(f"a(-k) != conj(a(k)) at k = {k}")
        angles.append(_wrap(cmath.phase(vals[k]) / (2 * math.pi)))
    signs = []
    for k in basis.torsion:
        v = vals[k]
        if abs(v.imag) > tol or abs(abs(v.real) - 1.0) > tol:
            raise ValidationError(f"a({k}) must be +-1 since 2k = 0")
        signs.append(1 if v.real > 0 else -1)
    return ElementaryPhaseForm(basis, tuple(angles), tuple(signs))


def evaluate(a: ElementaryPhaseForm, k: ElementLike) -> complex:
    return a(k)


def evaluate_vector(a: ElementaryPhaseForm, v: FSVector) -> complex:
    return unit(a.vector_turn(v))


def evaluate_tuple(a: ElementaryPhaseForm, ks: Sequence[ElementLike]) -> complex:
    """a(k_1) ... a(k_m) as a plain product (no reduction to exponents)."""
    out = 1 + 0j
    for k in ks:
        out *= a(k)
    return out


@dataclass(frozen=True, eq=False)
class PhaseForm:
    """A character of Z, carried by an elementary representative."""

    representative: ElementaryPhaseForm
    lattice: RelatorLattice

    def __call__(self, v: FSVector) -> complex:
        if not self.lattice.contains(v):
            raise ValidationError(f"{v} is not a relator")
        return evaluate_vector(self.representative, v)

    def basis_values(self) -> list:
        return [(v, evaluate_vector(self.representative, v)) for v in self.lattice.generators]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PhaseForm):
            return NotImplemented
        return same_phase_form(self.representative, other.representative, self.lattice)

    __hash__ = None


@dataclass(frozen=True)
class MomentTable:
    order: int
    entries: tuple  # ((FSVector, turn), ...)

    def values(self) -> dict:
        return {v: unit(t) for v, t in self.entries}

    def agrees_with(self, other: "MomentTable", tol: float = 1e-9) -> bool:
        mine, theirs = dict(self.entries), dict(other.entries)
        if mine.keys() != theirs.keys():
            return False
        return all(turn_distance(mine[v] - theirs[v]) < tol for v in mine)


def _lattice(a: ElementaryPhaseForm, lattice: RelatorLattice | None) -> RelatorLattice:
    return a.basis.lattice if lattice is None else lattice


def moments(a: ElementaryPhaseForm, m: int, lattice: RelatorLattice | None = None,
            exact_length: bool = False) -> MomentTable:
    """Values of a on every relator of reduced length <= m."""
    lat = _lattice(a, lattice)
    rels = relators_up_to(lat, m, exact_length=exact_length)
    return MomentTable(m, tuple((v, a.vector_turn(v)) for v in rels))


def moment_condition(a: ElementaryPhaseForm, m: int, lattice: RelatorLattice | None = None,
                     exact_length: bool = False, tol: float = PHASE_TOL) -> bool:
    """Whether a kills every relator of reduced length <= m.

    ``exact_length`` restricts to relators with a representing tuple of
    length exactly m.
    """
    lat = _lattice(a, lattice)
    return all(a.kills(v, tol) for v in relators_up_to(lat, m, exact_length=exact_length))


def first_divergent_moment(a: ElementaryPhaseForm, b: ElementaryPhaseForm, m_max: int,
                           lattice: RelatorLattice | None = None, tol: float = 1e-9) -> int | None:
    """Least m at which the moment tables of a and b differ; None if they agree through m_max."""
    _check_same_basis(a, b)
    lat = _lattice(a, lattice)
    u = a.ratio(b)
    rels = relators_up_to(lat, m_max)
    bad = [reduced_length(v) for v in rels if not u.kills(v, tol)]
    return min(bad) if bad else None


def same_phase_form(a: ElementaryPhaseForm, b: ElementaryPhaseForm,
                    lattice: RelatorLattice | None = None, tol: float = PHASE_TOL) -> bool:
    """Whether b / a kills the relator group."""
    _check_same_basis(a, b)
    lat = _lattice(a, lattice)
    u = a.ratio(b)
    return all(u.kills(v, tol) for v in lat.generators)


def extends_to_character(a: ElementaryPhaseForm, lattice: RelatorLattice | None = None,
                         tol: float = PHASE_TOL) -> bool:
    lat = _lattice(a, lattice)
    return all(a.kills(v, tol) for v in lat.generators)


def twist_by_group_element(a: ElementaryPhaseForm, u: ElementLike) -> ElementaryPhaseForm:
    """b(k) = (k, u) a(k): the same phase form, translated by u."""
    g = a.basis.group
    u = g.element(u)

    def shift(t, k):
        s = pairing_turn(g, k, u)
        return t + s if isinstance(t, Fraction) or isinstance(t, int) else float(t) + float(s)

    angles = tuple(shift(t, k) for t, k in zip(a.free_angles, a.basis.free))
    signs = tuple(-s if pairing_turn(g, k, u) == Fraction(1, 2) else s
                  for s, k in zip(a.torsion_signs, a.basis.torsion))
    return ElementaryPhaseForm(a.basis, angles, signs)


def random_form(basis: GeneratorBasis, rng: np.random.Generator) -> ElementaryPhaseForm:
    return ElementaryPhaseForm(
        basis,
        tuple(float(t) for t in rng.random(basis.p)),
        tuple(int(s) for s in rng.choice([-1, 1], size=basis.q)),
    )


def tuple_phase(a: ElementaryPhaseForm, ks: Sequence[ElementLike]) -> complex:
    """Phase of a relator tuple through its exponent vector."""
    return evaluate_vector(a, tuple_to_vector(a.basis, ks))
