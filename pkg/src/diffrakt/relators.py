"""Relator groups of a Bragg spectrum.

F(S) is the abelian group on symbols e(k), k in S, modulo e(0) = 1 and
e(k) e(-k) = 1. Choosing one representative from each pair {k, -k} with
k != -k gives F(S) = Z^p + (Z/2)^q, the (Z/2) factors coming from the
nonzero k with 2k = 0. The relator group Z is the kernel of the sum map
F(S) -> E = <S>.

Internally Z is carried as the full-rank lattice L in Z^(p+q) that
contains 2 e_i for every torsion coordinate; Z = L / <2 e_i>.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from sympy import Matrix

from .abelian import ElementLike, FiniteAbelianGroup, Subgroup, subgroup_generated
from .density import BraggSpectrum
from .exceptions import NumericalContractError, ResourceCapError, ValidationError
from .lattice import hnf, integer_kernel_mod, lattice_index, smith_invariants

__all__ = [
    "MAX_GENERATORS",
    "MAX_LENGTH",
    "GeneratorBasis",
    "FSVector",
    "RelatorLattice",
    "PhaseGroupStructure",
    "canonical_basis",
    "tuple_to_vector",
    "sum_map",
    "reduced_length",
    "relator_lattice",
    "relators_up_to",
    "generated_equals",
    "n_zero",
    "covering_number",
    "phase_group_structure",
]

MAX_GENERATORS = 12
MAX_LENGTH = 12
# visited-node budget for the relator enumeration
ENUMERATION_BUDGET = 3_000_000


@dataclass(frozen=True)
class FSVector:
    """Exponent coordinates of an element of F(S)."""

    free: tuple
    torsion: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "free", tuple(int(a) for a in self.free))
        object.__setattr__(self, "torsion", tuple(int(b) % 2 for b in self.torsion))

    def __add__(self, other: "FSVector") -> "FSVector":
        return FSVector(
            tuple(a + b for a, b in zip(self.free, other.free)),
            tuple((a + b) % 2 for a, b in zip(self.torsion, other.torsion)),
        )

    def __neg__(self) -> "FSVector":
        return FSVector(tuple(-a for a in self.free), self.torsion)

    def __sub__(self, other: "FSVector") -> "FSVector":
        return self + (-other)

    def scale(self, n: int) -> "FSVector":
        return FSVector(tuple(n * a for a in self.free), tuple((n * b) % 2 for b in self.torsion))

    @property
    def is_identity(self) -> bool:
        return not any(self.free) and not any(self.torsion)

    def as_row(self) -> tuple:
        return self.free + self.torsion

    def __str__(self) -> str:
        parts = [str(a) for a in self.free]
        if self.torsion:
            parts.append("|")
            parts.extend(str(b) for b in self.torsion)
        return "(" + " ".join(parts) + ")"


def reduced_length(v: FSVector) -> int:
    """Length of the shortest tuple representing v: L1 of the free part plus set bits."""
    return sum(abs(a) for a in v.free) + sum(v.torsion)


@dataclass(frozen=True, eq=False)
class GeneratorBasis:
    """Canonical generators of F(S) for a symmetric set S."""

    group: FiniteAbelianGroup
    support: tuple
    free: tuple
    torsion: tuple
    has_zero: bool

    @property
    def p(self) -> int:
        return len(self.free)

    @property
    def q(self) -> int:
        return len(self.torsion)

    @property
    def ncols(self) -> int:
        return self.p + self.q

    @cached_property
    def _lookup(self) -> dict:
        g = self.group
        table = {g.index(g.zero): ("zero", -1, 0)} if self.has_zero else {}
        for i, k in enumerate(self.free):
            table[g.index(k)] = ("free", i, 1)
            table[g.index(g.neg(k))] = ("free", i, -1)
        for i, k in enumerate(self.torsion):
            table[g.index(k)] = ("torsion", i, 1)
        return table

    def role(self, k: ElementLike) -> tuple:
        """(kind, position, sign) of an element of S."""
        try:
            return self._lookup[self.group.index(k)]
        except KeyError:
            raise ValidationError(f"{self.group.element(k)} is not in the Bragg spectrum") from None

    def __contains__(self, k: ElementLike) -> bool:
        return self.group.index(k) in self._lookup

    def identity(self) -> FSVector:
        return FSVector((0,) * self.p, (0,) * self.q)

    def unit(self, k: ElementLike) -> FSVector:
        """The exponent vector of the single symbol e(k)."""
        kind, pos, sign = self.role(k)
        free = [0] * self.p
        tors = [0] * self.q
        if kind == "free":
            free[pos] = sign
        elif kind == "torsion":
            tors[pos] = 1
        return FSVector(tuple(free), tuple(tors))

    def generator_table(self) -> list:
        rows = []
        for i, k in enumerate(self.free):
            rows.append({"kind": "free", "position": i, "element": list(k),
                         "negative": list(self.group.neg(k))})
        for i, k in enumerate(self.torsion):
            rows.append({"kind": "torsion", "position": i, "element": list(k)})
        return rows

    def same_as(self, other: "GeneratorBasis") -> bool:
        return (self.group.moduli == other.group.moduli and self.free == other.free
                and self.torsion == other.torsion and self.has_zero == other.has_zero)

    @cached_property
    def lattice(self) -> "RelatorLattice":
        return relator_lattice(self)

    def to_json(self) -> dict:
        return {
            "moduli": list(self.group.moduli),
            "free": [list(k) for k in self.free],
            "torsion": [list(k) for k in self.torsion],
            "has_zero": self.has_zero,
        }


def canonical_basis(S: BraggSpectrum | Iterable[ElementLike], group: FiniteAbelianGroup | None = None) -> GeneratorBasis:
    """Partition S into zero, free representatives and torsion generators.

    The representative of {k, -k} is the lexicographically smaller one.
    """
    if isinstance(S, BraggSpectrum):
        g = S.group
        elems = [g.coords(i) for i in S.indices]
    else:
        if group is None:
            raise ValidationError("group is required when S is a plain collection")
        g = group
        elems = sorted({g.element(k) for k in S})
    present = set(elems)
    free, torsion, has_zero = [], [], False
    for k in elems:
        nk = g.neg(k)
        if nk not in present:
            raise ValidationError(f"S is not symmetric: {k} in S but {nk} is not")
        if k == g.zero:
            has_zero = True
        elif nk == k:
            torsion.append(k)
        elif k < nk:
            free.append(k)
    return GeneratorBasis(g, tuple(elems), tuple(free), tuple(torsion), has_zero)


def tuple_to_vector(basis: GeneratorBasis, ks: Sequence[ElementLike]) -> FSVector:
    """Exponent vector of the class of the tuple (k_1, ..., k_m)."""
    free = [0] * basis.p
    tors = [0] * basis.q
    for k in ks:
        kind, pos, sign = basis.role(k)
        if kind == "free":
            free[pos] += sign
        elif kind == "torsion":
            tors[pos] ^= 1
    return FSVector(tuple(free), tuple(tors))


def vector_to_tuple(basis: GeneratorBasis, v: FSVector) -> tuple:
    """A shortest tuple representing v."""
    g = basis.group
    out = []
    for k, a in zip(basis.free, v.free):
        out.extend([k if a > 0 else g.neg(k)] * abs(a))
    for k, b in zip(basis.torsion, v.torsion):
        if b:
            out.append(k)
    return tuple(out)


def sum_map(basis: GeneratorBasis, v: FSVector) -> tuple:
    """The sum map phi: F(S) -> E."""
    g = basis.group
    total = np.zeros(g.rank, dtype=np.int64)
    for k, a in zip(basis.free, v.free):
        total += a * np.asarray(k, dtype=np.int64)
    for k, b in zip(basis.torsion, v.torsion):
        total += b * np.asarray(k, dtype=np.int64)
    return g.element(total.tolist())


@dataclass(frozen=True, eq=False)
class RelatorLattice:
    """Z = ker(F(S) -> E) with its canonical normal form."""

    basis: GeneratorBasis
    E: Subgroup
    lattice_hnf: tuple = field(repr=False)

    @cached_property
    def torsion_relations(self) -> tuple:
        p, q = self.basis.p, self.basis.q
        return tuple(tuple(2 if j == p + i else 0 for j in range(p + q)) for i in range(q))

    @cached_property
    def generators(self) -> tuple:
        """Nontrivial FSVectors generating Z (HNF rows reduced into F(S))."""
        p = self.basis.p
        gens = []
        for row in self.lattice_hnf:
            v = FSVector(row[:p], row[p:])
            if not v.is_identity:
                gens.append(v)
        return tuple(gens)

    @property
    def is_trivial(self) -> bool:
        return not self.generators

    @cached_property
    def _enumerated(self) -> dict:
        return {}

    def contains(self, v: FSVector) -> bool:
        return sum_map(self.basis, v) == self.basis.group.zero

    def lift_rows(self, vectors: Iterable[FSVector]) -> list:
        return [v.as_row() for v in vectors] + list(self.torsion_relations)

    def same_subgroup(self, vectors: Iterable[FSVector]) -> bool:
        return hnf(self.lift_rows(vectors), self.basis.ncols) == self.lattice_hnf


def relator_lattice(basis: GeneratorBasis, E: Subgroup | None = None) -> RelatorLattice:
    g = basis.group
    if E is None:
        E = subgroup_generated(g, basis.support)
    columns = list(basis.free) + list(basis.torsion)
    ncols = basis.ncols
    if ncols == 0:
        return RelatorLattice(basis, E, ())
    L = integer_kernel_mod(columns, g.moduli)
    index = lattice_index(L, ncols)
    if index != E.order:
        raise NumericalContractError(f"relator lattice index {index} != |E| = {E.order}")
    return RelatorLattice(basis, E, L)


def _check_bounds(basis: GeneratorBasis, n: int) -> None:
    if n < 0:
        raise ValidationError("n must be >= 0")
    if basis.p + basis.q > MAX_GENERATORS:
        raise ResourceCapError(f"p + q = {basis.p + basis.q} exceeds {MAX_GENERATORS}")
    if n > MAX_LENGTH:
        raise ResourceCapError(f"n = {n} exceeds {MAX_LENGTH}")


def relators_up_to(lattice: RelatorLattice, n: int, exact_length: bool = False) -> list:
    """All v in Z with reduced length <= n, sorted by (length, coordinates).

    With ``exact_length`` only classes represented by some tuple of length
    exactly n are kept: with 0 in S that is every class of reduced length
    <= n, otherwise the parity of n minus the reduced length must be even.
    """
    key = (n, exact_length)
    if key in lattice._enumerated:
        return list(lattice._enumerated[key])
    basis = lattice.basis
    _check_bounds(basis, n)
    g = basis.group
    moduli = np.asarray(g.moduli, dtype=np.int64)
    cols = [np.asarray(k, dtype=np.int64) for k in basis.free + basis.torsion]
    p, q = basis.p, basis.q
    found = []
    visited = 0

    def walk(i, budget, acc, coords):
        nonlocal visited
        visited += 1
        if visited > ENUMERATION_BUDGET:
            raise ResourceCapError("relator enumeration exceeded its budget")
        if i == p + q:
            if not np.any(np.mod(acc, moduli)):
                found.append(FSVector(tuple(coords[:p]), tuple(coords[p:])))
            return
        if i < p:
            choices = range(-budget, budget + 1)
        else:
            choices = (0, 1) if budget >= 1 else (0,)
        for c in choices:
            walk(i + 1, budget - abs(c), acc + c * cols[i], coords + [c])

    walk(0, n, np.zeros(g.rank, dtype=np.int64), [])
    if exact_length and not basis.has_zero:
        found = [v for v in found if (n - reduced_length(v)) % 2 == 0]
    found.sort(key=lambda v: (reduced_length(v), v.free, v.torsion))
    lattice._enumerated[key] = tuple(found)
    return found


def generated_equals(lattice: RelatorLattice, n: int) -> bool:
    """Whether the relators of reduced length <= n generate all of Z."""
    return lattice.same_subgroup(relators_up_to(lattice, n))


def n_zero(lattice: RelatorLattice, n_max: int = MAX_LENGTH) -> int | None:
    """Least n with <Z_n> = Z, or None if it exceeds n_max.

    Trivial Z gives 0.
    """
    if lattice.is_trivial:
        return 0
    _check_bounds(lattice.basis, n_max)
    for n in range(n_max + 1):
        if generated_equals(lattice, n):
            return n
    return None


def covering_number(basis: GeneratorBasis, E: Subgroup | None = None) -> tuple:
    """(r, 2r + 1) with r the least count such that sums of at most r elements of S cover E."""
    g = basis.group
    if E is None:
        E = subgroup_generated(g, basis.support)
    target = set(E.members.tolist())
    S = np.asarray(basis.support, dtype=np.int64).reshape(-1, g.rank)
    reached = {g.index(g.zero)}
    frontier = np.asarray([g.zero], dtype=np.int64).reshape(-1, g.rank)
    r = 0
    while True:
        r += 1
        sums = (frontier[:, None, :] + S[None, :, :]).reshape(-1, g.rank)
        idx = np.unique(g.indices(sums))
        new = [i for i in idx.tolist() if i not in reached]
        reached.update(new)
        if reached >= target:
            return r, 2 * r + 1
        if not new:
            raise ValidationError("S does not generate E")
        frontier = g.elements[np.asarray(sorted(reached), dtype=np.int64)]


@dataclass(frozen=True)
class PhaseGroupStructure:
    """Z^ = U(1)^circles x Z/n_1 x ... ."""

    circles: int
    finite: tuple

    @property
    def is_trivial(self) -> bool:
        return self.circles == 0 and not self.finite

    def __str__(self) -> str:
        parts = []
        if self.circles:
            parts.append("U(1)" if self.circles == 1 else f"U(1)^{self.circles}")
        parts.extend(f"Z/{n}" for n in self.finite)
        return " x ".join(parts) if parts else "trivial"


def phase_group_structure(lattice: RelatorLattice) -> PhaseGroupStructure:
    """Structure of the phase-form group, the dual of Z.

    Z = L / T with T spanned by 2 e_i on torsion coordinates. Writing T in
    the HNF basis of L and taking Smith invariants gives Z = Z^p + sum Z/d_i.
    """
    basis = lattice.basis
    p, q = basis.p, basis.q
    if p + q == 0:
        return PhaseGroupStructure(0, ())
    L = [list(r) for r in lattice.lattice_hnf]
    Lm = Matrix(L)
    finite = ()
    if q:
        T = Matrix([list(r) for r in lattice.torsion_relations])
        coords = T * Lm.inv()
        if any(not c.is_integer for c in coords):
            raise NumericalContractError("torsion relations are not in the relator lattice")
        finite = tuple(d for d in smith_invariants(coords.tolist()) if d > 1)
    return PhaseGroupStructure(p, finite)
