"""Finite abelian groups Z/m_1 x ... x Z/m_d and their harmonic analysis.

A group and its dual share one index set; which role an element plays is
decided by the caller. Functions on the group are stored as flat complex
arrays in lexicographic (C-order) coordinate order.

Haar measure on G is normalized to total mass one, the dual carries
counting measure::

    dft(f)(k) = 1/|G| * sum_x conj((k, x)) f(x)
    idft(h)(x) = sum_k (k, x) h(k)
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Sequence, Union

import numpy as np

from .exceptions import ResourceCapError, ValidationError

__all__ = [
    "DEFAULT_ORDER_CAP",
    "FiniteAbelianGroup",
    "GroupFunction",
    "Subgroup",
    "CosetSpace",
    "make_group",
    "unit_root",
    "pairing",
    "pairing_turn",
    "dft",
    "idft",
    "convolve",
    "involute",
    "translate",
    "subgroup_generated",
    "annihilator",
    "quotient",
]

DEFAULT_ORDER_CAP = 10**6

ElementLike = Union[int, Sequence[int]]


def order_cap() -> int:
    """Order cap, overridable through the ``DIFFRAKT_CAP`` environment variable."""
    env = os.environ.get("DIFFRAKT_CAP")
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise ValidationError(f"DIFFRAKT_CAP is not an integer: {env!r}") from exc
    return DEFAULT_ORDER_CAP


@lru_cache(maxsize=None)
def _root_table(m: int) -> np.ndarray:
    return np.array([unit_root(n, m) for n in range(m)], dtype=complex)


def unit_root(num: int, den: int) -> complex:
    """exp(2 pi i num/den), evaluated from the reduced fraction num/den mod 1.

    Multiples of a quarter turn come out exact.
    """
    if den <= 0:
        raise ValidationError("denominator must be positive")
    n = num % den
    g = math.gcd(n, den)
    n, d = n // g, den // g
    if d == 1:
        return 1 + 0j
    if d == 2:
        return -1 + 0j
    if d == 4:
        return 1j if n == 1 else -1j
    # symmetric reduction keeps the argument of cos/sin within [-pi, pi]
    if 2 * n > d:
        n -= d
    theta = 2.0 * math.pi * n / d
    return complex(math.cos(theta), math.sin(theta))


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """G = Z/m_1 x ... x Z/m_d with lexicographic element enumeration."""

    moduli: tuple

    def __post_init__(self):
        moduli = tuple(int(m) for m in self.moduli)
        object.__setattr__(self, "moduli", moduli)

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @cached_property
    def order(self) -> int:
        return math.prod(self.moduli)

    @cached_property
    def exponent(self) -> int:
        return math.lcm(*self.moduli) if self.moduli else 1

    @property
    def is_cyclic_presentation(self) -> bool:
        return len(self.moduli) == 1

    @cached_property
    def elements(self) -> np.ndarray:
        """All elements as an (order, rank) integer array, lexicographic."""
        if self.rank == 0:
            return np.zeros((1, 0), dtype=np.int64)
        grids = np.indices(self.moduli, dtype=np.int64)
        return grids.reshape(self.rank, -1).T.copy()

    def element(self, x: ElementLike) -> tuple:
        """Normalize ``x`` to a reduced coordinate tuple."""
        if isinstance(x, (int, np.integer)):
            x = (int(x),)
        coords = tuple(int(c) for c in x)
        if len(coords) != self.rank:
            raise ValidationError(
                f"element {coords} has {len(coords)} coordinates, group has rank {self.rank}"
            )
        return tuple(c % m for c, m in zip(coords, self.moduli))

    def index(self, x: ElementLike) -> int:
        coords = self.element(x)
        if self.rank == 0:
            return 0
        return int(np.ravel_multi_index(coords, self.moduli))

    def coords(self, i: int) -> tuple:
        if self.rank == 0:
            return ()
        return tuple(int(c) for c in np.unravel_index(int(i), self.moduli))

    def indices(self, xs: np.ndarray) -> np.ndarray:
        """Vectorized index lookup for an (n, rank) array of coordinates."""
        xs = np.asarray(xs, dtype=np.int64).reshape(-1, self.rank)
        if self.rank == 0:
            return np.zeros(len(xs), dtype=np.int64)
        red = np.mod(xs, np.asarray(self.moduli, dtype=np.int64))
        return np.ravel_multi_index(red.T, self.moduli).astype(np.int64)

    def add(self, x: ElementLike, y: ElementLike) -> tuple:
        x, y = self.element(x), self.element(y)
        return tuple((a + b) % m for a, b, m in zip(x, y, self.moduli))

    def neg(self, x: ElementLike) -> tuple:
        return tuple((-a) % m for a, m in zip(self.element(x), self.moduli))

    def scale(self, j: int, x: ElementLike) -> tuple:
        return tuple((j * a) % m for a, m in zip(self.element(x), self.moduli))

    @property
    def zero(self) -> tuple:
        return (0,) * self.rank

    def element_order(self, x: ElementLike) -> int:
        x = self.element(x)
        return math.lcm(*(m // math.gcd(a, m) for a, m in zip(x, self.moduli))) if x else 1

    @cached_property
    def negation_index(self) -> np.ndarray:
        """Permutation i -> index(-coords(i))."""
        return self.indices(-self.elements)

    def check_compatible(self, other: "FiniteAbelianGroup") -> None:
        if self.moduli != other.moduli:
            raise ValidationError(f"group mismatch: {self.moduli} vs {other.moduli}")

    def __repr__(self) -> str:
        return "FiniteAbelianGroup(" + " x ".join(f"Z/{m}" for m in self.moduli) + ")"


def make_group(moduli: Iterable[int], cap: int | None = None) -> FiniteAbelianGroup:
    """Build Z/m_1 x ... x Z/m_d, enforcing the order cap."""
    try:
        moduli = tuple(int(m) for m in moduli)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"moduli must be integers: {moduli!r}") from exc
    if any(m < 1 for m in moduli):
        raise ValidationError(f"moduli must be >= 1, got {moduli}")
    cap = order_cap() if cap is None else cap
    order = math.prod(moduli)
    if order > cap:
        raise ResourceCapError(f"group order {order} exceeds cap {cap}")
    return FiniteAbelianGroup(moduli)


def pairing_turn(g: FiniteAbelianGroup, k: ElementLike, x: ElementLike) -> Fraction:
    """The pairing angle sum_j k_j x_j / m_j as a reduced fraction in [0, 1)."""
    k, x = g.element(k), g.element(x)
    L = g.exponent
    num = sum(a * b * (L // m) for a, b, m in zip(k, x, g.moduli)) % L
    return Fraction(num, L)


def pairing(g: FiniteAbelianGroup, k: ElementLike, x: ElementLike) -> complex:
    """(k, x) = exp(2 pi i sum_j k_j x_j / m_j)."""
    t = pairing_turn(g, k, x)
    return unit_root(t.numerator, t.denominator)


def pairing_numerators(g: FiniteAbelianGroup, ks: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Integer matrix n[a, b] with (ks[a], xs[b]) = exp(2 pi i n / exponent)."""
    L = g.exponent
    ks = np.asarray(ks, dtype=np.int64).reshape(-1, g.rank)
    xs = np.asarray(xs, dtype=np.int64).reshape(-1, g.rank)
    weights = np.array([L // m for m in g.moduli], dtype=np.int64)
    return np.mod((ks * weights) @ xs.T, L)


def character_matrix(g: FiniteAbelianGroup, ks: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Complex matrix of pairings (ks[a], xs[b])."""
    return _root_table(g.exponent)[pairing_numerators(g, ks, xs)]


@dataclass(frozen=True, eq=False)
class GroupFunction:
    """A complex-valued function on a finite abelian group."""

    group: FiniteAbelianGroup
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex).reshape(-1)
        if vals.shape[0] != self.group.order:
            raise ValidationError(
                f"expected {self.group.order} values, got {vals.shape[0]}"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __call__(self, x: ElementLike) -> complex:
        return complex(self.values[self.group.index(x)])

    def allclose(self, other: "GroupFunction", atol: float = 1e-12) -> bool:
        self.group.check_compatible(other.group)
        return bool(np.allclose(self.values, other.values, rtol=0.0, atol=atol))

    @classmethod
    def indicator(cls, g: FiniteAbelianGroup, x: ElementLike, scale: complex = 1.0) -> "GroupFunction":
        vals = np.zeros(g.order, dtype=complex)
        vals[g.index(x)] = scale
        return cls(g, vals)

    @classmethod
    def constant(cls, g: FiniteAbelianGroup, c: complex = 1.0) -> "GroupFunction":
        return cls(g, np.full(g.order, c, dtype=complex))


def _axis_transform(g: FiniteAbelianGroup, values: np.ndarray, conjugate: bool) -> np.ndarray:
    # separable: the pairing factors over the cyclic components
    arr = values.reshape(g.moduli) if g.rank else values.copy()
    for axis, m in enumerate(g.moduli):
        n = np.arange(m)
        w = _root_table(m)[np.outer(n, n) % m]
        if conjugate:
            w = w.conj()
        arr = np.moveaxis(np.tensordot(w, arr, axes=([1], [axis])), 0, axis)
    return arr.reshape(-1)


def dft(f: GroupFunction) -> GroupFunction:
    """Fourier transform with mass-one Haar measure on G."""
    g = f.group
    return GroupFunction(g, _axis_transform(g, f.values, conjugate=True) / g.order)


def idft(h: GroupFunction) -> GroupFunction:
    """Inverse of :func:`dft` (counting measure on the dual)."""
    return GroupFunction(h.group, _axis_transform(h.group, h.values, conjugate=False))


def translate(f: GroupFunction, t: ElementLike) -> GroupFunction:
    """(T_t f)(x) = f(x - t)."""
    g = f.group
    src = g.indices(g.elements - np.asarray(g.element(t), dtype=np.int64))
    return GroupFunction(g, f.values[src])


def convolve(f: GroupFunction, h: GroupFunction) -> GroupFunction:
    """(f * h)(t) = 1/|G| sum_s f(t - s) h(s), summed directly."""
    f.group.check_compatible(h.group)
    g = f.group
    els = g.elements
    out = np.zeros(g.order, dtype=complex)
    for s_idx in np.flatnonzero(h.values):
        shifted = g.indices(els - els[s_idx])
        out += f.values[shifted] * h.values[s_idx]
    return GroupFunction(g, out / g.order)


def involute(f: GroupFunction) -> GroupFunction:
    """f~(x) = conj(f(-x))."""
    return GroupFunction(f.group, np.conj(f.values[f.group.negation_index]))


@dataclass(frozen=True, eq=False)
class Subgroup:
    """A subgroup given by generators, with its sorted member indices."""

    group: FiniteAbelianGroup
    generators: tuple
    members: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        return int(self.members.shape[0])

    @cached_property
    def _member_set(self) -> frozenset:
        return frozenset(int(i) for i in self.members)

    def __contains__(self, x: ElementLike) -> bool:
        return self.group.index(x) in self._member_set

    def elements(self) -> list:
        return [self.group.coords(i) for i in self.members]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subgroup):
            return NotImplemented
        return (self.group.moduli == other.group.moduli
                and np.array_equal(self.members, other.members))

    def __hash__(self) -> int:
        return hash((self.group.moduli, self.members.tobytes()))


def _close(g: FiniteAbelianGroup, members: np.ndarray, gen: tuple) -> np.ndarray:
    ordr = g.element_order(gen)
    gen_arr = np.asarray(gen, dtype=np.int64)
    base = g.elements[members]
    shifts = [g.indices(base + i * gen_arr) for i in range(ordr)]
    return np.unique(np.concatenate(shifts))


def subgroup_generated(g: FiniteAbelianGroup, gens: Iterable[ElementLike]) -> Subgroup:
    """Smallest subgroup containing ``gens``."""
    gens = tuple(g.element(x) for x in gens)
    members = np.array([g.index(g.zero)], dtype=np.int64)
    for gen in gens:
        if g.index(gen) not in set(members.tolist()):
            members = _close(g, members, gen)
    return Subgroup(g, gens, members)


def _greedy_generators(g: FiniteAbelianGroup, members: np.ndarray) -> tuple:
    gens = []
    current = np.array([g.index(g.zero)], dtype=np.int64)
    for i in members:
        if int(i) not in set(current.tolist()):
            gen = g.coords(i)
            gens.append(gen)
            current = _close(g, current, gen)
    return tuple(gens)


def annihilator(sub: Subgroup) -> Subgroup:
    """E^perp = {x in G : (k, x) = 1 for all k in E} for a dual subgroup E."""
    g = sub.group
    if sub.generators:
        nums = pairing_numerators(g, np.asarray(sub.generators, dtype=np.int64), g.elements)
        mask = np.all(nums == 0, axis=0)
    else:
        mask = np.ones(g.order, dtype=bool)
    members = np.flatnonzero(mask).astype(np.int64)
    return Subgroup(g, _greedy_generators(g, members), members)


@dataclass(frozen=True, eq=False)
class CosetSpace:
    """G / H with deterministic coset numbering.

    Cosets are numbered in order of their lexicographically smallest member,
    which also serves as the representative.
    """

    group: FiniteAbelianGroup
    subgroup: Subgroup
    representatives: np.ndarray = field(repr=False)
    labels: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return int(self.representatives.shape[0])

    def representative(self, c: int) -> tuple:
        return self.group.coords(self.representatives[c])

    def coset_of(self, x: ElementLike) -> int:
        return int(self.labels[self.group.index(x)])

    def rep_coords(self) -> np.ndarray:
        return self.group.elements[self.representatives]

    def shift_permutation(self, t: ElementLike) -> np.ndarray:
        """Permutation c -> coset(rep(c) + t)."""
        g = self.group
        targets = g.indices(self.rep_coords() + np.asarray(g.element(t), dtype=np.int64))
        return self.labels[targets]


def quotient(g: FiniteAbelianGroup, sub: Subgroup) -> CosetSpace:
    g.check_compatible(sub.group)
    labels = np.full(g.order, -1, dtype=np.int64)
    sub_coords = g.elements[sub.members]
    reps = []
    for i in range(g.order):
        if labels[i] >= 0:
            continue
        labels[g.indices(sub_coords + g.elements[i])] = len(reps)
        reps.append(i)
    return CosetSpace(g, sub, np.asarray(reps, dtype=np.int64), labels)
