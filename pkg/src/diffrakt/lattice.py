"""Integer lattice normal forms on plain Python ints.

Lattices are generated by the rows of integer matrices. ``hnf`` returns the
canonical row-style Hermite normal form, so two generator sets span the same
lattice exactly when their HNFs are equal.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

from sympy import Matrix
from sympy.matrices.normalforms import invariant_factors

__all__ = ["hnf", "integer_kernel_mod", "lattice_index", "same_lattice", "smith_invariants"]

Row = tuple


def hnf(rows: Iterable[Sequence[int]], ncols: int) -> tuple:
    """Row Hermite normal form of the lattice spanned by ``rows``.

    Output rows are echelon with positive pivots; entries above each pivot
    are reduced into [0, pivot). Zero rows are dropped.
    """
    mat = [list(map(int, r)) for r in rows]
    for r in mat:
        if len(r) != ncols:
            raise ValueError(f"row length {len(r)} != {ncols}")
    mat = [r for r in mat if any(r)]
    out: list[list[int]] = []
    col = 0
    while mat and col < ncols:
        active = [r for r in mat if r[col] != 0]
        rest = [r for r in mat if r[col] == 0]
        if not active:
            col += 1
            continue
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[col]))
            piv = active[0]
            nxt = [piv]
            for r in active[1:]:
                q = r[col] // piv[col]
                r = [a - q * b for a, b in zip(r, piv)]
                if r[col] != 0:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            active = nxt
        piv = active[0]
        if piv[col] < 0:
            piv = [-a for a in piv]
        for prev in out:
            q = prev[col] // piv[col]
            if q:
                prev[:] = [a - q * b for a, b in zip(prev, piv)]
        out.append(piv)
        mat = rest
        col += 1
    return tuple(tuple(r) for r in out)


def _pivot_col(row: Sequence[int]) -> int:
    return next(i for i, a in enumerate(row) if a != 0)


def lattice_index(basis: Sequence[Sequence[int]], ncols: int) -> int | None:
    """|Z^n / L| for an HNF basis, or None when L is not of full rank."""
    if len(basis) != ncols:
        return None
    return math.prod(row[i] for i, row in enumerate(basis))


def same_lattice(a: Iterable[Sequence[int]], b: Iterable[Sequence[int]], ncols: int) -> bool:
    return hnf(a, ncols) == hnf(b, ncols)


def integer_kernel_mod(columns: Sequence[Sequence[int]], moduli: Sequence[int]) -> tuple:
    """HNF basis of {v in Z^n : sum_i v_i * columns[i] = 0 mod moduli}.

    ``columns[i]`` is the image of the i-th unit vector, one residue per
    modulus. Works by echelonizing [image | identity] together with the
    relations [diag(moduli) | 0]; rows whose image block vanishes span the
    kernel.
    """
    n, d = len(columns), len(moduli)
    rows = []
    for i, img in enumerate(columns):
        rows.append(tuple(int(c) for c in img) + tuple(int(i == j) for j in range(n)))
    for j, m in enumerate(moduli):
        rows.append(tuple(int(m) * (jj == j) for jj in range(d)) + (0,) * n)
    echelon = hnf(rows, d + n)
    kernel = [row[d:] for row in echelon if _pivot_col(row) >= d]
    return hnf(kernel, n)


def smith_invariants(rows: Sequence[Sequence[int]]) -> tuple:
    """Nonzero invariant factors of an integer matrix (via sympy)."""
    if not rows or not rows[0]:
        return ()
    facts = invariant_factors(Matrix([list(r) for r in rows]))
    return tuple(abs(int(f)) for f in facts if f != 0)
