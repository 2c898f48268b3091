"""The torus model of a pure point process on a finite group.

Given a symmetric diffraction omega with Bragg spectrum S and an elementary
phase form a, the state space is X = G / E^perp with E = <S> and uniform
probability. Eigenfunctions are f_k = a(k) omega(k)^(1/2) chi_k, where
chi_k(xi) = (k, xi) is well defined on cosets because k kills E^perp.

Test functions enter through the Fourier transform ``dft`` of
:mod:`diffrakt.abelian`:

    N(F) = sum_{k in S} dft(F)(k) f_k,

which gives N(F)(t) = 1/|G| sum_x rho_a(x - t) F(x) and N(T_t F) = T_t N(F).
Vectors over X are indexed by coset number.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .abelian import (
    CosetSpace,
    ElementLike,
    FiniteAbelianGroup,
    GroupFunction,
    Subgroup,
    annihilator,
    character_matrix,
    convolve,
    dft,
    involute,
    quotient,
    subgroup_generated,
    translate,
)
from .density import (
    BraggSpectrum,
    PointMeasure,
    autocorrelation_from_diffraction,
    bragg_spectrum,
)
from .exceptions import NumericalContractError, ResourceCapError, ValidationError
from .phaseforms import (
    ElementaryPhaseForm,
    PhaseForm,
    elementary_from_values,
    evaluate_vector,
    same_phase_form,
)
from .relators import canonical_basis, covering_number

__all__ = [
    "MAX_MOMENT_ORDER",
    "ProcessModel",
    "SpectralMeasure",
    "ExtractedPhase",
    "build_process",
    "apply_N",
    "theta",
    "inner",
    "shift",
    "spectral_measure",
    "second_moment_check",
    "two_point_correlation",
    "extract_phase_data",
    "find_translation",
    "process_moment",
    "moment_formula",
    "moment_formula_check",
    "moment_scale",
    "pure_point_complete",
    "verify",
]

MAX_MOMENT_ORDER = 8
CHECK_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ProcessModel:
    omega: PointMeasure
    spectrum: BraggSpectrum
    form: ElementaryPhaseForm
    E: Subgroup
    E_perp: Subgroup
    X: CosetSpace
    chars: np.ndarray = field(repr=False)  # (|S|, |X|) values chi_k(xi)
    f_table: np.ndarray = field(repr=False)  # (|S|, |X|) values f_k(xi)

    @property
    def group(self) -> FiniteAbelianGroup:
        return self.omega.group

    @property
    def basis(self):
        return self.form.basis

    @property
    def size(self) -> int:
        return self.X.size

    @cached_property
    def support_indices(self) -> np.ndarray:
        return np.asarray(self.spectrum.indices, dtype=np.int64)

    @cached_property
    def row_of(self) -> dict:
        return {int(i): r for r, i in enumerate(self.spectrum.indices)}

    def f(self, k: ElementLike) -> np.ndarray:
        return self.f_table[self.row_of[self.group.index(k)]]

    @cached_property
    def amplitudes(self) -> np.ndarray:
        """a(k) omega(k)^(1/2) in row order."""
        a = np.array([self.form(k) for k in self.spectrum], dtype=complex)
        return a * np.sqrt(self.omega.weights[self.support_indices])

    def to_json(self) -> dict:
        return {
            "moduli": list(self.group.moduli),
            "states": [list(self.X.representative(c)) for c in range(self.size)],
            "f": {
                ",".join(map(str, k)): [[float(z.real), float(z.imag)] for z in row]
                for k, row in zip(self.spectrum, self.f_table)
            },
        }


@dataclass(frozen=True, eq=False)
class SpectralMeasure:
    group: FiniteAbelianGroup
    masses: np.ndarray = field(repr=False)

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    def __call__(self, k: ElementLike) -> float:
        return float(self.masses[self.group.index(k)])


def inner(u: np.ndarray, v: np.ndarray) -> complex:
    """<u, v> = 1/|X| sum u conj(v)."""
    return complex(np.mean(u * np.conj(v)))


def build_process(omega: PointMeasure, a: ElementaryPhaseForm, rel_tol: float | None = None,
                  check: bool = True) -> ProcessModel:
    """The canonical ergodic model with diffraction omega and phase form a."""
    g = omega.group
    S = bragg_spectrum(omega, rel_tol)
    if not omega.is_symmetric():
        raise ValidationError("diffraction must be centrally symmetric")
    if a.basis.group.moduli != g.moduli or not a.basis.same_as(canonical_basis(S)):
        raise ValidationError("phase form basis does not match the Bragg spectrum")
    E = subgroup_generated(g, list(S))
    E_perp = annihilator(E)
    X = quotient(g, E_perp)
    s_coords = g.elements[np.asarray(S.indices, dtype=np.int64)]
    chars = character_matrix(g, s_coords, X.rep_coords())
    amp = np.array([a(k) for k in S], dtype=complex) * np.sqrt(omega.weights[list(S.indices)])
    model = ProcessModel(omega, S, a, E, E_perp, X, chars, amp[:, None] * chars)
    if check:
        _check_invariants(model)
    return model


def _check_invariants(model: ProcessModel) -> None:
    f = model.f_table
    w = model.omega.weights[model.support_indices]
    scale = max(float(w.max()), 1e-300)
    gram = f @ f.conj().T / model.size
    resid = float(np.max(np.abs(gram - np.diag(w))))
    if resid > CHECK_TOL * scale:
        raise NumericalContractError(f"eigenfunctions not orthogonal: residual {resid:.3e}")
    g = model.group
    neg_rows = [model.row_of[int(i)] for i in g.negation_index[model.support_indices]]
    resid = float(np.max(np.abs(f[neg_rows] - np.conj(f))))
    if resid > CHECK_TOL * math.sqrt(scale):
        raise NumericalContractError(f"f_(-k) != conj(f_k): residual {resid:.3e}")


def apply_N(model: ProcessModel, F: GroupFunction) -> np.ndarray:
    model.group.check_compatible(F.group)
    coeffs = dft(F).values[model.support_indices]
    return coeffs @ model.f_table


def theta(model: ProcessModel, H) -> np.ndarray:
    """The diffraction-to-dynamics map: H on the dual -> sum_k H(k) f_k."""
    h = H.values if isinstance(H, GroupFunction) else np.asarray(H, dtype=complex)
    if h.shape != (model.group.order,):
        raise ValidationError(f"H must have {model.group.order} values")
    return h[model.support_indices] @ model.f_table


def shift(model: ProcessModel, v: np.ndarray, t: ElementLike) -> np.ndarray:
    """(T_t v)(xi) = v(xi - t) on X."""
    perm = model.X.shift_permutation(model.group.neg(t))
    return np.asarray(v)[perm]


def spectral_measure(model: ProcessModel, f: np.ndarray) -> SpectralMeasure:
    """Mass |c_k|^2 at each k in E, where f = sum_k c_k chi_k on X."""
    g = model.group
    e_coords = g.elements[model.E.members]
    chars = character_matrix(g, e_coords, model.X.rep_coords())
    coeffs = chars.conj() @ np.asarray(f, dtype=complex) / model.size
    masses = np.zeros(g.order)
    masses[model.E.members] = np.abs(coeffs) ** 2
    return SpectralMeasure(g, masses)


def _gamma_pair(model: ProcessModel, H: GroupFunction) -> complex:
    """gamma(H) = 1/|G| sum_x gamma(x) H(x) with gamma = idft(omega) on S."""
    g = model.group
    w = np.zeros(g.order)
    w[model.support_indices] = model.omega.weights[model.support_indices]
    gamma = autocorrelation_from_diffraction(PointMeasure(g, w)).values
    return complex(np.sum(gamma * H.values) / g.order)


def second_moment_check(model: ProcessModel, F: GroupFunction, G: GroupFunction) -> float:
    """Relative residual of <N(F), N(G)> = gamma(F * G~)."""
    lhs = inner(apply_N(model, F), apply_N(model, G))
    rhs = _gamma_pair(model, convolve(F, involute(G)))
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)


def two_point_correlation(model: ProcessModel, xi: int, F: GroupFunction) -> complex:
    """Finite form of the two-point correlation at state ``xi`` (a coset number).

    The neighbourhood B shrinks to {0} (mass 1/|G|) and the ergodic average
    over G is an exact sum over translates of xi.
    """
    g = model.group
    nb = apply_N(model, GroupFunction.indicator(g, g.zero))
    nf = apply_N(model, F)
    product = nb * nf
    rep = np.asarray(model.X.representative(xi), dtype=np.int64)
    # T_{-x} xi = xi - x on cosets
    states = model.X.labels[g.indices(rep[None, :] - g.elements)]
    return complex(g.order * np.sum(product[states]) / g.order)


@dataclass(frozen=True, eq=False)
class ExtractedPhase:
    omega: PointMeasure
    phase_form: PhaseForm
    relator_values: tuple  # ((FSVector, complex), ...) on the Z generators

    @property
    def representative(self) -> ElementaryPhaseForm:
        return self.phase_form.representative


def extract_phase_data(model: ProcessModel, tol: float = CHECK_TOL) -> ExtractedPhase:
    """Read the phase form back off the eigenfunctions.

    For each generator of Z the product of the matching f_k must be constant
    over X; its phase is the value of the phase form there.
    """
    basis = model.basis
    g = model.group
    lattice = basis.lattice
    values = []
    for v in lattice.generators:
        prod = np.ones(model.size, dtype=complex)
        norm = 1.0
        for k, e in zip(basis.free, v.free):
            fk = model.f(k) if e > 0 else np.conj(model.f(k))
            prod = prod * fk ** abs(e)
            norm *= model.omega(k) ** (abs(e) / 2)
        for k, b in zip(basis.torsion, v.torsion):
            if b:
                prod = prod * model.f(k)
                norm *= model.omega(k) ** 0.5
        dev = float(np.max(np.abs(prod - prod[0])))
        if dev > tol * max(norm, 1e-300):
            raise NumericalContractError(
                f"relator product for {v} is not constant over X (deviation {dev:.3e})"
            )
        values.append((v, complex(prod[0] / norm)))
    base = model.X.labels[g.index(g.zero)]
    reps = {k: complex(model.f(k)[base] / math.sqrt(model.omega(k))) for k in model.spectrum}
    rep_form = elementary_from_values(basis, reps, tol=1e-7)
    for v, z in values:
        if abs(evaluate_vector(rep_form, v) - z) > 1e-7:
            raise NumericalContractError("extracted representative disagrees with relator products")
    return ExtractedPhase(model.omega, PhaseForm(rep_form, lattice), tuple(values))


def find_translation(model_a: ProcessModel, model_b: ProcessModel, tol: float = 1e-9):
    """The unique coset u with b(k) = (k, u) a(k) on S, or None.

    None means the two models carry different phase forms.
    """
    if not model_a.omega.allclose(model_b.omega):
        raise ValidationError("models have different diffraction")
    if not same_phase_form(model_a.form, model_b.form):
        return None
    ratio = model_b.amplitudes / model_a.amplitudes
    hits = np.flatnonzero(np.all(np.abs(model_a.chars - ratio[:, None]) < 1e-7, axis=0))
    if len(hits) != 1:
        raise NumericalContractError(f"expected exactly one translation, found {len(hits)}")
    return model_a.X.representative(int(hits[0]))


def _check_order(m: int) -> None:
    if m < 1:
        raise ValidationError("moment order must be >= 1")
    if m > MAX_MOMENT_ORDER:
        raise ResourceCapError(f"moment order {m} exceeds {MAX_MOMENT_ORDER}")


def process_moment(model: ProcessModel, Fs: Sequence[GroupFunction]) -> complex:
    """Integral of N(F_1) ... N(F_m) over X, summed directly."""
    _check_order(len(Fs))
    prod = np.ones(model.size, dtype=complex)
    for F in Fs:
        prod = prod * apply_N(model, F)
    return complex(np.mean(prod))


def moment_formula(model: ProcessModel, Fs: Sequence[GroupFunction], method: str = "dp") -> complex:
    """Sum over relator tuples of F^_1(k_1)...F^_m(k_m) a(k_1)...a(k_m) prod omega^(1/2).

    ``method="enumerate"`` walks every tuple in S^m; ``"dp"`` groups the
    same sum by partial sums in the dual group.
    """
    _check_order(len(Fs))
    g = model.group
    idx = model.support_indices
    weights = [dft(F).values[idx] * model.amplitudes for F in Fs]
    if method == "enumerate":
        coords = g.elements[idx]
        total = 0j
        for combo in itertools.product(range(len(idx)), repeat=len(Fs)):
            s = coords[list(combo)].sum(axis=0)
            if not np.any(np.mod(s, g.moduli)):
                term = 1 + 0j
                for w, c in zip(weights, combo):
                    term *= w[c]
                total += term
        return total
    if method != "dp":
        raise ValidationError(f"unknown method {method!r}")
    state = np.zeros(g.order, dtype=complex)
    state[g.index(g.zero)] = 1.0
    shifts = [g.indices(g.elements + g.elements[i]) for i in idx]
    for w in weights:
        nxt = np.zeros(g.order, dtype=complex)
        for col, target in enumerate(shifts):
            nxt[target] += state * w[col]
        state = nxt
    return complex(state[g.index(g.zero)])


def moment_scale(model: ProcessModel, Fs: Sequence[GroupFunction]) -> float:
    """prod_i sum_k |F^_i(k)| omega(k)^(1/2), a bound on |moment|; residuals are taken relative to it."""
    out = 1.0
    for F in Fs:
        out *= float(np.sum(np.abs(dft(F).values[model.support_indices] * model.amplitudes)))
    return max(out, 1e-300)


def moment_formula_check(model: ProcessModel, m: int, rng: np.random.Generator | None = None,
                         trials: int = 3) -> float:
    """Largest relative residual between direct moments and the relator formula."""
    rng = np.random.default_rng(0) if rng is None else rng
    worst = 0.0
    for _ in range(trials):
        Fs = [GroupFunction(model.group, rng.standard_normal(model.group.order)) for _ in range(m)]
        lhs = process_moment(model, Fs)
        rhs = moment_formula(model, Fs)
        worst = max(worst, abs(lhs - rhs) / moment_scale(model, Fs))
    return worst


def pure_point_complete(model: ProcessModel) -> bool:
    """Whether products of eigenfunctions span L^2(X).

    Products with up to r factors (r the covering number) are normalized
    and stacked; full rank |X| is required.
    """
    r, _ = covering_number(model.basis, model.E)
    units = model.f_table / np.abs(model.f_table)
    layer = [np.ones(model.size, dtype=complex)]
    rows = list(layer)
    for _ in range(r):
        layer = [p * u for p in layer for u in units]
        # keep one product per distinct vector to bound the growth
        uniq = {}
        for p in layer:
            key = tuple(np.round(p, 8).view(float))
            uniq.setdefault(key, p)
        layer = list(uniq.values())
        rows.extend(layer)
    rank = np.linalg.matrix_rank(np.asarray(rows), tol=1e-8)
    return int(rank) == model.size


def verify(model: ProcessModel, rng: np.random.Generator | None = None, moment_order: int = 4) -> list:
    """Run the model's identities; returns [{name, passed, residual}, ...]."""
    rng = np.random.default_rng(0) if rng is None else rng
    g = model.group
    n = g.order
    report = []

    def record(name, residual, tol=1e-8):
        report.append({"name": name, "passed": bool(residual < tol), "residual": float(residual)})

    w = model.omega.weights[model.support_indices]
    gram = model.f_table @ model.f_table.conj().T / model.size
    record("orthogonality", float(np.max(np.abs(gram - np.diag(w)))) / w.max())

    mods = np.abs(model.f_table)
    record("constant_modulus", float(np.max(mods.max(axis=1) - mods.min(axis=1))) / math.sqrt(w.max()))

    if model.spectrum.contains_zero:
        f0 = model.f(g.zero)
        record("zero_eigenfunction", float(np.max(np.abs(f0 - math.sqrt(model.omega(g.zero))))) /
               math.sqrt(w.max()))

    H = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    th = theta(model, H)
    lhs = inner(th, th).real
    rhs = float(np.sum(np.abs(H) ** 2 * model.omega.weights * _support_mask(model)))
    record("theta_isometry", abs(lhs - rhs) / max(rhs, 1e-300))

    sm = spectral_measure(model, th).masses
    expect = np.abs(H) ** 2 * model.omega.weights * _support_mask(model)
    record("spectral_measure", float(np.max(np.abs(sm - expect))) / max(expect.max(), 1e-300))

    F = GroupFunction(g, rng.standard_normal(n))
    G = GroupFunction(g, rng.standard_normal(n))
    nf = apply_N(model, F)
    record("real_process", float(np.max(np.abs(nf.imag))) / max(float(np.max(np.abs(nf))), 1e-300),
           tol=1e-12)
    record("second_moment", second_moment_check(model, F, G))

    t = g.coords(int(rng.integers(n)))
    resid = np.max(np.abs(apply_N(model, translate(F, t)) - shift(model, nf, t)))
    record("equivariance", float(resid) / max(float(np.max(np.abs(nf))), 1e-300))

    xi = int(rng.integers(model.size))
    tpc = two_point_correlation(model, xi, F)
    gam = _gamma_pair(model, F)
    record("two_point_correlation", abs(tpc - gam) / max(abs(gam), 1e-300))

    extracted = extract_phase_data(model)
    record("extract_roundtrip",
           0.0 if same_phase_form(extracted.representative, model.form) else 1.0)

    record("pure_point_complete", 0.0 if pure_point_complete(model) else 1.0)

    for m in range(1, moment_order + 1):
        record(f"moment_formula_m{m}", moment_formula_check(model, m, rng))
    return report


def _support_mask(model: ProcessModel) -> np.ndarray:
    mask = np.zeros(model.group.order)
    mask[model.support_indices] = 1.0
    return mask
