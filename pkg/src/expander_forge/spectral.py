"""Spectra of Cayley graphs, two ways.

For the abelian graph of the sum-zero hyperplane on the orbit of a vector v,
eigenvalues come from characters: each coset of the all-ones line in F_p^n
indexes one character, whose eigenvalue is Re of the permutation-averaged
character sum, so the whole spectrum costs one sweep over p^(n-1) coset
representatives and no matrix.

For everything else there is a dense route: build the multigraph adjacency
of Cay(G, S) and diagonalize the normalized matrix with cyclic Jacobi
rotations. The two routes must agree on their common domain; that agreement
is the central cross-check of the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import backend
from .modp import FpVector, ep_table
from .perm import orbit_matrix

SPECTRUM_MAX_CHARACTERS = 10**6
DENSE_MAX_DIM = 4000
UNION_MAX_POINTS = 10**5


@dataclass(frozen=True)
class SpectrumResult:
    """Eigenvalues (ascending) of a normalized adjacency operator.

    gap is one minus the second-largest eigenvalue, signed rather than
    absolute: the doubled single edge on two vertices has spectrum {-1, 1}
    and gap 2. Positive gap is equivalent to connectivity.
    """

    eigenvalues: np.ndarray
    gap: float
    method: str
    graph_order: int
    degree_normalization: int

    def __post_init__(self) -> None:
        eigs = np.asarray(self.eigenvalues, dtype=np.float64)
        eigs.setflags(write=False)
        object.__setattr__(self, "eigenvalues", eigs)

    @property
    def second_largest(self) -> float:
        if self.eigenvalues.size < 2:
            return -1.0
        return float(self.eigenvalues[-2])


def _finish(eigs: np.ndarray, method: str, order: int, degree: int) -> SpectrumResult:
    eigs = np.sort(np.asarray(eigs, dtype=np.float64))
    if eigs.min() < -1.0 - 1e-9 or eigs.max() > 1.0 + 1e-9:
        raise ArithmeticError("normalized eigenvalue escaped [-1, 1]")
    if abs(eigs.max() - 1.0) > 1e-9:
        raise ArithmeticError("trivial eigenvalue 1 is missing")
    gap = 2.0 if eigs.size < 2 else 1.0 - float(eigs[-2])
    return SpectrumResult(
        eigenvalues=eigs,
        gap=gap,
        method=method,
        graph_order=int(eigs.size),
        degree_normalization=int(degree),
    )


def hyperplane_characters(n: int, p: int) -> np.ndarray:
    """One representative per character of the sum-zero hyperplane: the
    vectors with last coordinate zero, each coset of the all-ones line
    containing exactly one of them."""
    count = p ** (n - 1)
    idx = np.arange(count, dtype=np.int64)
    digits = (idx[:, None] // p ** np.arange(n - 1, dtype=np.int64)[None, :]) % p
    return np.concatenate([digits, np.zeros((count, 1), dtype=np.int64)], axis=1)


def character_values(v: FpVector, wmat: np.ndarray, chunk: int = 2048) -> np.ndarray:
    """Complex character averages lam(v, w) for each row w of wmat."""
    p = v.p
    rows = orbit_matrix(v)
    ep = np.asarray(ep_table(p))
    if v.n * (p - 1) ** 2 >= 2**63:
        raise ValueError("modulus too large for exact integer dot products")
    out = np.empty(wmat.shape[0], dtype=np.complex128)
    step = max(1, chunk)
    for start in range(0, wmat.shape[0], step):
        block = wmat[start : start + step]
        out[start : start + block.shape[0]] = backend.orbit_char_means(rows, block, p, ep)
    return out


def abelian_spectrum(v: FpVector) -> SpectrumResult:
    """Spectrum of the Cayley graph of the sum-zero hyperplane on orbit(v),
    by characters: one value per coset representative, p^(n-1) in all.

    The multiset of complex averages is checked to be closed under
    conjugation before real parts are taken; the trivial character (the zero
    representative) contributes the eigenvalue 1.
    """
    n, p = v.n, v.p
    if not v.is_sum_zero:
        raise ValueError("v must lie in the sum-zero hyperplane")
    if v.is_zero:
        raise ValueError("v must be nonzero")
    if p ** (n - 1) > SPECTRUM_MAX_CHARACTERS:
        raise ValueError(f"character enumeration guarded at {SPECTRUM_MAX_CHARACTERS}")
    wmat = hyperplane_characters(n, p)
    lam = character_values(v, wmat)
    # negating a representative w conjugates its value; -w is again a
    # representative, so the pairing can be checked index by index
    weights = p ** np.arange(n - 1, dtype=np.int64)
    neg_index = ((p - wmat[:, : n - 1]) % p) @ weights
    if np.max(np.abs(lam[neg_index] - np.conj(lam))) > 1e-9:
        raise ArithmeticError("character multiset is not closed under conjugation")
    eigs = lam.real
    if abs(eigs[0] - 1.0) > 1e-12:
        raise ArithmeticError("trivial character did not evaluate to 1")
    gap = 1.0 - float(eigs[1:].max())
    result = _finish(eigs, "character", wmat.shape[0], 2 * math.factorial(n))
    if abs(result.gap - gap) > 1e-12:
        raise ArithmeticError("gap bookkeeping mismatch between trivial and extreme values")
    return result


def dense_spectrum(adjacency: np.ndarray, degree: int) -> SpectrumResult:
    """Full spectrum of adjacency/degree by cyclic Jacobi rotations.

    Requires an exactly regular symmetric multigraph matrix; the off-diagonal
    mass after the sweeps is below 1e-10, which keeps every eigenvalue well
    inside the 1e-8 agreement tolerance used by the cross-checks.
    """
    a = np.asarray(adjacency, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("adjacency must be square")
    if a.shape[0] > DENSE_MAX_DIM:
        raise ValueError(f"dense solver guarded at dimension {DENSE_MAX_DIM}")
    if np.max(np.abs(a - a.T)) > 1e-12:
        raise ValueError("adjacency must be symmetric")
    rows = a.sum(axis=1)
    if np.max(np.abs(rows - degree)) > 1e-9:
        raise ValueError("row sums must all equal the stated degree")
    if degree <= 0:
        raise ValueError("degree must be positive")
    eigs = backend.jacobi_eigenvalues(a / degree)
    return _finish(eigs, "dense", a.shape[0], degree)


def cayley_adjacency(group, gens: Sequence) -> np.ndarray:
    """Multigraph adjacency of Cay(group, gens): entry (g, h) counts how many
    times h equals g*s or g*s^-1 over the generator multiset. Row sums are
    2*len(gens)."""
    if group.order > DENSE_MAX_DIM:
        raise ValueError(f"dense adjacency guarded at order {DENSE_MAX_DIM}")
    gen_indices = group.resolve(list(gens))
    a = np.zeros((group.order, group.order))
    all_g = np.arange(group.order)
    for s in gen_indices:
        a[all_g, group.table[:, s]] += 1.0
        a[all_g, group.table[:, group.inverse[s]]] += 1.0
    if np.max(np.abs(a - a.T)) > 0:
        raise ArithmeticError("Cayley adjacency came out asymmetric")
    return a


def cayley_spectrum(group, gens: Sequence) -> SpectrumResult:
    """Dense spectrum of Cay(group, gens)."""
    gen_list = list(gens)
    return dense_spectrum(cayley_adjacency(group, gen_list), 2 * len(gen_list))


def disjoint_union_check(v: FpVector) -> bool:
    """Whether the full-space eigenvalue multiset over all w in F_p^n equals
    p stacked copies of the hyperplane spectrum, eigenvalue by eigenvalue.

    Guarded to p not dividing n, where the all-ones line is a complement of
    the hyperplane and the p-fold component structure is the clean one.
    """
    n, p = v.n, v.p
    if p**n > UNION_MAX_POINTS:
        raise ValueError(f"full-space enumeration guarded at {UNION_MAX_POINTS} points")
    if n % p == 0:
        raise ValueError("guarded to p not dividing n")
    if not v.is_sum_zero or v.is_zero:
        raise ValueError("v must be a nonzero sum-zero vector")
    count = p**n
    idx = np.arange(count, dtype=np.int64)
    all_w = (idx[:, None] // p ** np.arange(n, dtype=np.int64)[None, :]) % p
    full = np.sort(character_values(v, all_w).real)
    copies = np.sort(np.tile(abelian_spectrum(v).eigenvalues, p))
    return bool(np.max(np.abs(full - copies)) <= 1e-9)
