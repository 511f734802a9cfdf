"""Symmetric group machinery: permutations of {0, ..., n-1}, their action on
mod-p vectors, orbit enumeration by multiset permutations, and the standard
generating pair {transposition, n-cycle}.

Action convention, fixed once for the whole package: (w^s)_i = w_{s(i)}.
This makes `act` a right action, act(act(w, a), b) == act(w, compose(a, b)),
which the property suite pins down. Every graph-level quantity downstream
(orbits, spectra, diameters) averages over all of S_n and is invariant under
the choice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, List, Sequence

import numpy as np

from .modp import FpVector

ORBIT_MAX_N = 10


@dataclass(frozen=True, eq=False)
class Permutation:
    """Permutation stored as its image table: images[i] = s(i). Immutable."""

    images: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.images, dtype=np.int64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("images must be a nonempty one-dimensional sequence")
        if not np.array_equal(np.sort(arr), np.arange(arr.size)):
            raise ValueError(f"not a bijection of 0..{arr.size - 1}: {arr.tolist()}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "images", arr)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(np.arange(n))

    @property
    def n(self) -> int:
        return int(self.images.size)

    @property
    def is_identity(self) -> bool:
        return bool((self.images == np.arange(self.n)).all())

    def __call__(self, i: int) -> int:
        return int(self.images[i])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return np.array_equal(self.images, other.images)

    def __hash__(self) -> int:
        return hash(self.images.tobytes())

    def __repr__(self) -> str:
        return f"Permutation({tuple(int(x) for x in self.images)})"


def compose(a: Permutation, b: Permutation) -> Permutation:
    """The permutation i -> a(b(i))."""
    if a.n != b.n:
        raise ValueError(f"size mismatch: {a.n} != {b.n}")
    return Permutation(a.images[b.images])


def inverse(a: Permutation) -> Permutation:
    inv = np.empty(a.n, dtype=np.int64)
    inv[a.images] = np.arange(a.n)
    return Permutation(inv)


def act(w: FpVector, s: Permutation) -> FpVector:
    """w^s with (w^s)_i = w_{s(i)}."""
    if w.n != s.n:
        raise ValueError(f"length mismatch: vector {w.n}, permutation {s.n}")
    return FpVector(w.entries[s.images], w.p)


def transposition(n: int, i: int, j: int) -> Permutation:
    imgs = np.arange(n)
    imgs[i], imgs[j] = j, i
    return Permutation(imgs)


def standard_generators(n: int) -> List[Permutation]:
    """The pair [(0 1), (0 1 ... n-1)]. Returned as a list: at n = 2 the two
    coincide and generating sets are treated as multisets throughout."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    cycle = Permutation((np.arange(n) + 1) % n)
    return [transposition(n, 0, 1), cycle]


def random_perm(n: int, rng: np.random.Generator) -> Permutation:
    """Uniform permutation via Fisher-Yates."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    imgs = np.arange(n)
    for i in range(n - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        imgs[i], imgs[j] = imgs[j], imgs[i]
    return Permutation(imgs)


def multiset_permutations(entries: Sequence[int]) -> Iterator[np.ndarray]:
    """Distinct rearrangements of `entries` in lexicographic order.

    Standard next-permutation stepping; duplicates in the input never produce
    a repeated output, so orbits of low-support vectors stay polynomially
    small instead of costing n!.
    """
    a = np.sort(np.asarray(entries, dtype=np.int64))
    n = a.size
    while True:
        yield a.copy()
        i = n - 2
        while i >= 0 and a[i] >= a[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while a[j] <= a[i]:
            j -= 1
        a[i], a[j] = a[j], a[i]
        a[i + 1 :] = a[i + 1 :][::-1]


def orbit_size(v: FpVector) -> int:
    """n! divided by the product of entry-multiplicity factorials."""
    size = math.factorial(v.n)
    for count in np.bincount(v.entries, minlength=v.p):
        size //= math.factorial(int(count))
    return size


def orbit_matrix(v: FpVector) -> np.ndarray:
    """All distinct rearrangements of v's entries, one per row."""
    if v.n > ORBIT_MAX_N:
        raise ValueError(f"orbit enumeration guarded at n <= {ORBIT_MAX_N}, got n = {v.n}")
    return np.array(list(multiset_permutations(v.entries)), dtype=np.int64)


def orbit(v: FpVector) -> List[FpVector]:
    """The set {v^s : s in S_n} as a list of distinct vectors."""
    return [FpVector(row, v.p) for row in orbit_matrix(v)]


def orbit_span_rank(v: FpVector) -> int:
    """Rank over F_p of the S_n-submodule generated by v.

    Closes a row-echelon basis under the standard generators instead of
    enumerating the orbit, so it works at any n. A sum-zero vector spans the
    whole sum-zero hyperplane exactly when this returns n - 1.
    """
    n, p = v.n, v.p
    gens = [s.images for s in standard_generators(n)] if n >= 2 else []
    basis: List[np.ndarray] = []
    pivots: List[int] = []

    def reduce(row: np.ndarray) -> np.ndarray:
        row = row % p
        for piv, b in zip(pivots, basis):
            if row[piv] != 0:
                row = (row - row[piv] * b) % p
        return row

    queue = [v.entries.copy()]
    while queue:
        row = reduce(queue.pop())
        nz = np.nonzero(row)[0]
        if nz.size == 0:
            continue
        piv = int(nz[0])
        row = row * pow(int(row[piv]), -1, p) % p
        basis.append(row)
        pivots.append(piv)
        for g in gens:
            queue.append(row[g])
    return len(basis)
