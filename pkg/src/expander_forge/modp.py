"""Exact arithmetic mod a prime p: residue vectors, the sum-zero hyperplane,
additive characters e_p(x) = exp(2*pi*i*x/p), and centered-representative norms.

Residues are stored as int64 in [0, p). The modulus is capped below 2^31 so
that products of two residues always fit in int64 without big-integer help.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

PRIME_CAP = 2**31


def is_prime(p: int) -> bool:
    """Trial-division primality test for desk-scale moduli."""
    if p < 2 or p >= PRIME_CAP:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def check_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"modulus must be a prime in [2, 2^31), got {p}")


@lru_cache(maxsize=None)
def ep_table(p: int) -> np.ndarray:
    """All p powers of exp(2*pi*i/p), indexed by residue. Shared, read-only.

    Precomputing the table keeps transcendental calls out of the sweep loops
    that evaluate characters across full residue ranges.
    """
    check_prime(p)
    table = np.exp(2j * np.pi * np.arange(p) / p)
    if np.max(np.abs(np.abs(table) - 1.0)) > 1e-12:
        raise ArithmeticError("character table entries drifted off the unit circle")
    table.setflags(write=False)
    return table


def ep_eval(x: int, p: int) -> complex:
    """exp(2*pi*i*x/p), via the shared character table."""
    return complex(ep_table(p)[int(x) % p])


@dataclass(frozen=True, eq=False)
class FpVector:
    """Immutable vector over F_p, entries reduced to [0, p). Hashable.

    Membership in the sum-zero hyperplane (the natural S_n-invariant
    complement of the constants when p does not divide n) is exposed as
    `is_sum_zero`.
    """

    entries: np.ndarray
    p: int

    def __post_init__(self) -> None:
        check_prime(self.p)
        arr = np.asarray(self.entries, dtype=np.int64) % self.p
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("entries must be a nonempty one-dimensional sequence")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @classmethod
    def zero(cls, n: int, p: int) -> "FpVector":
        return cls(np.zeros(n, dtype=np.int64), p)

    @property
    def n(self) -> int:
        return int(self.entries.size)

    @property
    def is_sum_zero(self) -> bool:
        return int(self.entries.sum()) % self.p == 0

    @property
    def is_zero(self) -> bool:
        return not self.entries.any()

    @property
    def is_constant(self) -> bool:
        return bool((self.entries == self.entries[0]).all())

    def neg(self) -> "FpVector":
        return FpVector((-self.entries) % self.p, self.p)

    def __len__(self) -> int:
        return self.n

    def __iter__(self) -> Iterator[int]:
        return iter(int(x) for x in self.entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FpVector):
            return NotImplemented
        return self.p == other.p and np.array_equal(self.entries, other.entries)

    def __hash__(self) -> int:
        return hash((self.p, self.entries.tobytes()))

    def __repr__(self) -> str:
        return f"FpVector({tuple(int(x) for x in self.entries)}, p={self.p})"


def dot(v: FpVector, w: FpVector) -> int:
    """Inner product sum(v_i * w_i) mod p."""
    if v.p != w.p:
        raise ValueError(f"modulus mismatch: {v.p} != {w.p}")
    if v.n != w.n:
        raise ValueError(f"length mismatch: {v.n} != {w.n}")
    return int((v.entries * w.entries % v.p).sum() % v.p)


def sample_v0(n: int, p: int, rng: np.random.Generator) -> FpVector:
    """Uniformly random sum-zero vector: n-1 i.i.d. uniform entries, last
    entry the negation of their sum."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    check_prime(p)
    head = rng.integers(0, p, size=n - 1, dtype=np.int64)
    last = (-int(head.sum())) % p
    return FpVector(np.concatenate([head, [last]]), p)


def centered_rep(x: int, p: int) -> int:
    """Representative of x mod p in the centered range (-p/2, p/2]."""
    x = int(x) % p
    return x - p if x > p // 2 else x


def centered_l1(v: FpVector) -> int:
    """Sum of |x_i| over centered representatives of v's entries.

    Invariant under coordinate permutation; used as the potential function
    behind diameter lower bounds.
    """
    e = v.entries
    centered = np.where(e > v.p // 2, e - v.p, e)
    return int(np.abs(centered).sum())
