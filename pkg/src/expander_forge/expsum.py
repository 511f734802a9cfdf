"""Averages of additive characters over coordinate permutations.

The central quantity is lam(v, w) = (1/n!) * sum over all s in S_n of
e_p(<v, w^s>). Its real parts are the normalized eigenvalues of the Cayley
graph of the sum-zero hyperplane on the orbit of v, so bounding |lam(v, w)|
away from 1 for all nonconstant w certifies a spectral gap.

The certification shortcut: a Cauchy-Schwarz switching argument bounds
|lam(v, w)|^2 by 1/2 + 1/2 * max over u != 0 of |lam_v(u)|^2 where
lam_v(u) = (1/n) * sum_i e_p(u * v_i) is the support-one case. That turns
p - 1 cheap sweeps into a bound covering every one of the p^(n-1)
eigenvalues, with no enumeration of w.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from . import backend
from .modp import FpVector, check_prime, ep_table, sample_v0
from .perm import multiset_permutations, orbit_size, random_perm
from .rng import task_rng

EXACT_MAX_N = 10

_MODE_EXACT = "exact"
_MODE_CLOSED = "closed-form"
_MODE_MC = "monte-carlo"


@dataclass(frozen=True)
class ExpSumValue:
    """A character average: complex value plus how it was computed."""

    real: float
    imag: float
    mode: str
    sample_count: int = 0

    def __post_init__(self) -> None:
        if self.modulus > 1.0 + 1e-9:
            raise ArithmeticError(
                f"average of unit complex numbers has modulus {self.modulus}"
            )

    @property
    def value(self) -> complex:
        return complex(self.real, self.imag)

    @property
    def modulus(self) -> float:
        return math.hypot(self.real, self.imag)


@dataclass(frozen=True)
class SwitchCertificate:
    """Proof that every nonconstant w satisfies |lam(v, w)| <= spectral_bound.

    max_support_one is the measured max over u != 0 of |lam_v(u)|; the bound
    sqrt(1/2 + max_support_one^2 / 2) then covers all w at once. The floor of
    the construction is 1/sqrt(2), reached only as max_support_one -> 0.
    """

    v: FpVector
    max_support_one: float
    spectral_bound: float
    u_argmax: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.max_support_one <= 1.0 + 1e-12:
            raise ValueError(f"max_support_one out of range: {self.max_support_one}")
        expected = math.sqrt(0.5 + 0.5 * self.max_support_one**2)
        if abs(self.spectral_bound - expected) > 1e-12:
            raise ValueError("spectral_bound inconsistent with max_support_one")


@dataclass(frozen=True)
class SearchResult:
    """Outcome of the random search for a certifiable v. A failed search is a
    value, not an error: at small n no v may pass the threshold."""

    found: bool
    certificate: Optional[SwitchCertificate]
    trials: int


@dataclass(frozen=True)
class TailResult:
    """Empirical tail frequency of |lam_v(u)| >= eps against the proven
    4 * exp(-eps^2 * n / 8) bound."""

    empirical_rate: float
    bound: float
    exceed_count: int
    trials: int


def _check_pair(v: FpVector, w: FpVector) -> None:
    if v.p != w.p:
        raise ValueError(f"modulus mismatch: {v.p} != {w.p}")
    if v.n != w.n:
        raise ValueError(f"dimension mismatch: {v.n} != {w.n}")


def _mean_over_rearrangements(moving: FpVector, fixed: FpVector) -> complex:
    """Mean of e_p(<x, fixed>) over the distinct rearrangements x of `moving`,
    streamed in batches through the character kernel."""
    p = moving.p
    ep = np.asarray(ep_table(p))
    fixed_row = fixed.entries.reshape(1, -1)
    total = 0.0 + 0.0j
    count = 0
    batch: list[np.ndarray] = []
    batch_rows = 4096
    for row in multiset_permutations(moving.entries):
        batch.append(row)
        if len(batch) == batch_rows:
            rows = np.array(batch, dtype=np.int64)
            total += backend.orbit_char_means(fixed_row, rows, p, ep).sum()
            count += len(batch)
            batch = []
    if batch:
        rows = np.array(batch, dtype=np.int64)
        total += backend.orbit_char_means(fixed_row, rows, p, ep).sum()
        count += len(batch)
    return total / count


def exp_sum_exact(v: FpVector, w: FpVector) -> ExpSumValue:
    """Exact average of e_p(<v, w^s>) over all of S_n.

    Iterates distinct rearrangements rather than all n! permutations; since
    the average is symmetric in v and w, the cheaper orbit of the two is the
    one enumerated.
    """
    _check_pair(v, w)
    if v.n > EXACT_MAX_N:
        raise ValueError(f"exact evaluation guarded at n <= {EXACT_MAX_N}, got {v.n}")
    moving, fixed = (v, w) if orbit_size(v) <= orbit_size(w) else (w, v)
    val = _mean_over_rearrangements(moving, fixed)
    return ExpSumValue(float(val.real), float(val.imag), _MODE_EXACT)


def exp_sum_support_one(v: FpVector, u: int) -> ExpSumValue:
    """lam_v(u) = (1/n) * sum_i e_p(u * v_i), the w = (u, 0, ..., 0) case."""
    p = v.p
    ep = np.asarray(ep_table(p))
    idx = (int(u) % p) * v.entries % p
    val = ep[idx].mean()
    return ExpSumValue(float(val.real), float(val.imag), _MODE_CLOSED)


def exp_sum_monte_carlo(
    v: FpVector, w: FpVector, samples: int, rng: np.random.Generator
) -> ExpSumValue:
    """Unbiased estimate of exp_sum_exact from i.i.d. uniform permutations."""
    _check_pair(v, w)
    if samples < 1:
        raise ValueError(f"need samples >= 1, got {samples}")
    p = v.p
    ep = np.asarray(ep_table(p))
    total = 0.0 + 0.0j
    for _ in range(samples):
        s = random_perm(v.n, rng)
        d = int((v.entries * w.entries[s.images] % p).sum() % p)
        total += ep[d]
    val = total / samples
    return ExpSumValue(float(val.real), float(val.imag), _MODE_MC, samples)


def support_one_sweep(v: FpVector) -> np.ndarray:
    """|lam_v(u)| for every u in 0..p-1 (entry 0 is always 1)."""
    counts = np.bincount(v.entries, minlength=v.p).astype(np.float64)
    return backend.support_one_moduli(counts, v.p, np.asarray(ep_table(v.p)))


def max_support_one(v: FpVector) -> tuple[float, int]:
    """Maximum of |lam_v(u)| over u != 0 and the smallest attaining u."""
    moduli = support_one_sweep(v)[1:]
    u = int(np.argmax(moduli)) + 1
    return float(moduli[u - 1]), u


def certify(v: FpVector) -> SwitchCertificate:
    """Switching certificate for a nonzero sum-zero v: a bound on |lam(v, w)|
    valid for every nonconstant w, from the support-one sweep alone."""
    if not v.is_sum_zero:
        raise ValueError("v must lie in the sum-zero hyperplane")
    if v.is_zero:
        raise ValueError("v must be nonzero")
    m, u = max_support_one(v)
    m = min(m, 1.0)
    bound = math.sqrt(0.5 + 0.5 * m * m)
    return SwitchCertificate(v=v, max_support_one=m, spectral_bound=bound, u_argmax=u)


def search_vector(
    n: int,
    p: int,
    threshold: float = 0.5,
    max_trials: int = 100,
    seed: int = 0,
    workers: int = 1,
) -> SearchResult:
    """Sample random sum-zero vectors until one certifies below `threshold`.

    Candidate i is always drawn from the stream derived from (seed, i), so
    the result does not depend on batching or worker count. A zero draw
    counts as a failed trial (its sweep maximum is 1).
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must be in (0, 1), got {threshold}")
    if max_trials < 1:
        raise ValueError(f"need max_trials >= 1, got {max_trials}")
    check_prime(p)

    def evaluate(i: int) -> Optional[SwitchCertificate]:
        v = sample_v0(n, p, task_rng(seed, i))
        return None if v.is_zero else certify(v)

    best: Optional[SwitchCertificate] = None

    def consider(i: int, cert: Optional[SwitchCertificate]) -> Optional[SearchResult]:
        nonlocal best
        if cert is None:
            return None
        if best is None or cert.max_support_one < best.max_support_one:
            best = cert
        if cert.max_support_one < threshold:
            return SearchResult(found=True, certificate=cert, trials=i + 1)
        return None

    if workers <= 1:
        for i in range(max_trials):
            hit = consider(i, evaluate(i))
            if hit is not None:
                return hit
    else:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunk = workers * 4
            for start in range(0, max_trials, chunk):
                indices = range(start, min(start + chunk, max_trials))
                for i, cert in zip(indices, pool.map(evaluate, indices)):
                    hit = consider(i, cert)
                    if hit is not None:
                        return hit
    return SearchResult(found=False, certificate=best, trials=max_trials)


def tail_bound(n: int, eps: float) -> float:
    """The proven tail bound 4 * exp(-eps^2 * n / 8)."""
    return 4.0 * math.exp(-(eps**2) * n / 8.0)


def tail_experiment(
    n: int,
    p: int,
    eps: float,
    trials: int,
    u: int,
    seed: int = 0,
    chunk: int = 1024,
) -> TailResult:
    """Frequency of |lam_v(u)| >= eps over random sum-zero v, with the bound.

    Requires eps >= 2/n (the regime where the bound is proven) and u != 0.
    Trial i draws its vector from the (seed, i) stream.
    """
    check_prime(p)
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if eps < 2.0 / n:
        raise ValueError(f"need eps >= 2/n = {2.0 / n}, got {eps}")
    if int(u) % p == 0:
        raise ValueError("u must be nonzero mod p")
    if trials < 1:
        raise ValueError(f"need trials >= 1, got {trials}")
    u = int(u) % p
    ep = np.asarray(ep_table(p))
    exceed = 0
    for start in range(0, trials, chunk):
        block = [
            sample_v0(n, p, task_rng(seed, i)).entries
            for i in range(start, min(start + chunk, trials))
        ]
        vmat = np.array(block, dtype=np.int64)
        vals = ep[(u * vmat) % p].mean(axis=1)
        exceed += int((np.abs(vals) >= eps).sum())
    return TailResult(
        empirical_rate=exceed / trials,
        bound=tail_bound(n, eps),
        exceed_count=exceed,
        trials=trials,
    )


@dataclass(frozen=True)
class SwitchingSweep:
    """Exhaustive audit of the switching inequality at one (n, p).

    For every sum-zero v and every nonconstant w (one representative per
    rearrangement class, which covers all w since lam is invariant under
    permuting w), records the worst margins of:

      plain:   1/2 + 1/2 * max_u |lam_v(u)|^2          - |lam(v, w)|^2
      sharp:   1/2 + (n |lam_v(u_w)|^2 - 1) / (2(n-1)) - |lam(v, w)|^2

    where u_w is the difference of the first adjacent unequal pair of the
    sorted w. Nonnegative margins (up to float slack) mean no violation.
    """

    n: int
    p: int
    vector_count: int
    class_count: int
    pair_count: int
    min_margin_plain: float
    min_margin_sharp: float

    def violations(self, slack: float = 1e-9) -> int:
        return int(self.min_margin_plain < -slack) + int(self.min_margin_sharp < -slack)


def enumerate_v0(n: int, p: int) -> np.ndarray:
    """All p^(n-1) sum-zero vectors, one per row."""
    count = p ** (n - 1)
    idx = np.arange(count, dtype=np.int64)
    digits = (idx[:, None] // p ** np.arange(n - 1, dtype=np.int64)[None, :]) % p
    last = (-digits.sum(axis=1)) % p
    return np.concatenate([digits, last[:, None]], axis=1)


def _sorted_classes(n: int, p: int) -> Iterator[np.ndarray]:
    from itertools import combinations_with_replacement

    for combo in combinations_with_replacement(range(p), n):
        yield np.array(combo, dtype=np.int64)


def switching_sweep(n: int, p: int) -> SwitchingSweep:
    """Run the exhaustive switching audit at (n, p). Cost is one character
    sweep per v plus one matrix pass per rearrangement class of w."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if n > EXACT_MAX_N:
        raise ValueError(f"sweep guarded at n <= {EXACT_MAX_N}, got {n}")
    check_prime(p)
    ep = np.asarray(ep_table(p))
    v0 = enumerate_v0(n, p)
    nv = v0.shape[0]

    counts = np.zeros((nv, p))
    np.add.at(counts, (np.arange(nv)[:, None], v0), 1.0)
    umat = (np.arange(p, dtype=np.int64)[:, None] * np.arange(p, dtype=np.int64)[None, :]) % p
    lam_u = np.abs(counts @ ep[umat].T) / n
    sup_sq = lam_u[:, 1:].max(axis=1) ** 2

    min_plain = math.inf
    min_sharp = math.inf
    classes = 0
    pairs = 0
    for sorted_w in _sorted_classes(n, p):
        if sorted_w[0] == sorted_w[-1]:
            continue
        classes += 1
        rows = np.array(list(multiset_permutations(sorted_w)), dtype=np.int64)
        lam = backend.orbit_char_means(rows, v0, p, ep)
        lhs = np.abs(lam) ** 2
        pairs += nv
        min_plain = min(min_plain, float((0.5 + 0.5 * sup_sq - lhs).min()))
        step = int(np.nonzero(np.diff(sorted_w))[0][0])
        u_w = int((sorted_w[step] - sorted_w[step + 1]) % p)
        sharp_rhs = 0.5 + 0.5 * (n * lam_u[:, u_w] ** 2 - 1.0) / (n - 1.0)
        min_sharp = min(min_sharp, float((sharp_rhs - lhs).min()))
    return SwitchingSweep(
        n=n,
        p=p,
        vector_count=nv,
        class_count=classes,
        pair_count=pairs,
        min_margin_plain=min_plain,
        min_margin_sharp=min_sharp,
    )
