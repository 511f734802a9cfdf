"""Character spectra against the dense Jacobi route, and the p-fold
disjoint-union identity."""

import math

import numpy as np
import pytest

from expander_forge.expsum import enumerate_v0
from expander_forge.groups import from_elements
from expander_forge.modp import FpVector
from expander_forge.perm import orbit, orbit_span_rank
from expander_forge.rng import master_rng
from expander_forge.semidirect import bfs_diameter, build_Y, group_order
from expander_forge.spectral import (
    abelian_spectrum,
    cayley_adjacency,
    cayley_spectrum,
    dense_spectrum,
    disjoint_union_check,
)

AGREEMENT_CASES = [(2, 3), (2, 5), (3, 2), (3, 3)]


def hyperplane_group(n, p):
    return from_elements(
        f"V0_{n}_{p}",
        [FpVector(row, p) for row in enumerate_v0(n, p)],
        lambda a, b: FpVector((a.entries + b.entries) % p, p),
    )


def spanning_vectors(n, p):
    out = []
    for row in enumerate_v0(n, p):
        v = FpVector(row, p)
        if not v.is_zero and orbit_span_rank(v) == n - 1:
            out.append(v)
    return out


def test_abelian_spectrum_hand_case():
    r = abelian_spectrum(FpVector([1, 4], 5))
    want = sorted(
        [1.0, math.cos(2 * math.pi / 5), math.cos(2 * math.pi / 5),
         math.cos(4 * math.pi / 5), math.cos(4 * math.pi / 5)]
    )
    assert np.allclose(r.eigenvalues, want, atol=1e-12)
    assert r.gap == pytest.approx(1 - math.cos(2 * math.pi / 5), abs=1e-12)
    assert r.method == "character"
    assert r.graph_order == 5


def test_abelian_spectrum_contains_trivial_eigenvalue():
    r = abelian_spectrum(FpVector([1, 2, 0, 4], 7))
    assert r.eigenvalues[-1] == pytest.approx(1.0, abs=1e-12)
    assert r.graph_order == 7**3


def test_abelian_spectrum_rejects_bad_vectors():
    with pytest.raises(ValueError):
        abelian_spectrum(FpVector([1, 1], 5))
    with pytest.raises(ValueError):
        abelian_spectrum(FpVector([0, 0], 5))


@pytest.mark.parametrize("n,p", AGREEMENT_CASES)
def test_character_matches_dense_for_all_spanning_vectors(n, p):
    group = hyperplane_group(n, p)
    for v in spanning_vectors(n, p):
        char = abelian_spectrum(v)
        dense = cayley_spectrum(group, orbit(v))
        assert char.eigenvalues.shape == dense.eigenvalues.shape
        assert np.max(np.abs(char.eigenvalues - dense.eigenvalues)) <= 1e-8


def test_character_matches_dense_at_larger_prime():
    # p = 47 at n = 2: 47 characters against a 47 x 47 Jacobi run
    group = hyperplane_group(2, 47)
    v = FpVector([1, 46], 47)
    char = abelian_spectrum(v)
    dense = cayley_spectrum(group, orbit(v))
    assert np.max(np.abs(char.eigenvalues - dense.eigenvalues)) <= 1e-8
    assert char.gap == pytest.approx(1 - math.cos(2 * math.pi / 47), abs=1e-12)


def test_gap_positive_iff_spanning():
    for n, p in [(2, 3), (2, 5), (3, 2), (3, 3)]:
        for row in enumerate_v0(n, p):
            v = FpVector(row, p)
            if v.is_zero:
                continue
            spanning = orbit_span_rank(v) == n - 1
            gap = abelian_spectrum(v).gap
            assert (gap > 1e-9) == spanning


def test_gap_positive_iff_bfs_connected():
    # independent connectivity oracle: the BFS order of the full semidirect
    # group equals |G| exactly when the orbit spans
    for n, p in [(2, 5), (3, 2)]:
        v = FpVector([1, p - 1] + [0] * (n - 2), p)
        assert abelian_spectrum(v).gap > 0
        res = bfs_diameter(build_Y(n, p))
        assert res.order == group_order(n, p)


def test_dense_spectrum_double_edge():
    adj = np.array([[0.0, 2.0], [2.0, 0.0]])
    r = dense_spectrum(adj, 2)
    assert np.allclose(r.eigenvalues, [-1.0, 1.0], atol=1e-12)
    assert r.gap == pytest.approx(2.0, abs=1e-12)


def test_dense_spectrum_five_cycle_circulant():
    adj = np.zeros((5, 5))
    for i in range(5):
        adj[i, (i + 1) % 5] += 1
        adj[i, (i - 1) % 5] += 1
    r = dense_spectrum(adj, 2)
    want = sorted(math.cos(2 * math.pi * k / 5) for k in range(5))
    assert np.allclose(r.eigenvalues, want, atol=1e-10)


def test_dense_spectrum_guards():
    with pytest.raises(ValueError):
        dense_spectrum(np.array([[0.0, 1.0], [0.0, 0.0]]), 1)  # asymmetric
    with pytest.raises(ValueError):
        dense_spectrum(np.array([[0.0, 2.0], [2.0, 1.0]]), 2)  # not regular
    with pytest.raises(ValueError):
        dense_spectrum(np.zeros((2, 3)), 1)


def test_dense_spectrum_identity_generator():
    # S = {identity}: two self-loop orientations, all eigenvalues 1, gap 0
    group = hyperplane_group(2, 3)
    adj = cayley_adjacency(group, [group.identity_index])
    assert np.allclose(adj, 2 * np.eye(3))
    r = dense_spectrum(adj, 2)
    assert np.allclose(r.eigenvalues, 1.0)
    assert r.gap == pytest.approx(0.0, abs=1e-12)


def test_jacobi_against_lapack_oracle():
    rng = master_rng(31)
    for dim in (2, 5, 17, 40):
        m = rng.standard_normal((dim, dim))
        m = (m + m.T) / 2
        m /= max(1.0, np.abs(m).max())
        from expander_forge.backend import jacobi_eigh

        w, vecs = jacobi_eigh(m)
        want = np.linalg.eigvalsh(m)
        assert np.max(np.abs(np.sort(w) - want)) <= 1e-8
        recon = vecs @ np.diag(w) @ vecs.T
        assert np.max(np.abs(recon - m)) <= 1e-8


def test_cayley_adjacency_row_sums_and_s3_table():
    from expander_forge.groups import permutation_group

    s3 = permutation_group("S3", [(1, 0, 2), (1, 2, 0)])
    gens = [(1, 0, 2), (1, 2, 0)]
    adj = cayley_adjacency(s3, gens)
    assert np.allclose(adj.sum(axis=1), 4.0)
    # oracle: hand-built neighbor counts
    want = np.zeros((6, 6))
    for gi, g in enumerate(s3.elements):
        for s in gens:
            si = s3.index_of(s)
            for hi in (s3.table[gi, si], s3.table[gi, s3.inverse[si]]):
                want[gi, hi] += 1
    assert np.array_equal(adj, want)


def test_cayley_adjacency_rejects_foreign_elements():
    group = hyperplane_group(2, 3)
    with pytest.raises(ValueError):
        cayley_adjacency(group, [FpVector([1, 1], 3)])


def test_disjoint_union_cases():
    assert disjoint_union_check(FpVector([1, 2], 3))
    assert disjoint_union_check(FpVector([1, 1, 0], 2))
    assert disjoint_union_check(FpVector([1, 4], 5))


def test_disjoint_union_guards():
    with pytest.raises(ValueError):
        disjoint_union_check(FpVector([1, 2, 0], 3))  # p divides n
    with pytest.raises(ValueError):
        disjoint_union_check(FpVector([0, 0], 5))
