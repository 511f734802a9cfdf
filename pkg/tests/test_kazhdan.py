"""Kazhdan intervals, displacement, the optimizer, and the
non-falsification verifications."""

import math

import numpy as np
import pytest

from expander_forge.groups import load_catalog, permutation_group, semidirect_parts
from expander_forge.kazhdan import (
    RepVector,
    displacement,
    kazhdan_interval,
    kazhdan_upper_opt,
    verify_almost_invariant_projection,
    verify_basic_bounds,
    verify_inequality_chain,
)
from expander_forge.rng import master_rng
from expander_forge.spectral import cayley_spectrum


@pytest.fixture(scope="module")
def catalog():
    entries = load_catalog()
    return {name: entry.build() for name, entry in entries.items()}


def test_displacement_examples(catalog):
    c2 = catalog["C2"]
    gens = c2.generator_indices
    constant = np.ones(2) / math.sqrt(2)
    assert displacement(c2, gens, constant) == pytest.approx(0.0, abs=1e-15)
    xi = RepVector.normalized(np.array([1.0, -1.0]), mean_zero=True)
    assert displacement(c2, gens, xi) == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(ValueError):
        displacement(c2, gens, np.zeros(2))
    with pytest.raises(ValueError):
        displacement(c2, [], xi)


def test_displacement_invariant_under_inverses(catalog):
    s4 = catalog["S4"]
    gens = s4.generator_indices
    both = list(gens) + [s4.inv(g) for g in gens]
    rng = master_rng(61)
    for _ in range(20):
        xi = RepVector.normalized(rng.standard_normal(s4.order))
        a = displacement(s4, gens, xi)
        b = displacement(s4, both, xi)
        assert a == pytest.approx(b, abs=1e-12)


def test_repvector_validation():
    with pytest.raises(ValueError):
        RepVector(np.array([1.0, 1.0]), mean_zero=False)  # not unit
    with pytest.raises(ValueError):
        RepVector(np.array([1.0, 0.0]), mean_zero=True)  # not mean-zero
    with pytest.raises(ValueError):
        RepVector.normalized(np.ones(3), mean_zero=True)  # projects to zero


def test_interval_c2_tight(catalog):
    c2 = catalog["C2"]
    interval = kazhdan_interval(c2, c2.generator_indices)
    assert interval.gap == pytest.approx(2.0, abs=1e-10)
    assert interval.lower == pytest.approx(2.0, abs=1e-9)
    assert interval.upper == pytest.approx(2.0, abs=1e-9)
    # the exact constant: displacement of the unique mean-zero direction
    xi = RepVector.normalized(np.array([1.0, -1.0]), mean_zero=True)
    assert displacement(c2, c2.generator_indices, xi) == pytest.approx(2.0, abs=1e-12)


def test_interval_non_generating(catalog):
    c6 = catalog["C6"]
    # the cube of the 6-cycle generates only a C2: not the whole group
    g = c6.generator_indices[0]
    cube = c6.mul(c6.mul(g, g), g)
    interval = kazhdan_interval(c6, [cube])
    assert (interval.lower, interval.upper) == (0.0, 0.0)
    assert not interval.generating
    assert kazhdan_interval(c6, []).upper == 0.0


def test_displacement_lower_bound_on_catalog(catalog):
    """Definition-level content of gap <= kappa^2 / 2: every unit mean-zero
    vector displaces by at least sqrt(2 gap)."""
    rng = master_rng(62)
    for name, group in catalog.items():
        gens = group.generator_indices
        gap = cayley_spectrum(group, gens).gap
        floor = math.sqrt(2 * gap) - 1e-9
        for _ in range(300):
            xi = RepVector.normalized(rng.standard_normal(group.order), mean_zero=True)
            assert displacement(group, gens, xi) >= floor, name


def test_optimizer_c2_exact(catalog):
    value, witness = kazhdan_upper_opt(catalog["C2"], catalog["C2"].generator_indices,
                                       restarts=3, iters=50, seed=0)
    assert value == pytest.approx(2.0, abs=1e-9)
    assert witness.mean_zero


def test_optimizer_within_sandwich_window(catalog):
    for name, group in catalog.items():
        gens = group.generator_indices
        interval = kazhdan_interval(group, gens)
        value, witness = kazhdan_upper_opt(group, gens, restarts=8, iters=300, seed=3)
        assert value >= interval.lower - 1e-6, name
        window = math.sqrt(2 * len(gens) * interval.gap)
        assert value <= window + 0.05, name
        # the reported value really is the witness's displacement
        assert displacement(group, gens, witness) == pytest.approx(value, abs=1e-9)


def test_verify_basic_bounds_catalog(catalog):
    for name, group in catalog.items():
        report = verify_basic_bounds(group, group.generator_indices)
        assert report.passed, (name, [c.name for c in report.failures])
        names = [c.name for c in report.checks]
        assert names == ["upper_bound_two", "monotone_in_generators",
                         "full_set_reaches_sqrt2", "power_set_comparison"]


def test_verify_basic_bounds_c2_full_set_detail(catalog):
    report = verify_basic_bounds(catalog["C2"], catalog["C2"].generator_indices)
    full = next(c for c in report.checks if c.name == "full_set_reaches_sqrt2")
    assert full.lhs == pytest.approx(math.sqrt(2), abs=1e-9)


def test_verify_projection_c2_closed_form(catalog):
    """At order two everything is exact: eps = sqrt(2)|a-b|, residual
    |a-b|/sqrt(2), and kappa_lb = 2 make the projection inequality tight."""
    report = verify_almost_invariant_projection(catalog["C2"],
                                                catalog["C2"].generator_indices,
                                                trials=500, seed=9)
    assert report.passed
    proj = next(c for c in report.checks if c.name == "projection_distance")
    assert proj.lhs == pytest.approx(proj.rhs, abs=1e-9)


def test_verify_projection_catalog(catalog):
    for name, group in catalog.items():
        report = verify_almost_invariant_projection(group, group.generator_indices,
                                                    trials=300, seed=8)
        assert report.passed, name


def test_verify_projection_rejects_zero_gap(catalog):
    with pytest.raises(ValueError):
        verify_almost_invariant_projection(catalog["C6"], [catalog["C6"].identity_index])


def test_chain_on_semidirect_catalog_group(catalog):
    group = catalog["V0xS3_p3"]
    n_idx, h_idx, s_gens, t_gens = semidirect_parts(group)
    report = verify_inequality_chain(group, n_idx, h_idx, s_gens, t_gens)
    assert report.passed, [c.name for c in report.failures]
    names = [c.name for c in report.checks]
    assert "semidirect_product_bound" in names
    assert "quotient_lift" in names
    # the vectors-only instantiations are vacuously non-falsified
    vac = next(c for c in report.checks if c.name == "subgroup_factorization_vectors_only")
    assert vac.passed and vac.rhs == 0.0


def test_chain_on_smallest_semidirect_instance():
    """n = 2, p = 3: a six-element semidirect product whose two standard
    permutation generators coincide (multiset generating set)."""
    from expander_forge.groups import semidirect_group

    group = semidirect_group(2, 3)
    assert group.order == 6
    n_idx, h_idx, s_gens, t_gens = semidirect_parts(group)
    report = verify_inequality_chain(group, n_idx, h_idx, s_gens, t_gens)
    assert report.passed, [c.name for c in report.failures]


def test_chain_on_s3_as_c3_by_c2():
    s3 = permutation_group("S3", [(1, 0, 2), (1, 2, 0)])
    rot = s3.index_of((1, 2, 0))
    swap = s3.index_of((1, 0, 2))
    report = verify_inequality_chain(s3, s3.closure([rot]), s3.closure([swap]),
                                     [rot], [swap])
    assert report.passed
    quot = next(c for c in report.checks if c.name == "quotient_lift")
    # G/N is a two-element group whose certified interval is tight at 2
    assert quot.rhs == pytest.approx(0.5, abs=1e-9)


def test_chain_validation_errors():
    s3 = permutation_group("S3", [(1, 0, 2), (1, 2, 0)])
    rot = s3.index_of((1, 2, 0))
    swap = s3.index_of((1, 0, 2))
    c3 = s3.closure([rot])
    c2 = s3.closure([swap])
    with pytest.raises(ValueError):
        verify_inequality_chain(s3, c2, c3, [swap], [rot])  # C2 is not normal
    with pytest.raises(ValueError):
        verify_inequality_chain(s3, c3, c3, [rot], [rot])  # orders do not match
    with pytest.raises(ValueError):
        verify_inequality_chain(s3, c3, c2, [swap], [swap])  # S outside N
