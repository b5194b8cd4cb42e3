"""Tests for the exact singular-configuration linear algebra.

Kernel dimensions are cross-checked against numpy's floating-point rank on
small integer matrices (exact at these sizes) and, where a formula predicts
them, against the codimension count 3*k1 + 3*k2 + 5*h.
"""

import json
import random
from fractions import Fraction

import numpy as np
import pytest

from hyperstab.linalg import (
    PointOnSurface,
    SectionSpace,
    kernel_dimension,
    rank_drop_witness,
    sample_configuration,
    singularity_rows,
    verify_bundle_rank,
)
from hyperstab.spectral import ConfigurationType

CT = ConfigurationType


def stacked_rows(points, space):
    rows = []
    for p in points:
        rows.extend(singularity_rows(p, space))
    return rows


# --------------------------------------------------------------------------
# section spaces
# --------------------------------------------------------------------------

def test_section_space_dimension_and_basis():
    for d, n in [(2, 0), (5, 1), (9, 0), (8, 2), (12, 3), (4, 2)]:
        space = SectionSpace(d, n)
        assert space.dimension == 3 * d - 3 * n + 3
        assert len(space.monomials) == space.dimension
        assert len(set(space.monomials)) == space.dimension
        for a, b, c in space.monomials:
            assert c in (0, 1, 2)
            assert a >= 0 and b >= 0
            assert a + b == d - c * n


def test_section_space_rejects_bad_parameters():
    with pytest.raises(ValueError):
        SectionSpace(3, 2)  # d < 2n
    with pytest.raises(ValueError):
        SectionSpace(4, -1)


# --------------------------------------------------------------------------
# points
# --------------------------------------------------------------------------

def test_point_normalization_and_ruling_line():
    p = PointOnSurface.off_exceptional(2, 6, 8, 1)
    assert p.coords == (1, 3, 4)
    assert p.ruling_line == (1, 3)

    q = PointOnSurface.off_exceptional(0, 2, 6, 1)
    assert q.coords == (0, 1, 3)
    assert q.ruling_line == (0, 1)

    e = PointOnSurface.on_exceptional(3, 6)
    assert e.coords == (1, 2)
    assert e.ruling_line == (1, 2)

    # weight enters the fiber coordinate normalization
    w = PointOnSurface.off_exceptional(2, 2, 8, 2)
    assert w.coords == (1, 1, 2)


def test_degenerate_points_rejected():
    with pytest.raises(ValueError):
        PointOnSurface.on_exceptional(0, 0)
    with pytest.raises(ValueError):
        PointOnSurface.off_exceptional(0, 0, 1, 1)  # no ruling line


# --------------------------------------------------------------------------
# singularity rows: hand-computed coefficient extractions
# --------------------------------------------------------------------------

def test_rows_off_exceptional_coordinate_point():
    # d=2, n=0; basis ordered c ascending then x-degree descending:
    # c=0: x2,xy,y2 | c=1: x2 z,xy z,y2 z | c=2: x2 z2,xy z2,y2 z2
    space = SectionSpace(2, 0)
    assert space.monomials == (
        (2, 0, 0), (1, 1, 0), (0, 2, 0),
        (2, 0, 1), (1, 1, 1), (0, 2, 1),
        (2, 0, 2), (1, 1, 2), (0, 2, 2),
    )
    p = PointOnSurface.off_exceptional(1, 0, 0, 0)
    rows = singularity_rows(p, space)
    assert rows[0] == (2, 0, 0, 0, 0, 0, 0, 0, 0)  # d/dx
    assert rows[1] == (0, 1, 0, 0, 0, 0, 0, 0, 0)  # d/dy
    assert rows[2] == (0, 0, 0, 1, 0, 0, 0, 0, 0)  # d/dz
    assert kernel_dimension(rows) == 9 - 3


def test_rows_on_exceptional_point():
    # d=4, n=1: quadratic top coefficient, cubic middle, quartic bottom
    space = SectionSpace(4, 1)
    assert space.monomials == (
        (4, 0, 0), (3, 1, 0), (2, 2, 0), (1, 3, 0), (0, 4, 0),
        (3, 0, 1), (2, 1, 1), (1, 2, 1), (0, 3, 1),
        (2, 0, 2), (1, 1, 2), (0, 2, 2),
    )
    p = PointOnSurface.on_exceptional(1, 2)
    rows = singularity_rows(p, space)
    # d(alpha)/dx, d(alpha)/dy on the z^2 block; beta values on the z block
    assert rows[0] == (0, 0, 0, 0, 0, 0, 0, 0, 0, 2, 2, 0)
    assert rows[1] == (0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 4)
    assert rows[2] == (0, 0, 0, 0, 0, 1, 2, 4, 8, 0, 0, 0)


def test_off_exceptional_weight_must_match_space():
    space = SectionSpace(6, 2)
    p = PointOnSurface.off_exceptional(1, 2, 3, 1)
    with pytest.raises(ValueError):
        singularity_rows(p, space)


# --------------------------------------------------------------------------
# kernel dimension
# --------------------------------------------------------------------------

def test_kernel_of_zero_matrix_is_full_space():
    v = SectionSpace(5, 1).dimension
    assert v == 15
    assert kernel_dimension([(0,) * v]) == 15


def test_kernel_dimension_matches_numpy_rank():
    rng = random.Random(4321)
    for _ in range(50):
        rows = rng.randint(2, 7)
        cols = rng.randint(2, 9)
        inner = rng.randint(1, min(rows, cols))
        left = [[rng.randint(-5, 5) for _ in range(inner)] for _ in range(rows)]
        right = [[rng.randint(-5, 5) for _ in range(cols)] for _ in range(inner)]
        mat = [
            tuple(sum(left[i][k] * right[k][j] for k in range(inner)) for j in range(cols))
            for i in range(rows)
        ]
        expected = cols - np.linalg.matrix_rank(np.array(mat, dtype=float))
        assert kernel_dimension(mat) == expected


def test_kernel_dimension_with_fractions_and_modulus():
    assert kernel_dimension([(Fraction(1, 2), 1)]) == 1
    # rank drops mod 7 but not over the rationals
    mat = [(7, 0), (0, 1)]
    assert kernel_dimension(mat) == 0
    assert kernel_dimension(mat, modulus=7) == 1
    rng = random.Random(99)
    generic = [tuple(rng.randint(-9, 9) for _ in range(6)) for _ in range(4)]
    assert kernel_dimension(generic) == kernel_dimension(generic, modulus=101)


def test_kernel_dimension_rejects_ragged_rows():
    with pytest.raises(ValueError):
        kernel_dimension([(1, 2), (1,)])


# --------------------------------------------------------------------------
# configurations
# --------------------------------------------------------------------------

def test_single_generic_point_cuts_three_conditions():
    rng = random.Random(20260816)
    for trial in range(50):
        d, n = rng.choice([(5, 0), (6, 1), (7, 2), (9, 1)])
        space = SectionSpace(d, n)
        config = CT(1, 0, 0) if trial % 2 == 0 else CT(0, 1, 0)
        points = sample_configuration(config, d, n, rng)
        rows = stacked_rows(points, space)
        assert kernel_dimension(rows) == space.dimension - 3


def test_pair_on_ruling_line_has_rank_five():
    rng = random.Random(7)
    space = SectionSpace(7, 0)
    for _ in range(10):
        points = sample_configuration(CT(0, 0, 1), 7, 0, rng)
        assert len(points) == 2
        assert points[0].ruling_line == points[1].ruling_line
        assert points[0] != points[1]
        rows = stacked_rows(points, space)
        assert kernel_dimension(rows) == space.dimension - 5
        assert np.linalg.matrix_rank(np.array(rows, dtype=float)) == 5


def test_type_111_cuts_eleven_conditions():
    rng = random.Random(11)
    space = SectionSpace(12, 1)
    for _ in range(10):
        points = sample_configuration(CT(1, 1, 1), 12, 1, rng)
        lines = [p.ruling_line for p in points]
        assert len(points) == 4  # one on E, one off, one fiber pair
        assert len(set(lines)) == 3
        rows = stacked_rows(points, space)
        assert kernel_dimension(rows) == space.dimension - 11


def test_sample_configuration_structure():
    rng = random.Random(5)
    points = sample_configuration(CT(2, 3, 2), 14, 1, rng)
    assert len(points) == 2 + 3 + 4
    on = [p for p in points if p.locus == "on_exceptional"]
    off = [p for p in points if p.locus == "off_exceptional"]
    assert len(on) == 2 and len(off) == 7
    lines = {}
    for p in points:
        lines.setdefault(p.ruling_line, []).append(p)
    assert len(lines) == 7  # distinct sites
    paired = [group for group in lines.values() if len(group) == 2]
    assert len(paired) == 2
    for a, b in paired:
        assert a != b and a.locus == b.locus == "off_exceptional"


# --------------------------------------------------------------------------
# bundle-rank verification
# --------------------------------------------------------------------------

def test_verify_bundle_rank_examples():
    report = verify_bundle_rank(CT(2, 0, 0), 7, 1, trials=100, seed=20260816)
    assert report["v"] == 21
    assert report["expected_rank"] == 15
    assert report["failures"] == []
    assert report["trials"] == 100

    report = verify_bundle_rank(CT(0, 0, 2), 9, 0, trials=25, seed=20260816)
    assert report["v"] == 30 and report["expected_rank"] == 20
    assert report["failures"] == []

    report = verify_bundle_rank(CT(1, 0, 1), 8, 2, trials=25, seed=20260816)
    assert report["v"] == 21 and report["expected_rank"] == 13
    assert report["failures"] == []


def test_verify_bundle_rank_is_deterministic_and_serializable():
    a = verify_bundle_rank(CT(1, 1, 0), 6, 1, trials=10, seed=1)
    b = verify_bundle_rank(CT(1, 1, 0), 6, 1, trials=10, seed=1)
    assert a == b
    assert set(a) == {"type", "d", "n", "v", "expected_rank", "trials", "failures", "seed"}
    json.dumps(a)
    c = verify_bundle_rank(CT(1, 1, 0), 6, 1, trials=10, seed=2)
    assert c["seed"] == 2


def test_degree_bound_is_enforced_with_explanation():
    # bound for (2,0,0) at n=1 is max(2+1-1, 4+2-1) = 5
    with pytest.raises(ValueError, match="bound"):
        verify_bundle_rank(CT(2, 0, 0), 4, 1, trials=1, seed=0)
    # fractional part of the bound: (0,0,2) at n=1 needs d >= 10/3
    with pytest.raises(ValueError, match="bound"):
        verify_bundle_rank(CT(0, 0, 2), 3, 1, trials=1, seed=0)
    report = verify_bundle_rank(CT(0, 0, 2), 4, 1, trials=5, seed=0)
    assert report["failures"] == []


def test_below_bound_witness_shows_rank_drop():
    report = rank_drop_witness(trials=12, seed=20260816)
    assert report["type"] == [2, 0, 0]
    assert (report["d"], report["n"]) == (3, 1)
    assert report["v"] == 9 and report["expected_rank"] == 3
    # the two derivative rows of the top coefficient coincide for every
    # sample, so the kernel is 5-dimensional on each trial
    assert len(report["failures"]) == 12
    assert {f["kernel_dimension"] for f in report["failures"]} == {5}


def test_prime_field_agrees_with_rationals_on_same_seed():
    ratio = verify_bundle_rank(CT(1, 1, 1), 9, 1, trials=20, seed=3)
    modp = verify_bundle_rank(CT(1, 1, 1), 9, 1, trials=20, seed=3, modulus=101)
    assert ratio["failures"] == modp["failures"] == []
    rng_a, rng_b = random.Random(17), random.Random(17)
    space = SectionSpace(9, 1)
    pts_a = sample_configuration(CT(0, 2, 1), 9, 1, rng_a)
    pts_b = sample_configuration(CT(0, 2, 1), 9, 1, rng_b)
    assert pts_a == pts_b
    rows = stacked_rows(pts_a, space)
    assert kernel_dimension(rows) == kernel_dimension(rows, modulus=101)


def test_prime_field_preconditions():
    with pytest.raises(ValueError):
        verify_bundle_rank(CT(1, 0, 0), 5, 1, trials=1, seed=0, modulus=2)
    with pytest.raises(ValueError):
        verify_bundle_rank(CT(1, 0, 0), 5, 1, trials=1, seed=0, modulus=7)  # p <= 2d
    with pytest.raises(ValueError):
        verify_bundle_rank(CT(1, 0, 0), 8, 3, trials=1, seed=0, modulus=29)  # 29 % 3 == 2
    report = verify_bundle_rank(CT(1, 0, 0), 8, 3, trials=5, seed=0, modulus=31)
    assert report["failures"] == []


def test_kernel_dimension_constant_for_small_types():
    # all nine types with at most two sites plus every type with three sites,
    # each at three (d, n) pairs above the degree bound
    small = [
        CT(1, 0, 0), CT(0, 1, 0), CT(0, 0, 1),
        CT(2, 0, 0), CT(1, 1, 0), CT(0, 2, 0),
        CT(1, 0, 1), CT(0, 1, 1), CT(0, 0, 2),
    ]
    three_sites = [
        CT(k1, k2, 3 - k1 - k2)
        for k1 in range(4)
        for k2 in range(4 - k1)
    ]
    for config in small + three_sites:
        k1, k2, h = config.k1, config.k2, config.h
        for n in (0, 1, 2):
            bound = max(
                Fraction(3 * (k1 + k2) + 5 * h, 3) + n - 1,
                Fraction(2 * k1 + 2 * k2 + h + 2 * n - 1),
            )
            d = max(-(-bound.numerator // bound.denominator), 2 * n) + 1
            report = verify_bundle_rank(config, d, n, trials=4, seed=8)
            assert report["failures"] == [], (config, d, n)
