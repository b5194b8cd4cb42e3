"""Tests for the assembled stable cohomology series and table.

The 19-row table frozen below is the reference ground truth this assembly
must hit exactly; everything else (monotone enumeration bounds, truncation
consistency, the positive-n factor) is checked against independent
recomputation.
"""

from fractions import Fraction

import pytest

from hyperstab import m0n, stable
from hyperstab.series import GradedTateSeries, TatePolynomial, evaluate_t
from hyperstab.stable import (
    StableCohomologyTable,
    cohomology_table,
    numerator_term,
    stable_range,
    stable_series,
    stable_series_positive_n,
    table_from_series,
)

# degree -> {twist exponent: multiplicity}; omitted degrees are zero
REFERENCE_ROWS = {
    0: {0: 1},
    8: {6: 1},
    9: {7: 1},
    12: {9: 1, 10: 1},
    13: {10: 1, 11: 1},
    14: {11: 1},
    15: {12: 2},
    16: {12: 2, 13: 2, 14: 1},
    17: {13: 3, 14: 2, 15: 1},
    18: {14: 2, 15: 3},
}


def series_coeffs(s: GradedTateSeries, t: int) -> dict:
    return dict(s.term(t).coeffs)


# --------------------------------------------------------------------------
# numerator terms
# --------------------------------------------------------------------------

def test_numerator_term_examples():
    ep3 = m0n.equivariant_poincare_m0n(3)
    term = numerator_term(1, 1, 1, ep3)
    assert {t: dict(p.coeffs) for t, p in term.terms.items()} == {8: {6: 1}}

    assert numerator_term(0, 3, 0, ep3).terms == {}

    ep4 = m0n.equivariant_poincare_m0n(4)
    term = numerator_term(2, 2, 0, ep4)
    assert {t: dict(p.coeffs) for t, p in term.terms.items()} == {9: {7: 1}}


def test_numerator_term_degree_mismatch():
    ep4 = m0n.equivariant_poincare_m0n(4)
    with pytest.raises(ValueError):
        numerator_term(1, 1, 1, ep4)


# --------------------------------------------------------------------------
# the stable series, n = 0
# --------------------------------------------------------------------------

def test_stable_series_low_degree_coefficients():
    s = stable_series(12)
    assert series_coeffs(s, 0) == {0: 1}
    for t in range(1, 8):
        assert series_coeffs(s, t) == {}, t
    assert series_coeffs(s, 8) == {6: 1}
    assert series_coeffs(s, 12) == {9: 1, 10: 1}


def test_reference_example_rows_exact():
    table = cohomology_table(0, 18)
    assert table.max_degree == 18
    for i in range(19):
        assert table.rows.get(i, {}) == REFERENCE_ROWS.get(i, {}), f"degree {i}"


def test_evaluate_at_minus_one_low_degrees():
    value = evaluate_t(stable_series(10), -1)
    assert value == TatePolynomial({0: 1, 6: 1, 7: -1})


def test_monotone_triple_bound():
    """Admitting extra configuration types never changes truncated output."""
    assert stable_series(10) == stable_series(10, triple_bound=14)


def test_truncation_consistency():
    big = stable_series(18)
    small = stable_series(12)
    for t in range(13):
        assert series_coeffs(big, t) == series_coeffs(small, t), t


# --------------------------------------------------------------------------
# the n > 0 variant
# --------------------------------------------------------------------------

def test_positive_n_series():
    psn = stable_series_positive_n(10)
    assert series_coeffs(psn, 0) == {0: 1}
    assert series_coeffs(psn, 2) == {1: 1}
    base = stable_series(10)
    expected = TatePolynomial({1: 1}) * base.term(8) + base.term(10)
    assert psn.term(10) == expected


# --------------------------------------------------------------------------
# stable range
# --------------------------------------------------------------------------

def test_stable_range_examples():
    assert stable_range(38, 0) == 20
    assert stable_range(10, 10) == 1
    assert stable_range(5, 1) == 3
    assert stable_range(3, 0) == Fraction(5, 2)


def test_stable_range_domain():
    with pytest.raises(ValueError):
        stable_range(1, 0)
    with pytest.raises(ValueError):
        stable_range(5, -1)
    with pytest.raises(ValueError):
        stable_range(5, 7)


# --------------------------------------------------------------------------
# tables
# --------------------------------------------------------------------------

def test_cohomology_table_named_rows():
    table = cohomology_table(0, 18)
    assert table.rows[16] == {12: 2, 13: 2, 14: 1}
    assert table.rows[18] == {14: 2, 15: 3}


def test_cohomology_table_positive_n_degree_zero():
    table = cohomology_table(3, 6)
    assert table.rows[0] == {0: 1}
    assert table.rows[2] == {1: 1}


def test_negative_multiplicity_is_internal_error():
    bad = GradedTateSeries(3, {0: TatePolynomial({0: 1}), 2: TatePolynomial({1: -2})})
    with pytest.raises(ArithmeticError):
        table_from_series(bad)


def test_all_multiplicities_nonnegative_to_degree_30():
    for n in (0, 3):
        table = cohomology_table(n, 30)
        assert table.rows[0] == {0: 1}
        assert all(
            mult > 0 for row in table.rows.values() for mult in row.values()
        )


# --------------------------------------------------------------------------
# CLI payload
# --------------------------------------------------------------------------

def test_cli_payload_shape():
    table = cohomology_table(0, 9)
    payload = stable.cli_payload(table, positive_n=False)
    assert payload["surface_index_regime"] == "n=0"
    assert payload["max_degree"] == 9
    rows = {entry["i"]: entry["classes"] for entry in payload["rows"]}
    assert rows[8] == [{"twist": 6, "mult": 1}]
    assert "stable_range_note" in payload

    payload = stable.cli_payload(cohomology_table(2, 4), positive_n=True)
    assert payload["surface_index_regime"] == "n>0"
