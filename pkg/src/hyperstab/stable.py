"""Assembly of the stable cohomology series for hyperelliptic loci.

The generating series is 1 plus a sum over configuration types (k1, k2, h)
of L^{2k1+k2+3h} t^{3k1+k2+4h} shifted copies of the equivariant layer
multiplicities of M_{0,k1+k2+h}, divided by (1+Lt)(1+L^2 t^3).  The n > 0
variant multiplies by (1+Lt^2).  Expanding the result per degree into
multisets of Tate twists gives the cohomology table.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .m0n import EquivariantPoincare, equivariant_poincare_m0n
from .series import GradedTateSeries, TatePolynomial, invert_unit, multiply
from .symfunc import hall_inner_product_induced

__all__ = [
    "StableCohomologyTable",
    "numerator_term",
    "stable_series",
    "stable_series_positive_n",
    "stable_range",
    "table_from_series",
    "cohomology_table",
    "cli_payload",
]

BOUNDARY_NOTE = (
    "rows in cohomological degree <= (g-n+2)/2 are genus-independent; whether "
    "the boundary degree itself is included is boundary-inclusive-unverified"
)


@dataclass
class StableCohomologyTable:
    """Per-degree multisets of Tate twists: rows[i][w] copies of Q(-w) in H^i."""

    max_degree: int
    rows: dict

    def classes(self, degree: int) -> dict:
        return dict(self.rows.get(degree, {}))


def numerator_term(
    k1: int,
    k2: int,
    h: int,
    ep: EquivariantPoincare,
    *,
    truncation: int | None = None,
) -> GradedTateSeries:
    """Contribution of one configuration type to the numerator sum.

    Layer i of M_{0,k1+k2+h} enters with t-degree 3k1+k2+4h+i, Tate weight
    2k1+k2+3h+i, and multiplicity <layer_i, e_{k1} e_{k2} h_h>.
    """
    if min(k1, k2, h) < 0:
        raise ValueError("type components must be nonnegative")
    n = k1 + k2 + h
    if n < 3:
        raise ValueError(f"type ({k1},{k2},{h}) has fewer than 3 singular points")
    if ep.n != n:
        raise ValueError(f"layer data is for n={ep.n}, type needs n={n}")
    base_weight = 2 * k1 + k2 + 3 * h
    base_degree = 3 * k1 + k2 + 4 * h
    top = truncation if truncation is not None else base_degree + (n - 3)
    terms = {}
    for i, layer in ep.layers.items():
        t = base_degree + i
        if t > top:
            continue
        mult = hall_inner_product_induced(layer, k1, k2, h)
        if mult:
            terms[t] = TatePolynomial({base_weight + i: mult})
    return GradedTateSeries(top, terms)


def _denominator(truncation: int) -> GradedTateSeries:
    """(1+Lt)(1+L^2 t^3) at the requested truncation."""
    factor1 = {0: TatePolynomial.one(), 1: TatePolynomial({1: 1})}
    factor2 = {0: TatePolynomial.one(), 3: TatePolynomial({2: 1})}
    a = GradedTateSeries(truncation, {t: p for t, p in factor1.items() if t <= truncation})
    b = GradedTateSeries(truncation, {t: p for t, p in factor2.items() if t <= truncation})
    return multiply(a, b)


def _configuration_types(bound: int):
    """All (k1, k2, h) with k1+k2+h >= 3 and 3k1+k2+4h <= bound.

    The bound is complete for a series truncated at `bound`: every layer of a
    type enters at t-degree >= 3k1+k2+4h and dividing by the denominator only
    raises t-degrees further.
    """
    for k1 in range(bound // 3 + 1):
        for h in range((bound - 3 * k1) // 4 + 1):
            for k2 in range(bound - 3 * k1 - 4 * h + 1):
                if k1 + k2 + h >= 3:
                    yield k1, k2, h


def stable_series(
    max_degree: int,
    *,
    triple_bound: int | None = None,
    cache_dir=None,
) -> GradedTateSeries:
    """The stable series for the surface-index-zero regime, truncated exactly.

    `triple_bound` widens the configuration-type enumeration beyond the
    truncation; the result must not change (monotonicity), which the tests
    exercise directly.
    """
    if max_degree < 0:
        raise ValueError("max_degree must be nonnegative")
    bound = max(max_degree, triple_bound if triple_bound is not None else -1)
    numerator = GradedTateSeries.zero(max_degree)
    for k1, k2, h in _configuration_types(bound):
        ep = equivariant_poincare_m0n(k1 + k2 + h, cache_dir=cache_dir)
        numerator = numerator + numerator_term(k1, k2, h, ep, truncation=max_degree)
    inverse = invert_unit(_denominator(max_degree))
    return GradedTateSeries.one(max_degree) + multiply(numerator, inverse)


def stable_series_positive_n(max_degree: int, *, cache_dir=None) -> GradedTateSeries:
    """The stable series for positive surface index: (1+Lt^2) times the base series."""
    base = stable_series(max_degree, cache_dir=cache_dir)
    factor = {0: TatePolynomial.one(), 2: TatePolynomial({1: 1})}
    modifier = GradedTateSeries(
        max_degree, {t: p for t, p in factor.items() if t <= max_degree}
    )
    return multiply(modifier, base)


def stable_range(g: int, n: int) -> Fraction:
    """Largest validated degree, (g-n+2)/2, as an exact rational."""
    if g < 2:
        raise ValueError("genus must be at least 2")
    if n < 0 or n > g + 1:
        raise ValueError(f"surface index {n} outside 0..{g + 1}")
    return Fraction(g - n + 2, 2)


def table_from_series(s: GradedTateSeries) -> StableCohomologyTable:
    """Expand a series into per-degree twist multisets, validating positivity."""
    rows = {}
    for t, poly in s.terms.items():
        row = {}
        for exponent, mult in poly.coeffs.items():
            if mult < 0 or exponent < 0:
                raise ArithmeticError(
                    f"degree {t}: invalid class L^{exponent} x {mult} "
                    "(assembly produced a non-effective term)"
                )
            row[exponent] = mult
        if row:
            rows[t] = row
    return StableCohomologyTable(max_degree=s.truncation, rows=rows)


def cohomology_table(n: int, max_degree: int, *, cache_dir=None) -> StableCohomologyTable:
    """Stable cohomology table for surface index n (n = 0 and n > 0 regimes)."""
    if n < 0:
        raise ValueError("surface index must be nonnegative")
    if n == 0:
        s = stable_series(max_degree, cache_dir=cache_dir)
    else:
        s = stable_series_positive_n(max_degree, cache_dir=cache_dir)
    return table_from_series(s)


def cli_payload(table: StableCohomologyTable, *, positive_n: bool) -> dict:
    """JSON-ready dict: regime, degree bound, explicit rows, range note."""
    rows = [
        {
            "i": i,
            "classes": [
                {"twist": w, "mult": m}
                for w, m in sorted(table.rows.get(i, {}).items())
            ],
        }
        for i in range(table.max_degree + 1)
    ]
    return {
        "surface_index_regime": "n>0" if positive_n else "n=0",
        "max_degree": table.max_degree,
        "rows": rows,
        "stable_range_note": BOUNDARY_NOTE,
    }
