"""Exact rank checks for the singular-configuration conditions.

A section of the anticanonical-type line bundle on the ruled surface is a
polynomial f = alpha*z^2 + beta*z + gamma with binary forms alpha, beta,
gamma of degrees d-2n, d-n, d.  Requiring f to be singular at a prescribed
configuration of points imposes three linear conditions per point; this
module builds those conditions explicitly, computes kernel dimensions by
fraction-free elimination, and verifies that random configurations of a
fixed type always cut out the expected codimension 3*k1 + 3*k2 + 5*h.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm

from .spectral import ConfigurationType

__all__ = [
    "SectionSpace",
    "PointOnSurface",
    "singularity_rows",
    "kernel_dimension",
    "sample_configuration",
    "verify_bundle_rank",
    "rank_drop_witness",
]


@dataclass(frozen=True)
class SectionSpace:
    """Sections of bidegree (d, 2) on the ruled surface with twist n.

    The monomial basis is x^a y^b z^c with c in {0, 1, 2} and a + b = d - c*n,
    ordered by z-degree ascending and x-degree descending within each block.
    """

    d: int
    n: int

    def __post_init__(self):
        if not (isinstance(self.d, int) and isinstance(self.n, int)):
            raise ValueError("d and n must be integers")
        if not self.d >= 2 * self.n >= 0:
            raise ValueError(f"need d >= 2n >= 0, got d={self.d}, n={self.n}")

    @property
    def dimension(self) -> int:
        return 3 * self.d - 3 * self.n + 3

    @property
    def monomials(self) -> tuple:
        return _monomial_basis(self.d, self.n)


@lru_cache(maxsize=None)
def _monomial_basis(d: int, n: int) -> tuple:
    basis = []
    for c in range(3):
        deg = d - c * n
        basis.extend((a, deg - a, c) for a in range(deg, -1, -1))
    return tuple(basis)


def _as_fraction(value) -> Fraction:
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    raise ValueError(f"coordinates must be rational, got {value!r}")


@dataclass(frozen=True)
class PointOnSurface:
    """A point, either on the distinguished section or off it.

    On the distinguished section the point is a base point [u, v]; off it
    the representative is [x, y, z] with z the fiber coordinate of weight
    ``weight`` (the surface twist n), normalized so that the first nonzero
    base coordinate is 1.  Off-section points must have a well-defined
    ruling line, i.e. (x, y) != (0, 0).
    """

    locus: str
    coords: tuple
    weight: int = 0

    @classmethod
    def on_exceptional(cls, u, v) -> "PointOnSurface":
        u, v = _as_fraction(u), _as_fraction(v)
        if u == 0 and v == 0:
            raise ValueError("degenerate point: [0, 0]")
        scale = u if u != 0 else v
        return cls("on_exceptional", (u / scale, v / scale))

    @classmethod
    def off_exceptional(cls, x, y, z, n) -> "PointOnSurface":
        x, y, z = _as_fraction(x), _as_fraction(y), _as_fraction(z)
        if x == 0 and y == 0:
            raise ValueError("degenerate point: no ruling line through [0, 0, z]")
        scale = x if x != 0 else y
        return cls("off_exceptional", (x / scale, y / scale, z / scale**n), n)

    @property
    def ruling_line(self) -> tuple:
        return self.coords[:2]


def _power(base: Fraction, exponent: int) -> Fraction:
    return Fraction(1) if exponent == 0 else base**exponent


def singularity_rows(point: PointOnSurface, space: SectionSpace) -> tuple:
    """Three linear functionals on ``space`` vanishing iff f is singular there.

    Off the distinguished section these are the partial derivatives of f in
    the weighted coordinates; on it, where the fiber chart around the section
    reads alpha + beta*w + gamma*w^2, they are the two base derivatives of
    the top coefficient together with the middle coefficient.
    """
    basis = space.monomials
    if point.locus == "off_exceptional":
        if point.weight != space.n:
            raise ValueError(
                f"point has fiber weight {point.weight}, space has twist {space.n}"
            )
        x0, y0, z0 = point.coords
        row_x = tuple(
            a * _power(x0, a - 1) * _power(y0, b) * _power(z0, c) if a else Fraction(0)
            for a, b, c in basis
        )
        row_y = tuple(
            b * _power(x0, a) * _power(y0, b - 1) * _power(z0, c) if b else Fraction(0)
            for a, b, c in basis
        )
        row_z = tuple(
            c * _power(x0, a) * _power(y0, b) * _power(z0, c - 1) if c else Fraction(0)
            for a, b, c in basis
        )
        return (row_x, row_y, row_z)

    u0, v0 = point.coords
    row_ax = tuple(
        a * _power(u0, a - 1) * _power(v0, b) if c == 2 and a else Fraction(0)
        for a, b, c in basis
    )
    row_ay = tuple(
        b * _power(u0, a) * _power(v0, b - 1) if c == 2 and b else Fraction(0)
        for a, b, c in basis
    )
    row_b = tuple(
        _power(u0, a) * _power(v0, b) if c == 1 else Fraction(0) for a, b, c in basis
    )
    return (row_ax, row_ay, row_b)


def _integer_rows(rows) -> list:
    cleared = []
    for row in rows:
        fracs = [Fraction(entry) for entry in row]
        scale = lcm(*(f.denominator for f in fracs)) if fracs else 1
        cleared.append([int(f * scale) for f in fracs])
    return cleared


def _rank_bareiss(matrix: list) -> int:
    """Rank of an integer matrix by fraction-free (Bareiss) elimination."""
    m = [row[:] for row in matrix]
    n_rows, n_cols = len(m), len(m[0])
    rank = 0
    prev = 1
    r = 0
    for col in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if m[i][col]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        for i in range(r + 1, n_rows):
            for j in range(col + 1, n_cols):
                m[i][j] = (m[r][col] * m[i][j] - m[i][col] * m[r][j]) // prev
            m[i][col] = 0
        prev = m[r][col]
        rank += 1
        r += 1
        if r == n_rows:
            break
    return rank


def _rank_mod_p(matrix: list, p: int) -> int:
    m = [[entry % p for entry in row] for row in matrix]
    n_rows, n_cols = len(m), len(m[0])
    rank = 0
    r = 0
    for col in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if m[i][col]), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = pow(m[r][col], -1, p)
        m[r] = [(entry * inv) % p for entry in m[r]]
        for i in range(r + 1, n_rows):
            factor = m[i][col]
            if factor:
                m[i] = [(a - factor * b) % p for a, b in zip(m[i], m[r])]
        rank += 1
        r += 1
        if r == n_rows:
            break
    return rank


def kernel_dimension(rows, modulus: int | None = None) -> int:
    """Dimension of the common kernel of the given row functionals."""
    rows = list(rows)
    if not rows:
        raise ValueError("no rows given; the ambient dimension would be ambiguous")
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise ValueError("rows have inconsistent lengths")
    matrix = _integer_rows(rows)
    if modulus is None:
        return width - _rank_bareiss(matrix)
    if modulus < 2 or any(modulus % k == 0 for k in range(2, int(modulus**0.5) + 1)):
        raise ValueError(f"modulus {modulus} is not prime")
    return width - _rank_mod_p(matrix, modulus)


def _degree_bound(config: ConfigurationType, n: int) -> Fraction:
    moduli_part = Fraction(3 * (config.k1 + config.k2) + 5 * config.h, 3) + n - 1
    independence_part = Fraction(2 * config.k1 + 2 * config.k2 + config.h + 2 * n - 1)
    return max(moduli_part, independence_part)


def sample_configuration(
    config: ConfigurationType, d: int, n: int, rng: random.Random, box: int = 50
) -> tuple:
    """Random configuration of the given type with distinct ruling lines.

    Slopes and fiber coordinates are integers drawn uniformly from a box,
    redrawn on collision; points on the section come first, then single
    off-section points, then fiber pairs (adjacent in the result).
    """
    box = max(box, 3 * config.site_count)
    slopes: set = set()

    def fresh_slope() -> int:
        while True:
            s = rng.randint(-box, box)
            if s not in slopes:
                slopes.add(s)
                return s

    points = []
    for _ in range(config.k1):
        points.append(PointOnSurface.on_exceptional(1, fresh_slope()))
    for _ in range(config.k2):
        points.append(
            PointOnSurface.off_exceptional(1, fresh_slope(), rng.randint(-box, box), n)
        )
    for _ in range(config.h):
        s = fresh_slope()
        z1 = rng.randint(-box, box)
        z2 = rng.randint(-box, box)
        while z2 == z1:
            z2 = rng.randint(-box, box)
        points.append(PointOnSurface.off_exceptional(1, s, z1, n))
        points.append(PointOnSurface.off_exceptional(1, s, z2, n))
    return tuple(points)


def _validate_modulus(modulus: int, d: int, n: int) -> None:
    if modulus == 2:
        raise ValueError("characteristic 2 is excluded")
    if modulus < 2 or any(modulus % k == 0 for k in range(2, int(modulus**0.5) + 1)):
        raise ValueError(f"modulus {modulus} is not prime")
    if modulus <= 2 * d:
        raise ValueError(f"need a prime > 2d = {2 * d}, got {modulus}")
    if n >= 3 and modulus % n != 1:
        raise ValueError(f"for twist n={n} the prime must be 1 mod n, got {modulus}")


def verify_bundle_rank(
    config: ConfigurationType,
    d: int,
    n: int,
    trials: int,
    seed: int,
    modulus: int | None = None,
    enforce_bound: bool = True,
) -> dict:
    """Check that every sampled configuration cuts exactly codim conditions.

    Returns a JSON-ready report; ``failures`` lists the trials whose kernel
    dimension differed from dimension - (3*k1 + 3*k2 + 5*h).
    """
    space = SectionSpace(d, n)
    bound = _degree_bound(config, n)
    if enforce_bound and d < bound:
        raise ValueError(
            f"degree {d} is below the bound max(k1+k2+5h/3+n-1, "
            f"2k1+2k2+h+2n-1) = {bound} for type "
            f"({config.k1}, {config.k2}, {config.h}) at n={n}"
        )
    if modulus is not None:
        _validate_modulus(modulus, d, n)
    expected = space.dimension - config.codimension
    failures = []
    for trial in range(trials):
        rng = random.Random(f"{seed}:{trial}")
        points = sample_configuration(config, d, n, rng)
        rows = [row for p in points for row in singularity_rows(p, space)]
        kernel = kernel_dimension(rows, modulus)
        if kernel != expected:
            failures.append({"trial": trial, "kernel_dimension": kernel})
    return {
        "type": [config.k1, config.k2, config.h],
        "d": d,
        "n": n,
        "v": space.dimension,
        "expected_rank": expected,
        "trials": trials,
        "failures": failures,
        "seed": seed,
    }


def rank_drop_witness(trials: int = 12, seed: int = 20260816) -> dict:
    """Below-bound witness: two section points at (d, n) = (3, 1).

    There the top coefficient is linear, so its two derivative rows are
    constant functionals shared by both points and the six stacked rows have
    rank 4 instead of 6: every trial reports kernel dimension 5, not 3,
    confirming that the degree bound is doing real work.
    """
    return verify_bundle_rank(
        ConfigurationType(2, 0, 0), 3, 1, trials, seed, enforce_bound=False
    )
