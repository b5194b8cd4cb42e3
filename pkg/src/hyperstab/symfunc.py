"""Partitions, symmetric-group characters, and Hall inner products.

Partitions double as cycle types: a partition of n read as cycle lengths
indexes a conjugacy class of S_n.  Characters are stored as class functions
(`CharacterVector`), which keeps every pairing exact and integral; Schur-basis
data is recovered from them on demand.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

__all__ = [
    "Partition",
    "canonical_partition",
    "partitions",
    "z_order",
    "sign",
    "irreducible_character",
    "CharacterVector",
    "hall_inner_product_induced",
    "schur_expand",
]

# A partition is a weakly decreasing tuple of positive integers; the empty
# tuple is the partition of 0.  The same tuples serve as cycle types.
Partition = tuple


def canonical_partition(parts) -> tuple:
    """Sort into weakly decreasing order and validate positivity."""
    out = tuple(sorted(parts, reverse=True))
    if out and out[-1] <= 0:
        raise ValueError(f"partition parts must be positive: {parts!r}")
    return out


@lru_cache(maxsize=None)
def partitions(n: int) -> tuple:
    """All partitions of n in reverse lexicographic order, (n,) first.

    Reverse lexicographic means plain tuple comparison descending, so the
    sequence starts at (n,) and ends at (1,)*n.  The result is cached and
    must not be mutated.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")

    def gen(remaining, largest):
        if remaining == 0:
            yield ()
            return
        for part in range(min(remaining, largest), 0, -1):
            for rest in gen(remaining - part, part):
                yield (part,) + rest

    return tuple(gen(n, n))


def z_order(mu) -> int:
    """Centralizer order of a permutation of cycle type mu: prod d^c_d c_d!."""
    mu = canonical_partition(mu)
    out = 1
    run_value = None
    run_length = 0
    for d in mu:
        if d == run_value:
            run_length += 1
        else:
            run_value, run_length = d, 1
        out *= d * run_length
    return out


def sign(mu) -> int:
    """Sign of a permutation of cycle type mu: (-1)^(|mu| - #parts)."""
    mu = canonical_partition(mu)
    return -1 if (sum(mu) - len(mu)) % 2 else 1


@lru_cache(maxsize=None)
def _mn(lam: tuple, mu: tuple) -> int:
    """Murnaghan-Nakayama recursion on canonical tuples."""
    if not mu:
        return 1 if not lam else 0
    strip = mu[0]
    rest = mu[1:]
    k = len(lam)
    beta = [lam[i] + (k - 1 - i) for i in range(k)]
    beta_set = set(beta)
    total = 0
    for b in beta:
        nb = b - strip
        if nb < 0 or nb in beta_set:
            continue
        height = sum(1 for x in beta if nb < x < b)
        new_beta = sorted((x for x in beta if x != b), reverse=True)
        new_beta.append(nb)
        new_beta.sort(reverse=True)
        new_lam = tuple(
            p for p in (new_beta[i] - (k - 1 - i) for i in range(k)) if p > 0
        )
        term = _mn(new_lam, rest)
        total += -term if height % 2 else term
    return total


def irreducible_character(lam, mu) -> int:
    """Value chi^lam(mu) of the irreducible S_n character at cycle type mu."""
    lam = canonical_partition(lam)
    mu = canonical_partition(mu)
    if sum(lam) != sum(mu):
        raise ValueError(f"|lam|={sum(lam)} != |mu|={sum(mu)}")
    return _mn(lam, mu)


class CharacterVector:
    """Integer class function on S_n, stored by cycle type.

    Values must be supplied for every partition of the degree.  Lookups
    accept any ordering of the cycle lengths.
    """

    __slots__ = ("degree", "values")

    def __init__(self, degree: int, values: dict):
        normalized = {}
        for mu, v in values.items():
            mu = canonical_partition(mu)
            if sum(mu) != degree:
                raise ValueError(f"cycle type {mu} does not have weight {degree}")
            if not isinstance(v, int):
                raise ValueError(f"character value at {mu} must be an integer")
            normalized[mu] = v
        expected = set(partitions(degree))
        if set(normalized) != expected:
            missing = expected - set(normalized)
            raise ValueError(f"values missing for cycle types: {sorted(missing)}")
        self.degree = degree
        self.values = normalized

    def __getitem__(self, mu) -> int:
        return self.values[canonical_partition(mu)]

    def __eq__(self, other):
        return (
            isinstance(other, CharacterVector)
            and self.degree == other.degree
            and self.values == other.values
        )

    def __hash__(self):
        return hash((self.degree, tuple(sorted(self.values.items()))))

    def __repr__(self):
        return f"CharacterVector(degree={self.degree}, dim={self.dimension()})"

    def dimension(self) -> int:
        """Value at the identity class."""
        return self.values[(1,) * self.degree]

    @classmethod
    def trivial(cls, n: int) -> "CharacterVector":
        return cls(n, {mu: 1 for mu in partitions(n)})

    @classmethod
    def sign_character(cls, n: int) -> "CharacterVector":
        return cls(n, {mu: sign(mu) for mu in partitions(n)})

    @classmethod
    def irreducible(cls, lam) -> "CharacterVector":
        lam = canonical_partition(lam)
        n = sum(lam)
        return cls(n, {mu: irreducible_character(lam, mu) for mu in partitions(n)})


def hall_inner_product_induced(char: CharacterVector, k1: int, k2: int, h: int) -> int:
    """Hall pairing <char, e_{k1} e_{k2} h_h> by Frobenius reciprocity.

    Sums sgn(mu1) sgn(mu2) char(mu1 + mu2 + mu3) / (z(mu1) z(mu2) z(mu3))
    over partition triples; the result of pairing an honest virtual character
    is always an integer, and anything else raises.
    """
    if min(k1, k2, h) < 0:
        raise ValueError("block sizes must be nonnegative")
    n = k1 + k2 + h
    if char.degree != n:
        raise ValueError(f"character degree {char.degree} != k1+k2+h = {n}")
    # integer accumulation: weight each term by the class sizes k!/z, then
    # divide once by k1! k2! h! at the end
    f1, f2, f3 = math.factorial(k1), math.factorial(k2), math.factorial(h)
    total = 0
    for mu1 in partitions(k1):
        w1 = sign(mu1) * (f1 // z_order(mu1))
        for mu2 in partitions(k2):
            w12 = w1 * sign(mu2) * (f2 // z_order(mu2))
            for mu3 in partitions(h):
                mu = canonical_partition(mu1 + mu2 + mu3)
                total += w12 * (f3 // z_order(mu3)) * char[mu]
    denom = f1 * f2 * f3
    if total % denom:
        raise ArithmeticError(
            f"pairing of degree-{n} class function is not integral: {total}/{denom}"
        )
    return total // denom


def schur_expand(char: CharacterVector) -> dict:
    """Multiplicities <char, chi^lam> for every lam of the character's degree.

    Raises if any multiplicity is non-integral (i.e. the class function is
    not a virtual character).
    """
    n = char.degree
    fact = math.factorial(n)
    out = {}
    for lam in partitions(n):
        total = 0
        for mu in partitions(n):
            total += (fact // z_order(mu)) * char[mu] * irreducible_character(lam, mu)
        if total % fact:
            raise ValueError(
                f"multiplicity of chi^{lam} is not integral: {Fraction(total, fact)}"
            )
        out[lam] = total // fact
    return out
