"""Equivariant cohomology layers of M_{0,n} via twisted point counts.

The trace of a permutation sigma acting on the cohomology of M_{0,n} is read
off from the number of fixed points of (sigma o Frobenius) acting on ordered
configurations of n points of P^1: the count N_mu(q) is a polynomial in q,
divisible by #PGL_2(F_q) = q^3 - q, and the quotient's coefficients carry the
traces layer by layer.  Everything is exact integer arithmetic end to end.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

from .symfunc import CharacterVector, canonical_partition, partitions

__all__ = [
    "QPolynomial",
    "EquivariantPoincare",
    "ResourceGuardError",
    "closed_point_count",
    "twisted_count_config_p1",
    "brute_twisted_count",
    "equivariant_poincare_m0n",
    "default_cache_dir",
]


class ResourceGuardError(RuntimeError):
    """Raised when a brute-force enumeration would exceed its budget."""


def _normalize_coeff(c):
    if isinstance(c, bool):
        raise ValueError(f"coefficient must be a number: {c!r}")
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return int(c) if c.denominator == 1 else c
    raise ValueError(f"coefficient must be an int or Fraction: {c!r}")


class QPolynomial:
    """Exact polynomial in the point-count variable q.

    Stored sparsely as {exponent: coefficient} with exponents >= 0.
    Coefficients are integers whenever possible; rationals such as the
    closed-point count (q^2 - q)/2 are carried as Fractions and collapse
    back to int the moment a product clears the denominator.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict | None = None):
        out = {}
        for e, c in (coeffs or {}).items():
            if not isinstance(e, int) or isinstance(e, bool) or e < 0:
                raise ValueError(f"exponent must be a nonnegative integer: {e!r}")
            c = _normalize_coeff(c)
            if c:
                out[e] = c
        self.coeffs = out

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.coeffs.values())

    @classmethod
    def constant(cls, value: int) -> "QPolynomial":
        return cls({0: value})

    def coefficient(self, e: int) -> int:
        return self.coeffs.get(e, 0)

    def degree(self) -> int:
        """Degree of the polynomial; -1 for the zero polynomial."""
        return max(self.coeffs, default=-1)

    def _coerce(self, other):
        if isinstance(other, QPolynomial):
            return other
        if isinstance(other, int):
            return QPolynomial({0: other})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, 0) + c
        return QPolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return QPolynomial({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                out[e] = out.get(e, 0) + c1 * c2
        return QPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = QPolynomial({0: 1})
        for _ in range(k):
            result = result * self
        return result

    def __call__(self, q: int):
        total = sum(c * q ** e for e, c in self.coeffs.items())
        return _normalize_coeff(Fraction(total)) if total else 0

    def divide_exact(self, other: "QPolynomial") -> "QPolynomial":
        """Polynomial long division; raises unless the remainder is zero."""
        other = self._coerce(other)
        if not other.coeffs:
            raise ZeroDivisionError("division by the zero polynomial")
        lead_e = other.degree()
        lead_c = Fraction(other.coeffs[lead_e])
        rem = dict(self.coeffs)
        quot = {}
        while rem:
            e = max(rem)
            if e < lead_e:
                break
            f = rem[e] / lead_c
            quot[e - lead_e] = f
            for e2, c2 in other.coeffs.items():
                e3 = e2 + e - lead_e
                rem[e3] = rem.get(e3, 0) - f * c2
                if rem[e3] == 0:
                    del rem[e3]
        if rem:
            raise ArithmeticError(f"inexact division: remainder {rem}")
        return QPolynomial(quot)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items())))

    def __repr__(self):
        if not self.coeffs:
            return "QPolynomial(0)"
        terms = " + ".join(f"{c}*q^{e}" for e, c in sorted(self.coeffs.items(), reverse=True))
        return f"QPolynomial({terms})"


def _moebius(k: int) -> int:
    if k < 1:
        raise ValueError("moebius argument must be positive")
    out = 1
    p = 2
    while p * p <= k:
        if k % p == 0:
            k //= p
            if k % p == 0:
                return 0
            out = -out
        else:
            p += 1
    if k > 1:
        out = -out
    return out


@lru_cache(maxsize=None)
def closed_point_count(d: int) -> QPolynomial:
    """Number of closed points of degree d on P^1 over F_q, as a polynomial a_d(q).

    a_1 = q + 1; for d >= 2, a_d = (1/d) * sum_{e | d} moebius(d/e) q^e,
    with the division checked to be exact.
    """
    if d < 1:
        raise ValueError("degree must be >= 1")
    if d == 1:
        return QPolynomial({1: 1, 0: 1})
    total = QPolynomial()
    for e in range(1, d + 1):
        if d % e == 0:
            total = total + QPolynomial({e: _moebius(d // e)})
    if not total.is_integral():
        raise ArithmeticError(f"closed point count for d={d}: non-integral Moebius sum")
    return QPolynomial({e: Fraction(c, d) for e, c in total.coeffs.items()})


@lru_cache(maxsize=None)
def _falling_product(d: int, count: int) -> QPolynomial:
    """a_d (a_d - 1) ... (a_d - count + 1), memoized across cycle types."""
    if count == 0:
        return QPolynomial({0: 1})
    return _falling_product(d, count - 1) * (closed_point_count(d) - (count - 1))


def twisted_count_config_p1(n: int, mu) -> QPolynomial:
    """Fixed points of (sigma o Frobenius) on ordered n-point configurations of P^1.

    For sigma of cycle type mu, the count is prod_d d^{c_d} a_d (a_d-1) ...
    (a_d - c_d + 1) over cycle lengths d with multiplicity c_d: each d-cycle
    occupies a degree-d closed point (d possible alignments), distinct cycles
    of equal length occupying distinct points.
    """
    mu = canonical_partition(mu)
    if sum(mu) != n:
        raise ValueError(f"cycle type {mu} does not have weight {n}")
    result = QPolynomial({0: 1})
    for d in set(mu):
        c = mu.count(d)
        result = result * QPolynomial({0: d ** c}) * _falling_product(d, c)
    if not result.is_integral():
        raise ArithmeticError(f"twisted count for mu={mu} is not integral: {result!r}")
    return result


# --------------------------------------------------------------------------
# brute-force oracle: explicit Frobenius orbits in small extension fields
# --------------------------------------------------------------------------

def _poly_mul_mod(a, b, modulus, q):
    """Product of coefficient tuples (ascending) reduced mod (modulus, q)."""
    d = len(modulus) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % q
    # reduce: modulus is monic of degree d
    for top in range(len(prod) - 1, d - 1, -1):
        c = prod[top]
        if c:
            prod[top] = 0
            for j in range(d):
                prod[top - d + j] = (prod[top - d + j] - c * modulus[j]) % q
    out = prod[:d]
    out += [0] * (d - len(out))
    return tuple(out)


def _find_irreducible(d: int, q: int):
    """Monic irreducible polynomial of degree d over F_q, coefficients ascending."""
    if d == 1:
        return (0, 1)

    def is_irreducible(poly):
        # trial division by all monic polynomials of degree <= d/2
        for deg in range(1, d // 2 + 1):
            for tail in _tuples(deg, q):
                divisor = tail + (1,)
                if _poly_remainder_zero(poly, divisor, q):
                    return False
        return True

    for tail in _tuples(d, q):
        poly = tail + (1,)
        if is_irreducible(poly):
            return poly
    raise RuntimeError(f"no irreducible polynomial of degree {d} over F_{q}")


def _tuples(length, q):
    if length == 0:
        yield ()
        return
    for rest in _tuples(length - 1, q):
        for c in range(q):
            yield rest + (c,)


def _poly_remainder_zero(a, b, q):
    a = list(a)
    db = len(b) - 1
    inv_lead = pow(b[-1], -1, q)
    for top in range(len(a) - 1, db - 1, -1):
        c = a[top]
        if c:
            f = c * inv_lead % q
            for j in range(db + 1):
                a[top - db + j] = (a[top - db + j] - f * b[j]) % q
    return not any(a)


@lru_cache(maxsize=None)
def _closed_point_orbits(d: int, q: int):
    """Frobenius orbits of size exactly d on P^1(F_{q^d}), each verified.

    Returns the number of orbits.  Each orbit is walked explicitly: we check
    that the Frobenius x -> x^q returns to the start after exactly d steps.
    """
    modulus = _find_irreducible(d, q)
    # Frobenius is F_q-linear; precompute images of the basis 1, x, ..., x^{d-1}
    x = tuple(1 if i == 1 else 0 for i in range(max(d, 2)))[:d] if d > 1 else (1,)
    if d == 1:
        # P^1(F_q): every point is its own orbit
        return q + 1

    def frob_basis():
        images = []
        xq = (1,) + (0,) * (d - 1)
        for _ in range(q):  # x^q = x * x * ... (q times) -- q is small here
            xq = _poly_mul_mod(xq, x, modulus, q)
        power = (1,) + (0,) * (d - 1)
        for i in range(d):
            images.append(power)
            power = _poly_mul_mod(power, xq, modulus, q)
        # images[i] = (x^q)^i = (x^i)^q since Frobenius is a ring map
        return images

    images = frob_basis()

    def frob(elem):
        out = [0] * d
        for i, coeff in enumerate(elem):
            if coeff:
                img = images[i]
                for j in range(d):
                    out[j] = (out[j] + coeff * img[j]) % q
        return tuple(out)

    seen = set()
    orbits = 0
    for elem in _tuples(d, q):
        if elem in seen:
            continue
        orbit = [elem]
        current = frob(elem)
        while current != elem:
            orbit.append(current)
            current = frob(current)
        for pt in orbit:
            seen.add(pt)
        if len(orbit) == d:
            orbits += 1
    # the point at infinity is Frobenius-fixed, so it never has orbit size d >= 2
    return orbits


def brute_twisted_count(n: int, mu, q: int, max_points: int = 2 ** 20) -> int:
    """Count (sigma o Frobenius)-fixed ordered configurations by direct orbit search.

    Independent of the closed product formula: extension fields are built
    explicitly, orbits enumerated, and cycle-to-orbit assignments counted by
    recursion over the cycles, d alignments per cycle of length d (verified
    by the explicit orbit walk).
    """
    mu = canonical_partition(mu)
    if sum(mu) != n:
        raise ValueError(f"cycle type {mu} does not have weight {n}")
    if n > 6:
        raise ValueError("brute enumeration supports n <= 6 only")
    if q > 11:
        raise ValueError("brute enumeration supports q <= 11 only")
    if n == 0:
        return 1
    lcm = math.lcm(*mu)
    if q ** lcm > max_points:
        raise ResourceGuardError(
            f"q^lcm(mu) = {q}^{lcm} exceeds the enumeration budget {max_points}"
        )
    available = {d: _closed_point_orbits(d, q) for d in set(mu)}
    used = dict.fromkeys(available, 0)

    def assign(cycles):
        if not cycles:
            return 1
        d = cycles[0]
        free = available[d] - used[d]
        if free <= 0:
            return 0
        used[d] += 1
        rest = assign(cycles[1:])
        used[d] -= 1
        return d * free * rest

    return assign(list(mu))


# --------------------------------------------------------------------------
# equivariant layers
# --------------------------------------------------------------------------

@dataclass
class EquivariantPoincare:
    """Cohomology layers of M_{0,n}: layer i is the S_n-character of H^i."""

    n: int
    layers: dict

    def layer_count(self) -> int:
        return len(self.layers)


def default_cache_dir() -> Path:
    env = os.environ.get("HYPERSTAB_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "hyperstab"


def _cache_path(cache_dir, n: int) -> Path:
    base = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    return base / f"m0n_{n}.json"


def _save_cache(path: Path, ep: EquivariantPoincare) -> None:
    payload = {
        "n": str(ep.n),
        "layers": [
            {
                "i": str(i),
                "values": [
                    {"cycle_type": [str(p) for p in mu], "trace": str(trace)}
                    for mu, trace in sorted(layer.values.items(), reverse=True)
                ],
            }
            for i, layer in sorted(ep.layers.items())
        ],
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            json.dump(payload, handle, indent=1)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_cache(path: Path, n: int) -> EquivariantPoincare:
    payload = json.loads(path.read_text())
    if int(payload["n"]) != n:
        raise ValueError(f"cache file {path} is for n={payload['n']}, not {n}")
    layers = {}
    for entry in payload["layers"]:
        i = int(entry["i"])
        values = {
            tuple(int(p) for p in item["cycle_type"]): int(item["trace"])
            for item in entry["values"]
        }
        layers[i] = CharacterVector(n, values)
    _validate_layers(n, layers, source=str(path))
    return EquivariantPoincare(n=n, layers=layers)


def _validate_layers(n: int, layers: dict, source: str) -> None:
    if set(layers) != set(range(n - 2)):
        raise ValueError(
            f"{source}: expected layers 0..{n - 3}, found {sorted(layers)}"
        )
    if layers[0] != CharacterVector.trivial(n):
        raise ValueError(f"{source}: layer 0 is not the trivial character")


@lru_cache(maxsize=None)
def equivariant_poincare_m0n(n: int, cache_dir=None) -> EquivariantPoincare:
    """S_n-equivariant cohomology layers of M_{0,n}.

    For each cycle type mu, the twisted configuration count N_mu(q) is divided
    exactly by #PGL_2(F_q) = q^3 - q; writing the quotient as
    sum_i (-1)^i tr(sigma | H^i) q^{(n-3)-i} recovers each layer's character.
    Results are cached on disk (one JSON file per n, integers as decimal
    strings) under `cache_dir`, the HYPERSTAB_CACHE directory, or
    ~/.cache/hyperstab, in that order of preference.
    """
    if n < 3:
        raise ValueError("n must be >= 3")
    path = _cache_path(cache_dir, n)
    if path.exists():
        return _load_cache(path, n)
    pgl2 = QPolynomial({3: 1, 1: -1})
    traces = {i: {} for i in range(n - 2)}
    for mu in partitions(n):
        quotient = twisted_count_config_p1(n, mu).divide_exact(pgl2)
        if quotient.degree() > n - 3 or not quotient.is_integral():
            raise ArithmeticError(
                f"quotient for mu={mu} is not a valid trace polynomial: {quotient!r}"
            )
        for i in range(n - 2):
            value = quotient.coefficient(n - 3 - i)
            traces[i][mu] = -value if i % 2 else value
    layers = {i: CharacterVector(n, values) for i, values in traces.items()}
    _validate_layers(n, layers, source=f"computed layers for n={n}")
    ep = EquivariantPoincare(n=n, layers=layers)
    _save_cache(path, ep)
    return ep
