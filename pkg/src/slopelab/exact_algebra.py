"""Exact scalar arithmetic shared by the whole engine.

Everything here is exact: rationals are `fractions.Fraction` (re-exported as
`Rat`), cyclotomic numbers are stored in the power basis of a primitive root
of unity reduced modulo the cyclotomic polynomial, and ramified principal
parts are finite Laurent tails with cyclotomic coefficients.  No floating
point enters anywhere.

Canonical forms are load-bearing: module isomorphism tests downstream reduce
to structural equality of these values, so every constructor normalizes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd
from typing import Iterable, Mapping, Sequence

Rat = Fraction


def divisors(n: int) -> tuple[int, ...]:
    """All positive divisors of n, ascending."""
    if n <= 0:
        raise ValueError(f"expected a positive integer, got {n}")
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return tuple(small + large[::-1])


# ---------------------------------------------------------------------------
# Cyclotomic polynomials and dense polynomial helpers over the rationals.
# Polynomials are tuples/lists of coefficients, ascending degree.
# ---------------------------------------------------------------------------

def _int_poly_div(num: list[int], den: Sequence[int]) -> list[int]:
    # Exact division of integer polynomials; den is monic.
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        if c:
            out[i - dn] = c
            for j, dj in enumerate(den):
                num[i - dn + j] -= c * dj
    if any(num):
        raise ArithmeticError("non-exact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of the n-th cyclotomic polynomial, ascending, monic."""
    if n < 1:
        raise ValueError(f"cyclotomic polynomial needs n >= 1, got {n}")
    if n == 1:
        return (-1, 1)
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in divisors(n)[:-1]:
        poly = _int_poly_div(poly, cyclotomic_polynomial(d))
    return tuple(poly)


def euler_phi(n: int) -> int:
    return len(cyclotomic_polynomial(n)) - 1


def _reduce_mod_cyclotomic(coeffs: list[Fraction], order: int) -> tuple[Fraction, ...]:
    # Reduce a dense polynomial in zeta_order modulo Phi_order.
    phi = cyclotomic_polynomial(order)
    deg = len(phi) - 1
    res = list(coeffs)
    for i in range(len(res) - 1, deg - 1, -1):
        c = res[i]
        if c:
            res[i] = Fraction(0)
            for j in range(deg):
                if phi[j]:
                    res[i - deg + j] -= c * phi[j]
    res = res[:deg] + [Fraction(0)] * (deg - len(res))
    return tuple(res[:deg])


@lru_cache(maxsize=None)
def _zeta_power_coords(order: int, e: int) -> tuple[Fraction, ...]:
    # Canonical coords of zeta_order**e in the power basis (e taken mod order).
    e %= order
    deg = euler_phi(order)
    if e < deg:
        return tuple(Fraction(1) if i == e else Fraction(0) for i in range(deg))
    coeffs = [Fraction(0)] * e + [Fraction(1)]
    return _reduce_mod_cyclotomic(coeffs, order)


def _solve_columns(cols: Sequence[Sequence[Fraction]],
                   rhs: Sequence[Fraction]) -> list[Fraction] | None:
    # Solve sum_j x_j * cols[j] = rhs exactly; None when inconsistent.
    m, n = len(rhs), len(cols)
    aug = [[cols[j][i] for j in range(n)] + [rhs[i]] for i in range(m)]
    pivots: list[int] = []
    row = 0
    for col in range(n):
        pr = next((r for r in range(row, m) if aug[r][col] != 0), None)
        if pr is None:
            continue
        aug[row], aug[pr] = aug[pr], aug[row]
        pv = aug[row][col]
        aug[row] = [x / pv for x in aug[row]]
        for r in range(m):
            if r != row and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[row])]
        pivots.append(col)
        row += 1
    for r in range(row, m):
        if aug[r][n] != 0:
            return None
    if len(pivots) < n:
        return None
    sol = [Fraction(0)] * n
    for r, c in enumerate(pivots):
        sol[c] = aug[r][n]
    return sol


@lru_cache(maxsize=None)
def _subfield_basis(order: int, d: int) -> tuple[tuple[Fraction, ...], ...]:
    # Power basis of Q(zeta_d) embedded into the order-`order` field.
    step = order // d
    return tuple(_zeta_power_coords(order, j * step) for j in range(euler_phi(d)))


@lru_cache(maxsize=None)
def _fix_subgroup(order: int, d: int) -> tuple[int, ...]:
    # Units k of Z/order with k = 1 mod d; their sigma_k fix Q(zeta_d) pointwise.
    return tuple(k for k in range(2, order)
                 if gcd(k, order) == 1 and k % d == 1)


def _galois_apply(order: int, k: int, coords: Sequence[Fraction]) -> tuple[Fraction, ...]:
    deg = euler_phi(order)
    acc = [Fraction(0)] * deg
    for i, c in enumerate(coords):
        if c:
            for j, b in enumerate(_zeta_power_coords(order, (i * k) % order)):
                if b:
                    acc[j] += c * b
    return tuple(acc)


def _demote(order: int, coords: tuple[Fraction, ...]) -> tuple[int, tuple[Fraction, ...]]:
    # Smallest d | order with the element inside Q(zeta_d), plus its coords there.
    if order == 1:
        return 1, coords
    if all(c == 0 for c in coords[1:]):
        return 1, (coords[0],)
    return _demote_cached(order, coords)


@lru_cache(maxsize=262144)
def _demote_cached(order: int, coords: tuple[Fraction, ...]):
    for d in divisors(order)[:-1]:
        if d == 1:
            continue  # rational values are caught by the fast path
        if any(_galois_apply(order, k, coords) != coords
               for k in _fix_subgroup(order, d)):
            continue
        sol = _solve_columns(_subfield_basis(order, d), coords)
        if sol is None:
            raise AssertionError("Galois-fixed element not in its fixed field")
        return d, tuple(sol)
    return order, coords


def _poly_inverse_mod(coeffs: Sequence[Fraction], phi: Sequence[int]) -> list[Fraction]:
    # Extended Euclid in Q[x]: inverse of coeffs modulo the monic polynomial phi.
    def degree(p):
        for i in range(len(p) - 1, -1, -1):
            if p[i]:
                return i
        return -1

    def mul(a, b):
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] += x * y
        return out

    def sub(a, b):
        out = list(a) + [Fraction(0)] * max(0, len(b) - len(a))
        for i, y in enumerate(b):
            out[i] -= y
        return out

    r0 = [Fraction(c) for c in phi]
    r1 = list(coeffs)
    s0, s1 = [Fraction(0)], [Fraction(1)]
    while degree(r1) > 0:
        d0, d1 = degree(r0), degree(r1)
        if d0 < d1:
            r0, r1, s0, s1 = r1, r0, s1, s0
            continue
        factor = r0[d0] / r1[d1]
        shift = d0 - d1
        q = [Fraction(0)] * shift + [factor]
        r0 = sub(r0, mul(q, r1))
        s0 = sub(s0, mul(q, s1))
        if degree(r0) < degree(r1):
            r0, r1, s0, s1 = r1, r0, s1, s0
    d1 = degree(r1)
    if d1 < 0:
        raise ZeroDivisionError("inverse of zero cyclotomic number")
    lead = r1[0] if d1 == 0 else r1[d1]
    return [c / lead for c in s1]


class CycloRat:
    """An exact element of a cyclotomic number field.

    Stored as (order, coords): coords has length phi(order) and gives the
    element in the power basis of a primitive order-th root of unity, reduced
    modulo the cyclotomic polynomial.  Values are always demoted to the
    smallest cyclotomic subfield containing them, so equality, hashing and
    the total sort order are structural.  Instances are immutable.
    """

    __slots__ = ("order", "coords")

    def __init__(self, order: int, coords: Iterable[Fraction | int], *,
                 _canonical: bool = False):
        coords = tuple(Fraction(c) for c in coords)
        if not _canonical:
            if order < 1:
                raise ValueError(f"field order must be >= 1, got {order}")
            deg = euler_phi(order)
            if len(coords) > deg:
                coords = _reduce_mod_cyclotomic(list(coords), order)
            elif len(coords) < deg:
                coords = coords + (Fraction(0),) * (deg - len(coords))
            order, coords = _demote(order, coords)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coords", coords)

    def __setattr__(self, *_):
        raise AttributeError("CycloRat is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_rational(cls, value) -> "CycloRat":
        return cls(1, (Fraction(value),), _canonical=True)

    @classmethod
    def zeta(cls, n: int, power: int = 1) -> "CycloRat":
        """zeta(n)**power, a primitive n-th root of unity raised to `power`."""
        if n < 1:
            raise ValueError(f"root-of-unity order must be >= 1, got {n}")
        return _zeta_pow(n, power % n)

    # -- coercion -----------------------------------------------------------

    @staticmethod
    def _coerce(value) -> "CycloRat | None":
        if isinstance(value, CycloRat):
            return value
        if isinstance(value, (int, Fraction)):
            return CycloRat.from_rational(value)
        return None

    def _embed(self, order: int) -> tuple[Fraction, ...]:
        # Coords of self inside the (larger, compatible) field of `order`.
        if order == self.order:
            return self.coords
        step = order // self.order
        deg = euler_phi(order)
        acc = [Fraction(0)] * deg
        for i, c in enumerate(self.coords):
            if c:
                for j, b in enumerate(_zeta_power_coords(order, i * step)):
                    if b:
                        acc[j] += c * b
        return tuple(acc)

    # -- predicates & views --------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.order == 1 and self.coords[0] == 0

    @property
    def is_rational(self) -> bool:
        return self.order == 1

    def as_rational(self) -> Fraction:
        if self.order != 1:
            raise ValueError(f"{self!r} is not rational")
        return self.coords[0]

    def sort_key(self):
        """Fixed total order: by field order, then coordinatewise."""
        return (self.order, self.coords)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.order == 1 and other.order == 1:
            return CycloRat(1, (self.coords[0] + other.coords[0],), _canonical=True)
        if other.order == 1:
            # Adding a rational never leaves (or shrinks into) the subfield
            # unless the result collapses entirely; only coords[0] can tell.
            coords = (self.coords[0] + other.coords[0],) + self.coords[1:]
            return CycloRat(self.order, coords, _canonical=True)
        if self.order == 1:
            return other + self
        order = _lcm(self.order, other.order)
        coords = tuple(a + b for a, b in zip(self._embed(order), other._embed(order)))
        order, coords = _demote(order, coords)
        return CycloRat(order, coords, _canonical=True)

    __radd__ = __add__

    def __neg__(self):
        return CycloRat(self.order, tuple(-c for c in self.coords), _canonical=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.order == 1:
            r = other.coords[0]
            if r == 0:
                return _ZERO
            if self.order == 1:
                return CycloRat(1, (self.coords[0] * r,), _canonical=True)
            # Scaling by a nonzero rational preserves the minimal subfield.
            return CycloRat(self.order, tuple(c * r for c in self.coords),
                            _canonical=True)
        if self.order == 1:
            return other * self
        order = _lcm(self.order, other.order)
        a, b = self._embed(order), other._embed(order)
        prod = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        coords = _reduce_mod_cyclotomic(prod, order)
        order, coords = _demote(order, coords)
        return CycloRat(order, coords, _canonical=True)

    __rmul__ = __mul__

    def inverse(self) -> "CycloRat":
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero cyclotomic number")
        if self.order == 1:
            return CycloRat(1, (1 / self.coords[0],), _canonical=True)
        inv = _poly_inverse_mod(self.coords, cyclotomic_polynomial(self.order))
        coords = _reduce_mod_cyclotomic(inv, self.order)
        # The inverse generates the same field: no demotion possible.
        return CycloRat(self.order, coords, _canonical=True)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k == 0:
            return _ONE
        base = self if k > 0 else self.inverse()
        k = abs(k)
        result = None
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- comparison & hashing -------------------------------------------------

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.order == other.order and self.coords == other.coords

    def __hash__(self):
        return hash((self.order, self.coords))

    # -- rendering -------------------------------------------------------------

    def __str__(self):
        if self.order == 1:
            return str(self.coords[0])
        parts = []
        for i, c in enumerate(self.coords):
            if c == 0:
                continue
            if i == 0:
                body = str(abs(c))
            else:
                atom = f"zeta({self.order})" if i == 1 else f"zeta({self.order})^{i}"
                body = atom if abs(c) == 1 else f"{abs(c)}*{atom}"
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"CycloRat({self})"


@lru_cache(maxsize=None)
def _zeta_pow(n: int, e: int) -> CycloRat:
    e %= n
    dense = [Fraction(0)] * e + [Fraction(1)]
    return CycloRat(n, dense)


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


_ZERO = CycloRat(1, (Fraction(0),), _canonical=True)
_ONE = CycloRat(1, (Fraction(1),), _canonical=True)

CYCLO_ZERO = _ZERO
CYCLO_ONE = _ONE


# ---------------------------------------------------------------------------
# Ramified principal parts.
# ---------------------------------------------------------------------------

class RamifiedExponent:
    """A principal-part Laurent tail in a degree-`ram` root u of the base
    coordinate (u**ram = x).

    Only strictly negative powers of u are stored: nonnegative powers are
    dropped at construction, because every invariant computed from an
    exponential twist depends only on the polar part.  The pair
    (ram, exponent set) is reduced by d = gcd(ram, gcd of pole orders) so
    that canonical forms are unique; the zero tail is stored with ram = 1.
    """

    __slots__ = ("ram", "terms")

    def __init__(self, ram: int, terms: Mapping[int, CycloRat] | Iterable[tuple[int, CycloRat]]):
        if ram < 1:
            raise ValueError(f"ramification index must be >= 1, got {ram}")
        items = terms.items() if isinstance(terms, Mapping) else terms
        merged: dict[int, CycloRat] = {}
        for k, c in items:
            if k >= 0:
                continue  # holomorphic truncation
            c = CycloRat._coerce(c)
            if c is None:
                raise TypeError("coefficients must be CycloRat or rational")
            if k in merged:
                c = merged[k] + c
            if c.is_zero:
                merged.pop(k, None)
            else:
                merged[k] = c
        if not merged:
            ram = 1
        else:
            d = reduce(gcd, (abs(k) for k in merged), ram)
            if d > 1:
                ram //= d
                merged = {k // d: c for k, c in merged.items()}
        object.__setattr__(self, "ram", ram)
        object.__setattr__(self, "terms",
                           tuple(sorted(merged.items(), key=lambda kv: kv[0])))

    def __setattr__(self, *_):
        raise AttributeError("RamifiedExponent is immutable")

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def pole_order(self) -> int:
        """ord phi: minus the most negative stored exponent; 0 for the zero tail."""
        return -self.terms[0][0] if self.terms else 0

    def as_dict(self) -> dict[int, CycloRat]:
        return dict(self.terms)

    def substitute(self, zeta: CycloRat, scale: int = 1) -> "RamifiedExponent":
        """phi(zeta * u**scale) in canonical form.

        `zeta` should be a root of unity; each coefficient picks up zeta**k
        and each exponent is multiplied by `scale`.
        """
        if scale < 1:
            raise ValueError(f"scale must be >= 1, got {scale}")
        zeta = CycloRat._coerce(zeta)
        return RamifiedExponent(
            self.ram, {k * scale: c * zeta ** k for k, c in self.terms})

    def substitute_root(self, order: int, j: int, scale: int = 1) -> "RamifiedExponent":
        """Same as substitute(zeta(order)**j, scale), but the root-of-unity
        powers are taken by exponent arithmetic (cheap and cached)."""
        if scale < 1:
            raise ValueError(f"scale must be >= 1, got {scale}")
        return RamifiedExponent(
            self.ram,
            {k * scale: c * _zeta_pow(order, (j * k) % order)
             for k, c in self.terms})

    def __neg__(self):
        return RamifiedExponent(self.ram, {k: -c for k, c in self.terms})

    def sort_key(self):
        return tuple((k, c.sort_key()) for k, c in self.terms)

    def __eq__(self, other):
        if not isinstance(other, RamifiedExponent):
            return NotImplemented
        return self.ram == other.ram and self.terms == other.terms

    def __hash__(self):
        return hash((self.ram, self.terms))

    def __repr__(self):
        if self.is_zero:
            return "RamifiedExponent(1, 0)"
        body = " + ".join(f"({c})*u^{k}" for k, c in self.terms)
        return f"RamifiedExponent({self.ram}, {body})"


def cyclo_mul(a: CycloRat, b: CycloRat) -> CycloRat:
    """Exact product of cyclotomic numbers (operands embed into the field of
    the lcm of their orders)."""
    return a * b


def exponent_substitute(phi: RamifiedExponent, zeta: CycloRat,
                        scale: int = 1) -> RamifiedExponent:
    """Galois twist and cover substitution for principal parts: phi(zeta*u**scale)."""
    return phi.substitute(zeta, scale)


# ---------------------------------------------------------------------------
# Multi-indices.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MultiIndex:
    """A tuple of nonnegative integers, one entry per ambient coordinate."""

    entries: tuple[int, ...]

    def __init__(self, entries: Iterable[int]):
        entries = tuple(int(e) for e in entries)
        if any(e < 0 for e in entries):
            raise ValueError(f"multi-index entries must be >= 0, got {entries}")
        object.__setattr__(self, "entries", entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i: int) -> int:
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    @property
    def support(self) -> tuple[int, ...]:
        """Indices k with a nonzero entry."""
        return tuple(k for k, e in enumerate(self.entries) if e)

    @property
    def is_zero(self) -> bool:
        return not any(self.entries)

    def restrict(self, keep: Iterable[int]) -> "MultiIndex":
        """Zero out every entry whose index is not in `keep`."""
        keep = set(keep)
        return MultiIndex(tuple(e if k in keep else 0
                                for k, e in enumerate(self.entries)))

    def dot(self, weights: Sequence) -> object:
        if len(weights) != len(self.entries):
            raise ValueError("dimension mismatch in dot product")
        return sum(e * w for e, w in zip(self.entries, weights))
