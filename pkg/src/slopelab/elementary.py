"""The one-variable calculus of formal meromorphic differential modules.

A module over the formal punctured disc decomposes as a direct sum of
elementary pieces: the pushforward along a degree-p cover u -> u**p = x of an
exponential twist E^phi tensored with a regular part.  This module implements
that calculus exactly: canonical forms, the functorial operations (dual,
pullback, pushforward, tensor), slope multisets, the dimension of nearby
cycles along x**k, and the twisted-vanishing characterization of nearby
slopes together with its witness/exhaustion certificates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Mapping, Optional

from slopelab.errors import FalsificationError
from slopelab.exact_algebra import CycloRat, RamifiedExponent

# Default certification bounds for non-membership exhaustion.
DEFAULT_RAM_BOUND = 12
DEFAULT_ORD_BOUND = 24


# ---------------------------------------------------------------------------
# Regular parts.
# ---------------------------------------------------------------------------

def _normalize_exponent(e) -> Fraction:
    e = Fraction(e)
    return e - (e.numerator // e.denominator)  # residue in [0, 1)


@dataclass(frozen=True)
class RegularPart:
    """A regular module remembered through its rank and exponent multiset.

    Exponents are residues in [0, 1); multiplicities sum to the rank.  Rank 0
    is the zero module and forces an empty multiset.  Unipotent (Jordan)
    structure is deliberately not tracked: no invariant computed by this
    engine can see it.
    """

    exps: tuple[tuple[Fraction, int], ...]

    def __init__(self, exps: Iterable[tuple[Fraction, int]] | Mapping[Fraction, int] = ()):
        items = exps.items() if isinstance(exps, Mapping) else exps
        merged: dict[Fraction, int] = {}
        for e, mult in items:
            if mult < 0:
                raise ValueError("multiplicities must be >= 0")
            if mult == 0:
                continue
            e = _normalize_exponent(e)
            merged[e] = merged.get(e, 0) + mult
        object.__setattr__(self, "exps", tuple(sorted(merged.items())))

    @classmethod
    def of_rank(cls, rank: int, exponent=Fraction(0)) -> "RegularPart":
        if rank < 0:
            raise ValueError("rank must be >= 0")
        return cls({Fraction(exponent): rank} if rank else {})

    @classmethod
    def from_exponents(cls, exponents: Iterable) -> "RegularPart":
        return cls([(Fraction(e), 1) for e in exponents])

    @property
    def rank(self) -> int:
        return sum(m for _, m in self.exps)

    @property
    def is_zero(self) -> bool:
        return not self.exps

    def exponent_list(self) -> list[Fraction]:
        out: list[Fraction] = []
        for e, m in self.exps:
            out.extend([e] * m)
        return out

    def direct_sum(self, other: "RegularPart") -> "RegularPart":
        return RegularPart(self.exps + other.exps)

    def dual(self) -> "RegularPart":
        return RegularPart([(-e, m) for e, m in self.exps])

    def scale_exponents(self, k: int) -> "RegularPart":
        """Pullback along a degree-k cover: exponents multiply by k mod 1."""
        return RegularPart([(k * e, m) for e, m in self.exps])

    def pushforward(self, d: int) -> "RegularPart":
        """Pushforward along a degree-d cover: each exponent e splits into
        the d residues (e + j)/d, and the rank multiplies by d."""
        if d == 1:
            return self
        return RegularPart([((e + j) / d, m) for e, m in self.exps
                            for j in range(d)])

    def tensor(self, other: "RegularPart") -> "RegularPart":
        return RegularPart([(e1 + e2, m1 * m2)
                            for e1, m1 in self.exps for e2, m2 in other.exps])


# ---------------------------------------------------------------------------
# Elementary modules.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ElementaryModule:
    """El(ram, phi, reg): pushforward along u -> u**ram of E^phi tensor reg.

    Instances are always canonical: (ram, phi) is gcd-reduced, phi is the
    distinguished representative of its orbit under u -> zeta_ram * u, and
    the regular part is nonzero.  Construct through :func:`make_elementary`.
    """

    ram: int
    phi: RamifiedExponent
    reg: RegularPart

    @property
    def rank(self) -> int:
        return self.ram * self.reg.rank

    @property
    def slope(self) -> Fraction:
        return Fraction(self.phi.pole_order, self.ram)

    @property
    def is_regular(self) -> bool:
        return self.phi.is_zero

    def sort_key(self):
        return (self.slope, self.ram, self.phi.sort_key(), self.reg.exps)


@lru_cache(maxsize=65536)
def _galois_canonical(ram: int, terms: tuple) -> RamifiedExponent:
    # Distinguished orbit representative under u -> zeta_ram^j * u:
    # lexicographically minimal coefficient sequence, graded by exponent.
    phi = RamifiedExponent(ram, terms)
    if ram == 1 or phi.is_zero:
        return phi
    best = phi
    best_key = phi.sort_key()
    for j in range(1, ram):
        cand = phi.substitute_root(ram, j, 1)
        key = cand.sort_key()
        if key < best_key:
            best, best_key = cand, key
    return best


def make_elementary(ram: int,
                    terms: Mapping[int, CycloRat] | Iterable[tuple[int, CycloRat]],
                    reg: RegularPart) -> Optional[ElementaryModule]:
    """Build the canonical elementary module El(ram, phi, reg).

    `terms` is the principal part expressed in the coordinate of the
    degree-`ram` cover.  Canonicalization does three things: exponents whose
    gcd d is shared with `ram` are rewritten on the degree-(ram/d) subcover
    (with the regular part pushed forward by d, so rank and slope are
    untouched); the Galois-orbit representative of phi is selected; the zero
    module comes back as None.
    """
    if ram < 1:
        raise ValueError(f"ramification index must be >= 1, got {ram}")
    if reg.is_zero:
        return None
    phi = RamifiedExponent(ram, terms)
    d = ram // phi.ram
    if phi.ram * d != ram:
        raise AssertionError("gcd reduction produced a non-divisor ramification")
    phi = _galois_canonical(phi.ram, phi.terms)
    return ElementaryModule(phi.ram, phi, reg.pushforward(d))


def elementary(ram: int, terms, rank: int = 1, exponents=None) -> "FormalModule":
    """Convenience: a one-factor module, e.g. elementary(2, {-3: 1})."""
    reg = (RegularPart.from_exponents(exponents) if exponents is not None
           else RegularPart.of_rank(rank))
    return FormalModule.of([make_elementary(ram, terms, reg)])


def regular_module(rank: int, exponents=None) -> "FormalModule":
    """A purely regular module of the given rank."""
    return elementary(1, {}, rank=rank, exponents=exponents)


# ---------------------------------------------------------------------------
# Formal modules: canonical direct sums of elementary factors.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FormalModule:
    """A finite direct sum of elementary modules in canonical form.

    Factors with isomorphic (ram, phi) are merged by summing their regular
    parts; the empty sum is the zero module.
    """

    factors: tuple[ElementaryModule, ...]

    @staticmethod
    def of(parts: Iterable[Optional[ElementaryModule]]) -> "FormalModule":
        merged: dict[tuple, tuple[int, RamifiedExponent, RegularPart]] = {}
        for f in parts:
            if f is None:
                continue
            key = (f.ram, f.phi)
            if key in merged:
                ram, phi, reg = merged[key]
                merged[key] = (ram, phi, reg.direct_sum(f.reg))
            else:
                merged[key] = (f.ram, f.phi, f.reg)
        factors = [ElementaryModule(ram, phi, reg)
                   for ram, phi, reg in merged.values()]
        factors.sort(key=lambda f: f.sort_key())
        return FormalModule(tuple(factors))

    @staticmethod
    def zero() -> "FormalModule":
        return FormalModule(())

    @property
    def rank(self) -> int:
        return sum(f.rank for f in self.factors)

    @property
    def is_zero(self) -> bool:
        return not self.factors

    def __add__(self, other: "FormalModule") -> "FormalModule":
        if not isinstance(other, FormalModule):
            return NotImplemented
        return FormalModule.of(self.factors + other.factors)


def direct_sum(*modules: FormalModule) -> FormalModule:
    out = FormalModule.zero()
    for m in modules:
        out = out + m
    return out


# ---------------------------------------------------------------------------
# Slope data.
# ---------------------------------------------------------------------------

def slope(factor: ElementaryModule) -> Fraction:
    """Slope of an elementary module: pole order of phi over the ramification."""
    return factor.slope


def slopes(module: FormalModule) -> dict[Fraction, int]:
    """Slope multiset: each factor contributes its slope with multiplicity
    equal to its rank.  Empty for the zero module."""
    out: dict[Fraction, int] = {}
    for f in module.factors:
        out[f.slope] = out.get(f.slope, 0) + f.rank
    return dict(sorted(out.items()))


def irregularity(module: FormalModule) -> Fraction:
    """Sum of slope times multiplicity (the height of the Newton polygon)."""
    return sum((s * m for s, m in slopes(module).items()), Fraction(0))


def regular_rank(module: FormalModule) -> int:
    """Total rank of the slope-0 part."""
    return sum(f.rank for f in module.factors if f.is_regular)


def is_regular(module: FormalModule) -> bool:
    """True iff every factor has zero exponential twist (all slopes 0)."""
    return all(f.is_regular for f in module.factors)


# ---------------------------------------------------------------------------
# Functorial operations.
# ---------------------------------------------------------------------------

def dual(module: FormalModule) -> FormalModule:
    """Factorwise El(p, -phi, reg*), with regular exponents negated mod 1."""
    return FormalModule.of(
        make_elementary(f.ram, {k: -c for k, c in f.phi.terms}, f.reg.dual())
        for f in module.factors)


def pushforward(p: int, module: FormalModule) -> FormalModule:
    """Direct image along x -> x**p: El(q, phi, reg) -> El(p*q, phi, reg).

    Rank multiplies by p and every slope divides by p.
    """
    if p < 1:
        raise ValueError(f"pushforward degree must be >= 1, got {p}")
    if p == 1:
        return module
    return FormalModule.of(
        make_elementary(p * f.ram, dict(f.phi.terms), f.reg)
        for f in module.factors)


def pullback(q: int, module: FormalModule) -> FormalModule:
    """Inverse image along x = v**q.

    Each factor El(p, phi, reg) is pulled to the common cover and split into
    its Galois conjugates: with g = gcd(p, q) it contributes the g factors
    El(p/g, phi(zeta_p^j * w**(q/g)), reg with exponents scaled by q/g).
    Rank is preserved and every slope multiplies by q.
    """
    if q < 1:
        raise ValueError(f"pullback degree must be >= 1, got {q}")
    if q == 1:
        return module
    parts = []
    for f in module.factors:
        parts.extend(_pullback_factor(q, f))
    return FormalModule.of(parts)


@lru_cache(maxsize=131072)
def _pullback_factor(q: int, f: ElementaryModule) -> tuple:
    p = f.ram
    g = gcd(p, q)
    scale = q // g
    reg2 = f.reg.scale_exponents(scale)
    parts = []
    for j in range(g):
        terms = {k * scale: c * CycloRat.zeta(p, j * k)
                 for k, c in f.phi.terms}
        parts.append(make_elementary(p // g, terms, reg2))
    return tuple(parts)


def tensor(left: FormalModule, right: FormalModule) -> FormalModule:
    """Tensor product, bilinear over direct sums.

    For a pair of elementary factors the computation runs on the least
    common cover: with g = gcd(p, q) and L = lcm(p, q), the pair splits into
    the g factors whose exponent is phi(zeta_p^j * w**(q/g)) + psi(w**(p/g))
    and whose regular part is the tensor of the two scaled regular parts.
    Rank is multiplicative.
    """
    parts = []
    for a in left.factors:
        for b in right.factors:
            parts.extend(_tensor_pair(a, b))
    return FormalModule.of(parts)


@lru_cache(maxsize=131072)
def _tensor_pair(a: ElementaryModule, b: ElementaryModule) -> tuple:
    p, q = a.ram, b.ram
    g = gcd(p, q)
    lcm = p * q // g
    qg, pg = q // g, p // g
    reg = a.reg.scale_exponents(qg).tensor(b.reg.scale_exponents(pg))
    base = {k * pg: c for k, c in b.phi.terms}
    parts = []
    for j in range(g):
        terms = dict(base)
        for k, c in a.phi.terms:
            kk = k * qg
            add = c * CycloRat.zeta(p, j * k) if j else c
            prev = terms.get(kk)
            terms[kk] = add if prev is None else prev + add
        parts.append(make_elementary(lcm, terms, reg))
    return tuple(parts)


# ---------------------------------------------------------------------------
# Nearby cycles along x**k and nearby slopes.
# ---------------------------------------------------------------------------

def psi_dim(module: FormalModule, k: int) -> int:
    """Dimension of the nearby cycles of `module` along f = x**k.

    Factors with positive slope contribute nothing; the regular part
    contributes the covering degree k times its rank.  (The engine reads the
    rank of the surviving piece as degree-of-covering times regular rank.)
    """
    if k < 1:
        raise ValueError(f"nearby cycles need k >= 1, got {k}")
    return k * regular_rank(module)


@lru_cache(maxsize=262144)
def _pair_regular_rank(a: ElementaryModule, b: ElementaryModule) -> int:
    # Regular rank of the elementary-pair tensor, by exact cancellation
    # detection only: a conjugate summand is regular iff its exponent sum
    # vanishes identically, in which case it contributes lcm * rkA * rkB.
    p, q = a.ram, b.ram
    g = gcd(p, q)
    lcm = p * q // g
    qg, pg = q // g, p // g
    if Fraction(a.phi.pole_order, p) != Fraction(b.phi.pole_order, q):
        # Different slopes can never cancel; only equal-slope pairs may.
        if a.phi.terms or b.phi.terms:
            return 0
    base = {k * pg: c for k, c in b.phi.terms}
    cancelling = 0
    for j in range(g):
        terms = dict(base)
        for k, c in a.phi.terms:
            kk = k * qg
            add = c * CycloRat.zeta(p, j * k) if j else c
            prev = terms.get(kk)
            terms[kk] = add if prev is None else prev + add
        if all(c.is_zero for c in terms.values()):
            cancelling += 1
    return cancelling * lcm * a.reg.rank * b.reg.rank


def psi_dim_twisted(module: FormalModule, twist: FormalModule, p: int) -> int:
    """psi_dim(tensor(module, pullback(p, twist)), p), computed directly.

    Equivalent to composing the three operations (asserted by the test
    suite), but skips canonicalization: only exact exponent cancellation can
    produce a regular summand, so the regular rank of the tensor is a sum of
    per-pair cancellation counts.
    """
    if p < 1:
        raise ValueError(f"nearby cycles need p >= 1, got {p}")
    total = 0
    for b0 in twist.factors:
        pulled = _pullback_factor(p, b0) if p > 1 else (b0,)
        for b in pulled:
            for a in module.factors:
                total += _pair_regular_rank(a, b)
    return p * total


def witness_twist(module: FormalModule, r: Fraction, p: int) -> FormalModule:
    """A slope-r/p twist N with psi_dim(tensor(module, pullback(p, N)), p) > 0.

    Built by negating the principal part of a slope-r factor and pushing it
    forward by p.  Raises ValueError when no factor has slope r.
    """
    r = Fraction(r)
    if p < 1:
        raise ValueError(f"twist degree must be >= 1, got {p}")
    for f in module.factors:
        if f.slope == r and r > 0:
            return FormalModule.of([make_elementary(
                p * f.ram, {k: -c for k, c in f.phi.terms},
                RegularPart.of_rank(1))])
    raise ValueError(f"no factor of slope {r}")


def nearby_slopes(module: FormalModule, p: int, *, verify: bool = True) -> set[Fraction]:
    """Nearby slopes of `module` along f = x**p.

    The set is {r/p : r a positive slope of the module}, plus 0 exactly when
    the regular part is nonzero.  With verify=True (the default) every
    member is confirmed through the twisted-vanishing equivalence: a witness
    twist is constructed and its nearby-cycle dimension checked positive.
    """
    if p < 1:
        raise ValueError(f"nearby slopes need p >= 1, got {p}")
    out: set[Fraction] = set()
    for s in slopes(module):
        if s > 0:
            out.add(s / p)
    if regular_rank(module) > 0:
        out.add(Fraction(0))
    if verify:
        for r in out:
            twist = (regular_module(1) if r == 0
                     else witness_twist(module, r * p, p))
            if psi_dim_twisted(module, twist, p) <= 0:
                raise FalsificationError(
                    f"witness twist for nearby slope {r} (p={p}) has vanishing "
                    f"nearby cycles; module: {module}")
    return out


# ---------------------------------------------------------------------------
# Certification: bounded exhaustion for non-membership.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WitnessRecord:
    slope: Fraction
    twist: FormalModule
    psi_dimension: int


@dataclass(frozen=True)
class ExhaustionRecord:
    slope: Fraction
    twists_checked: int


@dataclass(frozen=True)
class NearbyCertificate:
    """Audit trail for a nearby-slope computation.

    Members carry an explicit witness twist with its positive nearby-cycle
    dimension; non-members (over the rational grid reachable within the
    ramification and pole-order bounds) carry the number of elementary
    twists of that slope that were checked to give dimension zero.
    """

    p: int
    ram_bound: int
    ord_bound: int
    members: tuple[WitnessRecord, ...]
    nonmembers: tuple[ExhaustionRecord, ...]

    @property
    def slopes(self) -> set[Fraction]:
        return {w.slope for w in self.members}


def candidate_slope_grid(ram_bound: int, ord_bound: int) -> set[Fraction]:
    """All slopes an elementary twist within the bounds can have, plus 0."""
    out = {Fraction(0)}
    for t in range(1, ram_bound + 1):
        for m in range(1, ord_bound + 1):
            out.add(Fraction(m, t))
    return out


@lru_cache(maxsize=4096)
def _generic_twists(r: Fraction, ram_bound: int,
                    ord_bound: int) -> tuple[FormalModule, ...]:
    # Module-independent part of the exhaustion family for slope r.
    twists: list[FormalModule] = []
    seen: set = set()

    def push(m: FormalModule):
        if not m.is_zero and m.factors not in seen:
            seen.add(m.factors)
            twists.append(m)

    if r == 0:
        for e in (Fraction(0), Fraction(1, 2), Fraction(1, 3)):
            push(regular_module(1, exponents=[e]))
        return tuple(twists)

    for t in range(1, ram_bound + 1):
        m = r * t
        if m.denominator != 1 or m > ord_bound:
            continue
        m = int(m)
        push(elementary(t, {-m: 1}))
        push(elementary(t, {-m: -1}))
        if m >= 2:
            push(elementary(t, {-m: 1, -(m - 1): 1}))
    return tuple(twists)


def _twist_templates(r: Fraction, module: FormalModule, p: int,
                     ram_bound: int, ord_bound: int) -> list[FormalModule]:
    """Finite family of elementary twists of slope r used by the exhaustion.

    Cancellation against the module's factors forces a twist's exponent set
    to match a scaled conjugate of a factor exponent exactly, so besides
    generic monomial/binomial coefficients the family includes every
    negated-factor-derived twist of the right slope.
    """
    twists = list(_generic_twists(r, ram_bound, ord_bound))
    seen = {m.factors for m in twists}
    # Derived candidates: these are the only twists that can cancel a factor.
    for f in module.factors:
        if f.slope > 0 and f.slope == r * p:
            cand = witness_twist(FormalModule.of([f]), f.slope, p)
            only = cand.factors[0]
            if (only.ram <= ram_bound and only.phi.pole_order <= ord_bound
                    and cand.factors not in seen):
                seen.add(cand.factors)
                twists.append(cand)
    return twists


def certify_nearby_slopes(module: FormalModule, p: int, *,
                          ram_bound: int = DEFAULT_RAM_BOUND,
                          ord_bound: int = DEFAULT_ORD_BOUND) -> NearbyCertificate:
    """Nearby slopes along x**p with a two-sided certificate.

    Membership of each claimed slope is verified by an explicit witness
    twist; every other slope on the bounded rational grid is certified by
    exhausting the elementary twists of that slope within the bounds and
    checking that each gives vanishing nearby cycles.  A failure on either
    side raises FalsificationError.
    """
    claimed = nearby_slopes(module, p, verify=False)
    members = []
    for r in sorted(claimed):
        twist = regular_module(1) if r == 0 else witness_twist(module, r * p, p)
        dim = psi_dim(tensor(module, pullback(p, twist)), p)
        if dim <= 0:
            raise FalsificationError(
                f"claimed nearby slope {r} (p={p}) has no working witness")
        members.append(WitnessRecord(r, twist, dim))

    nonmembers = []
    for r in sorted(candidate_slope_grid(ram_bound, ord_bound) - claimed):
        checked = 0
        for twist in _twist_templates(r, module, p, ram_bound, ord_bound):
            dim = psi_dim_twisted(module, twist, p)
            if dim != 0:
                raise FalsificationError(
                    f"slope {r} was predicted absent (p={p}) but twist "
                    f"{twist} gives nearby-cycle dimension {dim}")
            checked += 1
        nonmembers.append(ExhaustionRecord(r, checked))
    return NearbyCertificate(p, ram_bound, ord_bound,
                             tuple(members), tuple(nonmembers))
