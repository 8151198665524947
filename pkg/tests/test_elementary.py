"""Tests for the one-variable elementary-module calculus."""

import random
from fractions import Fraction

import pytest

from slopelab.elementary import (
    FormalModule,
    RegularPart,
    certify_nearby_slopes,
    dual,
    elementary,
    irregularity,
    is_regular,
    make_elementary,
    nearby_slopes,
    psi_dim,
    pullback,
    pushforward,
    regular_module,
    regular_rank,
    slopes,
    tensor,
    witness_twist,
)
from slopelab.exact_algebra import CycloRat
from slopelab.randomgen import random_formal_module

F = Fraction


# ---------------------------------------------------------------------------
# Canonical forms.
# ---------------------------------------------------------------------------

def test_rank_and_slope_of_elementary_factor():
    m = elementary(2, {-3: 1})
    (f,) = m.factors
    assert f.ram == 2 and f.rank == 2
    assert f.slope == F(3, 2)


def test_ramification_reduction_preserves_rank_and_slope():
    # El(2, u^-2, rank 1) rewrites on the subcover as El(1, u^-1, rank-2 reg).
    m = elementary(2, {-2: 1})
    (f,) = m.factors
    assert f.ram == 1
    assert f.slope == 1
    assert f.rank == 2
    assert f.reg.exps == ((F(0), 1), (F(1, 2), 1))


def test_galois_conjugate_representatives_merge():
    a = elementary(2, {-3: 1})
    b = elementary(2, {-3: -1})  # the zeta_2-conjugate of the same module
    assert a == b
    assert (a + b).factors[0].reg.rank == 2


def test_zero_module_and_rank_zero_regular_part():
    assert FormalModule.zero().is_zero
    assert make_elementary(3, {-1: 1}, RegularPart()) is None
    assert slopes(FormalModule.zero()) == {}
    assert psi_dim(FormalModule.zero(), 2) == 0


# ---------------------------------------------------------------------------
# Slopes, irregularity.
# ---------------------------------------------------------------------------

def test_slope_examples():
    assert slopes(elementary(1, {-3: 1})) == {F(3): 1}
    assert slopes(elementary(2, {-3: 1})) == {F(3, 2): 2}
    assert slopes(regular_module(2)) == {F(0): 2}


def test_slopes_of_direct_sum():
    m = elementary(1, {-3: 1}) + regular_module(2)
    assert slopes(m) == {F(0): 2, F(3): 1}


def test_irregularity_examples():
    assert irregularity(elementary(1, {-3: 1})) == 3
    assert irregularity(elementary(2, {-3: 1})) == 3  # (3/2) * 2
    assert irregularity(regular_module(5)) == 0


# ---------------------------------------------------------------------------
# Dual.
# ---------------------------------------------------------------------------

def test_dual_examples():
    assert dual(elementary(1, {-2: 1})) == elementary(1, {-2: -1})
    reg = regular_module(1, exponents=[F(1, 3)])
    assert dual(reg) == regular_module(1, exponents=[F(2, 3)])


def test_dual_is_an_involution_on_random_modules():
    rng = random.Random(11)
    for _ in range(40):
        m = random_formal_module(rng)
        assert dual(dual(m)) == m
        assert slopes(dual(m)) == slopes(m)


# ---------------------------------------------------------------------------
# Pullback / pushforward.
# ---------------------------------------------------------------------------

def test_pullback_examples():
    assert pullback(2, elementary(1, {-1: 1})) == elementary(1, {-2: 1})
    split = pullback(2, elementary(2, {-1: 1}))
    assert split == elementary(1, {-1: 1}) + elementary(1, {-1: -1})
    reg = regular_module(2, exponents=[F(1, 3), F(1, 2)])
    assert pullback(3, reg) == regular_module(2, exponents=[F(0), F(1, 2)])


def test_pushforward_examples():
    out = pushforward(2, elementary(3, {-1: 1}))
    (f,) = out.factors
    assert f.ram == 6 and f.slope == F(1, 6) and f.rank == 6
    m = elementary(2, {-3: 1}) + regular_module(1)
    assert pushforward(1, m) == m
    assert pushforward(2, regular_module(1)) == regular_module(
        2, exponents=[F(0), F(1, 2)])


def test_pullback_scales_slopes_and_preserves_rank():
    rng = random.Random(12)
    for _ in range(40):
        m = random_formal_module(rng)
        q = rng.randint(1, 6)
        pb = pullback(q, m)
        assert pb.rank == m.rank
        assert slopes(pb) == {q * s: mult for s, mult in slopes(m).items()}


def test_pushforward_divides_slopes_and_multiplies_rank():
    rng = random.Random(13)
    for _ in range(40):
        m = random_formal_module(rng)
        p = rng.randint(1, 6)
        pf = pushforward(p, m)
        assert pf.rank == p * m.rank
        assert slopes(pf) == {s / p: p * mult for s, mult in slopes(m).items()}


# ---------------------------------------------------------------------------
# Tensor.
# ---------------------------------------------------------------------------

def test_tensor_examples():
    a = elementary(1, {-2: 1})
    assert tensor(a, elementary(1, {-2: -1})) == regular_module(1)
    out = tensor(a, elementary(1, {-3: 1}))
    assert out == elementary(1, {-2: 1, -3: 1})
    assert slopes(out) == {F(3): 1}
    twice = tensor(elementary(2, {-1: 1}), elementary(2, {-1: 1}))
    expected = elementary(2, {-1: 2}) + regular_module(
        2, exponents=[F(0), F(1, 2)])
    assert twice == expected


def test_functorial_identities_hold_exactly():
    # Pullback is a tensor functor, both direct/inverse images compose, and
    # the projection formula ties all three operations together.  These
    # relations are sharp consistency checks on the conjugate bookkeeping.
    rng = random.Random(31337)
    for _ in range(60):
        m = random_formal_module(rng, max_factors=2, max_ram=5, max_ord=6)
        n = random_formal_module(rng, max_factors=2, max_ram=5, max_ord=6)
        q = rng.randint(1, 6)
        p = rng.randint(1, 5)
        a, b = rng.randint(1, 4), rng.randint(1, 4)
        assert pullback(q, tensor(m, n)) == tensor(pullback(q, m), pullback(q, n))
        assert pullback(a, pullback(b, m)) == pullback(a * b, m)
        assert pushforward(a, pushforward(b, m)) == pushforward(a * b, m)
        assert dual(tensor(m, n)) == tensor(dual(m), dual(n))
        assert tensor(pushforward(p, m), n) == \
            pushforward(p, tensor(m, pullback(p, n)))


def test_tensor_slopes_obey_the_max_rule():
    # Tensoring factors of distinct slopes yields exactly the larger slope.
    rng = random.Random(313)
    for _ in range(40):
        m = random_formal_module(rng, max_factors=1)
        n = random_formal_module(rng, max_factors=1)
        (sm,) = slopes(m).keys()
        (sn,) = slopes(n).keys()
        if sm == sn:
            continue
        assert set(slopes(tensor(m, n))) == {max(sm, sn)}


def test_tensor_unit_commutativity_associativity():
    rng = random.Random(14)
    unit = regular_module(1)
    for _ in range(15):
        a = random_formal_module(rng, max_factors=2, max_ram=4, max_ord=5)
        b = random_formal_module(rng, max_factors=2, max_ram=4, max_ord=5)
        c = random_formal_module(rng, max_factors=1, max_ram=3, max_ord=4)
        assert tensor(a, unit) == a
        assert tensor(a, b) == tensor(b, a)
        assert tensor(tensor(a, b), c) == tensor(a, tensor(b, c))
        assert tensor(a, b).rank == a.rank * b.rank


# ---------------------------------------------------------------------------
# Nearby cycles and nearby slopes.
# ---------------------------------------------------------------------------

def test_psi_dim_examples():
    assert psi_dim(elementary(1, {-1: 1}, rank=5), 1) == 0
    assert psi_dim(regular_module(2), 3) == 6
    assert psi_dim(regular_module(1) + elementary(1, {-2: 1}), 2) == 2


def test_psi_dim_matches_pushforward_regular_rank():
    # Independent route: psi along x**k equals psi along x of the pushforward.
    rng = random.Random(15)
    for _ in range(40):
        m = random_formal_module(rng)
        k = rng.randint(1, 5)
        assert psi_dim(m, k) == regular_rank(pushforward(k, m))


def test_psi_vanishes_iff_no_regular_part():
    rng = random.Random(16)
    for _ in range(40):
        m = random_formal_module(rng)
        if all(s > 0 for s in slopes(m)):
            assert psi_dim(m, 1) == 0
        if regular_rank(m) > 0:
            assert psi_dim(m, 1) > 0


def test_nearby_slopes_examples():
    assert nearby_slopes(elementary(1, {-3: 1}), 1) == {F(3)}
    assert nearby_slopes(elementary(1, {-3: 1}), 2) == {F(3, 2)}
    for k in (1, 2, 3):
        assert nearby_slopes(regular_module(1), k) == {F(0)}
    # Ramified source, ramified twist: slope 3/2 seen along x^2 is 3/4.
    assert nearby_slopes(elementary(2, {-3: 1}), 2) == {F(3, 4)}


def test_witness_twist_examples():
    m = elementary(1, {-3: 1})
    n = witness_twist(m, F(3), 1)
    assert n == elementary(1, {-3: -1})
    assert psi_dim(tensor(m, pullback(1, n)), 1) == 1

    m2 = elementary(2, {-3: 1})
    n2 = witness_twist(m2, F(3, 2), 1)
    assert n2 == elementary(2, {-3: -1})
    assert slopes(n2) == {F(3, 2): 2}

    m3 = elementary(1, {-2: 1})
    n3 = witness_twist(m3, F(2), 2)
    assert slopes(n3) == {F(1): 2}  # El(2, -u^-2) has slope 1 = r/p
    assert psi_dim(tensor(m3, pullback(2, n3)), 2) > 0


def test_witness_twist_rejects_missing_slope():
    with pytest.raises(ValueError, match="no factor of slope"):
        witness_twist(elementary(1, {-3: 1}), F(2), 1)


def test_every_positive_slope_has_a_working_witness():
    rng = random.Random(17)
    for _ in range(30):
        m = random_formal_module(rng)
        for p in (1, 2, 3):
            for s in slopes(m):
                if s > 0:
                    n = witness_twist(m, s, p)
                    assert psi_dim(tensor(m, pullback(p, n)), p) > 0


def test_nearby_slopes_dual_invariance():
    rng = random.Random(18)
    for _ in range(25):
        m = random_formal_module(rng)
        for p in (1, 2, 3):
            assert nearby_slopes(dual(m), p) == nearby_slopes(m, p)


def test_pushforward_nearby_inclusion_is_equality_here():
    rng = random.Random(19)
    for _ in range(25):
        m = random_formal_module(rng)
        for p in (1, 2, 3, 4):
            lhs = nearby_slopes(pushforward(p, m), 1)
            rhs = nearby_slopes(m, p)
            assert lhs <= rhs
            assert lhs == rhs  # observed equality in this calculus


def test_is_regular_examples_and_characterization():
    assert is_regular(regular_module(3))
    assert not is_regular(elementary(2, {-1: 1}))
    assert not is_regular(regular_module(1) + elementary(1, {-4: 1}))
    rng = random.Random(20)
    for _ in range(25):
        m = random_formal_module(rng)
        max_slope = max(slopes(m), default=F(0))
        reg = is_regular(m)
        assert reg == (max_slope == 0) or m.is_zero
        for p in (1, 2, 3):
            assert reg == (nearby_slopes(m, p) <= {F(0)})


def test_certificate_members_and_nonmembers():
    m = elementary(2, {-3: 1}) + regular_module(1)
    cert = certify_nearby_slopes(m, 1, ram_bound=6, ord_bound=8)
    assert cert.slopes == {F(0), F(3, 2)}
    assert all(w.psi_dimension > 0 for w in cert.members)
    checked = {rec.slope for rec in cert.nonmembers}
    assert F(3, 2) not in checked and F(0) not in checked
    assert F(1) in checked and F(8) in checked
    assert all(rec.twists_checked > 0 for rec in cert.nonmembers)


def test_cyclotomic_coefficients_flow_through_the_calculus():
    z3 = CycloRat.zeta(3)
    m = elementary(3, {-2: z3, -1: 1})
    assert slopes(m) == {F(2, 3): 3}
    n = witness_twist(m, F(2, 3), 1)
    assert psi_dim(tensor(m, pullback(1, n)), 1) > 0
    assert dual(dual(m)) == m
