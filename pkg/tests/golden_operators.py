"""Shared golden operator fixtures: products of first-order pieces with
known slope content, used by the polygon tests and the acceptance suite."""

from fractions import Fraction

from slopelab.elementary import elementary, regular_module
from slopelab.newton_polygon import (
    compose_operators,
    euler_operator,
    exp_twist_operator,
)

F = Fraction

# Each entry: (first-order factors, the module with the same slope content).
GOLDEN_FIXTURES = [
    ([("exp", 1, F(0)), ("exp", 1, F(0))],
     elementary(1, {-1: 1}, rank=2)),
    ([("exp", 1, F(0)), ("reg", F(1, 2))],
     elementary(1, {-1: 1}) + regular_module(1)),
    ([("exp", 2, F(0)), ("reg", F(0))],
     elementary(1, {-2: 1}) + regular_module(1)),
    ([("exp", 3, F(1, 2)), ("exp", 1, F(0))],
     elementary(1, {-3: 1}) + elementary(1, {-1: 1})),
    ([("reg", F(0)), ("reg", F(1, 3))],
     regular_module(2)),
    ([("exp", 2, F(0)), ("exp", 2, F(1, 2))],
     elementary(1, {-2: 1}, rank=2)),
    ([("exp", 4, F(0)), ("reg", F(2))],
     elementary(1, {-4: 1}) + regular_module(1)),
    ([("exp", 5, F(0)), ("exp", 2, F(0)), ("reg", F(0))],
     elementary(1, {-5: 1}) + elementary(1, {-2: 1}) + regular_module(1)),
    ([("exp", 1, F(0)), ("exp", 2, F(0)), ("exp", 3, F(0))],
     elementary(1, {-1: 1}) + elementary(1, {-2: 1}) + elementary(1, {-3: 1})),
    ([("reg", F(1, 2)), ("exp", 6, F(0))],
     regular_module(1) + elementary(1, {-6: 1})),
]


def build_operator(factors):
    op = None
    for spec in factors:
        piece = (exp_twist_operator(spec[1], spec[2]) if spec[0] == "exp"
                 else euler_operator(spec[1]))
        op = piece if op is None else compose_operators(op, piece)
    return sorted(op.items())
