"""Newton-polygon slope oracle for linear differential operators.

This is an independent route to the slope multiset: it never touches the
elementary-module representation, only the valuations of the operator's
coefficients, and is used to cross-check the calculus.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

LaurentPoly = Mapping[int, Fraction]


def _valuation(coeff: LaurentPoly) -> int | None:
    exps = [e for e, c in coeff.items() if c]
    return min(exps) if exps else None


def slopes_from_operator(
        coeffs: Iterable[tuple[int, LaurentPoly]]) -> dict[Fraction, int]:
    """Slope multiset of the module cut out by sum_i a_i(x) (d/dx)**i.

    Reads the lower boundary of the Newton polygon built on the points
    (i, val(a_i) - i): the horizontal stretch contributes slope 0 with its
    length as multiplicity, and each rising edge contributes its slope with
    multiplicity equal to the edge's horizontal extent.  Rejects the zero
    operator and duplicate orders.
    """
    points: dict[int, int] = {}
    for order, coeff in coeffs:
        if order < 0:
            raise ValueError(f"operator order must be >= 0, got {order}")
        val = _valuation(coeff)
        if val is None:
            continue
        if order in points:
            raise ValueError(f"duplicate coefficient for order {order}")
        points[order] = val - order
    if not points:
        raise ValueError("the zero operator has no slope data")

    pts = sorted(points.items())
    ymin = min(y for _, y in pts)
    istar = max(i for i, y in pts if y == ymin)

    out: dict[Fraction, int] = {}
    if istar > 0:
        out[Fraction(0)] = istar

    right = [(i, y) for i, y in pts if i >= istar]
    hull: list[tuple[int, int]] = []
    for pt in right:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # Drop the middle point unless it makes a strict left turn
            # (keeps the lower convex boundary).
            if (x2 - x1) * (pt[1] - y1) - (y2 - y1) * (pt[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(pt)
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        s = Fraction(y2 - y1, x2 - x1)
        if s <= 0:
            raise AssertionError("polygon edge right of the minimum must rise")
        out[s] = out.get(s, 0) + (x2 - x1)
    return dict(sorted(out.items()))


# ---------------------------------------------------------------------------
# Operator builders for fixtures.  These are independent of the polygon and
# of the module calculus, so comparisons through them are genuine
# cross-checks.
# ---------------------------------------------------------------------------

def compose_operators(a: dict, b: dict) -> dict:
    """Product of differential operators with Laurent coefficients.

    Operators are dicts {order: {exponent: Fraction}}.  Composition moves
    derivatives across powers of x with
    (d/dx)^i . x^n = sum_t C(i,t) n(n-1)...(n-t+1) x^(n-t) (d/dx)^(i-t).
    """
    from math import comb

    out: dict[int, dict[int, Fraction]] = {}
    for i, ai in a.items():
        for j, bj in b.items():
            for n, coeff_b in bj.items():
                falling = Fraction(1)
                for t in range(i + 1):
                    if t > 0:
                        falling *= n - (t - 1)
                    scale = comb(i, t) * falling
                    if scale == 0:
                        continue
                    row = out.setdefault(i - t + j, {})
                    for m, coeff_a in ai.items():
                        key = m + n - t
                        row[key] = row.get(key, Fraction(0)) + coeff_a * coeff_b * scale
    return {k: {e: c for e, c in v.items() if c} for k, v in out.items()
            if any(v.values())}


def exp_twist_operator(m: int, c: Fraction = Fraction(0)) -> dict:
    """Annihilator of x^c exp(x^-m): x^(m+1) d/dx - (c x^m - m); slope m."""
    if m < 1:
        raise ValueError("pole order must be >= 1")
    return {1: {m + 1: Fraction(1)}, 0: {m: -Fraction(c), 0: Fraction(m)}}


def euler_operator(c: Fraction = Fraction(0)) -> dict:
    """x d/dx - c, the rank-1 regular operator with exponent c; slope 0."""
    return {1: {1: Fraction(1)}, 0: {0: -Fraction(c)}}
