"""Combinatorial blow-up simulator with total-transform multiplicity tracking.

A state holds the components of the ambient configuration (strict transforms
of the initial coordinate divisors plus the accumulated exceptional
components) together with their multiplicities in the pullbacks of the
function divisor Z and of the weighted divisor S.  Blow-ups only ever append
an exceptional component; existing multiplicities never change.

Two modes:

* toric: centers are cones of the current (smooth, simplicial) fan, the new
  ray is the sum of the center's primitive generators, and every incidence is
  computed from the fan.  The linearity of the toric valuation pairing is
  cross-checked against the recursion on every step.
* abstract: incidences are supplied directly (alpha per strict-Z component in
  N, eps in {0,1} elsewhere), which reproduces the bookkeeping without any
  fan geometry.

The key inequality vS(E) <= deg(S) * vZ(E) is asserted after every step via
the three-line estimate that drives the induction; a violation raises
FalsificationError and is surfaced loudly, never silently.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import gcd
from typing import Mapping, Optional, Sequence

from slopelab.errors import FalsificationError, ScriptError


class ComponentKind(Enum):
    STRICT_Z = "strict-Z"
    STRICT_S = "strict-S"
    EXCEPTIONAL = "exceptional"


@dataclass(frozen=True)
class Component:
    """A divisor component with its multiplicities in the two pullbacks.

    Strict components keep their initial multiplicities forever; exceptional
    components get theirs from the recursion at creation time.  A strict-Z
    component may also carry a positive S-multiplicity (Z and S can share
    components).
    """

    id: str
    kind: ComponentKind
    ray: Optional[tuple[int, ...]]
    vZ: int
    vS: Fraction


@dataclass(frozen=True)
class Fan:
    """A simplicial fan: primitive rays plus its maximal cones (ray-index sets)."""

    rays: tuple[tuple[int, ...], ...]
    max_cones: tuple[frozenset[int], ...]

    def is_cone(self, indices: frozenset[int]) -> bool:
        return any(indices <= cone for cone in self.max_cones)

    def star_subdivide(self, indices: frozenset[int]) -> tuple["Fan", tuple[int, ...]]:
        new_ray = tuple(sum(col) for col in zip(*(self.rays[i] for i in indices)))
        if gcd(*new_ray) != 1:
            raise FalsificationError(
                f"star subdivision produced a non-primitive ray {new_ray}; "
                f"the fan is no longer smooth")
        new_index = len(self.rays)
        cones: list[frozenset[int]] = []
        for cone in self.max_cones:
            if indices <= cone:
                for drop in indices:
                    cones.append((cone - {drop}) | {new_index})
            else:
                cones.append(cone)
        return Fan(self.rays + (new_ray,), tuple(cones)), new_ray


@dataclass(frozen=True)
class BlowupState:
    """Immutable snapshot of a blow-up chain."""

    mode: str  # "toric" | "abstract"
    dim: int
    components: tuple[Component, ...]
    degS: Fraction
    z_vector: tuple[int, ...]
    s_vector: tuple[Fraction, ...]
    fan: Optional[Fan]
    steps_applied: int = 0

    def component(self, cid: str) -> Component:
        for c in self.components:
            if c.id == cid:
                return c
        raise ScriptError(f"unknown component id {cid!r}")

    def by_kind(self, kind: ComponentKind) -> tuple[Component, ...]:
        return tuple(c for c in self.components if c.kind == kind)


@dataclass(frozen=True)
class BlowupStep:
    """A single blow-up: a toric center (component ids spanning a fan cone)
    or explicit abstract incidences."""

    center: Optional[tuple[str, ...]] = None
    alpha: Optional[tuple[int, ...]] = None
    epsS: Optional[tuple[int, ...]] = None
    epsE: Optional[tuple[int, ...]] = None

    @property
    def is_toric(self) -> bool:
        return self.center is not None


@dataclass(frozen=True)
class ReportRow:
    id: str
    kind: ComponentKind
    ray: Optional[tuple[int, ...]]
    vZ: int
    vS: Fraction
    bound: Fraction
    margin: Fraction
    checked: bool


@dataclass(frozen=True)
class InequalityReport:
    degS: Fraction
    rows: tuple[ReportRow, ...]
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def initial_state(dim: int, z_mult: Sequence[int], s_mult: Sequence,
                  mode: str = "toric") -> BlowupState:
    """Starting configuration: the coordinate hyperplanes D1..Dn carrying the
    Z-multiplicities a_i and S-multiplicities r_i."""
    if mode not in ("toric", "abstract"):
        raise ScriptError(f"mode must be 'toric' or 'abstract', got {mode!r}")
    if dim < 1:
        raise ScriptError(f"dimension must be >= 1, got {dim}")
    if len(z_mult) != dim or len(s_mult) != dim:
        raise ScriptError("Z and S multiplicity vectors must have length dim")
    a = tuple(int(v) for v in z_mult)
    r = tuple(Fraction(v) for v in s_mult)
    if any(v < 0 for v in a) or any(v < 0 for v in r):
        raise ScriptError("multiplicities must be nonnegative")
    if not any(a):
        raise ScriptError("Z must be a nonempty divisor (some a_i > 0)")
    comps = []
    for i in range(dim):
        ray = tuple(1 if j == i else 0 for j in range(dim)) if mode == "toric" else None
        kind = ComponentKind.STRICT_Z if a[i] > 0 else ComponentKind.STRICT_S
        comps.append(Component(f"D{i + 1}", kind, ray, a[i], r[i]))
    fan = None
    if mode == "toric":
        fan = Fan(tuple(c.ray for c in comps), (frozenset(range(dim)),))
    return BlowupState(mode, dim, tuple(comps), sum(r, Fraction(0)), a, r, fan)


# ---------------------------------------------------------------------------
# The update rule.
# ---------------------------------------------------------------------------

def _check_induction_chain(state: BlowupState, weighted_alpha: Fraction,
                           s_incidence: Fraction, eps_vZ: Fraction,
                           eps_vS: Fraction, vZ_new: Fraction,
                           vS_new: Fraction) -> None:
    # The three-line estimate behind the induction, asserted verbatim:
    #   degS*(sum a_i alpha_i + sum eps_E vZ(E)) >= degS + degS*sum eps_E vZ(E)
    #                                            >= sum r_j eps_j + degS*sum eps_E vZ(E)
    #                                            >= sum r_j eps_j + sum eps_E vS(E)
    degS = state.degS
    lhs = degS * (weighted_alpha + eps_vZ)
    mid1 = degS + degS * eps_vZ
    mid2 = s_incidence + degS * eps_vZ
    rhs = s_incidence + eps_vS
    if not (lhs >= mid1 >= mid2 >= rhs):
        raise FalsificationError(
            f"induction chain failed: {lhs} >= {mid1} >= {mid2} >= {rhs} "
            f"(degS={degS})")
    if not (vZ_new == weighted_alpha + eps_vZ and vS_new == rhs):
        raise FalsificationError("recursion bookkeeping disagrees with the chain")


def _new_exceptional_id(state: BlowupState) -> str:
    count = sum(1 for c in state.components if c.kind is ComponentKind.EXCEPTIONAL)
    return f"E{count + 1}"


def _blow_up_toric(state: BlowupState, step: BlowupStep) -> BlowupState:
    ids = step.center or ()
    if len(set(ids)) != len(ids) or not ids:
        raise ScriptError("toric center must be a nonempty set of distinct ids")
    comps = {c.id: i for i, c in enumerate(state.components)}
    try:
        indices = frozenset(comps[cid] for cid in ids)
    except KeyError as exc:
        raise ScriptError(f"unknown component id {exc.args[0]!r}")
    center = [state.components[i] for i in sorted(indices)]

    # (i): the center must lie in the strict transform of Z.
    z_members = [c for c in center if c.kind is ComponentKind.STRICT_Z]
    if not z_members:
        raise ScriptError(
            "inadmissible center: it misses the strict transform of Z "
            "(condition (i): no alpha_i > 0)")
    # (ii): nowhere dense in it, i.e. never a whole strict-Z component.
    if len(center) == 1:
        raise ScriptError(
            "inadmissible center: equal to a strict-Z component "
            "(condition (ii): nowhere dense)")
    # (iii): normal crossing, encoded as membership in the current fan.
    assert state.fan is not None
    if not state.fan.is_cone(indices):
        raise ScriptError(
            "inadmissible center: the rays do not span a cone of the current "
            "fan (condition (iii))")

    weighted_alpha = Fraction(sum(c.vZ for c in z_members))
    s_incidence = sum((c.vS for c in center
                       if c.kind is not ComponentKind.EXCEPTIONAL), Fraction(0))
    eps_vZ = Fraction(sum(c.vZ for c in center
                          if c.kind is ComponentKind.EXCEPTIONAL))
    eps_vS = sum((c.vS for c in center
                  if c.kind is ComponentKind.EXCEPTIONAL), Fraction(0))
    vZ_new = weighted_alpha + eps_vZ
    vS_new = s_incidence + eps_vS

    fan, new_ray = state.fan.star_subdivide(indices)

    # Valuation linearity: the new ray's multiplicities must equal the
    # pairing of the ray with the original multiplicity vectors.
    pair_z = sum(n * m for n, m in zip(new_ray, state.z_vector))
    pair_s = sum((Fraction(n) * m for n, m in zip(new_ray, state.s_vector)),
                 Fraction(0))
    if pair_z != vZ_new or pair_s != vS_new:
        raise FalsificationError(
            f"toric valuation pairing disagrees with the recursion: "
            f"ray {new_ray} gives ({pair_z}, {pair_s}), recursion gives "
            f"({vZ_new}, {vS_new})")

    _check_induction_chain(state, weighted_alpha, s_incidence, eps_vZ, eps_vS,
                           vZ_new, vS_new)

    new_comp = Component(_new_exceptional_id(state), ComponentKind.EXCEPTIONAL,
                         new_ray, int(vZ_new), vS_new)
    return BlowupState(state.mode, state.dim, state.components + (new_comp,),
                       state.degS, state.z_vector, state.s_vector, fan,
                       state.steps_applied + 1)


def _blow_up_abstract(state: BlowupState, step: BlowupStep) -> BlowupState:
    strict_z = state.by_kind(ComponentKind.STRICT_Z)
    strict_s = state.by_kind(ComponentKind.STRICT_S)
    exceptional = state.by_kind(ComponentKind.EXCEPTIONAL)

    alpha = tuple(step.alpha or ())
    epsS = tuple(step.epsS if step.epsS is not None else (0,) * len(strict_s))
    epsE = tuple(step.epsE if step.epsE is not None else (0,) * len(exceptional))
    if len(alpha) != len(strict_z):
        raise ScriptError(
            f"alpha must list one incidence per strict-Z component "
            f"({len(strict_z)} expected, {len(alpha)} given)")
    if len(epsS) != len(strict_s):
        raise ScriptError(
            f"epsS must list one flag per strict-S component "
            f"({len(strict_s)} expected, {len(epsS)} given)")
    if len(epsE) != len(exceptional):
        raise ScriptError(
            f"epsE must list one flag per exceptional component "
            f"({len(exceptional)} expected, {len(epsE)} given)")
    if any(a < 0 for a in alpha):
        raise ScriptError("alpha incidences must be nonnegative integers")
    if any(e not in (0, 1) for e in epsS) or any(e not in (0, 1) for e in epsE):
        raise ScriptError("eps incidences must lie in {0, 1}")
    if not any(alpha):
        raise ScriptError(
            "inadmissible center: it misses the strict transform of Z "
            "(condition (i): no alpha_i > 0)")
    for comp, a in zip(strict_z, alpha):
        if comp.vS > 0 and a > 1:
            raise ScriptError(
                f"component {comp.id} also carries S: its incidence must be "
                f"0 or 1, got {a}")

    weighted_alpha = Fraction(sum(c.vZ * a for c, a in zip(strict_z, alpha)))
    s_incidence = (sum((c.vS * a for c, a in zip(strict_z, alpha)), Fraction(0))
                   + sum((c.vS * e for c, e in zip(strict_s, epsS)), Fraction(0)))
    eps_vZ = Fraction(sum(c.vZ * e for c, e in zip(exceptional, epsE)))
    eps_vS = sum((c.vS * e for c, e in zip(exceptional, epsE)), Fraction(0))
    vZ_new = weighted_alpha + eps_vZ
    vS_new = s_incidence + eps_vS

    _check_induction_chain(state, weighted_alpha, s_incidence, eps_vZ, eps_vS,
                           vZ_new, vS_new)

    new_comp = Component(_new_exceptional_id(state), ComponentKind.EXCEPTIONAL,
                         None, int(vZ_new), vS_new)
    return BlowupState(state.mode, state.dim, state.components + (new_comp,),
                       state.degS, state.z_vector, state.s_vector, None,
                       state.steps_applied + 1)


def blow_up(state: BlowupState, step: BlowupStep) -> BlowupState:
    """Apply one admissible blow-up and return the new state.

    Appends the exceptional component P with vZ(P) = sum a_i alpha_i +
    sum eps_E vZ(E) and vS(P) = sum r_j eps_j + sum eps_E vS(E); every
    existing multiplicity is untouched.  Rejects inadmissible centers with a
    ScriptError naming the violated condition.
    """
    if state.mode == "toric":
        if not step.is_toric:
            raise ScriptError("toric states need steps with a 'center'")
        return _blow_up_toric(state, step)
    if step.is_toric:
        raise ScriptError("abstract states need alpha/epsS/epsE steps")
    return _blow_up_abstract(state, step)


def verify_inequality(state: BlowupState) -> InequalityReport:
    """Check vS(E) <= deg(S) * vZ(E) on every component over Z.

    Components with vZ = 0 are reported but not checked (they do not lie over
    the zero locus).  Any violation would falsify the engine's bookkeeping
    and is listed explicitly.
    """
    rows = []
    violations = []
    for c in state.components:
        bound = state.degS * c.vZ
        margin = bound - c.vS
        checked = c.vZ > 0
        rows.append(ReportRow(c.id, c.kind, c.ray, c.vZ, c.vS, bound, margin,
                              checked))
        if checked and margin < 0:
            violations.append(c.id)
    return InequalityReport(state.degS, tuple(rows), tuple(violations))


# ---------------------------------------------------------------------------
# Scripts.
# ---------------------------------------------------------------------------

def step_from_dict(data: Mapping, mode: str) -> BlowupStep:
    if mode == "toric":
        if "center" not in data:
            raise ScriptError("toric step needs a 'center' list of ids")
        return BlowupStep(center=tuple(str(c) for c in data["center"]))
    return BlowupStep(
        alpha=tuple(int(a) for a in data.get("alpha", ())),
        epsS=tuple(int(e) for e in data["epsS"]) if "epsS" in data else None,
        epsE=tuple(int(e) for e in data["epsE"]) if "epsE" in data else None,
    )


def chain_from_script(script: Mapping) -> BlowupState:
    """Fold blow_up over a script dictionary; deterministic.

    Step rejections are re-raised with the 1-based step index attached.
    """
    try:
        dim = int(script["dim"])
        mode = str(script.get("mode", "toric"))
        z_mult = [int(v) for v in script["Z"]["a"]]
        s_mult = [Fraction(str(v)) for v in script["S"]["r"]]
        raw_steps = list(script.get("steps", ()))
    except (KeyError, TypeError, ValueError) as exc:
        raise ScriptError(f"malformed script: {exc}")
    state = initial_state(dim, z_mult, s_mult, mode)
    for idx, raw in enumerate(raw_steps, start=1):
        try:
            state = blow_up(state, step_from_dict(raw, mode))
        except ScriptError as exc:
            raise ScriptError(str(exc), step=idx) from exc
    return state


def load_script(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def report_to_dict(report: InequalityReport) -> dict:
    return {
        "schema": "1",
        "degS": str(report.degS),
        "ok": report.ok,
        "violations": list(report.violations),
        "components": [
            {"id": row.id, "kind": row.kind.value,
             "ray": list(row.ray) if row.ray is not None else None,
             "vZ": row.vZ, "vS": str(row.vS), "bound": str(row.bound),
             "margin": str(row.margin), "checked": row.checked}
            for row in report.rows
        ],
    }


def report_to_text(report: InequalityReport) -> str:
    lines = [f"deg S = {report.degS}",
             f"{'id':<5} {'kind':<12} {'ray':<14} {'vZ':>4} {'vS':>8} "
             f"{'bound':>8} {'margin':>8}"]
    for row in report.rows:
        ray = "" if row.ray is None else "(" + ",".join(map(str, row.ray)) + ")"
        mark = "" if row.checked else "  (not over Z)"
        lines.append(f"{row.id:<5} {row.kind.value:<12} {ray:<14} {row.vZ:>4} "
                     f"{str(row.vS):>8} {str(row.bound):>8} "
                     f"{str(row.margin):>8}{mark}")
    lines.append("inequality: " + ("OK" if report.ok else
                                   "VIOLATED at " + ", ".join(report.violations)))
    return "\n".join(lines)
