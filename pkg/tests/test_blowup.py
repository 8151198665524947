"""Tests for the blow-up multiplicity simulator."""

import random
from fractions import Fraction

import pytest

from slopelab.blowup import (
    BlowupStep,
    ComponentKind,
    blow_up,
    chain_from_script,
    initial_state,
    report_to_dict,
    report_to_text,
    verify_inequality,
)
from slopelab.errors import ScriptError
from slopelab.randomgen import random_chain

F = Fraction


def origin_blowup_state():
    # Z = div(x1 x2) with a = (1,1); S = 2 D1 + 3 D2.
    state = initial_state(2, [1, 1], [2, 3], "toric")
    return blow_up(state, BlowupStep(center=("D1", "D2")))


def test_origin_blowup_multiplicities():
    state = origin_blowup_state()
    new = state.components[-1]
    assert new.kind is ComponentKind.EXCEPTIONAL
    assert new.ray == (1, 1)
    assert new.vZ == 2  # toric valuation of x1*x2 along (1,1)
    assert new.vS == 5
    assert state.degS == 5
    report = verify_inequality(state)
    assert report.ok
    row = next(r for r in report.rows if r.id == new.id)
    assert row.bound == 10 and row.margin == 5


def test_base_case_rows_hold_initially():
    state = initial_state(2, [1, 2], [F(1, 2), 3], "toric")
    report = verify_inequality(state)
    assert report.ok
    for row in report.rows:
        if row.checked:
            assert row.vS <= state.degS * row.vZ


def test_center_meeting_only_one_component():
    # Abstract center with alpha = (1, 0) and all eps zero.
    state = initial_state(2, [2, 1], [0, 3], "abstract")
    out = blow_up(state, BlowupStep(alpha=(1, 0), epsS=(), epsE=()))
    new = out.components[-1]
    assert new.vZ == 2  # a_1 * alpha_1
    assert new.vS == 0


def test_second_blowup_follows_recursion():
    state = origin_blowup_state()
    # Center {E1, D1}: vZ(P') = vZ(E1) + a_1, vS(P') = vS(E1) + r_1.
    out = blow_up(state, BlowupStep(center=("E1", "D1")))
    first = state.components[-1]
    new = out.components[-1]
    assert new.ray == (2, 1)
    assert new.vZ == first.vZ + 1
    assert new.vS == first.vS + 2
    assert verify_inequality(out).ok


def test_toric_rejects_inadmissible_centers():
    state = initial_state(2, [1, 0], [2, 3], "toric")
    with pytest.raises(ScriptError, match="condition \\(i\\)"):
        blow_up(state, BlowupStep(center=("D2",)))
    with pytest.raises(ScriptError, match="condition \\(ii\\)"):
        blow_up(state, BlowupStep(center=("D1",)))
    with pytest.raises(ScriptError, match="unknown component"):
        blow_up(state, BlowupStep(center=("D1", "D9")))
    # After subdividing at {D1, D2}, the pair (D1, D2) is no longer a cone.
    once = blow_up(state, BlowupStep(center=("D1", "D2")))
    with pytest.raises(ScriptError, match="condition \\(iii\\)"):
        blow_up(once, BlowupStep(center=("D1", "D2")))


def test_abstract_rejects_bad_incidences():
    state = initial_state(2, [1, 1], [2, 0], "abstract")
    with pytest.raises(ScriptError, match="condition \\(i\\)"):
        blow_up(state, BlowupStep(alpha=(0, 0)))
    with pytest.raises(ScriptError, match="one incidence per strict-Z"):
        blow_up(state, BlowupStep(alpha=(1,)))
    with pytest.raises(ScriptError, match="0 or 1"):
        # D1 carries S (r_1 = 2 > 0): its incidence must stay within {0, 1}.
        blow_up(state, BlowupStep(alpha=(2, 0)))
    # A pure strict-Z component (r = 0) may have incidence > 1.
    out = blow_up(state, BlowupStep(alpha=(0, 2)))
    assert out.components[-1].vZ == 2
    with pytest.raises(ScriptError, match="in \\{0, 1\\}"):
        blow_up(out, BlowupStep(alpha=(1, 0), epsE=(2,)))


def test_exceptional_components_accumulate_and_keep_values():
    state = initial_state(3, [1, 1, 1], [1, 0, 2], "toric")
    s1 = blow_up(state, BlowupStep(center=("D1", "D2")))
    v1 = s1.components[-1]
    s2 = blow_up(s1, BlowupStep(center=("E1", "D3")))
    assert s2.components[-1].id == "E2"
    # Strict transforms and older exceptional components keep their values.
    assert s2.components[s1.components.index(v1)].vZ == v1.vZ
    assert [c.id for c in s2.components] == ["D1", "D2", "D3", "E1", "E2"]
    assert verify_inequality(s2).ok


def test_toric_valuation_linearity_on_deeper_chains():
    # v_E(x^m) = <ray_E, m> for every component of every random toric chain.
    rng = random.Random(51)
    for _ in range(30):
        state = random_chain(rng, mode="toric", max_steps=5)
        for comp in state.components:
            assert comp.vZ == sum(x * a for x, a in zip(comp.ray, state.z_vector))
            assert comp.vS == sum((Fraction(x) * r for x, r in
                                   zip(comp.ray, state.s_vector)), Fraction(0))


def test_random_chains_never_violate_the_inequality():
    rng = random.Random(52)
    for _ in range(120):
        state = random_chain(rng)
        report = verify_inequality(state)
        assert report.ok, report_to_text(report)


def test_smooth_fan_invariant_unimodular_cones():
    # Every maximal cone of every toric chain stays unimodular.
    def det(mat):
        mat = [row[:] for row in mat]
        n = len(mat)
        result = 1
        for col in range(n):
            pivot = next((r for r in range(col, n) if mat[r][col]), None)
            if pivot is None:
                return 0
            if pivot != col:
                mat[col], mat[pivot] = mat[pivot], mat[col]
                result = -result
            for r in range(col + 1, n):
                while mat[r][col]:
                    q = mat[r][col] // mat[col][col]
                    if q:
                        mat[r] = [x - q * y for x, y in zip(mat[r], mat[col])]
                    if mat[r][col]:
                        mat[col], mat[r] = mat[r], mat[col]
                        result = -result
            result *= mat[col][col]
        return result

    rng = random.Random(53)
    for _ in range(20):
        state = random_chain(rng, mode="toric", max_steps=4)
        fan = state.fan
        for cone in fan.max_cones:
            rays = [list(fan.rays[i]) for i in sorted(cone)]
            assert abs(det(rays)) == 1


# ---------------------------------------------------------------------------
# Scripts.
# ---------------------------------------------------------------------------

def test_abstract_step_defaults_missing_eps_to_zero():
    state = initial_state(2, [1, 1], [2, 0], "abstract")
    out = blow_up(state, BlowupStep(alpha=(1, 1)))
    new = out.components[-1]
    assert new.vZ == 2
    assert new.vS == 2  # only D1's r contributes, through its alpha


def test_empty_script_gives_initial_state():
    state = chain_from_script({"dim": 2, "Z": {"a": [1, 1]},
                               "S": {"r": ["2", "3"]}, "mode": "toric",
                               "steps": []})
    assert state.steps_applied == 0
    assert [c.id for c in state.components] == ["D1", "D2"]


def test_one_step_script_matches_directly_built_state():
    script = {"dim": 2, "Z": {"a": [1, 1]}, "S": {"r": ["2", "3"]},
              "mode": "toric", "steps": [{"center": ["D1", "D2"]}]}
    assert chain_from_script(script) == origin_blowup_state()


def test_script_errors_cite_the_step_index():
    script = {"dim": 2, "Z": {"a": [1, 0]}, "S": {"r": ["2", "3"]},
              "mode": "toric",
              "steps": [{"center": ["D1", "D2"]}, {"center": ["D2", "E1"]}]}
    with pytest.raises(ScriptError, match="step 2.*condition \\(i\\)"):
        chain_from_script(script)


def test_abstract_script_round_trip():
    script = {"dim": 3, "Z": {"a": [1, 2, 0]}, "S": {"r": ["1/2", "0", "3"]},
              "mode": "abstract",
              "steps": [{"alpha": [1, 0], "epsS": [1], "epsE": []},
                        {"alpha": [0, 2], "epsS": [0], "epsE": [1]}]}
    state = chain_from_script(script)
    assert state.steps_applied == 2
    e1, e2 = state.components[-2], state.components[-1]
    assert e1.vZ == 1 and e1.vS == F(1, 2) + 3
    assert e2.vZ == 4 + e1.vZ and e2.vS == e1.vS
    report = report_to_dict(verify_inequality(state))
    assert report["ok"] is True
    assert report["degS"] == "7/2"


def test_report_text_mentions_violations_loudly():
    state = origin_blowup_state()
    text = report_to_text(verify_inequality(state))
    assert "inequality: OK" in text
    assert "E1" in text and "deg S = 5" in text
