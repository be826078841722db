import pytest
from hypothesis import given, strategies as st

from hallpath import combinatorics as cb
from hallpath.polyrep import (InvalidState, TruncationOverflow, TruncationPolicy, Vect, apply_word,
                              enumerate_states, state)
from hallpath.qtfield import ONE, Q, PointField
from hallpath.words import LevelError, parse_word


def act(text, s, policy=None):
    return apply_word(parse_word(text), Vect.basis(s), policy)


def test_e0_on_empty_partition():
    out = act("1_0 d- d+ 1_0", state("0"))
    assert list(out.terms) == [state("0", [1])]
    assert out.coeff(state("0", [1])) in (ONE, -ONE)


def test_z1_on_single_marked_box():
    s = state("+", [], [(1, 1)])
    assert act("1_1 z1 1_1", s) == Vect.basis(s)


def test_level_mismatch_is_an_error():
    with pytest.raises(LevelError):
        act("1_0 d+ 1_-1", state("0"))


def test_truncation_overflow():
    with pytest.raises(TruncationOverflow):
        act("1_0 d- d+ 1_0", state("0", [2]), TruncationPolicy(2, 3))


def test_invalid_state_rejected():
    with pytest.raises(InvalidState):
        state("+", [1], [(3, 3)])


def test_enumeration_counts():
    assert len(enumerate_states(0, 5)) == sum(len(cb.partitions_of(n)) for n in range(6))
    # level-1 plus states are (lambda, one addable box) with |lambda| + 1 <= N
    n1 = sum(len(cb.addable_boxes(l)) for l in cb.partitions_upto(3))
    assert len(enumerate_states(1, 4)) == n1


plus2 = st.sampled_from(enumerate_states(2, 4))
minus2 = st.sampled_from(enumerate_states(-2, 4))


@given(plus2)
def test_hecke_quadratic_plus(s):
    v = Vect.basis(s)
    lhs = act("1_2 T1 T1 1_2", s)
    rhs = act("1_2 T1 1_2", s).scale(1 - Q) + v.scale(Q)
    assert lhs == rhs


@given(minus2)
def test_hecke_quadratic_minus(s):
    qi = 1 / Q
    lhs = act("1_-2 T1 T1 1_-2", s)
    rhs = act("1_-2 T1 1_-2", s).scale(1 - qi) + Vect.basis(s).scale(qi)
    assert lhs == rhs


@given(plus2)
def test_T_inverse_inverts(s):
    assert act("1_2 T1 Tinv1 1_2", s) == Vect.basis(s)


@given(st.sampled_from(enumerate_states(0, 4)))
def test_point_field_matches_exact(s):
    fld = PointField(3, -2)
    w = parse_word("1_0 d- phi z1 d+ 1_0")
    exact = apply_word(w, Vect.basis(s))
    fast = apply_word(w, Vect.basis(s, fld.one), None, fld)
    assert fast == Vect({k: fld.coerce(c) for k, c in exact.terms.items()}, 0)


def test_vect_json_round_trip():
    v = act("1_0 d- d- d+ d+ 1_0", state("0", [1]))
    assert Vect.from_json(v.to_json()) == v
