import pytest
from hypothesis import given, strategies as st

from pflab import (
    SetSystem,
    SpecError,
    helly_number,
    inseparability_report,
    labels_of,
    mask_of,
    nested_empty_chain,
)


def test_mask_round_trip():
    assert mask_of([0, 2, 5]) == 0b100101
    assert labels_of(0b100101) == (0, 2, 5)
    assert labels_of(0) == ()


def test_explicit_rejects_bad_sets():
    with pytest.raises(SpecError):
        SetSystem.explicit(2, [])
    with pytest.raises(SpecError):
        SetSystem.explicit(2, [0])  # empty set
    with pytest.raises(SpecError):
        SetSystem.explicit(2, [0b100])  # label out of range


def test_bounded_kind_membership():
    sys4 = SetSystem.all_nonempty_up_to(4, 2)
    assert sys4.contains(0b0011)
    assert sys4.contains(0b1000)
    assert not sys4.contains(0b0111)
    assert sys4.kind == "bounded"
    assert len(sys4.members()) == 4 + 6


def test_full_power_set():
    sysf = SetSystem.full_power_set(3)
    assert len(sysf.members()) == 7
    assert sysf.contains(0b111)


def test_helly_number_worked_cases():
    # three pairwise-overlapping sets with empty total intersection
    triple = SetSystem.explicit(6, [mask_of([0, 1, 3]), mask_of([2, 3, 5]), mask_of([1, 4, 5])])
    assert helly_number(triple) == 3
    # single set: no empty-intersection subfamily at all
    assert helly_number(SetSystem.explicit(2, [0b11])) == 1
    # two disjoint singletons
    assert helly_number(SetSystem.explicit(2, [0b01, 0b10])) == 2


def test_helly_of_bounded_singletons():
    assert helly_number(SetSystem.all_nonempty_up_to(3, 1)) == 2


def test_nested_empty_chain_is_none_on_valid_systems():
    triple = SetSystem.explicit(6, [mask_of([0, 1, 3]), mask_of([2, 3, 5]), mask_of([1, 4, 5])])
    assert nested_empty_chain(triple) is None
    assert nested_empty_chain(SetSystem.explicit(2, [0b11, 0b01])) is None


def test_inseparability_report_vacuous():
    rep = inseparability_report(SetSystem.explicit(2, [0b11]), 1)
    assert rep["condition1_holds"] is True
    assert rep["condition2_holds"] is True
    assert rep["helly"] == 1
    assert rep["truncated"] is False


def test_inseparability_report_triple():
    triple = SetSystem.explicit(6, [mask_of([0, 1, 3]), mask_of([2, 3, 5]), mask_of([1, 4, 5])])
    rep = inseparability_report(triple, 3)
    assert rep["condition1_holds"] is False
    assert rep["condition2_holds"] is True
    assert not inseparability_report(triple, 2)["condition2_holds"]
    with pytest.raises(SpecError):
        inseparability_report(triple, 0)


def test_truncated_flag_passthrough():
    rep = inseparability_report(SetSystem.explicit(2, [0b01, 0b10]), 2, truncated=True)
    assert rep["truncated"] is True


def test_union_closed_and_singletons():
    s = SetSystem.explicit(2, [0b01, 0b10, 0b11])
    assert s.union_closed()
    assert s.singletons_included()
    assert not SetSystem.explicit(2, [0b01, 0b10]).union_closed()
    assert not SetSystem.explicit(3, [0b011, 0b110]).singletons_included()
    assert SetSystem.all_nonempty_up_to(3, 2).singletons_included()


@st.composite
def small_systems(draw):
    n = draw(st.integers(min_value=2, max_value=4))
    universe = list(range(1, 1 << n))
    masks = draw(st.lists(st.sampled_from(universe), min_size=1, max_size=5, unique=True))
    return SetSystem.explicit(n, sorted(masks))


@given(small_systems())
def test_helly_at_most_set_count(system):
    assert 1 <= helly_number(system) <= len(system.members())


@given(small_systems())
def test_minimal_condition2_witness_is_the_helly_number(system):
    h = helly_number(system)
    assert inseparability_report(system, h)["condition2_holds"]
    # whenever some subfamily has empty intersection, h is minimal
    members = system.members()
    full_inter = members[0]
    for m in members[1:]:
        full_inter &= m
    has_empty = any(
        _subfamily_empty(members, size) for size in range(1, len(members) + 1)
    ) if full_inter == 0 else False
    if full_inter == 0 and h > 1:
        assert not inseparability_report(system, h - 1)["condition2_holds"]
    if full_inter != 0:
        assert h == 1
        assert has_empty is False


def _subfamily_empty(members, size):
    from itertools import combinations

    for combo in combinations(members, size):
        inter = combo[0]
        for m in combo[1:]:
            inter &= m
        if inter == 0:
            return True
    return False
