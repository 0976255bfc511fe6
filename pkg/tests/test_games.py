"""Prebuilt games and spec families: shapes, protocols, and frozen counts."""

from pflab import (
    Feedback,
    Realizability,
    SetSystem,
    Visibility,
    agnostic_game,
    binary_full_system_family,
    collision_game,
    cube_game,
    helly_game,
    helly_number,
    mistake_bound_family,
    pf_not_sv_game,
    small_binary_family,
    ternary_slice,
)


def test_helly_game_shape():
    spec = helly_game(3)
    assert (spec.n_instances, spec.n_labels, spec.horizon) == (1, 6, 3)
    assert spec.hypotheses.size == 6
    assert helly_number(spec.set_system) == 3
    # each hypothesis is a constant rule
    rows = {spec.hypotheses.value(h, 0) for h in range(6)}
    assert rows == set(range(6))


def test_agnostic_game_shape():
    spec = agnostic_game(6)
    assert spec.realizability is Realizability.EXISTENCE_REALIZABLE
    assert (spec.n_instances, spec.n_labels, spec.horizon) == (6, 2, 6)
    assert spec.hypotheses.size == 2
    assert spec.set_system.singletons_included()


def test_cube_game_shape():
    spec = cube_game(3, 4)
    assert spec.visibility is Visibility.OBLIVIOUS
    assert cube_game(3, 4, visibility="public").visibility is Visibility.PUBLIC
    assert spec.hypotheses.size == 4 ** 3
    # feasible sets exclude exactly one label each
    masks = spec.set_system.members()
    full = (1 << 4) - 1
    assert sorted(masks) == sorted(full ^ (1 << y) for y in range(4))


def test_collision_game_shape():
    spec = collision_game()
    assert (spec.n_instances, spec.n_labels, spec.horizon) == (64, 64, 8)
    assert spec.hypotheses.size == 128
    assert spec.feedback is Feedback.PARTIAL


def test_forcing_game_variants():
    partial = pf_not_sv_game()
    assert partial.feedback is Feedback.PARTIAL
    assert (partial.n_instances, partial.n_labels, partial.horizon) == (6, 66, 6)
    assert partial.hypotheses.size == 128
    sv = pf_not_sv_game(set_valued=True)
    assert sv.feedback is Feedback.SET_VALUED
    assert sv.set_system.members() == partial.set_system.members()


def test_family_sizes_frozen():
    assert len(list(small_binary_family())) == 243
    assert len(list(ternary_slice())) == 168
    assert len(list(mistake_bound_family())) == 88
    assert len(list(binary_full_system_family())) == 218


def test_family_entries_are_named_specs():
    seen = set()
    for slug, spec in small_binary_family(horizons=(1,)):
        assert isinstance(slug, str) and slug
        assert slug not in seen
        seen.add(slug)
        assert spec.n_labels == 2
        assert spec.horizon == 1


def test_full_system_family_uses_every_nonempty_set():
    for _, spec in list(binary_full_system_family())[:10]:
        assert spec.set_system.members() == SetSystem.full_power_set(spec.n_labels).members()
