"""YAML game files: parsing, defaults, shorthands, and rejection paths."""

from pathlib import Path

import pytest

from pflab import (
    Feedback,
    Realizability,
    SetSystem,
    SpecFileError,
    Visibility,
    load_spec_file,
    parse_spec_data,
)

SPEC_DIR = Path(__file__).resolve().parent.parent / "specs"

BASE = {
    "labels": 2,
    "instances": 1,
    "set_system": [[0], [1]],
    "hypotheses": [[0], [1]],
    "horizon": 3,
}


def with_updates(**kw):
    data = {k: (dict(v) if isinstance(v, dict) else v) for k, v in BASE.items()}
    data.update(kw)
    return data


def test_sample_specs_load():
    for name in ("two_constant.yaml", "overlap_triple.yaml", "agnostic_coin.yaml"):
        doc = load_spec_file(SPEC_DIR / name)
        assert doc.spec.horizon >= 1
        assert doc.source.endswith(name)
    doc = load_spec_file(SPEC_DIR / "two_constant.yaml")
    assert doc.spec.n_labels == 2
    assert doc.learner == {"name": "cvsp", "params": {}}
    assert doc.adversary == {"name": "optimal", "params": {}}


def test_defaults():
    doc = parse_spec_data(BASE)
    spec = doc.spec
    assert spec.measure_grid == 12
    assert spec.feedback is Feedback.PARTIAL
    assert spec.visibility is Visibility.OBLIVIOUS
    assert spec.realizability is Realizability.SET_REALIZABLE
    assert doc.learner is None
    assert doc.adversary is None


def test_set_system_shorthands():
    bounded = parse_spec_data(with_updates(labels=4, set_system={"all_nonempty_up_to": 2},
                                           hypotheses=[[0]]))
    assert bounded.spec.set_system.kind == "bounded"
    assert len(bounded.spec.set_system.members()) == 10
    full = parse_spec_data(with_updates(labels=3, set_system={"full_power_set": True},
                                        hypotheses=[[0]]))
    assert full.spec.set_system.members() == SetSystem.full_power_set(3).members()


def test_all_functions_shorthand():
    doc = parse_spec_data(with_updates(instances=2, hypotheses={"all_functions": True},
                                       set_system=[[0], [1], [0, 1]]))
    assert doc.spec.hypotheses.size == 4


def test_unknown_keys_rejected():
    with pytest.raises(SpecFileError):
        parse_spec_data(with_updates(extra=1))
    with pytest.raises(SpecFileError):
        parse_spec_data(with_updates(protocol={"feedback": "partial", "mystery": 1}))
    with pytest.raises(SpecFileError):
        parse_spec_data(with_updates(learner={"name": "cvsp", "mystery": 1}))


def test_bad_enums_rejected():
    with pytest.raises(SpecFileError):
        parse_spec_data(with_updates(protocol={"feedback": "telepathic"}))
    with pytest.raises(SpecFileError):
        parse_spec_data(with_updates(protocol={"visibility": "invisible"}))
    with pytest.raises(SpecFileError):
        parse_spec_data(with_updates(protocol={"realizability": "wishful"}))


def test_structural_validation():
    with pytest.raises(SpecFileError):
        parse_spec_data(with_updates(labels="two"))
    with pytest.raises(SpecFileError):
        parse_spec_data(with_updates(horizon=0))
    with pytest.raises(SpecFileError):
        parse_spec_data({k: v for k, v in BASE.items() if k != "labels"})
    with pytest.raises(SpecFileError):
        parse_spec_data(with_updates(set_system=[[0], [7]]))
    with pytest.raises(SpecFileError):
        parse_spec_data(with_updates(hypotheses=[[0], [0]]))  # duplicate rows


def test_strategy_block_shapes():
    doc = parse_spec_data(with_updates(learner={"name": "constant", "params": {"label": 1}}))
    assert doc.learner == {"name": "constant", "params": {"label": 1}}
    with pytest.raises(SpecFileError):
        parse_spec_data(with_updates(learner={"params": {}}))
    with pytest.raises(SpecFileError):
        parse_spec_data(with_updates(adversary="optimal"))


def test_missing_file():
    with pytest.raises(SpecFileError):
        load_spec_file(SPEC_DIR / "no_such_game.yaml")


def test_non_mapping_document(tmp_path):
    p = tmp_path / "list.yaml"
    p.write_text("- 1\n- 2\n")
    with pytest.raises(SpecFileError):
        load_spec_file(p)
    q = tmp_path / "scalar.yaml"
    q.write_text("42\n")
    with pytest.raises(SpecFileError):
        load_spec_file(q)
