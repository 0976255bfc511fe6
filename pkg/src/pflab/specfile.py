"""Game description files.

A game lives in a YAML mapping with a fixed key set:

labels: 2                 # alphabet size
instances: 1              # instance count
set_system:               # list of label lists, or a bounded-family shorthand
  - [0]
  - [1]
hypotheses:               # list of rows (one label per instance), or shorthand
  - [0]
  - [1]
horizon: 3
protocol:                 # optional block, defaults shown
  feedback: partial
  visibility: oblivious
  realizability: set_realizable
grid: 12                  # optional measure denominator
learner:                  # optional strategy block for `play`
  name: cvsp
  params: {}
adversary:                # optional strategy block for `play`
  name: optimal
  params: {}

Shorthands: ``set_system: {all_nonempty_up_to: K}`` for the bounded family,
``set_system: {full_power_set: true}`` for all nonempty sets, and
``hypotheses: {all_functions: true}`` for the complete function class.
Unknown keys anywhere are rejected, never ignored.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import yaml

from .errors import SpecFileError
from .game import GameSpec, HypothesisClass
from .setsystems import SetSystem

_TOP_KEYS = {
    "labels",
    "instances",
    "set_system",
    "hypotheses",
    "horizon",
    "protocol",
    "grid",
    "learner",
    "adversary",
}
_PROTOCOL_KEYS = {"feedback", "visibility", "realizability"}
_STRATEGY_KEYS = {"name", "params"}


@dataclass(frozen=True)
class SpecDocument:
    """A parsed game file: the game itself plus optional strategy blocks."""

    spec: GameSpec
    source: str = "<inline>"
    learner: Optional[dict] = None
    adversary: Optional[dict] = None


def _fail(source: str, message: str) -> SpecFileError:
    return SpecFileError(f"{source}: {message}")


def _require_int(source: str, data: dict, key: str, minimum: int) -> int:
    if key not in data:
        raise _fail(source, f"missing required key {key!r}")
    v = data[key]
    if not isinstance(v, int) or isinstance(v, bool):
        raise _fail(source, f"{key} must be an integer, got {v!r}")
    if v < minimum:
        raise _fail(source, f"{key} must be at least {minimum}, got {v}")
    return v


def _parse_set_system(source: str, raw, n_labels: int) -> SetSystem:
    if isinstance(raw, dict):
        extra = set(raw) - {"all_nonempty_up_to", "full_power_set"}
        if extra or len(raw) != 1:
            raise _fail(source, f"unrecognized set_system shorthand {sorted(raw)}")
        if "all_nonempty_up_to" in raw:
            k = raw["all_nonempty_up_to"]
            if not isinstance(k, int) or isinstance(k, bool):
                raise _fail(source, "all_nonempty_up_to takes an integer")
            return SetSystem.all_nonempty_up_to(n_labels, k)
        if raw["full_power_set"] is not True:
            raise _fail(source, "full_power_set only accepts true")
        return SetSystem.full_power_set(n_labels)
    if not isinstance(raw, list):
        raise _fail(source, "set_system must be a list of label lists or a shorthand map")
    for s in raw:
        if not isinstance(s, list) or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in s
        ):
            raise _fail(source, f"set_system entries must be lists of integers, got {s!r}")
    return SetSystem.explicit(n_labels, raw)


def _parse_hypotheses(source: str, raw, n_instances: int, n_labels: int) -> HypothesisClass:
    if isinstance(raw, dict):
        if set(raw) != {"all_functions"} or raw["all_functions"] is not True:
            raise _fail(source, f"unrecognized hypotheses shorthand {sorted(raw)}")
        return HypothesisClass.all_functions(n_instances, n_labels)
    if not isinstance(raw, list):
        raise _fail(source, "hypotheses must be a list of rows or {all_functions: true}")
    for r in raw:
        if not isinstance(r, list) or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in r
        ):
            raise _fail(source, f"hypothesis rows must be lists of integers, got {r!r}")
    return HypothesisClass.explicit(n_instances, n_labels, raw)


def _parse_strategy(source: str, raw, block: str) -> dict:
    if not isinstance(raw, dict):
        raise _fail(source, f"{block} must be a map with name and params")
    extra = set(raw) - _STRATEGY_KEYS
    if extra:
        raise _fail(source, f"unknown {block} keys {sorted(extra)}")
    name = raw.get("name")
    if not isinstance(name, str):
        raise _fail(source, f"{block}.name must be a string")
    params = raw.get("params", {})
    if params is None:
        params = {}
    if not isinstance(params, dict):
        raise _fail(source, f"{block}.params must be a map")
    return {"name": name, "params": params}


def parse_spec_data(data, source: str = "<inline>") -> SpecDocument:
    """Validate a parsed YAML document and build the game it describes."""
    if not isinstance(data, dict):
        raise _fail(source, "the document must be a mapping")
    extra = set(data) - _TOP_KEYS
    if extra:
        raise _fail(source, f"unknown keys {sorted(extra)}")

    n_labels = _require_int(source, data, "labels", 2)
    n_instances = _require_int(source, data, "instances", 1)
    horizon = _require_int(source, data, "horizon", 1)
    grid = data.get("grid", 12)
    if not isinstance(grid, int) or isinstance(grid, bool) or grid < 1:
        raise _fail(source, f"grid must be a positive integer, got {grid!r}")

    if "set_system" not in data:
        raise _fail(source, "missing required key 'set_system'")
    if "hypotheses" not in data:
        raise _fail(source, "missing required key 'hypotheses'")

    protocol = data.get("protocol", {})
    if protocol is None:
        protocol = {}
    if not isinstance(protocol, dict):
        raise _fail(source, "protocol must be a map")
    extra = set(protocol) - _PROTOCOL_KEYS
    if extra:
        raise _fail(source, f"unknown protocol keys {sorted(extra)}")
    for key in _PROTOCOL_KEYS:
        v = protocol.get(key)
        if v is not None and not isinstance(v, str):
            raise _fail(source, f"protocol.{key} must be a string")

    try:
        system = _parse_set_system(source, data["set_system"], n_labels)
        hyps = _parse_hypotheses(source, data["hypotheses"], n_instances, n_labels)
        spec = GameSpec(
            n_instances=n_instances,
            n_labels=n_labels,
            set_system=system,
            hypotheses=hyps,
            horizon=horizon,
            feedback=protocol.get("feedback", "partial"),
            visibility=protocol.get("visibility", "oblivious"),
            realizability=protocol.get("realizability", "set_realizable"),
            measure_grid=grid,
        )
    except SpecFileError:
        raise
    except ValueError as exc:
        raise _fail(source, str(exc)) from exc
    except Exception as exc:
        # Constructor validation errors, re-tagged with the file context.
        raise _fail(source, str(exc)) from exc

    learner = (
        _parse_strategy(source, data["learner"], "learner") if "learner" in data else None
    )
    adversary = (
        _parse_strategy(source, data["adversary"], "adversary")
        if "adversary" in data
        else None
    )
    return SpecDocument(spec=spec, source=source, learner=learner, adversary=adversary)


def load_spec_file(path: str) -> SpecDocument:
    """Load and validate a game file from disk."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise SpecFileError(f"{path}: cannot read file ({exc})") from exc
    except yaml.YAMLError as exc:
        raise SpecFileError(f"{path}: invalid YAML ({exc})") from exc
    return parse_spec_data(data, source=str(path))
