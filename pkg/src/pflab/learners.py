"""Learner strategies.

Every learner here is a pure function of the observation stream it has been
fed (plus fixed construction-time configuration), which the test suite checks
by replay. Deterministic learners answer labels; randomized learners answer
exact rational measures.
"""

from __future__ import annotations

from fractions import Fraction

from .engine import CollectionEngine
from .errors import EmptyConsistentSet, SpecError
from .game import Feedback, GameSpec, Learner, build_admissible_collections
from .measures import Measure
from .setsystems import iter_bits


def _plurality_label(spec: GameSpec, x: int) -> int:
    """Label output by the most hypotheses at ``x``, lowest on ties."""
    H = spec.hypotheses
    if H.kind == "all_functions":
        # Every label is taken by exactly |Y|^(n-1) functions: all tied.
        return 0
    counts = [0] * spec.n_labels
    for h in range(H.size):
        counts[H.value(h, x)] += 1
    best = max(counts)
    return counts.index(best)


class VersionSpacePruningLearner(Learner):
    """Keeps the surviving admissible collections; predicts commonly-valid labels.

    Predicts a label lying in every surviving collection's image at the shown
    instance when one exists (lowest such label), else the plurality label
    over the whole hypothesis class. Each reveal prunes the survivors to the
    collections whose image contains it.

    Two interchangeable representations: the explicit mode enumerates the
    admissible collections once and prunes a list; the implicit mode, used
    when the set system is the bounded family of all nonempty sets up to size
    K with K at least the horizon, never materializes the collections. In
    that regime a collection survives iff it covers every reveal so far, so
    the commonly-valid labels at x are exactly the values forced by some
    reveal whose entire realizer set agrees at x; with no reveals yet, the
    labels all hypotheses agree on.
    """

    def __init__(self, spec: GameSpec | None = None):
        self._spec = spec

    def begin(self, spec: GameSpec) -> None:
        self._spec = spec
        system = spec.set_system
        # The covering characterization behind the implicit mode is sound for
        # label reveals only; full-set reveals pin images exactly, which the
        # implicit state cannot express, so set-valued games enumerate.
        self._implicit = (
            system.kind == "bounded"
            and system.max_size >= spec.horizon
            and spec.feedback is not Feedback.SET_VALUED
        )
        self._pending_x = None
        self._reveals = []
        if self._implicit:
            self._realizers = []
        else:
            self._collections = build_admissible_collections(spec)
            self._alive = list(range(len(self._collections)))

    # -- prediction -------------------------------------------------------

    def predict(self, x: int):
        self._pending_x = x
        common = self._common_labels(x)
        if common:
            return min(common)
        return _plurality_label(self._spec, x)

    def _common_labels(self, x: int):
        spec = self._spec
        if not self._implicit:
            mask = (1 << spec.n_labels) - 1
            for cid in self._alive:
                mask &= self._collections[cid].images[x]
                if not mask:
                    break
            return list(iter_bits(mask))
        H = spec.hypotheses
        if not self._reveals:
            if H.kind == "all_functions":
                return []
            first = H.value(0, x)
            if all(H.value(h, x) == first for h in range(H.size)):
                return [first]
            return []
        out = set()
        for (xk, yk), realizers in zip(self._reveals, self._realizers):
            if H.kind == "all_functions":
                if xk == x:
                    out.add(yk)
                continue
            vals = {H.value(h, x) for h in realizers}
            if len(vals) == 1:
                out.add(next(iter(vals)))
        return sorted(out)

    # -- observations -----------------------------------------------------

    def observe(self, y: int) -> None:
        x = self._pending_x
        self._reveals.append((x, y))
        if self._implicit:
            H = self._spec.hypotheses
            if H.kind == "all_functions":
                self._realizers.append(None)
                return
            realizers = frozenset(h for h in range(H.size) if H.value(h, x) == y)
            if not realizers:
                raise EmptyConsistentSet(
                    f"no hypothesis outputs the revealed label {y} at instance {x}"
                )
            self._realizers.append(realizers)
            return
        self._alive = [
            cid for cid in self._alive if (self._collections[cid].images[x] >> y) & 1
        ]
        if not self._alive:
            raise EmptyConsistentSet(
                "every admissible collection is inconsistent with the reveals"
            )

    def observe_set(self, mask: int) -> None:
        x = self._pending_x
        if self._implicit:
            # Under set-valued feedback the revealed set pins images exactly;
            # remember its lowest label as the consistency anchor.
            self._reveals.append((x, min(iter_bits(mask))))
            H = self._spec.hypotheses
            if H.kind == "all_functions":
                self._realizers.append(None)
                return
            realizers = frozenset(
                h for h in range(H.size) if (mask >> H.value(h, x)) & 1
            )
            if not realizers:
                raise EmptyConsistentSet("no hypothesis lands in the revealed set")
            self._realizers.append(realizers)
            return
        self._alive = [
            cid for cid in self._alive if self._collections[cid].images[x] == mask
        ]
        if not self._alive:
            raise EmptyConsistentSet(
                "every admissible collection is inconsistent with the revealed sets"
            )


def cvsp_learner(spec: GameSpec) -> VersionSpacePruningLearner:
    """Collection version-space pruning: common-label first, plurality fallback."""
    return VersionSpacePruningLearner(spec)


class PotentialMinimizingLearner(Learner):
    """Predicts the label minimizing the worst continuation value.

    At each round, for every candidate label, takes the worst over feasible
    reveals of the exact game value from the updated state, and predicts the
    argmin (lowest label on ties). Guarantees at most the depth-T game value
    in total mistakes. When the value computation blows its node budget for
    some candidate, that candidate is scored by the deterministic upper bound
    (max surviving score plus remaining depth) instead; the guarantee then
    degrades gracefully and the choice stays deterministic. A budget of zero
    skips the recursion entirely and plays the bound-guided rule, which keeps
    large games affordable.
    """

    def __init__(self, spec: GameSpec | None = None, potential_budget: int | None = None):
        self._spec = spec
        self._budget = potential_budget

    def begin(self, spec: GameSpec) -> None:
        self._spec = spec
        self._collections = build_admissible_collections(spec)
        self._engine = CollectionEngine(
            spec, self._collections, kind="label", budget=self._budget
        )
        self._alive, self._scores = self._engine.initial_state()
        self._round = 0
        self._pending = None

    def predict(self, x: int) -> int:
        child_depth = max(self._spec.horizon - self._round - 1, 0)
        worsts = self._engine.edge_worst_values(
            self._alive, self._scores, x, child_depth, on_budget="bound"
        )
        best = min(worsts)
        yhat = worsts.index(best)
        self._pending = (x, yhat)
        return yhat

    def observe(self, y: int) -> None:
        x, yhat = self._pending
        self._alive, self._scores = self._engine.update(
            self._alive, self._scores, x, yhat, y
        )
        if not self._alive:
            raise EmptyConsistentSet(
                "every admissible collection is inconsistent with the reveals"
            )
        self._round += 1

    def observe_set(self, mask: int) -> None:
        raise SpecError("this strategy consumes label reveals, not revealed sets")

    def current_potential(self) -> int:
        """Exact game value of the current state over the remaining rounds."""
        depth = max(self._spec.horizon - self._round, 0)
        return self._engine.value(self._alive, self._scores, depth)


def dpfla_learner(spec: GameSpec, potential_budget: int | None = None) -> PotentialMinimizingLearner:
    """Mistake-optimal deterministic play via the exact value recursion."""
    return PotentialMinimizingLearner(spec, potential_budget=potential_budget)


class FixedScaleMeasureLearner(Learner):
    """Plays the grid measure minimizing the worst thresholded continuation.

    The candidate measures are scanned in the grid's canonical order and the
    first minimizer wins. Event counts accumulate against the measures this
    learner actually played, at the configured threshold.
    """

    mode = "randomized"

    def __init__(self, spec: GameSpec, gamma, g: int | None = None, budget: int | None = None):
        self._gamma = Fraction(gamma)
        if not 0 <= self._gamma <= 1:
            raise SpecError(f"gamma must lie in [0, 1], got {self._gamma}")
        self._grid = g
        self._budget = budget

    def begin(self, spec: GameSpec) -> None:
        self._spec = spec
        self._collections = build_admissible_collections(spec)
        self._engine = CollectionEngine(
            spec,
            self._collections,
            kind="measure",
            gamma=self._gamma,
            grid=self._grid,
            budget=self._budget,
        )
        self._alive, self._scores = self._engine.initial_state()
        self._round = 0
        self._pending = None

    def predict(self, x: int) -> Measure:
        child_depth = max(self._spec.horizon - self._round - 1, 0)
        worsts = self._engine.edge_worst_values(self._alive, self._scores, x, child_depth)
        best = min(worsts)
        edge = worsts.index(best)
        self._pending = (x, edge)
        return self._engine.edges[edge]

    def observe(self, y: int) -> None:
        x, edge = self._pending
        self._alive, self._scores = self._engine.update(
            self._alive, self._scores, x, edge, y
        )
        if not self._alive:
            raise EmptyConsistentSet(
                "every admissible collection is inconsistent with the reveals"
            )
        self._round += 1

    def observe_set(self, mask: int) -> None:
        raise SpecError("this strategy consumes label reveals, not revealed sets")


def frpfl_learner(spec: GameSpec, gamma, g: int | None = None) -> FixedScaleMeasureLearner:
    """Fixed-threshold randomized play over the measure grid."""
    return FixedScaleMeasureLearner(spec, gamma, g=g)


class MultiScaleMeasureLearner(Learner):
    """Runs one fixed-scale scorer per threshold and arbitrates with msp.

    Scale i uses threshold 1/2^i. All scales share one version space and the
    history of actually-played measures; they differ only in how rounds are
    thresholded into events. Each round every scale proposes its measure and
    the selection procedure picks which proposal is played.
    """

    mode = "randomized"

    def __init__(self, spec: GameSpec, N: int | None = None, g: int | None = None,
                 budget: int | None = None):
        if N is None:
            T = spec.horizon
            N = max(1, (T - 1).bit_length() + 1) if T > 1 else 1
        if N < 1:
            raise SpecError(f"scale count must be positive, got {N}")
        self._N = N
        self._grid = g
        self._budget = budget

    def begin(self, spec: GameSpec) -> None:
        from .measure_dims import msp

        self._msp = msp
        self._spec = spec
        self._collections = build_admissible_collections(spec)
        self._gammas = [Fraction(1, 2 ** i) for i in range(1, self._N + 1)]
        self._engines = [
            CollectionEngine(
                spec,
                self._collections,
                kind="measure",
                gamma=gm,
                grid=self._grid,
                budget=self._budget,
            )
            for gm in self._gammas
        ]
        alive, scores = self._engines[0].initial_state()
        self._alive = alive
        self._scores = [scores] * self._N
        self._round = 0
        self._pending = None

    def predict(self, x: int) -> Measure:
        child_depth = max(self._spec.horizon - self._round - 1, 0)
        proposals = []
        for eng, scores in zip(self._engines, self._scores):
            worsts = eng.edge_worst_values(self._alive, scores, x, child_depth)
            proposals.append(worsts.index(min(worsts)))
        measures = [self._engines[0].edges[e] for e in proposals]
        m = self._msp(self._N, measures, self._gammas, self._spec.set_system)
        edge = proposals[m - 1]
        self._pending = (x, edge)
        return self._engines[0].edges[edge]

    def observe(self, y: int) -> None:
        x, edge = self._pending
        new_scores = []
        alive = None
        for eng, scores in zip(self._engines, self._scores):
            alive, updated = eng.update(self._alive, scores, x, edge, y)
            new_scores.append(updated)
        self._alive = alive
        self._scores = new_scores
        if not self._alive:
            raise EmptyConsistentSet(
                "every admissible collection is inconsistent with the reveals"
            )
        self._round += 1

    def observe_set(self, mask: int) -> None:
        raise SpecError("this strategy consumes label reveals, not revealed sets")


def mrpfl_learner(spec: GameSpec, N: int | None = None, g: int | None = None) -> MultiScaleMeasureLearner:
    """Multi-threshold randomized play arbitrated by the selection procedure."""
    return MultiScaleMeasureLearner(spec, N=N, g=g)


class TransversalIntersectionLearner(Learner):
    """Round one: uniform over a transversal; then commit to an intersection label.

    After the first reveal, intersects every system set containing it, meets
    that with the transversal, and plays the delta on the lowest surviving
    label forever. An empty meet is reported on the ``empty_intersection``
    attribute and the strategy falls back to the uniform transversal measure.
    """

    mode = "randomized"

    def __init__(self, spec: GameSpec, transversal):
        labels = sorted(set(int(v) for v in transversal))
        if not labels:
            raise SpecError("transversal must be nonempty")
        self._transversal = labels
        self.empty_intersection = False

    def begin(self, spec: GameSpec) -> None:
        self._spec = spec
        for v in self._transversal:
            if not 0 <= v < spec.n_labels:
                raise SpecError(f"transversal label {v} out of range")
        self._committed = None
        self._seen_first = False

    def predict(self, x: int) -> Measure:
        if self._committed is not None:
            return Measure.delta(self._spec.n_labels, self._committed)
        return Measure.uniform_over(self._spec.n_labels, self._transversal)

    def observe(self, y: int) -> None:
        if self._seen_first:
            return
        self._seen_first = True
        system = self._spec.set_system
        meet = (1 << self._spec.n_labels) - 1
        for smask in system.members():
            if (smask >> y) & 1:
                meet &= smask
        pool = [v for v in self._transversal if (meet >> v) & 1]
        if pool:
            self._committed = pool[0]
        else:
            self.empty_intersection = True
            self._committed = None


def helly_intersection_learner(spec: GameSpec, transversal) -> TransversalIntersectionLearner:
    """Transversal-then-intersection play for low-overlap set systems."""
    return TransversalIntersectionLearner(spec, transversal)


class UniformPrefixLearner(Learner):
    """Always plays the uniform measure over the first ``T`` labels."""

    mode = "randomized"

    def __init__(self, T: int):
        if T < 1:
            raise SpecError(f"label count must be positive, got {T}")
        self._T = T

    def begin(self, spec: GameSpec) -> None:
        if self._T > spec.n_labels:
            raise SpecError(
                f"uniform learner over {self._T} labels does not fit a "
                f"{spec.n_labels}-label spec"
            )
        self._measure = Measure.uniform_over(spec.n_labels, range(self._T))

    def predict(self, x: int) -> Measure:
        return self._measure


def uniform_cube_learner(T: int) -> UniformPrefixLearner:
    """Uniform randomization over a prefix alphabet of T labels."""
    return UniformPrefixLearner(T)


class ConstantLearner(Learner):
    """Predicts one fixed label every round."""

    def __init__(self, label: int):
        self._label = int(label)

    def begin(self, spec: GameSpec) -> None:
        if not 0 <= self._label < spec.n_labels:
            raise SpecError(f"constant label {self._label} out of range")

    def predict(self, x: int) -> int:
        return self._label


class ScriptedLearner(Learner):
    """Plays a fixed prediction sequence, one entry per round."""

    def __init__(self, labels):
        self._labels = [int(v) for v in labels]

    def begin(self, spec: GameSpec) -> None:
        self._i = 0

    def predict(self, x: int) -> int:
        y = self._labels[self._i]
        self._i += 1
        return y


class FirstSetReadingLearner(Learner):
    """Under set-valued feedback: echo the lowest label of the first revealed set.

    Predicts a fixed fallback label until the first set arrives, then locks
    onto that set's lowest label for every later round.
    """

    def __init__(self, fallback: int = 0):
        self._fallback = int(fallback)

    def begin(self, spec: GameSpec) -> None:
        self._locked = None

    def predict(self, x: int) -> int:
        if self._locked is not None:
            return self._locked
        return self._fallback

    def observe_set(self, mask: int) -> None:
        if self._locked is None:
            self._locked = min(iter_bits(mask))


def _required(params: dict, key: str, name: str):
    try:
        return params.pop(key)
    except KeyError:
        raise SpecError(f"strategy {name!r} requires parameter {key!r}") from None


def make_learner(name: str, params: dict, spec: GameSpec) -> Learner:
    """Instantiate a learner by registry name with config-file parameters."""
    params = dict(params or {})
    if name == "cvsp":
        built = cvsp_learner(spec)
    elif name == "dpfla":
        built = dpfla_learner(spec, potential_budget=params.pop("budget", None))
    elif name == "frpfl":
        built = frpfl_learner(spec, _required(params, "gamma", name), g=params.pop("g", None))
    elif name == "mrpfl":
        built = mrpfl_learner(spec, N=params.pop("N", None), g=params.pop("g", None))
    elif name == "helly_intersection":
        built = helly_intersection_learner(spec, _required(params, "transversal", name))
    elif name == "uniform_cube":
        built = uniform_cube_learner(int(params.pop("T", spec.horizon)))
    elif name == "constant":
        built = ConstantLearner(params.pop("label", 0))
    elif name == "scripted":
        built = ScriptedLearner(_required(params, "labels", name))
    elif name == "first_round_read":
        built = FirstSetReadingLearner(params.pop("fallback", 0))
    else:
        raise SpecError(f"unknown learner name {name!r}")
    if params:
        raise SpecError(f"unused learner parameters {sorted(params)} for {name!r}")
    return built
