"""Measure-valued analogues of the mistake dimensions, and the randomized value.

Here the learner's per-round move is an exact rational probability measure
drawn from the denominator-``g`` simplex grid rather than a single label.
Two payoffs share one recursion: the thresholded event count (a round counts
against a collection when the measure puts mass at most ``1 - gamma`` on the
collection's image, with a strict version at ``gamma = 0``) and the exact
expected miss mass. Grid-restricted integers come back as :class:`GridInt`
carrying a caveat flag, since restricting the learner's choices can only
raise a minimax value.
"""

from __future__ import annotations

from fractions import Fraction

from .engine import CollectionEngine, rand_budget
from .errors import EmptyConsistentSet, SpecError
from .game import GameSpec, Realizability, Visibility, build_admissible_collections
from .measures import Measure
from .setsystems import SetSystem


class GridInt(int):
    """An integer computed under a grid-restricted learner.

    ``grid_lower_bound`` is True when the grid restriction applies: the
    exact, unrestricted quantity is then bounded above by this value (the
    restriction shrinks the learner's minimization, never the adversary's
    maximization). Arithmetic degrades to plain int, by design.
    """

    def __new__(cls, value, grid_lower_bound: bool = True):
        obj = super().__new__(cls, value)
        obj.grid_lower_bound = grid_lower_bound
        return obj


def _as_gamma(gamma) -> Fraction:
    gamma = Fraction(gamma)
    if not 0 <= gamma <= 1:
        raise SpecError(f"gamma must lie in [0, 1], got {gamma}")
    return gamma


def pms_dim(
    spec: GameSpec, T: int, gamma, g: int | None = None, budget: int | None = None
) -> GridInt:
    """Largest thresholded-event count forceable in ``T`` rounds on the grid.

    Same game tree as the label-prediction value, but the learner's edges are
    the grid measures and a round counts against a surviving collection when
    the played measure gives its image mass at most ``1 - gamma`` (mass
    strictly below one when ``gamma`` is zero). The result is exact for the
    grid; see :class:`GridInt` for what the caveat flag asserts about the
    unrestricted value.
    """
    gamma = _as_gamma(gamma)
    if T < 0:
        raise SpecError(f"horizon must be nonnegative, got {T}")
    collections = build_admissible_collections(spec)
    engine = CollectionEngine(
        spec, collections, kind="measure", gamma=gamma, grid=g, budget=budget
    )
    alive, scores = engine.initial_state()
    return GridInt(engine.value(alive, scores, T))


def ppms_dim(
    spec: GameSpec,
    prefix_x,
    prefix_measures,
    prefix_reveals,
    d: int,
    gamma,
    g: int | None = None,
    budget: int | None = None,
) -> GridInt:
    """Prefix-seeded variant of :func:`pms_dim`.

    Collections inconsistent with a prefix reveal are dropped; the survivors
    start charged with the prefix rounds whose played measure already
    triggered the ``gamma`` event against them. Prefix measures are taken as
    given exact measures and need not lie on the continuation grid.
    """
    gamma = _as_gamma(gamma)
    if d < 0:
        raise SpecError(f"depth must be nonnegative, got {d}")
    if not len(prefix_x) == len(prefix_measures) == len(prefix_reveals):
        raise SpecError("prefix lists must have equal length")
    for pi in prefix_measures:
        if not isinstance(pi, Measure):
            raise SpecError("prefix_measures must contain Measure objects")
        if pi.n_labels != spec.n_labels:
            raise SpecError(
                f"prefix measure over {pi.n_labels} labels does not fit a "
                f"{spec.n_labels}-label spec"
            )
    collections = build_admissible_collections(spec)
    engine = CollectionEngine(
        spec, collections, kind="measure", gamma=gamma, grid=g, budget=budget
    )
    alive = []
    scores = []
    for cid, col in enumerate(collections):
        events = 0
        consistent = True
        for x, pi, y in zip(prefix_x, prefix_measures, prefix_reveals):
            img = col.images[x]
            if not (img >> y) & 1:
                consistent = False
                break
            mass = pi.mass(img)
            if (mass < 1) if gamma == 0 else (mass <= 1 - gamma):
                events += 1
        if consistent:
            alive.append(cid)
            scores.append(events)
    if not alive:
        raise EmptyConsistentSet("no collection is consistent with the prefix reveals")
    return GridInt(engine.value(tuple(alive), tuple(scores), d))


def msp(N: int, measures, thresholds, system: SetSystem) -> int:
    """Measure selection: first stable index whose successor jumps, else ``N``.

    Scans ``m = 1 .. N-1`` (one-based) and returns the first ``m`` where the
    adjacent miss-mass deviations up through ``m`` all stay within twice
    their thresholds (vacuous at ``m = 1``) while the step from ``m`` to
    ``m + 1`` moves by at least twice ``thresholds[m-1]`` uniformly over the
    whole set system. Returns ``N`` when no index qualifies, in particular
    whenever all measures coincide.
    """
    if len(measures) != N or len(thresholds) != N:
        raise SpecError("msp needs exactly N measures and N thresholds")
    thr = [Fraction(t) for t in thresholds]
    for t in thr:
        if not 0 < t < 1:
            raise SpecError(f"thresholds must lie strictly in (0, 1), got {t}")
    members = system.members()
    miss = [[pi.miss_mass(s) for s in members] for pi in measures]
    for m in range(1, N):
        stable = all(
            max(abs(a - b) for a, b in zip(miss[i], miss[i - 1])) <= 2 * thr[i - 1]
            for i in range(1, m)
        )
        if not stable:
            continue
        jump = min(abs(a - b) for a, b in zip(miss[m - 1], miss[m]))
        if jump >= 2 * thr[m - 1]:
            return m
    return N


def minimax_rand_regret(
    spec: GameSpec, T: int, g: int | None = None, budget: int | None = None
) -> Fraction:
    """Exact minimax expected regret with grid-measure predictions.

    The learner announces a grid measure each round, the adversary answers
    with an instance and a feasible reveal, and the terminal payoff is the
    largest total miss mass accumulated by any surviving collection. Fully
    realizable oblivious games only, where that payoff is the regret itself.

    States are memoized on (surviving collections, translation-normalized
    exact scores, rounds left); the lattice of reachable rational scores is
    finite at fixed g, so this changes nothing about the value and is guarded
    by a node budget rather than an a-priori size formula.
    """
    if spec.realizability is not Realizability.SET_REALIZABLE:
        raise SpecError("the randomized minimax value requires full realizability")
    if spec.visibility is not Visibility.OBLIVIOUS:
        raise SpecError("the randomized minimax value is defined for oblivious games")
    if T < 0:
        raise SpecError(f"horizon must be nonnegative, got {T}")
    collections = build_admissible_collections(spec)
    engine = CollectionEngine(
        spec,
        collections,
        kind="loss",
        grid=g,
        budget=rand_budget() if budget is None else budget,
    )
    alive, scores = engine.initial_state()
    return Fraction(engine.value(alive, scores, T))
