"""Memoized backward induction over collection states.

One engine serves every minimax quantity in the package. A state is a set of
still-alive collections together with a per-collection score, plus a number of
rounds remaining. Each round the adversary picks an instance, the learner
picks an edge (a label, or a measure from a fixed grid), and the adversary
reveals a feasible label: feasible means some alive collection contains it in
its image at that instance. The reveal kills every collection whose image
misses it, the edge adds each surviving collection's increment to its score,
and at the end of play the adversary collects the maximum score among
survivors. The engine computes the exact minimax value of that game, and can
also report argmax/argmin choices so strategies can play optimally.

Three scoring kinds:

* ``label``: edges are labels, a collection's increment is 1 when the
  predicted label is outside its image (the deterministic mistake game);
* ``measure``: edges are grid measures, the increment is 1 when the measure
  puts at most ``1 - gamma`` mass on the image (strictly below 1 when
  ``gamma`` is 0), else 0;
* ``loss``: edges are grid measures, the increment is the exact mass placed
  outside the image (rational scores).

Soundness of the speedups, all of which preserve exact values:

* the value is at least the maximum alive score (the adversary can always
  reveal inside the argmax collection's image, keeping it alive) and at most
  that plus the rounds remaining (each round adds at most 1 to any score), so
  the min loop can stop at the lower bound and the max loops at the upper;
* if at every instance some label lies in every alive image, the learner can
  play such a label (or its point mass) forever at zero increment, so the
  value equals the lower bound exactly;
* edges with equal increment vectors over the alive set induce identical
  subtrees, as do reveals with equal survivor sets, so only one representative
  of each class is explored;
* scores translate: adding a constant to every score adds it to the value, so
  memo keys store scores relative to their minimum.
"""

from __future__ import annotations

import os
from fractions import Fraction
from typing import Optional, Sequence

from .errors import BudgetExceeded
from .game import Collection, GameSpec
from .measures import Measure, ONE, ZERO, measure_grid
from .setsystems import iter_bits

_INF = float("inf")


def states_budget() -> int:
    return int(os.environ.get("PFLAB_BUDGET_STATES", 50_000_000))


def rand_budget() -> int:
    return int(os.environ.get("PFLAB_BUDGET_RAND", 10_000_000))


class CollectionEngine:
    """Exact minimax over collection states for one (spec, kind, gamma, grid)."""

    def __init__(
        self,
        spec: GameSpec,
        collections: Sequence[Collection],
        kind: str = "label",
        gamma: Fraction | None = None,
        grid: int | None = None,
        budget: int | None = None,
    ):
        if kind not in ("label", "measure", "loss"):
            raise ValueError(f"unknown engine kind {kind!r}")
        self.spec = spec
        self.collections = list(collections)
        self.kind = kind
        self.gamma = Fraction(gamma) if gamma is not None else None
        if kind == "measure" and self.gamma is None:
            raise ValueError("measure kind needs gamma")
        self.images = [c.images for c in self.collections]
        if kind == "label":
            self.edges: list = list(range(spec.n_labels))
        else:
            self.edges = measure_grid(spec.n_labels, grid if grid is not None else spec.measure_grid)
        if budget is None:
            budget = rand_budget() if kind == "loss" else states_budget()
        self.budget = budget
        self.nodes = 0
        self._memo: dict = {}
        self._inc_cache: dict = {}
        self._common_cache: dict = {}

    # -- increments ---------------------------------------------------------

    def increment(self, edge_index: int, image_mask: int):
        """Score increment of a collection with this image under this edge."""
        key = (edge_index, image_mask)
        hit = self._inc_cache.get(key)
        if hit is not None:
            return hit
        if self.kind == "label":
            val = 0 if (image_mask >> self.edges[edge_index]) & 1 else 1
        else:
            mass = self.edges[edge_index].mass(image_mask)
            if self.kind == "loss":
                val = ONE - mass
            elif self.gamma == 0:
                val = 1 if mass < 1 else 0
            else:
                val = 1 if mass <= 1 - self.gamma else 0
        self._inc_cache[key] = val
        return val

    def zero_increment(self) -> object:
        return ZERO if self.kind == "loss" else 0

    # -- state helpers ------------------------------------------------------

    def initial_state(self):
        """All collections alive with zero scores."""
        zero = self.zero_increment()
        return tuple(range(len(self.collections))), tuple(zero for _ in self.collections)

    def feasible_mask(self, alive: tuple, x: int) -> int:
        m = 0
        for cid in alive:
            m |= self.images[cid][x]
        return m

    def update(self, alive: tuple, scores: tuple, x: int, edge_index: int, y: int):
        """Survivors of revealing ``y`` after playing edge ``edge_index`` at ``x``."""
        new_alive = []
        new_scores = []
        for cid, s in zip(alive, scores):
            img = self.images[cid][x]
            if (img >> y) & 1:
                new_alive.append(cid)
                new_scores.append(s + self.increment(edge_index, img))
        return tuple(new_alive), tuple(new_scores)

    def _all_common(self, alive: tuple) -> bool:
        hit = self._common_cache.get(alive)
        if hit is not None:
            return hit
        ok = True
        for x in range(self.spec.n_instances):
            inter = -1
            for cid in alive:
                inter &= self.images[cid][x]
                if inter == 0:
                    break
            if inter == 0:
                ok = False
                break
        self._common_cache[alive] = ok
        return ok

    # -- the value function ---------------------------------------------------

    def value(self, alive: tuple, scores: tuple, rounds: int):
        lb = max(scores)
        if rounds == 0 or self._all_common(alive):
            return lb
        m = min(scores)
        key = (rounds, alive, tuple(s - m for s in scores))
        hit = self._memo.get(key)
        if hit is not None:
            return hit + m
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(
                f"minimax recursion exceeded {self.budget} expanded states",
                spent=self.nodes,
                budget=self.budget,
            )
        ub = lb + rounds
        best = lb
        for x in range(self.spec.n_instances):
            v = self._instance_value(alive, scores, x, rounds - 1, cutoff=best)
            if v > best:
                best = v
                if best >= ub:
                    break
        self._memo[key] = best - m
        return best

    def _instance_value(self, alive, scores, x, child_depth, cutoff=None):
        """min over edges of (max over feasible reveals) of the child value.

        ``cutoff`` is purely an optimization contract with ``value``: the
        caller only needs the result when it exceeds the cutoff, so edge
        evaluation may stop early once an edge is proven no better than it.
        The returned value is exact whenever it exceeds the cutoff.
        """
        lb = max(scores)
        feas = self.feasible_mask(alive, x)
        best_edge = None
        seen_inc = set()
        for ei in range(len(self.edges)):
            inc = tuple(self.increment(ei, self.images[cid][x]) for cid in alive)
            if inc in seen_inc:
                continue
            seen_inc.add(inc)
            worst = self._edge_worst(
                alive, scores, x, ei, feas, child_depth,
                stop_at=best_edge if best_edge is not None else _INF,
            )
            if best_edge is None or worst < best_edge:
                best_edge = worst
                if best_edge <= lb:
                    break
                if cutoff is not None and best_edge <= cutoff:
                    break
        return best_edge

    def _edge_worst(self, alive, scores, x, edge_index, feas, child_depth, stop_at=_INF):
        """max over feasible reveals of the child value, for one edge."""
        worst = None
        seen_surv: dict = {}
        for y in iter_bits(feas):
            surv_key = tuple(cid for cid in alive if (self.images[cid][x] >> y) & 1)
            if surv_key in seen_surv:
                continue
            seen_surv[surv_key] = y
            child_alive, child_scores = self.update(alive, scores, x, edge_index, y)
            v = self.value(child_alive, child_scores, child_depth)
            if worst is None or v > worst:
                worst = v
                if worst >= stop_at:
                    break
        return worst

    # -- choice extraction (for strategies playing the value) ------------------

    def best_instance(self, alive: tuple, scores: tuple, rounds: int) -> int:
        """Lowest instance achieving the state's value (adversary's move)."""
        best_x, best_v = 0, None
        for x in range(self.spec.n_instances):
            v = self._instance_value(alive, scores, x, rounds - 1)
            if best_v is None or v > best_v:
                best_x, best_v = x, v
        return best_x

    def edge_worst_values(self, alive, scores, x, child_depth, on_budget=None):
        """Exact worst-case child value for every edge, in edge order.

        ``on_budget="bound"`` substitutes, for any edge whose evaluation blows
        the engine budget, the trivial upper bound (max surviving score plus
        the remaining depth); the substitution is deterministic, and documented
        where it is relied on. Once the budget is fully spent every edge would
        take the fallback, so the whole table is computed by the cheap grouped
        scan instead of attempting one doomed recursion per edge.
        """
        feas = self.feasible_mask(alive, x)
        if on_budget == "bound" and self.nodes >= self.budget:
            return self._edge_worst_bounds(alive, scores, x, feas, child_depth)
        out = []
        for ei in range(len(self.edges)):
            worst = None
            seen = set()
            for y in iter_bits(feas):
                surv_key = tuple(cid for cid in alive if (self.images[cid][x] >> y) & 1)
                if surv_key in seen:
                    continue
                seen.add(surv_key)
                child_alive, child_scores = self.update(alive, scores, x, ei, y)
                try:
                    v = self.value(child_alive, child_scores, child_depth)
                except BudgetExceeded:
                    if on_budget != "bound":
                        raise
                    v = max(child_scores) + child_depth
                if worst is None or v > worst:
                    worst = v
            out.append(worst)
        return out

    def _edge_worst_bounds(self, alive, scores, x, feas, child_depth):
        """Upper-bound table for every edge without any value recursion.

        For each distinct survivor set of a reveal, only the best surviving
        score per image matters for the bound, so survivors are collapsed to
        an image -> max score table once and every edge is scored against
        those tables.
        """
        groups = []
        seen = set()
        for y in iter_bits(feas):
            key = tuple(cid for cid in alive if (self.images[cid][x] >> y) & 1)
            if key in seen:
                continue
            seen.add(key)
            by_img: dict = {}
            for cid, s in zip(alive, scores):
                img = self.images[cid][x]
                if (img >> y) & 1:
                    prev = by_img.get(img)
                    if prev is None or s > prev:
                        by_img[img] = s
            groups.append(by_img)
        out = []
        for ei in range(len(self.edges)):
            worst = None
            for by_img in groups:
                top = max(s + self.increment(ei, img) for img, s in by_img.items())
                if worst is None or top > worst:
                    worst = top
            if worst is None:
                worst = max(scores)
            out.append(worst + child_depth)
        return out

    def best_edge(self, alive, scores, x, child_depth, on_budget=None):
        """Lowest-index edge minimizing the worst-case child value."""
        values = self.edge_worst_values(alive, scores, x, child_depth, on_budget=on_budget)
        best = min(values)
        return values.index(best)

    def best_reveal(self, alive, scores, x, edge_index, child_depth) -> int:
        """Lowest feasible reveal maximizing the child value (adversary's move)."""
        feas = self.feasible_mask(alive, x)
        best_y, best_v = None, None
        for y in iter_bits(feas):
            child_alive, child_scores = self.update(alive, scores, x, edge_index, y)
            v = self.value(child_alive, child_scores, child_depth)
            if best_v is None or v > best_v:
                best_y, best_v = y, v
        return best_y

    def edge_index_of_label(self, label: int) -> int:
        """Index of the edge behaving like a point mass on ``label``.

        For label kind that is the label itself; for measure kinds it is the
        delta measure, which every grid contains.
        """
        if self.kind == "label":
            return label
        target = Measure.delta(self.spec.n_labels, label)
        return self.edges.index(target)
