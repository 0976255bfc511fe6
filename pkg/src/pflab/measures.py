"""Exact probability measures over the label alphabet, and the uniform grid.

All mass arithmetic is done in ``fractions.Fraction``; nothing in the package
ever rounds a probability. The grid of resolution ``g`` consists of every
measure whose weights are integer multiples of ``1/g``; it contains all the
point masses and grows like a binomial coefficient in ``g`` and the alphabet
size, so enumeration is budget-guarded.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .errors import GridTooLarge, SpecError
from .setsystems import iter_bits

ZERO = Fraction(0)
ONE = Fraction(1)


def _grid_budget() -> int:
    return int(os.environ.get("PFLAB_BUDGET_GRID", 1_000_000))


@dataclass(frozen=True)
class Measure:
    """An exact probability distribution over labels ``0..len(weights)-1``."""

    weights: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.weights:
            raise SpecError("a measure needs at least one label")
        if any(w < 0 for w in self.weights):
            raise SpecError("measure weights must be nonnegative")
        if sum(self.weights) != 1:
            raise SpecError(f"measure weights must sum to 1, got {sum(self.weights)}")

    def __deepcopy__(self, memo):
        return self

    @classmethod
    def delta(cls, n_labels: int, label: int) -> "Measure":
        if not 0 <= label < n_labels:
            raise SpecError(f"label {label} outside range({n_labels})")
        return cls(tuple(ONE if y == label else ZERO for y in range(n_labels)))

    @classmethod
    def uniform_over(cls, n_labels: int, labels) -> "Measure":
        support = sorted(set(labels))
        if not support:
            raise SpecError("uniform measure needs a nonempty support")
        if support[0] < 0 or support[-1] >= n_labels:
            raise SpecError("support labels outside the alphabet")
        w = Fraction(1, len(support))
        return cls(tuple(w if y in set(support) else ZERO for y in range(n_labels)))

    @classmethod
    def of(cls, pairs, n_labels: int) -> "Measure":
        """Measure from ``{label: weight}`` pairs; missing labels get zero."""
        weights = [ZERO] * n_labels
        for y, w in dict(pairs).items():
            if not 0 <= y < n_labels:
                raise SpecError(f"label {y} outside range({n_labels})")
            weights[y] = Fraction(w)
        return cls(tuple(weights))

    @property
    def n_labels(self) -> int:
        return len(self.weights)

    def mass(self, mask: int) -> Fraction:
        """Total weight of the labels in ``mask``."""
        return sum((self.weights[y] for y in iter_bits(mask)), ZERO)

    def miss_mass(self, mask: int) -> Fraction:
        """Total weight outside ``mask``; the per-round loss against that set."""
        return ONE - self.mass(mask)

    def support_mask(self) -> int:
        m = 0
        for y, w in enumerate(self.weights):
            if w:
                m |= 1 << y
        return m

    def is_delta(self) -> bool:
        return any(w == 1 for w in self.weights)

    def argmax_label(self) -> int:
        """Lowest label carrying maximal weight."""
        best = max(self.weights)
        return self.weights.index(best)


def grid_size(n_labels: int, g: int) -> int:
    """Number of grid measures: compositions of ``g`` into ``n_labels`` parts."""
    return comb(g + n_labels - 1, n_labels - 1)


def measure_grid(n_labels: int, g: int, budget: int | None = None) -> list[Measure]:
    """All measures with weights in ``{0, 1/g, ..., g/g}``, in a fixed order.

    The order is lexicographically decreasing in the weight vector, so the
    point mass on label 0 comes first and the point mass on the top label
    last. Strategies that break ties by grid order inherit this convention.
    """
    if n_labels < 2:
        raise SpecError(f"need at least 2 labels, got {n_labels}")
    if g < 1:
        raise SpecError(f"grid resolution must be a positive integer, got {g}")
    limit = _grid_budget() if budget is None else budget
    n = grid_size(n_labels, g)
    if n > limit:
        raise GridTooLarge(
            f"grid({n_labels}, {g}) has {n} measures, budget {limit}", spent=n, budget=limit
        )
    out: list[Measure] = []
    counts = [0] * n_labels

    def rec(pos: int, remaining: int):
        if pos == n_labels - 1:
            counts[pos] = remaining
            out.append(Measure(tuple(Fraction(c, g) for c in counts)))
            return
        for c in range(remaining, -1, -1):
            counts[pos] = c
            rec(pos + 1, remaining - c)

    rec(0, g)
    return out
