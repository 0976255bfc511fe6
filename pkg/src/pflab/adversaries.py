"""Adversary strategies.

An adversary chooses instances, answers predictions with revealed labels (or
revealed sets, or loss bits, per the feedback mode), and commits to the
per-round feasible sets once the game ends. Constructions that certify full
realizability also hand back a witness collection.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .dimensions import ShatteringTree, verify_shattering_tree
from .engine import CollectionEngine
from .errors import (
    LabelPoolExhausted,
    PoolExhausted,
    SpecError,
    TreeSpecMismatch,
)
from .game import Adversary, GameSpec, build_admissible_collections
from .measures import Measure
from .setsystems import iter_bits, mask_of


def _require_label(prediction) -> int:
    if isinstance(prediction, Measure):
        raise SpecError("this adversary is defined against deterministic learners only")
    return prediction


def _modal_label(prediction) -> int:
    """A label standing in for the prediction: itself, or the heaviest one."""
    if isinstance(prediction, Measure):
        return prediction.argmax_label()
    return prediction


class OptimalAdversary(Adversary):
    """Plays the argmax branch of the exact value recursion every round.

    Instance and reveal choices come straight from the memoized game value;
    at the end the surviving collection with the most charged mistakes (the
    lowest-id one on ties) becomes the ground truth, its images the feasible
    sets. Randomized predictions are charged at their heaviest label.
    """

    def __init__(self, spec: GameSpec, T: int | None = None, budget: int | None = None):
        self._T = spec.horizon if T is None else T
        self._budget = budget

    def begin(self, spec: GameSpec) -> None:
        self._spec = spec
        self._collections = build_admissible_collections(spec)
        self._engine = CollectionEngine(
            spec, self._collections, kind="label", budget=self._budget
        )
        self._alive, self._scores = self._engine.initial_state()
        self._rounds_left = self._T
        self._x = None

    def choose_instance(self) -> int:
        self._x = self._engine.best_instance(self._alive, self._scores, self._rounds_left)
        return self._x

    def reveal(self, x: int, prediction) -> int:
        edge = _modal_label(prediction)
        y = self._engine.best_reveal(
            self._alive, self._scores, x, edge, self._rounds_left - 1
        )
        self._alive, self._scores = self._engine.update(
            self._alive, self._scores, x, edge, y
        )
        self._rounds_left -= 1
        return y

    def _chosen(self) -> int:
        best = max(self._scores)
        return self._alive[self._scores.index(best)]

    def finalize_sets(self, view):
        col = self._collections[self._chosen()]
        return [col.images[x] for x in view.instances]

    def witness_collection(self):
        return self._collections[self._chosen()].members


def optimal_adversary(spec: GameSpec, T: int | None = None, budget: int | None = None) -> OptimalAdversary:
    """Value-recursion-backed adversary forcing the minimax mistake count."""
    return OptimalAdversary(spec, T=T, budget=budget)


class ShatteringTreeAdversary(Adversary):
    """Replays an explicit shattering tree against a deterministic learner.

    Walks the tree along the learner's prediction path, reveals the edge
    annotations, and finalizes with the witness collection stored at the
    reached leaf, guaranteeing at least the tree's certified mistake count.
    """

    def __init__(self, tree: ShatteringTree):
        self._tree = tree

    def begin(self, spec: GameSpec) -> None:
        verify_shattering_tree(spec, self._tree)
        if spec.horizon != self._tree.depth:
            raise TreeSpecMismatch(
                f"tree depth {self._tree.depth} does not match horizon {spec.horizon}"
            )
        self._spec = spec
        self._path = ()

    def choose_instance(self) -> int:
        return self._tree.nodes[self._path]

    def reveal(self, x: int, prediction) -> int:
        yhat = _require_label(prediction)
        self._path = self._path + (yhat,)
        return self._tree.annotations[self._path]

    def finalize_sets(self, view):
        from .game import collection_of

        col = collection_of(self._spec, self._tree.witnesses[self._path])
        return [col.images[x] for x in view.instances]

    def witness_collection(self):
        return self._tree.witnesses[self._path]


def shattering_tree_adversary(tree: ShatteringTree) -> ShatteringTreeAdversary:
    """Adversary that forces the mistakes a verified tree certifies."""
    return ShatteringTreeAdversary(tree)


class EchoAdversary(Adversary):
    """Reveals the learner's own prediction whenever some collection allows it.

    Against a learner that always predicts feasibly, every prediction ends up
    inside its round's feasible set, so the regret is zero. Infeasible
    predictions get the lowest feasible label instead.
    """

    def begin(self, spec: GameSpec) -> None:
        self._spec = spec
        self._collections = build_admissible_collections(spec)
        self._alive = list(range(len(self._collections)))
        self._x = None

    def choose_instance(self) -> int:
        self._x = 0
        return 0

    def _survivors(self, x: int, y: int):
        return [cid for cid in self._alive if (self._collections[cid].images[x] >> y) & 1]

    def reveal(self, x: int, prediction) -> int:
        y = _modal_label(prediction)
        kept = self._survivors(x, y)
        if not kept:
            feasible = 0
            for cid in self._alive:
                feasible |= self._collections[cid].images[x]
            y = min(iter_bits(feasible))
            kept = self._survivors(x, y)
        self._alive = kept
        return y

    def finalize_sets(self, view):
        col = self._collections[self._alive[0]]
        return [col.images[x] for x in view.instances]

    def witness_collection(self):
        return self._collections[self._alive[0]].members


def echo_adversary() -> EchoAdversary:
    """Adversary that validates whatever the learner predicts when it can."""
    return EchoAdversary()


class SeededRandomAdversary(Adversary):
    """Protocol-legal random play from a seeded generator, for stress tests."""

    def __init__(self, seed: int = 0):
        self._seed = seed

    def begin(self, spec: GameSpec) -> None:
        self._spec = spec
        self._rng = random.Random(self._seed)
        self._collections = build_admissible_collections(spec)
        self._alive = list(range(len(self._collections)))

    def choose_instance(self) -> int:
        return self._rng.randrange(self._spec.n_instances)

    def reveal(self, x: int, prediction) -> int:
        feasible = 0
        for cid in self._alive:
            feasible |= self._collections[cid].images[x]
        y = self._rng.choice(list(iter_bits(feasible)))
        self._alive = [
            cid for cid in self._alive if (self._collections[cid].images[x] >> y) & 1
        ]
        return y

    def finalize_sets(self, view):
        self._chosen = self._rng.choice(self._alive)
        col = self._collections[self._chosen]
        return [col.images[x] for x in view.instances]

    def witness_collection(self):
        return self._collections[self._chosen].members


def random_adversary(seed: int = 0) -> SeededRandomAdversary:
    """Seeded random but protocol-respecting adversary."""
    return SeededRandomAdversary(seed)


# -- collision bookkeeping ---------------------------------------------------------


@dataclass(frozen=True)
class CollisionFamily:
    """Finite family of affine residue tables with rare pairwise agreement.

    Hypothesis (s, b) maps pool instance x to (s*x + b) mod modulus. Distinct
    slopes meet at one pool instance at most; equal slopes never meet. The
    game built from this family uses one instance per pool entry, the residue
    alphabet as labels, and the bounded set system of all nonempty sets up to
    the horizon.
    """

    modulus: int = 64
    slopes: tuple = (0, 1)
    pool: tuple = tuple(range(64))

    def n_hypotheses(self) -> int:
        return len(self.slopes) * self.modulus

    def value(self, hyp: int, x_index: int) -> int:
        s = self.slopes[hyp // self.modulus]
        b = hyp % self.modulus
        return (s * self.pool[x_index] + b) % self.modulus

    def realizers(self, x_index: int, y: int):
        """Hypothesis ids taking value y at this pool instance, slope order."""
        x = self.pool[x_index]
        out = []
        for si, s in enumerate(self.slopes):
            b = (y - s * x) % self.modulus
            out.append(si * self.modulus + b)
        return tuple(out)


class CollisionAdversary(Adversary):
    """Tracks reveal-realizer pairs and slot counters; answers with fresh labels.

    Per round: every tracked hypothesis matching the prediction gets its slot
    charged (the shrinking instance pool guarantees at most one match); the
    prediction's realizers are excluded for good; the reveal is the lowest
    label that no tracked or excluded hypothesis outputs here, and its
    realizers become a new tracked pair. Instances where any two distinct
    tracked hypotheses agree leave the pool. The ground truth picks each
    pair's minimum-slot member, which pins the learner to at most half of the
    charged matches.
    """

    def __init__(self, family: CollisionFamily):
        self._family = family

    def begin(self, spec: GameSpec) -> None:
        fam = self._family
        if spec.n_instances != len(fam.pool) or spec.n_labels != fam.modulus:
            raise SpecError("spec shape does not match the collision family")
        self._spec = spec
        self._pool = set(range(spec.n_instances))
        self._pairs = []
        self._slots = []
        self._excluded = set()
        self._x = None

    def choose_instance(self) -> int:
        if not self._pool:
            raise PoolExhausted("no instance is free of tracked-hypothesis agreements")
        self._x = min(self._pool)
        return self._x

    def reveal(self, x: int, prediction) -> int:
        fam = self._family
        yhat = _require_label(prediction)
        for pair, slots in zip(self._pairs, self._slots):
            for i, hyp in enumerate(pair):
                if fam.value(hyp, x) == yhat:
                    slots[i] += 1
        self._excluded.update(fam.realizers(x, yhat))

        blocked = set()
        for pair in self._pairs:
            for hyp in pair:
                blocked.add(fam.value(hyp, x))
        for hyp in self._excluded:
            blocked.add(fam.value(hyp, x))
        y = next((lbl for lbl in range(fam.modulus) if lbl not in blocked), None)
        if y is None:
            raise PoolExhausted("every label here is claimed by bookkeeping")

        new_pair = fam.realizers(x, y)
        tracked = [hyp for pair in self._pairs for hyp in pair]
        self._pairs.append(new_pair)
        self._slots.append([0] * len(new_pair))
        doomed = set()
        for x2 in self._pool:
            for a_i, a in enumerate(new_pair):
                va = fam.value(a, x2)
                for b in tracked:
                    if fam.value(b, x2) == va:
                        doomed.add(x2)
                        break
                else:
                    for b in new_pair[a_i + 1:]:
                        if fam.value(b, x2) == va:
                            doomed.add(x2)
                            break
                if x2 in doomed:
                    break
        self._pool -= doomed
        return y

    def _ground_truth(self):
        members = []
        for pair, slots in zip(self._pairs, self._slots):
            best = min(range(len(pair)), key=lambda i: (slots[i], i))
            members.append(pair[best])
        return tuple(sorted(members))

    def finalize_sets(self, view):
        fam = self._family
        members = self._ground_truth()
        return [
            mask_of(fam.value(h, x) for h in members) for x in view.instances
        ]

    def witness_collection(self):
        return self._ground_truth()


def collision_adversary(family: CollisionFamily) -> CollisionAdversary:
    """Slot-counting adversary for families with rare pairwise agreements."""
    return CollisionAdversary(family)


class TwoConstantAgnosticAdversary(Adversary):
    """Reveals the learner's lighter label; commits to the majority constant.

    Each round the label the learner favors less (label 1 on exact ties) is
    revealed. At the end the constant hypothesis agreeing with the majority
    of reveals becomes ground truth: rounds that revealed it get its
    singleton, the others get the full pair, so the best fixed hypothesis
    loses nothing while the learner paid at least half on every
    majority-reveal round.
    """

    def __init__(self, T: int):
        self._T = T

    def begin(self, spec: GameSpec) -> None:
        if spec.n_labels != 2:
            raise SpecError("this construction runs on a binary alphabet")
        if spec.n_instances < self._T:
            raise SpecError("need one fresh instance per round")
        self._spec = spec
        self._round = 0
        self._reveals = []

    def choose_instance(self) -> int:
        x = self._round
        self._round += 1
        return x

    def reveal(self, x: int, prediction) -> int:
        if isinstance(prediction, Measure):
            p0 = prediction.weights[0]
        else:
            p0 = Fraction(1) if prediction == 0 else Fraction(0)
        y = 1 if p0 >= Fraction(1, 2) else 0
        self._reveals.append(y)
        return y

    def finalize_sets(self, view):
        q = sum(self._reveals)
        T = len(self._reveals)
        k = 0 if q <= T - q else 1
        pair = mask_of([0, 1])
        single = 1 << k
        return [single if y == k else pair for y in self._reveals]


def agnostic_two_constant_adversary(T: int) -> TwoConstantAgnosticAdversary:
    """Lighter-label reveals plus a majority-constant ground truth."""
    return TwoConstantAgnosticAdversary(T)


class CubeAdversary(Adversary):
    """Reveals a low-mass label, then excludes realized draws via co-singletons.

    Works in both visibility modes. The reveal is the lowest label whose
    predicted singleton mass is at most 1 - k. At the end each round's set is
    the alphabet minus one label: in public mode the excluded label is the
    realized draw when it differs from the reveal (the lowest other label
    when it matches, keeping the reveal inside); in oblivious mode it is the
    heaviest non-revealed label of the played measure. A product-style
    witness collection realizes exactly those co-singleton images.
    """

    def __init__(self, T: int, M: int, k):
        self._T = T
        self._M = M
        self._k = Fraction(k)
        if not 0 < self._k <= 1:
            raise SpecError(f"mass threshold must lie in (0, 1], got {self._k}")

    def begin(self, spec: GameSpec) -> None:
        if spec.n_labels != self._M:
            raise SpecError("label alphabet does not match the configured truncation")
        if spec.n_instances < self._T:
            raise SpecError("need one fresh instance per round")
        self._spec = spec
        self._round = 0
        self._instances = []
        self._measures = []
        self._reveals = []
        self._draws = []

    def choose_instance(self) -> int:
        x = self._round
        self._round += 1
        self._instances.append(x)
        return x

    def reveal(self, x: int, prediction) -> int:
        if isinstance(prediction, Measure):
            measure = prediction
        else:
            measure = Measure.delta(self._spec.n_labels, prediction)
        limit = 1 - self._k
        y = next(
            (
                lbl
                for lbl in range(self._spec.n_labels)
                if measure.weights[lbl] <= limit
            ),
            None,
        )
        if y is None:
            raise LabelPoolExhausted(
                f"every singleton carries mass above {limit}; enlarge the truncation"
            )
        self._measures.append(measure)
        self._reveals.append(y)
        return y

    def observe_draw(self, z: int) -> None:
        self._draws.append(z)

    def _excluded_label(self, t: int) -> int:
        y = self._reveals[t]
        if self._draws:
            z = self._draws[t]
            if z != y:
                return z
            return next(lbl for lbl in range(self._spec.n_labels) if lbl != z)
        pi = self._measures[t]
        best = None
        for lbl in range(self._spec.n_labels):
            if lbl == y:
                continue
            if best is None or pi.weights[lbl] > pi.weights[best]:
                best = lbl
        return best

    def finalize_sets(self, view):
        full = (1 << self._spec.n_labels) - 1
        self._excluded = [self._excluded_label(t) for t in range(len(self._reveals))]
        return [full ^ (1 << e) for e in self._excluded]

    def witness_collection(self):
        spec = self._spec
        M = spec.n_labels
        excl = {x: self._excluded[t] for t, x in enumerate(self._instances)}
        base_row = [
            (1 if excl.get(x) == 0 else 0) if x in excl else 0
            for x in range(spec.n_instances)
        ]
        members = {spec.hypotheses.index_of_row(base_row)}
        for x in excl:
            for v in range(M):
                if v == excl[x] or v == base_row[x]:
                    continue
                row = list(base_row)
                row[x] = v
                members.add(spec.hypotheses.index_of_row(row))
        return tuple(sorted(members))


def public_cube_adversary(T: int, M: int, k) -> CubeAdversary:
    """Low-mass reveals with draw-excluding co-singleton sets."""
    return CubeAdversary(T, M, k)


_MINUS_HALF_OFFSET = 0
_PLUS_HALF_OFFSET = 1


class PrefixParityAdversary(Adversary):
    """Halves the integer-candidate set each round; pins a never-predicted one.

    The alphabet is n-2 integer candidates plus two sentinel labels (the
    "halves"). Reveals are always halves; the running bit sequence they
    encode (first round: 1 for the low half; later: 1 on a change) selects
    the binary-prefix class of surviving candidates. Integer predictions
    still in the running get killed by the bit choice; half predictions get
    the other half. The survivor c*, never predicted, joins each round's
    reveal in a two-label set, so every prediction missed while the constant
    hypothesis at c* is perfect.

    In set-valued mode the sets must go out during play, so c* is fixed up
    front as the highest candidate and the reveal stream follows its parity
    function; reading any set then solves the game.
    """

    def __init__(self, T: int, set_valued: bool = False):
        self._T = T
        self._set_valued = set_valued

    def begin(self, spec: GameSpec) -> None:
        if spec.n_labels < 4:
            raise SpecError("need at least two integer candidates plus the two halves")
        self._spec = spec
        self._n_cand = spec.n_labels - 2
        self._minus = self._n_cand + _MINUS_HALF_OFFSET
        self._plus = self._n_cand + _PLUS_HALF_OFFSET
        if self._T > spec.n_instances:
            raise SpecError("need one fresh instance per round")
        bits = self._n_cand.bit_length() - 1
        if self._T != bits or (1 << bits) != self._n_cand:
            raise SpecError(
                "the candidate count must be exactly 2 to the number of rounds"
            )
        self._round = 0
        self._candidates = set(range(self._n_cand))
        self._predicted = set()
        self._reveals = []
        self._sets = []

    def choose_instance(self) -> int:
        x = self._round
        self._round += 1
        return x

    def _half_for_bit(self, bit: int) -> int:
        if not self._reveals:
            return self._minus if bit else self._plus
        prev = self._reveals[-1]
        other = self._minus + self._plus - prev
        return other if bit else prev

    def _bit_for_half(self, y: int) -> int:
        if not self._reveals:
            return 1 if y == self._minus else 0
        return 1 if y != self._reveals[-1] else 0

    def reveal(self, x: int, prediction) -> int:
        yhat = _require_label(prediction)
        j = len(self._reveals)
        if yhat < self._n_cand:
            self._predicted.add(yhat)
            if yhat in self._candidates:
                bit = 1 - ((yhat >> j) & 1)
            else:
                bit = 0
            y = self._half_for_bit(bit)
        else:
            y = self._minus + self._plus - yhat
            bit = self._bit_for_half(y)
        self._reveals.append(y)
        self._candidates = {c for c in self._candidates if ((c >> j) & 1) == bit}
        return y

    def reveal_set(self, x: int, prediction) -> int:
        _require_label(prediction)
        c_star = self._n_cand - 1
        y = self._parity_half(c_star, x)
        mask = (1 << c_star) | (1 << y)
        self._reveals.append(y)
        self._sets.append(mask)
        return mask

    def _parity_half(self, c: int, x: int) -> int:
        ones = bin(c & ((1 << (x + 1)) - 1)).count("1")
        return self._plus if ones % 2 == 0 else self._minus

    def _survivor(self) -> int:
        leftovers = self._candidates - self._predicted
        return min(leftovers)

    def finalize_sets(self, view):
        if self._set_valued:
            return list(self._sets)
        c_star = self._survivor()
        return [(1 << c_star) | (1 << y) for y in self._reveals]

    def witness_collection(self):
        if self._set_valued:
            c_star = self._n_cand - 1
        else:
            c_star = self._survivor()
        return (c_star, self._n_cand + c_star)


def pf_not_sv_adversary(T: int, set_valued: bool = False) -> PrefixParityAdversary:
    """Prefix-parity construction separating label reveals from set reveals."""
    return PrefixParityAdversary(T, set_valued=set_valued)


def make_adversary(name: str, params: dict, spec: GameSpec) -> Adversary:
    """Instantiate an adversary by registry name with config-file parameters."""
    params = dict(params or {})
    if name == "optimal":
        built = optimal_adversary(spec, T=params.pop("T", None))
    elif name == "echo":
        built = echo_adversary()
    elif name == "random":
        built = random_adversary(int(params.pop("seed", 0)))
    elif name == "collision":
        fam = CollisionFamily(
            modulus=int(params.pop("modulus", 64)),
            slopes=tuple(params.pop("slopes", (0, 1))),
            pool=tuple(params.pop("pool", tuple(range(64)))),
        )
        built = collision_adversary(fam)
    elif name == "agnostic_two_constant":
        built = agnostic_two_constant_adversary(int(params.pop("T", spec.horizon)))
    elif name == "public_cube":
        built = public_cube_adversary(
            int(params.pop("T", spec.horizon)),
            int(params.pop("M", spec.n_labels)),
            params.pop("k", Fraction(1, 2)),
        )
    elif name == "pf_not_sv":
        built = pf_not_sv_adversary(
            int(params.pop("T", spec.horizon)),
            set_valued=bool(params.pop("set_valued", False)),
        )
    else:
        raise SpecError(f"unknown adversary name {name!r}")
    if params:
        raise SpecError(f"unused adversary parameters {sorted(params)} for {name!r}")
    return built
