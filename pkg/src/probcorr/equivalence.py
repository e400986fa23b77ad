"""Bounded checkers for simulation-style relations between reduction systems.

A reduction system is given by a step function mapping a term to the
distributions it can reduce to. Weak relations quantify over ``==>``, the
reflexive and transitive closure of distribution steps; here both the
obligations and the searched witnesses are bounded by an
:class:`ExplorationBudget`. A verdict only fails when the space searched for
a witness was explored completely; otherwise an unmatched obligation is
reported as inconclusive.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Iterable, Iterator, Mapping
from dataclasses import dataclass

from .prob_core import (
    DEFAULT_COMBO_CAP,
    Coupling,
    Distribution,
    DistSet,
    apply_choices,
    dist_multistep,
    dist_point,
    lift_check,
    point_graph,
)

HOLDS, FAILS, INCONCLUSIVE = "holds", "fails", "inconclusive"
_SEVERITY = {HOLDS: 0, INCONCLUSIVE: 1, FAILS: 2}


def term_key(term) -> tuple:
    """Deterministic sort key for terms of either calculus."""
    return (type(term).__module__, str(term))


# ---------------------------------------------------------------- verdicts

@dataclass(frozen=True)
class Obligation:
    """One proof obligation and how it was discharged."""

    pair: tuple
    clause: str
    dist: Distribution | None
    status: str
    matched: object = None
    coupling: Coupling | None = None
    note: str = ""


@dataclass(frozen=True)
class Verdict:
    status: str
    witness: object = None
    counterexample: object = None
    note: str = ""

    def __post_init__(self):
        if self.status not in _SEVERITY:
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == FAILS and self.counterexample is None:
            raise ValueError("a failing verdict needs a counterexample")

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    @property
    def fails(self) -> bool:
        return self.status == FAILS

    @property
    def inconclusive(self) -> bool:
        return self.status == INCONCLUSIVE


def worst(statuses: Iterable[str]) -> str:
    return max(statuses, key=_SEVERITY.__getitem__, default=HOLDS)


def combine(verdicts: Iterable[Verdict], witness=None, note: str = "") -> Verdict:
    verdicts = list(verdicts)
    status = worst(v.status for v in verdicts)
    counter = next((v.counterexample for v in verdicts if v.status == FAILS), None)
    if witness is None:
        witness = [v.witness for v in verdicts]
    return Verdict(status, witness, counter, note)


# ---------------------------------------------------------------- relations

class Relation:
    """A finite binary relation with an implicit diagonal.

    ``pairs`` are listed explicitly; ``diagonal`` is a set of terms each
    related to itself, which keeps identity-like relations over large state
    sets cheap. ``partial`` flags a relation computed from truncated data.
    """

    def __init__(self, pairs: Iterable[tuple] = (), diagonal: Iterable = (), *,
                 partial: bool = False):
        self._forward: dict = {}
        self._backward: dict = {}
        self.diagonal = frozenset(diagonal)
        for a, b in pairs:
            if a == b and a in self.diagonal:
                continue
            self._forward.setdefault(a, set()).add(b)
            self._backward.setdefault(b, set()).add(a)
        self.partial = partial

    @classmethod
    def identity(cls, universe: Iterable) -> "Relation":
        return cls((), universe)

    def __contains__(self, pair) -> bool:
        a, b = pair
        return (a == b and a in self.diagonal) or b in self._forward.get(a, ())

    def explicit_pairs(self) -> list:
        return sorted(((a, b) for a, bs in self._forward.items() for b in bs),
                      key=lambda p: (term_key(p[0]), term_key(p[1])))

    def __iter__(self):
        seen = set()
        for pair in self.explicit_pairs():
            seen.add(pair)
            yield pair
        for x in sorted(self.diagonal, key=term_key):
            if (x, x) not in seen:
                yield (x, x)

    def __len__(self):
        return sum(1 for _ in self)

    def __eq__(self, other):
        return isinstance(other, Relation) and set(self) == set(other)

    def __hash__(self):
        return hash(frozenset(self))

    def __repr__(self):
        return f"Relation({len(self)} pairs)"

    def image(self, x) -> set:
        out = set(self._forward.get(x, ()))
        if x in self.diagonal:
            out.add(x)
        return out

    def preimage(self, y) -> set:
        out = set(self._backward.get(y, ()))
        if y in self.diagonal:
            out.add(y)
        return out

    @property
    def field(self) -> frozenset:
        return frozenset(self._forward) | frozenset(self._backward) | self.diagonal

    def restrict(self, keep: Callable | Iterable) -> "Relation":
        """The relation restricted to pairs whose two components are kept."""
        if not callable(keep):
            members = frozenset(keep)
            keep = members.__contains__
        pairs = [(a, b) for a, b in self.explicit_pairs() if keep(a) and keep(b)]
        return Relation(pairs, (x for x in self.diagonal if keep(x)), partial=self.partial)

    def union(self, other: "Relation") -> "Relation":
        return Relation(self.explicit_pairs() + other.explicit_pairs(),
                        self.diagonal | other.diagonal,
                        partial=self.partial or other.partial)

    def closure(self, universe: Iterable = ()) -> "Relation":
        """Reflexive and transitive closure over the field and ``universe``."""
        diagonal = self.field | frozenset(universe)
        pairs = []
        for start in sorted(self._forward, key=term_key):
            seen = set()
            stack = list(self._forward[start])
            while stack:
                current = stack.pop()
                if current in seen:
                    continue
                seen.add(current)
                stack.extend(self._forward.get(current, ()))
            pairs.extend((start, end) for end in seen)
        return Relation(pairs, diagonal, partial=self.partial)


@dataclass(frozen=True)
class ExplorationBudget:
    """Bounds for the weak checks.

    ``depth`` bounds the distribution steps of the universally quantified
    side, ``search_depth`` those of witness searches. ``maximal`` restricts
    distribution steps to those where every point that can move does.
    """

    depth: int = 4
    search_depth: int | None = None
    state_cap: int = 20_000
    combo_cap: int = DEFAULT_COMBO_CAP
    maximal: bool = False

    def __post_init__(self):
        if self.depth < 0 or (self.search_depth is not None and self.search_depth < 0):
            raise ValueError("depths must be non-negative")
        if self.state_cap < 1 or self.combo_cap < 1:
            raise ValueError("caps must be positive")

    @property
    def witness_depth(self) -> int:
        return self.search_depth if self.search_depth is not None else 2 * self.depth


# ---------------------------------------------------------------- exploration

def replay(start: Distribution, path: Iterable[Mapping], step_fn) -> Distribution:
    """Follow a recorded path of selectors, checking every step is real."""
    current = start
    for choices in path:
        current = apply_choices(current, choices, step_fn)
    return current


class Explorer:
    """Memoised bounded reachability for one step function."""

    def __init__(self, step_fn, budget: ExplorationBudget):
        self.step_fn = step_fn
        self.budget = budget
        self._reach: dict = {}
        self._succ: dict = {}

    def steps(self, term) -> frozenset:
        if term not in self._succ:
            self._succ[term] = frozenset(self.step_fn(term))
        return self._succ[term]

    def reach(self, start, depth: int | None = None) -> DistSet:
        if not isinstance(start, Distribution):
            start = dist_point(start)
        depth = self.budget.depth if depth is None else depth
        key = (start, depth)
        if key not in self._reach:
            self._reach[key] = dist_multistep(
                start, self.steps, depth,
                combo_cap=self.budget.combo_cap, maximal=self.budget.maximal,
                state_cap=self.budget.state_cap,
            )
        return self._reach[key]

    def search(self, start) -> DistSet:
        return self.reach(start, self.budget.witness_depth)

    def points_closed_in(self, term, universe) -> bool:
        graph = point_graph([term], self.steps, depth=self.budget.depth,
                            state_cap=self.budget.state_cap)
        return all(p in universe for p in graph.points)


def _plausible(relation, delta: Distribution, theta: Distribution) -> bool:
    """Cheap necessary condition for a lifting to exist."""
    return all(any((a, b) in relation for b in theta) for a in delta) and all(
        any((a, b) in relation for a in delta) for b in theta
    )


def _lift(relation, delta, theta) -> Coupling | None:
    if not _plausible(relation, delta, theta):
        return None
    return lift_check(relation, delta, theta)


class WitnessHint:
    """Optional source of candidate witnesses, each verified by replay.

    ``forward`` yields selector paths from the point distribution of the
    right element; ``backward`` yields pairs of paths, one from the left
    element and one from the given right-hand distribution.
    """

    def forward(self, left, right, delta) -> Iterable:
        return ()

    def backward(self, left, right, theta) -> Iterable:
        return ()


def _forward_obligation(relation, explorer, pair, delta, hint) -> Obligation:
    left, right = pair
    for path in (hint.forward(left, right, delta) if hint else ()):
        try:
            theta = replay(dist_point(right), path, explorer.steps)
        except ValueError:
            continue
        coupling = _lift(relation, delta, theta)
        if coupling is not None:
            return Obligation(pair, "forward", delta, HOLDS, theta, coupling, "hint")
    candidates = explorer.search(right)
    for theta in candidates:
        coupling = _lift(relation, delta, theta)
        if coupling is not None:
            return Obligation(pair, "forward", delta, HOLDS, theta, coupling)
    status = FAILS if candidates.exhaustive else INCONCLUSIVE
    return Obligation(pair, "forward", delta, status)


def _backward_obligation(relation, explorer, pair, theta, hint, escape: bool) -> Obligation:
    left, right = pair
    for left_path, right_path in (hint.backward(left, right, theta) if hint else ()):
        if right_path and not escape:
            continue
        try:
            delta = replay(dist_point(left), left_path, explorer.steps)
            extended = replay(theta, right_path, explorer.steps)
        except ValueError:
            continue
        coupling = _lift(relation, delta, extended)
        if coupling is not None:
            return Obligation(pair, "backward", theta, HOLDS, (delta, extended), coupling, "hint")
    lefts = explorer.search(left)
    rights = explorer.search(theta) if escape else DistSet([theta])
    for extended in rights:
        for delta in lefts:
            coupling = _lift(relation, delta, extended)
            if coupling is not None:
                return Obligation(pair, "backward", theta, HOLDS, (delta, extended), coupling)
    exhaustive = lefts.exhaustive and rights.exhaustive
    return Obligation(pair, "backward", theta, FAILS if exhaustive else INCONCLUSIVE)


def _diagonal_obligation(relation, explorer, pair) -> Obligation | None:
    term = pair[0]
    if pair[0] == pair[1] and explorer.points_closed_in(term, relation.diagonal):
        return Obligation(pair, "diagonal", None, HOLDS, note="closed under reachability")
    return None


def _verdict(obligations: list, truncated: bool) -> Verdict:
    status = worst(o.status for o in obligations)
    if status == HOLDS and truncated:
        status = INCONCLUSIVE
    counter = next((o for o in obligations if o.status == FAILS), None)
    note = "obligation enumeration truncated by a cap" if truncated else ""
    return Verdict(status, obligations, counter, note)


def _check_weak(relation: Relation, step_fn, budget, hint, escape: bool) -> Verdict:
    explorer = step_fn if isinstance(step_fn, Explorer) else Explorer(step_fn, budget)
    obligations = []
    truncated = False
    for pair in relation:
        fast = _diagonal_obligation(relation, explorer, pair)
        if fast is not None:
            obligations.append(fast)
            continue
        left, right = pair
        lefts = explorer.reach(left)
        rights = explorer.reach(right)
        truncated = truncated or lefts.capped or rights.capped
        for delta in sorted(lefts, key=str):
            obligations.append(_forward_obligation(relation, explorer, pair, delta, hint))
        for theta in sorted(rights, key=str):
            obligations.append(_backward_obligation(relation, explorer, pair, theta, hint, escape))
    return _verdict(obligations, truncated)


def check_prob_correspondence_sim(relation: Relation, step_fn, budget: ExplorationBudget = ExplorationBudget(),
                                  hint: WitnessHint | None = None) -> Verdict:
    """Both clauses of probabilistic correspondence simulation, bounded."""
    return _check_weak(relation, step_fn, budget, hint, escape=True)


def check_prob_bisimulation(relation: Relation, step_fn, budget: ExplorationBudget = ExplorationBudget(),
                            hint: WitnessHint | None = None) -> Verdict:
    return _check_weak(relation, step_fn, budget, hint, escape=False)


def check_strong_prob_bisimulation(relation: Relation, step_fn) -> Verdict:
    """Single reductions on both sides, matched through the lifted relation."""
    succ: dict = {}

    def steps(term):
        if term not in succ:
            succ[term] = sorted(frozenset(step_fn(term)), key=str)
        return succ[term]

    obligations = []
    for pair in relation:
        left, right = pair
        for clause, mine, theirs, flip in (("forward", left, right, False),
                                           ("backward", right, left, True)):
            for dist in steps(mine):
                match = None
                for other in steps(theirs):
                    args = (other, dist) if flip else (dist, other)
                    coupling = _lift(relation, *args)
                    if coupling is not None:
                        match = Obligation(pair, clause, dist, HOLDS, other, coupling)
                        break
                obligations.append(match or Obligation(pair, clause, dist, FAILS))
    return _verdict(obligations, False)


def check_preorder(relation: Relation, universe: Iterable) -> Verdict:
    for x in sorted(universe, key=term_key):
        if (x, x) not in relation:
            return Verdict(FAILS, counterexample=("reflexivity", x))
    for a, b in relation:
        for c in sorted(relation.image(b), key=term_key):
            if (a, c) not in relation:
                return Verdict(FAILS, counterexample=("transitivity", a, b, c))
    return Verdict(HOLDS, witness="reflexive and transitive")


# ---------------------------------------------------------------- fixpoints

BISIM, STRONG, CORR_SIM = "bisim", "strong", "corr-sim"


def greatest_fixpoint_bisim(states: Iterable, step_fn, budget: ExplorationBudget = ExplorationBudget(),
                            mode: str = BISIM) -> Relation:
    """Largest relation over ``states`` satisfying the chosen definition.

    Starts from all pairs and removes, sweep by sweep, every pair with an
    obligation that cannot be matched under the relation of the previous
    sweep. Witness sets that were cut short make the result ``partial``.
    """
    if mode not in (BISIM, STRONG, CORR_SIM):
        raise ValueError(f"unknown mode {mode!r}")
    states = sorted(set(states), key=term_key)
    explorer = Explorer(step_fn, budget)
    partial = False
    moves = {}
    for s in states:
        if mode == STRONG:
            moves[s] = DistSet(explorer.steps(s))
        else:
            moves[s] = explorer.reach(s)
        partial = partial or moves[s].capped
    escapes: dict = {}

    def extensions(theta):
        if theta not in escapes:
            escapes[theta] = explorer.reach(theta) if mode == CORR_SIM else DistSet([theta])
        return escapes[theta]

    related = {(a, b) for a in states for b in states}
    while True:
        current = Relation(related)
        doomed = set()
        for a, b in sorted(related, key=lambda p: (term_key(p[0]), term_key(p[1]))):
            if not all(any(_lift(current, d, t) for t in moves[b]) for d in moves[a]):
                doomed.add((a, b))
                continue
            for theta in moves[b]:
                if not any(_lift(current, d, t) for t in extensions(theta) for d in moves[a]):
                    doomed.add((a, b))
                    break
        if not doomed:
            return Relation(related, partial=partial)
        related -= doomed


def build_induced_relation(corpus: Iterable, encode: Callable, target_relation: Relation) -> Relation:
    """Reflexive and transitive closure of ``target_relation`` plus ``(S, encode(S))``."""
    corpus = list(corpus)
    images = [(s, encode(s)) for s in corpus]
    universe = set(corpus) | {t for _, t in images} | target_relation.field
    base = Relation(target_relation.explicit_pairs() + images, target_relation.diagonal,
                    partial=target_relation.partial)
    return base.closure(universe)


def lifted_pairs(relation: Relation, deltas: Iterable, thetas: Iterable) -> Iterator:
    """All ``(delta, theta, coupling)`` combinations in the lifted relation."""
    for delta, theta in itertools.product(deltas, thetas):
        coupling = _lift(relation, delta, theta)
        if coupling is not None:
            yield delta, theta, coupling
