"""Exact finite probability distributions, distribution steps and lifting.

Probabilities are :class:`fractions.Fraction` values throughout. Terms can be
any hashable value; the calculus modules supply canonical term forms when
exact comparison up to a congruence is needed.
"""

from __future__ import annotations

import itertools
from collections import deque
from collections.abc import Callable, Hashable, Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction

DEFAULT_COMBO_CAP = 10_000

Prob = Fraction


def as_prob(value) -> Fraction:
    """Coerce ``value`` to a probability in (0, 1]."""
    prob = Fraction(value)
    if not 0 < prob <= 1:
        raise ValueError(f"probability out of range: {prob}")
    return prob


class Distribution(Mapping):
    """An immutable finite-support distribution with mass exactly one.

    Equal terms are merged by adding their weights; zero weights are dropped.
    Iteration follows first-insertion order, which keeps enumeration
    deterministic for terms that have no natural ordering.
    """

    __slots__ = ("_weights", "_hash", "_text")

    def __init__(self, weights: Mapping | Iterable = ()):
        pairs = weights.items() if isinstance(weights, Mapping) else weights
        merged: dict = {}
        for term, weight in pairs:
            weight = Fraction(weight)
            if weight < 0:
                raise ValueError(f"negative weight {weight} for {term!r}")
            if weight:
                merged[term] = merged.get(term, Fraction(0)) + weight
        total = sum(merged.values(), Fraction(0))
        if total != 1:
            raise ValueError(f"weights sum to {total}, not 1")
        self._weights = merged
        self._hash = hash(frozenset(merged.items()))
        self._text = None

    def __getitem__(self, term):
        return self._weights[term]

    def __iter__(self):
        return iter(self._weights)

    def __len__(self):
        return len(self._weights)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if not isinstance(other, Distribution):
            return NotImplemented
        return self._hash == other._hash and self._weights == other._weights

    def __repr__(self):
        body = ", ".join(f"{t!r}: {w}" for t, w in self._weights.items())
        return f"Distribution({{{body}}})"

    def __str__(self):
        """Canonical text: support points in the order of their own text."""
        if self._text is None:
            items = sorted((str(t), w) for t, w in self._weights.items())
            self._text = "{" + ", ".join(f"{t}: {w}" for t, w in items) + "}"
        return self._text

    @property
    def support(self) -> frozenset:
        return frozenset(self._weights)

    def is_point(self) -> bool:
        return len(self._weights) == 1

    def map(self, fn: Callable) -> "Distribution":
        """Push the distribution forward along ``fn``, merging equal images."""
        return Distribution((fn(t), w) for t, w in self._weights.items())


def dist_point(term: Hashable) -> Distribution:
    return Distribution({term: Fraction(1)})


def dist_mix(parts: Iterable[tuple]) -> Distribution:
    """Weighted sum of distributions; the part weights must sum to one."""
    parts = [(Fraction(p), d) for p, d in parts]
    total = sum((p for p, _ in parts), Fraction(0))
    if total != 1:
        raise ValueError(f"mixture weights sum to {total}, not 1")
    if any(p <= 0 for p, _ in parts):
        raise ValueError("mixture weights must be positive")
    return Distribution((t, p * w) for p, d in parts for t, w in d.items())


class DistSet(frozenset):
    """A set of distributions that remembers whether exploration was cut short.

    ``capped`` means a combination or state cap dropped candidates, so the set
    may be missing members even within the requested depth. ``open_frontier``
    means the depth bound was reached while some member could still move.
    """

    capped: bool
    open_frontier: bool

    def __new__(cls, items=(), capped=False, open_frontier=False):
        obj = super().__new__(cls, items)
        obj.capped = capped
        obj.open_frontier = open_frontier
        return obj

    @property
    def exhaustive(self) -> bool:
        return not (self.capped or self.open_frontier)


def _successor_options(delta: Distribution, step_fn) -> list[tuple]:
    options = []
    for term in delta:
        succs = sorted(set(step_fn(term)), key=str)
        options.append((term, succs))
    return options


def dist_successors(
    delta: Distribution,
    step_fn: Callable[[Hashable], Iterable[Distribution]],
    *,
    combo_cap: int = DEFAULT_COMBO_CAP,
    maximal: bool = False,
) -> tuple[list, bool]:
    """One distribution step with its selectors.

    Returns ``(successors, capped)`` where ``successors`` lists pairs of a
    selector (a dict from the moving points to their chosen successor) and
    the resulting distribution, in enumeration order and without repeated
    results.
    """
    options = _successor_options(delta, step_fn)
    if not any(succs for _, succs in options):
        return [], False
    if maximal:
        choice_lists = [succs if succs else [None] for _, succs in options]
    else:
        choice_lists = [[None, *succs] for _, succs in options]
    results = {}
    capped = False
    count = 0
    for combo in itertools.product(*choice_lists):
        if not maximal and all(c is None for c in combo):
            continue
        if count >= combo_cap:
            capped = True
            break
        count += 1
        mixed = _mix_choices(delta, options, combo)
        if mixed not in results:
            results[mixed] = {term: c for (term, _), c in zip(options, combo) if c is not None}
    return [(choices, mixed) for mixed, choices in results.items()], capped


def dist_step(
    delta: Distribution,
    step_fn: Callable[[Hashable], Iterable[Distribution]],
    *,
    combo_cap: int = DEFAULT_COMBO_CAP,
    maximal: bool = False,
) -> DistSet:
    """All distributions reachable from ``delta`` in one distribution step.

    Every support point either moves to one of its successors or stays put,
    and at least one point moves. With ``maximal`` set, every point that can
    move does move. At most ``combo_cap`` selector functions are tried.
    """
    succs, capped = dist_successors(delta, step_fn, combo_cap=combo_cap, maximal=maximal)
    return DistSet((d for _, d in succs), capped=capped)


def _mix_choices(delta, options, combo) -> Distribution:
    pairs = []
    for (term, _), choice in zip(options, combo):
        weight = delta[term]
        if choice is None:
            pairs.append((term, weight))
        else:
            pairs.extend((t, weight * w) for t, w in choice.items())
    return Distribution(pairs)


def apply_choices(delta: Distribution, choices: Mapping, step_fn=None) -> Distribution:
    """Perform one distribution step with an explicit selector.

    ``choices`` maps some support points to the successor they take; other
    points stay. When ``step_fn`` is given every choice is validated against
    it, which makes a recorded path independently checkable.
    """
    if not any(term in delta for term in choices):
        raise ValueError("a distribution step needs at least one moving point")
    pairs = []
    for term, weight in delta.items():
        if term in choices:
            succ = choices[term]
            if step_fn is not None and succ not in set(step_fn(term)):
                raise ValueError(f"{succ!r} is not a successor of {term!r}")
            pairs.extend((t, weight * w) for t, w in succ.items())
        else:
            pairs.append((term, weight))
    return Distribution(pairs)


def dist_multistep(
    delta: Distribution,
    step_fn,
    depth: int,
    *,
    combo_cap: int = DEFAULT_COMBO_CAP,
    maximal: bool = False,
    state_cap: int | None = None,
) -> DistSet:
    """Distributions reachable in zero to ``depth`` distribution steps."""
    return reach_with_paths(delta, step_fn, depth, combo_cap=combo_cap, maximal=maximal,
                            state_cap=state_cap).reached


@dataclass(frozen=True)
class Reachability:
    """Reached distributions with one shortest selector path to each."""

    reached: DistSet
    parent: dict

    def path(self, delta: Distribution) -> list:
        steps = []
        while self.parent[delta] is not None:
            previous, choices = self.parent[delta]
            steps.append(choices)
            delta = previous
        return steps[::-1]


def reach_with_paths(
    delta: Distribution,
    step_fn,
    depth: int,
    *,
    combo_cap: int = DEFAULT_COMBO_CAP,
    maximal: bool = False,
    state_cap: int | None = None,
) -> Reachability:
    if depth < 0:
        raise ValueError("depth must be non-negative")
    parent = {delta: None}
    frontier = [delta]
    capped = False
    for _ in range(depth):
        nxt = []
        for current in frontier:
            succs, cut = dist_successors(current, step_fn, combo_cap=combo_cap, maximal=maximal)
            capped = capped or cut
            for choices, succ in succs:
                if succ in parent:
                    continue
                if state_cap is not None and len(parent) >= state_cap:
                    capped = True
                    break
                parent[succ] = (current, choices)
                nxt.append(succ)
        frontier = nxt
        if not frontier:
            break
    open_frontier = any(_can_move(current, step_fn) for current in frontier)
    return Reachability(DistSet(parent, capped=capped, open_frontier=open_frontier), parent)


def _can_move(delta, step_fn) -> bool:
    return any(any(True for _ in step_fn(term)) for term in delta)


@dataclass(frozen=True)
class PointGraph:
    """Support-point successor graph explored breadth first from some roots."""

    depth_of: dict
    edges: dict
    exhaustive: bool

    @property
    def points(self):
        return self.depth_of.keys()


def point_graph(roots: Iterable, step_fn, *, depth: int | None = None,
                state_cap: int | None = None) -> PointGraph:
    """Explore the graph where a point links to every support point it can reach
    in one step. ``depth=None`` explores until closure or the state cap."""
    depth_of = {}
    edges = {}
    queue = deque()
    for root in roots:
        if root not in depth_of:
            depth_of[root] = 0
            queue.append(root)
    exhaustive = True
    while queue:
        term = queue.popleft()
        level = depth_of[term]
        if depth is not None and level >= depth:
            if _can_move(dist_point(term), step_fn):
                exhaustive = False
            continue
        targets = []
        for succ in step_fn(term):
            for nxt in succ:
                targets.append(nxt)
                if nxt not in depth_of:
                    if state_cap is not None and len(depth_of) >= state_cap:
                        exhaustive = False
                        continue
                    depth_of[nxt] = level + 1
                    queue.append(nxt)
        edges[term] = tuple(dict.fromkeys(targets))
    return PointGraph(depth_of, edges, exhaustive)


def find_cycle(graph: PointGraph) -> list | None:
    """Return a cycle of the explored graph as a list of points, if any."""
    colour = {}
    for root in graph.depth_of:
        if root in colour:
            continue
        stack = [(root, iter(graph.edges.get(root, ())))]
        colour[root] = 1
        path = [root]
        while stack:
            node, children = stack[-1]
            advanced = False
            for child in children:
                state = colour.get(child, 0)
                if state == 1:
                    return path[path.index(child):] + [child]
                if state == 0 and child in graph.edges:
                    colour[child] = 1
                    path.append(child)
                    stack.append((child, iter(graph.edges.get(child, ()))))
                    advanced = True
                    break
            if not advanced:
                colour[node] = 2
                path.pop()
                stack.pop()
    return None


@dataclass(frozen=True)
class Coupling:
    """Weights on related pairs whose marginals are the two distributions."""

    weights: Mapping = field(default_factory=dict)

    def left_marginal(self) -> dict:
        out: dict = {}
        for (a, _), w in self.weights.items():
            out[a] = out.get(a, Fraction(0)) + w
        return out

    def right_marginal(self) -> dict:
        out: dict = {}
        for (_, b), w in self.weights.items():
            out[b] = out.get(b, Fraction(0)) + w
        return out

    def validates(self, related, left: Distribution, right: Distribution) -> bool:
        related = _as_predicate(related)
        if any(w <= 0 for w in self.weights.values()):
            return False
        if not all(related(a, b) for a, b in self.weights):
            return False
        return self.left_marginal() == dict(left) and self.right_marginal() == dict(right)


def _as_predicate(related) -> Callable:
    if callable(related):
        return related
    return lambda a, b: (a, b) in related


def lift_check(related, left: Distribution, right: Distribution) -> Coupling | None:
    """Decide whether ``(left, right)`` lies in the lifting of a relation.

    ``related`` is either a container of pairs or a binary predicate. The
    question is a transportation problem on the bipartite graph of related
    support points; it is answered by an exact max-flow, and the flow on the
    middle edges is the returned coupling.
    """
    related = _as_predicate(related)
    lefts = list(left)
    rights = list(right)
    adjacency = {
        i: [j for j, b in enumerate(rights) if related(a, b)] for i, a in enumerate(lefts)
    }
    if any(not adj for adj in adjacency.values()):
        return None
    flow = _max_flow(
        [left[a] for a in lefts], [right[b] for b in rights], adjacency
    )
    if flow is None:
        return None
    weights = {(lefts[i], rights[j]): w for (i, j), w in flow.items() if w > 0}
    return Coupling(weights)


def _max_flow(supply, demand, adjacency) -> dict | None:
    """Edmonds-Karp on source -> left -> right -> sink with exact capacities.

    Returns the middle-edge flow if it saturates every supply, else None.
    """
    n_left = len(supply)
    n_right = len(demand)
    source, sink = "s", "t"
    capacity: dict = {}
    neighbours: dict = {source: set(), sink: set()}

    def add_edge(u, v, cap):
        capacity[(u, v)] = capacity.get((u, v), Fraction(0)) + cap
        capacity.setdefault((v, u), Fraction(0))
        neighbours.setdefault(u, set()).add(v)
        neighbours.setdefault(v, set()).add(u)

    for i in range(n_left):
        add_edge(source, ("l", i), supply[i])
        for j in adjacency[i]:
            add_edge(("l", i), ("r", j), supply[i])
    for j in range(n_right):
        add_edge(("r", j), sink, demand[j])

    residual = dict(capacity)
    total = Fraction(0)
    while True:
        parent = {source: None}
        queue = deque([source])
        while queue and sink not in parent:
            u = queue.popleft()
            for v in sorted(neighbours.get(u, ()), key=repr):
                if v not in parent and residual[(u, v)] > 0:
                    parent[v] = u
                    queue.append(v)
        if sink not in parent:
            break
        bottleneck = None
        v = sink
        while parent[v] is not None:
            u = parent[v]
            cap = residual[(u, v)]
            bottleneck = cap if bottleneck is None else min(bottleneck, cap)
            v = u
        v = sink
        while parent[v] is not None:
            u = parent[v]
            residual[(u, v)] -= bottleneck
            residual[(v, u)] += bottleneck
            v = u
        total += bottleneck
    if total != sum(supply, Fraction(0)):
        return None
    flow = {}
    for i in range(n_left):
        for j in adjacency[i]:
            used = capacity[(("l", i), ("r", j))] - residual[(("l", i), ("r", j))]
            if used > 0:
                flow[(i, j)] = used
    return flow
