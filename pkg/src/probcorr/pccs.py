"""Probabilistic CCS: syntax, labelled semantics, reductions and barbs.

Processes are immutable trees. Besides guarded probabilistic choice, parallel
composition, restriction, relabelling and constant calls, the syntax has an
explicit inert process and opaque named leaves (``Stub``) that never move,
which stand for arbitrary continuations in small examples.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from ._terms import fresh_name, node
from .prob_core import Distribution, dist_point, point_graph

IN, OUT, TAU = "in", "out", "tau"
OK = "ok"  # the success observable


@node
class Action:
    """A guard or transition label: input ``a``, output ``'a`` or ``tau``."""

    kind: str
    name: str | None = None

    def __post_init__(self):
        if self.kind not in (IN, OUT, TAU):
            raise ValueError(f"unknown action kind {self.kind!r}")
        if (self.kind == TAU) != (self.name is None):
            raise ValueError("tau carries no name; input and output need one")

    def renamed(self, mapping: Mapping) -> "Action":
        if self.name is None:
            return self
        return Action(self.kind, mapping.get(self.name, self.name))

    def __str__(self):
        return {IN: self.name, OUT: f"'{self.name}", TAU: "tau"}[self.kind]


PccsGuard = PccsLabel = Action


class Process:
    """Base class of process terms."""

    __slots__ = ()

    def __str__(self):
        return pretty(self)

    def __repr__(self):
        return f"<{pretty(self)}>"


@node
class Choice(Process):
    guard: Action
    branches: tuple

    def __post_init__(self):
        branches = tuple((Fraction(p), q) for p, q in self.branches)
        object.__setattr__(self, "branches", branches)
        if not branches:
            raise ValueError("a choice needs at least one branch")
        if any(p <= 0 for p, _ in branches):
            raise ValueError("branch probabilities must be positive")
        total = sum((p for p, _ in branches), Fraction(0))
        if total != 1:
            raise ValueError(f"branch probabilities sum to {total}")


@node
class Par(Process):
    left: Process
    right: Process


@node
class Restrict(Process):
    body: Process
    names: frozenset

    def __post_init__(self):
        object.__setattr__(self, "names", frozenset(self.names))
        if not self.names:
            raise ValueError("restriction needs at least one name")


@node
class Relabel(Process):
    """``body[f]``; ``mapping`` lists the non-identity pairs of ``f``."""

    body: Process
    mapping: tuple

    def __post_init__(self):
        pairs = tuple(sorted((a, b) for a, b in dict(self.mapping).items() if a != b))
        object.__setattr__(self, "mapping", pairs)

    @property
    def fn(self) -> dict:
        return dict(self.mapping)


@node
class Call(Process):
    constant: str
    args: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@node
class Success(Process):
    pass


@node
class Inert(Process):
    pass


@node
class Stub(Process):
    name: str


@node
class Definition:
    params: tuple
    body: Process

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        if len(set(self.params)) != len(self.params):
            raise ValueError("definition parameters must be pairwise distinct")
        extra = pccs_free_names(self.body) - set(self.params)
        if extra:
            raise ValueError(f"definition body has free names {sorted(extra)} not among its parameters")


class DefEnv(Mapping):
    """Immutable, hashable map from constant identifiers to definitions."""

    __slots__ = ("_defs", "_hash")

    def __init__(self, defs: Mapping | Iterable = ()):
        items = defs.items() if isinstance(defs, Mapping) else defs
        table = {}
        for name, definition in items:
            if not isinstance(definition, Definition):
                params, body = definition
                definition = Definition(tuple(params), body)
            if name in table:
                raise ValueError(f"duplicate definition of {name}")
            table[name] = definition
        self._defs = dict(sorted(table.items()))
        self._hash = hash(tuple(self._defs.items()))

    def __getitem__(self, name):
        return self._defs[name]

    def __iter__(self):
        return iter(self._defs)

    def __len__(self):
        return len(self._defs)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return isinstance(other, DefEnv) and self._defs == other._defs

    def __repr__(self):
        return f"DefEnv({self._defs!r})"


EMPTY_ENV = DefEnv()


class UnknownConstant(LookupError):
    pass


class ArityMismatch(ValueError):
    pass


# ---------------------------------------------------------------- names

@lru_cache(maxsize=None)
def pccs_free_names(proc: Process) -> frozenset:
    if isinstance(proc, Choice):
        names = set() if proc.guard.name is None else {proc.guard.name}
        for _, branch in proc.branches:
            names |= pccs_free_names(branch)
        return frozenset(names)
    if isinstance(proc, Par):
        return pccs_free_names(proc.left) | pccs_free_names(proc.right)
    if isinstance(proc, Restrict):
        return pccs_free_names(proc.body) - proc.names
    if isinstance(proc, Relabel):
        f = proc.fn
        return frozenset(f.get(n, n) for n in pccs_free_names(proc.body))
    if isinstance(proc, Call):
        return frozenset(proc.args)
    return frozenset()


def all_names(proc: Process) -> frozenset:
    """Every name occurring in ``proc``, bound or free."""
    if isinstance(proc, Choice):
        names = set() if proc.guard.name is None else {proc.guard.name}
        for _, branch in proc.branches:
            names |= all_names(branch)
        return frozenset(names)
    if isinstance(proc, Par):
        return all_names(proc.left) | all_names(proc.right)
    if isinstance(proc, Restrict):
        return all_names(proc.body) | proc.names
    if isinstance(proc, Relabel):
        return all_names(proc.body) | {n for pair in proc.mapping for n in pair}
    if isinstance(proc, Call):
        return frozenset(proc.args)
    return frozenset()


def substitute(proc: Process, mapping: Mapping) -> Process:
    """Capture-avoiding simultaneous substitution of free names."""
    mapping = {a: b for a, b in mapping.items() if a != b}
    if not mapping:
        return proc
    return _subst(proc, mapping)


def _subst(proc, sigma):
    if isinstance(proc, Choice):
        return Choice(
            proc.guard.renamed(sigma),
            tuple((p, _subst(q, sigma)) for p, q in proc.branches),
        )
    if isinstance(proc, Par):
        return Par(_subst(proc.left, sigma), _subst(proc.right, sigma))
    if isinstance(proc, Restrict):
        free = pccs_free_names(proc.body)
        inner = {a: b for a, b in sigma.items() if a not in proc.names and a in free}
        if not inner:
            return proc
        incoming = set(inner.values())
        clash = proc.names & incoming
        body, names = proc.body, set(proc.names)
        if clash:
            avoid = set(all_names(proc.body)) | incoming | set(inner)
            renaming = {}
            for old in sorted(clash):
                new = fresh_name(old, avoid)
                avoid.add(new)
                renaming[old] = new
            body = substitute(body, renaming)
            names = (names - clash) | set(renaming.values())
        return Restrict(_subst(body, inner), frozenset(names))
    if isinstance(proc, Relabel):
        f = proc.fn
        composed = {n: sigma.get(f.get(n, n), f.get(n, n)) for n in set(f) | set(sigma)}
        composed = {a: b for a, b in composed.items() if a != b}
        if not composed:
            return proc.body
        return Relabel(proc.body, tuple(composed.items()))
    if isinstance(proc, Call):
        return Call(proc.constant, tuple(sigma.get(a, a) for a in proc.args))
    return proc


def unfold(call: Call, env: DefEnv) -> Process:
    """The body of ``call``'s definition with arguments for parameters."""
    if call.constant not in env:
        raise UnknownConstant(f"no definition for constant {call.constant}")
    definition = env[call.constant]
    if len(definition.params) != len(call.args):
        raise ArityMismatch(
            f"{call.constant} expects {len(definition.params)} arguments, got {len(call.args)}"
        )
    return substitute(definition.body, dict(zip(definition.params, call.args)))


# ---------------------------------------------------------------- semantics

def _par_right(dist: Distribution, right: Process) -> Distribution:
    return dist.map(lambda t: Par(t, right))


def _par_left(left: Process, dist: Distribution) -> Distribution:
    return dist.map(lambda t: Par(left, t))


@lru_cache(maxsize=None)
def pccs_labelled_steps(proc: Process, env: DefEnv = EMPTY_ENV) -> frozenset:
    """All ``(label, distribution)`` transitions of ``proc``."""
    steps: dict = {}
    if isinstance(proc, Choice):
        steps[(proc.guard, Distribution(tuple((q, p) for p, q in proc.branches)))] = None
    elif isinstance(proc, Par):
        left_steps = pccs_labelled_steps(proc.left, env)
        right_steps = pccs_labelled_steps(proc.right, env)
        for label, dist in left_steps:
            steps[(label, _par_right(dist, proc.right))] = None
        for label, dist in right_steps:
            steps[(label, _par_left(proc.left, dist))] = None
        for l_label, l_dist in left_steps:
            if l_label.kind == TAU:
                continue
            for r_label, r_dist in right_steps:
                if r_label.name == l_label.name and {l_label.kind, r_label.kind} == {IN, OUT}:
                    product = Distribution(
                        (Par(a, b), p * q) for a, p in l_dist.items() for b, q in r_dist.items()
                    )
                    steps[(Action(TAU), product)] = None
    elif isinstance(proc, Restrict):
        for label, dist in pccs_labelled_steps(proc.body, env):
            if label.name not in proc.names:
                steps[(label, dist.map(lambda t: Restrict(t, proc.names)))] = None
    elif isinstance(proc, Relabel):
        f = proc.fn
        for label, dist in pccs_labelled_steps(proc.body, env):
            steps[(label.renamed(f), dist.map(lambda t: Relabel(t, proc.mapping)))] = None
    elif isinstance(proc, Call):
        steps[(Action(TAU), dist_point(unfold(proc, env)))] = None
    return frozenset(steps)


@lru_cache(maxsize=None)
def pccs_reduce(proc: Process, env: DefEnv = EMPTY_ENV) -> frozenset:
    """Distributions reachable by one reduction (a tau transition)."""
    return frozenset(d for label, d in pccs_labelled_steps(proc, env) if label.kind == TAU)


def step_function(env: DefEnv = EMPTY_ENV):
    return lambda proc: pccs_reduce(proc, env)


def _unguarded_success(proc: Process) -> bool:
    if isinstance(proc, Success):
        return True
    if isinstance(proc, Par):
        return _unguarded_success(proc.left) or _unguarded_success(proc.right)
    if isinstance(proc, (Restrict, Relabel)):
        return _unguarded_success(proc.body)
    return False


def pccs_has_barb(proc: Process, env: DefEnv, obs) -> bool:
    """``obs`` is :data:`OK` or an input/output :class:`Action`."""
    if obs == OK:
        return _unguarded_success(proc)
    return any(label == obs for label, _ in pccs_labelled_steps(proc, env))


def pccs_reach_barb(proc: Process, env: DefEnv, obs, depth: int | None,
                    state_cap: int | None = None) -> bool:
    """Whether some point reachable in at most ``depth`` reductions has the barb.

    A point lies in the support of a distribution reachable in ``k``
    distribution steps exactly when a chain of ``k`` or fewer single-point
    reductions leads to it, so the search runs on the point graph.
    """
    return reach_barb_search(proc, env, obs, depth, state_cap)[0]


def reach_barb_search(proc, env, obs, depth, state_cap=None) -> tuple[bool, bool]:
    """``(found, exhaustive)`` for the reachability of a barb."""
    graph = point_graph([proc], step_function(env), depth=depth, state_cap=state_cap)
    found = any(pccs_has_barb(p, env, obs) for p in graph.points)
    return found, graph.exhaustive


# ---------------------------------------------------------------- printing

def _atom(proc: Process) -> str:
    text = pretty(proc)
    return f"({text})" if isinstance(proc, Par) else text


def _prob(p: Fraction) -> str:
    return str(p)


@lru_cache(maxsize=None)
def pretty(proc: Process) -> str:
    if isinstance(proc, Inert):
        return "0"
    if isinstance(proc, Success):
        return "ok"
    if isinstance(proc, Stub):
        return proc.name
    if isinstance(proc, Choice):
        inner = " + ".join(f"{_prob(p)}: {pretty(q)}" for p, q in proc.branches)
        return f"{proc.guard}.({inner})"
    if isinstance(proc, Par):
        right = pretty(proc.right)
        if isinstance(proc.right, Par):
            right = f"({right})"
        return f"{pretty(proc.left)} | {right}"
    if isinstance(proc, Restrict):
        return f"({pretty(proc.body)})\\{{{','.join(sorted(proc.names))}}}"
    if isinstance(proc, Relabel):
        pairs = ", ".join(f"{a}->{b}" for a, b in proc.mapping)
        return f"{_atom(proc.body)}[{pairs}]"
    if isinstance(proc, Call):
        return f"{proc.constant}<{','.join(proc.args)}>"
    raise TypeError(f"not a process: {proc!r}")


def pretty_env(env: DefEnv) -> str:
    return "\n".join(
        f"def {name}({','.join(d.params)}) = {pretty(d.body)}" for name, d in env.items()
    )


def constants_used(proc: Process) -> frozenset:
    if isinstance(proc, Choice):
        out = set()
        for _, branch in proc.branches:
            out |= constants_used(branch)
        return frozenset(out)
    if isinstance(proc, Par):
        return constants_used(proc.left) | constants_used(proc.right)
    if isinstance(proc, (Restrict, Relabel)):
        return constants_used(proc.body)
    if isinstance(proc, Call):
        return frozenset({proc.constant})
    return frozenset()


def par_all(procs: Iterable[Process]) -> Process:
    """Left-nested parallel composition; the empty composition is inert."""
    procs = list(procs)
    if not procs:
        return Inert()
    out = procs[0]
    for proc in procs[1:]:
        out = Par(out, proc)
    return out


@dataclass(frozen=True)
class SourceProgram:
    """A main term together with its definitions."""

    term: Process
    env: DefEnv = EMPTY_ENV

    def __str__(self):
        defs = pretty_env(self.env)
        return f"{defs}\n{pretty(self.term)}" if defs else pretty(self.term)
