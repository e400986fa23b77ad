"""The probabilistic pi-calculus: syntax, structural congruence, semantics.

Transitions are grouped into bundles: a bundle is the set of alternatives
produced by one rule instance, each with a label, a probability and a
successor. A selecting output yields one bundle with all of its branches,
every other prefix yields unit bundles. Communication pairs an output bundle
with matching unit inputs and produces a bundle of silent alternatives.

Plain input (``x?(y).P`` and replicated input) accepts both plain outputs and
any branch of a selecting output. Plain outputs carry free names, which are
substituted into the receiver; a restricted object is extruded and its
restriction closes over both residues.
"""

from __future__ import annotations

import itertools
import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from ._terms import fresh_name, node
from .prob_core import Distribution, point_graph

SEL_IN, SEL_OUT, IN, OUT, TAU = "selIn", "selOut", "in", "out", "tau"
OK = "ok"


class Process:
    __slots__ = ()

    def __str__(self):
        return pretty(self)

    def __repr__(self):
        return f"<{pretty(self)}>"


def _distinct(names) -> tuple:
    names = tuple(names)
    if len(set(names)) != len(names):
        raise ValueError(f"names in a vector must be pairwise distinct: {names}")
    return names


@node
class Nil(Process):
    pass


@node
class Success(Process):
    pass


@node
class Stub(Process):
    """An opaque leaf standing for some fixed process; it never moves."""

    name: str


@node
class BranchIn(Process):
    """``x?{i(y): P, ...}``; ``branches`` holds ``(index, params, cont)``."""

    subject: str
    branches: tuple

    def __post_init__(self):
        branches = tuple(sorted((int(i), _distinct(ys), p) for i, ys, p in self.branches))
        object.__setattr__(self, "branches", branches)
        indices = [i for i, _, _ in branches]
        if not branches or len(set(indices)) != len(indices) or min(indices) < 1:
            raise ValueError("branch indices must be distinct positive integers")


@node
class SelectOut(Process):
    """``x!{p i(y): P, ...}``; ``branches`` holds ``(index, prob, args, cont)``.

    The argument names of each branch are bound in its continuation.
    """

    subject: str
    branches: tuple

    def __post_init__(self):
        branches = tuple(
            sorted((int(i), Fraction(p), _distinct(ys), q) for i, p, ys, q in self.branches)
        )
        object.__setattr__(self, "branches", branches)
        indices = [b[0] for b in branches]
        if not branches or len(set(indices)) != len(indices) or min(indices) < 1:
            raise ValueError("branch indices must be distinct positive integers")
        if any(b[1] <= 0 for b in branches):
            raise ValueError("branch probabilities must be positive")
        total = sum((b[1] for b in branches), Fraction(0))
        if total != 1:
            raise ValueError(f"branch probabilities sum to {total}")


@node
class InPrefix(Process):
    """Plain input ``x?(y).P``."""

    subject: str
    params: tuple
    cont: Process

    def __post_init__(self):
        object.__setattr__(self, "params", _distinct(self.params))


@node
class RepIn(Process):
    """Replicated input ``!x(y).P``."""

    subject: str
    params: tuple
    body: Process

    def __post_init__(self):
        object.__setattr__(self, "params", _distinct(self.params))


@node
class OutPrefix(Process):
    """Plain output ``x!<y>.P`` of free names."""

    subject: str
    args: tuple
    cont: Process

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@node
class Restrict(Process):
    name: str
    body: Process


@node
class Par(Process):
    left: Process
    right: Process


def par_all(procs: Iterable[Process]) -> Process:
    procs = list(procs)
    if not procs:
        return Nil()
    out = procs[0]
    for proc in procs[1:]:
        out = Par(out, proc)
    return out


def restrict_all(names: Iterable[str], body: Process) -> Process:
    for name in reversed(list(names)):
        body = Restrict(name, body)
    return body


# ---------------------------------------------------------------- names

def name_sort(name: str) -> str:
    """The sort of a name, which alpha-renaming in normal forms preserves.

    Canonical bound names look like ``sort~k``. Otherwise reserved names
    (leading ``#``) are sorted by their first letter and other names by the
    text before their first underscore; plain names have the empty sort.
    """
    if "~" in name:
        return name.split("~", 1)[0]
    base = re.split("['\x00]", name, maxsplit=1)[0]
    if base.startswith("#"):
        return base[:2]
    if "_" in base:
        return base.split("_", 1)[0]
    return ""


@lru_cache(maxsize=None)
def ppi_free_names(proc: Process) -> frozenset:
    if isinstance(proc, BranchIn):
        out = {proc.subject}
        for _, params, cont in proc.branches:
            out |= ppi_free_names(cont) - set(params)
        return frozenset(out)
    if isinstance(proc, SelectOut):
        out = {proc.subject}
        for _, _, args, cont in proc.branches:
            out |= ppi_free_names(cont) - set(args)
        return frozenset(out)
    if isinstance(proc, InPrefix):
        return frozenset({proc.subject}) | (ppi_free_names(proc.cont) - set(proc.params))
    if isinstance(proc, RepIn):
        return frozenset({proc.subject}) | (ppi_free_names(proc.body) - set(proc.params))
    if isinstance(proc, OutPrefix):
        return frozenset({proc.subject, *proc.args}) | ppi_free_names(proc.cont)
    if isinstance(proc, Restrict):
        return ppi_free_names(proc.body) - {proc.name}
    if isinstance(proc, Par):
        return ppi_free_names(proc.left) | ppi_free_names(proc.right)
    return frozenset()


@lru_cache(maxsize=None)
def all_names(proc: Process) -> frozenset:
    if isinstance(proc, BranchIn):
        out = {proc.subject}
        for _, params, cont in proc.branches:
            out |= set(params) | all_names(cont)
        return frozenset(out)
    if isinstance(proc, SelectOut):
        out = {proc.subject}
        for _, _, args, cont in proc.branches:
            out |= set(args) | all_names(cont)
        return frozenset(out)
    if isinstance(proc, (InPrefix, RepIn)):
        inner = proc.cont if isinstance(proc, InPrefix) else proc.body
        return frozenset({proc.subject, *proc.params}) | all_names(inner)
    if isinstance(proc, OutPrefix):
        return frozenset({proc.subject, *proc.args}) | all_names(proc.cont)
    if isinstance(proc, Restrict):
        return all_names(proc.body) | {proc.name}
    if isinstance(proc, Par):
        return all_names(proc.left) | all_names(proc.right)
    return frozenset()


def substitute(proc: Process, mapping: Mapping) -> Process:
    """Capture-avoiding simultaneous substitution of free names."""
    mapping = {a: b for a, b in mapping.items() if a != b}
    if not mapping:
        return proc
    return _subst(proc, mapping)


def _under_binders(binders: tuple, body: Process, sigma: Mapping):
    """Push ``sigma`` under ``binders``, renaming binders that would capture."""
    free = ppi_free_names(body)
    inner = {a: b for a, b in sigma.items() if a in free and a not in binders}
    if not inner:
        return binders, body
    incoming = set(inner.values())
    clash = [b for b in binders if b in incoming]
    if clash:
        avoid = set(all_names(body)) | incoming | set(inner) | set(binders)
        renaming = {}
        for old in clash:
            new = fresh_name(old, avoid, sep="'")
            avoid.add(new)
            renaming[old] = new
        body = substitute(body, renaming)
        binders = tuple(renaming.get(b, b) for b in binders)
    return binders, _subst(body, inner)


def _subst(proc, sigma):
    if isinstance(proc, BranchIn):
        branches = []
        for i, params, cont in proc.branches:
            params, cont = _under_binders(params, cont, sigma)
            branches.append((i, params, cont))
        return BranchIn(sigma.get(proc.subject, proc.subject), tuple(branches))
    if isinstance(proc, SelectOut):
        branches = []
        for i, p, args, cont in proc.branches:
            args, cont = _under_binders(args, cont, sigma)
            branches.append((i, p, args, cont))
        return SelectOut(sigma.get(proc.subject, proc.subject), tuple(branches))
    if isinstance(proc, InPrefix):
        params, cont = _under_binders(proc.params, proc.cont, sigma)
        return InPrefix(sigma.get(proc.subject, proc.subject), params, cont)
    if isinstance(proc, RepIn):
        params, body = _under_binders(proc.params, proc.body, sigma)
        return RepIn(sigma.get(proc.subject, proc.subject), params, body)
    if isinstance(proc, OutPrefix):
        return OutPrefix(
            sigma.get(proc.subject, proc.subject),
            tuple(sigma.get(a, a) for a in proc.args),
            _subst(proc.cont, sigma),
        )
    if isinstance(proc, Restrict):
        (name,), body = _under_binders((proc.name,), proc.body, sigma)
        return Restrict(name, body)
    if isinstance(proc, Par):
        return Par(_subst(proc.left, sigma), _subst(proc.right, sigma))
    return proc


def freshen(proc: Process) -> Process:
    """Rename binders so that no two binders share a name and no binder
    reuses a free name. Binders that are already unique keep their names."""
    used = set(ppi_free_names(proc))
    return _freshen(proc, used)


def _claim(binders, body, used):
    renaming = {}
    out = []
    for b in binders:
        if b in used:
            new = fresh_name(b, used | set(all_names(body)), sep="'")
            renaming[b] = new
            b = new
        used.add(b)
        out.append(b)
    if renaming:
        body = substitute(body, renaming)
    return tuple(out), body


def _freshen(proc, used):
    if isinstance(proc, BranchIn):
        branches = []
        for i, params, cont in proc.branches:
            params, cont = _claim(params, cont, used)
            branches.append((i, params, _freshen(cont, used)))
        return BranchIn(proc.subject, tuple(branches))
    if isinstance(proc, SelectOut):
        branches = []
        for i, p, args, cont in proc.branches:
            args, cont = _claim(args, cont, used)
            branches.append((i, p, args, _freshen(cont, used)))
        return SelectOut(proc.subject, tuple(branches))
    if isinstance(proc, InPrefix):
        params, cont = _claim(proc.params, proc.cont, used)
        return InPrefix(proc.subject, params, _freshen(cont, used))
    if isinstance(proc, RepIn):
        params, body = _claim(proc.params, proc.body, used)
        return RepIn(proc.subject, params, _freshen(body, used))
    if isinstance(proc, OutPrefix):
        return OutPrefix(proc.subject, proc.args, _freshen(proc.cont, used))
    if isinstance(proc, Restrict):
        (name,), body = _claim((proc.name,), proc.body, used)
        return Restrict(name, _freshen(body, used))
    if isinstance(proc, Par):
        return Par(_freshen(proc.left, used), _freshen(proc.right, used))
    return proc


# ---------------------------------------------------------------- labels

@node
class PpiLabel:
    """A transition label.

    For a silent label ``subject`` records the channel the communication used
    and ``replicated`` whether a replicated input was consumed; ``subj`` and
    ``obj`` are empty for it. ``extruded`` lists restricted names an output
    carries out of their scope.
    """

    kind: str
    subject: str | None = None
    index: int | None = None
    objects: tuple = ()
    extruded: tuple = ()
    replicated: bool = False

    @property
    def subj(self):
        return None if self.kind == TAU else self.subject

    @property
    def obj(self):
        return () if self.kind == TAU else self.objects

    def __str__(self):
        objs = ",".join(self.objects)
        if self.kind == SEL_IN:
            return f"{self.subject}?{self.index}({objs})"
        if self.kind == SEL_OUT:
            return f"{self.subject}!{self.index}({objs})"
        if self.kind == IN:
            return f"{self.subject}?({objs})"
        if self.kind == OUT:
            bound = f"new {','.join(self.extruded)} " if self.extruded else ""
            return f"{bound}{self.subject}!<{objs}>"
        return "tau"


def _is_input(label: PpiLabel) -> bool:
    return label.kind in (SEL_IN, IN)


def _is_output(label: PpiLabel) -> bool:
    return label.kind in (SEL_OUT, OUT)


@node
class StepBundle:
    """Alternatives ``(label, prob, successor)`` of one rule instance.

    ``origin`` is the path to the prefix that produced the bundle; inputs of
    the same prefix share it.
    """

    alternatives: tuple
    origin: tuple = ()

    def __post_init__(self):
        total = sum((p for _, p, _ in self.alternatives), Fraction(0))
        if not self.alternatives or total != 1:
            raise ValueError("bundle probabilities must sum to 1")


@dataclass(frozen=True)
class StepEvidence:
    channel: str
    replicated: bool


@node
class StepClass:
    """Emulation-step class: ``A``, ``B``, ``TAU``, ``REP`` or ``other``."""

    kind: str
    channel: str | None = None

    def __str__(self):
        return self.kind if self.kind != "other" else f"other({self.channel})"


CLASS_A = StepClass("A")
CLASS_B = StepClass("B")
CLASS_TAU = StepClass("TAU")
CLASS_REP = StepClass("REP")


def default_classify(evidence: StepEvidence) -> StepClass:
    if evidence.replicated:
        return CLASS_REP
    return StepClass("other", evidence.channel)


# ---------------------------------------------------------------- semantics

def _unit(label, succ, origin=()):
    return StepBundle(((label, Fraction(1), succ),), origin)


def _prefix_bundles(proc) -> list:
    if isinstance(proc, BranchIn):
        return [
            _unit(PpiLabel(SEL_IN, proc.subject, i, params), cont)
            for i, params, cont in proc.branches
        ]
    if isinstance(proc, InPrefix):
        return [_unit(PpiLabel(IN, proc.subject, None, proc.params), proc.cont)]
    if isinstance(proc, RepIn):
        label = PpiLabel(IN, proc.subject, None, proc.params, replicated=True)
        return [_unit(label, Par(proc.body, proc))]
    if isinstance(proc, SelectOut):
        alts = tuple(
            (PpiLabel(SEL_OUT, proc.subject, i, args), p, cont)
            for i, p, args, cont in proc.branches
        )
        return [StepBundle(alts)]
    if isinstance(proc, OutPrefix):
        return [_unit(PpiLabel(OUT, proc.subject, None, proc.args), proc.cont)]
    return []


def _matches(inp: PpiLabel, out: PpiLabel) -> bool:
    if inp.subject != out.subject or len(inp.objects) != len(out.objects):
        return False
    if out.kind == SEL_OUT:
        return inp.kind == IN or (inp.kind == SEL_IN and inp.index == out.index)
    return inp.kind == IN


def _residue(out_label, out_succ, in_label, in_succ, output_left: bool) -> Process:
    received = substitute(in_succ, dict(zip(in_label.objects, out_label.objects)))
    if out_label.kind == OUT and isinstance(out_succ, Nil):
        body = received
    elif output_left:
        body = Par(out_succ, received)
    else:
        body = Par(received, out_succ)
    bound = out_label.objects if out_label.kind == SEL_OUT else out_label.extruded
    return restrict_all(bound, body)


def _communications(out_side, in_side, output_left: bool) -> list:
    inputs_by_origin: dict = {}
    for bundle in in_side:
        if len(bundle.alternatives) == 1 and _is_input(bundle.alternatives[0][0]):
            inputs_by_origin.setdefault(bundle.origin, []).append(bundle)
    out = []
    for bundle in out_side:
        first = bundle.alternatives[0][0]
        if not _is_output(first):
            continue
        for origin, candidates in inputs_by_origin.items():
            partners = []
            for out_label, _, _ in bundle.alternatives:
                found = [c for c in candidates if _matches(c.alternatives[0][0], out_label)]
                if not found:
                    break
                partners.append(found)
            else:
                for choice in itertools.product(*partners):
                    alts = []
                    for (out_label, prob, out_succ), partner in zip(bundle.alternatives, choice):
                        in_label, _, in_succ = partner.alternatives[0]
                        tau = PpiLabel(TAU, out_label.subject, replicated=in_label.replicated)
                        alts.append((tau, prob, _residue(out_label, out_succ, in_label,
                                                         in_succ, output_left)))
                    out.append(StepBundle(tuple(alts), ("c",) + bundle.origin + origin))
    return out


@lru_cache(maxsize=None)
def _bundles(proc: Process) -> tuple:
    if isinstance(proc, Restrict):
        out = []
        for bundle in _bundles(proc.body):
            if any(label.subj == proc.name for label, _, _ in bundle.alternatives):
                continue
            alts = []
            for label, prob, succ in bundle.alternatives:
                if label.kind == OUT and proc.name in label.objects:
                    label = PpiLabel(OUT, label.subject, None, label.objects,
                                     label.extruded + (proc.name,))
                    alts.append((label, prob, succ))
                else:
                    alts.append((label, prob, Restrict(proc.name, succ)))
            out.append(StepBundle(tuple(alts), ("n",) + bundle.origin))
        return tuple(out)
    if isinstance(proc, Par):
        left = _bundles(proc.left)
        right = _bundles(proc.right)
        out = [
            StepBundle(tuple((l, p, Par(s, proc.right)) for l, p, s in b.alternatives),
                       ("L",) + b.origin)
            for b in left
        ]
        out += [
            StepBundle(tuple((l, p, Par(proc.left, s)) for l, p, s in b.alternatives),
                       ("R",) + b.origin)
            for b in right
        ]
        out += _communications(left, right, output_left=True)
        out += _communications(right, left, output_left=False)
        return tuple(out)
    return tuple(_prefix_bundles(proc))


def ppi_step_bundles(proc: Process) -> frozenset:
    """All step bundles of ``proc`` (after making its binders distinct)."""
    return frozenset(_bundles(freshen(proc)))


@lru_cache(maxsize=None)
def _reductions(proc: Process) -> tuple:
    out = {}
    for bundle in _bundles(freshen(proc)):
        label = bundle.alternatives[0][0]
        if label.kind != TAU:
            continue
        dist = Distribution((succ, prob) for _, prob, succ in bundle.alternatives)
        evidence = StepEvidence(label.subject, label.replicated)
        out.setdefault((dist, evidence), None)
    return tuple(out)


def ppi_reduce(proc: Process, classify=default_classify) -> list:
    """``(distribution, step class)`` for every reduction of ``proc``."""
    return [(dist, classify(ev)) for dist, ev in _reductions(proc)]


def ppi_reductions(proc: Process) -> tuple:
    """``(distribution, evidence)`` for every reduction of ``proc``."""
    return _reductions(proc)


@lru_cache(maxsize=None)
def normalized_reductions(proc: Process) -> tuple:
    """Reductions with successors in normal form, equal results merged."""
    out = {}
    for dist, evidence in _reductions(proc):
        out.setdefault((dist.map(ppi_normal_form), evidence), None)
    return tuple(out)


def normalized_step(proc: Process) -> frozenset:
    return frozenset(d for d, _ in normalized_reductions(proc))


def raw_step(proc: Process) -> frozenset:
    return frozenset(d for d, _ in _reductions(proc))


def _unguarded_success(proc) -> bool:
    if isinstance(proc, Success):
        return True
    if isinstance(proc, Par):
        return _unguarded_success(proc.left) or _unguarded_success(proc.right)
    if isinstance(proc, Restrict):
        return _unguarded_success(proc.body)
    return False


def ppi_has_barb(proc: Process, obs) -> bool:
    """``obs`` is :data:`OK`, ``("in", x)`` or ``("out", x)``."""
    if obs == OK:
        return _unguarded_success(proc)
    direction, name = obs
    wanted = _is_input if direction == IN else _is_output
    return any(
        wanted(label) and label.subject == name
        for bundle in _bundles(freshen(proc))
        for label, _, _ in bundle.alternatives
    )


def ppi_reach_barb(proc: Process, obs, depth: int | None, state_cap: int | None = None) -> bool:
    return reach_barb_search(proc, obs, depth, state_cap)[0]


def reach_barb_search(proc, obs, depth, state_cap=None) -> tuple[bool, bool]:
    graph = point_graph([ppi_normal_form(proc)], normalized_step, depth=depth,
                        state_cap=state_cap)
    return any(ppi_has_barb(p, obs) for p in graph.points), graph.exhaustive


# ---------------------------------------------------------------- normal form

def _flatten(proc, names: list, comps: list, counter):
    if isinstance(proc, Par):
        _flatten(proc.left, names, comps, counter)
        _flatten(proc.right, names, comps, counter)
    elif isinstance(proc, Restrict):
        placeholder = f"{proc.name}\x00{next(counter)}"
        names.append(placeholder)
        _flatten(substitute(proc.body, {proc.name: placeholder}), names, comps, counter)
    elif not isinstance(proc, Nil):
        comps.append(proc)


def _canonical(sort: str, level: int) -> str:
    return f"{sort}~{level}"


def _bind_canonical(binders, body, level):
    renaming = {b: _canonical(name_sort(b), level + k) for k, b in enumerate(binders)}
    return tuple(renaming[b] for b in binders), substitute(body, renaming)


@lru_cache(maxsize=None)
def _nf_component(proc: Process, level: int) -> Process:
    if isinstance(proc, BranchIn):
        branches = []
        for i, params, cont in proc.branches:
            params, cont = _bind_canonical(params, cont, level)
            branches.append((i, params, _nf(cont, level + len(params))))
        return BranchIn(proc.subject, tuple(branches))
    if isinstance(proc, SelectOut):
        branches = []
        for i, p, args, cont in proc.branches:
            args, cont = _bind_canonical(args, cont, level)
            branches.append((i, p, args, _nf(cont, level + len(args))))
        return SelectOut(proc.subject, tuple(branches))
    if isinstance(proc, InPrefix):
        params, cont = _bind_canonical(proc.params, proc.cont, level)
        return InPrefix(proc.subject, params, _nf(cont, level + len(params)))
    if isinstance(proc, RepIn):
        params, body = _bind_canonical(proc.params, proc.body, level)
        return RepIn(proc.subject, params, _nf(body, level + len(params)))
    if isinstance(proc, OutPrefix):
        return OutPrefix(proc.subject, proc.args, _nf(proc.cont, level))
    return proc


def _key(proc: Process) -> str:
    return pretty(proc)


def _groups(names, comps):
    """Split components into classes connected through shared bound names."""
    parent = list(range(len(comps)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    users = {n: [i for i, c in enumerate(comps) if n in ppi_free_names(c)] for n in names}
    for idxs in users.values():
        for i in idxs[1:]:
            parent[find(i)] = find(idxs[0])
    classes: dict = {}
    for i in range(len(comps)):
        classes.setdefault(find(i), []).append(i)
    out = []
    for idxs in classes.values():
        group_comps = [comps[i] for i in idxs]
        group_names = [n for n in names if users[n] and users[n][0] in idxs]
        out.append((group_names, group_comps))
    return out


def _group_term(names, comps, level) -> Process:
    if not names:
        (comp,) = comps
        return _nf_component(comp, level)
    masked = {n: f"{name_sort(n)}?" for n in names}
    masked_keys = [_key(_nf_component(substitute(c, masked), level)) for c in comps]
    signature = {
        n: (name_sort(n), tuple(sorted(k for c, k in zip(comps, masked_keys)
                                       if n in ppi_free_names(c))))
        for n in names
    }
    ordered = sorted(names, key=lambda n: signature[n])
    tie_classes = [list(g) for _, g in itertools.groupby(ordered, key=lambda n: signature[n])]
    m = len(names)
    best = None
    for perm in itertools.product(*(itertools.permutations(t) for t in tie_classes)):
        sequence = [n for part in perm for n in part]
        renaming = {n: _canonical(name_sort(n), level + k) for k, n in enumerate(sequence)}
        body = sorted((_nf_component(substitute(c, renaming), level + m) for c in comps),
                      key=_key)
        candidate = restrict_all([renaming[n] for n in sequence], par_all(body))
        if best is None or _key(candidate) < _key(best):
            best = candidate
    return best


@lru_cache(maxsize=None)
def _nf(proc: Process, level: int) -> Process:
    names: list = []
    comps: list = []
    _flatten(proc, names, comps, itertools.count())
    names = [n for n in names if any(n in ppi_free_names(c) for c in comps)]
    groups = [_group_term(ns, cs, level) for ns, cs in _groups(names, comps)]
    return par_all(sorted(groups, key=_key))


@lru_cache(maxsize=None)
def ppi_normal_form(proc: Process) -> Process:
    """Canonical representative of the structural congruence class of ``proc``.

    Parallel compositions are flattened and inert parts dropped; every
    restriction is pulled to the top of its parallel soup and then scoped
    over exactly the components connected through shared restricted names;
    unused restrictions vanish. Bound names become ``sort~level`` by binder
    depth, and parallel components are ordered by their printed form.
    """
    return _nf(proc, _first_free_level(proc))


def _first_free_level(proc) -> int:
    # start canonical binder names above any canonical-looking free name
    levels = [
        int(n.rsplit("~", 1)[1]) + 1
        for n in ppi_free_names(proc)
        if "~" in n and n.rsplit("~", 1)[1].isdigit()
    ]
    return max(levels, default=0)


def ppi_struct_congruent(left, right) -> bool:
    """Structural congruence of two processes or of two distributions."""
    if isinstance(left, Distribution) or isinstance(right, Distribution):
        return left.map(ppi_normal_form) == right.map(ppi_normal_form)
    return ppi_normal_form(left) == ppi_normal_form(right)


@lru_cache(maxsize=None)
def _alpha(proc: Process, level: int) -> Process:
    if isinstance(proc, Restrict):
        (name,), body = _bind_canonical((proc.name,), proc.body, level)
        return Restrict(name, _alpha(body, level + 1))
    if isinstance(proc, Par):
        return Par(_alpha(proc.left, level), _alpha(proc.right, level))
    if isinstance(proc, BranchIn):
        branches = []
        for i, params, cont in proc.branches:
            params, cont = _bind_canonical(params, cont, level)
            branches.append((i, params, _alpha(cont, level + len(params))))
        return BranchIn(proc.subject, tuple(branches))
    if isinstance(proc, SelectOut):
        branches = []
        for i, p, args, cont in proc.branches:
            args, cont = _bind_canonical(args, cont, level)
            branches.append((i, p, args, _alpha(cont, level + len(args))))
        return SelectOut(proc.subject, tuple(branches))
    if isinstance(proc, (InPrefix, RepIn)):
        inner = proc.cont if isinstance(proc, InPrefix) else proc.body
        params, inner = _bind_canonical(proc.params, inner, level)
        return type(proc)(proc.subject, params, _alpha(inner, level + len(params)))
    if isinstance(proc, OutPrefix):
        return OutPrefix(proc.subject, proc.args, _alpha(proc.cont, level))
    return proc


def alpha_normal(proc: Process) -> Process:
    """Rename every binder to ``sort~depth`` without any other rearrangement."""
    return _alpha(proc, _first_free_level(proc))


def alpha_equivalent(left: Process, right: Process) -> bool:
    return alpha_normal(left) == alpha_normal(right)


# ---------------------------------------------------------------- printing

def _wrap(proc: Process) -> str:
    text = pretty(proc)
    return f"({text})" if isinstance(proc, (Par, Restrict)) else text


@lru_cache(maxsize=None)
def pretty(proc: Process) -> str:
    if isinstance(proc, Nil):
        return "0"
    if isinstance(proc, Success):
        return "ok"
    if isinstance(proc, Stub):
        return proc.name
    if isinstance(proc, BranchIn):
        inner = ", ".join(
            f"{i}({','.join(ps)}): {pretty(c)}" for i, ps, c in proc.branches
        )
        return f"{proc.subject}?{{{inner}}}"
    if isinstance(proc, SelectOut):
        inner = ", ".join(
            f"{p} {i}({','.join(ys)}): {pretty(c)}" for i, p, ys, c in proc.branches
        )
        return f"{proc.subject}!{{{inner}}}"
    if isinstance(proc, InPrefix):
        return f"{proc.subject}?({','.join(proc.params)}).{_wrap(proc.cont)}"
    if isinstance(proc, RepIn):
        return f"!{proc.subject}({','.join(proc.params)}).{_wrap(proc.body)}"
    if isinstance(proc, OutPrefix):
        return f"{proc.subject}!<{','.join(proc.args)}>.{_wrap(proc.cont)}"
    if isinstance(proc, Restrict):
        return f"new {proc.name}. {pretty(proc.body)}"
    if isinstance(proc, Par):
        left = pretty(proc.left)
        if isinstance(proc.left, Restrict):
            left = f"({left})"
        right = _wrap(proc.right)
        return f"{left} | {right}"
    raise TypeError(f"not a process: {proc!r}")
