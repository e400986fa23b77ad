"""Translation of probabilistic CCS into the probabilistic pi-calculus.

Source names are mapped into their own sort of target names, and the names
used internally by the translation (the selection channels of input and
silent choices and one channel per process constant) are kept apart from
them. Target steps are classified by the channel they use, which is what the
correspondence checkers need to tell emulation phases apart.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from . import pccs, ppi
from .pccs import DefEnv, EMPTY_ENV, UnknownConstant
from .ppi import CLASS_A, CLASS_B, CLASS_REP, CLASS_TAU, StepClass, StepEvidence, name_sort
from .prob_core import Distribution


class Mutation(enum.Enum):
    """Deliberate defects, used to show that the checkers can fail."""

    DROP_IOTA_INPUT = "drop-iota-input"
    SWAP_BRANCH_PROBS = "swap-branch-probs"
    OMIT_DEFINITIONS = "omit-definitions"


class HygieneError(ValueError):
    """A translated source name collides with a reserved target name."""


@dataclass(frozen=True)
class RenamingPolicy:
    source_prefix: str = "s_"
    iota: str = "#i"
    tau_hat: str = "#t"
    constant_prefix: str = "#C_"

    def __post_init__(self):
        reserved_sorts = {name_sort(self.iota), name_sort(self.tau_hat),
                          name_sort(self.constant_prefix + "X")}
        if len(reserved_sorts) != 3 or name_sort(self.source_prefix + "x") in reserved_sorts:
            raise ValueError("reserved names must have pairwise distinct sorts")

    def source_name(self, name: str) -> str:
        return self.source_prefix + name

    def constant_channel(self, constant: str) -> str:
        return self.constant_prefix + constant

    @property
    def source_sort(self) -> str:
        return name_sort(self.source_name("x"))

    def is_source_image(self, name: str) -> bool:
        return name_sort(name) == self.source_sort

    def check_source_name(self, name: str) -> str:
        image = self.source_name(name)
        if not self.is_source_image(image) or image in (self.iota, self.tau_hat):
            raise HygieneError(f"source name {name!r} does not map into the source sort")
        return image

    def classify(self, evidence: StepEvidence) -> StepClass:
        if evidence.replicated:
            return CLASS_REP
        sort = name_sort(evidence.channel)
        if sort == self.source_sort:
            return CLASS_A
        if sort == name_sort(self.iota):
            return CLASS_B
        if sort == name_sort(self.tau_hat):
            return CLASS_TAU
        return StepClass("other", evidence.channel)


DEFAULT_POLICY = RenamingPolicy()


def classify_target_step(evidence: StepEvidence, policy: RenamingPolicy = DEFAULT_POLICY) -> StepClass:
    return policy.classify(evidence)


def _selection(subject, branches, encoded, mutation):
    probs = [p for p, _ in branches]
    if mutation is Mutation.SWAP_BRANCH_PROBS and len(probs) > 1:
        probs[0], probs[1] = probs[1], probs[0]
    return ppi.SelectOut(
        subject, tuple((i, p, (), cont) for i, (p, cont) in enumerate(zip(probs, encoded), 1))
    )


def encode_inner(proc: pccs.Process, policy: RenamingPolicy = DEFAULT_POLICY,
                 mutation: Mutation | None = None) -> ppi.Process:
    phi = policy.check_source_name
    if isinstance(proc, pccs.Choice):
        encoded = [encode_inner(branch, policy, mutation) for _, branch in proc.branches]
        guard = proc.guard
        if guard.kind == pccs.OUT:
            return _selection(phi(guard.name), proc.branches, encoded, mutation)
        channel = policy.iota if guard.kind == pccs.IN else policy.tau_hat
        select = _selection(channel, proc.branches, encoded, mutation)
        if mutation is Mutation.DROP_IOTA_INPUT and guard.kind == pccs.IN:
            body = ppi.Restrict(channel, select)
        else:
            body = ppi.Restrict(channel, ppi.Par(select, ppi.InPrefix(channel, (), ppi.Nil())))
        if guard.kind == pccs.IN:
            return ppi.InPrefix(phi(guard.name), (), body)
        return body
    if isinstance(proc, pccs.Par):
        return ppi.Par(encode_inner(proc.left, policy, mutation),
                       encode_inner(proc.right, policy, mutation))
    if isinstance(proc, pccs.Restrict):
        names = sorted(phi(name) for name in proc.names)
        return ppi.restrict_all(names, encode_inner(proc.body, policy, mutation))
    if isinstance(proc, pccs.Relabel):
        renaming = {phi(a): phi(b) for a, b in proc.mapping}
        return ppi.substitute(encode_inner(proc.body, policy, mutation), renaming)
    if isinstance(proc, pccs.Call):
        args = tuple(phi(a) for a in proc.args)
        return ppi.OutPrefix(policy.constant_channel(proc.constant), args, ppi.Nil())
    if isinstance(proc, pccs.Success):
        return ppi.Success()
    if isinstance(proc, pccs.Inert):
        return ppi.Nil()
    if isinstance(proc, pccs.Stub):
        return ppi.Stub(proc.name)
    raise TypeError(f"not a source process: {proc!r}")


def required_constants(proc: pccs.Process, env: DefEnv) -> frozenset:
    """Constants reachable from ``proc`` through calls and definition bodies."""
    seen = set()
    pending = list(pccs.constants_used(proc))
    while pending:
        name = pending.pop()
        if name in seen:
            continue
        seen.add(name)
        if name in env:
            pending.extend(pccs.constants_used(env[name].body))
    return frozenset(seen)


def encode_outer(proc: pccs.Process, env: DefEnv = EMPTY_ENV,
                 policy: RenamingPolicy = DEFAULT_POLICY,
                 mutation: Mutation | None = None) -> ppi.Process:
    missing = sorted(required_constants(proc, env) - set(env))
    for name in env:
        missing += sorted(pccs.constants_used(env[name].body) - set(env))
    if missing:
        raise UnknownConstant(f"no definition for {', '.join(sorted(set(missing)))}")
    inner = encode_inner(proc, policy, mutation)
    if mutation is Mutation.OMIT_DEFINITIONS:
        replicas = []
    else:
        replicas = [
            ppi.RepIn(policy.constant_channel(name),
                      tuple(policy.check_source_name(x) for x in definition.params),
                      encode_inner(definition.body, policy, mutation))
            for name, definition in env.items()
        ]
    channels = [policy.constant_channel(name) for name in env]
    return ppi.restrict_all(channels, ppi.par_all([inner] + replicas))


def encode_dist(delta: Distribution, env: DefEnv = EMPTY_ENV,
                policy: RenamingPolicy = DEFAULT_POLICY,
                mutation: Mutation | None = None) -> Distribution:
    return delta.map(lambda proc: encode_outer(proc, env, policy, mutation))


@dataclass(frozen=True)
class Encoder:
    """The translation specialised to one set of definitions."""

    env: DefEnv = EMPTY_ENV
    policy: RenamingPolicy = DEFAULT_POLICY
    mutation: Mutation | None = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def encode(self, proc: pccs.Process) -> ppi.Process:
        if proc not in self._cache:
            self._cache[proc] = encode_outer(proc, self.env, self.policy, self.mutation)
        return self._cache[proc]

    def encode_normal(self, proc: pccs.Process) -> ppi.Process:
        return ppi.ppi_normal_form(self.encode(proc))

    def encode_dist(self, delta: Distribution) -> Distribution:
        return delta.map(self.encode)

    def encode_dist_normal(self, delta: Distribution) -> Distribution:
        return delta.map(self.encode_normal)

    def classify(self, evidence: StepEvidence) -> StepClass:
        return self.policy.classify(evidence)

    def target_reductions(self, proc: ppi.Process) -> list:
        """``(distribution, step class)`` for each reduction, in normal form."""
        return [(dist, self.classify(ev)) for dist, ev in ppi.normalized_reductions(proc)]


# ---------------------------------------------------------------- compositionality

_HOLE = "□"


def _subterms(proc: pccs.Process) -> list:
    if isinstance(proc, pccs.Choice):
        return [branch for _, branch in proc.branches]
    if isinstance(proc, pccs.Par):
        return [proc.left, proc.right]
    if isinstance(proc, (pccs.Restrict, pccs.Relabel)):
        return [proc.body]
    return []


def _with_subterms(proc: pccs.Process, subs: list) -> pccs.Process:
    if isinstance(proc, pccs.Choice):
        return pccs.Choice(proc.guard, tuple((p, s) for (p, _), s in zip(proc.branches, subs)))
    if isinstance(proc, pccs.Par):
        return pccs.Par(*subs)
    if isinstance(proc, pccs.Restrict):
        return pccs.Restrict(subs[0], proc.names)
    if isinstance(proc, pccs.Relabel):
        return pccs.Relabel(subs[0], proc.mapping)
    return proc


def operator_context(proc: pccs.Process, policy: RenamingPolicy = DEFAULT_POLICY,
                     mutation: Mutation | None = None):
    """The target context of the outermost operator of ``proc``.

    Each subterm is replaced by a call of a placeholder constant on the
    subterm's free names, so the context is built by the translation itself
    without looking at the subterms. A hole thus becomes an output of a name
    vector, and whatever renaming the context performs shows up in it.
    Returns the context and the hole vectors in translated form.
    """
    subs = _subterms(proc)
    vectors = [tuple(sorted(pccs.pccs_free_names(s))) for s in subs]
    holes = [pccs.Call(f"{_HOLE}{k}", names) for k, names in enumerate(vectors)]
    context = encode_inner(_with_subterms(proc, holes), policy, mutation)
    return context, [tuple(policy.source_name(n) for n in names) for names in vectors]


def fill_context(context: ppi.Process, vectors: list, fillers: list,
                 policy: RenamingPolicy = DEFAULT_POLICY) -> ppi.Process:
    hole_channel = policy.constant_channel(_HOLE)

    def fill(term):
        if isinstance(term, ppi.OutPrefix) and term.subject.startswith(hole_channel):
            k = int(term.subject[len(hole_channel):])
            return ppi.substitute(fillers[k], dict(zip(vectors[k], term.args)))
        return _map_children(term, fill)

    return fill(context)


def _map_children(term: ppi.Process, fn) -> ppi.Process:
    if isinstance(term, ppi.BranchIn):
        return ppi.BranchIn(term.subject, tuple((i, ys, fn(c)) for i, ys, c in term.branches))
    if isinstance(term, ppi.SelectOut):
        return ppi.SelectOut(term.subject, tuple((i, p, ys, fn(c)) for i, p, ys, c in term.branches))
    if isinstance(term, ppi.InPrefix):
        return ppi.InPrefix(term.subject, term.params, fn(term.cont))
    if isinstance(term, ppi.RepIn):
        return ppi.RepIn(term.subject, term.params, fn(term.body))
    if isinstance(term, ppi.OutPrefix):
        return ppi.OutPrefix(term.subject, term.args, fn(term.cont))
    if isinstance(term, ppi.Restrict):
        return ppi.Restrict(term.name, fn(term.body))
    if isinstance(term, ppi.Par):
        return ppi.Par(fn(term.left), fn(term.right))
    return term


def compositionality_violations(proc: pccs.Process, policy: RenamingPolicy = DEFAULT_POLICY,
                                mutation: Mutation | None = None) -> list:
    """Subterms whose translation is not their operator's context filled in.

    Every node of ``proc`` is checked: the context of its operator, built
    from placeholders only, is filled with the translations of the actual
    subterms and compared up to alpha-conversion with the direct translation.
    """
    bad = []
    stack = [proc]
    while stack:
        term = stack.pop()
        subs = _subterms(term)
        stack.extend(subs)
        context, vectors = operator_context(term, policy, mutation)
        fillers = [encode_inner(s, policy, mutation) for s in subs]
        filled = fill_context(context, vectors, fillers, policy)
        if not ppi.alpha_equivalent(filled, encode_inner(term, policy, mutation)):
            bad.append(term)
    return bad
