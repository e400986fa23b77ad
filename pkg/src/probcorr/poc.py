"""Operational correspondence checkers for the translation, plus the other
quality criteria: success and barb sensitiveness, divergence reflection,
name invariance and the induced-relation construction.

Source states are :class:`~probcorr.pccs.SourceProgram` values, so a term is
always paired with the definitions it runs under. Target states are kept in
normal form when the target relation is structural congruence, and as raw
terms when it is syntactic identity; either way lifting the relation to
distributions reduces to equality of the (normalised) distributions.

Completeness witnesses are constructed rather than searched for: every
source step along a recorded path is emulated point by point, first by one
target reduction and then by completing the selection steps it unlocked.
Soundness does the converse, completing selection steps of a target
distribution and looking the result up among the images of the reachable
source distributions. Both fall back to bounded search when the
construction does not apply.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache

from . import pccs, ppi
from .encoder import DEFAULT_POLICY, Encoder, Mutation, RenamingPolicy, compositionality_violations
from .equivalence import (
    FAILS,
    HOLDS,
    INCONCLUSIVE,
    ExplorationBudget,
    Relation,
    Verdict,
    WitnessHint,
    build_induced_relation,
    check_preorder,
    check_prob_bisimulation,
    check_prob_correspondence_sim,
    check_strong_prob_bisimulation,
    combine,
    replay,
    worst,
)
from .pccs import SourceProgram
from .ppi import CLASS_B
from .prob_core import (
    Distribution,
    apply_choices,
    dist_point,
    find_cycle,
    lift_check,
    point_graph,
    reach_with_paths,
)

CONGRUENCE, IDENTITY = "congruence", "identity"
WEAK, MID, STRONG = "weak", "mid", "strong"
PLAIN = "plain"


@lru_cache(maxsize=None)
def program_steps(program: SourceProgram) -> frozenset:
    """Reductions of a source program, with the definitions carried along."""
    env = program.env
    return frozenset(
        d.map(lambda t: SourceProgram(t, env)) for d in pccs.pccs_reduce(program.term, env)
    )


def _identity(term):
    return term


def _equal(a, b) -> bool:
    return a == b


# ---------------------------------------------------------------- reports

@dataclass(frozen=True)
class PocObligation:
    """``direction`` is ``complete`` or ``sound``.

    For completeness ``source`` is the source distribution and ``target``
    the emulating target distribution. For soundness ``target`` is the given
    target distribution, ``extended`` the distribution it was extended to and
    ``source`` the matching source distribution. ``trace`` lists the step
    classes of the target steps used, one tuple per distribution step.
    """

    direction: str
    status: str
    source: Distribution | None = None
    target: Distribution | None = None
    extended: Distribution | None = None
    coupling: object = None
    trace: tuple = ()
    note: str = ""


@dataclass
class PocReport:
    program: SourceProgram
    flavor: str
    obligations: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def status(self) -> str:
        return worst(o.status for o in self.obligations)

    @property
    def counterexample(self) -> PocObligation | None:
        return next((o for o in self.obligations if o.status == FAILS), None)

    def verdict(self) -> Verdict:
        return Verdict(self.status, self, self.counterexample, "; ".join(self.notes))


# ---------------------------------------------------------------- engine

class Correspondence:
    """Emulation machinery for one translation and one target relation."""

    def __init__(self, budget: ExplorationBudget = ExplorationBudget(),
                 mutation: Mutation | None = None, policy: RenamingPolicy = DEFAULT_POLICY,
                 relation: str = CONGRUENCE):
        if relation not in (CONGRUENCE, IDENTITY):
            raise ValueError(f"unknown target relation {relation!r}")
        self.budget = budget
        self.mutation = mutation
        self.policy = policy
        self.relation = relation
        self.normalize = ppi.ppi_normal_form if relation == CONGRUENCE else _identity
        self._reductions = ppi.normalized_reductions if relation == CONGRUENCE else ppi.ppi_reductions
        self._encoders: dict = {}
        self._images: dict = {}
        self._source_reach: dict = {}
        self._target_reach: dict = {}
        self._indices: dict = {}
        self._emulations: dict = {}

    # -- basic maps

    def encoder(self, env) -> Encoder:
        if env not in self._encoders:
            self._encoders[env] = Encoder(env, self.policy, self.mutation)
        return self._encoders[env]

    def image(self, program: SourceProgram):
        if program not in self._images:
            self._images[program] = self.normalize(self.encoder(program.env).encode(program.term))
        return self._images[program]

    def image_dist(self, delta: Distribution) -> Distribution:
        return delta.map(self.image)

    def source_steps(self, program: SourceProgram) -> frozenset:
        return program_steps(program)

    def target_steps(self, term) -> frozenset:
        return frozenset(d for d, _ in self._reductions(term))

    def classify_move(self, term, dist: Distribution):
        for candidate, evidence in self._reductions(term):
            if candidate == dist:
                return self.policy.classify(evidence)
        raise ValueError("not a reduction of the given term")

    def classes(self, path) -> tuple:
        return tuple(
            tuple(sorted({str(self.classify_move(t, d)) for t, d in choices.items()}))
            for choices in path
        )

    # -- bounded reachability

    def source_reach(self, program: SourceProgram, depth: int):
        key = (program, depth)
        if key not in self._source_reach:
            self._source_reach[key] = reach_with_paths(
                dist_point(program), self.source_steps, depth,
                combo_cap=self.budget.combo_cap, maximal=self.budget.maximal,
                state_cap=self.budget.state_cap,
            )
        return self._source_reach[key]

    def target_reach(self, start: Distribution, depth: int):
        key = (start, depth)
        if key not in self._target_reach:
            self._target_reach[key] = reach_with_paths(
                start, self.target_steps, depth,
                combo_cap=self.budget.combo_cap, maximal=self.budget.maximal,
                state_cap=self.budget.state_cap,
            )
        return self._target_reach[key]

    def source_index(self, program: SourceProgram, depth: int) -> dict:
        """Images of reachable source distributions, mapped back to them."""
        key = (program, depth)
        if key not in self._indices:
            reach = self.source_reach(program, depth)
            index = {}
            for delta in reach.parent:
                index.setdefault(self.image_dist(delta), delta)
            self._indices[key] = index
        return self._indices[key]

    # -- emulation

    def b_completion(self, theta: Distribution, limit: int = 64) -> tuple[list, Distribution]:
        """Perform every pending selection step, point by point."""
        path = []
        current = theta
        for _ in range(limit):
            choices = {}
            for term in current:
                for dist, evidence in self._reductions(term):
                    if self.policy.classify(evidence) == CLASS_B:
                        choices[term] = dist
                        break
            if not choices:
                break
            current = apply_choices(current, choices)
            path.append(choices)
        return path, current

    def emulate_step(self, program: SourceProgram, delta: Distribution) -> list | None:
        """Target path from the image of ``program`` to the image of ``delta``."""
        key = (program, delta)
        if key in self._emulations:
            return self._emulations[key]
        start = self.image(program)
        goal = self.image_dist(delta)
        found = None
        for dist, _ in self._reductions(start):
            b_path, result = self.b_completion(dist)
            if result == goal:
                found = [{start: dist}] + b_path
                break
        if found is None:
            reach = self.target_reach(dist_point(start), 3)
            if goal in reach.parent:
                found = reach.path(goal)
        self._emulations[key] = found
        return found

    def emulate(self, program: SourceProgram, source_path: list) -> list | None:
        """Compose point emulations along a source path; None on a clash."""
        current = dist_point(self.image(program))
        source = dist_point(program)
        full = []
        for choices in source_path:
            lines = [self.emulate_step(point, choices[point]) for point in sorted(choices, key=str)]
            if any(steps is None for steps in lines):
                return None
            stages = _merge_stages(lines) or [c for steps in lines for c in steps]
            for target_choices in stages:
                if any(t not in current for t in target_choices):
                    return None
                current = apply_choices(current, target_choices)
                full.append(target_choices)
            source = apply_choices(source, choices)
        if current != self.image_dist(source):
            return None
        return full

    def lift(self, left: Distribution, right: Distribution):
        return lift_check(_equal, left, right)

    # -- obligations

    def completeness(self, program: SourceProgram, depth: int) -> list:
        out = []
        reach = self.source_reach(program, depth)
        start = dist_point(self.image(program))
        for delta in sorted(reach.parent, key=str):
            goal = self.image_dist(delta)
            path = self.emulate(program, reach.path(delta))
            note = "emulated"
            if path is None:
                search = self.target_reach(start, self.budget.witness_depth)
                if goal not in search.parent:
                    status = FAILS if search.reached.exhaustive else INCONCLUSIVE
                    out.append(PocObligation("complete", status, source=delta,
                                             note="no target distribution matches its image"))
                    continue
                path, note = search.path(goal), "searched"
            theta = replay(start, path, self.target_steps)
            out.append(PocObligation("complete", HOLDS, source=delta, target=theta,
                                     coupling=self.lift(goal, theta),
                                     trace=self.classes(path), note=note))
        return out

    def soundness(self, program: SourceProgram, depth: int, escape: bool) -> list:
        out = []
        start = dist_point(self.image(program))
        reach = self.target_reach(start, depth)
        index = self.source_index(program, depth)
        for theta in sorted(reach.parent, key=str):
            path, extended = self.b_completion(theta) if escape else ([], theta)
            if extended in index:
                out.append(PocObligation(
                    "sound", HOLDS, source=index[extended], target=theta, extended=extended,
                    coupling=self.lift(self.image_dist(index[extended]), extended),
                    trace=self.classes(path), note="selection steps completed" if path else "",
                ))
                continue
            out.append(self._sound_search(program, theta, escape))
        return out

    def _sound_search(self, program, theta, escape) -> PocObligation:
        depth = self.budget.witness_depth
        index = self.source_index(program, depth)
        sources = self.source_reach(program, depth).reached
        extensions = self.target_reach(theta, depth) if escape else None
        candidates = extensions.parent if escape else {theta: None}
        for extended in candidates:
            if extended in index:
                path = extensions.path(extended) if escape else []
                return PocObligation(
                    "sound", HOLDS, source=index[extended], target=theta, extended=extended,
                    coupling=self.lift(self.image_dist(index[extended]), extended),
                    trace=self.classes(path), note="searched",
                )
        exhaustive = sources.exhaustive and (extensions.reached.exhaustive if escape else True)
        return PocObligation("sound", FAILS if exhaustive else INCONCLUSIVE, target=theta,
                             note="no source distribution matches")

    def strong_obligations(self, program: SourceProgram) -> list:
        out = []
        image = self.image(program)
        source_moves = sorted(self.source_steps(program), key=str)
        target_moves = sorted(self.target_steps(image), key=str)
        images = {self.image_dist(d): d for d in source_moves}
        for delta in source_moves:
            goal = self.image_dist(delta)
            if goal in target_moves:
                out.append(PocObligation("complete", HOLDS, source=delta, target=goal,
                                         coupling=self.lift(goal, goal),
                                         trace=self.classes([{image: goal}])))
            else:
                out.append(PocObligation("complete", FAILS, source=delta,
                                         note="no single target step matches"))
        for theta in target_moves:
            if theta in images:
                out.append(PocObligation("sound", HOLDS, source=images[theta], target=theta,
                                         coupling=self.lift(theta, theta),
                                         trace=self.classes([{image: theta}])))
            else:
                out.append(PocObligation("sound", FAILS, target=theta,
                                         note="no single source step matches"))
        return out


def _merge_stages(lines: list) -> list | None:
    """Run point emulations side by side, or None if two lines clash on a term."""
    stages = []
    for k in range(max((len(steps) for steps in lines), default=0)):
        stage = {}
        for steps in lines:
            if k >= len(steps):
                continue
            for term, dist in steps[k].items():
                if stage.setdefault(term, dist) != dist:
                    return None
        stages.append(stage)
    return stages


def _program(term, env=None) -> SourceProgram:
    if isinstance(term, SourceProgram):
        return term
    return SourceProgram(term, env if env is not None else pccs.EMPTY_ENV)


def _engine(budget, mutation, relation, engine) -> Correspondence:
    if engine is not None:
        return engine
    return Correspondence(budget or ExplorationBudget(), mutation, relation=relation)


# ---------------------------------------------------------------- POC flavours

def check_weak_poc(term, env=None, budget: ExplorationBudget | None = None, *,
                   mutation: Mutation | None = None, relation: str = CONGRUENCE,
                   engine: Correspondence | None = None) -> PocReport:
    """Completeness plus weak soundness, both up to ``budget.depth`` steps."""
    program = _program(term, env)
    engine = _engine(budget, mutation, relation, engine)
    depth = engine.budget.depth
    report = PocReport(program, WEAK)
    report.obligations += engine.completeness(program, depth)
    report.obligations += engine.soundness(program, depth, escape=True)
    report.notes.append("soundness extensions complete selection steps first, then search "
                        f"up to {engine.budget.witness_depth} steps")
    return report


def check_mid_poc(term, env=None, budget: ExplorationBudget | None = None, *,
                  mutation: Mutation | None = None, relation: str = CONGRUENCE,
                  engine: Correspondence | None = None) -> PocReport:
    """Completeness plus soundness without extending the target distribution."""
    program = _program(term, env)
    engine = _engine(budget, mutation, relation, engine)
    depth = engine.budget.depth
    report = PocReport(program, MID)
    report.obligations += engine.completeness(program, depth)
    report.obligations += engine.soundness(program, depth, escape=False)
    return report


def check_strong_poc(term, env=None, budget: ExplorationBudget | None = None, *,
                     mutation: Mutation | None = None, relation: str = CONGRUENCE,
                     engine: Correspondence | None = None) -> PocReport:
    """Single steps on both sides, for every point reachable within the depth."""
    program = _program(term, env)
    engine = _engine(budget, mutation, relation, engine)
    report = PocReport(program, STRONG)
    graph = point_graph([program], engine.source_steps, depth=engine.budget.depth,
                        state_cap=engine.budget.state_cap)
    for point in sorted(graph.points, key=str):
        report.obligations += engine.strong_obligations(point)
    return report


POC_CHECKS = {WEAK: check_weak_poc, MID: check_mid_poc, STRONG: check_strong_poc}


def check_nonprob_oc(term, env=None, budget: ExplorationBudget | None = None,
                     variant: str = WEAK, *, mutation: Mutation | None = None,
                     relation: str = CONGRUENCE,
                     engine: Correspondence | None = None) -> PocReport:
    """Classical operational correspondence on the support-point graphs.

    Probabilities are ignored: every support point of a successor
    distribution counts as a successor state.
    """
    if variant not in (STRONG, PLAIN, WEAK):
        raise ValueError(f"unknown variant {variant!r}")
    program = _program(term, env)
    engine = _engine(budget, mutation, relation, engine)
    b = engine.budget
    report = PocReport(program, f"nonprob-{variant}")

    def successors(step_fn):
        return lambda t: [dist_point(p) for d in step_fn(t) for p in d]

    source_succ = successors(engine.source_steps)
    target_succ = successors(engine.target_steps)
    source = point_graph([program], source_succ, depth=b.depth, state_cap=b.state_cap)
    root = engine.image(program)

    if variant == STRONG:
        for point in sorted(source.points, key=str):
            image = engine.image(point)
            targets = {p for d in engine.target_steps(image) for p in d}
            sources = {p for d in engine.source_steps(point) for p in d}
            for s in sorted(sources, key=str):
                ok = engine.image(s) in targets
                report.obligations.append(PocObligation(
                    "complete", HOLDS if ok else FAILS, source=dist_point(s)))
            source_images = {engine.image(s) for s in sources}
            for t in sorted(targets, key=str):
                ok = t in source_images
                report.obligations.append(PocObligation(
                    "sound", HOLDS if ok else FAILS, target=dist_point(t)))
        return report

    wide = point_graph([root], target_succ, depth=b.witness_depth, state_cap=b.state_cap)
    for s in sorted(source.points, key=str):
        ok = engine.image(s) in wide.points
        status = HOLDS if ok else (FAILS if wide.exhaustive else INCONCLUSIVE)
        report.obligations.append(PocObligation("complete", status, source=dist_point(s)))
    target = point_graph([root], target_succ, depth=b.depth, state_cap=b.state_cap)
    wide_source = point_graph([program], source_succ, depth=b.witness_depth, state_cap=b.state_cap)
    images = {engine.image(s) for s in wide_source.points}
    for t in sorted(target.points, key=str):
        if variant == PLAIN:
            ok, exhaustive = t in images, wide_source.exhaustive
        else:
            ext = point_graph([t], target_succ, depth=b.witness_depth, state_cap=b.state_cap)
            ok = any(p in images for p in ext.points)
            exhaustive = ext.exhaustive and wide_source.exhaustive
        status = HOLDS if ok else (FAILS if exhaustive else INCONCLUSIVE)
        report.obligations.append(PocObligation("sound", status, target=dist_point(t)))
    return report


# ---------------------------------------------------------------- other criteria

def _barb_verdict(name, source_found, source_complete, target_found, target_complete) -> Verdict:
    record = {"observable": name, "source": source_found, "target": target_found}
    if source_found == target_found:
        if not source_found and not (source_complete and target_complete):
            return Verdict(INCONCLUSIVE, record, note="negative search was truncated")
        return Verdict(HOLDS, record)
    negative_complete = target_complete if source_found else source_complete
    return Verdict(FAILS if negative_complete else INCONCLUSIVE, record, record)


def check_success_sensitiveness(term, env=None, budget: ExplorationBudget | None = None, *,
                                mutation: Mutation | None = None,
                                engine: Correspondence | None = None) -> Verdict:
    """Reachability of success agrees on both sides.

    Both searches run on the point graphs until closure or the state cap.
    """
    program = _program(term, env)
    engine = _engine(budget, mutation, CONGRUENCE, engine)
    cap = engine.budget.state_cap
    s_found, s_complete = pccs.reach_barb_search(program.term, program.env, pccs.OK, None, cap)
    t_found, t_complete = ppi.reach_barb_search(engine.image(program), ppi.OK, None, cap)
    return _barb_verdict("ok", s_found, s_complete, t_found, t_complete)


def check_barb_sensitiveness(term, env=None, budget: ExplorationBudget | None = None, *,
                             mutation: Mutation | None = None,
                             engine: Correspondence | None = None) -> Verdict:
    """For each free name, reachability of its input and output barbs agrees."""
    program = _program(term, env)
    engine = _engine(budget, mutation, CONGRUENCE, engine)
    cap = engine.budget.state_cap
    verdicts = []
    image = engine.image(program)
    for name in sorted(pccs.pccs_free_names(program.term)):
        target_name = engine.policy.source_name(name)
        for kind, target_kind in ((pccs.IN, ppi.IN), (pccs.OUT, ppi.OUT)):
            action = pccs.Action(kind, name)
            s_found, s_complete = pccs.reach_barb_search(program.term, program.env, action, None, cap)
            t_found, t_complete = ppi.reach_barb_search(image, (target_kind, target_name), None, cap)
            verdicts.append(_barb_verdict(str(action), s_found, s_complete, t_found, t_complete))
    return combine(verdicts)


@dataclass(frozen=True)
class DivergenceRecord:
    source_cycle: list | None
    target_cycle: list | None
    source_exhaustive: bool
    target_exhaustive: bool

    @property
    def source_diverges(self) -> bool:
        return self.source_cycle is not None

    @property
    def target_diverges(self) -> bool:
        return self.target_cycle is not None


def divergence_record(term, env=None, budget: ExplorationBudget | None = None, *,
                      depth: int | None = None, mutation: Mutation | None = None,
                      engine: Correspondence | None = None) -> DivergenceRecord:
    """Look for a revisited state on each side.

    ``depth`` bounds both searches; by default they run until closure or the
    state cap. A cycle is only ever reported from an explicit revisit.
    """
    program = _program(term, env)
    engine = _engine(budget, mutation, CONGRUENCE, engine)
    cap = engine.budget.state_cap
    source = point_graph([program], engine.source_steps, depth=depth, state_cap=cap)
    target = point_graph([engine.image(program)], engine.target_steps, depth=depth, state_cap=cap)
    return DivergenceRecord(find_cycle(source), find_cycle(target),
                            source.exhaustive, target.exhaustive)


def check_divergence_reflection(term, env=None, budget: ExplorationBudget | None = None, *,
                                depth: int | None = None, mutation: Mutation | None = None,
                                engine: Correspondence | None = None) -> Verdict:
    record = divergence_record(term, env, budget, depth=depth, mutation=mutation, engine=engine)
    if record.source_diverges:
        return Verdict(HOLDS, record)
    if record.target_diverges:
        if record.source_exhaustive:
            return Verdict(FAILS, record, record, "target diverges, source cannot")
        return Verdict(INCONCLUSIVE, record, note="source search truncated")
    if record.target_exhaustive:
        return Verdict(HOLDS, record)
    return Verdict(INCONCLUSIVE, record, note="target search truncated")


def check_compositionality(term, env=None, *, mutation: Mutation | None = None,
                           policy: RenamingPolicy = DEFAULT_POLICY) -> Verdict:
    """Structural check of the inner translation on the term and all bodies."""
    program = _program(term, env)
    bad = compositionality_violations(program.term, policy, mutation)
    for definition in program.env.values():
        bad += compositionality_violations(definition.body, policy, mutation)
    if bad:
        return Verdict(FAILS, counterexample=bad[0])
    return Verdict(HOLDS, "every operator is its context filled with translated subterms")


def random_substitution(names, rng: random.Random, pool_size: int = 3) -> dict:
    """A random finite substitution on ``names`` into themselves and fresh names."""
    names = sorted(names)
    pool = names + [f"n{k}" for k in range(pool_size)]
    return {x: rng.choice(pool) for x in names}


def check_name_invariance(term, env=None, *, samples: int = 10, seed: int = 0,
                          mutation: Mutation | None = None,
                          policy: RenamingPolicy = DEFAULT_POLICY) -> Verdict:
    """Translation commutes with substitution up to alpha-conversion.

    The target substitution renames the image of each source name to the
    image of its replacement.
    """
    program = _program(term, env)
    encoder = Encoder(program.env, policy, mutation)
    rng = random.Random(f"{seed}:{program}")
    base = encoder.encode(program.term)
    names = pccs.pccs_free_names(program.term)
    checked = []
    for _ in range(samples):
        sigma = random_substitution(names, rng)
        lifted = {policy.source_name(a): policy.source_name(b) for a, b in sigma.items()}
        left = encoder.encode(pccs.substitute(program.term, sigma))
        right = ppi.substitute(base, lifted)
        if not ppi.alpha_equivalent(left, right):
            return Verdict(FAILS, checked, {"substitution": sigma, "left": left, "right": right})
        checked.append(sigma)
    return Verdict(HOLDS, checked)


# ---------------------------------------------------------------- relations

def source_closure(programs, engine: Correspondence) -> tuple[frozenset, bool]:
    cap = engine.budget.state_cap
    graph = point_graph(programs, engine.source_steps, state_cap=cap)
    return frozenset(graph.points), graph.exhaustive


class EncodingHint(WitnessHint):
    """Witnesses for pairs ``(S, image of S)`` built by the emulation engine."""

    def __init__(self, engine: Correspondence):
        self.engine = engine

    def _is_image_pair(self, left, right) -> bool:
        return isinstance(left, SourceProgram) and self.engine.image(left) == right

    def forward(self, left, right, delta):
        if not self._is_image_pair(left, right):
            return
        reach = self.engine.source_reach(left, self.engine.budget.depth)
        if delta in reach.parent:
            path = self.engine.emulate(left, reach.path(delta))
            if path is not None:
                yield path

    def backward(self, left, right, theta):
        if not self._is_image_pair(left, right):
            return
        path, extended = self.engine.b_completion(theta)
        index = self.engine.source_index(left, self.engine.budget.depth)
        if extended in index:
            reach = self.engine.source_reach(left, self.engine.budget.depth)
            yield reach.path(index[extended]), path


def mixed_step_function(engine: Correspondence):
    def steps(term):
        if isinstance(term, SourceProgram):
            return engine.source_steps(term)
        return engine.target_steps(term)

    return steps


@dataclass
class TheoremReport:
    flavor: str
    relation: Relation
    conjuncts: dict
    poc: list

    @property
    def status(self) -> str:
        return worst([v.status for v in self.conjuncts.values()] + [r.status for r in self.poc])

    def verdict(self) -> Verdict:
        failing = next((k for k, v in self.conjuncts.items() if v.fails), None)
        if failing is None:
            failing = next((r.counterexample for r in self.poc if r.status == FAILS), None)
        return Verdict(self.status, self, failing)


def theorem_instance_check(corpus, budget: ExplorationBudget | None = None, flavor: str = WEAK, *,
                           mutation: Mutation | None = None,
                           engine: Correspondence | None = None) -> TheoremReport:
    """The forward direction of the characterisation, on a finite corpus.

    Checks the chosen correspondence flavour on every corpus program, builds
    the induced relation over the closure of the corpus and verifies its four
    defining properties.
    """
    if flavor not in POC_CHECKS:
        raise ValueError(f"unknown flavour {flavor!r}")
    engine = _engine(budget, mutation, CONGRUENCE, engine)
    programs = [_program(p) for p in corpus]
    poc = [POC_CHECKS[flavor](p, engine=engine) for p in programs]

    sources, sources_complete = source_closure(programs, engine)
    roots = [engine.image(s) for s in sorted(sources, key=str)]
    target_graph = point_graph(roots, engine.target_steps, state_cap=engine.budget.state_cap)
    targets = frozenset(target_graph.points)
    target_relation = Relation.identity(targets)
    induced = build_induced_relation(sorted(sources, key=str), engine.image, target_relation)

    def is_target(term):
        return not isinstance(term, SourceProgram)

    conjuncts = {}
    missing = [s for s in sorted(sources, key=str) if (s, engine.image(s)) not in induced]
    conjuncts["encoding-pairs"] = (
        Verdict(FAILS, counterexample=missing[0]) if missing else Verdict(HOLDS, len(sources))
    )
    restricted = induced.restrict(is_target)
    conjuncts["restriction"] = (
        Verdict(HOLDS, len(restricted)) if restricted == target_relation
        else Verdict(FAILS, counterexample=set(restricted) ^ set(target_relation))
    )
    bad = [(s, t) for s, t in induced if isinstance(s, SourceProgram)
           and is_target(t) and (engine.image(s), t) not in target_relation]
    conjuncts["image-projection"] = (
        Verdict(FAILS, counterexample=bad[0]) if bad else Verdict(HOLDS)
    )
    conjuncts["preorder"] = check_preorder(induced, sources | targets)
    steps = mixed_step_function(engine)
    if flavor == WEAK:
        conjuncts["simulation"] = check_prob_correspondence_sim(
            induced, steps, engine.budget, EncodingHint(engine))
    elif flavor == MID:
        conjuncts["simulation"] = check_prob_bisimulation(
            induced, steps, engine.budget, EncodingHint(engine))
    else:
        conjuncts["simulation"] = check_strong_prob_bisimulation(induced, steps)
    if not (sources_complete and target_graph.exhaustive):
        conjuncts["closure"] = Verdict(INCONCLUSIVE, note="state closure cut by the cap")
    return TheoremReport(flavor, induced, conjuncts, poc)
