"""Command-line front end.

Exit codes: 0 when every check holds, 1 when any fails, 2 when something
is inconclusive at the budget and 3 for usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources

from .. import pccs, ppi
from ..encoder import Mutation, encode_outer
from ..equivalence import FAILS, HOLDS, INCONCLUSIVE, ExplorationBudget, Verdict, worst
from ..pccs import SourceProgram
from ..poc import (
    MID,
    PLAIN,
    STRONG,
    WEAK,
    Correspondence,
    PocReport,
    TheoremReport,
    check_barb_sensitiveness,
    check_compositionality,
    check_divergence_reflection,
    check_mid_poc,
    check_name_invariance,
    check_nonprob_oc,
    check_strong_poc,
    check_success_sensitiveness,
    check_weak_poc,
    theorem_instance_check,
)
from ..prob_core import Distribution, apply_choices, dist_point, reach_with_paths
from .parsing import CorpusEntry, ParseError, parse_corpus, parse_pccs

EXIT_CODES = {HOLDS: 0, FAILS: 1, INCONCLUSIVE: 2}
EXIT_USAGE = 3

SUITE_CHECKS = ("compositionality", "name-invariance", "weak-poc", "divergence", "success")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- config

def default_corpus_text(name: str = "corpus.pccs") -> str:
    return resources.files("probcorr").joinpath("data", name).read_text(encoding="utf-8")


def load_entries(args) -> list:
    if args.term is not None:
        program = parse_pccs(args.term)
        return [CorpusEntry("term", args.term, program, 1)]
    if args.corpus is None:
        text = default_corpus_text()
    else:
        try:
            with open(args.corpus, encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise UsageError(f"cannot read corpus: {exc}") from None
    entries = parse_corpus(text)
    if args.entry:
        known = {e.name for e in entries}
        unknown = [n for n in args.entry if n not in known]
        if unknown:
            raise UsageError(f"no entry named {', '.join(unknown)}")
        entries = [e for e in entries if e.name in args.entry]
    return entries


def budget_of(args) -> ExplorationBudget:
    for flag in ("depth", "state_cap", "combo_cap"):
        value = getattr(args, flag)
        if value is not None and value < (0 if flag == "depth" else 1):
            raise UsageError(f"--{flag.replace('_', '-')} must be positive")
    return ExplorationBudget(depth=args.depth, search_depth=args.search_depth,
                             state_cap=args.state_cap, combo_cap=args.combo_cap)


def engine_of(args) -> Correspondence:
    mutation = Mutation(args.mutation) if args.mutation else None
    return Correspondence(budget_of(args), mutation, relation=args.relation)


# ---------------------------------------------------------------- rendering

def term_text(term) -> str:
    if isinstance(term, SourceProgram):
        return pccs.pretty(term.term)
    if isinstance(term, pccs.Process):
        return pccs.pretty(term)
    if isinstance(term, ppi.Process):
        return ppi.pretty(term)
    return str(term)


def dist_record(dist: Distribution | None):
    if dist is None:
        return None
    return sorted([term_text(t), str(w)] for t, w in dist.items())


def dist_text(dist: Distribution | None) -> str:
    if dist is None:
        return "-"
    return "{" + ", ".join(f"{t}: {w}" for t, w in dist_record(dist)) + "}"


def coupling_record(coupling):
    if coupling is None:
        return None
    return sorted([term_text(a), term_text(b), str(w)] for (a, b), w in coupling.weights.items())


def _json(record: dict) -> str:
    return json.dumps(record, ensure_ascii=False, separators=(", ", ": "))


class Output:
    def __init__(self, fmt: str, stream=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout

    def text(self, line: str = ""):
        if self.fmt == "text":
            print(line, file=self.stream)

    def record(self, record: dict):
        if self.fmt == "records":
            print(_json(record), file=self.stream)


def _obligation_record(entry, check, program, ob) -> dict:
    return {
        "entry": entry,
        "term": term_text(program),
        "check": check,
        "direction": ob.direction,
        "status": ob.status,
        "source": dist_record(ob.source),
        "target": dist_record(ob.target),
        "extended": dist_record(ob.extended),
        "coupling": coupling_record(ob.coupling),
        "trace": [list(step) for step in ob.trace],
        "note": ob.note,
    }


def emit_poc(out: Output, entry: str, check: str, report: PocReport) -> str:
    out.text(f"[{entry}] {check}: {report.status} ({len(report.obligations)} obligations)")
    for ob in report.obligations:
        out.record(_obligation_record(entry, check, report.program, ob))
        if ob.direction == "complete":
            line = f"  complete {ob.status}: {dist_text(ob.source)} -> {dist_text(ob.target)}"
        else:
            line = (f"  sound {ob.status}: {dist_text(ob.target)} -> "
                    f"{dist_text(ob.extended)} ~ {dist_text(ob.source)}")
        if ob.trace:
            line += "  via " + " ".join("+".join(step) for step in ob.trace)
        if ob.note:
            line += f"  [{ob.note}]"
        out.text(line)
    for note in report.notes:
        out.text(f"  note: {note}")
    return report.status


def _detail(value) -> object:
    if value is None or isinstance(value, (str, int, bool)):
        return value
    if isinstance(value, dict):
        return {str(k): _detail(v) for k, v in sorted(value.items(), key=lambda kv: str(kv[0]))}
    if isinstance(value, (list, tuple)):
        return [_detail(v) for v in value]
    if hasattr(value, "source_cycle"):
        return {
            "source_diverges": value.source_diverges,
            "target_diverges": value.target_diverges,
            "source_cycle": [term_text(t) for t in value.source_cycle or ()],
            "target_cycle": [term_text(t) for t in value.target_cycle or ()],
        }
    return term_text(value)


def emit_verdict(out: Output, entry: str, check: str, verdict: Verdict) -> str:
    detail = verdict.counterexample if verdict.fails else verdict.witness
    out.record({"entry": entry, "check": check, "status": verdict.status,
                "detail": _detail(detail), "note": verdict.note})
    line = f"[{entry}] {check}: {verdict.status}"
    if verdict.fails:
        line += f"  counterexample: {_detail(verdict.counterexample)}"
    if verdict.note:
        line += f"  [{verdict.note}]"
    out.text(line)
    return verdict.status


def emit_theorem(out: Output, report: TheoremReport) -> str:
    out.text(f"theorem ({report.flavor}): {report.status}, "
             f"induced relation with {len(report.relation)} pairs")
    for name, verdict in report.conjuncts.items():
        counter = verdict.counterexample
        if hasattr(counter, "pair"):
            counter = {"pair": [term_text(x) for x in counter.pair], "clause": counter.clause,
                       "distribution": dist_record(counter.dist)}
        out.record({"entry": "*", "check": f"theorem-{report.flavor}", "conjunct": name,
                    "status": verdict.status, "counterexample": _detail(counter)})
        out.text(f"  {name}: {verdict.status}")
    for poc in report.poc:
        out.text(f"  {report.flavor} poc for {term_text(poc.program)}: {poc.status}")
    return report.status


# ---------------------------------------------------------------- commands

POC_CHECKERS = {
    "weak-poc": check_weak_poc,
    "mid-poc": check_mid_poc,
    "strong-poc": check_strong_poc,
}
OC_VARIANTS = {"oc-strong": STRONG, "oc-plain": PLAIN, "oc-weak": WEAK}
VERDICT_CHECKERS = {
    "success": check_success_sensitiveness,
    "barbs": check_barb_sensitiveness,
    "divergence": check_divergence_reflection,
}
CHECKERS = sorted(list(POC_CHECKERS) + list(OC_VARIANTS) + list(VERDICT_CHECKERS)
                  + ["name-invariance", "compositionality", "theorem"])


def run_check(name: str, entry: CorpusEntry, engine: Correspondence, out: Output) -> str:
    program = entry.program
    if name in POC_CHECKERS:
        return emit_poc(out, entry.name, name, POC_CHECKERS[name](program, engine=engine))
    if name in OC_VARIANTS:
        report = check_nonprob_oc(program, variant=OC_VARIANTS[name], engine=engine)
        return emit_poc(out, entry.name, name, report)
    if name in VERDICT_CHECKERS:
        return emit_verdict(out, entry.name, name, VERDICT_CHECKERS[name](program, engine=engine))
    if name == "name-invariance":
        verdict = check_name_invariance(program, mutation=engine.mutation)
        return emit_verdict(out, entry.name, name, verdict)
    if name == "compositionality":
        verdict = check_compositionality(program, mutation=engine.mutation)
        return emit_verdict(out, entry.name, name, verdict)
    raise UsageError(f"unknown checker {name}")


def cmd_check(args, entries, out) -> str:
    engine = engine_of(args)
    if args.checker == "theorem":
        report = theorem_instance_check([e.program for e in entries], flavor=args.flavor,
                                        engine=engine)
        return emit_theorem(out, report)
    return worst(run_check(args.checker, e, engine, out) for e in entries)


def cmd_suite(args, entries, out) -> str:
    engine = engine_of(args)
    statuses = []
    for entry in entries:
        for name in SUITE_CHECKS:
            if name == "weak-poc":
                report = check_weak_poc(entry.program, engine=engine)
                out.record({"entry": entry.name, "check": name, "status": report.status,
                            "detail": len(report.obligations), "note": ""})
                out.text(f"[{entry.name}] {name}: {report.status} "
                         f"({len(report.obligations)} obligations)")
                statuses.append(report.status)
            else:
                statuses.append(run_check(name, entry, engine, out))
    status = worst(statuses)
    counts = {s: statuses.count(s) for s in (HOLDS, FAILS, INCONCLUSIVE)}
    out.text(f"suite: {status}; " + ", ".join(f"{n} {s}" for s, n in counts.items()))
    return status


def cmd_steps(args, entries, out) -> str:
    engine = engine_of(args)
    for entry in entries:
        program = entry.program
        if args.side == "source":
            start, step_fn = dist_point(program), engine.source_steps
        else:
            start, step_fn = dist_point(engine.image(program)), engine.target_steps
        reach = reach_with_paths(start, step_fn, args.depth, combo_cap=args.combo_cap,
                                 state_cap=args.state_cap)
        out.text(f"[{entry.name}] {args.side} distributions within {args.depth} steps:")
        listed = sorted(reach.parent, key=lambda d: (len(reach.path(d)), dist_text(d)))
        for dist in listed:
            k = len(reach.path(dist))
            out.record({"entry": entry.name, "side": args.side, "depth": k,
                        "distribution": dist_record(dist)})
            out.text(f"  {k}: {dist_text(dist)}")
        if not reach.reached.exhaustive:
            out.text("  (more distributions lie beyond the bound)")
    return HOLDS


def cmd_encode(args, entries, out) -> str:
    engine = engine_of(args)
    for entry in entries:
        program = entry.program
        target = encode_outer(program.term, program.env, engine.policy, engine.mutation)
        text = ppi.pretty(ppi.ppi_normal_form(target)) if args.normal else ppi.pretty(target)
        out.record({"entry": entry.name, "source": str(program), "target": text})
        out.text(f"[{entry.name}] {text}")
    return HOLDS


def cmd_trace(args, entries, out) -> str:
    engine = engine_of(args)
    statuses = []
    for entry in entries:
        program = entry.program
        reach = engine.source_reach(program, args.depth)
        for goal in sorted(reach.parent, key=lambda d: (len(reach.path(d)), dist_text(d))):
            path = reach.path(goal)
            if not path:
                continue
            out.text(f"[{entry.name}] to {dist_text(goal)}")
            source = dist_point(program)
            target = dist_point(engine.image(program))
            steps = []
            ok = True
            for k, choices in enumerate(path, 1):
                source = apply_choices(source, choices)
                out.text(f"  source {k}: {dist_text(source)}")
                for point in sorted(choices, key=str):
                    emulation = engine.emulate_step(point, choices[point])
                    if emulation is None:
                        ok = False
                        break
                    for target_choices in emulation:
                        if any(t not in target for t in target_choices):
                            ok = False
                            break
                        target = apply_choices(target, target_choices)
                        classes = "+".join(engine.classes([target_choices])[0])
                        steps.append(classes)
                        out.text(f"    target {classes}: {dist_text(target)}")
                    if not ok:
                        break
                if not ok:
                    break
            matched = ok and target == engine.image_dist(source)
            status = HOLDS if matched else INCONCLUSIVE
            statuses.append(status)
            out.record({"entry": entry.name, "source": dist_record(goal),
                        "target": dist_record(target), "trace": steps, "status": status})
            if not matched:
                out.text("    (no point-wise emulation found)")
    return worst(statuses)


COMMANDS = {
    "check": cmd_check,
    "suite": cmd_suite,
    "steps": cmd_steps,
    "encode": cmd_encode,
    "trace": cmd_trace,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--term", help="a single program given inline instead of a corpus")
    common.add_argument("--entry", action="append", help="only run the named entry (repeatable)")
    common.add_argument("--depth", type=int, default=4)
    common.add_argument("--search-depth", type=int, default=None,
                        help="bound for witness searches (default: twice the depth)")
    common.add_argument("--state-cap", type=int, default=20_000)
    common.add_argument("--combo-cap", type=int, default=10_000)
    common.add_argument("--relation", choices=["congruence", "identity"], default="congruence")
    common.add_argument("--mutation", choices=[m.value for m in Mutation])
    common.add_argument("--format", choices=["text", "records"], default="text")

    parser = _Parser(prog="probcorr", description="Check a translation of probabilistic CCS "
                     "into the probabilistic pi-calculus on finite instances.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    check = sub.add_parser("check", parents=[common], help="run one checker")
    check.add_argument("checker", choices=CHECKERS)
    check.add_argument("--flavor", choices=[WEAK, MID, STRONG], default=WEAK)
    sub.add_parser("suite", parents=[common], help="run the property battery")
    steps = sub.add_parser("steps", parents=[common], help="list reachable distributions")
    steps.add_argument("--side", choices=["source", "target"], default="source")
    encode = sub.add_parser("encode", parents=[common], help="print translations")
    encode.add_argument("--normal", action="store_true", help="print the normal form")
    sub.add_parser("trace", parents=[common], help="show source steps and their emulations")
    for command in sub.choices.values():
        command.add_argument("corpus", nargs="?",
                             help="corpus file (default: the shipped corpus)")
    return parser


def run(argv=None, stream=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Output(args.format, stream)
    try:
        entries = load_entries(args)
        status = COMMANDS[args.command](args, entries, out)
    except (ParseError, UsageError, pccs.UnknownConstant, pccs.ArityMismatch) as exc:
        print(f"probcorr: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_CODES[status]


def main(argv=None) -> int:
    sys.exit(run(argv))
