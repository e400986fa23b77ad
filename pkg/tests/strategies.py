"""Hypothesis generators for terms, distributions and relations."""

from fractions import Fraction

from hypothesis import strategies as st

from probcorr import pccs, ppi
from probcorr.prob_core import Distribution

SOURCE_NAMES = ("a", "b", "c")
STUBS = ("P", "Q")
TARGET_NAMES = ("x", "y", "z")

# one recursive constant, shared by every generated program that calls it
CALL_ENV = pccs.DefEnv({
    "C": (("u",), pccs.Choice(pccs.Action(pccs.OUT, "u"), ((1, pccs.Success()),))),
})


@st.composite
def probabilities(draw, max_parts=3, max_denominator=6):
    """Positive fractions summing to one."""
    parts = draw(st.integers(1, max_parts))
    denominator = draw(st.integers(parts, max_denominator))
    cuts = sorted(draw(st.sets(st.integers(1, denominator - 1), min_size=parts - 1,
                               max_size=parts - 1))) if parts > 1 else []
    bounds = [0] + cuts + [denominator]
    return [Fraction(hi - lo, denominator) for lo, hi in zip(bounds, bounds[1:])]


def _source_leaves(with_calls):
    leaves = [st.just(pccs.Inert()), st.just(pccs.Success()),
              st.sampled_from(STUBS).map(pccs.Stub)]
    if with_calls:
        leaves.append(st.sampled_from(SOURCE_NAMES).map(lambda n: pccs.Call("C", (n,))))
    return st.one_of(leaves)


@st.composite
def _source_choice(draw, children):
    kind = draw(st.sampled_from((pccs.IN, pccs.OUT, pccs.TAU)))
    name = None if kind == pccs.TAU else draw(st.sampled_from(SOURCE_NAMES))
    probs = draw(probabilities())
    branches = tuple((p, draw(children)) for p in probs)
    return pccs.Choice(pccs.Action(kind, name), branches)


def _source_compound(children):
    names = st.sampled_from(SOURCE_NAMES)
    return st.one_of(
        _source_choice(children),
        st.builds(pccs.Par, children, children),
        st.builds(pccs.Restrict, children, st.frozensets(names, min_size=1, max_size=2)),
        st.builds(pccs.Relabel, children,
                  st.dictionaries(names, names, min_size=1, max_size=2).map(
                      lambda m: tuple(m.items()))),
    )


def source_processes(with_calls=False, max_leaves=8):
    return st.recursive(_source_leaves(with_calls), _source_compound, max_leaves=max_leaves)


def source_programs(max_leaves=8):
    return st.builds(pccs.SourceProgram, source_processes(True, max_leaves), st.just(CALL_ENV))


def _params(names=TARGET_NAMES):
    return st.lists(st.sampled_from(names), max_size=2, unique=True).map(tuple)


def _target_leaves():
    return st.one_of(st.just(ppi.Nil()), st.just(ppi.Success()),
                     st.sampled_from(STUBS).map(ppi.Stub))


@st.composite
def _branch_in(draw, children):
    indices = draw(st.sets(st.integers(1, 3), min_size=1, max_size=2))
    branches = tuple((i, draw(_params()), draw(children)) for i in sorted(indices))
    return ppi.BranchIn(draw(st.sampled_from(TARGET_NAMES)), branches)


@st.composite
def _select_out(draw, children):
    probs = draw(probabilities())
    branches = tuple((i, p, draw(_params()), draw(children)) for i, p in enumerate(probs, 1))
    return ppi.SelectOut(draw(st.sampled_from(TARGET_NAMES)), branches)


def _target_compound(children):
    subject = st.sampled_from(TARGET_NAMES)
    return st.one_of(
        _branch_in(children),
        _select_out(children),
        st.builds(ppi.InPrefix, subject, _params(), children),
        st.builds(ppi.RepIn, subject, _params(), children),
        st.builds(ppi.OutPrefix, subject, st.lists(subject, max_size=2).map(tuple), children),
        st.builds(ppi.Restrict, subject, children),
        st.builds(ppi.Par, children, children),
    )


def target_processes(max_leaves=8):
    return st.recursive(_target_leaves(), _target_compound, max_leaves=max_leaves)


@st.composite
def distributions(draw, support, max_size=5, max_denominator=12):
    """A distribution over a subset of ``support`` with a common denominator."""
    points = draw(st.lists(st.sampled_from(support), min_size=1,
                           max_size=min(max_size, len(support)), unique=True))
    denominator = draw(st.integers(len(points), max_denominator))
    cuts = []
    if len(points) > 1:
        cuts = sorted(draw(st.sets(st.integers(1, denominator - 1), min_size=len(points) - 1,
                                   max_size=len(points) - 1)))
    bounds = [0] + cuts + [denominator]
    weights = [Fraction(hi - lo, denominator) for lo, hi in zip(bounds, bounds[1:])]
    return Distribution(dict(zip(points, weights)))
