from fractions import Fraction

import pytest
from hypothesis import given

from probcorr.cli import parse_pccs
from probcorr.cli.parsing import parse_pccs_process
from probcorr.pccs import (
    EMPTY_ENV,
    IN,
    OK,
    OUT,
    TAU,
    Action,
    ArityMismatch,
    Call,
    Choice,
    DefEnv,
    Inert,
    Par,
    Relabel,
    Restrict,
    Stub,
    Success,
    UnknownConstant,
    pccs_free_names,
    pccs_has_barb,
    pccs_labelled_steps,
    pccs_reach_barb,
    pccs_reduce,
    substitute,
)
from probcorr.prob_core import Distribution, dist_point
from strategies import CALL_ENV, source_processes

F = Fraction
term = parse_pccs_process


def only(collection):
    (item,) = collection
    return item


class TestFreeNames:
    def test_success(self):
        assert pccs_free_names(Success()) == set()

    def test_restricted_guard(self):
        assert pccs_free_names(term("(a.(1: ok))\\{a}")) == set()

    def test_relabel_maps_free_names(self):
        assert pccs_free_names(term("a.(1: ok)[a->b]")) == {"b"}

    def test_call_arguments_are_free(self):
        assert pccs_free_names(Call("C", ("x", "y"))) == {"x", "y"}


class TestLabelledSteps:
    def test_tau_choice(self):
        steps = pccs_labelled_steps(term("tau.(1/8: P + 7/8: Q)"), EMPTY_ENV)
        assert steps == {(Action(TAU), Distribution({Stub("P"): F(1, 8), Stub("Q"): F(7, 8)}))}

    def test_call_unfolds_in_one_silent_step(self):
        program = parse_pccs("def C() = ok\nC<>")
        assert pccs_labelled_steps(program.term, program.env) == {(Action(TAU), dist_point(Success()))}

    def test_inert_has_no_steps(self):
        assert pccs_labelled_steps(Inert(), EMPTY_ENV) == set()

    def test_communication_multiplies_branches(self):
        proc = term("a.(1: ok) | 'a.(1/2: P + 1/2: Q)")
        expected = Distribution({
            Par(Success(), Stub("P")): F(1, 2),
            Par(Success(), Stub("Q")): F(1, 2),
        })
        assert pccs_reduce(proc, EMPTY_ENV) == {expected}

    def test_lone_input_cannot_reduce(self):
        assert pccs_reduce(term("x.(1: ok)"), EMPTY_ENV) == set()

    def test_restriction_hides_labels_but_keeps_communication(self):
        proc = term("(a.(1: ok) | 'a.(1: 0))\\{a}")
        labels = {label for label, _ in pccs_labelled_steps(proc, EMPTY_ENV)}
        assert labels == {Action(TAU)}

    def test_relabelled_partners_communicate(self):
        proc = term("a.(1/4: ok + 3/4: 0)[a->c] | 'c.(1: 0)")
        dist = only(pccs_reduce(proc, EMPTY_ENV))
        assert sorted(dist.values()) == [F(1, 4), F(3, 4)]

    def test_unknown_constant(self):
        with pytest.raises(UnknownConstant):
            pccs_labelled_steps(Call("Missing"), EMPTY_ENV)

    def test_arity_mismatch(self):
        env = DefEnv({"C": (("x",), Success())})
        with pytest.raises(ArityMismatch):
            pccs_labelled_steps(Call("C", ()), env)

    def test_unfolding_substitutes_arguments(self):
        env = DefEnv({"D": (("z",), term("'z.(1: 0)"))})
        (label, dist), = pccs_labelled_steps(Call("D", ("a",)), env)
        assert dist == dist_point(term("'a.(1: 0)"))


class TestBarbs:
    def test_input_barb(self):
        assert pccs_has_barb(term("a.(1: ok)"), EMPTY_ENV, Action(IN, "a"))

    def test_guarded_success_is_no_barb(self):
        assert not pccs_has_barb(term("a.(1: ok)"), EMPTY_ENV, OK)

    def test_unguarded_success(self):
        assert pccs_has_barb(term("ok | P"), EMPTY_ENV, OK)

    def test_success_reachable_after_unfolding(self):
        program = parse_pccs("def C() = ok\nC<>")
        assert pccs_reach_barb(program.term, program.env, OK, 1)
        assert not pccs_reach_barb(program.term, program.env, OK, 0)

    def test_no_partner_means_no_success(self):
        assert not pccs_reach_barb(term("a.(1: ok)"), EMPTY_ENV, OK, 5)


class TestSubstitution:
    def test_avoids_capture_under_restriction(self):
        proc = term("('a.(1: 0) | b.(1: 0))\\{b}")
        renamed = substitute(proc, {"a": "b"})
        assert pccs_free_names(renamed) == {"b"}
        assert renamed != term("('b.(1: 0) | b.(1: 0))\\{b}")

    def test_composes_with_relabel(self):
        proc = term("a.(1: 0)[a->b]")
        assert pccs_free_names(substitute(proc, {"b": "c"})) == {"c"}


@given(source_processes(with_calls=True))
def test_step_distributions_have_unit_mass(proc):
    for _, dist in pccs_labelled_steps(proc, CALL_ENV):
        assert sum(dist.values()) == 1


@given(source_processes())
def test_restriction_filters_labels(proc):
    wrapped = Restrict(proc, frozenset({"a"}))
    for label, _ in pccs_labelled_steps(wrapped, EMPTY_ENV):
        assert label.name != "a"


@given(source_processes())
def test_relabelling_maps_labels(proc):
    mapping = {"a": "b", "c": "a"}
    relabelled = Relabel(proc, tuple(mapping.items()))
    expected = {(label.renamed(mapping), tuple(sorted(dist.values())))
                for label, dist in pccs_labelled_steps(proc, EMPTY_ENV)}
    actual = {(label, tuple(sorted(dist.values())))
              for label, dist in pccs_labelled_steps(relabelled, EMPTY_ENV)}
    assert actual == expected


@pytest.mark.parametrize("name", ["a", "b", "c"])
def test_calls_step_silently_to_points(name):
    ((label, dist),) = pccs_labelled_steps(Call("C", (name,)), CALL_ENV)
    assert label.kind == TAU and dist.is_point()


@given(source_processes())
def test_parallel_with_inert(proc):
    left = {(label, dist.map(lambda t: Par(t, Inert())))
            for label, dist in pccs_labelled_steps(proc, EMPTY_ENV)}
    assert pccs_labelled_steps(Par(proc, Inert()), EMPTY_ENV) == left


def test_choice_probabilities_checked():
    with pytest.raises(ValueError, match="sum to 5/6"):
        Choice(Action(OUT, "a"), ((F(1, 2), Success()), (F(1, 3), Inert())))
