import pytest
from hypothesis import given, settings

from probcorr import pccs, ppi
from probcorr.cli import parse_pccs, parse_ppi
from probcorr.cli.parsing import parse_pccs_process
from probcorr.encoder import (
    DEFAULT_POLICY,
    Mutation,
    RenamingPolicy,
    classify_target_step,
    compositionality_violations,
    encode_dist,
    encode_inner,
    encode_outer,
)
from probcorr.poc import check_name_invariance
from probcorr.ppi import CLASS_A, CLASS_B, CLASS_REP, CLASS_TAU, StepClass, StepEvidence
from probcorr.prob_core import dist_point
from strategies import CALL_ENV, SOURCE_NAMES, source_processes, source_programs

term = parse_pccs_process


class TestInner:
    def test_success(self):
        assert encode_inner(pccs.Success()) == ppi.Success()

    def test_inert(self):
        assert encode_outer(pccs.Inert()) == ppi.Nil()

    def test_call_is_an_output_on_the_constant_channel(self):
        assert encode_inner(pccs.Call("C", ("y",))) == ppi.OutPrefix("#C_C", ("s_y",), ppi.Nil())

    def test_tau_choice(self):
        expected = parse_ppi("new #t. #t!{1/8 1(): P, 7/8 2(): Q} | #t?().0")
        assert ppi.alpha_equivalent(encode_inner(term("tau.(1/8: P + 7/8: Q)")), expected)

    def test_input_choice(self):
        expected = parse_ppi("s_x?().(new #i. #i!{1/3 1(): ok, 2/3 2(): 0} | #i?().0)")
        assert ppi.alpha_equivalent(encode_inner(term("x.(1/3: ok + 2/3: 0)")), expected)

    def test_output_choice(self):
        expected = parse_ppi("s_x!{1/4 1(): A, 3/4 2(): B}")
        assert encode_inner(term("'x.(1/4: A + 3/4: B)")) == expected

    def test_restriction_binds_every_name(self):
        encoded = encode_inner(term("('a.(1: 0) | b.(1: 0))\\{a,b}"))
        assert ppi.ppi_free_names(encoded) == set()

    def test_relabel_substitutes(self):
        encoded = encode_inner(term("a.(1: ok)[a->b]"))
        assert ppi.ppi_free_names(encoded) == {"s_b"}

    def test_relabel_avoids_capture(self):
        encoded = encode_inner(term("(a.(1: 0) | 'b.(1: 0))\\{b}[a->b]"))
        assert ppi.ppi_free_names(encoded) == {"s_b"}


class TestOuter:
    def test_without_definitions_equals_inner(self):
        proc = term("tau.(1/8: P + 7/8: Q) | tau.(3/5: R + 2/5: S1)")
        assert encode_outer(proc) == encode_inner(proc)

    def test_definition_is_replicated_under_its_channel(self):
        program = parse_pccs("def C() = ok\nC<>")
        assert encode_outer(program.term, program.env) == parse_ppi("new #C_C. #C_C!<>.0 | !#C_C().ok")

    def test_missing_definition(self):
        with pytest.raises(pccs.UnknownConstant):
            encode_outer(pccs.Call("Nowhere"))

    def test_definitions_in_sorted_order(self):
        program = parse_pccs("def B() = ok\ndef A() = B<>\nA<>")
        text = ppi.pretty(encode_outer(program.term, program.env))
        assert text.index("!#C_A") < text.index("!#C_B")

    def test_point_distribution(self):
        proc = term("'a.(1: 0)")
        assert encode_dist(dist_point(proc)) == dist_point(encode_outer(proc))


class TestMutations:
    def test_drop_iota_input(self):
        encoded = encode_inner(term("x.(1: ok)"), mutation=Mutation.DROP_IOTA_INPUT)
        assert ppi.alpha_equivalent(encoded, parse_ppi("s_x?().(new #i. #i!{1 1(): ok})"))

    def test_swap_branch_probabilities(self):
        encoded = encode_inner(term("'x.(1/4: A + 3/4: B)"), mutation=Mutation.SWAP_BRANCH_PROBS)
        assert encoded == parse_ppi("s_x!{3/4 1(): A, 1/4 2(): B}")

    def test_omit_definitions(self):
        program = parse_pccs("def C() = ok\nC<>")
        encoded = encode_outer(program.term, program.env, mutation=Mutation.OMIT_DEFINITIONS)
        assert encoded == parse_ppi("new #C_C. #C_C!<>.0")
        assert ppi.ppi_reduce(encoded) == []


class TestClassification:
    @pytest.mark.parametrize("channel, replicated, expected", [
        ("s_x", False, CLASS_A),
        ("#i", False, CLASS_B),
        ("#i~3", False, CLASS_B),
        ("#t", False, CLASS_TAU),
        ("#C_C", True, CLASS_REP),
        ("#C_C", False, StepClass("other", "#C_C")),
        ("free", False, StepClass("other", "free")),
    ])
    def test_by_channel(self, channel, replicated, expected):
        assert classify_target_step(StepEvidence(channel, replicated)) == expected

    def test_reserved_sorts_must_differ(self):
        with pytest.raises(ValueError):
            RenamingPolicy(iota="#t")

    def test_source_images_stay_in_their_sort(self):
        for name in SOURCE_NAMES:
            assert DEFAULT_POLICY.is_source_image(DEFAULT_POLICY.check_source_name(name))


@given(source_processes(with_calls=True))
def test_compositional(proc):
    assert compositionality_violations(proc) == []


@settings(max_examples=60)
@given(source_programs())
def test_name_invariance(program):
    assert check_name_invariance(program, samples=5).holds


@given(source_processes(with_calls=True))
def test_success_at_step_zero(proc):
    encoded = encode_outer(proc, CALL_ENV)
    assert pccs.pccs_has_barb(proc, CALL_ENV, pccs.OK) == ppi.ppi_has_barb(encoded, ppi.OK)


@given(source_processes(with_calls=True))
def test_barbs_at_step_zero(proc):
    encoded = encode_outer(proc, CALL_ENV)
    for name in SOURCE_NAMES:
        for kind, direction in ((pccs.IN, ppi.IN), (pccs.OUT, ppi.OUT)):
            source = pccs.pccs_has_barb(proc, CALL_ENV, pccs.Action(kind, name))
            target = ppi.ppi_has_barb(encoded, (direction, DEFAULT_POLICY.source_name(name)))
            assert source == target


@given(source_processes(with_calls=True))
def test_no_collision_with_reserved_names(proc):
    encoded = encode_outer(proc, CALL_ENV)
    for name in ppi.ppi_free_names(encoded):
        assert DEFAULT_POLICY.is_source_image(name)
