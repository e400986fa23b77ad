import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from oracles import random_distribution, transitive_closure
from probcorr.equivalence import (
    BISIM,
    CORR_SIM,
    STRONG,
    ExplorationBudget,
    Explorer,
    Relation,
    Verdict,
    build_induced_relation,
    check_preorder,
    check_prob_bisimulation,
    check_prob_correspondence_sim,
    check_strong_prob_bisimulation,
    combine,
    greatest_fixpoint_bisim,
    lifted_pairs,
)
from probcorr.prob_core import Distribution, dist_multistep, dist_point, lift_check

F = Fraction
STATES = ("s0", "s1", "s2", "s3")


def plts(table):
    """Step function from ``state -> list of {state: weight}``."""
    frozen = {s: [Distribution({t: F(w) for t, w in d.items()}) for d in ds]
              for s, ds in table.items()}
    return lambda s: frozen.get(s, [])


def random_plts(seed, acyclic=False, states=STATES):
    rng = random.Random(seed)
    table = {}
    for i, state in enumerate(states):
        targets = states[i + 1:] if acyclic else states
        if not targets:
            continue
        table[state] = [dict(random_distribution(rng, targets, rng.randint(1, 4)))
                        for _ in range(rng.randint(0, 2))]
    return plts(table)


class TestPreorder:
    def test_identity(self):
        assert check_preorder(Relation.identity("ABC"), "ABC").holds

    def test_missing_reflexive_pair(self):
        verdict = check_preorder(Relation([("A", "B")]), "AB")
        assert verdict.fails and verdict.counterexample == ("reflexivity", "A")

    def test_missing_transitive_pair(self):
        verdict = check_preorder(Relation([("A", "B"), ("B", "C")], "ABC"), "ABC")
        assert verdict.fails and verdict.counterexample[0] == "transitivity"

    @given(st.sets(st.tuples(st.sampled_from("ABCDE"), st.sampled_from("ABCDE"))))
    def test_closure_is_a_preorder(self, pairs):
        closed = Relation(pairs).closure("ABCDE")
        assert check_preorder(closed, "ABCDE").holds
        assert set(closed) == transitive_closure(pairs, "ABCDE")


class TestCorrespondenceSimulation:
    def test_identity_on_acyclic_system(self):
        step = plts({"A": [{"B": "1/2", "C": "1/2"}], "B": [{"C": 1}]})
        assert check_prob_correspondence_sim(Relation.identity("ABC"), step).holds

    def test_stepping_against_stuck_fails_forward(self):
        step = plts({"A": [{"B": 1}]})
        verdict = check_prob_correspondence_sim(Relation([("A", "N")], "BN"), step)
        assert verdict.fails
        assert verdict.counterexample.clause == "forward"
        assert verdict.counterexample.dist == dist_point("B")

    def test_intermediate_state_is_allowed(self):
        # the right side passes through an unrelated state before catching up
        step = plts({"A": [{"ok": 1}], "B": [{"mid": 1}], "mid": [{"ok": 1}]})
        relation = Relation([("A", "B")], ["ok"])
        assert check_prob_correspondence_sim(relation, step).holds
        assert check_prob_bisimulation(relation, step).fails

    def test_missing_witness_beyond_budget_is_inconclusive(self):
        chain = {f"n{k}": [{f"n{k + 1}": 1}] for k in range(20)}
        step = plts({"A": [{"goal": 1}], **chain, "n20": [{"goal": 1}]})
        relation = Relation([("A", "n0")], ["goal"])
        verdict = check_prob_correspondence_sim(relation, step, ExplorationBudget(depth=2))
        assert verdict.inconclusive


class TestBisimulation:
    def test_identity(self):
        step = plts({"A": [{"B": 1}], "B": [{"A": "1/2", "C": "1/2"}]})
        assert check_prob_bisimulation(Relation.identity("ABC"), step).holds

    def test_one_step_against_two(self):
        step = plts({"A": [{"ok": 1}], "B": [{"B1": 1}], "B1": [{"ok": 1}]})
        relation = Relation([("A", "B"), ("A", "B1")], ["ok"])
        assert check_prob_bisimulation(relation, step, ExplorationBudget(depth=2)).holds

    def test_divergence_against_stuck(self):
        step = plts({"L1": [{"L2": 1}], "L2": [{"L1": 1}]})
        assert check_prob_bisimulation(Relation([("L1", "N")]), step).fails


class TestStrongBisimulation:
    def test_identity(self):
        step = plts({"A": [{"B": 1}]})
        assert check_strong_prob_bisimulation(Relation.identity("AB"), step).holds

    def test_different_numbers_of_reductions(self):
        step = plts({"X": [{"A": 1}, {"B": 1}], "Y": [{"A": 1}]})
        relation = Relation([("X", "Y")], "AB")
        assert check_strong_prob_bisimulation(relation, step).fails

    def test_permuted_branches(self):
        step = plts({"X": [{"P": "1/2", "Q": "1/2"}], "Y": [{"Q": "1/2", "P": "1/2"}]})
        relation = Relation([("X", "Y"), ("Y", "X")], "PQ")
        assert check_strong_prob_bisimulation(relation, step).holds


class TestGreatestFixpoint:
    def test_inert_states_all_related(self):
        rel = greatest_fixpoint_bisim("ABC", plts({}), mode=STRONG)
        assert set(rel) == {(a, b) for a in "ABC" for b in "ABC"}

    def test_stepping_state_and_nil(self):
        step = plts({"P": [{"done": 1}]})
        rel = greatest_fixpoint_bisim(["P", "done"], step, mode=STRONG)
        assert ("P", "done") not in rel and ("done", "P") not in rel

    def test_weak_modes_cannot_tell_a_step_into_nil(self):
        step = plts({"P": [{"done": 1}]})
        for mode in (BISIM, CORR_SIM):
            assert ("P", "done") in greatest_fixpoint_bisim(["P", "done"], step, mode=mode)

    def test_twins(self):
        step = plts({"s": [{"u": "1/3", "w": "2/3"}], "t": [{"u": "1/3", "w": "2/3"}],
                     "w": [{"u": 1}]})
        rel = greatest_fixpoint_bisim("stuw", step, mode=STRONG)
        assert set(rel) == {(x, x) for x in "stuw"} | {("s", "t"), ("t", "s")}

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32))
    def test_result_passes_its_own_check(self, seed):
        states = STATES[:3]
        step = random_plts(seed, states=states)
        budget = ExplorationBudget(depth=1, search_depth=2)
        strong = greatest_fixpoint_bisim(states, step, budget, STRONG)
        assert check_strong_prob_bisimulation(strong, step).holds
        bisim = greatest_fixpoint_bisim(states, step, budget, BISIM)
        assert not check_prob_bisimulation(bisim, step, budget).fails
        corr = greatest_fixpoint_bisim(states, step, budget, CORR_SIM)
        assert not check_prob_correspondence_sim(corr, step, budget).fails


class TestBudgets:
    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32), st.sets(st.tuples(st.sampled_from(STATES), st.sampled_from(STATES))))
    def test_larger_searches_never_turn_holds_into_fails(self, seed, pairs):
        step = random_plts(seed)
        relation = Relation(pairs, STATES)
        verdicts = [check_prob_correspondence_sim(relation, step, ExplorationBudget(1, search, cap))
                    for search, cap in ((1, 3), (2, 50), (4, 20_000))]
        for small, large in zip(verdicts, verdicts[1:]):
            if small.holds:
                assert large.holds
            if small.fails:
                assert large.fails

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32), st.sets(st.tuples(st.sampled_from(STATES), st.sampled_from(STATES))))
    def test_deeper_checks_agree_once_exploration_is_closed(self, seed, pairs):
        step = random_plts(seed, acyclic=True)
        relation = Relation(pairs, STATES)
        shallow = check_prob_correspondence_sim(relation, step, ExplorationBudget(depth=8))
        deep = check_prob_correspondence_sim(relation, step, ExplorationBudget(depth=12))
        assert shallow.status == deep.status


class TestInducedRelation:
    def test_single_program(self):
        rel = build_induced_relation(["S"], lambda s: "[S]", Relation())
        assert set(rel) == {("S", "S"), ("[S]", "[S]"), ("S", "[S]")}

    def test_restriction_and_projection(self):
        targets = {"[S]", "T1", "T2", "[U]"}
        r_t = Relation([("[S]", "T1"), ("T1", "T2")], targets).closure()
        rel = build_induced_relation(["S", "U"], lambda s: f"[{s}]", r_t)
        assert set(rel.restrict(targets)) == set(r_t)
        for source in ("S", "U"):
            for target in rel.image(source) & targets:
                assert target == f"[{source}]" or (f"[{source}]", target) in r_t

    @settings(max_examples=50)
    @given(st.integers(0, 2**32))
    def test_lifting_commutes_with_restriction(self, seed):
        rng = random.Random(seed)
        targets = ["T0", "T1", "T2", "T3"]
        base = {(a, b) for a in targets for b in targets if rng.random() < 0.3}
        r_t = Relation(base, targets).closure()
        rel = build_induced_relation(["S0", "S1"], lambda s: "T" + s[1], r_t)
        restricted = rel.restrict(targets)
        for _ in range(10):
            delta = random_distribution(rng, targets, rng.randint(1, 6))
            theta = random_distribution(rng, targets, rng.randint(1, 6))
            assert (lift_check(rel, delta, theta) is None) == (lift_check(restricted, delta, theta) is None)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32))
def test_distribution_level_clause_follows_from_point_level(seed):
    step = random_plts(seed, acyclic=True)
    budget = ExplorationBudget(depth=3)
    relation = greatest_fixpoint_bisim(STATES, step, budget, CORR_SIM)
    assume(check_preorder(relation, STATES).holds)
    assume(check_prob_correspondence_sim(relation, step, budget).holds)
    rng = random.Random(seed)
    explorer = Explorer(step, budget)
    deltas = [random_distribution(rng, STATES, 4) for _ in range(4)]
    for delta, theta, _ in lifted_pairs(relation, deltas, deltas):
        for moved in dist_multistep(delta, explorer.steps, 1):
            answers = dist_multistep(theta, explorer.steps, 3)
            assert any(lift_check(relation, moved, answer) for answer in answers)


def test_combine_takes_the_worst_status():
    verdicts = [Verdict("holds"), Verdict("inconclusive"), Verdict("holds")]
    assert combine(verdicts).inconclusive


def test_failing_verdict_needs_a_counterexample():
    with pytest.raises(ValueError):
        Verdict("fails")
