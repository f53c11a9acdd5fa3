import random

import pytest

from incgr.grounding import UnknownActionError
from incgr.model import Atom, IncompleteDomain, RecognitionProblem
from incgr.pddl import (
    PDDLSemanticError,
    PDDLSyntaxError,
    parse_domain,
    parse_observations,
    parse_problem,
    serialize_domain,
)
from incgr.synth import BLOCKSWORLD

from oracles import random_complete_domain

P, Q, R, G = (Atom(n) for n in "pqrg")


def test_abstract_domain_sets(abstract_domain):
    d = abstract_domain
    assert [op.name for op in d.operators] == ["a", "b", "c"]
    a, b, c = d.operators
    assert a.pre == {P, Q} and a.poss_pre == {R} and a.poss_add == {R} and a.poss_del == {P}
    assert a.add == set() and a.dels == set()
    assert b.pre == {P} and b.add == {R} and b.dels == {P} and b.poss_del == {Q}
    assert c.pre == {R} and c.add == {G} and c.poss_pre == {Q}
    for op in d.operators:
        assert op.check() == []


def test_plain_strips_has_empty_possible_sets():
    d = parse_domain(BLOCKSWORLD)
    assert d.is_complete()
    assert len(d.operators) == 4


def test_undeclared_predicate_in_possible_block():
    text = """(define (domain x) (:predicates (p))
      (:action a :parameters () :precondition (p) :effect () :poss-precondition (zz)))"""
    with pytest.raises(PDDLSemanticError, match="zz"):
        parse_domain(text)


@pytest.mark.parametrize("body, match", [
    ("(:action a :parameters () :precondition (p ?x) :effect ())", "arity|variable"),
    ("(:action a :parameters () :precondition (not (p)) :effect ())", "negative"),
    ("(:action a :parameters () :precondition (p) :effect (when (p) (p)))", "when|conditional|unsupported"),
    ("(:action a :parameters () :precondition (p) :effect () :cost 3)", "cost"),
    ("(:action a :parameters () :precondition (p) :effect (p) :poss-effect-add (p))", "both"),
    ("(:action a :parameters () :effect ()) (:action a :parameters () :effect ())", "duplicate"),
])
def test_domain_rejections(body, match):
    text = f"(define (domain x) (:predicates (p)) {body})"
    with pytest.raises((PDDLSemanticError, PDDLSyntaxError), match=f"(?i){match}"):
        parse_domain(text)


def test_syntax_error_reports_position():
    text = "(define (domain x)\n  (:predicates (p))\n  (:action a :parameters ( :effect ())"
    with pytest.raises(PDDLSyntaxError) as info:
        parse_domain(text)
    assert info.value.line >= 1 and info.value.col >= 1


def test_unknown_section_keyword():
    with pytest.raises(PDDLSyntaxError):
        parse_domain("(define (domain x) (:predicates (p)) (:functions (f)))")


def test_abstract_problem(abstract_domain, data_dir):
    data = parse_problem((data_dir / "abstract-problem.pddl").read_text(), abstract_domain)
    assert data.objects == {}
    assert data.init == {P, Q}
    assert data.hypotheses == (frozenset({G}),)


def test_empty_hypothesis_list(abstract_domain, data_dir):
    text = (data_dir / "abstract-problem.pddl").read_text()
    with pytest.raises(PDDLSemanticError):
        parse_problem(text, abstract_domain, hypotheses="; nothing here\n")


def test_hidden_goal_index(abstract_domain, data_dir):
    text = (data_dir / "abstract-problem.pddl").read_text()
    data = parse_problem(text, abstract_domain, hypotheses="(g)\n(r)\n", hidden_goal="(g)")
    assert data.hypotheses == (frozenset({G}), frozenset({R}))
    assert data.hidden_goal == 0
    with pytest.raises(PDDLSemanticError):
        parse_problem(text, abstract_domain, hypotheses="(g)\n(r)\n", hidden_goal="(p)")


def test_undeclared_object_in_problem():
    d = parse_domain(BLOCKSWORLD)
    text = "(define (problem x) (:domain blocksworld) (:objects a) (:init (clear zz)) (:goal (clear a)))"
    with pytest.raises(PDDLSemanticError, match="zz"):
        parse_problem(text, d)


def test_recognition_problem_invariants(abstract):
    with pytest.raises(ValueError):
        RecognitionProblem(abstract.domain, {}, abstract.init, ())
    with pytest.raises(ValueError):
        RecognitionProblem(abstract.domain, {}, abstract.init, (frozenset({G}),), hidden_goal=3)


def test_observations(abstract_task):
    acts = parse_observations("(a)\n; comment\n(b)\n(c)\n", abstract_task)
    assert [str(a) for a in acts] == ["(a)", "(b)", "(c)"]
    assert parse_observations("", abstract_task) == []
    assert len(parse_observations("(a)\n(a)\n", abstract_task)) == 2
    with pytest.raises(UnknownActionError):
        parse_observations("(d)\n", abstract_task)
    with pytest.raises(UnknownActionError):
        parse_observations("(a x)\n", abstract_task)


def test_typed_domain_round_trip():
    text = """(define (domain typed)
      (:requirements :strips :typing)
      (:types block - object small - block table)
      (:constants t0 - table)
      (:predicates (on ?x - block ?y - object) (free ?x - object))
      (:action move :parameters (?x - small ?y - block)
        :precondition (and (free ?x) (free ?y))
        :effect (and (on ?x ?y) (not (free ?y)))
        :poss-precondition (on ?y t0)
        :poss-effect-del (free ?x)))"""
    d = parse_domain(text)
    assert d.is_subtype("small", "object") and not d.is_subtype("table", "block")
    again = parse_domain(serialize_domain(d))
    assert again.structurally_equal(d)


def test_round_trip_abstract(abstract_domain):
    text = serialize_domain(abstract_domain)
    assert parse_domain(text).structurally_equal(abstract_domain)
    assert serialize_domain(parse_domain(text)) == text


def test_round_trip_random_domains():
    rng = random.Random(3)
    for _ in range(200):
        d = random_complete_domain(rng)
        assert parse_domain(serialize_domain(d)).structurally_equal(d)


def test_stripped_serialization_is_plain_strips(abstract_domain):
    text = serialize_domain(abstract_domain, annotations=False)
    assert ":poss-" not in text
    stripped = parse_domain(text)
    assert stripped.is_complete()
    assert isinstance(stripped, IncompleteDomain)


def test_parsing_is_deterministic():
    assert parse_domain(BLOCKSWORLD) == parse_domain(BLOCKSWORLD)
