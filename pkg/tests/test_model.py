import itertools

import pytest
from hypothesis import given, settings, strategies as st

from gpcsp.model import (FAMILIES, GroundingError, PddlError, generate_instance, ground, instance_text,
                         load_instance, parse_domain, parse_problem, unparse_domain, unparse_problem)

TINY_DOMAIN = """
(define (domain tiny)
  (:requirements :strips)
  (:predicates (p ?x) (q ?x))
  (:action go
    :parameters (?x ?y)
    :precondition (and (p ?x))
    :effect (and (q ?y) (not (p ?x)))))
"""


def tiny_problem(objects):
    return f"""
(define (problem t) (:domain tiny)
  (:objects {' '.join(objects)})
  (:init)
  (:goal (and)))
"""


def test_gripper_schemas_and_arities():
    domain = parse_domain(instance_text("gripper", 2)[0])
    assert [s.name for s in domain.schemas] == ["move", "pick", "drop"]
    assert [s.arity for s in domain.schemas] == [2, 3, 3]


def test_empty_domain():
    domain = parse_domain("(define (domain d))")
    assert len(domain.schemas) == 0


def test_keywords_are_case_folded():
    domain = parse_domain("(DEFINE (DOMAIN d) (:REQUIREMENTS :STRIPS) (:predicates (p)))")
    assert domain.name == "d"


def test_negated_precondition_rejected():
    text = """(define (domain d) (:predicates (p))
      (:action a :parameters () :precondition (and (not (p))) :effect (and (p))))"""
    with pytest.raises(PddlError, match="negated precondition"):
        parse_domain(text)


@pytest.mark.parametrize("text, message", [
    ("(define (domain d) (:requirements :typing))", "unsupported requirement"),
    ("(define (domain d) (:predicates (p ?x))", "unbalanced"),
    ("""(define (domain d) (:predicates (p ?x))
        (:action a :parameters (?x) :precondition (and (p ?y)) :effect (and (p ?x))))""", "not in parameters"),
    ("""(define (domain d) (:predicates (p ?x))
        (:action a :parameters (?x) :precondition (and (r ?x)) :effect (and (p ?x))))""", "undeclared predicate"),
])
def test_domain_errors(text, message):
    with pytest.raises(PddlError, match=message):
        parse_domain(text)


def test_syntax_error_has_position():
    with pytest.raises(PddlError) as info:
        parse_domain("(define (domain d)\n  (:predicates (p)))\n)")
    assert info.value.line == 3


def test_goal_atoms_in_file_order():
    domain = parse_domain(instance_text("gripper", 1)[0])
    text = """(define (problem p) (:domain gripper) (:objects b1 roomB)
      (:init) (:goal (and (at b1 roomB))))"""
    problem = parse_problem(text, domain)
    assert [a.ground_name() for a in problem.goals] == ["at(b1,roomB)"]


@pytest.mark.parametrize("goal, message", [
    ("(at b1)", "arity mismatch"),
    ("(onto b1 roomB)", "undeclared predicate"),
    ("(at b1 roomC)", "undeclared object"),
])
def test_problem_errors(goal, message):
    domain = parse_domain(instance_text("gripper", 1)[0])
    text = f"(define (problem p) (:domain gripper) (:objects b1 roomB) (:init) (:goal (and {goal})))"
    with pytest.raises(PddlError, match=message):
        parse_problem(text, domain)


def test_duplicate_init_atoms_collapse():
    domain = parse_domain(TINY_DOMAIN)
    text = "(define (problem t) (:domain tiny) (:objects a) (:init (p a) (p a)) (:goal (and (q a))))"
    problem = ground(domain, parse_problem(text, domain))
    assert len(problem.init) == 1


def test_grounding_arity_two_over_three_objects():
    domain = parse_domain(TINY_DOMAIN)
    problem = ground(domain, parse_problem(tiny_problem(["a", "b", "c"]), domain))
    assert len(problem.actions) == 9
    assert [a.name for a in problem.actions][:3] == ["go(a,a)", "go(a,b)", "go(a,c)"]


def test_grounding_without_objects():
    domain = parse_domain(TINY_DOMAIN)
    problem = ground(domain, parse_problem(tiny_problem([]), domain))
    assert problem.actions == ()


def test_hanoi3_count_matches_independent_enumeration():
    domain, spec = generate_instance("hanoi", 3)
    problem = ground(domain, spec)
    smaller = {a.args for a in spec.init if a.predicate == "smaller"}
    objects = spec.objects
    discs = [o for o in objects if o.startswith("d")]
    expected = sum(1 for d, f, t in itertools.product(discs, objects, objects)
                   if (t, d) in smaller and f != t)
    assert len(problem.actions) == expected == 60


def test_strict_grounding_rejects_overlap():
    text = """(define (domain d) (:predicates (p ?x))
      (:action flip :parameters (?x ?y) :precondition (and) :effect (and (p ?x) (not (p ?y)))))"""
    domain = parse_domain(text)
    spec = parse_problem("(define (problem t) (:domain d) (:objects a) (:init) (:goal (and)))", domain)
    assert ground(domain, spec).actions == ()
    with pytest.raises(GroundingError):
        ground(domain, spec, strict=True)


def test_grounding_is_deterministic():
    a = load_instance("logistics", 2)
    b = load_instance("logistics", 2)
    assert [x.name for x in a.actions] == [x.name for x in b.actions]
    assert a.prop_names == b.prop_names


def test_action_names_unique():
    for family in FAMILIES:
        problem = load_instance(family, 2)
        names = [a.name for a in problem.actions]
        assert len(names) == len(set(names)), family


def test_unknown_family():
    with pytest.raises(ValueError, match="unknown family"):
        generate_instance("blocksworld", 2)


def test_fig1_propositions():
    problem = load_instance("fig1")
    assert [problem.name_of(g) for g in problem.goals] == ["G1", "G2", "G3", "G4"]
    assert {f"P{i}" for i in range(1, 7)} <= set(problem.prop_names)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(FAMILIES), st.integers(1, 4))
def test_parse_unparse_fixpoint(family, n):
    domain, spec = generate_instance(family, n)
    domain2 = parse_domain(unparse_domain(domain))
    spec2 = parse_problem(unparse_problem(spec), domain2)
    assert domain2.schemas == domain.schemas
    assert domain2.predicates == domain.predicates
    assert spec2 == spec


@pytest.mark.parametrize("family", FAMILIES)
def test_generated_instances_validate(family):
    domain, spec = generate_instance(family, 3)
    objects = set(spec.objects)
    for atom in (*spec.init, *spec.goals):
        assert domain.predicates[atom.predicate] == len(atom.args)
        assert set(atom.args) <= objects
