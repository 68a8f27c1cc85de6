"""STRIPS domain representation.

Covers a small untyped PDDL subset (``:strips`` only, positive
preconditions, ``and``/``not`` in effects), grounding to interned
propositions, a printer for round-tripping, and generators for the
benchmark instance families.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

log = logging.getLogger(__name__)

PropId = int


class PddlError(ValueError):
    """Syntax or semantic error in a domain/problem file."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.message = message
        self.line = line
        self.col = col
        where = f" at line {line}, column {col}" if line is not None else ""
        super().__init__(f"{message}{where}")


class GroundingError(ValueError):
    pass


# ---------------------------------------------------------------------------
# s-expression reader


class _Tok(str):
    """A string token that remembers where it came from."""

    line: int
    col: int

    def __new__(cls, text: str, line: int, col: int):
        obj = super().__new__(cls, text)
        obj.line = line
        obj.col = col
        return obj


class _List(list):
    line: int = 0
    col: int = 0


def _tokenize(text: str):
    line, col = 1, 0
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 0
            i += 1
            continue
        col += 1
        if ch.isspace():
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield _Tok(ch, line, col)
            i += 1
        else:
            start, start_col = i, col
            while i < n and not text[i].isspace() and text[i] not in "();":
                i += 1
            col = start_col + (i - start) - 1
            yield _Tok(text[start:i], line, start_col)


def read_sexpr(text: str) -> _List:
    """Parse a single top-level s-expression into nested lists of tokens."""
    stack: list[_List] = []
    result = None
    for tok in _tokenize(text):
        if tok == "(":
            node = _List()
            node.line, node.col = tok.line, tok.col
            stack.append(node)
        elif tok == ")":
            if not stack:
                raise PddlError("unbalanced ')'", tok.line, tok.col)
            node = stack.pop()
            if stack:
                stack[-1].append(node)
            elif result is None:
                result = node
            else:
                raise PddlError("more than one top-level expression", node.line, node.col)
        else:
            if not stack:
                raise PddlError(f"unexpected token {tok!r} outside expression", tok.line, tok.col)
            stack[-1].append(tok)
    if stack:
        raise PddlError("unbalanced '(': missing ')'", stack[-1].line, stack[-1].col)
    if result is None:
        raise PddlError("empty input", 1, 1)
    return result


def _pos(node) -> tuple[int | None, int | None]:
    return getattr(node, "line", None), getattr(node, "col", None)


def _kw(node) -> str | None:
    return node.lower() if isinstance(node, str) else None


# ---------------------------------------------------------------------------
# lifted representation


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        return "(" + " ".join((self.predicate, *self.args)) + ")"

    def ground_name(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(self.args)})"

    def substitute(self, binding: dict[str, str]) -> Atom:
        return Atom(self.predicate, tuple(binding.get(a, a) for a in self.args))


@dataclass(frozen=True)
class ActionSchema:
    name: str
    params: tuple[str, ...]
    pre: tuple[Atom, ...] = ()
    add: tuple[Atom, ...] = ()
    dele: tuple[Atom, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class Domain:
    name: str
    predicates: dict[str, int]
    schemas: tuple[ActionSchema, ...]
    requirements: tuple[str, ...] = ()

    def __hash__(self):
        return hash((self.name, self.schemas))


@dataclass(frozen=True)
class ProblemSpec:
    """An ungrounded problem: atoms in file order."""

    name: str
    domain_name: str
    objects: tuple[str, ...]
    init: tuple[Atom, ...]
    goals: tuple[Atom, ...]


@dataclass(frozen=True)
class GroundAction:
    name: str
    pre: frozenset[PropId]
    add: frozenset[PropId]
    dele: frozenset[PropId] = frozenset()
    is_persist: bool = False

    def __post_init__(self):
        if self.add & self.dele:
            raise GroundingError(f"action {self.name}: add/delete overlap")
        if self.is_persist and not (len(self.pre) == 1 and self.pre == self.add and not self.dele):
            raise GroundingError(f"malformed persist action {self.name}")

    def __str__(self) -> str:
        return self.name


@dataclass
class Problem:
    """A grounded STRIPS problem over interned propositions.

    ``goals`` keeps problem-file order; it is the canonical goal order of
    the top search level. ``actions`` keeps grounding order, which is the
    canonical value order.
    """

    name: str
    prop_names: list[str]
    init: frozenset[PropId]
    goals: tuple[PropId, ...]
    actions: tuple[GroundAction, ...]
    objects: tuple[str, ...] = ()
    prop_index: dict[str, PropId] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.prop_index:
            self.prop_index = {n: i for i, n in enumerate(self.prop_names)}

    def prop(self, name: str) -> PropId:
        return self.prop_index[name]

    def name_of(self, p: PropId) -> str:
        return self.prop_names[p]

    def names(self, props: Iterable[PropId]) -> list[str]:
        return [self.prop_names[p] for p in sorted(props)]

    def action(self, name: str) -> GroundAction:
        for a in self.actions:
            if a.name == name:
                return a
        raise KeyError(name)


# ---------------------------------------------------------------------------
# parsing


def _parse_atom(node, what: str) -> Atom:
    if not isinstance(node, list) or not node:
        raise PddlError(f"expected atom in {what}", *_pos(node))
    head = node[0]
    if isinstance(head, list):
        raise PddlError(f"expected predicate name in {what}", *_pos(node))
    for arg in node[1:]:
        if isinstance(arg, list):
            raise PddlError(f"nested expression not allowed in {what}", *_pos(arg))
    return Atom(str(head), tuple(str(a) for a in node[1:]))


def _conjuncts(node) -> list:
    """Flatten ``(and ...)`` or a single literal; ``()`` is empty."""
    if isinstance(node, list) and not node:
        return []
    if isinstance(node, list) and _kw(node[0]) == "and":
        return list(node[1:])
    return [node]


def parse_domain(text: str) -> Domain:
    tree = read_sexpr(text)
    if len(tree) < 2 or _kw(tree[0]) != "define":
        raise PddlError("expected (define (domain NAME) ...)", *_pos(tree))
    header = tree[1]
    if not (isinstance(header, list) and len(header) == 2 and _kw(header[0]) == "domain"):
        raise PddlError("expected (domain NAME)", *_pos(header))
    name = str(header[1])
    predicates: dict[str, int] = {}
    requirements: list[str] = []
    schemas: list[ActionSchema] = []

    for section in tree[2:]:
        if not isinstance(section, list) or not section:
            raise PddlError("expected a domain section", *_pos(section))
        key = _kw(section[0])
        if key == ":requirements":
            for req in section[1:]:
                if _kw(req) != ":strips":
                    raise PddlError(f"unsupported requirement {req}", *_pos(req))
                requirements.append(":strips")
        elif key == ":predicates":
            for decl in section[1:]:
                atom = _parse_atom(decl, ":predicates")
                if any(not a.startswith("?") for a in atom.args):
                    raise PddlError("predicate parameters must be variables", *_pos(decl))
                predicates[atom.predicate] = len(atom.args)
        elif key == ":action":
            schemas.append(_parse_action(section, predicates))
        else:
            raise PddlError(f"unsupported domain section {section[0]}", *_pos(section))

    names = [s.name for s in schemas]
    if len(set(names)) != len(names):
        raise PddlError("duplicate action name", *_pos(tree))
    return Domain(name, predicates, tuple(schemas), tuple(requirements))


def _parse_action(section, predicates: dict[str, int]) -> ActionSchema:
    if len(section) < 2 or isinstance(section[1], list):
        raise PddlError("expected action name", *_pos(section))
    name = str(section[1])
    params: tuple[str, ...] = ()
    pre: list[Atom] = []
    add: list[Atom] = []
    dele: list[Atom] = []
    rest = section[2:]
    if len(rest) % 2:
        raise PddlError(f"action {name}: dangling keyword", *_pos(section))
    for key_node, body in zip(rest[::2], rest[1::2]):
        key = _kw(key_node)
        if key == ":parameters":
            if not isinstance(body, list) or any(isinstance(p, list) or not p.startswith("?") for p in body):
                raise PddlError(f"action {name}: parameters must be a list of ?variables", *_pos(body))
            params = tuple(str(p) for p in body)
        elif key == ":precondition":
            for lit in _conjuncts(body):
                if isinstance(lit, list) and lit and _kw(lit[0]) == "not":
                    raise PddlError(f"action {name}: negated precondition", *_pos(lit))
                pre.append(_parse_atom(lit, f"{name} precondition"))
        elif key == ":effect":
            for lit in _conjuncts(body):
                if isinstance(lit, list) and lit and _kw(lit[0]) == "not":
                    if len(lit) != 2:
                        raise PddlError(f"action {name}: malformed (not ...)", *_pos(lit))
                    dele.append(_parse_atom(lit[1], f"{name} effect"))
                else:
                    add.append(_parse_atom(lit, f"{name} effect"))
        else:
            raise PddlError(f"action {name}: unsupported keyword {key_node}", *_pos(key_node))

    schema = ActionSchema(name, params, tuple(pre), tuple(add), tuple(dele))
    pset = set(params)
    for atom in itertools.chain(schema.pre, schema.add, schema.dele):
        if atom.predicate not in predicates:
            raise PddlError(f"action {name}: undeclared predicate {atom.predicate}", *_pos(section))
        if predicates[atom.predicate] != len(atom.args):
            raise PddlError(f"action {name}: arity mismatch for {atom.predicate}", *_pos(section))
        for arg in atom.args:
            if arg.startswith("?") and arg not in pset:
                raise PddlError(f"action {name}: variable {arg} not in parameters", *_pos(section))
    return schema


def parse_problem(text: str, domain: Domain) -> ProblemSpec:
    tree = read_sexpr(text)
    if len(tree) < 2 or _kw(tree[0]) != "define":
        raise PddlError("expected (define (problem NAME) ...)", *_pos(tree))
    header = tree[1]
    if not (isinstance(header, list) and len(header) == 2 and _kw(header[0]) == "problem"):
        raise PddlError("expected (problem NAME)", *_pos(header))
    name = str(header[1])
    domain_name = domain.name
    objects: list[str] = []
    init: list[Atom] = []
    goals: list[Atom] = []
    for section in tree[2:]:
        if not isinstance(section, list) or not section:
            raise PddlError("expected a problem section", *_pos(section))
        key = _kw(section[0])
        if key == ":domain":
            domain_name = str(section[1])
            if domain_name != domain.name:
                raise PddlError(f"problem is for domain {domain_name}, not {domain.name}", *_pos(section))
        elif key == ":objects":
            for obj in section[1:]:
                if isinstance(obj, list):
                    raise PddlError("objects must be names", *_pos(obj))
                if str(obj) not in objects:
                    objects.append(str(obj))
        elif key == ":init":
            init.extend(_parse_atom(a, ":init") for a in section[1:])
        elif key == ":goal":
            if len(section) != 2:
                raise PddlError("expected a single goal formula", *_pos(section))
            for lit in _conjuncts(section[1]):
                if isinstance(lit, list) and lit and _kw(lit[0]) == "not":
                    raise PddlError("negated goal", *_pos(lit))
                goals.append(_parse_atom(lit, ":goal"))
        else:
            raise PddlError(f"unsupported problem section {section[0]}", *_pos(section))

    known = set(objects)
    for atom in itertools.chain(init, goals):
        if atom.predicate not in domain.predicates:
            raise PddlError(f"undeclared predicate {atom.predicate}", *_pos(tree))
        if domain.predicates[atom.predicate] != len(atom.args):
            raise PddlError(f"arity mismatch for {atom}", *_pos(tree))
        for arg in atom.args:
            if arg not in known:
                raise PddlError(f"undeclared object {arg} in {atom}", *_pos(tree))
    return ProblemSpec(name, domain_name, tuple(objects), tuple(init), tuple(goals))


# ---------------------------------------------------------------------------
# printing


def _conj(atoms: Sequence[str]) -> str:
    return "(and " + " ".join(atoms) + ")" if atoms else "(and)"


def unparse_domain(domain: Domain) -> str:
    out = [f"(define (domain {domain.name})"]
    if domain.requirements:
        out.append("  (:requirements " + " ".join(domain.requirements) + ")")
    preds = " ".join(
        "(" + " ".join([p] + [f"?x{i}" for i in range(n)]) + ")" for p, n in domain.predicates.items()
    )
    out.append(f"  (:predicates {preds})")
    for s in domain.schemas:
        eff = [str(a) for a in s.add] + [f"(not {a})" for a in s.dele]
        out.append(f"  (:action {s.name}")
        out.append(f"    :parameters ({' '.join(s.params)})")
        out.append(f"    :precondition {_conj([str(a) for a in s.pre])}")
        out.append(f"    :effect {_conj(eff)})")
    out.append(")")
    return "\n".join(out) + "\n"


def unparse_problem(problem: ProblemSpec) -> str:
    out = [
        f"(define (problem {problem.name})",
        f"  (:domain {problem.domain_name})",
        f"  (:objects {' '.join(problem.objects)})",
        "  (:init " + " ".join(str(a) for a in problem.init) + ")",
        f"  (:goal {_conj([str(a) for a in problem.goals])})",
        ")",
    ]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# grounding


def static_predicates(domain: Domain) -> set[str]:
    """Predicates that no action adds or deletes."""
    touched = {a.predicate for s in domain.schemas for a in itertools.chain(s.add, s.dele)}
    return set(domain.predicates) - touched


def ground(domain: Domain, problem: ProblemSpec, strict: bool = False) -> Problem:
    """Instantiate every schema over the problem's objects.

    Instances whose static preconditions are false in the initial state are
    dropped, and static atoms are removed from the remaining preconditions.
    Instances with overlapping add and delete lists are dropped (or raise
    :class:`GroundingError` when ``strict``).
    """
    names: list[str] = []
    index: dict[str, int] = {}

    def intern(atom: Atom) -> int:
        key = atom.ground_name()
        pid = index.get(key)
        if pid is None:
            pid = index[key] = len(names)
            names.append(key)
        return pid

    init = frozenset(intern(a) for a in problem.init)
    goals: list[int] = []
    for atom in problem.goals:
        pid = intern(atom)
        if pid not in goals:
            goals.append(pid)

    statics = static_predicates(domain)
    static_true = {a for a in problem.init if a.predicate in statics}
    objects = sorted(problem.objects)
    actions: list[GroundAction] = []
    for schema in domain.schemas:
        for binding in _bindings(schema, objects, statics, static_true):
            args = tuple(binding[p] for p in schema.params)
            name = f"{schema.name}({','.join(args)})" if args else schema.name
            pre = [a.substitute(binding) for a in schema.pre if a.predicate not in statics]
            add = [a.substitute(binding) for a in schema.add]
            dele = [a.substitute(binding) for a in schema.dele]
            pre_ids = frozenset(intern(a) for a in pre)
            add_ids = frozenset(intern(a) for a in add)
            del_ids = frozenset(intern(a) for a in dele)
            if add_ids & del_ids:
                if strict:
                    raise GroundingError(f"add/delete overlap in {name}")
                log.debug("dropping %s: add/delete overlap", name)
                continue
            actions.append(GroundAction(name, pre_ids, add_ids, del_ids))
    return Problem(problem.name, names, init, tuple(goals), tuple(actions), tuple(problem.objects))


def _bindings(schema: ActionSchema, objects: list[str], statics: set[str], static_true: set[Atom]):
    """Yield parameter bindings in lexicographic argument order.

    Static preconditions are checked as soon as all their variables are bound.
    """
    params = schema.params
    checks: list[list[Atom]] = [[] for _ in params]
    for atom in schema.pre:
        if atom.predicate not in statics:
            continue
        depth = max((params.index(a) for a in atom.args if a.startswith("?")), default=-1)
        if depth < 0:
            if atom not in static_true:
                return
        else:
            checks[depth].append(atom)

    binding: dict[str, str] = {}

    def extend(i: int):
        if i == len(params):
            yield dict(binding)
            return
        for obj in objects:
            binding[params[i]] = obj
            if all(a.substitute(binding) in static_true for a in checks[i]):
                yield from extend(i + 1)
        binding.pop(params[i], None)

    yield from extend(0)


# ---------------------------------------------------------------------------
# benchmark families

FAMILIES = ("gripper", "ferry", "hanoi", "tsp", "logistics", "fig1")


def _problem_text(name: str, domain: str, objects: Iterable[str], init: Iterable[str], goals: Iterable[str]) -> str:
    return (
        f"(define (problem {name}) (:domain {domain})\n"
        f"  (:objects {' '.join(objects)})\n"
        f"  (:init {' '.join(init)})\n"
        f"  (:goal (and {' '.join(goals)})))\n"
    )


GRIPPER_DOMAIN = """\
(define (domain gripper)
  (:requirements :strips)
  (:predicates (room ?r) (ball ?b) (gripper ?g) (connected ?x ?y)
               (at-robby ?r) (at ?b ?r) (free ?g) (carry ?b ?g))
  (:action move
    :parameters (?from ?to)
    :precondition (and (connected ?from ?to) (at-robby ?from))
    :effect (and (at-robby ?to) (not (at-robby ?from))))
  (:action pick
    :parameters (?obj ?room ?gripper)
    :precondition (and (ball ?obj) (room ?room) (gripper ?gripper)
                       (at ?obj ?room) (at-robby ?room) (free ?gripper))
    :effect (and (carry ?obj ?gripper) (not (at ?obj ?room)) (not (free ?gripper))))
  (:action drop
    :parameters (?obj ?room ?gripper)
    :precondition (and (ball ?obj) (room ?room) (gripper ?gripper)
                       (carry ?obj ?gripper) (at-robby ?room))
    :effect (and (at ?obj ?room) (free ?gripper) (not (carry ?obj ?gripper)))))
"""


def _gripper(n: int) -> tuple[str, str]:
    balls = [f"ball{i}" for i in range(1, n + 1)]
    init = ["(room rooma)", "(room roomb)", "(gripper left)", "(gripper right)",
            "(connected rooma roomb)", "(connected roomb rooma)",
            "(at-robby rooma)", "(free left)", "(free right)"]
    init += [f"(ball {b})" for b in balls] + [f"(at {b} rooma)" for b in balls]
    goals = [f"(at {b} roomb)" for b in balls]
    return GRIPPER_DOMAIN, _problem_text(f"gripper-{n}", "gripper", ["rooma", "roomb", "left", "right", *balls], init, goals)


FERRY_DOMAIN = """\
(define (domain ferry)
  (:requirements :strips)
  (:predicates (car ?c) (place ?p) (other ?x ?y)
               (at-ferry ?p) (at ?c ?p) (empty-ferry) (on ?c))
  (:action sail
    :parameters (?from ?to)
    :precondition (and (other ?from ?to) (at-ferry ?from))
    :effect (and (at-ferry ?to) (not (at-ferry ?from))))
  (:action board
    :parameters (?car ?loc)
    :precondition (and (car ?car) (place ?loc) (at ?car ?loc) (at-ferry ?loc) (empty-ferry))
    :effect (and (on ?car) (not (at ?car ?loc)) (not (empty-ferry))))
  (:action debark
    :parameters (?car ?loc)
    :precondition (and (car ?car) (place ?loc) (on ?car) (at-ferry ?loc))
    :effect (and (at ?car ?loc) (empty-ferry) (not (on ?car)))))
"""


def _ferry(n: int) -> tuple[str, str]:
    # cars alternate between two ports and must swap sides
    places = ["porta", "portb"]
    cars = [f"car{i}" for i in range(1, n + 1)]
    init = ["(place porta)", "(place portb)", "(other porta portb)", "(other portb porta)",
            "(at-ferry porta)", "(empty-ferry)"]
    goals = []
    for i, c in enumerate(cars):
        src, dst = places[i % 2], places[(i + 1) % 2]
        init += [f"(car {c})", f"(at {c} {src})"]
        goals.append(f"(at {c} {dst})")
    return FERRY_DOMAIN, _problem_text(f"ferry-{n}", "ferry", [*places, *cars], init, goals)


HANOI_DOMAIN = """\
(define (domain hanoi)
  (:requirements :strips)
  (:predicates (clear ?x) (on ?x ?y) (smaller ?x ?y))
  (:action move
    :parameters (?disc ?from ?to)
    :precondition (and (smaller ?to ?disc) (on ?disc ?from) (clear ?disc) (clear ?to))
    :effect (and (clear ?from) (on ?disc ?to) (not (on ?disc ?from)) (not (clear ?to)))))
"""


def _hanoi(n: int) -> tuple[str, str]:
    # d1 is the smallest disc; (smaller X Y) reads "Y may sit on X"
    pegs = ["peg1", "peg2", "peg3"]
    discs = [f"d{i}" for i in range(1, n + 1)]
    init = []
    for i, d in enumerate(discs):
        init += [f"(smaller {p} {d})" for p in pegs]
        init += [f"(smaller {bigger} {d})" for bigger in discs[i + 1:]]
    init.append(f"(on {discs[-1]} peg1)")
    for small, big in zip(discs, discs[1:]):
        init.append(f"(on {small} {big})")
    init += ["(clear d1)", "(clear peg2)", "(clear peg3)"]
    goals = [f"(on {discs[-1]} peg3)"] + [f"(on {s} {b})" for s, b in zip(discs, discs[1:])]
    return HANOI_DOMAIN, _problem_text(f"hanoi-{n}", "hanoi", [*pegs, *discs], init, goals)


TSP_DOMAIN = """\
(define (domain tsp)
  (:requirements :strips)
  (:predicates (connected ?x ?y) (at ?x) (visited ?x))
  (:action move
    :parameters (?from ?to)
    :precondition (and (connected ?from ?to) (at ?from))
    :effect (and (at ?to) (visited ?to) (not (at ?from)))))
"""


def _tsp(n: int) -> tuple[str, str]:
    cities = [f"c{i}" for i in range(n)]
    init = ["(at c0)"] + [f"(connected {a} {b})" for a in cities for b in cities if a != b]
    goals = [f"(visited {c})" for c in cities]
    return TSP_DOMAIN, _problem_text(f"tsp-{n}", "tsp", cities, init, goals)


LOGISTICS_DOMAIN = """\
(define (domain logistics)
  (:requirements :strips)
  (:predicates (package ?p) (truck ?t) (airplane ?a) (same-city ?x ?y)
               (other-airport ?x ?y) (at ?o ?l) (in ?p ?v))
  (:action load-truck
    :parameters (?pkg ?truck ?loc)
    :precondition (and (package ?pkg) (truck ?truck) (at ?truck ?loc) (at ?pkg ?loc))
    :effect (and (in ?pkg ?truck) (not (at ?pkg ?loc))))
  (:action load-airplane
    :parameters (?pkg ?plane ?loc)
    :precondition (and (package ?pkg) (airplane ?plane) (at ?plane ?loc) (at ?pkg ?loc))
    :effect (and (in ?pkg ?plane) (not (at ?pkg ?loc))))
  (:action unload-truck
    :parameters (?pkg ?truck ?loc)
    :precondition (and (package ?pkg) (truck ?truck) (at ?truck ?loc) (in ?pkg ?truck))
    :effect (and (at ?pkg ?loc) (not (in ?pkg ?truck))))
  (:action unload-airplane
    :parameters (?pkg ?plane ?loc)
    :precondition (and (package ?pkg) (airplane ?plane) (at ?plane ?loc) (in ?pkg ?plane))
    :effect (and (at ?pkg ?loc) (not (in ?pkg ?plane))))
  (:action drive-truck
    :parameters (?truck ?from ?to)
    :precondition (and (truck ?truck) (same-city ?from ?to) (at ?truck ?from))
    :effect (and (at ?truck ?to) (not (at ?truck ?from))))
  (:action fly-airplane
    :parameters (?plane ?from ?to)
    :precondition (and (airplane ?plane) (other-airport ?from ?to) (at ?plane ?from))
    :effect (and (at ?plane ?to) (not (at ?plane ?from)))))
"""


def _logistics(n: int) -> tuple[str, str]:
    """``n`` packages over three cities, one truck per city and one airplane.

    Every city has an airport and a post office; package i starts at the
    office of city i mod 3 and is delivered to the office of the next city.
    """
    airports = [f"apt{i}" for i in range(1, 4)]
    offices = [f"po{i}" for i in range(1, 4)]
    trucks = [f"truck{i}" for i in range(1, 4)]
    pkgs = [f"pkg{i}" for i in range(1, n + 1)]
    init = ["(airplane plane1)", "(at plane1 apt1)"]
    for a, o, t in zip(airports, offices, trucks):
        init += [f"(truck {t})", f"(at {t} {a})", f"(same-city {a} {o})", f"(same-city {o} {a})"]
    init += [f"(other-airport {x} {y})" for x in airports for y in airports if x != y]
    goals = []
    for i, p in enumerate(pkgs):
        init += [f"(package {p})", f"(at {p} {offices[i % 3]})"]
        goals.append(f"(at {p} {offices[(i + 1) % 3]})")
    objects = [*airports, *offices, *trucks, "plane1", *pkgs]
    return LOGISTICS_DOMAIN, _problem_text(f"logistics-{n}", "logistics", objects, init, goals)


# fig1 example: level-1 supporters A5..A11 for P1..P6 with three
# interfering pairs, level-2 actions A1..A4 for the goals G1..G4. The aux
# atoms X1..X3 realise the interference without creating proposition mutexes.
FIG1_DOMAIN = """\
(define (domain fig1)
  (:requirements :strips)
  (:predicates (G1) (G2) (G3) (G4) (P1) (P2) (P3) (P4) (P5) (P6) (X1) (X2) (X3))
  (:action A1 :parameters () :precondition (and (P1) (P2) (P3)) :effect (and (G1)))
  (:action A2 :parameters () :precondition (and (P4)) :effect (and (G2)))
  (:action A3 :parameters () :precondition (and (P5)) :effect (and (G3)))
  (:action A4 :parameters () :precondition (and (P1) (P6)) :effect (and (G4)))
  (:action A5 :parameters () :precondition (and) :effect (and (P1) (X1)))
  (:action A6 :parameters () :precondition (and) :effect (and (P2) (X2)))
  (:action A7 :parameters () :precondition (and) :effect (and (P3) (X3)))
  (:action A8 :parameters () :precondition (and) :effect (and (P4) (not (X2))))
  (:action A9 :parameters () :precondition (and) :effect (and (P4) (not (X1))))
  (:action A10 :parameters () :precondition (and) :effect (and (P5) (P6)))
  (:action A11 :parameters () :precondition (and) :effect (and (P2) (not (X3)))))
"""

FIG1_PROBLEM = """\
(define (problem fig1) (:domain fig1)
  (:objects)
  (:init)
  (:goal (and (G1) (G2) (G3) (G4))))
"""


def instance_text(family: str, n: int = 1) -> tuple[str, str]:
    """Return (domain text, problem text) for a benchmark family."""
    if family == "fig1":
        return FIG1_DOMAIN, FIG1_PROBLEM
    makers = {"gripper": _gripper, "ferry": _ferry, "hanoi": _hanoi, "tsp": _tsp, "logistics": _logistics}
    if family not in makers:
        raise ValueError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
    if n < 1:
        raise ValueError("instance size must be positive")
    return makers[family](n)


def generate_instance(family: str, n: int = 1) -> tuple[Domain, ProblemSpec]:
    dtext, ptext = instance_text(family, n)
    domain = parse_domain(dtext)
    return domain, parse_problem(ptext, domain)


def load_instance(family: str, n: int = 1) -> Problem:
    """Generate and ground in one step."""
    return ground(*generate_instance(family, n))
