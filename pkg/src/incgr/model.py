"""Lifted incomplete-STRIPS data model.

An incomplete operator carries, next to the usual precondition/add/delete
lists, three *possible* lists whose membership in the true model is unknown.
All model objects are immutable; literal collections are frozensets and are
iterated in sorted order wherever output order matters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

ROOT_TYPE = "object"


class Atom(NamedTuple):
    """A predicate applied to arguments (variables ``?x``, or object names)."""

    name: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return f"({self.name})"
        return f"({self.name} {' '.join(self.args)})"

    def variables(self) -> set[str]:
        return {a for a in self.args if a.startswith("?")}

    def substitute(self, binding: dict[str, str]) -> "Atom":
        return Atom(self.name, tuple(binding.get(a, a) for a in self.args))


# A ground atom is a fact; same representation.
Fact = Atom


@dataclass(frozen=True)
class PredicateSchema:
    name: str
    parameters: tuple[tuple[str, str], ...] = ()

    @property
    def arity(self) -> int:
        return len(self.parameters)


@dataclass(frozen=True)
class IncompleteOperator:
    """Operator with known and possible preconditions and effects."""

    name: str
    parameters: tuple[tuple[str, str], ...] = ()
    pre: frozenset[Atom] = frozenset()
    poss_pre: frozenset[Atom] = frozenset()
    add: frozenset[Atom] = frozenset()
    dels: frozenset[Atom] = frozenset()
    poss_add: frozenset[Atom] = frozenset()
    poss_del: frozenset[Atom] = frozenset()

    @property
    def num_possible(self) -> int:
        return len(self.poss_pre) + len(self.poss_add) + len(self.poss_del)

    def is_complete(self) -> bool:
        return self.num_possible == 0

    def literal_sets(self) -> dict[str, frozenset[Atom]]:
        return {
            "pre": self.pre,
            "poss_pre": self.poss_pre,
            "add": self.add,
            "dels": self.dels,
            "poss_add": self.poss_add,
            "poss_del": self.poss_del,
        }

    def check(self) -> list[str]:
        """Return a list of invariant violations (empty when valid)."""
        problems = []
        for known, poss, label in (
            (self.pre, self.poss_pre, "precondition"),
            (self.add, self.poss_add, "add effect"),
            (self.dels, self.poss_del, "delete effect"),
        ):
            for atom in sorted(known & poss):
                problems.append(f"{self.name}: {atom} is both a known and a possible {label}")
        declared = [v for v, _ in self.parameters]
        if len(set(declared)) != len(declared):
            problems.append(f"{self.name}: duplicate parameter variables")
        params = set(declared)
        for lits in self.literal_sets().values():
            for atom in lits:
                missing = atom.variables() - params
                if missing:
                    problems.append(
                        f"{self.name}: {atom} uses undeclared variable(s) {sorted(missing)}"
                    )
        return problems


@dataclass(frozen=True)
class IncompleteDomain:
    name: str
    types: dict[str, str] = field(default_factory=dict)  # child -> parent
    predicates: tuple[PredicateSchema, ...] = ()
    operators: tuple[IncompleteOperator, ...] = ()
    constants: dict[str, str] = field(default_factory=dict)  # object -> type

    def __hash__(self) -> int:
        return hash((self.name, self.predicates, frozenset(self.operators)))

    def predicate(self, name: str) -> PredicateSchema | None:
        for p in self.predicates:
            if p.name == name:
                return p
        return None

    def operator(self, name: str) -> IncompleteOperator | None:
        for op in self.operators:
            if op.name == name:
                return op
        return None

    def ancestors(self, type_name: str) -> list[str]:
        """``type_name`` followed by its supertypes up to the root."""
        chain = [type_name]
        seen = {type_name}
        while chain[-1] != ROOT_TYPE:
            parent = self.types.get(chain[-1], ROOT_TYPE)
            if parent in seen:
                break
            chain.append(parent)
            seen.add(parent)
        return chain

    def is_subtype(self, sub: str, sup: str) -> bool:
        return sup in self.ancestors(sub)

    def is_complete(self) -> bool:
        return all(op.is_complete() for op in self.operators)

    def structurally_equal(self, other: "IncompleteDomain") -> bool:
        if self.name != other.name or set(self.predicates) != set(other.predicates):
            return False
        if self.types != other.types or self.constants != other.constants:
            return False
        mine = {op.name: op for op in self.operators}
        theirs = {op.name: op for op in other.operators}
        return mine == theirs


def goal_text(goal) -> str:
    """Canonical text of a goal conjunction, used for ordering and reporting."""
    return " ".join(str(f) for f in sorted(goal))


@dataclass(frozen=True)
class RecognitionProblem:
    """Goal recognition problem over an incomplete domain.

    ``observations`` are action signatures ``(name, args)`` resolved against
    the grounded task at recognition time.
    """

    domain: IncompleteDomain
    objects: dict[str, str]
    init: frozenset[Fact]
    hypotheses: tuple[frozenset[Fact], ...]
    observations: tuple[Atom, ...] = ()
    hidden_goal: int | None = None

    def __post_init__(self):
        if not self.hypotheses:
            raise ValueError("a recognition problem needs at least one candidate goal")
        if self.hidden_goal is not None and not 0 <= self.hidden_goal < len(self.hypotheses):
            raise ValueError(f"hidden goal index {self.hidden_goal} out of range")
