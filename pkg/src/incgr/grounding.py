"""Instantiate lifted incomplete operators over typed objects."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np

from incgr.model import Atom, Fact, IncompleteDomain, IncompleteOperator


class UnknownActionError(KeyError):
    def __str__(self) -> str:
        return str(self.args[0])


@dataclass(frozen=True, eq=False)
class GroundAction:
    signature: Atom
    pre: frozenset[Fact] = frozenset()
    poss_pre: frozenset[Fact] = frozenset()
    add: frozenset[Fact] = frozenset()
    dels: frozenset[Fact] = frozenset()
    poss_add: frozenset[Fact] = frozenset()
    poss_del: frozenset[Fact] = frozenset()

    def __eq__(self, other):
        return isinstance(other, GroundAction) and self.signature == other.signature

    def __hash__(self):
        return hash(self.signature)

    def __lt__(self, other: "GroundAction") -> bool:
        return self.signature < other.signature

    def __str__(self) -> str:
        return str(self.signature)

    def __repr__(self) -> str:
        return f"GroundAction{self.signature}"

    @property
    def optimistic_add(self) -> frozenset[Fact]:
        return self.add | self.poss_add

    @property
    def num_possible(self) -> int:
        return len(self.poss_pre) + len(self.poss_add) + len(self.poss_del)


class CompiledTask(NamedTuple):
    """Integer view of a grounded task, consumed by the reachability kernels.

    ``pre_*`` is the CSR list of known preconditions per action, ``eff_*`` the
    optimistic adds (known and possible) per action and ``users_*`` the actions
    having each fact as a known precondition.
    """

    n_facts: int
    n_actions: int
    pre_ptr: np.ndarray
    pre_idx: np.ndarray
    eff_ptr: np.ndarray
    eff_idx: np.ndarray
    users_ptr: np.ndarray
    users_idx: np.ndarray
    init_idx: np.ndarray


def _csr(rows: list[list[int]]) -> tuple[np.ndarray, np.ndarray]:
    ptr = np.zeros(len(rows) + 1, dtype=np.int32)
    if rows:
        ptr[1:] = np.cumsum([len(r) for r in rows])
    idx = np.fromiter(itertools.chain.from_iterable(rows), dtype=np.int32, count=int(ptr[-1]))
    return ptr, idx


@dataclass(frozen=True, eq=False)
class GroundedTask:
    facts: tuple[Fact, ...]
    actions: tuple[GroundAction, ...]
    objects: dict[str, str]
    init: frozenset[Fact]

    @cached_property
    def fact_index(self) -> dict[Fact, int]:
        return {f: i for i, f in enumerate(self.facts)}

    @cached_property
    def action_index(self) -> dict[GroundAction, int]:
        return {a: i for i, a in enumerate(self.actions)}

    @cached_property
    def by_signature(self) -> dict[Atom, GroundAction]:
        return {a.signature: a for a in self.actions}

    @cached_property
    def achievers(self) -> dict[Fact, tuple[GroundAction, ...]]:
        """Every action with the fact among its known or possible adds."""
        out: dict[Fact, list[GroundAction]] = {}
        for a in self.actions:
            for f in a.add | a.poss_add:
                out.setdefault(f, []).append(a)
        return {f: tuple(sorted(acts)) for f, acts in out.items()}

    @cached_property
    def compiled(self) -> CompiledTask:
        fi = self.fact_index
        pre = [sorted(fi[f] for f in a.pre) for a in self.actions]
        eff = [sorted(fi[f] for f in a.add | a.poss_add) for a in self.actions]
        users: list[list[int]] = [[] for _ in self.facts]
        for ai, row in enumerate(pre):
            for f in row:
                users[f].append(ai)
        pre_ptr, pre_idx = _csr(pre)
        eff_ptr, eff_idx = _csr(eff)
        users_ptr, users_idx = _csr(users)
        init_idx = np.array(sorted(fi[f] for f in self.init), dtype=np.int32)
        return CompiledTask(
            len(self.facts), len(self.actions),
            pre_ptr, pre_idx, eff_ptr, eff_idx, users_ptr, users_idx, init_idx,
        )

    @cached_property
    def kernel_data(self):
        from incgr import kernels

        return kernels.prepare(self.compiled)

    def resolve(self, signature: Atom) -> GroundAction:
        try:
            return self.by_signature[signature]
        except KeyError:
            raise UnknownActionError(f"unknown action {signature}") from None

    def fact_ids(self, facts) -> list[int]:
        fi = self.fact_index
        return [fi[f] for f in facts]

    def is_complete(self) -> bool:
        return all(a.num_possible == 0 for a in self.actions)

    def classical(self) -> "GroundedTask":
        """The same task with every possible annotation removed."""
        stripped = tuple(GroundAction(a.signature, a.pre, add=a.add, dels=a.dels) for a in self.actions)
        return GroundedTask(self.facts, stripped, self.objects, self.init)


def objects_by_type(domain: IncompleteDomain, objects: dict[str, str]) -> dict[str, list[str]]:
    """Map each type to the sorted objects whose type is that type or a subtype."""
    all_objects = dict(domain.constants)
    all_objects.update(objects)
    out: dict[str, list[str]] = {}
    for obj, t in all_objects.items():
        for anc in domain.ancestors(t):
            out.setdefault(anc, []).append(obj)
    return {t: sorted(objs) for t, objs in out.items()}


def _bindings(params, typed: dict[str, list[str]]):
    variables = [v for v, _ in params]
    domains = [typed.get(t, []) for _, t in params]
    for values in itertools.product(*domains):
        yield dict(zip(variables, values))


def ground_operator(op: IncompleteOperator, typed: dict[str, list[str]]) -> list[GroundAction]:
    out = []
    for binding in _bindings(op.parameters, typed):
        sig = Atom(op.name, tuple(binding[v] for v, _ in op.parameters))

        def inst(atoms):
            return frozenset(a.substitute(binding) for a in atoms)

        pre, add, dels = inst(op.pre), inst(op.add), inst(op.dels)
        # literals collapsing onto a known slot stay known
        out.append(GroundAction(
            sig,
            pre,
            inst(op.poss_pre) - pre,
            add,
            dels,
            inst(op.poss_add) - add,
            inst(op.poss_del) - dels,
        ))
    return out


def ground(domain: IncompleteDomain, objects: dict[str, str], init) -> GroundedTask:
    """Ground every operator and predicate over every type-consistent binding."""
    typed = objects_by_type(domain, objects)
    facts = set()
    for pred in domain.predicates:
        for binding in _bindings(pred.parameters, typed):
            facts.add(Atom(pred.name, tuple(binding[v] for v, _ in pred.parameters)))
    init = frozenset(init)
    missing = init - facts
    if missing:
        raise ValueError(f"initial facts outside the fact universe: {sorted(map(str, missing))}")
    actions = []
    for op in domain.operators:
        actions.extend(ground_operator(op, typed))
    actions.sort()
    all_objects = dict(domain.constants)
    all_objects.update(objects)
    return GroundedTask(tuple(sorted(facts)), tuple(actions), all_objects, init)


@dataclass(frozen=True)
class CompletionCount:
    k: int
    completions: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "completions", 2 ** self.k)


def count_completions(model) -> CompletionCount:
    """Size of the completion set: ``2**K`` with ``K`` the number of possible literals.

    Lifted when given an :class:`IncompleteDomain`, ground when given a
    :class:`GroundedTask`.
    """
    if isinstance(model, IncompleteDomain):
        return CompletionCount(sum(op.num_possible for op in model.operators))
    return CompletionCount(sum(a.num_possible for a in model.actions))


def dump_ground(task: GroundedTask):
    """Yield newline-delimited JSON records describing the grounded task."""
    import json

    for f in task.facts:
        yield json.dumps({"kind": "fact", "fact": str(f), "init": f in task.init})
    for a in task.actions:
        rec = {"kind": "action", "signature": str(a.signature)}
        for key in ("pre", "poss_pre", "add", "dels", "poss_add", "poss_del"):
            rec[key] = [str(f) for f in sorted(getattr(a, key))]
        yield json.dumps(rec)
