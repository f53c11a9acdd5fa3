"""Optimistic relaxed planning graph and optimistic state progression.

The graph ignores delete effects, possible preconditions and possible delete
effects, and treats every possible add effect as occurring.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from incgr import kernels
from incgr.grounding import GroundAction, GroundedTask
from incgr.model import Fact

log = logging.getLogger(__name__)


class InapplicableActionError(ValueError):
    pass


@dataclass(frozen=True)
class Orpg:
    """First-appearance levels plus the achievers that fired in the graph."""

    fact_level: dict[Fact, int]
    action_level: dict[GroundAction, int]
    achievers: dict[Fact, frozenset[GroundAction]]
    max_level: int

    def level(self, fact: Fact) -> float:
        return self.fact_level.get(fact, float("inf"))

    def known_achievers(self, fact: Fact) -> frozenset[GroundAction]:
        return frozenset(a for a in self.achievers.get(fact, ()) if fact in a.add)

    def possible_achievers(self, fact: Fact) -> frozenset[GroundAction]:
        """Achievers providing the fact only through a possible add effect."""
        return frozenset(a for a in self.achievers.get(fact, ()) if fact not in a.add)

    def first_achievers(self, fact: Fact) -> frozenset[GroundAction]:
        """Achievers applicable at the level just before the fact appears."""
        lvl = self.fact_level.get(fact)
        if lvl is None or lvl == 0:
            return frozenset()
        return frozenset(a for a in self.achievers.get(fact, ()) if self.action_level[a] == lvl - 1)


def _excluded_ids(task: GroundedTask, excluded) -> list[int]:
    idx = task.action_index
    return sorted(idx[a] for a in excluded)


def build_orpg(task: GroundedTask, init=None, excluded=frozenset()) -> Orpg:
    if init is not None and frozenset(init) != task.init:
        task = GroundedTask(task.facts, task.actions, task.objects, frozenset(init))
    fl, al = kernels.relaxed_levels(task.kernel_data, _excluded_ids(task, excluded))
    fact_level = {task.facts[i]: lvl for i, lvl in enumerate(fl) if lvl >= 0}
    action_level = {task.actions[i]: lvl for i, lvl in enumerate(al) if lvl >= 0}
    achievers: dict[Fact, set[GroundAction]] = {}
    for a in action_level:
        for f in a.add | a.poss_add:
            achievers.setdefault(f, set()).add(a)
    return Orpg(
        fact_level,
        action_level,
        {f: frozenset(acts) for f, acts in achievers.items()},
        max(fact_level.values(), default=0),
    )


def reachable(orpg: Orpg, goal) -> bool:
    return all(f in orpg.fact_level for f in goal)


def goal_reachable(task: GroundedTask, goal, excluded=()) -> bool:
    """Reachability of ``goal`` in the graph without ``excluded``, without building it."""
    return kernels.goal_reachable(task.kernel_data, task.fact_ids(goal), _excluded_ids(task, excluded))


def apply_optimistic(state, action: GroundAction) -> frozenset[Fact]:
    """Most-optimistic successor: known deletes apply, possible deletes never do."""
    state = frozenset(state)
    missing = action.pre - state
    if missing:
        raise InapplicableActionError(
            f"{action} is not applicable: missing {', '.join(map(str, sorted(missing)))}"
        )
    return (state - action.dels) | action.add | action.poss_add


def replay(init, actions) -> tuple[list[frozenset[Fact]], list[str]]:
    """Progress ``init`` through ``actions`` optimistically.

    Inapplicable steps are reported and their effects applied anyway.
    """
    states = [frozenset(init)]
    warnings = []
    for i, a in enumerate(actions):
        state = states[-1]
        if not a.pre <= state:
            missing = ", ".join(map(str, sorted(a.pre - state)))
            msg = f"observation {i + 1} {a} inapplicable under optimistic semantics (missing {missing})"
            log.info(msg)
            warnings.append(msg)
        states.append((state - a.dels) | a.add | a.poss_add)
    return states, warnings


def dump_orpg(orpg: Orpg):
    """Yield tab-separated ``kind, item, level`` lines."""
    for f, lvl in sorted(orpg.fact_level.items(), key=lambda kv: (kv[1], kv[0])):
        yield f"fact\t{f}\t{lvl}"
    for a, lvl in sorted(orpg.action_level.items(), key=lambda kv: (kv[1], kv[0].signature)):
        yield f"action\t{a}\t{lvl}"
