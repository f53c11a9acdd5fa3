"""Definite, possible and overlooked fact landmarks over the optimistic graph.

Extraction back-chains from the goal: the achievers of a confirmed landmark
are split into those adding it through a known add effect and those adding
it only through a possible add effect, each group yields the facts all its
members require, and every candidate is confirmed by rebuilding the graph
without the candidate's achievers and checking that the goal is cut off.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from incgr.grounding import GroundAction, GroundedTask
from incgr.model import Fact
from incgr.orpg import Orpg, build_orpg, goal_reachable, reachable

POOLS = ("closure", "first-level")


class GoalUnreachableError(ValueError):
    pass


@dataclass(frozen=True)
class LandmarkSet:
    definite: frozenset[Fact] = frozenset()
    possible: frozenset[Fact] = frozenset()
    overlooked: frozenset[Fact] = frozenset()

    def __post_init__(self):
        if self.definite & self.possible:
            raise ValueError("definite and possible landmarks overlap")
        if self.overlooked & (self.definite | self.possible):
            raise ValueError("overlooked landmarks must be new facts")

    @property
    def facts(self) -> frozenset[Fact]:
        return self.definite | self.possible | self.overlooked

    def __len__(self) -> int:
        return len(self.definite) + len(self.possible) + len(self.overlooked)

    def with_overlooked(self, facts) -> "LandmarkSet":
        return LandmarkSet(self.definite, self.possible, self.overlooked | frozenset(facts))

    def categories(self):
        yield "definite", self.definite
        yield "possible", self.possible
        yield "overlooked", self.overlooked


def candidate_from_achievers(achievers) -> frozenset[Fact]:
    """Known preconditions shared by every achiever."""
    achievers = list(achievers)
    if not achievers:
        return frozenset()
    common = set(achievers[0].pre)
    for a in achievers[1:]:
        common &= a.pre
    return frozenset(common)


def verify_candidate(task: GroundedTask, goal, fact: Fact) -> bool:
    """True when removing every achiever of ``fact`` makes ``goal`` unreachable."""
    if fact in goal:
        return True
    return not goal_reachable(task, goal, task.achievers.get(fact, ()))


def necessary_facts(task: GroundedTask, orpg: Orpg) -> dict[Fact, int]:
    """Per reached fact, a bitmask (over ``task.facts``) of facts needed to reach it.

    Greatest fixpoint of ``need(f) = {f} | AND over achievers a of
    (adds(a) | OR over p in pre(a) of need(p))``, with ``need(i) = {i}`` for
    initial facts. ``adds`` counts possible adds: whatever every achiever of
    ``f`` adds holds whenever ``f`` is first reached.
    """
    fi = task.fact_index
    everything = (1 << len(task.facts)) - 1
    need: dict[Fact, int] = {}
    for f in orpg.fact_level:
        need[f] = 1 << fi[f] if f in task.init else everything
    order = sorted(
        (f for f in orpg.fact_level if f not in task.init),
        key=lambda f: (orpg.fact_level[f], f),
    )
    changed = True
    while changed:
        changed = False
        for f in order:
            acc = everything
            for a in orpg.achievers.get(f, ()):
                union = _add_mask(task, a)
                for p in a.pre:
                    union |= need[p]
                acc &= union
            new = acc | (1 << fi[f])
            if new != need[f]:
                need[f] = new
                changed = True
    return need


def _add_mask(task: GroundedTask, action: GroundAction) -> int:
    fi = task.fact_index
    mask = 0
    for f in action.add | action.poss_add:
        mask |= 1 << fi[f]
    return mask


def _mask_facts(task: GroundedTask, mask: int) -> set[Fact]:
    out = set()
    facts = task.facts
    while mask:
        low = mask & -mask
        out.add(facts[low.bit_length() - 1])
        mask ^= low
    return out


def extract_landmarks(
    task: GroundedTask,
    goal,
    *,
    pool: str = "closure",
    orpg: Orpg | None = None,
) -> LandmarkSet:
    """Definite and possible landmarks of ``goal``.

    ``pool`` picks the candidate generator. ``"first-level"`` intersects the
    known preconditions of the achievers one level below a landmark, the
    classic (incomplete) scheme. ``"closure"`` intersects, over all achievers,
    everything their preconditions transitively need plus what they add; on
    tasks without possible annotations this finds every relaxed landmark.

    Initial facts reached by back-chaining are accepted without a rebuild.
    A landmark is definite when some achiever adds it through a known add
    effect. Initial facts are possible when some group of possible achievers
    required them.
    """
    if pool not in POOLS:
        raise ValueError(f"unknown candidate pool {pool!r}")
    goal = frozenset(goal)
    if orpg is None:
        orpg = build_orpg(task)
    if not reachable(orpg, goal):
        missing = sorted(str(f) for f in goal if f not in orpg.fact_level)
        raise GoalUnreachableError(f"goal unreachable in the optimistic graph: {' '.join(missing)}")

    need = necessary_facts(task, orpg) if pool == "closure" else None

    def achiever_groups(fact: Fact) -> list[tuple[frozenset[GroundAction], bool]]:
        if pool == "first-level":
            acts = orpg.first_achievers(fact)
        else:
            acts = orpg.achievers.get(fact, frozenset())
        known = frozenset(a for a in acts if fact in a.add)
        return [(known, False), (acts - known, True)]

    def candidates(group) -> set[Fact]:
        if need is None:
            return set(candidate_from_achievers(group))
        acc = -1
        for a in group:
            union = _add_mask(task, a)
            for p in a.pre:
                union |= need[p]
            acc &= union
        return _mask_facts(task, acc)

    accepted: set[Fact] = set(goal)
    rejected: set[Fact] = set()
    via_possible: set[Fact] = set()
    queue = sorted(goal)
    while queue:
        landmark = queue.pop(0)
        if landmark in task.init:
            continue
        for group, possible_group in achiever_groups(landmark):
            if not group:
                continue
            for cand in sorted(candidates(group) - {landmark}):
                if possible_group:
                    via_possible.add(cand)
                if cand in accepted or cand in rejected:
                    continue
                if cand in task.init or verify_candidate(task, goal, cand):
                    accepted.add(cand)
                    queue.append(cand)
                else:
                    rejected.add(cand)

    definite, possible = set(), set()
    for fact in accepted:
        if fact in task.init:
            (possible if fact in via_possible else definite).add(fact)
        else:
            known, _ = achiever_groups(fact)[0]
            (definite if known else possible).add(fact)
    return LandmarkSet(frozenset(definite), frozenset(possible))


def _observed_achievers(observations, fact: Fact) -> list[GroundAction]:
    return [o for o in observations if fact in o.add or fact in o.poss_add]


def overlooked_test(task: GroundedTask, goal, fact: Fact, observations, *, strict: bool = False) -> bool:
    """Whether excluding the observed achievers of ``fact`` cuts ``goal`` off.

    ``strict`` excludes every achiever of the fact instead.
    """
    if fact in task.init:
        return False
    if strict:
        excluded = task.achievers.get(fact, ())
    else:
        excluded = set(_observed_achievers(observations, fact))
    return not goal_reachable(task, goal, excluded)


def extract_overlooked(
    task: GroundedTask,
    goal,
    observations,
    known: LandmarkSet,
    *,
    strict: bool = False,
) -> frozenset[Fact]:
    """Facts added by observed actions whose observed achievers are indispensable."""
    goal = frozenset(goal)
    observations = list(observations)
    if not observations or not goal_reachable(task, goal):
        return frozenset()
    skip = known.definite | known.possible
    pool = set()
    for o in observations:
        pool |= o.add | o.poss_add
    return frozenset(
        f for f in sorted(pool - skip)
        if overlooked_test(task, goal, f, observations, strict=strict)
    )


@dataclass
class OverlookedTracker:
    """Online overlooked-landmark discovery for one goal.

    Each new observation only changes the observed-achiever sets of the facts
    it adds, so only those facts are retested. Results only accumulate.
    """

    task: GroundedTask
    goal: frozenset[Fact]
    known: LandmarkSet
    strict: bool = False
    found: set[Fact] = field(default_factory=set)
    _observed: list[GroundAction] = field(default_factory=list)

    def __post_init__(self):
        self._active = len(self.known) > 0 and goal_reachable(self.task, self.goal)

    def observe(self, action: GroundAction) -> frozenset[Fact]:
        """Consume one observation; return the facts newly found overlooked."""
        self._observed.append(action)
        if not self._active:
            return frozenset()
        skip = self.known.definite | self.known.possible | self.found
        new = set()
        for f in sorted((action.add | action.poss_add) - skip):
            if overlooked_test(self.task, self.goal, f, self._observed, strict=self.strict):
                new.add(f)
        self.found |= new
        return frozenset(new)
