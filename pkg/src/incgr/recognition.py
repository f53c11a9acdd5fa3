"""Online landmark-based goal recognition over incomplete domains.

Two heuristics rank candidate goals: goal completion (share of a goal's
landmarks evidenced by the observations) and uniqueness (the same share,
with each landmark weighted by the inverse number of candidate goals that
have it, per landmark category). Scores are exact fractions.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction

from incgr.grounding import GroundAction, GroundedTask, ground
from incgr.landmarks import LandmarkSet, OverlookedTracker, extract_landmarks
from incgr.model import Fact, RecognitionProblem, goal_text
from incgr.orpg import build_orpg, reachable, replay

HEURISTICS = ("gc", "uniq")
CATEGORIES = ("definite", "possible", "overlooked")


@dataclass(frozen=True)
class AchievementRecord:
    achieved_definite: frozenset[Fact] = frozenset()
    achieved_possible: frozenset[Fact] = frozenset()
    achieved_overlooked: frozenset[Fact] = frozenset()

    def by_category(self):
        yield "definite", self.achieved_definite
        yield "possible", self.achieved_possible
        yield "overlooked", self.achieved_overlooked

    def __len__(self) -> int:
        return len(self.achieved_definite) + len(self.achieved_possible) + len(self.achieved_overlooked)


def evidence_of(action: GroundAction) -> frozenset[Fact]:
    """Facts an observed action shows to have held or to hold afterwards."""
    return action.pre | action.add | action.poss_add


def achieved(landmarks: LandmarkSet, evidence) -> AchievementRecord:
    return AchievementRecord(
        landmarks.definite & evidence,
        landmarks.possible & evidence,
        landmarks.overlooked & evidence,
    )


def mark_achieved(record: AchievementRecord, landmarks: LandmarkSet, init, observation=None) -> AchievementRecord:
    """Grow ``record`` with the landmarks evidenced by ``init`` and ``observation``."""
    evidence = set(init)
    if observation is not None:
        evidence |= evidence_of(observation)
    new = achieved(landmarks, evidence)
    return AchievementRecord(
        record.achieved_definite | new.achieved_definite,
        record.achieved_possible | new.achieved_possible,
        record.achieved_overlooked | new.achieved_overlooked,
    )


def h_gc(landmarks: LandmarkSet, record: AchievementRecord) -> Fraction:
    total = len(landmarks)
    if total == 0:
        return Fraction(0)
    return Fraction(len(record), total)


@dataclass(frozen=True)
class UniquenessTable:
    """Inverse frequency of each landmark among the candidate goals, per category."""

    values: dict[tuple[str, Fact], Fraction] = field(default_factory=dict)

    def value(self, category: str, fact: Fact) -> Fraction:
        return self.values[(category, fact)]

    def scaled(self, factor) -> "UniquenessTable":
        return UniquenessTable({k: v * factor for k, v in self.values.items()})


def uniqueness_table(all_landmarks) -> UniquenessTable:
    """``all_landmarks``: mapping or sequence of :class:`LandmarkSet`, one per goal."""
    sets = all_landmarks.values() if hasattr(all_landmarks, "values") else all_landmarks
    counts: dict[tuple[str, Fact], int] = {}
    for lms in sets:
        for category, facts in lms.categories():
            for f in facts:
                counts[(category, f)] = counts.get((category, f), 0) + 1
    return UniquenessTable({k: Fraction(1, n) for k, n in counts.items()})


def h_uniq(landmarks: LandmarkSet, record: AchievementRecord, table: UniquenessTable) -> Fraction:
    total = sum(
        (table.value(cat, f) for cat, facts in landmarks.categories() for f in facts),
        Fraction(0),
    )
    if total == 0:
        return Fraction(0)
    got = sum(
        (table.value(cat, f) for cat, facts in record.by_category() for f in facts),
        Fraction(0),
    )
    return got / total


def top_goals(scores, keys) -> list[int]:
    """Indices attaining the maximum score, ordered by ``keys``."""
    if not scores:
        return []
    best = max(scores)
    return sorted((i for i, s in enumerate(scores) if s == best), key=lambda i: keys[i])


@dataclass
class RecognitionResult:
    heuristic: str
    hypotheses: list[str]
    scores: list[Fraction]
    top: list[int]
    landmarks: list[LandmarkSet]
    records: list[AchievementRecord]
    reachable: list[bool]
    duration: float
    hidden_goal: int | None = None
    warnings: list[str] = field(default_factory=list)

    @property
    def correct(self) -> bool | None:
        if self.hidden_goal is None:
            return None
        return self.hidden_goal in self.top

    @property
    def spread(self) -> int:
        return len(self.top)

    def to_dict(self) -> dict:
        goals = []
        for i, text in enumerate(self.hypotheses):
            lms, rec = self.landmarks[i], self.records[i]
            goals.append({
                "goal": text,
                "score": float(self.scores[i]),
                "score_exact": str(self.scores[i]),
                "reachable": self.reachable[i],
                "landmarks": {
                    "definite": len(lms.definite),
                    "possible": len(lms.possible),
                    "overlooked": len(lms.overlooked),
                },
                "achieved": {
                    "definite": len(rec.achieved_definite),
                    "possible": len(rec.achieved_possible),
                    "overlooked": len(rec.achieved_overlooked),
                },
            })
        return {
            "heuristic": self.heuristic,
            "hypotheses": goals,
            "top": [self.hypotheses[i] for i in self.top],
            "hidden_goal": None if self.hidden_goal is None else self.hypotheses[self.hidden_goal],
            "correct": self.correct,
            "spread": self.spread,
            "warnings": self.warnings,
            "duration": self.duration,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


class RecognitionSession:
    """Consumes observations one at a time and scores every candidate goal.

    Landmarks of each candidate are extracted up front; overlooked landmarks
    are discovered as observations arrive and the uniqueness table is rebuilt
    only when some goal's landmark set grows.
    """

    def __init__(
        self,
        task: GroundedTask,
        hypotheses,
        *,
        pool: str = "closure",
        strict_overlooked: bool = False,
        overlooked: bool = True,
    ):
        self.task = task
        self.hypotheses = [frozenset(h) for h in hypotheses]
        self.texts = [goal_text(h) for h in self.hypotheses]
        orpg = build_orpg(task)
        self.reachable = [reachable(orpg, h) for h in self.hypotheses]
        self.landmarks: list[LandmarkSet] = []
        self.trackers: list[OverlookedTracker | None] = []
        for h, ok in zip(self.hypotheses, self.reachable):
            if ok:
                lms = extract_landmarks(task, h, pool=pool, orpg=orpg)
                tracker = OverlookedTracker(task, h, lms, strict=strict_overlooked) if overlooked else None
            else:
                lms, tracker = LandmarkSet(), None
            self.landmarks.append(lms)
            self.trackers.append(tracker)
        self.evidence: set[Fact] = set(task.init)
        self.observed: list[GroundAction] = []
        self.table = uniqueness_table(self.landmarks)

    def observe(self, action: GroundAction) -> None:
        self.observed.append(action)
        self.evidence |= evidence_of(action)
        grew = False
        for i, tracker in enumerate(self.trackers):
            if tracker is None:
                continue
            new = tracker.observe(action)
            if new:
                self.landmarks[i] = self.landmarks[i].with_overlooked(new)
                grew = True
        if grew:
            self.table = uniqueness_table(self.landmarks)

    def records(self) -> list[AchievementRecord]:
        return [achieved(lms, self.evidence) for lms in self.landmarks]

    def scores(self, heuristic: str) -> list[Fraction]:
        if heuristic not in HEURISTICS:
            raise ValueError(f"unknown heuristic {heuristic!r}")
        out = []
        for lms, rec in zip(self.landmarks, self.records()):
            out.append(h_gc(lms, rec) if heuristic == "gc" else h_uniq(lms, rec, self.table))
        return out

    def top(self, heuristic: str) -> list[int]:
        return top_goals(self.scores(heuristic), self.texts)


def recognize(
    problem: RecognitionProblem,
    heuristic: str = "gc",
    *,
    pool: str = "closure",
    strict_overlooked: bool = False,
    overlooked: bool = True,
) -> RecognitionResult:
    """Rank the candidate goals of ``problem``; the top set holds every maximiser."""
    if heuristic not in HEURISTICS:
        raise ValueError(f"unknown heuristic {heuristic!r}")
    start = time.perf_counter()
    task = ground(problem.domain, problem.objects, problem.init)
    actions = [task.resolve(sig) for sig in problem.observations]
    _, warnings = replay(task.init, actions)
    session = RecognitionSession(
        task, problem.hypotheses, pool=pool, strict_overlooked=strict_overlooked, overlooked=overlooked
    )
    for a in actions:
        session.observe(a)
    scores = session.scores(heuristic)
    return RecognitionResult(
        heuristic=heuristic,
        hypotheses=session.texts,
        scores=scores,
        top=top_goals(scores, session.texts),
        landmarks=list(session.landmarks),
        records=session.records(),
        reachable=session.reachable,
        duration=time.perf_counter() - start,
        hidden_goal=problem.hidden_goal,
        warnings=warnings,
    )
