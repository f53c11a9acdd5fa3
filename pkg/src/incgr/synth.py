"""Synthetic blocksworld recognition corpora.

Builds problems in the corpus layout read by :mod:`incgr.evaluation`: random
initial towers, 4-6 candidate tower goals, an optimal plan for the hidden
goal (breadth-first search in the complete domain) and observation sequences
subsampled from it at several observability levels.
"""

from __future__ import annotations

import math
import random
from collections import deque
from pathlib import Path

from incgr.datasetgen import DegradeSpec, Variant, degrade, derive_seed
from incgr.grounding import GroundedTask, ground
from incgr.model import Atom, goal_text
from incgr.pddl import parse_domain, serialize_domain

BLOCKSWORLD = """\
(define (domain blocksworld)
  (:requirements :strips)
  (:predicates (on ?x ?y) (ontable ?x) (clear ?x) (handempty) (holding ?x))
  (:action pick-up
    :parameters (?x)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (holding ?x) (not (ontable ?x)) (not (clear ?x)) (not (handempty))))
  (:action put-down
    :parameters (?x)
    :precondition (holding ?x)
    :effect (and (not (holding ?x)) (clear ?x) (handempty) (ontable ?x)))
  (:action stack
    :parameters (?x ?y)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (not (holding ?x)) (not (clear ?y)) (clear ?x) (handempty) (on ?x ?y)))
  (:action unstack
    :parameters (?x ?y)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y) (not (clear ?x)) (not (handempty)) (not (on ?x ?y))))
)
"""


def blocksworld_domain():
    return parse_domain(BLOCKSWORLD)


def block_names(n: int) -> list[str]:
    return [f"b{i}" for i in range(n)]


def towers_state(towers) -> frozenset[Atom]:
    """Facts describing ``towers`` (each listed bottom to top) with an empty hand."""
    facts = {Atom("handempty")}
    for tower in towers:
        facts.add(Atom("ontable", (tower[0],)))
        facts.add(Atom("clear", (tower[-1],)))
        for below, above in zip(tower, tower[1:]):
            facts.add(Atom("on", (above, below)))
    return frozenset(facts)


def random_towers(blocks, rng: random.Random) -> list[list[str]]:
    order = list(blocks)
    rng.shuffle(order)
    towers: list[list[str]] = []
    for b in order:
        if towers and rng.random() < 0.6:
            rng.choice(towers).append(b)
        else:
            towers.append([b])
    return towers


def tower_goal(tower) -> frozenset[Atom]:
    facts = {Atom("ontable", (tower[0],)), Atom("clear", (tower[-1],))}
    for below, above in zip(tower, tower[1:]):
        facts.add(Atom("on", (above, below)))
    return frozenset(facts)


def bfs_plan(task: GroundedTask, goal, max_states: int = 500_000):
    """Shortest classical plan (possible annotations ignored), or ``None``."""
    goal = frozenset(goal)
    start = task.init
    if goal <= start:
        return []
    parent = {start: None}
    frontier = deque([start])
    while frontier:
        state = frontier.popleft()
        for a in task.actions:
            if a.pre <= state:
                nxt = (state - a.dels) | a.add
                if nxt in parent:
                    continue
                parent[nxt] = (state, a)
                if goal <= nxt:
                    plan = []
                    while parent[nxt] is not None:
                        nxt, act = parent[nxt]
                        plan.append(act)
                    return plan[::-1]
                if len(parent) > max_states:
                    return None
                frontier.append(nxt)
    return None


def subsample(plan, percent: int, rng: random.Random):
    """Keep ``ceil(percent% of len(plan))`` actions (at least one), in order."""
    if not plan:
        return []
    k = max(1, math.ceil(len(plan) * percent / 100))
    keep = sorted(rng.sample(range(len(plan)), k))
    return [plan[i] for i in keep]


def problem_text(name: str, domain: str, objects, init) -> str:
    objs = " ".join(sorted(objects))
    facts = " ".join(str(f) for f in sorted(init))
    return f"(define (problem {name})\n  (:domain {domain})\n  (:objects {objs})\n  (:init {facts})\n  (:goal (and)))\n"


def make_problem(rng: random.Random, n_blocks: int, n_hyps: int, tower_sizes=(3, 4)):
    """Return ``(objects, init, hypotheses, hidden_index, plan_signatures)``."""
    domain = blocksworld_domain()
    blocks = block_names(n_blocks)
    objects = {b: "object" for b in blocks}
    while True:
        init = towers_state(random_towers(blocks, rng))
        hyps: list[frozenset[Atom]] = []
        tries = 0
        while len(hyps) < n_hyps and tries < 200:
            tries += 1
            size = rng.choice(tower_sizes)
            goal = tower_goal(rng.sample(blocks, size))
            if goal in hyps or goal <= init:
                continue
            hyps.append(goal)
        if len(hyps) < n_hyps:
            continue
        hidden = rng.randrange(n_hyps)
        task = ground(domain, objects, init)
        plan = bfs_plan(task, hyps[hidden])
        if plan:
            return objects, init, hyps, hidden, [a.signature for a in plan]


def build_corpus(
    root,
    n_problems: int = 30,
    *,
    seed: int = 0,
    blocks: tuple[int, int] = (5, 6),
    hyps: tuple[int, int] = (4, 6),
    percents=(20, 80),
    variants=(Variant.S1,),
    observabilities=(10, 100),
) -> list[str]:
    """Write a corpus under ``root`` and return its manifest entries."""
    root = Path(root)
    rng = random.Random(seed)
    complete = blocksworld_domain()
    entries = []
    for k in range(n_problems):
        objects, init, goals, hidden, plan = make_problem(
            rng, rng.randint(*blocks), rng.randint(*hyps)
        )
        obs_by_level = {o: subsample(plan, o, rng) for o in observabilities}
        name = f"p{k:03d}"
        for percent in percents:
            for variant in variants:
                spec = DegradeSpec(percent, derive_seed(seed * 1_000_003 + k, percent), variant)
                directory = root / complete.name / str(percent) / variant.value / name
                directory.mkdir(parents=True, exist_ok=True)
                (directory / "domain.pddl").write_text(serialize_domain(degrade(complete, spec)))
                (directory / "template.pddl").write_text(problem_text(name, complete.name, objects, init))
                (directory / "hyps.dat").write_text("".join(f"{goal_text(g)}\n" for g in goals))
                (directory / "real_hyp.dat").write_text(goal_text(goals[hidden]) + "\n")
                for level, obs in obs_by_level.items():
                    (directory / str(level)).mkdir(exist_ok=True)
                    (directory / str(level) / "obs.dat").write_text("".join(f"{s}\n" for s in obs))
                    entries.append(f"{complete.name}/{percent}/{variant.value}/{name}/{level}")
    (root / "manifest.txt").write_text("".join(e + "\n" for e in entries))
    return entries
