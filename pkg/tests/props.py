"""Property checks driven by an integer seed.

Each ``check_*`` builds a random instance from the seed and raises
AssertionError on violation; ``test_properties`` feeds them through
hypothesis and the acceptance suite runs them over counted seed ranges.
"""

from __future__ import annotations

import random
from fractions import Fraction

from incgr.datasetgen import DegradeSpec, Variant, degrade, moved_count
from incgr.orpg import build_orpg, goal_reachable
from incgr.recognition import RecognitionSession, h_uniq, top_goals

from oracles import random_complete_domain, random_task


def random_walk(rng: random.Random, task, steps: int):
    """Mostly applicable actions from init, with the odd unapplicable one."""
    state = set(task.init)
    out = []
    for _ in range(steps):
        ok = [a for a in task.actions if a.pre <= state]
        a = rng.choice(ok) if ok and rng.random() < 0.85 else rng.choice(task.actions)
        state = (state - a.dels) | a.add | a.poss_add
        out.append(a)
    return out


def random_session(seed: int, *, n_hyps=None, overlooked=True, pool="closure"):
    rng = random.Random(seed)
    task = random_task(rng, rng.randint(3, 14), rng.randint(2, 10))
    k = n_hyps or rng.randint(1, 4)
    hyps = []
    for _ in range(k):
        hyps.append(frozenset(rng.sample(task.facts, rng.randint(1, min(3, len(task.facts))))))
    session = RecognitionSession(task, hyps, pool=pool, overlooked=overlooked)
    obs = random_walk(rng, task, rng.randint(0, 8))
    return rng, session, obs


def check_unit_interval(seed: int) -> None:
    _, s, obs = random_session(seed)
    for a in [None] + obs:
        if a is not None:
            s.observe(a)
        for h in ("gc", "uniq"):
            assert all(0 <= v <= 1 for v in s.scores(h))


def check_gc_prefix_monotone(seed: int) -> None:
    _, s, obs = random_session(seed, overlooked=False)
    prev = s.scores("gc")
    for a in obs:
        s.observe(a)
        cur = s.scores("gc")
        assert all(c >= p for c, p in zip(cur, prev))
        prev = cur


def check_singleton_collapse(seed: int) -> None:
    _, s, obs = random_session(seed, n_hyps=1)
    assert s.scores("uniq") == s.scores("gc")
    for a in obs:
        s.observe(a)
        assert s.scores("uniq") == s.scores("gc")


def check_uniq_scaling(seed: int) -> None:
    rng, s, obs = random_session(seed)
    for a in obs:
        s.observe(a)
    factor = Fraction(rng.randint(1, 1000), rng.randint(1, 1000))
    scaled = s.table.scaled(factor)
    recs = s.records()
    plain = [h_uniq(lm, r, s.table) for lm, r in zip(s.landmarks, recs)]
    other = [h_uniq(lm, r, scaled) for lm, r in zip(s.landmarks, recs)]
    assert top_goals(plain, s.texts) == top_goals(other, s.texts)


def check_records_monotone(seed: int) -> None:
    _, s, obs = random_session(seed)
    prev = s.records()
    for a in obs:
        s.observe(a)
        cur = s.records()
        for c, p, lm in zip(cur, prev, s.landmarks):
            assert p.achieved_definite <= c.achieved_definite
            assert p.achieved_possible <= c.achieved_possible
            assert p.achieved_overlooked <= c.achieved_overlooked
            assert c.achieved_definite <= lm.definite and c.achieved_possible <= lm.possible
            assert c.achieved_overlooked <= lm.overlooked
        prev = cur


def check_orpg_layers(seed: int) -> None:
    rng = random.Random(seed)
    task = random_task(rng, rng.randint(2, 20), rng.randint(1, 15))
    g = build_orpg(task)
    layers = [{f for f, lv in g.fact_level.items() if lv <= k} for k in range(g.max_level + 2)]
    for lo, hi in zip(layers, layers[1:]):
        assert lo <= hi
    assert layers[-1] == layers[-2]  # fixpoint
    assert g.max_level <= len(task.facts)
    for a, lv in g.action_level.items():
        assert all(g.fact_level[p] <= lv for p in a.pre)
        assert all(g.fact_level[f] <= lv + 1 for f in a.add | a.poss_add)
    excluded = set(rng.sample(task.actions, rng.randint(0, len(task.actions))))
    smaller = build_orpg(task, excluded=excluded)
    assert set(smaller.fact_level) <= set(g.fact_level)
    goal = set(rng.sample(task.facts, 1))
    if goal_reachable(task, goal, excluded):
        assert goal_reachable(task, goal)


def check_step1_counts(seed: int) -> None:
    rng = random.Random(seed)
    d = random_complete_domain(rng, rng.randint(1, 6))
    spec = DegradeSpec(rng.randint(0, 100), rng.getrandbits(64), Variant.S1)
    out = degrade(d, spec)
    for known, poss in (("pre", "poss_pre"), ("add", "poss_add"), ("dels", "poss_del")):
        total = sum(len(getattr(op, known)) for op in d.operators)
        k = sum(len(getattr(op, known)) for op in out.operators)
        p = sum(len(getattr(op, poss)) for op in out.operators)
        assert p == moved_count(spec.percent, total)
        assert k + p == total
    for op in out.operators:
        assert op.check() == []


PROPERTIES = {
    "heuristics in [0,1]": check_unit_interval,
    "h_gc prefix-monotone": check_gc_prefix_monotone,
    "h_uniq == h_gc for one hypothesis": check_singleton_collapse,
    "h_uniq argmax scale-invariant": check_uniq_scaling,
    "achievement records monotone": check_records_monotone,
    "ORPG layers monotone": check_orpg_layers,
    "Step-1 counts exact": check_step1_counts,
}
