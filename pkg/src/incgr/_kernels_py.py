"""Pure-Python relaxed exploration, used when the compiled core is absent.

Mirrors ``_kernels.pyx`` function for function.
"""

from collections import deque


def prepare(ct):
    return (
        ct.n_facts,
        ct.n_actions,
        ct.pre_ptr.tolist(),
        ct.eff_ptr.tolist(),
        ct.eff_idx.tolist(),
        ct.users_ptr.tolist(),
        ct.users_idx.tolist(),
        ct.init_idx.tolist(),
    )


def _explore(data, excluded, goal, want_levels):
    n_facts, n_actions, pre_ptr, eff_ptr, eff_idx, users_ptr, users_idx, init_idx = data
    fact_level = [-1] * n_facts
    action_level = [-1] * n_actions
    missing = [pre_ptr[a + 1] - pre_ptr[a] for a in range(n_actions)]
    blocked = bytearray(n_actions)
    for a in excluded:
        blocked[a] = 1

    in_goal = bytearray(n_facts)
    remaining = 0
    if goal is not None:
        for g in goal:
            if not in_goal[g]:
                in_goal[g] = 1
                remaining += 1
        if remaining == 0:
            return True

    queue = deque()
    for f in init_idx:
        if fact_level[f] < 0:
            fact_level[f] = 0
            queue.append(f)
            if in_goal[f]:
                remaining -= 1
    if goal is not None and remaining == 0:
        return True

    def fire(a, level):
        nonlocal remaining
        action_level[a] = level
        for k in range(eff_ptr[a], eff_ptr[a + 1]):
            e = eff_idx[k]
            if fact_level[e] < 0:
                fact_level[e] = level + 1
                queue.append(e)
                if in_goal[e]:
                    remaining -= 1

    for a in range(n_actions):
        if missing[a] == 0 and not blocked[a]:
            fire(a, 0)
    if goal is not None and remaining == 0:
        return True

    while queue:
        f = queue.popleft()
        level = fact_level[f]
        for k in range(users_ptr[f], users_ptr[f + 1]):
            a = users_idx[k]
            if blocked[a]:
                continue
            missing[a] -= 1
            if missing[a] == 0:
                fire(a, level)
                if goal is not None and remaining == 0:
                    return True
    if goal is not None:
        return False
    return fact_level, action_level


def relaxed_levels(data, excluded=()):
    """First level of every fact and action (``-1`` when never reached)."""
    return _explore(data, excluded, None, True)


def goal_reachable(data, goal, excluded=()):
    """Whether all goal facts become reachable; stops as soon as they are."""
    return _explore(data, excluded, goal, False)
