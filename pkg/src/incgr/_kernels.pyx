# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled relaxed exploration over the CSR arrays of a grounded task."""

import numpy as np

cimport cython
from libc.stdlib cimport calloc, free, malloc


def prepare(ct):
    return ct


cdef int _explore(
    int n_facts, int n_actions,
    const int[::1] pre_ptr, const int[::1] eff_ptr, const int[::1] eff_idx,
    const int[::1] users_ptr, const int[::1] users_idx, const int[::1] init_idx,
    const int[::1] excluded, const int[::1] goal, bint use_goal,
    int[::1] fact_level, int[::1] action_level,
) noexcept nogil:
    # returns 1 when the goal became reachable (use_goal) else 0
    cdef Py_ssize_t i, k, head = 0, tail = 0
    cdef int f, a, e, level, remaining = 0
    cdef int[::1] missing
    cdef unsigned char* blocked
    cdef unsigned char* in_goal
    cdef int* queue
    blocked = <unsigned char*> calloc(n_actions + 1, 1)
    in_goal = <unsigned char*> calloc(n_facts + 1, 1)
    queue = <int*> malloc((n_facts + 1) * sizeof(int))
    cdef int* miss = <int*> malloc((n_actions + 1) * sizeof(int))
    cdef int result = 0

    for i in range(excluded.shape[0]):
        blocked[excluded[i]] = 1
    for i in range(n_facts):
        fact_level[i] = -1
    for i in range(n_actions):
        action_level[i] = -1
        miss[i] = pre_ptr[i + 1] - pre_ptr[i]
    if use_goal:
        for i in range(goal.shape[0]):
            if not in_goal[goal[i]]:
                in_goal[goal[i]] = 1
                remaining += 1
        if remaining == 0:
            result = 1

    if not result:
        for i in range(init_idx.shape[0]):
            f = init_idx[i]
            if fact_level[f] < 0:
                fact_level[f] = 0
                queue[tail] = f
                tail += 1
                if in_goal[f]:
                    remaining -= 1
        if use_goal and remaining == 0:
            result = 1

    if not result:
        for a in range(n_actions):
            if miss[a] == 0 and not blocked[a]:
                action_level[a] = 0
                for k in range(eff_ptr[a], eff_ptr[a + 1]):
                    e = eff_idx[k]
                    if fact_level[e] < 0:
                        fact_level[e] = 1
                        queue[tail] = e
                        tail += 1
                        if in_goal[e]:
                            remaining -= 1
        if use_goal and remaining == 0:
            result = 1

    while not result and head < tail:
        f = queue[head]
        head += 1
        level = fact_level[f]
        for i in range(users_ptr[f], users_ptr[f + 1]):
            a = users_idx[i]
            if blocked[a]:
                continue
            miss[a] -= 1
            if miss[a] == 0:
                action_level[a] = level
                for k in range(eff_ptr[a], eff_ptr[a + 1]):
                    e = eff_idx[k]
                    if fact_level[e] < 0:
                        fact_level[e] = level + 1
                        queue[tail] = e
                        tail += 1
                        if in_goal[e]:
                            remaining -= 1
                if use_goal and remaining == 0:
                    result = 1
                    break

    free(blocked)
    free(in_goal)
    free(queue)
    free(miss)
    return result


def _as_ids(values):
    return np.ascontiguousarray(np.fromiter(values, dtype=np.int32))


def relaxed_levels(ct, excluded=()):
    """First level of every fact and action (``-1`` when never reached)."""
    fact_level = np.empty(ct.n_facts, dtype=np.int32)
    action_level = np.empty(ct.n_actions, dtype=np.int32)
    _explore(ct.n_facts, ct.n_actions, ct.pre_ptr, ct.eff_ptr, ct.eff_idx,
             ct.users_ptr, ct.users_idx, ct.init_idx, _as_ids(excluded),
             _as_ids(()), False, fact_level, action_level)
    return fact_level.tolist(), action_level.tolist()


def goal_reachable(ct, goal, excluded=()):
    """Whether all goal facts become reachable; stops as soon as they are."""
    fact_level = np.empty(ct.n_facts, dtype=np.int32)
    action_level = np.empty(ct.n_actions, dtype=np.int32)
    return bool(_explore(ct.n_facts, ct.n_actions, ct.pre_ptr, ct.eff_ptr, ct.eff_idx,
                         ct.users_ptr, ct.users_idx, ct.init_idx, _as_ids(excluded),
                         _as_ids(goal), True, fact_level, action_level))
