"""Compare the compiled and pure-Python reachability kernels.

    python benchmarks/bench_kernels.py [--blocks 10 20 40] [--repeat 5]

Reports, per blocksworld size, the best-of-``repeat`` time of a full level
computation, of a batch of exclusion queries like those issued during
landmark verification, and of end-to-end landmark extraction.
"""

import argparse
import importlib
import random
import timeit

from incgr import kernels
from incgr.grounding import ground
from incgr.landmarks import extract_landmarks
from incgr.synth import block_names, blocksworld_domain, random_towers, tower_goal, towers_state


def make_task(n_blocks, seed=0):
    rng = random.Random(seed)
    blocks = block_names(n_blocks)
    task = ground(blocksworld_domain(), {b: "object" for b in blocks}, towers_state(random_towers(blocks, rng)))
    goal = tower_goal(rng.sample(blocks, min(5, n_blocks)))
    return task, goal


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def run(mod, task, goal, repeat):
    data = mod.prepare(task.compiled)
    gidx = task.fact_ids(goal)
    achievers = [[task.action_index[a] for a in task.achievers.get(f, ())]
                 for f in task.facts[:200]]
    levels = best(lambda: mod.relaxed_levels(data, []), repeat)
    queries = best(lambda: [mod.goal_reachable(data, gidx, ex) for ex in achievers], repeat)
    # end to end, with the module swapped in behind incgr.kernels
    saved = (kernels.relaxed_levels, kernels.goal_reachable, kernels.prepare)
    kernels.relaxed_levels, kernels.goal_reachable, kernels.prepare = (
        mod.relaxed_levels, mod.goal_reachable, mod.prepare)
    try:
        def extract():
            task.__dict__.pop("kernel_data", None)
            extract_landmarks(task, goal)
        e2e = best(extract, repeat)
    finally:
        kernels.relaxed_levels, kernels.goal_reachable, kernels.prepare = saved
        task.__dict__.pop("kernel_data", None)
    return levels, queries, len(achievers), e2e


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--blocks", type=int, nargs="+", default=[10, 20, 40])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = [("python", importlib.import_module("incgr._kernels_py"))]
    try:
        backends.append(("cython", importlib.import_module("incgr._kernels")))
    except ImportError:
        print("compiled kernels not built; timing the pure-Python fallback only")

    print(f"{'blocks':>6} {'facts':>6} {'actions':>7} {'backend':>7} {'levels':>10} {'queries':>12} {'extract':>10}")
    for n in args.blocks:
        task, goal = make_task(n)
        base = None
        for name, mod in backends:
            lv, q, nq, e2e = run(mod, task, goal, args.repeat)
            note = "" if base is None else f"  x{base[0] / lv:.1f} / x{base[1] / q:.1f} / x{base[2] / e2e:.1f}"
            base = base or (lv, q, e2e)
            print(f"{n:>6} {len(task.facts):>6} {len(task.actions):>7} {name:>7} "
                  f"{lv * 1e3:>8.2f}ms {q * 1e3:>7.1f}ms/{nq:<3} {e2e * 1e3:>8.1f}ms{note}")


if __name__ == "__main__":
    main()
