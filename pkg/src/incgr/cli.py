"""Command-line entry point: ``incgr <command> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from incgr import evaluation
from incgr.datasetgen import DegradeSpec, Variant, degrade, degrade_suite
from incgr.grounding import count_completions, dump_ground, ground
from incgr.landmarks import POOLS, GoalUnreachableError, extract_landmarks, extract_overlooked
from incgr.model import goal_text
from incgr.orpg import build_orpg, dump_orpg
from incgr.pddl import ParseError, load_problem, parse_domain, serialize_domain
from incgr.recognition import HEURISTICS, recognize


def _write_lines(lines, target: str) -> None:
    text = "".join(line + "\n" for line in lines)
    if target == "-":
        sys.stderr.write(text)
    else:
        Path(target).write_text(text, encoding="utf-8")


def _load(args):
    return load_problem(args.domain, args.problem, args.hypotheses, getattr(args, "observations", None),
                        getattr(args, "real_goal", None))


def _dumps(args, problem):
    if not (args.dump_ground or args.dump_orpg):
        return
    task = ground(problem.domain, problem.objects, problem.init)
    if args.dump_ground:
        _write_lines(dump_ground(task), args.dump_ground)
    if args.dump_orpg:
        _write_lines(dump_orpg(build_orpg(task)), args.dump_orpg)


def cmd_recognize(args) -> int:
    problem = _load(args)
    _dumps(args, problem)
    result = recognize(problem, args.heuristic, pool=args.pool, strict_overlooked=args.strict_overlooked)
    print(result.to_json(indent=2))
    return 0


def cmd_landmarks(args) -> int:
    problem = _load(args)
    _dumps(args, problem)
    task = ground(problem.domain, problem.objects, problem.init)
    orpg = build_orpg(task)
    observations = [task.resolve(s) for s in problem.observations]
    for goal in problem.hypotheses:
        print(f"# {goal_text(goal)}")
        try:
            lms = extract_landmarks(task, goal, pool=args.pool, orpg=orpg)
        except GoalUnreachableError as exc:
            print(f"; {exc}")
            continue
        overlooked = extract_overlooked(task, goal, observations, lms, strict=args.strict_overlooked)
        for tag, facts in (("D", lms.definite), ("P", lms.possible), ("O", overlooked)):
            for f in sorted(facts):
                print(f"{tag} {f}")
    return 0


def cmd_degrade(args) -> int:
    domain = parse_domain(Path(args.domain).read_text(encoding="utf-8"))
    if args.suite:
        seeds = [args.seed + k for k in range(args.draws)]
        percents = [int(p) for p in args.percents.split(",") if p]
        for path in degrade_suite(domain, args.suite, seeds, percents):
            print(path)
        return 0
    out = serialize_domain(degrade(domain, DegradeSpec(args.percent, args.seed, Variant.parse(args.variant))))
    if args.output:
        Path(args.output).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    return 0


def cmd_completions(args) -> int:
    domain = parse_domain(Path(args.domain).read_text(encoding="utf-8"))
    if args.problem:
        problem = load_problem(args.domain, args.problem)
        model = ground(domain, problem.objects, problem.init)
    else:
        model = domain
    count = count_completions(model)
    print(json.dumps({"k": count.k, "completions": str(count.completions)}))
    return 0


def cmd_bench(args) -> int:
    heuristics = [h for h in args.heuristic.split(",") if h]
    for h in heuristics:
        if h not in HEURISTICS:
            raise SystemExit(f"unknown heuristic {h!r}")
    records = evaluation.run_corpus(args.corpus, heuristics, timeout=args.timeout,
                                    workers=args.workers, pool=args.pool)
    rows = evaluation.aggregate(records)
    if args.csv:
        evaluation.write_table_csv(rows, args.csv)
    if args.roc:
        evaluation.write_roc_csv(evaluation.roc_points(records, granularity=args.granularity), args.roc)
    if args.records:
        evaluation.write_records_csv(records, args.records)
    for row in rows:
        print("{domain} {percent}% {variant} obs={observability}% {heuristic}: n={n} "
              "time={time_mean:.4f}s acc={acc:.1f}% spread={spread:.2f} timeouts={timeouts}".format(**row))
    return 0


def cmd_synth(args) -> int:
    from incgr.synth import build_corpus

    percents = [int(p) for p in args.percents.split(",") if p]
    levels = [int(p) for p in args.observability.split(",") if p]
    variants = [Variant.parse(v) for v in args.variants.split(",") if v]
    entries = build_corpus(args.out, args.problems, seed=args.seed, percents=percents,
                           variants=variants, observabilities=levels)
    print(f"wrote {len(entries)} entries to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="incgr", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def problem_args(p, obs_required=False):
        p.add_argument("-d", "--domain", required=True)
        p.add_argument("-p", "--problem", required=True)
        p.add_argument("-g", "--hypotheses")
        p.add_argument("-o", "--observations", required=obs_required)
        p.add_argument("-r", "--real-goal")
        p.add_argument("--pool", choices=POOLS, default="closure")
        p.add_argument("--strict-overlooked", action="store_true",
                       help="exclude every achiever, not only observed ones, when testing overlooked landmarks")
        p.add_argument("--dump-ground", metavar="FILE", help="write the grounded task as JSON lines ('-' = stderr)")
        p.add_argument("--dump-orpg", metavar="FILE", help="write fact/action levels as TSV ('-' = stderr)")

    p = sub.add_parser("recognize", help="rank candidate goals, print JSON")
    problem_args(p)
    p.add_argument("--heuristic", choices=HEURISTICS, default="gc")
    p.set_defaults(func=cmd_recognize)

    p = sub.add_parser("landmarks", help="print D/P/O landmark sets per hypothesis")
    problem_args(p)
    p.set_defaults(func=cmd_landmarks)

    p = sub.add_parser("degrade", help="make an incomplete domain from a complete one")
    p.add_argument("-d", "--domain", required=True)
    p.add_argument("--percent", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--variant", default="S1")
    p.add_argument("-o", "--output")
    p.add_argument("--suite", metavar="DIR", help="write the S1/S12/S123 suite for every percent")
    p.add_argument("--percents", default="20,40,60,80")
    p.add_argument("--draws", type=int, default=1)
    p.set_defaults(func=cmd_degrade)

    p = sub.add_parser("completions", help="count the completions of a domain")
    p.add_argument("-d", "--domain", required=True)
    p.add_argument("-p", "--problem", help="count over ground actions of this problem")
    p.set_defaults(func=cmd_completions)

    p = sub.add_parser("bench", help="run a corpus and report Time/Acc/Spread")
    p.add_argument("--corpus", required=True)
    p.add_argument("--heuristic", default="gc,uniq")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timeout", type=float, default=evaluation.DEFAULT_TIMEOUT)
    p.add_argument("--pool", choices=POOLS, default="closure")
    p.add_argument("--csv")
    p.add_argument("--roc")
    p.add_argument("--records")
    p.add_argument("--granularity", choices=("prediction", "problem"), default="prediction")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("synth", help="generate a synthetic blocksworld corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--problems", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--percents", default="20,80")
    p.add_argument("--variants", default="S1")
    p.add_argument("--observability", default="10,30,50,70,100")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ParseError, KeyError, ValueError, OSError) as exc:
        print(f"incgr: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
