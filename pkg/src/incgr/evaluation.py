"""Batch recognition over a corpus: Time / Acc / Spread tables and ROC points.

Corpus layout::

    <root>/manifest.txt                      one entry per line
    <root>/<domain>/<percent>/<variant>/<problem>/
        domain.pddl  template.pddl  hyps.dat  real_hyp.dat
        <observability>/obs.dat

A manifest entry is ``<domain>/<percent>/<variant>/<problem>/<observability>``.
Without a manifest every ``obs.dat`` below ``root`` is used.
"""

from __future__ import annotations

import csv
import logging
import math
import multiprocessing as mp
import time
from collections import deque
from dataclasses import asdict, dataclass, fields
from multiprocessing.connection import wait
from pathlib import Path

from incgr.pddl import load_problem
from incgr.recognition import recognize

log = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 120.0
GROUP_KEYS = ("domain", "percent", "variant", "observability", "heuristic")
ROC_KEYS = ("domain", "percent", "observability")


@dataclass
class ExperimentRecord:
    domain: str
    percent: int
    variant: str
    observability: int
    heuristic: str
    problem: str
    duration: float = 0.0
    correct: bool = False
    spread: int = 0
    n_goals: int = 0
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0
    timeout: bool = False


@dataclass(frozen=True)
class CorpusEntry:
    path: Path
    domain: str
    percent: int
    variant: str
    problem: str
    observability: int


def confusion(top, hidden: int, n_goals: int) -> tuple[int, int, int, int]:
    """Per-goal binary predictions: positive iff the goal is in ``top``."""
    top = set(top)
    tp = int(hidden in top)
    fp = len(top) - tp
    fn = 1 - tp
    tn = n_goals - len(top) - fn
    return tp, fp, tn, fn


def read_manifest(root) -> list[CorpusEntry]:
    root = Path(root)
    manifest = root / "manifest.txt"
    if manifest.exists():
        lines = [ln.strip() for ln in manifest.read_text().splitlines()]
        rels = [ln for ln in lines if ln and not ln.startswith("#")]
    else:
        rels = sorted(str(p.parent.relative_to(root)) for p in root.rglob("obs.dat"))
    entries = []
    for rel in rels:
        parts = Path(rel).parts
        if len(parts) != 5:
            log.warning("skipping malformed corpus entry %r", rel)
            continue
        domain, percent, variant, problem, obs = parts
        try:
            entries.append(CorpusEntry(root / rel, domain, int(percent), variant, problem, int(obs)))
        except ValueError:
            log.warning("skipping malformed corpus entry %r", rel)
    return entries


def run_entry(entry: CorpusEntry, heuristic: str, pool: str = "closure") -> ExperimentRecord:
    problem_dir = entry.path.parent
    problem = load_problem(
        problem_dir / "domain.pddl",
        problem_dir / "template.pddl",
        problem_dir / "hyps.dat",
        entry.path / "obs.dat",
        problem_dir / "real_hyp.dat",
    )
    result = recognize(problem, heuristic, pool=pool)
    n = len(problem.hypotheses)
    tp, fp, tn, fn = confusion(result.top, problem.hidden_goal, n)
    return ExperimentRecord(
        entry.domain, entry.percent, entry.variant, entry.observability, heuristic, entry.problem,
        duration=result.duration, correct=bool(result.correct), spread=result.spread,
        n_goals=n, tp=tp, fp=fp, tn=tn, fn=fn,
    )


def _child(job, conn):
    try:
        conn.send(("ok", run_entry(*job)))
    except Exception as exc:  # reported to the parent
        conn.send(("error", f"{type(exc).__name__}: {exc}"))
    finally:
        conn.close()


def _timeout_record(entry: CorpusEntry, heuristic: str, timeout: float) -> ExperimentRecord:
    return ExperimentRecord(
        entry.domain, entry.percent, entry.variant, entry.observability, heuristic, entry.problem,
        duration=timeout, timeout=True,
    )


def run_corpus(root, heuristics=("gc", "uniq"), timeout: float | None = DEFAULT_TIMEOUT,
               workers: int = 1, pool: str = "closure") -> list[ExperimentRecord]:
    """One record per (problem, heuristic), in manifest order.

    Each job runs in its own process so a timeout can stop it; timed-out
    jobs become records with ``timeout=True``. Failing entries are logged and
    dropped.
    """
    jobs = [(entry, h, pool) for entry in read_manifest(root) for h in heuristics]
    results: list[ExperimentRecord | None] = [None] * len(jobs)
    if timeout is None and workers <= 1:
        for i, job in enumerate(jobs):
            try:
                results[i] = run_entry(*job)
            except Exception as exc:
                log.warning("skipping %s: %s", job[0].path, exc)
        return [r for r in results if r is not None]

    ctx = mp.get_context("fork")
    pending = deque(enumerate(jobs))
    active: dict[int, tuple] = {}
    while pending or active:
        while pending and len(active) < max(1, workers):
            i, job = pending.popleft()
            recv, send = ctx.Pipe(duplex=False)
            proc = ctx.Process(target=_child, args=(job, send), daemon=True)
            proc.start()
            send.close()
            active[i] = (proc, recv, time.monotonic())
        wait([c for _, c, _ in active.values()], timeout=0.05)
        now = time.monotonic()
        for i, (proc, conn, started) in list(active.items()):
            entry, heuristic, _ = jobs[i]
            if conn.poll():
                try:
                    status, payload = conn.recv()
                except EOFError:
                    status, payload = "error", "worker exited without a result"
                if status == "ok":
                    results[i] = payload
                else:
                    log.warning("skipping %s (%s): %s", entry.path, heuristic, payload)
            elif timeout is not None and now - started > timeout:
                proc.kill()
                results[i] = _timeout_record(entry, heuristic, timeout)
                log.info("timeout: %s (%s)", entry.path, heuristic)
            elif proc.is_alive():
                continue
            proc.join()
            conn.close()
            del active[i]
    return [r for r in results if r is not None]


def aggregate(records, keys=GROUP_KEYS) -> list[dict]:
    """Rows of mean Time, Acc (%) and Spread per group; timeouts counted apart."""
    groups: dict[tuple, list[ExperimentRecord]] = {}
    for r in records:
        groups.setdefault(tuple(getattr(r, k) for k in keys), []).append(r)
    rows = []
    for key in sorted(groups):
        recs = groups[key]
        done = [r for r in recs if not r.timeout]
        n = len(done)
        row = dict(zip(keys, key))
        row.update(
            n=n,
            time_mean=math.fsum(r.duration for r in done) / n if n else 0.0,
            acc=100.0 * sum(r.correct for r in done) / n if n else 0.0,
            spread=sum(r.spread for r in done) / n if n else 0.0,
            timeouts=len(recs) - n,
        )
        rows.append(row)
    return rows


@dataclass(frozen=True)
class RocPoint:
    group: str
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def tpr(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def fpr(self) -> float:
        return self.fp / (self.fp + self.tn) if self.fp + self.tn else 0.0


def roc_points(records, keys=ROC_KEYS, granularity: str = "prediction") -> list[RocPoint]:
    """ROC-space points.

    ``"prediction"`` sums the per-goal confusion counts of each group into one
    point; ``"problem"`` emits one point per recognition run.
    """
    if granularity not in ("prediction", "problem"):
        raise ValueError(f"unknown granularity {granularity!r}")
    done = [r for r in records if not r.timeout]
    if granularity == "problem":
        return [
            RocPoint("/".join(str(getattr(r, k)) for k in keys) + f"/{r.problem}/{r.heuristic}",
                     r.tp, r.fp, r.tn, r.fn)
            for r in done
        ]
    sums: dict[str, list[int]] = {}
    for r in done:
        key = "/".join(str(getattr(r, k)) for k in keys)
        acc = sums.setdefault(key, [0, 0, 0, 0])
        for j, v in enumerate((r.tp, r.fp, r.tn, r.fn)):
            acc[j] += v
    return [RocPoint(k, *v) for k, v in sorted(sums.items())]


TABLE_COLUMNS = ["domain", "percent", "variant", "observability", "heuristic",
                 "n", "time_mean", "acc", "spread", "timeouts"]
ROC_COLUMNS = ["group", "tp", "fp", "tn", "fn", "tpr", "fpr"]


def write_table_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=TABLE_COLUMNS, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})


def read_table_csv(path) -> list[dict]:
    ints = {"percent", "observability", "n", "timeouts"}
    floats = {"time_mean", "acc", "spread"}
    rows = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            rows.append({
                k: int(v) if k in ints else float(v) if k in floats else v for k, v in row.items()
            })
    return rows


def write_roc_csv(points, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(ROC_COLUMNS)
        for p in points:
            writer.writerow([p.group, p.tp, p.fp, p.tn, p.fn, repr(p.tpr), repr(p.fpr)])


def write_records_csv(records, path) -> None:
    names = [f.name for f in fields(ExperimentRecord)]
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=names)
        writer.writeheader()
        for r in records:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in asdict(r).items()})


def read_records_csv(path) -> list[ExperimentRecord]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            kwargs = {}
            for f in fields(ExperimentRecord):
                v = row[f.name]
                if f.type in ("int",):
                    kwargs[f.name] = int(v)
                elif f.type == "float":
                    kwargs[f.name] = float(v)
                elif f.type == "bool":
                    kwargs[f.name] = v == "True"
                else:
                    kwargs[f.name] = v
            out.append(ExperimentRecord(**kwargs))
    return out
