"""Turn complete STRIPS domains into incomplete ones.

Three cumulative steps, selected by the variant:

* ``S1``: move ``ceil(percent% of total)`` known preconditions, add effects
  and delete effects (counted per category over all operators) into the
  matching possible lists.
* ``S12``: additionally, each delete effect that is not a precondition of
  its operator becomes a possible precondition with probability ``percent%``.
* ``S123``: additionally, each atom over the operator's own (distinct,
  type-fitting) parameters that the operator does not mention is added, with
  probability ``percent%``, to a uniformly chosen possible list.

Randomness comes from SplitMix64 so that outputs are reproducible bit for bit
on every platform; see :class:`SplitMix64`.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, replace
from pathlib import Path

from incgr.model import Atom, IncompleteDomain, IncompleteOperator
from incgr.pddl import serialize_domain

MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 generator with unbiased bounded draws.

    ``state += 0x9E3779B97F4A7C15``; output ``z`` mixes the state with
    ``z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
    z *= 0x94D049BB133111EB; z ^= z >> 31`` (all mod 2**64).
    ``below(n)`` rejects draws ``>= 2**64 - (2**64 mod n)`` and returns the
    remainder mod ``n``.
    """

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        if n <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def chance(self, percent: int) -> bool:
        """True with probability ``percent/100`` (integer percent)."""
        return self.below(100) < percent

    def sample_indices(self, n: int, k: int) -> list[int]:
        """``k`` distinct indices of ``range(n)`` via a partial Fisher-Yates shuffle, sorted."""
        idx = list(range(n))
        for i in range(k):
            j = i + self.below(n - i)
            idx[i], idx[j] = idx[j], idx[i]
        return sorted(idx[:k])


class Variant(enum.Enum):
    S1 = "S1"
    S12 = "S12"
    S123 = "S123"

    @classmethod
    def parse(cls, text: str) -> "Variant":
        try:
            return cls(text.upper())
        except ValueError:
            raise ValueError(f"unknown variant {text!r}; expected one of S1, S12, S123") from None


@dataclass(frozen=True)
class DegradeSpec:
    percent: int
    seed: int = 0
    variant: Variant = Variant.S1

    def __post_init__(self):
        if not 0 <= self.percent <= 100:
            raise ValueError(f"percent must lie in [0, 100], got {self.percent}")


CATEGORIES = (("pre", "poss_pre"), ("add", "poss_add"), ("dels", "poss_del"))


def moved_count(percent: int, total: int) -> int:
    """``ceil(percent/100 * total)`` in integer arithmetic."""
    return (percent * total + 99) // 100


def _step_move(domain: IncompleteDomain, percent: int, rng: SplitMix64) -> list[dict]:
    ops = [dict(op.literal_sets()) for op in domain.operators]
    for known, poss in CATEGORIES:
        occurrences = [(i, lit) for i, op in enumerate(ops) for lit in sorted(op[known])]
        chosen = rng.sample_indices(len(occurrences), moved_count(percent, len(occurrences)))
        for c in chosen:
            i, lit = occurrences[c]
            ops[i][known] = ops[i][known] - {lit}
            ops[i][poss] = ops[i][poss] | {lit}
    return ops


def _step_deletes(ops: list[dict], percent: int, rng: SplitMix64) -> None:
    for op in ops:
        for lit in sorted(op["dels"] | op["poss_del"]):
            if lit in op["pre"] or lit in op["poss_pre"]:
                continue
            if rng.chance(percent):
                op["poss_pre"] = op["poss_pre"] | {lit}


def _fitting_atoms(domain: IncompleteDomain, op: IncompleteOperator):
    for pred in domain.predicates:
        for params in itertools.permutations(op.parameters, pred.arity):
            if all(domain.is_subtype(ptype, want) for (_, ptype), (_, want) in zip(params, pred.parameters)):
                yield Atom(pred.name, tuple(v for v, _ in params))


def _step_extra(domain: IncompleteDomain, ops: list[dict], percent: int, rng: SplitMix64) -> None:
    targets = ("poss_pre", "poss_add", "poss_del")
    for source, op in zip(domain.operators, ops):
        mentioned = set().union(*op.values())
        for atom in _fitting_atoms(domain, source):
            if atom in mentioned:
                continue
            if rng.chance(percent):
                slot = targets[rng.below(3)]
                op[slot] = op[slot] | {atom}
                mentioned.add(atom)


def degrade(domain: IncompleteDomain, spec: DegradeSpec) -> IncompleteDomain:
    if not domain.is_complete():
        raise ValueError("degrade expects a complete domain (no possible literals)")
    rng = SplitMix64(spec.seed)
    ops = _step_move(domain, spec.percent, rng)
    if spec.variant in (Variant.S12, Variant.S123):
        _step_deletes(ops, spec.percent, rng)
    if spec.variant is Variant.S123:
        _step_extra(domain, ops, spec.percent, rng)
    operators = tuple(
        replace(src, **{k: frozenset(v) for k, v in op.items()})
        for src, op in zip(domain.operators, ops)
    )
    for op in operators:
        problems = op.check()
        if problems:  # pragma: no cover - guarded by construction
            raise AssertionError("; ".join(problems))
    return replace(domain, operators=operators)


def derive_seed(seed: int, percent: int) -> int:
    """Seed for one percentage of a suite: first SplitMix64 output of ``seed ^ percent``."""
    return SplitMix64(seed ^ percent).next_u64()


def suite_filename(name: str, percent: int, variant: Variant, draw: int | None = None) -> str:
    suffix = "" if draw is None else f"-d{draw}"
    return f"{name}-incomplete-{percent}-{variant.value}{suffix}.pddl"


def degrade_suite(domain: IncompleteDomain, out_dir, seeds=(0,), percents=(20, 40, 60, 80),
                  variants=tuple(Variant)) -> list[Path]:
    """Write one degraded domain per (seed, percent, variant); return the paths.

    With several seeds each one is a separate draw and file names gain a
    ``-d<k>`` suffix.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    seeds = list(seeds)
    paths = []
    for k, seed in enumerate(seeds):
        draw = k if len(seeds) > 1 else None
        for percent in percents:
            for variant in variants:
                spec = DegradeSpec(percent, derive_seed(seed, percent), variant)
                path = out_dir / suite_filename(domain.name, percent, variant, draw)
                path.write_text(serialize_domain(degrade(domain, spec)), encoding="utf-8")
                paths.append(path)
    return paths
