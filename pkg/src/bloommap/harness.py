"""Synthetic workloads and empirical error measurement.

Everything here is deterministic given its seed: key generation, value
assignment, discard selection, and negative sampling.  Keys are 16-byte
random strings; negatives are drawn from the same universe and resampled
on the (vanishingly rare) collision with a stored key.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass

from .bounds import space_report
from .core import BloomMap, build_simple, build_tree
from .distribution import ValueDistribution, integer_counts

__all__ = [
    "PMapSpec",
    "ErrorReport",
    "SweepConfig",
    "generate_pmap",
    "measure",
    "build_with_discard",
    "build_variant",
    "sweep",
    "render_table",
    "render_csv",
]

KEY_BYTES = 16
VARIANTS = ("simple", "standard", "fast")


@dataclass(frozen=True)
class PMapSpec:
    """Recipe for a synthetic key-value workload: n keys distributed over
    the values of dist by largest-remainder apportionment."""

    dist: ValueDistribution
    n: int
    seed: int


def generate_pmap(spec: PMapSpec) -> list[tuple[bytes, bytes]]:
    """Materialize the workload: n distinct 16-byte keys, each labelled so
    that value i receives exactly its apportioned count."""
    if spec.n < 1:
        raise ValueError(f"workload needs at least one key, got n={spec.n}")
    counts = integer_counts(spec.dist, spec.n)
    rnd = random.Random(spec.seed)
    seen: set[bytes] = set()
    keys: list[bytes] = []
    while len(keys) < spec.n:
        key = rnd.randbytes(KEY_BYTES)
        if key in seen:
            continue
        seen.add(key)
        keys.append(key)
    labels: list[bytes] = []
    for label, count in zip(spec.dist.labels, counts):
        labels.extend([label] * count)
    rnd.shuffle(labels)
    return list(zip(keys, labels))


def build_variant(pairs, dist: ValueDistribution, epsilon: float, seed: int,
                  variant: str) -> BloomMap:
    """Build any of the named variants from the same pair list."""
    if variant == "simple":
        return build_simple(pairs, dist, epsilon, seed)
    if variant in ("standard", "fast"):
        return build_tree(pairs, dist, epsilon, seed, scheme=variant)
    raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")


def build_with_discard(pairs, dist: ValueDistribution, epsilon: float, seed: int,
                       variant: str = "simple",
                       discard_fraction: float | None = None) -> BloomMap:
    """Build a map that deliberately drops floor(f * count_i) keys of each
    value before storing, trading a bounded false negative rate for a
    proportionally smaller bit array.

    The discard fraction f defaults to the map's epsilon.  Dropped keys
    are chosen by the seed, so the build is reproducible; measure() the
    result against the original pairs to see the induced false negatives.
    """
    if discard_fraction is None:
        discard_fraction = epsilon
    if not (0.0 <= discard_fraction < 1.0):
        raise ValueError(f"discard fraction must lie in [0, 1), got {discard_fraction!r}")
    per_value: dict[bytes, list[int]] = {}
    for pos, (_, label) in enumerate(pairs):
        per_value.setdefault(label, []).append(pos)
    rnd = random.Random(seed)
    dropped: set[int] = set()
    for label in sorted(per_value):
        positions = per_value[label]
        drop = math.floor(discard_fraction * len(positions))
        if drop:
            dropped.update(rnd.sample(positions, drop))
    kept = [pair for pos, pair in enumerate(pairs) if pos not in dropped]
    return build_variant(kept, dist, epsilon, seed, variant)


@dataclass(frozen=True)
class ErrorReport:
    """Measured behaviour of one map against one workload.

    Positive-side rates are per value (misassignment: the map answered,
    but with a different value; false negative: the map answered absent,
    only possible after a discard build).  The negative side aggregates
    fresh never-stored keys.
    """

    false_positive_rate: float
    misassignment_rates: tuple[float, ...]
    false_negative_rates: tuple[float, ...]
    zero_fraction: float
    neg_probe_mean: float
    pos_probe_means: tuple[float, ...]
    pos_counts: tuple[int, ...]
    neg_samples: int

    def to_table(self) -> str:
        rows = [
            ("false_positive_rate", f"{self.false_positive_rate:.6g}"),
            ("zero_fraction", f"{self.zero_fraction:.6g}"),
            ("neg_probe_mean", f"{self.neg_probe_mean:.6g}"),
            ("neg_samples", str(self.neg_samples)),
        ]
        for i, (mis, fn, probes, count) in enumerate(
            zip(self.misassignment_rates, self.false_negative_rates,
                self.pos_probe_means, self.pos_counts)
        ):
            rows.append(
                (f"value[{i}]",
                 f"count={count} misassign={mis:.6g} false_neg={fn:.6g} "
                 f"probe_mean={probes:.6g}")
            )
        width = max(len(name) for name, _ in rows)
        return "\n".join(f"{name:<{width}}  {val}" for name, val in rows)


def measure(bmap: BloomMap, pairs, neg_samples: int, seed: int) -> ErrorReport:
    """Query every stored pair plus neg_samples fresh keys and tally rates.

    neg_samples must be at least 1000; below that the rates are mostly
    noise.
    """
    if neg_samples < 1000:
        raise ValueError(f"need at least 1000 negative samples, got {neg_samples}")
    b = bmap.b
    label_index = {label: i for i, label in enumerate(bmap.dist.labels)}
    counts = [0] * b
    wrong = [0] * b
    bottoms = [0] * b
    probe_sums = [0] * b
    stored = set()
    for key, label in pairs:
        i = label_index[label]
        counts[i] += 1
        stored.add(key)
        out = bmap.query(key)
        probe_sums[i] += out.probes
        if out.is_bottom:
            bottoms[i] += 1
        elif out.value_index != i:
            wrong[i] += 1
    rnd = random.Random(seed)
    hits = 0
    neg_probes = 0
    done = 0
    while done < neg_samples:
        key = rnd.randbytes(KEY_BYTES)
        if key in stored:
            continue
        out = bmap.query(key)
        done += 1
        neg_probes += out.probes
        if not out.is_bottom:
            hits += 1
    return ErrorReport(
        false_positive_rate=hits / neg_samples,
        misassignment_rates=tuple(
            wrong[i] / counts[i] if counts[i] else 0.0 for i in range(b)
        ),
        false_negative_rates=tuple(
            bottoms[i] / counts[i] if counts[i] else 0.0 for i in range(b)
        ),
        zero_fraction=bmap.bits.zero_fraction(),
        neg_probe_mean=neg_probes / neg_samples,
        pos_probe_means=tuple(
            probe_sums[i] / counts[i] if counts[i] else 0.0 for i in range(b)
        ),
        pos_counts=tuple(counts),
        neg_samples=neg_samples,
    )


# -- sweeps -----------------------------------------------------------


@dataclass(frozen=True)
class SweepConfig:
    dist: ValueDistribution
    n: int
    epsilon: float
    variant: str
    seed: int
    neg_samples: int = 10_000
    discard: bool = False


@dataclass(frozen=True)
class SweepRow:
    variant: str
    b: int
    n: int
    epsilon: float
    seed: int
    discard: bool
    m: int
    achieved_bpk: float
    lower_bpk: float
    ratio: float
    false_positive_rate: float
    max_misassignment: float
    max_false_negative: float
    zero_fraction: float
    neg_probe_mean: float
    pos_probe_mean: float

    FIELDS = (
        "variant", "b", "n", "epsilon", "seed", "discard", "m",
        "achieved_bpk", "lower_bpk", "ratio", "false_positive_rate",
        "max_misassignment", "max_false_negative", "zero_fraction",
        "neg_probe_mean", "pos_probe_mean",
    )

    def cells(self) -> list[str]:
        out = []
        for name in self.FIELDS:
            value = getattr(self, name)
            out.append(f"{value:.5g}" if isinstance(value, float) else str(value))
        return out


def sweep(configs) -> list[SweepRow]:
    """Run each configuration end to end: generate, build, measure, and
    summarize one row per config.  Deterministic given the seeds."""
    configs = list(configs)
    if not configs:
        raise ValueError("empty sweep")
    rows = []
    for cfg in configs:
        pairs = generate_pmap(PMapSpec(dist=cfg.dist, n=cfg.n, seed=cfg.seed))
        if cfg.discard:
            bmap = build_with_discard(pairs, cfg.dist, cfg.epsilon, cfg.seed, cfg.variant)
        else:
            bmap = build_variant(pairs, cfg.dist, cfg.epsilon, cfg.seed, cfg.variant)
        report = measure(bmap, pairs, cfg.neg_samples, seed=cfg.seed + 1)
        space = space_report(bmap)
        total_probes = sum(
            mean * count for mean, count in zip(report.pos_probe_means, report.pos_counts)
        )
        total_pos = sum(report.pos_counts)
        rows.append(SweepRow(
            variant=cfg.variant,
            b=cfg.dist.b,
            n=cfg.n,
            epsilon=cfg.epsilon,
            seed=cfg.seed,
            discard=cfg.discard,
            m=bmap.m,
            achieved_bpk=space.achieved_bpk,
            lower_bpk=space.symmetric_lower_bpk,
            ratio=space.ratio,
            false_positive_rate=report.false_positive_rate,
            max_misassignment=max(report.misassignment_rates),
            max_false_negative=max(report.false_negative_rates),
            zero_fraction=report.zero_fraction,
            neg_probe_mean=report.neg_probe_mean,
            pos_probe_mean=total_probes / total_pos if total_pos else 0.0,
        ))
    return rows


def render_table(rows) -> str:
    """Aligned text table, one sweep row per line."""
    header = list(SweepRow.FIELDS)
    body = [row.cells() for row in rows]
    widths = [
        max(len(header[c]), *(len(line[c]) for line in body)) if body else len(header[c])
        for c in range(len(header))
    ]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format(*header)]
    lines.extend(fmt.format(*line) for line in body)
    return "\n".join(lines)


def render_csv(rows) -> str:
    """The same rows as CSV with a header line."""
    sink = io.StringIO()
    writer = csv.writer(sink)
    writer.writerow(SweepRow.FIELDS)
    for row in rows:
        writer.writerow([getattr(row, name) for name in SweepRow.FIELDS])
    return sink.getvalue()
