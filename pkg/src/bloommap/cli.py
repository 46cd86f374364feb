"""Command line front end.

Subcommands: build (TSV pairs to map file), query, bench (synthetic
workload measurement), bounds (space floor calculator), inspect.  Exit
codes: 0 success, 1 usage problems, 2 data or format problems.  All
diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys

from . import bounds as bounds_mod
from . import harness, mapfile
from .codetree import analytic_error_bounds
from .core import simple_analytic_bounds
from .distribution import load_distribution, new_distribution
from .errors import BloomMapError

__all__ = ["cli_main", "main"]


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; this tool reserves 2 for data
    # problems and reports usage problems with 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _read_pairs_tsv(path: str) -> list[tuple[bytes, bytes]]:
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(
                    f"{path}:{lineno}: expected 'key<TAB>value-label', got {line!r}"
                )
            key, label = parts
            pairs.append((key.encode("utf-8"), label.encode("utf-8")))
    if not pairs:
        raise ValueError(f"{path}: no pairs found")
    return pairs


def _label_text(label: bytes) -> str:
    return label.decode("utf-8", errors="backslashreplace")


def _cmd_build(args) -> int:
    pairs = _read_pairs_tsv(args.input)
    tally: dict[bytes, int] = {}
    for _, label in pairs:
        tally[label] = tally.get(label, 0) + 1
    labels = list(tally)
    dist = new_distribution([tally[lab] for lab in labels], labels)
    bmap = harness.build_variant(pairs, dist, args.epsilon, args.seed, args.variant)
    mapfile.save(bmap, args.out)
    print(
        f"built {bmap.variant} map: n={bmap.n} b={bmap.b} m={bmap.m} "
        f"({bmap.bits_per_key():.2f} bits/key) -> {args.out}"
    )
    return 0


def _cmd_query(args) -> int:
    bmap = mapfile.load(args.mapfile)
    outcome = bmap.query(args.key.encode("utf-8"))
    if outcome.is_bottom:
        print("BOTTOM")
    else:
        print(_label_text(outcome.value))
    if args.probes:
        print(f"probes={outcome.probes} hash_evals={outcome.hash_evals}")
    return 0


def _cmd_bench(args) -> int:
    dist = load_distribution(args.dist)
    spec = harness.PMapSpec(dist=dist, n=args.n, seed=args.seed)
    pairs = harness.generate_pmap(spec)
    if args.discard:
        bmap = harness.build_with_discard(
            pairs, dist, args.epsilon, args.seed, args.variant
        )
    else:
        bmap = harness.build_variant(pairs, dist, args.epsilon, args.seed, args.variant)
    report = harness.measure(bmap, pairs, args.neg_samples, seed=args.seed + 1)
    print(report.to_table())
    print()
    print(bounds_mod.space_report(bmap).to_table())
    return 0


def _cmd_bounds(args) -> int:
    lines = [
        ("fp_only_lower_bpk",
         bounds_mod.lb_false_positive_only(args.epsilon_plus, args.entropy)),
        ("general_lower_bpk",
         bounds_mod.lb_general(args.epsilon_plus, args.epsilon_star,
                               args.epsilon_minus, args.entropy)),
    ]
    if 0.0 < args.epsilon_plus < 1.0:
        lines.append(
            ("symmetric_lower_bpk",
             bounds_mod.lb_symmetric(args.epsilon_plus, args.entropy))
        )
    for name, value in lines:
        print(f"{name}={value:.6g}")
    return 0


def _cmd_inspect(args) -> int:
    bmap = mapfile.load(args.mapfile)
    rows: list[tuple[str, str]] = [
        ("variant", bmap.variant),
        ("n", str(bmap.n)),
        ("b", str(bmap.b)),
        ("m", str(bmap.m)),
        ("epsilon", f"{bmap.epsilon:.6g}"),
        ("master_seed", str(bmap.family.master_seed)),
        ("hash_functions", str(bmap.family.k)),
        ("zero_fraction", f"{bmap.bits.zero_fraction():.6g}"),
    ]
    if bmap.n:
        rows.append(("bits_per_key", f"{bmap.bits_per_key():.4f}"))
    labels = ", ".join(_label_text(lab) for lab in bmap.dist.labels)
    rows.append(("values", labels))
    if bmap.tree is not None:
        depths = ",".join(str(d) for d in bmap.tree.leaf_depths())
        ks = ",".join(str(bmap.tree.nodes[i].k) for i in bmap.tree.leaves)
        rows.append(("leaf_depths", depths))
        rows.append(("leaf_hash_counts", ks))
        fp, mis = analytic_error_bounds(bmap.tree)
    else:
        rows.append(("hash_counts", ",".join(str(k) for k in bmap.simple_ks)))
        fp, mis = simple_analytic_bounds(bmap.simple_ks)
    rows.append(("false_positive_bound", f"{fp:.6g}"))
    rows.append(("max_misassignment_bound", f"{max(mis):.6g}" if mis else "0"))
    width = max(len(name) for name, _ in rows)
    for name, value in rows:
        print(f"{name:<{width}}  {value}")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="bloommap",
        description="Succinct approximate key-value maps over a small value alphabet.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build", help="build a map from key<TAB>label lines")
    p.add_argument("--input", required=True, help="TSV file of key<TAB>value-label")
    p.add_argument("--epsilon", type=float, required=True, help="error budget in (0,1)")
    p.add_argument("--variant", choices=harness.VARIANTS, default="standard")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output map file")
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("query", help="look up one key in a map file")
    p.add_argument("mapfile")
    p.add_argument("--key", required=True)
    p.add_argument("--probes", action="store_true", help="also print probe counts")
    p.set_defaults(func=_cmd_query)

    p = sub.add_parser("bench", help="measure error rates on a synthetic workload")
    p.add_argument("--dist", required=True, help="TSV file of label<TAB>weight")
    p.add_argument("--n", type=int, required=True, help="number of keys to store")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--variant", choices=harness.VARIANTS, default="standard")
    p.add_argument("--neg-samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--discard", action="store_true",
                   help="drop an epsilon fraction of keys per value before building")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("bounds", help="print space floors in bits per key")
    p.add_argument("--epsilon-plus", type=float, required=True,
                   help="false positive budget")
    p.add_argument("--epsilon-star", type=float, default=0.0,
                   help="misassignment budget")
    p.add_argument("--epsilon-minus", type=float, default=0.0,
                   help="false negative budget")
    p.add_argument("--entropy", type=float, default=0.0,
                   help="value distribution entropy in bits")
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("inspect", help="describe a map file")
    p.add_argument("mapfile")
    p.set_defaults(func=_cmd_inspect)

    return parser


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except (BloomMapError, ValueError, OSError) as exc:
        print(f"bloommap: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
