#!/usr/bin/env python3
"""
Genus Distribution CLI
Compute, brute-force check and generate graphs of treewidth <= 2 and maximum degree <= 3
"""

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

import yaml

from genus_calculus.engine import compute_genus_distribution
from genus_validation.oracle import gd_brute_force
from graph_processing.decompose import random_cubic_sp, random_tw2_maxdeg3
from graph_processing.errors import (
    GraphParseError,
    GraphValidationError,
    InvariantViolation,
    OracleLimitExceeded,
    TerminalError,
)
from graph_processing.multigraph import format_graph, parse_graph
from pipeline import __version__

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = Path(__file__).with_name("config.yaml")

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_VALIDATION = 2
EXIT_MISMATCH = 3
EXIT_LIMIT = 4
EXIT_INVARIANT = 5


def load_config(path=None):
    """Load configuration from YAML file"""
    with open(path or DEFAULT_CONFIG, 'r') as f:
        return yaml.safe_load(f)


def read_graph(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise GraphParseError(f"{path} is not UTF-8 text ({exc.reason} at byte {exc.start})") from exc
    return parse_graph(text), hashlib.sha256(text.encode()).hexdigest()


def base_document(mode, graph, digest):
    return {
        "tool": "genus-tw2",
        "version": __version__,
        "mode": mode,
        "input_sha256": digest,
        "vertices": len(graph.vertices),
        "edges": len(graph.edges),
        "genus_distribution": [],
    }


def first_difference(a, b):
    for genus in range(max(len(a), len(b))):
        if a[genus] != b[genus]:
            return genus
    return None


def print_table(title, gd):
    """Genus, count and cumulative share, all in integer arithmetic"""
    total = gd.total()
    print("=" * 60)
    print(title)
    print("=" * 60)
    print(f"{'genus':>6}  {'count':>28}  {'cumulative':>10}")
    print("-" * 60)
    running = 0
    for genus, count in enumerate(gd.counts):
        running += count
        basis_points = running * 10000 // total if total else 0
        print(f"{genus:>6}  {count:>28}  {basis_points // 100:>6}.{basis_points % 100:02d}%")
    print("-" * 60)
    print(f"total embeddings: {total}")
    print(f"distribution: {gd}")


def emit(document, config):
    indent = config.get("output", {}).get("json_indent", 2)
    print(json.dumps(document, indent=indent, sort_keys=True))


def cmd_compute(args, config):
    graph, digest = read_graph(args.file)
    terminals = None
    if args.terminals:
        try:
            terminals = tuple(graph.vertex_for_label(label) for label in args.terminals)
        except KeyError as exc:
            raise TerminalError(f"terminal {exc.args[0]!r} is not a vertex label") from exc
    workers = config.get("engine", {}).get("strand_workers", 1)
    report = compute_genus_distribution(graph, terminals, strand_workers=workers)
    gd = report.distribution

    if args.json:
        document = base_document("compute", graph, digest)
        document["pipeline"] = report.pipeline
        document["genus_distribution"] = gd.to_strings()
        if args.pgd:
            document["partials"] = partials_document(graph, report)
        if args.timings:
            document["timings"] = {phase: round(seconds, 6) for phase, seconds in report.timings.items()}
        emit(document, config)
        return EXIT_OK

    print_table(f"GENUS DISTRIBUTION: {args.file} ({report.pipeline} pipeline)", gd)
    if args.pgd:
        if report.terminals:
            p, q = report.terminals
            print(f"terminals: {graph.label(p)} {graph.label(q)}")
            for i, pgd in enumerate(report.strand_pgds, start=1):
                print(f"strand {i}: {pgd}")
            print(f"closure: {report.closure}")
        for block in report.blocks:
            if block.kind != "vertex":
                print(f"{block.kind} block on {len(block.vertices)} vertices: {block.distribution}")
        if report.blocks:
            print(f"bar scalar: {report.bar_scalar}")
    if args.timings:
        for phase, seconds in report.timings.items():
            print(f"{phase}: {seconds:.4f}s")
    return EXIT_OK


def partials_document(graph, report):
    if report.terminals:
        return {
            "terminals": [graph.label(v) for v in report.terminals],
            "strands": [pgd.to_strings() for pgd in report.strand_pgds],
            "closure": report.closure.to_strings(),
        }
    return {
        "bar_scalar": str(report.bar_scalar),
        "blocks": [
            {"kind": block.kind, "vertices": [graph.label(v) for v in block.vertices],
             "genus_distribution": block.distribution.to_strings()}
            for block in report.blocks if block.kind != "vertex"
        ],
    }


def oracle_options(args, config):
    oracle = config.get("oracle", {})
    return {
        "limit": args.limit if args.limit is not None else oracle.get("limit", 2 ** 20),
        "batch_size": oracle.get("batch_size", 32768),
        "workers": oracle.get("workers", 1),
        "progress": sys.stderr.isatty(),
    }


def cmd_oracle(args, config):
    graph, digest = read_graph(args.file)
    gd = gd_brute_force(graph, **oracle_options(args, config))
    if args.json:
        document = base_document("oracle", graph, digest)
        document["genus_distribution"] = gd.to_strings()
        emit(document, config)
    else:
        print_table(f"BRUTE-FORCE GENUS DISTRIBUTION: {args.file}", gd)
    return EXIT_OK


def cmd_check(args, config):
    graph, digest = read_graph(args.file)
    expected = gd_brute_force(graph, **oracle_options(args, config))
    workers = config.get("engine", {}).get("strand_workers", 1)
    computed = compute_genus_distribution(graph, strand_workers=workers).distribution
    difference = first_difference(computed, expected)
    verdict = "MATCH" if difference is None else "MISMATCH"

    if args.json:
        document = base_document("check", graph, digest)
        document["genus_distribution"] = computed.to_strings()
        document["oracle_distribution"] = expected.to_strings()
        document["verdict"] = verdict
        document["first_difference"] = difference
        emit(document, config)
    else:
        print(f"engine: {computed}")
        print(f"oracle: {expected}")
        if difference is None:
            print(f"✅ {verdict}")
        else:
            print(f"❌ {verdict} at genus {difference}: "
                  f"engine {computed[difference]}, oracle {expected[difference]}")
    return EXIT_OK if difference is None else EXIT_MISMATCH


def cmd_generate(args, config):
    defaults = config.get("generate", {})
    tau_steps = args.tau_steps if args.tau_steps is not None else defaults.get("tau_steps", 8)
    seed = args.seed if args.seed is not None else defaults.get("seed", 42)
    if tau_steps < 0:
        raise GraphValidationError("tau steps must be nonnegative")
    if args.blocks is not None and args.blocks < 1:
        raise GraphValidationError("block count must be positive")
    if args.blocks is not None:
        graph = random_tw2_maxdeg3(args.blocks, seed, max_tau_steps=tau_steps)
    else:
        graph = random_cubic_sp(tau_steps, seed)
    sys.stdout.write(format_graph(graph))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="genus_cli",
        description="Exact genus distributions of graphs with treewidth <= 2 and maximum degree <= 3.")
    parser.add_argument('--config', default=None, help='Path to config YAML (default: pipeline/config.yaml)')
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    compute = commands.add_parser("compute", help="Genus distribution by the production calculus")
    compute.add_argument("file", help="Edge-list file")
    compute.add_argument("--terminals", nargs=2, metavar=("P", "Q"), help="Terminal vertex labels (cubic graphs)")
    compute.add_argument("--pgd", action="store_true",
                         help="Also report strand pgds or block distributions "
                              "(strand pgds depend on the terminals; pin them with --terminals)")
    compute.add_argument("--json", action="store_true", help="Emit the JSON document")
    compute.add_argument("--timings", action="store_true", help="Report per-phase timings")
    compute.set_defaults(handler=cmd_compute)

    for name, handler, text in (("oracle", cmd_oracle, "Brute-force genus distribution"),
                                ("check", cmd_check, "Compare the engine with the brute force")):
        sub = commands.add_parser(name, help=text)
        sub.add_argument("file", help="Edge-list file")
        sub.add_argument("--limit", type=int, default=None, help="Maximum number of rotation systems")
        sub.add_argument("--json", action="store_true", help="Emit the JSON document")
        sub.set_defaults(handler=handler)

    generate = commands.add_parser("generate", help="Print a random edge-list document")
    generate.add_argument("--tau-steps", type=int, default=None, help="dmt-steps applied to D3 (per block with --blocks)")
    generate.add_argument("--seed", type=int, default=None, help="Random seed")
    generate.add_argument("--blocks", type=int, default=None, help="Build a mixed-degree graph from this many blocks")
    generate.set_defaults(handler=cmd_generate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
    except (OSError, yaml.YAMLError) as exc:
        print(f"❌ Cannot read config: {exc}", file=sys.stderr)
        return EXIT_PARSE
    logging.basicConfig(
        level=config.get("logging", {}).get("level", "WARNING"),
        format=config.get("logging", {}).get("format", "%(levelname)s %(name)s: %(message)s"),
    )

    try:
        return args.handler(args, config)
    except (GraphParseError, OSError) as exc:
        print(f"❌ Parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except GraphValidationError as exc:
        print(f"❌ Validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OracleLimitExceeded as exc:
        print(f"❌ Oracle limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except InvariantViolation as exc:
        logger.exception("internal invariant violated")
        print(f"❌ Internal error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
