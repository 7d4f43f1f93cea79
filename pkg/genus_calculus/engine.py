"""
Genus distribution of cubic biconnected series-parallel graphs, and of
connected graphs with treewidth <= 2 and maximum degree <= 3 by block
decomposition, smoothing and bar-amalgamation
"""

from __future__ import annotations

import logging
from collections import Counter, deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from time import perf_counter

from genus_calculus.pgd import ClosurePartials, GenusDistribution, gd_convolve, gd_scale
from genus_calculus.productions import close_parallel, join_parallel
from graph_processing.decompose import find_terminals, pgd_of_string, reduce_to_dipole, split_into_strands
from graph_processing.errors import GraphValidationError, InvariantViolation
from graph_processing.multigraph import (
    CycleMarker,
    block_decomposition,
    is_connected,
    is_treewidth_at_most_2,
    smooth_degree2,
)

logger = logging.getLogger(__name__)


@dataclass
class BlockReport:
    """One piece of the bar assembly: a nontrivial block or a lone vertex"""

    kind: str
    vertices: tuple[int, ...]
    distribution: GenusDistribution
    smoothed_vertex_count: int = 0
    terminals: tuple[int, int] | None = None


@dataclass
class ComputationReport:
    vertex_count: int
    edge_count: int
    degree_histogram: dict
    distribution: GenusDistribution
    pipeline: str
    terminals: tuple[int, int] | None = None
    strand_pgds: tuple = ()
    closure: ClosurePartials | None = None
    blocks: tuple[BlockReport, ...] = ()
    bar_scalar: int = 1
    production_applications: Counter = field(default_factory=Counter)
    timings: dict = field(default_factory=dict)


def check_distribution(g, gd):
    """Run-time conservation checks; a failure here is a bug in the calculus"""
    expected = g.rotation_count()
    if gd.total() != expected:
        raise InvariantViolation(f"embedding total {gd.total()} differs from the rotation census {expected}")
    if not gd.is_interpolating():
        raise InvariantViolation(f"genus support {gd.support()} is not an interval")
    beta = g.cycle_rank()
    if gd.max_genus() is not None and gd.max_genus() > beta:
        raise InvariantViolation(f"maximum genus {gd.max_genus()} exceeds the cycle rank {beta}")


def _validate_cubic_sp(g):
    if not g.vertices or any(g.degree(v) != 3 for v in g.vertices):
        histogram = g.degree_histogram()
        raise GraphValidationError(f"graph is not cubic (degree histogram {histogram})")
    reduction = reduce_to_dipole(g)
    if not reduction.ok:
        raise GraphValidationError(
            f"not a cubic biconnected series-parallel graph: {reduction.reason}",
            witness=reduction.residue,
        )
    return reduction


def gd_cubic_biconnected_sp(g, terminals=None, strand_workers=1):
    """Terminals, three strands, their pgds, then the two closing productions"""
    timings = {}
    tally = Counter()
    started = perf_counter()
    reduction = _validate_cubic_sp(g)
    timings["validate"] = perf_counter() - started
    logger.debug("reduced to the dipole in %d steps", len(reduction.steps))

    started = perf_counter()
    if terminals is None:
        terminals = find_terminals(g)
    p, q = terminals
    strands = split_into_strands(g, p, q)
    timings["split"] = perf_counter() - started

    started = perf_counter()

    def strand_pgd(strand):
        own = Counter()
        return pgd_of_string(strand, own), own

    if strand_workers > 1:
        with ThreadPoolExecutor(max_workers=strand_workers) as pool:
            results = list(pool.map(strand_pgd, strands))
    else:
        results = [strand_pgd(strand) for strand in strands]
    for _, own in results:
        tally.update(own)
    pgds = tuple(pgd for pgd, _ in results)
    timings["strands"] = perf_counter() - started

    started = perf_counter()
    closure = join_parallel(pgds[0], pgds[1], tally)
    distribution = close_parallel(closure, pgds[2], tally)
    timings["close"] = perf_counter() - started

    check_distribution(g, distribution)
    logger.info("cubic graph on %d vertices: genus distribution %s", len(g.vertices), distribution)
    return ComputationReport(
        vertex_count=len(g.vertices),
        edge_count=len(g.edges),
        degree_histogram=g.degree_histogram(),
        distribution=distribution,
        pipeline="cubic",
        terminals=(p, q),
        strand_pgds=pgds,
        closure=closure,
        production_applications=tally,
        timings=timings,
    )


def _validate_tw2_maxdeg3(g):
    if not is_connected(g):
        raise GraphValidationError("graph is disconnected")
    for v in g.vertices:
        if g.degree(v) > 3:
            raise GraphValidationError(f"vertex {g.label(v)} has degree {g.degree(v)} > 3", witness=v)
    if not is_treewidth_at_most_2(g):
        raise GraphValidationError("graph has a K4 minor (treewidth > 2)")


def _block_piece(g, block, tally, timings):
    subgraph = g.edge_subgraph(sorted(block))
    smoothed = smooth_degree2(subgraph)
    vertices = subgraph.vertices
    if isinstance(smoothed, CycleMarker):
        return BlockReport("cycle", vertices, GenusDistribution.unit())
    try:
        report = gd_cubic_biconnected_sp(smoothed)
    except GraphValidationError as exc:
        raise InvariantViolation(f"block on vertices {vertices[:8]} smoothed to an invalid graph: {exc}") from exc
    tally.update(report.production_applications)
    for phase, seconds in report.timings.items():
        timings[phase] = timings.get(phase, 0.0) + seconds
    return BlockReport("cubic", vertices, report.distribution, len(smoothed.vertices), report.terminals)


def gd_treewidth2_maxdeg3(g, root=None):
    """
    Every nontrivial block is smoothed and solved on its own; the pieces are
    then joined bar by bar in breadth-first order from the piece holding `root`,
    each bar scaling the convolution by the degrees of its ends at that moment.
    """
    timings = {}
    tally = Counter()
    started = perf_counter()
    _validate_tw2_maxdeg3(g)
    decomposition = block_decomposition(g)
    timings["validate"] = perf_counter() - started

    bridges = decomposition.bridges
    pieces = []
    piece_of = {}
    for block, vertices in zip(decomposition.blocks, decomposition.block_vertices):
        if len(block) == 1:
            continue
        for v in vertices:
            piece_of[v] = len(pieces)
        pieces.append(_block_piece(g, block, tally, timings))
    for v in g.vertices:
        if v not in piece_of:
            piece_of[v] = len(pieces)
            pieces.append(BlockReport("vertex", (v,), GenusDistribution.unit()))

    piece_degree = {v: sum(1 for e in g.incident(v) if e.eid not in bridges) for v in g.vertices}

    started = perf_counter()
    if root is None:
        root = g.vertices[0]
    elif root not in piece_of:
        raise GraphValidationError(f"root {root} is not a vertex of the graph")
    first = piece_of[root]
    assembled = {first}
    degree = {v: piece_degree[v] for v in pieces[first].vertices}
    product = pieces[first].distribution
    scalar = 1
    queue = deque([first])
    while queue:
        index = queue.popleft()
        for x in pieces[index].vertices:
            for edge in g.incident(x):
                if edge.eid not in bridges:
                    continue
                y = edge.other(x)
                other = piece_of[y]
                if other in assembled:
                    continue
                scalar *= max(degree[x], 1) * max(piece_degree[y], 1)
                for w in pieces[other].vertices:
                    degree[w] = piece_degree[w]
                degree[x] += 1
                degree[y] += 1
                product = gd_convolve(product, pieces[other].distribution)
                assembled.add(other)
                queue.append(other)
    if len(assembled) != len(pieces):
        raise InvariantViolation("bar assembly did not reach every piece")
    distribution = gd_scale(product, scalar)
    timings["assemble"] = perf_counter() - started

    check_distribution(g, distribution)
    logger.info("%d pieces, bar scalar %d: genus distribution %s", len(pieces), scalar, distribution)
    return ComputationReport(
        vertex_count=len(g.vertices),
        edge_count=len(g.edges),
        degree_histogram=g.degree_histogram(),
        distribution=distribution,
        pipeline="extension",
        blocks=tuple(pieces),
        bar_scalar=scalar,
        production_applications=tally,
        timings=timings,
    )


def compute_genus_distribution(g, terminals=None, strand_workers=1, root=None):
    """
    Cubic graphs with a single block go straight to the strand calculus,
    everything else through the block pipeline

    Args:
        g: Connected multigraph of treewidth <= 2 and maximum degree <= 3
        terminals: Optional (p, q) pair; only valid for a cubic single-block graph
        strand_workers: Threads evaluating the three strand pgds
        root: Vertex the block assembly starts from (block pipeline only)
    """
    if not is_connected(g):
        raise GraphValidationError("graph is disconnected")
    cubic = bool(g.edges) and all(g.degree(v) == 3 for v in g.vertices)
    if cubic and len(block_decomposition(g).blocks) == 1:
        return gd_cubic_biconnected_sp(g, terminals, strand_workers)
    if terminals is not None:
        raise GraphValidationError("terminals apply only to cubic biconnected graphs")
    return gd_treewidth2_maxdeg3(g, root)
