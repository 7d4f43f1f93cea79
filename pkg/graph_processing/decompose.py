"""
Structural layer for cubic biconnected series-parallel graphs

dmt-steps (double the middle third) and their inverse, validation by
reduction to the dipole D3, terminal selection, splitting into three
dmt-strings, parsing a dmt-string into an expression over K2, and seeded
random instance generators.
"""

from __future__ import annotations

import heapq
import itertools
import logging
from collections import defaultdict, deque
from dataclasses import dataclass
from functools import reduce

import numpy as np

from genus_calculus.pgd import K2_PGD
from genus_calculus.productions import mod_parallel, mod_series
from graph_processing.errors import DmtStringError, GraphValidationError, TerminalError
from graph_processing.multigraph import Edge, Multigraph, block_decomposition

logger = logging.getLogger(__name__)


def dipole(n=3):
    """Two vertices joined by n parallel edges"""
    return Multigraph.from_edge_pairs([(0, 1)] * n)


@dataclass(frozen=True)
class RootedString:
    """Double-rooted graph: univalent roots source and target, every other vertex trivalent"""

    graph: Multigraph
    source: int
    target: int

    def check(self):
        g = self.graph
        if self.source == self.target:
            raise DmtStringError("roots of a string must differ")
        for root in (self.source, self.target):
            if root not in g.incidence or g.degree(root) != 1:
                raise DmtStringError(f"root {root} is not univalent")
        for v in g.vertices:
            if v not in (self.source, self.target) and g.degree(v) != 3:
                raise DmtStringError(f"interior vertex {v} has degree {g.degree(v)}")

    @classmethod
    def k2(cls):
        return cls(dipole(1), 0, 1)


# -- expressions ---------------------------------------------------------------

@dataclass(frozen=True)
class K2Leaf:
    children = ()

    def __str__(self):
        return "K2"


K2 = K2Leaf()


@dataclass(frozen=True)
class ModParallel:
    left: object
    right: object

    @property
    def children(self):
        return (self.left, self.right)

    def __str__(self):
        return fold_expression(self, lambda: "K2", _series_text, lambda a, b: f"({a} |p {b})")


@dataclass(frozen=True)
class ModSeries:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise ValueError("series node needs at least one child")

    def __str__(self):
        return fold_expression(self, lambda: "K2", _series_text, lambda a, b: f"({a} |p {b})")


def _series_text(parts):
    return "(" + " |s ".join(parts) + ")"


D_HAT_2 = ModParallel(K2, K2)


def fold_expression(expr, leaf, series, parallel):
    """Bottom-up fold without recursion; children are visited left to right"""
    values = []
    stack = [(expr, False)]
    while stack:
        node, expanded = stack.pop()
        if isinstance(node, K2Leaf):
            values.append(leaf())
            continue
        if not expanded:
            stack.append((node, True))
            stack.extend((child, False) for child in reversed(node.children))
            continue
        k = len(node.children)
        args = values[-k:]
        del values[-k:]
        if isinstance(node, ModParallel):
            values.append(parallel(*args))
        else:
            values.append(series(args))
    return values[0]


def evaluate(expr, tally=None):
    """pgd of an expression, with pgd(K2) = uu'_0"""
    return fold_expression(
        expr,
        lambda: K2_PGD,
        lambda parts: reduce(lambda a, b: mod_series(a, b, tally), parts),
        lambda a, b: mod_parallel(a, b, tally),
    )


# -- dmt-steps -----------------------------------------------------------------

def apply_tau(g, eid):
    """Trisect edge eid and double its middle third: two new vertices, three new edges"""
    edge = g.edge_by_id[eid]
    x = g.max_vertex() + 1
    y = x + 1
    m = g.max_edge_id()
    edges = [e for e in g.edges if e.eid != eid]
    edges += [Edge(eid, edge.u, x), Edge(m + 1, x, y), Edge(m + 2, x, y), Edge(m + 3, y, edge.v)]
    return Multigraph(g.vertices + (x, y), tuple(edges), g.labels)


@dataclass(frozen=True)
class TauInverseStep:
    u: int
    v: int
    deleted: int
    kept: int
    merged: int
    ends: tuple[int, int]


@dataclass(frozen=True)
class DipoleReduction:
    steps: tuple[TauInverseStep, ...]
    residue: Multigraph
    reason: str | None = None

    @property
    def ok(self):
        return self.reason is None


def _pair(a, b):
    return (a, b) if a < b else (b, a)


def reduce_to_dipole(g):
    """
    Apply inverse dmt-steps, lowest doubled pair first, until none is left.
    Success (the residue is D3) certifies a cubic biconnected series-parallel graph.
    """
    if not g.vertices or any(g.degree(v) != 3 for v in g.vertices):
        return DipoleReduction((), g, "graph is not 3-regular")

    ends = {e.eid: (e.u, e.v) for e in g.edges}
    incident = {v: {e.eid for e in g.incident(v)} for v in g.vertices}
    between = defaultdict(set)
    for e in g.edges:
        between[(e.u, e.v)].add(e.eid)
    heap = [pair for pair, eids in between.items() if len(eids) == 2]
    heapq.heapify(heap)

    steps = []
    reason = None
    while heap:
        pair = heapq.heappop(heap)
        eids = between.get(pair)
        if not eids or len(eids) != 2:
            continue
        u, v = pair
        deleted, kept = sorted(eids)
        (f,) = incident[u] - eids
        (h,) = incident[v] - eids
        a = _other(ends[f], u)
        b = _other(ends[h], v)
        if a == b:
            reason = f"reducing pair {pair} would create a loop at vertex {a}"
            break
        for eid in (deleted, kept, f, h):
            x, y = ends.pop(eid)
            between[_pair(x, y)].discard(eid)
        del between[pair]
        between.pop(_pair(a, u), None)
        between.pop(_pair(b, v), None)
        del incident[u], incident[v]
        merged = min(f, h)
        ends[merged] = _pair(a, b)
        incident[a].discard(f)
        incident[a].add(merged)
        incident[b].discard(h)
        incident[b].add(merged)
        between[_pair(a, b)].add(merged)
        if len(between[_pair(a, b)]) == 2:
            heapq.heappush(heap, _pair(a, b))
        steps.append(TauInverseStep(u, v, deleted, kept, merged, _pair(a, b)))

    residue = Multigraph(tuple(incident), tuple(Edge(eid, x, y) for eid, (x, y) in ends.items()), g.labels)
    if reason is None and not (len(residue.vertices) == 2 and len(residue.edges) == 3):
        reason = (f"stuck after {len(steps)} steps on {len(residue.vertices)} vertices "
                  "with no pair joined by exactly two edges")
    if reason:
        logger.debug("dipole reduction failed: %s", reason)
    return DipoleReduction(tuple(steps), residue, reason)


def _other(pair, v):
    return pair[1] if pair[0] == v else pair[0]


# -- terminals and strands -----------------------------------------------------

def split_into_strands(g, p, q):
    """Split both terminals into three univalent copies; returns the three strands in p-edge order"""
    if p == q:
        raise TerminalError("terminals must differ")
    if p not in g.incidence or q not in g.incidence:
        raise TerminalError(f"terminals {p}, {q} are not both vertices of the graph")
    if g.degree(p) != 3 or g.degree(q) != 3:
        raise TerminalError(f"terminals {p}, {q} are not both trivalent")

    strands = []
    claimed = set()
    for start in g.incident(p):
        if start.eid in claimed:
            raise TerminalError(f"two edges at {p} fall in the same strand")
        piece = _component_edges(g, start, p, {p, q})
        p_count = sum(1 for eid in piece if p in _ends(g, eid))
        q_count = sum(1 for eid in piece if q in _ends(g, eid))
        if p_count != 1 or q_count != 1:
            raise TerminalError(f"strand through edge {start.eid} meets p {p_count} and q {q_count} times")
        claimed |= piece
        strands.append(RootedString(g.edge_subgraph(sorted(piece)), p, q))
    if len(claimed) != len(g.edges):
        raise TerminalError("edges remain outside the three strands")
    return tuple(strands)


def _ends(g, eid):
    edge = g.edge_by_id[eid]
    return (edge.u, edge.v)


def _component_edges(g, start, root, stops, allowed=None):
    """Edge ids reached from edge `start` leaving `root`, never passing through `stops`"""
    piece = {start.eid}
    first = start.other(root)
    if first in stops:
        return piece
    seen = {first}
    queue = deque([first])
    while queue:
        x = queue.popleft()
        for edge in g.incident(x):
            if allowed is not None and edge.eid not in allowed:
                continue
            piece.add(edge.eid)
            w = edge.other(x)
            if w not in stops and w not in seen:
                seen.add(w)
                queue.append(w)
    return piece


def _terminal_candidates(g):
    multiplicity = defaultdict(list)
    for e in g.edges:
        multiplicity[(e.u, e.v)].append(e.eid)
    adjacent = sorted(multiplicity, key=lambda pair: (-len(multiplicity[pair]), multiplicity[pair][0]))
    yield from adjacent
    for pair in itertools.combinations(g.vertices, 2):
        if pair not in multiplicity:
            yield pair


def find_terminals(g):
    """First terminal pair that splits g into three strands; adjacent pairs are tried first"""
    for p, q in _terminal_candidates(g):
        if g.degree(p) != 3 or g.degree(q) != 3:
            continue
        try:
            split_into_strands(g, p, q)
        except TerminalError:
            continue
        logger.debug("terminals %s, %s", p, q)
        return p, q
    raise TerminalError("no vertex pair splits the graph into three strands")


# -- dmt-string parsing --------------------------------------------------------

def _spine_blocks(s):
    """Nontrivial blocks of a string in p-to-q order, each split at its two gates"""
    s.check()
    g = s.graph
    try:
        decomposition = block_decomposition(g)
    except GraphValidationError as exc:
        raise DmtStringError(f"not a dmt-string: {exc}") from exc
    block_of = decomposition.block_of_edge()
    bridges = decomposition.bridges

    (entry,) = g.incident(s.source)
    via = entry.eid
    current = entry.other(s.source)
    covered = 1
    layout = []
    while current != s.target:
        inner = [e for e in g.incident(current) if e.eid != via]
        if any(e.eid in bridges for e in inner):
            raise DmtStringError(f"not a dmt-string: vertex {current} lies between two bridges")
        index = block_of[inner[0].eid]
        block = decomposition.blocks[index]
        gates = [w for w in sorted(decomposition.block_vertices[index])
                 if any(e.eid not in block for e in g.incident(w))]
        if len(gates) != 2 or current not in gates:
            raise DmtStringError(f"not a dmt-string: block at {current} has {len(gates)} gates")
        exit_gate = gates[1] if gates[0] == current else gates[0]
        layout.append(_split_block(g, block, current, exit_gate))
        (leave,) = [e for e in g.incident(exit_gate) if e.eid not in block]
        if leave.eid not in bridges:
            raise DmtStringError(f"not a dmt-string: gate {exit_gate} leaves its block by a non-bridge")
        covered += len(block) + 1
        via = leave.eid
        current = leave.other(exit_gate)
    if covered != len(g.edges):
        raise DmtStringError("not a dmt-string: some blocks hang off the root-to-root spine")
    return layout


def _split_block(g, block, u, v):
    pieces = []
    claimed = set()
    for start in [e for e in g.incident(u) if e.eid in block]:
        if start.eid in claimed:
            raise DmtStringError(f"not a dmt-string: gate {u} has both block edges on one side")
        piece = _component_edges(g, start, u, {u, v}, allowed=block)
        if sum(1 for eid in piece if v in _ends(g, eid)) != 1:
            raise DmtStringError(f"not a dmt-string: side of gate {u} meets gate {v} more than once")
        claimed |= piece
        pieces.append(RootedString(g.edge_subgraph(sorted(piece)), u, v))
    if len(pieces) != 2 or len(claimed) != len(block):
        raise DmtStringError(f"not a dmt-string: block between {u} and {v} does not split in two")
    return tuple(pieces)


def parse_dmt_string(s):
    """Expression over K2 whose evaluation gives the pgd of string s"""
    strings = [s]
    layouts = []
    index = 0
    while index < len(strings):
        current = strings[index]
        if len(current.graph.edges) == 1:
            current.check()
            layouts.append(None)
        else:
            layout = []
            for left, right in _spine_blocks(current):
                layout.append((len(strings), len(strings) + 1))
                strings.extend((left, right))
            layouts.append(layout)
        index += 1

    nodes = [None] * len(strings)
    for index in reversed(range(len(strings))):
        layout = layouts[index]
        if layout is None:
            nodes[index] = K2
            continue
        blocks = [ModParallel(nodes[a], nodes[b]) for a, b in layout]
        nodes[index] = blocks[0] if len(blocks) == 1 else ModSeries(tuple(blocks))
    return nodes[0]


def pgd_of_string(s, tally=None):
    return evaluate(parse_dmt_string(s), tally)


# -- building graphs from expressions ------------------------------------------

def realize(expr):
    """Physical string of an expression, vertex and edge ids allocated left to right"""
    vertex_ids = itertools.count()
    edge_ids = itertools.count()

    def leaf():
        p, q = next(vertex_ids), next(vertex_ids)
        return RootedString(Multigraph((p, q), (Edge(next(edge_ids), p, q),)), p, q)

    def parallel(a, b):
        return _parallel_graph(a, b, vertex_ids, edge_ids)

    return fold_expression(expr, leaf, lambda parts: reduce(_series_graph, parts), parallel)


def _series_graph(a, b):
    (tail,) = a.graph.incident(a.target)
    (head,) = b.graph.incident(b.source)
    x = tail.other(a.target)
    y = head.other(b.source)
    edges = [e for e in a.graph.edges if e.eid != tail.eid]
    edges += [e for e in b.graph.edges if e.eid != head.eid]
    edges.append(Edge(tail.eid, x, y))
    vertices = (set(a.graph.vertices) - {a.target}) | (set(b.graph.vertices) - {b.source})
    return RootedString(Multigraph(tuple(vertices), tuple(edges)), a.source, b.target)


def _parallel_graph(a, b, vertex_ids, edge_ids):
    merged = {b.source: a.source, b.target: a.target}
    edges = list(a.graph.edges)
    edges += [Edge(e.eid, merged.get(e.u, e.u), merged.get(e.v, e.v)) for e in b.graph.edges]
    p, q = next(vertex_ids), next(vertex_ids)
    edges.append(Edge(next(edge_ids), p, a.source))
    edges.append(Edge(next(edge_ids), a.target, q))
    vertices = set(a.graph.vertices) | (set(b.graph.vertices) - {b.source, b.target}) | {p, q}
    return RootedString(Multigraph(tuple(vertices), tuple(edges)), p, q)


def merge_strands(strands):
    """Identify the sources and the targets of the strands; p = 0, q = 1, ids dense in strand order"""
    edges = []
    next_vertex = 2
    for s in strands:
        mapping = {s.source: 0, s.target: 1}
        for v in s.graph.vertices:
            if v not in mapping:
                mapping[v] = next_vertex
                next_vertex += 1
        for e in s.graph.edges:
            edges.append(Edge(len(edges), mapping[e.u], mapping[e.v]))
    return Multigraph(tuple(range(next_vertex)), tuple(edges)), 0, 1


# -- generators ----------------------------------------------------------------

def _tau_on_pairs(pairs, k, n):
    a, b = pairs[k]
    x, y = n, n + 1
    pairs[k] = (a, x)
    pairs.extend([(x, y), (x, y), (b, y)])
    return n + 2


def random_cubic_sp(tau_steps, seed=None):
    """D3 followed by tau_steps dmt-steps on uniformly chosen edges"""
    if tau_steps < 0:
        raise ValueError("tau_steps must be nonnegative")
    rng = np.random.default_rng(seed)
    pairs = [(0, 1)] * 3
    n = 2
    for _ in range(tau_steps):
        n = _tau_on_pairs(pairs, int(rng.integers(len(pairs))), n)
    return Multigraph.from_edge_pairs(pairs, n)


def random_tw2_maxdeg3(block_count, seed=None, max_tau_steps=1, cycle_share=0.25,
                       pendant_paths=1, subdivisions=1):
    """
    Connected graph of treewidth <= 2 and maximum degree <= 3: cubic SP blocks
    and cycles joined by bars, plus pendant paths and subdivided edges

    Args:
        block_count: Number of nontrivial blocks (at least 1)
        seed: Seed for numpy.random.default_rng
        max_tau_steps: Upper bound on dmt-steps per cubic block
        cycle_share: Probability that a block is a plain cycle
        pendant_paths: Pendant paths of one or two edges, hung off vertices of degree <= 2
        subdivisions: Edges subdivided at random once the blocks are placed
    """
    if block_count < 1:
        raise ValueError("block_count must be positive")
    rng = np.random.default_rng(seed)
    pairs = []
    n = 0

    def add_block():
        nonlocal n
        if rng.random() < cycle_share:
            k = int(rng.integers(2, 5))
            block = [(n + i, n + (i + 1) % k) for i in range(k)]
            size = k
        else:
            sub = random_cubic_sp(int(rng.integers(0, max_tau_steps + 1)), int(rng.integers(2 ** 31)))
            block = [(e.u + n, e.v + n) for e in sub.edges]
            size = len(sub.vertices)
        first = len(pairs)
        pairs.extend(block)
        n += size
        return range(first, len(pairs))

    def subdivide(k):
        nonlocal n
        a, b = pairs[k]
        w = n
        n += 1
        pairs[k] = (a, w)
        pairs.append((w, b))
        return w

    def anchor():
        degree = defaultdict(int)
        for a, b in pairs:
            degree[a] += 1
            degree[b] += 1
        low = [v for v in range(n) if degree[v] <= 2]
        if low and rng.random() < 0.5:
            return low[int(rng.integers(len(low)))]
        return subdivide(int(rng.integers(len(pairs))))

    add_block()
    for _ in range(block_count - 1):
        attach = anchor()
        fresh = add_block()
        w = subdivide(fresh[int(rng.integers(len(fresh)))])
        pairs.append((attach, w))
    for _ in range(pendant_paths):
        previous = anchor()
        for _ in range(int(rng.integers(1, 3))):
            pairs.append((previous, n))
            previous = n
            n += 1
    for _ in range(subdivisions):
        subdivide(int(rng.integers(len(pairs))))
    return Multigraph.from_edge_pairs(pairs, n)
