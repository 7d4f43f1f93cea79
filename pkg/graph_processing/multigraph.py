"""
Loopless multigraphs
Edge-list I/O, degree bookkeeping, block decomposition, degree-2 smoothing
and the series-parallel reduction test for treewidth <= 2
"""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import networkx as nx

from graph_processing.errors import GraphParseError, GraphValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Edge:
    """Undirected edge with a stable id; endpoints are stored in ascending order"""

    eid: int
    u: int
    v: int

    def __post_init__(self):
        if self.u == self.v:
            raise GraphValidationError(f"edge {self.eid} is a self-loop at vertex {self.u}")
        if self.u > self.v:
            u, v = self.v, self.u
            object.__setattr__(self, "u", u)
            object.__setattr__(self, "v", v)

    def other(self, w):
        if w == self.u:
            return self.v
        if w == self.v:
            return self.u
        raise ValueError(f"vertex {w} is not an endpoint of edge {self.eid}")


@dataclass(frozen=True)
class Multigraph:
    """
    Immutable loopless multigraph.

    Vertices are integers, edges carry ids; parallel edges differ only by id.
    ``labels`` maps vertex ids back to the labels of the source document and
    takes no part in equality.
    """

    vertices: tuple[int, ...]
    edges: tuple[Edge, ...]
    labels: tuple[str, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted(set(self.vertices))))
        object.__setattr__(self, "edges", tuple(sorted(self.edges, key=lambda e: e.eid)))
        known = set(self.vertices)
        seen = set()
        for edge in self.edges:
            if edge.eid in seen:
                raise GraphValidationError(f"duplicate edge id {edge.eid}")
            seen.add(edge.eid)
            if edge.u not in known or edge.v not in known:
                raise GraphValidationError(f"edge {edge.eid} has an endpoint outside the vertex set")

    @classmethod
    def from_edge_pairs(cls, pairs, vertex_count=None, labels=()):
        """Dense graph: vertices 0..n-1, edge ids in input order"""
        pairs = list(pairs)
        if vertex_count is None:
            vertex_count = 1 + max((max(u, v) for u, v in pairs), default=-1)
        edges = tuple(Edge(i, u, v) for i, (u, v) in enumerate(pairs))
        return cls(tuple(range(vertex_count)), edges, tuple(labels))

    @cached_property
    def incidence(self):
        table = {v: [] for v in self.vertices}
        for edge in self.edges:
            table[edge.u].append(edge)
            table[edge.v].append(edge)
        return {v: tuple(es) for v, es in table.items()}

    @cached_property
    def edge_by_id(self):
        return {edge.eid: edge for edge in self.edges}

    def incident(self, v):
        return self.incidence[v]

    def degree(self, v):
        return len(self.incidence[v])

    def max_degree(self):
        return max((self.degree(v) for v in self.vertices), default=0)

    def degree_histogram(self):
        histogram = {}
        for v in self.vertices:
            d = self.degree(v)
            histogram[d] = histogram.get(d, 0) + 1
        return dict(sorted(histogram.items()))

    def component_count(self):
        if not self.vertices:
            return 0
        return nx.number_connected_components(self.to_networkx())

    def cycle_rank(self):
        return len(self.edges) - len(self.vertices) + self.component_count()

    def rotation_count(self):
        """Number of rotation systems, the product of (deg - 1)! over all vertices"""
        return math.prod(math.factorial(max(self.degree(v) - 1, 0)) for v in self.vertices)

    def max_vertex(self):
        return max(self.vertices, default=-1)

    def max_edge_id(self):
        return max((e.eid for e in self.edges), default=-1)

    def label(self, v):
        if 0 <= v < len(self.labels):
            return self.labels[v]
        return str(v)

    def vertex_for_label(self, label):
        for v in self.vertices:
            if self.label(v) == str(label):
                return v
        raise KeyError(label)

    def edge_subgraph(self, eids):
        """Subgraph on the given edge ids and their endpoints"""
        chosen = [self.edge_by_id[eid] for eid in eids]
        vertices = {e.u for e in chosen} | {e.v for e in chosen}
        return Multigraph(tuple(vertices), tuple(chosen), self.labels)

    def to_networkx(self):
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from((e.u, e.v, e.eid) for e in self.edges)
        return graph


@dataclass(frozen=True)
class CycleMarker:
    """Result of smoothing a cycle, which would otherwise leave a loop"""

    length: int


@dataclass(frozen=True)
class BlockDecomposition:
    """
    Biconnected components of a connected multigraph.

    ``blocks`` are edge-id sets ordered by their smallest edge id, ``bridges``
    holds the edge ids of the single-edge blocks.
    """

    blocks: tuple[frozenset, ...]
    block_vertices: tuple[frozenset, ...]
    cut_vertices: frozenset
    bridges: frozenset
    block_cut_tree: nx.Graph = field(compare=False, repr=False)

    def block_of_edge(self):
        return {eid: index for index, block in enumerate(self.blocks) for eid in block}


def parse_graph(text):
    """Parse an edge-list document; labels are remapped to dense ids in order of appearance"""
    ids = {}
    labels = []
    pairs = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphParseError(f"expected two vertex labels, found {len(parts)}", line_number)
        a, b = parts
        if a == b:
            raise GraphParseError(f"self-loop at vertex {a!r}", line_number)
        for label in parts:
            if label not in ids:
                ids[label] = len(labels)
                labels.append(label)
        pairs.append((ids[a], ids[b]))
    if not pairs:
        raise GraphParseError("document contains no edges")
    graph = Multigraph.from_edge_pairs(pairs, len(labels), labels)
    if not is_connected(graph):
        raise GraphValidationError("graph is disconnected")
    logger.debug("parsed %d vertices, %d edges", len(graph.vertices), len(graph.edges))
    return graph


def format_graph(g):
    """Edge-list document for g, one edge per line in edge-id order"""
    return "".join(f"{g.label(e.u)} {g.label(e.v)}\n" for e in g.edges)


def max_degree(g):
    return g.max_degree()


def is_connected(g):
    if not g.vertices:
        return False
    return nx.is_connected(g.to_networkx())


def subdivide_edge(g, eid):
    """Insert a new degree-2 vertex into edge eid; returns the graph and the new vertex"""
    edge = g.edge_by_id[eid]
    w = g.max_vertex() + 1
    edges = [e for e in g.edges if e.eid != eid]
    edges.append(Edge(eid, edge.u, w))
    edges.append(Edge(g.max_edge_id() + 1, w, edge.v))
    return Multigraph(g.vertices + (w,), tuple(edges), g.labels), w


def block_decomposition(g):
    """Biconnected components by an iterative Hopcroft-Tarjan search over edge ids"""
    if not is_connected(g):
        raise GraphValidationError("block decomposition needs a connected graph")
    incidence = g.incidence
    root = g.vertices[0]
    disc = {root: 0}
    low = {root: 0}
    counter = 1
    edge_stack = []
    blocks = []
    stack = [(root, None, iter(incidence[root]))]
    while stack:
        v, via, pending = stack[-1]
        for edge in pending:
            if edge.eid == via:
                continue
            w = edge.other(v)
            if w not in disc:
                disc[w] = low[w] = counter
                counter += 1
                edge_stack.append(edge.eid)
                stack.append((w, edge.eid, iter(incidence[w])))
                break
            if disc[w] < disc[v]:
                low[v] = min(low[v], disc[w])
                edge_stack.append(edge.eid)
        else:
            stack.pop()
            if not stack:
                continue
            parent = stack[-1][0]
            low[parent] = min(low[parent], low[v])
            if low[v] >= disc[parent]:
                block = []
                while True:
                    eid = edge_stack.pop()
                    block.append(eid)
                    if eid == via:
                        break
                blocks.append(frozenset(block))

    blocks.sort(key=min)
    edge_by_id = g.edge_by_id
    block_vertices = []
    membership = {}
    for index, block in enumerate(blocks):
        vertices = set()
        for eid in block:
            vertices.update((edge_by_id[eid].u, edge_by_id[eid].v))
        block_vertices.append(frozenset(vertices))
        for v in vertices:
            membership.setdefault(v, []).append(index)
    cut_vertices = frozenset(v for v, owners in membership.items() if len(owners) > 1)

    tree = nx.Graph()
    tree.add_nodes_from(("block", index) for index in range(len(blocks)))
    for v in sorted(cut_vertices):
        for index in membership[v]:
            tree.add_edge(("cut", v), ("block", index))

    bridges = frozenset(next(iter(block)) for block in blocks if len(block) == 1)
    return BlockDecomposition(tuple(blocks), tuple(block_vertices), cut_vertices, bridges, tree)


def smooth_degree2(g):
    """
    Suppress every degree-2 vertex. A cycle yields a CycleMarker; a merge that
    would close a loop anywhere else is a validation error.
    """
    if not is_connected(g):
        raise GraphValidationError("smoothing needs a connected graph")
    if g.edges and all(g.degree(v) == 2 for v in g.vertices):
        return CycleMarker(len(g.edges))

    ends = {e.eid: (e.u, e.v) for e in g.edges}
    incident = {v: {e.eid for e in g.incident(v)} for v in g.vertices}
    # smoothing never changes the degree of a surviving vertex
    for v in [v for v in g.vertices if g.degree(v) == 2]:
        first, second = sorted(incident[v])
        a = _other_end(ends[first], v)
        b = _other_end(ends[second], v)
        if a == b:
            raise GraphValidationError(f"smoothing vertex {v} would create a loop at {a}", witness=v)
        ends[first] = (a, b)
        del ends[second]
        incident[b].discard(second)
        incident[b].add(first)
        del incident[v]

    edges = tuple(Edge(eid, u, w) for eid, (u, w) in ends.items())
    return Multigraph(tuple(incident), edges, g.labels)


def _other_end(pair, v):
    return pair[1] if pair[0] == v else pair[0]


def is_treewidth_at_most_2(g):
    """
    Series-parallel reduction: collapse parallel edges, suppress degree-2
    vertices, delete degree <= 1 vertices. Succeeds iff no K4 minor exists.
    """
    adjacency = {v: set() for v in g.vertices}
    for edge in g.edges:
        adjacency[edge.u].add(edge.v)
        adjacency[edge.v].add(edge.u)

    queue = deque(v for v in g.vertices if len(adjacency[v]) <= 2)
    while queue:
        v = queue.popleft()
        if v not in adjacency:
            continue
        neighbours = adjacency[v]
        if len(neighbours) > 2:
            continue
        del adjacency[v]
        for w in neighbours:
            adjacency[w].discard(v)
        if len(neighbours) == 2:
            a, b = neighbours
            adjacency[a].add(b)
            adjacency[b].add(a)
        queue.extend(neighbours)

    stuck = [v for v, neighbours in adjacency.items() if neighbours]
    if stuck:
        logger.debug("series-parallel reduction stuck on %d vertices", len(stuck))
    return not stuck
