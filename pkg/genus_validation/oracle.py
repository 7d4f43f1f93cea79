"""
Brute-force genus distribution by the Heffter-Edmonds face-tracing method

Dart 2i is the end of the i-th edge (in edge-id order) at its lower endpoint,
dart 2i + 1 the end at its higher endpoint, so the partner of dart d is d ^ 1.
A rotation system gives each vertex a cyclic order of its darts; faces are the
orbits of d -> successor(partner(d)).
"""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from tqdm import tqdm

from genus_calculus.pgd import GenusDistribution
from graph_processing.errors import GraphValidationError, InvariantViolation, OracleLimitExceeded

logger = logging.getLogger(__name__)

DEFAULT_LIMIT = 2 ** 20
DEFAULT_BATCH_SIZE = 32768


def darts_at(g):
    """Vertex -> its darts in ascending order"""
    table = {v: [] for v in g.vertices}
    for i, edge in enumerate(g.edges):
        table[edge.u].append(2 * i)
        table[edge.v].append(2 * i + 1)
    return table


def rotation_census(g):
    return g.rotation_count()


@dataclass(frozen=True)
class RotationSystem:
    """Cyclic dart order at every vertex"""

    rotations: dict

    def check(self, g):
        expected = darts_at(g)
        if set(self.rotations) != set(expected):
            raise GraphValidationError("rotation system does not cover the vertex set")
        for v, darts in expected.items():
            if sorted(self.rotations[v]) != darts:
                raise GraphValidationError(f"rotation at vertex {v} is not a cyclic order of its darts")

    def successor(self):
        succ = {}
        for order in self.rotations.values():
            for i, dart in enumerate(order):
                succ[dart] = order[(i + 1) % len(order)]
        return succ


def trace_faces(g, rot):
    succ = rot.successor()
    seen = set()
    faces = sum(1 for v in g.vertices if g.degree(v) == 0)
    for start in range(2 * len(g.edges)):
        if start in seen:
            continue
        faces += 1
        dart = start
        while dart not in seen:
            seen.add(dart)
            dart = succ[dart ^ 1]
    return faces


def embedding_genus(g, rot):
    """Genus from the Euler characteristic, summed over components"""
    numerator = 2 * g.component_count() - len(g.vertices) + len(g.edges) - trace_faces(g, rot)
    if numerator < 0 or numerator % 2:
        raise InvariantViolation(f"Euler characteristic gives a non-integral genus {numerator}/2")
    return numerator // 2


def _option_tables(g):
    """Per vertex: its darts and every rotation with the first dart pinned, as successor rows"""
    tables = []
    for v, darts in darts_at(g).items():
        if not darts:
            continue
        anchor, rest = darts[0], darts[1:]
        rows = []
        for tail in itertools.permutations(rest):
            order = (anchor,) + tail
            succ = dict(zip(order, order[1:] + order[:1]))
            rows.append([succ[d] for d in darts])
        tables.append((v, np.asarray(darts, dtype=np.int64), np.asarray(rows, dtype=np.int64)))
    return tables


def rotation_system_at(g, index):
    """Rotation system number `index` in the odometer order the enumeration uses"""
    census = rotation_census(g)
    if not 0 <= index < census:
        raise ValueError(f"index {index} outside 0..{census - 1}")
    rotations = {v: () for v in g.vertices}
    stride = 1
    for v, darts, rows in _option_tables(g):
        choice = (index // stride) % len(rows)
        stride *= len(rows)
        succ = dict(zip(darts.tolist(), rows[choice].tolist()))
        order = [int(darts[0])]
        while len(order) < len(darts):
            order.append(succ[order[-1]])
        rotations[v] = tuple(order)
    return RotationSystem(rotations)


class _BatchTracer:
    """Traces faces of a contiguous range of rotation systems with numpy"""

    def __init__(self, g):
        self.dart_count = 2 * len(g.edges)
        self.tables = _option_tables(g)
        self.strides = []
        stride = 1
        for _, _, rows in self.tables:
            self.strides.append(stride)
            stride *= len(rows)
        self.partner = np.arange(self.dart_count) ^ 1
        self.rounds = max(1, math.ceil(math.log2(max(self.dart_count, 2))))
        isolated = sum(1 for v in g.vertices if g.degree(v) == 0)
        self.euler = 2 * g.component_count() - len(g.vertices) + len(g.edges) - isolated
        self.bins = g.cycle_rank() + 1

    def __call__(self, bounds):
        start, stop = bounds
        index = np.arange(start, stop, dtype=np.int64)
        succ = np.empty((len(index), self.dart_count), dtype=np.int64)
        for (_, darts, rows), stride in zip(self.tables, self.strides):
            choice = (index // stride) % len(rows)
            succ[:, darts] = rows[choice]
        step = succ[:, self.partner]
        # pointer jumping: after r rounds each dart holds the least dart within 2^r steps
        least = np.broadcast_to(np.arange(self.dart_count), step.shape).copy()
        for _ in range(self.rounds):
            least = np.minimum(least, np.take_along_axis(least, step, axis=1))
            step = np.take_along_axis(step, step, axis=1)
        faces = np.count_nonzero(least == np.arange(self.dart_count), axis=1)
        numerator = self.euler - faces
        if np.any(numerator < 0) or np.any(numerator % 2):
            raise InvariantViolation("Euler characteristic gives a non-integral genus")
        return np.bincount(numerator // 2, minlength=self.bins)


def gd_brute_force(g, limit=DEFAULT_LIMIT, batch_size=DEFAULT_BATCH_SIZE, workers=1, progress=False):
    """
    Enumerate every rotation system (one dart pinned per vertex) and tally genera

    Args:
        g: Connected multigraph; vertex degrees are unrestricted
        limit: Largest rotation-system census accepted before OracleLimitExceeded
        batch_size: Rotation systems traced per numpy batch
        workers: Threads tracing batches concurrently
        progress: Show a tqdm bar over the batches
    """
    census = rotation_census(g)
    if census > limit:
        raise OracleLimitExceeded(census, limit)
    if not g.edges:
        return GenusDistribution((census,))

    tracer = _BatchTracer(g)
    ranges = [(start, min(start + batch_size, census)) for start in range(0, census, batch_size)]
    logger.debug("tracing %d rotation systems in %d batches", census, len(ranges))
    totals = [0] * tracer.bins
    with ThreadPoolExecutor(max_workers=max(workers, 1)) as pool:
        for counts in tqdm(pool.map(tracer, ranges), total=len(ranges), desc="rotation systems",
                           unit="batch", disable=not progress):
            for genus, count in enumerate(counts.tolist()):
                totals[genus] += count
    distribution = GenusDistribution(tuple(totals))
    if distribution.total() != census:
        raise InvariantViolation(f"traced {distribution.total()} embeddings, expected {census}")
    return distribution
