"""
Production calculus on partitioned genus distributions

Every surgical operation is a table of rules. A rule maps one antecedent pair
of partial kinds to a list of (consequent kind, coefficient, genus increment)
and is extended bilinearly over all pairs of nonzero partials.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass

from genus_calculus.pgd import (
    ClosurePartials,
    GenusDistribution,
    Kind,
    UUPartials,
    gd_add,
    gd_convolve,
    gd_scale,
    gd_shift,
)

DOT, PRIME = Kind.UU_DOT, Kind.UU_PRIME
SS_DOT, SS_PRIME, DD = Kind.SS_DOT, Kind.SS_PRIME, Kind.DD_DPRIME


@dataclass(frozen=True)
class ProductionRule:
    left: Kind
    right: Kind
    consequents: tuple[tuple[Kind, int, int], ...]

    def weight(self):
        return sum(coefficient for _, coefficient, _ in self.consequents)


@dataclass(frozen=True)
class ProductionTable:
    name: str
    factor: int
    rules: tuple[ProductionRule, ...]

    def __post_init__(self):
        for rule in self.rules:
            if rule.weight() != self.factor:
                raise ValueError(
                    f"{self.name}: rule {rule.left.value} x {rule.right.value} "
                    f"has weight {rule.weight()}, expected {self.factor}")
            for _, _, increment in rule.consequents:
                if increment not in (0, 1):
                    raise ValueError(f"{self.name}: genus increment {increment} out of range")

    def apply(self, left, right, tally=None):
        """Bilinear extension over nonzero entries; returns kind -> coefficient tuple"""
        left_kinds = left.kinds()
        right_kinds = right.kinds()
        out = defaultdict(GenusDistribution.zero)
        pairs = 0
        for rule in self.rules:
            a = GenusDistribution(left_kinds[rule.left])
            b = GenusDistribution(right_kinds[rule.right])
            pairs += len(a.support()) * len(b.support())
            product = gd_convolve(a, b)
            if not product.counts:
                continue
            for kind, coefficient, increment in rule.consequents:
                out[kind] = gd_add(out[kind], gd_shift(gd_scale(product, coefficient), increment))
        if tally is not None:
            tally[self.name] += pairs
        return {kind: d.counts for kind, d in out.items()}


def _rule(left, right, *consequents):
    return ProductionRule(left, right, tuple(consequents))


MOD_PARALLEL = ProductionTable("mod_parallel", 4, (
    _rule(DOT, DOT, (DOT, 4, 1)),
    _rule(DOT, PRIME, (PRIME, 4, 1)),
    _rule(PRIME, DOT, (PRIME, 4, 1)),
    _rule(PRIME, PRIME, (DOT, 2, 0), (PRIME, 2, 0)),
))

MOD_SERIES = ProductionTable("mod_series", 1, (
    _rule(DOT, DOT, (DOT, 1, 0)),
    _rule(DOT, PRIME, (DOT, 1, 0)),
    _rule(PRIME, DOT, (DOT, 1, 0)),
    _rule(PRIME, PRIME, (PRIME, 1, 0)),
))

JOIN_PARALLEL = ProductionTable("join_parallel", 1, (
    _rule(DOT, DOT, (SS_DOT, 1, 1)),
    _rule(DOT, PRIME, (SS_PRIME, 1, 1)),
    _rule(PRIME, DOT, (SS_PRIME, 1, 1)),
    _rule(PRIME, PRIME, (DD, 1, 0)),
))

CLOSE_PARALLEL = ProductionTable("close_parallel", 4, (
    _rule(DD, DOT, (Kind.G, 4, 1)),
    _rule(DD, PRIME, (Kind.G, 2, 0), (Kind.G, 2, 1)),
    _rule(SS_DOT, DOT, (Kind.G, 4, 1)),
    _rule(SS_DOT, PRIME, (Kind.G, 4, 1)),
    _rule(SS_PRIME, DOT, (Kind.G, 4, 1)),
    _rule(SS_PRIME, PRIME, (Kind.G, 4, 0)),
))

TABLES = (MOD_PARALLEL, MOD_SERIES, JOIN_PARALLEL, CLOSE_PARALLEL)


def mod_parallel(a, b, tally=None):
    """Parallel join of two strings with a spike attached at each merged root"""
    return UUPartials.from_kinds(MOD_PARALLEL.apply(a, b, tally))


def mod_series(a, b, tally=None):
    """Series join of two strings with the merged root smoothed away"""
    return UUPartials.from_kinds(MOD_SERIES.apply(a, b, tally))


def join_parallel(a, b, tally=None):
    """Plain parallel join of two strings; both roots become bivalent"""
    return ClosurePartials.from_kinds(JOIN_PARALLEL.apply(a, b, tally))


def close_parallel(a, b, tally=None):
    """Join the third string onto a two-strand closure; yields the genus distribution"""
    out = CLOSE_PARALLEL.apply(a, b, tally)
    return GenusDistribution(tuple(out.get(Kind.G, ())))
