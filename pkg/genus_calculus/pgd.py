"""
Exact genus distributions and partitioned genus distributions
All counts are Python integers; sequences are dense, indexed by genus, and
kept in canonical form with trailing zeros trimmed
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from enum import Enum


def _canonical(values):
    counts = [int(x) for x in values]
    for x in counts:
        if x < 0:
            raise ValueError(f"negative embedding count {x}")
    while counts and counts[-1] == 0:
        counts.pop()
    return tuple(counts)


def _add(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] += x
    return out


def nonzero(seq):
    return [(i, x) for i, x in enumerate(seq) if x]


class Kind(str, Enum):
    """Partial kinds; G is the plain genus count produced by the final closure"""

    UU_DOT = "uu_dot"
    UU_PRIME = "uu_prime"
    SS_DOT = "ss_dot"
    SS_PRIME = "ss_prime"
    DD_DPRIME = "dd_dprime"
    G = "g"


@dataclass(frozen=True)
class GenusDistribution:
    counts: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "counts", _canonical(self.counts))

    @classmethod
    def zero(cls):
        return cls(())

    @classmethod
    def unit(cls):
        """Distribution of a graph with a single embedding, in the sphere"""
        return cls((1,))

    @classmethod
    def from_strings(cls, values):
        return cls(tuple(int(v) for v in values))

    def to_strings(self):
        return [str(x) for x in self.counts]

    def total(self):
        return sum(self.counts)

    def support(self):
        return [i for i, x in enumerate(self.counts) if x]

    def max_genus(self):
        support = self.support()
        return support[-1] if support else None

    def is_interpolating(self):
        """Nonzero genera form a set of consecutive integers"""
        support = self.support()
        return not support or support[-1] - support[0] + 1 == len(support)

    def __getitem__(self, genus):
        return self.counts[genus] if 0 <= genus < len(self.counts) else 0

    def __len__(self):
        return len(self.counts)

    def __str__(self):
        return " ".join(self.to_strings())


def gd_convolve(a, b):
    out = [0] * max(len(a.counts) + len(b.counts) - 1, 0)
    right = nonzero(b.counts)
    for i, x in nonzero(a.counts):
        for j, y in right:
            out[i + j] += x * y
    return GenusDistribution(tuple(out))


def gd_scale(d, factor):
    if factor < 0:
        raise ValueError("scale factor must be nonnegative")
    return GenusDistribution(tuple(factor * x for x in d.counts))


def gd_add(a, b):
    return GenusDistribution(tuple(_add(a.counts, b.counts)))


def gd_shift(d, k):
    if k < 0:
        raise ValueError("genus shift must be nonnegative")
    if not d.counts:
        return d
    return GenusDistribution((0,) * k + d.counts)


class _Partials:
    """Kind-keyed view shared by the two partial families"""

    KINDS = ()

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, _canonical(getattr(self, f.name)))

    @classmethod
    def from_kinds(cls, table):
        return cls(*(tuple(table.get(kind, ())) for kind in cls.KINDS))

    def kinds(self):
        return {kind: getattr(self, kind.value) for kind in self.KINDS}

    def total(self):
        return sum(sum(seq) for seq in self.kinds().values())

    def gd(self):
        out = []
        for seq in self.kinds().values():
            out = _add(out, seq)
        return GenusDistribution(tuple(out))

    def terms(self):
        """Nonzero (kind, genus, count) triples, in kind order then genus order"""
        return [(kind, i, x) for kind, seq in self.kinds().items() for i, x in nonzero(seq)]

    def to_strings(self):
        return {kind.value: [str(x) for x in seq] for kind, seq in self.kinds().items()}

    def __str__(self):
        terms = [f"{x}{kind.value}_{i}" for kind, i, x in self.terms()]
        return " + ".join(terms) if terms else "0"


@dataclass(frozen=True)
class UUPartials(_Partials):
    """pgd of a double-rooted graph whose two roots are univalent"""

    uu_dot: tuple[int, ...] = ()
    uu_prime: tuple[int, ...] = ()

    KINDS = (Kind.UU_DOT, Kind.UU_PRIME)


@dataclass(frozen=True)
class ClosurePartials(_Partials):
    """pgd after the first plain parallel join of two strings"""

    ss_dot: tuple[int, ...] = ()
    ss_prime: tuple[int, ...] = ()
    dd_dprime: tuple[int, ...] = ()

    KINDS = (Kind.SS_DOT, Kind.SS_PRIME, Kind.DD_DPRIME)


# K2 has one embedding, in the sphere, with both ends on its single fb-walk
K2_PGD = UUPartials(uu_prime=(1,))
