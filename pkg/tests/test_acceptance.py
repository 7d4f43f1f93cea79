"""
End-to-end agreement between the production calculus and brute-force face
tracing, conservation on every computed instance, and the growth of the
production work with graph size
"""

import logging
import math
import time

import numpy as np
import pytest

from genus_calculus.engine import compute_genus_distribution, gd_cubic_biconnected_sp
from genus_calculus.pgd import ClosurePartials, GenusDistribution, UUPartials
from genus_validation.oracle import DEFAULT_LIMIT, gd_brute_force, rotation_census
from graph_processing.decompose import D_HAT_2, evaluate, random_cubic_sp, random_tw2_maxdeg3

logger = logging.getLogger(__name__)

WORKED_GD = (512, 10752, 68608, 129024, 53248)

TAU_CASES = [(steps, seed) for steps in range(7) for seed in range(30)]


def trivalent_count(g):
    return sum(1 for v in g.vertices if g.degree(v) == 3)


def assert_conserved(g, gd):
    assert gd.total() == 2 ** trivalent_count(g)
    assert gd.is_interpolating()
    assert gd.max_genus() <= g.cycle_rank()


class TestWorkedExample:
    def test_exact_distribution(self, worked_example_file):
        started = time.perf_counter()
        report = compute_genus_distribution(worked_example_file)
        elapsed = time.perf_counter() - started
        assert report.distribution.counts == WORKED_GD
        assert sum(WORKED_GD) == 2 ** 18
        assert elapsed < 1.0

    def test_pinned_partials(self, worked_example):
        g, p, q = worked_example
        report = gd_cubic_biconnected_sp(g, terminals=(p, q))
        n1, n2, n3 = report.strand_pgds
        assert evaluate(D_HAT_2) == UUPartials(uu_dot=(2,), uu_prime=(2,))
        assert n1 == UUPartials((12,), (4,))
        assert n2 == UUPartials((24, 16), (8, 16))
        assert n3 == UUPartials((8, 16), (8, 32))
        assert report.closure == ClosurePartials(
            ss_dot=(0, 288, 192), ss_prime=(0, 192, 256), dd_dprime=(32, 64))

    def test_brute_force_confirms(self, worked_example_file):
        assert gd_brute_force(worked_example_file).counts == WORKED_GD


@pytest.mark.parametrize("steps, seed", TAU_CASES)
def test_cubic_engine_matches_brute_force(steps, seed):
    g = random_cubic_sp(steps, seed=seed)
    assert rotation_census(g) <= 2 ** 14
    computed = gd_cubic_biconnected_sp(g).distribution
    assert computed == gd_brute_force(g)
    assert_conserved(g, computed)


@pytest.mark.parametrize("seed", range(60))
def test_extension_matches_brute_force(seed):
    blocks = 1 + seed % 3
    g = random_tw2_maxdeg3(blocks, seed=seed, max_tau_steps=1,
                           pendant_paths=1 if blocks < 3 else 0, subdivisions=seed % 3)
    assert g.max_degree() <= 3
    assert trivalent_count(g) <= 16
    computed = compute_genus_distribution(g).distribution
    assert computed == gd_brute_force(g, limit=DEFAULT_LIMIT)
    assert_conserved(g, computed)


def test_bridged_dipoles(bridged_dipoles):
    computed = compute_genus_distribution(bridged_dipoles).distribution
    assert computed == GenusDistribution((16, 32, 16))
    assert computed == gd_brute_force(bridged_dipoles)
    assert_conserved(bridged_dipoles, computed)


@pytest.mark.slow
def test_runtime_grows_at_most_quadratically():
    sizes = [500, 1000, 2000]
    runtimes = []
    work = []
    for n in sizes:
        seconds, tallies = [], []
        for seed in range(3):
            g = random_cubic_sp((n - 2) // 2, seed=seed)
            started = time.perf_counter()
            report = gd_cubic_biconnected_sp(g)
            seconds.append(time.perf_counter() - started)
            tallies.append(sum(report.production_applications.values()))
            logger.info("n=%d seed=%d: %.2fs, %d production pairs", n, seed, seconds[-1], tallies[-1])
            assert_conserved(g, report.distribution)
        runtimes.append(np.mean(seconds))
        work.append(np.mean(tallies))
    for smaller, larger in zip(runtimes, runtimes[1:]):
        assert larger / smaller <= 5
    slope = np.polyfit(np.log(sizes), np.log(work), 1)[0]
    assert slope <= math.log2(5)
