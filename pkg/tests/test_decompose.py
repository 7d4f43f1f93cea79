import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from genus_calculus.pgd import K2_PGD, UUPartials
from graph_processing.decompose import (
    D_HAT_2,
    K2,
    ModParallel,
    ModSeries,
    RootedString,
    apply_tau,
    dipole,
    evaluate,
    find_terminals,
    merge_strands,
    parse_dmt_string,
    pgd_of_string,
    random_cubic_sp,
    random_tw2_maxdeg3,
    realize,
    reduce_to_dipole,
    split_into_strands,
)
from graph_processing.errors import DmtStringError, TerminalError
from graph_processing.multigraph import Multigraph, is_connected, is_treewidth_at_most_2


def count_parallel_nodes(expr):
    stack, total = [expr], 0
    while stack:
        node = stack.pop()
        total += isinstance(node, ModParallel)
        stack.extend(node.children)
    return total


# series children are always parallel nodes: a K2 or a nested series would be absorbed
canonical_expressions = st.recursive(
    st.just(K2),
    lambda inner: st.one_of(
        st.builds(ModParallel, inner, inner),
        st.lists(st.builds(ModParallel, inner, inner), min_size=2, max_size=3).map(lambda xs: ModSeries(tuple(xs))),
    ),
    max_leaves=12,
)


class TestTau:
    def test_one_step_on_the_dipole(self, d3):
        g = apply_tau(d3, 0)
        assert len(g.vertices) == 4
        assert len(g.edges) == 6
        assert all(g.degree(v) == 3 for v in g.vertices)
        assert {(e.eid, e.u, e.v) for e in g.edges} == {
            (0, 0, 2), (1, 0, 1), (2, 0, 1), (3, 2, 3), (4, 2, 3), (5, 1, 3)}

    def test_generator_matches_repeated_tau(self):
        assert random_cubic_sp(0, seed=9) == dipole(3)
        rng = np.random.default_rng(3)
        expected = dipole(3)
        for _ in range(5):
            expected = apply_tau(expected, expected.edges[int(rng.integers(len(expected.edges)))].eid)
        g = random_cubic_sp(5, seed=3)
        assert g == expected
        assert len(g.vertices) == 12
        assert len(g.edges) == 18
        assert all(g.degree(v) == 3 for v in g.vertices)

    def test_generator_is_deterministic(self):
        assert random_cubic_sp(12, seed=7) == random_cubic_sp(12, seed=7)

    def test_negative_steps(self):
        with pytest.raises(ValueError):
            random_cubic_sp(-1)


class TestReduction:
    @pytest.mark.parametrize("steps", [0, 1, 4, 9, 30])
    def test_generated_graphs_reduce(self, steps):
        reduction = reduce_to_dipole(random_cubic_sp(steps, seed=steps))
        assert reduction.ok
        assert len(reduction.steps) == steps
        assert reduction.residue.vertices == tuple(sorted(reduction.residue.vertices))
        assert len(reduction.residue.edges) == 3

    def test_worked_example_reduces(self, worked_example):
        assert reduce_to_dipole(worked_example[0]).ok

    def test_k4_is_stuck(self, k4):
        reduction = reduce_to_dipole(k4)
        assert not reduction.ok
        assert "stuck" in reduction.reason
        assert reduction.residue == k4

    def test_not_cubic(self):
        reduction = reduce_to_dipole(dipole(2))
        assert not reduction.ok
        assert "3-regular" in reduction.reason

    def test_bridge_makes_a_loop_attempt(self):
        # cubic graph whose two halves meet only through the bridge 8-9
        left = [(0, 1), (0, 1), (0, 2), (2, 3), (2, 3), (3, 8)]
        right = [(4, 5), (4, 5), (4, 6), (6, 7), (6, 7), (7, 9)]
        middle = [(1, 8), (5, 9), (8, 9)]
        g = Multigraph.from_edge_pairs(left + right + middle)
        assert all(g.degree(v) == 3 for v in g.vertices)
        assert not reduce_to_dipole(g).ok


class TestTerminals:
    def test_dipole(self, d3):
        assert find_terminals(d3) == (0, 1)
        strands = split_into_strands(d3, 0, 1)
        assert len(strands) == 3
        assert all(len(s.graph.edges) == 1 for s in strands)

    def test_doubled_pair_comes_first(self, g1):
        p, q = find_terminals(g1)
        assert (p, q) == (0, 1)
        first, second, third = split_into_strands(g1, p, q)
        assert sorted(e.eid for e in first.graph.edges) == [0, 3, 4, 5]
        assert [e.eid for e in second.graph.edges] == [1]
        assert [e.eid for e in third.graph.edges] == [2]

    def test_worked_example_terminals(self, worked_example):
        g, p, q = worked_example
        strands = split_into_strands(g, p, q)
        assert [len(s.graph.edges) for s in strands] == [7, 10, 10]

    def test_k4_has_no_terminals(self, k4):
        with pytest.raises(TerminalError):
            split_into_strands(k4, 0, 1)
        with pytest.raises(TerminalError):
            find_terminals(k4)

    def test_bad_terminal_pairs(self, d3, g1):
        with pytest.raises(TerminalError):
            split_into_strands(d3, 0, 0)
        with pytest.raises(TerminalError):
            split_into_strands(d3, 0, 7)
        with pytest.raises(TerminalError):
            split_into_strands(g1, 0, 3)

    @pytest.mark.parametrize("seed", range(10))
    def test_random_graphs_split(self, seed):
        g = random_cubic_sp(10, seed=seed)
        p, q = find_terminals(g)
        strands = split_into_strands(g, p, q)
        assert sum(len(s.graph.edges) for s in strands) == len(g.edges)
        # every strand carries its own copy of both terminals
        assert sum(len(s.graph.vertices) for s in strands) == len(g.vertices) + 4


class TestParse:
    def test_k2(self):
        assert parse_dmt_string(RootedString.k2()) == K2

    def test_strand_expressions(self, strand_expressions):
        for expr in strand_expressions:
            assert parse_dmt_string(realize(expr)) == expr

    def test_worked_strands(self, worked_example, strand_expressions):
        g, p, q = worked_example
        parsed = tuple(parse_dmt_string(s) for s in split_into_strands(g, p, q))
        assert parsed == strand_expressions

    def test_worked_pgds(self, strand_expressions):
        n1, n2, n3 = strand_expressions
        assert evaluate(D_HAT_2) == UUPartials((2,), (2,))
        assert evaluate(n1) == UUPartials((12,), (4,))
        assert evaluate(n2) == UUPartials((24, 16), (8, 16))
        assert evaluate(n3) == UUPartials((8, 16), (8, 32))
        assert pgd_of_string(realize(n2)) == evaluate(n2)

    def test_expression_text(self, strand_expressions):
        assert str(strand_expressions[1]) == "((K2 |p K2) |s ((K2 |p K2) |p K2))"

    def test_interior_degree_is_checked(self):
        s = RootedString(Multigraph.from_edge_pairs([(0, 2), (2, 1)]), 0, 1)
        with pytest.raises(DmtStringError):
            parse_dmt_string(s)

    def test_k4_minus_edge_is_not_a_string(self):
        g = Multigraph.from_edge_pairs([(4, 0), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (1, 5)])
        with pytest.raises(DmtStringError):
            parse_dmt_string(RootedString(g, 4, 5))

    def test_deep_nesting(self):
        expr = K2
        for _ in range(1200):
            expr = ModParallel(expr, K2)
        s = realize(expr)
        assert str(parse_dmt_string(s)) == str(expr)
        assert evaluate(expr).total() == 4 ** 1200

    @settings(max_examples=200, deadline=None)
    @given(canonical_expressions)
    def test_realize_then_parse(self, expr):
        s = realize(expr)
        s.check()
        assert parse_dmt_string(s) == expr
        assert evaluate(expr).total() == 4 ** count_parallel_nodes(expr)
        assert len(s.graph.vertices) == 2 + 2 * count_parallel_nodes(expr)

    @settings(max_examples=100, deadline=None)
    @given(canonical_expressions)
    def test_series_absorbs_k2(self, expr):
        assert evaluate(ModSeries((K2, expr))) == evaluate(expr)
        assert evaluate(K2) == K2_PGD


class TestMergeStrands:
    def test_worked_example_shape(self, worked_example):
        g, p, q = worked_example
        assert (p, q) == (0, 1)
        assert len(g.vertices) == 18
        assert len(g.edges) == 27
        assert all(g.degree(v) == 3 for v in g.vertices)
        assert [e.eid for e in g.incident(0)] == [2, 9, 25]

    def test_file_matches_rebuilt_graph(self, worked_example, worked_example_file):
        g, _, _ = worked_example
        relabelled = [(int(worked_example_file.label(e.u)), int(worked_example_file.label(e.v)))
                      for e in worked_example_file.edges]
        assert [tuple(sorted(pair)) for pair in relabelled] == [(e.u, e.v) for e in g.edges]

    def test_three_k2_give_the_dipole(self):
        g, _, _ = merge_strands([RootedString.k2()] * 3)
        assert g == dipole(3)


class TestMixedGenerator:
    @pytest.mark.parametrize("seed", range(30))
    def test_class_membership(self, seed):
        g = random_tw2_maxdeg3(1 + seed % 4, seed=seed)
        assert is_connected(g)
        assert g.max_degree() <= 3
        assert is_treewidth_at_most_2(g)

    def test_deterministic(self):
        assert random_tw2_maxdeg3(3, seed=5) == random_tw2_maxdeg3(3, seed=5)

    def test_block_count(self):
        with pytest.raises(ValueError):
            random_tw2_maxdeg3(0)
