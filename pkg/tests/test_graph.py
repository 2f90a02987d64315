import pytest

from anticross import (
    GraphParseError,
    degenerate_neighbors,
    enumerate_maximal_independent_sets,
    from_edges,
    generate_graph,
    greedy_repair,
    parse_graph,
)
from anticross.graph import Graph

from conftest import maximal_sets_ref, random_graph_stream


class TestParse:
    def test_path_p3(self):
        g = parse_graph("3\n0 1\n1 2")
        assert g.n == 3
        assert g.edges() == [(0, 1), (1, 2)]

    def test_single_node(self):
        g = parse_graph("1")
        assert g.n == 1
        assert g.edge_count == 0

    def test_comments_and_blank_lines(self):
        g = parse_graph("# instance\n3\n\n0 1\n# done\n1 2\n")
        assert g.edges() == [(0, 1), (1, 2)]

    def test_duplicate_edges_collapse(self):
        g = parse_graph("3\n0 1\n1 0\n0 1")
        assert g.edge_count == 1

    def test_self_loop_reports_line(self):
        with pytest.raises(GraphParseError) as err:
            parse_graph("3\n0 0")
        assert err.value.line == 2

    def test_out_of_range_node(self):
        with pytest.raises(GraphParseError):
            parse_graph("3\n0 3")

    def test_node_count_bounds(self):
        with pytest.raises(GraphParseError):
            parse_graph("25\n0 1")
        with pytest.raises(GraphParseError):
            parse_graph("0")

    def test_garbage_line(self):
        with pytest.raises(GraphParseError) as err:
            parse_graph("3\n0 1 2")
        assert err.value.line == 2

    def test_empty_text(self):
        with pytest.raises(GraphParseError):
            parse_graph("")


class TestGenerate:
    def test_complete_triangle(self):
        g = generate_graph("complete", (3,))
        assert g.edge_count == 3

    def test_complete_bipartite(self):
        g = generate_graph("complete_bipartite", (2, 3))
        assert g.n == 5 and g.edge_count == 6

    def test_split_edge_count(self):
        # 7-clique joined to 2 independent nodes: C(7,2) + 14 edges
        g = generate_graph("split", (7, 2))
        assert g.n == 9 and g.edge_count == 35

    def test_cycle_and_empty(self):
        assert generate_graph("cycle", (5,)).edge_count == 5
        assert generate_graph("empty", (4,)).edge_count == 0

    def test_random_gnp_deterministic(self):
        a = generate_graph("random_gnp", (8, 0.5), seed=3)
        b = generate_graph("random_gnp", (8, 0.5), seed=3)
        assert a == b
        c = generate_graph("random_gnp", (8, 0.5), seed=4)
        assert a != c

    def test_random_gnp_requires_seed(self):
        with pytest.raises(ValueError):
            generate_graph("random_gnp", (8, 0.5))

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            generate_graph("split", (0, 2))
        with pytest.raises(ValueError):
            generate_graph("cycle", (2,))
        with pytest.raises(ValueError):
            generate_graph("unknown", (1,))


class TestGraphInvariants:
    def test_asymmetric_adjacency_rejected(self):
        with pytest.raises(ValueError):
            Graph(2, (0b10, 0b00))

    def test_self_loop_rejected(self):
        with pytest.raises(ValueError):
            Graph(1, (0b1,))

    def test_from_edges_out_of_range(self):
        with pytest.raises(ValueError):
            from_edges(2, [(0, 2)])


class TestEnumeration:
    def test_p3(self, p3):
        cat = enumerate_maximal_independent_sets(p3)
        assert cat.sets == (0b010, 0b101)
        assert cat.sizes == (1, 2)
        assert cat.mis_size == 2

    def test_k3_symmetry(self, k3):
        cat = enumerate_maximal_independent_sets(k3)
        assert cat.sets == (0b001, 0b010, 0b100)
        assert cat.mis_size == 1
        assert len(cat.degeneracy_classes) == 1
        assert cat.close_pairs == ((0, 1), (0, 2), (1, 2))

    def test_c5_close_partners(self, c5):
        cat = enumerate_maximal_independent_sets(c5)
        assert maximal_sets_ref(c5) == list(cat.sets)
        assert all(k == 2 for k in cat.sizes)
        for idx in range(len(cat.sets)):
            assert len(cat.close_partners(idx)) == 2

    def test_close_pairs_structure(self):
        stream = random_graph_stream(101, n_lo=3, n_hi=10)
        for _ in range(30):
            g = next(stream)
            cat = enumerate_maximal_independent_sets(g)
            for i, j in cat.close_pairs:
                assert cat.sizes[i] == cat.sizes[j]
                assert (cat.sets[i] ^ cat.sets[j]).bit_count() == 2

    def test_matches_brute_force_scan(self):
        stream = random_graph_stream(7, n_lo=1, n_hi=12, p_lo=0.05, p_hi=0.95)
        for _ in range(60):
            g = next(stream)
            cat = enumerate_maximal_independent_sets(g)
            assert list(cat.sets) == maximal_sets_ref(g)

    def test_single_node(self):
        cat = enumerate_maximal_independent_sets(generate_graph("empty", (1,)))
        assert cat.sets == (0b1,)


class TestDegenerateNeighbors:
    def test_k3(self, k3):
        assert degenerate_neighbors(k3, 0b001) == [0b010, 0b100]

    def test_p3_center_has_none(self, p3):
        # {0} and {2} are independent but not maximal, so not neighbors
        assert degenerate_neighbors(p3, 0b010) == []

    def test_c5_brute_force(self, c5):
        # all remove-one/add-one moves that land on another maximal set
        s = 0b00101  # {0, 2}
        expected = sorted(
            t for t in maximal_sets_ref(c5)
            if t != s and (t ^ s).bit_count() == 2 and t.bit_count() == 2
        )
        assert degenerate_neighbors(c5, s) == expected == [0b01001, 0b10100]

    def test_agrees_with_close_pairs(self):
        stream = random_graph_stream(23, n_lo=3, n_hi=10)
        for _ in range(25):
            g = next(stream)
            cat = enumerate_maximal_independent_sets(g)
            for idx, s in enumerate(cat.sets):
                partners = sorted(cat.sets[j] for j in cat.close_partners(idx))
                assert degenerate_neighbors(g, s) == partners

    def test_rejects_non_maximal(self, p3):
        with pytest.raises(ValueError):
            degenerate_neighbors(p3, 0b001)
        with pytest.raises(ValueError):
            degenerate_neighbors(p3, 0b011)


class TestGreedyRepair:
    def test_p3_full_set(self, p3):
        path = greedy_repair(p3, 2.0, 0b111)
        # removing the middle node clears both violations at once
        assert path.removed == (1,)
        assert path.result == 0b101

    def test_k3_two_removals(self, k3):
        path = greedy_repair(k3, 2.0, 0b111)
        assert len(path.removed) == 2
        assert path.result.bit_count() == 1

    def test_independent_unchanged(self, c5):
        path = greedy_repair(c5, 3.0, 0b00101)
        assert path.states == (0b00101,)
        assert path.removed == ()

    def test_monotone_and_terminal_everywhere(self):
        stream = random_graph_stream(5, n_lo=2, n_hi=7)
        for _ in range(12):
            g = next(stream)
            c = 2.5
            for s in range(1 << g.n):
                path = greedy_repair(g, c, s)
                energies = [c * g.violated_edges(m) for m in path.states]
                assert all(a > b for a, b in zip(energies, energies[1:]))
                assert energies[-1] == 0
