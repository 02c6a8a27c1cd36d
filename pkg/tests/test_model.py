import json

import pytest
from hypothesis import given, strategies as st

from mmreg import (
    Bag,
    Graph,
    ModelError,
    access_maps,
    bag_of,
    graph_square,
    induce_uniform,
    make_spec,
    normalize_bag,
)
from mmreg.model import dump_spec, load_spec, spec_from_dict, spec_to_dict


def small_bags():
    return st.integers(1, 6).flatmap(
        lambda n: st.lists(
            st.sets(st.integers(1, n), min_size=1), max_size=6
        ).map(lambda sets: bag_of(n, *sets))
    )


def small_graphs():
    def build(n, pairs):
        return Graph.from_edges(n, [(u, v) for u, v in pairs if u != v and u <= n and v <= n])

    return st.integers(1, 7).flatmap(
        lambda n: st.lists(
            st.tuples(st.integers(1, n), st.integers(1, n)), max_size=10
        ).map(lambda pairs: build(n, pairs))
    )


class TestBag:
    def test_rejects_empty_set(self):
        with pytest.raises(ModelError):
            bag_of(3, [1, 2], [])

    def test_rejects_out_of_range_member(self):
        with pytest.raises(ModelError):
            bag_of(2, [1, 3])

    def test_keeps_duplicates_and_order(self):
        bag = bag_of(3, [1, 2], [1, 2], [3])
        assert bag.m == 3
        assert bag.sets[0] == bag.sets[1]


class TestNormalize:
    def test_adds_missing_singleton(self):
        bag = normalize_bag(bag_of(3, [1, 2]))
        assert [sorted(s) for s in bag.sets] == [[1, 2], [3]]

    def test_already_covered_unchanged(self):
        bag = bag_of(2, [1], [2])
        assert normalize_bag(bag) is bag

    def test_empty_bag_becomes_pure_message_passing(self):
        bag = normalize_bag(Bag(5, ()))
        assert [sorted(s) for s in bag.sets] == [[1], [2], [3], [4], [5]]

    @given(small_bags())
    def test_idempotent(self, bag):
        once = normalize_bag(bag)
        assert normalize_bag(once) == once

    @given(small_bags())
    def test_result_covers_every_process(self, bag):
        assert normalize_bag(bag).covered()


class TestInduceUniform:
    def test_fig1_sets(self, fig1_graph):
        bag = induce_uniform(fig1_graph)
        assert [sorted(s) for s in bag.sets] == [
            [1, 2],
            [1, 2, 3],
            [2, 3, 4, 5],
            [3, 4, 5],
            [3, 4, 5],
        ]

    def test_edgeless(self):
        bag = induce_uniform(Graph.from_edges(3, []))
        assert [sorted(s) for s in bag.sets] == [[1], [2], [3]]

    def test_complete_k3(self):
        bag = induce_uniform(Graph.from_edges(3, [(1, 2), (1, 3), (2, 3)]))
        assert all(sorted(s) == [1, 2, 3] for s in bag.sets)
        assert bag.m == 3

    @given(small_graphs())
    def test_always_covered_with_n_sets(self, g):
        bag = induce_uniform(g)
        assert bag.covered()
        assert bag.m == g.n
        for p in range(1, g.n + 1):
            assert p in bag.sets[p - 1]


def naive_square(g: Graph) -> set:
    """Independent oracle: distance-2 closure via explicit path search."""
    edges = set()
    for u in range(1, g.n + 1):
        for v in range(u + 1, g.n + 1):
            if (u, v) in g.edges:
                edges.add((u, v))
                continue
            for k in range(1, g.n + 1):
                if (min(u, k), max(u, k)) in g.edges and (min(k, v), max(k, v)) in g.edges:
                    edges.add((u, v))
                    break
    return edges


class TestGraphSquare:
    def test_path(self):
        g2 = graph_square(Graph.from_edges(3, [(1, 2), (2, 3)]))
        assert sorted(g2.edges) == [(1, 2), (1, 3), (2, 3)]

    def test_fig1(self, fig1_graph):
        g2 = graph_square(fig1_graph)
        assert set(g2.edges) == naive_square(fig1_graph)
        non_edges = {
            (u, v)
            for u in range(1, 6)
            for v in range(u + 1, 6)
            if (u, v) not in g2.edges
        }
        assert non_edges == {(1, 4), (1, 5)}

    def test_edgeless(self):
        g = Graph.from_edges(4, [])
        assert graph_square(g).edges == frozenset()

    @given(small_graphs())
    def test_matches_oracle_and_is_monotone(self, g):
        g2 = graph_square(g)
        assert set(g2.edges) == naive_square(g)
        assert g.edges <= g2.edges

    @given(small_graphs())
    def test_idempotent_on_low_diameter(self, g):
        g2 = graph_square(g)
        if set(graph_square(g2).edges) == set(g2.edges):
            return
        # Only graphs of diameter > 2 may keep growing.
        assert g.n >= 4

    def test_rejects_self_loop(self):
        with pytest.raises(ModelError):
            Graph.from_edges(3, [(2, 2)])


class TestSystemSpec:
    def test_registers_exactly_bag_membership(self, fig1_spec):
        regs = set(fig1_spec.registers)
        expected = {
            (i, p)
            for i, s in enumerate(fig1_spec.bag.sets, start=1)
            for p in s
        }
        assert regs == expected

    def test_fig1_access_example(self, fig1_spec):
        readable, writable = access_maps(fig1_spec)
        assert readable[(2, 1)] == (1, 2, 3)
        assert writable[(2, 1)] == 1

    def test_local_register_readable_by_owner_only(self):
        spec = make_spec(bag=bag_of(3, [1, 2], [3]), writer=1)
        readable, _ = access_maps(spec)
        assert readable[(2, 3)] == (3,)

    def test_full_sharing_readable_by_all(self):
        spec = make_spec(bag=bag_of(4, [1, 2, 3, 4]), writer=2)
        readable, _ = access_maps(spec)
        assert all(v == (1, 2, 3, 4) for v in readable.values())

    def test_registers_sorted_by_set_then_owner(self, fig1_spec):
        assert list(fig1_spec.registers) == sorted(fig1_spec.registers)

    def test_writer_validated(self):
        with pytest.raises(ModelError):
            make_spec(bag=bag_of(2, [1], [2]), writer=3)


class TestSpecFiles:
    def test_bag_round_trip(self, tmp_path, singleton5_spec):
        path = tmp_path / "spec.json"
        dump_spec(singleton5_spec, path)
        again = load_spec(path)
        assert again == singleton5_spec

    def test_graph_round_trip(self, tmp_path, fig1_spec):
        path = tmp_path / "spec.json"
        dump_spec(fig1_spec, path)
        again = load_spec(path)
        assert again.bag == fig1_spec.bag
        assert again.graph == fig1_spec.graph

    def test_uncovered_bag_normalized_on_load(self):
        spec = spec_from_dict({"n": 3, "bag": [[1, 2]], "writer": 1})
        assert [sorted(s) for s in spec.bag.sets] == [[1, 2], [3]]

    def test_rejects_both_bag_and_edges(self):
        with pytest.raises(ModelError):
            spec_from_dict({"n": 2, "bag": [[1]], "edges": [[1, 2]], "writer": 1})

    def test_rejects_neither(self):
        with pytest.raises(ModelError):
            spec_from_dict({"n": 2, "writer": 1})

    def test_dict_shape(self, fig1_spec):
        d = spec_to_dict(fig1_spec)
        assert d["n"] == 5 and d["writer"] == 1 and "edges" in d
