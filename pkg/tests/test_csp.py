"""Tests for the constraint encoding, brute solver and static compression."""
import random

import numpy as np
import pytest

from dynapprox.csp import (
    AddEdge, AddVertex, CspInstance, RemoveEdge, SetRevenue,
    boundary_table_brute, compress, encode_mwis, equivalent, evaluate,
    solve_brute,
)
from dynapprox.graph import DynGraph
from dynapprox.oracle import brute_mwis, gen_host


def small_host(rng, n):
    g = DynGraph()
    for i in range(n):
        g.add_vertex(i, rng.randrange(1, 50))
    for _ in range(rng.randrange(0, 2 * n)):
        u, v = rng.sample(range(n), 2)
        if not g.has_edge(u, v):
            g.add_edge(u, v)
    return g


@pytest.fixture
def path3():
    g = DynGraph()
    for v, w in [(1, 2), (2, 1), (3, 3)]:
        g.add_vertex(v, w)
    g.add_edge(1, 2)
    g.add_edge(2, 3)
    return g


def test_encode_matches_brute_oracle(path3):
    inst = encode_mwis(path3)
    assert inst.n == 3
    assert list(inst.revenue[1]) == [0, 2]
    assert solve_brute(inst) == brute_mwis(path3) == 5


def test_encode_matches_on_random_graphs():
    rng = random.Random(13)
    for trial in range(30):
        g = small_host(rng, rng.randrange(2, 10))
        assert solve_brute(encode_mwis(g)) == brute_mwis(g)


def test_evaluate_counts_only_satisfied():
    g = DynGraph()
    g.add_vertex(1, 4)
    g.add_vertex(2, 6)
    g.add_edge(1, 2)
    inst = encode_mwis(g)
    assert evaluate(inst, {1: 1, 2: 0}) == 4
    assert evaluate(inst, {1: 0, 2: 1}) == 6
    assert evaluate(inst, {1: 1, 2: 1}) is None
    assert evaluate(inst, {1: 0, 2: 0}) == 0


def test_records_apply_and_involved(path3):
    inst = encode_mwis(path3)
    rec = RemoveEdge(1, 2)
    assert rec.involved() == {1, 2}
    inst.apply(rec)
    assert not inst.has_edge(1, 2)
    inst.apply(AddVertex(9, 2, np.array([0, 7], dtype=np.int64)))
    assert 9 in inst.domain
    inst.apply(SetRevenue(9, np.array([0, 8], dtype=np.int64)))
    assert list(inst.revenue[9]) == [0, 8]
    conflict = np.array([[True, True], [True, False]])
    inst.apply(AddEdge(9, 1, conflict))
    assert inst.has_edge(1, 9)
    assert solve_brute(inst) == 8 + 3


def test_compress_path_around_middle(path3):
    inst = encode_mwis(path3)
    comp = compress(inst, {2})
    names = sorted(map(str, comp.domain))
    assert names == ["('agg', frozenset({2}), 1)", "2"]
    agg = ("agg", frozenset({2}), 1)
    # both endpoint components share the blanket {2}, so one summary vertex
    # carries their combined per-interaction optimum
    assert list(comp.revenue[agg]) == [0, 5, 0]
    assert solve_brute(comp) == solve_brute(inst) == 5


def test_compress_preserves_optimum_random():
    rng = random.Random(19)
    for trial in range(60):
        g = small_host(rng, rng.randrange(2, 9))
        inst = encode_mwis(g)
        vs = sorted(g.vertices())
        stash = set(rng.sample(vs, rng.randrange(0, len(vs) + 1)))
        comp = compress(inst, stash)
        assert solve_brute(comp) == solve_brute(inst)
        # stash vertices survive untouched
        for v in stash:
            assert list(comp.revenue[v]) == list(inst.revenue[v])


def test_boundary_table_entries_are_conditional_optima():
    g = DynGraph()
    for v, w in [(0, 5), (1, 7), (2, 9)]:
        g.add_vertex(v, w)
    g.add_edge(0, 1)
    g.add_edge(1, 2)
    inst = encode_mwis(g)
    # component {0} against boundary [1]: row per state of 1
    tbl = boundary_table_brute(inst, [0], [1])
    assert list(tbl) == [5, 0]


def test_equivalent_ignores_dead_vertices(path3):
    a = encode_mwis(path3)
    b = encode_mwis(path3)
    assert equivalent(a, b)
    b.add_vertex(99, 2, np.array([0, 0], dtype=np.int64))
    assert equivalent(a, b)
    b.set_revenue(99, np.array([0, 5], dtype=np.int64))
    assert not equivalent(a, b)
    c = encode_mwis(path3)
    c.set_revenue(1, np.array([0, 3], dtype=np.int64))
    assert not equivalent(a, c)


def test_compress_on_planar_hosts():
    for seed in range(8):
        g = gen_host("outerplanar", 10, seed=seed)
        inst = encode_mwis(g)
        rng = random.Random(seed)
        stash = set(rng.sample(sorted(g.vertices()), 4))
        comp = compress(inst, stash)
        assert solve_brute(comp) == solve_brute(inst)
