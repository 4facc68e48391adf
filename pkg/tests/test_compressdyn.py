"""Tests for incrementally maintained compressed instances: after every
update the maintained instance must be interchangeable with one compressed
from scratch, and the optimum must be preserved."""
import random

import numpy as np
import pytest

from dynapprox.compressdyn import CspCompressionState, DomCompressionState
from dynapprox.csp import (
    AddEdge, AddVertex, RemoveEdge, SetRevenue, compress, encode_mwis,
    equivalent, solve_brute,
)
from dynapprox.errors import PrefixViolation
from dynapprox.exactdp import solve_csp, solve_domination
from dynapprox.gendom import (
    DomAddEdge, DomRemoveEdge, DomSetCost, compress_domination, encode_mwds,
    equivalent_domination,
)
from dynapprox.graph import DynGraph
from dynapprox.oracle import brute_mwds, brute_mwis, gen_host

CONFLICT = np.array([[True, True], [True, False]])


def check_csp(state, ctx):
    scratch = compress(state.cur, state.Z)
    assert equivalent(state.star, scratch), ctx
    assert solve_csp(state.star) == solve_csp(state.cur), ctx


def check_dom(state, ctx):
    scratch = compress_domination(state.cur, state.Z)
    assert equivalent_domination(state.star, scratch), ctx
    assert solve_domination(state.star) == solve_domination(state.cur), ctx


def path3_state():
    g = DynGraph()
    for v, w in [(1, 2), (2, 1), (3, 3)]:
        g.add_vertex(v, w)
    g.add_edge(1, 2)
    g.add_edge(2, 3)
    return CspCompressionState(encode_mwis(g))


def test_fresh_state_is_one_summary_vertex():
    state = path3_state()
    assert state.Z == set()
    ids = sorted(map(str, state.star.domain))
    assert ids == ["('agg', frozenset(), 1)"]
    agg = ("agg", frozenset(), 1)
    assert list(state.star.revenue[agg]) == [0, 5]
    assert solve_csp(state.star) == 5


def test_growing_the_whole_forest_reproduces_the_instance():
    state = path3_state()
    for z in state.forest.top_order:
        state.grow_stash(z)
    assert state.Z == {1, 2, 3}
    check_csp(state, "full growth")
    for v in [1, 2, 3]:
        assert list(state.star.revenue[v]) == list(state.cur.revenue[v])


def test_growth_requires_parent_first():
    state = path3_state()
    leaves = [v for v, p in state.forest.parent.items() if p is not None]
    with pytest.raises(PrefixViolation):
        state.grow_stash(leaves[0])
    root = state.forest.roots[0]
    state.grow_stash(root)
    with pytest.raises(PrefixViolation):
        state.grow_stash(root)


def mwds_edge_record(inst, u, v, label):
    # a fresh edge is supplied by the in-set state on both sides and
    # demanded by nobody until a cost update rewires the endpoint
    us = np.zeros(inst.domain[u], dtype=bool)
    ud = np.zeros(inst.domain[u], dtype=bool)
    vs = np.zeros(inst.domain[v], dtype=bool)
    vd = np.zeros(inst.domain[v], dtype=bool)
    us[0] = vs[0] = True
    return DomAddEdge(label, u, v, us, ud, vs, vd)


def test_independent_set_rounds_interchangeable():
    for seed in range(8):
        rng = random.Random(seed)
        host = gen_host(rng.choice(["grid", "tree", "path"]), 9, seed)
        state = CspCompressionState(encode_mwis(host))
        assert solve_csp(state.star) == brute_mwis(host)
        check_csp(state, ("init", seed))
        nxt = 100
        for step in range(20):
            g = state.cur.gaifman
            verts = [v for v in g.vertices() if isinstance(v, int)]
            kind = rng.randrange(4)
            if kind == 0 and g.edge_ends:
                pick = sorted(g.edge_ends.values(),
                              key=lambda p: sorted(p, key=str))
                rec = RemoveEdge(*rng.choice(pick))
            elif kind == 1:
                u, v = rng.sample(verts, 2)
                if g.has_edge(u, v):
                    continue
                rec = AddEdge(u, v, CONFLICT)
            elif kind == 2:
                rec = SetRevenue(rng.choice(verts),
                                 [0, rng.randrange(0, 50)])
            else:
                rec = AddVertex(nxt, 2, [0, rng.randrange(1, 50)])
                nxt += 1
            state.apply_update(rec)
            check_csp(state, ("step", seed, step))


def test_domination_rounds_interchangeable():
    for seed in range(8):
        rng = random.Random(seed)
        host = gen_host(rng.choice(["path", "tree"]), 8, seed)
        state = DomCompressionState(encode_mwds(host))
        expect = brute_mwds(host)
        assert solve_domination(state.star) == expect
        check_dom(state, ("init", seed))
        for step in range(16):
            g = state.cur.gaifman
            verts = [v for v in g.vertices() if isinstance(v, int)]
            kind = rng.randrange(3)
            if kind == 0 and g.edge_ends:
                rec = DomRemoveEdge(rng.choice(sorted(g.edge_ends)))
            elif kind == 1:
                u, v = rng.sample(verts, 2)
                if g.has_edge(u, v):
                    continue
                rec = mwds_edge_record(state.cur, u, v, 900 + step)
            else:
                v = rng.choice(verts)
                cost = np.zeros(state.cur.domain[v], dtype=np.int64)
                cost[0] = rng.randrange(1, 40)
                rec = DomSetCost(v, cost)
            state.apply_update(rec)
            check_dom(state, ("step", seed, step))
        # growing the remainder keeps the correspondence
        for z in state.forest.top_order:
            if z not in state.Z:
                state.apply_update(DomSetCost(z, state.cur.cost[z]))
        check_dom(state, ("full", seed))


def test_relief_of_grown_vertex_is_two_swaps():
    host = gen_host("path", 4, 5)
    state = DomCompressionState(encode_mwds(host))
    verts = sorted(state.cur.vertices())
    for u in verts:
        state.apply_update(DomSetCost(u, state.cur.cost[u]))
    v = verts[1]  # interior vertex, degree 2
    demands = {e: state.cur.dem[v][e].copy()
               for e in state.cur.gaifman.adj[v]}
    batch = state.relieve_in_universe(v, demands)
    removals = [r for r in batch if isinstance(r, DomRemoveEdge)]
    additions = [r for r in batch if isinstance(r, DomAddEdge)]
    assert len(removals) == 2 and len(additions) == 2
    check_dom(state, "relief")
