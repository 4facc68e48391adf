"""End-to-end acceptance checks, one test per shipped guarantee.

Every test asserts its own coverage floor (stream counts, pair counts) so a
shrunk loop fails loudly, and finishes with a single printed PASS line; a
verbose run therefore reads as a checklist.  The growth benchmark at the end
is informational: it reports measured amortized update times without gating.
"""
import math
import os
import random
import time
from fractions import Fraction

import numpy as np

from dynapprox.baker import baker_csp, baker_domination
from dynapprox.compressdyn import CspCompressionState, DomCompressionState
from dynapprox.csp import (
    AddEdge, AddVertex, CspInstance, RemoveEdge, SetRevenue, compress,
    encode_mwis, equivalent, solve_brute,
)
from dynapprox.decomp import elimination_forest, heuristic_td
from dynapprox.exactdp import solve_csp, solve_domination
from dynapprox.gendom import (
    DomAddEdge, DomRemoveEdge, DomSetCost, check_decent, clear,
    compress_domination, encode_mwds, equivalent_domination,
    solve_domination_brute,
)
from dynapprox.graph import DynGraph, bfs_layers, components, sort_vertices
from dynapprox.hierarchy import Hierarchy
from dynapprox.errors import TooLarge
from dynapprox.oracle import brute_mwds, brute_mwis, gen_host, gen_stream

EPS_SWEEP = [Fraction(1, 2), Fraction(1, 3), Fraction(1, 10)]
CONFLICT = np.array([[True, True], [True, False]])


# -- shared stream harness -------------------------------------------------

def mirror_apply(g, op):
    if op[0] == "AE":
        g.add_edge(op[1], op[2])
    elif op[0] == "RE":
        g.remove_edge(min(g.labels_between(op[1], op[2])))
    else:
        g.set_weight(op[1], op[2])


def exact_mwis(g):
    if len(g.vertices()) <= 20:
        return brute_mwis(g)
    return solve_csp(encode_mwis(g))


def exact_mwds(g):
    if len(g.vertices()) <= 20:
        return brute_mwds(g)
    return solve_domination(encode_mwds(g))


def run_stream(mode, host, eps, ops, seed, L=None, tau=None):
    """Replay one update stream, checking the advertised sandwich against an
    independent exact recomputation after every single update."""
    h = Hierarchy(host, eps, mode, delta_cap=4, force_L=L, force_tau=tau,
                  bulk_init=len(host.vertices()) > 40)
    g = host.copy()
    checked = 0
    for op in gen_stream(host, ops, seed):
        if op[0] == "Q":
            continue
        mirror_apply(g, op)
        h.update(op)
        p = h.query()
        opt = exact_mwis(g) if mode == "mwis" else exact_mwds(g)
        if mode == "mwis":
            assert (1 - eps) * opt <= p <= opt, (mode, seed, op, p, opt)
        else:
            assert opt <= p <= (1 + eps) * opt, (mode, seed, op, p, opt)
        checked += 1
    return checked


def small_host(mode, kind, n, seed):
    deg_cap = 4 if (mode == "mwds" and kind == "tree") else None
    return gen_host(kind, n, seed, deg_cap=deg_cap)


def large_host(mode, kind, n, seed):
    if kind == "grid":
        # 3 rows for domination: the exact oracle re-solves the full host
        # after every update and 4-row cone boundaries can exceed its table
        # budget, while the max-degree-4 promise is identical
        return gen_host("grid", n, seed, rows=3 if mode == "mwds" else 4)
    if kind == "tree":
        return gen_host("tree", n, seed, deg_cap=4 if mode == "mwds" else None)
    return gen_host("outerplanar", n, seed)


def sandwich_matrix(mode):
    kinds = ["grid", "tree", "outerplanar", "path"]
    streams = checked = 0
    # small hosts, brute-force oracle after every update
    for eps in EPS_SWEEP:
        for i in range(16):
            host = small_host(mode, kinds[i % 4], 12, 100 + i)
            checked += run_stream(mode, host, eps, 9, 100 + i)
            streams += 1
        for i in range(10):
            host = small_host(mode, kinds[i % 3], 20, 200 + i)
            checked += run_stream(mode, host, eps, 9, 200 + i)
            streams += 1
    # larger hosts, exact dynamic-programming oracle
    for eps in EPS_SWEEP:
        for n in (100, 400):
            for i in range(4):
                if mode == "mwds" and eps == Fraction(1, 10) and n == 400:
                    kind = ["tree", "tree", "tree", "outerplanar"][i]
                else:
                    kind = ["grid", "tree", "outerplanar", "grid"][i]
                host = large_host(mode, kind, n, 300 + i)
                checked += run_stream(mode, host, eps, 4, 300 + i)
                streams += 1
    return streams, checked


def test_independent_set_sandwich_over_streams():
    streams, checked = sandwich_matrix("mwis")
    # recursive configurations, small hosts so the oracle stays exact
    for i in range(3):
        host = small_host("mwis", "tree" if i % 2 else "grid", 12, 400 + i)
        checked += run_stream("mwis", host, Fraction(1, 2), 7, 400 + i, L=2)
        streams += 1
    host = small_host("mwis", "grid", 20, 410)
    checked += run_stream("mwis", host, Fraction(1, 3), 5, 410, L=2)
    streams += 1
    for i in range(2):
        host = small_host("mwis", "tree", 10, 420 + i)
        checked += run_stream("mwis", host, Fraction(1, 2), 5, 420 + i,
                              L=3, tau=2)
        streams += 1
    assert streams >= 100 and checked > 700
    print("PASS independent-set sandwich: %d streams, %d checked updates"
          % (streams, checked))


def test_dominating_set_sandwich_over_streams():
    streams, checked = sandwich_matrix("mwds")
    for i in range(2):
        host = small_host("mwds", "tree" if i else "path", 8, 430 + i)
        checked += run_stream("mwds", host, Fraction(1, 2), 4, 430 + i, L=2)
        streams += 1
    assert streams >= 100 and checked > 700
    print("PASS dominating-set sandwich: %d streams, %d checked updates"
          % (streams, checked))


# -- compression preserves the optimum --------------------------------------

def random_csp(rng, n):
    inst = CspInstance()
    for i in range(n):
        m = rng.randrange(1, 4)
        rev = np.array([rng.randrange(0, 30) for _ in range(m)],
                       dtype=np.int64)
        rev[0] = 0
        inst.add_vertex(i, m, rev)
    for _ in range(2 * n):
        u, v = rng.sample(range(n), 2)
        if inst.has_edge(u, v):
            continue
        rel = np.zeros((inst.domain[u], inst.domain[v]), dtype=bool)
        for a in range(inst.domain[u]):
            for b in range(inst.domain[v]):
                rel[a, b] = rng.random() < 0.6
        rel[0, :] = True
        rel[:, 0] = True
        inst.add_edge(u, v, rel)
    return inst


def perturbed_mwis(rng, n):
    kind = rng.choice(["grid", "tree", "outerplanar", "path"])
    inst = encode_mwis(gen_host(kind, n, rng.randrange(1 << 20)))
    for v in list(inst.vertices()):
        if rng.random() < 0.3:
            SetRevenue(v, [0, rng.randrange(0, 60)]).apply(inst)
    for u, v in list(inst.gaifman.edge_ends.values()):
        if rng.random() < 0.2:
            rel = np.array([[True, True],
                            [True, rng.random() < 0.5]])
            RemoveEdge(u, v).apply(inst)
            AddEdge(u, v, rel).apply(inst)
    return inst


def perturbed_mwds(rng, n):
    kind = rng.choice(["tree", "path", "outerplanar"])
    inst = encode_mwds(gen_host(kind, n, rng.randrange(1 << 20), deg_cap=4))
    for v in list(inst.vertices()):
        if rng.random() < 0.4:
            cost = np.array([rng.randrange(0, 50)
                             for _ in range(inst.domain[v])], dtype=np.int64)
            DomSetCost(v, cost).apply(inst)
    return inst


def random_stash(rng, inst):
    p = rng.choice([0.3, 0.5, 0.7])
    return {v for v in inst.vertices() if rng.random() < p}


def test_compression_preserves_optimum():
    rng = random.Random(12)
    pairs = 0
    for trial in range(500):
        if trial % 2:
            inst = random_csp(rng, rng.randrange(4, 13))
        else:
            inst = perturbed_mwis(rng, rng.randrange(4, 15))
        stash = random_stash(rng, inst)
        assert solve_csp(compress(inst, stash)) == solve_brute(inst), trial
        pairs += 1
    attempts = 0
    while pairs < 1000:
        attempts += 1
        assert attempts < 4000
        inst = perturbed_mwds(rng, rng.randrange(4, 13))
        stash = random_stash(rng, inst)
        try:
            squeezed = compress_domination(inst, stash)
        except TooLarge:
            continue
        assert solve_domination(squeezed) == solve_domination(inst), pairs
        pairs += 1
    assert pairs == 1000
    print("PASS compression preserves optimum: %d instance/stash pairs"
          % pairs)


# -- incrementally maintained compression matches from-scratch --------------

def csp_sequence(rng, length, seq):
    host = gen_host(rng.choice(["grid", "tree", "path"]),
                    rng.randrange(6, 9), rng.randrange(1 << 20))
    state = CspCompressionState(encode_mwis(host))
    nxt = 100
    checked = 0
    for step in range(length):
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
            rec = SetRevenue(rng.choice(verts), [0, rng.randrange(0, 50)])
        else:
            rec = AddVertex(nxt, 2, [0, rng.randrange(1, 50)])
            nxt += 1
        state.apply_update(rec)
        scratch = compress(state.cur, state.Z)
        assert equivalent(state.star, scratch), (seq, step)
        if step % 4 == 0 or step == length - 1:
            assert solve_csp(state.star) == solve_csp(state.cur), (seq, step)
        checked += 1
    return checked


def dom_sequence(rng, length, seq):
    host = gen_host(rng.choice(["path", "tree"]),
                    rng.randrange(5, 8), rng.randrange(1 << 20))
    state = DomCompressionState(encode_mwds(host))
    checked = 0
    for step in range(length):
        g = state.cur.gaifman
        verts = [v for v in g.vertices() if isinstance(v, int)]
        kind = rng.randrange(3)
        if kind == 0 and g.edge_ends:
            rec = DomRemoveEdge(rng.choice(sorted(g.edge_ends)))
        elif kind == 1:
            u, v = rng.sample(verts, 2)
            if g.has_edge(u, v):
                continue
            us = np.zeros(state.cur.domain[u], dtype=bool)
            vs = np.zeros(state.cur.domain[v], dtype=bool)
            us[0] = vs[0] = True
            rec = DomAddEdge(900 + step, u, v, us, np.zeros_like(us),
                             vs, np.zeros_like(vs))
        else:
            v = rng.choice(verts)
            cost = np.zeros(state.cur.domain[v], dtype=np.int64)
            cost[0] = rng.randrange(1, 40)
            rec = DomSetCost(v, cost)
        state.apply_update(rec)
        scratch = compress_domination(state.cur, state.Z)
        assert equivalent_domination(state.star, scratch), (seq, step)
        if step % 4 == 0 or step == length - 1:
            assert solve_domination(state.star) == \
                solve_domination(state.cur), (seq, step)
        checked += 1
    return checked


def test_incremental_compression_matches_scratch():
    rng = random.Random(4)
    sequences = checked = 0
    for seq in range(250):
        checked += csp_sequence(rng, rng.choice([10, 14, 18, 24, 34, 50]),
                                seq)
        sequences += 1
    for seq in range(250):
        checked += dom_sequence(rng, rng.choice([10, 12, 16, 20, 28, 40]),
                                seq)
        sequences += 1
    assert sequences == 500
    print("PASS incremental compression matches scratch: %d sequences, "
          "%d checked updates" % (sequences, checked))


# -- elimination forests -----------------------------------------------------

def forest_hosts(count):
    out = []
    kinds = ["grid", "tree", "outerplanar", "path"]
    for i in range(count - 10):
        out.append(gen_host(kinds[i % 4], 2 + (i * 7) % 55, i))
    for i in range(10):
        a = gen_host("tree", 5 + i, 50 + i)
        g = a.copy()
        b = gen_host("path", 4 + i, 60 + i)
        ids = sort_vertices(b.vertices())
        for v in ids:
            g.add_vertex(1000 + v, b.weights[v])
        for u, v in b.edge_ends.values():
            g.add_edge(1000 + u, 1000 + v)
        out.append(g)
    return out


def test_elimination_forest_suite():
    graphs = 0
    for g in forest_hosts(200):
        td = heuristic_td(g)
        f = elimination_forest(td)
        f.validate()
        desc = {v: {v} for v in f.parent}
        for v in reversed(f.top_order):
            p = f.parent[v]
            if p is not None:
                desc[p] |= desc[v]
        for u, v in g.edge_ends.values():
            assert u == v or f.is_ancestor(u, v) or f.is_ancestor(v, u)
        for v in f.parent:
            sub = g.induced(desc[v])
            assert len(components(sub)) == 1, "cone must stay connected"
            outside = set()
            for u in desc[v]:
                outside |= set(g.neighbors(u))
            outside -= desc[v]
            assert f.reach[v] == frozenset(outside)
            assert len(f.reach[v]) <= 3 * td.width + 3
            if f.parent[v] is not None:
                assert f.parent[v] in f.reach[v]
            else:
                assert not f.reach[v]
        nonroots = [v for v in f.parent if f.parent[v] is not None]
        for i, u in enumerate(nonroots):
            for v in nonroots[i + 1:]:
                if f.parent[u] != f.parent[v]:
                    assert f.reach[u] != f.reach[v], (u, v)
        graphs += 1
    assert graphs == 200
    print("PASS elimination forests: %d graphs, reach bound 3w+3, "
          "distinct reaches across distinct parents" % graphs)


# -- static layered solves ---------------------------------------------------

def brute_size(inst):
    total = 1
    for v in inst.vertices():
        total *= inst.domain[v]
        if total > 1 << 21:
            return total
    return total


def disjoint_groups_random(rng, g, k):
    """k vertex groups whose closed neighborhoods stay pairwise disjoint."""
    groups = [set() for _ in range(k)]
    closed = [set() for _ in range(k)]
    verts = sort_vertices(g.vertices())
    rng.shuffle(verts)
    for v in verts:
        nv = set(g.neighbors(v)) | {v}
        slots = list(range(k))
        rng.shuffle(slots)
        for j in slots:
            if all(not (nv & closed[i]) for i in range(k) if i != j):
                groups[j].add(v)
                closed[j] |= nv
                break
    return groups


def test_static_layered_solve_bounds():
    rng = random.Random(9)
    sweep = [Fraction(1, 2), Fraction(1, 3), Fraction(1, 4)]
    mwis_runs = mwds_runs = 0
    for i in range(30):
        host = gen_host(["grid", "tree", "outerplanar", "path"][i % 4],
                        2 + (i * 5) % 17, i)
        inst = encode_mwis(host)
        opt = brute_mwis(host)
        for eps in sweep:
            p = baker_csp(inst, eps)
            assert p <= opt and p >= (1 - eps) * opt, (i, eps, p, opt)
            mwis_runs += 1
    for i in range(30):
        host = gen_host(["tree", "path"][i % 2], 2 + (i * 3) % 12, i,
                        deg_cap=4)
        inst = encode_mwds(host)
        if brute_size(inst) > 1 << 21:
            continue
        opt = brute_mwds(host)
        for eps in sweep:
            p = baker_domination(inst, eps)
            assert p <= opt and p >= (1 - eps) * opt, (i, eps, p, opt)
            mwds_runs += 1
    assert mwis_runs == 90 and mwds_runs >= 60

    # clearing a family of groups with disjoint closed neighborhoods can
    # only lower the optimum, and some cleared instance keeps (1-1/k) of it
    cleared = 0
    trial = 0
    while cleared < 40:
        trial += 1
        assert trial < 400
        rng2 = random.Random(5000 + trial)
        inst = perturbed_mwds(rng2, rng2.randrange(6, 13))
        if brute_size(inst) > 1 << 21:
            continue
        g = inst.gaifman
        s = max(g.degree(v) for v in g.vertices())
        d = max(inst.domain[v] for v in inst.vertices())
        assert check_decent(inst, s, d)[0]
        k = rng2.randrange(2, 4)
        if trial % 2:
            lay = bfs_layers(g, 4 * k)
            groups = [set(lay.layer_set(4 * j + 1))
                      | set(lay.layer_set(4 * j + 2)) for j in range(k)]
        else:
            groups = disjoint_groups_random(rng2, g, k)
        seen = set()
        for grp in groups:
            ngrp = set(grp)
            for v in grp:
                ngrp |= set(g.neighbors(v))
            assert not (ngrp & seen), "closed neighborhoods must not touch"
            seen |= ngrp
        opt = solve_domination_brute(inst)
        best = 0
        for grp in groups:
            inst_j = clear(inst, grp)
            assert check_decent(inst_j, s, d)[0]
            opt_j = solve_domination_brute(inst_j)
            assert opt_j <= opt
            best = max(best, opt_j)
        assert best >= Fraction(opt * (k - 1), k), (trial, best, opt, k)
        cleared += 1
    print("PASS static layered solves: %d mwis runs, %d mwds runs, "
          "%d clearing families" % (mwis_runs, mwds_runs, cleared))


# -- compressed domination instances stay well-shaped ------------------------

def neighbor_spread(inst):
    """Largest number of distinct stash endpoints over collapsed vertices."""
    t = 1
    for v in inst.vertices():
        if isinstance(v, tuple) and v and v[0] == "comp":
            t = max(t, len(set(inst.gaifman.adj[v].values())))
    return t


def assert_decent_compressed(inst, s, d, ctx):
    st = s * neighbor_spread(inst)
    ok, why = check_decent(inst, st, d + 4 ** st)
    assert ok, (ctx, why)


def walk_nodes(node):
    yield node
    for ch in getattr(node, "children", []):
        yield from walk_nodes(ch)


def test_compressed_domination_stays_decent():
    rng = random.Random(77)
    fresh = 0
    while fresh < 120:
        inst = perturbed_mwds(rng, rng.randrange(5, 12))
        g = inst.gaifman
        s = max(1, max(g.degree(v) for v in g.vertices()))
        d = max(inst.domain[v] for v in inst.vertices())
        try:
            squeezed = compress_domination(inst, random_stash(rng, inst))
        except TooLarge:
            continue
        assert_decent_compressed(squeezed, s, d, fresh)
        fresh += 1
    live = 0
    for n, ops, seed in [(8, 4, 21), (12, 3, 22)]:
        host = gen_host("tree", n, seed, deg_cap=4)
        h = Hierarchy(host, Fraction(1, 2), "mwds", delta_cap=4, force_L=2,
                      force_tau=2)
        for op in gen_stream(host, ops, seed):
            if op[0] == "Q":
                continue
            h.update(op)
            for nd in walk_nodes(h.root):
                for state in getattr(nd, "universes", []):
                    assert_decent_compressed(state.star, 4, 5, (seed, op))
                    live += 1
                if nd.level == 1:
                    assert_decent_compressed(nd.inst, 4, 5, (seed, op))
                    live += 1
    assert live > 50
    print("PASS compressed domination decency: %d fresh compressions, "
          "%d live pipeline instances" % (fresh, live))


# -- per-level size discipline ----------------------------------------------

def exact_cap(n, level, L):
    c = 1
    while c ** L < n ** (level - 1):
        c += 1
    return c


def assert_discipline(h, ctx):
    n = h.current_n()
    seen = 0
    for nd in walk_nodes(h.root):
        if not hasattr(nd, "universes"):
            continue
        cap = h.child_cap(nd.level)
        assert cap == exact_cap(n, nd.level, h.cfg.L), (ctx, nd.level)
        for ch in nd.children:
            assert ch.size() <= cap, (ctx, nd.level, ch.size(), cap)
            seen += 1
        if nd.upd_count == 0:
            for ch in nd.children:
                assert ch.size() == 1, (ctx, "fresh epoch not single-vertex")
    return seen


def test_child_size_discipline():
    runs = [("mwis", "tree", 30, Fraction(1, 2), 2, None, 10),
            ("mwis", "tree", 10, Fraction(1, 2), 3, 2, 6),
            ("mwds", "tree", 8, Fraction(1, 2), 2, 2, 4)]
    checked = resets = 0
    for mode, kind, n, eps, L, tau, ops in runs:
        host = gen_host(kind, n, 31, deg_cap=4 if mode == "mwds" else None)
        h = Hierarchy(host, eps, mode, delta_cap=4, force_L=L, force_tau=tau)
        for op in gen_stream(host, ops, 31):
            if op[0] == "Q":
                continue
            h.update(op)
            checked += assert_discipline(h, (mode, op))
            if h.root.upd_count == 0:
                resets += 1
    assert checked > 100 and resets > 3
    print("PASS size discipline: %d child-size checks, %d observed epoch "
          "resets back to single-vertex children" % (checked, resets))


# -- informational growth benchmark ------------------------------------------

def test_update_time_growth_informational():
    sizes = [1 << 12, 1 << 14, 1 << 16]
    if os.environ.get("RUN_BENCH") == "quick":
        sizes = [1 << 10, 1 << 12]
    amortized = []
    for n in sizes:
        host = gen_host("grid", n, 7, rows=4)
        h = Hierarchy(host, Fraction(1, 2), "mwis", force_L=2, bulk_init=True)
        ups = [op for op in gen_stream(host, 8, 7) if op[0] != "Q"]
        t0 = time.perf_counter_ns()
        for op in ups:
            h.update(op)
        total = time.perf_counter_ns() - t0
        amortized.append(total // len(ups))
    assert all(a > 0 for a in amortized)
    ratios = ["%.2f" % (amortized[i + 1] / amortized[i])
              for i in range(len(amortized) - 1)]
    sub = all(amortized[i + 1] < 4 * amortized[i]
              for i in range(len(amortized) - 1))
    print("PASS growth benchmark (informational): sizes %s, amortized ms %s, "
          "4x-step ratios %s, sublinear=%s"
          % (sizes, ["%.1f" % (a / 1e6) for a in amortized], ratios, sub))
