"""Independent brute-force solvers and randomized planar-host generators.

The solvers here deliberately share no code with the forest dynamic
programming: subset enumeration over numpy bit tricks only.  Generators
produce planar hosts (grids, outerplanar polygons, trees) plus update
streams whose edge sets always stay inside the host's, which keeps every
intermediate graph planar by construction.
"""

import random

import numpy as np

from .errors import TooLarge
from .graph import DynGraph, sort_vertices

MAX_BRUTE = 22


def _bit_setup(g):
    vs = sort_vertices(g.vertices())
    n = len(vs)
    if n > MAX_BRUTE:
        raise TooLarge("brute force over %d vertices" % n)
    idx = {v: i for i, v in enumerate(vs)}
    nbr = np.zeros(n, dtype=np.int64)
    for lab, (u, v) in g.edge_ends.items():
        nbr[idx[u]] |= 1 << idx[v]
        nbr[idx[v]] |= 1 << idx[u]
    w = np.array([g.weights[v] for v in vs], dtype=np.int64)
    return vs, nbr, w


def brute_mwis(g):
    """Maximum weight of an independent set, by doubling over subsets."""
    vs, nbr, w = _bit_setup(g)
    n = len(vs)
    indep = np.ones(1, dtype=bool)
    weight = np.zeros(1, dtype=np.int64)
    for v in range(n):
        prefix = np.arange(1 << v, dtype=np.int64)
        ok_v = indep & ((prefix & nbr[v]) == 0)
        indep = np.concatenate([indep, ok_v])
        weight = np.concatenate([weight, weight + w[v]])
    return int(weight[indep].max())


def brute_mwds(g):
    """Minimum weight of a dominating set, by doubling coverage masks."""
    vs, nbr, w = _bit_setup(g)
    n = len(vs)
    full = (1 << n) - 1
    cover = np.zeros(1, dtype=np.int64)
    weight = np.zeros(1, dtype=np.int64)
    for v in range(n):
        closed = nbr[v] | (1 << v)
        cover = np.concatenate([cover, cover | closed])
        weight = np.concatenate([weight, weight + w[v]])
    ok = cover == full
    if not ok.any():
        return None
    return int(weight[ok].min())


def gen_host(kind, n, seed, rows=None, max_weight=1 << 20, chord_prob=0.5,
             deg_cap=None):
    """Random planar host graph with the given vertex count.

    kinds: "grid" (p x q lattice; ``rows`` forces p), "tree" (random
    attachment, optionally degree-capped), "outerplanar" (cycle plus random
    non-crossing chords, maximum degree 4), "path".
    """
    rng = random.Random(seed)
    g = DynGraph(simple=True)
    for v in range(n):
        g.add_vertex(v, weight=rng.randrange(1, max_weight))
    if n <= 1:
        return g
    if kind == "path":
        for v in range(n - 1):
            g.add_edge(v, v + 1)
        return g
    if kind == "grid":
        p = rows if rows is not None else max(1, int(n ** 0.5))
        while n % p:
            p -= 1
        q = n // p
        for i in range(p):
            for j in range(q):
                if j + 1 < q:
                    g.add_edge(i * q + j, i * q + j + 1)
                if i + 1 < p:
                    g.add_edge(i * q + j, (i + 1) * q + j)
        return g
    if kind == "tree":
        for v in range(1, n):
            pool = [u for u in range(v)
                    if deg_cap is None or g.degree(u) < deg_cap]
            g.add_edge(pool[rng.randrange(len(pool))], v)
        return g
    if kind == "outerplanar":
        if n == 2:
            g.add_edge(0, 1)
            return g
        for v in range(n):
            g.add_edge(v, (v + 1) % n)

        def chords(lo, hi):
            # split the polygon ear (lo..hi) without crossing earlier chords
            if hi - lo < 2:
                return
            m = rng.randrange(lo + 1, hi)
            for a, b in ((lo, m), (m, hi)):
                if b - a >= 2 and rng.random() < chord_prob \
                        and g.degree(a) < 4 and g.degree(b) < 4:
                    g.add_edge(a, b)
            chords(lo, m)
            chords(m, hi)

        chords(0, n - 1)
        return g
    raise ValueError("unknown host kind %r" % kind)


def gen_stream(host, ops, seed, max_weight=1 << 20, query_every=1):
    """Update stream over a host: removals and re-insertions of host edges,
    weight changes, and periodic queries.  Starting from the full host, the
    live edge set stays a subset of the host's at all times."""
    rng = random.Random(seed)
    host_edges = sorted((min(u, v), max(u, v)) for u, v in host.edge_ends.values())
    present = list(host_edges)
    absent = []
    verts = sort_vertices(host.vertices())
    out = []
    for step in range(ops):
        choices = ["UW"] if verts else []
        if present:
            choices.append("RE")
        if absent:
            choices.append("AE")
        if not choices:
            break
        op = rng.choice(choices)
        if op == "RE":
            e = present.pop(rng.randrange(len(present)))
            absent.append(e)
            out.append(("RE", e[0], e[1]))
        elif op == "AE":
            e = absent.pop(rng.randrange(len(absent)))
            present.append(e)
            out.append(("AE", e[0], e[1]))
        else:
            v = verts[rng.randrange(len(verts))]
            out.append(("UW", v, rng.randrange(1, max_weight)))
        if query_every and (step + 1) % query_every == 0:
            out.append(("Q",))
    return out
