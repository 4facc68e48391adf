"""Exact solvers over elimination forests.

Tables are flat numpy int64 arrays indexed by mixed-radix codes of the
valuations of each vertex's reach set (revenue case) or by 2-bit-per-edge
interaction codes of its boundary edges (domination case).  Both run
bottom-up over the forest; both are also the precomputation consumed by the
dynamic compression scheme.
"""

import numpy as np

from .coding import INF_COST, NEG_INF, add_sat, digit_of, strides, table_size
from .decomp import elimination_forest, heuristic_td
from .errors import TooLarge
from .graph import sort_vertices


class DpTables:
    def __init__(self, forest, T, W, groups):
        self.forest = forest
        self.T = T          # u -> array over valuations of reach(u)
        self.W = W          # u -> {R -> summed child tables over valuations of R}
        self.groups = groups  # u -> {R -> [children with reach R]}


def _reach_codes(inst, vs):
    ms = [inst.domain[v] for v in vs]
    strs = strides(ms)
    size = table_size(ms)
    return ms, strs, size


def compute_tables(inst, forest, budget=1 << 26):
    """Revenue tables: T[u][phi] is the best revenue collectable inside
    desc(u) when reach(u) is valued phi, counting edges with at least one
    endpoint in desc(u).  W groups children by equal reach and sums their
    tables; the optimum of a root component is its single-entry T."""
    T, W, groups = {}, {}, {}
    spent = 0
    for u in reversed(forest.top_order):
        ru = sort_vertices(forest.reach[u])
        ms, strs, size = _reach_codes(inst, ru)
        spent += size * inst.domain[u]
        if spent > budget:
            raise TooLarge("table budget exceeded at %d entries" % spent)
        pos = {v: i for i, v in enumerate(ru)}
        codes = np.arange(size, dtype=np.int64)
        digs = [digit_of(codes, strs[i], ms[i]) for i in range(len(ru))]
        grp = {}
        for c in forest.children[u]:
            grp.setdefault(forest.reach[c], []).append(c)
        groups[u] = grp
        W[u] = {}
        for r, cs in grp.items():
            acc = T[cs[0]].copy()
            for c in cs[1:]:
                acc += T[c]
            W[u][r] = acc
        rels = [(i, inst.get_relation(u, v)) for i, v in enumerate(ru)
                if inst.has_edge(u, v)]
        widx = []
        for r in grp:
            rl = sort_vertices(r)
            rs = strides([inst.domain[v] for v in rl])
            base = np.zeros(size, dtype=np.int64)
            ustride = 0
            for j, v in enumerate(rl):
                if v == u:
                    ustride = rs[j]
                else:
                    base = base + digs[pos[v]] * rs[j]
            widx.append((r, base, ustride))
        best = np.full(size, NEG_INF, dtype=np.int64)
        for d in range(inst.domain[u]):
            val = np.full(size, inst.revenue[u][d], dtype=np.int64)
            for r, base, ustride in widx:
                val = val + W[u][r][base + d * ustride]
            ok = np.ones(size, dtype=bool)
            for i, rel in rels:
                ok &= rel[d, digs[i]]
            best = np.maximum(best, np.where(ok, val, NEG_INF))
        T[u] = best
    return DpTables(forest, T, W, groups)


def _brute_size(inst, cap=1 << 22):
    total = 1
    for m in inst.domain.values():
        total *= m
        if total > cap:
            return None
    return total


def solve_csp(inst, td=None, width_cap=None, budget=1 << 26):
    """Exact optimum revenue via forest dynamic programming; tiny instances
    fall back to direct enumeration, sidestepping decomposition quality."""
    if inst.n == 0:
        return 0
    if td is None and inst.n <= 20 and _brute_size(inst) is not None:
        from .csp import solve_brute

        return solve_brute(inst)
    if td is None:
        td = heuristic_td(inst.gaifman, width_cap=width_cap)
    # one-shot solve: skip balancing so reach sets stay minimal
    forest = elimination_forest(td, balanced=False)
    tables = compute_tables(inst, forest, budget=budget)
    return int(sum(int(tables.T[r][0]) for r in forest.roots))


class DomTables:
    def __init__(self, forest, T, boundary):
        self.forest = forest
        self.T = T          # u -> array over interaction codes of boundary[u]
        self.boundary = boundary  # u -> sorted labels of E(desc(u), reach(u))


def boundary_lists(inst, forest):
    """Sorted labels of edges leaving each descendant cone upward."""
    bl = {u: [] for u in forest.parent}
    for lab, (x, y) in inst.gaifman.edge_ends.items():
        lo, hi = (x, y) if forest.depth[x] >= forest.depth[y] else (y, x)
        v = lo
        while v != hi:
            bl[v].append(lab)
            v = forest.parent[v]
    for u in bl:
        bl[u].sort()
    return bl


def compute_domination_tables(inst, forest, budget=1 << 26):
    """Cost tables: T[u][x] is the cheapest valuation of desc(u), locally
    correct inside the cone, whose boundary edges interact as x encodes
    (2 bits per label, ascending: supply then demand)."""
    bl = boundary_lists(inst, forest)
    T = {}
    spent = 0
    for u in reversed(forest.top_order):
        labs = bl[u]
        pos = {e: i for i, e in enumerate(labs)}
        size = 4 ** len(labs)
        spent += size * inst.domain[u]
        if spent > budget:
            raise TooLarge("table budget exceeded at %d entries" % spent)
        own = [e for e in labs if e in inst.supp[u]]
        kids = []
        for c in forest.children[u]:
            cl = bl[c]
            to_u = [e for e in cl if e in inst.supp[u]]
            passing = [e for e in cl if e not in inst.supp[u]]
            ccodes = np.arange(4 ** len(cl), dtype=np.int64)
            proj = np.zeros(4 ** len(cl), dtype=np.int64)
            for i, e in enumerate(passing):
                proj += ((ccodes >> (2 * cl.index(e))) & 3) << (2 * i)
            trans = np.zeros(4 ** len(passing), dtype=np.int64)
            pcodes = np.arange(4 ** len(passing), dtype=np.int64)
            for i, e in enumerate(passing):
                trans += ((pcodes >> (2 * i)) & 3) << (2 * pos[e])
            kids.append((c, cl, to_u, proj, trans))
        table = np.full(size, INF_COST, dtype=np.int64)
        for d in range(inst.domain[u]):
            if inst.cost[u][d] >= INF_COST:
                continue
            own_code = 0
            for e in own:
                own_code += (int(inst.supp[u][e][d])
                             + 2 * int(inst.dem[u][e][d])) << (2 * pos[e])
            idx = np.array([own_code], dtype=np.int64)
            vals = np.array([inst.cost[u][d]], dtype=np.int64)
            dead = False
            for c, cl, to_u, proj, trans in kids:
                ccodes = np.arange(4 ** len(cl), dtype=np.int64)
                ok = T[c] < INF_COST
                for e in to_u:
                    p = cl.index(e)
                    sbit = (ccodes >> (2 * p)) & 1
                    dbit = (ccodes >> (2 * p + 1)) & 1
                    if inst.dem[u][e][d]:
                        ok &= sbit.astype(bool)
                    if not inst.supp[u][e][d]:
                        ok &= ~dbit.astype(bool)
                red = np.full(trans.shape[0], INF_COST, dtype=np.int64)
                np.minimum.at(red, proj[ok], T[c][ok])
                if not (red < INF_COST).any():
                    dead = True
                    break
                idx = (idx[:, None] + trans[None, :]).ravel()
                vals = add_sat(vals[:, None], red[None, :]).ravel()
            if dead:
                continue
            np.minimum.at(table, idx, vals)
        T[u] = table
    return DomTables(forest, T, bl)


def solve_domination(inst, td=None, width_cap=None, budget=1 << 26):
    """Exact minimum cost via forest dynamic programming (INF_COST if none);
    tiny instances fall back to direct enumeration."""
    if inst.n == 0:
        return 0
    if td is None and inst.n <= 20 and _brute_size(inst) is not None:
        from .gendom import solve_domination_brute

        return solve_domination_brute(inst)
    if td is None:
        td = heuristic_td(inst.gaifman, width_cap=width_cap)
    # one-shot solve: skip balancing so boundaries stay minimal
    forest = elimination_forest(td, balanced=False)
    tables = compute_domination_tables(inst, forest, budget=budget)
    total = 0
    for r in forest.roots:
        total = int(add_sat(total, int(tables.T[r][0])))
    return total
