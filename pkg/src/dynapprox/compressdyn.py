"""Dynamic maintenance of compressed instances under updates.

Each state freezes a bounded-treewidth instance, precomputes cone tables
over an elimination forest, and maintains a stash Z holding every vertex an
update ever touched plus all its forest ancestors.  Everything outside the
stash stays contracted: revenue instances aggregate sibling cones by equal
reach set, domination instances keep one table vertex per cone plus a
single accumulator for cones with no stash neighbors.  Updates to the
frozen instance come out as short batches of updates to the compressed one,
which callers relay onward; the compressed instance always stays equivalent
to compressing the current instance from scratch at the same stash.
"""

import numpy as np

from .coding import INF_COST
from .csp import (AddEdge, AddVertex, CspInstance, RemoveEdge, SetRevenue,
                  aggregate_revenue, product_relation)
from .decomp import elimination_forest, heuristic_td
from .errors import PrefixViolation
from .exactdp import compute_domination_tables, compute_tables
from .gendom import (DominationInstance, DomAddEdge, DomAddVertex,
                     DomRemoveEdge, DomSetCost, code_memberships,
                     involved_vertices)
from .graph import next_depth, sort_vertices, vkey


class CspCompressionState:
    """Compressed revenue instance maintained under updates to a frozen base.

    Aggregate vertices are keyed by the reach set their member cones share;
    a member's table is subtracted out when it joins the stash, and an
    aggregate whose last member leaves is neutralized in place (edges
    dropped, revenue zeroed) since compressed instances never lose vertices.
    """

    def __init__(self, inst, td=None, width_cap=None, budget=1 << 26):
        self.init_inst = inst.copy()
        self.cur = inst.copy()
        if td is None:
            td = heuristic_td(self.cur.gaifman, width_cap=width_cap)
        self.forest = elimination_forest(td)
        self.tables = compute_tables(self.init_inst, self.forest, budget=budget)
        self.depth = next_depth(self.init_inst.vertices())
        self.A, self.B, self.Z = set(), set(), set()
        self.star = CspInstance()
        self.aggregates = {}    # reach frozenset -> {"members": set, "raw": array}
        self.member_index = {}  # stash vertex -> reach keys it appears in
        raw = np.zeros(1, dtype=np.int64)
        for r in self.forest.roots:
            raw = raw + self.tables.T[r]
        key = frozenset()
        self.aggregates[key] = {"members": set(self.forest.roots), "raw": raw}
        self.star.add_vertex(self._agg_vertex(key), 1 + raw.shape[0],
                             aggregate_revenue(self.cur, [], raw))

    def _agg_vertex(self, key):
        return ("agg", key, self.depth)

    def _masked(self, key):
        bound = sort_vertices(key)
        return aggregate_revenue(self.cur, bound, self.aggregates[key]["raw"])

    def _emit(self, rec, out):
        rec.apply(self.star)
        out.append(rec)

    def _skey(self, key):
        return vkey(self._agg_vertex(key))

    def grow_stash(self, z):
        """Move one appendix into the stash; returns the induced batch."""
        if z in self.Z:
            raise PrefixViolation("%r already in the stash" % (z,))
        if z not in self.forest.parent:
            raise PrefixViolation("%r is not a frozen vertex" % (z,))
        par = self.forest.parent[z]
        if par is not None and par not in self.Z:
            raise PrefixViolation("parent %r of %r not in the stash" % (par, z))
        out = []
        key = self.forest.reach[z]
        agg = self.aggregates[key]
        agg["members"].discard(z)
        agg["raw"] = agg["raw"] - self.tables.T[z]
        vid = self._agg_vertex(key)
        if agg["members"]:
            self._emit(SetRevenue(vid, self._masked(key)), out)
        else:
            del self.aggregates[key]
            for v in key:
                self.member_index[v].discard(key)
            for v in sort_vertices(key):
                self._emit(RemoveEdge(v, vid), out)
            self._emit(SetRevenue(vid, np.zeros(1 + agg["raw"].shape[0],
                                                dtype=np.int64)), out)
        self._emit(AddVertex(z, self.cur.domain[z], self.cur.revenue[z]), out)
        for a in sort_vertices(set(self.cur.gaifman.neighbors(z)) & self.Z):
            self._emit(AddEdge(z, a, self.cur.get_relation(z, a)), out)
        self.Z.add(z)
        groups = {}
        for c in self.forest.children[z]:
            groups.setdefault(self.forest.reach[c], []).append(c)
        for key in sorted(groups, key=self._skey):
            raw = self.tables.W[z][key].copy()
            self.aggregates[key] = {"members": set(groups[key]), "raw": raw}
            for v in key:
                self.member_index.setdefault(v, set()).add(key)
            vid = self._agg_vertex(key)
            bound = sort_vertices(key)
            ms = [self.cur.domain[v] for v in bound]
            self._emit(AddVertex(vid, 1 + raw.shape[0], self._masked(key)), out)
            for i, v in enumerate(bound):
                self._emit(AddEdge(v, vid,
                                   product_relation(self.cur.domain[v], i, ms)),
                           out)
        return out

    def apply_update(self, rec):
        """Apply one base-instance update; returns the batch for the
        compressed instance."""
        out = []
        if isinstance(rec, AddVertex):
            rec.apply(self.cur)
            self.A.add(rec.v)
            self.Z.add(rec.v)
            self.B.add(rec.v)
            self._emit(rec, out)
            return out
        inv = rec.involved()
        for v in sort_vertices(inv):
            if v in self.Z:
                continue
            path = []
            x = v
            while x is not None and x not in self.Z:
                path.append(x)
                x = self.forest.parent[x]
            for z in reversed(path):
                out.extend(self.grow_stash(z))
        rec.apply(self.cur)
        self._emit(rec, out)
        self.B.update(inv)
        if isinstance(rec, (AddEdge, RemoveEdge)):
            keys = (self.member_index.get(rec.u, set())
                    & self.member_index.get(rec.v, set()))
            for key in sorted(keys, key=self._skey):
                table = self._masked(key)
                vid = self._agg_vertex(key)
                if not np.array_equal(table, self.star.revenue[vid]):
                    self._emit(SetRevenue(vid, table), out)
        return out


class DomCompressionState:
    """Compressed domination instance maintained under updates.

    One table vertex per contracted cone, addressed by the cone's appendix;
    cones without stash neighbors share a single one-state accumulator whose
    cost tracks their exact total.  Boundary edges keep their original
    labels, so a relayed edge update never needs retranslation.
    """

    def __init__(self, inst, td=None, width_cap=None, budget=1 << 26):
        self.init_inst = inst.copy()
        self.cur = inst.copy()
        if td is None:
            td = heuristic_td(self.cur.gaifman, width_cap=width_cap)
        self.forest = elimination_forest(td)
        self.tables = compute_domination_tables(self.init_inst, self.forest,
                                                budget=budget)
        self.depth = next_depth(self.init_inst.vertices())
        self.A, self.B, self.Z = set(), set(), set()
        self.sink = ("sink", self.depth)
        self.sink_raw = sum(int(self.tables.T[r][0]) for r in self.forest.roots)
        self.star = DominationInstance()
        self.star.add_vertex(self.sink, 1, [min(self.sink_raw, INF_COST)])

    def _comp_vertex(self, y):
        return ("comp", y, self.depth)

    def _emit(self, rec, out):
        rec.apply(self.star)
        out.append(rec)

    def grow_stash(self, z):
        """Move one appendix into the stash; returns the induced batch."""
        if z in self.Z:
            raise PrefixViolation("%r already in the stash" % (z,))
        if z not in self.forest.parent:
            raise PrefixViolation("%r is not a frozen vertex" % (z,))
        par = self.forest.parent[z]
        if par is not None and par not in self.Z:
            raise PrefixViolation("parent %r of %r not in the stash" % (par, z))
        out = []
        if par is None:
            self.sink_raw -= int(self.tables.T[z][0])
            self._emit(DomSetCost(self.sink, [min(self.sink_raw, INF_COST)]), out)
        else:
            vid = self._comp_vertex(z)
            for e in self.tables.boundary[z]:
                self._emit(DomRemoveEdge(e), out)
            self._emit(DomSetCost(vid, np.zeros(self.star.domain[vid],
                                                dtype=np.int64)), out)
        self._emit(DomAddVertex(z, self.cur.domain[z], self.cur.cost[z]), out)
        for e in sorted(self.cur.gaifman.adj[z]):
            w = self.cur.gaifman.adj[z][e]
            if w not in self.Z:
                continue
            self._emit(DomAddEdge(e, z, w,
                                  self.cur.supp[z][e], self.cur.dem[z][e],
                                  self.cur.supp[w][e], self.cur.dem[w][e]), out)
        self.Z.add(z)
        for c in self.forest.children[z]:
            labs = self.tables.boundary[c]
            vid = self._comp_vertex(c)
            self._emit(DomAddVertex(vid, 4 ** len(labs), self.tables.T[c]), out)
            for i, e in enumerate(labs):
                x, y = self.cur.gaifman.edge_ends[e]
                if x in self.Z:
                    x, y = y, x
                c_supp, c_dem = code_memberships(len(labs), i)
                self._emit(DomAddEdge(e, vid, y, c_supp, c_dem,
                                      self.cur.supp[y][e], self.cur.dem[y][e]),
                           out)
        return out

    def apply_update(self, rec):
        """Apply one base-instance update; returns the batch for the
        compressed instance."""
        out = []
        if isinstance(rec, DomAddVertex):
            rec.apply(self.cur)
            self.A.add(rec.v)
            self.Z.add(rec.v)
            self.B.add(rec.v)
            self._emit(rec, out)
            return out
        inv = involved_vertices(rec, self.cur)
        for v in sort_vertices(inv):
            if v in self.Z:
                continue
            path = []
            x = v
            while x is not None and x not in self.Z:
                path.append(x)
                x = self.forest.parent[x]
            for z in reversed(path):
                out.extend(self.grow_stash(z))
        rec.apply(self.cur)
        self._emit(rec, out)
        self.B.update(inv)
        return out

    def relieve_in_universe(self, v, demands, labels=None):
        """Restore v's own demand arrays after it leaves a cleared set.

        ``demands`` maps edge labels to v's true demand arrays; each edge at
        v (or just the ones in ``labels``) is removed and reinserted,
        keeping the far side untouched.  Returns the concatenated batches.
        """
        out = []
        if labels is None:
            labels = sorted(self.cur.gaifman.adj[v])
        for e in labels:
            w = self.cur.gaifman.adj[v][e]
            v_supp = self.cur.supp[v][e]
            v_dem = demands.get(e, self.cur.dem[v][e])
            w_supp = self.cur.supp[w][e]
            w_dem = self.cur.dem[w][e]
            out.extend(self.apply_update(DomRemoveEdge(e)))
            out.extend(self.apply_update(
                DomAddEdge(e, v, w, v_supp, v_dem, w_supp, w_dem)))
        return out
