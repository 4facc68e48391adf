"""Binary constraint instances with revenue maximization and a null value.

Every domain is ``{0, 1, ..., m-1}`` where value 0 is the opt-out: it earns
revenue 0 and is compatible with everything.  Constraints are boolean
matrices over a vertex pair; a valuation is feasible when every edge's
matrix allows the chosen pair of values.
"""

import numpy as np

from .coding import NEG_INF, digit_of, strides, table_size
from .errors import TooLarge
from .graph import DynGraph, components, next_depth, sort_vertices, vkey


def _check_revenue(m, rev):
    rev = np.asarray(rev, dtype=np.int64)
    if rev.shape != (m,):
        raise ValueError("revenue length %d != domain size %d" % (rev.shape[0], m))
    if rev[0] != 0:
        raise ValueError("value 0 must have revenue 0")
    if (rev < 0).any():
        raise ValueError("revenues must be nonnegative")
    return rev


def _check_relation(mu, mv, rel):
    rel = np.asarray(rel, dtype=bool)
    if rel.shape != (mu, mv):
        raise ValueError("relation shape %s != (%d, %d)" % (rel.shape, mu, mv))
    if not rel[0, :].all() or not rel[:, 0].all():
        raise ValueError("value 0 must be allowed with everything")
    return rel


class CspInstance:
    """Vertex-valued instance: domains, revenue tables, pairwise relations."""

    def __init__(self):
        self.gaifman = DynGraph(simple=True)
        self.domain = {}
        self.revenue = {}
        self.relation = {}  # (u, v) with vkey(u) < vkey(v) -> bool matrix

    def vertices(self):
        return self.gaifman.vertices()

    @property
    def n(self):
        return self.gaifman.n

    def add_vertex(self, v, m, rev):
        if m < 1:
            raise ValueError("domain size must be >= 1")
        self.gaifman.add_vertex(v)
        self.domain[v] = m
        self.revenue[v] = _check_revenue(m, rev)

    def set_revenue(self, v, rev):
        self.revenue[v] = _check_revenue(self.domain[v], rev)

    def _key(self, u, v):
        return (u, v) if vkey(u) < vkey(v) else (v, u)

    def add_edge(self, u, v, rel):
        rel = _check_relation(self.domain[u], self.domain[v], rel)
        a, b = self._key(u, v)
        self.gaifman.add_edge(u, v)
        self.relation[(a, b)] = rel if (a, b) == (u, v) else rel.T

    def remove_edge(self, u, v):
        lab = self.gaifman.labels_between(u, v)
        self.gaifman.remove_edge(next(iter(lab)))
        del self.relation[self._key(u, v)]

    def get_relation(self, u, v):
        """Relation matrix oriented as (u, v)."""
        a, b = self._key(u, v)
        rel = self.relation[(a, b)]
        return rel if (a, b) == (u, v) else rel.T

    def has_edge(self, u, v):
        return self.gaifman.has_edge(u, v)

    def copy(self):
        out = CspInstance()
        out.gaifman = self.gaifman.copy()
        out.domain = dict(self.domain)
        out.revenue = {v: r.copy() for v, r in self.revenue.items()}
        out.relation = {k: m.copy() for k, m in self.relation.items()}
        return out

    def induced(self, keep):
        keep = set(keep)
        out = CspInstance()
        out.gaifman = self.gaifman.induced(keep)
        out.domain = {v: self.domain[v] for v in keep}
        out.revenue = {v: self.revenue[v].copy() for v in keep}
        out.relation = {
            (a, b): m.copy()
            for (a, b), m in self.relation.items()
            if a in keep and b in keep
        }
        return out

    def apply(self, rec):
        rec.apply(self)


class AddVertex:
    def __init__(self, v, m, rev):
        self.v = v
        self.m = m
        self.rev = np.asarray(rev, dtype=np.int64)

    def apply(self, inst):
        inst.add_vertex(self.v, self.m, self.rev)

    def involved(self):
        return {self.v}


class AddEdge:
    def __init__(self, u, v, rel):
        self.u = u
        self.v = v
        self.rel = np.asarray(rel, dtype=bool)

    def apply(self, inst):
        inst.add_edge(self.u, self.v, self.rel)

    def involved(self):
        return {self.u, self.v}


class RemoveEdge:
    def __init__(self, u, v):
        self.u = u
        self.v = v

    def apply(self, inst):
        inst.remove_edge(self.u, self.v)

    def involved(self):
        return {self.u, self.v}


class SetRevenue:
    def __init__(self, v, rev):
        self.v = v
        self.rev = np.asarray(rev, dtype=np.int64)

    def apply(self, inst):
        inst.set_revenue(self.v, self.rev)

    def involved(self):
        return {self.v}


def encode_mwis(g):
    """Independent-set instance: value 1 means picked, conflicting picks forbidden."""
    inst = CspInstance()
    for v in sort_vertices(g.vertices()):
        inst.add_vertex(v, 2, [0, g.weights[v]])
    seen = set()
    for lab, (u, v) in sorted(g.edge_ends.items()):
        pair = frozenset((u, v))
        if pair in seen:
            continue
        seen.add(pair)
        inst.add_edge(u, v, [[True, True], [True, False]])
    return inst


def evaluate(inst, phi):
    """Total revenue of a full valuation, or None if some edge forbids it."""
    for (a, b), rel in inst.relation.items():
        if not rel[phi[a], phi[b]]:
            return None
    return int(sum(int(inst.revenue[v][phi[v]]) for v in inst.vertices()))


def solve_brute(inst, cap=1 << 22):
    """Exact optimum by vectorized enumeration of all valuations."""
    vs = sort_vertices(inst.vertices())
    if not vs:
        return 0
    ms = [inst.domain[v] for v in vs]
    total = table_size(ms)
    if total > cap:
        raise TooLarge("brute enumeration of %d valuations" % total)
    strs = strides(ms)
    pos = {v: i for i, v in enumerate(vs)}
    codes = np.arange(total, dtype=np.int64)
    digits = [digit_of(codes, strs[i], ms[i]) for i in range(len(vs))]
    rev = np.zeros(total, dtype=np.int64)
    for i, v in enumerate(vs):
        rev += inst.revenue[v][digits[i]]
    ok = np.ones(total, dtype=bool)
    for (a, b), rel in inst.relation.items():
        ok &= rel[digits[pos[a]], digits[pos[b]]]
    if not ok.any():
        return None
    return int(rev[ok].max())


def boundary_table_brute(inst, comp, bound, cap=1 << 22):
    """Best revenue of each boundary valuation, over one outside component.

    ``comp`` is the component's vertex set, ``bound`` its sorted neighborhood.
    The returned int64 array is indexed by mixed-radix codes of ``bound``
    valuations (ascending vertex order, first coordinate least significant).
    Edges internal to ``bound`` are ignored; edges inside the component and
    between component and boundary are enforced.
    """
    comp = sort_vertices(comp)
    ms_b = [inst.domain[v] for v in bound]
    nb = table_size(ms_b)
    ms_c = [inst.domain[v] for v in comp]
    nc = table_size(ms_c)
    if nb * nc > cap:
        raise TooLarge("boundary table of %d x %d entries" % (nb, nc))
    strs_b = strides(ms_b)
    strs_c = strides(ms_c)
    pos_b = {v: i for i, v in enumerate(bound)}
    pos_c = {v: i for i, v in enumerate(comp)}
    codes_c = np.arange(nc, dtype=np.int64)
    dig_c = [digit_of(codes_c, strs_c[i], ms_c[i]) for i in range(len(comp))]
    rev_c = np.zeros(nc, dtype=np.int64)
    for i, v in enumerate(comp):
        rev_c += inst.revenue[v][dig_c[i]]
    ok_c = np.ones(nc, dtype=bool)
    cross = []
    for (a, b), rel in inst.relation.items():
        if a in pos_c and b in pos_c:
            ok_c &= rel[dig_c[pos_c[a]], dig_c[pos_c[b]]]
        elif a in pos_c and b in pos_b:
            cross.append((pos_c[a], pos_b[b], rel))
        elif b in pos_c and a in pos_b:
            cross.append((pos_c[b], pos_b[a], rel.T))
    out = np.zeros(nb, dtype=np.int64)
    codes_b = np.arange(nb, dtype=np.int64)
    for cb in codes_b:
        ok = ok_c.copy()
        for ci, bi, rel in cross:
            dval = digit_of(int(cb), strs_b[bi], ms_b[bi])
            ok &= rel[dig_c[ci], dval]
        best = rev_c[ok].max() if ok.any() else NEG_INF
        out[cb] = best
    return out


def product_relation(mv, pos, ms):
    """Relation between a boundary vertex and an aggregate over its neighborhood.

    Aggregate value 0 opts out; value e >= 1 encodes a full boundary valuation
    (code e-1) and is allowed iff the vertex's own value d is 0 or matches the
    encoded digit at ``pos``.
    """
    magg = 1 + table_size(ms)
    rel = np.zeros((mv, magg), dtype=bool)
    rel[0, :] = True
    rel[:, 0] = True
    codes = np.arange(magg - 1, dtype=np.int64)
    dig = digit_of(codes, strides(ms)[pos], ms[pos])
    for d in range(1, mv):
        rel[d, 1:] = dig == d
    return rel


def boundary_mask(inst, bound):
    """Feasibility of each boundary valuation under edges internal to ``bound``."""
    ms = [inst.domain[v] for v in bound]
    nb = table_size(ms)
    strs = strides(ms)
    pos = {v: i for i, v in enumerate(bound)}
    codes = np.arange(nb, dtype=np.int64)
    ok = np.ones(nb, dtype=bool)
    for i, a in enumerate(bound):
        for j in range(i + 1, len(bound)):
            b = bound[j]
            if inst.has_edge(a, b):
                rel = inst.get_relation(a, b)
                ok &= rel[digit_of(codes, strs[i], ms[i]),
                          digit_of(codes, strs[j], ms[j])]
    return ok


def aggregate_revenue(inst, bound, raw):
    """Aggregate revenue table: prepend the opt-out, blank infeasible codes."""
    table = np.where(boundary_mask(inst, bound), raw, 0)
    return np.concatenate(([0], table))


def compress(inst, stash, subsolver=None):
    """Contract everything outside ``stash`` into neighborhood aggregates.

    Components of the complement are grouped by their neighborhood S inside
    the stash; each group becomes one vertex ("agg", S, depth) whose nonzero
    values enumerate valuations of S and pay the summed best revenue the
    group's components can add on top.  Optimum and feasibility are preserved.
    """
    if subsolver is None:
        subsolver = boundary_table_brute
    stash = set(stash)
    for v in stash:
        if not inst.gaifman.has_vertex(v):
            raise ValueError("stash vertex %r not in instance" % (v,))
    depth = next_depth(inst.vertices())
    out = inst.induced(stash)
    rest = inst.gaifman.induced(set(inst.vertices()) - stash)
    groups = {}
    for comp in components(rest):
        nb = set()
        for v in comp:
            nb.update(w for w in inst.gaifman.neighbors(v) if w in stash)
        groups.setdefault(frozenset(nb), []).append(comp)
    for s, comps in sorted(groups.items(),
                           key=lambda kv: vkey(("agg", kv[0], depth))):
        bound = sort_vertices(s)
        ms = [inst.domain[v] for v in bound]
        raw = np.zeros(table_size(ms), dtype=np.int64)
        for comp in comps:
            raw = raw + subsolver(inst, comp, bound)
        agg = ("agg", s, depth)
        out.add_vertex(agg, 1 + table_size(ms), aggregate_revenue(inst, bound, raw))
        for i, v in enumerate(bound):
            out.add_edge(v, agg, product_relation(inst.domain[v], i, ms))
    return out


def equivalent(a, b):
    """Equality up to isolated vertices that can never earn revenue."""

    def live(inst):
        keep = set()
        for v in inst.vertices():
            if inst.gaifman.degree(v) > 0 or inst.revenue[v].any():
                keep.add(v)
        return keep

    la, lb = live(a), live(b)
    if la != lb:
        return False
    for v in la:
        if a.domain[v] != b.domain[v]:
            return False
        if not np.array_equal(a.revenue[v], b.revenue[v]):
            return False
    ea = {k: m for k, m in a.relation.items() if k[0] in la and k[1] in la}
    eb = {k: m for k, m in b.relation.items() if k[0] in lb and k[1] in lb}
    if set(ea) != set(eb):
        return False
    for k in ea:
        if not np.array_equal(ea[k], eb[k]):
            return False
    return True
