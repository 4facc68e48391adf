"""Cost-minimizing state selection with per-edge supply and demand.

Each vertex of a multigraph picks one state.  A state has a cost (possibly
infinite), a set of incident edges it supplies, and a set it demands.  A
valuation is feasible when every demanded edge is supplied from the other
side.  Minimum weight dominating set is the canonical encoding; compression
and clearing keep this shape closed under the dynamic scheme.
"""

import numpy as np

from .coding import INF_COST, add_sat, digit_of, strides, table_size
from .errors import NoCombination, TooLarge
from .graph import DynGraph, components, next_depth, sort_vertices, synth_depth, vkey


def _check_cost(m, cost):
    cost = np.asarray(cost, dtype=np.int64)
    if cost.shape != (m,):
        raise ValueError("cost length %d != domain size %d" % (cost.shape[0], m))
    if (cost < 0).any() or (cost > INF_COST).any():
        raise ValueError("costs must lie in [0, INF_COST]")
    return cost


def _check_member(m, arr):
    arr = np.asarray(arr, dtype=bool)
    if arr.shape != (m,):
        raise ValueError("membership length %d != domain size %d" % (arr.shape[0], m))
    return arr


class DominationInstance:
    """States with costs; per-edge supply/demand membership arrays per endpoint."""

    def __init__(self):
        self.gaifman = DynGraph(simple=False)
        self.domain = {}
        self.cost = {}
        self.supp = {}  # v -> {label -> bool array over states of v}
        self.dem = {}

    def vertices(self):
        return self.gaifman.vertices()

    @property
    def n(self):
        return self.gaifman.n

    def add_vertex(self, v, m, cost):
        if m < 1:
            raise ValueError("domain size must be >= 1")
        self.gaifman.add_vertex(v)
        self.domain[v] = m
        self.cost[v] = _check_cost(m, cost)
        self.supp[v] = {}
        self.dem[v] = {}

    def set_cost(self, v, cost):
        self.cost[v] = _check_cost(self.domain[v], cost)

    def add_edge(self, u, v, u_supp, u_dem, v_supp, v_dem, label=None):
        lab = self.gaifman.add_edge(u, v, label=label)
        self.supp[u][lab] = _check_member(self.domain[u], u_supp)
        self.dem[u][lab] = _check_member(self.domain[u], u_dem)
        self.supp[v][lab] = _check_member(self.domain[v], v_supp)
        self.dem[v][lab] = _check_member(self.domain[v], v_dem)
        return lab

    def remove_edge(self, label):
        u, v = self.gaifman.remove_edge(label)
        del self.supp[u][label], self.dem[u][label]
        del self.supp[v][label], self.dem[v][label]
        return (u, v)

    def relieve(self, v):
        """Drop all demands of v; its states keep costs and supplies."""
        for lab in self.dem[v]:
            self.dem[v][lab] = np.zeros(self.domain[v], dtype=bool)

    def copy(self):
        out = DominationInstance()
        out.gaifman = self.gaifman.copy()
        out.domain = dict(self.domain)
        out.cost = {v: c.copy() for v, c in self.cost.items()}
        out.supp = {v: {l: a.copy() for l, a in d.items()} for v, d in self.supp.items()}
        out.dem = {v: {l: a.copy() for l, a in d.items()} for v, d in self.dem.items()}
        return out

    def induced(self, keep):
        keep = set(keep)
        out = DominationInstance()
        out.gaifman = self.gaifman.induced(keep)
        out.domain = {v: self.domain[v] for v in keep}
        out.cost = {v: self.cost[v].copy() for v in keep}
        labs = set(out.gaifman.edge_ends)
        out.supp = {v: {l: a.copy() for l, a in self.supp[v].items() if l in labs}
                    for v in keep}
        out.dem = {v: {l: a.copy() for l, a in self.dem[v].items() if l in labs}
                   for v in keep}
        return out

    def apply(self, rec):
        rec.apply(self)


class DomAddVertex:
    def __init__(self, v, m, cost):
        self.v = v
        self.m = m
        self.cost = np.asarray(cost, dtype=np.int64)

    def apply(self, inst):
        inst.add_vertex(self.v, self.m, self.cost)

    def involved(self):
        return {self.v}


class DomAddEdge:
    def __init__(self, label, u, v, u_supp, u_dem, v_supp, v_dem):
        self.label = label
        self.u = u
        self.v = v
        self.u_supp = np.asarray(u_supp, dtype=bool)
        self.u_dem = np.asarray(u_dem, dtype=bool)
        self.v_supp = np.asarray(v_supp, dtype=bool)
        self.v_dem = np.asarray(v_dem, dtype=bool)

    def apply(self, inst):
        inst.add_edge(self.u, self.v, self.u_supp, self.u_dem,
                      self.v_supp, self.v_dem, label=self.label)

    def involved(self):
        return {self.u, self.v}


class DomRemoveEdge:
    def __init__(self, label):
        self.label = label

    def apply(self, inst):
        inst.remove_edge(self.label)

    def involved(self):
        raise RuntimeError("endpoints of a label depend on the instance")

    def involved_in(self, inst):
        return set(inst.gaifman.edge_ends[self.label])


class DomSetCost:
    def __init__(self, v, cost):
        self.v = v
        self.cost = np.asarray(cost, dtype=np.int64)

    def apply(self, inst):
        inst.set_cost(self.v, self.cost)

    def involved(self):
        return {self.v}


def involved_vertices(rec, inst):
    if isinstance(rec, DomRemoveEdge):
        return rec.involved_in(inst)
    return rec.involved()


def encode_mwds(g):
    """Dominating-set instance: state 0 is "I am in the set", state i >= 1
    means "my i-th smallest neighbor covers me"."""
    inst = DominationInstance()
    order = {}
    for v in sort_vertices(g.vertices()):
        nbrs = sort_vertices(g.neighbors(v))
        order[v] = {w: i + 1 for i, w in enumerate(nbrs)}
        m = 1 + len(nbrs)
        cost = np.zeros(m, dtype=np.int64)
        cost[0] = g.weights[v]
        inst.add_vertex(v, m, cost)
    for lab, (u, v) in sorted(g.edge_ends.items()):
        mu, mv = inst.domain[u], inst.domain[v]
        u_supp = np.zeros(mu, dtype=bool)
        u_supp[0] = True
        u_dem = np.zeros(mu, dtype=bool)
        u_dem[order[u][v]] = True
        v_supp = np.zeros(mv, dtype=bool)
        v_supp[0] = True
        v_dem = np.zeros(mv, dtype=bool)
        v_dem[order[v][u]] = True
        inst.add_edge(u, v, u_supp, u_dem, v_supp, v_dem, label=lab)
    return inst


def locally_correct(inst, phi, within):
    """Demands met by supplies, for edges with both ends in ``within``."""
    within = set(within)
    for lab, (u, v) in inst.gaifman.edge_ends.items():
        if u in within and v in within:
            if inst.dem[u][lab][phi[u]] and not inst.supp[v][lab][phi[v]]:
                return False
            if inst.dem[v][lab][phi[v]] and not inst.supp[u][lab][phi[u]]:
                return False
    return True


def evaluate_domination(inst, phi):
    """Total cost if feasible on the whole instance, else None."""
    if not locally_correct(inst, phi, inst.vertices()):
        return None
    tot = 0
    for v in inst.vertices():
        c = int(inst.cost[v][phi[v]])
        if c >= INF_COST:
            return None
        tot += c
    return tot


def clear(inst, blanket):
    """Remove edges inside ``blanket`` and relieve its vertices."""
    out = inst.copy()
    blanket = set(blanket)
    for lab, (u, v) in list(out.gaifman.edge_ends.items()):
        if u in blanket and v in blanket:
            out.remove_edge(lab)
    for v in blanket:
        out.relieve(v)
    return out


def interaction(inst, part, phi):
    """Flags each boundary edge of ``part`` with the supplied/demanded status
    of its inside endpoint under ``phi``."""
    part = set(part)
    out = {}
    for v in part:
        for lab, w in inst.gaifman.adj[v].items():
            if w in part:
                continue
            flags = set()
            if inst.supp[v][lab][phi[v]]:
                flags.add("S")
            if inst.dem[v][lab][phi[v]]:
                flags.add("D")
            out[lab] = frozenset(flags)
    return out


def interaction_code(labels, inter):
    """Pack an interaction into 2 bits per edge, label-ascending: bit 0 is
    supply, bit 1 is demand."""
    code = 0
    for i, lab in enumerate(labels):
        flags = inter.get(lab, frozenset())
        bits = (1 if "S" in flags else 0) | (2 if "D" in flags else 0)
        code |= bits << (2 * i)
    return code


def state_masks(inst, v):
    """Supply and demand sets of every state of v, packed as label bitmasks."""
    labs = sorted(inst.supp[v])
    m = inst.domain[v]
    sup = np.zeros(m, dtype=np.int64)
    dem = np.zeros(m, dtype=np.int64)
    for i, lab in enumerate(labs):
        sup |= inst.supp[v][lab].astype(np.int64) << i
        dem |= inst.dem[v][lab].astype(np.int64) << i
    return labs, sup, dem


def combine_states(inst, v, x1, x2):
    """Smallest state whose supply is exactly supp(x1) | supp(x2), demand is
    within dem(x1), and cost is at most cost(x1) + cost(x2)."""
    labs, sup, dem = state_masks(inst, v)
    budget = add_sat(inst.cost[v][x1], inst.cost[v][x2])
    target = sup[x1] | sup[x2]
    ok = (inst.cost[v] <= budget) & (sup == target) & ((dem & ~dem[x1]) == 0)
    hits = np.flatnonzero(ok)
    if hits.size == 0:
        raise NoCombination("no combination for %r states %d, %d" % (v, x1, x2))
    return int(hits[0])


def _monotonous_fast(inst, v):
    """Combination witness check over all ordered state pairs, grouped by the
    second state's supply shape (the only thing the pair constraint sees,
    along with its cheapest cost)."""
    labs, sup, dem = state_masks(inst, v)
    m = inst.domain[v]
    b = len(labs)
    shapes, shape_inv = np.unique(sup, return_inverse=True)
    shape_cost = np.full(shapes.size, INF_COST, dtype=np.int64)
    np.minimum.at(shape_cost, shape_inv, inst.cost[v])
    if (1 << b) * shapes.size > 1 << 24:
        for x1 in range(m):
            for si in range(shapes.size):
                x2 = int(np.flatnonzero((sup == shapes[si])
                                        & (inst.cost[v] == shape_cost[si]))[0])
                try:
                    combine_states(inst, v, x1, x2)
                except NoCombination:
                    return x1, x2
        return None
    # best[S][D]: min cost among states with supply S and demand within D
    best = np.full((shapes.size, 1 << b), INF_COST, dtype=np.int64)
    np.minimum.at(best, (shape_inv, dem), inst.cost[v])
    for bit in range(b):
        lo = (np.arange(1 << b) >> bit) & 1
        best[:, lo == 1] = np.minimum(best[:, lo == 1], best[:, lo == 0])
    shape_pos = {int(s): i for i, s in enumerate(shapes)}
    for si in range(shapes.size):
        target = sup | shapes[si]
        tidx = np.array([shape_pos.get(int(t), -1) for t in target])
        budget = add_sat(inst.cost[v], shape_cost[si])
        ok = (tidx >= 0) & (best[np.maximum(tidx, 0), dem] <= budget)
        if not ok.all():
            x1 = int(np.flatnonzero(~ok)[0])
            x2 = int(np.flatnonzero((sup == shapes[si])
                                    & (inst.cost[v] == shape_cost[si]))[0])
            return x1, x2
    return None


def check_decent(inst, s, d):
    """Verify the decency promise: every vertex has degree <= s, at most d
    states, a finite-cost state supplying all its edges, and a combination
    witness for every ordered pair of states."""
    for v in sort_vertices(inst.vertices()):
        m = inst.domain[v]
        if m > d:
            return False, "%r has %d states > %d" % (v, m, d)
        if inst.gaifman.degree(v) > s:
            return False, "%r has degree %d > %d" % (v, inst.gaifman.degree(v), s)
        labs, sup, dem = state_masks(inst, v)
        full = (1 << len(labs)) - 1
        anchors = (sup == full) & (inst.cost[v] < INF_COST)
        if not anchors.any():
            return False, "%r has no finite all-supplying state" % (v,)
        bad = _monotonous_fast(inst, v)
        if bad is not None:
            return False, "%r cannot combine states %d, %d" % (v, bad[0], bad[1])
    return True, ""


def solve_domination_brute(inst, cap=1 << 22):
    """Exact minimum by vectorized enumeration; INF_COST when infeasible."""
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
    cost = np.zeros(total, dtype=np.int64)
    for i, v in enumerate(vs):
        cost = add_sat(cost, inst.cost[v][digits[i]])
    ok = np.ones(total, dtype=bool)
    for lab, (u, v) in inst.gaifman.edge_ends.items():
        du, dv = digits[pos[u]], digits[pos[v]]
        ok &= ~inst.dem[u][lab][du] | inst.supp[v][lab][dv]
        ok &= ~inst.dem[v][lab][dv] | inst.supp[u][lab][du]
    if not ok.any():
        return INF_COST
    return int(min(cost[ok].min(), INF_COST))


def interaction_table_brute(inst, comp, labels, cap=1 << 22):
    """Cheapest locally-correct completion per interaction of one component.

    ``labels`` are the component's boundary edge labels, sorted.  The result
    is indexed by 2-bit-per-edge interaction codes; INF_COST marks codes no
    valuation of the component produces.
    """
    comp = sort_vertices(comp)
    cset = set(comp)
    ms = [inst.domain[v] for v in comp]
    total = table_size(ms)
    if total > cap or 4 ** len(labels) > cap:
        raise TooLarge("interaction table enumeration too large")
    strs = strides(ms)
    pos = {v: i for i, v in enumerate(comp)}
    codes = np.arange(total, dtype=np.int64)
    digits = [digit_of(codes, strs[i], ms[i]) for i in range(len(comp))]
    cost = np.zeros(total, dtype=np.int64)
    for i, v in enumerate(comp):
        cost = add_sat(cost, inst.cost[v][digits[i]])
    ok = np.ones(total, dtype=bool)
    for lab, (u, v) in inst.gaifman.edge_ends.items():
        if u in cset and v in cset:
            du, dv = digits[pos[u]], digits[pos[v]]
            ok &= ~inst.dem[u][lab][du] | inst.supp[v][lab][dv]
            ok &= ~inst.dem[v][lab][dv] | inst.supp[u][lab][du]
    icode = np.zeros(total, dtype=np.int64)
    for i, lab in enumerate(labels):
        u, v = inst.gaifman.edge_ends[lab]
        inside = u if u in cset else v
        dx = digits[pos[inside]]
        icode += (inst.supp[inside][lab][dx].astype(np.int64) << (2 * i))
        icode += (inst.dem[inside][lab][dx].astype(np.int64) << (2 * i + 1))
    out = np.full(4 ** len(labels), INF_COST, dtype=np.int64)
    np.minimum.at(out, icode[ok], cost[ok])
    return out


def code_memberships(nlabels, i):
    """Supply/demand membership arrays of a table vertex whose states are the
    4**nlabels interaction codes, for the edge at position ``i``."""
    codes = np.arange(4 ** nlabels, dtype=np.int64)
    supp = ((codes >> (2 * i)) & 1).astype(bool)
    dem = ((codes >> (2 * i + 1)) & 1).astype(bool)
    return supp, dem


def compress_domination(inst, stash, subsolver=None):
    """Contract components outside ``stash``: each component adjacent to the
    stash becomes one vertex over its interaction codes, keeping its boundary
    edges under their original labels; all other components fold into a single
    zero-degree vertex carrying their summed exact cost."""
    if subsolver is None:
        subsolver = interaction_table_brute
    stash = set(stash)
    for v in stash:
        if not inst.gaifman.has_vertex(v):
            raise ValueError("stash vertex %r not in instance" % (v,))
    depth = next_depth(inst.vertices())
    out = inst.induced(stash)
    rest = inst.gaifman.induced(set(inst.vertices()) - stash)
    sink_total = np.zeros(1, dtype=np.int64)
    for comp in components(rest):
        labels = sorted(
            lab
            for v in comp
            for lab, w in inst.gaifman.adj[v].items()
            if w in stash
        )
        table = subsolver(inst, comp, labels)
        if not labels:
            sink_total = add_sat(sink_total, table)
            continue
        cv = ("comp", min(sort_vertices(comp), key=vkey), depth)
        out.add_vertex(cv, 4 ** len(labels), table)
        for i, lab in enumerate(labels):
            u, v = inst.gaifman.edge_ends[lab]
            inside, outside = (u, v) if v in stash else (v, u)
            c_supp, c_dem = code_memberships(len(labels), i)
            out.add_edge(cv, outside, c_supp, c_dem,
                         inst.supp[outside][lab], inst.dem[outside][lab],
                         label=lab)
    out.add_vertex(("sink", depth), 1, sink_total)
    return out


def equivalent_domination(a, b):
    """Isomorphism up to isolated vertices whose states all cost zero.

    Collapsed component vertices are matched by what identifies them
    observationally: nesting depth plus the set of boundary edge labels.
    A component's labels pin it down, so the matching is forced; everything
    else is matched by id.
    """

    def canon_map(inst):
        out = {}
        for v in inst.vertices():
            if inst.gaifman.degree(v) == 0 and not inst.cost[v].any():
                continue
            if isinstance(v, tuple) and v[0] == "comp":
                key = ("comp", synth_depth(v), tuple(sorted(inst.gaifman.adj[v])))
            else:
                key = v
            if key in out:
                return None
            out[key] = v
        return out

    ca, cb = canon_map(a), canon_map(b)
    if ca is None or cb is None:
        return False
    if set(ca) != set(cb):
        return False
    for key in ca:
        va, vb = ca[key], cb[key]
        if a.domain[va] != b.domain[vb]:
            return False
        if not np.array_equal(a.cost[va], b.cost[vb]):
            return False
    back_a = {v: key for key, v in ca.items()}
    back_b = {v: key for key, v in cb.items()}
    ea = {l: frozenset(back_a[x] for x in p)
          for l, p in a.gaifman.edge_ends.items() if all(x in back_a for x in p)}
    eb = {l: frozenset(back_b[x] for x in p)
          for l, p in b.gaifman.edge_ends.items() if all(x in back_b for x in p)}
    if ea != eb:
        return False
    for lab, pair in ea.items():
        for key in pair:
            if not np.array_equal(a.supp[ca[key]][lab], b.supp[cb[key]][lab]):
                return False
            if not np.array_equal(a.dem[ca[key]][lab], b.dem[cb[key]][lab]):
                return False
    return True
