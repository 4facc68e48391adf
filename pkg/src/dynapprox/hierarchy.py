"""Fully dynamic approximation for both problems on planar-style hosts.

The structure has L levels. A level-1 node keeps its instance explicitly
and recomputes a layered static answer after every batch. A node at level
q >= 2 works in epochs: at epoch start it snapshots its instance, splits
the snapshot into k universes (layer classes removed for the revenue
problem, cleared for domination), compresses each universe with a dynamic
compression state, and hands each compressed instance to a child node one
level down. Updates are relayed through the compression states as short
batches; the node re-epochs after tau updates or as soon as a child
instance outgrows its size budget, which resets every child to a fresh
single-vertex compression. Answers flow back up as maxima of child
answers.
"""

import math
from fractions import Fraction

import numpy as np

from .baker import baker_csp, baker_domination
from .coding import INF_COST
from .compressdyn import CspCompressionState, DomCompressionState
from .csp import AddEdge, AddVertex, RemoveEdge, SetRevenue, encode_mwis
from .decomp import log2_ceilings
from .errors import (InvalidEpsilon, ParameterOverflow, PromiseViolation)
from .gendom import (DominationInstance, DomAddEdge, DomAddVertex,
                     DomRemoveEdge, DomSetCost, clear, involved_vertices)
from .graph import DynGraph, bfs_layers, sort_vertices

SAT = 1 << 63
DELTA_ABS = Fraction(1, 4)

CONFLICT = np.array([[True, True], [True, False]])


def select_L(n, eps):
    """Level count for instance size n and accuracy eps.

    While n stays below the (doubly exponential) threshold where deeper
    recursion pays off, the answer is 1 and the structure degenerates to a
    static recompute per update.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise InvalidEpsilon("eps must be positive, got %s" % (eps,))
    n = max(2, int(n))
    lg = max(1, n.bit_length() - 1)
    gate = float(1 / eps) ** 2
    if gate >= 64 or lg <= 2.0 ** gate:
        return 1
    lln = math.log2(max(2.0, lg))
    llln = math.log2(max(2.0, lln))
    return max(1, int(lln / llln * float(eps) * float(DELTA_ABS)))


def _sat_pow(base, exp):
    if exp * math.log2(max(2, base)) > 63:
        return SAT
    return min(SAT, base ** exp)


def config_tables(n, L, k, s=4, d=5, C=128, c=1, enforce=True):
    """Per-level parameter tables: universe-count budgets g, decency degree
    and domain bounds, and epoch lengths tau. Raises ParameterOverflow when
    the honest recurrences leave the computable range and enforce is set;
    forced setups pass enforce=False and get saturated sentinels instead."""
    n = max(2, int(n))
    g = {L: 2}
    shat = {L: max(1, int(s))}
    dhat = {L: max(1, int(d))}
    for q in range(L, 1, -1):
        g[q - 1] = _sat_pow(g[q], C * k)
        shat[q - 1] = min(SAT, shat[q] * C * k)
        dhat[q - 1] = min(SAT, dhat[q] + _sat_pow(4, C * shat[q] * k))
    lg = log2_ceilings(n)
    tau = {}
    for q in range(2, L + 1):
        tau[q] = max(1, int(n ** ((q - 1) / L)) // (k * lg) ** c)
    if enforce and L >= 2 and (g[1] >= SAT or shat[1] >= SAT or dhat[1] >= SAT):
        raise ParameterOverflow("level-1 parameters for L=%d overflow" % L)
    return {"g": g, "shat": shat, "dhat": dhat, "tau": tau}


class HierarchyConfig:
    """Resolved knobs shared by every node of one hierarchy."""

    def __init__(self, kind, L, k, eps, delta, width_cap, budget, tables,
                 force_tau=None):
        self.kind = kind
        self.L = L
        self.k = k
        self.eps = eps
        self.delta = delta
        self.width_cap = width_cap
        self.budget = budget
        self.tables = tables
        self.force_tau = force_tau

    def tau_for(self, level, n):
        if self.force_tau is not None:
            return self.force_tau
        n = max(2, int(n))
        lg = log2_ceilings(n)
        return max(1, int(n ** ((level - 1) / self.L)) // (self.k * lg))


def _make_node(inst, level, cfg, hier):
    if level <= 1:
        return _LeafNode(inst, cfg)
    return _InnerNode(inst, level, cfg, hier)


class _LeafNode:
    """Level-1 node: static layered recompute over its own instance."""

    def __init__(self, inst, cfg):
        self.inst = inst
        self.cfg = cfg
        self.level = 1
        self._recompute()

    def size(self):
        return len(self.inst.domain)

    def _recompute(self):
        acc = Fraction(1, self.cfg.k)
        if self.cfg.kind == "mwis":
            self.answer = baker_csp(self.inst, acc, budget=self.cfg.budget)
        else:
            self.answer = baker_domination(self.inst, acc,
                                           budget=self.cfg.budget)

    def apply_batch(self, recs):
        for rec in recs:
            rec.apply(self.inst)
        if recs:
            self._recompute()


class _InnerNode:
    """Level q >= 2 node: k compressed universes, one child each."""

    def __init__(self, inst, level, cfg, hier):
        self.inst = inst
        self.level = level
        self.cfg = cfg
        self.hier = hier
        self._start_epoch()

    def size(self):
        return len(self.inst.domain)

    def _start_epoch(self):
        cfg = self.cfg
        k = cfg.k
        self.upd_count = 0
        self.tau = cfg.tau_for(self.level, self.hier.current_n())
        self.universes = []
        self.vsets = []
        self.children = []
        g = self.inst.gaifman
        if cfg.kind == "mwis":
            lay = bfs_layers(g, k)
            for i in range(k):
                vi = set(lay.layer_set(i))
                keep = set(g.vertices()) - vi
                state = CspCompressionState(self.inst.induced(keep),
                                            width_cap=cfg.width_cap,
                                            budget=cfg.budget)
                self.universes.append(state)
                self.vsets.append(vi)
        else:
            lay = bfs_layers(g, 4 * k)
            for i in range(k):
                vi = set(lay.layer_set(4 * i + 1)) | set(lay.layer_set(4 * i + 2))
                state = DomCompressionState(clear(self.inst, vi),
                                            width_cap=cfg.width_cap,
                                            budget=cfg.budget)
                self.universes.append(state)
                self.vsets.append(vi)
        for state in self.universes:
            self.children.append(_make_node(state.star.copy(), self.level - 1,
                                            self.cfg, self.hier))
        self._refresh()

    def _refresh(self):
        self.answer = max(ch.answer for ch in self.children)

    def _shrink(self, i, v):
        """Take v out of universe i's cleared set; returns the relayed
        batch. Edges from v into the still-cleared set get introduced, then
        v's own demands are restored on its preexisting universe edges."""
        state = self.universes[i]
        vset = self.vsets[i]
        pre = sorted(state.cur.gaifman.adj[v])
        out = []
        for lab in sorted(self.inst.gaifman.adj[v]):
            w = self.inst.gaifman.adj[v][lab]
            if w in vset and w != v:
                void = np.zeros(self.inst.domain[w], dtype=bool)
                out.extend(state.apply_update(DomAddEdge(
                    lab, v, w, self.inst.supp[v][lab], self.inst.dem[v][lab],
                    self.inst.supp[w][lab], void)))
        demands = {lab: self.inst.dem[v][lab] for lab in pre}
        out.extend(state.relieve_in_universe(v, demands, labels=pre))
        vset.discard(v)
        return out

    def apply_update(self, rec):
        cfg = self.cfg
        if cfg.kind == "mwis":
            inv = set(rec.involved())
        else:
            inv = set(involved_vertices(rec, self.inst))
        batches = [[] for _ in self.universes]
        if cfg.kind == "mwds":
            for i, vset in enumerate(self.vsets):
                for v in sort_vertices(inv & vset):
                    batches[i].extend(self._shrink(i, v))
        rec.apply(self.inst)
        for i, state in enumerate(self.universes):
            if cfg.kind == "mwis" and inv & self.vsets[i]:
                continue
            batches[i].extend(state.apply_update(rec))
        for i, batch in enumerate(batches):
            if batch:
                self.children[i].apply_batch(batch)
        self.upd_count += 1
        cap = self.hier.child_cap(self.level)
        if (self.upd_count >= self.tau
                or any(ch.size() > cap for ch in self.children)):
            self._start_epoch()
        else:
            self._refresh()

    def apply_batch(self, recs):
        for rec in recs:
            self.apply_update(rec)


def _ceil_div_frac(num, frac):
    val = Fraction(num) / frac
    return -((-val.numerator) // val.denominator)


class Hierarchy:
    """Dynamic (1 - eps) max weight independent set or (1 + eps) min weight
    dominating set over an edge+weight update stream.

    kind "mwis": query() returns an integer p with
    (1 - eps) * OPT <= p <= OPT. kind "mwds" (bounded degree delta_cap):
    query() returns an exact Fraction p with OPT <= p <= (1 + eps) * OPT.
    """

    def __init__(self, g, eps, kind, delta_cap=4, force_L=None,
                 force_tau=None, budget=1 << 26, bulk_init=False):
        eps = Fraction(eps)
        if kind not in ("mwis", "mwds"):
            raise ValueError("kind must be mwis or mwds, got %r" % (kind,))
        if eps <= 0 or (kind == "mwis" and eps >= 1):
            raise InvalidEpsilon("unusable accuracy %s" % (eps,))
        self.kind = kind
        self.eps = eps
        self.delta_cap = int(delta_cap)
        n0 = max(2, len(g.vertices()))
        if kind == "mwds":
            acc = eps / (1 + eps)
            s_in = self.delta_cap
            d_in = self.delta_cap + 1
        else:
            acc = eps
            s_in = max((g.degree(v) for v in g.vertices()), default=1)
            d_in = 2
        L = force_L if force_L is not None else select_L(n0, eps)
        while True:
            k = _ceil_div_frac(L, acc)
            try:
                tables = config_tables(n0, L, k, s=s_in, d=d_in,
                                       enforce=force_L is None)
                break
            except ParameterOverflow:
                if L <= 1:
                    raise
                L -= 1
        self.cfg = HierarchyConfig(kind, L, k, eps, acc,
                                   width_cap=8 * k + 8, budget=budget,
                                   tables=tables, force_tau=force_tau)
        self._build(g, bulk_init)

    # -- construction ----------------------------------------------------

    def _build(self, g, bulk_init):
        if bulk_init:
            self.host = g.copy()
            inst = self._encode(self.host)
            self.root = _make_node(inst, self.cfg.L, self.cfg, self)
            return
        base = DynGraph()
        for v in sort_vertices(g.vertices()):
            base.add_vertex(v, g.weights[v])
        self.host = base
        inst = self._encode(base)
        self.root = _make_node(inst, self.cfg.L, self.cfg, self)
        for lab in sorted(g.edge_ends):
            u, v = g.edge_ends[lab]
            self.add_edge(u, v)

    def _encode(self, host):
        if self.kind == "mwis":
            return encode_mwis(host)
        cap = self.delta_cap
        self._slots = {}
        inst = DominationInstance()
        for v in sort_vertices(host.vertices()):
            labs = sorted(host.adj[v])
            if len(labs) > cap:
                raise PromiseViolation("degree %d of %r exceeds promise %d"
                                       % (len(labs), v, cap))
            self._slots[v] = {lab: j + 1 for j, lab in enumerate(labs)}
            inst.add_vertex(v, cap + 1, self._cost_array(v, host.weights[v]))
        for lab in sorted(host.edge_ends):
            u, v = host.edge_ends[lab]
            inst.add_edge(u, v,
                          self._supp_array(u), self._dem_array(u, lab),
                          self._supp_array(v), self._dem_array(v, lab),
                          label=lab)
        return inst

    # -- slotted domination encoding --------------------------------------

    def _cost_array(self, v, weight):
        """State 0 joins the set at the vertex weight; an occupied slot is a
        free covered state; an empty slot is priced out of every optimum."""
        cost = np.full(self.delta_cap + 1, INF_COST, dtype=np.int64)
        cost[0] = weight
        for j in self._slots[v].values():
            cost[j] = 0
        return cost

    def _supp_array(self, v):
        supp = np.zeros(self.delta_cap + 1, dtype=bool)
        supp[0] = True
        return supp

    def _dem_array(self, v, lab):
        dem = np.zeros(self.delta_cap + 1, dtype=bool)
        dem[self._slots[v][lab]] = True
        return dem

    # -- sizes ------------------------------------------------------------

    def current_n(self):
        return max(2, len(self.host.vertices()))

    def child_cap(self, level):
        n = self.current_n()
        return max(1, math.ceil(n ** ((level - 1) / self.cfg.L)))

    # -- public updates ---------------------------------------------------

    def add_vertex(self, v, weight):
        self.host.add_vertex(v, weight)
        if self.kind == "mwis":
            recs = [AddVertex(v, 2, np.array([0, weight], dtype=np.int64))]
        else:
            self._slots[v] = {}
            recs = [DomAddVertex(v, self.delta_cap + 1,
                                 self._cost_array(v, weight))]
        self.root.apply_batch(recs)

    def add_edge(self, u, v):
        if self.host.has_edge(u, v):
            raise ValueError("edge %r-%r already present" % (u, v))
        if self.kind == "mwis":
            self.host.add_edge(u, v)
            self.root.apply_batch([AddEdge(u, v, CONFLICT)])
            return
        if (len(self._slots[u]) >= self.delta_cap
                or len(self._slots[v]) >= self.delta_cap):
            raise PromiseViolation(
                "adding %r-%r exceeds the degree promise %d"
                % (u, v, self.delta_cap))
        lab = self.host.add_edge(u, v)
        for x in (u, v):
            free = min(set(range(1, self.delta_cap + 1))
                       - set(self._slots[x].values()))
            self._slots[x][lab] = free
        recs = [
            DomSetCost(u, self._cost_array(u, self.host.weights[u])),
            DomSetCost(v, self._cost_array(v, self.host.weights[v])),
            DomAddEdge(lab, u, v,
                       self._supp_array(u), self._dem_array(u, lab),
                       self._supp_array(v), self._dem_array(v, lab)),
        ]
        self.root.apply_batch(recs)

    def remove_edge(self, u, v):
        labs = self.host.labels_between(u, v)
        if not labs:
            raise ValueError("edge %r-%r not present" % (u, v))
        lab = min(labs)
        self.host.remove_edge(lab)
        if self.kind == "mwis":
            self.root.apply_batch([RemoveEdge(u, v)])
            return
        del self._slots[u][lab]
        del self._slots[v][lab]
        recs = [
            DomRemoveEdge(lab),
            DomSetCost(u, self._cost_array(u, self.host.weights[u])),
            DomSetCost(v, self._cost_array(v, self.host.weights[v])),
        ]
        self.root.apply_batch(recs)

    def update_weight(self, v, weight):
        self.host.weights[v] = weight
        if self.kind == "mwis":
            recs = [SetRevenue(v, np.array([0, weight], dtype=np.int64))]
        else:
            recs = [DomSetCost(v, self._cost_array(v, weight))]
        self.root.apply_batch(recs)

    def update(self, op):
        """One parsed stream operation (an ("AE"|"RE"|"UW", ...) tuple)."""
        tag = op[0]
        if tag == "AE":
            self.add_edge(op[1], op[2])
        elif tag == "RE":
            self.remove_edge(op[1], op[2])
        elif tag == "UW":
            self.update_weight(op[1], op[2])
        else:
            raise ValueError("unknown update %r" % (op,))

    # -- queries ----------------------------------------------------------

    def query(self):
        p = self.root.answer
        if self.kind == "mwis":
            return int(p)
        return Fraction(int(p)) * (1 + self.eps)
