"""Tree decompositions, logarithmic-depth rebalancing, elimination forests.

The pipeline is: heuristic decomposition of small width, rebalance to
logarithmic height at the price of tripling the width, then read off an
elimination forest whose reach sets (ancestors adjacent to the descendant
cone) stay within three times the bag size.  Dynamic programming and the
compression scheme both run over these forests.
"""

import heapq
import math

from .errors import InvalidDecomposition, PrefixViolation, WidthExceeded
from .graph import sort_vertices, vkey, vmin


class TreeDecomposition:
    """Forest of bags: ``parent[t]`` is None for roots, ``bag[t]`` a frozenset."""

    def __init__(self, graph):
        self.graph = graph
        self.parent = {}
        self.bag = {}
        self._next = 0

    def add_bag(self, vertices, parent=None):
        t = self._next
        self._next += 1
        self.parent[t] = parent
        self.bag[t] = frozenset(vertices)
        return t

    def nodes(self):
        return list(self.bag)

    def roots(self):
        return [t for t, p in self.parent.items() if p is None]

    def children_map(self):
        ch = {t: [] for t in self.bag}
        for t, p in self.parent.items():
            if p is not None:
                ch[p].append(t)
        return ch

    @property
    def width(self):
        return max((len(b) for b in self.bag.values()), default=0) - 1

    @property
    def height(self):
        """Nodes on the longest root-to-leaf path."""
        depth = self.depths()
        return max(depth.values(), default=0)

    def depths(self):
        depth = {}
        ch = self.children_map()
        for r in self.roots():
            stack = [(r, 1)]
            while stack:
                t, d = stack.pop()
                depth[t] = d
                for c in ch[t]:
                    stack.append((c, d + 1))
        return depth


def td_validate(td, g):
    """Check the three decomposition axioms; raise InvalidDecomposition."""
    seen = {}
    for t, b in td.bag.items():
        for v in b:
            seen.setdefault(v, []).append(t)
    for v in g.vertices():
        if v not in seen:
            raise InvalidDecomposition("vertex %r in no bag" % (v,))
    for lab, (u, v) in g.edge_ends.items():
        if not any(u in td.bag[t] and v in td.bag[t] for t in seen[u]):
            raise InvalidDecomposition("edge %r-%r in no bag" % (u, v))
    # trace connectivity: walking up from every node holding v must meet a
    # single highest node holding v
    depth = td.depths()
    for v, ts in seen.items():
        tops = set()
        for t in ts:
            while td.parent[t] is not None and v in td.bag[td.parent[t]]:
                t = td.parent[t]
            tops.add(t)
        if len(tops) != 1:
            raise InvalidDecomposition("trace of %r is disconnected" % (v,))
    _ = depth
    return True


def _elimination_bags(adj, order):
    """Bags from an elimination order over a component; returns (bags, width).

    ``adj`` maps vertices to neighbor sets and is consumed.
    """
    pos = {v: i for i, v in enumerate(order)}
    bags = []
    width = 0
    for v in order:
        later = {w for w in adj[v] if pos[w] > pos[v]}
        bags.append((v, later))
        width = max(width, len(later))
        for a in later:
            adj[a].discard(v)
            adj[a].update(x for x in later if x != a)
    return bags, width


def _order_min_fill(g, comp):
    adj = {v: {w for w in g.neighbors(v) if w in comp} for v in comp}
    order = []
    left = set(comp)
    while left:
        best = None
        for v in sorted(left, key=vkey):
            nb = adj[v] & left
            fill = 0
            nbl = sorted(nb, key=vkey)
            for i, a in enumerate(nbl):
                for b in nbl[i + 1:]:
                    if b not in adj[a]:
                        fill += 1
            key = (fill, len(nb), vkey(v))
            if best is None or key < best[0]:
                best = (key, v)
        v = best[1]
        nb = adj[v] & left
        nbl = sorted(nb, key=vkey)
        for i, a in enumerate(nbl):
            for b in nbl[i + 1:]:
                adj[a].add(b)
                adj[b].add(a)
        left.remove(v)
        order.append(v)
    return order


def _order_min_degree(g, comp):
    adj = {v: {w for w in g.neighbors(v) if w in comp} for v in comp}
    heap = [(len(adj[v]), vkey(v), v) for v in comp]
    heapq.heapify(heap)
    left = set(comp)
    order = []
    while heap:
        deg, _, v = heapq.heappop(heap)
        if v not in left:
            continue
        cur = adj[v] & left
        if deg != len(cur):
            heapq.heappush(heap, (len(cur), vkey(v), v))
            continue
        nbl = sorted(cur, key=vkey)
        for i, a in enumerate(nbl):
            for b in nbl[i + 1:]:
                if b not in adj[a]:
                    adj[a].add(b)
                    adj[b].add(a)
        left.remove(v)
        order.append(v)
        for a in nbl:
            heapq.heappush(heap, (len(adj[a] & left), vkey(a), a))
    return order


def _component_td(td, g, comp, width_cap, fill_limit):
    comp = set(comp)
    if len(comp) <= fill_limit:
        order = _order_min_fill(g, comp)
    else:
        order = _order_min_degree(g, comp)
    adj = {v: {w for w in g.neighbors(v) if w in comp} for v in comp}
    bags, width = _elimination_bags(adj, order)
    if width_cap is not None and width > width_cap:
        return _layered_component_td(td, g, comp, width_cap)
    pos = {v: i for i, (v, _) in enumerate(bags)}
    ids = {}
    for i in range(len(bags) - 1, -1, -1):
        v, later = bags[i]
        if later:
            par = ids[min(pos[w] for w in later)]
        else:
            par = None
        ids[i] = td.add_bag({v} | later, parent=par)
    return width


def _layered_component_td(td, g, comp, width_cap):
    """Fallback path decomposition from consecutive breadth-first layers."""
    root = vmin(comp)
    dist = {root: 0}
    frontier = [root]
    layers = [[root]]
    while frontier:
        nxt = []
        for v in sorted(frontier, key=vkey):
            for w in sort_vertices(g.neighbors(v)):
                if w in comp and w not in dist:
                    dist[w] = dist[v] + 1
                    nxt.append(w)
        if nxt:
            layers.append(nxt)
        frontier = nxt
    width = 0
    prev = None
    if len(layers) == 1:
        b = set(layers[0])
        width = len(b) - 1
        if width_cap is not None and width > width_cap:
            raise WidthExceeded(width, width_cap)
        td.add_bag(b)
        return width
    for i in range(len(layers) - 1):
        b = set(layers[i]) | set(layers[i + 1])
        width = max(width, len(b) - 1)
        if width_cap is not None and width > width_cap:
            raise WidthExceeded(width, width_cap)
        prev = td.add_bag(b, parent=prev)
    return width


def heuristic_td(g, width_cap=None, fill_limit=160):
    """Small-width decomposition: exhaustive fill-in choice on small
    components, minimum degree elsewhere, breadth-first slabs as a last
    resort under a width cap."""
    from .graph import components

    td = TreeDecomposition(g)
    for comp in components(g):
        _component_td(td, g, comp, width_cap, fill_limit)
    if not g.vertices():
        td.add_bag(set())
    return td


def balance(td):
    """Equivalent decomposition of height O(log n) and width < 3(w+1).

    Each tree is cut along heavy paths: a scope is a contiguous piece of a
    heavy path plus everything hanging off it; its new bag is the union of
    the bags at the piece's two ends and at its weighted midpoint, which
    covers every vertex shared with the outside.  Both half-pieces and every
    subtree hanging at the midpoint carry at most half the scope's weight.
    """
    g = td.graph
    out = TreeDecomposition(g)
    ch = td.children_map()
    for t in ch:
        ch[t].sort()
    size = {}
    for r in td.roots():
        post = []
        stack = [r]
        while stack:
            t = stack.pop()
            post.append(t)
            stack.extend(ch[t])
        for t in reversed(post):
            size[t] = 1 + sum(size[c] for c in ch[t])

    def heavy_path(top):
        path = [top]
        while ch[path[-1]]:
            path.append(max(ch[path[-1]], key=lambda c: (size[c], -c)))
        return path

    for r in sorted(td.roots()):
        # scope: (path, lo, hi, parent bag id in the output)
        stack = [(heavy_path(r), 0, None, None)]
        while stack:
            path, lo, hi, par = stack.pop()
            if hi is None:
                hi = len(path) - 1
            hang = [size[path[i]] - (size[path[i + 1]] if i < len(path) - 1 else 0)
                    for i in range(lo, hi + 1)]
            total = sum(hang)
            acc = 0
            m = hi
            for i, wgt in enumerate(hang):
                acc += wgt
                if 2 * acc >= total:
                    m = lo + i
                    break
            nb = out.add_bag(td.bag[path[m]] | td.bag[path[lo]] | td.bag[path[hi]],
                             parent=par)
            if m > lo:
                stack.append((path, lo, m - 1, nb))
            if m < hi:
                stack.append((path, m + 1, hi, nb))
            skip = path[m + 1] if m < len(path) - 1 else None
            for c in ch[path[m]]:
                if c != skip:
                    stack.append((heavy_path(c), 0, None, nb))
    return out


class EliminationForest:
    """Vertex forest where every graph edge joins an ancestor-descendant pair."""

    def __init__(self, graph, parent):
        self.graph = graph
        self.parent = parent
        self.children = {v: [] for v in parent}
        for v, p in parent.items():
            if p is not None:
                self.children[p].append(v)
        for v in self.children:
            self.children[v] = sort_vertices(self.children[v])
        self.roots = sort_vertices([v for v, p in parent.items() if p is None])
        self.depth = {}
        order = []
        for r in self.roots:
            stack = [(r, 1)]
            while stack:
                v, d = stack.pop()
                self.depth[v] = d
                order.append(v)
                for c in self.children[v]:
                    stack.append((c, d + 1))
        self.top_order = order  # parents before children
        self.reach = self._compute_reach()
        self.desc_min = self._compute_desc_min()

    @property
    def height(self):
        return max(self.depth.values(), default=0)

    def _compute_reach(self):
        reach = {}
        g = self.graph
        for v in reversed(self.top_order):
            acc = set()
            for c in self.children[v]:
                acc.update(reach[c])
            acc.update(g.neighbors(v))
            dv = self.depth[v]
            reach[v] = frozenset(x for x in acc if self.depth[x] < dv)
        return reach

    def _compute_desc_min(self):
        dm = {}
        for v in reversed(self.top_order):
            best = v
            for c in self.children[v]:
                if vkey(dm[c]) < vkey(best):
                    best = dm[c]
            dm[v] = best
        return dm

    def ancestors(self, v):
        """Strict ancestors, nearest first."""
        p = self.parent[v]
        while p is not None:
            yield p
            p = self.parent[p]

    def is_ancestor(self, a, v):
        while v is not None:
            if v == a:
                return True
            v = self.parent[v]
        return False

    def validate(self):
        for lab, (u, v) in self.graph.edge_ends.items():
            lo, hi = (u, v) if self.depth[u] >= self.depth[v] else (v, u)
            if not self.is_ancestor(hi, lo):
                raise InvalidDecomposition(
                    "edge %r-%r endpoints unrelated in forest" % (u, v))
        return True


def elimination_forest(td, balanced=True):
    """Forest from a decomposition: balance it, chain each bag's new vertices,
    then shortcut every vertex to the deepest member of its reach set.

    Height stays O(width * log n) and every reach set has at most 3(w+1)
    vertices, where w is the input decomposition's width.  With balanced=False
    the balancing pass is skipped: reach sets shrink to at most w+1 vertices
    but the height guarantee is lost, which is fine for one-shot solves.
    """
    bal = balance(td) if balanced else td
    g = td.graph
    depth = bal.depths()
    ch = bal.children_map()
    intro = {t: [] for t in bal.bag}
    best = {}
    for t, b in bal.bag.items():
        for v in b:
            if v not in best or depth[t] < depth[best[v]]:
                best[v] = t
    for v, t in best.items():
        intro[t].append(v)
    parent = {}
    for r in sorted(bal.roots()):
        # last vertex of the nearest ancestor bag that introduced anything
        stack = [(r, None)]
        while stack:
            t, above = stack.pop()
            chain = sort_vertices(intro[t])
            prev = above
            for v in chain:
                parent[v] = prev
                prev = v
            for c in ch[t]:
                stack.append((c, prev))
    # shortcut every vertex to the deepest member of its reach set, repeating
    # until stable: parents only move up and reach sets only shrink, and at
    # the end each non-root hangs directly below the deepest vertex adjacent
    # to its descendant cone, so cones are connected and the parent always
    # belongs to the reach set
    f = EliminationForest(g, parent)
    while True:
        parent2 = {}
        for v in f.parent:
            r = f.reach[v]
            parent2[v] = max(r, key=lambda x: f.depth[x]) if r else None
        if parent2 == f.parent:
            return f
        f = EliminationForest(g, parent2)


def appendices(forest, stash):
    """Vertices just below the stash: not in it, parent in it or absent.

    Raises PrefixViolation unless the stash is upward closed.
    """
    stash = set(stash)
    for v in stash:
        p = forest.parent[v]
        if p is not None and p not in stash:
            raise PrefixViolation("%r in stash, parent %r outside" % (v, p))
    out = []
    for v in forest.parent:
        if v in stash:
            continue
        p = forest.parent[v]
        if p is None or p in stash:
            out.append(v)
    return sort_vertices(out)


def log2_ceilings(n):
    return max(1, math.ceil(math.log2(max(2, n))))
