"""Dynamic vertex-weighted multigraph with labeled edges, plus BFS layering.

Vertex ids are either ints (host graphs) or structured tuples created by
compression: ("agg", frozenset, depth), ("comp", id, depth), ("sink", depth).
The depth component is the compression nesting level, so the synthetic ids of
one compression can never collide with relayed ids from an enclosing one.
`vkey` gives the canonical total order used everywhere ordering matters.
"""

from collections import deque

WEIGHT_CAP = 1 << 40  # per-value cap so exact int64 sums never overflow


def vkey(v):
    """Deterministic sort key over mixed vertex ids."""
    if isinstance(v, int):
        return (0, v)
    if isinstance(v, tuple):
        if v[0] == "agg" and len(v) == 3:
            return (1, tuple(sorted(vkey(x) for x in v[1])), v[2])
        if v[0] == "comp" and len(v) == 3:
            return (2, vkey(v[1]), v[2])
        if v[0] == "sink" and len(v) == 2:
            return (3, v[1])
    raise TypeError(f"unsupported vertex id: {v!r}")


def synth_depth(v):
    """Compression nesting depth of an id; plain input ids sit at depth 0."""
    if isinstance(v, tuple) and v[0] in ("agg", "comp", "sink"):
        return v[-1]
    return 0


def next_depth(vs):
    """Depth for synthetic ids of a compression over these vertices."""
    return 1 + max((synth_depth(v) for v in vs), default=0)


def sort_vertices(vs):
    return sorted(vs, key=vkey)


def vmin(vs):
    return min(vs, key=vkey)


def _check_weight(w):
    if not isinstance(w, int) or isinstance(w, bool):
        raise ValueError(f"weight must be int, got {w!r}")
    if w < 0 or w >= WEIGHT_CAP:
        raise ValueError(f"weight {w} outside [0, 2^40)")


class DynGraph:
    """Adjacency-dict multigraph. Labels are ints, unique, monotone at insertion."""

    def __init__(self, simple=False):
        self.simple = simple
        self.weights = {}          # vertex -> weight
        self.adj = {}              # vertex -> {label: other endpoint}
        self.edge_ends = {}        # label -> (u, v)
        self.pair_labels = {}      # frozenset({u,v}) -> set of labels
        self.next_label = 0

    @property
    def n(self):
        return len(self.weights)

    @property
    def m(self):
        return len(self.edge_ends)

    def vertices(self):
        return self.weights.keys()

    def has_vertex(self, v):
        return v in self.weights

    def add_vertex(self, v, weight=0):
        if v in self.weights:
            raise ValueError(f"vertex {v!r} already present")
        _check_weight(weight)
        vkey(v)  # validates the id shape
        self.weights[v] = weight
        self.adj[v] = {}

    def set_weight(self, v, weight):
        _check_weight(weight)
        if v not in self.weights:
            raise KeyError(v)
        self.weights[v] = weight

    def add_edge(self, u, v, label=None):
        if u not in self.weights or v not in self.weights:
            raise KeyError(f"endpoint missing for edge {u!r}-{v!r}")
        if u == v:
            raise ValueError("self loops are not supported")
        pair = frozenset((u, v))
        if self.simple and self.pair_labels.get(pair):
            raise ValueError(f"edge {u!r}-{v!r} already present in simple graph")
        if label is None:
            label = self.next_label
        elif label in self.edge_ends:
            raise ValueError(f"label {label} already in use")
        self.next_label = max(self.next_label, label + 1)
        self.edge_ends[label] = (u, v)
        self.adj[u][label] = v
        self.adj[v][label] = u
        self.pair_labels.setdefault(pair, set()).add(label)
        return label

    def remove_edge(self, label):
        if label not in self.edge_ends:
            raise KeyError(f"no edge with label {label}")
        u, v = self.edge_ends.pop(label)
        del self.adj[u][label]
        del self.adj[v][label]
        pair = frozenset((u, v))
        self.pair_labels[pair].discard(label)
        if not self.pair_labels[pair]:
            del self.pair_labels[pair]
        return (u, v)

    def labels_between(self, u, v):
        return set(self.pair_labels.get(frozenset((u, v)), ()))

    def has_edge(self, u, v):
        return bool(self.pair_labels.get(frozenset((u, v))))

    def neighbors(self, v):
        return set(self.adj[v].values())

    def incident(self, v):
        """Labels of edges at v."""
        return set(self.adj[v].keys())

    def degree(self, v):
        return len(self.adj[v])

    def copy(self):
        g = DynGraph(simple=self.simple)
        g.weights = dict(self.weights)
        g.adj = {v: dict(d) for v, d in self.adj.items()}
        g.edge_ends = dict(self.edge_ends)
        g.pair_labels = {p: set(s) for p, s in self.pair_labels.items()}
        g.next_label = self.next_label
        return g

    def induced(self, keep):
        keep = set(keep)
        g = DynGraph(simple=self.simple)
        for v in self.weights:
            if v in keep:
                g.add_vertex(v, self.weights[v])
        for label, (u, v) in self.edge_ends.items():
            if u in keep and v in keep:
                g.add_edge(u, v, label=label)
        g.next_label = max(g.next_label, self.next_label)
        return g


def components(g):
    """Connected components as frozensets, sorted by their smallest vertex."""
    seen = set()
    out = []
    for s in sort_vertices(g.vertices()):
        if s in seen:
            continue
        comp = {s}
        seen.add(s)
        dq = deque([s])
        while dq:
            x = dq.popleft()
            for y in g.neighbors(x):
                if y not in comp:
                    comp.add(y)
                    seen.add(y)
                    dq.append(y)
        out.append(frozenset(comp))
    return out


class LayerAssignment:
    """BFS layers mod k. `layer[v]` in [0,k); `dist[v]` is the raw BFS distance."""

    def __init__(self, k, layer, dist):
        self.k = k
        self.layer = layer
        self.dist = dist

    def layer_set(self, i):
        return {v for v, l in self.layer.items() if l == i}

    def __eq__(self, other):
        return (isinstance(other, LayerAssignment) and self.k == other.k
                and self.layer == other.layer)


def bfs_layers(g, k):
    """Per component: root at the smallest vertex id, BFS, layer = dist mod k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    dist = {}
    for comp in components(g):
        root = vmin(comp)
        dist[root] = 0
        dq = deque([root])
        while dq:
            x = dq.popleft()
            for y in sort_vertices(g.neighbors(x)):
                if y not in dist:
                    dist[y] = dist[x] + 1
                    dq.append(y)
    layer = {v: d % k for v, d in dist.items()}
    return LayerAssignment(k, layer, dist)


# --- text formats ------------------------------------------------------------
#
# graph file:    "n m" header, then n lines "v <id> <weight>", m lines "e <u> <v>"
# update stream: lines "AE u v" | "RE u v" | "UW u w" | "Q"; '#' starts a comment


class ParseError(ValueError):
    pass


def parse_graph(text):
    lines = _content_lines(text)
    if not lines:
        raise ParseError("empty graph file")
    head = lines[0].split()
    if len(head) != 2:
        raise ParseError(f"bad header {lines[0]!r}, want 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise ParseError(f"bad header {lines[0]!r}") from None
    if len(lines) != 1 + n + m:
        raise ParseError(f"expected {1 + n + m} lines, got {len(lines)}")
    g = DynGraph(simple=True)
    for ln in lines[1:1 + n]:
        parts = ln.split()
        if len(parts) != 3 or parts[0] != "v":
            raise ParseError(f"bad vertex line {ln!r}")
        try:
            g.add_vertex(int(parts[1]), int(parts[2]))
        except ValueError as e:
            raise ParseError(f"bad vertex line {ln!r}: {e}") from None
    for ln in lines[1 + n:]:
        parts = ln.split()
        if len(parts) != 3 or parts[0] != "e":
            raise ParseError(f"bad edge line {ln!r}")
        try:
            g.add_edge(int(parts[1]), int(parts[2]))
        except (ValueError, KeyError) as e:
            raise ParseError(f"bad edge line {ln!r}: {e}") from None
    return g


def format_graph(g):
    out = [f"{g.n} {g.m}"]
    for v in sort_vertices(g.vertices()):
        out.append(f"v {v} {g.weights[v]}")
    for label in sorted(g.edge_ends):
        u, v = g.edge_ends[label]
        u, v = sorted((u, v))
        out.append(f"e {u} {v}")
    return "\n".join(out) + "\n"


def parse_stream(text):
    ops = []
    for ln in _content_lines(text):
        parts = ln.split()
        op = parts[0]
        try:
            if op == "Q":
                if len(parts) != 1:
                    raise ParseError(f"bad query line {ln!r}")
                ops.append(("Q",))
            elif op in ("AE", "RE"):
                if len(parts) != 3:
                    raise ParseError(f"bad edge op {ln!r}")
                ops.append((op, int(parts[1]), int(parts[2])))
            elif op == "UW":
                if len(parts) != 3:
                    raise ParseError(f"bad weight op {ln!r}")
                ops.append((op, int(parts[1]), int(parts[2])))
            else:
                raise ParseError(f"unknown op {op!r}")
        except ValueError as e:
            if isinstance(e, ParseError):
                raise
            raise ParseError(f"bad line {ln!r}") from None
    return ops


def format_stream(ops):
    out = []
    for op in ops:
        out.append(" ".join(str(x) for x in op))
    return "\n".join(out) + "\n"


def _content_lines(text):
    out = []
    for raw in text.splitlines():
        ln = raw.split("#", 1)[0].strip()
        if ln:
            out.append(ln)
    return out
