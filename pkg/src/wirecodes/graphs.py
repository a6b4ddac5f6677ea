"""Wire codes local on arbitrary graphs: expansion, congestion routing, embeddings."""

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx
import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from . import _kernels
from .layout import PlacedWireCode, apply_routes, color_classes
from .wire import build_wire_code

PLAN_FORMAT = "embedplan/1"
CHEEGER_MAX_VERTICES = 22
CONGESTION_TARGET = 15


class GraphFormatError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class EmbeddingError(ValueError):
    pass


class GeneralGraph:
    """Simple undirected graph on vertices ``0..n-1``."""

    def __init__(self, n, edges, labels=None):
        self.n = int(n)
        seen = set()
        clean = []
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range for {self.n} vertices")
            if u == v:
                raise ValueError(f"self-loop on vertex {u}")
            key = (min(u, v), max(u, v))
            if key not in seen:
                seen.add(key)
                clean.append(key)
        self.edges = clean
        self.labels = labels
        self.adj = [set() for _ in range(self.n)]
        for u, v in clean:
            self.adj[u].add(v)
            self.adj[v].add(u)
        self._csr = None
        self._edge_index = {e: i for i, e in enumerate(clean)}

    @property
    def max_degree(self):
        return max((len(a) for a in self.adj), default=0)

    @property
    def n_edges(self):
        return len(self.edges)

    def edge_id(self, u, v):
        return self._edge_index[(min(u, v), max(u, v))]

    def adjacent(self, u, v):
        return v in self.adj[u]

    def distance(self, u, v):
        """0 on the same vertex, 1 across an edge, 2 for anything further (locality only needs this)."""
        if u == v:
            return 0
        return 1 if self.adjacent(u, v) else 2

    def csr(self):
        if self._csr is None:
            src, dst, eid = [], [], []
            for i, (u, v) in enumerate(self.edges):
                src += [u, v]
                dst += [v, u]
                eid += [i, i]
            src, dst, eid = np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64), np.array(eid, dtype=np.int64)
            order = np.lexsort((dst, src))
            indptr = np.zeros(self.n + 1, dtype=np.int64)
            np.add.at(indptr, src + 1, 1)
            self._csr = (np.cumsum(indptr), dst[order], eid[order])
        return self._csr

    def adjacency_matrix(self):
        if not self.edges:
            return sparse.csr_matrix((self.n, self.n))
        u, v = np.array(self.edges).T
        a = sparse.coo_matrix((np.ones(u.size), (u, v)), shape=(self.n, self.n))
        return (a + a.T).tocsr()

    def is_connected(self):
        if self.n <= 1:
            return True
        k, _ = csgraph.connected_components(self.adjacency_matrix(), directed=False)
        return k == 1

    def hop_distances(self):
        return csgraph.shortest_path(self.adjacency_matrix(), unweighted=True, directed=False)

    def to_dict(self):
        return {"kind": "graph", "n": self.n, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_dict(cls, doc):
        return cls(doc["n"], doc["edges"], doc.get("labels"))

    @classmethod
    def from_networkx(cls, g):
        g = nx.convert_node_labels_to_integers(g)
        return cls(g.number_of_nodes(), g.edges())

    # a few standard families
    @classmethod
    def cycle(cls, n):
        return cls(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def path(cls, n):
        return cls(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def complete(cls, n):
        return cls(n, [(i, j) for i in range(n) for j in range(i + 1, n)])

    @classmethod
    def random_regular(cls, n, d, seed=0):
        return cls.from_networkx(nx.random_regular_graph(d, n, seed=seed))

    @classmethod
    def grid(cls, width, height):
        return cls.from_networkx(nx.grid_2d_graph(width, height))


def parse_edge_list(text):
    """``u v`` per line, 0-indexed, ``#`` comments; vertex count = max id + 1."""
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"expected 'u v', got {line!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"non-integer vertex in {line!r}", lineno) from None
        if u < 0 or v < 0:
            raise GraphFormatError("vertex ids must be non-negative", lineno)
        if u == v:
            raise GraphFormatError(f"self-loop on vertex {u}", lineno)
        edges.append((u, v))
    if not edges:
        raise GraphFormatError("no edges found")
    n = 1 + max(max(e) for e in edges)
    return GeneralGraph(n, edges)


def load_graph(path):
    with open(path) as fh:
        return parse_edge_list(fh.read())


# ---------------------------------------------------------------------------
# expansion
# ---------------------------------------------------------------------------

def cheeger_exact(g):
    """min over cuts of |E(S, S^c)| / min(|S|, |S^c|), by enumerating every subset."""
    if g.n > CHEEGER_MAX_VERTICES:
        raise ValueError(f"exact expansion needs at most {CHEEGER_MAX_VERTICES} vertices, got {g.n}")
    if g.n < 2:
        raise ValueError("expansion needs at least two vertices")
    # fix vertex n-1 outside S: every cut is counted once
    subsets = np.arange(1, 1 << (g.n - 1), dtype=np.int64)
    cut = np.zeros(subsets.size, dtype=np.int64)
    for u, v in g.edges:
        cut += ((subsets >> u) ^ (subsets >> v)) & 1
    size = np.zeros(subsets.size, dtype=np.int64)
    for u in range(g.n - 1):
        size += (subsets >> u) & 1
    small = np.minimum(size, g.n - size)
    # float argmin narrows the candidates, exact fractions break near-ties
    ratio = cut / small
    close = np.flatnonzero(ratio <= ratio.min() * (1 + 1e-12))
    return min(Fraction(int(cut[i]), int(small[i])) for i in close)


def expansion_lower_bound(g, tol=1e-8, max_iter=200000, seed=0):
    """Half the algebraic connectivity, by power iteration on ``c I - L`` off the constant vector.

    A screening estimate only: lambda_2 / 2 never exceeds the exact edge expansion.
    """
    if g.n < 2 or not g.is_connected():
        return 0.0
    a = g.adjacency_matrix()
    deg = np.asarray(a.sum(axis=1)).ravel()
    lap = sparse.diags(deg) - a
    shift = 2.0 * deg.max() + 1.0  # strictly above the largest Laplacian eigenvalue
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(g.n)
    x -= x.mean()
    x /= np.linalg.norm(x)
    mu = 0.0
    for _ in range(max_iter):
        y = shift * x - lap @ x
        y -= y.mean()
        norm = np.linalg.norm(y)
        if norm == 0:
            return 0.0
        y /= norm
        new_mu = float(y @ (shift * y - lap @ y))
        if abs(new_mu - mu) < tol * max(1.0, abs(new_mu)) and np.linalg.norm(y - x) < 1e-6:
            mu = new_mu
            break
        mu, x = new_mu, y
    return max(0.0, (shift - mu) / 2.0)


# ---------------------------------------------------------------------------
# congestion-aware routing
# ---------------------------------------------------------------------------

@dataclass
class CongestionRouting:
    pairs: list
    paths: list
    usage: Counter

    @property
    def congestion(self):
        return max(self.usage.values(), default=0)

    def recount(self, g):
        usage = Counter()
        for path in self.paths:
            for a, b in zip(path, path[1:]):
                usage[g.edge_id(a, b)] += 1
        return usage


def route_congestion(g, pairs, seed=0, beta=2.0):
    """Sequential cheapest paths with edge cost ``beta ** usage`` in a seeded random order."""
    indptr, indices, eids = g.csr()
    usage = np.zeros(max(1, g.n_edges))
    vblock = np.zeros(g.n, dtype=np.bool_)
    eblock = np.zeros(max(1, g.n_edges), dtype=np.bool_)
    vcost = np.zeros(g.n)
    rng = np.random.default_rng(seed)
    paths = [None] * len(pairs)
    for i in rng.permutation(len(pairs)):
        src, dst = pairs[i]
        if src == dst:
            paths[i] = [int(src)]
            continue
        p = _kernels.dijkstra_path(indptr, indices, eids, src, dst, beta ** usage, vcost, vblock, eblock)
        if p.size == 0:
            raise EmbeddingError(f"vertices {src} and {dst} are not connected")
        for a, b in zip(p[:-1], p[1:]):
            usage[g.edge_id(int(a), int(b))] += 1
        paths[i] = [int(v) for v in p]
    counts = Counter({e: int(c) for e, c in enumerate(usage) if c})
    return CongestionRouting(list(pairs), paths, counts)


# ---------------------------------------------------------------------------
# embedding plans
# ---------------------------------------------------------------------------

@dataclass
class EmbeddingPlan:
    eta_qubit: list
    eta_check: list
    paths: dict  # (q, s) -> vertex path from eta_qubit[q] to eta_check[s]
    congestion: Counter = field(default_factory=Counter)
    c: int = 0
    class_of: dict = field(default_factory=dict)

    def finalize(self, g):
        """Recount edge congestion and the largest per-vertex / per-edge multiplicity."""
        edge = Counter()
        vertex = Counter(self.eta_qubit) + Counter(self.eta_check)
        for path in self.paths.values():
            for a, b in zip(path, path[1:]):
                edge[g.edge_id(a, b)] += 1
            vertex.update(path[1:-1])
        self.congestion = edge
        self.c = max(max(edge.values(), default=0), max(vertex.values(), default=0))
        return self

    @property
    def max_congestion(self):
        return max(self.congestion.values(), default=0)

    def to_dict(self):
        return {
            "format": PLAN_FORMAT,
            "eta_qubit": list(self.eta_qubit),
            "eta_check": list(self.eta_check),
            "paths": [[q, s, list(p)] for (q, s), p in sorted(self.paths.items())],
            "congestion": [[e, c] for e, c in sorted(self.congestion.items())],
            "c": self.c,
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, doc):
        if doc.get("format") != PLAN_FORMAT:
            raise ValueError(f"expected format {PLAN_FORMAT!r}, got {doc.get('format')!r}")
        return cls(
            list(doc["eta_qubit"]),
            list(doc["eta_check"]),
            {(q, s): list(p) for q, s, p in doc["paths"]},
            Counter({e: c for e, c in doc["congestion"]}),
            doc["c"],
        )

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _assignment_cost(dist, eta, incidences, n):
    return sum(dist[eta[q], eta[n + s]] for q, s in incidences)


def assign_vertices(code, g, rng, allow_stacking=False, dist=None):
    """Seeded random assignment of qubits and checks to vertices, then a swap local search."""
    n, m = code.n, code.m
    if not allow_stacking and n + m > g.n:
        raise EmbeddingError(f"{n} qubits + {m} checks need {n + m} vertices, graph has {g.n}")
    if dist is None:
        dist = g.hop_distances()
    if np.isinf(dist).any():
        raise EmbeddingError("graph is not connected")
    if allow_stacking:
        eta = list(rng.integers(g.n, size=n + m))
    else:
        eta = list(rng.permutation(g.n)[: n + m])
    incidences = [(q, s) for s, c in enumerate(code.checks) for q in c.support]
    cost = _assignment_cost(dist, eta, incidences, n)
    for _ in range(2 * n):
        i = int(rng.integers(n + m))
        v = int(rng.integers(g.n))
        trial = list(eta)
        if v in trial and not allow_stacking:
            j = trial.index(v)
            trial[i], trial[j] = trial[j], trial[i]
        else:
            trial[i] = v
        new = _assignment_cost(dist, trial, incidences, n)
        if new < cost:
            eta, cost = trial, new
    return [int(v) for v in eta[:n]], [int(v) for v in eta[n:]]


def plan_embedding(code, g, seed=0, allow_stacking=False):
    """Vertex assignment plus per-colour-class congestion routing of every (qubit, check) pair."""
    rng = np.random.default_rng(seed)
    eta_q, eta_s = assign_vertices(code, g, rng, allow_stacking)
    paths, class_of = {}, {}
    total = Counter()
    for c, members in enumerate(color_classes(code).classes):
        pairs = [(eta_q[q], eta_s[s]) for q, s in members]
        routing = route_congestion(g, pairs, seed=int(rng.integers(2**31)))
        total += routing.usage
        for pair, path in zip(members, routing.paths):
            paths[pair] = path
            class_of[pair] = c
    plan = EmbeddingPlan(eta_q, eta_s, paths, class_of=class_of).finalize(g)
    assert plan.congestion == total
    return plan


def embed_with_plan(wire, plan, g):
    """Stretch every (qubit, check) port edge along the plan's path and place the result on ``g``."""
    code = wire.input
    need = {(q, s) for s, c in enumerate(code.checks) for q in c.support}
    if set(plan.paths) != need:
        raise EmbeddingError("plan does not cover exactly the (qubit, check) incidences of the wire code")
    if len(plan.eta_qubit) != code.n or len(plan.eta_check) != code.m:
        raise EmbeddingError("plan vertex assignment does not match the wire code")
    wire = wire.copy()
    home = [None] * wire.n
    for u in range(wire.n):
        reg = wire.register[u]
        if reg == "data":
            home[u] = plan.eta_qubit[u]
        else:
            owner = wire.owner[wire.single_of[u]]
            if owner[0] == "branch":
                home[u] = plan.eta_qubit[owner[1]]
            elif owner[0] == "check":
                home[u] = plan.eta_check[owner[1]]
            else:
                raise EmbeddingError(f"qubit {u} has no provenance")
    routes = []
    for (q, s), path in sorted(plan.paths.items()):
        if path[0] != plan.eta_qubit[q] or path[-1] != plan.eta_check[s]:
            raise EmbeddingError(f"path for ({q}, {s}) does not join its endpoints")
        u = wire.port[(s, q)]
        gauge = next(gi for gi in wire.anc_of[s] if u in wire.terms[gi])
        routes.append((u, gauge, list(path)))
    apply_routes(wire, home, routes)
    return PlacedWireCode(wire, home, g, {"layout": "graph"})


def embed_on_graph(code, g, seed=0, reduce=True, allow_stacking=False):
    """Place a wire code so every multi-qubit gauge sits on one vertex or one edge of ``g``.

    With ``reduce`` the checks are first brought to weight and degree three;
    without it each check keeps its weight and each (qubit, check) pair gets
    its own branch along the routed path.
    """
    plan = plan_embedding(code, g, seed, allow_stacking)
    wire = build_wire_code(code, reduce=reduce)
    placed = embed_with_plan(wire, plan, g)
    placed.meta.update(
        {
            "reduce": reduce,
            "seed": seed,
            "congestion": plan.max_congestion,
            "congestion_target": CONGESTION_TARGET,
            "c": plan.c,
            "inputs": code.n + code.m,
            "vertices": g.n,
            # screening only: the density premise is reported, never enforced
            "expansion_lower_bound": expansion_lower_bound(g),
        }
    )
    placed.plan = plan
    return placed
