"""Local layouts of wire codes on 2D and D-dimensional grids.

Every layout follows the same recipe.  The abstract wire code is built
first; each qubit gets a home vertex and each multi-qubit gauge a junction
vertex.  Any qubit of a gauge that does not sit on the junction has its
Tanner edge stretched along a grid path that ends on the junction, one new
qubit per path vertex after the first.  Afterwards every gauge check is
either a two-qubit link between neighbouring vertices or sits entirely on
one vertex (stacked qubits).
"""

import json
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .wire import WireCode, build_wire_code

PLACED_FORMAT = "placed/1"


class RoutingError(RuntimeError):
    def __init__(self, pair, retries, message=None):
        self.pair = pair
        self.retries = retries
        super().__init__(message or f"no route for pair {pair} after {retries} retries")


# ---------------------------------------------------------------------------
# grid graph
# ---------------------------------------------------------------------------

class GridTarget:
    """Axis-aligned grid ``extents[0] x ... x extents[D-1]`` with nearest-neighbour edges."""

    def __init__(self, extents):
        self.extents = tuple(int(e) for e in extents)
        if len(self.extents) < 1 or min(self.extents) < 1:
            raise ValueError(f"bad grid extents {extents}")
        self._csr = None

    @property
    def D(self):
        return len(self.extents)

    @property
    def n_vertices(self):
        return int(np.prod(self.extents))

    def index(self, coord):
        return int(np.ravel_multi_index(tuple(coord), self.extents))

    def coord(self, i):
        return tuple(int(c) for c in np.unravel_index(int(i), self.extents))

    def contains(self, coord):
        return len(coord) == self.D and all(0 <= c < e for c, e in zip(coord, self.extents))

    @staticmethod
    def distance(a, b):
        return sum(abs(x - y) for x, y in zip(a, b))

    def adjacent(self, a, b):
        return self.distance(a, b) == 1

    def csr(self):
        """(indptr, indices, edge_ids) adjacency with one id per undirected edge."""
        if self._csr is None:
            ids = np.arange(self.n_vertices).reshape(self.extents)
            us, vs = [], []
            for axis in range(self.D):
                lo = [slice(None)] * self.D
                hi = [slice(None)] * self.D
                lo[axis] = slice(0, -1)
                hi[axis] = slice(1, None)
                us.append(ids[tuple(lo)].ravel())
                vs.append(ids[tuple(hi)].ravel())
            u = np.concatenate(us) if us else np.zeros(0, dtype=np.int64)
            v = np.concatenate(vs) if vs else np.zeros(0, dtype=np.int64)
            eid = np.arange(u.size)
            src = np.concatenate([u, v])
            dst = np.concatenate([v, u])
            eids = np.concatenate([eid, eid])
            order = np.lexsort((dst, src))
            src, dst, eids = src[order], dst[order], eids[order]
            indptr = np.zeros(self.n_vertices + 1, dtype=np.int64)
            np.add.at(indptr, src + 1, 1)
            self._csr = (np.cumsum(indptr), dst.astype(np.int64), eids.astype(np.int64), int(u.size))
        return self._csr[:3]

    @property
    def n_edges(self):
        self.csr()
        return self._csr[3]

    def edge_id(self, a, b):
        indptr, indices, eids = self.csr()
        ia, ib = self.index(a), self.index(b)
        for k in range(indptr[ia], indptr[ia + 1]):
            if indices[k] == ib:
                return int(eids[k])
        raise KeyError(f"{a} and {b} are not adjacent")

    def to_dict(self):
        return {"kind": "grid", "extents": list(self.extents)}


# ---------------------------------------------------------------------------
# colour classes and routing
# ---------------------------------------------------------------------------

@dataclass
class ColorClasses:
    classes: list

    def __len__(self):
        return len(self.classes)

    def class_of(self):
        return {pair: c for c, members in enumerate(self.classes) for pair in members}


def incidence_pairs(code):
    return [(q, s) for s, c in enumerate(code.checks) for q in c.support]


def color_classes(code):
    """Greedy colouring of (qubit, check) incidences; pairs sharing a qubit or a check conflict."""
    used_q, used_s = {}, {}
    classes = []
    for q, s in incidence_pairs(code):
        taken = used_q.setdefault(q, set()) | used_s.setdefault(s, set())
        c = 0
        while c in taken:
            c += 1
        if c == len(classes):
            classes.append([])
        classes[c].append((q, s))
        used_q[q].add(c)
        used_s[s].add(c)
    return ColorClasses(classes)


@dataclass
class RoutedPaths:
    pairs: list
    paths: list
    grid: GridTarget
    base: int = 0
    attempts: int = 1

    def edge_usage(self):
        usage = Counter()
        for path in self.paths:
            for a, b in zip(path, path[1:]):
                usage[frozenset((a, b))] += 1
        return usage

    def vertex_usage(self):
        usage = Counter()
        for path in self.paths:
            usage.update(set(path))
        return usage

    @property
    def height_ratio(self):
        return self.grid.extents[-1] / self.base if self.base else float("nan")

    def check(self, vertex_disjoint=False):
        """Assert connectivity, endpoints and per-edge (optionally per-vertex) capacity one."""
        for (src, dst), path in zip(self.pairs, self.paths):
            assert tuple(path[0]) == tuple(src) and tuple(path[-1]) == tuple(dst), "endpoint mismatch"
            for a, b in zip(path, path[1:]):
                assert self.grid.adjacent(a, b), f"non-grid step {a}->{b}"
        assert max(self.edge_usage().values(), default=0) <= 1, "edge used twice"
        if vertex_disjoint:
            assert max(self.vertex_usage().values(), default=0) <= 1, "vertex used twice"
        return True


def _face_exits(grid, pairs):
    """Per pair, the vertex and edge just off a bottom/top face endpoint."""
    top = grid.extents[-1] - 1
    verts, edges = [], []
    for a, b in pairs:
        vs, es = [], []
        for v, dz in ((a, 1), (b, -1)):
            w = v[:-1] + (v[-1] + dz,)
            if v[-1] in (0, top) and grid.contains(w) and w not in (a, b):
                es.append(grid.edge_id(v, w))
                if 0 < w[-1] < top:
                    vs.append(grid.index(w))
        verts.append(np.array(vs, dtype=np.int64))
        edges.append(np.array(es, dtype=np.int64))
    return verts, edges


def _negotiate(grid, pairs, vertex_disjoint, block_faces, rng, max_iter):
    """Returns ``(paths, None)`` on success or ``(None, failing_pair_index)``."""
    indptr, indices, eids = grid.csr()
    ends = [(grid.index(a), grid.index(b)) for a, b in pairs]
    vblock = np.zeros(grid.n_vertices, dtype=np.bool_)
    if block_faces:
        faces = np.zeros(grid.extents, dtype=np.bool_)
        faces[..., 0] = True
        faces[..., -1] = True
        vblock |= faces.ravel()
    if vertex_disjoint:
        for a, b in ends:
            vblock[a] = vblock[b] = True
    # the step off the face at each endpoint belongs to that pair alone
    own_v, own_e = _face_exits(grid, pairs)
    eblock = np.zeros(max(1, grid.n_edges), dtype=np.bool_)
    for vs, es in zip(own_v, own_e):
        vblock[vs] = True
        eblock[es] = True
    orders = np.array([np.arange(len(pairs))] + [rng.permutation(len(pairs)) for _ in range(max_iter - 1)])
    ok, fail, paths = _kernels.negotiate_routes(
        indptr, indices, eids, [a for a, _ in ends], [b for _, b in ends], vblock, eblock,
        own_v, own_e, vertex_disjoint, orders,
    )
    if not ok:
        return None, fail
    return [[grid.coord(v) for v in p] for p in paths], None


def route_grid(pairs, grid, seed=0, retries=8, vertex_disjoint=False, grow=None, block_faces=False, max_iter=100):
    """Route every (source, sink) pair with capacity one per grid edge.

    Uses negotiated congestion (repeated rip-up and reroute with growing
    penalties on shared edges).  With ``vertex_disjoint`` interior vertices
    have capacity one as well; ``block_faces`` keeps paths off the bottom and
    top faces except at their own endpoints.  If routing does not converge
    and ``grow`` is given, the last axis is extended by ``grow`` (sinks on the
    top face move with it), at most ``retries`` times.
    """
    rng = np.random.default_rng(seed)
    pairs = [(tuple(a), tuple(b)) for a, b in pairs]
    base = grow or grid.extents[0]
    blocking = None
    for growth in range(retries + 1):
        for p in pairs:
            if not (grid.contains(p[0]) and grid.contains(p[1])):
                raise ValueError(f"pair {p} outside grid {grid.extents}")
        paths, fail = _negotiate(grid, pairs, vertex_disjoint, block_faces, rng, max_iter)
        if paths is not None:
            return RoutedPaths(pairs, paths, grid, base, growth + 1)
        blocking = pairs[fail]
        if grow is None or growth == retries:
            break
        top = grid.extents[-1] - 1
        grid = GridTarget(grid.extents[:-1] + (grid.extents[-1] + grow,))
        new_top = grid.extents[-1] - 1
        pairs = [(a, b[:-1] + (new_top,) if b[-1] == top else b) for a, b in pairs]
    raise RoutingError(blocking, retries)


# ---------------------------------------------------------------------------
# placed codes
# ---------------------------------------------------------------------------

@dataclass
class PlacedWireCode:
    wire: WireCode
    placement: list
    target: object
    meta: dict = field(default_factory=dict)
    routing: list = None

    @property
    def stacking(self):
        return Counter(self.placement)

    def max_stacking(self):
        return max(self.stacking.values(), default=0)

    def to_dict(self):
        return {
            "format": PLACED_FORMAT,
            "wire": self.wire.to_dict(),
            "target": self.target.to_dict(),
            "placement": [list(v) if isinstance(v, tuple) else v for v in self.placement],
            "meta": self.meta,
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, doc):
        if doc.get("format") != PLACED_FORMAT:
            raise ValueError(f"expected format {PLACED_FORMAT!r}, got {doc.get('format')!r}")
        wire = WireCode.from_dict(doc["wire"])
        tdoc = doc["target"]
        if tdoc["kind"] == "grid":
            target = GridTarget(tdoc["extents"])
            placement = [tuple(v) for v in doc["placement"]]
        else:
            from .graphs import GeneralGraph

            target = GeneralGraph.from_dict(tdoc)
            placement = list(doc["placement"])
        return cls(wire, placement, target, doc.get("meta", {}))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def to_dot(self):
        return to_dot(self)


def apply_routes(wire, home, routes):
    """Stretch each ``(qubit, gauge, path)`` along ``path`` and place the new qubits.

    ``path[0]`` must be the qubit's home; the last new qubit lands on ``path[-1]``.
    Mutates ``wire`` and ``home`` (a list indexed by qubit).
    """
    for u, g, path in routes:
        if _site(path[0]) != _site(home[u]):
            raise ValueError(f"route for qubit {u} starts at {path[0]}, home is {home[u]}")
        for a, v in zip(wire.stretch(u, g, len(path)), path[1:]):
            assert a == len(home)
            home.append(_site(v))
    return home


def _site(v):
    # grid sites are coordinate tuples, graph sites plain vertex ids
    return int(v) if isinstance(v, (int, np.integer)) else tuple(v)


def _junction_routes(wire, home, junction, path_fn):
    routes = []
    for g in wire.multi_gauges():
        j = junction[g]
        for u in sorted(wire.terms[g]):
            if tuple(home[u]) != tuple(j):
                routes.append((u, g, path_fn(u, g, home[u], j)))
    return routes


@dataclass
class LocalityReport:
    violations: list
    max_stacking: int
    max_diameter: int

    @property
    def ok(self):
        return not self.violations


def check_locality(placed):
    """Every multi-qubit gauge must span one vertex or two adjacent vertices."""
    target = placed.target
    violations = []
    diam = 0
    for g in placed.wire.multi_gauges():
        verts = sorted({placed.placement[u] for u in placed.wire.terms[g]})
        worst = 0
        for i in range(len(verts)):
            for k in range(i + 1, len(verts)):
                worst = max(worst, target.distance(verts[i], verts[k]))
        diam = max(diam, worst)
        if worst > 1:
            violations.append((g, verts))
    return LocalityReport(violations, placed.max_stacking(), diam)


# ---------------------------------------------------------------------------
# 2D layout
# ---------------------------------------------------------------------------

def _line(a, b):
    """Vertices from ``a`` to ``b`` moving along one axis (inclusive)."""
    axis = next((i for i in range(len(a)) if a[i] != b[i]), None)
    if axis is None:
        return [tuple(a)]
    if any(a[i] != b[i] for i in range(len(a)) if i != axis):
        raise ValueError("points are not axis-aligned")
    step = 1 if b[axis] > a[axis] else -1
    out = []
    for c in range(a[axis], b[axis] + step, step):
        v = list(a)
        v[axis] = c
        out.append(tuple(v))
    return out


def _polyline(points):
    out = [tuple(points[0])]
    for a, b in zip(points, points[1:]):
        out.extend(_line(a, b)[1:])
    return out


def _data_qubit_of(wire, u):
    """Data qubit a port (data or copy) stands for."""
    if wire.register[u] == "data":
        return u
    owner = wire.owner[wire.single_of[u]]
    return owner[1]


def layout_2d(code):
    """Row ``y = 0`` holds the data qubits and their branches; check ``s`` runs along row ``s + 1``."""
    wire = build_wire_code(code)
    n, m = code.n, code.m
    # one column per (qubit, check) incidence inside the qubit's block
    base, slot = {}, {}
    x = 0
    for q in range(n):
        base[q] = x
        users = [s for s, c in enumerate(code.checks) if q in c.support]
        for i, s in enumerate(users):
            slot[(q, s)] = x + 1 + i
        x += len(users) + 2
    width, height = x, m + 1
    grid = GridTarget((width, height))

    home = [None] * wire.n
    for q in range(n):
        home[q] = (base[q], 0)
    for (s, q), r in wire.port.items():
        if r != q:
            home[r] = (slot[(q, s)], 0)

    junction = {}
    for b in wire.branches.values():
        for r, link in zip(b.copy_qubits, b.links):
            junction[link] = home[r]
    for s in range(m):
        ys = s + 1
        xs = [slot[(q, s)] for q in code.checks[s].support]
        gauges = wire.anc_of[s]
        if len(gauges) == 1:
            junction[gauges[0]] = (xs[min(1, len(xs) - 1)], ys)
            continue
        ancs = [u for u in range(n, wire.n) if wire.register[u] == "anc" and wire.owner[wire.single_of[u]] == ("check", s)]
        for i, a in enumerate(ancs):
            home[a] = (xs[i + 1], ys)
        for i, g in enumerate(gauges):
            junction[g] = (xs[i + 1], ys)

    def path_fn(u, g, src, dst):
        if src[1] == dst[1]:
            return _line(src, dst)
        s = wire.owner[g][1]
        q = _data_qubit_of(wire, u)
        col = slot[(q, s)]
        return _polyline([src, (col, 0), (col, dst[1]), dst])

    routes = _junction_routes(wire, home, junction, path_fn)
    apply_routes(wire, home, routes)
    return PlacedWireCode(wire, home, grid, {"layout": "2d", "width": width, "height": height})


# ---------------------------------------------------------------------------
# D-dimensional layout
# ---------------------------------------------------------------------------

def _ceil_root(value, power):
    r = max(1, int(math.ceil(value ** (1.0 / power))))
    while r ** power < value:
        r += 1
    while r > 1 and (r - 1) ** power >= value:
        r -= 1
    return r


def snake_order(side, dims):
    """Boustrophedon walk over ``[side]^dims``; consecutive entries are grid neighbours."""
    if dims == 0:
        return [()]
    inner = snake_order(side, dims - 1)
    out = []
    for i in range(side):
        seq = inner if i % 2 == 0 else inner[::-1]
        out.extend((i,) + c for c in seq)
    return out


def layout_Dd(code, D=3, seed=0, retries=8):
    """Branches on the bottom face, check sites on the top face, one routing per colour class."""
    if D < 2:
        raise ValueError("D must be >= 2")
    wire = build_wire_code(code)
    n, m = code.n, code.m
    dims = D - 1
    b = _ceil_root(code.max_degree + 1, dims)
    g = _ceil_root(n, dims)
    M = g * b
    snake = snake_order(b, dims)

    home = [None] * wire.n
    snake_pos = {}
    for q in range(n):
        origin = tuple(int(c) * b for c in np.unravel_index(q, (g,) * dims))
        members = [q]
        for letter in ("X", "Y", "Z"):
            br = wire.branches.get((q, letter))
            if br:
                members.extend(br.copy_qubits)
        for pos, u in enumerate(members):
            home[u] = tuple(o + c for o, c in zip(origin, snake[pos])) + (0,)
            snake_pos[u] = (origin, pos)

    def block_path(u, v):
        origin, i = snake_pos[u]
        _, j = snake_pos[v]
        step = 1 if j > i else -1
        return [tuple(o + c for o, c in zip(origin, snake[k])) + (0,) for k in range(i, j + step, step)]

    routes = []
    for br in wire.branches.values():
        prev = br.target_qubit
        for r, link in zip(br.copy_qubits, br.links):
            routes.append((prev, link, block_path(prev, r)))
            prev = r

    # check sites on the top face, nearest free site to the centroid of the ports
    face = np.array(list(np.ndindex(*(M,) * dims)))
    taken = np.zeros(len(face), dtype=bool)
    sites = []
    for s in range(m):
        pts = np.array([home[u][:dims] for u in wire.port_qubits(s)], dtype=float)
        dist = np.abs(face - pts.mean(axis=0)).sum(axis=1)
        dist[taken] = np.inf
        i = int(np.argmin(dist))
        taken[i] = True
        sites.append(tuple(int(c) for c in face[i]))

    classes = color_classes(code)
    h = M
    rng = np.random.default_rng(seed)
    routed = None
    blocking = None
    for growth in range(retries + 1):
        grid = GridTarget((M,) * dims + (h,))
        routed = []
        for members in classes.classes:
            pairs = [(home[wire.port[(s, q)]], sites[s] + (h - 1,)) for q, s in members]
            try:
                rp = route_grid(pairs, grid, seed=int(rng.integers(2**31)), retries=0,
                                vertex_disjoint=True, block_faces=True)
            except RoutingError as exc:
                blocking = exc.pair
                routed = None
                break
            routed.append(rp)
        if routed is not None:
            break
        h += M
    if routed is None:
        raise RoutingError(blocking, retries)

    wire_routes = []
    for members, rp in zip(classes.classes, routed):
        for (q, s), path in zip(members, rp.paths):
            u = wire.port[(s, q)]
            gauge = next(gi for gi in wire.anc_of[s] if u in wire.terms[gi])
            wire_routes.append((u, gauge, path))
    top = h - 1
    for s in range(m):
        for u in range(n, wire.n):
            if home[u] is None and wire.owner[wire.single_of[u]] == ("check", s):
                home[u] = sites[s] + (top,)

    apply_routes(wire, home, routes + wire_routes)
    meta = {
        "layout": f"{D}d",
        "D": D,
        "m": M,
        "block": b,
        "height": h,
        "c_D": h / M,
        "classes": len(classes),
        "check_sites": [list(s) for s in sites],
    }
    return PlacedWireCode(wire, home, grid, meta, routed)


# ---------------------------------------------------------------------------
# DOT export
# ---------------------------------------------------------------------------

_SHAPES = {"data": "doublecircle", "copy": "circle", "anc": "circle"}
_COLORS = {"data": "black", "copy": "blue", "anc": "darkgreen"}


def to_dot(placed):
    """Qubits as circles, multi-qubit gauge checks as boxes; grid coordinates become ``pos``."""
    wire = placed.wire
    lines = ["graph wirecode {", "  node [fontsize=8];"]
    for u, reg in enumerate(wire.register):
        v = placed.placement[u]
        pos = ""
        if isinstance(v, tuple) and len(v) >= 2:
            pos = f', pos="{v[0]},{v[1]}!"'
        lines.append(f'  q{u} [shape={_SHAPES[reg]}, color={_COLORS[reg]}, label="{u}"{pos}];')
    for g in wire.multi_gauges():
        label = "".join(wire.terms[g][u] for u in sorted(wire.terms[g]))
        lines.append(f'  g{g} [shape=box, label="{label}"];')
        for u in sorted(wire.terms[g]):
            lines.append(f"  g{g} -- q{u};")
    lines.append("}")
    return "\n".join(lines) + "\n"
