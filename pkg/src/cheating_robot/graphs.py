"""Graph representation, family generators, products, cores and retractions.

Vertices are dense integers 0..n-1.  Product coordinates live in ``labels``
(tuples per vertex), never in vertex identity, so the game machinery stays
coordinate-agnostic.  An optional ``circular_order`` carries an outerplanar
embedding supplied by generators or input files; we never try to recover one.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import InputError


class Graph:
    """Immutable simple undirected graph.

    Adjacency is stored both as sorted tuples (iteration) and as bitmasks
    (hot paths in the solver assume n <= 63 fits a machine word; larger
    graphs still work through Python big ints).
    """

    __slots__ = (
        "n",
        "adj",
        "nbr_mask",
        "closed_mask",
        "labels",
        "circular_order",
        "_edges",
    )

    def __init__(self, n: int, edges: Iterable[tuple[int, int]],
                 labels: Optional[Sequence[tuple]] = None,
                 circular_order: Optional[Sequence[int]] = None):
        if n < 1:
            raise InputError(f"graph needs at least one vertex, got n={n}")
        adj_sets: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            adj_sets[u].add(v)
            adj_sets[v].add(u)
        self.n = n
        self.adj = tuple(tuple(sorted(s)) for s in adj_sets)
        self.nbr_mask = tuple(sum(1 << w for w in nbrs) for nbrs in self.adj)
        self.closed_mask = tuple(m | (1 << v) for v, m in enumerate(self.nbr_mask))
        if labels is not None:
            labels = tuple(tuple(l) for l in labels)
            if len(labels) != n:
                raise InputError("labels must cover every vertex")
            if len(set(labels)) != n:
                raise InputError("labels must be unique per vertex")
        self.labels = labels
        if circular_order is not None:
            circular_order = tuple(circular_order)
            if sorted(circular_order) != list(range(n)):
                raise InputError("circular_order must be a permutation of all vertices")
        self.circular_order = circular_order
        self._edges = frozenset(
            (min(u, v), max(u, v)) for u in range(n) for v in self.adj[u]
        )

    # -- basic queries -------------------------------------------------

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adj[v]

    def closed_neighborhood(self, v: int) -> tuple[int, ...]:
        return tuple(sorted(self.adj[v] + (v,)))

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self._edges

    def edges(self) -> list[tuple[int, int]]:
        return sorted(self._edges)

    def edge_count(self) -> int:
        return len(self._edges)

    def check_vertex(self, v: int) -> None:
        if not (0 <= v < self.n):
            raise InputError(f"vertex {v} out of range for n={self.n}")

    def is_connected(self) -> bool:
        seen = 1
        stack = [0]
        count = 1
        while stack:
            u = stack.pop()
            for w in self.adj[u]:
                bit = 1 << w
                if not seen & bit:
                    seen |= bit
                    count += 1
                    stack.append(w)
        return count == self.n

    def is_tree(self) -> bool:
        return self.is_connected() and self.edge_count() == self.n - 1

    def is_cycle(self) -> bool:
        return (self.n >= 3 and self.is_connected()
                and all(self.degree(v) == 2 for v in range(self.n)))

    def distances_from(self, source: int) -> list[int]:
        """BFS distance vector; unreachable vertices get -1."""
        dist = [-1] * self.n
        dist[source] = 0
        queue = [source]
        for u in queue:
            for w in self.adj[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return dist

    def shortest_path_next_hop(self, source: int, target: int) -> int:
        """First vertex after ``source`` on a shortest path to ``target``.

        Lowest-index tiebreak, so routing is deterministic.
        """
        if source == target:
            return source
        dist = self.distances_from(target)
        if dist[source] < 0:
            raise InputError(f"no path from {source} to {target}")
        return min(w for w in self.adj[source] if dist[w] == dist[source] - 1)

    def center_vertex(self) -> int:
        """A vertex of minimum eccentricity (lowest index on ties)."""
        best_v, best_e = 0, None
        for v in range(self.n):
            ecc = max(self.distances_from(v))
            if best_e is None or ecc < best_e:
                best_v, best_e = v, ecc
        return best_v

    def induced_subgraph(self, vertices: Iterable[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph plus the old-index list (new index -> old vertex)."""
        keep = sorted(set(vertices))
        index = {v: i for i, v in enumerate(keep)}
        edges = [(index[u], index[v]) for u, v in self._edges
                 if u in index and v in index]
        labels = None
        if self.labels is not None:
            labels = [self.labels[v] for v in keep]
        order = None
        if self.circular_order is not None:
            order = [index[v] for v in self.circular_order if v in index]
        return Graph(len(keep), edges, labels=labels, circular_order=order), keep

    def __eq__(self, other):
        return (isinstance(other, Graph) and self.n == other.n
                and self._edges == other._edges)

    def __hash__(self):
        return hash((self.n, self._edges))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.edge_count()})"


def build_graph(n: int, edges: Iterable[tuple[int, int]], **kwargs) -> Graph:
    """Build a simple graph, collapsing duplicate edges, rejecting bad input."""
    return Graph(n, edges, **kwargs)


# -- family generators -------------------------------------------------


def path(n: int) -> Graph:
    if n < 1:
        raise InputError("path needs n >= 1")
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    if n < 3:
        raise InputError("cycle needs n >= 3")
    g = Graph(n, [(i, (i + 1) % n) for i in range(n)])
    return Graph(n, g.edges(), circular_order=range(n))


def complete(n: int) -> Graph:
    if n < 1:
        raise InputError("complete graph needs n >= 1")
    return Graph(n, itertools.combinations(range(n), 2))


def star(n: int) -> Graph:
    """Star S_n: center vertex 0 with n leaves (n+1 vertices total)."""
    if n < 1:
        raise InputError("star needs n >= 1")
    return Graph(n + 1, [(0, i) for i in range(1, n + 1)])


def random_tree(n: int, seed: int) -> Graph:
    """Uniform random labeled tree via a Pruefer sequence."""
    if n < 1:
        raise InputError("tree needs n >= 1")
    if n == 1:
        return Graph(1, [])
    if n == 2:
        return Graph(2, [(0, 1)])
    rng = random.Random(seed)
    seq = [rng.randrange(n) for _ in range(n - 2)]
    degree = [1] * n
    for v in seq:
        degree[v] += 1
    edges = []
    # classic decoding: repeatedly attach the smallest leaf to the next code entry
    import heapq

    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    for v in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, v))
        degree[v] -= 1
        if degree[v] == 1:
            heapq.heappush(leaves, v)
    u = heapq.heappop(leaves)
    w = heapq.heappop(leaves)
    edges.append((u, w))
    return Graph(n, edges)


def fan(n: int) -> Graph:
    """Fan on n vertices: apex 0 joined to every vertex of the path 1..n-1.

    Comes with its outerplanar circular order (apex first, then the path).
    """
    if n < 2:
        raise InputError("fan needs n >= 2")
    edges = [(0, i) for i in range(1, n)]
    edges += [(i, i + 1) for i in range(1, n - 1)]
    return Graph(n, edges, circular_order=range(n))


def hypercube(k: int) -> Graph:
    """Q_k as the iterated Cartesian product of k copies of P_2."""
    if k < 1:
        raise InputError("hypercube needs k >= 1")
    g = path(2)
    for _ in range(k - 1):
        g = cartesian_product(g, path(2))
    return g


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, 5 + i) for i in range(5)]
    return Graph(10, outer + inner + spokes)


# -- products ----------------------------------------------------------


def _coords(g: Graph, v: int) -> tuple:
    if g.labels is not None:
        return g.labels[v]
    return (v,)


def _product_graph(g: Graph, h: Graph, adjacency_rule) -> Graph:
    n = g.n * h.n
    edges = []
    for (a, b), (c, d) in itertools.combinations(
            itertools.product(range(g.n), range(h.n)), 2):
        if adjacency_rule(a, b, c, d):
            edges.append((a * h.n + b, c * h.n + d))
    labels = [_coords(g, a) + _coords(h, b)
              for a in range(g.n) for b in range(h.n)]
    return Graph(n, edges, labels=labels)


def cartesian_product(g: Graph, h: Graph) -> Graph:
    """G box H: move in exactly one coordinate per edge."""
    def rule(a, b, c, d):
        return (a == c and h.has_edge(b, d)) or (g.has_edge(a, c) and b == d)
    return _product_graph(g, h, rule)


def strong_product(g: Graph, h: Graph) -> Graph:
    """G boxtimes H: each coordinate equal or adjacent, not both equal."""
    def rule(a, b, c, d):
        return ((a == c or g.has_edge(a, c))
                and (b == d or h.has_edge(b, d)))
    return _product_graph(g, h, rule)


def strong_grid(dims: Sequence[int]) -> Graph:
    """Strong product of paths P_{n_1} x ... x P_{n_k}."""
    dims = list(dims)
    if not dims or any(d < 1 for d in dims):
        raise InputError("strong grid dims must be positive")
    g = path(dims[0])
    for d in dims[1:]:
        g = strong_product(g, path(d))
    return g


def cartesian_grid(dims: Sequence[int]) -> Graph:
    dims = list(dims)
    if not dims or any(d < 1 for d in dims):
        raise InputError("grid dims must be positive")
    g = path(dims[0])
    for d in dims[1:]:
        g = cartesian_product(g, path(d))
    return g


# -- k-cores and dismantling -------------------------------------------


@dataclass(frozen=True)
class CoreCertificate:
    k: int
    core_vertices: frozenset[int]


def core_numbers(g: Graph) -> list[int]:
    """Per-vertex core numbers by degeneracy peeling.

    Bucket queue over degrees; ties broken by lowest vertex index so the
    peeling order is deterministic.
    """
    degree = [g.degree(v) for v in range(g.n)]
    maxdeg = max(degree)
    buckets: list[list[int]] = [[] for _ in range(maxdeg + 1)]
    for v in sorted(range(g.n), reverse=True):
        buckets[degree[v]].append(v)  # reversed push -> lowest index pops first
    removed = [False] * g.n
    core = [0] * g.n
    current = 0
    for _ in range(g.n):
        d = 0
        while True:
            while d <= maxdeg and not buckets[d]:
                d += 1
            v = buckets[d].pop()
            if not removed[v] and degree[v] == d:
                break
        current = max(current, d)
        core[v] = current
        removed[v] = True
        for w in g.adj[v]:
            if not removed[w]:
                degree[w] -= 1
                buckets[degree[w]].append(w)
    return core


def max_core(g: Graph) -> CoreCertificate:
    """Largest k admitting a k-core, with the maximal core vertex set."""
    core = core_numbers(g)
    k = max(core)
    return CoreCertificate(k, frozenset(v for v in range(g.n) if core[v] >= k))


@dataclass(frozen=True)
class DismantlingOrder:
    """Elimination sequence: vertices[i] is dominated by dominators[i] at step i.

    The single vertex left at the end is ``last``.
    """
    vertices: tuple[int, ...]
    dominators: tuple[int, ...]
    last: int


def dismantling_order(g: Graph) -> Optional[DismantlingOrder]:
    """Greedy dominated-vertex elimination; None when no dominated vertex exists.

    Greedy is safe: removing any dominated vertex of a dismantlable graph
    leaves a dismantlable graph.  Ties: lowest dominated index, then lowest
    dominating index (the cop-win strategy consumes this order, so the
    output must be deterministic).
    """
    alive = list(range(g.n))
    closed = list(g.closed_mask)
    order, doms = [], []
    while len(alive) > 1:
        found = None
        for v in alive:
            cv = closed[v]
            for u in alive:
                if u != v and cv & ~closed[u] == 0:
                    found = (v, u)
                    break
            if found:
                break
        if not found:
            return None
        v, u = found
        order.append(v)
        doms.append(u)
        alive.remove(v)
        bit = ~(1 << v)
        for w in alive:
            closed[w] &= bit
    return DismantlingOrder(tuple(order), tuple(doms), alive[0])


# -- retractions -------------------------------------------------------


@dataclass(frozen=True)
class RetractionMap:
    """Total map of the domain graph onto an induced subgraph."""
    domain: Graph
    image_vertices: frozenset[int]
    mapping: tuple[int, ...]

    def __call__(self, v: int) -> int:
        return self.mapping[v]


@dataclass(frozen=True)
class RetractionCheck:
    ok: bool
    violation: Optional[tuple] = None  # ("vertex", v) or ("edge", u, v)


def verify_retraction(f: RetractionMap) -> RetractionCheck:
    """Check the two retraction conditions, returning a witness on failure."""
    g = f.domain
    if len(f.mapping) != g.n:
        raise InputError("retraction map must be total on V(G)")
    for v in range(g.n):
        if f.mapping[v] not in f.image_vertices:
            return RetractionCheck(False, ("vertex", v))
        if v in f.image_vertices and f.mapping[v] != v:
            return RetractionCheck(False, ("vertex", v))
    for u, v in g.edges():
        fu, fv = f.mapping[u], f.mapping[v]
        if fu != fv and not g.has_edge(fu, fv):
            return RetractionCheck(False, ("edge", u, v))
    return RetractionCheck(True)


def extend_paths_retract(lengths: Sequence[int]) -> tuple[Graph, RetractionMap]:
    """Strong grid of paths each extended by a new leaf at both ends.

    Returns the extended grid H (coordinates 0..n_i+1 in ``labels``) and the
    clamp retraction onto the central copy of the original grid.
    """
    lengths = list(lengths)
    if any(n < 2 for n in lengths):
        raise InputError("extend_paths_retract needs every path length >= 2")
    h = strong_grid([n + 2 for n in lengths])
    coord_of = h.labels
    index_of = {c: v for v, c in enumerate(coord_of)}
    mapping = []
    image = set()
    for v in range(h.n):
        clamped = tuple(min(max(c, 1), n) for c, n in zip(coord_of[v], lengths))
        mapping.append(index_of[clamped])
        if clamped == coord_of[v]:
            image.add(v)
    return h, RetractionMap(h, frozenset(image), tuple(mapping))


# -- Figure-style fixture ----------------------------------------------

# 12-vertex 5-regular graph: inner hexagon 0..5, outer hexagon 6..11, and
# inner i adjacent to outer 6+j for j in {i-1, i, i+1} (mod 6).  The inner
# hexagon is a retract under radial projection.  Derived once from the
# published drawing; shipped as data.
_FIXTURE_EDGES = tuple(
    [(i, (i + 1) % 6) for i in range(6)]
    + [(6 + i, 6 + (i + 1) % 6) for i in range(6)]
    + [(i, 6 + ((i + d) % 6)) for i in range(6) for d in (-1, 0, 1)]
)


def figure1_graph() -> Graph:
    return Graph(12, _FIXTURE_EDGES)


def figure1_retraction() -> RetractionMap:
    g = figure1_graph()
    mapping = tuple(list(range(6)) + [v - 6 for v in range(6, 12)])
    return RetractionMap(g, frozenset(range(6)), mapping)


# -- text format ---------------------------------------------------------
#
# Line-oriented, UTF-8, '#' comments:
#   n <count>
#   e <u> <v>           (0-indexed, one per edge)
#   order <v0> ... <v_{n-1}>   (optional circular order)
#   coord <v> <c1> <c2> ...    (optional per-vertex coordinates)


def write_graph_text(g: Graph) -> str:
    lines = [f"n {g.n}"]
    for u, v in g.edges():
        lines.append(f"e {u} {v}")
    if g.circular_order is not None:
        lines.append("order " + " ".join(str(v) for v in g.circular_order))
    if g.labels is not None:
        for v in range(g.n):
            lines.append(f"coord {v} " + " ".join(str(c) for c in g.labels[v]))
    return "\n".join(lines) + "\n"


def read_graph_text(text: str) -> Graph:
    n = None
    edges = []
    order = None
    coords = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "n":
                n = int(parts[1])
            elif parts[0] == "e":
                edges.append((int(parts[1]), int(parts[2])))
            elif parts[0] == "order":
                order = [int(p) for p in parts[1:]]
            elif parts[0] == "coord":
                coords[int(parts[1])] = tuple(int(p) for p in parts[2:])
            else:
                raise InputError(f"line {lineno}: unknown directive {parts[0]!r}")
        except (IndexError, ValueError) as exc:
            raise InputError(f"line {lineno}: cannot parse {raw!r}") from exc
    if n is None:
        raise InputError("graph text missing 'n <count>' line")
    labels = None
    if coords:
        if sorted(coords) != list(range(n)):
            raise InputError("coord lines must cover every vertex exactly once")
        labels = [coords[v] for v in range(n)]
    return Graph(n, edges, labels=labels, circular_order=order)


def graph_hash(g: Graph) -> str:
    """Stable short content hash used to key solver reports and table dumps."""
    import hashlib

    basis = f"n {g.n}\n" + "\n".join(f"e {u} {v}" for u, v in g.edges())
    return hashlib.sha256(basis.encode()).hexdigest()[:12]
