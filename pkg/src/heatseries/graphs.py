"""Weighted graphs: finite graphs, lazy infinite families, local functions.

A graph carries a positive symmetric edge weight, a positive vertex measure,
and a distinguished root vertex used as the base point of all distance-based
envelopes.  Finite graphs enumerate their vertices; infinite families expose
a neighbor oracle plus a closed-form metric, and balls are materialized on
demand by breadth-first search and memoized.

Graphs are immutable after construction; all queries are pure and safe to
issue from concurrent callers (ball layers are filled idempotently under a
lock).
"""

from __future__ import annotations

import json
import threading
from collections import deque
from fractions import Fraction
from numbers import Rational
from pathlib import Path

from .errors import GraphSchemaError, UnknownVertexError, UnreachableVertexError


def exact_div(num, den):
    """Divide, staying in exact rational arithmetic when both sides allow it."""
    if isinstance(num, Rational) and isinstance(den, Rational):
        return Fraction(num) / Fraction(den)
    return num / den


class LocalFunction:
    """Finitely supported real-valued vertex function.

    Values are stored only on the support; any other vertex evaluates to
    exactly zero.  Entries equal to zero are dropped at construction so the
    support set is canonical.
    """

    __slots__ = ("_values",)

    def __init__(self, values=None):
        self._values = {x: v for x, v in dict(values or {}).items() if v != 0}

    @classmethod
    def delta(cls, x, value=1):
        """Indicator-style function: `value` at `x`, zero elsewhere."""
        return cls({x: value})

    @property
    def support(self):
        return frozenset(self._values)

    def __call__(self, x):
        return self._values.get(x, 0)

    def __len__(self):
        return len(self._values)

    def __eq__(self, other):
        if isinstance(other, LocalFunction):
            return self._values == other._values
        return NotImplemented

    def __repr__(self):
        return f"LocalFunction({self._values!r})"

    def items(self):
        return self._values.items()

    def sup_norm(self):
        """Maximum of |f| over the support (0 for the zero function)."""
        return max((abs(v) for v in self._values.values()), default=0)

    def max_abs_on(self, vertices):
        return max((abs(self(x)) for x in vertices), default=0)

    def scale(self, c):
        return LocalFunction({x: c * v for x, v in self._values.items()})

    def __add__(self, other):
        out = dict(self._values)
        for x, v in other.items():
            out[x] = out.get(x, 0) + v
        return LocalFunction(out)


class Graph:
    """Base class: locally finite weighted graph with a root vertex.

    Subclasses provide `neighbors`, `measure` and membership; degree,
    distance, balls and neighborhoods derive from those.
    """

    is_finite = False

    def __init__(self, root):
        self.root = root
        self._ball_cache = {}
        self._cache_lock = threading.Lock()

    # -- primitive surface ------------------------------------------------

    def neighbors(self, x):
        """Tuple of (neighbor, edge weight) pairs, deterministic order."""
        raise NotImplementedError

    def measure(self, x):
        raise NotImplementedError

    def __contains__(self, x):
        raise NotImplementedError

    def check_vertex(self, x):
        if x not in self:
            raise UnknownVertexError(f"unknown vertex {x!r}")

    # -- derived queries ---------------------------------------------------

    def weight(self, x, y):
        """Edge weight, 0 for non-neighbors (and on the diagonal)."""
        self.check_vertex(x)
        self.check_vertex(y)
        for z, w in self.neighbors(x):
            if z == y:
                return w
        return 0

    def deg(self, x):
        """Weighted degree: sum of incident weights over the vertex measure."""
        self.check_vertex(x)
        total = 0
        for _, w in self.neighbors(x):
            total += w
        return exact_div(total, self.measure(x))

    def distance(self, x, y):
        """Combinatorial (shortest-path) distance.

        The generic implementation is breadth-first search; infinite
        families override it with their closed-form metric.
        """
        self.check_vertex(x)
        self.check_vertex(y)
        if x == y:
            return 0
        seen = {x}
        frontier = [x]
        dist = 0
        while frontier:
            dist += 1
            nxt = []
            for z in frontier:
                for v, _ in self.neighbors(z):
                    if v in seen:
                        continue
                    if v == y:
                        return dist
                    seen.add(v)
                    nxt.append(v)
            frontier = nxt
        raise UnreachableVertexError(f"no path from {x!r} to {y!r}")

    def ball(self, x, radius):
        """Closed metric ball {y : d(x,y) <= radius} as a frozenset.

        Spheres are grown layer by layer and memoized per center; the fill
        is idempotent, so concurrent readers at worst duplicate work.
        """
        self.check_vertex(x)
        radius = int(radius)
        if radius < 0:
            raise ValueError("radius must be nonnegative")
        cached = self._ball_cache.get(x)
        if cached is None or len(cached[0]) <= radius:
            with self._cache_lock:
                cached = self._ball_cache.get(x)
                if cached is None:
                    cached = ([frozenset((x,))], {x})
                    self._ball_cache[x] = cached
                balls, seen = cached
                while len(balls) <= radius:
                    frontier = balls[-1] - (balls[-2] if len(balls) > 1 else frozenset())
                    layer = set()
                    for z in frontier:
                        for v, _ in self.neighbors(z):
                            if v not in seen:
                                seen.add(v)
                                layer.add(v)
                    balls.append(balls[-1] | layer)
        return self._ball_cache[x][0][radius]

    def sphere(self, x, radius):
        """Vertices at distance exactly `radius` from `x`."""
        if radius == 0:
            return self.ball(x, 0)
        return self.ball(x, radius) - self.ball(x, radius - 1)

    def one_neighborhood(self, vertices):
        """Union of the closed unit balls around every vertex of `vertices`."""
        out = set()
        for x in vertices:
            self.check_vertex(x)
            out.add(x)
            for y, _ in self.neighbors(x):
                out.add(y)
        return frozenset(out)

    def uniform_degree_bound(self):
        """A constant dominating Deg on the whole graph, or None if unknown."""
        return None


class FiniteGraph(Graph):
    """Explicitly enumerated weighted graph."""

    is_finite = True

    def __init__(self, measures, adjacency, root):
        super().__init__(root)
        self._mu = dict(measures)
        self._nbrs = {
            x: tuple(sorted(adjacency.get(x, {}).items()))
            for x in self._mu
        }
        if root not in self._mu:
            raise UnknownVertexError(f"root {root!r} is not a vertex")
        self._max_deg = None

    @classmethod
    def from_edges(cls, measures, edges, root):
        """Build from an iterable of (u, v, weight) triples.

        Enforces the weighted-graph invariants: simple (no self-loops),
        symmetric positive weights, positive measures, endpoints declared.
        """
        mu = dict(measures)
        for x, m in mu.items():
            if not m > 0:
                raise GraphSchemaError(f"nonpositive measure {m} at vertex {x!r}")
        adj = {x: {} for x in mu}
        for u, v, w in edges:
            if u == v:
                raise GraphSchemaError(f"self-loop at vertex {u!r}")
            if u not in mu or v not in mu:
                raise GraphSchemaError(f"edge ({u!r}, {v!r}) has an undeclared endpoint")
            if not w > 0:
                raise GraphSchemaError(f"nonpositive weight {w} on edge ({u!r}, {v!r})")
            if v in adj[u]:
                raise GraphSchemaError(f"duplicate edge ({u!r}, {v!r})")
            adj[u][v] = w
            adj[v][u] = w
        return cls(mu, adj, root)

    def vertices(self):
        return tuple(sorted(self._mu))

    def __len__(self):
        return len(self._mu)

    def __contains__(self, x):
        return x in self._mu

    def neighbors(self, x):
        try:
            return self._nbrs[x]
        except KeyError:
            raise UnknownVertexError(f"unknown vertex {x!r}") from None

    def measure(self, x):
        try:
            return self._mu[x]
        except KeyError:
            raise UnknownVertexError(f"unknown vertex {x!r}") from None

    def uniform_degree_bound(self):
        if self._max_deg is None:
            self._max_deg = max((self.deg(x) for x in self._mu), default=0)
        return self._max_deg


class IntegerLine(Graph):
    """The integers with unit nearest-neighbor weights and unit measure."""

    def __init__(self):
        super().__init__(0)

    def __contains__(self, x):
        return isinstance(x, int) and not isinstance(x, bool)

    def neighbors(self, x):
        self.check_vertex(x)
        return ((x - 1, 1), (x + 1, 1))

    def measure(self, x):
        self.check_vertex(x)
        return 1

    def distance(self, x, y):
        self.check_vertex(x)
        self.check_vertex(y)
        return abs(x - y)

    def uniform_degree_bound(self):
        return 2


class IntegerLattice(Graph):
    """Z^d with unit weights; vertices are integer d-tuples, metric is l1."""

    def __init__(self, dim):
        if int(dim) != dim or dim < 1:
            raise ValueError("lattice dimension must be a positive integer")
        self.dim = int(dim)
        super().__init__((0,) * self.dim)

    def __contains__(self, x):
        return (
            isinstance(x, tuple)
            and len(x) == self.dim
            and all(isinstance(c, int) and not isinstance(c, bool) for c in x)
        )

    def neighbors(self, x):
        self.check_vertex(x)
        out = []
        for i in range(self.dim):
            for step in (-1, 1):
                y = x[:i] + (x[i] + step,) + x[i + 1:]
                out.append((y, 1))
        return tuple(out)

    def measure(self, x):
        self.check_vertex(x)
        return 1

    def distance(self, x, y):
        self.check_vertex(x)
        self.check_vertex(y)
        return sum(abs(a - b) for a, b in zip(x, y))

    def uniform_degree_bound(self):
        return 2 * self.dim


class RegularTree(Graph):
    """Unrooted k-regular tree with unit weights.

    Vertices are encoded as path words from a fixed base vertex: the base is
    the empty tuple, its k subtrees are labelled 0..k-1, and every deeper
    branching is labelled 0..k-2 (one edge of each non-base vertex points
    back toward the base).  The metric is the word metric.
    """

    def __init__(self, degree):
        if int(degree) != degree or degree < 2:
            raise ValueError("tree degree must be an integer >= 2")
        self.degree = int(degree)
        super().__init__(())

    def __contains__(self, x):
        if not isinstance(x, tuple):
            return False
        for i, c in enumerate(x):
            if not isinstance(c, int) or isinstance(c, bool):
                return False
            limit = self.degree if i == 0 else self.degree - 1
            if not 0 <= c < limit:
                return False
        return True

    def neighbors(self, x):
        self.check_vertex(x)
        if not x:
            return tuple(((i,), 1) for i in range(self.degree))
        children = tuple((x + (i,), 1) for i in range(self.degree - 1))
        return ((x[:-1], 1),) + children

    def measure(self, x):
        self.check_vertex(x)
        return 1

    def distance(self, x, y):
        self.check_vertex(x)
        self.check_vertex(y)
        common = 0
        for a, b in zip(x, y):
            if a != b:
                break
            common += 1
        return len(x) + len(y) - 2 * common

    def uniform_degree_bound(self):
        return self.degree


def family_from_spec(spec):
    """Parse a family descriptor: 'z', 'lattice:<d>' or 'tree:<k>'."""
    name, _, arg = spec.partition(":")
    name = name.strip().lower()
    if name == "z":
        return IntegerLine()
    if name == "lattice":
        if not arg:
            raise ValueError("lattice family needs a dimension, e.g. lattice:2")
        return IntegerLattice(int(arg))
    if name == "tree":
        if not arg:
            raise ValueError("tree family needs a degree, e.g. tree:3")
        return RegularTree(int(arg))
    raise ValueError(f"unknown graph family {spec!r}")


# -- convenience builders used by tests and CLI fixtures --------------------

def path_graph(n, weight=1, measure=1, root=0):
    """Path on vertices 0..n-1."""
    mu = {i: measure for i in range(n)}
    edges = [(i, i + 1, weight) for i in range(n - 1)]
    return FiniteGraph.from_edges(mu, edges, root)


def cycle_graph(n, weight=1, measure=1, root=0):
    """Cycle on vertices 0..n-1."""
    mu = {i: measure for i in range(n)}
    edges = [(i, (i + 1) % n, weight) for i in range(n)]
    return FiniteGraph.from_edges(mu, edges, root)


def complete_graph(n, weight=1, measure=1, root=0):
    mu = {i: measure for i in range(n)}
    edges = [(i, j, weight) for i in range(n) for j in range(i + 1, n)]
    return FiniteGraph.from_edges(mu, edges, root)


def star_graph(leaves, weight=1, measure=1):
    """Hub vertex 0 joined to `leaves` leaf vertices 1..leaves."""
    mu = {i: measure for i in range(leaves + 1)}
    edges = [(0, i, weight) for i in range(1, leaves + 1)]
    return FiniteGraph.from_edges(mu, edges, 0)


def integer_segment(half_width, weight=1, measure=1):
    """Finite window [-half_width, half_width] of the integer line."""
    mu = {i: measure for i in range(-half_width, half_width + 1)}
    edges = [(i, i + 1, weight) for i in range(-half_width, half_width)]
    return FiniteGraph.from_edges(mu, edges, 0)


def random_weighted_graph(n, seed, extra_edges=None, exact=False):
    """Connected random graph with weights and measures in [1/2, 2].

    Deterministic for a given seed: a random spanning tree plus
    `extra_edges` additional edges (default n // 2).  With exact=True the
    weights are small rationals so downstream arithmetic stays exact.
    """
    import random

    rng = random.Random(seed)

    def draw():
        if exact:
            return Fraction(rng.randrange(8, 33), 16)
        return round(rng.uniform(0.5, 2.0), 6)

    order = list(range(n))
    rng.shuffle(order)
    edges = {}
    for i in range(1, n):
        pair = frozenset((order[i], order[rng.randrange(i)]))
        edges[pair] = draw()
    wanted = (n - 1) + (n // 2 if extra_edges is None else extra_edges)
    attempts = 0
    while len(edges) < wanted and attempts < 50 * n:
        attempts += 1
        u, v = rng.randrange(n), rng.randrange(n)
        pair = frozenset((u, v))
        if u != v and pair not in edges:
            edges[pair] = draw()
    mu = {i: draw() for i in range(n)}
    triples = [(min(p), max(p), w) for p, w in edges.items()]
    triples.sort()
    return FiniteGraph.from_edges(mu, triples, 0)


# -- document loader ---------------------------------------------------------

def load_graph(source, exact=False):
    """Load a finite graph from its JSON description.

    Schema: {"root": id, "vertices": [{"id": int, "mu": num}, ...],
    "edges": [{"u": id, "v": id, "w": num}, ...]} with every undirected edge
    listed exactly once.  With exact=True, numeric literals are parsed as
    rationals so downstream arithmetic stays exact.

    `source` may be a path, a JSON string, or an already-parsed mapping.
    """
    if isinstance(source, (str, Path)):
        if isinstance(source, Path) or not source.lstrip().startswith("{"):
            text = Path(source).read_text()
        else:
            text = source
        parse_float = Fraction if exact else float
        try:
            doc = json.loads(text, parse_float=parse_float)
        except json.JSONDecodeError as exc:
            raise GraphSchemaError(f"invalid JSON: {exc}") from exc
    else:
        doc = source
    if not isinstance(doc, dict):
        raise GraphSchemaError("graph document must be a JSON object")
    for key in ("root", "vertices", "edges"):
        if key not in doc:
            raise GraphSchemaError(f"missing required key {key!r}")
    if not isinstance(doc["vertices"], list) or not isinstance(doc["edges"], list):
        raise GraphSchemaError("'vertices' and 'edges' must be arrays")

    mu = {}
    for rec in doc["vertices"]:
        if not isinstance(rec, dict) or "id" not in rec or "mu" not in rec:
            raise GraphSchemaError(f"malformed vertex record {rec!r}")
        vid = rec["id"]
        if vid in mu:
            raise GraphSchemaError(f"duplicate vertex id {vid!r}")
        if not rec["mu"] > 0:
            raise GraphSchemaError(f"nonpositive measure in vertex record {rec!r}")
        mu[vid] = rec["mu"]

    seen = set()
    edges = []
    for rec in doc["edges"]:
        if not isinstance(rec, dict) or not {"u", "v", "w"} <= set(rec):
            raise GraphSchemaError(f"malformed edge record {rec!r}")
        u, v, w = rec["u"], rec["v"], rec["w"]
        if u == v:
            raise GraphSchemaError(f"self-loop in edge record {rec!r}")
        if u not in mu or v not in mu:
            raise GraphSchemaError(f"dangling vertex id in edge record {rec!r}")
        if not w > 0:
            raise GraphSchemaError(f"nonpositive weight in edge record {rec!r}")
        key = frozenset((u, v))
        if key in seen:
            raise GraphSchemaError(
                f"edge record {rec!r} duplicates an earlier edge "
                "(each undirected edge must appear exactly once)"
            )
        seen.add(key)
        edges.append((u, v, w))

    root = doc["root"]
    if root not in mu:
        raise GraphSchemaError(f"root {root!r} is not a declared vertex")
    return FiniteGraph.from_edges(mu, edges, root)
