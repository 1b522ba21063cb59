"""Weighted graphs over a measure space: storage, validation, generators, exhaustions.

A graph is a triple (b, c, m) over an ordered vertex set: symmetric positive
edge weights b (stored once per unordered pair, no self loops), a nonnegative
killing weight c per vertex and a positive measure weight m per vertex.
Countable graphs are only ever touched through finite truncations produced by
deterministic generators.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass

import numpy as np


class GraphFormatError(ValueError):
    """Raised when graph data cannot be assembled into a WeightedGraph."""


class WeightedGraph:
    """Finite weighted graph (b, c, m) with opaque string vertex ids.

    Vertex ids are mapped to dense indices in construction order.  Edges are
    normalized to index pairs (u, v) with u < v; energy evaluation uses the
    ordered-pair convention, so each stored edge counts twice.
    """

    def __init__(self, ids, m, c, edges):
        self.ids = list(ids)
        self.index = {v: i for i, v in enumerate(self.ids)}
        if len(self.index) != len(self.ids):
            raise GraphFormatError("duplicate vertex id")
        self.m = np.asarray(m, dtype=float)
        self.c = np.asarray(c, dtype=float)
        if self.m.shape != (self.n,) or self.c.shape != (self.n,):
            raise GraphFormatError("m and c must have one value per vertex")

        seen = set()
        eu, ev, eb = [], [], []
        for u, v, b in edges:
            iu = self._resolve(u)
            iv = self._resolve(v)
            if iu == iv:
                raise GraphFormatError(f"self-loop edge at vertex {self.ids[iu]!r}")
            if iu > iv:
                iu, iv = iv, iu
            if (iu, iv) in seen:
                raise GraphFormatError(
                    f"duplicate edge ({self.ids[iu]!r}, {self.ids[iv]!r})"
                )
            seen.add((iu, iv))
            eu.append(iu)
            ev.append(iv)
            eb.append(float(b))
        self.edge_u = np.asarray(eu, dtype=int)
        self.edge_v = np.asarray(ev, dtype=int)
        self.edge_b = np.asarray(eb, dtype=float)

        self._adj = [[] for _ in range(self.n)]
        for iu, iv, b in zip(self.edge_u, self.edge_v, self.edge_b):
            self._adj[iu].append((int(iv), float(b)))
            self._adj[iv].append((int(iu), float(b)))

    def _resolve(self, v) -> int:
        if isinstance(v, (int, np.integer)):
            if not 0 <= v < self.n:
                raise GraphFormatError(f"vertex index {v} out of range")
            return int(v)
        try:
            return self.index[v]
        except KeyError:
            raise GraphFormatError(f"unknown vertex id {v!r}") from None

    @property
    def n(self) -> int:
        return len(self.ids)

    def neighbors(self, i: int):
        """Neighbors of vertex index i as (index, b) pairs."""
        return self._adj[i]

    def weighted_degree(self, i: int) -> float:
        return math.fsum(b for _, b in self._adj[i])

    def distances_from(self, sources) -> np.ndarray:
        """Hop distances from a set of vertex indices; unreachable = inf."""
        dist = np.full(self.n, np.inf)
        queue = deque()
        for s in sources:
            dist[s] = 0.0
            queue.append(int(s))
        while queue:
            x = queue.popleft()
            for y, _ in self._adj[x]:
                if dist[y] == np.inf:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        return dist

    def to_dict(self) -> dict:
        verts = [
            {"id": v, "m": float(self.m[i]), "c": float(self.c[i])}
            for i, v in enumerate(self.ids)
        ]
        edges = []
        for iu, iv, b in zip(self.edge_u, self.edge_v, self.edge_b):
            u, v = self.ids[iu], self.ids[iv]
            if v < u:
                u, v = v, u
            edges.append({"u": u, "v": v, "b": float(b)})
        edges.sort(key=lambda e: (e["u"], e["v"]))
        return {"vertices": verts, "edges": edges}


def validate(g: WeightedGraph) -> list:
    """Check the graph axioms; returns one message per violation (empty iff valid).

    Self-loops, asymmetry and duplicate edges are excluded structurally by the
    storage, so only the value constraints can fail here.
    """
    violations = []
    for i, v in enumerate(g.ids):
        if not g.m[i] > 0:
            violations.append(f"nonpositive measure m({v}) = {g.m[i]}")
        if g.c[i] < 0:
            violations.append(f"negative killing c({v}) = {g.c[i]}")
        if not np.isfinite(g.m[i]) or not np.isfinite(g.c[i]):
            violations.append(f"non-finite vertex data at {v}")
    for iu, iv, b in zip(g.edge_u, g.edge_v, g.edge_b):
        if not b > 0 or not np.isfinite(b):
            violations.append(
                f"nonpositive edge weight b({g.ids[iu]},{g.ids[iv]}) = {b}"
            )
    for i, v in enumerate(g.ids):
        if not np.isfinite(g.weighted_degree(i)):
            violations.append(f"infinite neighbor weight sum at {v}")
    return violations


def graph_from_dict(data: dict) -> WeightedGraph:
    """Build a graph from parsed schema data; structural errors raise."""
    if not isinstance(data, dict) or "vertices" not in data:
        raise GraphFormatError("top-level object must contain 'vertices'")
    try:
        ids = [str(rec["id"]) for rec in data["vertices"]]
        m = [float(rec["m"]) for rec in data["vertices"]]
        c = [float(rec["c"]) for rec in data["vertices"]]
        edges = [
            (str(rec["u"]), str(rec["v"]), float(rec["b"]))
            for rec in data.get("edges", [])
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphFormatError(f"malformed record: {exc}") from None
    return WeightedGraph(ids, m, c, edges)


def load_graph(source) -> WeightedGraph:
    """Parse a graph from the JSON schema and validate it.

    ``source`` may be a JSON string, bytes, or a readable file object.  The
    vertex order of the returned graph is the file order.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    try:
        data = json.loads(source)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"malformed JSON: {exc}") from None

    g = graph_from_dict(data)
    violations = validate(g)
    if violations:
        raise GraphFormatError("; ".join(violations))
    return g


def emit_graph(g: WeightedGraph) -> str:
    """Serialize to the JSON schema; inverse of load_graph for valid graphs."""
    return json.dumps(g.to_dict(), sort_keys=True, indent=2) + "\n"


def make_path(n: int, h: float) -> WeightedGraph:
    """Path graph discretizing an interval with mesh width h.

    Edge weights are 1/(2h) so the ordered-pair energy of f equals the
    discrete Dirichlet integral sum_i (f[i+1]-f[i])^2 / h; vertex measure is h
    and there is no killing.
    """
    if n < 2:
        raise ValueError("make_path needs n >= 2")
    if not h > 0:
        raise ValueError("make_path needs h > 0")
    ids = [f"v{i}" for i in range(n)]
    edges = [(f"v{i}", f"v{i+1}", 1.0 / (2.0 * h)) for i in range(n - 1)]
    return WeightedGraph(ids, [h] * n, [0.0] * n, edges)


def single_vertex(m: float, c: float, vid: str = "x") -> WeightedGraph:
    return WeightedGraph([vid], [m], [c], [])


# ---------------------------------------------------------------------------
# Generators for countable graphs, accessed through finite truncations.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntegerLineGenerator:
    """The integer line with uniform data; vertex k has id str(k)."""

    m: float = 1.0
    c: float = 0.0
    b: float = 1.0

    def contains(self, vid: str) -> bool:
        try:
            int(vid)
            return True
        except ValueError:
            return False

    def measure(self, vid: str) -> float:
        return self.m

    def killing(self, vid: str) -> float:
        return self.c

    def neighbors(self, vid: str):
        k = int(vid)
        return [(str(k - 1), self.b), (str(k + 1), self.b)]


@dataclass(frozen=True)
class SquareLatticeGenerator:
    """The 2d integer lattice with uniform data; vertex (i,j) has id 'i,j'."""

    m: float = 1.0
    c: float = 0.0
    b: float = 1.0

    def contains(self, vid: str) -> bool:
        try:
            i, j = vid.split(",")
            int(i), int(j)
            return True
        except ValueError:
            return False

    def measure(self, vid: str) -> float:
        return self.m

    def killing(self, vid: str) -> float:
        return self.c

    def neighbors(self, vid: str):
        i, j = (int(t) for t in vid.split(","))
        return [
            (f"{i-1},{j}", self.b),
            (f"{i+1},{j}", self.b),
            (f"{i},{j-1}", self.b),
            (f"{i},{j+1}", self.b),
        ]


def generator_ball(gen, root: str, radius: int) -> list:
    """Vertex ids within hop distance radius of root, in BFS order."""
    if not gen.contains(root):
        raise ValueError(f"root {root!r} not generated")
    order = [root]
    dist = {root: 0}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        if dist[x] == radius:
            continue
        for y, _ in gen.neighbors(x):
            if y not in dist and gen.contains(y):
                dist[y] = dist[x] + 1
                order.append(y)
                queue.append(y)
    return order


def truncate(gen, vertex_ids) -> WeightedGraph:
    """Finite truncation of a generated graph, induced on the given ids."""
    ids = list(vertex_ids)
    present = set(ids)
    m = [gen.measure(v) for v in ids]
    c = [gen.killing(v) for v in ids]
    edges = []
    seen = set()
    for v in ids:
        for u, b in gen.neighbors(v):
            if u in present:
                key = (min(u, v), max(u, v))
                if key not in seen:
                    seen.add(key)
                    edges.append((v, u, b))
    return WeightedGraph(ids, m, c, edges)


@dataclass
class Exhaustion:
    """Nested finite vertex sets F_1 <= F_2 <= ... with cutoff functions.

    Every cutoff equals 1 on its set, lies in [0, 1], has finite support and
    the sequence is pointwise nondecreasing.  All data lives on one common
    finite truncation.
    """

    graph: WeightedGraph
    sets: list
    cutoffs: list
    nest_assumed: bool = False

    @property
    def levels(self) -> int:
        return len(self.sets)

    @classmethod
    def full(cls, graph: WeightedGraph) -> "Exhaustion":
        """Trivial exhaustion of a finite graph: one level covering everything."""
        return cls(
            graph=graph,
            sets=[np.arange(graph.n)],
            cutoffs=[np.ones(graph.n)],
            nest_assumed=False,
        )

    def masked(self, active: np.ndarray) -> "Exhaustion":
        """Restrict sets and cutoffs to an active-vertex mask.

        The masked cutoffs are admissible truncation parameters for a form
        whose domain vanishes off ``active``.
        """
        active = np.asarray(active, dtype=bool)
        sets = [np.asarray([i for i in F if active[i]], dtype=int) for F in self.sets]
        cutoffs = [chi * active for chi in self.cutoffs]
        return Exhaustion(self.graph, sets, cutoffs, self.nest_assumed)


def _decay_cutoff(graph: WeightedGraph, fset, plateau: int) -> np.ndarray:
    dist = graph.distances_from(fset)
    chi = 1.0 - dist / (plateau + 1.0)
    return np.maximum(chi, 0.0)


def build_exhaustion(gen, root: str, n_levels: int, plateau: int) -> Exhaustion:
    """Ball exhaustion of a generated graph around a root vertex.

    F_k is the ball of radius k; the cutoff is 1 on F_k and decays linearly in
    hop distance, reaching 0 one step past distance ``plateau``.  The common
    truncation is the ball of radius n_levels + plateau, which supports every
    cutoff.  Density of the nest in the full (infinite) domain is assumed, not
    verified, hence nest_assumed.
    """
    if n_levels < 1 or plateau < 1:
        raise ValueError("need n_levels >= 1 and plateau >= 1")
    order = generator_ball(gen, root, n_levels + plateau)
    graph = truncate(gen, order)
    root_idx = graph.index[root]
    dist_root = graph.distances_from([root_idx])
    sets = [np.flatnonzero(dist_root <= k) for k in range(1, n_levels + 1)]
    cutoffs = [_decay_cutoff(graph, F, plateau) for F in sets]
    return Exhaustion(graph, sets, cutoffs, nest_assumed=True)


def ball_exhaustion(
    graph: WeightedGraph,
    root,
    n_levels: int = 3,
    plateau: int = 1,
    saturate: bool = True,
) -> Exhaustion:
    """Ball exhaustion of a finite graph; with saturate the last set is everything.

    Saturation makes the final cutoff identically 1, so decomposition values
    along this exhaustion are exact for the finite graph.
    """
    if n_levels < 1 or plateau < 1:
        raise ValueError("need n_levels >= 1 and plateau >= 1")
    root_idx = graph._resolve(root)
    dist_root = graph.distances_from([root_idx])
    ecc = float(np.max(dist_root[np.isfinite(dist_root)]))
    step = max(1, math.ceil(ecc / n_levels)) if ecc > 0 else 1
    radii = [step * k for k in range(1, n_levels + 1)]
    sets = [np.flatnonzero(dist_root <= r) for r in radii]
    if saturate:
        sets[-1] = np.arange(graph.n)
    cutoffs = [_decay_cutoff(graph, F, plateau) for F in sets]
    return Exhaustion(graph, sets, cutoffs, nest_assumed=False)
