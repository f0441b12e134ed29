"""Immutable simple connected graphs and the metric primitives used everywhere.

Vertices are dense integer ids ``0..n-1``. A :class:`Graph` is validated at
construction (no loops, no multi-edges, connected) and caches its maximum
degree and diameter.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

# all-pairs distance matrices are cached up to this size
ALL_PAIRS_LIMIT = 2000


class GraphError(ValueError):
    """Base class for rejected graph input."""


class VertexRangeError(GraphError):
    pass


class SelfLoopError(GraphError):
    pass


class DuplicateEdgeError(GraphError):
    pass


class DisconnectedGraphError(GraphError):
    pass


@dataclass(frozen=True)
class DistanceField:
    source: int
    dist: tuple[int, ...]

    def __getitem__(self, v: int) -> int:
        return self.dist[v]

    @property
    def eccentricity(self) -> int:
        return max(self.dist)


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple connected undirected graph on vertices ``0..n-1``.

    Use :func:`build` rather than the constructor; it validates the input.
    ``landmarks`` names distinguished vertices (e.g. ``{"cop": 0, "drunk": 9}``)
    so generated graphs can document their labeling.
    """

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    name: str = ""
    landmarks: dict = field(default_factory=dict)
    max_degree: int = 0
    diameter: int = 0

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)

    @property
    def num_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    @cached_property
    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.int8)
        for u, nbrs in enumerate(self.adjacency):
            a[u, list(nbrs)] = 1
        return a

    @cached_property
    def distance_matrix(self) -> np.ndarray:
        """All-pairs hop distances as an ``(n, n)`` int array (cached)."""
        if self.n > ALL_PAIRS_LIMIT:
            raise MemoryError(f"all-pairs cache disabled above n={ALL_PAIRS_LIMIT}")
        return _all_pairs(self.n, self.adjacency)

    @cached_property
    def distance_rows(self) -> list[list[int]]:
        """Same as :attr:`distance_matrix` but as nested lists, for scalar hot loops."""
        return self.distance_matrix.tolist()

    def dist(self, u: int, v: int) -> int:
        if self.n <= ALL_PAIRS_LIMIT:
            return self.distance_rows[u][v]
        return bfs(self, u).dist[v]

    def __repr__(self) -> str:
        label = self.name or "Graph"
        return f"<{label}: n={self.n}, m={self.num_edges}, Δ={self.max_degree}, diam={self.diameter}>"

    def __getstate__(self):
        # drop cached properties; they are cheap to rebuild in a worker
        return {k: getattr(self, k) for k in ("n", "adjacency", "name", "landmarks", "max_degree", "diameter")}

    def __setstate__(self, state):
        for k, v in state.items():
            object.__setattr__(self, k, v)


def _all_pairs(n: int, adjacency: Sequence[Sequence[int]]) -> np.ndarray:
    rows = [u for u, nbrs in enumerate(adjacency) for _ in nbrs]
    cols = [v for nbrs in adjacency for v in nbrs]
    mat = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    d = shortest_path(mat, method="D", unweighted=True, directed=False)
    if np.isinf(d).any():
        raise DisconnectedGraphError("graph is not connected")
    return d.astype(np.int64)


def _bfs_list(adjacency: Sequence[Sequence[int]], source: int) -> list[int]:
    dist = [-1] * len(adjacency)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for w in adjacency[u]:
            if dist[w] < 0:
                dist[w] = du
                queue.append(w)
    return dist


def build(edges: Iterable[Sequence[int]], n: int, *, name: str = "", landmarks: dict | None = None) -> Graph:
    """Validate an edge list and return a :class:`Graph`.

    Raises a distinct :class:`GraphError` subclass for out-of-range endpoints,
    self-loops, duplicate edges and disconnected input.
    """
    if n < 1:
        raise VertexRangeError(f"vertex count must be positive, got {n}")
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for e in edges:
        u, v = int(e[0]), int(e[1])
        if not (0 <= u < n and 0 <= v < n):
            raise VertexRangeError(f"edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
        if u == v:
            raise SelfLoopError(f"self-loop at vertex {u}")
        if v in nbrs[u]:
            raise DuplicateEdgeError(f"duplicate edge ({u}, {v})")
        nbrs[u].add(v)
        nbrs[v].add(u)
    adjacency = tuple(tuple(sorted(s)) for s in nbrs)

    if min(_bfs_list(adjacency, 0)) < 0:
        raise DisconnectedGraphError("graph is not connected")
    if n <= ALL_PAIRS_LIMIT:
        dmat = _all_pairs(n, adjacency)
        diameter = int(dmat.max())
    else:
        dmat = None
        diameter = max(max(_bfs_list(adjacency, s)) for s in range(n))

    g = Graph(
        n=n,
        adjacency=adjacency,
        name=name,
        landmarks=dict(landmarks or {}),
        max_degree=max(len(a) for a in adjacency),
        diameter=diameter,
    )
    if dmat is not None:
        g.__dict__["distance_matrix"] = dmat
    for key, v in g.landmarks.items():
        if not 0 <= v < n:
            raise VertexRangeError(f"landmark {key}={v} out of range")
    return g


def bfs(g: Graph, source: int) -> DistanceField:
    if not 0 <= source < g.n:
        raise VertexRangeError(f"source {source} out of range")
    return DistanceField(source, tuple(_bfs_list(g.adjacency, source)))


def girth(g: Graph) -> int | None:
    """Length of the shortest cycle, or ``None`` if ``g`` is a tree."""
    best = None
    adj = g.adjacency
    for root in range(g.n):
        dist = [-1] * g.n
        parent = [-1] * g.n
        dist[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            if best is not None and 2 * dist[u] + 1 >= best:
                break
            for w in adj[u]:
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif w != parent[u]:
                    length = dist[u] + dist[w] + 1
                    if best is None or length < best:
                        best = length
    return best


def regularity(g: Graph) -> int | None:
    """Common degree if ``g`` is regular, else ``None``."""
    first = len(g.adjacency[0])
    return first if all(len(a) == first for a in g.adjacency) else None


def geodesic_next(g: Graph, frm: int, target: int, tie_break: str = "lex", rng=None) -> int:
    """A neighbor of ``frm`` one step closer to ``target``.

    ``tie_break="lex"`` takes the smallest id; ``"random"`` draws uniformly
    among the closer neighbors using ``rng.random()``.
    """
    if frm == target:
        raise ValueError("geodesic_next needs distinct endpoints")
    row = g.distance_rows if g.n <= ALL_PAIRS_LIMIT else None
    if row is not None:
        want = row[frm][target] - 1
        closer = [w for w in g.adjacency[frm] if row[w][target] == want]
    else:
        dt = bfs(g, target).dist
        closer = [w for w in g.adjacency[frm] if dt[w] == dt[frm] - 1]
    if tie_break == "lex":
        return closer[0]
    if tie_break == "random":
        if rng is None:
            raise ValueError("random tie-break needs a randomness source")
        return closer[int(rng.random() * len(closer))]
    raise ValueError(f"unknown tie-break rule {tie_break!r}")


# --- file formats -----------------------------------------------------------

def to_json(g: Graph) -> dict:
    doc = {"n": g.n, "edges": [list(e) for e in g.edges()]}
    if g.name:
        doc["name"] = g.name
    if g.landmarks:
        doc["landmarks"] = dict(g.landmarks)
    return doc


def from_json(doc: dict) -> Graph:
    return build(doc["edges"], int(doc["n"]), name=doc.get("name", ""), landmarks=doc.get("landmarks"))


def to_edgelist(g: Graph) -> str:
    lines = []
    if g.name:
        lines.append(f"# {g.name}")
    lines.append(f"n {g.n}")
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def from_edgelist(text: str) -> Graph:
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "n":
                raise GraphError(f"line {lineno}: expected header 'n <count>'")
            n = int(parts[1])
            continue
        if len(parts) != 2:
            raise GraphError(f"line {lineno}: expected 'u v'")
        edges.append((int(parts[0]), int(parts[1])))
    if n is None:
        raise GraphError("missing 'n <count>' header")
    return build(edges, n)


def write_graph(g: Graph, path: str | Path) -> None:
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(json.dumps(to_json(g)) + "\n")
    else:
        path.write_text(to_edgelist(g))


def read_graph(path: str | Path) -> Graph:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        return from_json(json.loads(text))
    return from_edgelist(text)
