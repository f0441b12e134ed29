"""Graph families used as examples and counterexamples, plus random and exhaustive sources.

Every generator returns a validated :class:`~drunkcop.graph.Graph` whose
``landmarks`` record the conventional cop and drunk start vertices.
"""

from __future__ import annotations

import itertools
import logging
import math
from typing import Callable, Iterator

import numpy as np

from .graph import Graph, build

log = logging.getLogger(__name__)

MAX_ENUMERATION_N = 8


def path(n: int) -> Graph:
    """P_n labeled 0..n-1 along the path."""
    if n < 2:
        raise ValueError("path needs n >= 2")
    return build([(i, i + 1) for i in range(n - 1)], n, name=f"path({n})", landmarks={"cop": 0, "drunk": n - 1})


def cycle(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    edges = [(i, (i + 1) % n) for i in range(n)]
    return build(edges, n, name=f"cycle({n})", landmarks={"cop": 0, "drunk": n // 2})


def complete(n: int) -> Graph:
    if n < 2:
        raise ValueError("complete graph needs n >= 2")
    return build(itertools.combinations(range(n), 2), n, name=f"complete({n})", landmarks={"cop": 0, "drunk": n - 1})


def complete_bipartite(a: int, b: int) -> Graph:
    """K_{a,b} with sides 0..a-1 and a..a+b-1; both starts on side one when possible."""
    if a < 1 or b < 1:
        raise ValueError("complete_bipartite needs a, b >= 1")
    edges = [(i, a + j) for i in range(a) for j in range(b)]
    drunk = 1 if a >= 2 else a
    return build(edges, a + b, name=f"complete_bipartite({a},{b})", landmarks={"cop": 0, "drunk": drunk})


def lollipop(n: int, c: float = 1.0) -> Graph:
    """Clique on 0..k-1 with a path k-1, k, ..., n-1 hanging off vertex k-1.

    The clique size is ``k = max(2, round(c * n**(1/3)))`` with halves rounded up.
    """
    if n < 3 or c <= 0:
        raise ValueError("lollipop needs n >= 3 and c > 0")
    k = max(2, math.floor(c * n ** (1.0 / 3.0) + 0.5))
    if n - k < 1:
        raise ValueError(f"lollipop({n}, c={c}): clique of size {k} leaves no path")
    edges = list(itertools.combinations(range(k), 2))
    edges += [(i, i + 1) for i in range(k - 1, n - 1)]
    return build(edges, n, name=f"lollipop({n},c={c:g})", landmarks={"cop": n - 1, "drunk": 0, "clique_top": k - 1})


def ladder_basement(n: int) -> Graph:
    """Two rails of length L = n/4 joined by rungs, dropping into a K_{L,L} basement.

    Rail vertices interleave: rail A is 0, 2, ..., 2L-2 and rail B is
    1, 3, ..., 2L-1, so the rung partner of a rail vertex always has the
    neighboring id. The bottom of rail A (2L-2) is joined to every vertex of
    basement side A (2L..3L-1); the bottom of rail B (2L-1) to every vertex of
    side B (3L..4L-1). The cop starts at the top of rail A (vertex 0) and the
    drunk at 2L.
    """
    if n < 12 or n % 4:
        raise ValueError("ladder_basement needs n >= 12 divisible by 4")
    rail = n // 4
    basement = n - 2 * rail
    side_a = basement // 2
    a0 = 2 * rail
    b0 = a0 + side_a
    edges = []
    for i in range(rail):
        edges.append((2 * i, 2 * i + 1))
        if i + 1 < rail:
            edges.append((2 * i, 2 * i + 2))
            edges.append((2 * i + 1, 2 * i + 3))
    edges += [(u, v) for u in range(a0, b0) for v in range(b0, n)]
    edges += [(2 * rail - 2, u) for u in range(a0, b0)]
    edges += [(2 * rail - 1, v) for v in range(b0, n)]
    marks = {"cop": 0, "drunk": a0, "rail_a_bottom": 2 * rail - 2, "rail_b_bottom": 2 * rail - 1,
             "basement_a": a0, "basement_b": b0}
    return build(edges, n, name=f"ladder_basement({n})", landmarks=marks)


def _is_prime(q: int) -> bool:
    return q >= 2 and all(q % p for p in range(2, math.isqrt(q) + 1))


def projective_points(q: int) -> list[tuple[int, int, int]]:
    """Normalized representatives of the 1-dimensional subspaces of GF(q)^3."""
    pts = []
    for v in itertools.product(range(q), repeat=3):
        nz = next((x for x in v if x), 0)
        if nz == 1:
            pts.append(v)
    return pts


def projective_incidence(q: int) -> Graph:
    """Point-line incidence graph of PG(2, q) for prime q.

    Points take ids 0..N-1 and lines N..2N-1 with N = q^2 + q + 1; a line is
    stored by the normal vector of its plane, and a point lies on it when their
    dot product vanishes mod q.
    """
    if not _is_prime(q):
        raise ValueError(f"projective_incidence needs a prime order, got {q}")
    pts = projective_points(q)
    N = len(pts)
    edges = [(i, N + j) for i, p in enumerate(pts) for j, ln in enumerate(pts)
             if (p[0] * ln[0] + p[1] * ln[1] + p[2] * ln[2]) % q == 0]
    g = build(edges, 2 * N, name=f"projective_incidence({q})")
    far = int(np.argmax(g.distance_matrix[0]))
    g.landmarks.update(cop=0, drunk=far, first_line=N)
    return g


def funnel(n: int) -> Graph:
    """x0 = 0, its single neighbor v1 = 1, then two layers of (n-2)/2 vertices.

    v1 is joined to every vertex of the first layer, and the two layers form a
    complete bipartite graph.
    """
    if n < 6 or n % 2:
        raise ValueError("funnel needs an even n >= 6")
    half = (n - 2) // 2
    layer2 = range(2, 2 + half)
    layer3 = range(2 + half, n)
    edges = [(0, 1)] + [(1, u) for u in layer2] + [(u, v) for u in layer2 for v in layer3]
    return build(edges, n, name=f"funnel({n})", landmarks={"cop": 0, "drunk": n - 1})


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return build(outer + spokes + inner, 10, name="petersen", landmarks={"cop": 0, "drunk": 7})


def _far_landmarks(g: Graph) -> Graph:
    g.landmarks.update(cop=0, drunk=int(np.argmax(g.distance_matrix[0])))
    return g


def random_tree(n: int, seed: int) -> Graph:
    """Random recursive tree: vertex i attaches to a uniform earlier vertex."""
    if n < 2:
        raise ValueError("random_tree needs n >= 2")
    rng = np.random.default_rng(seed)
    edges = [(int(rng.integers(i)), i) for i in range(1, n)]
    return _far_landmarks(build(edges, n, name=f"random_tree({n},seed={seed})"))


def random_connected(n: int, edge_prob: float, seed: int, max_tries: int = 100) -> Graph:
    """G(n, p) conditioned on connectivity by rejection.

    After ``max_tries`` failed draws a random spanning tree is overlaid on the
    last draw; the graph name then ends in ``+tree`` and a warning is logged.
    """
    if not 0 < edge_prob <= 1:
        raise ValueError("edge_prob must lie in (0, 1]")
    if n < 2:
        raise ValueError("random_connected needs n >= 2")
    rng = np.random.default_rng(seed)
    pairs = list(itertools.combinations(range(n), 2))
    name = f"random_connected({n},{edge_prob:g},seed={seed})"
    for _ in range(max_tries):
        keep = rng.random(len(pairs)) < edge_prob
        edges = [p for p, k in zip(pairs, keep) if k]
        if _connected(n, edges):
            return _far_landmarks(build(edges, n, name=name))
    log.warning("%s: connectivity rejection cap hit, overlaying a spanning tree", name)
    present = set(edges)
    for i in range(1, n):
        e = (int(rng.integers(i)), i)
        if e not in present:
            present.add(e)
    return _far_landmarks(build(sorted(present), n, name=name + "+tree"))


def random_regular(n: int, r: int, seed: int) -> Graph:
    """Connected random r-regular graph (networkx pairing model, redrawn until connected)."""
    import networkx as nx

    for attempt in range(1000):
        h = nx.random_regular_graph(r, n, seed=seed * 1000 + attempt)
        if nx.is_connected(h):
            return _far_landmarks(build(list(h.edges()), n, name=f"random_regular({n},{r},seed={seed})"))
    raise RuntimeError(f"no connected {r}-regular graph on {n} vertices found")


def _connected(n: int, edges) -> bool:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = n
    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            comps -= 1
    return comps == 1


# --- exhaustive enumeration ---------------------------------------------------

def edge_slots(n: int) -> list[tuple[int, int]]:
    """Edge order behind the enumeration bitmasks: bit k is pair k of combinations(range(n), 2)."""
    return list(itertools.combinations(range(n), 2))


def connected_adjacency_batches(n: int, chunk: int = 1 << 16, start: int = 0, stop: int | None = None
                                ) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield ``(masks, adjacency)`` for every connected labeled graph on n vertices.

    ``adjacency`` is a boolean array of shape ``(B, n, n)``; masks index into
    :func:`edge_slots`. ``start``/``stop`` restrict the mask range so workers
    can split the enumeration.
    """
    if not 1 <= n <= MAX_ENUMERATION_N:
        raise ValueError(f"exhaustive enumeration supports 1 <= n <= {MAX_ENUMERATION_N}")
    slots = edge_slots(n)
    total = 1 << len(slots)
    stop = total if stop is None else min(stop, total)
    iu = np.array([u for u, _ in slots], dtype=np.intp)
    iv = np.array([v for _, v in slots], dtype=np.intp)
    bits = np.arange(len(slots), dtype=np.uint64)
    for lo in range(start, stop, chunk):
        masks = np.arange(lo, min(lo + chunk, stop), dtype=np.uint64)
        present = ((masks[:, None] >> bits[None, :]) & np.uint64(1)).astype(bool)
        adj = np.zeros((len(masks), n, n), dtype=bool)
        adj[:, iu, iv] = present
        adj[:, iv, iu] = present
        keep = _batch_connected(adj)
        if keep.any():
            yield masks[keep], adj[keep]


def _batch_connected(adj: np.ndarray) -> np.ndarray:
    n = adj.shape[1]
    reach = adj[:, 0, :].copy()
    reach[:, 0] = True
    for _ in range(n - 1):
        reach = reach | np.einsum("bi,bij->bj", reach.astype(np.uint8), adj.astype(np.uint8)).astype(bool)
    return reach.all(axis=1)


def graph_from_mask(n: int, mask: int) -> Graph:
    slots = edge_slots(n)
    return build([slots[k] for k in range(len(slots)) if mask >> k & 1], n, name=f"labeled({n},mask={mask})")


def all_connected_graphs(n: int) -> Iterator[Graph]:
    """Every labeled simple connected graph on n vertices, each exactly once."""
    for masks, _ in connected_adjacency_batches(n):
        for m in masks.tolist():
            yield graph_from_mask(n, m)


# --- registry used by the CLI -----------------------------------------------

FAMILIES: dict[str, Callable[..., Graph]] = {
    "path": path,
    "cycle": cycle,
    "complete": complete,
    "complete_bipartite": complete_bipartite,
    "lollipop": lollipop,
    "ladder_basement": ladder_basement,
    "projective_incidence": projective_incidence,
    "funnel": funnel,
    "petersen": petersen,
    "random_connected": random_connected,
    "random_tree": random_tree,
    "random_regular": random_regular,
}

ALIASES = {
    "bipartite": "complete_bipartite",
    "ladder": "ladder_basement",
    "projective": "projective_incidence",
}

# fixed parameter sets reachable by name alone
NAMED = {
    "heawood": ("projective_incidence", {"q": 2}),
}


def family_params(family: str) -> list[str]:
    import inspect

    fn = FAMILIES[ALIASES.get(family, family)]
    return [p.name for p in inspect.signature(fn).parameters.values() if p.name != "max_tries"]


def make(family: str, **params) -> Graph:
    """Build a family member by name, e.g. ``make("lollipop", n=64, c=1)``."""
    if family in NAMED:
        family, fixed = NAMED[family]
        params = {**fixed, **params}
    family = ALIASES.get(family, family)
    if family not in FAMILIES:
        raise ValueError(f"unknown graph family {family!r}")
    return FAMILIES[family](**params)


def parse_family_spec(spec: str) -> tuple[str, dict]:
    """Parse an inline spec such as ``path:100``, ``lollipop:n=64,c=1`` or ``heawood``.

    Positional values follow the generator's signature order.
    """
    name, _, rest = spec.partition(":")
    name = name.strip()
    canonical = NAMED.get(name, (ALIASES.get(name, name), {}))[0]
    if canonical not in FAMILIES:
        raise ValueError(f"unknown graph family {name!r}")
    order = [p for p in family_params(canonical) if p not in NAMED.get(name, ("", {}))[1]]
    params: dict = {}
    if rest:
        for i, item in enumerate(rest.split(",")):
            if "=" in item:
                key, _, val = item.partition("=")
            else:
                if i >= len(order):
                    raise ValueError(f"too many positional parameters for {name}")
                key, val = order[i], item
            params[key.strip()] = _number(val.strip())
    return name, params


def _number(text: str):
    try:
        return int(text)
    except ValueError:
        return float(text)
