r"""Exact and numerical machinery: absorbing-chain capture times, optimal-cop
value iteration, hitting times and exact t-step walk distributions.

Joint states are pairs (cop vertex c, drunk vertex d) at the cop's turn. For a
memoryless policy choosing c' uniformly from ``candidates(c, d)``,

    E(c, d) = mean_{c'} [ 1                                   if c' = d
                          1 + (1/deg d) sum_{d'~d, d'!=c'} E(c', d')  otherwise ]

with E(c, c) = 0. The optimal cop replaces the mean by a minimum over legal
moves.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from .graph import Graph
from .policies import CopPolicy, candidate_table

DEFAULT_TOL = 1e-10
DEFAULT_MAX_SWEEPS = 10**6


class ConvergenceError(RuntimeError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class ValueTable:
    """Expected remaining capture time per joint start, ``values[cop, drunk]``."""

    values: np.ndarray
    iterations: int
    residual: float
    method: str
    tolerance: float = DEFAULT_TOL
    meta: dict = field(default_factory=dict, compare=False)

    def __getitem__(self, state: tuple[int, int]) -> float:
        return float(self.values[state])

    def max(self) -> float:
        return float(self.values.max())

    def argmax(self) -> tuple[int, int]:
        c, d = np.unravel_index(int(np.argmax(self.values)), self.values.shape)
        return int(c), int(d)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["cop", "drunk", "value"])
        n = self.values.shape[0]
        for c in range(n):
            for d in range(n):
                w.writerow([c, d, repr(float(self.values[c, d]))])
        return buf.getvalue()

    @staticmethod
    def read_csv(text: str) -> np.ndarray:
        rows = list(csv.DictReader(io.StringIO(text)))
        n = max(int(r["cop"]) for r in rows) + 1
        out = np.zeros((n, n))
        for r in rows:
            out[int(r["cop"]), int(r["drunk"])] = float(r["value"])
        return out


def transition_matrix(g: Graph) -> sp.csr_matrix:
    a = sp.csr_matrix(g.adjacency_matrix.astype(np.float64))
    return sp.diags(1.0 / g.degrees) @ a


def _continuation(values: np.ndarray, adj: np.ndarray, deg: np.ndarray) -> np.ndarray:
    """W[c', d] = cost of the cop having just moved to c' with the drunk at d."""
    w = 1.0 + (values @ adj.T) / deg[None, :]
    np.fill_diagonal(w, 1.0)
    return w


def exact_expected_capture(g: Graph, policy: CopPolicy, tolerance: float = DEFAULT_TOL,
                           max_sweeps: int = DEFAULT_MAX_SWEEPS, method: str = "sweep") -> ValueTable:
    """Expected capture time from every joint state under a memoryless policy.

    ``method="sweep"`` iterates the fixed-point equation from E = 0 until the
    largest update drops below ``tolerance``; iterates increase monotonically
    toward the solution. ``method="direct"`` solves the linear system with a
    sparse LU factorization instead.

    Raises
    ------
    TypeError
        If the policy keeps history (``smart``, ``greedy:history``).
    ConvergenceError
        If the sweep cap is reached first.
    """
    cand, count = candidate_table(policy)
    n = g.n
    adj = g.adjacency_matrix.astype(np.float64)
    deg = g.degrees.astype(np.float64)
    width = cand.shape[2]
    valid = np.arange(width)[None, None, :] < count[:, :, None]
    cols = np.broadcast_to(np.arange(n)[None, :, None], cand.shape)

    def bellman(e):
        w = _continuation(e, adj, deg)
        new = np.where(valid, w[cand, cols], 0.0).sum(axis=2) / count
        np.fill_diagonal(new, 0.0)
        return new

    meta = {"policy": policy.name, "graph": g.name}
    if method == "direct":
        e = _direct_solve(g, cand, count)
        return ValueTable(e, 1, float(np.abs(bellman(e) - e).max()), "direct", tolerance, meta)
    if method != "sweep":
        raise ValueError(f"unknown method {method!r}")

    e = np.zeros((n, n))
    for it in range(1, max_sweeps + 1):
        new = bellman(e)
        delta = float(np.abs(new - e).max())
        e = new
        if delta < tolerance:
            return ValueTable(e, it, delta, "sweep", tolerance, meta)
    raise ConvergenceError(f"no convergence after {max_sweeps} sweeps", delta)


def _direct_solve(g: Graph, cand: np.ndarray, count: np.ndarray) -> np.ndarray:
    n = g.n
    idx = lambda c, d: c * n + d  # noqa: E731
    rows, cols, vals = [], [], []
    rhs = np.zeros(n * n)
    for c in range(n):
        for d in range(n):
            s = idx(c, d)
            rows.append(s)
            cols.append(s)
            vals.append(1.0)
            if c == d:
                continue
            rhs[s] = 1.0
            k = int(count[c, d])
            for j in range(k):
                c2 = int(cand[c, d, j])
                if c2 == d:
                    continue
                nb = g.adjacency[d]
                p = 1.0 / (k * len(nb))
                for d2 in nb:
                    if d2 != c2:
                        rows.append(s)
                        cols.append(idx(c2, d2))
                        vals.append(-p)
    m = sp.csr_matrix((vals, (rows, cols)), shape=(n * n, n * n))
    return spsolve(m.tocsc(), rhs).reshape(n, n)


def optimal_capture_values(g: Graph, tolerance: float = DEFAULT_TOL, cop_may_idle: bool = False,
                           max_sweeps: int = DEFAULT_MAX_SWEEPS) -> ValueTable:
    """Minimum expected capture time over all cop strategies, by value iteration.

    Starts from V = 0, so iterates are lower bounds that rise monotonically.
    """
    n = g.n
    adj = g.adjacency_matrix.astype(np.float64)
    deg = g.degrees.astype(np.float64)
    width = g.max_degree
    pad = np.array([list(a) + [a[0]] * (width - len(a)) for a in g.adjacency], dtype=np.intp)

    def bellman(v):
        w = _continuation(v, adj, deg)
        best = w[pad].min(axis=1)
        if cop_may_idle:
            best = np.minimum(best, w)
        np.fill_diagonal(best, 0.0)
        return best

    v = np.zeros((n, n))
    for it in range(1, max_sweeps + 1):
        new = bellman(v)
        delta = float(np.abs(new - v).max())
        v = new
        if delta < tolerance:
            return ValueTable(v, it, delta, "value-iteration", tolerance,
                              {"graph": g.name, "cop_may_idle": cop_may_idle})
    raise ConvergenceError(f"value iteration did not converge in {max_sweeps} sweeps", delta)


def hitting_times(g: Graph, target: int) -> np.ndarray:
    """Expected steps for a simple random walk from each vertex to reach ``target``."""
    n = g.n
    keep = [v for v in range(n) if v != target]
    p = transition_matrix(g).toarray()
    a = np.eye(n - 1) - p[np.ix_(keep, keep)]
    h = np.zeros(n)
    if keep:
        h[keep] = np.linalg.solve(a, np.ones(n - 1))
    return h


def hitting_time_matrix(g: Graph) -> np.ndarray:
    """``H[i, j]``: expected hitting time from i to j, via the fundamental matrix."""
    n = g.n
    deg = g.degrees.astype(np.float64)
    pi = deg / deg.sum()
    p = transition_matrix(g).toarray()
    z = np.linalg.inv(np.eye(n) - p + np.outer(np.ones(n), pi))
    h = (np.diag(z)[None, :] - z) / pi[None, :]
    np.fill_diagonal(h, 0.0)
    return h


@dataclass(frozen=True)
class DistanceDistribution:
    """Law of a simple random walk after ``t`` steps from ``source``."""

    source: int
    t: int
    probs: np.ndarray

    def __getitem__(self, v: int) -> float:
        return float(self.probs[v])


def tstep_distribution(g: Graph, source: int, t: int) -> DistanceDistribution:
    if t < 0:
        raise ValueError("t must be non-negative")
    pt = transition_matrix(g).T.tocsr()
    p = np.zeros(g.n)
    p[source] = 1.0
    for _ in range(t):
        p = pt @ p
    return DistanceDistribution(source, t, p)


def walk_powers(adj: np.ndarray, t_max: int) -> list[np.ndarray]:
    """Batched ``P^t`` for t = 0..t_max; ``adj`` has shape ``(..., n, n)``."""
    a = adj.astype(np.float64)
    p = a / a.sum(axis=-1, keepdims=True)
    eye = np.broadcast_to(np.eye(adj.shape[-1]), a.shape).copy()
    out = [eye]
    for _ in range(t_max):
        out.append(out[-1] @ p)
    return out


def batch_distances(adj: np.ndarray) -> np.ndarray:
    """Batched all-pairs hop distances for connected graphs, shape ``(..., n, n)``."""
    n = adj.shape[-1]
    a = adj.astype(np.int32)
    reach = np.broadcast_to(np.eye(n, dtype=bool), adj.shape).copy()
    dist = np.where(reach, 0, -1).astype(np.int64)
    for k in range(1, n):
        reach_next = reach | ((reach.astype(np.int32) @ a) > 0)
        dist[reach_next & ~reach] = k
        reach = reach_next
    return dist
