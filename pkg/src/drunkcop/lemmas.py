"""Checkers for the random-walk and capture-time inequalities.

Each checker returns a :class:`LemmaReport` holding the worst margin seen
(bound minus value for upper bounds, value minus bound for lower bounds) and,
on failure, a witness. Logarithms are natural. Non-strict inequalities pass
with a 1e-12 guard band; strict ones need a positive margin.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import generators as gen
from .analysis import (batch_distances, exact_expected_capture, tstep_distribution, walk_powers)
from .graph import Graph, regularity
from .policies import Greedy

GUARD = 1e-12
LOG_CONVENTION = "natural"


@dataclass
class LemmaReport:
    lemma: str
    domain: str
    worst_margin: float
    passed: bool
    counterexample: dict | None = None
    checked: int = 0
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_jsonable)

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.lemma}: {self.domain}; worst margin {self.worst_margin:.6g}"


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(type(obj))


def _report(lemma, domain, margin, checked, witness, strict=False, **details) -> LemmaReport:
    ok = margin > 0 if strict else margin >= -GUARD
    details.setdefault("log", LOG_CONVENTION)
    return LemmaReport(lemma, domain, float(margin), bool(ok), None if ok else witness, checked, details)


def keylemma_bound(n: int, t: int) -> float:
    return 1.0 + math.sqrt(t) * math.sqrt(1.0 + 5.0 * math.log(n))


def four_lemma_bound(n: int) -> float:
    return 1.0 / (4.0 * n ** (2.0 / 3.0))


def _near_mass(g: Graph, x0: int, steps: int) -> float:
    p = tstep_distribution(g, x0, steps).probs
    near = g.distance_matrix[x0] < steps
    return float(p[near].sum())


def four_step_prob(g: Graph, x0: int) -> float:
    """P(d(x0, x4) < 4) for a simple random walk started at x0."""
    return _near_mass(g, x0, 4)


def three_step_prob(g: Graph, x0: int) -> float:
    """P(d(x0, x3) < 3)."""
    return _near_mass(g, x0, 3)


# --- per-graph checks ---------------------------------------------------------

def _vc_margins(adj: np.ndarray, dist: np.ndarray, t_max: int):
    """Worst VC and keylemma margins over t, per batch item; shapes (B,)."""
    deg = adj.sum(axis=-1).astype(np.float64)
    ratio = np.sqrt(deg[:, None, :] / deg[:, :, None])
    n = adj.shape[-1]
    d2 = dist.astype(np.float64) ** 2
    powers = walk_powers(adj, t_max)
    vc = np.full(adj.shape[0], np.inf)
    vc_t = np.zeros(adj.shape[0], dtype=np.int64)
    key = np.full(adj.shape[0], np.inf)
    key_t = np.zeros(adj.shape[0], dtype=np.int64)
    for t, pt in enumerate(powers):
        expected = (pt * dist).sum(axis=-1)
        km = (keylemma_bound(n, t) - expected).min(axis=-1)
        better = km < key
        key = np.where(better, km, key)
        key_t = np.where(better, t, key_t)
        if t == 0:
            continue
        bound = math.sqrt(math.e) * ratio * np.exp(-d2 / (2.0 * t))
        m = (bound - pt).min(axis=(-2, -1))
        better = m < vc
        vc = np.where(better, m, vc)
        vc_t = np.where(better, t, vc_t)
    return vc, vc_t, key, key_t


def vc_bound_check(g: Graph, t_max: int) -> LemmaReport:
    """p^t(x,y) <= sqrt(e) sqrt(deg y / deg x) exp(-d(x,y)^2 / 2t) for all x, y and 1 <= t <= t_max."""
    if t_max < 1:
        raise ValueError("t_max must be at least 1")
    adj = g.adjacency_matrix[None].astype(bool)
    vc, vc_t, _, _ = _vc_margins(adj, g.distance_matrix[None], t_max)
    return _report("varopoulos-carne", f"{g.name or 'graph'}, t<={t_max}", vc[0], 1,
                   {"graph": g.name, "t": int(vc_t[0])})


def expected_distance_check(g: Graph, t: int) -> LemmaReport:
    """E[d(x0, x_t)] < 1 + sqrt(t) sqrt(1 + 5 ln n) from every start x0."""
    dm = g.distance_matrix
    worst, witness = math.inf, None
    bound = keylemma_bound(g.n, t)
    for x0 in range(g.n):
        e = float(tstep_distribution(g, x0, t).probs @ dm[x0])
        if bound - e < worst:
            worst, witness = bound - e, {"graph": g.name, "x0": x0, "expected": e, "bound": bound}
    return _report("keylemma", f"{g.name or 'graph'}, t={t}", worst, 1, witness, strict=True)


def regular_greedy_bound_check(g: Graph, tolerance: float = 1e-12) -> LemmaReport:
    """Greedy (lex) worst-start expected capture time <= r diam / 2 < 3n/2 on a regular graph."""
    r = regularity(g)
    if r is None:
        raise ValueError(f"{g.name or 'graph'} is not regular")
    table = exact_expected_capture(g, Greedy(g, "lex"), tolerance=tolerance)
    worst = table.max()
    bound = r * g.diameter / 2.0
    margin = min(bound - worst, 1.5 * g.n - bound)
    ok = bound - worst >= -GUARD and bound < 1.5 * g.n
    rep = _report("regular-greedy-bound", g.name or "graph", margin, 1,
                  {"graph": g.name, "state": table.argmax(), "value": worst, "bound": bound},
                  max_expected=worst, bound=bound, r=r, diameter=g.diameter, n=g.n)
    rep.passed = bool(ok)
    if ok:
        rep.counterexample = None
    return rep


# --- suites --------------------------------------------------------------------

def _split(n: int, workers: int):
    total = 1 << (n * (n - 1) // 2)
    parts = max(1, workers) * 4
    cuts = np.linspace(0, total, parts + 1).astype(np.int64)
    return [(n, int(a), int(b)) for a, b in zip(cuts[:-1], cuts[1:]) if b > a]


def _map(fn, jobs, workers):
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, jobs))
    return [fn(j) for j in jobs]


def _four_lemma_range(job):
    n, lo, hi = job
    bound = four_lemma_bound(n)
    worst, witness, count = math.inf, None, 0
    for masks, adj in gen.connected_adjacency_batches(n, start=lo, stop=hi):
        dist = batch_distances(adj)
        p4 = walk_powers(adj, 4)[4]
        prob = (p4 * (dist < 4)).sum(axis=-1)
        margin = prob - bound
        flat = int(np.argmin(margin))
        b, x0 = divmod(flat, n)
        if margin[b, x0] < worst:
            worst = float(margin[b, x0])
            witness = {"n": n, "mask": int(masks[b]), "x0": int(x0), "prob": float(prob[b, x0]), "bound": bound}
        count += len(masks)
    return worst, witness, count


def four_lemma_check(n_max: int = 7, workers: int = 1, n_min: int = 2) -> LemmaReport:
    """P(d(x0, x4) < 4) >= 1/(4 n^(2/3)) on every labeled connected graph with n <= n_max, every start."""
    worst, witness, count = math.inf, None, 0
    for n in range(n_min, n_max + 1):
        for w, wit, c in _map(_four_lemma_range, _split(n, workers), workers):
            count += c
            if w < worst:
                worst, witness = w, wit
    return _report("four-lemma", f"all labeled connected graphs, {n_min}<=n<={n_max}, all starts",
                   worst, count, witness, tightest=witness)


def _diam_delta_range(job):
    n, lo, hi = job
    worst, witness, count, equal = math.inf, None, 0, 0
    for masks, adj in gen.connected_adjacency_batches(n, start=lo, stop=hi):
        diam = batch_distances(adj).max(axis=(-2, -1))
        delta = adj.sum(axis=-1).max(axis=-1)
        margin = (n + 1) - (diam + delta)
        equal += int((margin == 0).sum())
        b = int(np.argmin(margin))
        if margin[b] < worst:
            worst = float(margin[b])
            witness = {"n": n, "mask": int(masks[b]), "diameter": int(diam[b]), "max_degree": int(delta[b])}
        count += len(masks)
    return worst, witness, count, equal


def diam_delta_check(n_max: int = 7, graphs=(), workers: int = 1) -> LemmaReport:
    """diam(G) + Δ <= n + 1 exhaustively for n <= n_max and on each graph in ``graphs``."""
    worst, witness, count, equal = math.inf, None, 0, 0
    for n in range(1, n_max + 1):
        for w, wit, c, e in _map(_diam_delta_range, _split(n, workers), workers):
            count, equal = count + c, equal + e
            if w < worst:
                worst, witness = w, wit
    extra = 0
    for g in graphs:
        m = g.n + 1 - (g.diameter + g.max_degree)
        extra += 1
        if m < worst:
            worst, witness = m, {"graph": g.name, "diameter": g.diameter, "max_degree": g.max_degree}
    paths_tight = all(gen.path(n).diameter + gen.path(n).max_degree == n + 1 for n in range(3, n_max + 1))
    return _report("diam-delta", f"all labeled connected graphs, n<={n_max}, plus {extra} family instances",
                   worst, count + extra, witness, equality_cases=equal, equality_on_paths=paths_tight)


def three_step_check(ns=(10, 50, 100), tolerance: float = 1e-12) -> LemmaReport:
    """On funnel(n), P(d(x0,x3) < 3) equals 2/n + (1-2/n)(2/n) and stays below 4/n."""
    worst, witness, values = math.inf, None, {}
    formula_ok = True
    for n in ns:
        p = three_step_prob(gen.funnel(n), 0)
        formula = 2.0 / n + (1.0 - 2.0 / n) * (2.0 / n)
        values[str(n)] = {"prob": p, "formula": formula, "four_over_n": 4.0 / n}
        formula_ok &= abs(p - formula) <= tolerance
        if 4.0 / n - p < worst:
            worst, witness = 4.0 / n - p, {"n": n, **values[str(n)]}
    rep = _report("three-step", f"funnel(n), n in {list(ns)}", worst, len(ns), witness, strict=True,
                  values=values, matches_formula=formula_ok)
    if not formula_ok:
        rep.passed, rep.counterexample = False, {"values": values}
    return rep


def random_suite_graphs(count: int = 50, n_max: int = 12, seed: int = 0) -> list[Graph]:
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        n = int(rng.integers(2, n_max + 1))
        p = float(rng.uniform(0.15, 0.7))
        out.append(gen.random_connected(n, p, seed=int(rng.integers(2**31))))
    return out


def vc_keylemma_suite(n_exhaustive: int = 6, t_exhaustive: int = 16, random_count: int = 50,
                      random_n_max: int = 12, t_random: int = 10, seed: int = 0) -> tuple[LemmaReport, LemmaReport]:
    """Both random-walk inequalities over all connected graphs on n_exhaustive vertices
    plus a seeded sample of random graphs."""
    vc_worst = key_worst = math.inf
    vc_wit = key_wit = None
    count = 0
    for masks, adj in gen.connected_adjacency_batches(n_exhaustive, chunk=4096):
        dist = batch_distances(adj)
        vc, vc_t, key, key_t = _vc_margins(adj, dist, t_exhaustive)
        count += len(masks)
        b = int(np.argmin(vc))
        if vc[b] < vc_worst:
            vc_worst, vc_wit = float(vc[b]), {"n": n_exhaustive, "mask": int(masks[b]), "t": int(vc_t[b])}
        b = int(np.argmin(key))
        if key[b] < key_worst:
            key_worst, key_wit = float(key[b]), {"n": n_exhaustive, "mask": int(masks[b]), "t": int(key_t[b])}
    for g in random_suite_graphs(random_count, random_n_max, seed):
        vc, vc_t, key, key_t = _vc_margins(g.adjacency_matrix[None].astype(bool), g.distance_matrix[None], t_random)
        count += 1
        if vc[0] < vc_worst:
            vc_worst, vc_wit = float(vc[0]), {"graph": g.name, "t": int(vc_t[0])}
        if key[0] < key_worst:
            key_worst, key_wit = float(key[0]), {"graph": g.name, "t": int(key_t[0])}
    domain = (f"all connected graphs n={n_exhaustive} (t<={t_exhaustive}) + {random_count} random graphs "
              f"n<={random_n_max} (t<={t_random}, seed={seed})")
    return (_report("varopoulos-carne", domain, vc_worst, count, vc_wit),
            _report("keylemma", domain, key_worst, count, key_wit, strict=True))


def tree_bound_check(count: int = 100, n_max: int = 12, seed: int = 0) -> LemmaReport:
    """Greedy (lex) expected capture time on a tree is at most n from every pair of starts."""
    rng = np.random.default_rng(seed)
    worst, witness = math.inf, None
    for _ in range(count):
        n = int(rng.integers(2, n_max + 1))
        g = gen.random_tree(n, seed=int(rng.integers(2**31)))
        table = exact_expected_capture(g, Greedy(g, "lex"), tolerance=1e-12)
        margin = n - table.max()
        if margin < worst:
            worst, witness = margin, {"graph": g.name, "state": table.argmax(), "value": table.max()}
    return _report("tree-bound", f"{count} random trees, n<={n_max}, seed={seed}", worst, count, witness,
                   tightest=witness)


def stage_telemetry_check(g: Graph, outcomes, cop_start: int, drunk_start: int) -> LemmaReport:
    """Smart-cop telemetry: stage 1 lasts exactly d(cop_start, drunk_start) moves when it ends
    by arrival (and less when it ends early); once stage 4 is active every cop step leaves the
    drunk within distance 2."""
    d0 = g.dist(cop_start, drunk_start)
    dm = g.distance_rows
    worst, witness, arrivals = math.inf, None, 0
    for o in outcomes:
        tel = o.telemetry
        t1 = tel["stage_times"][0]
        if tel["stage1_exit"] == "arrival":
            arrivals += 1
            margin = -abs(t1 - d0)
        else:
            margin = 0 if t1 <= d0 else -(t1 - d0)
        if margin < worst:
            worst, witness = margin, {"seed": o.seed, "T1": t1, "distance": d0, "exit": tel["stage1_exit"]}
        start = tel["stage4_move"]
        if start is not None and o.trajectory is not None:
            traj = o.trajectory
            for m in range(start, len(traj)):
                after_cop = dm[traj[m][0]][traj[m - 1][1]]
                if 2 - after_cop < worst:
                    worst, witness = 2 - after_cop, {"seed": o.seed, "move": m, "distance": after_cop}
    sums_ok = all(sum(o.telemetry["stage_times"]) == o.capture_time for o in outcomes if not o.truncated)
    rep = _report("stage-telemetry", f"{len(outcomes)} smart-cop trials on {g.name}", worst, len(outcomes),
                  witness, arrivals=arrivals, stage_times_sum_to_capture=sums_ok)
    if not sums_ok:
        rep.passed = False
    return rep


def stage_distance_check(report, n: int) -> LemmaReport:
    """Mean stage-end distances against the corollary bounds:
    E[D1] <= 1 + sqrt(n) sqrt(1 + 5 ln n) and E[D2] < (5 ln n)^(3/4) n^(1/4)."""
    sm = report.stage_means or {}
    b1 = 1.0 + math.sqrt(n) * math.sqrt(1.0 + 5.0 * math.log(n))
    b2 = (5.0 * math.log(n)) ** 0.75 * n ** 0.25
    margins = []
    if sm.get("D1") is not None:
        margins.append(b1 - sm["D1"])
    if sm.get("D2") is not None:
        margins.append(b2 - sm["D2"])
    worst = min(margins) if margins else math.inf
    return _report("stage-distances", f"{report.graph}, {report.trials} trials", worst, report.trials,
                   {"D1": sm.get("D1"), "D2": sm.get("D2"), "D1_bound": b1, "D2_bound": b2},
                   D1_bound=b1, D2_bound=b2)


def family_instances() -> list[Graph]:
    """The deterministic family members exercised by the test and acceptance runs."""
    out = [gen.path(n) for n in (2, 5, 20, 100)]
    out += [gen.cycle(n) for n in (3, 4, 6, 200)]
    out += [gen.complete(5), gen.complete_bipartite(10, 10), gen.petersen()]
    out += [gen.lollipop(n, c=1.0) for n in (64, 216, 512)]
    out += [gen.ladder_basement(n) for n in (40, 80, 160)]
    out += [gen.projective_incidence(q) for q in (2, 3)]
    out += [gen.funnel(n) for n in (10, 50, 100)]
    return out
