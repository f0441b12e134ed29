"""Game semantics and the Monte Carlo harness.

A move is a cop step followed by a uniform random drunk step; the capture time
is the number of the move on which the two first share a vertex. Each move
consumes exactly two draws from the trial's stream (cop first, then drunk),
used or not, so the scalar loop in :func:`play_game` and the batched loop for
memoryless policies see identical randomness.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .graph import Graph
from .policies import CopPolicy, candidate_table, make_policy
from .rng import TrialStream, batch_uniforms, trial_keys

log = logging.getLogger(__name__)

DEFAULT_MOVE_CAP = 10**7
WORKERS_ENV = "DRUNKCOP_WORKERS"
# batched path is used while the candidate table stays under this many entries
BATCH_TABLE_LIMIT = 20_000_000
BATCH_CHUNK = 1 << 17


class PolicyFault(RuntimeError):
    """A policy proposed an illegal cop step."""


@dataclass(frozen=True)
class GameConfig:
    cop_start: int
    drunk_start: int
    cop_may_idle: bool = False
    move_cap: int = DEFAULT_MOVE_CAP

    def validate(self, g: Graph) -> None:
        for label, v in (("cop_start", self.cop_start), ("drunk_start", self.drunk_start)):
            if not 0 <= v < g.n:
                raise ValueError(f"{label}={v} outside 0..{g.n - 1}")
        if self.move_cap < 1:
            raise ValueError("move_cap must be at least 1")


@dataclass
class TrialOutcome:
    capture_time: int | None
    truncated: bool = False
    trajectory: list[tuple[int, int]] | None = None
    telemetry: dict | None = None
    seed: tuple[int, int] | None = None

    def dump_trajectory(self) -> str:
        """One ``move_index cop_vertex drunk_vertex`` line per recorded position."""
        return "".join(f"{i} {y} {x}\n" for i, (y, x) in enumerate(self.trajectory or []))


def play_game(g: Graph, policy: CopPolicy, cfg: GameConfig, rng, record: bool = False) -> TrialOutcome:
    """Play one game; ``rng`` needs a ``random()`` method returning floats in [0, 1).

    The trajectory, when recorded, lists (cop, drunk) after every completed
    move, starting with the initial positions; a capture in the middle of a
    move appends the capture position.
    """
    cfg.validate(g)
    y, x = cfg.cop_start, cfg.drunk_start
    traj = [(y, x)] if record else None
    policy.reset(y, x)
    if y == x:
        return TrialOutcome(0, trajectory=traj, telemetry=policy.telemetry())
    adj = g.adjacency
    idle = cfg.cop_may_idle
    decide = policy.decide
    draw = rng.random
    for move in range(1, cfg.move_cap + 1):
        u_cop = draw()
        u_drunk = draw()
        w = decide(y, x, u_cop)
        if w not in adj[y] and not (idle and w == y):
            raise PolicyFault(f"{policy.name} moved {y} -> {w}, not a legal step")
        y = w
        if y != x:
            nbrs = adj[x]
            x = nbrs[int(u_drunk * len(nbrs))]
        if traj is not None:
            traj.append((y, x))
        if y == x:
            return TrialOutcome(move, trajectory=traj, telemetry=policy.telemetry())
    return TrialOutcome(None, truncated=True, trajectory=traj, telemetry=policy.telemetry())


@dataclass
class SimulationReport:
    trials: int
    mean: float | None
    stderr: float | None
    min: int | None
    max: int | None
    histogram: list[list[int]]
    truncated: int
    master_seed: int
    policy: str = ""
    graph: str = ""
    cop_start: int = 0
    drunk_start: int = 0
    stage_means: dict | None = None
    capture_times: np.ndarray | None = field(default=None, repr=False, compare=False)
    outcomes: list[TrialOutcome] | None = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("capture_times")
        d.pop("outcomes")
        return d

    def trials_csv(self) -> str:
        rows = ["trial,capture_time"]
        rows += [f"{i},{'' if t < 0 else t}" for i, t in enumerate(self.capture_times.tolist())]
        return "\n".join(rows) + "\n"


def _summarize(times: np.ndarray, master_seed: int, outcomes=None, **labels) -> SimulationReport:
    trials = len(times)
    done = times[times >= 0]
    truncated = trials - len(done)
    if truncated:
        log.error("%d of %d trials hit the move cap; the mean is undefined", truncated, trials)
    if len(done):
        lo, hi = int(done.min()), int(done.max())
        bins = min(20, hi - lo + 1)
        counts, edges = np.histogram(done, bins=bins, range=(lo, hi + 1))
        hist = [[int(math.ceil(edges[i])), int(math.ceil(edges[i + 1])), int(counts[i])] for i in range(bins)]
    else:
        lo = hi = None
        hist = []
    mean = float(done.mean()) if len(done) and not truncated else None
    stderr = float(done.std(ddof=1) / math.sqrt(trials)) if trials > 1 and mean is not None else None
    stage_means = None
    if outcomes and outcomes[0].telemetry and "stage_times" in outcomes[0].telemetry:
        tel = [o.telemetry for o in outcomes]
        st = np.array([t["stage_times"] for t in tel], dtype=np.float64)
        stage_means = {f"T{i + 1}": float(st[:, i].mean()) for i in range(4)}
        for key in ("D1", "D2"):
            vals = [t[key] for t in tel if t[key] is not None]
            stage_means[key] = float(np.mean(vals)) if vals else None
            stage_means[f"{key}_count"] = len(vals)
    return SimulationReport(trials, mean, stderr, lo, hi, hist, truncated, master_seed,
                            stage_means=stage_means, capture_times=times, outcomes=outcomes, **labels)


def _run_scalar(g: Graph, policy_spec: str, cfg: GameConfig, master_seed: int, lo: int, hi: int,
                record: bool) -> list[TrialOutcome]:
    policy = make_policy(policy_spec, g, cop_start=cfg.cop_start, cop_may_idle=cfg.cop_may_idle)
    out = []
    for i in range(lo, hi):
        o = play_game(g, policy, cfg, TrialStream(master_seed, i), record=record)
        o.seed = (master_seed, i)
        out.append(o)
    return out


def _run_batched(g: Graph, policy: CopPolicy, cfg: GameConfig, master_seed: int, lo: int, hi: int) -> np.ndarray:
    """Capture times (``-1`` if truncated) for trials lo..hi-1 of a memoryless policy."""
    cand, count = candidate_table(policy)
    deg = g.degrees
    nbr = np.array([list(a) + [a[0]] * (g.max_degree - len(a)) for a in g.adjacency], dtype=np.int64)
    ids = np.arange(lo, hi)
    times = np.full(len(ids), -1, dtype=np.int64)
    if cfg.cop_start == cfg.drunk_start:
        times[:] = 0
        return times
    keys = trial_keys(master_seed, ids)
    y = np.full(len(ids), cfg.cop_start, dtype=np.int64)
    x = np.full(len(ids), cfg.drunk_start, dtype=np.int64)
    live = np.arange(len(ids))
    for move in range(1, cfg.move_cap + 1):
        k = keys[live]
        u_cop = batch_uniforms(k, 2 * move - 1)
        u_drunk = batch_uniforms(k, 2 * move)
        yl, xl = y[live], x[live]
        cnt = count[yl, xl]
        pick = (u_cop * cnt).astype(np.int64)
        yl = cand[yl, xl, pick].astype(np.int64)
        caught = yl == xl
        step = nbr[xl, (u_drunk * deg[xl]).astype(np.int64)]
        xl = np.where(caught, xl, step)
        caught |= yl == xl
        times[live[caught]] = move
        y[live], x[live] = yl, xl
        live = live[~caught]
        if not len(live):
            break
    return times


def default_workers() -> int:
    return max(1, int(os.environ.get(WORKERS_ENV, "1")))


def monte_carlo(g: Graph, policy: str, cfg: GameConfig, trials: int, master_seed: int = 0,
                workers: int | None = None, keep_outcomes: bool = False, record: bool = False,
                batched: bool | None = None) -> SimulationReport:
    """Run ``trials`` independent games and summarize the capture times.

    Trial i draws from the stream keyed by ``(master_seed, i)``, so the report
    is identical for any worker count and any batching choice. Memoryless
    policies run through a vectorized numpy loop unless ``keep_outcomes`` or
    ``record`` asks for per-trial objects.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    cfg.validate(g)
    workers = default_workers() if workers is None else max(1, workers)
    pol = make_policy(policy, g, cop_start=cfg.cop_start, cop_may_idle=cfg.cop_may_idle)
    if batched is None:
        batched = pol.memoryless and not (keep_outcomes or record) and g.n * g.n * g.max_degree <= BATCH_TABLE_LIMIT
    labels = dict(policy=policy, graph=g.name, cop_start=cfg.cop_start, drunk_start=cfg.drunk_start)

    if batched:
        parts = [_run_batched(g, pol, cfg, master_seed, lo, min(lo + BATCH_CHUNK, trials))
                 for lo in range(0, trials, BATCH_CHUNK)]
        return _summarize(np.concatenate(parts), master_seed, **labels)

    bounds = np.linspace(0, trials, min(workers, trials) + 1).astype(int)
    if workers == 1:
        outcomes = _run_scalar(g, policy, cfg, master_seed, 0, trials, record)
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            futures = [ex.submit(_run_scalar, g, policy, cfg, master_seed, int(a), int(b), record)
                       for a, b in zip(bounds[:-1], bounds[1:])]
            outcomes = [o for f in futures for o in f.result()]
    times = np.array([-1 if o.truncated else o.capture_time for o in outcomes], dtype=np.int64)
    report = _summarize(times, master_seed, outcomes=outcomes, **labels)
    if not (keep_outcomes or record):
        report.outcomes = None
    return report
