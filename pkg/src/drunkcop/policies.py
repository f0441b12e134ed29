"""Cop strategies.

Every policy answers ``decide(y, x, u)``: the cop stands at ``y``, the drunk
at ``x != y``, and ``u`` is this move's uniform draw (ignored by deterministic
policies). Memoryless policies also expose ``candidates(c, d)``, the set the
cop picks from uniformly at state (c, d); the exact solvers and the batched
Monte Carlo path are built on it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph

POLICY_NAMES = ("oscillate", "random", "greedy:lex", "greedy:random", "greedy:history", "hitting", "smart", "smart:strict")


class CopPolicy:
    name = "?"
    memoryless = False

    def __init__(self, g: Graph, cop_may_idle: bool = False):
        self.g = g
        self.idle = cop_may_idle
        self.dist = g.distance_rows
        self.adj = g.adjacency

    def reset(self, cop_start: int, drunk_start: int) -> None:
        pass

    def decide(self, y: int, x: int, u: float) -> int:
        cands = self.candidates(y, x)
        return cands[int(u * len(cands))] if len(cands) > 1 else cands[0]

    def candidates(self, c: int, d: int) -> tuple[int, ...]:
        raise TypeError(f"policy {self.name!r} is not memoryless")

    def telemetry(self) -> dict | None:
        return None

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


class Greedy(CopPolicy):
    """Step to a neighbor minimizing distance to the drunk.

    A stay never shortens the distance, so the greedy cop never idles even when
    idling is allowed.
    """

    def __init__(self, g: Graph, tie_break: str = "lex", cop_may_idle: bool = False):
        super().__init__(g, cop_may_idle)
        if tie_break not in ("lex", "random", "history"):
            raise ValueError(f"unknown tie-break {tie_break!r}")
        self.tie_break = tie_break
        self.name = f"greedy:{tie_break}"
        self.memoryless = tie_break != "history"
        self.previous = None

    def reset(self, cop_start, drunk_start):
        self.previous = None

    def candidates(self, c, d):
        if self.tie_break == "history":
            raise TypeError("greedy:history depends on the drunk's past and is not memoryless")
        best = _closest_fast(self.adj[c], self.dist, d)
        return tuple(best[:1]) if self.tie_break == "lex" else tuple(best)

    def decide(self, y, x, u):
        best = _closest_fast(self.adj[y], self.dist, x)
        if self.tie_break == "lex" or len(best) == 1:
            w = best[0]
        elif self.tie_break == "random":
            w = best[int(u * len(best))]
        else:
            prev = self.previous
            w = best[0] if prev is None else min(best, key=lambda v: (self.dist[v][prev], v))
        self.previous = x
        return w


def _closest_fast(adj_c, dist, d) -> list[int]:
    best = None
    out: list[int] = []
    for w in adj_c:
        dw = dist[w][d]
        if best is None or dw < best:
            best = dw
            out = [w]
        elif dw == best:
            out.append(w)
    return out


def greedy_decide(g: Graph, y: int, x: int, tie_break: str = "lex", previous: int | None = None, u: float = 0.0) -> int:
    """One greedy decision; ``previous`` is the drunk's position before its last step."""
    p = Greedy(g, tie_break)
    p.previous = previous
    return p.decide(y, x, u)


class RandomCop(CopPolicy):
    name = "random"
    memoryless = True

    def candidates(self, c, d):
        return self.adj[c]


class Oscillate(CopPolicy):
    """Bounce on the edge between ``anchor`` and its smallest neighbor.

    Away from that edge the cop walks a lex geodesic back to the anchor, which
    keeps the rule positional for every joint state.
    """

    name = "oscillate"
    memoryless = True

    def __init__(self, g: Graph, anchor: int = 0, cop_may_idle: bool = False):
        super().__init__(g, cop_may_idle)
        self.anchor = anchor
        self.partner = g.adjacency[anchor][0]

    def candidates(self, c, d):
        if c == self.anchor:
            return (self.partner,)
        if c == self.partner:
            return (self.anchor,)
        row = self.dist
        want = row[c][self.anchor] - 1
        return (next(w for w in self.adj[c] if row[w][self.anchor] == want),)


class HittingTimeGreedy(CopPolicy):
    """Move to the neighbor the drunk's walk is expected to hit soonest (ties lex).

    With idling allowed the cop stays only when that is strictly better.
    """

    name = "hitting"
    memoryless = True

    def __init__(self, g: Graph, cop_may_idle: bool = False):
        super().__init__(g, cop_may_idle)
        from .analysis import hitting_time_matrix

        self.H = hitting_time_matrix(g)

    def candidates(self, c, d):
        h = self.H[d]
        best = min(self.adj[c], key=lambda w: (h[w], w))
        if self.idle and h[c] < h[best]:
            return (c,)
        return (best,)


def hitting_time_greedy_decide(g: Graph, y: int, x: int) -> int:
    return HittingTimeGreedy(g).candidates(y, x)[0]


@dataclass
class FourStageState:
    stage: int = 1
    target: int = -1
    block_step: int = 0
    stage_times: list = field(default_factory=lambda: [0, 0, 0, 0])
    D1: int | None = None
    D2: int | None = None
    stage1_exit: str | None = None
    early_exit_from: int | None = None
    moves: int = 0
    stage4_move: int | None = None


class FourStage(CopPolicy):
    """The smart cop.

    Stage 1 walks a lex geodesic to the drunk's start; stage 2 walks to where
    the drunk stood when stage 1 ended; stage 3 retargets to the drunk's current
    vertex every four moves and stops once the drunk is within distance 3 at a block
    boundary; stage 4 plays greedy (lex). With ``early_exit`` the cop also jumps
    to stage 4 at any turn of stages 1-3 where the drunk is within distance 3;
    the policy string ``smart:strict`` turns that shortcut off.
    """

    name = "smart"

    def __init__(self, g: Graph, early_exit: bool = True, cop_may_idle: bool = False):
        super().__init__(g, cop_may_idle)
        self.early_exit = early_exit
        self.name = "smart" if early_exit else "smart:strict"
        self.state = FourStageState()

    def reset(self, cop_start, drunk_start):
        self.state = FourStageState(target=drunk_start)

    def _toward(self, y, target):
        row = self.dist
        want = row[y][target] - 1
        for w in self.adj[y]:
            if row[w][target] == want:
                return w
        raise AssertionError("no geodesic step")

    def _enter_stage4(self, reason):
        s = self.state
        if s.stage == 1:
            s.stage1_exit = reason
        if reason == "early":
            s.early_exit_from = s.stage
        s.stage = 4
        s.stage4_move = s.moves

    def decide(self, y, x, u):
        s = self.state
        s.moves += 1
        d = self.dist[y][x]
        if s.stage < 4 and self.early_exit and d <= 3:
            self._enter_stage4("early")
        if s.stage == 3 and s.block_step == 0:
            if d < 4:
                self._enter_stage4("block")
            else:
                s.target = x
        if s.stage == 4:
            s.stage_times[3] += 1
            return _closest_fast(self.adj[y], self.dist, x)[0]

        # stages 1-3 share the geodesic step toward the frozen target
        w = self._toward(y, s.target)
        s.stage_times[s.stage - 1] += 1
        if s.stage == 3:
            s.block_step = (s.block_step + 1) % 4
        elif w == s.target:
            if s.stage == 1:
                s.D1 = self.dist[w][x]
                s.stage1_exit = "arrival"
            else:
                s.D2 = self.dist[w][x]
            s.stage += 1
            s.target = x
        return w

    def telemetry(self):
        s = self.state
        return {"stage_times": list(s.stage_times), "D1": s.D1, "D2": s.D2, "final_stage": s.stage,
                "stage1_exit": s.stage1_exit, "early_exit_from": s.early_exit_from,
                "stage4_move": s.stage4_move}


def four_stage_decide(g: Graph, state: FourStageState, y: int, x: int, early_exit: bool = True
                      ) -> tuple[int, FourStageState]:
    p = FourStage(g, early_exit=early_exit)
    p.state = state
    w = p.decide(y, x, 0.0)
    return w, p.state


def oscillate_decide(g: Graph, anchor: int, y: int) -> int:
    return Oscillate(g, anchor).candidates(y, -1)[0]


def random_decide(g: Graph, y: int, u: float) -> int:
    nbrs = g.adjacency[y]
    return nbrs[int(u * len(nbrs))]


def make_policy(spec: str, g: Graph, cop_start: int = 0, cop_may_idle: bool = False) -> CopPolicy:
    """Build a policy from its CLI name (see ``POLICY_NAMES``)."""
    if spec == "oscillate":
        return Oscillate(g, anchor=cop_start, cop_may_idle=cop_may_idle)
    if spec == "random":
        return RandomCop(g, cop_may_idle)
    if spec.startswith("greedy:"):
        return Greedy(g, spec.split(":", 1)[1], cop_may_idle)
    if spec == "greedy":
        return Greedy(g, "lex", cop_may_idle)
    if spec == "hitting":
        return HittingTimeGreedy(g, cop_may_idle)
    if spec in ("smart", "smart:strict"):
        return FourStage(g, early_exit=spec == "smart", cop_may_idle=cop_may_idle)
    raise ValueError(f"unknown policy {spec!r}; expected one of {', '.join(POLICY_NAMES)}")


def candidate_table(policy: CopPolicy) -> tuple[np.ndarray, np.ndarray]:
    """Arrays ``(cand, count)`` with ``cand[c, d, :count[c, d]]`` the uniform choice set.

    Diagonal entries (c == d) are unused and hold ``c`` itself.
    """
    if not policy.memoryless:
        raise TypeError(f"policy {policy.name!r} is not memoryless")
    n = policy.g.n
    sets = [[policy.candidates(c, d) if c != d else (c,) for d in range(n)] for c in range(n)]
    width = max(len(s) for row in sets for s in row)
    cand = np.empty((n, n, width), dtype=np.int32)
    count = np.empty((n, n), dtype=np.int32)
    for c in range(n):
        for d in range(n):
            s = sets[c][d]
            count[c, d] = len(s)
            cand[c, d, :len(s)] = s
            cand[c, d, len(s):] = s[0]
    return cand, count
