"""Exact game solving: win tables, c_cr, the classic cop number, and
exhaustive verification of deterministic cop strategies.

The core fixed point is a reverse-BFS attractor with in-degree counters over
robot options per (state, cop-move) pair.  States are (sorted cop multiset,
robot vertex) with the cops to move; a state is cop-win iff some joint move
has an empty safe-response set or all safe responses lead to cop-win states
of strictly smaller rank.  Rank is rounds-to-capture under optimal play.

Counters, masks and the propagation loop lean on numpy: the mandated desk
scale (hypercube Q_4 and the 4x4 strong grid with four cops) is a few
million deduplicated joint moves, which pure-Python dict chasing cannot
reach in acceptable time.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .engine import (CaptureKind, Continue, GameState, JointCopMove, RobotPolicy,
                     apply_round, joint_cop_moves, safe_responses, validate_move)
from .errors import InputError, ResourceLimitError, StrategyError
from .graphs import Graph, graph_hash, max_core


@dataclass(frozen=True)
class SolverBudget:
    """Hard caps checked before any large allocation happens."""
    max_states: int = 2_000_000
    max_moves: int = 25_000_000
    max_cops: Optional[int] = None  # default: n (always sufficient)


DEFAULT_BUDGET = SolverBudget()


def _multisets(n: int, k: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations_with_replacement(range(n), k))


def _estimate_moves(g: Graph, multisets) -> int:
    """Exact count of deduplicated joint moves, computed without enumerating."""
    total = 0
    nbr_counts = [g.degree(v) + 1 for v in range(g.n)]
    for ms in multisets:
        prod = 1
        for origin, reps in itertools.groupby(ms):
            m = len(list(reps))
            prod *= math.comb(nbr_counts[origin] + m - 1, m)
        total += prod
    return total


@dataclass
class WinTable:
    """Classification of every canonical state for a fixed cop count."""
    graph: Graph
    k: int
    multisets: list[tuple[int, ...]]
    ms_index: dict
    win: np.ndarray   # bool, shape (len(multisets), n)
    rank: np.ndarray  # uint32, 0 for robot-win states
    moves_enumerated: int

    @property
    def state_count(self) -> int:
        return self.win.size

    def is_cop_win(self, cops, robot: int) -> bool:
        return bool(self.win[self.ms_index[tuple(sorted(cops))], robot])

    def rank_of(self, cops, robot: int) -> int:
        return int(self.rank[self.ms_index[tuple(sorted(cops))], robot])

    @property
    def max_rank(self) -> int:
        return int(self.rank.max()) if self.rank.size else 0

    def winning_placements(self) -> list[tuple[int, ...]]:
        """Cop multisets that win against every robot placement."""
        out = []
        n = self.graph.n
        for ci, ms in enumerate(self.multisets):
            occupied = set(ms)
            if all(r in occupied or self.win[ci, r] for r in range(n)):
                out.append(ms)
        return out

    def report_line(self) -> str:
        result = "cop-win" if self.winning_placements() else "robot-win"
        return (f"graph {graph_hash(self.graph)} k {self.k} result {result} "
                f"states {self.state_count} ranks-max {self.max_rank}")

    def dump(self, path) -> None:
        np.savez_compressed(path, win=self.win, rank=self.rank,
                            k=np.array([self.k]),
                            hash=np.array([graph_hash(self.graph)]))

    @staticmethod
    def load(path, graph: Graph, k: int) -> "WinTable":
        data = np.load(path, allow_pickle=False)
        if str(data["hash"][0]) != graph_hash(graph) or int(data["k"][0]) != k:
            raise InputError("table dump does not match graph/k")
        ms = _multisets(graph.n, k)
        return WinTable(graph, k, ms, {m: i for i, m in enumerate(ms)},
                        data["win"], data["rank"], 0)


def cop_win_table(g: Graph, k: int, budget: SolverBudget = DEFAULT_BUDGET) -> WinTable:
    """Least fixed point over all C(n+k-1,k)*n canonical states."""
    if k < 1:
        raise InputError("need k >= 1 cops")
    if not g.is_connected():
        raise InputError("solver requires a connected graph")
    if g.n > 63:
        raise ResourceLimitError(
            f"solver fast path is limited to 63 vertices, got {g.n}",
            estimate=g.n)
    n = g.n
    multisets = _multisets(n, k)
    n_ms = len(multisets)
    if n_ms * n > budget.max_states:
        raise ResourceLimitError(
            f"state space {n_ms * n} exceeds budget {budget.max_states}",
            estimate=n_ms * n, bounds={"states": n_ms * n})
    total_moves = _estimate_moves(g, multisets)
    if total_moves > budget.max_moves:
        raise ResourceLimitError(
            f"joint-move space {total_moves} exceeds budget {budget.max_moves}",
            estimate=total_moves, bounds={"moves": total_moves})
    ms_index = {ms: i for i, ms in enumerate(multisets)}

    move_c = np.empty(total_moves, dtype=np.int32)
    move_d = np.empty(total_moves, dtype=np.int32)
    move_destmask = np.empty(total_moves, dtype=np.int64)
    pair_move: list[int] = []
    pair_code: list[int] = []  # packed origin*n + dest for moving cops
    atk_rows: list[int] = []   # parallel: move id with nonzero attack mask
    atk_masks: list[int] = []

    closed_opts = [g.closed_neighborhood(v) for v in range(n)]
    mi = 0
    for ci, ms in enumerate(multisets):
        groups = []
        for origin, reps in itertools.groupby(ms):
            cnt = len(list(reps))
            groups.append([
                tuple((origin, d) for d in combo)
                for combo in itertools.combinations_with_replacement(
                    closed_opts[origin], cnt)
            ])
        for pick in itertools.product(*groups):
            dests = []
            destmask = 0
            moving = set()
            for part in pick:
                for o, d in part:
                    dests.append(d)
                    destmask |= 1 << d
                    if o != d:
                        moving.add((o, d))
            dests.sort()
            move_c[mi] = ci
            move_d[mi] = ms_index[tuple(dests)]
            move_destmask[mi] = destmask
            if moving:
                am = 0
                for o, d in moving:
                    pair_move.append(mi)
                    pair_code.append(o * n + d)
                    am |= 1 << d
                atk_rows.append(mi)
                atk_masks.append(am)
            mi += 1
    assert mi == total_moves

    move_atkmask = np.zeros(total_moves, dtype=np.int64)
    if atk_rows:
        move_atkmask[np.array(atk_rows)] = np.array(atk_masks, dtype=np.int64)
    pair_move_a = np.array(pair_move, dtype=np.int64)
    pair_code_a = np.array(pair_code, dtype=np.int64)
    # CSR view of moving pairs per move, for the rare rule-(ii) scans
    pair_order = np.argsort(pair_move_a, kind="stable")
    pair_move_s = pair_move_a[pair_order]
    pair_code_s = pair_code_a[pair_order]
    pair_off = np.zeros(total_moves + 1, dtype=np.int64)
    np.add.at(pair_off, pair_move_s + 1, 1)
    np.cumsum(pair_off, out=pair_off)

    # reverse index: destination multiset -> move ids
    rev_order = np.argsort(move_d, kind="stable")
    rev_off = np.zeros(n_ms + 1, dtype=np.int64)
    np.add.at(rev_off, move_d.astype(np.int64) + 1, 1)
    np.cumsum(rev_off, out=rev_off)

    # counters[m, r]: safe responses of a robot on r against move m that do
    # not yet lead to a cop-win state
    counters = np.empty((total_moves, n), dtype=np.uint8)
    for r in range(n):
        counters[:, r] = np.bitwise_count(
            np.int64(g.closed_mask[r]) & ~move_destmask).astype(np.uint8)
    if len(pair_move_a):
        # subtract rule-(ii) blocked responses: a cop moving o->delta removes
        # o from the safe set of a robot sitting on delta, unless rule (i)
        # already excluded o (o is itself somebody's destination)
        o = pair_code_a // n
        delta = pair_code_a % n
        counted = (~(move_destmask[pair_move_a] >> o) & 1).astype(np.uint8)
        np.subtract.at(counters.reshape(-1), pair_move_a * n + delta, counted)

    win = np.zeros((n_ms, n), dtype=bool)
    rank = np.zeros((n_ms, n), dtype=np.uint32)
    alive_arr = np.full(n_ms, (1 << n) - 1, dtype=np.int64)

    move_c64 = move_c.astype(np.int64)
    flat_counters = counters.reshape(-1)

    # rank-1 wins: some move leaves the robot no safe response at all
    zero_m, zero_r = np.nonzero(counters == 0)
    current: list[tuple[int, int]] = []
    for m, r in zip(move_c64[zero_m], zero_r):
        ci, r = int(m), int(r)
        if not win[ci, r]:
            win[ci, r] = True
            rank[ci, r] = 1
            alive_arr[ci] &= ~(1 << r)
            current.append((ci, r))

    closed_lists = [g.closed_neighborhood(v) for v in range(n)]
    cur_rank = 1
    while current:
        nxt: list[tuple[int, int]] = []
        by_c2: dict[int, list[int]] = {}
        for c2, r2 in current:
            by_c2.setdefault(c2, []).append(r2)
        for c2, r2list in by_c2.items():
            lo, hi = rev_off[c2], rev_off[c2 + 1]
            if lo == hi:
                continue
            ids = rev_order[lo:hi]
            cs = move_c64[ids]
            dm = move_destmask[ids]
            am = move_atkmask[ids]
            for r2 in r2list:
                relevant = (dm >> r2) & 1 == 0
                for r in closed_lists[r2]:
                    elig = relevant & (((alive_arr[cs] >> r) & 1) == 1)
                    atk_hit = elig & (((am >> r) & 1) == 1)
                    if atk_hit.any():
                        # rule (ii): drop moves where a cop traversed r2->r
                        code = r2 * n + r
                        for j in np.nonzero(atk_hit)[0]:
                            m = int(ids[j])
                            s, e = pair_off[m], pair_off[m + 1]
                            if code in pair_code_s[s:e]:
                                elig[j] = False
                    sel = ids[elig]
                    if not len(sel):
                        continue
                    idx = sel * n + r
                    flat_counters[idx] -= 1
                    hit = sel[flat_counters[idx] == 0]
                    for m in hit:
                        ci = int(move_c64[m])
                        if not win[ci, r]:
                            win[ci, r] = True
                            rank[ci, r] = cur_rank + 1
                            alive_arr[ci] &= ~(1 << r)
                            nxt.append((ci, r))
        current = nxt
        cur_rank += 1

    return WinTable(g, k, multisets, ms_index, win, rank, total_moves)


def decide(g: Graph, k: int, budget: SolverBudget = DEFAULT_BUDGET,
           table: Optional[WinTable] = None) -> bool:
    """True iff some cop placement wins against every robot placement.

    Robot placements onto cop-occupied vertices count as capture at
    placement (the robot places second and would never volunteer).
    """
    if table is None:
        table = cop_win_table(g, k, budget)
    return bool(table.winning_placements())


def ccr(g: Graph, budget: SolverBudget = DEFAULT_BUDGET,
        use_classic_bound: bool = True) -> int:
    """Least k capturing the robot, searched upward from the best lower bound.

    Monotonicity of decide in k is assumed here and tested separately.
    """
    if not g.is_connected():
        raise InputError("c_cr requires a connected graph")
    lb = max(1, max_core(g).k)
    if use_classic_bound:
        try:
            lb = max(lb, classic_cop_number(g, budget))
        except ResourceLimitError:
            pass  # classic bound is optional; core bound stands
    cap = budget.max_cops if budget.max_cops is not None else g.n
    for k in range(lb, cap + 1):
        try:
            if decide(g, k, budget):
                return k
        except ResourceLimitError as exc:
            raise ResourceLimitError(
                f"c_cr search exceeded budget at k={k}: {exc}",
                estimate=exc.estimate,
                bounds={"lower_bound": k, **exc.bounds}) from exc
    raise ResourceLimitError(
        f"c_cr exceeds cop cap {cap}", bounds={"lower_bound": cap + 1})


# -- classic Cops and Robbers oracle -------------------------------------


def classic_cop_table(g: Graph, k: int,
                      budget: SolverBudget = DEFAULT_BUDGET):
    """Backward induction for the classic alternating game.

    Capture is co-location at any time.  Returns (cop_turn_win,
    robber_turn_win) boolean arrays indexed by (multiset, robot).  Used only
    as a cross-check oracle, so a plain iterate-to-fixpoint suffices.
    """
    n = g.n
    multisets = _multisets(n, k)
    n_ms = len(multisets)
    if n_ms * n * 2 > budget.max_states:
        raise ResourceLimitError(
            f"classic state space {n_ms * n * 2} exceeds budget",
            estimate=n_ms * n * 2)
    ms_index = {ms: i for i, ms in enumerate(multisets)}
    est = _estimate_moves(g, multisets)
    if est > budget.max_moves:
        raise ResourceLimitError(f"classic move space {est} exceeds budget",
                                 estimate=est)
    closed_opts = [g.closed_neighborhood(v) for v in range(n)]
    succ: list[list[int]] = []
    occ_mask = []
    for ms in multisets:
        groups = []
        for origin, reps in itertools.groupby(ms):
            cnt = len(list(reps))
            groups.append(list(itertools.combinations_with_replacement(
                closed_opts[origin], cnt)))
        dset = set()
        for pick in itertools.product(*groups):
            dests = sorted(d for part in pick for d in part)
            dset.add(ms_index[tuple(dests)])
        succ.append(sorted(dset))
        occ_mask.append(sum(1 << v for v in set(ms)))

    cop_win = [[False] * n for _ in range(n_ms)]
    rob_win = [[False] * n for _ in range(n_ms)]
    changed = True
    while changed:
        changed = False
        for ci in range(n_ms):
            om = occ_mask[ci]
            cw = cop_win[ci]
            rw = rob_win[ci]
            for r in range(n):
                if not cw[r]:
                    bit = 1 << r
                    for d in succ[ci]:
                        if occ_mask[d] & bit or rob_win[d][r]:
                            cw[r] = True
                            changed = True
                            break
                if not rw[r]:
                    if om & (1 << r):
                        rw[r] = True
                        changed = True
                    elif all(om & (1 << r2) or cw[r2]
                             for r2 in closed_opts[r]):
                        rw[r] = True
                        changed = True
    return multisets, occ_mask, cop_win


def classic_cop_number(g: Graph, budget: SolverBudget = DEFAULT_BUDGET) -> int:
    """c(G) under classic alternating rules, by upward search."""
    if not g.is_connected():
        raise InputError("cop number requires a connected graph")
    for k in range(1, g.n + 1):
        multisets, occ_mask, cop_win = classic_cop_table(g, k, budget)
        for ci in range(len(multisets)):
            om = occ_mask[ci]
            if all(om & (1 << r) or cop_win[ci][r] for r in range(g.n)):
                return k
    raise ResourceLimitError("classic cop number exceeded vertex count")


# -- adversarial robot ----------------------------------------------------


class OptimalRobot(RobotPolicy):
    """Table-backed adversary: escape to robot-win states whenever possible,
    otherwise drag the capture out as long as the table allows."""

    def __init__(self, table: WinTable):
        self.table = table

    def place(self, g: Graph, cop_vertices) -> int:
        ci = self.table.ms_index[tuple(sorted(cop_vertices))]
        free = [r for r in range(g.n) if r not in set(cop_vertices)]
        if not free:
            return 0  # every vertex carries a cop; captured at placement
        surviving = [r for r in free if not self.table.win[ci, r]]
        if surviving:
            return min(surviving)
        return min(free, key=lambda r: (-int(self.table.rank[ci, r]), r))

    def respond(self, g: Graph, state: GameState, move: JointCopMove,
                safe) -> Optional[int]:
        if not safe:
            return None
        d_idx = self.table.ms_index[tuple(sorted(move.destinations))]
        escapes = [r2 for r2 in sorted(safe) if not self.table.win[d_idx, r2]]
        if escapes:
            return escapes[0]
        return min(sorted(safe),
                   key=lambda r2: (-int(self.table.rank[d_idx, r2]), r2))


def optimal_robot_policy(table: WinTable) -> OptimalRobot:
    return OptimalRobot(table)


# -- strategy verification -------------------------------------------------


@dataclass(frozen=True)
class CaptureCertificate:
    max_rounds: int
    robot_placements: int


@dataclass(frozen=True)
class EscapeWitness:
    """A lasso: ``prefix`` then ``cycle`` of (token, cops, robot, move, response)
    steps; replaying the cycle revisits an identical (strategy state, GameState)
    pair forever."""
    prefix: tuple
    cycle: tuple

    def describe(self) -> str:
        c0 = self.cycle[0]
        return (f"escape witness: cycle of length {len(self.cycle)} from "
                f"cops {c0[1]} robot {c0[2]}")


VerificationResult = object  # CaptureCertificate | EscapeWitness


def verify_strategy(g: Graph, strategy, placement=None):
    """Exhaustive adversary: explore every safe robot response to the
    strategy's announced moves.

    Returns CaptureCertificate when every branch is captured, or an
    EscapeWitness the first time a (strategy state, game state) pair repeats
    along a play.  The round counter is excluded from node identity, so any
    repeat is a genuine loop the robot can ride forever.
    """
    if placement is None:
        placement = strategy.initial_placement()
    placement = tuple(sorted(placement))
    n = g.n
    WHITE, GRAY, BLACK = 0, 1, 2
    color: dict = {}
    depth: dict = {}
    step_cache: dict = {}

    def node_step(node):
        if node not in step_cache:
            token, cops, robot = node
            state = GameState(cops, robot)
            move, token2 = strategy.step(token, state)
            try:
                validate_move(g, state, move)
            except StrategyError as exc:
                raise InputError(
                    f"strategy emitted an illegal move at cops={cops} "
                    f"robot={robot}: {exc}") from exc
            safe = safe_responses(g, state, move)
            step_cache[node] = (move, token2, tuple(sorted(safe)))
        return step_cache[node]

    worst = 0
    placements = 0
    occupied = set(placement)
    for r0 in range(n):
        placements += 1
        if r0 in occupied:
            continue  # captured at placement
        token0 = strategy.initial_token(placement)
        root = (token0, placement, r0)
        # iterative DFS with gray-path cycle detection
        stack = [(root, None)]  # (node, iterator over responses)
        if color.get(root) == BLACK:
            worst = max(worst, depth[root])
            continue
        path = []
        while stack:
            node, it = stack[-1]
            if it is None:
                if color.get(node) == BLACK:
                    stack.pop()
                    continue
                if color.get(node) == GRAY:
                    # closing a cycle: build the witness from the path
                    idx = next(i for i, (p, _) in enumerate(path) if p == node)
                    steps = []
                    for p, resp in path[idx:]:
                        mv, _, _ = node_step(p)
                        steps.append((p[0], p[1], p[2], mv, resp))
                    prefix = []
                    for p, resp in path[:idx]:
                        mv, _, _ = node_step(p)
                        prefix.append((p[0], p[1], p[2], mv, resp))
                    return EscapeWitness(tuple(prefix), tuple(steps))
                color[node] = GRAY
                move, token2, safe = node_step(node)
                if not safe:
                    color[node] = BLACK
                    depth[node] = 1
                    stack.pop()
                    continue
                children = []
                dests = tuple(sorted(move.destinations))
                for r2 in safe:
                    children.append(((token2, dests, r2), r2))
                stack[-1] = (node, iter(children))
                path.append((node, None))
                continue
            advanced = False
            for child, resp in it:
                path[-1] = (node, resp)
                if color.get(child) == GRAY:
                    idx = next(i for i, (p, _) in enumerate(path) if p == child)
                    steps = []
                    for p, r_ in path[idx:]:
                        mv, _, _ = node_step(p)
                        steps.append((p[0], p[1], p[2], mv, r_))
                    prefix = []
                    for p, r_ in path[:idx]:
                        mv, _, _ = node_step(p)
                        prefix.append((p[0], p[1], p[2], mv, r_))
                    return EscapeWitness(tuple(prefix), tuple(steps))
                if color.get(child) != BLACK:
                    stack.append((child, None))
                    advanced = True
                    break
            if advanced:
                continue
            # all children black: finish node
            move, token2, safe = node_step(node)
            dests = tuple(sorted(move.destinations))
            d = 1 + max(depth[(token2, dests, r2)] for r2 in safe)
            color[node] = BLACK
            depth[node] = d
            path.pop()
            stack.pop()
        worst = max(worst, depth[root])
    return CaptureCertificate(worst, placements)
