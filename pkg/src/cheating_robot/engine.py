"""Exact rules of the Cheating Robot game.

One round, in the alternating reading: the cops announce a joint move (every
token to a vertex in its closed neighborhood), then the robot responds with a
move in his own closed neighborhood, having seen the full announcement.
The robot is captured when (i) he ends his move on a vertex where a cop ends
the round, or (ii) he traverses the same undirected edge a cop traversed this
round.  Cops may stack; the robot may always pass.

Everything here is a pure function of its inputs; states are value objects.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Union

from .errors import InputError, StrategyError
from .graphs import Graph


@dataclass(frozen=True)
class GameState:
    """Canonical mid-game position with the cops to move.

    ``cops`` is a sorted multiset; two states with equal sorted multisets and
    equal robot vertex are the same state.
    """
    cops: tuple[int, ...]
    robot: int
    round: int = 0

    def canonical(self) -> "GameState":
        return GameState(tuple(sorted(self.cops)), self.robot, self.round)


@dataclass(frozen=True)
class JointCopMove:
    """Per-cop (origin, destination) pairs; order of pairs is not significant."""
    moves: tuple[tuple[int, int], ...]

    @property
    def destinations(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.moves)

    def canonical(self) -> "JointCopMove":
        return JointCopMove(tuple(sorted(self.moves)))


class CaptureKind(str, Enum):
    SAME_VERTEX = "same-vertex"
    EDGE_SWAP = "edge-swap"
    NO_SAFE_RESPONSE = "no-safe-response"


@dataclass(frozen=True)
class Captured:
    by: CaptureKind


@dataclass(frozen=True)
class Continue:
    next: GameState


RoundOutcome = Union[Captured, Continue]


def place(g: Graph, cop_vertices, robot_vertex: int) -> Union[GameState, Captured]:
    """Initial placement: cops first, then the robot.

    Placing the robot on a cop-occupied vertex counts as immediate capture
    (capture is judged at the end of the robot's move); a sensible robot
    player never does this when an alternative exists.
    """
    cops = tuple(sorted(cop_vertices))
    if not cops:
        raise InputError("need at least one cop")
    for v in cops:
        g.check_vertex(v)
    g.check_vertex(robot_vertex)
    if robot_vertex in cops:
        return Captured(CaptureKind.SAME_VERTEX)
    return GameState(cops, robot_vertex, 0)


def validate_move(g: Graph, state: GameState, move: JointCopMove) -> None:
    """Raise unless the joint move is legal from ``state``."""
    if tuple(sorted(o for o, _ in move.moves)) != state.cops:
        raise StrategyError(
            f"move origins {sorted(o for o, _ in move.moves)} do not match "
            f"cop multiset {list(state.cops)}")
    for o, d in move.moves:
        g.check_vertex(d)
        if d != o and not g.has_edge(o, d):
            raise StrategyError(f"cop move {o}->{d} is not an edge")


def joint_cop_moves(g: Graph, state: GameState):
    """All joint cop moves, deduplicated up to cop-identity permutation.

    Two joint moves coincide when their (origin, destination) pair multisets
    coincide, so for each origin held by m cops we take multisets of m
    destinations from its closed neighborhood.  This is canonical by
    construction; no post-hoc dedup pass is needed.
    """
    groups = []
    for origin, reps in itertools.groupby(state.cops):
        count = len(list(reps))
        options = g.closed_neighborhood(origin)
        groups.append([
            tuple((origin, d) for d in combo)
            for combo in itertools.combinations_with_replacement(options, count)
        ])
    for pick in itertools.product(*groups):
        yield JointCopMove(tuple(p for part in pick for p in part))


def safe_responses(g: Graph, state: GameState, move: JointCopMove) -> set[int]:
    """Robot responses in N[robot] that avoid both capture rules.

    Staying is safe iff no cop ends on the robot's vertex.  Moving to r' is
    safe iff r' is no cop's destination and no cop traversed the undirected
    edge {robot, r'} this round.
    """
    r = state.robot
    dests = set(move.destinations)
    swapped = set()
    for o, d in move.moves:
        if o != d:
            swapped.add((min(o, d), max(o, d)))
    safe = set()
    for r2 in (r,) + g.adj[r]:
        if r2 in dests:
            continue
        if r2 != r and (min(r, r2), max(r, r2)) in swapped:
            continue
        safe.add(r2)
    return safe


def apply_round(g: Graph, state: GameState, move: JointCopMove,
                response: int) -> RoundOutcome:
    """Resolve one full round for a given robot response."""
    r = state.robot
    if response != r and not g.has_edge(r, response):
        raise InputError(
            f"robot response {r}->{response} is not within the closed neighborhood")
    dests = move.destinations
    if response in dests:
        return Captured(CaptureKind.SAME_VERTEX)
    if response != r:
        edge = (min(r, response), max(r, response))
        for o, d in move.moves:
            if o != d and (min(o, d), max(o, d)) == edge:
                return Captured(CaptureKind.EDGE_SWAP)
    return Continue(GameState(tuple(sorted(dests)), response, state.round + 1))


# -- simulation ----------------------------------------------------------


@dataclass(frozen=True)
class TraceRound:
    index: int
    move: JointCopMove
    robot_from: int
    robot_to: int
    outcome_label: str  # "continue" or "captured:<kind>"


class TraceEnd(str, Enum):
    CAPTURED = "captured"
    SURVIVED = "survived"
    SURRENDERED = "surrendered"


@dataclass
class Trace:
    graph: Graph
    placement: tuple[int, ...]
    robot_start: int
    rounds: list[TraceRound]
    end: TraceEnd
    capture_kind: Optional[CaptureKind] = None

    def to_text(self) -> str:
        lines = []
        for tr in self.rounds:
            pairs = sorted(tr.move.moves)
            origins = " ".join(str(o) for o, _ in pairs)
            dests = " ".join(str(d) for _, d in pairs)
            lines.append(
                f"round {tr.index} | cops {origins}->{dests} | "
                f"robot {tr.robot_from}->{tr.robot_to} | {tr.outcome_label}")
        return "\n".join(lines) + ("\n" if lines else "")


class RobotPolicy:
    """Robot player interface for simulations.

    ``respond`` may return None to surrender.  Returning an unsafe or illegal
    vertex is an input error: policies are expected to know the rules.
    """

    def place(self, g: Graph, cop_vertices: tuple[int, ...]) -> int:
        raise NotImplementedError

    def respond(self, g: Graph, state: GameState, move: JointCopMove,
                safe: set[int]) -> Optional[int]:
        raise NotImplementedError


class ScriptedRobot(RobotPolicy):
    """Plays a fixed placement and response sequence; passes once exhausted."""

    def __init__(self, start: int, responses):
        self.start = start
        self.responses = list(responses)
        self._i = 0

    def place(self, g, cop_vertices):
        return self.start

    def respond(self, g, state, move, safe):
        if self._i < len(self.responses):
            r2 = self.responses[self._i]
            self._i += 1
            return r2
        return state.robot  # pass once the script runs out


def simulate(g: Graph, strategy, robot_policy: RobotPolicy,
             max_rounds: int = 200) -> Trace:
    """Play a full game; ends in capture, survival at max_rounds, or surrender.

    When the safe-response set is empty the robot is cornered: every response
    is captured, so the round is recorded as captured:no-safe-response
    without consulting the policy.
    """
    placement = tuple(sorted(strategy.initial_placement()))
    robot_start = robot_policy.place(g, placement)
    g.check_vertex(robot_start)
    placed = place(g, placement, robot_start)
    rounds: list[TraceRound] = []
    if isinstance(placed, Captured):
        return Trace(g, placement, robot_start, rounds, TraceEnd.CAPTURED, placed.by)
    state = placed
    token = strategy.initial_token(placement)
    for i in range(1, max_rounds + 1):
        move, token = strategy.step(token, state)
        validate_move(g, state, move)
        safe = safe_responses(g, state, move)
        if not safe:
            rounds.append(TraceRound(i, move.canonical(), state.robot, state.robot,
                                     f"captured:{CaptureKind.NO_SAFE_RESPONSE.value}"))
            return Trace(g, placement, robot_start, rounds, TraceEnd.CAPTURED,
                         CaptureKind.NO_SAFE_RESPONSE)
        response = robot_policy.respond(g, state, move, safe)
        if response is None:
            return Trace(g, placement, robot_start, rounds, TraceEnd.SURRENDERED)
        if response not in safe:
            raise InputError(
                f"robot policy returned unsafe/illegal move {response} at round {i}")
        outcome = apply_round(g, state, move, response)
        assert isinstance(outcome, Continue)
        rounds.append(TraceRound(i, move.canonical(), state.robot, response,
                                 "continue"))
        state = outcome.next
    return Trace(g, placement, robot_start, rounds, TraceEnd.SURVIVED)
