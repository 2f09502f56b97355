"""Rules of games T, R and TR, game states, transcripts and simulation."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Optional

from .graph_core import (
    VertexSet,
    WeightedGraph,
    bits,
    connected_mask,
    cut_mask,
)

if TYPE_CHECKING:
    from .strategies import Strategy


class Variant(enum.Enum):
    T = "T"
    R = "R"
    TR = "TR"


class Scoring(enum.Enum):
    WEIGHT = "weight"
    CANONICAL = "canonical"
    MISERE = "misere"


class Player(enum.Enum):
    ALICE = "A"
    BOB = "B"

    @property
    def other(self) -> "Player":
        return Player.BOB if self is Player.ALICE else Player.ALICE

    def __str__(self) -> str:
        return "Alice" if self is Player.ALICE else "Bob"


class Status(enum.Enum):
    ONGOING = "ongoing"
    ALL_TAKEN = "all_taken"
    STALLED = "stalled"


class IllegalMove(ValueError):
    """A move that violates the rules; ``condition`` is 'T', 'R' or 'taken'."""

    def __init__(self, vertex: int, condition: str, message: str):
        super().__init__(message)
        self.vertex = vertex
        self.condition = condition


GAME_NAMES = {
    "t": (Variant.T, Scoring.WEIGHT),
    "r": (Variant.R, Scoring.WEIGHT),
    "tr": (Variant.TR, Scoring.WEIGHT),
    "tr-canonical": (Variant.TR, Scoring.CANONICAL),
    "tr-misere": (Variant.TR, Scoring.MISERE),
}


@dataclass(frozen=True)
class Ruleset:
    variant: Variant
    scoring: Scoring = Scoring.WEIGHT

    def __post_init__(self):
        if self.scoring is not Scoring.WEIGHT and self.variant is not Variant.TR:
            raise ValueError("canonical and misere scoring are defined for game TR only")

    @classmethod
    def parse(cls, name: str) -> "Ruleset":
        try:
            return cls(*GAME_NAMES[name.lower()])
        except KeyError:
            raise ValueError(f"unknown game {name!r}; expected one of {', '.join(GAME_NAMES)}") from None

    @property
    def name(self) -> str:
        for key, value in GAME_NAMES.items():
            if value == (self.variant, self.scoring):
                return key
        raise AssertionError(self)

    @property
    def needs_t(self) -> bool:
        return self.variant is not Variant.R

    @property
    def needs_r(self) -> bool:
        return self.variant is not Variant.T


T = Ruleset(Variant.T)
R = Ruleset(Variant.R)
TR = Ruleset(Variant.TR)
TR_CANONICAL = Ruleset(Variant.TR, Scoring.CANONICAL)
TR_MISERE = Ruleset(Variant.TR, Scoring.MISERE)


def legal_mask(G: WeightedGraph, ruleset: Ruleset, taken: int) -> int:
    """Bit mask of the vertices that may be taken next."""
    remaining = G.full_mask & ~taken
    if not remaining:
        return 0
    moves = remaining
    if ruleset.needs_t and taken:
        frontier = 0
        for v in bits(taken):
            frontier |= G.adj_mask[v]
        moves &= frontier
    if ruleset.needs_r and moves and remaining.bit_count() > 2:
        cuts, _ = cut_mask(G.adj_mask, remaining)
        moves &= ~cuts
    return moves


@dataclass(frozen=True)
class GameState:
    graph: WeightedGraph
    ruleset: Ruleset
    taken: VertexSet = field(default_factory=VertexSet)
    alice_gain: Fraction = Fraction(0)
    bob_gain: Fraction = Fraction(0)
    history: tuple[int, ...] = ()

    @classmethod
    def initial(cls, G: WeightedGraph, ruleset: Ruleset) -> "GameState":
        return cls(G, ruleset)

    @property
    def to_move(self) -> Player:
        return Player.ALICE if len(self.taken) % 2 == 0 else Player.BOB

    @property
    def remaining(self) -> VertexSet:
        return VertexSet.from_mask(self.graph.full_mask & ~self.taken.mask)

    def gain(self, player: Player) -> Fraction:
        return self.alice_gain if player is Player.ALICE else self.bob_gain

    def legal_moves(self) -> VertexSet:
        return legal_moves(self)

    def apply(self, v: int) -> "GameState":
        return apply(self, v)


def legal_moves(state: GameState) -> VertexSet:
    return VertexSet.from_mask(legal_mask(state.graph, state.ruleset, state.taken.mask))


def apply(state: GameState, v: int) -> GameState:
    """Take vertex ``v`` for the player on turn."""
    G = state.graph
    if not 0 <= v < G.n:
        raise IllegalMove(v, "range", f"vertex {v} does not exist (n={G.n})")
    taken = state.taken.mask
    if taken >> v & 1:
        raise IllegalMove(v, "taken", f"vertex {v} is already taken")
    after = taken | 1 << v
    if state.ruleset.needs_t and not connected_mask(G.adj_mask, after):
        raise IllegalMove(v, "T", f"taking {v} violates condition (T): taken vertices would be disconnected")
    if state.ruleset.needs_r and not connected_mask(G.adj_mask, G.full_mask & ~after):
        raise IllegalMove(v, "R", f"taking {v} violates condition (R): remaining vertices would be disconnected")
    w = G.weights[v]
    if state.to_move is Player.ALICE:
        gains = (state.alice_gain + w, state.bob_gain)
    else:
        gains = (state.alice_gain, state.bob_gain + w)
    return GameState(G, state.ruleset, VertexSet.from_mask(after), *gains, state.history + (v,))


def is_terminal(state: GameState) -> Status:
    if len(state.taken) == state.graph.n:
        return Status.ALL_TAKEN
    if legal_mask(state.graph, state.ruleset, state.taken.mask):
        return Status.ONGOING
    return Status.STALLED


def winner(state: GameState) -> Optional[Player]:
    """Winner of a finished canonical/misere game, None while the game is on."""
    if is_terminal(state) is Status.ONGOING:
        return None
    stuck = state.to_move
    if state.ruleset.scoring is Scoring.CANONICAL:
        return stuck.other
    if state.ruleset.scoring is Scoring.MISERE:
        return stuck
    raise ValueError("winner() is defined for canonical and misere scoring only")


# ---------------------------------------------------------------------------
# transcripts

def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass
class Transcript:
    moves: list[tuple[Player, int]] = field(default_factory=list)
    alice_gain: Fraction = Fraction(0)
    bob_gain: Fraction = Fraction(0)
    reason: Status = Status.ONGOING
    traces: dict[str, list] = field(default_factory=dict)

    @property
    def vertices(self) -> list[int]:
        return [v for _, v in self.moves]

    def to_text(self) -> str:
        lines = [f"{i} {p.value} {v}" for i, (p, v) in enumerate(self.moves, 1)]
        lines.append(f"alice {format_rational(self.alice_gain)}")
        lines.append(f"bob {format_rational(self.bob_gain)}")
        lines.append(f"end {self.reason.value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Transcript":
        t = cls()
        for line in text.splitlines():
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "alice":
                t.alice_gain = Fraction(parts[1])
            elif parts[0] == "bob":
                t.bob_gain = Fraction(parts[1])
            elif parts[0] == "end":
                t.reason = Status(parts[1])
            else:
                turn, who, v = parts
                if int(turn) != len(t.moves) + 1:
                    raise ValueError(f"turn {turn} out of sequence")
                t.moves.append((Player(who), int(v)))
        return t


def replay(G: WeightedGraph, ruleset: Ruleset, transcript: Transcript) -> GameState:
    """Replay a transcript, checking every move and the recorded outcome."""
    state = GameState.initial(G, ruleset)
    for who, v in transcript.moves:
        if who is not state.to_move:
            raise ValueError(f"move {v} recorded for {who} but {state.to_move} is on turn")
        state = apply(state, v)
    if (state.alice_gain, state.bob_gain) != (transcript.alice_gain, transcript.bob_gain):
        raise ValueError("recorded gains do not match the replay")
    status = is_terminal(state)
    if status is not transcript.reason:
        raise ValueError(f"recorded end {transcript.reason.value} but replay ends {status.value}")
    return state


class StrategyError(RuntimeError):
    def __init__(self, message: str, state: Optional[GameState] = None):
        super().__init__(message)
        self.state = state


def simulate(
    G: WeightedGraph,
    ruleset: Ruleset,
    alice: "Strategy",
    bob: "Strategy",
    seed: int = 0,
) -> Transcript:
    """Play ``alice`` against ``bob`` to the end of the game."""
    alice.reset(seed)
    bob.reset(seed + 1)
    state = GameState.initial(G, ruleset)
    transcript = Transcript()
    while True:
        status = is_terminal(state)
        if status is not Status.ONGOING:
            break
        player = state.to_move
        strategy = alice if player is Player.ALICE else bob
        v = strategy.choose(state)
        legal = legal_mask(G, ruleset, state.taken.mask)
        if not (isinstance(v, int) and 0 <= v < G.n and legal >> v & 1):
            raise StrategyError(
                f"{strategy.name} chose illegal vertex {v!r} for {player}; legal: {sorted(bits(legal))}",
                state,
            )
        after = apply(state, v)
        alice.observe(state, v, after)
        bob.observe(state, v, after)
        transcript.moves.append((player, v))
        state = after
    transcript.alice_gain = state.alice_gain
    transcript.bob_gain = state.bob_gain
    transcript.reason = status
    transcript.traces = {"alice": list(alice.trace), "bob": list(bob.trace)}
    return transcript
