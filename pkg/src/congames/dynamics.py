"""Best-response oracles, threshold-move detection, and baseline dynamics.

A q-move (q >= 1) is a deviation that beats the current cost by a factor
strictly larger than q: new_cost < current_cost / q.  Eligibility is decided
by that threshold, but an executed move is always the full best response,
which makes recorded traces deterministic.

Every executed move logs exact before/after costs and potentials; the
potential difference equals the cost difference move by move.
"""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO, Optional

from .core import CongestionGame, GameLike, State, to_fraction
from .errors import ValidationError
from .serialize import format_rational


@dataclass(frozen=True)
class MoveRecord:
    """One executed improvement move with exact bookkeeping."""

    player: int
    from_strategy: int
    to_strategy: int
    cost_before: Fraction
    cost_after: Fraction
    potential_before: Fraction
    potential_after: Fraction
    phase: Optional[int] = None

    def to_dict(self) -> dict:
        doc = {
            "player": self.player,
            "from": self.from_strategy,
            "to": self.to_strategy,
            "cost_before": format_rational(self.cost_before),
            "cost_after": format_rational(self.cost_after),
            "potential_before": format_rational(self.potential_before),
            "potential_after": format_rational(self.potential_after),
        }
        if self.phase is not None:
            doc["phase"] = self.phase
        return doc


@dataclass
class RunTrace:
    """Ordered move log of one dynamics or solver run."""

    initial_state: tuple[int, ...]
    final_state: tuple[int, ...]
    final_potential: Fraction
    moves: list[MoveRecord] = field(default_factory=list)
    truncated: bool = False
    phases: Optional[list[dict]] = None
    parameters: Optional[dict] = None

    @property
    def n_moves(self) -> int:
        return len(self.moves)

    def to_dict(self) -> dict:
        doc: dict = {
            "summary": {
                "moves": self.n_moves,
                "final_potential": format_rational(self.final_potential),
                "final_state": list(self.final_state),
            },
            "initial_state": list(self.initial_state),
            "truncated": self.truncated,
        }
        if self.parameters is not None:
            doc["parameters"] = self.parameters
        if self.phases is not None:
            doc["phases"] = self.phases
        doc["moves"] = [
            dict(m.to_dict(), step=i) for i, m in enumerate(self.moves)
        ]
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def write_json(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fp:
            fp.write(self.to_json())

    def write_csv(self, fp: IO[str]) -> None:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(["step", "player", "cost_before", "cost_after", "potential"])
        for i, m in enumerate(self.moves):
            writer.writerow(
                [
                    i,
                    m.player,
                    format_rational(m.cost_before),
                    format_rational(m.cost_after),
                    format_rational(m.potential_after),
                ]
            )


def optimistic_cost(game: CongestionGame, u: int) -> tuple[Fraction, int]:
    """Minimum cost u could have alone in the game, with its argmin strategy.

    Returns (cost, strategy index); ties break toward the lowest index.
    """
    if game.mode != "standard":
        raise ValidationError("optimistic cost is defined for standard mode")
    best_cost: Optional[Fraction] = None
    best_idx = 0
    for idx, strat in enumerate(game.players[u]):
        cost = sum((game.resources[e].eval(1) for e in strat), Fraction(0))
        if best_cost is None or cost < best_cost:
            best_cost, best_idx = cost, idx
    assert best_cost is not None
    return best_cost, best_idx


def best_response(game: GameLike, state: State, u: int) -> tuple[int, Fraction]:
    """Globally cheapest deviation for u, ties broken by lowest index.

    The current strategy participates in the minimum, so the returned cost is
    never above the current cost.
    """
    best_idx: Optional[int] = None
    best_cost: Optional[Fraction] = None
    for idx in range(len(game.strategies_of(u))):
        cost = game.deviation_cost(state, u, idx)
        if best_cost is None or cost < best_cost:
            best_idx, best_cost = idx, cost
    assert best_idx is not None and best_cost is not None
    return best_idx, best_cost


def find_threshold_move(
    game: GameLike, state: State, u: int, q: Fraction
) -> Optional[tuple[int, Fraction]]:
    """Best response of u if it improves on the current cost by more than q.

    Returns (strategy index, new cost) when best_cost < current_cost / q
    strictly, else None.  A zero-cost player never has a threshold move.
    """
    q = to_fraction(q)
    if q < 1:
        raise ValidationError(f"threshold factor must be >= 1, got {q}")
    current = game.player_cost(state, u)
    if current == 0:
        return None
    idx, cost = best_response(game, state, u)
    if cost * q < current:
        return idx, cost
    return None


def epsilon_br_dynamics(
    game: CongestionGame,
    state0: State,
    epsilon: Fraction,
    move_cap: int = 100_000,
    order: str = "roundrobin",
    seed: Optional[int] = None,
) -> RunTrace:
    """(1+eps)-improvement best-response dynamics from `state0`.

    Players are scanned round-robin by index (or in seeded random order per
    sweep); a player moves when she has a (1+eps)-move, and then executes her
    full best response.  Stops when a whole sweep finds no move, or the cap
    is hit (the trace is then flagged truncated, which is not an error).
    """
    epsilon = to_fraction(epsilon)
    if epsilon <= 0:
        raise ValidationError(f"epsilon must be positive, got {epsilon}")
    if game.mode != "standard":
        raise ValidationError("dynamics require a standard-mode game")
    if order not in ("roundrobin", "random"):
        raise ValidationError(f"unknown order {order!r}")
    q = 1 + epsilon
    rng = random.Random(seed)

    state = state0
    potential = game.potential(state)
    moves: list[MoveRecord] = []
    truncated = False
    while True:
        players = list(range(game.n_players))
        if order == "random":
            rng.shuffle(players)
        moved = False
        for u in players:
            found = find_threshold_move(game, state, u, q)
            if found is None:
                continue
            idx, new_cost = found
            old_cost = game.player_cost(state, u)
            old_choice = state.choices[u]
            state = state.apply(game, u, idx)
            new_potential = potential + (new_cost - old_cost)
            moves.append(
                MoveRecord(
                    player=u,
                    from_strategy=old_choice,
                    to_strategy=idx,
                    cost_before=old_cost,
                    cost_after=new_cost,
                    potential_before=potential,
                    potential_after=new_potential,
                )
            )
            potential = new_potential
            moved = True
            if len(moves) >= move_cap:
                truncated = True
                break
        if truncated or not moved:
            break

    return RunTrace(
        initial_state=state0.choices,
        final_state=state.choices,
        final_potential=potential,
        moves=moves,
        truncated=truncated,
    )
