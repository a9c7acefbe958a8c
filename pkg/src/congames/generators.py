"""Seeded random instance families for tests and benchmarks."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .core import CongestionGame, LatencyFunction
from .errors import GenerationError, ValidationError

_RETRY_CAP = 200


@dataclass(frozen=True)
class GenSpec:
    """Shape of a random standard-mode game.

    Coefficients are drawn uniformly as integers in `coeff_range` for each of
    the d+1 polynomial terms.  `symmetric` gives every player the same
    strategy list.  Per player, strategies are distinct non-empty resource
    subsets, found by rejection sampling.
    """

    seed: int
    n_players: int
    n_resources: int
    strategies_per_player: int
    strategy_size: tuple[int, int] = (1, 2)
    degree: int = 1
    coeff_range: tuple[int, int] = (0, 4)
    symmetric: bool = False

    def __post_init__(self):
        if self.n_players < 1 or self.n_resources < 1:
            raise ValidationError("need at least one player and one resource")
        if self.strategies_per_player < 1:
            raise ValidationError("need at least one strategy per player")
        lo, hi = self.strategy_size
        if lo < 1 or hi < lo:
            raise ValidationError(f"bad strategy size range {self.strategy_size}")
        if hi > self.n_resources:
            raise ValidationError(
                f"strategy size {hi} exceeds resource count {self.n_resources}"
            )
        if self.degree < 0:
            raise ValidationError("degree must be non-negative")
        clo, chi = self.coeff_range
        if clo < 0 or chi < clo:
            raise ValidationError(f"bad coefficient range {self.coeff_range}")


def _draw_strategies(spec: GenSpec, rng: random.Random) -> tuple[tuple[int, ...], ...]:
    lo, hi = spec.strategy_size
    chosen: list[tuple[int, ...]] = []
    seen: set[tuple[int, ...]] = set()
    for _ in range(spec.strategies_per_player):
        for _attempt in range(_RETRY_CAP):
            size = rng.randint(lo, hi)
            strat = tuple(sorted(rng.sample(range(spec.n_resources), size)))
            if strat not in seen:
                seen.add(strat)
                chosen.append(strat)
                break
        else:
            raise GenerationError(
                f"could not draw {spec.strategies_per_player} distinct "
                f"strategies of sizes {spec.strategy_size} over "
                f"{spec.n_resources} resources"
            )
    return tuple(chosen)


def generate(spec: GenSpec) -> CongestionGame:
    """Deterministic-in-seed random game matching `spec`."""
    rng = random.Random(spec.seed)
    clo, chi = spec.coeff_range
    resources = [
        LatencyFunction([rng.randint(clo, chi) for _ in range(spec.degree + 1)])
        for _ in range(spec.n_resources)
    ]
    if spec.symmetric:
        shared = _draw_strategies(spec, rng)
        players = [shared for _ in range(spec.n_players)]
    else:
        players = [_draw_strategies(spec, rng) for _ in range(spec.n_players)]
    return CongestionGame(resources, players, mode="standard")
