"""Exact-arithmetic congestion game model.

A game is a set of resources, each with a polynomial latency function, and a
set of players, each owning explicit strategies (non-empty sets of resource
indices).  A state fixes one strategy per player; the load of a resource is
the number of players whose chosen strategy contains it, and a player's cost
is the sum of her resources' latencies at their loads.

All arithmetic is done with `fractions.Fraction`, so every cost, potential,
and comparison in this package is exact.  Two modes are supported:

* ``standard``: polynomial latencies with non-negative coefficients (the
  usual setting; monotonicity and the potential sandwich hold).
* ``hardness``: affine latencies whose offset may be negative, as produced by
  the circuit-to-game builders; values must still be non-negative at every
  feasible integer load, and are required to be integers.

Games, states, and subgame views are immutable; every operation here is a
pure function of its arguments and safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import ValidationError

RationalLike = Union[Fraction, int, str]

STANDARD = "standard"
HARDNESS = "hardness"


def to_fraction(value: RationalLike) -> Fraction:
    """Coerce ints, Fractions, and 'p/q' / decimal strings to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValidationError(f"not a rational: {value!r}")
    if isinstance(value, (int, str)):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"not a rational: {value!r}") from exc
    raise ValidationError(f"not a rational: {value!r}")


@dataclass(frozen=True)
class LatencyFunction:
    """Polynomial latency f(x) = sum_k coeffs[k] * x**k with rational coeffs."""

    coeffs: tuple[Fraction, ...]

    def __init__(self, coefficients: Iterable[RationalLike]):
        coeffs = tuple(to_fraction(c) for c in coefficients)
        if not coeffs:
            coeffs = (Fraction(0),)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        """Effective degree: trailing zero coefficients do not count."""
        d = len(self.coeffs) - 1
        while d > 0 and self.coeffs[d] == 0:
            d -= 1
        return d

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    @property
    def has_nonnegative_coeffs(self) -> bool:
        return all(c >= 0 for c in self.coeffs)

    def eval(self, load: int) -> Fraction:
        """Exact value at an integer load >= 1."""
        if not isinstance(load, int) or load < 1:
            raise ValidationError(f"latency evaluated at invalid load {load!r}")
        total = Fraction(0)
        power = 1
        for c in self.coeffs:
            if c:
                total += c * power
            power *= load
        return total

    def __call__(self, load: int) -> Fraction:
        return self.eval(load)


def eval_latency(func: LatencyFunction, load: int) -> Fraction:
    """Evaluate a latency function at a positive integer load, exactly."""
    return func.eval(load)


@dataclass(frozen=True)
class CongestionGame:
    """Immutable congestion game with explicit strategy lists.

    ``players[u]`` is a tuple of strategies; each strategy is a sorted tuple
    of distinct resource indices.  ``mode`` selects which coefficient
    invariant is enforced (see module docstring).
    """

    resources: tuple[LatencyFunction, ...]
    players: tuple[tuple[tuple[int, ...], ...], ...]
    mode: str = STANDARD

    def __init__(
        self,
        resources: Iterable[LatencyFunction | Iterable[RationalLike]],
        players: Iterable[Iterable[Iterable[int]]],
        mode: str = STANDARD,
    ):
        res = tuple(
            f if isinstance(f, LatencyFunction) else LatencyFunction(f)
            for f in resources
        )
        plys = tuple(
            tuple(tuple(sorted(set(int(e) for e in strat))) for strat in strats)
            for strats in players
        )
        object.__setattr__(self, "resources", res)
        object.__setattr__(self, "players", plys)
        object.__setattr__(self, "mode", mode)
        self._validate()

    def _validate(self) -> None:
        if self.mode not in (STANDARD, HARDNESS):
            raise ValidationError(f"unknown mode {self.mode!r}")
        n_res = len(self.resources)
        for u, strats in enumerate(self.players):
            if not strats:
                raise ValidationError(f"player {u} has no strategies")
            for s_idx, strat in enumerate(strats):
                if not strat:
                    raise ValidationError(
                        f"player {u} strategy {s_idx} is empty"
                    )
                for e in strat:
                    if e < 0 or e >= n_res:
                        raise ValidationError(
                            f"player {u} strategy {s_idx} uses invalid resource {e}"
                        )
        if self.mode == STANDARD:
            for e, f in enumerate(self.resources):
                if not f.has_nonnegative_coeffs:
                    raise ValidationError(
                        f"standard mode requires non-negative coefficients; "
                        f"resource {e} has {f.coeffs}"
                    )
        else:
            n = self.n_players
            for e, f in enumerate(self.resources):
                if f.degree > 1:
                    raise ValidationError(
                        f"hardness mode requires affine latencies; resource {e} "
                        f"has degree {f.degree}"
                    )
                if any(c.denominator != 1 for c in f.coeffs):
                    raise ValidationError(
                        f"hardness mode requires integer latency values; "
                        f"resource {e} has {f.coeffs}"
                    )
                for x in range(1, max(n, 1) + 1):
                    if f.eval(x) < 0:
                        raise ValidationError(
                            f"resource {e} has negative latency {f.eval(x)} "
                            f"at load {x}"
                        )

    @property
    def n_players(self) -> int:
        return len(self.players)

    @property
    def n_resources(self) -> int:
        return len(self.resources)

    @property
    def degree(self) -> int:
        """Maximum effective degree over all resources (0 for an empty game)."""
        return max((f.degree for f in self.resources), default=0)

    def strategies_of(self, u: int) -> tuple[tuple[int, ...], ...]:
        return self.players[u]

    def state(self, choices: Sequence[int]) -> "State":
        return State.of(self, choices)

    # Per-resource cumulative latency sums, used by potential computations.
    # cum[e][k] = sum_{j=1..k} f_e(j); built lazily, games are immutable.
    def _cum(self, e: int, k: int) -> Fraction:
        cache = self.__dict__.get("_cum_cache")
        if cache is None:
            cache = [[Fraction(0)] for _ in range(len(self.resources))]
            self.__dict__["_cum_cache"] = cache
        col = cache[e]
        while len(col) <= k:
            col.append(col[-1] + self.resources[e].eval(len(col)))
        return col[k]

    def player_cost(self, state: "State", u: int) -> Fraction:
        """Total latency player u experiences at `state`."""
        loads = state.loads
        return sum(
            (self.resources[e].eval(loads[e]) for e in self.players[u][state.choices[u]]),
            Fraction(0),
        )

    def deviation_cost(self, state: "State", u: int, alt: int) -> Fraction:
        """Cost u would pay after unilaterally switching to strategy `alt`.

        Computed incrementally: only resources in the symmetric difference of
        the two strategies see an adjusted load.
        """
        strats = self.players[u]
        if alt < 0 or alt >= len(strats):
            raise ValidationError(f"player {u} has no strategy {alt}")
        current = set(strats[state.choices[u]])
        loads = state.loads
        total = Fraction(0)
        for e in strats[alt]:
            load = loads[e] if e in current else loads[e] + 1
            total += self.resources[e].eval(load)
        return total

    def potential(self, state: "State") -> Fraction:
        """Rosenthal potential: sum over resources of cumulative latencies."""
        return sum(
            (self._cum(e, k) for e, k in enumerate(state.loads) if k),
            Fraction(0),
        )


@dataclass(frozen=True)
class State:
    """One chosen strategy index per player, with a cached load profile."""

    choices: tuple[int, ...]
    loads: tuple[int, ...]

    @classmethod
    def of(cls, game: CongestionGame, choices: Sequence[int]) -> "State":
        choices = tuple(int(c) for c in choices)
        if len(choices) != game.n_players:
            raise ValidationError(
                f"state has {len(choices)} choices for {game.n_players} players"
            )
        loads = [0] * game.n_resources
        for u, c in enumerate(choices):
            strats = game.players[u]
            if c < 0 or c >= len(strats):
                raise ValidationError(f"player {u} has no strategy {c}")
            for e in strats[c]:
                loads[e] += 1
        return cls(choices, tuple(loads))

    def apply(self, game: CongestionGame, u: int, new_choice: int) -> "State":
        """New state with u's choice replaced; loads updated incrementally."""
        strats = game.players[u]
        if new_choice < 0 or new_choice >= len(strats):
            raise ValidationError(f"player {u} has no strategy {new_choice}")
        old = strats[self.choices[u]]
        new = strats[new_choice]
        loads = list(self.loads)
        for e in old:
            loads[e] -= 1
        for e in new:
            loads[e] += 1
        choices = list(self.choices)
        choices[u] = new_choice
        return State(tuple(choices), tuple(loads))


@dataclass(frozen=True)
class SubgameView:
    """Restriction of a game to an active player set F with frozen outsiders.

    Players outside F are pinned to their strategies in the freezing state;
    their contribution to each resource load becomes a constant offset t_e,
    so the view evaluates resource e at load x as f_e(x + t_e).  Active
    players keep their full strategy sets and experience exactly the same
    costs as in the base game (for states agreeing with the freeze).
    """

    game: CongestionGame
    active: frozenset[int]
    frozen_loads: tuple[int, ...]

    @classmethod
    def freeze(
        cls, game: CongestionGame, state: State, active: Iterable[int]
    ) -> "SubgameView":
        active_set = frozenset(int(u) for u in active)
        for u in active_set:
            if u < 0 or u >= game.n_players:
                raise ValidationError(f"active set mentions unknown player {u}")
        t = [0] * game.n_resources
        for u, c in enumerate(state.choices):
            if u in active_set:
                continue
            for e in game.players[u][c]:
                t[e] += 1
        return cls(game, active_set, tuple(t))

    @property
    def n_players(self) -> int:
        return self.game.n_players

    def strategies_of(self, u: int) -> tuple[tuple[int, ...], ...]:
        return self.game.players[u]

    def _eval(self, e: int, active_load: int) -> Fraction:
        return self.game.resources[e].eval(active_load + self.frozen_loads[e])

    def _active_loads(self, state: State) -> list[int]:
        loads = [0] * self.game.n_resources
        for u in self.active:
            for e in self.game.players[u][state.choices[u]]:
                loads[e] += 1
        return loads

    def player_cost(self, state: State, u: int) -> Fraction:
        if u not in self.active:
            raise ValidationError(f"player {u} is frozen in this subgame")
        loads = self._active_loads(state)
        return sum(
            (self._eval(e, loads[e]) for e in self.game.players[u][state.choices[u]]),
            Fraction(0),
        )

    def deviation_cost(self, state: State, u: int, alt: int) -> Fraction:
        if u not in self.active:
            raise ValidationError(f"player {u} is frozen in this subgame")
        strats = self.game.players[u]
        if alt < 0 or alt >= len(strats):
            raise ValidationError(f"player {u} has no strategy {alt}")
        loads = self._active_loads(state)
        current = set(strats[state.choices[u]])
        total = Fraction(0)
        for e in strats[alt]:
            load = loads[e] if e in current else loads[e] + 1
            total += self._eval(e, load)
        return total

    def potential(self, state: State) -> Fraction:
        """Potential of the subgame: modified latencies, active loads only."""
        loads = self._active_loads(state)
        total = Fraction(0)
        for e, k in enumerate(loads):
            for j in range(1, k + 1):
                total += self._eval(e, j)
        return total


GameLike = Union[CongestionGame, SubgameView]


def load_profile(game: CongestionGame, state: State) -> tuple[int, ...]:
    """Per-resource player counts, recomputed from scratch.

    `State.loads` caches the same profile; this is the independent
    recomputation used by debugging checks and tests.
    """
    loads = [0] * game.n_resources
    for u, c in enumerate(state.choices):
        for e in game.players[u][c]:
            loads[e] += 1
    return tuple(loads)


def player_cost(game: GameLike, state: State, u: int) -> Fraction:
    return game.player_cost(state, u)


def deviation_cost(game: GameLike, state: State, u: int, alt: int) -> Fraction:
    return game.deviation_cost(state, u, alt)


def rosenthal_potential(game: GameLike, state: State) -> Fraction:
    return game.potential(state)


def aggregate_metrics(
    game: CongestionGame, state: State
) -> tuple[Fraction, Fraction, Fraction]:
    """(sum of latencies, potential, total player cost) at `state`.

    The latency sum ranges over occupied resources only: a resource nobody
    uses incurs no latency, regardless of its constant term.  In standard
    mode the three values satisfy latency_sum <= potential <= total_cost.
    """
    latency_sum = sum(
        (game.resources[e].eval(k) for e, k in enumerate(state.loads) if k),
        Fraction(0),
    )
    potential = game.potential(state)
    total_cost = sum(
        (game.player_cost(state, u) for u in range(game.n_players)),
        Fraction(0),
    )
    return latency_sum, potential, total_cost
