"""Exact equilibrium verification and brute-force oracles.

`approximation_factor` inspects every (player, strategy) pair; nothing here
is ever sampled.  Ratio conventions make the report total even with
zero-latency resources: 0/0 counts as 1 and positive/0 as infinity.

The enumeration oracles refuse instances whose state space exceeds the
configured budget instead of falling back to sampling.  `enumerate_equilibria`
walks the state space as a depth-first search that discards a branch as soon
as some fully-surrounded player provably has a forbidden improving move; the
pruning is exact, so the result equals the naive product scan (the test suite
cross-checks the two).
"""

from __future__ import annotations

import itertools
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .core import (
    CongestionGame,
    State,
    SubgameView,
    aggregate_metrics,
    to_fraction,
)
from .dynamics import epsilon_br_dynamics
from .errors import BudgetExceededError, ValidationError
from .serialize import format_rational, game_to_dict

DEFAULT_ENUM_BUDGET = 1 << 20
BUDGET_ENV_VAR = "CONGAMES_ENUM_BUDGET"


def enumeration_budget(budget: Optional[int] = None) -> int:
    if budget is not None:
        return budget
    env = os.environ.get(BUDGET_ENV_VAR)
    if env:
        return int(env)
    return DEFAULT_ENUM_BUDGET


def state_space_size(game: CongestionGame) -> int:
    size = 1
    for strats in game.players:
        size *= len(strats)
    return size


def _require_budget(game: CongestionGame, budget: Optional[int]) -> None:
    limit = enumeration_budget(budget)
    size = state_space_size(game)
    if size > limit:
        raise BudgetExceededError(
            f"state space has {size} states, budget is {limit}"
        )


@dataclass
class ApproxReport:
    """Exact approximation factor of a state, with a witness deviation.

    rho_star is None exactly when `infinite` is set (some player with
    positive cost has a zero-cost deviation).  Otherwise rho_star is the max
    over players and deviations of cost/deviation-cost, which is >= 1.
    """

    rho_star: Optional[Fraction]
    infinite: bool
    witness: tuple[int, int]
    per_player: list[Optional[Fraction]]

    def is_approx(self, rho: Optional[Fraction]) -> bool:
        """True when the state is a rho-approximate equilibrium (None = inf)."""
        if rho is None:
            return True
        if self.infinite:
            return False
        assert self.rho_star is not None
        return self.rho_star <= to_fraction(rho)

    def rho_star_str(self) -> str:
        return "inf" if self.infinite else format_rational(self.rho_star)

    def to_dict(self) -> dict:
        return {
            "rho_star": self.rho_star_str(),
            "witness": {"player": self.witness[0], "strategy": self.witness[1]},
            "per_player": [
                "inf" if r is None else format_rational(r) for r in self.per_player
            ],
        }


def approximation_factor(game: CongestionGame, state: State) -> ApproxReport:
    """Exhaustive worst improvement ratio over all players and deviations."""
    best_ratio: Optional[Fraction] = None  # None means nothing seen yet
    infinite = False
    witness = (0, state.choices[0])
    per_player: list[Optional[Fraction]] = []
    for u in range(game.n_players):
        cur = game.player_cost(state, u)
        player_worst: Optional[Fraction] = Fraction(0)
        player_infinite = False
        for alt in range(len(game.players[u])):
            dev = game.deviation_cost(state, u, alt)
            if dev == 0:
                ratio: Optional[Fraction] = Fraction(1) if cur == 0 else None
            else:
                ratio = cur / dev
            if ratio is None:
                if not player_infinite:
                    player_infinite = True
                    if not infinite:
                        infinite = True
                        witness = (u, alt)
            elif not player_infinite and ratio > player_worst:
                player_worst = ratio
                if not infinite and (best_ratio is None or ratio > best_ratio):
                    best_ratio = ratio
                    witness = (u, alt)
        per_player.append(None if player_infinite else player_worst)
    if infinite:
        return ApproxReport(None, True, witness, per_player)
    assert best_ratio is not None
    return ApproxReport(best_ratio, False, witness, per_player)


def brute_min_potential(
    game: CongestionGame, budget: Optional[int] = None
) -> tuple[State, Fraction]:
    """Exhaustive global potential minimum; lexicographically smallest argmin."""
    _require_budget(game, budget)
    n = game.n_players
    loads = [0] * game.n_resources
    choices = [0] * n
    best: Optional[Fraction] = None
    best_choices: Optional[tuple[int, ...]] = None

    def descend(u: int, phi: Fraction) -> None:
        nonlocal best, best_choices
        if u == n:
            if best is None or phi < best:
                best = phi
                best_choices = tuple(choices)
            return
        for idx, strat in enumerate(game.players[u]):
            choices[u] = idx
            delta = Fraction(0)
            for e in strat:
                loads[e] += 1
                delta += game.resources[e].eval(loads[e])
            descend(u + 1, phi + delta)
            for e in strat:
                loads[e] -= 1

    descend(0, Fraction(0))
    assert best is not None and best_choices is not None
    return State.of(game, best_choices), best


def _neighbor_sets(game: CongestionGame) -> list[set[int]]:
    """Players sharing at least one resource across any of their strategies."""
    touching: list[set[int]] = [set() for _ in range(game.n_resources)]
    footprint: list[set[int]] = []
    for u, strats in enumerate(game.players):
        union: set[int] = set()
        for strat in strats:
            union.update(strat)
        footprint.append(union)
        for e in union:
            touching[e].add(u)
    neighbors: list[set[int]] = [set() for _ in range(game.n_players)]
    for u in range(game.n_players):
        for e in footprint[u]:
            neighbors[u].update(touching[e])
        neighbors[u].discard(u)
    return neighbors


def _auto_order(neighbors: list[set[int]]) -> list[int]:
    """Assignment order that lets neighborhood checks fire early.

    Hubs first: placing high-degree players early means the remaining
    players' neighborhoods complete soon after they are assigned, so their
    equilibrium checks can prune branches long before the leaves.  Any
    permutation yields the same result; this only affects speed.
    """
    return sorted(range(len(neighbors)), key=lambda u: (-len(neighbors[u]), u))


def enumerate_equilibria(
    game: CongestionGame,
    rho: Optional[Fraction] = Fraction(1),
    budget: Optional[int] = None,
    order: Optional[Sequence[int]] = None,
) -> list[State]:
    """All states that are rho-approximate equilibria (rho=None means all).

    Complete despite the pruning: a branch is cut only when a player whose
    entire neighborhood is already assigned has a deviation improving her
    cost by a factor strictly above rho, which dooms every completion.
    States come back in lexicographic order of the choice vector.
    """
    _require_budget(game, budget)
    if rho is not None:
        rho = to_fraction(rho)
        if rho < 1:
            raise ValidationError(f"rho must be >= 1 (or None), got {rho}")
    n = game.n_players
    neighbors = _neighbor_sets(game)
    if order is None:
        order = _auto_order(neighbors)
    else:
        order = list(order)
        if sorted(order) != list(range(n)):
            raise ValidationError("order must be a permutation of the players")
    position = {u: i for i, u in enumerate(order)}
    check_at: list[list[int]] = [[] for _ in range(n)]
    for u in range(n):
        ready = max((position[v] for v in neighbors[u]), default=0)
        check_at[max(ready, position[u])].append(u)

    loads = [0] * game.n_resources
    choices = [0] * n
    results: list[tuple[int, ...]] = []

    # Value tables per resource up to its owner count; plain ints when exact.
    owners = [0] * game.n_resources
    for nb_u in range(n):
        seen: set[int] = set()
        for strat in game.players[nb_u]:
            seen.update(strat)
        for e in seen:
            owners[e] += 1
    vals: list[list] = []
    for e, f in enumerate(game.resources):
        col = [0]
        for k in range(1, owners[e] + 1):
            v = f.eval(k)
            col.append(int(v) if v.denominator == 1 else v)
        vals.append(col)
    strat_sets = [
        [frozenset(strat) for strat in strats] for strats in game.players
    ]
    if rho is not None:
        rho_num, rho_den = rho.numerator, rho.denominator

    def violates(u: int) -> bool:
        # Loads on u's resources are final here: all her neighbors are set.
        strat = game.players[u][choices[u]]
        current = 0
        for e in strat:
            current += vals[e][loads[e]]
        if current == 0 or rho is None:
            return False
        in_current = strat_sets[u][choices[u]]
        threshold = current * rho_den
        for alt in game.players[u]:
            dev = 0
            for e in alt:
                dev += vals[e][loads[e] if e in in_current else loads[e] + 1]
            if dev * rho_num < threshold:
                return True
        return False

    def descend(depth: int) -> None:
        if depth == n:
            results.append(tuple(choices))
            return
        u = order[depth]
        checks = check_at[depth]
        for idx, strat in enumerate(game.players[u]):
            choices[u] = idx
            for e in strat:
                loads[e] += 1
            if not any(violates(w) for w in checks):
                descend(depth + 1)
            for e in strat:
                loads[e] -= 1

    descend(0)
    results.sort()
    return [State.of(game, c) for c in results]


@dataclass
class AuditCheck:
    trials: int = 0
    violations: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"trials": self.trials, "violations": self.violations}


@dataclass
class AuditReport:
    """Counts of checked and violated identities over randomized trials.

    Every check is a theorem for standard-mode games, so the violation lists
    should stay empty; each recorded violation embeds the full instance and
    state for replay.
    """

    rosenthal: AuditCheck = field(default_factory=AuditCheck)
    sandwich: AuditCheck = field(default_factory=AuditCheck)
    subadditivity: AuditCheck = field(default_factory=AuditCheck)
    subgame_consistency: AuditCheck = field(default_factory=AuditCheck)
    potential_ratio: AuditCheck = field(default_factory=AuditCheck)
    max_ratio_observed: Optional[Fraction] = None

    @property
    def total_violations(self) -> int:
        return (
            len(self.rosenthal.violations)
            + len(self.sandwich.violations)
            + len(self.subadditivity.violations)
            + len(self.subgame_consistency.violations)
            + len(self.potential_ratio.violations)
        )

    def to_dict(self) -> dict:
        return {
            "rosenthal": self.rosenthal.to_dict(),
            "sandwich": self.sandwich.to_dict(),
            "subadditivity": self.subadditivity.to_dict(),
            "subgame_consistency": self.subgame_consistency.to_dict(),
            "potential_ratio": self.potential_ratio.to_dict(),
            "max_ratio_observed": (
                None
                if self.max_ratio_observed is None
                else format_rational(self.max_ratio_observed)
            ),
            "total_violations": self.total_violations,
        }

    def merge(self, other: "AuditReport") -> None:
        for name in (
            "rosenthal",
            "sandwich",
            "subadditivity",
            "subgame_consistency",
            "potential_ratio",
        ):
            mine: AuditCheck = getattr(self, name)
            theirs: AuditCheck = getattr(other, name)
            mine.trials += theirs.trials
            mine.violations.extend(theirs.violations)
        if other.max_ratio_observed is not None and (
            self.max_ratio_observed is None
            or other.max_ratio_observed > self.max_ratio_observed
        ):
            self.max_ratio_observed = other.max_ratio_observed


def sample_state(game: CongestionGame, rng: random.Random) -> State:
    return State.of(
        game, [rng.randrange(len(strats)) for strats in game.players]
    )


def _counterexample(game: CongestionGame, state: State, detail: dict) -> dict:
    doc = {"instance": game_to_dict(game), "state": list(state.choices)}
    doc.update(detail)
    return doc


def audit_identities(
    game: CongestionGame,
    seed: int,
    trials: int,
    budget: Optional[int] = None,
    ratio_check: bool = True,
) -> AuditReport:
    """Randomized exact audit of the potential-function identities.

    Per trial: the move-by-move potential identity on a random deviation, the
    latency/potential/total-cost sandwich, sub-potential subadditivity and
    monotonicity for a random frozen subset, and cost consistency between the
    game and the subgame view.  With `ratio_check`, additionally drives
    (1+eps)-dynamics to a q-approximate state (q = 3/2) and compares its
    potential against the global minimum: for games of degree <= 1 the ratio
    must stay within 2q/(2-q) = 6; for higher degrees the ratio is only
    recorded, since no concrete constant is available to assert against.
    """
    if game.mode != "standard":
        raise ValidationError("audits are defined for standard-mode games")
    rng = random.Random(seed)
    report = AuditReport()
    n = game.n_players

    for _ in range(trials):
        state = sample_state(game, rng)

        u = rng.randrange(n)
        alt = rng.randrange(len(game.players[u]))
        report.rosenthal.trials += 1
        phi = game.potential(state)
        moved = state.apply(game, u, alt)
        lhs = game.potential(moved) - phi
        rhs = game.player_cost(moved, u) - game.player_cost(state, u)
        if lhs != rhs:
            report.rosenthal.violations.append(
                _counterexample(
                    game,
                    state,
                    {
                        "player": u,
                        "alt": alt,
                        "potential_diff": format_rational(lhs),
                        "cost_diff": format_rational(rhs),
                    },
                )
            )

        report.sandwich.trials += 1
        lat, pot, total = aggregate_metrics(game, state)
        if not (lat <= pot <= total):
            report.sandwich.violations.append(
                _counterexample(
                    game,
                    state,
                    {
                        "latency_sum": format_rational(lat),
                        "potential": format_rational(pot),
                        "total_cost": format_rational(total),
                    },
                )
            )

        report.subadditivity.trials += 1
        subset = frozenset(u for u in range(n) if rng.random() < 0.5)
        view = SubgameView.freeze(game, state, subset)
        coview = SubgameView.freeze(game, state, frozenset(range(n)) - subset)
        phi_f = view.potential(state)
        phi_rest = coview.potential(state)
        if not (phi <= phi_f + phi_rest and phi >= phi_f):
            report.subadditivity.violations.append(
                _counterexample(
                    game,
                    state,
                    {
                        "subset": sorted(subset),
                        "potential": format_rational(phi),
                        "potential_F": format_rational(phi_f),
                        "potential_rest": format_rational(phi_rest),
                    },
                )
            )

        if subset:
            report.subgame_consistency.trials += 1
            w = rng.choice(sorted(subset))
            same_cost = game.player_cost(state, w) == view.player_cost(state, w)
            full_costs = [
                game.deviation_cost(state, w, a)
                for a in range(len(game.players[w]))
            ]
            view_costs = [
                view.deviation_cost(state, w, a)
                for a in range(len(game.players[w]))
            ]
            same_br = [
                a for a, c in enumerate(full_costs) if c == min(full_costs)
            ] == [a for a, c in enumerate(view_costs) if c == min(view_costs)]
            if not (same_cost and same_br):
                report.subgame_consistency.violations.append(
                    _counterexample(
                        game, state, {"player": w, "subset": sorted(subset)}
                    )
                )

    if ratio_check:
        report.potential_ratio.trials += 1
        try:
            _, phi_min = brute_min_potential(game, budget)
        except BudgetExceededError:
            report.potential_ratio.trials -= 1
        else:
            q = Fraction(3, 2)
            trace = epsilon_br_dynamics(
                game, sample_state(game, rng), epsilon=q - 1
            )
            if not trace.truncated:
                phi_end = trace.final_potential
                ratio: Optional[Fraction] = None
                if phi_min > 0:
                    ratio = phi_end / phi_min
                    if report.max_ratio_observed is None or (
                        ratio > report.max_ratio_observed
                    ):
                        report.max_ratio_observed = ratio
                bound = 2 * q / (2 - q)
                violated = (
                    phi_end > bound * phi_min if game.degree <= 1 else False
                )
                if violated:
                    report.potential_ratio.violations.append(
                        _counterexample(
                            game,
                            State.of(game, trace.final_state),
                            {
                                "q": format_rational(q),
                                "potential": format_rational(phi_end),
                                "min_potential": format_rational(phi_min),
                            },
                        )
                    )

    return report


def naive_state_scan(
    game: CongestionGame,
    rho: Optional[Fraction],
    budget: Optional[int] = None,
) -> list[State]:
    """Reference oracle: product scan filtered by approximation_factor."""
    _require_budget(game, budget)
    out = []
    for combo in itertools.product(
        *[range(len(strats)) for strats in game.players]
    ):
        state = State.of(game, combo)
        if approximation_factor(game, state).is_approx(rho):
            out.append(state)
    return out
