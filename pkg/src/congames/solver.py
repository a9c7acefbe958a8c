"""Phased best-response solver computing O(1)-approximate equilibria.

The schedule groups players into blocks by the magnitude of their optimistic
cost (the cost they would pay alone), then runs one phase per block: during
phase i, block-i players may make p-moves and block-(i+1) players may make
q-moves, always executing a full best response.  Parameters p and q are tied
to the worst-case ratio theta_d(q) between the potential of a q-approximate
state and the optimal potential; for linear games theta_1(q) = 2q/(2-q) is
exact, while for degree >= 2 the caller must supply a ratio bound explicitly
(only an existential bound of the d^O(d) type is known, with no usable
constant).

The final state is a p(1 + 4/n^psi)-approximate equilibrium, and the number
of executed moves is polynomial in n; both facts are re-checked by the test
suite with the exact verifier.

All block arithmetic is exact: boundaries are rational powers of the base
B = 2^(d+1) n^(2 psi + d + 1), and membership is decided by repeated exact
division, never by floating logarithms.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .core import CongestionGame, State, to_fraction
from .dynamics import MoveRecord, RunTrace, find_threshold_move, optimistic_cost
from .errors import ContractViolationError, ParameterError, ValidationError
from .serialize import format_rational

SCHEDULERS = ("scan", "random")


@dataclass(frozen=True)
class SolverConfig:
    """Tuning knobs for `solve`.

    psi steers the accuracy/effort trade-off (larger psi, tighter guarantee,
    more moves).  theta_override is mandatory for games of degree >= 2 and
    must exceed 1.  The default scheduler "scan" picks the lowest-index
    eligible block-i player, else the lowest-index eligible block-(i+1)
    player; "random" picks uniformly among all eligible players using `seed`.
    """

    psi: int = 1
    theta_override: Optional[Fraction] = None
    move_cap: Optional[int] = None
    scheduler: str = "scan"
    seed: Optional[int] = None

    def __post_init__(self):
        if not isinstance(self.psi, int) or self.psi < 1:
            raise ValidationError(f"psi must be a positive integer, got {self.psi!r}")
        if self.theta_override is not None:
            override = to_fraction(self.theta_override)
            if override <= 1:
                raise ValidationError(
                    f"theta override must exceed 1, got {override}"
                )
            object.__setattr__(self, "theta_override", override)
        if self.scheduler not in SCHEDULERS:
            raise ValidationError(
                f"scheduler must be one of {SCHEDULERS}, got {self.scheduler!r}"
            )
        if self.move_cap is not None and self.move_cap < 0:
            raise ValidationError("move_cap must be non-negative")


def theta(d: int, q: Fraction, override: Optional[Fraction] = None) -> Fraction:
    """Potential ratio bound for q-approximate states of degree-d games.

    Degree <= 1: exactly 2q/(2-q), valid for q in [1, 2).  Degree >= 2:
    returns the caller-supplied override; there is no concrete constant to
    compute, only an existential d^O(d)-type bound.
    """
    q = to_fraction(q)
    if d <= 1:
        if not (1 <= q < 2):
            raise ParameterError(f"linear ratio bound needs 1 <= q < 2, got {q}")
        return 2 * q / (2 - q)
    if override is None:
        raise ParameterError(
            f"degree {d} >= 2 requires an explicit theta override: no concrete "
            "potential-ratio constant is available for polynomial latencies, "
            "only an existential d^O(d) bound"
        )
    override = to_fraction(override)
    if override <= 1:
        raise ParameterError(f"theta override must exceed 1, got {override}")
    return override


def parameters(
    n: int, d: int, config: SolverConfig
) -> tuple[Fraction, Fraction, Fraction]:
    """Exact (q, p, theta) for an n-player degree-d game.

    q = 1 + n^-psi and p = (1/theta_d(q) - n^-psi)^-1.  Fails when p would
    be non-positive, i.e. the instance is too small for the chosen psi.
    """
    if n < 2:
        raise ParameterError(f"need at least 2 players, got {n}")
    eps = Fraction(1, n**config.psi)
    q = 1 + eps
    th = theta(d, q, config.theta_override)
    denom = 1 / th - eps
    if denom <= 0:
        raise ParameterError(
            f"instance too small for psi={config.psi}: 1/theta = {1 / th} "
            f"does not exceed n^-psi = {eps}"
        )
    return q, 1 / denom, th


@dataclass
class BlockPartition:
    """Players grouped by optimistic-cost magnitude.

    Block i (1-indexed) holds players whose optimistic cost lies in
    (b_{i+1}, b_i], where b_i = ell_max * B^(1-i).  Players with zero
    optimistic cost are listed separately and never scheduled.
    """

    base: int
    m: int
    boundaries: list[Fraction]
    block_of: dict[int, int]
    zero_players: list[int]
    blocks: list[list[int]] = field(default_factory=list)

    @property
    def is_degenerate(self) -> bool:
        return self.m == 0


def partition_blocks(
    ells: Sequence[Fraction], n: int, d: int, psi: int
) -> BlockPartition:
    """Exact block assignment from per-player optimistic costs."""
    base = 2 ** (d + 1) * n ** (2 * psi + d + 1)
    positive = {u: ell for u, ell in enumerate(ells) if ell > 0}
    zero_players = [u for u, ell in enumerate(ells) if ell == 0]
    if any(ell < 0 for ell in ells):
        raise ValidationError("optimistic costs must be non-negative")
    if not positive:
        return BlockPartition(base, 0, [], {}, zero_players, [])
    ell_max = max(positive.values())
    ell_min = min(positive.values())

    # m = 1 + ceil(log_base(ell_max / ell_min)), by repeated exact division.
    m = 1
    reach = ell_min
    while reach < ell_max:
        reach *= base
        m += 1

    boundaries = [ell_max * Fraction(1, base**i) for i in range(m + 1)]
    block_of: dict[int, int] = {}
    blocks: list[list[int]] = [[] for _ in range(m)]
    for u, ell in sorted(positive.items()):
        i = 1
        bound = ell_max / base
        while ell <= bound:
            i += 1
            bound /= base
        if i > m:
            raise ContractViolationError(
                f"player {u} fell below block {m}: ell={ell}"
            )
        block_of[u] = i
        blocks[i - 1].append(u)
    return BlockPartition(base, m, boundaries, block_of, zero_players, blocks)


def approximation_bound(n: int, psi: int, p: Fraction) -> Fraction:
    """Guaranteed factor of the computed state: p(1 + 4 n^-psi)."""
    return p * (1 + Fraction(4, n**psi))


def move_bound(n: int, d: int, psi: int) -> int:
    """Explicit ceiling on executed moves: first-phase term, later phases, init."""
    first = 2 ** (2 * d + 2) * n ** (5 * psi + 3 * d + 3)
    later = n * 2 ** (d + 2) * n ** (4 * psi + 2 * d + 2)
    return first + later + n


def default_move_cap(n: int, d: int, psi: int) -> int:
    """Four times the dominant term of the move bound; breaching it is a bug."""
    return 4 * 2 ** (2 * d + 2) * n ** (5 * psi + 3 * d + 3)


def solve(game: CongestionGame, config: Optional[SolverConfig] = None) -> RunTrace:
    """Run the phased schedule and return the full move trace.

    Starts every player on her solo best response, partitions players into
    blocks, then executes one phase per non-empty block in increasing order.
    Phase i ends when no block-i player has a p-move and no block-(i+1)
    player has a q-move.  The loop deliberately includes a final phase for
    the last block: when the previous phase ran, it is a provable no-op, and
    on single-block partitions (all optimistic costs equal) it is what
    equilibrates the only block.

    The returned trace records exact costs and potentials per move, phase
    summaries, parameters, and the guarantee bound p(1 + 4 n^-psi).
    """
    if config is None:
        config = SolverConfig()
    if game.mode != "standard":
        raise ValidationError("solver requires a standard-mode game")
    n = game.n_players
    d = max(1, game.degree)
    psi = config.psi
    rng = random.Random(config.seed)

    ells: list[Fraction] = []
    initial_choices: list[int] = []
    for u in range(n):
        ell, idx = optimistic_cost(game, u)
        ells.append(ell)
        initial_choices.append(idx)

    state = State.of(game, initial_choices)
    potential = game.potential(state)

    params: dict = {
        "n": n,
        "d": d,
        "psi": psi,
        "scheduler": config.scheduler,
    }
    if config.seed is not None:
        params["seed"] = config.seed

    partition = partition_blocks(ells, n, d, psi)
    params["base"] = partition.base
    params["m"] = partition.m
    params["block_of"] = [partition.block_of.get(u) for u in range(n)]
    params["zero_players"] = partition.zero_players

    if partition.is_degenerate:
        # Every optimistic cost is zero: the initial state costs 0 to all.
        params["degenerate"] = True
        return RunTrace(
            initial_state=state.choices,
            final_state=state.choices,
            final_potential=potential,
            moves=[],
            phases=[],
            parameters=params,
        )

    q, p, th = parameters(n, d, config)
    cap = (
        config.move_cap
        if config.move_cap is not None
        else default_move_cap(n, d, psi)
    )
    params.update(
        {
            "q": format_rational(q),
            "p": format_rational(p),
            "theta": format_rational(th),
            "bound": format_rational(approximation_bound(n, psi, p)),
            "move_cap": cap,
        }
    )

    moves: list[MoveRecord] = []
    phases: list[dict] = []

    def eligible_moves(members: Sequence[int], factor: Fraction):
        for u in members:
            found = find_threshold_move(game, state, u, factor)
            if found is not None:
                yield u, found

    for i in range(1, partition.m + 1):
        block_i = partition.blocks[i - 1]
        if not block_i:
            continue
        block_next = partition.blocks[i] if i < partition.m else []
        phase_moves = 0
        while True:
            chosen = None
            if config.scheduler == "scan":
                for u, found in eligible_moves(block_i, p):
                    chosen = (u, found)
                    break
                if chosen is None:
                    for u, found in eligible_moves(block_next, q):
                        chosen = (u, found)
                        break
            else:
                candidates = list(eligible_moves(block_i, p))
                candidates += list(eligible_moves(block_next, q))
                if candidates:
                    chosen = candidates[rng.randrange(len(candidates))]
            if chosen is None:
                break
            u, (idx, new_cost) = chosen
            if len(moves) + 1 > cap:
                raise ContractViolationError(
                    f"move cap {cap} exceeded in phase {i}; the schedule "
                    "should terminate well below it"
                )
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
                    phase=i,
                )
            )
            potential = new_potential
            phase_moves += 1
        phases.append({"i": i, "block_size": len(block_i), "moves": phase_moves})

    return RunTrace(
        initial_state=tuple(initial_choices),
        final_state=state.choices,
        final_potential=potential,
        moves=moves,
        phases=phases,
        parameters=params,
    )
