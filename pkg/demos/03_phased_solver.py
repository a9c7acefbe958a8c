"""The phased schedule that guarantees an O(1)-approximate equilibrium.

Shows the exact parameters (q, p, block base), the optimistic-cost blocks,
the per-phase move counts, and the verified final approximation factor.
"""

from fractions import Fraction as F

from congames import (
    GenSpec,
    SolverConfig,
    approximation_factor,
    generate,
    solve,
)
from congames.solver import move_bound

game = generate(
    GenSpec(
        seed=31,
        n_players=16,
        n_resources=4,
        strategies_per_player=3,
        strategy_size=(1, 2),
        degree=1,
        coeff_range=(0, 12),
    )
)

trace = solve(game, SolverConfig(psi=1))
params = trace.parameters
print("parameters:")
for key in ("n", "d", "psi", "q", "p", "theta", "base", "m", "bound"):
    print(f"  {key} = {params[key]}")

print("blocks (player -> block):", params["block_of"])
print("phases:", trace.phases)
print("moves executed:", trace.n_moves, " (ceiling:", move_bound(16, 1, 1), ")")
for move in trace.moves:
    print(
        f"  phase {move.phase}: player {move.player} cost "
        f"{move.cost_before} -> {move.cost_after}"
    )

final = game.state(trace.final_state)
report = approximation_factor(game, final)
print(
    "exact rho* =", report.rho_star_str(),
    " guaranteed bound p(1+4/n^psi) =", params["bound"],
)
assert report.is_approx(F(params["bound"]))

# A degree-2 game needs an explicit potential-ratio bound; only linear games
# get one computed from a closed form.
quad = generate(
    GenSpec(seed=8, n_players=8, n_resources=8, strategies_per_player=3,
            strategy_size=(1, 2), degree=2, coeff_range=(0, 4))
)
quad_trace = solve(quad, SolverConfig(psi=1, theta_override=F(3)))
quad_report = approximation_factor(quad, quad.state(quad_trace.final_state))
print(
    "degree-2 run with theta override 3: rho* =", quad_report.rho_star_str(),
    " bound =", quad_trace.parameters["bound"],
)
