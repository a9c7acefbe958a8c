"""Command line front end.

Commands: gen, solve, verify, brute, audit, flip-gen, bench.  Machine-facing
output always prints rationals exactly (p/q), never as floats.  Exit codes:
0 success, 2 validation/config error, 3 enumeration budget refusal,
4 contract violation (move-cap breach or a missed guarantee).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Optional

from . import generators, hardness, serialize, solver, verify
from .core import CongestionGame, State, to_fraction
from .errors import (
    BudgetExceededError,
    ContractViolationError,
    GenerationError,
    ParameterError,
    ValidationError,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BUDGET = 3
EXIT_CONTRACT = 4


def _parse_rho(text: str) -> Optional[Fraction]:
    if text.lower() in ("inf", "infinity"):
        return None
    return to_fraction(text)


def cmd_gen(args) -> int:
    spec = generators.GenSpec(
        seed=args.seed,
        n_players=args.n,
        n_resources=args.resources,
        strategies_per_player=args.strategies,
        strategy_size=(args.size_min, args.size_max),
        degree=args.d,
        coeff_range=(args.coeff_min, args.coeff_max),
        symmetric=args.symmetric,
    )
    game = generators.generate(spec)
    serialize.write_instance(game, args.out)
    print(
        f"wrote {args.out}: n={game.n_players} resources={game.n_resources} "
        f"d={game.degree} symmetric={str(args.symmetric).lower()}"
    )
    return EXIT_OK


def _load_standard_instance(path: str) -> CongestionGame:
    game, _labels = serialize.read_instance(path)
    return game


def cmd_solve(args) -> int:
    game = _load_standard_instance(args.instance)
    config = solver.SolverConfig(
        psi=args.psi,
        theta_override=None if args.theta is None else to_fraction(args.theta),
        move_cap=args.move_cap,
        scheduler=args.scheduler,
        seed=args.seed,
    )
    trace = solver.solve(game, config)
    if args.trace:
        trace.write_json(args.trace)
    final = State.of(game, trace.final_state)
    report = verify.approximation_factor(game, final)
    bound_str = (trace.parameters or {}).get("bound")
    if bound_str is None:
        ok = report.is_approx(Fraction(1))
        bound_str = "1"
    else:
        ok = report.is_approx(to_fraction(bound_str))
    print(
        f"moves={trace.n_moves} rho_star={report.rho_star_str()} "
        f"bound={bound_str} ok={str(ok).lower()}"
    )
    return EXIT_OK if ok else EXIT_CONTRACT


def cmd_verify(args) -> int:
    game, _labels = serialize.read_instance(args.instance)
    choices = serialize.read_state(args.state)
    state = State.of(game, choices)
    report = verify.approximation_factor(game, state)
    line = f"rho_star={report.rho_star_str()}"
    if args.rho is not None:
        rho = _parse_rho(args.rho)
        line += f" rho={'inf' if rho is None else serialize.format_rational(rho)}"
        line += f" ok={str(report.is_approx(rho)).lower()}"
    print(line)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fp:
            serialize.dump_json(report.to_dict(), fp)
    return EXIT_OK


def cmd_brute(args) -> int:
    game, _labels = serialize.read_instance(args.instance)
    state, phi = verify.brute_min_potential(game, budget=args.budget)
    print(
        f"phi_star={serialize.format_rational(phi)} "
        f"state={','.join(str(c) for c in state.choices)}"
    )
    return EXIT_OK


def _default_audit_corpus() -> list[CongestionGame]:
    corpus = []
    for seed in range(50):
        spec = generators.GenSpec(
            seed=seed,
            n_players=4,
            n_resources=6,
            strategies_per_player=2,
            strategy_size=(1, 3),
            degree=1,
            coeff_range=(0, 4),
        )
        corpus.append(generators.generate(spec))
    return corpus


def cmd_audit(args) -> int:
    if args.instance:
        game, _labels = serialize.read_instance(args.instance)
        corpus = [game]
    else:
        corpus = _default_audit_corpus()
    trials_each = max(1, args.trials // len(corpus))
    total = verify.AuditReport()
    for idx, game in enumerate(corpus):
        total.merge(
            verify.audit_identities(
                game, seed=args.seed + idx, trials=trials_each, budget=args.budget
            )
        )
    doc = total.to_dict()
    print(json.dumps(doc, indent=2))
    return EXIT_OK if total.total_violations == 0 else EXIT_CONTRACT


def cmd_flip_gen(args) -> int:
    circuit = hardness.read_flip_instance(args.circuit)
    bundle = hardness.derive_subcircuits(circuit)
    params = hardness.GadgetParams.for_bundle(
        bundle, rho=to_fraction(args.rho), alpha=args.alpha
    )
    game, labels = hardness.build_flip_game(bundle, params)
    report = hardness.structural_check(game)
    serialize.write_instance(game, args.out, labels=labels)
    if args.bundle_out:
        with open(args.bundle_out, "w", encoding="utf-8") as fp:
            serialize.dump_json(hardness.bundle_to_dict(bundle), fp)
    print(
        f"wrote {args.out}: players={game.n_players} "
        f"resources={game.n_resources} gates={bundle.total_gates()} "
        f"structural_ok={str(report.passed).lower()}"
    )
    return EXIT_OK if report.passed else EXIT_CONTRACT


def _bench_one(task: tuple) -> dict:
    n, seed, d, psi, resources, strategies, coeff_max, theta = task
    spec = generators.GenSpec(
        seed=seed,
        n_players=n,
        n_resources=resources,
        strategies_per_player=strategies,
        strategy_size=(1, min(3, resources)),
        degree=d,
        coeff_range=(0, coeff_max),
    )
    game = generators.generate(spec)
    config = solver.SolverConfig(
        psi=psi,
        theta_override=None if theta is None else to_fraction(theta),
    )
    start = time.perf_counter()
    trace = solver.solve(game, config)
    elapsed_ms = int((time.perf_counter() - start) * 1000)
    final = State.of(game, trace.final_state)
    report = verify.approximation_factor(game, final)
    params = trace.parameters or {}
    bound_str = params.get("bound", "1")
    cap = params.get("move_cap")
    ok = report.is_approx(to_fraction(bound_str)) and (
        cap is None or trace.n_moves <= cap
    )
    return {
        "n": n,
        "d": d,
        "psi": psi,
        "seed": seed,
        "moves": trace.n_moves,
        "phases": len(trace.phases or []),
        "ms": elapsed_ms,
        "rho_star": report.rho_star_str(),
        "bound": bound_str,
        "ok": str(ok).lower(),
        "move_bound": solver.move_bound(n, max(1, game.degree), psi),
    }


BENCH_COLUMNS = [
    "n",
    "d",
    "psi",
    "seed",
    "moves",
    "phases",
    "ms",
    "rho_star",
    "bound",
    "ok",
    "move_bound",
]


def cmd_bench(args) -> int:
    ns = [int(t) for t in args.n_list.split(",") if t]
    tasks = [
        (
            n,
            seed,
            args.d,
            args.psi,
            args.resources,
            args.strategies,
            args.coeff_max,
            args.theta,
        )
        for n in ns
        for seed in range(args.seed0, args.seed0 + args.seeds)
    ]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_bench_one, tasks))
    else:
        rows = [_bench_one(t) for t in tasks]
    with open(args.out, "w", encoding="utf-8", newline="") as fp:
        writer = csv.DictWriter(fp, fieldnames=BENCH_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    bad = [r for r in rows if r["ok"] != "true"]
    print(f"wrote {args.out}: runs={len(rows)} failures={len(bad)}")
    return EXIT_OK if not bad else EXIT_CONTRACT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="congames",
        description="Exact-arithmetic congestion game toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random instance file")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, required=True, help="number of players")
    p.add_argument("--resources", type=int, required=True)
    p.add_argument("--strategies", type=int, default=2, help="strategies per player")
    p.add_argument("--size-min", type=int, default=1)
    p.add_argument("--size-max", type=int, default=2)
    p.add_argument("--d", type=int, default=1, help="polynomial degree")
    p.add_argument("--coeff-min", type=int, default=0)
    p.add_argument("--coeff-max", type=int, default=4)
    p.add_argument("--symmetric", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="run the phased solver on an instance")
    p.add_argument("instance")
    p.add_argument("--psi", type=int, default=1)
    p.add_argument("--theta", default=None, help="ratio bound, required for d >= 2")
    p.add_argument("--scheduler", choices=solver.SCHEDULERS, default="scan")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--move-cap", type=int, default=None)
    p.add_argument("--trace", default=None, help="write the move trace JSON here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="exact approximation factor of a state")
    p.add_argument("instance")
    p.add_argument("state", help="state JSON file")
    p.add_argument("--rho", default=None, help="factor to test against, or 'inf'")
    p.add_argument("--report", default=None, help="write the full report JSON here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("brute", help="exhaustive minimum-potential state")
    p.add_argument("instance")
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(func=cmd_brute)

    p = sub.add_parser("audit", help="randomized exact identity audit")
    p.add_argument("instance", nargs="?", default=None)
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("flip-gen", help="build a hardness game from a circuit")
    p.add_argument("circuit", help="Flip circuit JSON file")
    p.add_argument("--alpha", type=int, default=None)
    p.add_argument("--rho", default="2")
    p.add_argument("--out", required=True)
    p.add_argument("--bundle-out", default=None)
    p.set_defaults(func=cmd_flip_gen)

    p = sub.add_parser("bench", help="sweep seeded instances, emit CSV records")
    p.add_argument("--n-list", default="4,8,12,16")
    p.add_argument("--seeds", type=int, default=5, help="seeds per n")
    p.add_argument("--seed0", type=int, default=0)
    p.add_argument("--psi", type=int, default=1)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--resources", type=int, default=10)
    p.add_argument("--strategies", type=int, default=3)
    p.add_argument("--coeff-max", type=int, default=6)
    p.add_argument("--theta", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, ParameterError, GenerationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except BudgetExceededError as exc:
        print(f"budget refused: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ContractViolationError as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
