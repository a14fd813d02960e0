"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 data or validation error,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import equilibrium as eq
from .game import entanglement_entropy, final_state, outcomes, payoffs
from .linalg import DomainError, NumericalError
from .strategies import Space, StrategyPoint, catalog_lookup, parse_space
from .sweep import SweepConfig, emit_csv, format_csv, parse_game_config, run_sweep

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_strategy(text: str) -> StrategyPoint:
    """Catalog name, or ``su2:w,x,y,z`` / ``diag:t,p`` / ``offdiag:t,p`` / ``classical:C``."""
    if ":" not in text:
        return catalog_lookup(text)
    kind, _, body = text.partition(":")
    space = parse_space(kind)
    if space is Space.CLASSICAL:
        return StrategyPoint.classical(body.strip().upper())
    try:
        vals = tuple(float(x) for x in body.split(","))
    except ValueError:
        raise DomainError(f"bad numbers in strategy {text!r}") from None
    return StrategyPoint(space, vals)


def _profile(args, players: int) -> list[StrategyPoint]:
    items = args.strategies
    if len(items) == 1 and players > 1:
        return eq.parse_profile_id(items[0], players)
    if len(items) != players:
        raise DomainError(f"game has {players} players but {len(items)} strategies were given")
    return [parse_strategy(s) for s in items]


def _resolution(text: str | None):
    if text is None:
        return None
    parts = text.lower().split("x")
    try:
        res = tuple(int(p) for p in parts)
    except ValueError:
        raise UsageError(f"--grid expects N or NxM, got {text!r}") from None
    return res if len(res) > 1 else res * 2


def _game(args):
    game = parse_game_config(args.game)
    return game.with_gamma(args.gamma) if args.gamma is not None else game


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def cmd_eval(args) -> int:
    game = _game(args)
    prof = _profile(args, game.players)
    rep = final_state(game, [p.unitary() for p in prof])
    pay = payoffs(game, [p.unitary() for p in prof])
    print(f"gamma {_fmt(game.gamma)}")
    for name, p in zip(outcomes(game.players), rep.outcome_probabilities):
        print(f"P({name}) {_fmt(float(p))}")
    print("payoffs " + " ".join(_fmt(float(x)) for x in pay))
    return EXIT_OK


def cmd_verify(args) -> int:
    game = _game(args)
    prof = _profile(args, game.players)
    v = eq.verify_nash(game, prof, args.space, args.eps, _resolution(args.grid))
    print(f"equilibrium {'yes' if v.is_equilibrium else 'no'}")
    print(f"strict {'yes' if v.strict else 'no'}")
    print(f"eps {v.epsilon:g}")
    print("payoffs " + " ".join(_fmt(float(x)) for x in v.payoffs))
    print("gains " + " ".join(f"{g:.3e}" for g in v.deviation_gains))
    return EXIT_OK


def _search_config(args) -> eq.SearchConfig:
    res = _resolution(args.grid) or eq.DEFAULT_RESOLUTION
    return eq.SearchConfig(multistarts=args.starts, seed=args.seed, eps=args.eps, resolution=res)


def cmd_search(args) -> int:
    game = _game(args)
    cfg = _search_config(args)
    reports = eq.search_symmetric_ne(game, args.space, cfg)
    print(f"# protocol: space={parse_space(args.space).value} starts={cfg.multistarts} seed={cfg.seed} "
          f"eps={cfg.eps if cfg.eps is not None else eq.DEFAULT_EPS[parse_space(args.space)]:g}")
    if not reports:
        print("no equilibrium found under this protocol")
    for r in reports:
        fam = "" if r.family is None else f" family={r.family.template} a={_fmt(r.family.a)} b={_fmt(r.family.b)}"
        print(f"{r.id} payoffs={' '.join(_fmt(float(x)) for x in r.payoffs)} strict={'yes' if r.strict else 'no'}{fam}")
    return EXIT_OK


def _gammas(args) -> tuple:
    if args.gammas:
        try:
            return tuple(float(x) for x in args.gammas.split(","))
        except ValueError:
            raise UsageError(f"--gammas expects a comma list, got {args.gammas!r}") from None
    if args.range:
        start, stop, count = args.range
        return SweepConfig.gamma_range(float(start), float(stop), int(count))
    if args.gamma is not None:
        return (args.gamma,)
    return SweepConfig.gamma_range(0.0, math.pi / 2, 91)


def cmd_sweep(args) -> int:
    game = parse_game_config(args.game)
    cfg = SweepConfig(
        game,
        args.space,
        _gammas(args),
        eps=args.eps,
        search=args.search,
        search_config=_search_config(args),
        resolution=_resolution(args.grid) or eq.DEFAULT_RESOLUTION,
        workers=args.workers,
    )
    records = run_sweep(cfg)
    if args.out:
        emit_csv(records, args.out, game.players)
    else:
        sys.stdout.write(format_csv(records, game.players))
    return EXIT_OK


_DEFAULT_PREDICATES = {
    2: [("ne:DxD", "2p-diag"), ("ne:QxQ", "2p-diag"), ("classical-ne", "su2")],
    3: [("family-ne", "su2"), ("classical-ne", "su2")],
}


def cmd_thresholds(args) -> int:
    game = parse_game_config(args.game)
    if args.predicate:
        preds = [(p, args.space) for p in args.predicate]
    else:
        preds = _DEFAULT_PREDICATES[game.players]
    eps = args.eps if args.eps is not None else eq.THRESHOLD_EPS
    for name, space in preds:
        pred = eq.make_predicate(name, space, eps, _search_config(args), _resolution(args.grid))
        if args.single:
            reports = [eq.find_threshold(game, pred, args.lo, args.hi, args.tol)]
        else:
            reports = eq.find_thresholds(game, pred, args.lo, args.hi, args.tol)
        if not reports or not reports[0].found:
            print(f"{pred.name}: no threshold in [{_fmt(args.lo)}, {_fmt(args.hi)}]")
        for r in reports:
            if r.found:
                print(f"{pred.name}: gamma*={r.gamma_star:.9f} width={r.width:.2e} "
                      f"{str(r.value_below).lower()}->{str(r.value_above).lower()}")
    return EXIT_OK


def cmd_entropy(args) -> int:
    if args.gamma is None:
        raise UsageError("entropy: --gamma is required")
    print(_fmt(entanglement_entropy(args.gamma)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    shared = _Parser(add_help=False)
    shared.add_argument("--game", default="pd2", help="game JSON file, or pd2 / pd3")
    shared.add_argument("--gamma", type=float, help="entanglement in radians")
    shared.add_argument("--space", default="su2", help="classical, 2p-diag, 2p-offdiag or su2")
    shared.add_argument("--eps", type=float, help="equilibrium tolerance (payoff units)")
    shared.add_argument("--grid", help="two-parameter grid resolution, N or NxM")
    shared.add_argument("--starts", type=int, default=64, help="multistart seeds for su2 search")
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--out", help="output file")

    parser = _Parser(prog="qgame", description="Quantum Prisoner's Dilemma equilibria")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", parents=[shared], help="payoffs of a profile")
    p.add_argument("strategies", nargs="+", help="one strategy per player, or a profile id like DxQ")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("verify-ne", parents=[shared], help="check a profile for equilibrium")
    p.add_argument("strategies", nargs="+")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search-ne", parents=[shared], help="symmetric equilibrium search")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("sweep", parents=[shared], help="equilibria over a gamma grid, as CSV")
    p.add_argument("--range", nargs=3, metavar=("START", "STOP", "COUNT"))
    p.add_argument("--gammas", help="explicit comma-separated gamma list")
    p.add_argument("--search", action=argparse.BooleanOptionalAction, default=None,
                   help="run symmetric search in addition to catalog candidates (default: su2 only)")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("thresholds", parents=[shared], help="bisect gamma boundaries")
    p.add_argument("--predicate", action="append",
                   help="ne:<profile>, classical-ne, family-ne or any-sym-ne (repeatable)")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--lo", type=float, default=0.0)
    p.add_argument("--hi", type=float, default=math.pi / 2)
    p.add_argument("--single", action="store_true", help="fail if a predicate switches more than once")
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("entropy", parents=[shared], help="entanglement entropy at --gamma")
    p.set_defaults(func=cmd_entropy)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DomainError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
