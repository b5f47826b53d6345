"""Command-line interface: ``spintop <command> [options]``.

Every run writes ``manifest.json`` to the output directory; passing it back
with ``--manifest`` repeats the run exactly. Exit codes: 0 on success, 2 on
usage errors, 3 on node-budget or solver failures. Errors are reported as
one JSON object on stderr.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from spinning_top import __version__
from spinning_top import agents as ag
from spinning_top import games
from spinning_top.games import io as gio
from spinning_top.games.enumeration import full_enumeration_game
from spinning_top.geometry import tree
from spinning_top.geometry.profile import game_profile
from spinning_top.nash import NashSolverError
from spinning_top.training import population_sweep

NORMAL_FORM = ("rps", "elo", "noisy_elo", "disc", "random_gos", "blotto", "layered", "parity")
EXTENSIVE = ("tictactoe", "misere", "connect_four", "parity", "three_step", "one_step")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    """``1,2,4`` or an inclusive range ``1..64``."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(v) for v in text.split(",") if v]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from e


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--parallelism", type=int, default=1)
    common.add_argument("--out", default="out")
    common.add_argument("--tol", type=float, default=1e-4)

    game_opts = _Parser(add_help=False)
    game_opts.add_argument("--game")
    game_opts.add_argument("--n", type=int, default=100, help="strategy count for synthetic games")
    game_opts.add_argument("--epsilon", type=float, default=0.5)
    game_opts.add_argument("--units", type=int, default=10)
    game_opts.add_argument("--fields", type=int, default=5)
    game_opts.add_argument("--layers", default="1,3,5,3,1", help="layer sizes, strongest first")
    game_opts.add_argument("--steps", type=int, default=3, help="parity game steps per player")
    game_opts.add_argument("--sigma-w", type=float, default=1.0)
    game_opts.add_argument("--sigma-s", type=float, default=1.0)

    p = _Parser(prog="spintop", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--manifest", help="repeat the run recorded in this manifest")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("synth", parents=[common, game_opts], help="write a synthetic payoff matrix")
    s = sub.add_parser("payoff", parents=[common, game_opts], help="empirical payoff from agent matches")
    s.add_argument("--preset", default="small", choices=sorted(ag.PRESETS))
    s.add_argument("--grid", help="grid file with 'kind params seeds' rows")
    s = sub.add_parser("profile", parents=[common, game_opts], help="Nash clustering and profile fit")
    s.add_argument("--payoff", help="payoff CSV (label row, then rows)")
    s = sub.add_parser("comm", parents=[common, game_opts], help="n-bit communicativeness")
    s.add_argument("--restrict-depth", type=int, help="treat states a depth-d search resolves as leaves")
    s = sub.add_parser("count", parents=[common, game_opts], help="pure-strategy counts")
    s = sub.add_parser("train", parents=[common, game_opts], help="population-size sweep")
    s.add_argument("--payoff")
    s.add_argument("--sizes", type=_int_list, default=[1, 2, 4, 8])
    s.add_argument("--oracle", choices=("beat_average", "beat_all"), default="beat_average")
    s.add_argument("--step-cap", type=int)
    s.add_argument("--seeds", type=_int_list, default=[0])
    s.add_argument("--replacement", choices=("oldest", "random"), default="oldest")
    return p


# --------------------------------------------------------------------------
# game construction
# --------------------------------------------------------------------------


def extensive_game(args):
    name = args.game
    if name == "parity":
        return games.parity_game(args.steps)
    if name in games.EXTENSIVE_GAMES:
        return games.EXTENSIVE_GAMES[name]()
    raise UsageError(f"unknown extensive game {name!r}; choose from {', '.join(EXTENSIVE)}")


def normal_form_game(args) -> games.NormalFormGame:
    name, seed = args.game, args.seed
    try:
        if name == "rps":
            return games.rps()
        if name == "elo":
            return games.elo_game(args.n, seed)
        if name == "noisy_elo":
            return games.noisy_elo_game(args.n, args.epsilon, seed)
        if name == "disc":
            return games.disc_game(args.n, seed)
        if name == "random_gos":
            return games.random_game_of_skill(games.RandomGoSSpec(args.n, args.sigma_w, args.sigma_s, seed))
        if name == "blotto":
            return games.blotto(args.units, args.fields)
        if name == "layered":
            sizes = tuple(int(v) for v in args.layers.split(","))
            return games.layered_game(games.LayeredSpec(sizes), seed)
        if name == "parity":
            return full_enumeration_game(games.parity_game(args.steps))
    except ValueError as e:
        raise UsageError(str(e)) from e
    raise UsageError(f"unknown game {name!r}; choose from {', '.join(NORMAL_FORM)}")


def payoff_source(args):
    """``(standardized payoff, labels)`` from ``--payoff`` or ``--game``."""
    if getattr(args, "payoff", None):
        try:
            eg = ag.load_external_payoff(args.payoff)
        except gio.PayoffFormatError as e:
            raise UsageError(str(e)) from e
        return eg.payoff, eg.labels
    if not args.game:
        raise UsageError("one of --game or --payoff is required")
    g = normal_form_game(args)
    return games.standardize(g.payoff), g.labels


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def _write_json(path: Path, obj) -> Path:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return path


def cmd_synth(args, out: Path) -> dict:
    if not args.game:
        raise UsageError("--game is required")
    g = normal_form_game(args)
    path = gio.write_payoff(out / f"{args.game}.csv", games.standardize(g.payoff), g.labels,
                            {"provenance": g.provenance, "standardized": True})
    return {"payoff": str(path), "strategies": g.n}


def cmd_payoff(args, out: Path) -> dict:
    if not args.game:
        raise UsageError("--game is required")
    game = extensive_game(args)
    grid = ag.parse_grid(Path(args.grid).read_text()) if args.grid else args.preset
    try:
        specs = ag.sample_agent_grid(grid)
    except ValueError as e:
        raise UsageError(str(e)) from e
    eg = ag.build_empirical_payoff(game, specs, args.parallelism, progress=True)
    path = eg.save(out / "payoff.csv")
    return {"payoff": str(path), "agents": len(specs), "unique_strategies": eg.n}


def cmd_profile(args, out: Path) -> dict:
    P, labels = payoff_source(args)
    prof = game_profile(P, tol=args.tol)
    _write_json(out / "profile.json", prof.to_dict(labels))
    with open(out / "profile_points.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["cluster", "mean_rpp", "size"])
        for k, (x, y) in enumerate(prof.dataset()):
            w.writerow([k, repr(float(x)), int(y)])
    if prof.fit is not None:
        grid = np.linspace(prof.mean_rpp.min(), prof.mean_rpp.max(), 200)
        with open(out / "profile_curve.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "fitted_size"])
            w.writerows([repr(float(a)), repr(float(b))] for a, b in zip(grid, prof.fit(grid)))
    from spinning_top.plotting import plot_profile
    plot_profile(P, prof, out / "profile.png", title=args.game or Path(args.payoff).stem)
    return {"clusters": len(prof.cluster_sizes), "cluster_sizes": prof.cluster_sizes.tolist(),
            "total_3cycles": prof.total_cycles,
            "fit": prof.fit.to_dict() if prof.fit is not None else None}


def cmd_comm(args, out: Path) -> dict:
    if not args.game:
        raise UsageError("--game is required")
    game = extensive_game(args)
    if args.restrict_depth is not None:
        labeler = tree.minmax_depth_labeler(game, args.restrict_depth)
        res = tree.restricted_communicativeness(game, labeler)
    else:
        res = tree.communicativeness(game)
    report = res.to_dict()
    report["counts"] = tree.count_pure_strategies(game).to_dict()
    _write_json(out / "comm.json", report)
    return report


def cmd_count(args, out: Path) -> dict:
    if not args.game:
        raise UsageError("--game is required")
    report = tree.count_pure_strategies(extensive_game(args)).to_dict()
    _write_json(out / "count.json", report)
    return report


def cmd_train(args, out: Path) -> dict:
    P, _ = payoff_source(args)
    try:
        sweep = population_sweep(P, args.sizes, args.oracle, args.step_cap, tuple(args.seeds),
                                 args.replacement)
    except ValueError as e:
        raise UsageError(str(e)) from e
    (out / "sweep.csv").write_text(sweep.to_csv())
    _write_json(out / "trajectories.json", [t.to_dict() for t in sweep.trajectories])
    from spinning_top.plotting import plot_sweep
    plot_sweep(sweep, out / "sweep.png", title=args.game or "")
    return {"convergence_fraction": {str(k): v for k, v in sweep.convergence_fraction().items()},
            "rows": [r.__dict__ for r in sweep.rows]}


COMMANDS = {"synth": cmd_synth, "payoff": cmd_payoff, "profile": cmd_profile,
            "comm": cmd_comm, "count": cmd_count, "train": cmd_train}


def _fail(code: int, kind: str, message: str) -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return code


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.manifest:
            argv = json.loads(Path(args.manifest).read_text())["argv"]
            args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required")
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        result = COMMANDS[args.command](args, out)
        _write_json(out / "manifest.json", {"argv": list(argv), "version": __version__})
    except UsageError as e:
        return _fail(2, "usage", str(e))
    except (FileNotFoundError, json.JSONDecodeError, KeyError) as e:
        return _fail(2, "usage", f"{type(e).__name__}: {e}")
    except tree.NodeBudgetExceeded as e:
        return _fail(3, "budget", str(e))
    except NashSolverError as e:
        return _fail(3, "solver", str(e))
    print(json.dumps(result, indent=2, sort_keys=True, default=str))
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
