"""Command-line interface: ``randgroups <subcommand> ...``.

Exit codes: 0 on success, 2 for invalid input or configuration, 3 when
``--strict`` is set and a search ran out of budget.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import __version__
from .errors import RandGroupsError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3


class ConfigError(Exception):
    pass


def _load_config(path: str) -> dict:
    p = Path(path)
    try:
        if p.suffix == ".toml":
            return tomllib.loads(p.read_text())
        return json.loads(p.read_text())
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def _dump(obj, path: str | None = None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


def _grid_cell(text: str) -> tuple[int, int, float]:
    try:
        k, l, d = text.split(",")
        return int(k), int(l), float(d)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid cells look like k,l,d (got {text!r})") from None


def _budget_item(text: str) -> tuple[str, int]:
    key, _, val = text.partition("=")
    try:
        return key, int(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"budgets look like key=int (got {text!r})") from None


# -- subcommands ------------------------------------------------------------------


def cmd_sample(args) -> int:
    from .density import ModelParams, sample_presentation

    params = ModelParams(args.rank, args.level, args.density, args.seed)
    p = sample_presentation(params, tuple(args.stream))
    _dump(p.to_json(), args.output)
    return EXIT_OK


def _presentation(args):
    from .density import ModelParams, Presentation, sample_presentation

    if args.presentation:
        return Presentation.from_json(_read_json(args.presentation))
    if args.level is None or args.density is None:
        raise ConfigError("give --presentation or --level and --density")
    return sample_presentation(ModelParams(args.rank, args.level, args.density, args.seed), ())


def cmd_check_sc(args) -> int:
    from .density import is_small_cancellation, max_piece_ratio

    p = _presentation(args)
    lam = Fraction(args.lam)
    ratio = max_piece_ratio(p)
    _dump({"relators": len(p.relators), "level": p.level, "max_piece_ratio": str(ratio),
           "lambda": str(lam), "small_cancellation": is_small_cancellation(p, lam)}, args.output)
    return EXIT_OK


def cmd_estimate(args) -> int:
    from .experiments import ExperimentConfig, emit_report, run_experiment

    if args.seed is None:
        raise ConfigError("--seed is required for estimate")
    if not args.grid:
        raise ConfigError("at least one --grid cell is required")
    cfg = ExperimentConfig(args.property, list(args.grid), args.trials, args.seed,
                           dict(args.budget or {}), args.output)
    report = run_experiment(cfg)
    text = emit_report(report, args.format, args.output)
    if not args.output:
        sys.stdout.write(text)
    if args.strict and any(c.unknowns for c in report.cells):
        return EXIT_BUDGET
    return EXIT_OK


def cmd_vkd(args) -> int:
    from .vkd import DecoratedDiagram, diagram_stats, generally_reduce, mine

    D = DecoratedDiagram.from_json(_read_json(args.diagram))
    D.validate()
    out = {}
    if args.reduce:
        D = generally_reduce(D)
    elif args.mine is not None:
        D = mine(D, args.mine)
    if args.reduce or args.mine is not None:
        out["diagram"] = D.to_json()
    out["stats"] = diagram_stats(D).to_json()
    _dump(out, args.output)
    return EXIT_OK


def _need(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise ConfigError(f"--formula {args.formula} needs " + ", ".join("--" + m.replace("_", "-") for m in missing))


def cmd_bounds(args) -> int:
    from . import bounds
    from .freegroup import tree_bound

    f = args.formula
    if f == "lemma5":
        _need(args, "n", "u", "l")
        out = bounds.bound_tuple_fulfillment(args.n, args.u, args.k, args.l).to_json()
    elif f == "thm23":
        _need(args, "n", "u", "l", "d")
        out = bounds.bound_group_fulfillment(args.n, args.u, args.k, args.l, args.d, args.mode).to_json()
    elif f == "thm28":
        _need(args, "m", "S", "W", "l")
        out = bounds.diagram_count_bound(args.m, args.S, args.W, args.l).to_json()
    elif f == "lemma29":
        _need(args, "L", "S")
        out = {"bound": str(tree_bound(args.L, args.S))}
    elif f == "decay":
        _need(args, "r", "s", "base")
        lo, hi = args.l_min, args.l_max
        curve = bounds.negligibility_curve(args.q, args.r, args.s, args.base, range(lo, hi + 1))
        out = {"crossover": curve.crossover, "r": str(curve.r), "s": curve.s, "base": str(curve.base),
               "points": [[l, v] for l, v in curve.points]}
    else:  # constants
        _need(args, "d")
        c = bounds.constants(args.d)
        out = c.to_json()
        if args.l is not None:
            out["tree_ball_radius"] = bounds.tree_ball_radius(args.d, args.l)
    out["formula"] = f
    _dump(out, args.output)
    return EXIT_OK


def _read_words(path: str, rank: int):
    from .freegroup import Word

    lines = [ln.split("#", 1)[0].strip() for ln in Path(path).read_text().splitlines()]
    return [Word.parse(ln, rank) if ln not in ("1", "e") else Word.identity(rank) for ln in lines if ln]


def cmd_lift(args) -> int:
    from .equations import EquationSystem, LiftStatus, SolutionVerdict, lift_solution, verify_solution

    p = _presentation(args)
    sigma = EquationSystem.from_file(args.system, p.rank)
    y0 = _read_words(args.solution, p.rank)
    check = verify_solution(sigma, y0, p)
    if check == SolutionVerdict.INVALID:
        raise ConfigError("the given tuple is not a solution over the presentation")
    res = lift_solution(sigma, y0, p, budget=args.budget)
    out = res.to_json()
    out["solution_check"] = check.value
    _dump(out, args.output)
    if args.strict and res.status != LiftStatus.LIFTED:
        return EXIT_BUDGET
    return EXIT_OK


def cmd_count(args) -> int:
    if args.what == "cyclic":
        from .density import count_cyclically_reduced

        out = {"k": args.k, "l": args.l, "count": count_cyclically_reduced(args.k, args.l)}
    elif args.what == "trees":
        from .freegroup import enumerate_cancellation_trees, tree_bound

        trees = enumerate_cancellation_trees(args.L, args.S)
        out = {"L": args.L, "S": args.S, "count": len(trees), "bound": str(tree_bound(args.L, args.S))}
    else:
        from .bounds import circular_count_bound
        from .vkd.generate import circular_diagrams

        out = {"l": args.l, "m": args.m, "count": len(circular_diagrams(args.l, args.m)),
               "bound": circular_count_bound(args.m, args.l)}
    out["what"] = args.what
    _dump(out, args.output)
    return EXIT_OK


# -- parser -------------------------------------------------------------------------


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(prog="randgroups", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    subs: dict[str, argparse.ArgumentParser] = {}

    def add(name, func, help):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=func)
        sp.add_argument("--config", help="JSON or TOML file whose keys supply defaults for the flags")
        sp.add_argument("--output", "-o", help="write the result here instead of stdout")
        subs[name] = sp
        return sp

    def model_flags(sp, required):
        sp.add_argument("--rank", "-k", type=int, default=2)
        sp.add_argument("--level", "-l", type=int, required=required)
        sp.add_argument("--density", "-d", type=float, required=required)
        sp.add_argument("--seed", type=int, default=0)

    sp = add("sample", cmd_sample, "sample a presentation from the density model")
    model_flags(sp, required=False)
    sp.add_argument("--stream", type=int, nargs="*", default=[], help="substream key")

    sp = add("check-sc", cmd_check_sc, "test the small cancellation condition")
    model_flags(sp, required=False)
    sp.add_argument("--presentation", "-p", help="presentation JSON file")
    sp.add_argument("--lam", default="1/6", help="piece ratio threshold")

    sp = add("estimate", cmd_estimate, "estimate a property over a (k, l, d) grid")
    sp.add_argument("--property", choices=["C16", "shared-prefix", "tree-ball", "lift", "triviality"])
    sp.add_argument("--grid", type=_grid_cell, action="append", help="one cell k,l,d; repeatable")
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--budget", type=_budget_item, action="append", help="key=int; repeatable")
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.add_argument("--strict", action="store_true", help="exit 3 if any trial was undecided")

    sp = add("vkd", cmd_vkd, "reduce, mine or summarise a decorated diagram")
    sp.add_argument("diagram", help="diagram JSON file")
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--reduce", action="store_true")
    mode.add_argument("--mine", type=int, metavar="I")
    mode.add_argument("--stats", action="store_true")

    sp = add("bounds", cmd_bounds, "evaluate a probability or counting bound")
    sp.add_argument("--formula", required=True, choices=["lemma5", "thm23", "thm28", "lemma29", "decay", "constants"])
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--l", type=int)
    sp.add_argument("--d", type=str)
    sp.add_argument("--n", type=int)
    sp.add_argument("--u", type=int, help="component count, or R for the rigid modes")
    sp.add_argument("--mode", default="components", choices=["components", "rigid", "no-isolated"])
    sp.add_argument("--m", type=int)
    sp.add_argument("--S", type=int)
    sp.add_argument("--W", type=int)
    sp.add_argument("--L", type=int)
    sp.add_argument("--r", type=str)
    sp.add_argument("--s", type=int)
    sp.add_argument("--base", type=str)
    sp.add_argument("--q", type=int, default=1)
    sp.add_argument("--l-min", type=int, default=2)
    sp.add_argument("--l-max", type=int, default=200)

    sp = add("lift", cmd_lift, "search a free lift of a solution over a presentation")
    model_flags(sp, required=False)
    sp.add_argument("--presentation", "-p")
    sp.add_argument("--system", required=True, help="one equation per line")
    sp.add_argument("--solution", required=True, help="one word per line, values of y1..yq")
    sp.add_argument("--budget", type=int, default=12)
    sp.add_argument("--strict", action="store_true", help="exit 3 when no lift is found")

    sp = add("count", cmd_count, "exact counts next to their bounds")
    sp.add_argument("what", choices=["cyclic", "trees", "circular"])
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--l", type=int, default=3)
    sp.add_argument("--L", type=int, default=2)
    sp.add_argument("--S", type=int, default=4)
    sp.add_argument("--m", type=int, default=1)
    return parser, subs


def _apply_config(args, sub: argparse.ArgumentParser, argv) -> argparse.Namespace:
    cfg = _load_config(args.config)
    known = {a.dest for a in sub._actions}
    cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    unknown = set(cfg) - known
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    if "grid" in cfg:
        cfg["grid"] = [tuple(g) if not isinstance(g, str) else _grid_cell(g) for g in cfg["grid"]]
    if "budget" in cfg and isinstance(cfg["budget"], dict):
        cfg["budget"] = list(cfg["budget"].items())
    sub.set_defaults(**cfg)
    return sub.parse_args(argv[1:])


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            args = _apply_config(args, subs[args.command], argv)
        return args.func(args)
    except (ConfigError, RandGroupsError, ValueError, KeyError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
