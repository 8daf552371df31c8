"""Command-line front end.

Exit codes: 0 success, 1 usage or configuration error, 2 the chance
constraint could not be certified (``validate``).  Results are printed as
``key=value`` lines.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .greedy import run_greedy
from .harness import (
    DEFAULT_ALPHAS,
    DEFAULT_DELTAS,
    SweepConfig,
    brute_force_opt,
    emit_csv,
    run_sweep,
    validate_solution,
)
from .objectives import (
    CoverageObjective,
    FormatError,
    InfluenceObjective,
    degree_cost_model,
    load_coverage,
    load_graph,
    sample_live_edges,
)
from .surrogates import ChanceConstraint, SurrogateKind, surrogate_tail
from .theory import k_star
from .weights import ExactTailUnavailable, WeightModel, exact_tail, solution_stats

EXIT_OK, EXIT_USAGE, EXIT_VIOLATED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, (list, tuple)):
        return ",".join(str(v) for v in x)
    return str(x)


def _emit(out, **pairs):
    for k, v in pairs.items():
        print(f"{k}={_fmt(v)}", file=out)


def _add_source(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--graph", help="edge list '<u> <v> <p>' with optional 'n <count>' header")
    g.add_argument("--coverage", help="coverage instance: 'universe <m>' then one element per line")
    p.add_argument("--realizations", type=int, default=100, help="live-edge samples for graphs (default 100)")
    p.add_argument("--seed", type=int, default=0)


def _add_model(p, sweep=False):
    if sweep:
        p.add_argument("--budget", type=_floats)
        p.add_argument("--alpha", type=_floats)
        p.add_argument("--delta", type=_floats)
        p.add_argument("--surrogate")
        p.add_argument("--cost", choices=["uniform", "degree"])
        p.add_argument("--algo", choices=["ga", "gga"])
        p.add_argument("--mc-samples", type=int)
    else:
        p.add_argument("--budget", type=float, required=True)
        p.add_argument("--alpha", type=float, default=0.1)
        p.add_argument("--delta", type=float, default=0.0)
        p.add_argument("--surrogate", default="chernoff-exp", help=", ".join(k.value for k in SurrogateKind))
        p.add_argument("--cost", choices=["uniform", "degree"], default="uniform")
        p.add_argument("--mc-samples", type=int, default=0)
    p.add_argument("--degree-mode", choices=["out", "in", "total"], default="out")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ccsubmod", description="Chance-constrained monotone submodular maximisation")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="run GA or GGA once")
    _add_source(p)
    _add_model(p)
    p.add_argument("--algo", choices=["ga", "gga"], default="ga")
    p.add_argument("--no-lazy", action="store_true", help="evaluate every marginal gain each round")
    p.add_argument("--out", help="write the selection trace as CSV")

    p = sub.add_parser("bounds", help="k* and approximation ratio for i.i.d. weights")
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--budget", type=float, required=True)
    p.add_argument("--surrogate", default="chernoff-simple")

    p = sub.add_parser("sweep", help="alpha x delta sweep, written as CSV")
    _add_source(p)
    _add_model(p, sweep=True)
    p.add_argument("--config", help="key=value file; command-line flags take precedence")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("validate", help="certify a stored solution")
    _add_source(p)
    _add_model(p)
    p.add_argument("--solution", required=True, help="file listing element ids")

    p = sub.add_parser("oracle", help="brute-force optimum for small instances")
    _add_source(p)
    _add_model(p)
    p.add_argument("--exact", action="store_true", help="feasibility by exact tail instead of expected weight")
    return parser


def _load(args):
    """Objective plus graph (or None) from the input flags."""
    if args.realizations < 1:
        raise UsageError("--realizations must be at least 1")
    if args.coverage:
        return CoverageObjective(load_coverage(args.coverage)), None
    g = load_graph(args.graph)
    ens = sample_live_edges(g, args.realizations, args.seed)
    return InfluenceObjective(g, ens), g


def _costs(args, objective, graph):
    if args.cost == "uniform":
        return np.ones(objective.n)
    if graph is None:
        raise UsageError("--cost degree requires --graph")
    return degree_cost_model(graph, args.degree_mode)


def _model_and_cc(args, objective, graph):
    model = WeightModel(_costs(args, objective, graph), args.delta)
    cc = ChanceConstraint(args.budget, args.alpha, SurrogateKind.parse(args.surrogate))
    return model, cc


def cmd_run(args) -> int:
    objective, graph = _load(args)
    model, cc = _model_and_cc(args, objective, graph)
    res = run_greedy(args.algo, objective, model, cc, lazy=not args.no_lazy)
    _emit(
        sys.stdout,
        solution=list(res.solution),
        objective=res.objective,
        items=res.items,
        expected_cost=res.stats.expected_weight,
        bound=res.surrogate.bound,
        feasible=res.surrogate.feasible,
        fallback=res.fallback,
    )
    if args.mc_samples:
        est = validate_solution(res.solution, model, cc, args.mc_samples, args.seed)
        _emit(sys.stdout, violation=est.rate, stderr=est.stderr)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("step,element,gain,bound\n")
            for i, step in enumerate(res.trace):
                fh.write(f"{i},{step.element},{step.gain:.6g},{step.bound:.6g}\n")
    return EXIT_OK


def cmd_bounds(args) -> int:
    if not args.a > 0 or not 0 <= args.delta <= args.a:
        raise UsageError("need a > 0 and 0 <= delta <= a")
    cc = ChanceConstraint(args.budget, args.alpha, SurrogateKind.parse(args.surrogate))
    rep = k_star(args.a, args.delta, cc)
    _emit(
        sys.stdout,
        surrogate=cc.kind.value,
        k_opt=rep.k_opt,
        k_star=rep.k_star,
        epsilon=rep.epsilon_k,
        epsilon_next=rep.epsilon_next,
        ratio=rep.ratio,
    )
    return EXIT_OK


_CONFIG_KEYS = {
    "budget": _floats, "budgets": _floats,
    "alpha": _floats, "alphas": _floats,
    "delta": _floats, "deltas": _floats,
    "surrogate": str, "surrogates": str,
    "cost": str, "algo": str, "algorithm": str,
    "seed": int, "mc_samples": int, "mc-samples": int,
    "realizations": int, "workers": int, "degree_mode": str, "degree-mode": str,
}
_CANONICAL = {
    "budgets": "budget", "alphas": "alpha", "deltas": "delta", "surrogates": "surrogate",
    "algorithm": "algo", "mc-samples": "mc_samples", "degree-mode": "degree_mode",
}


def read_config(path: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            if key not in _CONFIG_KEYS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                out[_CANONICAL.get(key, key)] = _CONFIG_KEYS[key](value)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"{path}:{lineno}: {exc}") from None
    return out


def cmd_sweep(args, argv_flags=()) -> int:
    if args.config:
        for key, value in read_config(args.config).items():
            # explicit command-line flags win over the file
            if key in ("seed", "realizations", "workers", "degree_mode"):
                if f"--{key.replace('_', '-')}" not in argv_flags:
                    setattr(args, key, value)
            elif getattr(args, key) is None:
                setattr(args, key, value)
    surrogates = (args.surrogate or "chernoff-exp,chebyshev").split(",")
    cfg = SweepConfig(
        budgets=tuple(args.budget or (20, 50, 100, 150)),
        alphas=tuple(args.alpha or DEFAULT_ALPHAS),
        deltas=tuple(args.delta or DEFAULT_DELTAS),
        surrogates=tuple(SurrogateKind.parse(s) for s in surrogates if s.strip()),
        cost_mode=args.cost or "uniform",
        algorithm=args.algo or "ga",
        seed=args.seed,
        mc_samples=args.mc_samples or 0,
        degree_mode=args.degree_mode,
    )
    objective, graph = _load(args)
    if cfg.cost_mode == "degree" and graph is None:
        raise UsageError("--cost degree requires --graph")

    def progress(i, total, row):
        print(f"cell {i + 1}/{total} B={row.B:g} alpha={row.alpha:g} delta={row.delta:g} "
              f"{row.surrogate}: items={row.items}", file=sys.stderr)

    rows = run_sweep(cfg, objective, graph, workers=args.workers, progress=progress)
    emit_csv(rows, args.out)
    return EXIT_OK


def _read_solution(path: str) -> list[int]:
    with open(path) as fh:
        text = " ".join(line.split("#", 1)[0] for line in fh)
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError as exc:
        raise UsageError(f"{path}: element ids must be integers ({exc})") from None


def cmd_validate(args) -> int:
    objective, graph = _load(args)
    model, cc = _model_and_cc(args, objective, graph)
    X = _read_solution(args.solution)
    sv = surrogate_tail(X, model, cc)
    stats = solution_stats(X, model)
    _emit(sys.stdout, items=stats.count, expected_cost=stats.expected_weight, bound=sv.bound, certified=sv.feasible)
    try:
        _emit(sys.stdout, exact_tail=exact_tail(stats.count, stats.expected_weight, model.delta, cc.budget))
    except ExactTailUnavailable:
        _emit(sys.stdout, exact_tail="unavailable")
    if args.mc_samples:
        est = validate_solution(X, model, cc, args.mc_samples, args.seed)
        _emit(sys.stdout, violation=est.rate, stderr=est.stderr)
    return EXIT_OK if sv.feasible else EXIT_VIOLATED


def cmd_oracle(args) -> int:
    objective, graph = _load(args)
    model, cc = _model_and_cc(args, objective, graph)
    X, value = brute_force_opt(objective, model, cc, exact=args.exact)
    _emit(sys.stdout, solution=list(X), objective=value, items=len(X),
          expected_cost=solution_stats(X, model).expected_weight)
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "bounds": cmd_bounds,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
    "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "sweep":
            return cmd_sweep(args, argv_flags=[a.split("=", 1)[0] for a in argv])
        return COMMANDS[args.command](args)
    except (UsageError, FormatError, ValueError, IndexError, OSError) as exc:
        print(f"ccsubmod {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
