"""
Command-line front end.

    python -m app.cli merge a.txt b.txt --out universal.txt
    python -m app.cli retrieve --network universal.txt --goal "potato{mashed}" \\
        --kitchen kitchen.txt --profile nao.json --m 1
    python -m app.cli sweep ... --max-m 5
    python -m app.cli simulate ... --trials 10000 --seed 7
    python -m app.cli simulate --plan plan.json --trials 10000
    python -m app.cli export --what tree ... --format dot

Results go to stdout (or ``--out``); diagnostics go to stderr through loguru.
Exit codes: 0 ok, 2 usage, 3 parse, 4 merge, 5 goal not producible,
6 expansion limit, 7 no executable tree, 8 greedy planning failure,
9 invalid M or underflowing success, 10 M exceeds all tree lengths.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from loguru import logger
from pydantic import BaseModel, Field, ValidationError, model_validator

from .agents.graph import run_planning
from .core.config import get_settings
from .core.errors import FoonError, NoExecutableTree, ParseError
from .models.documents import NetworkDocument, PlanDocument
from .models.foon import UniversalFoon
from .models.plan import DelegationPlan, ExpansionLimits
from .services.collaboration import describe_plan, joint_success, rank_trees, sweep
from .services.exporter import (
    dump_document,
    foon_from_document,
    load_document,
    network_document,
    network_graph,
    plan_document,
    plan_from_document,
    plan_graph,
    simulation_document,
    to_dot,
)
from .services.foon_parser import (
    parse_object_spec,
    read_kitchen_file,
    read_profile_file,
    read_subgraph_file,
    write_subgraph,
)
from .services.network import merge, network_to_subgraph
from .services.retrieval import retrieve_all, tree_metrics
from .services.simulation import failure_report, simulate

USAGE_ERROR = 2


class PlanRequest(BaseModel):
    goal: str = Field(min_length=1)
    kitchen: Path
    profile: Optional[Path] = None
    network: Optional[Path] = None
    subgraphs: List[Path] = Field(default_factory=list)
    m: Optional[int] = Field(None, ge=0)
    epsilon: Optional[float] = Field(None, gt=0)
    max_nodes: Optional[int] = Field(None, ge=1)
    max_children: Optional[int] = Field(None, ge=1)
    strategy: str = "exhaustive"

    @model_validator(mode="after")
    def _one_network_source(self) -> "PlanRequest":
        if self.network is None and not self.subgraphs:
            raise ValueError("give --network or at least one --subgraph")
        if self.network is not None and self.subgraphs:
            raise ValueError("--network and --subgraph are mutually exclusive")
        return self

    @property
    def limits(self) -> ExpansionLimits:
        return ExpansionLimits.from_settings(
            get_settings(), max_nodes=self.max_nodes, max_children=self.max_children
        )


def _load_network(path: Path) -> UniversalFoon:
    path = Path(path)
    if path.suffix == ".json":
        doc = load_document(path.read_text(encoding="utf-8"))
        if not isinstance(doc, NetworkDocument):
            raise ParseError(f"expected a network document, got kind '{doc.kind}'")
        return foon_from_document(doc)
    return merge([read_subgraph_file(path)])


def _network(request: PlanRequest) -> UniversalFoon:
    if request.network is not None:
        return _load_network(request.network)
    return merge([read_subgraph_file(p) for p in request.subgraphs])


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
    logger.info(f"Wrote {out}")


def _request(args: argparse.Namespace) -> PlanRequest:
    return PlanRequest(
        goal=args.goal,
        kitchen=args.kitchen,
        profile=getattr(args, "profile", None),
        network=args.network,
        subgraphs=args.subgraph or [],
        m=getattr(args, "m", None),
        epsilon=getattr(args, "epsilon", None),
        max_nodes=args.max_nodes,
        max_children=args.max_children,
        strategy=getattr(args, "strategy", "exhaustive"),
    )


def _plan(request: PlanRequest, trials: int = 0, seed: Optional[int] = None, workers: Optional[int] = None):
    if request.profile is None:
        raise ValueError("a robot profile (--profile) is required for this command")
    return run_planning(
        _network(request),
        parse_object_spec(request.goal),
        read_kitchen_file(request.kitchen),
        read_profile_file(request.profile),
        m=request.m,
        epsilon=request.epsilon,
        limits=request.limits,
        strategy=request.strategy,
        trials=trials,
        seed=seed,
        workers=workers,
    )


def cmd_merge(args: argparse.Namespace) -> int:
    paths = list(args.paths) + list(args.subgraph or [])
    if not paths:
        logger.error("merge needs at least one subgraph file")
        return USAGE_ERROR
    if args.out is None:
        logger.error("merge needs --out")
        return USAGE_ERROR
    subgraphs = [read_subgraph_file(p) for p in paths]
    foon = merge(subgraphs)
    if args.out.suffix == ".json":
        text = dump_document(network_document(foon))
    else:
        text = write_subgraph(network_to_subgraph(foon))
    _emit(text, args.out)
    sys.stdout.write(f"{sum(len(sg.units) for sg in subgraphs)} units in, {len(foon)} after merge\n")
    return 0


def cmd_retrieve(args: argparse.Namespace) -> int:
    state = _plan(_request(args))
    best = state["best"]
    plan = best.plan
    profile_name = state["profile"].name
    if args.format == "structured":
        doc = plan_document(plan, profile_name, best.co_optimal, state["chosen_by"])
        _emit(dump_document(doc), args.out)
        return 0

    lines = [
        f"Goal: {plan.tree.goal}",
        f"Robot: {profile_name}  M={state['chosen_m']} ({state['chosen_by']})  trees considered: {len(state['trees'])}",
        *describe_plan(plan),
        f"Total success: {plan.total_success:.2%} ({plan.total_success:.10g})",
    ]
    if len(best.co_optimal) > 1:
        lines.append("Co-optimal: " + "; ".join(str(list(p.tree.ids)) for p in best.co_optimal))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_enumerate(args: argparse.Namespace) -> int:
    request = _request(args)
    trees = retrieve_all(
        _network(request),
        parse_object_spec(request.goal),
        read_kitchen_file(request.kitchen),
        request.limits,
    )
    if not trees:
        raise NoExecutableTree(f"no executable tree for {request.goal} with this kitchen")
    profile = read_profile_file(request.profile) if request.profile else None
    if args.sort == "success" and profile is None:
        raise ValueError("--sort success needs --profile")
    if args.sort != "none":
        trees = rank_trees(trees, profile, by=args.sort)

    header = "unit_ids\tlength\tdepth" + ("\tsuccess" if profile else "")
    rows = [header]
    for tree in trees:
        metrics = tree_metrics(tree)
        row = f"{','.join(str(i) for i in metrics.unit_ids)}\t{metrics.length}\t{metrics.depth}"
        if profile:
            row += f"\t{joint_success(tree, profile):.10g}"
        rows.append(row)
    _emit("\n".join(rows) + "\n", args.out)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    request = _request(args)
    if request.profile is None:
        raise ValueError("a robot profile (--profile) is required for this command")
    trees = retrieve_all(
        _network(request),
        parse_object_spec(request.goal),
        read_kitchen_file(request.kitchen),
        request.limits,
    )
    if not trees:
        raise NoExecutableTree(f"no executable tree for {request.goal} with this kitchen")
    report = sweep(trees, read_profile_file(request.profile), args.max_m)
    _emit(report.to_table(), args.out)
    return 0


def _saved_plan(path: Path) -> DelegationPlan:
    doc = load_document(Path(path).read_text(encoding="utf-8"))
    if not isinstance(doc, PlanDocument):
        raise ParseError(f"expected a plan document, got kind '{doc.kind}'")
    return plan_from_document(doc)


def cmd_simulate(args: argparse.Namespace) -> int:
    settings = get_settings()
    trials = args.trials if args.trials is not None else settings.trials
    if trials < 1:
        raise ValueError(f"--trials must be at least 1, got {trials}")
    if args.plan is not None:
        plan = _saved_plan(args.plan)
        result = simulate(plan, trials=trials, seed=args.seed, workers=args.workers)
        failures = failure_report(result)
    else:
        state = _plan(_request(args), trials=trials, seed=args.seed, workers=args.workers)
        plan, result, failures = state["best"].plan, state["simulation"], state["failures"]
    if args.format == "structured":
        _emit(dump_document(simulation_document(plan, result, failures)), args.out)
        return 0

    lines = [
        f"Goal: {plan.tree.goal}  M={plan.m}  units {list(plan.tree.ids)}",
        f"Trials: {result.trials}  seed: {result.seed}",
        f"Successes: {result.successes}",
        f"Empirical rate: {result.empirical_rate:.6f}",
        f"Analytic rate: {result.analytic_rate:.6f} (standard error {result.standard_error:.6f})",
    ]
    if failures:
        lines.append("Failures by unit:")
        lines += [f"  unit {f.unit_id} ({f.motion}): {f.failures} ({f.share:.1%})" for f in failures]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    if args.what == "network":
        if args.network is None and not args.subgraph:
            logger.error("export needs --network or --subgraph")
            return USAGE_ERROR
        foon = _load_network(args.network) if args.network else merge([read_subgraph_file(p) for p in args.subgraph])
        if args.format == "dot":
            _emit(to_dot(network_graph(foon), name="universal"), args.out)
        else:
            _emit(dump_document(network_document(foon)), args.out)
        return 0

    state = _plan(_request(args))
    best = state["best"]
    if args.format == "dot":
        _emit(to_dot(plan_graph(best.plan), name=str(best.plan.tree.goal)), args.out)
    else:
        profile_name = state["profile"].name
        _emit(dump_document(plan_document(best.plan, profile_name, best.co_optimal, state["chosen_by"])), args.out)
    return 0


def _common(parser: argparse.ArgumentParser, planning: bool = True) -> None:
    parser.add_argument("--network", type=Path, help="merged network (.txt subgraph form or .json document)")
    parser.add_argument("--subgraph", type=Path, action="append", help="subgraph file; repeat to merge several")
    parser.add_argument("--out", type=Path)
    parser.add_argument("--log-level", dest="log_level")
    if not planning:
        return
    parser.add_argument("--goal", help="label{states}[ingredients]")
    parser.add_argument("--kitchen", type=Path)
    parser.add_argument("--profile", type=Path)
    parser.add_argument("--max-nodes", dest="max_nodes", type=int)
    parser.add_argument("--max-children", dest="max_children", type=int)


def _delegation(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--m", type=int, help="steps handed to the assistant; optimal M when omitted")
    parser.add_argument("--epsilon", type=float, help="minimum gain per extra delegated step")
    parser.add_argument("--strategy", choices=["exhaustive", "greedy"], default="exhaustive")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="foon-planner", description="FOON task-tree retrieval and human-robot delegation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("merge", help="merge subgraph files into a universal network")
    p.add_argument("paths", nargs="*", type=Path)
    _common(p, planning=False)
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("retrieve", help="best delegation plan for a goal")
    _common(p)
    _delegation(p)
    p.add_argument("--format", choices=["text", "structured"], default="text")
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("enumerate", help="list every executable task tree")
    _common(p)
    p.add_argument("--sort", choices=["none", "success", "length"], default="none")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("sweep", help="best joint success for M = 0..max-m")
    _common(p)
    p.add_argument("--max-m", dest="max_m", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="Monte Carlo run of the chosen plan")
    _common(p)
    _delegation(p)
    p.add_argument("--plan", type=Path, help="simulate a saved plan document instead of planning")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--format", choices=["text", "structured"], default="text")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("export", help="graph or structured export of the network or a plan")
    _common(p)
    _delegation(p)
    p.add_argument("--what", choices=["network", "tree"], default="network")
    p.add_argument("--format", choices=["dot", "structured"], default="dot")
    p.set_defaults(func=cmd_export)

    return parser


def _configure_logging(level: Optional[str]) -> None:
    logger.remove()
    logger.add(sys.stderr, level=(level or get_settings().log_level).upper(), format="{level}: {message}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.log_level)
    try:
        return args.func(args)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first["loc"])
        logger.error(f"invalid arguments: {where + ': ' if where else ''}{first['msg']}")
        return USAGE_ERROR
    except FoonError as e:
        logger.error(str(e))
        return e.exit_code
    except OSError as e:
        logger.error(f"cannot read or write {e.filename}: {e.strerror}")
        return 3
    except ValueError as e:
        logger.error(str(e))
        return USAGE_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
