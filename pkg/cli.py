"""dcmlab command-line interface.

Every subcommand reads its inputs from files, writes its outputs to files or standard
out, and logs to standard error. Library errors exit with status 1, usage errors with 2.
"""

import argparse
import json
import sys
from collections.abc import Callable
from pathlib import Path

from config import get_config
from errors import DCMError, UsageError
from harness import (
    DESIGNS,
    REPORT_FORMATS,
    Design,
    build_design,
    design_from_files,
    emit_report,
    load_study_config,
    read_report,
    render_text,
    run_study,
)
from identifiability import THEOREMS, check_identifiability, load_partition
from inference import (
    METHODS,
    estimate_partial_info,
    load_coding,
    load_partitions,
    partitions_document,
    posterior_mean,
    reconstruct_q,
    truncate_classes,
)
from logging_config import get_logger, run_context, setup_logging
from models import AttributeSpace, write_q_matrix
from sampler import FORMATS, PosteriorDraws, SamplerConfig, load_sampler_config, run_chain
from simulation import load_dataset, simulate, write_dataset

log = get_logger("dcmlab")

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _design(args: argparse.Namespace, require_pi: bool = False) -> Design:
    """Built-in design by name, or the design described by --q, --model and --pi."""
    if args.design:
        if args.q or args.model or getattr(args, "pi", None):
            raise UsageError("--design cannot be combined with --q, --model or --pi")
        return build_design(args.design)
    if not (args.q and args.model):
        raise UsageError("give --design or both --q and --model")
    pi = getattr(args, "pi", None)
    if require_pi and pi is None:
        raise UsageError("--pi is required unless --design is given")
    return design_from_files(args.q, args.model, pi)


def _add_design_args(parser: argparse.ArgumentParser, pi_help: str) -> None:
    parser.add_argument("--design", choices=sorted(DESIGNS), help="built-in design")
    parser.add_argument("--model", type=Path, help="model parameter document (JSON)")
    parser.add_argument("--q", type=Path, help="Q-matrix (header-less CSV)")
    parser.add_argument("--pi", type=Path, help=pi_help)


def _print(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _write_json(document: dict, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2) + "\n")


def cmd_check_id(args: argparse.Namespace) -> int:
    design = _design(args)
    partition = load_partition(args.partition) if args.partition else None
    verdicts = check_identifiability(
        args.theorem,
        design.table,
        design.weights,
        design.q,
        design.space,
        partition=partition,
        support_only=args.support_only,
    )
    log.info("identifiability_checked", design=design.name, passed=[v.passed for v in verdicts])
    if args.format == "structured":
        _print(json.dumps({"verdicts": [v.model_dump() for v in verdicts]}, indent=2))
    else:
        _print("\n\n".join(v.render() for v in verdicts))
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    design = _design(args, require_pi=True)
    dataset = simulate(design.table, design.weights, args.n, args.seed)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_dataset(dataset, args.out)
    log.info("dataset_written", path=str(args.out), n=dataset.n, items=dataset.n_items, seed=args.seed)
    return 0


def cmd_fit(args: argparse.Namespace) -> int:
    data = load_dataset(args.data).without_labels()
    config = load_sampler_config(args.config) if args.config else SamplerConfig()
    if args.seed is not None:
        config = config.model_copy(update={"seed": args.seed})
    with run_context(data=str(args.data), seed=config.seed):
        draws = run_chain(data, config)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    draws.save(args.out, args.format)
    log.info("draws_written", path=str(args.out), draws=draws.n_draws)
    if draws.membership is not None:
        counts = " ".join(f"{c + 1}:{int(m)}" for c, m in enumerate(draws.membership) if m)
        _print(f"class membership (final state): {counts}")
    return 0


def _estimate_text(document: dict) -> str:
    estimate, truncation = document["estimate"], document["truncation"]
    items = range(len(estimate["probs"]))
    lines = [
        f"Retained classes: {len(estimate['pi'])} (threshold {truncation['threshold']:.4g})",
        "P(top category) by class and item",
        "class      pi  " + " ".join(f"{j + 1:>6}" for j in items),
    ]
    for a, pi in enumerate(estimate["pi"]):
        success = [item[a][-1] for item in estimate["probs"]]
        lines.append(f"{a + 1:<6}{pi:>7.3f}  " + " ".join(f"{p:>6.3f}" for p in success))
    lines.append("")
    lines.append("Item partitions")
    for j, blocks in enumerate(document["partitions"]):
        lines.append(f"{j + 1:<6}" + " | ".join(",".join(str(c) for c in block) for block in blocks))
    return "\n".join(lines)


def cmd_cluster(args: argparse.Namespace) -> int:
    draws = PosteriorDraws.load(args.draws)
    n = args.n or draws.n_observations
    est = posterior_mean(draws)
    truncation = truncate_classes(est, n)
    kept = est.restrict(truncation.retained)
    partitions = estimate_partial_info(kept, args.method, n)
    document = {
        "method": args.method,
        "truncation": {
            "threshold": truncation.threshold,
            "retained": [a + 1 for a in truncation.retained],
            "discarded_mass": truncation.discarded_mass,
            "discarded_max": truncation.discarded_max,
        },
        "estimate": kept.to_document(),
        "partitions": partitions_document(partitions),
    }
    if args.out:
        _write_json(document, args.out)
    _print(_estimate_text(document))
    return 0


def cmd_reconstruct_q(args: argparse.Namespace) -> int:
    partitions = load_partitions(args.partitions)
    coding = None if args.coding == "auto" else load_coding(args.coding)
    n_attributes = args.attributes
    if n_attributes is None:
        if coding is None:
            raise UsageError("--attributes is required with --coding auto")
        n_attributes = len(next(iter(coding.values())))
    result = reconstruct_q(partitions, AttributeSpace.binary(n_attributes), coding)
    if args.out:
        _write_json(result.to_document(), args.out)
    if args.q_out:
        write_q_matrix(result.q, args.q_out)
    lines = ["Q-matrix"] + [f"{j + 1:<4}{''.join(str(v) for v in row)}" for j, row in enumerate(result.q.to_list())]
    lines += ["", "Coding"] + [f"{c + 1:<4}{''.join(str(v) for v in p)}" for c, p in sorted(result.coding.items())]
    if result.uninformative:
        lines.append(f"uninformative items: {[j + 1 for j in result.uninformative]}")
    _print("\n".join(lines))
    return 0


def cmd_replicate(args: argparse.Namespace) -> int:
    cfg = load_study_config(args.config)
    report = run_study(cfg, workers=args.workers)
    out_dir = args.output_dir or cfg.output_dir or get_config().output_dir / report.design
    written = emit_report(report, out_dir)
    log.info("report_written", files=[str(p) for p in written])
    _print(render_text(report))
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    report = read_report(args.in_dir)
    if args.format == "structured":
        _print(report.model_dump_json(indent=2))
    else:
        _print(render_text(report))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("app:app", host=args.host, port=args.port, log_config=None)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dcmlab", description="Identifiability and nonparametric estimation for diagnostic classification models."
    )
    parser.add_argument(
        "--log-level", type=str.upper, choices=LOG_LEVELS, help="override DCMLAB_LOG_LEVEL"
    )
    parser.add_argument("--json-logs", action="store_true", help="log JSON lines to standard error")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-id", help="check sufficient conditions for identifiability")
    _add_design_args(p, "class weights (JSON); uniform when omitted")
    p.add_argument("--partition", type=Path, help="item partition I_1, I_2, I_3 (JSON)")
    p.add_argument("--theorem", choices=THEOREMS, default="auto")
    p.add_argument("--support-only", action="store_true", help="check on the classes with positive weight")
    p.add_argument("--format", choices=("text", "structured"), default="text")
    p.set_defaults(handler=cmd_check_id)

    p = sub.add_parser("simulate", help="draw a dataset from a design")
    _add_design_args(p, "class weights (JSON)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("fit", help="run the stick-breaking slice sampler")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--config", type=Path, help="sampler config (JSON)")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--format", choices=FORMATS, help="defaults to the --out extension")
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("cluster", help="truncate classes and estimate item partitions")
    p.add_argument("--draws", type=Path, required=True)
    p.add_argument("--n", type=int, help="sample size; defaults to the one recorded with the draws")
    p.add_argument("--method", choices=METHODS, default="cluster")
    p.add_argument("--out", type=Path)
    p.set_defaults(handler=cmd_cluster)

    p = sub.add_parser("reconstruct-q", help="rebuild Q from item partitions")
    p.add_argument("--partitions", type=Path, required=True)
    p.add_argument("--coding", required=True, help="class coding (JSON) or 'auto'")
    p.add_argument("--attributes", type=int, help="number of attributes K")
    p.add_argument("--out", type=Path)
    p.add_argument("--q-out", type=Path, help="also write the Q-matrix as CSV")
    p.set_defaults(handler=cmd_reconstruct_q)

    p = sub.add_parser("replicate", help="run a replication study")
    p.add_argument("--config", type=Path, required=True)
    p.add_argument("--workers", type=int)
    p.add_argument("--output-dir", type=Path)
    p.set_defaults(handler=cmd_replicate)

    p = sub.add_parser("report", help="print a stored study report")
    p.add_argument("--in", dest="in_dir", type=Path, required=True)
    p.add_argument("--format", choices=[f for f in REPORT_FORMATS if f != "both"], default="text")
    p.set_defaults(handler=cmd_report)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(handler=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = get_config()
    setup_logging(json_logs=args.json_logs or config.json_logs, log_level=args.log_level or config.log_level)
    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        return handler(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    except DCMError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
