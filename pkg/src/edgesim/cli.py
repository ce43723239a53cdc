"""Command-line entry point: ``edgesim simulate|compare|validate-config|advise``.

Exit codes: 0 success, 1 usage error, 2 invalid configuration,
3 simulation diverged from the closed-form model.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from edgesim import advisor, config as config_io
from edgesim.model import MODELS, ParameterError
from edgesim.sim import ConsistencyError
from edgesim.sweep import GridMismatchError, compare, emit, load_results, parse_alpha_mode, run_sweep

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_CONSISTENCY = 0, 1, 2, 3
SEED_ENV = "EDGESIM_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="edgesim", description="Fog / 5G MEC / hybrid edge latency simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="run the volume sweep and write results")
    sim.add_argument("--model", choices=MODELS + ("all",), default=None)
    sim.add_argument("--sweep-start", type=float, default=None, metavar="MB")
    sim.add_argument("--sweep-end", type=float, default=None, metavar="MB")
    sim.add_argument("--sweep-step", type=float, default=None, metavar="MB")
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--alpha-mode", default=None, help="sampled | midpoint | fixed=<v>")
    sim.add_argument("--repetitions", type=int, default=None)
    sim.add_argument("--format", choices=("csv", "json"), default="csv")
    sim.add_argument("--out", required=True)
    sim.add_argument("--config", default=None)

    cmp_ = sub.add_parser("compare", help="comparison metrics from a results file")
    cmp_.add_argument("--in", dest="inp", required=True)
    cmp_.add_argument("--out", required=True)

    val = sub.add_parser("validate-config", help="check a config file")
    val.add_argument("--config", required=True)
    val.add_argument("--explain", action="store_true", help="list every value with its provenance")

    adv = sub.add_parser("advise", help="recommend a deployment composition")
    group = adv.add_mutually_exclusive_group(required=True)
    group.add_argument("--use-case", choices=sorted(advisor.USE_CASES))
    group.add_argument("--profile", help="JSON file with a requirement profile")
    return parser


def _sweep_from_args(args, doc):
    sweep = doc.sweep
    changes = {}
    if args.model is not None:
        changes["models"] = MODELS if args.model == "all" else (args.model,)
    for flag, key in (("sweep_start", "start_mb"), ("sweep_end", "end_mb"), ("sweep_step", "step_mb")):
        if getattr(args, flag) is not None:
            changes[key] = getattr(args, flag)
    if args.alpha_mode is not None:
        try:
            parse_alpha_mode(args.alpha_mode)
        except ParameterError as exc:
            raise UsageError(str(exc)) from None
        changes["alpha_mode"] = args.alpha_mode
    if args.repetitions is not None:
        changes["repetitions"] = args.repetitions
    if args.seed is not None:
        changes["seed"] = args.seed
    elif os.environ.get(SEED_ENV):
        try:
            changes["seed"] = int(os.environ[SEED_ENV])
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {os.environ[SEED_ENV]!r}") from None
    try:
        return replace(sweep, **changes)
    except ParameterError as exc:
        raise UsageError(str(exc)) from None


def cmd_simulate(args) -> int:
    doc = config_io.load(args.config) if args.config else config_io.defaults()
    sweep_cfg = _sweep_from_args(args, doc)
    result = run_sweep(sweep_cfg, doc.scenarios, doc.policies)
    metrics = compare(result) if args.format == "json" else None
    emit(result, metrics, args.format, args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    result = load_results(args.inp)
    metrics = compare(result)
    text = json.dumps(metrics.to_dict(), indent=2) + "\n"
    try:
        Path(args.out).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write metrics to {args.out}: {exc.strerror or exc}") from exc
    return EXIT_OK


def cmd_validate(args) -> int:
    doc = config_io.load(args.config)
    if args.explain:
        print("\n".join(doc.explain()))
    else:
        print(f"{args.config}: ok")
    return EXIT_OK


def cmd_advise(args) -> int:
    if args.use_case:
        comp = advisor.recommend(args.use_case)
        name = args.use_case
    else:
        try:
            data = json.loads(Path(args.profile).read_text(encoding="utf-8"))
            profile = advisor.UseCaseProfile.from_dict(data)
        except (OSError, ValueError) as exc:
            raise config_io.ConfigError(args.profile, str(exc)) from None
        comp = advisor.recommend(profile)
        name = profile.name
    print(json.dumps({"use_case": name, **comp.to_dict()}, indent=2))
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "validate-config": cmd_validate,
    "advise": cmd_advise,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"edgesim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (config_io.ConfigError, ParameterError) as exc:
        print(f"edgesim: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConsistencyError as exc:
        print(f"edgesim: internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except (OSError, GridMismatchError, ValueError) as exc:
        print(f"edgesim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
