"""Command-line interface.

Exit codes: 0 success, 1 model/validation/verification failure, 2 I/O or usage error.
Every command that writes ``--out`` also writes ``<out>.manifest.json``;
commands without ``--out`` print their result to stdout and the manifest
to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .belief import filter_trace, parse_trace, uniform_joint_belief
from .errors import (
    BudgetExceededError,
    ImpossibleObservationError,
    ModelParseError,
    ModelValidationError,
)
from .model import Finding, load_model, parse_model, validate_model
from .oracle import OracleConfig, expectimax_value
from .planning import check_convexity, constant_policy, evaluate_policy_known_shift, plan
from .planning.policy import node_budget
from .sim import RNG_ALGORITHM, identification_experiment, monte_carlo_policy_value

log = logging.getLogger("causal_pomdp")

EXIT_OK, EXIT_FAIL, EXIT_IO = 0, 1, 2


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise _Fail(EXIT_IO, f"cannot read {path}: {e.strerror or e}") from None


def _read_json(path):
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise _Fail(EXIT_FAIL, f"{path}: invalid JSON: {e}") from None


def _model(path):
    try:
        return load_model(_read_text(path))
    except (ModelParseError, ModelValidationError) as e:
        raise _Fail(EXIT_FAIL, f"{path}: {e}") from None


def _domains(model, spec):
    try:
        domains = model.domain_set(spec)
    except KeyError as e:
        raise _Fail(EXIT_FAIL, str(e.args[0])) from None
    if not any(d.is_identity for d in domains):
        log.warning("domain set %s does not contain the identity (base) domain", list(domains.names))
    return domains


def _emit(args, command: str, result, started: float, extra=None, seed=None) -> None:
    text = io.dumps(result)
    man = io.manifest(command, _arg_dict(args), args.model, seed=seed, started=started, extra=extra)
    if getattr(args, "out", None):
        io.write_atomic(args.out, text)
        io.write_atomic(str(args.out) + ".manifest.json", io.dumps(man))
    else:
        sys.stdout.write(text)
        sys.stderr.write(io.dumps(man))


def _arg_dict(args) -> dict:
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k != "func"}


# -- commands ----------------------------------------------------------------


def cmd_validate(args) -> int:
    started = time.time()
    text = _read_text(args.model)
    try:
        model = parse_model(json.loads(text))
        findings = validate_model(model)
    except json.JSONDecodeError as e:
        findings = [Finding("$", "schema", f"invalid JSON: {e}")]
    except ModelParseError as e:
        findings = [Finding(e.path, "schema", e.detail)]
    sys.stdout.write(io.dumps([f.to_dict() for f in findings]))
    man = io.manifest("validate", _arg_dict(args), args.model, started=started)
    sys.stderr.write(io.dumps(man))
    return EXIT_OK if not findings else EXIT_FAIL


def cmd_plan(args) -> int:
    started = time.time()
    model = _model(args.model)
    domains = _domains(model, args.domains)
    if args.horizon < 0:
        raise _Fail(EXIT_IO, "--horizon must be >= 0")
    stages = plan(model, domains, args.horizon, prune=args.prune)
    final = stages[-1]
    extra = {"alpha_counts": [len(s) for s in stages]}
    status = EXIT_OK
    if args.check_convexity:
        report = check_convexity(final, args.check_convexity, seed=args.seed)
        extra["convexity"] = report.to_dict()
        if not report.ok:
            log.error("convexity check found %d violations", len(report.violations))
            status = EXIT_FAIL
    if args.stages_out:
        io.write_atomic(args.stages_out, io.dumps(io.plan_to_dict(model, stages)))
    _emit(args, "plan", io.alpha_set_to_dict(model, final), started, extra=extra, seed=args.seed)
    return status


def cmd_filter(args) -> int:
    started = time.time()
    model = _model(args.model)
    domains = _domains(model, args.domains)
    try:
        trace = parse_trace(model, _read_json(args.trace))
    except (KeyError, ValueError) as e:
        raise _Fail(EXIT_FAIL, f"{args.trace}: {e}") from None
    if args.prior:
        b0 = io.load_beliefs([_read_json(args.prior)], model, domains)[0]
    else:
        b0 = uniform_joint_belief(model, domains)
    try:
        beliefs = filter_trace(model, domains, b0, trace)
    except ImpossibleObservationError as e:
        raise _Fail(EXIT_FAIL, f"impossible observation at step {e.step}: {e}") from None
    result = [io.belief_record(k, b) for k, b in enumerate(beliefs)]
    _emit(args, "filter", result, started, extra={"domains": list(domains.names)})
    return EXIT_OK


def cmd_evaluate(args) -> int:
    started = time.time()
    model = _model(args.model)
    try:
        sigma = model.domain_set([args.domain])[0]
    except KeyError as e:
        raise _Fail(EXIT_FAIL, str(e.args[0])) from None
    try:
        policy = io.policy_from_dict(model, _read_json(args.policy), base_dir=Path(args.policy).parent)
    except (KeyError, ValueError) as e:
        raise _Fail(EXIT_FAIL, f"{args.policy}: {e}") from None
    b0 = np.full(model.n_states, 1.0 / model.n_states)
    result = {"domain": sigma.name, "horizon": args.horizon, "exact": None, "monte_carlo": None}
    try:
        result["exact"] = evaluate_policy_known_shift(model, sigma, policy, b0, args.horizon)
    except BudgetExceededError as e:
        if not args.mc:
            raise _Fail(EXIT_FAIL, f"{e}. Re-run with --mc EPISODES") from None
        result["exact_error"] = str(e)
    if args.mc:
        mean, se = monte_carlo_policy_value(model, sigma, policy, args.horizon, args.mc, args.seed)
        result["monte_carlo"] = {
            "mean": mean, "stderr": se, "episodes": args.mc, "seed": args.seed, "rng": RNG_ALGORITHM,
        }
    _emit(args, "evaluate", result, started, seed=args.seed if args.mc else None,
          extra={"node_budget": node_budget(), "exact": result["exact"], "monte_carlo": result["monte_carlo"]})
    return EXIT_OK


def cmd_identify(args) -> int:
    started = time.time()
    model = _model(args.model)
    domains = _domains(model, args.domains)
    if args.true not in domains.names:
        raise _Fail(EXIT_FAIL, f"true domain {args.true!r} is not in {list(domains.names)}")
    if args.policy:
        try:
            policy = io.policy_from_dict(model, _read_json(args.policy), base_dir=Path(args.policy).parent)
        except (KeyError, ValueError) as e:
            raise _Fail(EXIT_FAIL, f"{args.policy}: {e}") from None
    else:
        policy = constant_policy(model)
    report = identification_experiment(
        model, domains, args.true, policy, args.steps, args.episodes, args.seed
    )
    _emit(args, "identify", report.to_dict(), started, seed=args.seed, extra={"rng": RNG_ALGORITHM})
    io.write_atomic(Path(args.out).with_suffix(".csv"), report.to_csv())
    return EXIT_OK


def cmd_oracle(args) -> int:
    started = time.time()
    model = _model(args.model)
    domains = _domains(model, args.domains)
    try:
        beliefs = io.load_beliefs(_read_json(args.beliefs), model, domains)
    except ValueError as e:
        raise _Fail(EXIT_FAIL, f"{args.beliefs}: {e}") from None
    cfg = OracleConfig(max_nodes=node_budget())
    try:
        values = [expectimax_value(model, domains, b, args.horizon, cfg) for b in beliefs]
    except BudgetExceededError as e:
        raise _Fail(EXIT_FAIL, str(e)) from None
    _emit(args, "oracle", {"horizon": args.horizon, "domains": list(domains.names), "values": values}, started)
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="causal-pomdp", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check a model file")
    s.add_argument("model")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("plan", help="alpha-function value iteration")
    s.add_argument("model")
    s.add_argument("--domains", default="all", help="comma-separated names or 'all'")
    s.add_argument("--horizon", type=int, required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--stages-out", help="also write every stage 0..N to this file")
    s.add_argument("--check-convexity", type=int, default=0, metavar="K")
    s.add_argument("--seed", type=int, default=0, help="seed for the convexity samples")
    s.add_argument("--prune", choices=["lp", "pointwise"], default="lp")
    s.set_defaults(func=cmd_plan)

    s = sub.add_parser("filter", help="run the joint state-domain filter on a trace")
    s.add_argument("model")
    s.add_argument("--domains", default="all")
    s.add_argument("--trace", required=True)
    s.add_argument("--prior", help="JSON joint prior (state-major); uniform if omitted")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_filter)

    s = sub.add_parser("evaluate", help="value of a policy under a known domain")
    s.add_argument("model")
    s.add_argument("--policy", required=True)
    s.add_argument("--domain", default="base")
    s.add_argument("--horizon", type=int, required=True)
    s.add_argument("--mc", type=int, metavar="EPISODES", help="also estimate by Monte Carlo")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("identify", help="domain-identification experiment")
    s.add_argument("model")
    s.add_argument("--domains", default="all")
    s.add_argument("--true", required=True, help="name of the generating domain")
    s.add_argument("--policy", help="policy file (default: always the first action)")
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--episodes", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True, help="JSON report; the CSV goes next to it")
    s.set_defaults(func=cmd_identify)

    s = sub.add_parser("oracle", help="brute-force optimal values at given beliefs")
    s.add_argument("model")
    s.add_argument("--domains", default="all")
    s.add_argument("--horizon", type=int, required=True)
    s.add_argument("--beliefs", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    try:
        return args.func(args)
    except _Fail as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
