"""Command-line front end.

Every command reads a JSON config (``--config`` path or inline object) and
prints a JSON result; exact values are ``"p/q"`` strings.  Exit status is 0
on success, 1 on invalid input and 2 when a verification fails.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import bounds, delivery, mismatch, oracle, stochastic
from .errors import InvalidArgumentError, ResourceLimitError, TopoCacheError
from .model import Topology, allocate, format_rational, parse_rational, split_budget
from .placement import Library, build_placement, placement_from_json, placement_to_json, subpacketize

__all__ = ["RunConfig", "run", "main", "build_parser"]

COMMANDS = ("allocate", "place", "deliver", "bound", "verify", "mismatch", "simulate")
DEFAULT_BUDGET = 100_000

EXIT_OK, EXIT_INVALID, EXIT_FAILED = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    config: dict = field(default_factory=dict)
    out: Path | None = None
    seed: int = 0
    budget: int = DEFAULT_BUDGET
    verbose: bool = False
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InvalidArgumentError(f"unknown command {self.command!r}; choose from {', '.join(COMMANDS)}")
        if self.budget < 1:
            raise InvalidArgumentError(f"--budget must be positive, got {self.budget}")
        if not 0 <= self.seed < 2**64:
            raise InvalidArgumentError(f"--seed must be an unsigned 64-bit integer, got {self.seed}")


def _fmt(x: Fraction) -> str:
    return format_rational(x)


def _int_list(value, name: str) -> tuple[int, ...]:
    if isinstance(value, str):
        value = [v for v in value.split(",") if v.strip()]
    try:
        out = tuple(int(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"{name} must be a list of integers, got {value!r}") from exc
    return out


def _topology(cfg: dict) -> Topology:
    if "L" not in cfg:
        raise InvalidArgumentError("config needs an occupancy vector \"L\" (or pass --L 3,2,1)")
    return Topology(_int_list(cfg["L"], "L"))


def _budget_t(cfg: dict) -> Fraction:
    if "t" not in cfg:
        raise InvalidArgumentError("config needs a cache budget \"t\" (or pass --t)")
    return parse_rational(cfg["t"])


def _integer_t(t: Fraction, command: str) -> int:
    if t.denominator != 1:
        raise InvalidArgumentError(f"{command} needs an integer t, got {t}")
    return t.numerator


def _check_size(S: int, budget: int) -> None:
    if S > budget:
        raise ResourceLimitError(f"subpacketization {S} exceeds --budget {budget}; raise --budget to proceed")


def _demand(cfg: dict, occupancy: Sequence[int]) -> tuple[delivery.Demand, int]:
    K = sum(occupancy)
    N = int(cfg.get("N", K))
    if "demand" in cfg:
        dem = delivery.Demand.from_json(cfg["demand"], occupancy)
    else:
        if N < K:
            raise InvalidArgumentError(f"worst-case demands need N >= K, got N={N} < K={K}")
        dem = delivery.Demand.contiguous(occupancy)
    if dem.occupancy != tuple(occupancy):
        raise InvalidArgumentError(f"demand occupancy {list(dem.occupancy)} does not match L={list(occupancy)}")
    if max(dem.d, default=0) > N:
        raise InvalidArgumentError(f"demand requests file {max(dem.d)} but N={N}")
    return dem, N


def _cmd_allocate(rc: RunConfig) -> dict:
    topo = _topology(rc.config)
    t = _integer_t(_budget_t(rc.config), "allocate")
    alloc = allocate(topo, t)
    return {
        "L": list(topo.L),
        "t": t,
        "gamma": [_fmt(g) for g in alloc.gamma],
        "S": subpacketize(topo, t),
    }


def _cmd_place(rc: RunConfig) -> dict:
    topo = _topology(rc.config)
    t = _integer_t(_budget_t(rc.config), "place")
    _check_size(subpacketize(topo, t), rc.budget)
    return placement_to_json(build_placement(topo, t))


def _load_placement(value) -> dict:
    if isinstance(value, str):
        return _read_json(value)
    return value


def _cmd_deliver(rc: RunConfig) -> dict:
    cfg = rc.config
    if "placement" in cfg:
        spec = placement_from_json(_load_placement(cfg["placement"]))
        topo, t = spec.topo, Fraction(spec.t)
    else:
        topo, t = _topology(cfg), _budget_t(cfg)
        topo.check_rational_budget(t)
        spec = None
    dem, N = _demand(cfg, topo.L)
    sub_len = int(cfg.get("subfile_length", 8))
    if t.denominator != 1:
        share = split_budget(t, topo.Lambda)
        S_lo, S_hi = subpacketize(topo, share.floor_budget), subpacketize(topo, share.ceil_budget)
        _check_size(max(S_lo, S_hi), rc.budget)
        # default size splits evenly in both rounds, so no padding is sent
        size = int(cfg.get("file_bytes", sub_len * share.alpha.denominator * math.lcm(S_lo, S_hi)))
        lib = Library.random(N, 1, subfile_length=size, seed=rc.seed)
        rep = delivery.schedule_fractional(topo, t, dem, lib)
        return {
            "num_tx": rep.num_transmissions,
            "S": [s for _, s, _ in rep.rounds],
            "T": _fmt(rep.T),
            "T_realized": _fmt(rep.T_realized),
            "granule": _fmt(rep.granule),
            "decode_ok": rep.all_decoded,
        }
    spec = spec or build_placement(topo, t.numerator)
    _check_size(spec.S, rc.budget)
    lib = Library.random(N, spec.S, subfile_length=sub_len, seed=rc.seed)
    rep = delivery.deliver(spec, dem, lib)
    return {"num_tx": rep.num_transmissions, "S": rep.S, "T": _fmt(rep.T), "decode_ok": rep.all_decoded}


def _cmd_bound(rc: RunConfig) -> dict:
    topo = _topology(rc.config)
    t = topo.check_rational_budget(_budget_t(rc.config))
    gen = bounds.lower_bound_general(topo, t, all_p=bool(rc.options.get("all_p")))
    out = {"t": _fmt(t), "general": _fmt(gen.value), "p": gen.p}
    if t.denominator == 1:
        k = t.numerator
        out["regular"] = _fmt(bounds.lower_bound_regular(topo, k).value)
        out["certificate"] = bounds.optimality_certificate(topo, k)
        out["sequence"] = [_fmt(v) for v in bounds.tau_star_sequence(topo, k)]
    else:
        out["regular"] = None
        out["certificate"] = False
        out["sequence"] = [_fmt(v) for v in gen.sequence]
    out["achievable"] = _fmt(delivery.delivery_time(topo, t))
    return out


def _cmd_verify(rc: RunConfig) -> dict:
    names = rc.options.get("suites") or None
    results = oracle.run_suite(names)
    for r in results:
        line = f"{'PASS' if r.passed else 'FAIL'}  {r.name:<20} {r.detail}"
        print(line, file=sys.stderr)
    payload = {"suites": [{"name": r.name, "passed": r.passed, "detail": r.detail} for r in results]}
    payload["all_passed"] = all(r.passed for r in results)
    return payload


def _cmd_mismatch(rc: RunConfig) -> dict:
    cfg = rc.config
    try:
        Lbar = _int_list(cfg["L_assumed"], "L_assumed")
        L = _int_list(cfg["L_realized"], "L_realized")
        t = _integer_t(parse_rational(cfg["t"]), "mismatch")
    except KeyError as exc:
        raise InvalidArgumentError(f"mismatch config needs {exc.args[0]!r}") from exc
    scn = mismatch.MismatchScenario(Lbar, L, t)
    ach = mismatch.delivery_time_mismatch(scn)
    conv, sigma = mismatch.converse_mismatch(scn, witness=True)
    lead = mismatch.leaders(scn)
    out = {
        "t": scn.t,
        "T_achievable": _fmt(ach),
        "T_converse": _fmt(conv),
        "equal": ach == conv,
        "converse_order": list(sigma),
        "leaders": list(lead.leaders),
        "per_set_leader": {",".join(map(str, Q)): lab for Q, lab in lead.perSetLeader.items()},
    }
    if not rc.options.get("no_decode"):
        S = subpacketize(scn.assumed, scn.t)
        _check_size(S, rc.budget)
        dem = delivery.Demand.contiguous(scn.realized)
        N = max(int(cfg.get("N", scn.K)), scn.K, 1)
        lib = Library.random(N, S, subfile_length=int(cfg.get("subfile_length", 4)), seed=rc.seed)
        _, rep = mismatch.schedule_mismatch(scn, dem, lib)
        out["num_tx"] = rep.num_transmissions
        out["decode_ok"] = rep.all_decoded
    return out


def _parse_budgets(text: str) -> tuple[int, ...]:
    try:
        if ":" in text:
            lo, hi = text.split(":", 1)
            return tuple(range(int(lo), int(hi) + 1))
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise InvalidArgumentError(f"--t expects 'a:b' or a comma list, got {text!r}") from exc


def _cmd_simulate(rc: RunConfig) -> dict:
    cfg, opts = rc.config, rc.options
    means = opts.get("means") or cfg.get("means")
    if means is None:
        raise InvalidArgumentError("simulate needs --means, e.g. --means 20,20,8,6,4,2")
    means = stochastic.parse_means(means) if isinstance(means, str) else tuple(map(parse_rational, means))
    t_range = opts.get("t_range") or cfg.get("t_range")
    budgets = _parse_budgets(t_range) if isinstance(t_range, str) else tuple(t_range or ())
    samples = int(opts.get("samples") or cfg.get("samples", 10_000))
    spec = stochastic.PoissonSpec(means, samples, rc.seed, budgets)
    summary = stochastic.simulate(spec)
    if rc.out is not None:
        csv_path, json_path = stochastic.emit_csv(summary, rc.out)
        return {"csv": str(csv_path), "json": str(json_path), "rows": len(summary.rows)}
    stochastic.write_csv(summary, sys.stdout)
    return {}


HANDLERS = {
    "allocate": _cmd_allocate,
    "place": _cmd_place,
    "deliver": _cmd_deliver,
    "bound": _cmd_bound,
    "verify": _cmd_verify,
    "mismatch": _cmd_mismatch,
    "simulate": _cmd_simulate,
}


def _verdict(command: str, result: dict) -> bool:
    if command == "deliver":
        return result["decode_ok"]
    if command == "verify":
        return result["all_passed"]
    if command == "mismatch":
        return result["equal"] and result.get("decode_ok", True)
    return True


def run(rc: RunConfig) -> int:
    """Execute one command; returns the process exit status."""
    try:
        result = HANDLERS[rc.command](rc)
    except (TopoCacheError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if result:
        text = json.dumps(result, indent=2 if rc.verbose else None)
        print(text)
        if rc.out is not None and rc.command != "simulate":
            try:
                rc.out.write_text(json.dumps(result, indent=2) + "\n")
            except OSError as exc:
                print(f"error: cannot write {rc.out}: {exc.strerror or exc}", file=sys.stderr)
                return EXIT_INVALID
    if not _verdict(rc.command, result):
        print(f"error: {rc.command} verification failed", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def _read_json(source: str) -> dict:
    text = source if source.lstrip().startswith("{") else None
    if text is None:
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise InvalidArgumentError(f"cannot read config {source}: {exc.strerror or exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"malformed JSON in {source[:40]!r}: {exc.msg} at line {exc.lineno}") from exc
    if not isinstance(obj, dict):
        raise InvalidArgumentError("config must be a JSON object")
    return obj


def _add_globals(p: argparse.ArgumentParser, suppress: bool) -> None:
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--config", default=default(None), help="JSON config file or inline JSON object")
    p.add_argument("--out", default=default(None), help="also write the result to this path")
    p.add_argument("--seed", type=int, default=default(0), help="unsigned 64-bit seed")
    p.add_argument("--budget", type=int, default=default(DEFAULT_BUDGET),
                   help="largest subpacketization to materialize")
    p.add_argument("-v", "--verbose", action="store_true", default=default(False))


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the validation status, not argparse's default."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="topocache", description="Shared-cache coded caching toolkit")
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        _add_globals(sp, suppress=True)
        if name in ("allocate", "place", "deliver", "bound"):
            sp.add_argument("--L", help="occupancy vector, e.g. 3,2,1")
            sp.add_argument("--t", help="cache budget, e.g. 2 or 3/2")
        if name == "bound":
            sp.add_argument("--all-p", action="store_true", help="maximize over every p")
        if name == "verify":
            sp.add_argument("--suite", action="append", dest="suites", choices=list(oracle.SUITES))
        if name == "mismatch":
            sp.add_argument("--no-decode", action="store_true", help="skip the byte-level decode check")
        if name == "simulate":
            sp.add_argument("--means", help="Poisson means, e.g. 20,20,8,6,4,2")
            sp.add_argument("--t", dest="t_range", help="budgets as a:b or a comma list")
            sp.add_argument("--samples", type=int)
    return parser


def config_from_args(argv: Sequence[str] | None = None) -> RunConfig:
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    cfg = _read_json(args.pop("config")) if args.get("config") else {}
    args.pop("config", None)
    if args.get("L"):
        cfg["L"] = args["L"]
    if args.get("t"):
        cfg["t"] = args["t"]
    out = args.pop("out")
    return RunConfig(
        command=command,
        config=cfg,
        out=Path(out) if out else None,
        seed=args.pop("seed"),
        budget=args.pop("budget"),
        verbose=args.pop("verbose"),
        options=args,
    )


def main(argv: Sequence[str] | None = None) -> int:
    try:
        rc = config_from_args(argv)
    except SystemExit as exc:
        # usage errors and --help; keep main() returning a status
        return exc.code if isinstance(exc.code, int) else EXIT_INVALID
    except InvalidArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return run(rc)


if __name__ == "__main__":
    sys.exit(main())
