"""Command-line front end: ``tetron code build|verify``, ``tetron schedule``,
``tetron sim capacity|ft`` and ``tetron inject``.

Simulation output is CSV. Every CSV begins with ``#`` metadata lines (the
artifact version and the run config as JSON) and contains nothing that
depends on ``--workers``, so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .decoder import DecoderConfig
from .factory import PickSearchFailed, build_fermion_code
from .fermion import FermionCode, code_from_dict, save_code, verify_code
from .ft import (
    FINAL_ROUND_MODES,
    SequenceError,
    default_sequence,
    inject_single_faults,
    load_sequence,
    run_ft,
    truncated_sequence,
)
from .scheduler import STRATEGIES, save_schedule, schedule, usage_table, verify_schedule
from .sim import NoCrossing, parse_grid, point_dicts, points_to_csv, pseudothreshold, run_capacity

EXIT_OK = 0
EXIT_FAIL = 1  # verification or fault injection failed
EXIT_CONFIG = 2  # bad arguments, unsupported family, pick failure
EXIT_IO = 3  # unreadable or malformed input, unwritable output

SEED_ENV = "TETRON_SEED"
FAMILIES = ("color", "steane", "surface")


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    """Everything that determines a run's output; serialized into metadata."""

    command: str
    code_file: str | None = None
    family: str | None = None
    d: int | None = None
    eta: list[float] = field(default_factory=list)
    p: list[float] = field(default_factory=list)
    trials: int = 0
    seed: int = 0
    decoder: dict = field(default_factory=dict)
    strategy: str = "phased-greedy"
    extra: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def artifact_version() -> str:
    """Package version plus a digest of the module sources."""
    h = hashlib.sha1()
    for src in sorted(Path(__file__).parent.glob("*.py")):
        h.update(src.name.encode())
        h.update(src.read_bytes())
    return f"{__version__}+g{h.hexdigest()[:10]}"


def _default_seed() -> int | None:
    """Seed from the environment; None when it is set but not an integer."""
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError:
        return None


def _load_code(path: str) -> FermionCode:
    try:
        doc = json.loads(Path(path).read_text())
        return code_from_dict(doc, strict=False)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"malformed code file {path}: {exc}") from None


def _code_from_args(args) -> FermionCode:
    if getattr(args, "code", None):
        return _load_code(args.code)
    return build_fermion_code(args.family, args.d, args.pick)


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from None


def _decoder_config(args) -> DecoderConfig:
    return DecoderConfig(
        max_iter=args.bp_iters,
        ms_scaling=args.ms_scaling,
        osd_order=args.osd_order,
        osd_method=args.osd_method,
        bp_method=args.bp_method,
    )


def _sequence_from_args(code: FermionCode, args):
    if args.sequence == "default":
        return default_sequence(code, args.repeats, args.strategy)
    if args.sequence == "truncated":
        return truncated_sequence(code)
    try:
        return load_sequence(code, args.sequence)
    except OSError as exc:
        raise InputError(f"cannot read {args.sequence}: {exc.strerror}") from None
    except (ValueError, KeyError, TypeError) as exc:
        if isinstance(exc, SequenceError):
            raise
        raise InputError(f"malformed sequence file {args.sequence}: {exc}") from None


def _base_config(args, command: str) -> RunConfig:
    return RunConfig(
        command=command,
        code_file=getattr(args, "code", None),
        family=None if getattr(args, "code", None) else args.family,
        d=None if getattr(args, "code", None) else args.d,
    )


def _csv_with_header(cfg: RunConfig, body: str, extra: dict) -> str:
    head = [f"# artifact-version: {artifact_version()}", f"# run-config: {cfg.to_json()}"]
    head += [f"# {k}: {v}" for k, v in extra.items()]
    return "\n".join(head) + "\n" + body


# --- commands -------------------------------------------------------------------


def cmd_code_build(args) -> int:
    code = build_fermion_code(args.family, args.d, args.pick, args.budget)
    if args.out:
        try:
            save_code(code, args.out)
        except OSError as exc:
            raise InputError(f"cannot write {args.out}: {exc.strerror}") from None
    print(code.param_string())
    return EXIT_OK


def cmd_code_verify(args) -> int:
    code = _load_code(args.file)
    report = verify_code(code, args.w_max, args.budget)
    print(code.param_string())
    print("\n".join(report.lines()))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_schedule(args) -> int:
    code = _code_from_args(args)
    sched = schedule(code, args.strategy)
    ok, why = verify_schedule(code, sched)
    if not ok:
        print(f"invalid schedule: {why}", file=sys.stderr)
        return EXIT_FAIL
    if args.out:
        try:
            save_schedule(code, sched, args.out)
        except OSError as exc:
            raise InputError(f"cannot write {args.out}: {exc.strerror}") from None
    print(f"latency {sched.latency}")
    if not args.quiet:
        print(usage_table(code, sched))
    return EXIT_OK


def _report(args, cfg: RunConfig, code: FermionCode, points, extra: dict) -> None:
    seed = cfg.seed
    body = points_to_csv(points, code.family, code.n_tetrons, seed)
    _write(args.out, _csv_with_header(cfg, body, extra))
    if args.json:
        thresholds = {}
        for eta in cfg.eta:
            pts = [pt for pt in points if pt.eta == eta]
            try:
                est = pseudothreshold(pts, strict=True)
                thresholds[repr(eta)] = {"p_star": est.p_star, "method": est.method}
            except (NoCrossing, ValueError):
                thresholds[repr(eta)] = None
        doc = {
            "metadata": {
                "artifact_version": artifact_version(),
                "run_config": asdict(cfg),
                "workers": args.workers,
                **extra,
            },
            "points": point_dicts(points),
            "pseudothresholds": thresholds,
        }
        _write(args.json, json.dumps(doc, indent=1) + "\n")


def _sim_config(args, command: str, decoder: DecoderConfig) -> RunConfig:
    cfg = _base_config(args, command)
    cfg.eta = [float(x) for x in args.eta.split(",") if x]
    cfg.p = parse_grid(args.p)
    cfg.trials = args.trials
    if args.seed is None:
        raise ValueError(f"{SEED_ENV}={os.environ.get(SEED_ENV)!r} is not an integer; pass --seed")
    cfg.seed = args.seed
    cfg.decoder = asdict(decoder)
    cfg.outputs = {"csv": args.out, "json": args.json}
    if not cfg.eta or not cfg.p:
        raise ValueError("empty noise grid")
    if args.trials <= 0:
        raise ValueError("--trials must be positive")
    return cfg


def cmd_sim_capacity(args) -> int:
    code = _code_from_args(args)
    decoder = _decoder_config(args)
    cfg = _sim_config(args, "sim capacity", decoder)
    grid = [(p, eta) for eta in cfg.eta for p in cfg.p]
    points = run_capacity(code, grid, cfg.trials, cfg.seed, decoder, args.workers)
    _report(args, cfg, code, points, {"schedule-latency": schedule(code, cfg.strategy).latency})
    return EXIT_OK


def cmd_sim_ft(args) -> int:
    code = _code_from_args(args)
    decoder = _decoder_config(args)
    cfg = _sim_config(args, "sim ft", decoder)
    cfg.strategy = args.strategy
    seq = _sequence_from_args(code, args)
    cfg.extra = {
        "sequence": args.sequence,
        "repeats": args.repeats,
        "rounds": args.rounds,
        "p_meas_factor": args.p_meas_factor,
        "final_round": args.final_round,
    }
    grid = [(p, eta) for eta in cfg.eta for p in cfg.p]
    points = run_ft(code, seq, args.rounds, grid, cfg.trials, cfg.seed, decoder,
                    args.p_meas_factor, args.workers, args.final_round)
    extra = {
        "schedule-latency": schedule(code, cfg.strategy).latency,
        "sequence-hash": seq.digest(),
    }
    _report(args, cfg, code, points, extra)
    return EXIT_OK


def cmd_inject(args) -> int:
    code = _code_from_args(args)
    seq = _sequence_from_args(code, args)
    report = inject_single_faults(code, seq, args.p, args.eta, _decoder_config(args),
                                  args.p_meas_factor, args.final_round)
    print(f"{code.param_string()} sequence {seq.name} ({seq.n_steps} steps, hash {seq.digest()})")
    print(report.summary())
    if args.list_failures:
        for f in report.failing:
            print("  " + f.describe())
    return EXIT_OK if report.passed else EXIT_FAIL


# --- parser ---------------------------------------------------------------------


def _add_code_source(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("code")
    g.add_argument("--code", metavar="FILE", help="code file written by 'code build'")
    g.add_argument("--family", choices=FAMILIES, default="color", help="code family (default color)")
    g.add_argument("--d", type=int, default=3, help="bosonic distance (default 3)")
    g.add_argument("--pick", choices=("auto", "default"), default="auto",
                   help="pick policy for the R' switch (default auto)")


def _add_decoder(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("decoder")
    d = DecoderConfig()
    g.add_argument("--bp-iters", type=int, default=d.max_iter, help=f"BP iterations (default {d.max_iter})")
    g.add_argument("--osd-order", type=int, default=d.osd_order, help=f"OSD order (default {d.osd_order})")
    g.add_argument("--osd-method", choices=("0", "e", "cs"), default=d.osd_method,
                   help="OSD variant: 0, exhaustive (e) or combination sweep (cs, default)")
    g.add_argument("--bp-method", choices=("min_sum", "product_sum"), default=d.bp_method,
                   help="BP check update (default min_sum)")
    g.add_argument("--ms-scaling", type=float, default=d.ms_scaling,
                   help=f"min-sum scaling factor (default {d.ms_scaling})")


def _add_sim(p: argparse.ArgumentParser, seed: int) -> None:
    g = p.add_argument_group("run")
    g.add_argument("--eta", default="1", help="bias value(s), comma separated (default 1)")
    g.add_argument("--p", default="1e-3:1e-1:21",
                   help="p grid, 'lo:hi:n' log-spaced or a comma list (default 1e-3:1e-1:21)")
    g.add_argument("--trials", type=int, default=100_000, help="trials per point (default 100000)")
    g.add_argument("--seed", type=int, default=seed, help=f"RNG seed (default ${SEED_ENV} or 0)")
    g.add_argument("--workers", type=int, default=1, help="worker processes; output does not depend on it")
    g.add_argument("--out", metavar="CSV", help="CSV output path (default stdout)")
    g.add_argument("--json", metavar="FILE", help="also write a JSON report")


def _add_sequence(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("sequence")
    g.add_argument("--sequence", default="default",
                   help="'default', 'truncated' or a sequence JSON file (default default)")
    g.add_argument("--repeats", type=int, default=3, help="passes of full extraction in the default sequence")
    g.add_argument("--strategy", choices=STRATEGIES, default="phased-greedy", help="scheduling strategy")
    g.add_argument("--p-meas-factor", type=float, default=1.0, help="flip probability is this times p")
    g.add_argument("--final-round", choices=FINAL_ROUND_MODES, default="decode",
                   help="decode the perfect final round jointly (decode) or after (cleanup)")


def build_parser() -> argparse.ArgumentParser:
    seed = _default_seed()
    ap = argparse.ArgumentParser(prog="tetron", description="Majorana fermionic codes on tetrons: build, schedule, simulate.")
    ap.add_argument("--version", action="version", version=artifact_version())
    sub = ap.add_subparsers(dest="command", required=True)

    code = sub.add_parser("code", help="build or verify a code file")
    csub = code.add_subparsers(dest="code_command", required=True)
    b = csub.add_parser("build", help="build a B->F code and print its parameters")
    b.add_argument("--family", choices=FAMILIES, default="color")
    b.add_argument("--d", type=int, default=3)
    b.add_argument("--pick", choices=("auto", "default"), default="auto")
    b.add_argument("--budget", type=int, default=64, help="pick search restarts")
    b.add_argument("--out", metavar="FILE", help="write the code as JSON")
    b.set_defaults(func=cmd_code_build)
    v = csub.add_parser("verify", help="check a code file; nonzero exit on any failure")
    v.add_argument("file")
    v.add_argument("--w-max", type=int, default=0, help="exhaust logicals up to this weight (0 skips)")
    v.add_argument("--budget", type=int, default=20_000_000, help="max supports to enumerate")
    v.set_defaults(func=cmd_code_verify)

    s = sub.add_parser("schedule", help="schedule generator measurements into rounds")
    _add_code_source(s)
    s.add_argument("--strategy", choices=STRATEGIES, default="phased-greedy")
    s.add_argument("--out", metavar="FILE", help="write the schedule as JSON")
    s.add_argument("--quiet", action="store_true", help="print only the latency line")
    s.set_defaults(func=cmd_schedule)

    sim = sub.add_parser("sim", help="Monte Carlo simulations")
    ssub = sim.add_subparsers(dest="sim_command", required=True)
    cap = ssub.add_parser("capacity", help="code-capacity logical error rates")
    _add_code_source(cap)
    _add_sim(cap, seed)
    _add_decoder(cap)
    cap.set_defaults(func=cmd_sim_capacity, strategy="phased-greedy")
    ft = ssub.add_parser("ft", help="phenomenological fault-tolerance runs")
    _add_code_source(ft)
    _add_sim(ft, seed)
    _add_decoder(ft)
    _add_sequence(ft)
    ft.add_argument("--rounds", type=int, default=1, help="repetitions of the whole sequence")
    ft.set_defaults(func=cmd_sim_ft)

    inj = sub.add_parser("inject", help="exhaustive single-fault injection")
    _add_code_source(inj)
    _add_sequence(inj)
    _add_decoder(inj)
    inj.add_argument("--p", type=float, default=0.01, help="p used for decoder priors")
    inj.add_argument("--eta", type=float, default=1.0, help="bias used for decoder priors")
    inj.add_argument("--list-failures", action="store_true", help="print every failing fault")
    inj.set_defaults(func=cmd_inject)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, PickSearchFailed) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
