"""Command-line entry point: ``swbandits <command> ...``.

Exit codes: 0 success, 1 selftest failure, 2 configuration error,
3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .analysis import structure_report
from .config import load_config
from .errors import ConfigurationError, ContractError, ParameterError
from .harness import (
    decimation_step,
    default_jobs,
    regret_csv_text,
    run_replications,
    sweep_csv_text,
    tau_sweep,
)
from .plotting import regret_svg, sweep_svg
from .rewards import load_trajectory
from .selftest import run_selftest

EXIT_OK, EXIT_SELFTEST, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3


def _write(out: Path, name: str, text: str) -> None:
    out.mkdir(parents=True, exist_ok=True)
    with open(out / name, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _report_warnings(cfg) -> None:
    for w in cfg.warnings:
        print(f"warning: {w}", file=sys.stderr)


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    _report_warnings(cfg)
    if not cfg.policies:
        raise ConfigurationError("'policies' is empty; nothing to simulate")
    traj = cfg.trajectory
    aggs = [run_replications(p, traj, cfg.replications, cfg.seed, jobs=args.jobs) for p in cfg.policies]
    out = Path(args.out)
    _write(out, "regret.csv", regret_csv_text(aggs))
    summary = {
        "timestamp": cfg.timestamp,
        "seed": cfg.seed,
        "replications": cfg.replications,
        "n_arms": traj.n_arms,
        "horizon": traj.horizon,
        "trajectory_fingerprint": traj.fingerprint(),
        "policies": [a.summary() for a in aggs],
    }
    _write(out, "summary.json", _dump_json(summary))
    _write(out, "regret.svg", regret_svg(aggs, decimation_step(traj.horizon), cfg.log_scale))
    for agg in aggs:
        print(f"{agg.label}: final regret {agg.final_regret:.2f} +/- {agg.final_stderr:.2f}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    _report_warnings(cfg)
    if not cfg.tau_list:
        raise ConfigurationError("'tau_list' is empty; nothing to sweep")
    traj = cfg.trajectory
    rows = tau_sweep(cfg.sweep_policy, traj, cfg.tau_list, cfg.replications, cfg.seed, jobs=args.jobs)
    out = Path(args.out)
    _write(out, "sweep.csv", sweep_csv_text(rows, traj.n_arms))
    summary = {
        "timestamp": cfg.timestamp,
        "seed": cfg.seed,
        "replications": cfg.replications,
        "sweep_policy": cfg.sweep_policy,
        "trajectory_fingerprint": traj.fingerprint(),
        "rows": [
            {"tau": r.tau, "final_regret": r.final_regret, "stderr": r.stderr, "fingerprint": r.aggregate.fingerprint}
            for r in rows
        ],
    }
    _write(out, "summary.json", _dump_json(summary))
    _write(out, "sweep.svg", sweep_svg(rows, cfg.sweep_policy.get("policy", "")))
    for r in rows:
        print(f"tau={r.tau}: final regret {r.final_regret:.2f} +/- {r.stderr:.2f}")
    return EXIT_OK


def _tau_list(text: str) -> list[int]:
    try:
        taus = [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid tau list {text!r}") from None
    if not taus or min(taus) < 1:
        raise argparse.ArgumentTypeError("tau values must be integers >= 1")
    return taus


def cmd_analyze(args) -> int:
    traj = load_trajectory(args.traj)
    out = Path(args.out)
    for tau in args.tau:
        rep = structure_report(traj, tau, args.delta_prime, args.F, args.beta, args.gamma)
        _write(out, f"report_tau_{tau}.json", _dump_json(rep.to_dict()))
        line = f"tau={tau}: upsilon_T={rep.upsilon_T} |F_tau'|={rep.f_tau_size} delta_tau={rep.delta_tau}"
        if rep.smooth is not None:
            line += f" smooth_gap_ok={rep.to_dict()['assumption_verdicts']['smooth']['gap_bound_holds']}"
        print(line)
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    _report_warnings(cfg)
    traj = cfg.trajectory
    print(f"ok: K={traj.n_arms} T={traj.horizon} family={traj.family.name} "
          f"policies={len(cfg.policies)} tau_list={cfg.tau_list} seed={cfg.seed}")
    return EXIT_OK


def cmd_selftest(args) -> int:
    return run_selftest()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="swbandits", description="Sliding-window Thompson sampling experiments.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--jobs", type=int, default=default_jobs(), help="worker processes (default: logical cores)")
    sub = p.add_subparsers(dest="command", required=True)
    # --jobs is accepted before or after the subcommand name
    jobs = argparse.ArgumentParser(add_help=False)
    jobs.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help=argparse.SUPPRESS)

    s = sub.add_parser("simulate", parents=[jobs], help="run replications of every configured policy")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("sweep", parents=[jobs], help="final regret as a function of the window length")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("analyze", help="structural quantities of a trajectory file")
    s.add_argument("--traj", required=True, help="trajectory CSV (with its .json sidecar)")
    s.add_argument("--tau", required=True, type=_tau_list, help="comma-separated window lengths")
    s.add_argument("--delta-prime", type=float, default=None)
    s.add_argument("--F", type=float, default=None, help="cap constant for |F_{delta',T}| <= F T^beta")
    s.add_argument("--beta", type=float, default=None)
    s.add_argument("--gamma", type=float, default=1.0, help="gamma used in the Gaussian bound shapes")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("validate", help="check a configuration without running it")
    s.add_argument("--config", required=True)
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("selftest", help="fast invariant checks")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")
    try:
        return args.func(args)
    except (ConfigurationError, ParameterError, ContractError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
