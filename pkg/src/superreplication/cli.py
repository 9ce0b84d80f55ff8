"""Command-line batch runs: ``superrep {plan,sweep,oracle-check,emulate,metrology}``.

Exit codes: 0 success, 2 domain error, 3 I/O error, 4 internal consistency
failure. Every file written with ``--out`` gets a sibling
``<out>.manifest.json``.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .emulation import (
    QuditEvolution,
    emulate_qubits_from_qudit,
    ladder_spec,
    min_ancilla_count,
)
from .errors import ConsistencyError, DomainError
from .metrology import bulk_state, ghz_state, plus_state, qfi, state_fidelity_under_protocol
from .oracle import DenseState, MAX_TOTAL_QUBITS, choi_overlap_bruteforce, ideal_action
from .protocol import (
    GammaPolicy,
    build_sector_map,
    fidelity_sweep,
    plan_for_budget,
    plan_replication,
    process_fidelity,
    uniform_thetas,
    worst_case_bound,
)

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_IO = 3
EXIT_CONSISTENCY = 4

ORACLE_TOLERANCE = 1e-10
DEFAULT_ORACLE_THETAS = (0.0, 0.3, math.pi / 2, math.pi, 2.5)
SWEEP_COLUMNS = (
    "theta",
    "process_fidelity",
    "average_state_fidelity",
    "bulk_mass",
    "gaussian_bound",
    "triangle_floor",
)


@dataclass
class RunManifest:
    command: str
    parameters: dict
    seed: int
    tool_version: str = __version__
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        return cls(**json.loads(text))


def manifest_path(out: Path) -> Path:
    return out.with_name(out.name + ".manifest.json")


def fmt(x: float) -> str:
    return f"{x:.17g}"


def _emit(text: str, args, command: str) -> None:
    if args.out is None:
        sys.stdout.write(text)
        return
    out = Path(args.out)
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command")}
    manifest = RunManifest(command=command, parameters=params, seed=args.seed)
    with open(out, "w", newline="") as fh:
        fh.write(text)
    with open(manifest_path(out), "w") as fh:
        fh.write(manifest.to_json() + "\n")


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _config_from_args(args):
    if getattr(args, "n", None) is not None:
        return plan_for_budget(args.m, args.n)
    return plan_replication(args.m, args.alpha, args.beta)


def cmd_plan(args) -> int:
    config = plan_replication(args.m, args.alpha, args.beta)
    gauss, floor = worst_case_bound(config)
    report = {
        "m": config.M,
        "n": config.N,
        "alpha": config.alpha,
        "beta": config.beta,
        "k_minus": config.k_minus,
        "k_plus": config.k_plus,
        "clamped": config.clamped,
        "bulk_sector_count": int(config.bulk_sectors.size),
        "bulk_mass": config.bulk_mass,
        "gaussian_figure": gauss,
        "triangle_floor": floor,
    }
    _emit(_json(report), args, "plan")
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = _config_from_args(args)
    thetas = uniform_thetas(args.theta_count)
    reports = fidelity_sweep(config, args.gamma_policy, args.seed, thetas)
    buf = io.StringIO()
    buf.write(",".join(SWEEP_COLUMNS) + "\n")
    for r in reports:
        row = (r.theta, r.process_fidelity, r.average_state_fidelity, r.bulk_mass,
               r.gaussian_bound, r.worst_case_bound)
        buf.write(",".join(fmt(v) for v in row) + "\n")
    _emit(buf.getvalue(), args, "sweep")
    return EXIT_OK


def _parse_thetas(text: str | None):
    if text is None:
        return list(DEFAULT_ORACLE_THETAS)
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise DomainError(f"could not parse --thetas: {exc}") from None


def oracle_grid(max_m: int, max_n: int, thetas, seed: int = 1):
    """Closed form vs statevector over M in 2..max_m, N in 1..max_n, both policies."""
    if max_m < 2 or max_n < 1:
        raise DomainError("need max_m >= 2 and max_n >= 1")
    if max_m + max_n > MAX_TOTAL_QUBITS:
        raise DomainError(f"max_m + max_n must not exceed {MAX_TOTAL_QUBITS}")
    worst = 0.0
    cases = 0
    for M in range(2, max_m + 1):
        for N in range(1, max_n + 1):
            config = plan_for_budget(M, N)
            for policy in GammaPolicy:
                phase_map = build_sector_map(config, policy, seed)
                for t in thetas:
                    closed = process_fidelity(phase_map, t)
                    brute = choi_overlap_bruteforce(config, policy, seed, t)
                    worst = max(worst, abs(closed - brute))
                    cases += 1
    return worst, cases


def cmd_oracle_check(args) -> int:
    thetas = _parse_thetas(args.thetas)
    worst, cases = oracle_grid(args.max_m, args.max_n, thetas, seed=args.seed)
    passed = worst <= ORACLE_TOLERANCE
    report = {
        "max_m": args.max_m,
        "max_n": args.max_n,
        "thetas": thetas,
        "cases": cases,
        "max_abs_deviation": worst,
        "tolerance": ORACLE_TOLERANCE,
        "passed": passed,
    }
    _emit(_json(report), args, "oracle-check")
    return EXIT_OK if passed else EXIT_CONSISTENCY


def cmd_emulate(args) -> int:
    n = args.n
    state = DenseState.random(n, args.seed)
    evolution = QuditEvolution(ladder_spec(n + 1))
    out = emulate_qubits_from_qudit(n, args.theta, state, evolution=evolution)
    direct = ideal_action(state, args.theta)
    report = {
        "n": n,
        "theta": args.theta,
        "qudit_levels": evolution.spec.n,
        "ancilla_qubits": min_ancilla_count(n),
        "v_invocations": evolution.calls,
        "max_abs_deviation": float(np.max(np.abs(out.amplitudes - direct.amplitudes))),
        "fidelity": out.fidelity(direct),
        "identity_deviation": float(np.max(np.abs(out.amplitudes - state.amplitudes))),
    }
    _emit(_json(report), args, "emulate")
    return EXIT_OK


def cmd_metrology(args) -> int:
    config = _config_from_args(args)
    if args.state == "plus":
        state = plus_state(args.m)
    elif args.state == "ghz":
        state = ghz_state(args.m)
    else:
        state = bulk_state(config)
    phase_map = build_sector_map(config, args.gamma_policy, args.seed)
    thetas = uniform_thetas(args.theta_count)
    fids = [state_fidelity_under_protocol(state, phase_map, t) for t in thetas]
    report = {
        "state": args.state,
        "m": args.m,
        "n": config.N,
        "qfi": qfi(state),
        "thetas": [float(t) for t in thetas],
        "state_fidelity": fids,
        "process_fidelity": [process_fidelity(phase_map, t) for t in thetas],
        "min_state_fidelity": min(fids),
    }
    _emit(_json(report), args, "metrology")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="superrep", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, window=True):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="write to PATH (plus PATH.manifest.json)")
        if window:
            p.add_argument("--alpha", type=float, default=1.0)
            p.add_argument("--beta", type=float, default=0.6)

    p = sub.add_parser("plan", help="plan N and the typical window for M copies")
    p.add_argument("--m", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("sweep", help="fidelities on a uniform theta grid, as CSV")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, default=None, help="use the widest window N uses can serve")
    p.add_argument("--gamma-policy", choices=[g.value for g in GammaPolicy], default="random")
    p.add_argument("--theta-count", type=int, default=64)
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle-check", help="closed form vs statevector simulation")
    p.add_argument("--max-m", type=int, default=6)
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--thetas", default=None, help="comma-separated angles in radians")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("emulate", help="n qubit phase gates from one qudit evolution")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--theta", type=float, required=True)
    common(p, window=False)
    p.set_defaults(func=cmd_emulate)

    p = sub.add_parser("metrology", help="QFI and protocol fidelity of a symmetric input")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--state", choices=["plus", "ghz", "bulk"], default="plus")
    p.add_argument("--gamma-policy", choices=[g.value for g in GammaPolicy], default="random")
    p.add_argument("--theta-count", type=int, default=8)
    common(p)
    p.set_defaults(func=cmd_metrology)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ConsistencyError as exc:
        print(f"consistency failure: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
