"""Command-line front end.

Subcommands:
    table     crossover fidelity and optimal attack parameters per dimension
    report    crossover vs local-realism thresholds per dimension
    simulate  run protocol rounds from a JSON config file
    classes   invariance classes of the amplitude matrix for given angles
    overlap   a single Bell-family overlap, both evaluation modes

Machine-readable output is wrapped in an envelope with schema_version
"1"; CSV output carries the same tag in a leading comment line.  Floats
in tabular output are printed with 6 significant digits; JSON keeps
full precision so that payloads round-trip.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Any, Sequence

from .bell import BellIndex, bell_overlap
from .cloner import CloneParams, invariance_classes
from .info import i_ab
from .qudit import optimal_angles
from .sim import ProtocolConfig, run_simulation
from .thresholds import security_report

SCHEMA_VERSION = "1"
N_CAP = 16


class CliError(ValueError):
    pass


def _parse_range(text: str) -> tuple[int, int]:
    try:
        if ".." in text:
            lo_s, hi_s = text.split("..", 1)
            lo, hi = int(lo_s), int(hi_s)
        else:
            lo = hi = int(text)
    except ValueError:
        raise CliError(f"--n expects an int or lo..hi range, got {text!r}") from None
    if not 2 <= lo <= hi <= N_CAP:
        raise CliError(f"--n must satisfy 2 <= lo <= hi <= {N_CAP}, got {text!r}")
    return lo, hi


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _fmt_complex(z: complex) -> str:
    return f"{z.real:.6g}{z.imag:+.6g}j"


def _envelope(command: str, payload: Any) -> dict[str, Any]:
    return {"schema_version": SCHEMA_VERSION, "command": command, "payload": payload}


def _emit_rows(command: str, header: list[str], rows: list[list[Any]], fmt: str) -> None:
    if fmt == "json":
        payload = {"rows": [dict(zip(header, row)) for row in rows]}
        print(json.dumps(_envelope(command, payload), indent=2))
        return
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    sys.stdout.write(f"# schema_version={SCHEMA_VERSION} command={command}\n")
    sys.stdout.write(buf.getvalue())


def cmd_table(args: argparse.Namespace) -> int:
    lo, hi = _parse_range(args.n)
    rows = []
    for rec in security_report(lo, hi):
        params = CloneParams(rec.n, rec.v, rec.x, rec.y)
        rows.append([rec.n, rec.f_a, rec.v, rec.x, rec.y, i_ab(params)])
    _emit_rows("table", ["n", "f_a", "v", "x", "y", "mutual_info_bits"], rows, args.format)
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    lo, hi = _parse_range(args.n)
    rows = []
    for rec in security_report(lo, hi):
        rows.append(
            [rec.n, rec.f_a, rec.v_thr, rec.f_thr, 1.0 - rec.f_thr, rec.secure_iff_nonlocal]
        )
    header = ["n", "f_a", "v_thr", "f_thr", "error_rate_thr", "sufficient"]
    _emit_rows("report", header, rows, args.format)
    return 0


def _collect_angles(n: int, phis: Sequence[float], indices: Sequence[int]) -> list[float]:
    angles = [float(p) for p in phis]
    table = optimal_angles(n)
    for i in indices:
        if i not in (0, 1, 2, 3):
            raise CliError(f"--phi-index must be in 0..3, got {i}")
        angles.append(float(table[i]))
    return angles


def cmd_classes(args: argparse.Namespace) -> int:
    if not 2 <= args.n <= N_CAP:
        raise CliError(f"--n must satisfy 2 <= n <= {N_CAP}, got {args.n}")
    angles = _collect_angles(args.n, args.phi or [], args.phi_index or [])
    if len(angles) < 2:
        raise CliError("need at least two angles (--phi / --phi-index)")
    partition = invariance_classes(args.n, angles)
    classes = partition.sorted_classes()
    if args.format == "json":
        payload = {
            "n": args.n,
            "angles": angles,
            "count": len(classes),
            "classes": [[list(cell) for cell in cls] for cls in classes],
        }
        print(json.dumps(_envelope("classes", payload), indent=2))
        return 0
    angle_text = ",".join(_fmt(a) for a in angles)
    print(f"n={args.n} angles={angle_text} classes={len(classes)}")
    for ci, cls in enumerate(classes):
        members = " ".join(f"({m},{nn})" for m, nn in cls)
        print(f"class {ci}: {members}")
    return 0


def _parse_indices(text: str) -> tuple[int, int, int, int]:
    parts = text.split(",")
    if len(parts) != 4:
        raise CliError(f"--idx expects i,j,k,l with four ints, got {text!r}")
    try:
        i, j, k, l = (int(p) for p in parts)
    except ValueError:
        raise CliError(f"--idx expects i,j,k,l with four ints, got {text!r}") from None
    return i, j, k, l


def _pick_angle(n: int, value: float | None, index: int | None, flag: str) -> float:
    if (value is None) == (index is None):
        raise CliError(f"give exactly one of {flag} or {flag}-index")
    if value is not None:
        return float(value)
    if index not in (0, 1, 2, 3):
        raise CliError(f"{flag}-index must be in 0..3, got {index}")
    return float(optimal_angles(n)[index])


def cmd_overlap(args: argparse.Namespace) -> int:
    if not 2 <= args.n <= N_CAP:
        raise CliError(f"--n must satisfy 2 <= n <= {N_CAP}, got {args.n}")
    phi1 = _pick_angle(args.n, args.phi1, args.phi1_index, "--phi1")
    phi2 = _pick_angle(args.n, args.phi2, args.phi2_index, "--phi2")
    i, j, k, l = _parse_indices(args.idx)
    idx1 = BellIndex(i, j, args.variant)
    idx2 = BellIndex(k, l, args.variant)
    closed = bell_overlap(args.n, phi1, phi2, idx1, idx2, mode="closed_form")
    brute = bell_overlap(args.n, phi1, phi2, idx1, idx2, mode="brute_force")
    if args.format == "json":
        payload = {
            "n": args.n,
            "phi1": phi1,
            "phi2": phi2,
            "indices": [i, j, k, l],
            "variant": args.variant,
            "closed_form": {"re": closed.real, "im": closed.imag},
            "brute_force": {"re": brute.real, "im": brute.imag},
        }
        print(json.dumps(_envelope("overlap", payload), indent=2))
        return 0
    print(f"closed_form={_fmt_complex(closed)} brute_force={_fmt_complex(brute)}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    if not os.path.exists(args.config):
        raise CliError(f"config file not found: {args.config}")
    with open(args.config, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    env_seed = os.environ.get("NDEB_SEED")
    if env_seed is not None:
        try:
            raw["seed"] = int(env_seed)
        except ValueError:
            raise CliError(f"NDEB_SEED must be an int, got {env_seed!r}") from None
    cfg = ProtocolConfig.from_dict(raw)
    report = run_simulation(cfg, shards=args.shards)
    record = _envelope("simulate", report.to_dict())
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(record, fh, indent=2)
        fh.write("\n")
    print(
        f"sifted_fraction={report.sifted_fraction:.6g} "
        f"qber={report.qber:.6g} stderr={report.qber_stderr:.6g}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ndeb",
        description="N-level entanglement-based QKD: attacks, thresholds, simulation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_table = sub.add_parser("table", help="crossover fidelities per dimension")
    p_table.add_argument("--n", required=True, help="dimension or lo..hi range")
    p_table.add_argument("--format", choices=("csv", "json"), default="csv")
    p_table.set_defaults(func=cmd_table)

    p_report = sub.add_parser("report", help="crossover vs local-realism thresholds")
    p_report.add_argument("--n", required=True, help="dimension or lo..hi range")
    p_report.add_argument("--format", choices=("csv", "json"), default="csv")
    p_report.set_defaults(func=cmd_report)

    p_sim = sub.add_parser("simulate", help="run protocol rounds from a config file")
    p_sim.add_argument("config", help="JSON config path")
    p_sim.add_argument("out", help="output report path (JSON)")
    p_sim.add_argument("--shards", type=int, default=1, help="processing chunks")
    p_sim.set_defaults(func=cmd_simulate)

    p_cls = sub.add_parser("classes", help="invariance classes for given angles")
    p_cls.add_argument("--n", type=int, required=True)
    p_cls.add_argument("--phi", type=float, action="append", help="angle in radians")
    p_cls.add_argument(
        "--phi-index", type=int, action="append", help="optimal-basis index 0..3"
    )
    p_cls.add_argument("--format", choices=("text", "json"), default="text")
    p_cls.set_defaults(func=cmd_classes)

    p_ov = sub.add_parser("overlap", help="one Bell-family overlap, both modes")
    p_ov.add_argument("--n", type=int, required=True)
    p_ov.add_argument("--phi1", type=float, default=None, help="first angle in radians")
    p_ov.add_argument("--phi2", type=float, default=None, help="second angle in radians")
    p_ov.add_argument("--phi1-index", type=int, default=None)
    p_ov.add_argument("--phi2-index", type=int, default=None)
    p_ov.add_argument("--idx", required=True, help="i,j,k,l")
    p_ov.add_argument("--variant", choices=("RA", "BC"), default="RA")
    p_ov.add_argument("--format", choices=("text", "json"), default="text")
    p_ov.set_defaults(func=cmd_overlap)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
