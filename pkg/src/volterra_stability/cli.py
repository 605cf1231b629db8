"""Command-line surface: simulate, roots, certify, reproduce-paper.

Outputs carry no timestamps and are byte-identical across repeated runs on
the same inputs.  Exit codes: 0 success, 1 reference-value mismatch in
reproduce-paper, 2 usage or kernel-parse errors, 3 root-finding
non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys

from .certify import Report, certify, report_to_dict
from .charfun import NonConvergence, pn_roots
from .fixtures import fixture_names, load_fixture
from .kernel import KernelFormatError, KernelSpec, load_kernel, tail_abs_sum
from .simulate import solve, solve_fast, trajectory_to_csv

_TABLE_R = {4: 0.913, 5: 0.781, 6: 0.667}
_TABLE_L = {4: 0.24716, 5: 0.04963, 6: 0.00024}
_R_TOL = 5e-4
_L_TOL = 5e-6

# fixture -> (verdict, criterion, rigor)
_EXPECTED_FINALS = {
    "renewal": ("asymptotically_stable", "EFP", "rigorous"),
    "small_radius_unstable": ("unstable", "Empirical", "empirical"),
    "geometric_null": ("asymptotically_stable", "Empirical", "empirical"),
    "rouche_stable_pair_plus": ("asymptotically_stable", "RoucheStable", "rigorous"),
    "rouche_stable_pair_minus": ("asymptotically_stable", "RoucheStable", "rigorous"),
    "rouche_table": ("asymptotically_stable", "RoucheStable", "rigorous"),
    "rouche_unstable_pair": ("unstable", "RealAxisRoot", "rigorous"),
    "alternating_cubic": ("stable", "MarginalStable", "heuristic"),
    "geometric_half": ("stable", "MarginalStable", "heuristic"),
}


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="volstab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="compute a trajectory and export it")
    sim.add_argument("--kernel", required=True, help="kernel JSON file")
    sim.add_argument("--steps", type=int, default=10_000)
    sim.add_argument("--x0", type=float, default=1.0)
    sim.add_argument("--fast", action="store_true", help="use the blocked-convolution path")
    sim.add_argument("--out", default=None)
    sim.add_argument("--format", choices=("csv", "json"), default="csv")

    ro = sub.add_parser("roots", help="roots of the degree-n reversed polynomial")
    ro.add_argument("--kernel", required=True)
    ro.add_argument("--n", type=int, required=True)
    ro.add_argument("--out", default=None)

    ce = sub.add_parser("certify", help="run the certificate pipeline")
    ce.add_argument("--kernel", required=True)
    ce.add_argument("--max-degree", type=int, default=32)
    ce.add_argument("--steps", type=int, default=10_000)
    ce.add_argument("--grid-points", type=int, default=4096)
    ce.add_argument("--out", default=None)

    rp = sub.add_parser("reproduce-paper", help="rerun the built-in reference kernels")
    rp.add_argument("--steps", type=int, default=10_000)
    rp.add_argument("--grid-points", type=int, default=4096)
    rp.add_argument("--out", default=None, help="write the full-precision JSON here")
    return p


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _verdict_line(report: Report) -> str:
    return f"{report.final_verdict} ({report.final_criterion}, {report.final_rigor})"


def _cmd_simulate(args) -> int:
    kernel = load_kernel(args.kernel)
    runner = solve_fast if args.fast else solve
    traj = runner(kernel, args.steps, args.x0)
    if args.format == "csv":
        _emit(trajectory_to_csv(traj), args.out)
    else:
        payload = {
            "kernel_id": traj.kernel_id,
            "method": traj.method,
            "x0": traj.x0,
            "truncated": traj.truncated,
            "overflow": traj.overflow,
            "values": [float(v) for v in traj.values],
        }
        _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    return 0


def _cmd_roots(args) -> int:
    kernel = load_kernel(args.kernel)
    rs = pn_roots(kernel, args.n)
    payload = {
        "n": rs.degree,
        "roots": [{"re": z.real, "im": z.imag} for z in rs.roots],
        "r_n": rs.r_n,
        "residual_bound": rs.residual_bound,
    }
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    return 0


def _cmd_certify(args) -> int:
    kernel = load_kernel(args.kernel)
    report = certify(kernel, args.max_degree, args.steps, args.grid_points)
    print(_verdict_line(report))
    text = json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"
    if args.out:
        _emit(text, args.out)
    else:
        sys.stdout.write(text)
    return 0


def _table_rows(kernel: KernelSpec) -> list[dict]:
    rows = []
    for n in range(1, 7):
        rs = pn_roots(kernel, n)
        row = {"n": n, "r_n": rs.r_n, "L_n": None, "threshold": None}
        if rs.r_n < 1.0:
            enc = tail_abs_sum(kernel, n)
            row["L_n"] = enc.hi
            row["threshold"] = (1.0 - rs.r_n) ** n
        rows.append(row)
    return rows


def _cmd_reproduce(args) -> int:
    failures: list[str] = []
    table_kernel = load_fixture("rouche_table")
    rows = _table_rows(table_kernel)

    lines = ["n, r_n, L_n, (1-r_n)^n"]
    for row in rows:
        r = f"{row['r_n']:.3f}"
        ln = "-" if row["L_n"] is None else f"{row['L_n']:.5f}"
        th = "-" if row["threshold"] is None else f"{row['threshold']:.5f}"
        lines.append(f"{row['n']}, {r}, {ln}, {th}")
        n = row["n"]
        if n in _TABLE_R:
            if abs(row["r_n"] - _TABLE_R[n]) > _R_TOL:
                failures.append(f"r_{n} = {row['r_n']:.6f} deviates from {_TABLE_R[n]}")
            if row["L_n"] is None or abs(row["L_n"] - _TABLE_L[n]) > _L_TOL:
                failures.append(f"L_{n} deviates from {_TABLE_L[n]}")
    print("\n".join(lines))
    print()

    verdicts: dict[str, dict] = {}
    for name in fixture_names():
        kernel = load_fixture(name)
        max_degree = 6 if name == "rouche_table" else 32
        report = certify(kernel, max_degree, args.steps, args.grid_points)
        verdicts[name] = report_to_dict(report)
        print(f"{name}: {_verdict_line(report)}")
        expected = _EXPECTED_FINALS[name]
        got = (report.final_verdict, report.final_criterion, report.final_rigor)
        if got != expected:
            failures.append(f"{name}: expected {expected}, got {got}")
        if name == "rouche_table":
            fired = [a for a in report.attempts if a["criterion"] == "RoucheStable" and a["verdict"] != "not_applicable"]
            if len(fired) != 1 or fired[0].get("n") != 6:
                failures.append("rouche_table: stability certificate did not fire exactly at n = 6")

    payload = json.dumps({"table": rows, "verdicts": verdicts}, indent=2, sort_keys=True) + "\n"
    if args.out:
        _emit(payload, args.out)
    else:
        print()
        sys.stdout.write(payload)

    if failures:
        for f in failures:
            print(f"MISMATCH: {f}", file=sys.stderr)
        return 1
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "roots":
            return _cmd_roots(args)
        if args.command == "certify":
            return _cmd_certify(args)
        if args.command == "reproduce-paper":
            return _cmd_reproduce(args)
    except KernelFormatError as e:
        print(f"kernel error: {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"file error: {e}", file=sys.stderr)
        return 2
    except NonConvergence as e:
        print(f"root finding failed: {e}", file=sys.stderr)
        return 3
    parser.error(f"unknown command {args.command!r}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
