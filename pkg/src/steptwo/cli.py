"""Command-line interface.

    steptwo validate <config>
    steptwo eval-kernel <config> --m M --points FILE --out FILE [--method sphere|contour|oracle]
    steptwo check <config> [--only a,b] --report FILE
    steptwo reconstruct <config> --input FILE --R v [--M v] --out FILE
    steptwo export-qm <config> --m M --tau v [v ...] [--grid EXTENT POINTS] --out FILE

Exit status: 0 success, 1 failed check, 2 usage or configuration error.
"""

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import kernels, laguerre, projection, verify
from .errors import Degenerate, NotSkewSymmetric, ShapeError, SteptwoError
from .group import group_from_dict


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _parser():
    p = _Parser(prog="steptwo", description="Spectral projection kernels on step-two groups.")
    p.add_argument("--workers", type=int, default=None,
                   help=f"worker threads (overrides ${projection.ENV_WORKERS})")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", help="validate the group of a config")
    s.add_argument("config")

    s = sub.add_parser("eval-kernel", help="evaluate P_m at points from a CSV file")
    s.add_argument("config")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--points", required=True, help="CSV with columns y1..y2n,t1..tr")
    s.add_argument("--out", required=True)
    s.add_argument("--method", choices=["sphere", "contour", "oracle"], default="sphere")

    s = sub.add_parser("check", help="run the verification suite")
    s.add_argument("config")
    s.add_argument("--only", default=None, help="comma-separated check names")
    s.add_argument("--report", required=True)
    s.add_argument("--no-timing", action="store_true",
                   help="omit runtimes so that reports of identical runs are identical")

    s = sub.add_parser("reconstruct", help="Abel reconstruction of a sampled function")
    s.add_argument("config")
    s.add_argument("--input", required=True, help="binary sampled-function container")
    s.add_argument("--R", type=float, required=True)
    s.add_argument("--M", default="inf", help="truncation degree or 'inf'")
    s.add_argument("--out", required=True)

    s = sub.add_parser("export-qm", help="sample Q_m(., tau) on a y grid to CSV")
    s.add_argument("config")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--tau", type=float, nargs="+", required=True)
    s.add_argument("--grid", type=float, nargs=2, metavar=("EXTENT", "POINTS"), default=None)
    s.add_argument("--out", required=True)
    return p


def _load(path):
    cfg = verify.load_config(path)
    return cfg, group_from_dict(cfg["group"])


def _read_points(path, G):
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if rows and not _is_number(rows[0][0]):
        rows = rows[1:]
    data = np.array(rows, dtype=float).reshape(len(rows), -1)
    if data.shape[1] != 2 * G.n + G.r:
        raise SteptwoError(f"points file needs {2 * G.n + G.r} columns, got {data.shape[1]}")
    return data[:, : 2 * G.n], data[:, 2 * G.n:]


def _is_number(s):
    try:
        float(s)
        return True
    except ValueError:
        return False


def cmd_validate(args):
    cfg = verify.load_config(args.config)
    try:
        G = group_from_dict(cfg["group"])
    except (Degenerate, NotSkewSymmetric, ShapeError) as exc:
        print(f"invalid group: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(json.dumps({"name": G.name, "fingerprint": G.fingerprint(), "n": G.n, "r": G.r,
                      "Q": G.Q, "sigma_min": G.sigma_min, "eig_range": list(G.eig_range)}))
    return 0


def cmd_eval_kernel(args):
    cfg, G = _load(args.config)
    kcfg = kernels.KernelConfig.from_dict(cfg.get("kernel", {}))
    Y, T = _read_points(args.points, G)
    vals = kernels.evaluate(G, kcfg, args.m, Y, T, args.method)
    kernels.write_csv(args.out, Y, T, args.m, vals)
    return 0


def cmd_check(args):
    only = args.only.split(",") if args.only else None
    rep = verify.run_suite(args.config, only=only, workers=args.workers)
    rep.write(args.report, timing=not args.no_timing)
    for c in rep.checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status} {c.name} residual={c.residual:.3e} {c.error}".rstrip())
    return 0 if rep.passed else 1


def cmd_reconstruct(args):
    cfg, G = _load(args.config)
    pcfg = verify.build_context(cfg, G).pcfg
    f = projection.load_sampled(args.input)
    if (f.grid.n, f.grid.r) != (G.n, G.r):
        raise SteptwoError("input grid dimensions do not match the group")
    M = None if args.M in ("inf", "infinity", "none") else int(args.M)
    out = projection.abel_reconstruct(G, pcfg, f, args.R, M)
    projection.save_sampled(out, args.out)
    return 0


def cmd_export_qm(args):
    cfg, G = _load(args.config)
    grid = verify.build_context(cfg, G).grid
    extent, points = (grid.y_extent, grid.y_points) if args.grid is None else args.grid
    points = int(points)
    tau = np.asarray(args.tau, dtype=float)
    h = 2 * extent / points
    ax = (np.arange(points) - points // 2) * h
    Y = np.stack(np.meshgrid(*([ax] * (2 * G.n)), indexing="ij"), -1).reshape(-1, 2 * G.n)
    q = laguerre.q_m(G, args.m, Y, tau)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"y{i + 1}" for i in range(2 * G.n)] + ["m", "q"])
        for y, v in zip(Y, q):
            w.writerow([repr(float(a)) for a in y] + [args.m, repr(float(v))])
    return 0


COMMANDS = {
    "validate": cmd_validate,
    "eval-kernel": cmd_eval_kernel,
    "check": cmd_check,
    "reconstruct": cmd_reconstruct,
    "export-qm": cmd_export_qm,
}


def main(argv=None):
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.workers is not None:
        os.environ[projection.ENV_WORKERS] = str(args.workers)
    try:
        return COMMANDS[args.cmd](args)
    except (SteptwoError, OSError, ValueError) as exc:
        print(f"steptwo: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
