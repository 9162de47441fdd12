"""Command line interface: ``sphere-suite <generate|analyze|energy|optimize|sweep>``.

Exit status is 0 on success, 2 for usage or validation errors and 1 for
anything unexpected.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import energy as en
from . import metrics
from .generators import canonical_family, generate, load_external, write_points
from .io import TABLE_GAMMA, RunManifest, admissible_grid, table_grid, write_rows
from .metrics import REPORT_COLUMNS
from .optimizer import EnergyMinimizer


class UsageError(Exception):
    """Bad flags or inputs; maps to exit status 2."""


def _pair(text):
    try:
        m, n = (int(v) for v in str(text).split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"--mn expects 'm,n', got {text!r}") from None
    return m, n


def _int_list(text):
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None


def _family_args(p, with_n_list=False):
    p.add_argument("--family", help="point family (e.g. gen_spiral, fibonacci, healpix, zonal)")
    if with_n_list:
        p.add_argument("--n", type=_int_list, help="N, or a comma separated list of N")
    else:
        p.add_argument("--n", type=int, help="number of points N")
    p.add_argument("--k", type=int, help="resolution parameter k")
    p.add_argument("--m", type=int, help="Caspar-Klug m (with n = 0 unless --mn is given)")
    p.add_argument("--mn", type=_pair, help="Caspar-Klug pair 'm,n'")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--no-shift", action="store_true", help="zonal: no collar rotations")
    p.add_argument("--offsets", choices=["random", "aligned", "none"],
                   help="zonal collar rotation rule (default random, or none with --no-shift)")
    p.add_argument("--variant", choices=["azimuthal", "exact"], default="azimuthal",
                   help="icos_equal_area map variant")
    p.add_argument("--grid", choices=["equiangular", "uniform"], default="equiangular",
                   help="cubed_sphere face grid")
    p.add_argument("--mode", choices=["rational", "irrational"], default="rational",
                   help="fibonacci_lattice mode")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sphere-suite", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a point configuration")
    _family_args(g)
    g.add_argument("--out", help="output file (default stdout)")
    g.add_argument("--format", choices=["csv", "json"], default="csv")

    a = sub.add_parser("analyze", help="separation, covering radius and mesh ratio")
    _family_args(a)
    a.add_argument("--in", dest="inp", help="analyze an external point file")
    a.add_argument("--table", type=int, choices=range(1, 9), help="reproduce a mesh-ratio table grid")
    a.add_argument("--nmax", type=int, default=60000, help="largest N for --table (default 60000)")
    a.add_argument("--out")
    a.add_argument("--format", choices=["csv", "json"], default="csv")

    e = sub.add_parser("energy", help="normalized energy series with reference lines")
    _family_args(e)
    e.add_argument("--in", dest="inp", help="energy of an external point file")
    e.add_argument("--kernel", default="log", help="'log' or 's=<real>'")
    e.add_argument("--orders", type=_int_list, default=[1], help="e.g. 1,2,3")
    e.add_argument("--nmax", type=int, default=50000)
    e.add_argument("--count", type=int, default=20, help="grid points per family")
    e.add_argument("--jobs", type=int, default=1, help="worker threads")
    e.add_argument("--out", help="output directory (one file per order)")
    e.add_argument("--format", choices=["csv", "json"], default="csv")

    o = sub.add_parser("optimize", help="approximate minimal-energy points")
    _family_args(o)
    o.add_argument("--in", dest="inp", help="start from an external point file")
    o.add_argument("--kernel", default="log")
    o.add_argument("--max-iter", type=int, default=500)
    o.add_argument("--restarts", type=int, default=3)
    o.add_argument("--checkpoint", help="JSON checkpoint to write (and resume from if it exists)")
    o.add_argument("--out")
    o.add_argument("--format", choices=["csv", "json"], default="csv")

    s = sub.add_parser("sweep", help="quality reports over a parameter grid")
    _family_args(s, with_n_list=True)
    s.add_argument("--nmax", type=int, default=10000)
    s.add_argument("--count", type=int, default=20)
    s.add_argument("--out")
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    return parser


def _gen_kwargs(args) -> dict:
    kw = {"seed": args.seed, "shift": not args.no_shift, "offsets": args.offsets,
          "variant": args.variant, "grid": args.grid, "mode": args.mode}
    if getattr(args, "k", None) is not None:
        kw["k"] = args.k
    if args.mn is not None:
        kw["m"], kw["n"] = args.mn
    elif args.m is not None:
        kw["m"], kw["n"] = args.m, 0
    return kw


def _config_from_args(args):
    if getattr(args, "inp", None):
        return load_external(args.inp)
    if not args.family:
        raise UsageError("either --family or --in is required")
    kw = _gen_kwargs(args)
    return generate(args.family, N=args.n, **kw)


def _manifest(args, argv, **extra) -> RunManifest:
    return RunManifest(command=args.command, argv=list(argv), seeds=[args.seed],
                       family=getattr(args, "family", None), **extra)


def cmd_generate(args, argv) -> int:
    cfg = _config_from_args(args)
    man = _manifest(args, argv, params=cfg.params, outputs=[args.out or "-"])
    if args.out is None:
        for line in man.header_lines():
            sys.stdout.write(f"# {line}\n")
        for x, y, z in cfg.points:
            sys.stdout.write(f"{x:.17g},{y:.17g},{z:.17g}\n")
        return 0
    write_points(cfg, args.out, args.format, header=man.header_lines())
    return 0


def cmd_analyze(args, argv) -> int:
    if args.table is not None:
        family, grid = table_grid(args.table, args.nmax)
        kw = _gen_kwargs(args)
        kw.pop("k", None)
        reports = metrics.quality_sweep(family, grid, **kw)
        rows = []
        for r in reports:
            row = r.to_row()
            row["table_gamma"] = row[TABLE_GAMMA[args.table]]
            row["error"] = r.error or ""
            rows.append(row)
        man = _manifest(args, argv, grid=grid, outputs=[args.out or "-"])
        man.family = family
        write_rows(rows, args.out, args.format, man, columns=list(REPORT_COLUMNS) + ["table_gamma", "error"])
        return 0
    cfg = _config_from_args(args)
    rep = metrics.quality(cfg, cfg.family, cfg.params)
    man = _manifest(args, argv, params=cfg.params, outputs=[args.out or "-"])
    write_rows([rep.to_row()], args.out, args.format, man, columns=REPORT_COLUMNS)
    return 0


def cmd_energy(args, argv) -> int:
    try:
        kernel = en.KernelSpec.parse(args.kernel)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    allowed = en.valid_orders(kernel)
    bad = [o for o in args.orders if o not in allowed]
    if bad:
        raise UsageError(f"order(s) {bad} not defined for kernel {kernel.label}; allowed {list(allowed)}")
    if args.inp:
        cfg = load_external(args.inp)
        items = [(cfg.family, cfg)]
    else:
        if not args.family:
            raise UsageError("either --family or --in is required")
        family = canonical_family(args.family)
        if args.n is not None or args.k is not None or args.m is not None or args.mn is not None:
            grid = [{"N": args.n}] if args.n is not None else [{}]
        else:
            grid = admissible_grid(family, args.nmax, args.count)
        kw = _gen_kwargs(args)
        items = []
        for p in grid:
            merged = {**kw, **p}
            items.append((family, generate(family, N=merged.pop("N", None), **merged)))
    series = {o: [] for o in args.orders}
    for family, cfg in items:
        E = en.discrete_energy(cfg, kernel, n_jobs=args.jobs)
        for o in args.orders:
            series[o].append({"family": family, "N": cfg.N, "value": en.normalize(E, cfg.N, kernel, o),
                              "note": ""})
    outdir = Path(args.out) if args.out else None
    ext = args.format
    for o in args.orders:
        rows = list(series[o])
        for note, value in _reference_rows(kernel, o):
            rows.append({"family": "reference", "N": "", "value": value, "note": note})
        name = f"energy_{kernel.label.replace('=', '')}_order{o}.{ext}"
        path = None if outdir is None else outdir / name
        man = _manifest(args, argv, params={"kernel": kernel.label, "order": o},
                        grid=[r["N"] for r in series[o]], outputs=[str(path) if path else "-"])
        write_rows(rows, path, args.format, man, columns=["family", "N", "value", "note"])
    return 0


def _reference_rows(kernel, order):
    rows = []
    ref = en.reference_value(kernel, order)
    if kernel.is_log:
        names = {1: "I_log[sigma] = 1/2 - log 2", 2: "-1/2", 3: "C_hat (conjectured constant)"}
        rows.append((names[order], ref))
        if order == 3:
            rows.append(("lower bound on C", en.C_LOWER))
        return rows
    s = kernel.s
    if s < 2.0:
        rows.append(("I_s[sigma]" if order == 1 else "conjectured second-order coefficient", ref))
    elif s == 2.0:
        rows.append(("1/4", ref))
    else:
        rows.append(("conjectured C_s" if order == 1 else "V_s (analytic continuation)", ref))
    return rows


def cmd_optimize(args, argv) -> int:
    if args.checkpoint and Path(args.checkpoint).exists():
        est = EnergyMinimizer.load_checkpoint(args.checkpoint)
        start = est.points_
        est.set_params(max_iter=args.max_iter, n_restarts=1)
    else:
        if args.inp:
            start = load_external(args.inp).points
        elif args.n is not None and not args.family:
            start = generate("gen_spiral", N=args.n).points
        else:
            start = _config_from_args(args).points
        est = EnergyMinimizer(kernel=args.kernel, max_iter=args.max_iter,
                              n_restarts=args.restarts, random_state=args.seed)
    est.fit(start)
    if args.checkpoint:
        est.save_checkpoint(args.checkpoint)
    man = _manifest(args, argv, params={"kernel": str(est.kernel), "energy": est.energy_,
                                        "iterations": est.trace_.iterations,
                                        "converged": est.trace_.converged},
                    outputs=[args.out or "-"])
    if args.out:
        write_points(est.points_, args.out, args.format, header=man.header_lines())
    else:
        for line in man.header_lines():
            sys.stdout.write(f"# {line}\n")
        for x, y, z in est.points_:
            sys.stdout.write(f"{x:.17g},{y:.17g},{z:.17g}\n")
    return 0


def cmd_sweep(args, argv) -> int:
    if not args.family:
        raise UsageError("--family is required")
    family = canonical_family(args.family)
    if args.n:
        grid = [{"N": n} for n in args.n]
    else:
        grid = admissible_grid(family, args.nmax, args.count)
    kw = _gen_kwargs(args)
    reports = metrics.quality_sweep(family, grid, **kw)
    rows = []
    for r in reports:
        row = r.to_row()
        row["error"] = r.error or ""
        rows.append(row)
    man = _manifest(args, argv, grid=grid, outputs=[args.out or "-"])
    write_rows(rows, args.out, args.format, man, columns=list(REPORT_COLUMNS) + ["error"])
    return 0


COMMANDS = {"generate": cmd_generate, "analyze": cmd_analyze, "energy": cmd_energy,
            "optimize": cmd_optimize, "sweep": cmd_sweep}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args, argv)
    except BrokenPipeError:
        # reader went away (e.g. piped into head); not an error
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 0
    except (UsageError, ValueError, TypeError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"sphere-suite {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"sphere-suite {args.command}: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
