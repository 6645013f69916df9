"""Command-line entry point ``wgnls``.

Exit codes: 0 success, 1 invalid input or configuration, 2 numerical failure.
"""

import argparse
import logging
import os
import sys

import numpy as np

from . import analysis, config as config_mod, harness, solver1d, solver2d
from .errors import NumericalError, ValidationError
from .geometry import build_coefficients, check_injectivity, reconstruct_curve
from .snapshot import read_snapshot
from .spectral import StripGrid

log = logging.getLogger("wgnls")

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n\nconfig file schema:\n{config_mod.__doc__}\n")
        sys.exit(EXIT_INVALID)


def _out(cfg, force):
    return harness.OutputDir(cfg.output_dir, force=force)


def cmd_geometry_check(args):
    cfg = config_mod.load(args.config)
    curve = cfg.curve()
    rows = []
    emb = reconstruct_curve(curve, 256)
    for eps in cfg.eps_list:
        rep = check_injectivity(curve, eps, raise_on_failure=False)
        rows.append([repr(eps), int(rep.ok), repr(rep.min_pair_distance), len(rep.pairs)])
        print(f"eps={eps:g}: {'ok' if rep.ok else 'SELF-INTERSECTING'} "
              f"(min separated distance {rep.min_pair_distance:.4g}, crossings {len(rep.pairs)})")
    print(f"curve {curve.name}: closure residual {emb.closure_residual:.3e}, eps0 {curve.default_eps0(cfg.eps0):.6g}")
    path = _out(cfg, args.force).write_text(
        "geometry.csv", harness._csv(("eps", "injective", "min_pair_distance", "crossings"), rows))
    print(path)
    if not all(r[1] for r in rows):
        raise ValidationError("tube self-intersects for some eps in eps_list")
    return EXIT_OK


def _setup(cfg, eps, n2=None):
    grid = StripGrid(cfg.n1, n2 or cfg.n2, cfg.length1)
    coeffs = build_coefficients(cfg.curve(), eps, grid, cfg.eps0)
    phi0 = solver2d.initial_data(cfg.data_family, grid, eps, cfg.data_params, cfg.seed)
    return grid, coeffs, phi0


def cmd_simulate1d(args):
    cfg = config_mod.load(args.config)
    out = _out(cfg, args.force)
    for eps in cfg.eps_list:
        grid, coeffs, phi0 = _setup(cfg, eps)
        dt = harness.choose_dt(cfg, coeffs, phi0)
        prob = solver1d.Effective1DProblem(grid, coeffs.potential_1d, cfg.lam,
                                           solver2d.initial_theta(phi0, grid), dt, cfg.t_end, cfg.times())
        res = solver1d.run(prob)
        tag = harness.eps_tag(eps)
        print(out.write_text(f"diagnostics_1d_{tag}.csv", harness.diagnostics_csv(res.diagnostics)))
        for i, (t, theta) in enumerate(zip(res.times, res.snapshots)):
            out.write_snapshot(f"theta_{tag}_{i:03d}.wgs", theta, grid.length1, eps, cfg.lam, t)
    return EXIT_OK


def cmd_simulate2d(args):
    cfg = config_mod.load(args.config)
    out = _out(cfg, args.force)
    for eps in cfg.eps_list:
        grid, coeffs, phi0 = _setup(cfg, eps)
        dt = harness.choose_dt(cfg, coeffs, phi0)
        prob = solver2d.Strip2DProblem(coeffs, cfg.lam, phi0, dt, cfg.t_end, cfg.times(), cfg.mass_drift_bound)
        res = solver2d.run2d(prob)
        tag = harness.eps_tag(eps)
        print(out.write_text(f"diagnostics_2d_{tag}.csv", harness.diagnostics_csv(res.diagnostics)))
        for i, (t, phi) in enumerate(zip(res.times, res.snapshots)):
            out.write_snapshot(f"phi_{tag}_{i:03d}.wgs", phi, grid.length1, eps, cfg.lam, t)
    return EXIT_OK


def cmd_converge(args):
    cfg = config_mod.load(args.config)
    out = _out(cfg, args.force)
    # check every target up front so a long sweep cannot die on an existing file
    names = [f"diagnostics_{harness.eps_tag(e)}.csv" for e in cfg.eps_list] + ["report.csv", "fit.csv"]
    for n in names:
        out.path(n)

    def on_run(pr):
        name = f"diagnostics_{harness.eps_tag(pr.eps)}.csv"
        print(out.write_text(name, harness.diagnostics_csv(pr.run2d.diagnostics)))

    rep = harness.converge_sweep(cfg, on_run=on_run)
    print(out.write_text("report.csv", harness.report_csv(rep)))
    print(out.write_text("fit.csv", harness.fit_csv(rep)))
    if rep.exact_regime:
        print("exact regime: errors at roundoff, slope not fitted")
    elif rep.slope is not None:
        print(f"model error slope {rep.slope:.3f} (residual {rep.residual:.2e})")
    return EXIT_OK


def cmd_props(args):
    if args.trials < 1:
        raise ValidationError("--trials must be >= 1")
    text = analysis.reports_to_csv(analysis.property_suite(args.trials, args.seed))
    if args.out:
        harness.OutputDir(os.path.dirname(os.path.abspath(args.out)), force=args.force).write_text(
            os.path.basename(args.out), text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_reconstruct(args):
    cfg = config_mod.load(args.config)
    if not os.path.isfile(args.snapshot):
        raise ValidationError(f"snapshot not found: {args.snapshot}")
    snap = read_snapshot(args.snapshot)
    if not np.isclose(snap.length1, cfg.length1):
        raise ValidationError("snapshot box length does not match the config")
    grid = StripGrid(snap.n1, snap.n2 or cfg.n2, snap.length1)
    curve = cfg.curve()
    coeffs = build_coefficients(curve, snap.eps, grid, cfg.eps0)
    samples = solver2d.reconstruct_physical(snap.field, coeffs, curve, t=snap.time)
    name = args.out or "reconstruct_" + os.path.splitext(os.path.basename(args.snapshot))[0] + ".csv"
    print(_out(cfg, args.force).write_text(name, harness.reconstruction_csv(samples)))
    return EXIT_OK


def build_parser():
    p = _Parser(prog="wgnls", description="Thin curved waveguide NLS: strip solver, 1D limit, convergence sweeps.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_, config=True):
        sp = sub.add_parser(name, help=help_)
        if config:
            sp.add_argument("config")
        sp.add_argument("--force", action="store_true", help="overwrite existing outputs")
        sp.set_defaults(func=fn)
        return sp

    add("geometry-check", cmd_geometry_check, "validate the curve and the tube for each eps")
    add("simulate1d", cmd_simulate1d, "run the 1D limit equation")
    add("simulate2d", cmd_simulate2d, "run the strip equation")
    add("converge", cmd_converge, "eps sweep of the model error")
    sp = add("props", cmd_props, "numerical inequality suite", config=False)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", help="also write the CSV to this file")
    sp = sub.add_parser("reconstruct", help="sample a snapshot on the physical waveguide")
    sp.add_argument("snapshot")
    sp.add_argument("config")
    sp.add_argument("--out", help="file name inside output_dir")
    sp.add_argument("--force", action="store_true")
    sp.set_defaults(func=cmd_reconstruct)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
