"""Paired 2D/1D runs, the eps sweep and the CSV writers."""

from dataclasses import dataclass, field
import csv
import io
import logging
import os

import numpy as np

from . import solver1d, solver2d
from .analysis import fit_slope, projected_residual_check
from .errors import ResolutionInsufficient, ValidationError
from .geometry import CLOSED, build_coefficients
from .snapshot import Snapshot, write_snapshot, write_text
from .spectral import StripGrid, error_norm  # noqa: F401  (re-exported)

log = logging.getLogger(__name__)

DIAGNOSTICS_HEADER = ("time", "mass", "energy", "transverse_excitation", "model_error")
REPORT_HEADER = ("eps", "sup_error_l2", "sup_transverse_excitation", "mass_drift", "energy_drift",
                 "sup_projected_residual", "dt", "n1", "n2")
FIT_HEADER = ("quantity", "slope", "intercept", "residual", "exact_regime", "refinement_change")

ROUNDOFF = 1e-11
REFINE_TOL = 0.1


@dataclass
class EpsRow:
    eps: float
    sup_error: float
    sup_transverse: float
    mass_drift: float
    energy_drift: float
    sup_projected_residual: float
    dt: float
    n1: int
    n2: int

    def row(self):
        return [repr(float(self.eps)), repr(self.sup_error), repr(self.sup_transverse),
                repr(self.mass_drift), repr(self.energy_drift), repr(self.sup_projected_residual),
                repr(float(self.dt)), self.n1, self.n2]


@dataclass
class ConvergenceReport:
    rows: list
    slope: float | None
    intercept: float | None
    residual: float | None
    exact_regime: bool
    transverse_slope: float | None = None
    refinement_change: float | None = None
    diagnostics: dict = field(default_factory=dict)  # eps -> list of DiagnosticsRecord

    @property
    def eps(self):
        return np.array([r.eps for r in self.rows])

    @property
    def errors(self):
        return np.array([r.sup_error for r in self.rows])

    @property
    def transverse(self):
        return np.array([r.sup_transverse for r in self.rows])


@dataclass
class PairedRun:
    eps: float
    coeffs: object
    run1d: object
    run2d: object
    dt: float


def choose_dt(cfg, coeffs, phi0):
    if cfg.dt is not None:
        return cfg.dt
    dt = solver2d.dt_stability(coeffs, cfg.lam, phi0)
    if cfg.dt_rule == "resolve":
        dt = min(dt, solver2d.dt_resolving(coeffs))
    return dt


def _warn_box_edges(field, cfg):
    if cfg.domain_kind == CLOSED:
        return
    a = np.abs(field)
    peak = a.max()
    edge = max(a[0].max(), a[-1].max())
    if peak > 0 and edge > 1e-8 * peak:
        log.warning("field reaches the box edge (|edge|/max = %.2e); enlarge L_box", edge / peak)


def paired_run(cfg, eps, n1=None, n2=None, dt_scale=1.0, keep_snapshots=True):
    """Run the strip problem and the 1D limit from matching data on one snapshot grid."""
    curve = cfg.curve()
    grid = StripGrid(n1 or cfg.n1, n2 or cfg.n2, cfg.length1)
    coeffs = build_coefficients(curve, eps, grid, cfg.eps0)
    phi0 = solver2d.initial_data(cfg.data_family, grid, eps, cfg.data_params, cfg.seed)
    _warn_box_edges(phi0, cfg)
    theta0 = solver2d.initial_theta(phi0, grid)
    dt = choose_dt(cfg, coeffs, phi0) * dt_scale
    times = cfg.times()
    p1 = solver1d.Effective1DProblem(grid, coeffs.potential_1d, cfg.lam, theta0, dt, cfg.t_end, times)
    r1 = solver1d.run(p1)
    p2 = solver2d.Strip2DProblem(coeffs, cfg.lam, phi0, dt, cfg.t_end, times,
                                 cfg.mass_drift_bound, theta_snapshots=r1.snapshots)
    r2 = solver2d.run2d(p2, keep_snapshots=keep_snapshots)
    return PairedRun(eps, coeffs, r1, r2, r2.dt)


def _row(pr, lam):
    d = pr.run2d.diagnostics
    mass0, e0 = d[0].mass, d[0].energy
    resid = projected_residual_check(pr.run2d, pr.run1d, pr.coeffs, lam) if pr.run2d.snapshots else [np.nan]
    return EpsRow(
        eps=pr.eps,
        sup_error=float(max(r.model_error for r in d)),
        sup_transverse=float(max(r.transverse_excitation for r in d)),
        mass_drift=float(max(abs(r.mass - mass0) for r in d) / mass0) if mass0 > 0 else 0.0,
        energy_drift=float(max(abs(r.energy - e0) for r in d)),
        sup_projected_residual=float(np.max(resid)),
        dt=pr.dt,
        n1=pr.coeffs.grid.n1,
        n2=pr.coeffs.grid.n2,
    )


def refinement_change(cfg, base_row):
    """Relative change of the sup error at the smallest eps under n1*2, n2*2 and dt/2."""
    pr = paired_run(cfg, base_row.eps, n1=2 * cfg.n1, n2=2 * cfg.n2 + 1, dt_scale=0.5, keep_snapshots=False)
    fine = max(r.model_error for r in pr.run2d.diagnostics)
    if base_row.sup_error <= ROUNDOFF:
        return abs(fine - base_row.sup_error)
    return abs(fine - base_row.sup_error) / base_row.sup_error


def converge_sweep(cfg, refine=None, on_run=None):
    """Model error versus eps with an OLS slope on log2 axes.

    ``on_run(paired_run)`` is called after every eps (used by the CLI to write
    diagnostics). Errors at roundoff level skip the fit and set ``exact_regime``.
    """
    refine = cfg.refine if refine is None else refine
    rows, diags = [], {}
    for eps in cfg.eps_list:
        pr = paired_run(cfg, eps)
        rows.append(_row(pr, cfg.lam))
        diags[eps] = pr.run2d.diagnostics
        if on_run is not None:
            on_run(pr)
    errors = np.array([r.sup_error for r in rows])
    exact = bool(np.all(errors <= ROUNDOFF))
    slope = intercept = resid = tslope = None
    if not exact and len(rows) >= 3:
        slope, intercept, resid = fit_slope([r.eps for r in rows], errors)
        trans = [r.sup_transverse for r in rows]
        if min(trans) > 0:
            tslope = fit_slope([r.eps for r in rows], trans)[0]
    elif not exact:
        log.warning("fewer than three eps values; slope not fitted")
    change = None
    if refine and not exact:
        change = refinement_change(cfg, rows[-1])
        if change > REFINE_TOL:
            raise ResolutionInsufficient(
                f"refining the grid and dt at eps={rows[-1].eps} changed the error by "
                f"{100 * change:.1f}% (> {100 * REFINE_TOL:.0f}%)"
            )
    return ConvergenceReport(rows, slope, intercept, resid, exact, tslope, change, diags)


# ---------------------------------------------------------------------------
# CSV output

def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def diagnostics_csv(records):
    return _csv(DIAGNOSTICS_HEADER, [r.row() for r in records])


def report_csv(report):
    return _csv(REPORT_HEADER, [r.row() for r in report.rows])


def fit_csv(report):
    fmt = lambda v: "" if v is None else repr(float(v))  # noqa: E731
    return _csv(FIT_HEADER, [
        ["model_error", fmt(report.slope), fmt(report.intercept), fmt(report.residual),
         int(report.exact_regime), fmt(report.refinement_change)],
        ["transverse_excitation", fmt(report.transverse_slope), "", "", int(report.exact_regime), ""],
    ])


def reconstruction_csv(samples):
    rows = [[repr(float(v)) for v in r] for r in samples.rows()]
    return _csv(("x", "y", "re_psi", "im_psi", "abs_psi2"), rows)


class OutputDir:
    """Output paths under one directory; refuses to overwrite unless forced."""

    def __init__(self, root, force=False):
        self.root = os.path.abspath(root)
        self.force = force
        os.makedirs(self.root, exist_ok=True)

    def path(self, name):
        p = os.path.abspath(os.path.join(self.root, name))
        if os.path.commonpath([p, self.root]) != self.root:
            raise ValidationError(f"{name} escapes the output directory")
        if os.path.exists(p) and not self.force:
            raise ValidationError(f"{p} exists; pass --force to overwrite")
        return p

    def write_text(self, name, text):
        p = self.path(name)
        write_text(p, text)
        return p

    def write_snapshot(self, name, field, length1, eps, lam, time):
        p = self.path(name)
        write_snapshot(p, Snapshot(np.asarray(field), float(length1), float(eps), float(lam), float(time)))
        return p


def eps_tag(eps):
    return f"eps{eps:.6g}"


__all__ = [
    "ConvergenceReport",
    "DIAGNOSTICS_HEADER",
    "EpsRow",
    "OutputDir",
    "converge_sweep",
    "diagnostics_csv",
    "error_norm",
    "fit_csv",
    "paired_run",
    "reconstruction_csv",
    "report_csv",
]
