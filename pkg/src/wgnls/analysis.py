"""Residual operators, the data regulariser and numerical inequality suites.

The exact-constant inequalities are checked on fields compactly supported in
x1. On the periodic line they can fail: for u = 1 on R/2piZ the one-dimensional
bound ||u||_4^4 <= 2 ||u||_2^3 ||u'||_2 reads 2pi <= 0 (see
:func:`periodic_constant_counterexample`). The compact class is the one for
which the bounds are literally true.
"""

from dataclasses import dataclass
import csv
import io

import numpy as np

from .errors import GridMismatch
from .geometry import _smooth_bump
from .spectral import (
    StripGrid,
    _modal_energy,
    apply_p1_squared,
    l2_norm,
    random_field,
    sobolev_norm,
    to_modal,
    to_nodal,
)
from .transverse import MU1, MU2, TransverseBasis, eigenfunction

TWO_PI = 2 * np.pi


# ---------------------------------------------------------------------------
# residuals of the projected equation

def residual_r(phi, coeffs):
    """R_eps(phi) = P1^2 phi - D1^2 phi - kappa^2/4 (m^-2 - 1) phi."""
    grid = coeffs.grid
    d11 = np.fft.ifft(grid.k2[:, None] * np.fft.fft(phi, axis=0), axis=0)
    kap2 = coeffs.kappa[:, None] ** 2
    return apply_p1_squared(phi, coeffs) - d11 - kap2 / 4.0 * (coeffs.m_inv**2 - 1.0) * phi


def residual_s(phi, coeffs, lam):
    """S_eps(phi) = lam m^-1 |phi|^2 phi - lam |Pi1 phi|^2 Pi1 phi."""
    p = coeffs.grid.basis.project_pi1(phi)
    return lam * (coeffs.m_inv * np.abs(phi) ** 2 * phi - np.abs(p) ** 2 * p)


def projected_residual_check(run2d_result, run1d_result, coeffs, lam):
    """||<R_eps(phi) + S_eps(phi), e1>||_{L2(M)} at each snapshot of a paired run."""
    grid = coeffs.grid
    if list(run2d_result.times) != list(run1d_result.times):
        raise GridMismatch("2D and 1D runs have different snapshot times")
    if not run2d_result.snapshots:
        raise GridMismatch("2D run kept no snapshots")
    out = []
    for phi, theta in zip(run2d_result.snapshots, run1d_result.snapshots):
        if phi.shape != (grid.n1, grid.n2) or theta.shape != (grid.n1,):
            raise GridMismatch("snapshot shapes do not match the grid")
        drive = grid.basis.first_coefficient(residual_r(phi, coeffs) + residual_s(phi, coeffs, lam))
        out.append(float(np.sqrt(np.sum(np.abs(drive) ** 2) * grid.dx1)))
    return np.array(out)


# ---------------------------------------------------------------------------
# regularised data

def regularize(phi0, grid, eps, eta):
    """Pi1 (1 + eta*eps*D1^2)^{-1/2} phi0 as an exact Fourier multiplier."""
    theta = grid.basis.first_coefficient(phi0)
    mult = (1.0 + eta * eps * grid.k2) ** -0.5
    theta = np.fft.ifft(mult * np.fft.fft(theta))
    return np.outer(theta, grid.basis.mode(1))


def regularize_bounds(phi0, grid, eps, eta):
    """Ratios (lhs/rhs) of the three norm bounds satisfied by :func:`regularize`."""
    out = regularize(phi0, grid, eps, eta)
    e_in = _modal_energy(phi0, grid)
    e_out = _modal_energy(out, grid)
    k2 = grid.k2[:, None]
    l2 = np.sqrt(e_out.sum()) / np.sqrt(e_in.sum())
    d1 = np.sqrt(np.sum(k2 * e_out)) / np.sqrt(np.sum(k2 * e_in))
    d11 = np.sqrt(np.sum(k2**2 * e_out)) / ((eta * eps) ** -0.5 * sobolev_norm(phi0, grid, "H1"))
    return l2, d1, d11


# ---------------------------------------------------------------------------
# reports

@dataclass
class InequalityReport:
    name: str
    trials: int
    worst_ratio: float
    violations: int
    seed: int

    FIELDS = ("name", "trials", "worst_ratio", "violations", "seed")

    def row(self):
        return [self.name, self.trials, repr(float(self.worst_ratio)), self.violations, self.seed]


def reports_to_csv(reports):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(InequalityReport.FIELDS)
    for r in reports:
        w.writerow(r.row())
    return buf.getvalue()


def _tally(name, lhs, rhs, seed, tol=1e-10):
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    nz = rhs > 0
    ratios = np.where(nz, lhs / np.where(nz, rhs, 1.0), np.where(lhs > 0, np.inf, 0.0))
    violations = int(np.sum(lhs > rhs * (1 + tol) + 1e-300))
    return InequalityReport(name, int(lhs.size), float(np.max(ratios)) if ratios.size else 0.0, violations, seed)


# ---------------------------------------------------------------------------
# compactly supported test fields

def _random_bumps(rng, x, n_terms=3, min_width=0.25, max_width=1.2, kmax=6, length=TWO_PI):
    """Sum of smooth bumps with random centres, widths and carrier waves, plus its x-derivative."""
    u = np.zeros_like(x, dtype=complex)
    du = np.zeros_like(x, dtype=complex)
    for _ in range(n_terms):
        w = rng.uniform(min_width, max_width)
        c = rng.uniform(w + 0.05, length - w - 0.05)
        k = rng.integers(-kmax, kmax + 1)
        a = rng.standard_normal() + 1j * rng.standard_normal()
        f, df, _ = _smooth_bump((x - c) / w)
        wave = np.exp(1j * k * x)
        u += a * f * wave
        du += a * (df / w + 1j * k * f) * wave
    return u, du


def gn_inequality_1d(trials=1000, seed=0, n=2048):
    """||u||_4^4 <= 2 ||u||_2^3 ||u'||_2 on compactly supported u."""
    x = np.arange(n) * (TWO_PI / n)
    h = TWO_PI / n
    lhs, rhs = [], []
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        u, du = _random_bumps(rng, x, n_terms=int(rng.integers(1, 4)))
        rho = np.abs(u) ** 2
        l2 = np.sqrt(rho.sum() * h)
        lhs.append(np.sum(rho**2) * h)
        rhs.append(2 * l2**3 * np.sqrt(np.sum(np.abs(du) ** 2) * h))
    return _tally("gn_1d", lhs, rhs, seed)


def periodic_constant_counterexample(n=64):
    """(lhs, rhs) of the 1D bound for u = 1 on R/2piZ: the bound fails on the torus."""
    u = np.ones(n)
    h = TWO_PI / n
    return float(np.sum(u**4) * h), 0.0


def _random_strip_field(rng, x1, basis, jmax=4):
    """Compact-in-x1, Dirichlet-in-x2 field with its partial derivatives (nodal) and mode coefficients."""
    n_terms = int(rng.integers(1, 4))
    c = np.zeros((x1.size, basis.n2), dtype=complex)
    dc = np.zeros_like(c)
    for _ in range(n_terms):
        u, du = _random_bumps(rng, x1, n_terms=1)
        amps = (rng.standard_normal(jmax) + 1j * rng.standard_normal(jmax)) / np.arange(1, jmax + 1) ** 1.5
        c[:, :jmax] += np.outer(u, amps)
        dc[:, :jmax] += np.outer(du, amps)
    return c, dc


def gn_inequality_2d(trials=1000, seed=0, n1=512, n2=31):
    """||u||_4^4 <= 4 ||u||_2^2 ||d1 u||_2 ||d2 u||_2 on the strip."""
    x1 = np.arange(n1) * (TWO_PI / n1)
    basis = TransverseBasis(n2)
    h1 = TWO_PI / n1
    lhs, rhs = [], []
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        c, dc = _random_strip_field(rng, x1, basis)
        u = basis.backward(c)
        l2sq = np.sum(np.abs(c) ** 2) * h1
        d1 = np.sqrt(np.sum(np.abs(dc) ** 2) * h1)
        d2 = np.sqrt(np.sum(basis.mu * np.abs(c) ** 2) * h1)
        lhs.append(np.sum(np.abs(u) ** 4) * h1 * basis.h2)
        rhs.append(4 * l2sq * d1 * d2)
    return _tally("gn_2d", lhs, rhs, seed)


def linf_ratio(phi, grid):
    """||phi||_inf / (||phi||_2^{1/2} ||phi||_{H2}^{1/2}), the H2 norm being the six-term modal one."""
    l2 = l2_norm(phi, grid)
    if l2 == 0:
        return np.nan
    return float(np.max(np.abs(phi)) / np.sqrt(l2 * sobolev_norm(phi, grid, "H2")))


def interpolation_linf(trials=200, seed=0, n1=256, n2=31):
    """Largest observed L-infinity interpolation ratio over random compact strip fields.

    The constant is not known, so ``violations`` counts only non-finite ratios.
    """
    grid = StripGrid(n1, n2)
    worst = 0.0
    bad = 0
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        c, _ = _random_strip_field(rng, grid.x1, grid.basis)
        r = linf_ratio(grid.basis.backward(c), grid)
        if not np.isfinite(r):
            bad += 1
            continue
        worst = max(worst, r)
    return InequalityReport("interpolation_linf", trials, worst, bad, seed)


def gaussian_on_strip(grid, sigma, center=None):
    c1 = grid.length1 / 2 if center is None else center
    x1, x2 = grid.mesh()
    return np.exp(-((x1 - c1) ** 2 + x2**2) / sigma**2).astype(complex)


def interpolation_scaling_family(scales=(1, 2, 4, 8), sigma=0.2, n1=1024, n2=255):
    """Interpolation ratio along u_s(x) = phi(s x) for an isotropic Gaussian phi."""
    grid = StripGrid(n1, n2)
    return np.array([linf_ratio(gaussian_on_strip(grid, sigma / s), grid) for s in scales])


def spectral_gap_check(trials=1000, seed=0, n1=32, n2=16):
    """<(D2^2 - mu1) phi, phi> >= (1 - mu1/mu2) ||d2 (Id - Pi1) phi||^2, both sides modal."""
    grid = StripGrid(n1, n2)
    mu = grid.mu
    upper, lower = [], []
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        phi = random_field(grid, rng, s=float(rng.uniform(0.5, 2.0)))
        c = grid.basis.forward(phi)
        e = np.abs(c) ** 2 * grid.dx1
        upper.append(np.sum((mu - MU1) * e))
        lower.append((1 - MU1 / MU2) * np.sum(mu[1:] * e[:, 1:]))
    # reported ratio is lower/upper, so <= 1 means the bound holds
    return _tally("spectral_gap", lower, upper, seed, tol=1e-12)


def regularize_check(trials=1000, seed=0, eps=0.1, eta=1.0, n1=128, n2=8):
    """The three norm bounds of the regulariser on rough random fields."""
    grid = StripGrid(n1, n2)
    worst = 0.0
    bad = 0
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        phi = random_field(grid, rng, s=float(rng.uniform(0.6, 1.2)))
        ratios = regularize_bounds(phi, grid, eps, eta)
        worst = max(worst, max(ratios))
        bad += sum(r > 1 + 1e-10 for r in ratios)
    return InequalityReport("regularize", trials, float(worst), int(bad), seed)


def property_suite(trials=1000, seed=0):
    return [
        gn_inequality_1d(trials, seed),
        gn_inequality_2d(trials, seed),
        spectral_gap_check(trials, seed),
        regularize_check(trials, seed),
        interpolation_linf(max(1, trials // 5), seed),
    ]


# ---------------------------------------------------------------------------
# norm comparisons for P1 and the shifted Hamiltonian

def p1_comparison_constant(u, coeffs):
    """Smallest C making the two-sided P1 vs d1 comparison hold for this u."""
    from .spectral import apply_p1, d1

    grid = coeffs.grid
    a = l2_norm(apply_p1(u, coeffs), grid)
    b = l2_norm(d1(u, grid, 1), grid)
    c = l2_norm(u, grid)
    eps = coeffs.eps
    # lower: (1 - C eps) b <= a + C eps c ; upper: a + C eps c <= (1 + C eps) b + C eps c
    lower = max(0.0, (b - a) / (eps * (b + c)))
    upper = max(0.0, (a - b) / (eps * b)) if b > 0 else 0.0
    return max(lower, upper)


def graph_norm_ratio(u, coeffs):
    """(||(H - mu1/eps^2) u|| + ||u||) / (||D1^2 u|| + eps^-2 ||(D2^2 - mu1) u|| + ||u||)."""
    from .spectral import apply_h_eps_shifted

    grid = coeffs.grid
    num = l2_norm(apply_h_eps_shifted(u, coeffs), grid) + l2_norm(u, grid)
    return num / sobolev_norm(u, grid, "H2", eps_weighted=True, eps=coeffs.eps)


def band_limited(u, grid, kmax):
    """Zero Fourier modes with |k| > kmax (keeps products resolvable)."""
    uh = to_modal(u, grid)
    uh[np.abs(grid.k) > kmax, :] = 0
    return to_nodal(uh, grid)


# ---------------------------------------------------------------------------
# fitting

def fit_slope(x, y):
    """Least-squares line through (log2 x, log2 y): slope, intercept, residual norm."""
    lx = np.log2(np.asarray(x, dtype=float))
    ly = np.log2(np.asarray(y, dtype=float))
    if lx.size < 2:
        raise ValueError("need at least two points to fit a slope")
    A = np.column_stack([lx, np.ones_like(lx)])
    coef, res, *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = float(np.linalg.norm(A @ coef - ly))
    return float(coef[0]), float(coef[1]), resid


def residual_rates(curve, phi_factory, eps_list, grid, lam=1.0):
    """||R_eps(phi)|| and ||S_eps(phi)|| over an eps sweep; phi_factory(eps) builds the field."""
    from .geometry import build_coefficients

    r, s = [], []
    for eps in eps_list:
        coeffs = build_coefficients(curve, eps, grid)
        phi = phi_factory(eps)
        r.append(l2_norm(residual_r(phi, coeffs), grid))
        s.append(l2_norm(residual_s(phi, coeffs, lam), grid))
    return np.array(r), np.array(s)


__all__ = [
    "InequalityReport",
    "eigenfunction",
    "fit_slope",
    "gn_inequality_1d",
    "gn_inequality_2d",
    "graph_norm_ratio",
    "interpolation_linf",
    "interpolation_scaling_family",
    "p1_comparison_constant",
    "periodic_constant_counterexample",
    "projected_residual_check",
    "property_suite",
    "regularize",
    "regularize_bounds",
    "regularize_check",
    "reports_to_csv",
    "residual_r",
    "residual_rates",
    "residual_s",
    "spectral_gap_check",
]
