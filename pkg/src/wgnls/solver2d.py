"""Integrating-factor RK4 for the gauge-removed strip equation.

    i d_t phi = L phi + B(phi),   L = D1^2 + eps^-2 (D2^2 - mu1)
    B(phi) = (P1^2 - D1^2) phi + V phi + lam m^-1 |phi|^2 phi

L is diagonal in the Fourier x sine basis and is integrated exactly; classical
RK4 is applied to w = exp(itL) phi. The state is carried fully modal between
steps, so each right-hand side costs one inverse and one forward transform
plus two x1 FFT pairs for P1^2.
"""

from dataclasses import dataclass, field
import logging

import numpy as np

from . import _kernels
from .errors import GeometryUnavailable, MassDriftExceeded, NonFiniteState, StepRejected, ValidationError, WaveguideError
from .geometry import reconstruct_curve
from .solver1d import DiagnosticsRecord, _substeps
from .spectral import (
    apply_p1,
    apply_p1_squared,
    diag_multiplier,
    error_norm,
    linear_symbol,
    to_modal,
    to_nodal,
    transverse_excitation,
)
from .transverse import MU1

log = logging.getLogger(__name__)

C_SAFE = 0.5


# ---------------------------------------------------------------------------
# right-hand side and one step

def rhs_bounded(phi, coeffs, lam):
    """B(phi) for a nodal field; zero when kappa = 0 and lam = 0."""
    grid = coeffs.grid
    d11 = np.fft.ifft(grid.k2[:, None] * np.fft.fft(phi, axis=0), axis=0)
    return apply_p1_squared(phi, coeffs) - d11 + _kernels.local_terms(phi, coeffs.v, coeffs.m_inv, lam)


def _modal_rhs(uh, coeffs, lam, grid):
    """-i * modal(B(nodal(uh)))."""
    phi = to_nodal(uh, grid)
    nodal = apply_p1_squared(phi, coeffs) + _kernels.local_terms(phi, coeffs.v, coeffs.m_inv, lam)
    out = to_modal(nodal, grid) - grid.k2[:, None] * uh
    return -1j * out


class IFRK4:
    """Lawson (integrating-factor) RK4 stepper on fully modal states."""

    def __init__(self, coeffs, lam, dt):
        self.coeffs = coeffs
        self.lam = float(lam)
        self.grid = coeffs.grid
        self.set_dt(dt)

    def set_dt(self, dt):
        self.dt = float(dt)
        self.e_half = diag_multiplier(self.grid, self.coeffs.eps, 0.5 * self.dt)
        self.e_full = self.e_half * self.e_half

    def step(self, uh):
        h = self.dt
        f = lambda v: _modal_rhs(v, self.coeffs, self.lam, self.grid)  # noqa: E731
        eh, ef = self.e_half, self.e_full
        k1 = f(uh)
        euh = eh * uh
        k2 = f(euh + 0.5 * h * (eh * k1))
        k3 = f(euh + 0.5 * h * k2)
        k4 = f(ef * uh + h * (eh * k3))
        out = ef * uh + (h / 6.0) * (ef * k1 + 2.0 * eh * (k2 + k3) + k4)
        if not np.all(np.isfinite(out)):
            raise StepRejected("non-finite value inside an IF-RK4 stage")
        return out


def step_if_rk4(phi, dt, coeffs, lam):
    """One IF-RK4 step on a nodal field (convenience wrapper)."""
    grid = coeffs.grid
    if dt == 0:
        return np.array(phi, dtype=complex, copy=True)
    return to_nodal(IFRK4(coeffs, lam, dt).step(to_modal(phi, grid)), grid)


def dt_stability(coeffs, lam, phi0):
    grid = coeffs.grid
    kmax = float(np.max(np.abs(coeffs.kappa))) if coeffs.kappa.size else 0.0
    denom = (coeffs.eps * kmax * grid.k_max**2 + float(np.max(np.abs(coeffs.v)))
             + abs(lam) * float(np.max(np.abs(phi0)) ** 2) + 1.0)
    return C_SAFE / denom


def dt_resolving(coeffs, n_modes=3, c_res=1.0):
    """Step that resolves the transverse phase of the first ``n_modes`` modes: dt*omega_j <= c_res."""
    grid = coeffs.grid
    j = min(n_modes, grid.n2)
    omega = (grid.mu[j - 1] - MU1) / coeffs.eps**2
    return c_res / omega


# ---------------------------------------------------------------------------
# conserved quantities

def mass_2d(phi, grid):
    return float(np.sum(np.abs(phi) ** 2) * grid.dx1 * grid.h2)


def energy_2d(phi, coeffs, lam):
    """E_eps(phi), with the transverse kinetic and -mu1/eps^2 terms combined modally."""
    grid = coeffs.grid
    w = grid.dx1 * grid.h2
    p1 = apply_p1(phi, coeffs)
    c = grid.basis.forward(phi)
    transverse = np.sum((grid.mu - MU1) * np.abs(c) ** 2) * grid.dx1 / coeffs.eps**2
    rho = np.abs(phi) ** 2
    return float(
        0.5 * np.sum(np.abs(p1) ** 2) * w
        + 0.5 * transverse
        + 0.5 * np.sum(coeffs.v * rho) * w
        + lam / 4.0 * np.sum(coeffs.m_inv * rho**2) * w
    )


# ---------------------------------------------------------------------------
# problem and run

@dataclass
class Strip2DProblem:
    coeffs: object
    lam: float
    phi0: np.ndarray
    dt: float
    t_end: float
    snapshot_times: list = field(default_factory=list)
    mass_drift_bound: float = 1e-6
    theta_snapshots: list | None = None  # paired 1D states at snapshot_times

    def __post_init__(self):
        grid = self.coeffs.grid
        if np.shape(self.phi0) != (grid.n1, grid.n2):
            raise ValidationError("phi0 does not match the strip grid")
        if not self.dt > 0:
            raise ValidationError("dt must be positive")
        if not self.snapshot_times:
            self.snapshot_times = [0.0, self.t_end]
        ts = np.asarray(self.snapshot_times, dtype=float)
        if np.any(ts < 0) or np.any(ts > self.t_end + 1e-14) or np.any(np.diff(ts) < 0):
            raise ValidationError("snapshot_times must be sorted and inside [0, t_end]")
        if self.theta_snapshots is not None and len(self.theta_snapshots) != len(ts):
            raise ValidationError("theta_snapshots must align with snapshot_times")


@dataclass
class Run2DResult:
    times: list
    snapshots: list
    diagnostics: list
    dt: float


def run2d(problem, keep_snapshots=True):
    coeffs = problem.coeffs
    grid = coeffs.grid
    lam = problem.lam
    dt = problem.dt
    dt_max = dt_stability(coeffs, lam, problem.phi0)
    if dt > dt_max:
        log.warning("dt=%.3g exceeds the stability bound %.3g; using the bound", dt, dt_max)
        dt = dt_max
    stepper = IFRK4(coeffs, lam, dt)
    uh = to_modal(np.asarray(problem.phi0, dtype=complex), grid)
    mass0 = mass_2d(problem.phi0, grid)
    t = 0.0
    stepped = False
    times, snaps, diags = [], [], []
    for i, ts in enumerate(problem.snapshot_times):
        n, h = _substeps(t, ts, dt)
        if n:
            stepped = True
            if h != stepper.dt:
                stepper.set_dt(h)
            try:
                for _ in range(n):
                    uh = stepper.step(uh)
            except StepRejected as exc:
                raise StepRejected(str(exc), time=t) from None
            t = ts
        # before the first step the datum is returned as given, not round-tripped
        phi = to_nodal(uh, grid) if stepped else np.array(problem.phi0, dtype=complex)
        if not np.all(np.isfinite(phi)):
            raise NonFiniteState(f"non-finite 2D state at t={t}", time=t)
        mass = mass_2d(phi, grid)
        if mass0 > 0 and abs(mass - mass0) / mass0 > problem.mass_drift_bound:
            raise MassDriftExceeded(
                f"relative mass drift {abs(mass - mass0) / mass0:.2e} at t={t} exceeds "
                f"{problem.mass_drift_bound:.1e}; reduce dt"
            )
        model_error = None
        if problem.theta_snapshots is not None:
            model_error = error_norm(phi, problem.theta_snapshots[i], grid)
        times.append(float(ts))
        if keep_snapshots:
            snaps.append(phi)
        diags.append(DiagnosticsRecord(
            float(ts), mass, energy_2d(phi, coeffs, lam), transverse_excitation(phi, grid), model_error))
    return Run2DResult(times, snaps, diags, dt)


def exact_linear_flow(phi0, grid, eps, t):
    """Flat guide, no nonlinearity: the exact solution is the diagonal flow."""
    return to_nodal(diag_multiplier(grid, eps, t) * to_modal(phi0, grid), grid)


# ---------------------------------------------------------------------------
# initial data

TENSOR_SMOOTH = "tensor_smooth"
TENSOR_PLUS_EXCITED = "tensor_plus_excited"
ROUGH_H1 = "rough_h1"
FAMILIES = (TENSOR_SMOOTH, TENSOR_PLUS_EXCITED, ROUGH_H1)


def smooth_profile(grid, amplitude=1.0, k0=1, modulation=0.5, width=None):
    """Analytic 1D profile: periodic (1 + b cos x) e^{ik0 x} on 2pi, a Gaussian packet otherwise."""
    x = grid.x1
    if np.isclose(grid.length1, 2 * np.pi):
        return amplitude * (1.0 + modulation * np.cos(x)) * np.exp(1j * k0 * x)
    L = grid.length1
    w = L / 10 if width is None else width
    k0 = 2 * np.pi / L * round(k0 * L / (2 * np.pi))
    return amplitude * np.exp(-(((x - L / 2) / w) ** 2)) * np.exp(1j * k0 * x)


def rough_profile(grid, eps, s=1.1, amplitude=1.0, seed=0):
    """Modes |k| <= round(eps^-1/2) with amplitudes (1 + k^2)^-s and seeded phases."""
    if not 1 < s <= 1.5:
        raise ValidationError("rough_h1 decay exponent s must lie in (1, 1.5]")
    K = max(1, int(round(eps ** -0.5)))
    rng = np.random.default_rng(seed)
    # phases are drawn for a fixed mode range so the low modes agree across eps
    q = np.arange(-64, 65)
    phases = np.exp(2j * np.pi * rng.random(q.size))
    kk = 2 * np.pi / grid.length1 * q
    keep = np.abs(q) <= K
    coef = amplitude * (1.0 + kk**2) ** (-s) * phases * keep
    return np.exp(1j * np.outer(grid.x1, kk[keep])) @ coef[keep]


def initial_data(family, grid, eps, params=None, seed=0):
    """Nodal 2D Cauchy datum for one of the three data families."""
    p = dict(params or {})
    e1 = grid.basis.mode(1)
    if family == TENSOR_SMOOTH:
        theta = smooth_profile(grid, p.get("amplitude", 1.0), p.get("k0", 1), p.get("modulation", 0.5), p.get("width"))
        return np.outer(theta, e1)
    if family == TENSOR_PLUS_EXCITED:
        theta = smooth_profile(grid, p.get("amplitude", 1.0), p.get("k0", 1), p.get("modulation", 0.5), p.get("width"))
        a = p.get("excitation", 1.0) * np.cos(grid.x1 * 2 * np.pi / grid.length1)
        return np.outer(theta, e1) + eps**2 * np.outer(a, grid.basis.mode(2))
    if family == ROUGH_H1:
        theta = rough_profile(grid, eps, p.get("s", 1.1), p.get("amplitude", 1.0), seed)
        return np.outer(theta, e1)
    raise ValidationError(f"unknown data family {family!r}; choose from {FAMILIES}")


def initial_theta(phi0, grid):
    """1D datum <phi0, e1>."""
    return grid.basis.first_coefficient(phi0)


# ---------------------------------------------------------------------------
# back to the physical waveguide

@dataclass
class PhysicalSamples:
    x: np.ndarray
    y: np.ndarray
    psi: np.ndarray
    weight: np.ndarray  # quadrature weight eps*m*dx1*h2 per node

    def l2_norm(self):
        return float(np.sqrt(np.sum(np.abs(self.psi) ** 2 * self.weight)))

    def rows(self):
        return np.column_stack([self.x.ravel(), self.y.ravel(), self.psi.real.ravel(),
                                self.psi.imag.ravel(), (np.abs(self.psi) ** 2).ravel()])


def reconstruct_physical(field, coeffs, curve, t=0.0, embedding=None):
    """Sample psi = eps^-1/2 m^-1/2 e^{-i mu1 t/eps^2} phi at Phi_eps(x1, x2).

    ``field`` is a 2D strip field or a 1D profile theta (then theta*e1 is used).
    """
    grid = coeffs.grid
    field = np.asarray(field)
    if field.ndim == 1:
        field = np.outer(field, grid.basis.mode(1))
    if embedding is None:
        try:
            embedding = reconstruct_curve(curve, grid.n1)
        except WaveguideError as exc:
            raise GeometryUnavailable(f"cannot rebuild the curve: {exc}") from exc
    if embedding.gamma.shape[0] != grid.n1:
        raise GeometryUnavailable("embedding samples do not match the x1 grid")
    eps = coeffs.eps
    pts = embedding.gamma[:, None, :] + eps * grid.x2[None, :, None] * embedding.normal[:, None, :]
    gauge = np.exp(-1j * MU1 * t / eps**2)
    psi = gauge * field / np.sqrt(eps * coeffs.m)
    weight = eps * coeffs.m * grid.dx1 * grid.h2
    return PhysicalSamples(pts[..., 0], pts[..., 1], psi, weight)
