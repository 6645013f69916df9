"""Curves given by their curvature, the tube map and the metric coefficients.

A curve is described by kappa on M (the circle R/2piZ for closed curves, a
periodic box of length ``L_box`` standing in for R for open ones). Everything
the PDEs need depends on kappa alone; the embedding gamma and the normal nu are
rebuilt from it by integrating the tangent angle.
"""

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
import logging

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicSpline

from . import _kernels
from .errors import (
    ClosureViolation,
    DegenerateMetric,
    EpsilonOutOfRange,
    GridMismatch,
    NonUnitSpeed,
    SelfIntersection,
    ValidationError,
)

log = logging.getLogger(__name__)

CLOSED = "closed"
OPEN = "open"

TURNING_TOL = 1e-10
CLOSURE_TOL = 1e-8
OPEN_EDGE_TOL = 1e-12
_DENSE = 4096


@dataclass(frozen=True, eq=False)
class CurveSpec:
    """Curvature description of a planar curve (hashable by identity)."""

    name: str
    domain_kind: str
    length: float
    kappa: object
    kappa_d1: object
    kappa_d2: object
    params: dict = field(default_factory=dict)

    def dense_x(self, n=_DENSE):
        return np.arange(n) * (self.length / n)

    @cached_property
    def sup_kappa(self):
        return float(np.max(np.abs(self.kappa(self.dense_x()))))

    def sup_norms(self):
        x = self.dense_x()
        return tuple(float(np.max(np.abs(f(x)))) for f in (self.kappa, self.kappa_d1, self.kappa_d2))

    def default_eps0(self, cap=None):
        """0.99/sup|kappa|, intersected with an optional user cap."""
        eps0 = np.inf if self.sup_kappa == 0 else 0.99 / self.sup_kappa
        if cap is not None:
            eps0 = min(eps0, float(cap))
        return eps0

    def validate(self):
        if self.domain_kind not in (CLOSED, OPEN):
            raise ValidationError(f"unknown domain kind {self.domain_kind!r}")
        if not all(np.isfinite(self.sup_norms())):
            raise ValidationError(f"curve {self.name!r}: kappa or its derivatives are not bounded")
        if self.domain_kind == CLOSED:
            if not np.isclose(self.length, 2 * np.pi, rtol=0, atol=1e-12):
                raise ValidationError("closed curves live on R/2piZ; other periods are not supported")
            turning = float(np.sum(self.kappa(self.dense_x())) * self.length / _DENSE)
            if abs(turning - 2 * np.pi) > TURNING_TOL:
                raise ClosureViolation(
                    f"curve {self.name!r}: total curvature {turning:.12g} differs from 2*pi"
                )
        else:
            edges = np.abs(self.kappa(np.array([0.0, self.length])))
            if np.max(edges) > OPEN_EDGE_TOL:
                raise ValidationError(
                    f"curve {self.name!r}: kappa is not compactly supported in the box "
                    f"(edge values {edges})"
                )
        return self


# ---------------------------------------------------------------------------
# built-in curves

def circle():
    one = lambda x: np.ones_like(np.asarray(x, dtype=float))  # noqa: E731
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))  # noqa: E731
    return CurveSpec("circle", CLOSED, 2 * np.pi, one, zero, zero)


def line(L_box=2 * np.pi, domain_kind=OPEN):
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))  # noqa: E731
    return CurveSpec("line", domain_kind, float(L_box), zero, zero, zero, {"L_box": L_box})


def perturbed_circle(a=0.3, n=2):
    """kappa = 1 + a cos(n x1); closes only for integer n >= 2 (or a = 0)."""
    n = int(n)
    if n < 1:
        raise ValidationError("perturbed_circle needs an integer n >= 1")
    return CurveSpec(
        "perturbed_circle",
        CLOSED,
        2 * np.pi,
        lambda x: 1.0 + a * np.cos(n * np.asarray(x)),
        lambda x: -a * n * np.sin(n * np.asarray(x)),
        lambda x: -a * n * n * np.cos(n * np.asarray(x)),
        {"a": a, "n": n},
    )


def _smooth_bump(s):
    """exp(1 - 1/(1 - s^2)) on |s| < 1, zero outside, with two derivatives in s."""
    s = np.asarray(s, dtype=float)
    inside = np.abs(s) < 1
    q = np.where(inside, 1.0 - s * s, 1.0)
    f = np.where(inside, np.exp(1.0 - 1.0 / q), 0.0)
    # d/ds of -1/q is -2s/q^2
    g1 = -2 * s / q**2
    g2 = -2 / q**2 - 8 * s * s / q**3
    return f, f * g1, f * (g1 * g1 + g2)


def bump(L_box=20.0, a=0.5, width=2.0, center=None):
    """Open curve bent by a compactly supported curvature bump of height a."""
    L_box = float(L_box)
    c = L_box / 2 if center is None else float(center)
    if c - width <= 0 or c + width >= L_box:
        raise ValidationError("bump support must lie inside the box")

    def k(x, d=0):
        f = _smooth_bump((np.asarray(x) - c) / width)[d]
        return a * f / width**d

    return CurveSpec(
        "bump",
        OPEN,
        L_box,
        lambda x: k(x, 0),
        lambda x: k(x, 1),
        lambda x: k(x, 2),
        {"L_box": L_box, "a": a, "width": width, "center": c},
    )


def from_samples(values, domain_kind=CLOSED, length=2 * np.pi, name="samples"):
    """Curvature from uniform samples, extended by trigonometric interpolation."""
    values = np.asarray(values, dtype=float)
    n = values.size
    vh = np.fft.fft(values) / n
    q = np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0:
        q[n // 2] = 0.0
        vh[n // 2] = 0.0
    w = 2 * np.pi / length

    def series(x, d):
        x = np.asarray(x, dtype=float)
        ph = np.exp(1j * w * np.multiply.outer(x, q))
        return np.real(ph @ (vh * (1j * w * q) ** d))

    return CurveSpec(
        name,
        domain_kind,
        float(length),
        lambda x: series(x, 0),
        lambda x: series(x, 1),
        lambda x: series(x, 2),
        {"n_samples": n},
    )


BUILTIN = {
    "circle": lambda p, L: circle(),
    "line": lambda p, L: line(L),
    "perturbed_circle": lambda p, L: perturbed_circle(p.get("a", 0.3), p.get("n", 2)),
    "bump": lambda p, L: bump(L, p.get("a", 0.5), p.get("width", 2.0), p.get("center")),
}


def builtin_curve(name, params=None, L_box=None):
    params = dict(params or {})
    if name not in BUILTIN:
        raise ValidationError(f"unknown curve {name!r}; built-ins are {sorted(BUILTIN)}")
    L = float(L_box) if L_box is not None else (20.0 if name == "bump" else 2 * np.pi)
    return BUILTIN[name](params, L).validate()


# ---------------------------------------------------------------------------
# embedding

@dataclass(frozen=True, eq=False)
class CurveEmbedding:
    x1: np.ndarray
    angle: np.ndarray
    gamma: np.ndarray  # (n, 2)
    tangent: np.ndarray
    normal: np.ndarray
    closure_residual: float
    spec: CurveSpec

    @cached_property
    def _splines(self):
        return (
            CubicSpline(self.x1, self.gamma, axis=0),
            CubicSpline(self.x1, self.angle),
        )

    def evaluate(self, x1):
        """gamma(x1) and nu(x1) at arbitrary parameters."""
        x1 = np.asarray(x1, dtype=float)
        if self.spec.domain_kind == CLOSED:
            n = self.x1.size
            q = np.fft.fftfreq(n, d=1.0 / n)
            q[n // 2] = 0.0
            ph = np.exp(1j * np.multiply.outer(np.mod(x1, 2 * np.pi), q))
            gh = np.fft.fft(self.gamma, axis=0) / n
            gh[n // 2] = 0.0
            gamma = np.real(ph @ gh)
            # the angle is x1 plus a periodic part
            ah = np.fft.fft(self.angle - self.x1) / n
            ah[n // 2] = 0.0
            angle = np.real(ph @ ah) + x1
        else:
            sg, sa = self._splines
            gamma = sg(x1)
            angle = sa(x1)
        normal = np.stack([-np.sin(angle), np.cos(angle)], axis=-1)
        return gamma, normal


def _spectral_antiderivative(f, length):
    """Antiderivative of uniform periodic samples f, split as mean*x + periodic part, zero at x=0."""
    n = f.shape[0]
    fh = np.fft.fft(f, axis=0)
    mean = fh[0] / n
    k = np.fft.fftfreq(n, d=length / n) * 2 * np.pi
    inv = np.zeros(n, dtype=complex)
    nz = k != 0
    inv[nz] = 1.0 / (1j * k[nz])
    inv[n // 2] = 0.0
    shape = (n,) + (1,) * (f.ndim - 1)
    per = np.fft.ifft(fh * inv.reshape(shape), axis=0)
    x = np.arange(n) * (length / n)
    out = mean * x.reshape(shape) + per - per[0]
    return np.real(out) if np.isrealobj(f) else out, np.real(mean)


def _spectral_derivative(f, length, order=1):
    n = f.shape[0]
    k = np.fft.fftfreq(n, d=length / n) * 2 * np.pi
    if order % 2:
        k[n // 2] = 0.0
    shape = (n,) + (1,) * (f.ndim - 1)
    return np.real(np.fft.ifft((1j * k.reshape(shape)) ** order * np.fft.fft(f, axis=0), axis=0))


def reconstruct_curve(spec, n_samples=256):
    """Rebuild gamma and nu from kappa, starting at gamma(0)=0 with tangent angle 0."""
    if n_samples < 16 or n_samples & (n_samples - 1):
        raise ValidationError("n_samples must be a power of two >= 16")
    L = spec.length
    if spec.domain_kind == CLOSED:
        x = np.arange(n_samples) * (L / n_samples)
        angle, _ = _spectral_antiderivative(spec.kappa(x), L)
        tangent = np.stack([np.cos(angle), np.sin(angle)], axis=1)
        gamma, mean_t = _spectral_antiderivative(tangent, L)
        closure = float(np.hypot(*(mean_t * L)))
        if closure >= CLOSURE_TOL:
            raise ClosureViolation(f"curve {spec.name!r} does not close: residual {closure:.3e}")
        # drop the (tiny) secular drift so gamma is exactly periodic
        gamma = gamma - np.outer(x, mean_t)
        speed = np.hypot(*(_spectral_derivative(gamma, L).T))
        if np.max(np.abs(speed - 1.0)) > 1e-10:
            raise NonUnitSpeed(
                f"|gamma'| deviates from 1 by {np.max(np.abs(speed - 1)):.2e}; increase n_samples"
            )
    else:
        refine = 8
        nf = n_samples * refine
        xf = np.linspace(0.0, L, nf + 1)
        kf = spec.kappa(xf[:-1])
        angle_f, _ = _spectral_antiderivative(kf, L)
        # the angle is mean*x + periodic; extend to the right end point
        total = float(np.sum(kf) * L / nf)
        angle_f = np.append(angle_f, total)
        tan_f = np.stack([np.cos(angle_f), np.sin(angle_f)], axis=1)
        gamma_f = cumulative_simpson(tan_f, x=xf, axis=0, initial=0.0)
        x = xf[:-1:refine]
        angle = angle_f[:-1:refine]
        gamma = gamma_f[:-1:refine]
        tangent = tan_f[:-1:refine]
        closure = 0.0
    normal = np.stack([-tangent[:, 1], tangent[:, 0]], axis=1)
    return CurveEmbedding(x, angle, gamma, tangent, normal, closure, spec)


@lru_cache(maxsize=64)
def _cached_embedding(spec, n_samples):
    return reconstruct_curve(spec, n_samples)


def phi_map(spec, eps, x1, x2, n_samples=256):
    """Tube map gamma(x1) + eps*x2*nu(x1)."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if np.any(np.abs(x2) > 1):
        raise ValidationError("x2 must lie in [-1, 1]")
    if spec.domain_kind == OPEN and (np.any(x1 < 0) or np.any(x1 > spec.length)):
        raise ValidationError("x1 outside the box")
    gamma, normal = _cached_embedding(spec, n_samples).evaluate(x1)
    return gamma + eps * x2[..., None] * normal


# ---------------------------------------------------------------------------
# metric coefficients

@dataclass(frozen=True, eq=False)
class GeometryCoefficients:
    grid: object
    eps: float
    eps0: float
    kappa: np.ndarray
    kappa_d1: np.ndarray
    kappa_d2: np.ndarray
    m: np.ndarray
    v: np.ndarray

    @cached_property
    def m_inv(self):
        return 1.0 / self.m

    @cached_property
    def m_inv_half(self):
        return 1.0 / np.sqrt(self.m)

    @property
    def potential_1d(self):
        """Limit potential -kappa^2/4 on the x1 grid."""
        return -self.kappa**2 / 4.0


def build_coefficients(spec, eps, grid, eps0=None):
    if not np.isclose(grid.length1, spec.length, rtol=1e-12, atol=0):
        raise GridMismatch(f"grid length {grid.length1} differs from curve box {spec.length}")
    eps0_eff = spec.default_eps0(eps0)
    if not (0 < eps < eps0_eff):
        raise EpsilonOutOfRange(f"eps={eps} outside (0, {eps0_eff:.6g})")
    x1 = grid.x1
    kappa = np.asarray(spec.kappa(x1), dtype=float)
    m = 1.0 - eps * np.outer(kappa, grid.x2)
    if np.any(m <= 0):
        raise DegenerateMetric(f"metric factor m_eps has min {m.min():.3e} <= 0")
    v = -(kappa[:, None] ** 2) / (4.0 * m**2)
    return GeometryCoefficients(
        grid=grid,
        eps=float(eps),
        eps0=float(eps0_eff),
        kappa=kappa,
        kappa_d1=np.asarray(spec.kappa_d1(x1), dtype=float),
        kappa_d2=np.asarray(spec.kappa_d2(x1), dtype=float),
        m=m,
        v=v,
    )


# ---------------------------------------------------------------------------
# injectivity (sampled heuristic)

@dataclass
class InjectivityReport:
    ok: bool
    min_pair_distance: float
    pairs: list = field(default_factory=list)


def _outline(spec, eps, n_samples):
    """Tube boundary polylines, with segment bookkeeping for the crossing test."""
    if spec.domain_kind == CLOSED:
        x1 = np.arange(n_samples) * (spec.length / n_samples)
        polys = []
        for side in (1.0, -1.0):
            p = phi_map(spec, eps, x1, np.full_like(x1, side), n_samples=max(256, n_samples))
            polys.append((p, np.c_[x1, np.full_like(x1, side)], True))
    else:
        x1 = np.linspace(0.0, spec.length, n_samples + 1)
        up = phi_map(spec, eps, x1, np.ones_like(x1), n_samples=max(256, n_samples))
        lo = phi_map(spec, eps, x1[::-1], -np.ones_like(x1), n_samples=max(256, n_samples))
        pts = np.vstack([up, lo])
        par = np.vstack([np.c_[x1, np.ones_like(x1)], np.c_[x1[::-1], -np.ones_like(x1)]])
        polys = [(pts, par, True)]
    return polys


def check_injectivity(spec, eps, n_samples=256, raise_on_failure=True):
    """Sampled test that the tube boundary is a simple curve (or two disjoint ones).

    This is a heuristic: boundary samples are joined into polylines and every
    pair of non-adjacent segments is tested for a proper crossing. Overlaps
    thinner than the sampling resolution can be missed.
    """
    seg = {k: [] for k in ("x0", "y0", "x1", "y1", "poly", "idx", "period", "par")}
    vx, vy, vpoly, vidx, vper = [], [], [], [], []
    for pid, (pts, par, closed) in enumerate(_outline(spec, eps, n_samples)):
        n = len(pts)
        nxt = np.roll(np.arange(n), -1) if closed else np.arange(1, n)
        cur = np.arange(n) if closed else np.arange(n - 1)
        seg["x0"].append(pts[cur, 0])
        seg["y0"].append(pts[cur, 1])
        seg["x1"].append(pts[nxt, 0])
        seg["y1"].append(pts[nxt, 1])
        seg["poly"].append(np.full(cur.size, pid))
        seg["idx"].append(cur)
        seg["period"].append(np.full(cur.size, cur.size if closed else 0))
        seg["par"].append(par[cur])
        vx.append(pts[:, 0])
        vy.append(pts[:, 1])
        vpoly.append(np.full(n, pid))
        vidx.append(np.arange(n))
        vper.append(np.full(n, n if closed else 0))
    cat = {k: np.concatenate(v) for k, v in seg.items()}
    crossings = _kernels.segment_crossings(
        cat["x0"], cat["y0"], cat["x1"], cat["y1"], cat["poly"], cat["idx"], cat["period"]
    )
    dmin = _kernels.min_separated_distance(
        np.concatenate(vx), np.concatenate(vy), np.concatenate(vpoly),
        np.concatenate(vidx), np.concatenate(vper), max(2, n_samples // 8),
    )
    pairs = [(tuple(cat["par"][i]), tuple(cat["par"][j])) for i, j in crossings]
    report = InjectivityReport(ok=not pairs, min_pair_distance=dmin, pairs=pairs)
    if pairs and raise_on_failure:
        raise SelfIntersection(
            f"tube boundary of {spec.name!r} at eps={eps} self-intersects ({len(pairs)} crossings)",
            pairs,
        )
    return report
