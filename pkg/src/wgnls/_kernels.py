"""Pointwise and brute-force kernels with a numba path and a pure-numpy path.

The numba path is used when numba imports and ``WGNLS_NUMBA`` is not set to a
false-ish value ("0", "false", "off", "no"). Both paths are always importable
as ``<name>_numpy`` / ``<name>_numba`` so tests and benchmarks can compare them.
Transforms (FFT, sine matrix products) stay in numpy in either mode.
"""

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_FALSE = {"0", "false", "off", "no"}
USE_NUMBA = numba is not None and os.environ.get("WGNLS_NUMBA", "1").strip().lower() not in _FALSE


def _njit(fn):
    if numba is None:  # pragma: no cover
        return fn
    return numba.njit(cache=True, fastmath=False)(fn)


# --- cubic phase rotation (1D Strang potential + nonlinear substep) ---------

def phase_rotate_numpy(theta, potential, coupling, dt):
    return theta * np.exp(-1j * dt * (potential + coupling * (theta.real**2 + theta.imag**2)))


def _phase_rotate_loop(theta, potential, coupling, dt):
    out = np.empty_like(theta)
    for i in range(theta.shape[0]):
        z = theta[i]
        a = -dt * (potential[i] + coupling * (z.real * z.real + z.imag * z.imag))
        out[i] = z * complex(np.cos(a), np.sin(a))
    return out


# --- local (non-derivative) part of the 2D right-hand side ------------------

def local_terms_numpy(phi, v, minv, lam):
    return (v + lam * minv * (phi.real**2 + phi.imag**2)) * phi


def _local_terms_loop(phi, v, minv, lam):
    out = np.empty_like(phi)
    for i in range(phi.shape[0]):
        z = phi[i]
        out[i] = (v[i] + lam * minv[i] * (z.real * z.real + z.imag * z.imag)) * z
    return out


# --- segment intersection brute force ---------------------------------------

def segment_crossings_numpy(x0, y0, x1, y1, poly, idx, period):
    """Return an (m, 2) array of index pairs i < j of properly crossing segments.

    Adjacent segments of the same polyline share an endpoint and are skipped.
    """
    # orientation of the endpoints of segment j relative to segment i
    def orient(ax, ay, bx, by, px, py):
        return (bx - ax)[:, None] * (py[None, :] - ay[:, None]) - (by - ay)[:, None] * (px[None, :] - ax[:, None])

    o1 = orient(x0, y0, x1, y1, x0, y0)
    o2 = orient(x0, y0, x1, y1, x1, y1)
    cross = (o1 * o2 < 0) & ((o1 * o2).T < 0)
    same = poly[:, None] == poly[None, :]
    d = np.abs(idx[:, None] - idx[None, :])
    per = period[:, None]
    d = np.where(per > 0, np.minimum(d, per - d), d)
    cross &= ~(same & (d <= 1))
    i, j = np.nonzero(np.triu(cross, 1))
    return np.stack([i, j], axis=1).astype(np.int64)


def _segment_crossings_loop(x0, y0, x1, y1, poly, idx, period):
    n = x0.shape[0]
    cap = 64
    out = np.empty((cap, 2), dtype=np.int64)
    m = 0
    for i in range(n):
        ax = x0[i]
        ay = y0[i]
        ex = x1[i] - ax
        ey = y1[i] - ay
        for j in range(i + 1, n):
            if poly[i] == poly[j]:
                d = abs(idx[i] - idx[j])
                if period[i] > 0:
                    d = min(d, period[i] - d)
                if d <= 1:
                    continue
            o1 = ex * (y0[j] - ay) - ey * (x0[j] - ax)
            o2 = ex * (y1[j] - ay) - ey * (x1[j] - ax)
            if o1 * o2 >= 0:
                continue
            fx = x1[j] - x0[j]
            fy = y1[j] - y0[j]
            o3 = fx * (ay - y0[j]) - fy * (ax - x0[j])
            o4 = fx * (y1[i] - y0[j]) - fy * (x1[i] - x0[j])
            if o3 * o4 >= 0:
                continue
            if m == cap:
                cap *= 2
                grown = np.empty((cap, 2), dtype=np.int64)
                grown[:m] = out[:m]
                out = grown
            out[m, 0] = i
            out[m, 1] = j
            m += 1
    return out[:m].copy()


# --- minimal distance between non-neighbouring vertices ---------------------

def min_separated_distance_numpy(x, y, poly, idx, period, window):
    d2 = (x[:, None] - x[None, :]) ** 2 + (y[:, None] - y[None, :]) ** 2
    same = poly[:, None] == poly[None, :]
    sep = np.abs(idx[:, None] - idx[None, :])
    per = period[:, None]
    sep = np.where(per > 0, np.minimum(sep, per - sep), sep)
    d2 = np.where(same & (sep <= window), np.inf, d2)
    return float(np.sqrt(d2.min()))


def _min_separated_distance_loop(x, y, poly, idx, period, window):
    best = np.inf
    n = x.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            if poly[i] == poly[j]:
                d = abs(idx[i] - idx[j])
                if period[i] > 0:
                    d = min(d, period[i] - d)
                if d <= window:
                    continue
            r = (x[i] - x[j]) ** 2 + (y[i] - y[j]) ** 2
            if r < best:
                best = r
    return np.sqrt(best)


if numba is not None:
    _phase_rotate_jit = _njit(_phase_rotate_loop)
    _local_terms_jit = _njit(_local_terms_loop)
    _segment_crossings_jit = _njit(_segment_crossings_loop)
    _min_separated_distance_jit = _njit(_min_separated_distance_loop)
else:  # pragma: no cover
    _phase_rotate_jit = _phase_rotate_loop
    _local_terms_jit = _local_terms_loop
    _segment_crossings_jit = _segment_crossings_loop
    _min_separated_distance_jit = _min_separated_distance_loop


def phase_rotate_numba(theta, potential, coupling, dt):
    theta = np.ascontiguousarray(theta, dtype=np.complex128)
    potential = np.ascontiguousarray(np.broadcast_to(potential, theta.shape), dtype=np.float64)
    return _phase_rotate_jit(theta.ravel(), potential.ravel(), float(coupling), float(dt)).reshape(theta.shape)


def local_terms_numba(phi, v, minv, lam):
    phi = np.ascontiguousarray(phi, dtype=np.complex128)
    v = np.ascontiguousarray(np.broadcast_to(v, phi.shape), dtype=np.float64)
    minv = np.ascontiguousarray(np.broadcast_to(minv, phi.shape), dtype=np.float64)
    return _local_terms_jit(phi.ravel(), v.ravel(), minv.ravel(), float(lam)).reshape(phi.shape)


def segment_crossings_numba(x0, y0, x1, y1, poly, idx, period):
    f = lambda a: np.ascontiguousarray(a, dtype=np.float64)  # noqa: E731
    g = lambda a: np.ascontiguousarray(a, dtype=np.int64)  # noqa: E731
    return _segment_crossings_jit(f(x0), f(y0), f(x1), f(y1), g(poly), g(idx), g(period))


def min_separated_distance_numba(x, y, poly, idx, period, window):
    f = lambda a: np.ascontiguousarray(a, dtype=np.float64)  # noqa: E731
    g = lambda a: np.ascontiguousarray(a, dtype=np.int64)  # noqa: E731
    return float(_min_separated_distance_jit(f(x), f(y), g(poly), g(idx), g(period), int(window)))


if USE_NUMBA:
    phase_rotate = phase_rotate_numba
    local_terms = local_terms_numba
    segment_crossings = segment_crossings_numba
    min_separated_distance = min_separated_distance_numba
else:
    phase_rotate = phase_rotate_numpy
    local_terms = local_terms_numpy
    segment_crossings = segment_crossings_numpy
    min_separated_distance = min_separated_distance_numpy
