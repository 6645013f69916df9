"""Strip grid, Fourier/sine transforms, the operators built on them, and norms.

Fields are plain complex ndarrays. A 2D field has shape ``(n1, n2)`` (x1 along
axis 0, interior x2 nodes along axis 1) and a 1D field has shape ``(n1,)``.
Three representations are used:

* nodal        -- values at grid nodes (the default everywhere),
* modal-x2     -- sine coefficients along axis 1, nodal in x1,
* fully modal  -- additionally the unnormalised DFT along axis 0.

Products with variable coefficients are formed nodally; derivatives and the
diagonal propagator act modally.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import GridMismatch, SizeMismatch
from .transverse import MU1, TransverseBasis

fft = np.fft.fft
ifft = np.fft.ifft


def _is_pow2(n):
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class StripGrid:
    """Tensor grid on M x (-1, 1): uniform periodic x1, interior Dirichlet x2."""

    n1: int
    n2: int
    length1: float = 2 * np.pi

    def __post_init__(self):
        if self.n1 < 16 or not _is_pow2(self.n1):
            raise SizeMismatch(f"n1 must be a power of two >= 16, got {self.n1}")
        if self.n2 < 4:
            raise SizeMismatch(f"n2 must be >= 4, got {self.n2}")
        if not self.length1 > 0:
            raise SizeMismatch("length1 must be positive")

    @cached_property
    def basis(self):
        return TransverseBasis(self.n2)

    @cached_property
    def x1(self):
        return np.arange(self.n1) * (self.length1 / self.n1)

    @property
    def x2(self):
        return self.basis.nodes

    @property
    def dx1(self):
        return self.length1 / self.n1

    @property
    def h2(self):
        return self.basis.h2

    @cached_property
    def k(self):
        """Angular wavenumbers in x1; the Nyquist entry is zero.

        Zeroing it keeps D1 Hermitian and makes P1**2 collapse to D1**2 exactly
        when the metric is flat.
        """
        k = np.fft.fftfreq(self.n1, d=self.dx1) * 2 * np.pi
        k[self.n1 // 2] = 0.0
        return k

    @property
    def k2(self):
        return self.k**2

    @property
    def mu(self):
        return self.basis.mu

    @property
    def k_max(self):
        return np.max(np.abs(self.k))

    def mesh(self):
        return np.meshgrid(self.x1, self.x2, indexing="ij")

    def same_as(self, other):
        return (self.n1, self.n2, self.length1) == (other.n1, other.n2, other.length1)


def check_same_grid(a, b):
    if not a.same_as(b):
        raise GridMismatch(f"grid mismatch: {a} vs {b}")


# ---------------------------------------------------------------------------
# representation changes

def to_modal_x2(u, grid):
    return grid.basis.forward(u)


def from_modal_x2(c, grid):
    return grid.basis.backward(c)


def to_modal(u, grid):
    """Nodal -> fully modal (1D: DFT only)."""
    u = np.asarray(u)
    if u.ndim == 1:
        return fft(u)
    return fft(grid.basis.forward(u), axis=0)


def to_nodal(uh, grid):
    uh = np.asarray(uh)
    if uh.ndim == 1:
        return ifft(uh)
    return grid.basis.backward(ifft(uh, axis=0))


# ---------------------------------------------------------------------------
# x1 differentiation and the curved operators

def d1(u, grid, order=1):
    """Fourier derivative d^order/dx1^order along axis 0."""
    u = np.asarray(u)
    if u.shape[0] != grid.n1:
        raise SizeMismatch(f"axis 0 has length {u.shape[0]}, expected n1={grid.n1}")
    mult = (1j * grid.k) ** order
    if u.ndim == 2:
        mult = mult[:, None]
    out = ifft(mult * fft(u, axis=0), axis=0)
    return out.real if np.isrealobj(u) else out


def _D1(u, k):
    # D = -i d/dx1 has multiplier k
    return ifft(k[:, None] * fft(u, axis=0), axis=0)


def apply_p1(u, coeffs):
    """P_{eps,1} u = m^{-1/2} D1 (m^{-1/2} u)."""
    return coeffs.m_inv_half * _D1(coeffs.m_inv_half * u, coeffs.grid.k)


def apply_p1_squared(u, coeffs):
    """P_{eps,1}^2 u = m^{-1/2} D1 (m^{-1} D1 (m^{-1/2} u))."""
    k = coeffs.grid.k
    return coeffs.m_inv_half * _D1(coeffs.m_inv * _D1(coeffs.m_inv_half * u, k), k)


def apply_d2_shifted(u, grid):
    """(D2^2 - mu1) u along axis 1."""
    basis = grid.basis
    return basis.backward(basis.forward(u) * (basis.mu - MU1))


def apply_h_eps_shifted(u, coeffs):
    """(H_eps - mu1/eps^2) u = P1^2 u + eps^-2 (D2^2 - mu1) u."""
    return apply_p1_squared(u, coeffs) + apply_d2_shifted(u, coeffs.grid) / coeffs.eps**2


def linear_symbol(grid, eps):
    """Diagonal symbol k^2 + eps^-2 (mu_j - mu1) of the stiff constant-coefficient part."""
    return grid.k2[:, None] + (grid.mu - MU1)[None, :] / eps**2


def diag_multiplier(grid, eps, t):
    return np.exp(-1j * t * linear_symbol(grid, eps))


def diag_propagator(u, grid, eps, t):
    """exp(-i t (D1^2 + eps^-2 (D2^2 - mu1))) applied to a nodal 2D field."""
    return to_nodal(diag_multiplier(grid, eps, t) * to_modal(u, grid), grid)


def free_propagator_1d(theta, grid, t):
    return ifft(np.exp(-1j * t * grid.k2) * fft(theta))


# ---------------------------------------------------------------------------
# norms

def _modal_energy(u, grid):
    """|coefficient|^2 array normalised so that its sum is the squared L2 norm."""
    uh = to_modal(u, grid)
    return np.abs(uh) ** 2 * (grid.length1 / grid.n1**2)


def l2_norm(u, grid):
    """Nodal quadrature of the L2 norm (equal to the modal value by Parseval)."""
    u = np.asarray(u)
    w = grid.dx1 if u.ndim == 1 else grid.dx1 * grid.h2
    return float(np.sqrt(np.sum(np.abs(u) ** 2) * w))


def l2_norm_modal(u, grid):
    return float(np.sqrt(np.sum(_modal_energy(u, grid))))


def l4_norm4(u, grid):
    u = np.asarray(u)
    w = grid.dx1 if u.ndim == 1 else grid.dx1 * grid.h2
    return float(np.sum(np.abs(u) ** 4) * w)


def sobolev_norm(u, grid, order="L2", eps_weighted=False, eps=None):
    """Discrete Sobolev norms evaluated modally.

    ``H1**2`` sums ``|u|, |D1 u|, |D2 u|`` squared; ``H2**2`` sums the six terms
    ``u, D1u, D2u, D1^2u, D2^2u, D1D2u``. With ``eps_weighted`` the H2 value is
    the graph-style sum ``||D1^2 u|| + eps^-2 ||(D2^2 - mu1) u|| + ||u||`` and the
    H1 value ``||u|| + ||D1 u|| + eps^-1 ||(D2^2 - mu1)^{1/2} u||``.
    """
    order = order.upper()
    if order not in ("L2", "H1", "H2"):
        raise ValueError(f"unknown norm order {order!r}")
    u = np.asarray(u)
    e = _modal_energy(u, grid)
    if u.ndim == 1:
        k2 = grid.k2
        if order == "L2":
            w = 1.0
        elif order == "H1":
            w = 1.0 + k2
        else:
            w = 1.0 + k2 + k2**2
        return float(np.sqrt(np.sum(w * e)))

    k2 = grid.k2[:, None]
    mu = grid.mu[None, :]
    if eps_weighted and order != "L2":
        if eps is None:
            raise ValueError("eps_weighted norms need eps")
        l2 = np.sqrt(e.sum())
        if order == "H1":
            return float(l2 + np.sqrt(np.sum(k2 * e)) + np.sqrt(np.sum((mu - MU1) * e)) / eps)
        return float(np.sqrt(np.sum(k2**2 * e)) + np.sqrt(np.sum((mu - MU1) ** 2 * e)) / eps**2 + l2)
    if order == "L2":
        w = 1.0
    elif order == "H1":
        w = 1.0 + k2 + mu
    else:
        w = 1.0 + k2 + mu + k2**2 + mu**2 + k2 * mu
    return float(np.sqrt(np.sum(w * e)))


def l2_strip_h1_transverse_norm(u, grid):
    """Norm of L2(M, H1(-1, 1)): sqrt of sum_k (1 + mu_k) |c_k|^2 integrated in x1."""
    c = grid.basis.forward(np.asarray(u))
    return float(np.sqrt(np.sum((1.0 + grid.mu) * np.abs(c) ** 2) * grid.dx1))


def transverse_excitation(u, grid):
    """||(Id - Pi1) u|| in L2(M, H1(-1, 1))."""
    c = grid.basis.forward(np.asarray(u))
    return float(np.sqrt(np.sum((1.0 + grid.mu[1:]) * np.abs(c[:, 1:]) ** 2) * grid.dx1))


def error_norm(phi, theta, grid):
    """||phi - theta e1|| in L2(S), computed from the modal split.

    The Pi1 part contributes ``||<phi, e1> - theta||^2`` and the remaining modes
    their full mass.
    """
    phi = np.asarray(phi)
    theta = np.asarray(theta)
    if phi.shape != (grid.n1, grid.n2) or theta.shape != (grid.n1,):
        raise GridMismatch(f"shapes {phi.shape}, {theta.shape} do not match grid {grid}")
    c = grid.basis.forward(phi)
    par = np.sum(np.abs(c[:, 0] - theta) ** 2)
    perp = np.sum(np.abs(c[:, 1:]) ** 2)
    return float(np.sqrt((par + perp) * grid.dx1))


# ---------------------------------------------------------------------------
# random fields for property suites

def random_field(grid, rng, s=1.5, kmax=None, jmax=None):
    """Nodal 2D field with complex Gaussian modal coefficients decaying like (1 + k^2 + mu_j)^-s."""
    shape = (grid.n1, grid.n2)
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    w = (1.0 + grid.k2[:, None] + grid.mu[None, :]) ** (-s)
    if kmax is not None:
        w = w * (np.abs(grid.k)[:, None] <= kmax)
    if jmax is not None:
        w = w * (np.arange(1, grid.n2 + 1)[None, :] <= jmax)
    w[grid.n1 // 2, :] = 0.0
    return to_nodal(z * w * grid.n1, grid)


def random_field_1d(grid, rng, s=1.5, kmax=None):
    z = rng.standard_normal(grid.n1) + 1j * rng.standard_normal(grid.n1)
    w = (1.0 + grid.k2) ** (-s)
    if kmax is not None:
        w = w * (np.abs(grid.k) <= kmax)
    w[grid.n1 // 2] = 0.0
    return ifft(z * w * grid.n1)
