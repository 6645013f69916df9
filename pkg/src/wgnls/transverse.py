"""Dirichlet sine basis of the transverse operator on (-1, 1).

Modes are ``e_k(x2) = sin(k*pi*(x2 + 1)/2)``, orthonormal in L2(-1, 1), with
eigenvalues ``mu_k = (k*pi/2)**2`` of ``D_{x2}^2 = -d^2/dx2^2``. The grid uses
the ``n2`` interior nodes ``x2_j = -1 + 2j/(n2 + 1)``; with quadrature weight
``h2 = 2/(n2 + 1)`` the discrete transform is exactly unitary (Parseval).
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import SizeMismatch

MU1 = np.pi**2 / 4
MU2 = np.pi**2
GAMMA = 0.75


def eigenfunction(k, x2):
    return np.sin(k * np.pi * (np.asarray(x2) + 1.0) / 2.0)


@dataclass(frozen=True)
class TransverseBasis:
    n2: int
    _matrix: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n2 < 1:
            raise SizeMismatch(f"n2 must be positive, got {self.n2}")
        j = np.arange(1, self.n2 + 1)
        # S[j, k] = e_k(x2_j); S @ S = (n2 + 1)/2 * I
        s = np.sin(np.pi * np.outer(j, j) / (self.n2 + 1))
        object.__setattr__(self, "_matrix", s.astype(np.complex128))

    @cached_property
    def nodes(self):
        return -1.0 + 2.0 * np.arange(1, self.n2 + 1) / (self.n2 + 1)

    @cached_property
    def mu(self):
        return (np.arange(1, self.n2 + 1) * np.pi / 2.0) ** 2

    @property
    def h2(self):
        return 2.0 / (self.n2 + 1)

    @property
    def mu1(self):
        return MU1

    def _check(self, u):
        if u.shape[-1] != self.n2:
            raise SizeMismatch(f"last axis has length {u.shape[-1]}, expected n2={self.n2}")

    def forward(self, u):
        """Nodal values along the last axis -> modal coefficients."""
        u = np.asarray(u)
        self._check(u)
        return (u @ self._matrix) * self.h2

    def backward(self, c):
        """Modal coefficients along the last axis -> nodal values."""
        c = np.asarray(c)
        self._check(c)
        return c @ self._matrix

    def mode(self, k):
        """Nodal samples of e_k (k starts at 1)."""
        return eigenfunction(k, self.nodes)

    def project_pi1(self, u):
        """Orthogonal projection onto e_1, applied along the last axis."""
        c1 = self.first_coefficient(u)
        return c1[..., None] * self.mode(1)

    def first_coefficient(self, u):
        """<u, e_1> along the last axis (the 1D datum of a 2D field)."""
        u = np.asarray(u)
        self._check(u)
        return (u @ self.mode(1)) * self.h2

    def inner(self, u, v):
        return np.sum(u * np.conj(v), axis=-1) * self.h2


def gamma_coefficient():
    return GAMMA


def gamma_quadrature(n2=64):
    """Quadrature of the integral of e_1**4 over (-1, 1) on the interior nodes."""
    basis = TransverseBasis(n2)
    return float(np.sum(basis.mode(1) ** 4) * basis.h2)
