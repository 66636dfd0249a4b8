"""
Riemann theta functions with half-integer characteristics.

The convention used throughout the package is

    theta[a, b](z, tau) = sum_{n in Z^g} exp(pi i (n+a)^T tau (n+a) + 2 pi i (n+a)^T (z+b))

The lattice sum is truncated to a box of adaptive radius centred at the
integer point nearest to the Gaussian peak ``-Y^{-1} Im z - a`` (``Y = Im tau``),
so the relative accuracy does not degrade as ``Im z`` grows.  Value, gradient
and Hessian are obtained from the same truncated sum by term-wise
differentiation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import NonPositiveDefinite, NotInLattice, RadiusExceeded

_CHUNK = 128


@dataclass(frozen=True, eq=False)
class PeriodMatrix:
    """A point of the Siegel upper half-space.

    Symmetry is checked exactly; positive definiteness of the imaginary part
    is checked with a Cholesky factorisation.
    """

    entries: np.ndarray
    imag_cholesky: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim == 0:
            m = m.reshape(1, 1)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"period matrix must be square, got shape {m.shape}")
        if not 1 <= m.shape[0] <= 3:
            raise ValueError("only dimensions 1..3 are supported")
        if not np.array_equal(m, m.T):
            raise ValueError("period matrix is not symmetric")
        try:
            chol = np.linalg.cholesky(m.imag)
        except np.linalg.LinAlgError:
            raise NonPositiveDefinite("imaginary part of tau is not positive definite") from None
        m.setflags(write=False)
        chol.setflags(write=False)
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "imag_cholesky", chol)

    @classmethod
    def diagonal(cls, *taus) -> "PeriodMatrix":
        return cls(np.diag(np.array(taus, dtype=complex)))

    @property
    def g(self) -> int:
        return self.entries.shape[0]

    @property
    def imag(self) -> np.ndarray:
        return self.entries.imag

    @property
    def imag_inv(self) -> np.ndarray:
        return np.linalg.inv(self.entries.imag)

    @property
    def lambda_min(self) -> float:
        return float(np.linalg.eigvalsh(self.entries.imag)[0])

    def is_diagonal(self, atol: float = 1e-14) -> bool:
        off = self.entries - np.diag(np.diag(self.entries))
        return bool(np.all(np.abs(off) <= atol))

    def __eq__(self, other):
        return isinstance(other, PeriodMatrix) and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())

    def __repr__(self):
        return f"PeriodMatrix({self.entries.tolist()!r})"


def _reduce_mod1(v) -> tuple:
    return tuple(Fraction(x).limit_denominator(10**6) % 1 for x in v)


@dataclass(frozen=True)
class ThetaCharacteristic:
    """Rational shift pair (a, b), stored reduced modulo 1.

    Reducing ``a`` only reorders the lattice sum; reducing ``b`` multiplies the
    function by ``exp(2 pi i a.m)`` for the removed integer part ``m``.  Every
    caller in this package uses ``b = 0``.
    """

    a: tuple
    b: tuple = None

    def __post_init__(self):
        a = _reduce_mod1(self.a)
        b = _reduce_mod1(self.b) if self.b is not None else tuple(Fraction(0) for _ in a)
        if len(a) != len(b):
            raise ValueError("characteristic halves must have equal length")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "ThetaCharacteristic":
        """Characteristic (bits/2, 0), e.g. ``(0, 1, 1)`` for theta_011."""
        return cls(tuple(Fraction(int(k), 2) for k in bits))

    @property
    def g(self) -> int:
        return len(self.a)

    @property
    def a_vec(self) -> np.ndarray:
        return np.array([float(x) for x in self.a])

    @property
    def b_vec(self) -> np.ndarray:
        return np.array([float(x) for x in self.b])

    def is_even(self) -> bool:
        return sum(4 * x * y for x, y in zip(self.a, self.b)) % 2 == 0


@dataclass(frozen=True)
class TruncationPolicy:
    target_tol: float = 1e-15
    max_radius: int = 40

    def __post_init__(self):
        if not self.target_tol > 0:
            raise ValueError("target_tol must be positive")
        if self.max_radius < 1:
            raise ValueError("max_radius must be >= 1")


DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True, eq=False)
class ThetaJet:
    value: complex
    gradient: np.ndarray
    hessian: np.ndarray


def _as_tau(tau) -> PeriodMatrix:
    return tau if isinstance(tau, PeriodMatrix) else PeriodMatrix(tau)


def _as_char(chi, g) -> ThetaCharacteristic:
    if chi is None:
        return ThetaCharacteristic((0,) * g)
    if isinstance(chi, ThetaCharacteristic):
        return chi
    a, b = chi
    return ThetaCharacteristic(tuple(np.atleast_1d(a)), tuple(np.atleast_1d(b)))


def tail_bound(radius: int, g: int, lam_min: float, shift: float, order: int) -> float:
    """Bound on the scaled tail of the lattice sum outside the box of ``radius``.

    ``shift`` bounds ``|Y^{-1} Im z|_inf``; it enters only through the
    polynomial factors of the differentiated terms.
    """
    total = 0.0
    for r in range(radius + 1, radius + 200):
        shell = (2 * r + 1) ** g - (2 * r - 1) ** g
        poly = (2 * math.pi * (r + 0.5 + shift)) ** order
        term = shell * poly * math.exp(-math.pi * lam_min * (r - 0.5) ** 2)
        total += term
        if term < 1e-300:
            break
    return total


def choose_radius(tau: PeriodMatrix, shift: float, order: int, policy: TruncationPolicy) -> int:
    lam = tau.lambda_min
    for r in range(1, policy.max_radius + 1):
        if tail_bound(r, tau.g, lam, shift, order) < policy.target_tol:
            return r
    raise RadiusExceeded(
        f"tail bound above {policy.target_tol:g} at max_radius={policy.max_radius}"
    )


@lru_cache(maxsize=64)
def _box(g: int, radius: int) -> np.ndarray:
    axes = [np.arange(-radius, radius + 1)] * g
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, g).astype(float)


def theta_batch(z, tau, chi=None, policy: TruncationPolicy = DEFAULT_POLICY,
                order: int = 0, radius: int | None = None):
    """Evaluate theta and optionally its derivatives at many points.

    Parameters
    ----------
    z : array_like, shape (N, g) or (g,)
    order : 0, 1 or 2
        Highest derivative order returned.
    radius : int, optional
        Force the box radius instead of choosing it from the tail bound.

    Returns
    -------
    values, or (values, gradients), or (values, gradients, hessians)
    """
    tau = _as_tau(tau)
    g = tau.g
    chi = _as_char(chi, g)
    if chi.g != g:
        raise ValueError("characteristic dimension does not match tau")
    z = np.asarray(z, dtype=complex)
    single = z.ndim == 1
    z = np.atleast_2d(z)
    if z.shape[1] != g:
        raise ValueError(f"points must have {g} coordinates")

    t = tau.entries
    a = chi.a_vec
    zb = z + chi.b_vec
    c = z.imag @ tau.imag_inv.T  # Y^{-1} Im z, Y symmetric
    shift = float(np.max(np.abs(c))) if len(c) else 0.0
    if radius is None:
        radius = choose_radius(tau, shift, order, policy)
    box = _box(g, radius)
    quad_box = np.einsum("ki,ij,kj->k", box, t, box)

    n_pts = z.shape[0]
    values = np.empty(n_pts, dtype=complex)
    grads = np.empty((n_pts, g), dtype=complex) if order >= 1 else None
    hess = np.empty((n_pts, g, g), dtype=complex) if order >= 2 else None

    for start in range(0, n_pts, _CHUNK):
        sl = slice(start, start + _CHUNK)
        w = np.round(-c[sl] - a) + a  # per-point centre, n0 + a
        lin = w @ t + zb[sl]  # tau w + (z + b), tau symmetric
        const = np.einsum("pi,ij,pj->p", w, t, w) + 2 * np.einsum("pi,pi->p", w, zb[sl])
        expo = 1j * np.pi * (quad_box[None, :] + 2 * (lin @ box.T) + const[:, None])
        e = np.exp(expo)
        values[sl] = e.sum(axis=1)
        if order >= 1:
            u = box[None, :, :] + w[:, None, :]  # n + a
            eu = e[:, :, None] * u
            grads[sl] = 2j * np.pi * eu.sum(axis=1)
            if order >= 2:
                hess[sl] = -4 * np.pi**2 * (eu.transpose(0, 2, 1) @ u)

    out = [values[0] if single else values]
    if order >= 1:
        out.append(grads[0] if single else grads)
    if order >= 2:
        out.append(hess[0] if single else hess)
    return out[0] if order == 0 else tuple(out)


def theta_value(z, tau, chi=None, policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    return complex(theta_batch(z, tau, chi, policy, order=0))


def theta_jet(z, tau, chi=None, policy: TruncationPolicy = DEFAULT_POLICY) -> ThetaJet:
    """Value, gradient and Hessian of theta[chi] at a single point."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    v, gr, h = theta_batch(z, tau, chi, policy, order=2)
    return ThetaJet(complex(v), gr, h)


def gaussian_scale(z, tau) -> np.ndarray:
    """exp(pi Im(z)^T Y^{-1} Im(z)), the natural size of theta at z."""
    tau = _as_tau(tau)
    y = np.atleast_2d(np.asarray(z, dtype=complex)).imag
    s = np.exp(np.pi * np.einsum("pi,ij,pj->p", y, tau.imag_inv, y))
    return s[0] if np.ndim(z) == 1 else s


def lattice_coordinates(lam, tau, atol: float = 1e-9):
    """Solve ``lam = tau m + 2 q`` for integer vectors (m, q).

    Raises NotInLattice when the real solution is not integral within ``atol``.
    """
    tau = _as_tau(tau)
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    m = np.linalg.solve(tau.imag, lam.imag)
    q = (lam.real - tau.entries.real @ m) / 2
    mi, qi = np.round(m), np.round(q)
    if np.max(np.abs(m - mi), initial=0) > atol or np.max(np.abs(q - qi), initial=0) > atol:
        raise NotInLattice(f"{lam} is not in tau Z^g + 2 Z^g")
    return mi.astype(int), qi.astype(int)


def automorphy_factor(lam, z, tau, m=None) -> complex:
    """Multiplier phi with theta(z + lam) = phi * theta(z) on tau Z^g + 2 Z^g.

    ``m`` (the tau-part of ``lam``) may be supplied; otherwise it is solved for.
    """
    tau = _as_tau(tau)
    if m is None:
        m, _ = lattice_coordinates(lam, tau)
    m = np.asarray(m, dtype=float)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    t = tau.entries
    return complex(np.exp(-1j * np.pi * (m @ t @ m) - 2j * np.pi * (m @ z)))
