"""
The tori T = C^3 / (tau Z^3 + 2 Z^3) and A = T / <e1+e2+e3>, the four even
sections theta_ijk spanning the (1,2,2) polarization, the surface
S = {theta_000 + b theta_011 + c theta_101 + d theta_110 = 0}, its base
points, the pencil decomposition along one factor, and the one-variable
sections eta, rho, v3 on the elliptic factors E_k = C / <2, tau_kk>.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import BlockNotSplit, NotDiagonal, NotDivisorChain, NoRootFound
from .theta import (
    DEFAULT_POLICY,
    PeriodMatrix,
    ThetaCharacteristic,
    ThetaJet,
    TruncationPolicy,
    gaussian_scale,
    theta_batch,
)

LABELS = ((0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0))
# coefficient slot of each label in f = theta_000 + b theta_011 + c theta_101 + d theta_110
_COEFF_INDEX = {(0, 1, 1): 0, (1, 0, 1): 1, (1, 1, 0): 2}

MEMBERSHIP_TOL = 1e-9
DIAG = np.ones(3)


@dataclass(frozen=True, eq=False)
class SurfaceSpec:
    tau: PeriodMatrix
    coeffs: tuple
    policy: TruncationPolicy = DEFAULT_POLICY

    def __post_init__(self):
        tau = self.tau if isinstance(self.tau, PeriodMatrix) else PeriodMatrix(self.tau)
        if tau.g != 3:
            raise ValueError("a surface spec needs a 3x3 period matrix")
        coeffs = tuple(complex(x) for x in self.coeffs)
        if len(coeffs) != 3:
            raise ValueError("coefficients must be a triple (b, c, d)")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def b(self):
        return self.coeffs[0]

    @property
    def c(self):
        return self.coeffs[1]

    @property
    def d(self):
        return self.coeffs[2]

    def coefficient(self, label) -> complex:
        label = tuple(label)
        return 1.0 if label == (0, 0, 0) else self.coeffs[_COEFF_INDEX[label]]

    def all_coefficients_nonzero(self) -> bool:
        return all(x != 0 for x in self.coeffs)


@dataclass(frozen=True)
class LatticePoint:
    """lambda = tau m + 2 q + diag_flag * (1, 1, 1)."""

    m: tuple
    q: tuple
    diag_flag: int = 0

    def __post_init__(self):
        if self.diag_flag not in (0, 1):
            raise ValueError("diag_flag must be 0 or 1")

    def vector(self, tau: PeriodMatrix) -> np.ndarray:
        m = np.asarray(self.m, dtype=float)
        return tau.entries @ m + 2 * np.asarray(self.q, dtype=float) + self.diag_flag * DIAG


@dataclass(frozen=True, eq=False)
class TorusPoint:
    z: np.ndarray
    residual: float = 0.0

    def __post_init__(self):
        z = np.array(self.z, dtype=complex)
        z.setflags(write=False)
        object.__setattr__(self, "z", z)


def lattice_generators(tau: PeriodMatrix, with_diag: bool = True) -> list:
    """Generators of the lattice of A (or of T when ``with_diag`` is False)."""
    g = tau.g
    gens = [tau.entries[:, i].copy() for i in range(g)]
    gens += [2 * np.eye(g)[i].astype(complex) for i in range(g)]
    if with_diag:
        gens.append(np.ones(g, dtype=complex))
    return gens


def lattice_distance(z, w, tau: PeriodMatrix, with_diag: bool = True) -> float:
    """Euclidean distance in C^g between z and w modulo the lattice.

    The tau-part is rounded from the real solve ``Y^{-1} Im(z-w)``, neighbours
    are scanned, and the real part is reduced against ``2 Z^g`` (plus the
    coset ``(1,...,1) + 2 Z^g`` on A).
    """
    delta = np.asarray(z, dtype=complex) - np.asarray(w, dtype=complex)
    g = tau.g
    s = tau.imag_inv @ delta.imag
    base = np.round(s)
    best = math.inf
    for off in itertools.product((-1, 0, 1), repeat=g):
        m = base + np.array(off)
        d1 = delta - tau.entries @ m
        r = d1.real
        cands = [2 * np.round(r / 2)]
        if with_diag:
            cands.append(2 * np.round((r - 1) / 2) + 1)
        for cand in cands:
            best = min(best, float(np.linalg.norm(d1 - cand)))
    return best


def reduce_point(z, tau: PeriodMatrix, with_diag: bool = True) -> np.ndarray:
    """Representative of z with tau-coordinates in [0,1) and real part reduced."""
    z = np.asarray(z, dtype=complex)
    s = tau.imag_inv @ z.imag
    z1 = z - tau.entries @ np.floor(s)
    r = z1.real
    if with_diag:
        # use (1,1,1) to bring the last real coordinate into [0,1), then 2Z^g
        k = np.floor(r[-1])
        z1 = z1 - k * DIAG
        r = z1.real
    z1 = z1 - 2 * np.floor(r / 2)
    return z1


def dedup_modulo_lattice(points, tau: PeriodMatrix, radius: float = 1e-6, with_diag: bool = True):
    """Cluster points modulo the lattice, keeping the first of each cluster."""
    kept = []
    for p in points:
        pz = p.z if isinstance(p, TorusPoint) else np.asarray(p)
        if all(lattice_distance(pz, (k.z if isinstance(k, TorusPoint) else k), tau, with_diag) > radius
               for k in kept):
            kept.append(p)
    return kept


# ---------------------------------------------------------------------------
# sections


class SectionEvaluator:
    """Evaluator of theta[(i/2, j/2, k/2), 0](z, tau) with jets."""

    def __init__(self, label, tau: PeriodMatrix, policy: TruncationPolicy):
        self.label = tuple(label)
        self.tau = tau
        self.policy = policy
        self.chi = ThetaCharacteristic.from_bits(self.label)

    def __call__(self, z) -> ThetaJet:
        v, gr, h = theta_batch(np.asarray(z, dtype=complex), self.tau, self.chi, self.policy, order=2)
        return ThetaJet(complex(v), gr, h)

    def batch(self, zs, order: int = 0):
        return theta_batch(zs, self.tau, self.chi, self.policy, order=order)

    def __repr__(self):
        return "theta_" + "".join(map(str, self.label))


def basis_sections(spec: SurfaceSpec) -> dict:
    return {lab: SectionEvaluator(lab, spec.tau, spec.policy) for lab in LABELS}


def sections_batch(spec: SurfaceSpec, zs, order: int = 2):
    """Jets of the four basis sections at many points.

    Returns arrays of shape (4, N), (4, N, 3), (4, N, 3, 3) up to ``order``.
    """
    zs = np.atleast_2d(np.asarray(zs, dtype=complex))
    outs = [theta_batch(zs, spec.tau, ThetaCharacteristic.from_bits(lab), spec.policy, order=order)
            for lab in LABELS]
    if order == 0:
        return np.array(outs)
    return tuple(np.array([o[i] for o in outs]) for i in range(order + 1))


def surface_f_batch(spec: SurfaceSpec, zs, order: int = 2):
    w = np.array([spec.coefficient(lab) for lab in LABELS])
    res = sections_batch(spec, zs, order)
    if order == 0:
        return np.tensordot(w, res, axes=1)
    return tuple(np.tensordot(w, r, axes=1) for r in res)


def surface_f(spec: SurfaceSpec, z) -> ThetaJet:
    """Jet of f = theta_000 + b theta_011 + c theta_101 + d theta_110 at z."""
    v, gr, h = surface_f_batch(spec, np.asarray(z, dtype=complex)[None, :], order=2)
    return ThetaJet(complex(v[0]), gr[0], h[0])


def membership_scale(spec: SurfaceSpec, z) -> float:
    return float(gaussian_scale(np.asarray(z, dtype=complex), spec.tau))


def on_surface(spec: SurfaceSpec, z, tol: float = MEMBERSHIP_TOL) -> bool:
    return abs(surface_f_batch(spec, np.asarray(z)[None, :], order=0)[0]) < tol * membership_scale(spec, z)


# ---------------------------------------------------------------------------
# base points


def _base_representatives(tau: PeriodMatrix) -> dict:
    t11, t22, t33 = np.diag(tau.entries)
    return {
        (0, 0, 0): np.array([(1 + t11) / 2, (1 + t22) / 2, (1 + t33) / 2]),
        (0, 1, 1): np.array([(1 + t11) / 2, 0.5, 0.5]),
        (1, 0, 1): np.array([0.5, (1 + t22) / 2, 0.5]),
        (1, 1, 0): np.array([0.5, 0.5, (1 + t33) / 2]),
    }


_G_TRANSLATIONS = [np.array(v, dtype=complex) for v in ((0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0))]


def base_point_orbits(spec: SurfaceSpec) -> dict:
    """The four orbits B_ijk under G = <e1, e2>, for diagonal tau."""
    if not spec.tau.is_diagonal():
        raise NotDiagonal("closed-form base points need a diagonal period matrix")
    reps = _base_representatives(spec.tau)
    orbits = {}
    for lab, rep in reps.items():
        pts = []
        for t in _G_TRANSLATIONS:
            z = rep + t
            pts.append(TorusPoint(z, abs(surface_f_batch(spec, z[None, :], order=0)[0])))
        orbits[lab] = pts
    return orbits


def base_points(spec: SurfaceSpec) -> list:
    orbits = base_point_orbits(spec)
    return [p for lab in LABELS for p in orbits[lab]]


def base_points_continued(spec: SurfaceSpec, steps: int = 8, tol: float = 1e-12) -> list:
    """Base points for non-diagonal tau by continuation from the diagonal list.

    tau is deformed linearly from its diagonal part; at each step the four
    section vanishings are solved by Gauss-Newton starting from the previous
    solution.
    """
    tau_full = spec.tau.entries
    tau_diag = np.diag(np.diag(tau_full))
    start = SurfaceSpec(PeriodMatrix(tau_diag), spec.coeffs, spec.policy)
    current = [p.z.copy() for p in base_points(start)]
    for step in range(1, steps + 1):
        t = tau_diag + (tau_full - tau_diag) * (step / steps)
        t = (t + t.T) / 2
        sp = SurfaceSpec(PeriodMatrix(t), spec.coeffs, spec.policy)
        current = [_gauss_newton_sections(sp, z0, tol) for z0 in current]
    return [TorusPoint(z, abs(surface_f_batch(spec, z[None, :], order=0)[0])) for z in current]


def _gauss_newton_sections(spec: SurfaceSpec, z0, tol: float, maxiter: int = 50):
    z = np.array(z0, dtype=complex)
    for _ in range(maxiter):
        vals, grads = sections_batch(spec, z[None, :], order=1)
        r = vals[:, 0]
        jac = grads[:, 0, :]
        step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
        z = z + step
        if np.linalg.norm(step) < tol:
            return z
    scale = membership_scale(spec, z)
    if np.max(np.abs(sections_batch(spec, z[None, :], order=0))) > 1e-9 * scale:
        raise NoRootFound("base point continuation did not converge")
    return z


# ---------------------------------------------------------------------------
# pencil decomposition f = f^(ij) theta_0^(k) + g^(ij) theta_1^(k)


class PencilSection:
    """A section on the (i, j) block: sum of coeff * theta[(l_i/2, l_j/2), 0]."""

    def __init__(self, terms, tau_block: PeriodMatrix, policy: TruncationPolicy, name: str):
        self.terms = terms  # list of (coeff, (li, lj))
        self.tau = tau_block
        self.policy = policy
        self.name = name

    def batch(self, ws, order: int = 0):
        ws = np.atleast_2d(np.asarray(ws, dtype=complex))
        acc = None
        for coeff, bits in self.terms:
            r = theta_batch(ws, self.tau, ThetaCharacteristic.from_bits(bits), self.policy, order=order)
            r = (r,) if order == 0 else r
            r = tuple(coeff * x for x in r)
            acc = r if acc is None else tuple(x + y for x, y in zip(acc, r))
        return acc[0] if order == 0 else acc

    def __call__(self, w) -> ThetaJet:
        v, gr, h = self.batch(np.asarray(w, dtype=complex)[None, :], order=2)
        return ThetaJet(complex(v[0]), gr[0], h[0])

    def __repr__(self):
        return self.name


def pencil_axes(k: int) -> tuple:
    """(i, j) zero-based block complementary to the 1-based axis k."""
    if k not in (1, 2, 3):
        raise ValueError("axis must be 1, 2 or 3")
    i, j = [a for a in range(3) if a != k - 1]
    return i, j


def pencil_sections(spec: SurfaceSpec, k: int):
    """(f^(ij), g^(ij)) with f = f^(ij) theta_0(z_k) + g^(ij) theta_1(z_k).

    The coefficient of each label is routed by its bits on the block; the
    k-th row and column of tau off the diagonal must vanish.
    """
    i, j = pencil_axes(k)
    kk = k - 1
    t = spec.tau.entries
    if abs(t[i, kk]) > 0 or abs(t[j, kk]) > 0:
        raise BlockNotSplit(f"tau couples axis {k} to the other two")
    block = PeriodMatrix(t[np.ix_([i, j], [i, j])])
    f_terms, g_terms = [], []
    for lab in LABELS:
        term = (spec.coefficient(lab), (lab[i], lab[j]))
        (f_terms if lab[kk] == 0 else g_terms).append(term)
    name = f"{i + 1}{j + 1}"
    return (PencilSection(f_terms, block, spec.policy, f"f^({name})"),
            PencilSection(g_terms, block, spec.policy, f"g^({name})"))


# ---------------------------------------------------------------------------
# one-variable sections on E = C / <2, tau>


def elliptic_thetas(z, tau_scalar, policy: TruncationPolicy = DEFAULT_POLICY, order: int = 1):
    """theta_0 = theta[0,0](z, tau) and theta_1 = theta[1/2,0](z, tau) with derivatives.

    Returns a list ``[(th0, th1), (dth0, dth1), ...]`` up to ``order``; each
    entry is an array over the input points.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex)).reshape(-1, 1)
    t = PeriodMatrix([[complex(tau_scalar)]])
    outs = []
    for k in (0, 1):
        r = theta_batch(z, t, ThetaCharacteristic.from_bits((k,)), policy, order=order)
        if order == 0:
            r = (r,)
        outs.append([r[0]] + [r[o].reshape(len(z), -1)[:, 0] if o == 1 else r[o][:, 0, 0]
                              for o in range(1, order + 1)])
    return [(outs[0][o], outs[1][o]) for o in range(order + 1)]


def _squeeze(x, like):
    return complex(x[0]) if np.ndim(like) == 0 else x


def eta_section(z, tau_scalar, policy: TruncationPolicy = DEFAULT_POLICY):
    """eta = theta_0 theta_1' - theta_1 theta_0' (Wronskian of the two sections)."""
    (t0, t1), (d0, d1) = elliptic_thetas(z, tau_scalar, policy, order=1)
    return _squeeze(t0 * d1 - t1 * d0, z)


def rho_v3(z3, w3, tau33, policy: TruncationPolicy = DEFAULT_POLICY):
    """(rho_0, rho_1, v3) at (z3, w3).

    rho_j = theta_j(z) theta_j'(w) - theta_j(w) theta_j'(z)
    v3    = theta_0(z) theta_0(w) rho_1 - theta_1(z) theta_1(w) rho_0
    """
    zz = np.atleast_1d(np.asarray(z3, dtype=complex))
    ww = np.atleast_1d(np.asarray(w3, dtype=complex))
    (a0, a1), (da0, da1) = elliptic_thetas(zz, tau33, policy, order=1)
    (b0, b1), (db0, db1) = elliptic_thetas(ww, tau33, policy, order=1)
    rho0 = a0 * db0 - b0 * da0
    rho1 = a1 * db1 - b1 * da1
    v3 = a0 * b0 * rho1 - a1 * b1 * rho0
    return _squeeze(rho0, z3), _squeeze(rho1, z3), _squeeze(v3, z3)


def two_torsion(tau_scalar) -> list:
    """The 2-torsion points 0, 1, tau/2, 1 + tau/2 of C / <2, tau>."""
    t = complex(tau_scalar)
    return [0j, 1 + 0j, t / 2, 1 + t / 2]


def numerical_invariants(polarization_type) -> tuple:
    """(p_g, q, K^(g-1)) of a smooth divisor of the given polarization type."""
    ds = [int(x) for x in polarization_type]
    if not ds or any(x <= 0 for x in ds):
        raise NotDivisorChain("polarization type needs positive entries")
    if any(b % a for a, b in zip(ds, ds[1:])):
        raise NotDivisorChain(f"{ds} is not a divisor chain")
    g = len(ds)
    prod = math.prod(ds)
    return prod + g - 1, g, math.factorial(g) * prod
