"""
Canonical and Gauss maps of the theta surface S, differential rank, sampling
on S and on the canonical curves W_j, involution checks and the degeneracy
census.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .abelian import (
    MEMBERSHIP_TOL,
    SurfaceSpec,
    TorusPoint,
    dedup_modulo_lattice,
    lattice_distance,
    membership_scale,
    pencil_axes,
    pencil_sections,
    sections_batch,
    surface_f_batch,
    two_torsion,
)
from .errors import (
    AllCoordinatesVanish,
    CensusUnstable,
    DimensionMismatch,
    GradientVanishes,
    NoRootFound,
    NotDiagonal,
)
from .newton import newton_batch
from .theta import PeriodMatrix, gaussian_scale

RANK_TOL = 1e-8
DEGENERACY_TOL = 1e-7
VANISH_TOL = 1e-13
DEDUP_RADIUS = 1e-6


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    coords: np.ndarray
    norm_scale: float = 1.0

    def __post_init__(self):
        c = np.array(self.coords, dtype=complex)
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @classmethod
    def from_vector(cls, v, scale: float = 1.0) -> "ProjectivePoint":
        """Normalize by the entry of largest modulus; raise if all vanish."""
        v = np.asarray(v, dtype=complex)
        k = int(np.argmax(np.abs(v)))
        if abs(v[k]) < VANISH_TOL * scale:
            raise AllCoordinatesVanish(f"all coordinates below {VANISH_TOL:g} x scale")
        return cls(v / v[k], float(abs(v[k])))

    @property
    def dim(self) -> int:
        return len(self.coords) - 1


def chordal_distance(p: ProjectivePoint, q: ProjectivePoint) -> float:
    """Fubini-Study chordal distance sqrt(1 - |<p,q>|^2 / (|p|^2 |q|^2))."""
    a, b = np.asarray(p.coords), np.asarray(q.coords)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    # length of the part of b orthogonal to a; avoids the cancellation in 1 - |<a,b>|^2
    return float(min(1.0, np.linalg.norm(b - np.vdot(a, b) * a)))


@dataclass(frozen=True, eq=False)
class RankReport:
    singular_values: np.ndarray
    rank_estimate: int
    point: TorusPoint

    @property
    def ratio(self) -> float:
        """sigma_4 / sigma_1."""
        s = self.singular_values
        return float(s[-1] / s[0]) if s[0] > 0 else 0.0


# ---------------------------------------------------------------------------
# maps


def _section_data(spec: SurfaceSpec, z, order: int):
    return sections_batch(spec, np.asarray(z, dtype=complex)[None, :], order=order)


def _weights(spec: SurfaceSpec):
    return np.array([1.0, spec.b, spec.c, spec.d])


def canonical_vector(spec: SurfaceSpec, z) -> np.ndarray:
    """Unnormalized [theta_011, theta_101, theta_110, df/dz1, df/dz2, df/dz3]."""
    vals, grads = _section_data(spec, z, 1)
    grad_f = _weights(spec) @ grads[:, 0, :]
    return np.concatenate([vals[1:, 0], grad_f])


def canonical_image(spec: SurfaceSpec, P) -> ProjectivePoint:
    z = P.z if isinstance(P, TorusPoint) else np.asarray(P, dtype=complex)
    return ProjectivePoint.from_vector(canonical_vector(spec, z), membership_scale(spec, z))


def gauss_image(spec: SurfaceSpec, P) -> ProjectivePoint:
    z = P.z if isinstance(P, TorusPoint) else np.asarray(P, dtype=complex)
    grad = canonical_vector(spec, z)[3:]
    try:
        return ProjectivePoint.from_vector(grad, membership_scale(spec, z))
    except AllCoordinatesVanish:
        raise GradientVanishes("gradient of f vanishes at the point") from None


def diff_rank_matrix_entries(spec: SurfaceSpec, z) -> np.ndarray:
    """The 4x7 matrix [values; d/dz1; d/dz2; d/dz3] of
    (theta_000, theta_011, theta_101, theta_110, df/dz1, df/dz2, df/dz3)."""
    vals, grads, hess = _section_data(spec, z, 2)
    w = _weights(spec)
    grad_f = w @ grads[:, 0, :]
    hess_f = np.tensordot(w, hess[:, 0], axes=1)
    mat = np.empty((4, 7), dtype=complex)
    mat[0, :4] = vals[:, 0]
    mat[0, 4:] = grad_f
    mat[1:, :4] = grads[:, 0, :].T
    mat[1:, 4:] = hess_f
    return mat


def diff_rank_matrix(spec: SurfaceSpec, P, rank_tol: float = RANK_TOL) -> RankReport:
    z = P.z if isinstance(P, TorusPoint) else np.asarray(P, dtype=complex)
    point = P if isinstance(P, TorusPoint) else TorusPoint(z)
    s = np.linalg.svd(diff_rank_matrix_entries(spec, z), compute_uv=False)
    rank = int(np.sum(s > rank_tol * s[0])) if s[0] > 0 else 0
    return RankReport(s, rank, point)


# ---------------------------------------------------------------------------
# systems for Newton


def _f_system_z3(spec: SurfaceSpec, z12):
    def system(X):
        Z = np.column_stack([np.broadcast_to(z12, (len(X), 2)), X[:, 0]])
        v, g = surface_f_batch(spec, Z, order=1)
        return v[:, None], g[:, 2][:, None, None]
    return system


def _w_system(spec: SurfaceSpec, j: int, frozen_axis: int, frozen_value: complex):
    """f = d_j f = 0 in the two coordinates other than ``frozen_axis``."""
    free = [a for a in range(3) if a != frozen_axis]

    def system(X):
        Z = np.empty((len(X), 3), dtype=complex)
        Z[:, frozen_axis] = frozen_value
        Z[:, free] = X
        v, g, h = surface_f_batch(spec, Z, order=2)
        F = np.column_stack([v, g[:, j]])
        J = np.stack([g[:, free], h[:, j][:, free]], axis=1)
        return F, J
    return system


def _w_pair_system(spec: SurfaceSpec, i: int, j: int):
    def system(X):
        v, g, h = surface_f_batch(spec, X, order=2)
        F = np.column_stack([v, g[:, i], g[:, j]])
        J = np.stack([g, h[:, i], h[:, j]], axis=1)
        return F, J
    return system


def _cell_point(tau: PeriodMatrix, u, v):
    """z = 2 u + tau v for cell coordinates u, v in [0,1)^3."""
    return 2 * np.asarray(u) + tau.entries @ np.asarray(v)


def sample_surface_point(spec: SurfaceSpec, rng_seed, tol: float = MEMBERSHIP_TOL) -> TorusPoint:
    """Random point of S: draw (z1, z2), then Newton in z3 from 8 fixed starts."""
    rng = np.random.default_rng(rng_seed)
    u, v = rng.random(3), rng.random(3)
    z = _cell_point(spec.tau, u, v)
    t33 = spec.tau.entries[2, 2]
    starts = np.array([2 * a + t33 * b for a in (0.125, 0.375, 0.625, 0.875) for b in (0.25, 0.75)])
    res = newton_batch(_f_system_z3(spec, z[:2]), starts[:, None])
    for k in range(len(starts)):
        if not res.converged[k]:
            continue
        Z = np.array([z[0], z[1], res.x[k, 0]])
        v0, g0 = surface_f_batch(spec, Z[None, :], order=1)
        scale = membership_scale(spec, Z)
        if abs(v0[0]) < tol * scale and abs(g0[0, 2]) >= 1e-8 * scale:
            return TorusPoint(Z, float(abs(v0[0])))
    raise NoRootFound("no start converged to a regular root in z3")


def sample_surface_points(spec: SurfaceSpec, n: int, seed: int, tol: float = MEMBERSHIP_TOL) -> list:
    """``n`` surface points; point k uses the stream (seed, k, attempt)."""
    out = []
    for k in range(n):
        for attempt in itertools.count():
            try:
                out.append(sample_surface_point(spec, (seed, k, attempt), tol))
                break
            except NoRootFound:
                if attempt > 50:
                    raise
    return out


def sample_W(spec: SurfaceSpec, j: int, rng_seed, tol: float = MEMBERSHIP_TOL) -> TorusPoint:
    """Point of W_j = S cap {df/dz_j = 0}; one coordinate other than z_j is frozen."""
    if j not in (1, 2, 3):
        raise ValueError("j must be 1, 2 or 3")
    jj = j - 1
    frozen = (jj + 1) % 3
    free = [a for a in range(3) if a != frozen]
    rng = np.random.default_rng(rng_seed)
    tau = spec.tau
    u, v = rng.random(3), rng.random(3)
    z0 = _cell_point(tau, u, v)
    grid = [0.25, 0.75]
    starts = []
    for a, b, c, d in itertools.product(grid, repeat=4):
        s = np.array([2 * a + tau.entries[free[0], free[0]] * b,
                      2 * c + tau.entries[free[1], free[1]] * d])
        starts.append(s + 0.05 * (rng.random(2) - 0.5))
    system = _w_system(spec, jj, frozen, z0[frozen])
    starts = np.array(starts)
    # starts are tried four at a time; the first regular root wins
    for first in range(0, len(starts), 4):
        res = newton_batch(system, starts[first:first + 4])
        for k in np.argsort(res.residual):
            if not res.converged[k]:
                continue
            Z = np.empty(3, dtype=complex)
            Z[frozen] = z0[frozen]
            Z[free] = res.x[k]
            v0, g0 = surface_f_batch(spec, Z[None, :], order=1)
            scale = membership_scale(spec, Z)
            if abs(v0[0]) < tol * scale and abs(g0[0, jj]) < tol * scale:
                return TorusPoint(Z, float(abs(v0[0])))
    raise NoRootFound(f"no root of f = df/dz{j} = 0 found")


def w_pair_roots(spec: SurfaceSpec, i: int, j: int, rng_seed, grid: int = 2,
                 tol: float = MEMBERSHIP_TOL) -> list:
    """All distinct roots of f = d_i f = d_j f = 0 reached from a start grid."""
    ii, jj = i - 1, j - 1
    if ii == jj or not {ii, jj} <= {0, 1, 2}:
        raise ValueError("need two distinct axes in 1..3")
    rng = np.random.default_rng(rng_seed)
    tau = spec.tau
    pts = (np.arange(grid) + 0.5) / grid
    starts = []
    for cell in itertools.product(pts, repeat=6):
        u, v = np.array(cell[:3]), np.array(cell[3:])
        starts.append(_cell_point(tau, u, v) + 0.02 * (rng.random(3) - 0.5))
    res = newton_batch(_w_pair_system(spec, ii, jj), np.array(starts))
    found = []
    for k in range(len(starts)):
        if not res.converged[k]:
            continue
        Z = res.x[k]
        if res.residual[k] < tol * membership_scale(spec, Z):
            found.append(TorusPoint(Z, float(res.residual[k])))
    return dedup_modulo_lattice(found, tau, DEDUP_RADIUS)


def sample_W_pair(spec: SurfaceSpec, i: int, j: int, rng_seed, tol: float = MEMBERSHIP_TOL) -> TorusPoint:
    roots = w_pair_roots(spec, i, j, rng_seed, 2, tol)
    if not roots:
        raise NoRootFound(f"no root of f = df/dz{i} = df/dz{j} = 0 found")
    return roots[0]


def involution(P, axes) -> TorusPoint:
    """Apply z_a -> -z_a for each 1-based axis in ``axes``."""
    z = np.array(P.z if isinstance(P, TorusPoint) else P, dtype=complex)
    for a in axes:
        z[a - 1] = -z[a - 1]
    return TorusPoint(z, P.residual if isinstance(P, TorusPoint) else 0.0)


# ---------------------------------------------------------------------------
# census of rank degeneracy


def _pencil_system(fsec, gsec):
    def system(X):
        fv, fg = fsec.batch(X, order=1)
        gv, gg = gsec.batch(X, order=1)
        return np.column_stack([fv, gv]), np.stack([fg, gg], axis=1)
    return system


def pencil_common_zeros(spec: SurfaceSpec, k: int, grid: int = 4, tol: float = MEMBERSHIP_TOL) -> list:
    """Common zeros of (f^(ij), g^(ij)) on E_i x E_j modulo its lattice."""
    fsec, gsec = pencil_sections(spec, k)
    block = fsec.tau
    pts = (np.arange(grid) + 0.5) / grid
    starts = []
    for a, b, c, d in itertools.product(pts, repeat=4):
        starts.append(2 * np.array([a, c]) + block.entries @ np.array([b, d]))
    res = newton_batch(_pencil_system(fsec, gsec), np.array(starts))
    found = []
    for kk in range(len(starts)):
        if res.converged[kk] and res.residual[kk] < tol * gaussian_scale(res.x[kk], block):
            found.append(res.x[kk])
    return dedup_modulo_lattice(found, block, DEDUP_RADIUS, with_diag=False)


@dataclass
class CensusResult:
    reports: list
    per_axis_block_zeros: dict
    per_axis_points: dict

    @property
    def count(self) -> int:
        return len(self.reports)


def census_points(spec: SurfaceSpec, grid: int = 4) -> tuple:
    """Points z with z_k 2-torsion and f^(ij) = g^(ij) = 0, deduplicated on A."""
    if not spec.tau.is_diagonal():
        raise NotDiagonal("the census needs a diagonal period matrix")
    block_counts, axis_counts = {}, {}
    allpts = []
    for k in (1, 2, 3):
        i, j = pencil_axes(k)
        zeros = pencil_common_zeros(spec, k, grid)
        block_counts[k] = len(zeros)
        pts = []
        for w in zeros:
            for t in two_torsion(spec.tau.entries[k - 1, k - 1]):
                z = np.empty(3, dtype=complex)
                z[[i, j]] = w
                z[k - 1] = t
                pts.append(z)
        pts = dedup_modulo_lattice(pts, spec.tau, DEDUP_RADIUS)
        axis_counts[k] = len(pts)
        allpts.extend(pts)
    allpts = dedup_modulo_lattice(allpts, spec.tau, DEDUP_RADIUS)
    return allpts, block_counts, axis_counts


def rank_census(spec: SurfaceSpec, grid: int = 4, check_refinement: bool = True) -> CensusResult:
    pts, blocks, axes = census_points(spec, grid)
    if check_refinement:
        finer, _, _ = census_points(spec, grid + 1)
        if len(finer) != len(pts):
            raise CensusUnstable(f"grid {grid}: {len(pts)} points, grid {grid + 1}: {len(finer)}")
    reports = []
    for z in pts:
        res = abs(surface_f_batch(spec, z[None, :], order=0)[0])
        reports.append(diff_rank_matrix(spec, TorusPoint(z, float(res))))
    return CensusResult(reports, blocks, axes)


# ---------------------------------------------------------------------------
# orbit classification


@dataclass(frozen=True)
class GroupAction:
    """z -> signs * z + shift, shift a sum of unit vectors e_i."""

    signs: tuple
    shift: tuple

    @property
    def name(self) -> str:
        parts = [f"iota{a + 1}" for a, s in enumerate(self.signs) if s < 0]
        parts += [f"e{a + 1}" for a, t in enumerate(self.shift) if t]
        return "*".join(parts) or "id"

    def apply(self, z) -> np.ndarray:
        return np.asarray(self.signs) * np.asarray(z, dtype=complex) + np.asarray(self.shift)


ALL_ACTIONS = tuple(
    GroupAction(s, t)
    for s in itertools.product((1, -1), repeat=3)
    for t in itertools.product((0, 1), repeat=3)
)


def orbit_classify(spec: SurfaceSpec, P, Q, tol: float = 1e-8) -> list:
    """Group elements g among the 64 sign/half-translation maps with g.P = Q mod lattice."""
    zp = P.z if isinstance(P, TorusPoint) else np.asarray(P)
    zq = Q.z if isinstance(Q, TorusPoint) else np.asarray(Q)
    return [g for g in ALL_ACTIONS if lattice_distance(g.apply(zp), zq, spec.tau) < tol]
