"""
Legendre functions x = theta_0(0) theta_1(z) / (theta_1(0) theta_0(z)) on
E = C / <2, tau>, the affine Legendre model y^2 = (x^2 - 1)(x^2 - a^2), and the
projective alignment between the affine canonical map and the analytic one.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .abelian import SurfaceSpec, TorusPoint, elliptic_thetas
from .canonical import ProjectivePoint, canonical_vector, chordal_distance
from .errors import AlignmentFailed, CalibrationFailed, NotDiagonal, PoleAtZ
from .theta import DEFAULT_POLICY, TruncationPolicy

CALIBRATION_POINT = 0.3 + 0.1j
POLE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class LegendreModel:
    tau_scalar: complex
    policy: TruncationPolicy = DEFAULT_POLICY
    a_param: complex = field(init=False)
    theta_nulls: tuple = field(init=False, repr=False)

    def __post_init__(self):
        t = complex(self.tau_scalar)
        if t.imag <= 0:
            raise ValueError("tau must lie in the upper half-plane")
        object.__setattr__(self, "tau_scalar", t)
        (n0, n1), = elliptic_thetas(0.0, t, self.policy, order=0)
        n0, n1 = complex(n0[0]), complex(n1[0])
        object.__setattr__(self, "theta_nulls", (n0, n1))
        # x(tau/2) from the half-period shift theta_k(z + tau/2) ~ theta_{1-k}(z)
        a = (n0 / n1) ** 2
        if min(abs(a), abs(a - 1), abs(a + 1)) < 1e-12:
            raise ValueError("branch values are not distinct")
        object.__setattr__(self, "a_param", a)


def _jets(model: LegendreModel, z):
    (t0, t1), (d0, d1) = elliptic_thetas(z, model.tau_scalar, model.policy, order=1)
    return t0, t1, d0, d1


def _scale(model: LegendreModel, z):
    y = np.imag(np.atleast_1d(z))
    return np.exp(np.pi * y**2 / model.tau_scalar.imag)


def legendre_x(model: LegendreModel, z):
    t0, t1, _, _ = _jets(model, z)
    if np.any(np.abs(t0) < POLE_TOL * _scale(model, z)):
        raise PoleAtZ("theta_0 vanishes at z")
    n0, n1 = model.theta_nulls
    x = n0 * t1 / (n1 * t0)
    return complex(x[0]) if np.ndim(z) == 0 else x


def legendre_dx(model: LegendreModel, z):
    """dx/dz = theta_0(0) eta(z) / (theta_1(0) theta_0(z)^2)."""
    t0, t1, d0, d1 = _jets(model, z)
    if np.any(np.abs(t0) < POLE_TOL * _scale(model, z)):
        raise PoleAtZ("theta_0 vanishes at z")
    n0, n1 = model.theta_nulls
    dx = n0 * (t0 * d1 - t1 * d0) / (n1 * t0**2)
    return complex(dx[0]) if np.ndim(z) == 0 else dx


def quartic(x, a):
    return (x**2 - 1) * (x**2 - a**2)


def curve_residual(x, y, a):
    """|y^2 - (x^2-1)(x^2-a^2)| relative to (1 + |x|)^4."""
    return np.abs(y**2 - quartic(x, a)) / (1 + np.abs(x)) ** 4


@dataclass(frozen=True, eq=False)
class AffineChart:
    model: LegendreModel
    kappa: complex


def calibrate(model: LegendreModel, z_ref: complex = CALIBRATION_POINT, check_points=None,
              tol: float = 1e-8) -> AffineChart:
    """Fix kappa with y = kappa dx/dz on the curve, from one reference point."""
    x = legendre_x(model, z_ref)
    dx = legendre_dx(model, z_ref)
    kappa = cmath.sqrt(quartic(x, model.a_param)) / dx
    chart = AffineChart(model, kappa)
    pts = np.array(check_points if check_points is not None else [0.7 + 0.05j, 1.3 + 0.2j, -0.4 + 0.15j])
    xs, ys = analytic_to_affine(chart, pts)
    err = float(np.max(curve_residual(xs, ys, model.a_param)))
    if err > tol:
        raise CalibrationFailed(f"curve residual {err:.3g} after calibration")
    return chart


def analytic_to_affine(chart: AffineChart, z):
    """(x, y) on the Legendre curve for z in C / <2, tau>."""
    x = legendre_x(chart.model, z)
    y = chart.kappa * legendre_dx(chart.model, z)
    return x, y


def normalization_candidates(model: LegendreModel, z) -> dict:
    """Largest defect of the Legendre relations under two readings of the
    half-periods on C / <2, tau>.

    ``real_half_doubled``: real half-period 1, imaginary half-period tau/2.
    ``both_doubled``: real half-period 1, imaginary half-period tau.
    """
    a = model.a_param
    t = model.tau_scalar
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    x = legendre_x(model, z)
    out = {}
    for name, h_re, h_im in (("real_half_doubled", 1.0, t / 2), ("both_doubled", 1.0, t)):
        defects = [
            np.abs(legendre_x(model, z + 2 * h_re) - x) / np.abs(x),
            np.abs(legendre_x(model, z + 2 * h_im) - x) / np.abs(x),
            np.abs(legendre_x(model, z + h_re) + x) / np.abs(x),
            np.abs(legendre_x(model, -z) - x) / np.abs(x),
            np.abs(legendre_x(model, z + h_im) * x - a) / abs(a),
            np.atleast_1d(abs(legendre_x(model, 0.0) - 1)),
            np.atleast_1d(abs(legendre_x(model, h_re) + 1)),
            np.atleast_1d(abs(legendre_x(model, h_im) - a) / abs(a)),
            np.atleast_1d(abs(legendre_x(model, h_re + h_im) + a) / abs(a)),
        ]
        out[name] = float(max(np.max(d) for d in defects))
    return out


# ---------------------------------------------------------------------------
# affine model of S and alignment with the analytic canonical map


def renamed_constants(spec: SurfaceSpec):
    """(b', c', d') with f / theta_000 = 1 + b' x2 x3 + c' x1 x3 + d' x1 x2."""
    if not spec.tau.is_diagonal():
        raise NotDiagonal("the affine model needs a diagonal period matrix")
    r = []
    for k in range(3):
        (n0, n1), = elliptic_thetas(0.0, spec.tau.entries[k, k], spec.policy, order=0)
        r.append(complex(n1[0] / n0[0]))
    return spec.b * r[1] * r[2], spec.c * r[0] * r[2], spec.d * r[0] * r[1]


def affine_relation(consts, x) -> complex:
    b, c, d = consts
    x1, x2, x3 = x
    return 1 + b * x2 * x3 + c * x1 * x3 + d * x1 * x2


def affine_relation_defect(consts, x) -> float:
    b, c, d = consts
    x1, x2, x3 = x
    terms = [1, b * x2 * x3, c * x1 * x3, d * x1 * x2]
    return abs(sum(terms)) / max(abs(t) for t in terms)


def affine_tuple(consts, x, y) -> np.ndarray:
    """((b x2 + c x1) y3, (b x3 + d x1) y2, (d x2 + c x3) y1, x1 x2, x1 x3, x2 x3)."""
    b, c, d = consts
    x1, x2, x3 = x
    y1, y2, y3 = y
    return np.array([(b * x2 + c * x1) * y3, (b * x3 + d * x1) * y2, (d * x2 + c * x3) * y1,
                     x1 * x2, x1 * x3, x2 * x3])


def surface_affine_coordinates(spec: SurfaceSpec, charts, P):
    z = P.z if isinstance(P, TorusPoint) else np.asarray(P)
    xs, ys = [], []
    for k in range(3):
        x, y = analytic_to_affine(charts[k], z[k])
        xs.append(x)
        ys.append(y)
    return np.array(xs), np.array(ys)


def surface_charts(spec: SurfaceSpec) -> list:
    return [calibrate(LegendreModel(spec.tau.entries[k, k], spec.policy)) for k in range(3)]


def _unit(v):
    return v / np.linalg.norm(v)


@dataclass
class AlignmentResult:
    matrix: np.ndarray
    validation_error: float
    fit_error: float
    condition_number: float
    relation_defect: float


def fit_projective_map(sources, targets) -> np.ndarray:
    """Least-squares A with A s parallel to t for every pair (s, t)."""
    rows = []
    n = len(sources[0])
    eye = np.eye(n)
    for s, t in zip(sources, targets):
        s, t = _unit(np.asarray(s)), _unit(np.asarray(t))
        proj = eye - np.outer(t, t.conj())
        rows.append(proj @ np.kron(eye, s[None, :]))
    system = np.vstack(rows)
    _, _, vh = np.linalg.svd(system)
    return vh[-1].conj().reshape(n, n)


def basis_alignment(spec: SurfaceSpec, samples, n_fit: int = 12, tol: float = 1e-6) -> AlignmentResult:
    """Fit the linear map from the affine 6-tuple to the analytic canonical
    coordinates on the first ``n_fit`` samples and validate on the rest."""
    if len(samples) < n_fit + 1 or n_fit < 8:
        raise ValueError("need at least 8 fit points and one held-out point")
    charts = surface_charts(spec)
    consts = renamed_constants(spec)
    src, tgt, rel = [], [], []
    for P in samples:
        x, y = surface_affine_coordinates(spec, charts, P)
        rel.append(affine_relation_defect(consts, x))
        src.append(affine_tuple(consts, x, y))
        tgt.append(canonical_vector(spec, P.z if isinstance(P, TorusPoint) else P))
    A = fit_projective_map(src[:n_fit], tgt[:n_fit])

    def err(i):
        return chordal_distance(ProjectivePoint(A @ src[i]), ProjectivePoint(tgt[i]))

    fit_err = max(err(i) for i in range(n_fit))
    val_err = max(err(i) for i in range(n_fit, len(samples)))
    cond = float(np.linalg.cond(A))
    result = AlignmentResult(A, val_err, fit_err, cond, float(max(rel)))
    if val_err > tol:
        raise AlignmentFailed(f"held-out chordal error {val_err:.3g} exceeds {tol:g}")
    return result


def predicted_alignment(spec: SurfaceSpec, charts=None) -> np.ndarray:
    """The alignment implied by the theta quotients, up to an overall factor.

    theta_011 / theta_000 = r2 r3 x2 x3 and df/dz_k / theta_000 = (df'/dx_k) y_k / kappa_k,
    with r_k = theta_1(0) / theta_0(0) on E_k.
    """
    charts = charts or surface_charts(spec)
    r = [charts[k].model.theta_nulls[1] / charts[k].model.theta_nulls[0] for k in range(3)]
    kap = [charts[k].kappa for k in range(3)]
    A = np.zeros((6, 6), dtype=complex)
    # targets: theta_011, theta_101, theta_110, f1, f2, f3
    A[0, 5] = r[1] * r[2]
    A[1, 4] = r[0] * r[2]
    A[2, 3] = r[0] * r[1]
    A[3, 2] = 1 / kap[0]
    A[4, 1] = 1 / kap[1]
    A[5, 0] = 1 / kap[2]
    return A
