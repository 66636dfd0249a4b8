"""
The genus-9 curve C = {X^2+Y^2+Z^2+T^2 = 0, q(X^2,Y^2,Z^2,T^2) = XYZT} in P^3,
its Z2 x Z2 sign action, the squaring cover onto the quartic model, and the six
canonical sections of (C x C) / (diagonal group x swap).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CertificateFailed, NoRootFound, ZeroVector
from .newton import newton_batch
from .poly import MultiPoly, symbols

# monomials of q in the squares, in coefficient order
Q_MONOMIALS = ((0, 0), (1, 1), (2, 2), (3, 3), (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


@dataclass(frozen=True)
class QuarticModel:
    q_coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(Fraction(c) for c in self.q_coeffs)
        if len(coeffs) != 10:
            raise ValueError("q needs 10 coefficients")
        object.__setattr__(self, "q_coeffs", coeffs)

    def q(self, s):
        """q at the 4-vector ``s`` (the squares); works for numbers or polynomials."""
        return sum(c * s[i] * s[j] for c, (i, j) in zip(self.q_coeffs, Q_MONOMIALS) if c)

    def q_gradient(self, s):
        g = [0, 0, 0, 0]
        for c, (i, j) in zip(self.q_coeffs, Q_MONOMIALS):
            g[i] = g[i] + c * s[j]
            g[j] = g[j] + c * s[i]
        return g


SAMPLE_MODEL = QuarticModel((1, 2, 3, 5, Fraction(1, 10), Fraction(1, 7), Fraction(-1, 5),
                             Fraction(1, 3), Fraction(-1, 9), Fraction(1, 7)))


@dataclass(frozen=True)
class GroupElement:
    label: str
    sign_pattern: tuple

    def act(self, P):
        return tuple(s * p for s, p in zip(self.sign_pattern, P))

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        pattern = tuple(a * b for a, b in zip(self.sign_pattern, other.sign_pattern))
        return next(g for g in GROUP if g.sign_pattern == pattern)


GROUP = (
    GroupElement("id", (1, 1, 1, 1)),
    GroupElement("a", (1, 1, -1, -1)),
    GroupElement("b", (1, -1, 1, -1)),
    GroupElement("ab", (1, -1, -1, 1)),
)


def _check_nonzero(P):
    if all(p == 0 for p in P):
        raise ZeroVector("the zero vector is not a projective point")


def curve_residuals(model: QuarticModel, P):
    """(X^2+Y^2+Z^2+T^2, q(X^2,...,T^2) - XYZT); exact for rational input."""
    _check_nonzero(P)
    X, Y, Z, T = P
    sq = [X * X, Y * Y, Z * Z, T * T]
    return sum(sq), model.q(sq) - X * Y * Z * T


def psi_cover(P):
    _check_nonzero(P)
    return tuple(p * p for p in P)


def quartic_residuals(model: QuarticModel, p):
    """(x+y+z+t, q(x,y,z,t)^2 - xyzt) on the image of the cover."""
    x, y, z, t = p
    return x + y + z + t, model.q(p) ** 2 - x * y * z * t


# ---------------------------------------------------------------------------
# canonical sections


SECTION_NAMES = ("eta01", "eta02", "eta12", "omega45", "omega67", "omega89")


def _det2(a0, a1, b0, b1):
    return a0 * b1 - a1 * b0


def canonical_sections(P0, P1) -> tuple:
    """(eta01, eta02, eta12, omega45, omega67, omega89) at (P0, P1)."""
    X0, Y0, Z0, T0 = P0
    X1, Y1, Z1, T1 = P1
    return (
        _det2(X0 * X0, X1 * X1, Y0 * Y0, Y1 * Y1),
        _det2(X0 * X0, X1 * X1, Z0 * Z0, Z1 * Z1),
        _det2(Y0 * Y0, Y1 * Y1, Z0 * Z0, Z1 * Z1),
        _det2(X0 * Y0, X1 * Y1, Z0 * T0, Z1 * T1),
        _det2(X0 * Z0, X1 * Z1, Y0 * T0, Y1 * T1),
        _det2(X0 * T0, X1 * T1, Y0 * Z0, Y1 * Z1),
    )


PAIR_VARIABLES = ("X0", "Y0", "Z0", "T0", "X1", "Y1", "Z1", "T1")


@dataclass
class Certificate:
    section: str
    element: str
    kind: str  # "diagonal", "swap", "factor0"
    sign: int  # +1 invariant, -1 anti-invariant, 0 neither


def _sign_relation(new: MultiPoly, old: MultiPoly) -> int:
    if new == old:
        return 1
    if new == -old:
        return -1
    return 0


def invariance_certificates(strict: bool = True) -> list:
    """Exact sign behaviour of every section under the group and the swap.

    ``diagonal``: g acting on both factors, must be invariant.
    ``swap``: exchanging the factors, must be anti-invariant.
    ``factor0``: g acting on the first factor only (audit, no requirement).
    """
    v = symbols(PAIR_VARIABLES)
    P0, P1 = tuple(v[:4]), tuple(v[4:])
    base = canonical_sections(P0, P1)
    out = []
    for g in GROUP:
        both = canonical_sections(g.act(P0), g.act(P1))
        first = canonical_sections(g.act(P0), P1)
        for name, s, s_both, s_first in zip(SECTION_NAMES, base, both, first):
            cert = Certificate(name, g.label, "diagonal", _sign_relation(s_both, s))
            if strict and cert.sign != 1:
                raise CertificateFailed(name, g.label)
            out.append(cert)
            out.append(Certificate(name, g.label, "factor0", _sign_relation(s_first, s)))
    swapped = canonical_sections(P1, P0)
    for name, s, s_sw in zip(SECTION_NAMES, base, swapped):
        cert = Certificate(name, "swap", "swap", _sign_relation(s_sw, s))
        if strict and cert.sign != -1:
            raise CertificateFailed(name, "swap")
        out.append(cert)
    return out


def psi_invariance_certificate() -> bool:
    """psi(g.P) == psi(P) as exact polynomials for every g."""
    P = tuple(symbols(("X", "Y", "Z", "T")))
    base = psi_cover(P)
    return all(all(a == b for a, b in zip(psi_cover(g.act(P)), base)) for g in GROUP)


def quartic_pullback_identity(model: QuarticModel) -> bool:
    """q(psi)^2 - xyzt == r2 (r2 + 2 XYZT) with r2 = q(squares) - XYZT, exactly."""
    P = tuple(symbols(("X", "Y", "Z", "T")))
    p = psi_cover(P)
    _, lhs = quartic_residuals(model, p)
    _, r2 = curve_residuals(model, P)
    prod = P[0] * P[1] * P[2] * P[3]
    return lhs == r2 * (r2 + 2 * prod)


# ---------------------------------------------------------------------------
# numerics on the sample curve


def _curve_system(model: QuarticModel, fixed: np.ndarray):
    def system(W):
        n = len(W)
        out_f = np.empty((n, 2), dtype=complex)
        out_j = np.empty((n, 2, 2), dtype=complex)
        for k in range(n):
            X, Y = fixed
            Z, T = W[k]
            P = (X, Y, Z, T)
            r1, r2 = curve_residuals(model, P)
            sq = [p * p for p in P]
            gq = model.q_gradient(sq)
            # d/dZ, d/dT of the two residuals
            out_f[k] = (complex(r1), complex(r2))
            out_j[k] = [[2 * Z, 2 * T],
                        [complex(gq[2]) * 2 * Z - X * Y * T, complex(gq[3]) * 2 * T - X * Y * Z]]
        return out_f, out_j
    return system


def sample_curve_point(model: QuarticModel, rng_seed, tol: float = 1e-12) -> np.ndarray:
    """Curve point with (X, Y) fixed at random rationals, solved in (Z, T)."""
    rng = np.random.default_rng(rng_seed)
    fixed = np.array([Fraction(int(rng.integers(1, 10)), int(rng.integers(1, 10))) for _ in range(2)],
                     dtype=float).astype(complex)
    starts = rng.normal(size=(12, 2)) + 1j * rng.normal(size=(12, 2))
    res = newton_batch(_curve_system(model, fixed), starts)
    for k in np.argsort(res.residual):
        P = np.concatenate([fixed, res.x[k]])
        if res.converged[k] and res.residual[k] < tol * np.max(np.abs(P)) ** 4:
            return P
    raise NoRootFound("no curve point from the starts")


def residual_jacobian(model: QuarticModel, P) -> np.ndarray:
    """2x4 Jacobian of the two residuals."""
    sq = [p * p for p in P]
    gq = model.q_gradient(sq)
    X, Y, Z, T = P
    prods = (Y * Z * T, X * Z * T, X * Y * T, X * Y * Z)
    row2 = [complex(gq[i]) * 2 * P[i] - prods[i] for i in range(4)]
    return np.array([[2 * p for p in P], row2], dtype=complex)


def bitangency_probe(model: QuarticModel, axis: int, tol: float = 1e-8) -> dict:
    """Intersect the coordinate line {coordinate axis = 0} of the plane x+y+z+t=0
    with q^2 = xyzt.

    On that line xyzt vanishes, so the restriction is q^2 and each root should
    be double.  Returns the critical points of the restricted binary quartic h
    together with the relative size of h there.
    """
    others = [i for i in range(4) if i != axis]
    a, b_, last = others

    # parametrize: coordinate a = s, b = 1, last = -s-1 (plane), axis = 0
    def point(s):
        p = [0j, 0j, 0j, 0j]
        p[a], p[b_], p[last] = s, 1.0, -s - 1.0
        return p

    def h(s):
        p = point(s)
        return complex(model.q(p) ** 2 - p[0] * p[1] * p[2] * p[3])

    # coefficients of h from 5 samples (exact degree 4)
    nodes = np.arange(5, dtype=float)
    coeffs = np.polyfit(nodes, [h(s) for s in nodes], 4)
    crit = np.roots(np.polyder(coeffs))
    roots = np.roots(coeffs)
    scale = np.max(np.abs(coeffs))
    vals = [abs(np.polyval(coeffs, r)) / (scale * max(1.0, abs(r)) ** 4) for r in crit]
    double = [r for r, v in zip(crit, vals) if v < tol]
    return {"roots": roots, "critical": crit, "relative_values": vals,
            "double_roots": double, "bitangent": len(double) == 2}
