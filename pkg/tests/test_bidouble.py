from fractions import Fraction

import numpy as np
import pytest
import sympy

from thetalab import bidouble as B
from thetalab.errors import ZeroVector


def test_diagonal_invariance_and_swap_antisymmetry():
    certs = B.invariance_certificates(strict=True)
    assert sum(c.kind == "diagonal" and c.sign == 1 for c in certs) == 24
    assert sum(c.kind == "swap" and c.sign == -1 for c in certs) == 6


def test_single_factor_signs():
    certs = B.invariance_certificates()
    signs = {(c.section, c.element): c.sign for c in certs if c.kind == "factor0"}
    for s in ("eta01", "eta02", "eta12"):
        assert all(signs[(s, g)] == 1 for g in ("a", "b", "ab"))
    assert [signs[("omega45", g)] for g in ("a", "b", "ab")] == [1, -1, -1]
    assert [signs[("omega67", g)] for g in ("a", "b", "ab")] == [-1, 1, -1]
    assert [signs[("omega89", g)] for g in ("a", "b", "ab")] == [-1, -1, 1]


def test_sections_against_sympy():
    X0, Y0, Z0, T0, X1, Y1, Z1, T1 = sympy.symbols("X0 Y0 Z0 T0 X1 Y1 Z1 T1")
    P0, P1 = (X0, Y0, Z0, T0), (X1, Y1, Z1, T1)
    base = B.canonical_sections(P0, P1)
    for g in B.GROUP:
        moved = B.canonical_sections(g.act(P0), g.act(P1))
        assert all(sympy.expand(m - s) == 0 for m, s in zip(moved, base))
    swapped = B.canonical_sections(P1, P0)
    assert all(sympy.expand(m + s) == 0 for m, s in zip(swapped, base))


def test_group_law():
    e, a, b, ab = B.GROUP
    assert a * b == ab and a * a == e and ab * b == a


def test_psi_cover():
    assert B.psi_invariance_certificate()
    assert B.quartic_pullback_identity(B.SAMPLE_MODEL)


def test_residuals_exact_and_zero_vector():
    r1, _ = B.curve_residuals(B.SAMPLE_MODEL, (1, 1j, 1, 1j))
    assert r1 == 0
    r1, r2 = B.curve_residuals(B.SAMPLE_MODEL, (Fraction(1), Fraction(2), Fraction(0), Fraction(1)))
    assert r1 == 6 and isinstance(r2, Fraction)
    with pytest.raises(ZeroVector):
        B.curve_residuals(B.SAMPLE_MODEL, (0, 0, 0, 0))


def test_bitangency():
    for axis in range(4):
        r = B.bitangency_probe(B.SAMPLE_MODEL, axis)
        assert r["bitangent"]
        # double roots are roots of the quartic itself
        for s in r["double_roots"]:
            assert np.min(np.abs(r["roots"] - s)) < 1e-6


def test_sampled_curve_points_are_smooth():
    for s in range(20):
        P = B.sample_curve_point(B.SAMPLE_MODEL, (0, s))
        r1, r2 = B.curve_residuals(B.SAMPLE_MODEL, P)
        scale = np.max(np.abs(P))
        assert abs(r1) < 1e-10 * scale**2 and abs(r2) < 1e-10 * scale**4
        assert np.linalg.matrix_rank(B.residual_jacobian(B.SAMPLE_MODEL, P)) == 2
        p = B.psi_cover(P)
        lin, quart = B.quartic_residuals(B.SAMPLE_MODEL, p)
        assert abs(lin) < 1e-10 * scale**2 and abs(quart) < 1e-9 * scale**8


def test_residual_jacobian_against_finite_differences():
    P = B.sample_curve_point(B.SAMPLE_MODEL, (0, 1))
    J = B.residual_jacobian(B.SAMPLE_MODEL, P)
    h = 1e-6
    for k in range(4):
        e = np.zeros(4, dtype=complex)
        e[k] = h
        plus = np.array(B.curve_residuals(B.SAMPLE_MODEL, P + e), dtype=complex)
        minus = np.array(B.curve_residuals(B.SAMPLE_MODEL, P - e), dtype=complex)
        assert np.allclose((plus - minus) / (2 * h), J[:, k], atol=1e-6)
