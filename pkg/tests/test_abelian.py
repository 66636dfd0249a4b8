import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import jacobi_pair, jacobi_pair_derivative, theta_brute
from thetalab import abelian
from thetalab.abelian import (
    LABELS,
    SurfaceSpec,
    TorusPoint,
    base_points,
    base_points_continued,
    dedup_modulo_lattice,
    elliptic_thetas,
    eta_section,
    lattice_distance,
    numerical_invariants,
    pencil_sections,
    rho_v3,
    sections_batch,
    surface_f_batch,
    two_torsion,
)
from thetalab.errors import BlockNotSplit, NotDiagonal, NotDivisorChain
from thetalab.theta import PeriodMatrix, gaussian_scale


def test_base_points_vanish_under_brute_force_oracle(spec):
    tau = spec.tau.entries.tolist()
    for P in base_points(spec):
        for lab in LABELS:
            v, _, _ = theta_brute(P.z, tau, [k / 2 for k in lab], radius=5)
            assert abs(v) < 1e-12 * gaussian_scale(P.z, spec.tau)


def test_sixteen_distinct_base_points(spec, rng):
    for _ in range(5):
        coeffs = tuple(rng.normal(size=3) + 1j * rng.normal(size=3))
        pts = base_points(SurfaceSpec(spec.tau, coeffs))
        assert len(pts) == 16
        assert len(dedup_modulo_lattice(pts, spec.tau, 1e-6)) == 16
        Z = np.array([p.z for p in pts])
        assert np.max(np.abs(sections_batch(spec, Z, order=0)) / gaussian_scale(Z, spec.tau)) < 1e-9


def test_base_points_are_two_torsion_on_A(spec):
    # 2P lies in the lattice of A: the distance from 2P to 0 vanishes
    for P in base_points(spec):
        assert lattice_distance(2 * P.z, np.zeros(3), spec.tau) < 1e-12


def test_base_points_need_diagonal_tau(deformed_spec):
    with pytest.raises(NotDiagonal):
        base_points(deformed_spec)


def test_continued_base_points(deformed_spec):
    pts = base_points_continued(deformed_spec)
    Z = np.array([p.z for p in pts])
    vals = sections_batch(deformed_spec, Z, order=0)
    assert np.max(np.abs(vals) / gaussian_scale(Z, deformed_spec.tau)) < 1e-12
    assert len(dedup_modulo_lattice(pts, deformed_spec.tau, 1e-6)) == 16


def test_f_descends_along_diagonal_translation(spec, rng):
    z = rng.normal(size=(30, 3)) + 0.4j * rng.normal(size=(30, 3))
    a = surface_f_batch(spec, z, 0)
    b = surface_f_batch(spec, z + 1.0, 0)
    assert np.max(np.abs(a - b) / gaussian_scale(z, spec.tau)) < 1e-12


def test_basis_sections_invariant_under_diagonal_translation(spec, rng):
    # theta_abc(z + (1,1,1)) = (-1)^(a+b+c) theta_abc(z) and every label has even weight
    z = rng.normal(size=(10, 3))
    vals = sections_batch(spec, z, order=0)
    moved = sections_batch(spec, z + 1.0, order=0)
    assert np.allclose(vals, moved, atol=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_pencil_identity(spec, rng, k):
    z = rng.normal(size=(40, 3)) + 0.3j * rng.normal(size=(40, 3))
    i, j = abelian.pencil_axes(k)
    fs, gs = pencil_sections(spec, k)
    (t0, t1), = elliptic_thetas(z[:, k - 1], spec.tau.entries[k - 1, k - 1], order=0)
    f = surface_f_batch(spec, z, 0)
    rebuilt = fs.batch(z[:, [i, j]]) * t0 + gs.batch(z[:, [i, j]]) * t1
    assert np.max(np.abs(rebuilt - f) / gaussian_scale(z, spec.tau)) < 1e-12


def test_pencil_needs_split_block(deformed_spec):
    with pytest.raises(BlockNotSplit):
        pencil_sections(deformed_spec, 1)
    pencil_sections(deformed_spec, 3)


def test_elliptic_thetas_match_mpmath():
    t = 0.2 + 1.3j
    z = np.array([0.3 + 0.1j, -0.7 + 0.4j, 1.1])
    (t0, t1), (d0, d1) = elliptic_thetas(z, t)
    for k in range(3):
        a0, a1 = jacobi_pair(z[k], t)
        b0, b1 = jacobi_pair_derivative(z[k], t)
        assert abs(t0[k] - a0) < 1e-14 and abs(t1[k] - a1) < 1e-14
        assert abs(d0[k] - b0) < 1e-13 and abs(d1[k] - b1) < 1e-13


@pytest.mark.parametrize("t", [1j, 1.3j, 0.7j, 0.25 + 0.9j])
def test_eta_vanishes_on_two_torsion(t):
    for s in two_torsion(t):
        assert abs(eta_section(s, t)) < 1e-12


def test_eta_has_exactly_the_torsion_zeros():
    # argument principle on the cell [0, 2] x [0, tau]: four zeros
    t = 1.3j
    shift = 0.1 + 0.07j
    corners = [shift, 2 + shift, 2 + t + shift, t + shift]
    n = 4000
    path = np.concatenate([np.linspace(corners[k], corners[(k + 1) % 4], n, endpoint=False) for k in range(4)])
    vals = eta_section(path, t)
    winding = np.sum(np.angle(np.roll(vals, -1) / vals)) / (2 * np.pi)
    assert round(winding) == 4
    assert abs(winding - 4) < 1e-6


def test_v3_is_antisymmetric(rng):
    t = 0.7j
    z = rng.normal(size=20) + 0.3j * rng.normal(size=20)
    w = rng.normal(size=20) + 0.3j * rng.normal(size=20)
    assert np.allclose(rho_v3(z, w, t)[2], -rho_v3(w, z, t)[2], atol=1e-12)


def test_v3_on_antidiagonal_expanded_form(rng):
    t = 0.7j
    z = 2 * rng.random(50) + t * rng.random(50)
    _, _, v3 = rho_v3(z, -z, t)
    (t0, t1), = elliptic_thetas(z, t, order=0)
    assert np.allclose(v3, -2 * t0 * t1 * eta_section(z, t), rtol=1e-10, atol=0)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 6), min_size=1, max_size=3))
def test_invariants_of_divisor_chains(seq):
    ds = list(itertools.accumulate(seq, lambda a, b: a * b))
    p_g, q, k2 = numerical_invariants(ds)
    g = len(ds)
    assert q == g
    assert p_g == int(np.prod(ds)) + g - 1
    assert k2 == int(np.prod(ds)) * [1, 1, 2, 6][g]


def test_invariants_of_the_122_polarization():
    assert numerical_invariants((1, 2, 2)) == (6, 3, 24)


def test_invariants_reject_non_chain():
    with pytest.raises(NotDivisorChain):
        numerical_invariants((2, 3))
    with pytest.raises(NotDivisorChain):
        numerical_invariants((0, 1))


def test_lattice_distance_and_dedup(spec):
    z = np.array([0.3 + 0.1j, 0.2, -0.4j])
    lam = spec.tau.entries @ [1, 0, -1] + 2 * np.array([0, 1, 0]) + 1.0
    assert lattice_distance(z, z + lam, spec.tau) < 1e-12
    assert lattice_distance(z, z + 1.0, spec.tau, with_diag=False) > 0.5
    pts = [TorusPoint(z), TorusPoint(z + lam), TorusPoint(z + 0.5)]
    assert len(dedup_modulo_lattice(pts, spec.tau)) == 2


def test_surface_spec_rejects_wrong_shape():
    with pytest.raises(ValueError):
        SurfaceSpec(PeriodMatrix([[1j]]), (1, 1, 1))
