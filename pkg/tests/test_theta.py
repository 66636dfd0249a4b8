import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import jacobi_nulls, theta_brute
from thetalab.errors import NonPositiveDefinite, NotInLattice, RadiusExceeded
from thetalab.theta import (
    PeriodMatrix,
    ThetaCharacteristic,
    TruncationPolicy,
    automorphy_factor,
    gaussian_scale,
    lattice_coordinates,
    theta_batch,
    theta_jet,
    theta_value,
)

GENERIC_TAU = [[1.1j, 0.2 + 0.1j, -0.1], [0.2 + 0.1j, 0.9j, 0.05j], [-0.1, 0.05j, 1.2j + 0.3]]


@pytest.mark.parametrize("g", [1, 2, 3])
def test_matches_brute_force_sum(g):
    tau = np.array(GENERIC_TAU)[:g, :g]
    z = np.array([0.3 + 0.2j, -0.4 + 0.1j, 0.2 - 0.3j])[:g]
    for bits in itertools.product((0, 1), repeat=g):
        v, gr, h = theta_brute(z, tau.tolist(), [k / 2 for k in bits], radius=7 if g == 3 else 10)
        jet = theta_jet(z, tau, ThetaCharacteristic.from_bits(bits))
        assert abs(jet.value - v) < 1e-13 * max(1, abs(v))
        assert np.max(np.abs(jet.gradient - np.array(gr))) < 1e-12
        assert np.max(np.abs(jet.hessian - np.array(h))) < 1e-11


def test_characteristic_with_b_matches_brute_force():
    tau = [[1j]]
    v, _, _ = theta_brute([0.1 + 0.05j], tau, [0.5], [0.5])
    assert abs(theta_value([0.1 + 0.05j], tau, ((0.5,), (0.5,))) - v) < 1e-14


def test_jacobi_nulls_at_i():
    t3, t2 = jacobi_nulls(1j)
    # theta_3(e^{-pi}) = pi^{1/4} / Gamma(3/4)
    assert abs(t3 - 1.0864348112133080) < 1e-15
    assert abs(theta_value([0.0], [[1j]]) - t3) < 1e-15
    assert abs(theta_value([0.0], [[1j]], ThetaCharacteristic.from_bits((1,))) - t2) < 1e-15


def test_jacobi_quartic_identity():
    # theta_3^4 = theta_2^4 + theta_4^4
    tau = [[0.3 + 1.1j]]
    t3 = theta_value([0.0], tau)
    t2 = theta_value([0.0], tau, ThetaCharacteristic.from_bits((1,)))
    t4 = theta_value([0.0], tau, ((0,), (0.5,)))
    assert abs(t3**4 - t2**4 - t4**4) < 1e-13


def test_odd_characteristic_vanishes_at_origin():
    assert abs(theta_value([0.0], [[1j]], ((0.5,), (0.5,)))) < 1e-12


def test_even_sections_have_zero_gradient_at_origin(tau):
    for bits in [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)]:
        _, grad = theta_batch(np.zeros(3), tau, ThetaCharacteristic.from_bits(bits), order=1)
        assert np.max(np.abs(grad)) < 1e-10


def test_batch_agrees_with_single_points(rng):
    z = rng.normal(size=(300, 3)) + 1j * rng.normal(size=(300, 3)) * 0.5
    vals, grads = theta_batch(z, GENERIC_TAU, order=1)
    for k in (0, 131, 299):
        v, g = theta_batch(z[k], GENERIC_TAU, order=1)
        assert v == pytest.approx(vals[k], rel=1e-14)
        assert np.allclose(g, grads[k], rtol=1e-13)


def test_radius_doubling_is_stable(rng):
    z = rng.normal(size=(20, 3)) + 0.5j * rng.normal(size=(20, 3))
    a = theta_batch(z, GENERIC_TAU, order=2)
    b = theta_batch(z, GENERIC_TAU, order=2, radius=16)
    scale = gaussian_scale(z, GENERIC_TAU)
    for x, y in zip(a, b):
        diff = np.abs(x - y).reshape(len(z), -1).max(axis=1)
        assert np.all(diff < 1e-11 * scale)


def test_not_positive_definite():
    with pytest.raises(NonPositiveDefinite):
        PeriodMatrix([[1j, 2j], [2j, 1j]])


def test_not_symmetric():
    with pytest.raises(ValueError):
        PeriodMatrix([[1j, 0.1], [0.2, 1j]])


def test_radius_exceeded():
    with pytest.raises(RadiusExceeded):
        theta_batch([0.0], [[0.001j]], policy=TruncationPolicy(max_radius=3))


def test_lattice_coordinates_rejects_non_lattice():
    with pytest.raises(NotInLattice):
        lattice_coordinates([1.0 + 0j], [[1j]])
    m, q = lattice_coordinates(np.array(GENERIC_TAU) @ [1, -2, 0] + [2, 0, 4], GENERIC_TAU)
    assert list(m) == [1, -2, 0] and list(q) == [1, 0, 2]


complex_coord = st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False)


@settings(max_examples=40, deadline=None)
@given(st.lists(complex_coord, min_size=3, max_size=3), st.integers(0, 2), st.booleans(),
       st.tuples(*[st.integers(0, 1)] * 3))
def test_functional_equation_property(z, axis, use_tau, bits):
    tau = PeriodMatrix(GENERIC_TAU)
    z = np.array(z)
    m = np.zeros(3, dtype=int)
    if use_tau:
        m[axis] = 1
        lam = tau.entries[:, axis]
    else:
        lam = 2.0 * np.eye(3)[axis]
    chi = ThetaCharacteristic.from_bits(bits)
    lhs = theta_batch(z + lam, tau, chi)
    phi = automorphy_factor(lam, z, tau, m)
    rhs = phi * theta_batch(z, tau, chi)
    assert abs(lhs - rhs) <= 1e-9 * max(abs(lhs), abs(phi) * gaussian_scale(z, tau))


@settings(max_examples=30, deadline=None)
@given(st.lists(complex_coord, min_size=3, max_size=3), st.tuples(*[st.integers(0, 1)] * 3))
def test_even_characteristics_are_even(z, bits):
    z = np.array(z)
    chi = ThetaCharacteristic.from_bits(bits)
    a, b = theta_batch(z, GENERIC_TAU, chi), theta_batch(-z, GENERIC_TAU, chi)
    assert abs(a - b) <= 1e-12 * gaussian_scale(z, GENERIC_TAU)


@settings(max_examples=30, deadline=None)
@given(st.lists(complex_coord, min_size=3, max_size=3))
def test_hessian_symmetric_and_heat_equation(z):
    # heat equation: d theta / d tau_jj = (1 / 4 pi i) d^2 theta / dz_j^2
    z = np.array(z)
    tau = np.array(GENERIC_TAU)
    _, _, h = theta_batch(z, tau, order=2)
    assert np.allclose(h, h.T, atol=1e-12 * gaussian_scale(z, tau))
    eps = 1e-6
    t_plus, t_minus = tau.copy(), tau.copy()
    t_plus[0, 0] += eps
    t_minus[0, 0] -= eps
    d_tau = (theta_batch(z, t_plus) - theta_batch(z, t_minus)) / (2 * eps)
    assert abs(d_tau - h[0, 0] / (4j * np.pi)) < 1e-6 * gaussian_scale(z, tau) * 10
