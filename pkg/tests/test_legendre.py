import numpy as np
import pytest

from oracles import jacobi_nulls, jacobi_pair
from thetalab import legendre as L
from thetalab.canonical import sample_surface_point
from thetalab.errors import AlignmentFailed, CalibrationFailed, NotDiagonal, PoleAtZ


@pytest.fixture(scope="module")
def model():
    return L.LegendreModel(1.3j)


@pytest.mark.parametrize("t", [1j, 1.3j, 0.7j, 0.2 + 0.8j])
def test_branch_parameter_matches_mpmath(t):
    t3, t2 = jacobi_nulls(t)
    assert abs(L.LegendreModel(t).a_param - (t3 / t2) ** 2) < 1e-13


def test_x_matches_mpmath(model):
    n0, n1 = jacobi_nulls(1.3j)
    for z in [0.3 + 0.1j, -0.8 + 0.5j, 1.4]:
        a0, a1 = jacobi_pair(z, 1.3j)
        assert abs(L.legendre_x(model, z) - n0 * a1 / (n1 * a0)) < 1e-13


def test_legendre_relations(model, rng):
    z = 2 * rng.random(100) + 1.3j * rng.random(100)
    cands = L.normalization_candidates(model, z)
    assert cands["real_half_doubled"] < 1e-9
    assert cands["both_doubled"] > 1e-3


def test_derivative_against_finite_differences(model, rng):
    h = 1e-6
    for z in 2 * rng.random(10) + 1.3j * rng.random(10):
        fd = (L.legendre_x(model, z + h) - L.legendre_x(model, z - h)) / (2 * h)
        assert abs(fd - L.legendre_dx(model, z)) < 1e-7 * max(1, abs(fd))


def test_derivative_vanishes_on_torsion(model):
    for s in (0, 1, 1.3j / 2, 1 + 1.3j / 2):
        assert abs(L.legendre_dx(model, s)) < 1e-9


def test_pole(model):
    with pytest.raises(PoleAtZ):
        L.legendre_x(model, 0.5 + 1.3j / 2)
    with pytest.raises(PoleAtZ):
        L.legendre_dx(model, 1.5 + 1.3j / 2)


def test_calibrated_chart_lies_on_curve(model, rng):
    chart = L.calibrate(model)
    z = 2 * rng.random(100) + 1.3j * rng.random(100)
    x, y = L.analytic_to_affine(chart, z)
    assert np.max(L.curve_residual(x, y, model.a_param)) < 1e-8


def test_calibration_failure_is_reported(model):
    # a check point on the pole makes the residual infinite
    with pytest.raises((CalibrationFailed, PoleAtZ)):
        L.calibrate(model, check_points=[0.5 + 0.65j])


def _points(spec, n):
    out, k = [], 0
    while len(out) < n:
        P = sample_surface_point(spec, (11, k))
        k += 1
        x, _ = L.surface_affine_coordinates(spec, L.surface_charts(spec), P)
        if np.max(np.abs(x)) < 1e3:
            out.append(P)
    return out


@pytest.fixture(scope="module")
def aligned(request):
    spec = request.getfixturevalue("spec")
    pts = _points(spec, 32)
    return spec, pts, L.basis_alignment(spec, pts, n_fit=12)


def test_affine_relation_on_samples(aligned):
    spec, pts, _ = aligned
    charts = L.surface_charts(spec)
    consts = L.renamed_constants(spec)
    for P in pts:
        x, _ = L.surface_affine_coordinates(spec, charts, P)
        assert L.affine_relation_defect(consts, x) < 1e-9


def test_alignment_validation(aligned):
    _, _, res = aligned
    assert res.validation_error < 1e-6
    assert res.condition_number < 1e3


def test_alignment_matches_theta_null_prediction(aligned):
    spec, _, res = aligned
    pred = L.predicted_alignment(spec)
    k = np.unravel_index(np.argmax(np.abs(pred)), pred.shape)
    assert np.max(np.abs(res.matrix / res.matrix[k] - pred / pred[k])) < 1e-10


def test_alignment_failure_on_wrong_surface(aligned):
    spec, pts, _ = aligned
    from thetalab.abelian import SurfaceSpec
    other = SurfaceSpec(spec.tau, (1.5, -0.3j, 0.2))
    with pytest.raises(AlignmentFailed):
        L.basis_alignment(other, pts, n_fit=12)


def test_renamed_constants_need_diagonal(deformed_spec):
    with pytest.raises(NotDiagonal):
        L.renamed_constants(deformed_spec)
