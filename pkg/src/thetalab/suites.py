"""Verification suites.  Every check returns a CheckResult; engine errors are
caught and reported as failed checks."""

from __future__ import annotations

import itertools
import threading
import traceback
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import abelian, bidouble, canonical, determinants, legendre
from .abelian import SurfaceSpec, TorusPoint
from .config import RunConfig
from .errors import NoRootFound, NotDiagonal, ThetaLabError
from .theta import (
    PeriodMatrix,
    ThetaCharacteristic,
    automorphy_factor,
    gaussian_scale,
    theta_batch,
    theta_value,
)


@dataclass
class CheckResult:
    suite: str
    check: str
    status: str  # pass, fail, finding
    max_error: float
    count: int
    details: str
    paper_anchor: str

    def to_dict(self) -> dict:
        d = asdict(self)
        d["max_error"] = float(d["max_error"])
        return d


class Context:
    """Shared inputs of one run; suites write CSV rows into ``sample_rows``."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.tau = cfg.period_matrix()
        self.spec = SurfaceSpec(self.tau, cfg.coeffs)
        self.sample_rows = {}
        self._census = None
        self._lock = threading.Lock()

    def census(self):
        with self._lock:
            if self._census is None:
                self._census = canonical.rank_census(self.spec)
            return self._census

    def rng(self, name: str):
        return np.random.default_rng([self.cfg.seed, zlib.crc32(name.encode())])

    def tol(self, name: str) -> float:
        return self.cfg.tolerances[name]


def _status(err, tol, finding=False):
    if err < tol:
        return "pass"
    return "finding" if finding else "fail"


def _run_check(suite, name, anchor, fn, ctx):
    try:
        status, err, count, details = fn(ctx)
    except (ThetaLabError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        tb = traceback.format_exception_only(type(exc), exc)[-1].strip()
        return CheckResult(suite, name, "fail", float("inf"), 0, f"error: {tb}", anchor)
    return CheckResult(suite, name, status, float(err), int(count), details, anchor)


def _random_z(rng, n, g, im_max=1.0):
    re = rng.uniform(-1, 1, (n, g))
    im = rng.uniform(-im_max, im_max, (n, g)) / np.sqrt(g)
    return re + 1j * im


def _diag_spec_required(ctx):
    if not ctx.tau.is_diagonal():
        raise NotDiagonal("this check needs a diagonal period matrix")


# ---------------------------------------------------------------------------
# theta


def _tau_blocks(ctx):
    t = ctx.tau.entries
    return {1: PeriodMatrix(t[:1, :1]), 2: PeriodMatrix(t[:2, :2]), 3: ctx.tau}


def chk_functional_equation(ctx):
    rng = ctx.rng("functional_equation")
    worst, count = 0.0, 0
    for g, tau in _tau_blocks(ctx).items():
        z = _random_z(rng, 100, g)
        scale = gaussian_scale(z, tau)
        gens = [(tau.entries[:, i], np.eye(g, dtype=int)[i]) for i in range(g)]
        gens += [(2.0 * np.eye(g)[i], np.zeros(g, dtype=int)) for i in range(g)]
        for bits in itertools.product((0, 1), repeat=g):
            chi = ThetaCharacteristic.from_bits(bits)
            base = theta_batch(z, tau, chi)
            for lam, m in gens:
                shifted = theta_batch(z + lam, tau, chi)
                phi = np.array([automorphy_factor(lam, zz, tau, m) for zz in z])
                denom = np.maximum(np.abs(shifted), np.abs(phi) * scale)
                worst = max(worst, float(np.max(np.abs(shifted - phi * base) / denom)))
                count += len(z)
    tol = ctx.tol("functional_equation")
    return _status(worst, tol), worst, count, "g = 1, 2, 3; all characteristics (a, 0); tau and 2 generators"


def chk_odd_vanishing(ctx):
    vals = [abs(theta_value([0.0], [[1j]], ((0.5,), (0.5,)))),
            abs(theta_value([0.0], [[ctx.tau.entries[0, 0]]], ((0.5,), (0.5,))))]
    err = max(vals)
    return _status(err, ctx.tol("odd_vanishing")), err, len(vals), "theta[1/2,1/2](0) for tau = i and tau_11"


def chk_even_gradient(ctx):
    worst = 0.0
    for lab in abelian.LABELS:
        _, grad = theta_batch(np.zeros(3), ctx.tau, ThetaCharacteristic.from_bits(lab), order=1)
        worst = max(worst, float(np.max(np.abs(grad))))
    return _status(worst, ctx.tol("even_gradient")), worst, 4, "gradient at 0 of the four basis sections"


def _fd_errors(tau, z, h=1e-5):
    g = tau.g
    errs_g, errs_h = [], []
    for bits in [(0,) * g, (1,) * g]:
        chi = ThetaCharacteristic.from_bits(bits)
        v, gr, he = theta_batch(z, tau, chi, order=2)
        for j in range(g):
            e = np.zeros(g)
            e[j] = h
            vp, gp = theta_batch(z + e, tau, chi, order=1)
            vm, gm = theta_batch(z - e, tau, chi, order=1)
            errs_g.append(np.max(np.abs((vp - vm) / (2 * h) - gr[:, j])))
            errs_h.append(np.max(np.abs((gp - gm) / (2 * h) - he[:, :, j])))
    return max(errs_g), max(errs_h)


def chk_finite_differences(ctx):
    rng = ctx.rng("finite_differences")
    worst = 0.0
    for tau in (PeriodMatrix.diagonal(1j, 1.1j, 0.9j), ctx.tau):
        z = _random_z(rng, 100, 3, 0.5)
        eg, eh = _fd_errors(tau, z)
        worst = max(worst, eg, eh)
    return _status(worst, ctx.tol("finite_difference")), worst, 200, "central differences, h = 1e-5, gradient and Hessian"


def chk_hessian_symmetry(ctx):
    z = _random_z(ctx.rng("hessian_symmetry"), 100, 3)
    _, _, he = theta_batch(z, ctx.tau, order=2)
    err = float(np.max(np.abs(he - he.transpose(0, 2, 1))) / np.max(np.abs(he)))
    return _status(err, 1e-12), err, 100, "relative asymmetry of the Hessian"


def chk_truncation_stability(ctx):
    from .theta import choose_radius, DEFAULT_POLICY
    z = _random_z(ctx.rng("truncation"), 50, 3)
    scale = gaussian_scale(z, ctx.tau)
    worst = 0.0
    for k in range(len(z)):
        shift = float(np.max(np.abs(ctx.tau.imag_inv @ z[k].imag)))
        r = choose_radius(ctx.tau, shift, 2, DEFAULT_POLICY)
        a = theta_batch(z[k], ctx.tau, order=2, radius=r)
        b = theta_batch(z[k], ctx.tau, order=2, radius=2 * r)
        worst = max(worst, max(float(np.max(np.abs(x - y)) / max(np.max(np.abs(y)), scale[k]))
                               for x, y in zip(a, b)))
    return _status(worst, 1e-13), worst, len(z), "value, gradient, Hessian at radius r vs 2r, relative size"


# ---------------------------------------------------------------------------
# models


def chk_base_points(ctx):
    _diag_spec_required(ctx)
    rng = ctx.rng("base_points")
    worst, counts, min_sep = 0.0, [], np.inf
    for _ in range(5):
        coeffs = tuple(rng.normal(size=3) + 1j * rng.normal(size=3))
        spec = SurfaceSpec(ctx.tau, coeffs)
        pts = abelian.base_points(spec)
        Z = np.array([p.z for p in pts])
        vals = abelian.sections_batch(spec, Z, order=0)
        worst = max(worst, float(np.max(np.abs(vals) / gaussian_scale(Z, ctx.tau))))
        worst = max(worst, float(np.max(np.abs(abelian.surface_f_batch(spec, Z, 0)) / gaussian_scale(Z, ctx.tau))))
        counts.append(len(abelian.dedup_modulo_lattice(pts, ctx.tau, 1e-6)))
        for p, q in itertools.combinations(pts, 2):
            min_sep = min(min_sep, abelian.lattice_distance(p.z, q.z, ctx.tau))
    ok = worst < ctx.tol("membership") and all(c == 16 for c in counts) and min_sep > 0.1
    return ("pass" if ok else "fail"), worst, sum(counts), f"distinct counts {counts}, min separation {min_sep:.3f}"


def chk_invariants(ctx):
    got = abelian.numerical_invariants((1, 2, 2))
    ok = got == (6, 3, 24)
    return ("pass" if ok else "fail"), 0.0 if ok else 1.0, 1, f"(p_g, q, K^2) = {got}"


def chk_descent(ctx):
    z = _random_z(ctx.rng("descent"), 100, 3)
    tau = ctx.tau
    base = abelian.surface_f_batch(ctx.spec, z, 0)
    scale = gaussian_scale(z, tau)
    worst = 0.0
    gens = [(tau.entries[:, i], np.eye(3, dtype=int)[i]) for i in range(3)]
    gens += [(2.0 * np.eye(3)[i], np.zeros(3, dtype=int)) for i in range(3)]
    for lam, m in gens:
        shifted = abelian.surface_f_batch(ctx.spec, z + lam, 0)
        phi = np.array([automorphy_factor(lam, zz, tau, m) for zz in z])
        worst = max(worst, float(np.max(np.abs(shifted - phi * base) / np.maximum(np.abs(shifted), np.abs(phi) * scale))))
    diag = abelian.surface_f_batch(ctx.spec, z + 1.0, 0)
    worst = max(worst, float(np.max(np.abs(diag - base) / scale)))
    return _status(worst, ctx.tol("functional_equation")), worst, 700, "six lattice generators and (1,1,1)"


def chk_pencil(ctx):
    _diag_spec_required(ctx)
    z = _random_z(ctx.rng("pencil"), 50, 3)
    f = abelian.surface_f_batch(ctx.spec, z, 0)
    scale = gaussian_scale(z, ctx.tau)
    worst = 0.0
    for k in (1, 2, 3):
        i, j = abelian.pencil_axes(k)
        fs, gs = abelian.pencil_sections(ctx.spec, k)
        (t0, t1), = abelian.elliptic_thetas(z[:, k - 1], ctx.tau.entries[k - 1, k - 1], order=0)
        rebuilt = fs.batch(z[:, [i, j]]) * t0 + gs.batch(z[:, [i, j]]) * t1
        worst = max(worst, float(np.max(np.abs(rebuilt - f) / np.maximum(np.abs(f), scale))))
    return _status(worst, 1e-10), worst, 150, "f = f^(ij) theta_0(z_k) + g^(ij) theta_1(z_k), k = 1, 2, 3"


def _v3_points(ctx):
    t33 = ctx.tau.entries[2, 2]
    rng = ctx.rng("v3")
    return 2 * rng.random(100) + t33 * rng.random(100), t33


def _v3_defect(ctx, power):
    z, t33 = _v3_points(ctx)
    _, _, v3 = abelian.rho_v3(z, -z, t33)
    (t0, t1), = abelian.elliptic_thetas(z, t33, order=0)
    eta = abelian.eta_section(z, t33)
    rhs = -2 * (t0 * t1) ** power * eta
    return float(np.max(np.abs(v3 - rhs) / np.maximum(np.abs(v3), np.abs(rhs))))


def chk_v3_printed(ctx):
    err = _v3_defect(ctx, 2)
    return _status(err, ctx.tol("v3"), finding=True), err, 100, "v3(z,-z) against -2 theta_0^2 theta_1^2 eta"


def chk_v3_corrected(ctx):
    err = _v3_defect(ctx, 1)
    return _status(err, ctx.tol("v3")), err, 100, "v3(z,-z) against -2 theta_0 theta_1 eta"


def chk_v3_antisymmetry(ctx):
    rng = ctx.rng("v3_antisymmetry")
    t33 = ctx.tau.entries[2, 2]
    z = 2 * rng.random(50) + t33 * rng.random(50)
    w = 2 * rng.random(50) + t33 * rng.random(50)
    a = abelian.rho_v3(z, w, t33)[2]
    b = abelian.rho_v3(w, z, t33)[2]
    err = float(np.max(np.abs(a + b) / np.abs(a)))
    return _status(err, 1e-9), err, 50, f"v3(z,w) + v3(w,z) relative size {err:.2e}: antisymmetric"


def _torsion_distance(z, t):
    return min(abs(z - s - 2 * m - t * n)
               for s in abelian.two_torsion(t) for m in (-1, 0, 1) for n in (-1, 0, 1))


def chk_eta_torsion(ctx):
    rng = ctx.rng("eta")
    worst_zero, floor = 0.0, np.inf
    for k in range(3):
        t = ctx.tau.entries[k, k]
        for s in abelian.two_torsion(t):
            worst_zero = max(worst_zero, abs(abelian.eta_section(s, t)) / gaussian_scale([s], [[t]]))
        n = 0
        while n < 100:
            z = 2 * rng.random() + t * rng.random()
            if _torsion_distance(z, t) < 0.1:
                continue
            floor = min(floor, abs(abelian.eta_section(z, t)) / gaussian_scale([z], [[t]]))
            n += 1
    ok = worst_zero < ctx.tol("legendre") and floor > ctx.tol("torsion_floor")
    return ("pass" if ok else "fail"), worst_zero, 312, f"floor off torsion {floor:.3e} (points at distance >= 0.1)"


# ---------------------------------------------------------------------------
# legendre


def chk_legendre_relations(ctx):
    rng = ctx.rng("legendre_relations")
    worst = 0.0
    details = []
    for k in range(3):
        t = ctx.tau.entries[k, k]
        model = legendre.LegendreModel(t)
        z = 2 * rng.random(100) + t * rng.random(100)
        cands = legendre.normalization_candidates(model, z)
        worst = max(worst, cands["real_half_doubled"])
        details.append(f"E{k + 1}: " + ", ".join(f"{n} {v:.2e}" for n, v in cands.items()))
    return _status(worst, ctx.tol("legendre")), worst, 300, "; ".join(details)


def chk_legendre_critical(ctx):
    rng = ctx.rng("legendre_critical")
    zero, floor = 0.0, np.inf
    for k in range(3):
        t = ctx.tau.entries[k, k]
        model = legendre.LegendreModel(t)
        for s in abelian.two_torsion(t):
            zero = max(zero, abs(legendre.legendre_dx(model, s)))
        n = 0
        while n < 100:
            z = 2 * rng.random() + t * rng.random()
            if _torsion_distance(z, t) < 0.1 or min(abs(z - p) for p in (0.5 + t / 2, 1.5 + t / 2)) < 0.1:
                continue
            x = legendre.legendre_x(model, z)
            dx = legendre.legendre_dx(model, z)
            floor = min(floor, abs(dx) / (1 + abs(x)) ** 2)
            n += 1
    ok = zero < ctx.tol("legendre") and floor > ctx.tol("torsion_floor")
    return ("pass" if ok else "fail"), zero, 312, f"|x'| / (1+|x|)^2 floor off torsion {floor:.3e}"


def chk_affine_curve(ctx):
    rng = ctx.rng("affine_curve")
    worst = 0.0
    for k in range(3):
        t = ctx.tau.entries[k, k]
        chart = legendre.calibrate(legendre.LegendreModel(t))
        z = 2 * rng.random(100) + t * rng.random(100)
        x, y = legendre.analytic_to_affine(chart, z)
        worst = max(worst, float(np.max(legendre.curve_residual(x, y, chart.model.a_param))))
    return _status(worst, 1e-8), worst, 300, "y^2 - (x^2-1)(x^2-a^2) relative to (1+|x|)^4"


def _alignment_samples(ctx, n):
    pts = []
    k = 0
    charts = legendre.surface_charts(ctx.spec)
    while len(pts) < n:
        try:
            P = canonical.sample_surface_point(ctx.spec, (ctx.cfg.seed, 7001, k))
        except NoRootFound:
            k += 1
            continue
        k += 1
        try:
            x, _ = legendre.surface_affine_coordinates(ctx.spec, charts, P)
        except ThetaLabError:
            continue
        if np.max(np.abs(x)) < 1e3:
            pts.append(P)
    return pts


def chk_alignment(ctx):
    _diag_spec_required(ctx)
    pts = _alignment_samples(ctx, 32)
    res = legendre.basis_alignment(ctx.spec, pts, n_fit=12, tol=ctx.tol("alignment"))
    pred = legendre.predicted_alignment(ctx.spec)
    k = np.unravel_index(np.argmax(np.abs(pred)), pred.shape)
    dev = float(np.max(np.abs(res.matrix / res.matrix[k] - pred / pred[k])))
    details = (f"12 fit / 20 held out; fit error {res.fit_error:.2e}; condition {res.condition_number:.3g}; "
               f"deviation from theta-null prediction {dev:.2e}")
    return _status(res.validation_error, ctx.tol("alignment")), res.validation_error, 20, details


def chk_affine_relation(ctx):
    _diag_spec_required(ctx)
    pts = _alignment_samples(ctx, 32)
    charts = legendre.surface_charts(ctx.spec)
    consts = legendre.renamed_constants(ctx.spec)
    worst = max(legendre.affine_relation_defect(consts, legendre.surface_affine_coordinates(ctx.spec, charts, P)[0])
                for P in pts)
    return _status(worst, ctx.tol("affine_relation")), worst, len(pts), "1 + b'x2x3 + c'x1x3 + d'x1x2, relative to largest term"


# ---------------------------------------------------------------------------
# canonical


def _csv_row(kind, P, cvec, report):
    row = [kind]
    for v in P.z:
        row += [v.real, v.imag]
    row.append(P.residual)
    for v in cvec:
        row += [v.real, v.imag]
    row += list(report.singular_values)
    return row


def chk_random_rank(ctx):
    _diag_spec_required(ctx)
    pts = canonical.sample_surface_points(ctx.spec, ctx.cfg.samples, ctx.cfg.seed)
    worst_res, min_ratio, ranks, rows = 0.0, np.inf, set(), []
    for P in pts:
        rep = canonical.diff_rank_matrix(ctx.spec, P)
        img = canonical.canonical_image(ctx.spec, P)
        rows.append(_csv_row("sample", P, img.coords, rep))
        worst_res = max(worst_res, P.residual / abelian.membership_scale(ctx.spec, P.z))
        min_ratio = min(min_ratio, rep.ratio)
        ranks.add(rep.rank_estimate)
    ctx.sample_rows["random_rank"] = rows
    ok = ranks == {4} and min_ratio > ctx.tol("rank_separation") and worst_res < ctx.tol("membership")
    return ("pass" if ok else "fail"), worst_res, len(pts), f"min sigma4/sigma1 {min_ratio:.3e}; ranks {sorted(ranks)}"


def chk_base_rank(ctx):
    _diag_spec_required(ctx)
    reps = [canonical.diff_rank_matrix(ctx.spec, P) for P in abelian.base_points(ctx.spec)]
    min_ratio = min(r.ratio for r in reps)
    ok = all(r.rank_estimate == 4 for r in reps) and min_ratio > ctx.tol("rank_separation")
    return ("pass" if ok else "fail"), 0.0 if ok else 1.0, len(reps), f"min sigma4/sigma1 {min_ratio:.3e}"


def chk_census_count(ctx):
    _diag_spec_required(ctx)
    res = ctx.census()
    spectra = "; ".join("[" + ", ".join(f"{s:.3e}" for s in r.singular_values) + "]" for r in res.reports)
    details = (f"{res.count} points (reference 24); common zeros per block {res.per_axis_block_zeros}; "
               f"points per axis on A {res.per_axis_points}; sigma spectra: {spectra}")
    status = "pass" if res.count == 24 else "finding"
    return status, abs(res.count - 24), res.count, details


def chk_census_degeneracy(ctx):
    _diag_spec_required(ctx)
    res = ctx.census()
    ctx.sample_rows["census_degeneracy"] = [
        _csv_row("census", r.point, canonical.canonical_image(ctx.spec, r.point).coords, r) for r in res.reports]
    worst = max(r.ratio for r in res.reports)
    return _status(worst, ctx.tol("degeneracy")), worst, res.count, "largest sigma4/sigma1 over census points"


def chk_well_defined(ctx):
    tau = ctx.tau
    worst = 0.0
    gens = [tau.entries[:, i] for i in range(3)] + [2.0 * np.eye(3)[i] for i in range(3)] + [np.ones(3)]
    for k in range(20):
        P = canonical.sample_surface_point(ctx.spec, (ctx.cfg.seed, 9001, k))
        a = canonical.canonical_image(ctx.spec, P)
        ga = canonical.gauss_image(ctx.spec, P)
        for lam in gens:
            Q = TorusPoint(P.z + lam)
            worst = max(worst, canonical.chordal_distance(a, canonical.canonical_image(ctx.spec, Q)),
                        canonical.chordal_distance(ga, canonical.gauss_image(ctx.spec, Q)))
    return _status(worst, 1e-9), worst, 140, "canonical and Gauss images under lattice translation"


def chk_gauss_nonzero(ctx):
    smallest = np.inf
    for k in range(50):
        P = canonical.sample_surface_point(ctx.spec, (ctx.cfg.seed, 9101, k))
        smallest = min(smallest, float(np.min(np.abs(canonical.gauss_image(ctx.spec, P).coords))))
    ok = smallest > 1e-8
    return ("pass" if ok else "fail"), 0.0 if ok else 1.0, 50, f"smallest normalized Gauss coordinate {smallest:.3e}"


def _involution_stats(spec, pts, axes):
    """Largest chordal distance between the images of P and iota P, and how
    many P are actually moved by iota modulo the lattice."""
    worst, moved = 0.0, 0
    for P in pts:
        Q = canonical.involution(P, axes)
        worst = max(worst, canonical.chordal_distance(canonical.canonical_image(spec, P),
                                                      canonical.canonical_image(spec, Q)))
        moved += abelian.lattice_distance(P.z, Q.z, spec.tau) > 1e-6
    return worst, moved


def chk_involution_diagonal(ctx):
    _diag_spec_required(ctx)
    worst, n, moved = 0.0, 0, 0
    for j in (1, 2, 3):
        pts = [canonical.sample_W(ctx.spec, j, (ctx.cfg.seed, 8000 + j, s)) for s in range(50)]
        w, m = _involution_stats(ctx.spec, pts, [j])
        worst, n, moved = max(worst, w), n + len(pts), moved + m
    details = f"50 points of each W_j, image of P vs iota_j P; {moved} of {n} points moved by iota_j modulo the lattice"
    return _status(worst, ctx.tol("involution")), worst, n, details


def chk_involution_deformed(ctx):
    spec = SurfaceSpec(PeriodMatrix(ctx.cfg.deformed_tau()), ctx.cfg.coeffs)
    pts = [canonical.sample_W(spec, 3, (ctx.cfg.seed, 8100, s)) for s in range(50)]
    w3, m3 = _involution_stats(spec, pts, [3])
    roots = canonical.w_pair_roots(spec, 1, 2, (ctx.cfg.seed, 8200))
    w12, m12 = _involution_stats(spec, roots, [1, 2])
    worst = max(w3, w12)
    details = (f"tau_12 = {ctx.cfg.deformed_tau()[0, 1]}; W_3 with iota_3 {w3:.2e} ({m3} of {len(pts)} moved); "
               f"{len(roots)} roots of W_1 cap W_2 with iota_1 iota_2 {w12:.2e} ({m12} moved)")
    return _status(worst, ctx.tol("involution")), worst, len(pts) + len(roots), details


def chk_orbits(ctx):
    P = canonical.sample_W(ctx.spec, 3, (ctx.cfg.seed, 8300))
    Q = canonical.involution(P, [3])
    hit = [g.name for g in canonical.orbit_classify(ctx.spec, P, Q)]
    self_hit = [g.name for g in canonical.orbit_classify(ctx.spec, P, P)]
    stray = 0
    for k in range(10):
        A = canonical.sample_surface_point(ctx.spec, (ctx.cfg.seed, 8400, k))
        B = canonical.sample_surface_point(ctx.spec, (ctx.cfg.seed, 8500, k))
        stray += len(canonical.orbit_classify(ctx.spec, A, B))
    ok = "iota3" in hit and "id" in self_hit and stray == 0
    return ("pass" if ok else "fail"), float(stray), 12, f"iota_3 P classified as {hit}; random pairs matched {stray}"


# ---------------------------------------------------------------------------
# symbolic


def chk_matrix_N(ctx):
    built, printed = determinants.build_phi_matrix_N(), determinants.printed_N()
    bad = sum(1 for r1, r2 in zip(built, printed) for a, b in zip(r1, r2) if a != b)
    return ("pass" if bad == 0 else "fail"), float(bad), 54, "Jacobian of the affine map vs the printed matrix"


def _ledger_checks():
    out = []
    for ident in determinants.printed_identities():
        def fn(ctx, ident=ident):
            res = determinants.certify(ident)
            details = ("zero residual" if res.certified else
                       f"residual {res.residual.trimmed()}; expands to {res.computed.trimmed()}")
            return ("pass" if res.certified else "finding"), 0.0 if res.certified else 1.0, 1, details
        out.append((f"printed {ident.name}", f"printed closed form ({ident.anchor})", fn))
    for ident in determinants.corrected_identities():
        def fn(ctx, ident=ident):
            res = determinants.certify(ident)
            oracle = determinants.substitution_check(ident)
            ok = res.certified and oracle
            return ("pass" if ok else "fail"), 0.0 if ok else 1.0, 1, f"degrees in (x, y): {sorted(res.xy_degrees)}; rational substitution agrees: {oracle}"
        out.append((ident.name, f"expansion of the printed minor ({ident.anchor})", fn))
    return out


def chk_bareiss_vs_laplace(ctx):
    bad = 0
    for ident in determinants.printed_identities():
        if determinants.identity_lhs(ident, "bareiss") != determinants.identity_lhs(ident, "laplace"):
            bad += 1
    return ("pass" if bad == 0 else "fail"), float(bad), 10, "two determinant algorithms agree"


def chk_chart_change(ctx):
    rep = determinants.chart_change_check()
    consistent = all(f is not None for f in rep.form_factors + rep.theta_factors)
    details = (f"form components map with factors {rep.form_factors}, theta components with {rep.theta_factors}; "
               f"relative factor x2 between the classes; duplicated printed entry: {rep.duplicate_column}")
    status = "finding" if consistent else "fail"
    return status, 1.0, 7, details


# ---------------------------------------------------------------------------
# bidouble


def chk_certificates(ctx):
    certs = bidouble.invariance_certificates(strict=True)
    diag = [c for c in certs if c.kind == "diagonal"]
    swap = [c for c in certs if c.kind == "swap"]
    single = {(c.section, c.element): c.sign for c in certs if c.kind == "factor0" and c.element != "id"}
    flips = sorted(f"{s} under {g}" for (s, g), v in single.items() if v == -1)
    details = f"{len(diag)} diagonal invariances, {len(swap)} swap antisymmetries; single-factor sign flips: {flips}"
    return "pass", 0.0, len(diag) + len(swap), details


def chk_psi(ctx):
    ok = bidouble.psi_invariance_certificate() and bidouble.quartic_pullback_identity(bidouble.SAMPLE_MODEL)
    return ("pass" if ok else "fail"), 0.0 if ok else 1.0, 4, "psi(g P) = psi(P); q(psi)^2 - xyzt = r2 (r2 + 2XYZT)"


def chk_bitangency(ctx):
    worst, ok = 0.0, True
    for axis in range(4):
        r = bidouble.bitangency_probe(bidouble.SAMPLE_MODEL, axis, ctx.tol("bitangency"))
        ok &= r["bitangent"]
        worst = max(worst, max(sorted(r["relative_values"])[:2]))
    return ("pass" if ok else "fail"), worst, 4, "each coordinate line meets the quartic in two double points"


def chk_curve_smoothness(ctx):
    worst, ranks = 0.0, set()
    for s in range(50):
        P = bidouble.sample_curve_point(bidouble.SAMPLE_MODEL, (ctx.cfg.seed, 6000, s))
        r1, r2 = bidouble.curve_residuals(bidouble.SAMPLE_MODEL, P)
        worst = max(worst, abs(r1), abs(r2))
        p = bidouble.psi_cover(P)
        worst = max(worst, *(abs(v) / np.max(np.abs(p)) ** 4 for v in bidouble.quartic_residuals(bidouble.SAMPLE_MODEL, p)))
        ranks.add(int(np.linalg.matrix_rank(bidouble.residual_jacobian(bidouble.SAMPLE_MODEL, P))))
    ok = ranks == {2} and worst < 1e-10
    return ("pass" if ok else "fail"), worst, 50, f"Jacobian ranks {sorted(ranks)}; image on the quartic model"


# ---------------------------------------------------------------------------

REGISTRY = {
    "theta": [
        ("functional_equation", "theta factor of automorphy", chk_functional_equation),
        ("odd_vanishing", "odd characteristic vanishes at 0", chk_odd_vanishing),
        ("even_gradient", "even sections have vanishing gradient at 0", chk_even_gradient),
        ("finite_differences", "first and second theta derivatives", chk_finite_differences),
        ("hessian_symmetry", "theta Hessian", chk_hessian_symmetry),
        ("truncation_stability", "adaptive truncation", chk_truncation_stability),
    ],
    "models": [
        ("base_points", "sixteen base points of the (1,2,2) polarization", chk_base_points),
        ("invariants", "p_g = 6, q = 3, K^2 = 24", chk_invariants),
        ("descent", "f descends to A", chk_descent),
        ("pencil_identity", "decomposition of f along one factor", chk_pencil),
        ("v3_printed", "v3(z,-z) closed form as printed", chk_v3_printed),
        ("v3_expanded", "v3(z,-z) closed form as it expands", chk_v3_corrected),
        ("v3_antisymmetry", "v3 under exchange of arguments", chk_v3_antisymmetry),
        ("eta_torsion", "eta vanishes exactly on 2-torsion", chk_eta_torsion),
    ],
    "canonical": [
        ("random_rank", "injective differential away from the degeneracy set", chk_random_rank),
        ("base_point_rank", "rank 4 matrix at the base points", chk_base_rank),
        ("census_count", "the 24 points where the differential drops rank", chk_census_count),
        ("census_degeneracy", "rank drop at the census points", chk_census_degeneracy),
        ("well_defined", "canonical map is well defined on A", chk_well_defined),
        ("gauss_nonzero", "Gauss map coordinates", chk_gauss_nonzero),
        ("involution_diagonal", "canonical map factors through iota_j on W_j", chk_involution_diagonal),
        ("involution_deformed", "factorization on W_3 and on W_1 cap W_2 for tau_12 != 0", chk_involution_deformed),
        ("orbit_classify", "collision taxonomy of the canonical map", chk_orbits),
    ],
    "legendre": [
        ("legendre_relations", "Legendre function relations", chk_legendre_relations),
        ("legendre_critical", "Legendre derivative vanishes exactly on 2-torsion", chk_legendre_critical),
        ("affine_curve", "Legendre normal form", chk_affine_curve),
        ("basis_alignment", "affine expression of the canonical map", chk_alignment),
        ("affine_relation", "affine equation of S", chk_affine_relation),
    ],
    "symbolic": [
        ("matrix_N", "matrix of the differential of the affine map", chk_matrix_N),
        *_ledger_checks(),
        ("bareiss_vs_laplace", "minor expansions", chk_bareiss_vs_laplace),
        ("chart_change", "chart at infinity", chk_chart_change),
    ],
    "bidouble": [
        ("invariance_certificates", "basis of canonical sections of (C x C)/(G x Z2)", chk_certificates),
        ("psi_cover", "squaring cover onto the quartic model", chk_psi),
        ("bitangency", "coordinate lines are bitangent to the quartic", chk_bitangency),
        ("curve_smoothness", "complete intersection curve", chk_curve_smoothness),
    ],
}


def run_checks(ctx: Context, suites, threads: int = 1) -> list:
    """Run every check of ``suites``; results come back in registry order."""
    jobs = [(s, check, anchor, fn) for s in suites for check, anchor, fn in REGISTRY[s]]
    if threads <= 1:
        return [_run_check(s, c, a, fn, ctx) for s, c, a, fn in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(_run_check, s, c, a, fn, ctx) for s, c, a, fn in jobs]
        return [f.result() for f in futures]


def sample_rows(ctx: Context) -> list:
    """CSV rows in a fixed order: random samples, then census points."""
    return ctx.sample_rows.get("random_rank", []) + ctx.sample_rows.get("census_degeneracy", [])
