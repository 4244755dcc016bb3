import numpy as np
import pytest

from analytic import hausdorff_to_curve, quartic_s2
from bundlesing.classify import Kind, hamilton_field
from bundlesing.errors import ConvergenceError, PreconditionError
from bundlesing.geometry import ExplicitHom, Frame, InducedHom, lambda_jet
from bundlesing.trace import (
    Box,
    SurfaceSample,
    chart_basis,
    check_contact_corollary,
    check_fold_cusp_geometry,
    check_swallowtail_mu,
    refine_to_S,
    refine_to_S2,
    refine_to_swallowtail,
    scan_singular_set,
    trace_S2,
)

O = (0.0, 0.0, 0.0)


def diag(g, frame=None):
    return ExplicitHom.parse([["1", "0"], ["0", g]], frame=frame)


def distance_to_quartic_s2(p):
    return float(np.linalg.norm(quartic_s2(p[1]) - p))


# -- refinement -------------------------------------------------------------------------


def test_refine_example():
    p = refine_to_S(diag("y^2+x"), (0.0, 0.3, 0.0))
    assert abs(p[1] ** 2 + p[0]) <= 1e-12
    assert np.linalg.norm(p - (0, 0.3, 0)) < 0.1


def test_refine_keeps_points_on_s():
    q = (0.4, 0.0, -0.2)
    assert refine_to_S(diag("y"), q) == pytest.approx(q, abs=1e-15)


def test_refine_without_root_fails():
    with pytest.raises(ConvergenceError):
        refine_to_S(diag("1+x^2+y^2+z^2"), (0.3, 0.2, 0.1))


def test_refine_to_s2_and_swallowtail_point():
    h = diag("y^3+x*y+z")
    p = refine_to_S2(h, (0.05, 0.2, 0.0))
    # S2 = {x = -3y^2, z = 2y^3}
    assert p[0] == pytest.approx(-3 * p[1] ** 2, abs=1e-10)
    assert p[2] == pytest.approx(2 * p[1] ** 3, abs=1e-10)
    q = refine_to_swallowtail(h, (0.05, 0.05, -0.05))
    assert np.linalg.norm(q) < 1e-10


def test_box_helpers():
    b = Box.from_pairs([[-1, 1], [0, 2], [-3, 3]])
    assert b.contains((0, 1, 0)) and not b.contains((0, 2.1, 0))
    assert b.as_pairs() == [[-1, 1], [0, 2], [-3, 3]]
    with pytest.raises(ValueError):
        Box((1, 0, 0), (0, 1, 1))


# -- scanning ---------------------------------------------------------------------------


def test_scan_fold_plane():
    s = scan_singular_set(diag("y"), Box.cube(), 10)
    assert len(s) == 100
    assert all(x.classification.kind is Kind.FOLD_LIKE for x in s.samples)
    assert np.allclose(s.points()[:, 1], 0.0)


def test_scan_nonsingular_is_empty():
    s = scan_singular_set(ExplicitHom.parse([["1", "0"], ["0", "1"]]), Box.cube(), 5)
    assert len(s) == 0 and s.points().shape == (0, 3)


def test_scan_cusp_locus():
    # lambda = y^3 + xy + z: eta lambda = 3y^2 + x, eta^2 lambda = 6y, so the
    # non-fold samples sit on the curve x = -3y^2, z = 2y^3
    s = scan_singular_set(diag("y^3+x*y+z"), Box.cube(), 9)
    assert len(s) > 50
    for x in s.samples:
        lam = x.point[1] ** 3 + x.point[0] * x.point[1] + x.point[2]
        assert abs(lam) <= 1e-9
        if x.classification.kind is Kind.FOLD_LIKE:
            assert abs(3 * x.point[1] ** 2 + x.point[0]) > 0


def test_scan_is_thread_deterministic():
    h = diag("y^3+x*y+z")
    a = scan_singular_set(h, Box.cube(), 7, threads=1)
    b = scan_singular_set(h, Box.cube(), 7, threads=4)
    assert np.array_equal(a.points(), b.points())
    assert [x.classification.cls for x in a.samples] == [x.classification.cls for x in b.samples]


def test_scan_rejects_tiny_grid():
    with pytest.raises(PreconditionError):
        scan_singular_set(diag("y"), Box.cube(), 1)


# -- continuation -------------------------------------------------------------------------


def test_trace_cuspidal_axis():
    curve = trace_S2(diag("y^2+z"), O, box=Box.cube())
    pts = curve.points()
    assert np.max(np.hypot(pts[:, 1], pts[:, 2])) <= 1e-8
    assert sorted([pts[0, 0], pts[-1, 0]]) == pytest.approx([-1.0, 1.0])
    assert curve.stop_reasons == {"forward": "box exit", "backward": "box exit"}
    assert all(v.kind is Kind.CUSP_LIKE for v in curve.vertices)


def test_trace_orientation_and_spacing():
    curve = trace_S2(diag("y^4+x*y+z+z*y^2"), O, step=0.02, box=Box.cube(0.5))
    pts, tans = curve.points(), curve.tangents()
    steps = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    assert np.all(steps <= 2 * curve.step + 1e-12)
    # tangents point along the direction of travel
    assert np.all(np.einsum("ij,ij->i", tans[:-1], np.diff(pts, axis=0)) > 0)
    assert np.allclose(np.linalg.norm(tans, axis=1), 1.0)
    assert curve.vertices[curve.seed_index].point == pytest.approx(O, abs=1e-14)


def test_trace_vertices_satisfy_s2():
    h = diag("y^4+x*y+z+z*y^2")
    curve = trace_S2(h, O, step=0.02, box=Box.cube(0.5))
    for v in curve.vertices:
        assert v.residual <= 1e-10
        assert distance_to_quartic_s2(v.point) <= 1e-9


def test_trace_one_direction():
    h = diag("y^2+z")
    fwd = trace_S2(h, O, max_steps=5, direction="forward")
    back = trace_S2(h, O, max_steps=5, direction="backward")
    assert len(fwd) == len(back) == 6
    assert abs(fwd.points()[-1, 0]) == pytest.approx(0.05)
    # backward vertices come first so the polyline keeps one orientation
    assert back.points()[0, 0] == pytest.approx(-fwd.points()[-1, 0])
    assert back.points()[-1] == pytest.approx(O)
    assert fwd.stop_reasons == {"forward": "max steps"}


def test_trace_seed_off_s2_is_corrector_failure():
    with pytest.raises(ConvergenceError, match="corrector failure"):
        trace_S2(diag("y"), (0.1, 0.2, 0.3))


def test_step_halving_does_not_increase_error():
    h = diag("y^4+x*y+z+z*y^2")
    errs = []
    for step in (0.08, 0.04, 0.02):
        curve = trace_S2(h, O, step=step, box=Box.cube(0.6))
        errs.append(hausdorff_to_curve(curve.points(), quartic_s2))
    # chord error is quadratic in the step, so each halving at least halves it
    assert errs[1] <= 0.5 * errs[0]
    assert errs[2] <= 0.5 * errs[1]


# -- geometric checks ---------------------------------------------------------------------


def test_fold_and_cusp_geometry_holds():
    h = diag("y^3+x*y+z")
    s = scan_singular_set(h, Box.cube(), 6)
    curve = trace_S2(h, (0.0, 0.3, 0.0), box=Box.cube())
    rep = check_fold_cusp_geometry(h, s.samples, [curve])
    assert rep.ok and rep.checked > len(curve) // 2
    assert rep.as_dict()["ok"] is True


def test_geometry_check_catches_tangent_eta():
    h = diag("y")
    s = scan_singular_set(h, Box.cube(), 4)
    # replace eta by a vector tangent to S = {y = 0}
    fake = [SurfaceSample(x.point, x.classification, np.array([1.0, 0.0, 0.0]), x.d_lambda) for x in s.samples]
    rep = check_fold_cusp_geometry(h, fake)
    assert not rep.ok and len(rep.violations) == len(fake)
    assert rep.violations[0].check == "fold_eta_transverse_to_S"


def test_chart_basis_is_orthonormal():
    n = np.array([0.3, -1.2, 0.5])
    b1, b2 = chart_basis(n)
    m = np.vstack([b1, b2, n / np.linalg.norm(n)])
    assert m @ m.T == pytest.approx(np.eye(3), abs=1e-14)


def test_mu_signature_at_swallowtail():
    h = diag("y^3+x*y+z")
    curve = trace_S2(h, O, box=Box.cube(0.5))
    m = check_swallowtail_mu(h, curve, O)
    assert abs(m.mu0) < 1e-8
    assert m.dmu0 == pytest.approx(-6.0, rel=1e-2)
    assert m.passed


def test_mu_nonzero_at_cusp_point():
    h = diag("y^3+x*y+z")
    p = np.array([-3 * 0.2**2, 0.2, 2 * 0.2**3])
    curve = trace_S2(h, p, box=Box.cube(0.5))
    m = check_swallowtail_mu(h, curve, p, require_swallowtail=False)
    assert abs(m.mu0) > 0.1 and not m.passed


def test_mu_refuses_non_swallowtail():
    h = diag("y^2+z")
    curve = trace_S2(h, O, max_steps=5)
    with pytest.raises(PreconditionError):
        check_swallowtail_mu(h, curve, O)


# -- contact corollary ------------------------------------------------------------------------


def test_contact_corollary_swallowtail():
    h = diag("y^3+2*x*y+z+x", Frame.contact())
    curve = trace_S2(h, O, box=Box.cube(0.3))
    rep = check_contact_corollary(h, [curve])
    assert rep.ok
    assert rep.cusp_checked > 0 and len(rep.swallowtail) == 1
    assert abs(rep.swallowtail[0].dmu0) > 0.1


def test_hamilton_parallel_to_eta_on_s2():
    h = diag("y^3+2*x*y+z+x", Frame.contact())
    curve = trace_S2(h, O, box=Box.cube(0.3))
    for v in curve.vertices:
        x = hamilton_field(h, v.point)
        assert np.linalg.norm(np.cross(x, v.eta)) <= 1e-8 * np.linalg.norm(x) * np.linalg.norm(v.eta)


def test_contact_corollary_fold_only():
    h = InducedHom.parse(["x", "y^2+z"], frame="contact")
    s = scan_singular_set(h, Box.cube(), 4)
    assert all(x.classification.kind is Kind.FOLD_LIKE for x in s.samples)
    rep = check_contact_corollary(h, [])
    assert rep.ok and rep.parallel_checked == 0


def test_contact_corollary_skips_vanishing_hamilton_field():
    # tangent-type points: lambda_x = lambda_y = 0 and lambda = 0 give X = 0
    h = diag("y^3+2*x*y+z", Frame.contact())
    curve = trace_S2(h, O, max_steps=3)
    lam = lambda_jet(h, O, 1)
    assert lam.value == 0
    rep = check_contact_corollary(h, [curve])
    assert rep.skipped >= 1
