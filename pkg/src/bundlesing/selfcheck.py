"""Built-in normal-form suite behind ``bundlesing selfcheck``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import jets as J
from .classify import (
    DEFAULT_TOL,
    Kind,
    MorinKind,
    PlaneKind,
    Subtype,
    ToleranceSet,
    classify_induced_prop4,
    classify_point,
    contact_fold_test,
    foliation_leaf_classify,
    hamilton_field,
    morin_classify,
    plane_map_classify,
)
from .families import random_explicit_cubic
from .geometry import ExplicitHom, Frame, InducedHom, MapGerm, directional_derivative_f, eta_chain
from .trace import Box, check_swallowtail_mu, refine_to_S, scan_singular_set, trace_S2

REL = 1e-8
ORIGIN = (0.0, 0.0, 0.0)


@dataclass
class CaseResult:
    name: str
    passed: bool
    near_threshold: bool
    detail: str

    @property
    def ok(self) -> bool:
        return self.passed and not self.near_threshold


def close(a, b, rel: float = REL) -> bool:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return bool(np.all(np.abs(a - b) <= rel * np.maximum(1.0, np.abs(b))))


def diag(g: str, frame: Frame | None = None) -> ExplicitHom:
    return ExplicitHom.parse([["1", "0"], ["0", g]], frame=frame)


def _class_case(h, p, expected: str, tol, values: dict | None = None):
    c = classify_point(h, p, tol)
    ok = str(c.cls) == expected
    detail = f"{c.cls}"
    for key, want in (values or {}).items():
        got = c.diagnostics[key]
        ok &= close(got, want)
        detail += f", {key}={np.round(np.asarray(got, dtype=float), 10).tolist()}"
    return ok, c.near_threshold, detail


def case_jet_series(tol, seed):
    x = J.Jet.variable(0, 0.0, 4, nvars=1)
    r = J.reciprocal(1 - x)
    s = J.sin(x)
    ok = close(r.coeffs, [1, 1, 1, 1, 1]) and close(s.coeffs, [0, 1, 0, -1 / 6, 0])
    return ok, False, f"1/(1-x)={r.coeffs.tolist()}"


def case_fold(tol, seed):
    return _class_case(diag("y"), ORIGIN, "FoldLike", tol, {"eta_lambda": 1.0})


def case_cusp_transverse(tol, seed):
    return _class_case(
        diag("y^2+x"), ORIGIN, "CuspLike(Transverse)", tol,
        {"eta_lambda": 0.0, "eta2_lambda": 2.0, "frame_lambda": [1.0, 0.0]},
    )


def case_cusp_tangent(tol, seed):
    return _class_case(
        diag("y^2+z"), ORIGIN, "CuspLike(Tangent)", tol,
        {"eta2_lambda": 2.0, "frame_lambda": [0.0, 0.0], "d_lambda": [0, 0, 1]},
    )


def case_swallowtail(tol, seed):
    return _class_case(
        diag("y^3+x*y+z"), ORIGIN, "SwallowtailLike(Tangent)", tol,
        {"d_lambda": [0, 0, 1], "d_eta_lambda": [1, 0, 0], "d_eta2_lambda": [0, 6, 0]},
    )


def case_quartic_chain(tol, seed):
    # gradient rows (0,0,1), (1,0,0), (0,0,2) are dependent
    return _class_case(
        diag("y^4+x*y+z+z*y^2"), ORIGIN, "DegenerateNonClassified(rank d(lambda, eta lambda, eta^2 lambda) < 3)", tol,
        {"d_lambda": [0, 0, 1], "d_eta_lambda": [1, 0, 0], "d_eta2_lambda": [0, 0, 2]},
    )


def case_induced_fold(tol, seed):
    h = InducedHom.parse(["x", "y^2"])
    ok, near, detail = _class_case(h, ORIGIN, "FoldLike", tol, {"eta_lambda": 2.0})
    c4 = classify_induced_prop4(h, ORIGIN, tol)
    ok &= c4.kind is Kind.FOLD_LIKE and close(c4.diagnostics["q"][1], 2.0)
    ok &= close(directional_derivative_f(h, ORIGIN, 2), [0, 2])
    return ok, near or c4.near_threshold, detail + f"; q={c4.diagnostics['q']}"


def case_induced_cusp(tol, seed):
    h = InducedHom.parse(["x", "y^3+x*y"])
    c = classify_point(h, ORIGIN, tol)
    c4 = classify_induced_prop4(h, ORIGIN, tol)
    ok = c.kind is Kind.CUSP_LIKE and c4.kind is Kind.CUSP_LIKE
    ok &= close(c4.diagnostics["q"][1:3], [0.0, 6.0])
    ok &= close(directional_derivative_f(h, ORIGIN, 3), [0, 6])
    return ok, c.near_threshold or c4.near_threshold, f"{c.cls} / {c4.cls}; q={c4.diagnostics['q']}"


def case_induced_swallowtail(tol, seed):
    h = InducedHom.parse(["x", "y^4+x*y+z*y^2"])
    c = classify_point(h, ORIGIN, tol)
    c4 = classify_induced_prop4(h, ORIGIN, tol)
    leaf = foliation_leaf_classify(h, ORIGIN, tol)
    ok = c.kind is Kind.SWALLOWTAIL_LIKE and c4.kind is Kind.SWALLOWTAIL_LIKE
    ok &= leaf.kind is PlaneKind.SWALLOWTAIL
    near = c.near_threshold or c4.near_threshold or leaf.near_threshold
    return ok, near, f"{c.cls} / {c4.cls} / leaf {leaf.kind.value}"


def _morin(texts, expected: MorinKind, key: str, value: float, tol):
    m = morin_classify(MapGerm.parse(texts, ("u", "v", "w")), ORIGIN, tol)
    ok = m.kind is expected and close(m.diagnostics[key], value)
    return ok, m.near_threshold, f"{m.kind.value}, {key}={m.diagnostics[key]:.12g}"


def case_morin_definite(tol, seed):
    return _morin(["u", "v^2+w^2"], MorinKind.DEFINITE_FOLD, "det_H", 4.0, tol)


def case_morin_indefinite(tol, seed):
    return _morin(["u", "v^2-w^2"], MorinKind.INDEFINITE_FOLD, "det_H", -4.0, tol)


def case_morin_cusp(tol, seed):
    ok, near, detail = _morin(["u", "v^2+w^3+u*w"], MorinKind.CUSP, "theta_det_H", 12.0, tol)
    return ok, near, detail


def _plane(texts, expected: PlaneKind, tol):
    c = plane_map_classify(MapGerm.parse(texts, ("u", "v")), (0.0, 0.0), tol)
    return c.kind is expected, c.near_threshold, c.kind.value


def case_plane_fold(tol, seed):
    return _plane(["u", "v^2"], PlaneKind.FOLD, tol)


def case_plane_cusp(tol, seed):
    return _plane(["u", "v^3+u*v"], PlaneKind.CUSP, tol)


def case_plane_swallowtail(tol, seed):
    return _plane(["u", "v^4+u*v"], PlaneKind.SWALLOWTAIL, tol)


def case_foliation_fold(tol, seed):
    h = InducedHom.parse(["x", "y^2+z^2"])
    c = classify_point(h, ORIGIN, tol)
    leaf = foliation_leaf_classify(h, ORIGIN, tol)
    ok = c.kind is Kind.FOLD_LIKE and leaf.kind is PlaneKind.FOLD
    return ok, c.near_threshold or leaf.near_threshold, f"{c.cls} / leaf {leaf.kind.value}"


def case_foliation_cusp(tol, seed):
    h = InducedHom.parse(["x", "y^3+x*y+z"])
    c = classify_point(h, ORIGIN, tol)
    leaf = foliation_leaf_classify(h, ORIGIN, tol)
    ok = c.kind is Kind.CUSP_LIKE and leaf.kind is PlaneKind.CUSP
    return ok, c.near_threshold or leaf.near_threshold, f"{c.cls} / leaf {leaf.kind.value}"


def case_contact_fold(tol, seed):
    h = InducedHom.parse(["x", "y^2+z"], frame="contact")
    c = classify_point(h, ORIGIN, tol)
    x = hamilton_field(h, ORIGIN)
    ct = contact_fold_test(h, ORIGIN, tol)
    ok = c.kind is Kind.FOLD_LIKE and ct.independent and close(x, [2, 1, 0])
    ok &= close(ct.eta, [0, 1, 0])
    return ok, c.near_threshold or ct.test.near_threshold, f"{c.cls}, X={x.tolist()}, independent={ct.independent}"


def case_trace_axis(tol, seed):
    curve = trace_S2(diag("y^2+z"), ORIGIN, tol=tol, box=Box.cube())
    pts = curve.points()
    err = float(np.max(np.hypot(pts[:, 1], pts[:, 2])))
    span = (float(pts[:, 0].min()), float(pts[:, 0].max()))
    ok = err <= 1e-8 and close(span, (-1.0, 1.0))
    near = any(v.classification is None or v.classification.near_threshold for v in curve.vertices)
    return ok, near, f"{len(curve)} vertices, max distance to x-axis {err:.2e}"


def case_swallowtail_mu(tol, seed):
    h = diag("y^3+x*y+z")
    curve = trace_S2(h, ORIGIN, tol=tol, box=Box.cube(0.5))
    m = check_swallowtail_mu(h, curve, ORIGIN, tol)
    ok = abs(m.mu0) < 1e-8 and abs(m.dmu0) > 0.1
    return ok, False, f"mu(0)={m.mu0:.2e}, mu'(0)={m.dmu0:.4f}"


def case_scan_plane(tol, seed):
    s = scan_singular_set(diag("y"), Box.cube(), 10, tol)
    kinds = {x.classification.kind for x in s.samples}
    ok = len(s) == 100 and kinds == {Kind.FOLD_LIKE} and np.allclose(s.points()[:, 1], 0.0)
    near = any(x.classification.near_threshold for x in s.samples)
    return ok, near, f"{len(s)} samples, classes {sorted(k.value for k in kinds)}"


def case_nonsingular_scan(tol, seed):
    s = scan_singular_set(ExplicitHom.parse([["1", "0"], ["0", "1"]]), Box.cube(), 5, tol)
    return len(s) == 0, False, f"{len(s)} samples"


def case_genericity(tol, seed):
    rng = np.random.default_rng(seed)
    h = random_explicit_cubic(rng)
    s = scan_singular_set(h, Box.cube(), 6, tol)
    allowed = {Kind.FOLD_LIKE, Kind.CUSP_LIKE, Kind.SWALLOWTAIL_LIKE}
    bad = [x for x in s.samples if x.classification.decisive() and x.classification.kind not in allowed]
    return not bad, False, f"seed {seed}: {len(s)} samples, {len(bad)} decisive non-generic"


CASES: dict[str, Callable] = {
    "jet_series": case_jet_series,
    "explicit_fold": case_fold,
    "explicit_cusp_transverse": case_cusp_transverse,
    "explicit_cusp_tangent": case_cusp_tangent,
    "explicit_swallowtail": case_swallowtail,
    "explicit_quartic_chain": case_quartic_chain,
    "induced_fold": case_induced_fold,
    "induced_cusp": case_induced_cusp,
    "induced_swallowtail": case_induced_swallowtail,
    "morin_definite_fold": case_morin_definite,
    "morin_indefinite_fold": case_morin_indefinite,
    "morin_cusp": case_morin_cusp,
    "plane_fold": case_plane_fold,
    "plane_cusp": case_plane_cusp,
    "plane_swallowtail": case_plane_swallowtail,
    "foliation_fold": case_foliation_fold,
    "foliation_cusp": case_foliation_cusp,
    "contact_fold": case_contact_fold,
    "trace_cuspidal_axis": case_trace_axis,
    "swallowtail_mu": case_swallowtail_mu,
    "scan_fold_plane": case_scan_plane,
    "scan_nonsingular": case_nonsingular_scan,
    "genericity_smoke": case_genericity,
}


def run_case(name: str, tol: ToleranceSet = DEFAULT_TOL, seed: int = 0) -> CaseResult:
    try:
        passed, near, detail = CASES[name](tol, seed)
    except Exception as exc:  # a crash is a failed case, reported in the table
        return CaseResult(name, False, False, f"{type(exc).__name__}: {exc}")
    return CaseResult(name, bool(passed), bool(near), detail)


def run_all(tol: ToleranceSet = DEFAULT_TOL, seed: int = 0) -> list[CaseResult]:
    return [run_case(name, tol, seed) for name in CASES]


def format_table(results: list[CaseResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'case'.ljust(width)}  status  detail"]
    for r in results:
        status = "PASS" if r.ok else ("NEAR" if r.passed else "FAIL")
        lines.append(f"{r.name.ljust(width)}  {status:6}  {r.detail}")
    n_ok = sum(r.ok for r in results)
    lines.append(f"{n_ok}/{len(results)} cases passed")
    return "\n".join(lines)
