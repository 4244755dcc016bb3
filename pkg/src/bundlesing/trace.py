"""Locating ``S = {lambda = 0}``, tracing ``S2 = {lambda = eta lambda = 0}`` and checking
the geometric signatures of fold-, cusp- and swallowtail-like points.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from .classify import (
    DEFAULT_TOL,
    Classification,
    Kind,
    ToleranceSet,
    classify_chain,
    classify_point,
    hamilton_field,
)
from .errors import (
    BundleSingError,
    ConvergenceError,
    DegenerateError,
    PreconditionError,
)
from .geometry import HomSpec, eta_chain, eta_lambda_jets, lambda_jet, lambda_value

REFINE_TOL = 1e-12
REFINE_MAX_ITER = 50
CORRECTOR_TOL = 1e-10
CORRECTOR_MAX_ITER = 15
DEFAULT_STEP = 1e-2
DEFAULT_MAX_STEPS = 200
MIN_STEP_FACTOR = 1.0 / 16.0


@dataclass(frozen=True)
class Box:
    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise ValueError("box bounds have different dimensions")
        for a, b in zip(self.lo, self.hi):
            if not a < b:
                raise ValueError(f"box needs min < max on every axis, got [{a}, {b}]")

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence[float]]) -> Box:
        return cls(tuple(float(a) for a, _ in pairs), tuple(float(b) for _, b in pairs))

    @classmethod
    def cube(cls, half: float = 1.0, dim: int = 3) -> Box:
        return cls((-half,) * dim, (half,) * dim)

    def contains(self, p: Sequence[float], slack: float = 0.0) -> bool:
        return all(a - slack <= v <= b + slack for v, a, b in zip(p, self.lo, self.hi))

    def as_pairs(self) -> list[list[float]]:
        return [[a, b] for a, b in zip(self.lo, self.hi)]


# -- Newton-type solvers -------------------------------------------------------------

System = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray, float]]


def _newton(system: System, p0: Sequence[float], tol: float, max_iter: int) -> tuple[np.ndarray, int]:
    """Minimum-norm Newton iteration on an (under)determined system.

    ``system(p)`` returns ``(F, J, scale)``; converged when ``max|F| <= tol * scale``.
    """
    p = np.array(p0, dtype=float)
    for it in range(max_iter + 1):
        F, Jm, scale = system(p)
        if np.max(np.abs(F)) <= tol * scale:
            return p, it
        if it == max_iter:
            break
        sv = np.linalg.svd(Jm, compute_uv=False)
        if sv[-1] <= 1e-13 * max(scale, 1e-300):
            raise DegenerateError(f"Jacobian is rank deficient at {p.tolist()}")
        step, *_ = np.linalg.lstsq(Jm, -F, rcond=None)
        p = p + step
        if not np.all(np.isfinite(p)):
            raise ConvergenceError("Newton iteration diverged")
    raise ConvergenceError(
        f"no convergence in {max_iter} iterations (residual {np.max(np.abs(F)):.3g})"
    )


def _lambda_system(h: HomSpec) -> System:
    def system(p):
        lam = lambda_jet(h, p, 1)
        return np.array([lam.value]), lam.gradient()[None, :], lam.scale()

    return system


def _chain_system(h: HomSpec, depth: int) -> System:
    def system(p):
        _, lams = eta_lambda_jets(h, p, depth)
        F = np.array([j.value for j in lams])
        Jm = np.vstack([j.gradient() for j in lams])
        return F, Jm, max(j.scale() for j in lams)

    return system


def refine_to_S(
    h: HomSpec, p0: Sequence[float], tol: float = REFINE_TOL, max_iter: int = REFINE_MAX_ITER
) -> np.ndarray:
    """Newton projection onto ``S``: ``p <- p - lambda grad(lambda) / |grad(lambda)|^2``."""
    return _newton(_lambda_system(h), p0, tol, max_iter)[0]


def refine_to_S2(
    h: HomSpec, p0: Sequence[float], tol: float = REFINE_TOL, max_iter: int = REFINE_MAX_ITER
) -> np.ndarray:
    """Gauss-Newton projection onto ``S2 = {lambda = eta lambda = 0}``."""
    return _newton(_chain_system(h, 1), p0, tol, max_iter)[0]


def refine_to_swallowtail(
    h: HomSpec, p0: Sequence[float], tol: float = REFINE_TOL, max_iter: int = REFINE_MAX_ITER
) -> np.ndarray:
    """Newton solve of ``lambda = eta lambda = eta^2 lambda = 0``."""
    return _newton(_chain_system(h, 2), p0, tol, max_iter)[0]


# -- grid scan of S --------------------------------------------------------------------


@dataclass(frozen=True)
class SurfaceSample:
    point: np.ndarray
    classification: Classification
    eta: np.ndarray
    d_lambda: np.ndarray

    @property
    def margin(self) -> float:
        return self.classification.min_distance


@dataclass(frozen=True)
class SurfaceSampleSet:
    samples: tuple[SurfaceSample, ...]
    box: Box
    n: int
    failures: tuple[tuple[tuple[float, ...], str], ...] = ()

    def __len__(self) -> int:
        return len(self.samples)

    def points(self) -> np.ndarray:
        return np.array([s.point for s in self.samples]).reshape(-1, len(self.box.lo))


def _map(fn, items: list, threads: int) -> list:
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def make_sample(h: HomSpec, q: Sequence[float], tol: ToleranceSet = DEFAULT_TOL) -> SurfaceSample:
    c = classify_point(h, q, tol)
    eta = np.asarray(c.diagnostics.get("eta", np.zeros(len(q))), dtype=float)
    dl = np.asarray(c.diagnostics.get("d_lambda", np.zeros(len(q))), dtype=float)
    return SurfaceSample(np.asarray(q, dtype=float), c, eta, dl)


def scan_singular_set(
    h: HomSpec,
    box: Box,
    n: int,
    tol: ToleranceSet = DEFAULT_TOL,
    threads: int = 1,
) -> SurfaceSampleSet:
    """Sample ``S`` on an ``n^3`` grid: sign changes of lambda along grid edges are
    bracketed, refined onto ``S`` and classified; hits closer than half a cell
    are merged. Output order follows grid index order.
    """
    if n < 2:
        raise PreconditionError("grid needs n >= 2 nodes per axis")
    dim = len(box.lo)
    axes = [np.linspace(a, b, n) for a, b in zip(box.lo, box.hi)]
    nodes = list(itertools.product(range(n), repeat=dim))

    def lam_at(p) -> float:
        try:
            return lambda_value(h, p)
        except BundleSingError:
            return math.nan

    def node_point(idx) -> np.ndarray:
        return np.array([axes[a][i] for a, i in enumerate(idx)])

    values = dict(zip(nodes, _map(lambda idx: lam_at(node_point(idx)), nodes, threads)))

    candidates: list[tuple[np.ndarray, np.ndarray | None, int]] = []
    for idx in nodes:
        va = values[idx]
        if va == 0.0:
            candidates.append((node_point(idx), None, -1))
            continue
        for a in range(dim):
            if idx[a] + 1 >= n:
                continue
            nb = idx[:a] + (idx[a] + 1,) + idx[a + 1 :]
            vb = values[nb]
            if np.isfinite(va) and np.isfinite(vb) and va * vb < 0:
                candidates.append((node_point(idx), node_point(nb), a))

    def locate(cand):
        pa, pb, _ = cand
        try:
            if pb is None:
                start = pa
            else:
                d = pb - pa
                t = brentq(lambda s: lam_at(pa + s * d), 0.0, 1.0, xtol=1e-14)
                start = pa + t * d
            q = refine_to_S(h, start)
            if not box.contains(q, slack=1e-12):
                return None, (tuple(start.tolist()), "refined point left the box")
            return make_sample(h, q, tol), None
        except (BundleSingError, ValueError, ArithmeticError) as exc:
            return None, (tuple(pa.tolist()), f"{type(exc).__name__}: {exc}")

    results = _map(locate, candidates, threads)
    radius = 0.5 * min((b - a) / (n - 1) for a, b in zip(box.lo, box.hi))
    kept: list[SurfaceSample] = []
    kept_pts = np.empty((0, dim))
    failures = []
    for sample, failure in results:
        if sample is None:
            if failure is not None:
                failures.append(failure)
            continue
        if len(kept_pts) and np.min(np.linalg.norm(kept_pts - sample.point, axis=1)) < radius:
            continue
        kept.append(sample)
        kept_pts = np.vstack([kept_pts, sample.point])
    return SurfaceSampleSet(tuple(kept), box, n, tuple(failures))


# -- continuation of S2 ------------------------------------------------------------------


@dataclass(frozen=True)
class CurveVertex:
    point: np.ndarray
    eta: np.ndarray
    tangent: np.ndarray
    residual: float
    classification: Classification | None = None
    flags: tuple[str, ...] = ()

    @property
    def kind(self) -> Kind | None:
        return self.classification.kind if self.classification else None


@dataclass(frozen=True)
class CurvePolyline:
    vertices: tuple[CurveVertex, ...]
    step: float
    stop_reasons: dict = field(default_factory=dict)
    seed_index: int = 0

    def __len__(self) -> int:
        return len(self.vertices)

    def points(self) -> np.ndarray:
        return np.array([v.point for v in self.vertices])

    def tangents(self) -> np.ndarray:
        return np.array([v.tangent for v in self.vertices])


def _s2_state(h: HomSpec, p: np.ndarray):
    eta, (lam, elam) = eta_lambda_jets(h, p, 1)
    F = np.array([lam.value, elam.value])
    Jm = np.vstack([lam.gradient(), elam.gradient()])
    return F, Jm, max(lam.scale(), elam.scale()), eta


def _tangent(Jm: np.ndarray) -> tuple[np.ndarray, float]:
    """Unit null vector of the 2x3 Jacobian and its conditioning (sin of the row angle)."""
    c = np.cross(Jm[0], Jm[1])
    denom = np.linalg.norm(Jm[0]) * np.linalg.norm(Jm[1])
    nc = np.linalg.norm(c)
    ratio = nc / denom if denom > 0 else 0.0
    return (c / nc if nc > 0 else c), ratio


def _correct(
    h: HomSpec, q0: np.ndarray, row: np.ndarray, target: float, tol: float
) -> np.ndarray | None:
    """Newton on ``(lambda, eta lambda, row . q - target) = 0``."""
    q = q0.copy()
    for _ in range(CORRECTOR_MAX_ITER + 1):
        try:
            F, Jm, scale, _ = _s2_state(h, q)
        except BundleSingError:
            return None
        G = np.append(F, row @ q - target)
        if np.max(np.abs(F)) <= tol * scale and abs(G[2]) <= 1e-12 * (1 + np.linalg.norm(q)):
            return q
        A = np.vstack([Jm, row])
        try:
            dq = np.linalg.solve(A, -G)
        except np.linalg.LinAlgError:
            return None
        q = q + dq
        if not np.all(np.isfinite(q)):
            return None
    return None


def _land_on_box(h, box: Box, p: np.ndarray, q: np.ndarray, tol: float) -> np.ndarray | None:
    d = q - p
    best = None
    for k in range(len(p)):
        for bound in (box.lo[k], box.hi[k]):
            if d[k] != 0 and (q[k] - bound) * (p[k] - bound) < 0:
                alpha = (bound - p[k]) / d[k]
                if best is None or alpha < best[0]:
                    best = (alpha, k, bound)
    if best is None:
        return None
    alpha, k, bound = best
    row = np.zeros(len(p))
    row[k] = 1.0
    r = _correct(h, p + alpha * d, row, bound, tol)
    if r is None or not box.contains(r, slack=1e-9):
        return None
    r[k] = bound
    return r


def trace_S2(
    h: HomSpec,
    seed: Sequence[float],
    step: float = DEFAULT_STEP,
    max_steps: int = DEFAULT_MAX_STEPS,
    tol: ToleranceSet = DEFAULT_TOL,
    box: Box | None = None,
    corrector_tol: float = CORRECTOR_TOL,
    direction: str = "both",
    classify: bool = True,
) -> CurvePolyline:
    """Pseudo-arclength continuation of ``S2`` through ``seed``.

    The seed is first projected onto ``S2``; from there the curve is followed
    in the requested direction(s) (``"both"``, ``"forward"``, ``"backward"``)
    until ``max_steps`` per direction, the box boundary (the last vertex is
    placed on the boundary face) or a corrector failure. Vertices where the
    step had to be reduced or the Jacobian was nearly rank deficient are
    flagged.
    """
    if direction not in ("both", "forward", "backward"):
        raise ValueError(f"bad direction {direction!r}")
    try:
        p0 = refine_to_S2(h, seed, tol=corrector_tol)
    except (ConvergenceError, DegenerateError) as exc:
        raise ConvergenceError(f"corrector failure: seed is not near S2 ({exc})") from exc
    F, Jm, scale, eta = _s2_state(h, p0)
    t0, cond = _tangent(Jm)
    if cond <= tol.rank:
        raise DegenerateError("d(lambda, eta lambda) is rank deficient at the seed")

    def make_vertex(q, t, F, scale, eta, flags):
        c = None
        if classify:
            try:
                c = classify_chain(eta_chain(h, q), tol)
            except BundleSingError as exc:
                flags = flags + (f"unclassified: {type(exc).__name__}",)
        res = float(np.max(np.abs(F)) / scale) if scale > 0 else 0.0
        return CurveVertex(np.array(q), np.array(eta), np.array(t), res, c, flags)

    seed_vertex = make_vertex(p0, t0, F, scale, eta, ())
    branches: dict[str, list[CurveVertex]] = {}
    reasons: dict[str, str] = {}
    signs = {"forward": 1.0, "backward": -1.0}
    wanted = ["forward", "backward"] if direction == "both" else [direction]
    min_step = step * MIN_STEP_FACTOR
    for name in wanted:
        p, t = p0.copy(), signs[name] * t0
        hstep = step
        out: list[CurveVertex] = []
        flags: tuple[str, ...] = ()
        reason = "max steps"
        while len(out) < max_steps:
            pred = p + hstep * t
            q = _correct(h, pred, t, t @ pred, corrector_tol)
            good = q is not None and np.linalg.norm(q - p) <= 2 * hstep and (q - p) @ t > 0
            if not good:
                if hstep > min_step:
                    hstep /= 2
                    flags = flags + ("reduced_step",) if "reduced_step" not in flags else flags
                    continue
                reason = "corrector failure"
                break
            if box is not None and not box.contains(q):
                r = _land_on_box(h, box, p, q, corrector_tol)
                if r is not None:
                    F, Jm, scale, eta = _s2_state(h, r)
                    tr, _ = _tangent(Jm)
                    tr = tr if tr @ t >= 0 else -tr
                    out.append(make_vertex(r, tr, F, scale, eta, flags))
                reason = "box exit"
                break
            F, Jm, scale, eta = _s2_state(h, q)
            tn, cond = _tangent(Jm)
            if cond <= tol.rank:
                flags = flags + ("rank_deficient",)
                tn = t
                hstep = max(hstep / 2, min_step)
            elif tn @ t < 0:
                tn = -tn
            out.append(make_vertex(q, tn, F, scale, eta, flags))
            flags = ()
            p, t = q, tn
            if hstep < step:
                hstep = min(step, 2 * hstep)
        branches[name] = out
        reasons[name] = reason

    back = branches.get("backward", [])
    # Backward vertices are reversed and their tangents flipped so that the
    # polyline has one consistent orientation.
    back_fixed = [
        CurveVertex(v.point, v.eta, -v.tangent, v.residual, v.classification, v.flags)
        for v in reversed(back)
    ]
    if direction == "backward":
        seed_vertex = CurveVertex(
            seed_vertex.point, seed_vertex.eta, -seed_vertex.tangent,
            seed_vertex.residual, seed_vertex.classification, seed_vertex.flags,
        )
    verts = back_fixed + [seed_vertex] + branches.get("forward", [])
    return CurvePolyline(tuple(verts), step, reasons, seed_index=len(back_fixed))


# -- geometric checks ----------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    point: tuple[float, ...]
    check: str
    value: float
    detail: str = ""

    def as_dict(self) -> dict:
        return {"point": list(self.point), "check": self.check, "value": self.value, "detail": self.detail}


@dataclass(frozen=True)
class GeometryReport:
    checked: int
    violations: tuple[Violation, ...]
    skipped: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "checked": self.checked,
            "skipped": self.skipped,
            "ok": self.ok,
            "violations": [v.as_dict() for v in self.violations],
        }


def _sin_angle(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0
    return float(np.linalg.norm(np.cross(a, b)) / (na * nb))


def check_fold_cusp_geometry(
    h: HomSpec,
    samples: Iterable[SurfaceSample] = (),
    curves: Iterable[CurvePolyline] = (),
    tol: ToleranceSet = DEFAULT_TOL,
) -> GeometryReport:
    """Fold-like: ``eta`` is transverse to ``S``. Cusp-like on ``S2``: ``eta`` is not
    tangent to the curve.
    """
    checked = 0
    bad = []
    for s in samples:
        if s.classification.kind is not Kind.FOLD_LIKE:
            continue
        checked += 1
        denom = np.linalg.norm(s.eta) * np.linalg.norm(s.d_lambda)
        value = float(abs(s.eta @ s.d_lambda) / denom) if denom > 0 else 0.0
        if not value > tol.zero:
            bad.append(Violation(tuple(s.point.tolist()), "fold_eta_transverse_to_S", value))
    for curve in curves:
        for v in curve.vertices:
            if v.kind is not Kind.CUSP_LIKE:
                continue
            checked += 1
            value = _sin_angle(v.eta, v.tangent)
            if not value > tol.zero:
                bad.append(Violation(tuple(v.point.tolist()), "cusp_eta_transverse_to_S2", value))
    return GeometryReport(checked, tuple(bad))


def chart_basis(normal: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal basis of ``normal``'s orthogonal complement (Gram-Schmidt on the
    coordinate axes least aligned with it)."""
    n = np.asarray(normal, dtype=float)
    nn = np.linalg.norm(n)
    if nn == 0:
        raise DegenerateError("chart construction failed: gradient of lambda vanishes")
    n = n / nn
    basis = []
    for k in np.argsort(np.abs(n), kind="stable"):
        e = np.zeros(len(n))
        e[k] = 1.0
        v = e - (e @ n) * n
        for b in basis:
            v = v - (v @ b) * b
        if np.linalg.norm(v) > 1e-8:
            basis.append(v / np.linalg.norm(v))
        if len(basis) == 2:
            break
    return basis[0], basis[1]


@dataclass(frozen=True)
class MuResult:
    s: np.ndarray
    mu: np.ndarray
    mu0: float
    dmu0: float
    passed: bool

    def as_dict(self) -> dict:
        return {
            "s": self.s.tolist(),
            "mu": self.mu.tolist(),
            "mu0": self.mu0,
            "dmu0": self.dmu0,
            "passed": self.passed,
        }


def check_swallowtail_mu(
    h: HomSpec,
    curve: CurvePolyline,
    p: Sequence[float],
    tol: ToleranceSet = DEFAULT_TOL,
    require_swallowtail: bool = True,
    field: str = "eta",
    window: int = 3,
) -> MuResult:
    """``mu(t) = det[gamma'(t) | v(gamma(t))]`` in a chart of ``S`` around ``p``.

    ``v`` is the null section (``field="eta"``) or the contact Hamilton field
    (``field="hamilton"``), normalised to unit length; ``gamma'`` is the unit
    tangent of ``S2``. The chart is the orthogonal projection onto the plane
    orthogonal to ``grad lambda(p)``. ``mu(0)`` is evaluated at ``p`` itself and
    ``mu'(0)`` from a cubic least-squares fit through the ``window``
    vertices on either side, parametrised by signed distance along the tangent.
    """
    if field not in ("eta", "hamilton"):
        raise ValueError(f"bad field {field!r}")
    p = np.asarray(p, dtype=float)
    chain = eta_chain(h, p)
    if require_swallowtail:
        c = classify_chain(chain, tol)
        if c.kind is not Kind.SWALLOWTAIL_LIKE:
            raise PreconditionError(f"point is {c.cls}, not swallowtail-like")
    b1, b2 = chart_basis(chain.d_lam)
    pts = curve.points()
    i0 = int(np.argmin(np.linalg.norm(pts - p, axis=1)))
    tp, _ = _tangent(np.vstack([chain.d_lam, chain.d_eta_lam]))
    if tp @ curve.vertices[i0].tangent < 0:
        tp = -tp

    def vec(q, eta_q):
        v = hamilton_field(h, q) if field == "hamilton" else eta_q
        nv = np.linalg.norm(v)
        if nv == 0:
            raise DegenerateError(f"{field} vanishes at {np.asarray(q).tolist()}")
        return v / nv

    def mu_at(t, v):
        return float((t @ b1) * (v @ b2) - (t @ b2) * (v @ b1))

    mu0 = mu_at(tp, vec(p, chain.eta_vector))
    lo, hi = max(0, i0 - window), min(len(pts), i0 + window + 1)
    s_list, mu_list = [0.0], [mu0]
    for v in curve.vertices[lo:hi]:
        s = float((v.point - p) @ tp)
        if abs(s) < 1e-12:
            continue
        s_list.append(s)
        mu_list.append(mu_at(v.tangent, vec(v.point, v.eta)))
    order = np.argsort(s_list)
    s_arr, mu_arr = np.array(s_list)[order], np.array(mu_list)[order]
    if len(s_arr) < 3:
        raise PreconditionError("not enough curve vertices around the point")
    deg = min(3, len(s_arr) - 2)
    coef = np.polyfit(s_arr, mu_arr, deg)
    dmu0 = float(coef[-2])
    passed = abs(mu0) < tol.zero and abs(dmu0) > tol.zero
    return MuResult(s_arr, mu_arr, mu0, dmu0, passed)


@dataclass(frozen=True)
class ContactCorollaryReport:
    cusp_checked: int
    parallel_checked: int
    swallowtail: tuple[MuResult, ...]
    violations: tuple[Violation, ...]
    skipped: int

    @property
    def ok(self) -> bool:
        return not self.violations and all(m.passed for m in self.swallowtail)

    def as_dict(self) -> dict:
        return {
            "cusp_checked": self.cusp_checked,
            "parallel_checked": self.parallel_checked,
            "swallowtail": [m.as_dict() for m in self.swallowtail],
            "violations": [v.as_dict() for v in self.violations],
            "skipped": self.skipped,
            "ok": self.ok,
        }


def check_contact_corollary(
    h: HomSpec, curves: Iterable[CurvePolyline], tol: ToleranceSet = DEFAULT_TOL
) -> ContactCorollaryReport:
    """On ``S2`` of a contact-frame homomorphism: the Hamilton field ``X`` is parallel
    to ``eta`` at non-fold vertices, not tangent to ``S2`` at cusp-like ones, and
    gives the ``mu`` signature at swallowtail-like ones.

    Vertices where ``X`` vanishes (``D1 = T S`` there) are counted as skipped.
    """
    cusp_checked = parallel_checked = skipped = 0
    bad: list[Violation] = []
    mus: list[MuResult] = []
    for curve in curves:
        for v in curve.vertices:
            if v.kind is None or v.kind is Kind.FOLD_LIKE:
                continue
            x = hamilton_field(h, v.point)
            if np.linalg.norm(x) <= tol.zero * max(1.0, np.linalg.norm(v.eta)):
                skipped += 1
                continue
            parallel_checked += 1
            sin_xe = _sin_angle(x, v.eta)
            if sin_xe > math.sqrt(tol.zero):
                bad.append(Violation(tuple(v.point.tolist()), "hamilton_parallel_eta", sin_xe))
            if v.kind is Kind.CUSP_LIKE:
                cusp_checked += 1
                value = _sin_angle(x, v.tangent)
                if not value > tol.zero:
                    bad.append(Violation(tuple(v.point.tolist()), "hamilton_transverse_to_S2", value))
            elif v.kind is Kind.SWALLOWTAIL_LIKE:
                mus.append(check_swallowtail_mu(h, curve, v.point, tol, field="hamilton"))
    return ContactCorollaryReport(cusp_checked, parallel_checked, tuple(mus), tuple(bad), skipped)
