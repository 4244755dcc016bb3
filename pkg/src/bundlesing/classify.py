"""Singularity classification.

Every decision is a zero test on a number measured against a scale: a test
records the raw value, its margin (value / scale, or a singular-value ratio)
and the tolerance it was compared with, so the class can be reproduced from
the diagnostics alone.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import NotOnSingularSetError, PreconditionError, RankZeroError
from .geometry import (
    CHAIN_ORDER,
    EtaChain,
    Frame,
    HomSpec,
    InducedHom,
    MapGerm,
    NullSectionModifier,
    det2,
    eta_chain,
    eta_field_jets,
    hom_matrix_jets,
    is_rank_zero,
    iterate_lie,
    lambda_jet,
    lie,
    matrix_value,
    null_section_from_matrix,
)
from .jets import Jet

NEAR_FACTOR = 10.0


@dataclass(frozen=True)
class ToleranceSet:
    """Relative tolerances: ``on_s`` for |lambda|, ``zero`` for zero tests, ``rank`` for rank tests."""

    on_s: float = 1e-9
    zero: float = 1e-7
    rank: float = 1e-6

    def updated(self, **overrides: float) -> ToleranceSet:
        unknown = set(overrides) - {"on_s", "zero", "rank"}
        if unknown:
            raise ValueError(f"unknown tolerance(s): {sorted(unknown)}")
        return replace(self, **{k: float(v) for k, v in overrides.items()})

    def as_dict(self) -> dict:
        return {"on_s": self.on_s, "zero": self.zero, "rank": self.rank}


DEFAULT_TOL = ToleranceSet()


@dataclass(frozen=True)
class Test:
    """One zero/rank test. ``nonzero`` is ``margin > tolerance``."""

    __test__ = False  # not a pytest class

    name: str
    value: float
    margin: float
    tolerance: float

    @property
    def nonzero(self) -> bool:
        return self.margin > self.tolerance

    @property
    def distance(self) -> float:
        """Factor by which the margin clears the threshold (>= 1)."""
        if self.margin == 0.0:
            return math.inf
        return max(self.margin / self.tolerance, self.tolerance / self.margin)

    @property
    def near_threshold(self) -> bool:
        return self.distance < NEAR_FACTOR

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "margin": self.margin,
            "tolerance": self.tolerance,
            "nonzero": self.nonzero,
            "distance": self.distance,
            "near_threshold": self.near_threshold,
        }


def _ratio(value: float, scale: float) -> float:
    return abs(value) / scale if scale > 0 else (0.0 if value == 0 else math.inf)


# -- classes ---------------------------------------------------------------------


class Kind(enum.Enum):
    REGULAR = "Regular"
    FOLD_LIKE = "FoldLike"
    CUSP_LIKE = "CuspLike"
    SWALLOWTAIL_LIKE = "SwallowtailLike"
    DEGENERATE = "DegenerateNonClassified"
    RANK_ZERO = "RankZero"


class Subtype(enum.Enum):
    TANGENT = "Tangent"
    TRANSVERSE = "Transverse"


@dataclass(frozen=True)
class SingularClass:
    kind: Kind
    subtype: Subtype | None = None
    reason: str | None = field(default=None, compare=False)

    def __post_init__(self):
        needs = self.kind in (Kind.CUSP_LIKE, Kind.SWALLOWTAIL_LIKE)
        if needs != (self.subtype is not None):
            raise ValueError(f"{self.kind.value} {'needs' if needs else 'takes no'} subtype")

    def __str__(self) -> str:
        if self.subtype is not None:
            return f"{self.kind.value}({self.subtype.value})"
        if self.reason:
            return f"{self.kind.value}({self.reason})"
        return self.kind.value


@dataclass(frozen=True)
class Classification:
    cls: SingularClass
    tests: tuple[Test, ...]
    diagnostics: dict
    tolerances: ToleranceSet

    @property
    def kind(self) -> Kind:
        return self.cls.kind

    @property
    def near_threshold(self) -> bool:
        return any(t.near_threshold for t in self.tests)

    @property
    def min_distance(self) -> float:
        return min((t.distance for t in self.tests), default=math.inf)

    def decisive(self, factor: float = NEAR_FACTOR) -> bool:
        """All tests clear their thresholds by at least ``factor``."""
        return self.min_distance >= factor

    def test(self, name: str) -> Test:
        for t in self.tests:
            if t.name == name:
                return t
        raise KeyError(name)

    @property
    def margins(self) -> dict:
        return {t.name: t.margin for t in self.tests}

    def as_dict(self) -> dict:
        return {
            "class": str(self.cls),
            "kind": self.cls.kind.value,
            "subtype": self.cls.subtype.value if self.cls.subtype else None,
            "reason": self.cls.reason,
            "tests": [t.as_dict() for t in self.tests],
            "diagnostics": _plain(self.diagnostics),
            "tolerances": self.tolerances.as_dict(),
            "near_threshold": self.near_threshold,
        }


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def _rank_test(name: str, rows: np.ndarray, tol: float) -> tuple[Test, np.ndarray]:
    sv = np.linalg.svd(np.asarray(rows, dtype=float), compute_uv=False)
    ratio = float(sv[-1] / sv[0]) if sv[0] > 0 else 0.0
    return Test(name, float(sv[-1]), ratio, tol), sv


def _subtype(frame_derivs: np.ndarray, scale: float, tol: ToleranceSet) -> tuple[Subtype, Test]:
    value = float(np.max(np.abs(frame_derivs)))
    t = Test("frame_lambda", value, _ratio(value, scale), tol.zero)
    return (Subtype.TRANSVERSE if t.nonzero else Subtype.TANGENT), t


# -- Definition-level classifier --------------------------------------------------------


def classify_chain(chain: EtaChain, tol: ToleranceSet = DEFAULT_TOL) -> Classification:
    """Decide the class from a precomputed derivative chain."""
    s0, s1, s2, _ = chain.scales
    lam, eta_lam, eta2_lam, eta3_lam = chain.values
    diag = {
        "point": list(chain.point),
        "lambda": lam,
        "eta_lambda": eta_lam,
        "eta2_lambda": eta2_lam,
        "eta3_lambda": eta3_lam,
        "d_lambda": chain.d_lam,
        "d_eta_lambda": chain.d_eta_lam,
        "d_eta2_lambda": chain.d_eta2_lam,
        "frame_lambda": chain.frame_derivatives,
        "eta": chain.eta_vector,
        "null_section_column": chain.column + 1,
        "scale": chain.scale,
        "scales": list(chain.scales),
    }
    on_s = Test("on_S", abs(lam), _ratio(lam, s0), tol.on_s)
    if on_s.nonzero:
        raise NotOnSingularSetError(
            f"|lambda| = {abs(lam):.3g} exceeds on-S tolerance at {list(chain.point)}"
        )
    tests = [on_s]

    def done(cls: SingularClass) -> Classification:
        return Classification(cls, tuple(tests), diag, tol)

    fold = Test("eta_lambda", abs(eta_lam), _ratio(eta_lam, s1), tol.zero)
    tests.append(fold)
    if fold.nonzero:
        return done(SingularClass(Kind.FOLD_LIKE))
    dl = float(np.linalg.norm(chain.d_lam))
    nondeg = Test("d_lambda", dl, _ratio(dl, s0), tol.zero)
    tests.append(nondeg)
    if not nondeg.nonzero:
        return done(SingularClass(Kind.DEGENERATE, reason="d lambda = 0"))
    subtype, sub_test = _subtype(chain.frame_derivatives, chain.frame_scale, tol)
    cusp = Test("eta2_lambda", abs(eta2_lam), _ratio(eta2_lam, s2), tol.zero)
    tests.append(cusp)
    if cusp.nonzero:
        tests.append(sub_test)
        return done(SingularClass(Kind.CUSP_LIKE, subtype))
    rank, sv = _rank_test("rank_d_chain", chain.normalized_rows, tol.rank)
    diag["singular_values"] = sv
    tests.append(rank)
    if rank.nonzero:
        tests.append(sub_test)
        return done(SingularClass(Kind.SWALLOWTAIL_LIKE, subtype))
    return done(SingularClass(Kind.DEGENERATE, reason="rank d(lambda, eta lambda, eta^2 lambda) < 3"))


def _rank_zero_classification(m, tol: ToleranceSet, p) -> Classification:
    mv = matrix_value(m)
    scale = max(e.scale() for row in m for e in row)
    value = float(np.max(np.abs(mv)))
    t = Test("matrix_norm", value, _ratio(value, scale), 1e-8)
    return Classification(
        SingularClass(Kind.RANK_ZERO), (t,), {"point": list(p), "matrix": mv, "scale": scale}, tol
    )


def classify_point(
    h: HomSpec,
    p: Sequence[float],
    tol: ToleranceSet = DEFAULT_TOL,
    modifier: NullSectionModifier | None = None,
    column: int | None = None,
) -> Classification:
    """Classify a point of ``S`` as fold-, cusp- or swallowtail-like.

    ``p`` must already lie on ``S`` (``|lambda| <= tol.on_s * scale``); corank-2
    points come back as ``RankZero``. ``modifier`` and ``column`` choose a
    different null section; the class must not depend on either.
    """
    p = tuple(float(v) for v in p)
    m = hom_matrix_jets(h, p, CHAIN_ORDER)
    if is_rank_zero(m):
        return _rank_zero_classification(m, tol, p)
    return classify_chain(eta_chain(h, p, modifier=modifier, column=column), tol)


def classify_any(
    h: HomSpec, p: Sequence[float], tol: ToleranceSet = DEFAULT_TOL
) -> Classification:
    """Like :func:`classify_point` but points off ``S`` come back as ``Regular``
    with their on-S test instead of raising."""
    p = tuple(float(v) for v in p)
    m = hom_matrix_jets(h, p, CHAIN_ORDER)
    if is_rank_zero(m):
        return _rank_zero_classification(m, tol, p)
    chain = eta_chain(h, p)
    lam = chain.values[0]
    on_s = Test("on_S", abs(lam), _ratio(lam, chain.scales[0]), tol.on_s)
    if on_s.nonzero:
        diag = {"point": list(p), "lambda": lam, "scale": chain.scales[0]}
        return Classification(SingularClass(Kind.REGULAR), (on_s,), diag, tol)
    return classify_chain(chain, tol)


# -- induced homomorphisms: determinant criteria -------------------------------------------


def classify_induced_prop4(
    h: InducedHom, p: Sequence[float], tol: ToleranceSet = DEFAULT_TOL
) -> Classification:
    """Classify via ``q_k = det(e1 f, eta^k f)`` instead of the lambda chain.

    fold-like iff ``q_2 != 0``; for non-degenerate points cusp-like iff
    ``q_2 = 0, q_3 != 0``; swallowtail-like iff ``q_2 = q_3 = 0``, ``q_4 != 0``
    and ``d q_1, d q_2, d q_3`` are linearly independent.
    """
    if not isinstance(h, InducedHom):
        raise PreconditionError("classify_induced_prop4 needs an induced homomorphism")
    p = tuple(float(v) for v in p)
    order = CHAIN_ORDER
    m = hom_matrix_jets(h, p, order)
    if is_rank_zero(m):
        return _rank_zero_classification(m, tol, p)
    mv = matrix_value(m)
    swapped = bool(np.linalg.norm(mv[:, 0]) < np.linalg.norm(mv[:, 1]))
    frame = h.frame
    if swapped:
        frame = Frame((frame.fields[1], frame.fields[0]))
        m = [[row[1], row[0]] for row in m]
    ns = null_section_from_matrix(m)
    frame_jets = frame.jets(p, order)
    eta = eta_field_jets(ns, frame_jets)
    e1f = [m[0][0], m[1][0]]
    chains = [iterate_lie(eta, fi, 4) for fi in h.f.jets(p, order + 1)]
    q = []
    for k in range(1, 5):
        a = [c.truncate(order + 1 - k) for c in e1f]
        b = [chains[0][k], chains[1][k]]
        q.append(a[0] * b[1] - a[1] * b[0])
    # q_k is homogeneous of degree k in eta; see EtaChain.scales
    n = float(np.linalg.norm([c.value for c in eta]))
    qs = [max(q[k].scale(), q[0].scale() * n**k) for k in range(4)]
    s = max(j.scale() for j in q)
    lam = det2(m)
    frame_derivs = np.array([[c.value for c in fj] for fj in frame_jets]) @ lam.gradient()
    diag = {
        "point": list(p),
        "q": [qk.value for qk in q],
        "d_q": [q[k].gradient() for k in range(3)],
        "frame_swapped": swapped,
        "eta": [c.value for c in eta],
        "scale": s,
        "scales": qs,
    }
    tests = [Test("on_S", abs(q[0].value), _ratio(q[0].value, qs[0]), tol.on_s)]
    if tests[0].nonzero:
        raise NotOnSingularSetError(f"q_1 = {q[0].value:.3g} exceeds on-S tolerance at {list(p)}")

    def done(cls: SingularClass) -> Classification:
        return Classification(cls, tuple(tests), diag, tol)

    tests.append(Test("q2", abs(q[1].value), _ratio(q[1].value, qs[1]), tol.zero))
    if tests[-1].nonzero:
        return done(SingularClass(Kind.FOLD_LIKE))
    dq1 = float(np.linalg.norm(q[0].gradient()))
    tests.append(Test("d_q1", dq1, _ratio(dq1, qs[0]), tol.zero))
    if not tests[-1].nonzero:
        return done(SingularClass(Kind.DEGENERATE, reason="d lambda = 0"))
    frame_scale = lam.scale() * float(np.max([np.linalg.norm([c.value for c in fj]) for fj in frame_jets]))
    subtype, sub_test = _subtype(frame_derivs, frame_scale, tol)
    tests.append(Test("q3", abs(q[2].value), _ratio(q[2].value, qs[2]), tol.zero))
    if tests[-1].nonzero:
        tests.append(sub_test)
        return done(SingularClass(Kind.CUSP_LIKE, subtype))
    tests.append(Test("q4", abs(q[3].value), _ratio(q[3].value, qs[3]), tol.zero))
    rows = np.vstack([g / sk if sk > 0 else g for g, sk in zip(diag["d_q"], qs)])
    rank, sv = _rank_test("rank_d_q", rows, tol.rank)
    diag["singular_values"] = sv
    tests.append(rank)
    if tests[-2].nonzero and rank.nonzero:
        tests.append(sub_test)
        return done(SingularClass(Kind.SWALLOWTAIL_LIKE, subtype))
    return done(SingularClass(Kind.DEGENERATE, reason="q_4 = 0 or rank d(q_1, q_2, q_3) < 3"))


# -- Morin maps R^3 -> R^2 ----------------------------------------------------------------


class MorinKind(enum.Enum):
    REGULAR = "Regular"
    DEFINITE_FOLD = "DefiniteFold"
    INDEFINITE_FOLD = "IndefiniteFold"
    CUSP = "Cusp"
    NOT_MORIN = "NotMorin"


@dataclass(frozen=True)
class MorinClass:
    kind: MorinKind
    tests: tuple[Test, ...]
    diagnostics: dict
    reason: str | None = None

    @property
    def near_threshold(self) -> bool:
        return any(t.near_threshold for t in self.tests)

    def as_dict(self) -> dict:
        return {
            "class": self.kind.value,
            "reason": self.reason,
            "tests": [t.as_dict() for t in self.tests],
            "diagnostics": _plain(self.diagnostics),
            "near_threshold": self.near_threshold,
        }


def morin_classify(f: MapGerm, p: Sequence[float], tol: ToleranceSet = DEFAULT_TOL) -> MorinClass:
    """Definite fold / indefinite fold / cusp test for a map germ ``R^3 -> R^2``."""
    if len(f.components) != 2 or len(f.coords) != 3:
        raise PreconditionError("morin_classify needs a map R^3 -> R^2")
    p = tuple(float(v) for v in p)
    fj = f.jets(p, 4)
    df = np.array([c.gradient() for c in fj])
    scale_f = max(float(np.max(np.abs(c.coeffs[1:]))) for c in fj)
    sv = np.linalg.svd(df, compute_uv=False)
    tests = [Test("df_norm", float(sv[0]), _ratio(sv[0], scale_f), tol.zero)]
    diag: dict = {"point": list(p), "df": df}
    if not tests[0].nonzero:
        return MorinClass(MorinKind.NOT_MORIN, tuple(tests), diag, "rank df = 0")
    tests.append(Test("rank_df", float(sv[1]), float(sv[1] / sv[0]), tol.rank))
    if tests[-1].nonzero:
        return MorinClass(MorinKind.REGULAR, tuple(tests), diag)

    # xi: coordinate direction with the largest column of df; c: its largest component.
    xi = int(np.argmax(np.linalg.norm(df, axis=0)))
    c = int(np.argmax(np.abs(df[:, xi])))
    others = [j for j in range(3) if j != xi]
    dfj = [[fi.partial(k) for k in range(3)] for fi in fj]  # order 3
    xi_f = [dfj[0][xi], dfj[1][xi]]
    etas, eta_f = [], []
    for b in others:
        k = dfj[c][b] / dfj[c][xi]
        comps = [Jet.zero(3, 3)] * 3
        comps[xi] = -k
        comps[b] = Jet.constant(1.0, 3, 3)
        etas.append(comps)
        eta_f.append([dfj[0][b] - k * dfj[0][xi], dfj[1][b] - k * dfj[1][xi]])
    lams = [xi_f[0] * ef[1] - xi_f[1] * ef[0] for ef in eta_f]  # order 3
    hj = [[lie(etas[j], lams[i]) for j in range(2)] for i in range(2)]  # order 2
    det_h = det2(hj)
    hv = matrix_value(hj)
    s = max(lam.scale() for lam in lams)
    s2 = s * s
    diag.update(
        {
            "xi": xi,
            "lambda": [lam.value for lam in lams],
            "H": hv,
            "det_H": det_h.value,
            "scale": s,
        }
    )
    tests.append(Test("det_H", abs(det_h.value), _ratio(det_h.value, s2), tol.zero))
    if tests[-1].nonzero:
        kind = MorinKind.DEFINITE_FOLD if det_h.value > 0 else MorinKind.INDEFINITE_FOLD
        return MorinClass(kind, tuple(tests), diag)
    u, hsv, vt = np.linalg.svd(hv)
    tests.append(Test("H_norm", float(hsv[0]), _ratio(hsv[0], s), tol.zero))
    if not tests[-1].nonzero:
        return MorinClass(MorinKind.NOT_MORIN, tuple(tests), diag, "H(p) = 0")
    theta = vt[-1]
    theta = theta if theta[np.argmax(np.abs(theta))] > 0 else -theta
    theta_field = [theta[0] * etas[0][i].truncate(2) + theta[1] * etas[1][i].truncate(2) for i in range(3)]
    theta_det = lie(theta_field, det_h).value
    diag["theta"] = theta
    diag["theta_det_H"] = theta_det
    tests.append(Test("theta_det_H", abs(theta_det), _ratio(theta_det, s2), tol.zero))
    if tests[-1].nonzero:
        return MorinClass(MorinKind.CUSP, tuple(tests), diag)
    return MorinClass(MorinKind.NOT_MORIN, tuple(tests), diag, "theta(det H) = 0")


# -- plane maps and the foliation case -----------------------------------------------------------


class PlaneKind(enum.Enum):
    REGULAR = "Regular"
    FOLD = "Fold"
    CUSP = "Cusp"
    SWALLOWTAIL = "Swallowtail"
    NOT_CLASSIFIED = "NotClassified"


@dataclass(frozen=True)
class PlaneClass:
    kind: PlaneKind
    tests: tuple[Test, ...]
    diagnostics: dict

    @property
    def near_threshold(self) -> bool:
        return any(t.near_threshold for t in self.tests)

    def decisive(self, factor: float = NEAR_FACTOR) -> bool:
        return min((t.distance for t in self.tests), default=math.inf) >= factor

    def as_dict(self) -> dict:
        return {
            "class": self.kind.value,
            "tests": [t.as_dict() for t in self.tests],
            "diagnostics": _plain(self.diagnostics),
            "near_threshold": self.near_threshold,
        }


def plane_map_classify(
    L: MapGerm, p: Sequence[float], tol: ToleranceSet = DEFAULT_TOL
) -> PlaneClass:
    """Fold / cusp / swallowtail criteria for a plane-to-plane map germ."""
    if len(L.components) != 2 or len(L.coords) != 2:
        raise PreconditionError("plane_map_classify needs a map R^2 -> R^2")
    p = tuple(float(v) for v in p)
    h = InducedHom(L, Frame.coordinate(L.coords))
    m = hom_matrix_jets(h, p, CHAIN_ORDER)
    if is_rank_zero(m):
        return PlaneClass(PlaneKind.NOT_CLASSIFIED, (), {"point": list(p), "reason": "dL = 0"})
    chain = eta_chain(h, p)
    sc = chain.scales
    lam, eta_lam, eta2_lam, eta3_lam = chain.values
    diag = {
        "point": list(p),
        "lambda": lam,
        "eta_lambda": eta_lam,
        "eta2_lambda": eta2_lam,
        "eta3_lambda": eta3_lam,
        "d_lambda": chain.d_lam,
        "eta": chain.eta_vector,
        "scale": chain.scale,
        "scales": list(sc),
    }
    tests = [Test("on_S", abs(lam), _ratio(lam, sc[0]), tol.on_s)]
    if tests[0].nonzero:
        return PlaneClass(PlaneKind.REGULAR, tuple(tests), diag)
    steps = [
        ("eta_lambda", eta_lam, sc[1], PlaneKind.FOLD),
        ("d_lambda", float(np.linalg.norm(chain.d_lam)), sc[0], None),
        ("eta2_lambda", eta2_lam, sc[2], PlaneKind.CUSP),
        ("eta3_lambda", eta3_lam, sc[3], PlaneKind.SWALLOWTAIL),
    ]
    for name, value, s, kind in steps:
        t = Test(name, abs(value), _ratio(value, s), tol.zero)
        tests.append(t)
        if kind is None:
            if not t.nonzero:
                break
        elif t.nonzero:
            return PlaneClass(kind, tuple(tests), diag)
    return PlaneClass(PlaneKind.NOT_CLASSIFIED, tuple(tests), diag)


def _same_frame(a: Frame, b: Frame) -> bool:
    return a.fields == b.fields


def leaf_map(h: InducedHom, z: float) -> MapGerm:
    """``L(x, y) = f(x, y, z)`` for the leaf ``z = const``."""
    return MapGerm(tuple(c.substitute({2: z}) for c in h.f.components))


def foliation_leaf_classify(
    h: InducedHom, p: Sequence[float], tol: ToleranceSet = DEFAULT_TOL
) -> PlaneClass:
    """Classify the restriction of ``f`` to the leaf through ``p``."""
    if not isinstance(h, InducedHom) or not _same_frame(h.frame, Frame.foliation(h.coords)):
        raise PreconditionError("foliation_leaf_classify needs an induced spec with the foliation frame")
    return plane_map_classify(leaf_map(h, float(p[2])), (float(p[0]), float(p[1])), tol)


# -- contact structures ------------------------------------------------------------------------


def _require_contact(h: HomSpec) -> None:
    if not _same_frame(h.frame, Frame.contact(h.coords)):
        raise PreconditionError("operation needs the contact frame (d/dx, d/dy - x d/dz)")


def hamilton_field(h: HomSpec, p: Sequence[float]) -> np.ndarray:
    """Hamilton vector field of ``lambda_phi`` for the standard contact form, at ``p``."""
    _require_contact(h)
    lam = lambda_jet(h, p, 1)
    lx, ly, lz = lam.gradient()
    x = float(p[0])
    return np.array([ly - x * lz, -lx, -(lam.value - x * lx)]) + 0.0


def distance_to_span(v: np.ndarray, frame_matrix: np.ndarray) -> float:
    """Euclidean distance from ``v`` to the column span of ``frame_matrix``."""
    coef, *_ = np.linalg.lstsq(frame_matrix, v, rcond=None)
    return float(np.linalg.norm(v - frame_matrix @ coef))


def hamilton_in_distribution(
    h: HomSpec, p: Sequence[float], tol: ToleranceSet = DEFAULT_TOL
) -> tuple[bool, float]:
    """Whether ``X_p`` lies in ``D1``; returns (verdict, relative distance)."""
    x = hamilton_field(h, p)
    lam = lambda_jet(h, p, 1)
    scale = lam.scale()
    dist = distance_to_span(x, h.frame.matrix(p))
    margin = _ratio(dist, scale)
    return margin <= tol.on_s, margin


@dataclass(frozen=True)
class ContactTest:
    independent: bool
    test: Test
    hamilton: np.ndarray
    eta: np.ndarray

    def as_dict(self) -> dict:
        return {
            "independent": self.independent,
            "test": self.test.as_dict(),
            "hamilton": self.hamilton.tolist(),
            "eta": self.eta.tolist(),
        }


def contact_fold_test(
    h: HomSpec, p: Sequence[float], tol: ToleranceSet = DEFAULT_TOL
) -> ContactTest:
    """Linear independence of the Hamilton field and the null section at ``p``."""
    _require_contact(h)
    p = tuple(float(v) for v in p)
    m = hom_matrix_jets(h, p, 1)
    if is_rank_zero(m):
        raise RankZeroError(f"corank 2 at {list(p)}")
    chain = eta_chain(h, p)
    if _ratio(chain.values[0], chain.scales[0]) > tol.on_s:
        raise NotOnSingularSetError(f"point {list(p)} is not on S")
    x = hamilton_field(h, p)
    eta = chain.eta_vector
    sv = np.linalg.svd(np.column_stack([x, eta]), compute_uv=False)
    t = Test("sigma2_over_sigma1", float(sv[1]), float(sv[1] / sv[0]) if sv[0] > 0 else 0.0, tol.rank)
    return ContactTest(t.nonzero, t, x, eta)
