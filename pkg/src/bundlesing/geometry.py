"""Frames, bundle homomorphisms and the derivative chain of their determinant.

A homomorphism ``phi: D1 -> D2`` between rank-2 bundles over an open set of
R^m is represented by its 2x2 matrix ``M`` in chosen frames, either given
directly (:class:`ExplicitHom`) or induced by a map ``f`` through
``M = (e1 f, e2 f)`` (:class:`InducedHom`). Everything is computed in the jet
ring at a base point, so all derivatives are exact up to rounding.

The null section is taken as the adjugate column of ``M`` with the larger
value at the base point: ``M @ adj(M) = det(M) * I`` makes it a kernel
generator along ``S = {det M = 0}`` and it extends smoothly off ``S``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import FrameDegenerateError, PreconditionError, RankZeroError
from .expr import Expression, parse
from .jets import MAX_ORDER, Jet

CORANK_TOL = 1e-8
FRAME_TOL = 1e-10
CHAIN_ORDER = 4


@dataclass(frozen=True)
class VectorField:
    """Vector field with coefficient expressions w.r.t. the coordinate fields."""

    components: tuple[Expression, ...]

    def __post_init__(self):
        coords = {c.coords for c in self.components}
        if len(coords) != 1:
            raise ValueError("vector field components must share one coordinate list")

    @classmethod
    def parse(cls, texts: Sequence[str], coords: Sequence[str]) -> VectorField:
        return cls(tuple(parse(t, coords) for t in texts))

    @property
    def coords(self) -> tuple[str, ...]:
        return self.components[0].coords

    def jets(self, p: Sequence[float], order: int) -> list[Jet]:
        return [c.jet(p, order) for c in self.components]

    def at(self, p: Sequence[float]) -> np.ndarray:
        return np.array([float(c.evaluate(p)) for c in self.components])

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.components) + ")"


@dataclass(frozen=True)
class Frame:
    """Ordered vector fields spanning a distribution ``D1``."""

    fields: tuple[VectorField, ...]
    name: str | None = field(default=None, compare=False)

    @property
    def rank(self) -> int:
        return len(self.fields)

    @property
    def coords(self) -> tuple[str, ...]:
        return self.fields[0].coords

    @classmethod
    def parse(cls, rows: Sequence[Sequence[str]], coords: Sequence[str], name=None) -> Frame:
        return cls(tuple(VectorField.parse(r, coords) for r in rows), name)

    @classmethod
    def coordinate(cls, coords: Sequence[str], count: int | None = None) -> Frame:
        """The first ``count`` coordinate fields."""
        m = len(coords)
        count = m if count is None else count
        rows = [["1" if i == j else "0" for i in range(m)] for j in range(count)]
        return cls.parse(rows, coords, name="coordinate")

    @classmethod
    def foliation(cls, coords: Sequence[str] = ("x", "y", "z")) -> Frame:
        """``(d/dx, d/dy)``: tangent planes to the leaves ``z = const``."""
        if len(coords) != 3:
            raise ValueError("the foliation preset needs three coordinates")
        return cls.parse([["1", "0", "0"], ["0", "1", "0"]], coords, name="foliation")

    @classmethod
    def contact(cls, coords: Sequence[str] = ("x", "y", "z")) -> Frame:
        """``(d/dx, d/dy - x d/dz)``: the standard contact structure ``ker(dz + x dy)``."""
        if len(coords) != 3:
            raise ValueError("the contact preset needs three coordinates")
        x = coords[0]
        return cls.parse([["1", "0", "0"], ["0", "1", f"-{x}"]], coords, name="contact")

    def matrix(self, p: Sequence[float]) -> np.ndarray:
        """m x r matrix whose columns are the frame vectors at ``p``."""
        return np.column_stack([f.at(p) for f in self.fields])

    def check(self, p: Sequence[float], tol: float = FRAME_TOL) -> None:
        sv = np.linalg.svd(self.matrix(p), compute_uv=False)
        if not sv[-1] > tol * max(1.0, sv[0]):
            raise FrameDegenerateError(
                f"frame vectors are dependent at {list(p)} (singular values {sv.tolist()})"
            )

    def jets(self, p: Sequence[float], order: int) -> list[list[Jet]]:
        """``out[j][k]`` is the jet of the k-th coordinate component of field j."""
        return [f.jets(p, order) for f in self.fields]

    def transformed(self, c: np.ndarray) -> Frame:
        """New frame ``e'_j = sum_i e_i c[i, j]``."""
        c = np.asarray(c, dtype=float)
        m = len(self.coords)
        new_fields = []
        for j in range(self.rank):
            comps = []
            for k in range(m):
                acc = None
                for i in range(self.rank):
                    term = float(c[i, j]) * self.fields[i].components[k]
                    acc = term if acc is None else acc + term
                comps.append(acc)
            new_fields.append(VectorField(tuple(comps)))
        return Frame(tuple(new_fields), None)


@dataclass(frozen=True)
class MapGerm:
    """A map ``f: R^m -> R^r`` given by component expressions."""

    components: tuple[Expression, ...]

    @classmethod
    def parse(cls, texts: Sequence[str], coords: Sequence[str]) -> MapGerm:
        return cls(tuple(parse(t, coords) for t in texts))

    @property
    def coords(self) -> tuple[str, ...]:
        return self.components[0].coords

    def jets(self, p: Sequence[float], order: int) -> list[Jet]:
        return [c.jet(p, order) for c in self.components]

    def differential(self, p: Sequence[float]) -> np.ndarray:
        """r x m Jacobian at ``p``."""
        return np.array([j.gradient() for j in self.jets(p, 1)])

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.components) + ")"


def _linear_combination(coeffs: Sequence[float], exprs: Sequence[Expression]) -> Expression:
    acc = None
    for c, e in zip(coeffs, exprs):
        term = float(c) * e
        acc = term if acc is None else acc + term
    return acc


@dataclass(frozen=True)
class ExplicitHom:
    """``phi`` given by its matrix in a frame of D1 and a frame of D2.

    ``frame`` is the D1 frame; it is needed to turn the null section into a
    vector field and defaults to the foliation frame ``(d/dx, d/dy)``.
    """

    matrix: tuple[tuple[Expression, ...], ...]
    frame: Frame

    def __post_init__(self):
        r = len(self.matrix)
        if any(len(row) != r for row in self.matrix):
            raise ValueError("explicit homomorphism matrix must be square")
        if self.frame.rank != r:
            raise ValueError(f"frame rank {self.frame.rank} != matrix size {r}")

    @classmethod
    def parse(
        cls,
        rows: Sequence[Sequence[str]],
        coords: Sequence[str] = ("x", "y", "z"),
        frame: Frame | None = None,
    ) -> ExplicitHom:
        coords = tuple(coords)
        mat = tuple(tuple(parse(t, coords) for t in row) for row in rows)
        return cls(mat, frame if frame is not None else Frame.foliation(coords))

    @property
    def coords(self) -> tuple[str, ...]:
        return self.frame.coords

    @property
    def rank(self) -> int:
        return len(self.matrix)

    def matrix_jets(self, p: Sequence[float], order: int) -> list[list[Jet]]:
        return [[e.jet(p, order) for e in row] for row in self.matrix]

    def frame_changed(self, c1, c2) -> ExplicitHom:
        """Same homomorphism in frames changed by ``C1`` (on D1) and ``C2`` (on D2)."""
        c1 = np.asarray(c1, dtype=float)
        c2inv = np.linalg.inv(np.asarray(c2, dtype=float))
        r = self.rank
        # (C2^-1 M C1)_{ij} = sum_{k,l} C2inv_ik M_kl C1_lj
        rows = []
        for i in range(r):
            row = []
            for j in range(r):
                coeffs, exprs = [], []
                for k in range(r):
                    for l in range(r):
                        coeffs.append(c2inv[i, k] * c1[l, j])
                        exprs.append(self.matrix[k][l])
                row.append(_linear_combination(coeffs, exprs))
            rows.append(tuple(row))
        return ExplicitHom(tuple(rows), self.frame.transformed(c1))


@dataclass(frozen=True)
class InducedHom:
    """``phi(v) = df(v)`` restricted to ``D1 = span(frame)``."""

    f: MapGerm
    frame: Frame

    def __post_init__(self):
        if len(self.f.components) != self.frame.rank:
            raise ValueError("target dimension must equal the rank of the frame")
        if self.f.coords != self.frame.coords:
            raise ValueError("map and frame use different coordinates")

    @classmethod
    def parse(
        cls,
        components: Sequence[str],
        frame: Frame | str = "foliation",
        coords: Sequence[str] = ("x", "y", "z"),
    ) -> InducedHom:
        coords = tuple(coords)
        if isinstance(frame, str):
            frame = preset_frame(frame, coords)
        return cls(MapGerm.parse(components, coords), frame)

    @property
    def coords(self) -> tuple[str, ...]:
        return self.frame.coords

    @property
    def rank(self) -> int:
        return self.frame.rank

    def matrix_jets(self, p: Sequence[float], order: int) -> list[list[Jet]]:
        if order + 1 > MAX_ORDER:
            raise PreconditionError(f"order {order} needs map jets beyond {MAX_ORDER}")
        fj = self.f.jets(p, order + 1)
        df = [[fi.partial(k) for k in range(len(p))] for fi in fj]
        ej = self.frame.jets(p, order)
        return [[_dot(ej[j], df[i]) for j in range(self.rank)] for i in range(len(fj))]

    def frame_changed(self, c1, c2) -> InducedHom:
        c2inv = np.linalg.inv(np.asarray(c2, dtype=float))
        comps = tuple(
            _linear_combination(c2inv[i], self.f.components) for i in range(c2inv.shape[0])
        )
        return InducedHom(MapGerm(comps), self.frame.transformed(c1))


HomSpec = Union[ExplicitHom, InducedHom]


def preset_frame(name: str, coords: Sequence[str] = ("x", "y", "z")) -> Frame:
    presets = {"foliation": Frame.foliation, "contact": Frame.contact}
    try:
        return presets[name](coords)
    except KeyError:
        raise ValueError(f"unknown frame preset {name!r}; expected one of {sorted(presets)}") from None


def _dot(a: Sequence[Jet], b: Sequence[Jet]) -> Jet:
    acc = a[0] * b[0]
    for x, y in zip(a[1:], b[1:]):
        acc = acc + x * y
    return acc


def _require_rank2(h: HomSpec) -> None:
    if h.rank != 2:
        raise PreconditionError("classification operations need rank-2 bundles")


# -- matrix, determinant, null section -------------------------------------------


def hom_matrix_jets(h: HomSpec, p: Sequence[float], order: int) -> list[list[Jet]]:
    """Order-``order`` jets of the entries of ``M_phi`` at ``p``."""
    h.frame.check(p)
    return h.matrix_jets(p, order)


def det2(m: Sequence[Sequence[Jet]]) -> Jet:
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def lambda_jet(h: HomSpec, p: Sequence[float], order: int) -> Jet:
    """Jet of ``lambda_phi = det M_phi`` at ``p``."""
    _require_rank2(h)
    return det2(hom_matrix_jets(h, p, order))


def lambda_value(h: HomSpec, p: Sequence[float]) -> float:
    """``lambda_phi(p)``; explicit matrices are evaluated without jets."""
    _require_rank2(h)
    if isinstance(h, ExplicitHom):
        (a, b), (c, d) = ((float(e.evaluate(p)) for e in row) for row in h.matrix)
        return a * d - b * c
    return lambda_jet(h, p, 0).value


def matrix_value(m: Sequence[Sequence[Jet]]) -> np.ndarray:
    return np.array([[e.value for e in row] for row in m])


def matrix_scale(m: Sequence[Sequence[Jet]]) -> float:
    return max(e.scale() for row in m for e in row)


@dataclass(frozen=True)
class NullSection:
    """Coefficients ``(k1, k2)`` of ``eta = k1 e1 + k2 e2`` and the adjugate column used."""

    k1: Jet
    k2: Jet
    column: int


def adjugate_columns(m: Sequence[Sequence[Jet]]) -> tuple[tuple[Jet, Jet], tuple[Jet, Jet]]:
    (a, b), (c, d) = m
    return (d, -c), (-b, a)


def is_rank_zero(m: Sequence[Sequence[Jet]], tol: float = CORANK_TOL) -> bool:
    """True when ``M(p)`` vanishes relative to the size of its jets."""
    scale = matrix_scale(m)
    return scale == 0.0 or float(np.max(np.abs(matrix_value(m)))) <= tol * scale


def null_section_from_matrix(
    m: Sequence[Sequence[Jet]], column: int | None = None, tol: float = CORANK_TOL
) -> NullSection:
    if is_rank_zero(m, tol):
        raise RankZeroError("M_phi vanishes at the point: corank 2, no null section")
    cols = adjugate_columns(m)
    norms = [float(np.hypot(c[0].value, c[1].value)) for c in cols]
    if column is None:
        column = 0 if norms[0] >= norms[1] else 1
    elif norms[column] <= tol * matrix_scale(m):
        raise PreconditionError(f"adjugate column {column + 1} vanishes at the point")
    k1, k2 = cols[column]
    return NullSection(k1, k2, column)


def null_section_jets(
    h: HomSpec, p: Sequence[float], order: int, column: int | None = None
) -> NullSection:
    """Adjugate-column null section of ``phi`` near ``p`` (``column`` is 0-based)."""
    _require_rank2(h)
    return null_section_from_matrix(hom_matrix_jets(h, p, order), column)


@dataclass(frozen=True)
class NullSectionModifier:
    """Replace ``(k1, k2)`` by ``a (k1, k2) + lambda (g1, g2)``.

    The added term vanishes on ``S``, so the result is again a null section as
    long as ``a`` does not vanish at the base point.
    """

    a: Expression
    g: tuple[Expression, Expression]

    def apply(self, ns: NullSection, lam: Jet, p: Sequence[float]) -> NullSection:
        order = lam.order
        a = self.a.jet(p, order)
        if abs(a.value) <= CORANK_TOL:
            raise PreconditionError("null-section rescaling factor vanishes at the point")
        g1, g2 = (g.jet(p, order) for g in self.g)
        return NullSection(a * ns.k1 + lam * g1, a * ns.k2 + lam * g2, ns.column)


def eta_field_jets(ns: NullSection, frame_jets: Sequence[Sequence[Jet]]) -> list[Jet]:
    """Coordinate components of ``eta = k1 e1 + k2 e2``."""
    m = len(frame_jets[0])
    return [ns.k1 * frame_jets[0][i] + ns.k2 * frame_jets[1][i] for i in range(m)]


def lie(field_jets: Sequence[Jet], g: Jet) -> Jet:
    """Directional derivative ``sum_i X^i d_i g``; the result has order ``g.order - 1``."""
    o = g.order - 1
    return _dot([x.truncate(o) for x in field_jets], [g.partial(i) for i in range(g.nvars)])


def iterate_lie(field_jets: Sequence[Jet], g: Jet, times: int) -> list[Jet]:
    """``[g, Xg, X^2 g, ..., X^times g]``."""
    out = [g]
    for _ in range(times):
        out.append(lie(field_jets, out[-1]))
    return out


# -- the derivative chain ------------------------------------------------------------


@dataclass(frozen=True)
class EtaChain:
    """``lambda, eta lambda, eta^2 lambda, eta^3 lambda`` at a base point, as jets."""

    point: tuple[float, ...]
    matrix: np.ndarray
    frame: np.ndarray  # m x 2, columns e1(p), e2(p)
    null_section: NullSection
    eta: tuple[Jet, ...]
    lam: Jet
    eta_lam: Jet
    eta2_lam: Jet
    eta3_lam: Jet
    scale: float

    @property
    def column(self) -> int:
        return self.null_section.column

    @property
    def values(self) -> tuple[float, float, float, float]:
        return (self.lam.value, self.eta_lam.value, self.eta2_lam.value, self.eta3_lam.value)

    @property
    def d_lam(self) -> np.ndarray:
        return self.lam.gradient()

    @property
    def d_eta_lam(self) -> np.ndarray:
        return self.eta_lam.gradient()

    @property
    def d_eta2_lam(self) -> np.ndarray:
        return self.eta2_lam.gradient()

    @property
    def gradient_rows(self) -> np.ndarray:
        return np.vstack([self.d_lam, self.d_eta_lam, self.d_eta2_lam])

    @property
    def eta_vector(self) -> np.ndarray:
        return np.array([c.value for c in self.eta])

    @property
    def frame_derivatives(self) -> np.ndarray:
        """``(e1 lambda, e2 lambda)`` at the base point."""
        return self.frame.T @ self.d_lam

    @property
    def scales(self) -> tuple[float, float, float, float]:
        """Reference scale of ``eta^k lambda`` for k = 0..3.

        ``eta^k lambda`` is homogeneous of degree k in the null section, so each
        quantity is measured against ``max(|jet of eta^k lambda|, |jet of lambda| |eta|^k)``
        rather than one global maximum; margins then survive rescaling ``eta``.
        """
        base = self.lam.scale()
        n = float(np.linalg.norm(self.eta_vector))
        jets = (self.lam, self.eta_lam, self.eta2_lam, self.eta3_lam)
        return tuple(max(j.scale(), base * n**k) for k, j in enumerate(jets))

    @property
    def frame_scale(self) -> float:
        """Reference scale of ``e_i lambda``."""
        return self.lam.scale() * float(np.max(np.linalg.norm(self.frame, axis=0)))

    @property
    def normalized_rows(self) -> np.ndarray:
        """Gradient rows each divided by the scale of its quantity."""
        sc = self.scales
        return np.vstack([row / s if s > 0 else row for row, s in zip(self.gradient_rows, sc)])


def eta_chain(
    h: HomSpec,
    p: Sequence[float],
    modifier: NullSectionModifier | None = None,
    column: int | None = None,
    order: int = CHAIN_ORDER,
) -> EtaChain:
    """Jets of ``lambda`` and its iterated derivatives along the null section."""
    _require_rank2(h)
    if order < 3:
        raise PreconditionError("the chain needs lambda to order >= 3")
    p = tuple(float(v) for v in p)
    m = hom_matrix_jets(h, p, order)
    ns = null_section_from_matrix(m, column)
    lam = det2(m)
    if modifier is not None:
        ns = modifier.apply(ns, lam, p)
    frame_jets = h.frame.jets(p, order)
    eta = eta_field_jets(ns, frame_jets)
    chain = iterate_lie(eta, lam, 3)
    assert chain[-1].order == order - 3
    scale = max(j.scale() for j in chain)
    return EtaChain(
        point=p,
        matrix=matrix_value(m),
        frame=np.array([[c.value for c in fj] for fj in frame_jets]).T,
        null_section=ns,
        eta=tuple(eta),
        lam=chain[0],
        eta_lam=chain[1],
        eta2_lam=chain[2],
        eta3_lam=chain[3],
        scale=scale,
    )


def eta_lambda_jets(h: HomSpec, p: Sequence[float], depth: int, order: int | None = None):
    """``(eta vector at p, [lambda, eta lambda, ..., eta^depth lambda])`` with the last of order >= 1.

    Lighter than :func:`eta_chain`; used by Newton-type solvers.
    """
    order = depth + 1 if order is None else order
    p = tuple(float(v) for v in p)
    m = hom_matrix_jets(h, p, order)
    ns = null_section_from_matrix(m)
    eta = eta_field_jets(ns, h.frame.jets(p, order))
    return np.array([c.value for c in eta]), iterate_lie(eta, det2(m), depth)


def directional_derivative_f(h: InducedHom, p: Sequence[float], k: int) -> np.ndarray:
    """``eta^k f`` at ``p`` for an induced homomorphism."""
    if not isinstance(h, InducedHom):
        raise PreconditionError("directional_derivative_f needs an induced homomorphism")
    if not 1 <= k <= 4:
        raise PreconditionError("k must be between 1 and 4")
    order = k + 1
    m = hom_matrix_jets(h, p, order)
    ns = null_section_from_matrix(m)
    eta = eta_field_jets(ns, h.frame.jets(p, order))
    out = []
    for fi in h.f.jets(p, order):
        out.append(iterate_lie(eta, fi, k)[-1].value)
    return np.array(out)
