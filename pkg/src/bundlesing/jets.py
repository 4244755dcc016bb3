"""Dense truncated multivariate Taylor jets.

A :class:`Jet` of order ``N`` in ``m`` variables stores the Taylor coefficients
``c[alpha] = d^alpha g(p) / alpha!`` for every multi-index with ``|alpha| <= N``.
Coefficients are kept in graded-lexicographic order (degree first, then
lexicographically descending exponents), so the coefficients of an order ``N-1``
jet are exactly the first ``C(N-1+m, m)`` entries of the order ``N`` array and
truncation is a slice.

Example::

    >>> x = Jet.variable(0, 0.0, order=3)
    >>> s = sin(x)
    >>> s.coeff((3, 0, 0))
    -0.16666666666666666
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, JetOrderError

MAX_ORDER = 8
DIV_EPSILON = 1e-12

MultiIndex = tuple[int, ...]


def _graded_lex(nvars: int, order: int) -> list[MultiIndex]:
    def of_degree(n: int, d: int) -> list[MultiIndex]:
        if n == 1:
            return [(d,)]
        out = []
        for first in range(d, -1, -1):
            out.extend((first,) + rest for rest in of_degree(n - 1, d - first))
        return out

    indices: list[MultiIndex] = []
    for d in range(order + 1):
        indices.extend(of_degree(nvars, d))
    return indices


@dataclass(frozen=True)
class _Table:
    nvars: int
    order: int
    indices: tuple[MultiIndex, ...]
    position: dict
    # Truncated convolution: out[k] += a[i] * b[j] for (i, j, k) in zip(mi, mj, mk).
    mi: np.ndarray
    mj: np.ndarray
    mk: np.ndarray
    # Partial derivative along each variable: target (order N-1) <- factor * source.
    dsrc: tuple[np.ndarray, ...]
    dfac: tuple[np.ndarray, ...]
    factorials: np.ndarray

    @property
    def size(self) -> int:
        return len(self.indices)


_tables: dict[tuple[int, int], _Table] = {}
_tables_lock = threading.Lock()


def _build_table(nvars: int, order: int) -> _Table:
    indices = _graded_lex(nvars, order)
    position = {alpha: k for k, alpha in enumerate(indices)}
    mi, mj, mk = [], [], []
    for i, a in enumerate(indices):
        da = sum(a)
        for j, b in enumerate(indices):
            if da + sum(b) > order:
                continue
            mi.append(i)
            mj.append(j)
            mk.append(position[tuple(x + y for x, y in zip(a, b))])
    n_lower = math.comb(order - 1 + nvars, nvars) if order > 0 else 0
    dsrc, dfac = [], []
    for v in range(nvars):
        src = np.empty(n_lower, dtype=np.intp)
        fac = np.empty(n_lower)
        for t, alpha in enumerate(indices[:n_lower]):
            raised = list(alpha)
            raised[v] += 1
            src[t] = position[tuple(raised)]
            fac[t] = raised[v]
        dsrc.append(src)
        dfac.append(fac)
    factorials = np.array(
        [math.prod(math.factorial(e) for e in alpha) for alpha in indices], dtype=float
    )
    return _Table(
        nvars=nvars,
        order=order,
        indices=tuple(indices),
        position=position,
        mi=np.array(mi, dtype=np.intp),
        mj=np.array(mj, dtype=np.intp),
        mk=np.array(mk, dtype=np.intp),
        dsrc=tuple(dsrc),
        dfac=tuple(dfac),
        factorials=factorials,
    )


def table(nvars: int, order: int) -> _Table:
    """Return the cached index/multiplication table for ``(nvars, order)``."""
    key = (nvars, order)
    tab = _tables.get(key)
    if tab is None:
        if not 0 <= order <= MAX_ORDER:
            raise JetOrderError(f"jet order {order} outside [0, {MAX_ORDER}]")
        if nvars < 1:
            raise JetOrderError("a jet needs at least one variable")
        with _tables_lock:
            tab = _tables.get(key)
            if tab is None:
                tab = _tables[key] = _build_table(nvars, order)
    return tab


def num_coeffs(nvars: int, order: int) -> int:
    return math.comb(order + nvars, nvars)


class Jet:
    """Immutable truncated Taylor expansion of a scalar function at a point."""

    __slots__ = ("coeffs", "order", "nvars")

    def __init__(self, coeffs, nvars: int, order: int):
        if not 0 <= order <= MAX_ORDER:
            raise JetOrderError(f"jet order {order} outside [0, {MAX_ORDER}]")
        arr = np.array(coeffs, dtype=float)
        if arr.shape != (num_coeffs(nvars, order),):
            raise JetOrderError(
                f"expected {num_coeffs(nvars, order)} coefficients for "
                f"nvars={nvars}, order={order}, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise DomainError("non-finite jet coefficient")
        arr.flags.writeable = False
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "order", order)

    @classmethod
    def _new(cls, arr: np.ndarray, nvars: int, order: int) -> Jet:
        """Wrap a freshly computed coefficient array (shape already known to be right)."""
        if not np.isfinite(arr).all():
            raise DomainError("non-finite jet coefficient")
        arr.flags.writeable = False
        j = object.__new__(cls)
        object.__setattr__(j, "coeffs", arr)
        object.__setattr__(j, "nvars", nvars)
        object.__setattr__(j, "order", order)
        return j

    def __setattr__(self, name, value):
        raise AttributeError("Jet is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, value: float, nvars: int = 3, order: int = 0) -> Jet:
        c = np.zeros(num_coeffs(nvars, order))
        c[0] = value
        return cls(c, nvars, order)

    @classmethod
    def variable(cls, i: int, value: float, order: int, nvars: int = 3) -> Jet:
        if not 0 <= i < nvars:
            raise JetOrderError(f"variable index {i} out of range for {nvars} variables")
        c = np.zeros(num_coeffs(nvars, order))
        c[0] = value
        if order >= 1:
            c[1 + i] = 1.0
        return cls(c, nvars, order)

    @classmethod
    def zero(cls, nvars: int = 3, order: int = 0) -> Jet:
        return cls.constant(0.0, nvars, order)

    # -- access -------------------------------------------------------------

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    @property
    def table(self) -> _Table:
        return table(self.nvars, self.order)

    def coeff(self, alpha: Sequence[int]) -> float:
        alpha = tuple(int(a) for a in alpha)
        self._check_index(alpha)
        return float(self.coeffs[self.table.position[alpha]])

    def derivative(self, alpha: Sequence[int]) -> float:
        """Return the partial derivative ``d^alpha`` at the base point."""
        alpha = tuple(int(a) for a in alpha)
        self._check_index(alpha)
        fact = math.prod(math.factorial(a) for a in alpha)
        return fact * float(self.coeffs[self.table.position[alpha]])

    def gradient(self) -> np.ndarray:
        if self.order < 1:
            raise JetOrderError("gradient needs a jet of order >= 1")
        return np.array(self.coeffs[1 : 1 + self.nvars])

    def derivatives(self) -> np.ndarray:
        """All ``d^alpha`` values, in the table's multi-index order."""
        return self.coeffs * self.table.factorials

    def scale(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def _check_index(self, alpha: MultiIndex) -> None:
        if len(alpha) != self.nvars or min(alpha) < 0:
            raise JetOrderError(f"bad multi-index {alpha} for {self.nvars} variables")
        if sum(alpha) > self.order:
            raise JetOrderError(f"multi-index {alpha} exceeds jet order {self.order}")

    # -- structural ops -----------------------------------------------------

    def truncate(self, order: int) -> Jet:
        if order > self.order or order < 0:
            raise JetOrderError(f"cannot truncate order {self.order} jet to {order}")
        return Jet._new(self.coeffs[: num_coeffs(self.nvars, order)], self.nvars, order)

    def partial(self, i: int) -> Jet:
        """Jet of ``d g / d u_i``; the result has order ``N - 1``."""
        if self.order < 1:
            raise JetOrderError("cannot differentiate an order-0 jet")
        tab = self.table
        return Jet._new(self.coeffs[tab.dsrc[i]] * tab.dfac[i], self.nvars, self.order - 1)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> Jet | None:
        if isinstance(other, Jet):
            if other.nvars != self.nvars or other.order != self.order:
                raise JetOrderError(
                    f"jet mismatch: (nvars={self.nvars}, order={self.order}) vs "
                    f"(nvars={other.nvars}, order={other.order})"
                )
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Jet.constant(float(other), self.nvars, self.order)
        return None

    def _shifted(self, c: float, sign: float = 1.0) -> Jet:
        arr = self.coeffs * sign
        arr[0] += c
        return Jet._new(arr, self.nvars, self.order)

    def __add__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self._shifted(float(other))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Jet._new(self.coeffs + o.coeffs, self.nvars, self.order)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self._shifted(-float(other))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Jet._new(self.coeffs - o.coeffs, self.nvars, self.order)

    def __rsub__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self._shifted(float(other), -1.0)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Jet._new(o.coeffs - self.coeffs, self.nvars, self.order)

    def __neg__(self):
        return Jet._new(-self.coeffs, self.nvars, self.order)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Jet._new(self.coeffs * float(other), self.nvars, self.order)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        tab = self.table
        out = np.bincount(
            tab.mk, weights=self.coeffs[tab.mi] * o.coeffs[tab.mj], minlength=tab.size
        )
        return Jet._new(out, self.nvars, self.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * reciprocal(o)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * reciprocal(self)

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
            return NotImplemented
        n = int(n)
        if n < 0:
            return reciprocal(self**-n)
        if n == 0:
            return Jet.constant(1.0, self.nvars, self.order)
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def allclose(self, other: Jet, rtol: float = 1e-12, atol: float = 1e-12) -> bool:
        o = self._coerce(other)
        return bool(np.allclose(self.coeffs, o.coeffs, rtol=rtol, atol=atol))

    def __repr__(self) -> str:
        terms = []
        for alpha, c in zip(self.table.indices, self.coeffs):
            if c != 0.0:
                terms.append(f"{c:+.6g}*{alpha}")
        body = " ".join(terms) if terms else "0"
        return f"Jet(order={self.order}, nvars={self.nvars}: {body})"


# -- univariate composition ---------------------------------------------------


def _compose_series(a: Jet, taylor: Sequence[float]) -> Jet:
    """Evaluate ``sum_k taylor[k] * (a - a0)^k`` by Horner's rule.

    ``a - a0`` has no constant term, so its ``k``-th power vanishes below degree
    ``k`` and the truncated sum is exact to the jet's order.
    """
    h = a - a.value
    result = Jet.constant(taylor[a.order], a.nvars, a.order)
    for k in range(a.order - 1, -1, -1):
        result = result * h + taylor[k]
    return result


def reciprocal(a: Jet) -> Jet:
    a0 = a.value
    if abs(a0) <= DIV_EPSILON:
        raise DomainError(f"division by a jet with constant term {a0!r}")
    return _compose_series(a, [(-1.0) ** k / a0 ** (k + 1) for k in range(a.order + 1)])


def exp(a: Jet) -> Jet:
    e = math.exp(a.value)
    return _compose_series(a, [e / math.factorial(k) for k in range(a.order + 1)])


def log(a: Jet) -> Jet:
    a0 = a.value
    if a0 <= 0.0:
        raise DomainError(f"log of non-positive value {a0!r}")
    coeffs = [math.log(a0)]
    coeffs += [(-1.0) ** (k + 1) / (k * a0**k) for k in range(1, a.order + 1)]
    return _compose_series(a, coeffs)


def sqrt(a: Jet) -> Jet:
    a0 = a.value
    if a0 < 0.0 or (a0 == 0.0 and a.order > 0):
        raise DomainError(f"sqrt is not smooth at {a0!r}")
    if a0 == 0.0:
        return Jet.zero(a.nvars, 0)
    root = math.sqrt(a0)
    coeffs = [_binom_half(k) * root / a0**k for k in range(a.order + 1)]
    return _compose_series(a, coeffs)


def _binom_half(k: int) -> float:
    out = 1.0
    for j in range(k):
        out *= (0.5 - j) / (j + 1)
    return out


def sin(a: Jet) -> Jet:
    s, c = math.sin(a.value), math.cos(a.value)
    cycle = (s, c, -s, -c)
    return _compose_series(
        a, [cycle[k % 4] / math.factorial(k) for k in range(a.order + 1)]
    )


def cos(a: Jet) -> Jet:
    s, c = math.sin(a.value), math.cos(a.value)
    cycle = (c, -s, -c, s)
    return _compose_series(
        a, [cycle[k % 4] / math.factorial(k) for k in range(a.order + 1)]
    )


def neg(a: Jet) -> Jet:
    return -a


UNIVARIATE = {
    "sin": sin,
    "cos": cos,
    "exp": exp,
    "log": log,
    "sqrt": sqrt,
    "neg": neg,
}


def compose(tag: str, a: Jet) -> Jet:
    """Apply the elementary function named ``tag`` to a jet."""
    try:
        fn = UNIVARIATE[tag]
    except KeyError:
        raise ValueError(f"unknown elementary function {tag!r}") from None
    return fn(a)


def jet_variables(point: Iterable[float], order: int) -> list[Jet]:
    """Seed jets for every coordinate at ``point``."""
    point = [float(v) for v in point]
    return [Jet.variable(i, v, order, nvars=len(point)) for i, v in enumerate(point)]
