"""Random test families: polynomials, frames, frame changes and specs around normal forms."""

from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np

from .geometry import ExplicitHom, Frame, InducedHom


def _coef(c: float) -> str:
    return repr(round(float(c), 6))


def random_polynomial(
    rng: np.random.Generator,
    coords: Sequence[str] = ("x", "y", "z"),
    degree: int = 3,
    scale: float = 1.0,
    min_degree: int = 0,
    density: float = 1.0,
) -> str:
    """Random polynomial text with coefficients in ``[-scale, scale]``."""
    terms = []
    for alpha in itertools.product(range(degree + 1), repeat=len(coords)):
        if not min_degree <= sum(alpha) <= degree:
            continue
        if density < 1.0 and rng.random() > density:
            continue
        c = rng.uniform(-scale, scale)
        mono = "*".join(
            (name if a == 1 else f"{name}^{a}") for name, a in zip(coords, alpha) if a
        )
        terms.append(f"({_coef(c)})" + (f"*{mono}" if mono else ""))
    return " + ".join(terms) if terms else "0"


def random_invertible(rng: np.random.Generator, n: int = 2, cond_max: float = 20.0) -> np.ndarray:
    """Random matrix with condition number at most ``cond_max``."""
    while True:
        c = rng.normal(size=(n, n))
        if np.linalg.cond(c) < cond_max:
            return c


def random_explicit_cubic(rng: np.random.Generator, scale: float = 1.0) -> ExplicitHom:
    """Explicit spec whose four entries are random cubic polynomials."""
    rows = [[random_polynomial(rng, scale=scale) for _ in range(2)] for _ in range(2)]
    return ExplicitHom.parse(rows)


def random_frame(rng: np.random.Generator, amplitude: float = 0.2) -> Frame:
    """Perturbation of the coordinate fields by small random linear terms."""
    base = [["1", "0", "0"], ["0", "1", "0"]]
    rows = []
    for r in base:
        rows.append([f"{b} + " + random_polynomial(rng, degree=1, scale=amplitude, min_degree=1) for b in r])
    return Frame.parse(rows, ("x", "y", "z"))


def perturbed_induced(
    rng: np.random.Generator,
    normal_form: Sequence[str],
    frame: Frame | str = "foliation",
    amplitude: float = 0.05,
    min_degree: int = 2,
    degree: int = 3,
) -> InducedHom:
    """``f`` = normal form plus small random terms of degree ``min_degree..degree``."""
    comps = [
        f"{c} + " + random_polynomial(rng, degree=degree, scale=amplitude, min_degree=min_degree)
        for c in normal_form
    ]
    return InducedHom.parse(comps, frame=frame)
