"""Deterministic report output: canonical JSON, CSV tables and SVG projections."""

from __future__ import annotations

import csv
import enum
import io
import math
from typing import Iterable, Sequence

import numpy as np

# Test names in the order they appear as CSV margin columns.
MARGIN_COLUMNS = ("on_S", "eta_lambda", "d_lambda", "eta2_lambda", "rank_d_chain", "frame_lambda")

CLASS_COLORS = {
    "Regular": "#9e9e9e",
    "FoldLike": "#1f77b4",
    "CuspLike": "#d62728",
    "SwallowtailLike": "#2ca02c",
    "DegenerateNonClassified": "#ff7f0e",
    "RankZero": "#000000",
}


# -- canonical JSON -------------------------------------------------------------------------


def format_float(x: float) -> str | None:
    """17 significant digits, always recognisable as a float; None for non-finite."""
    if not math.isfinite(x):
        return None
    if x == 0:
        x = 0.0  # drop the sign of -0.0
    s = "%.17g" % x
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def _scalar(obj) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        s = format_float(float(obj))
        return "null" if s is None else s
    if isinstance(obj, str):
        return _string(obj)
    if isinstance(obj, enum.Enum):
        return _string(str(obj.value))
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _string(s: str) -> str:
    out = ['"']
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20:
            out.append("\\u%04x" % ord(ch))
        else:
            out.append(ch)
    out.append('"')
    return "".join(out)


def _dump(obj, level: int, indent: int, out: list[str]) -> None:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        keys = sorted(obj, key=str)
        for n, k in enumerate(keys):
            out.append(pad + _string(str(k)) + ": ")
            _dump(obj[k], level + 1, indent, out)
            out.append(",\n" if n < len(keys) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            out.append("[" + ", ".join(_scalar(v) for v in obj) + "]")
            return
        out.append("[\n")
        for n, v in enumerate(obj):
            out.append(pad)
            _dump(v, level + 1, indent, out)
            out.append(",\n" if n < len(obj) - 1 else "\n")
        out.append(end + "]")
    else:
        out.append(_scalar(obj))


def canonical_json(obj, indent: int = 2) -> str:
    """Serialize with sorted keys and ``%.17g`` floats; NaN and infinities become null."""
    out: list[str] = []
    _dump(obj, 0, indent, out)
    out.append("\n")
    return "".join(out)


# -- CSV -----------------------------------------------------------------------------------------


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        s = format_float(float(v))
        return "" if s is None else s
    return str(v)


def _margin_cells(classification: dict | None) -> list[str]:
    if not classification:
        return [""] * len(MARGIN_COLUMNS)
    by_name = {t["name"]: t["margin"] for t in classification.get("tests", [])}
    return [_cell(by_name.get(name)) for name in MARGIN_COLUMNS]


def _min_distance(classification: dict | None):
    if not classification or not classification.get("tests"):
        return None
    return min(t["distance"] for t in classification["tests"])


def points_csv(rows: Iterable[dict], coords: Sequence[str]) -> str:
    """One row per classified point: ``index, coords..., class, near_threshold, min_distance, margins``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", *coords, "class", "near_threshold", "min_distance",
                *(f"margin_{n}" for n in MARGIN_COLUMNS)])
    for i, row in enumerate(rows):
        c = row.get("classification")
        w.writerow([
            i,
            *(_cell(v) for v in row["point"]),
            c["class"] if c else "error",
            _cell(c["near_threshold"]) if c else "",
            _cell(_min_distance(c)),
            *_margin_cells(c),
        ])
    return buf.getvalue()


def curves_csv(curves: Iterable[dict], coords: Sequence[str]) -> str:
    """One row per traced vertex with point, null section, tangent and class."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([
        "curve", "vertex", *coords,
        *(f"eta_{c}" for c in coords), *(f"tangent_{c}" for c in coords),
        "residual", "class", "flags", "min_distance",
        *(f"margin_{n}" for n in MARGIN_COLUMNS),
    ])
    for ci, curve in enumerate(curves):
        for vi, v in enumerate(curve.get("vertices", [])):
            c = v.get("classification")
            w.writerow([
                ci, vi,
                *(_cell(x) for x in v["point"]),
                *(_cell(x) for x in v["eta"]),
                *(_cell(x) for x in v["tangent"]),
                _cell(v["residual"]),
                c["class"] if c else "",
                ";".join(v.get("flags", [])),
                _cell(_min_distance(c)),
                *_margin_cells(c),
            ])
    return buf.getvalue()


# -- SVG ------------------------------------------------------------------------------------------

PANEL = 240
MARGIN = 28
PROJECTIONS = ((0, 1), (0, 2), (1, 2))


def _fmt(v: float) -> str:
    return "%.3f" % v


def projection_svg(
    points: Sequence[tuple[Sequence[float], str]],
    curves: Sequence[Sequence[tuple[Sequence[float], str]]],
    box: tuple[Sequence[float], Sequence[float]],
    coords: Sequence[str] = ("x", "y", "z"),
    title: str = "",
) -> str:
    """Three axis-aligned projections side by side.

    ``points`` are (point, class label) pairs drawn as markers; each curve is a
    list of (vertex, class label) drawn as a polyline with class-coloured vertices.
    """
    lo, hi = np.asarray(box[0], dtype=float), np.asarray(box[1], dtype=float)
    width = 3 * PANEL + 4 * MARGIN
    height = PANEL + 2 * MARGIN + 40
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{MARGIN}" y="18" font-family="sans-serif" font-size="13">{title}</text>')
    for k, (a, b) in enumerate(PROJECTIONS):
        ox = MARGIN + k * (PANEL + MARGIN)
        oy = MARGIN + 10

        def to_px(p, a=a, b=b, ox=ox, oy=oy):
            u = (p[a] - lo[a]) / (hi[a] - lo[a])
            v = (p[b] - lo[b]) / (hi[b] - lo[b])
            return ox + u * PANEL, oy + (1 - v) * PANEL

        out.append(f'<g id="{coords[a]}{coords[b]}">')
        out.append(f'<rect x="{ox}" y="{oy}" width="{PANEL}" height="{PANEL}" fill="none" stroke="#444"/>')
        out.append(
            f'<text x="{_fmt(ox + PANEL / 2)}" y="{oy + PANEL + 16}" font-family="sans-serif" '
            f'font-size="11" text-anchor="middle">{coords[a]} / {coords[b]}</text>'
        )
        for p, label in points:
            x, y = to_px(p)
            color = CLASS_COLORS.get(label, "#7f7f7f")
            out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="1.8" fill="{color}"/>')
        for curve in curves:
            if len(curve) > 1:
                pts = " ".join("%s,%s" % tuple(map(_fmt, to_px(p))) for p, _ in curve)
                out.append(f'<polyline points="{pts}" fill="none" stroke="#333" stroke-width="1"/>')
            for p, label in curve:
                x, y = to_px(p)
                color = CLASS_COLORS.get(label, "#7f7f7f")
                out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="1.2" fill="{color}"/>')
        out.append("</g>")
    # legend
    lx = MARGIN
    ly = height - 12
    for label, color in CLASS_COLORS.items():
        out.append(f'<circle cx="{lx}" cy="{ly - 4}" r="4" fill="{color}"/>')
        out.append(f'<text x="{lx + 8}" y="{ly}" font-family="sans-serif" font-size="10">{label}</text>')
        lx += 8 + 7 * len(label) + 14
    out.append("</svg>")
    return "\n".join(out) + "\n"
