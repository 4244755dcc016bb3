"""Scene configuration files (TOML) with strict key checking."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .classify import DEFAULT_TOL, ToleranceSet
from .errors import ConfigError, ParseError
from .geometry import ExplicitHom, Frame, HomSpec, InducedHom, preset_frame

TOP_KEYS = {"coordinates", "homomorphism", "frame", "tolerances", "output", "tasks"}
HOM_KEYS = {"mode", "map", "matrix"}
FRAME_KEYS = {"preset", "fields"}
TOL_KEYS = {"on_s", "zero", "rank"}
OUTPUT_KEYS = {"dir", "report", "csv", "svg"}
TASK_KEYS = {
    "classify": {"points", "refine"},
    "scan": {"box", "grid", "check"},
    "trace": {"seeds", "step", "max_steps", "box", "direction", "check"},
    "morin": {"points"},
    "contact-check": {"points", "refine"},
}
COMMON_TASK_KEYS = {"kind", "name"}
PRESETS = ("foliation", "contact")


@dataclass(frozen=True)
class OutputConfig:
    dir: str | None = None
    report: str = "report.json"
    csv: bool = True
    svg: bool = True


@dataclass(frozen=True)
class TaskConfig:
    kind: str
    name: str
    options: dict


@dataclass(frozen=True)
class SceneConfig:
    coordinates: tuple[str, ...]
    mode: str
    map: tuple[str, ...] | None
    matrix: tuple[tuple[str, ...], ...] | None
    frame_preset: str | None
    frame_fields: tuple[tuple[str, ...], ...] | None
    tolerances: ToleranceSet
    output: OutputConfig
    tasks: tuple[TaskConfig, ...]
    raw: dict = field(default_factory=dict, compare=False)

    def frame(self) -> Frame:
        if self.frame_fields is not None:
            return Frame.parse(self.frame_fields, self.coordinates, name="custom")
        return preset_frame(self.frame_preset or "foliation", self.coordinates)

    def build(self) -> HomSpec:
        fr = self.frame()
        if self.mode == "induced":
            return InducedHom.parse(self.map, frame=fr, coords=self.coordinates)
        return ExplicitHom.parse(self.matrix, self.coordinates, frame=fr)

    @property
    def is_contact(self) -> bool:
        return self.frame_fields is None and self.frame_preset == "contact"


def _check_keys(table: dict, allowed: set[str], where: str) -> None:
    for key in table:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in {where} (allowed: {', '.join(sorted(allowed))})")


def _table(raw: dict, key: str, where: str) -> dict:
    value = raw.get(key, {})
    if not isinstance(value, dict):
        raise ConfigError(f"{where}.{key} must be a table")
    return value


def _number(v: Any, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where} must be a number, got {v!r}")
    if not math.isfinite(v):
        raise ConfigError(f"{where} must be finite")
    return float(v)


def _positive_int(v: Any, where: str, minimum: int = 1) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise ConfigError(f"{where} must be an integer >= {minimum}, got {v!r}")
    return v


def _bool(v: Any, where: str) -> bool:
    if not isinstance(v, bool):
        raise ConfigError(f"{where} must be true or false, got {v!r}")
    return v


def _strings(v: Any, n: int | None, where: str) -> tuple[str, ...]:
    if not isinstance(v, list) or not all(isinstance(s, str) for s in v):
        raise ConfigError(f"{where} must be a list of strings")
    if n is not None and len(v) != n:
        raise ConfigError(f"{where} must have {n} entries, got {len(v)}")
    return tuple(v)


def _points(v: Any, dim: int, where: str) -> list[list[float]]:
    if not isinstance(v, list) or not v:
        raise ConfigError(f"{where} must be a non-empty list of points")
    out = []
    for i, p in enumerate(v):
        if not isinstance(p, list) or len(p) != dim:
            raise ConfigError(f"{where}[{i}] must be a list of {dim} numbers")
        out.append([_number(c, f"{where}[{i}]") for c in p])
    return out


def _box(v: Any, dim: int, where: str) -> list[list[float]]:
    if not isinstance(v, list) or len(v) != dim:
        raise ConfigError(f"{where} must be a list of {dim} [min, max] pairs")
    out = []
    for i, pair in enumerate(v):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ConfigError(f"{where}[{i}] must be a [min, max] pair")
        a, b = (_number(c, f"{where}[{i}]") for c in pair)
        if not a < b:
            raise ConfigError(f"{where}[{i}] needs min < max")
        out.append([a, b])
    return out


def _task(raw: Any, index: int, dim: int) -> TaskConfig:
    where = f"tasks[{index}]"
    if not isinstance(raw, dict):
        raise ConfigError(f"{where} must be a table")
    kind = raw.get("kind")
    if kind not in TASK_KEYS:
        raise ConfigError(f"{where}.kind must be one of {sorted(TASK_KEYS)}, got {kind!r}")
    _check_keys(raw, TASK_KEYS[kind] | COMMON_TASK_KEYS, where)
    name = raw.get("name", f"{kind}-{index}")
    if not isinstance(name, str):
        raise ConfigError(f"{where}.name must be a string")
    o: dict[str, Any] = {}
    if kind in ("classify", "morin", "contact-check"):
        if "points" not in raw:
            raise ConfigError(f"{where} needs 'points'")
        o["points"] = _points(raw["points"], dim, f"{where}.points")
        if kind != "morin":
            o["refine"] = _bool(raw.get("refine", False), f"{where}.refine")
    elif kind == "scan":
        o["box"] = _box(raw.get("box", [[-1.0, 1.0]] * dim), dim, f"{where}.box")
        o["grid"] = _positive_int(raw.get("grid", 10), f"{where}.grid", 2)
        o["check"] = _bool(raw.get("check", True), f"{where}.check")
    elif kind == "trace":
        if "seeds" not in raw:
            raise ConfigError(f"{where} needs 'seeds'")
        o["seeds"] = _points(raw["seeds"], dim, f"{where}.seeds")
        o["step"] = _number(raw.get("step", 1e-2), f"{where}.step")
        if not o["step"] > 0:
            raise ConfigError(f"{where}.step must be positive")
        o["max_steps"] = _positive_int(raw.get("max_steps", 200), f"{where}.max_steps")
        o["box"] = _box(raw["box"], dim, f"{where}.box") if "box" in raw else None
        o["direction"] = raw.get("direction", "both")
        if o["direction"] not in ("both", "forward", "backward"):
            raise ConfigError(f"{where}.direction must be both, forward or backward")
        o["check"] = _bool(raw.get("check", True), f"{where}.check")
    return TaskConfig(kind, name, o)


def parse_config(raw: dict) -> SceneConfig:
    """Validate a decoded TOML document."""
    _check_keys(raw, TOP_KEYS, "top level")
    coords = _strings(raw.get("coordinates", ["x", "y", "z"]), 3, "coordinates")
    if len(set(coords)) != 3 or not all(c.isidentifier() for c in coords):
        raise ConfigError(f"coordinates must be three distinct identifiers, got {list(coords)}")

    if "homomorphism" not in raw:
        raise ConfigError("missing [homomorphism] table")
    hom = _table(raw, "homomorphism", "top level")
    _check_keys(hom, HOM_KEYS, "[homomorphism]")
    mode = hom.get("mode")
    if mode not in ("explicit", "induced"):
        raise ConfigError(f"homomorphism.mode must be 'explicit' or 'induced', got {mode!r}")
    fmap = matrix = None
    if mode == "induced":
        if "matrix" in hom or "map" not in hom:
            raise ConfigError("induced mode needs 'map' and no 'matrix'")
        fmap = _strings(hom["map"], 2, "homomorphism.map")
    else:
        if "map" in hom or "matrix" not in hom:
            raise ConfigError("explicit mode needs 'matrix' and no 'map'")
        rows = hom["matrix"]
        if not isinstance(rows, list) or len(rows) != 2:
            raise ConfigError("homomorphism.matrix must be a 2x2 list of strings")
        matrix = tuple(_strings(r, 2, f"homomorphism.matrix[{i}]") for i, r in enumerate(rows))

    fr = _table(raw, "frame", "top level")
    _check_keys(fr, FRAME_KEYS, "[frame]")
    preset, fields = fr.get("preset"), None
    if "fields" in fr:
        if preset is not None:
            raise ConfigError("[frame] takes either 'preset' or 'fields', not both")
        rows = fr["fields"]
        if not isinstance(rows, list) or len(rows) != 2:
            raise ConfigError("frame.fields must list two vector fields")
        fields = tuple(_strings(r, 3, f"frame.fields[{i}]") for i, r in enumerate(rows))
    elif preset is None:
        preset = "foliation"
    elif preset not in PRESETS:
        raise ConfigError(f"unknown frame preset {preset!r}; expected one of {list(PRESETS)}")

    tt = _table(raw, "tolerances", "top level")
    _check_keys(tt, TOL_KEYS, "[tolerances]")
    tol = DEFAULT_TOL.updated(**{k: _number(v, f"tolerances.{k}") for k, v in tt.items()})
    if min(tol.on_s, tol.zero, tol.rank) <= 0:
        raise ConfigError("tolerances must be positive")

    ot = _table(raw, "output", "top level")
    _check_keys(ot, OUTPUT_KEYS, "[output]")
    for key in ("dir", "report"):
        if key in ot and not isinstance(ot[key], str):
            raise ConfigError(f"output.{key} must be a string")
    output = OutputConfig(
        dir=ot.get("dir"),
        report=ot.get("report", "report.json"),
        csv=_bool(ot.get("csv", True), "output.csv"),
        svg=_bool(ot.get("svg", True), "output.svg"),
    )

    tasks_raw = raw.get("tasks")
    if not isinstance(tasks_raw, list) or not tasks_raw:
        raise ConfigError("config needs at least one [[tasks]] entry")
    tasks = tuple(_task(t, i, 3) for i, t in enumerate(tasks_raw))

    cfg = SceneConfig(coords, mode, fmap, matrix, preset, fields, tol, output, tasks, raw)
    try:
        h = cfg.build()
    except (ParseError, ValueError) as exc:
        raise ConfigError(f"invalid homomorphism or frame: {exc}") from exc
    for t in tasks:
        if t.kind == "morin" and not isinstance(h, InducedHom):
            raise ConfigError(f"task {t.name!r}: morin needs an induced homomorphism")
        if t.kind == "contact-check" and not cfg.is_contact:
            raise ConfigError(f"task {t.name!r}: contact-check needs the contact frame preset")
    return cfg


def load_config(path: str | Path) -> SceneConfig:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    return parse_config(raw)
