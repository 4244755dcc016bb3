"""Command line front end: ``bundlesing classify <config>`` and ``bundlesing selfcheck``."""

from __future__ import annotations

import argparse
import logging
import sys
from collections import Counter
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .classify import (
    Kind,
    ToleranceSet,
    classify_any,
    classify_induced_prop4,
    contact_fold_test,
    foliation_leaf_classify,
    hamilton_in_distribution,
    morin_classify,
)
from .config import SceneConfig, load_config
from .errors import BundleSingError, ConfigError
from .geometry import Frame, InducedHom
from .report import canonical_json, curves_csv, points_csv, projection_svg
from .selfcheck import CASES, format_table, run_all
from .trace import (
    Box,
    check_contact_corollary,
    check_fold_cusp_geometry,
    check_swallowtail_mu,
    refine_to_S,
    scan_singular_set,
    trace_S2,
)

log = logging.getLogger("bundlesing")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

PLANE_TO_KIND = {"Fold": Kind.FOLD_LIKE, "Cusp": Kind.CUSP_LIKE, "Swallowtail": Kind.SWALLOWTAIL_LIKE}


def _error(exc: Exception) -> dict:
    return {"type": type(exc).__name__, "message": str(exc)}


class SceneRun:
    """Executes the tasks of one scene and collects the report and artifacts."""

    def __init__(self, cfg: SceneConfig, threads: int = 1, seed: int | None = None):
        self.cfg = cfg
        self.h = cfg.build()
        self.tol = cfg.tolerances
        self.threads = threads
        self.seed = seed
        self.warnings: list[dict] = []
        self.failed = False
        self.artifacts: dict[str, str] = {}
        self.is_foliation = isinstance(self.h, InducedHom) and self.h.frame.fields == Frame.foliation(
            cfg.coordinates
        ).fields

    def warn(self, task: str, message: str, point=None) -> None:
        w = {"task": task, "message": message}
        if point is not None:
            w["point"] = [float(v) for v in point]
        self.warnings.append(w)

    def fail(self, task: str, exc: Exception, point=None) -> dict:
        self.failed = True
        self.warn(task, f"numerical failure: {type(exc).__name__}: {exc}", point)
        return _error(exc)

    def note_classification(self, task: str, c, point) -> None:
        if c.near_threshold:
            self.warn(task, f"near-threshold decision ({c.cls})", point)
        if c.kind in (Kind.DEGENERATE, Kind.RANK_ZERO):
            self.warn(task, f"degenerate point ({c.cls})", point)

    # -- cross checks --------------------------------------------------------------

    def cross_checks(self, q, c) -> dict:
        out: dict = {}
        if c.kind in (Kind.REGULAR, Kind.RANK_ZERO):
            return out
        if isinstance(self.h, InducedHom):
            try:
                c4 = classify_induced_prop4(self.h, q, self.tol)
                out["determinant_criteria"] = {
                    "class": str(c4.cls),
                    "agree": c4.cls == c.cls,
                    "classification": c4.as_dict(),
                }
            except BundleSingError as exc:
                out["determinant_criteria"] = {"error": _error(exc)}
            if self.is_foliation:
                try:
                    leaf = foliation_leaf_classify(self.h, q, self.tol)
                    out["foliation_leaf"] = {
                        "class": leaf.kind.value,
                        "agree": PLANE_TO_KIND.get(leaf.kind.value) is c.kind,
                        "classification": leaf.as_dict(),
                    }
                except BundleSingError as exc:
                    out["foliation_leaf"] = {"error": _error(exc)}
        if self.cfg.is_contact:
            out["contact"] = self.contact_entry(q, c)
        return out

    def contact_entry(self, q, c) -> dict:
        try:
            ct = contact_fold_test(self.h, q, self.tol)
        except BundleSingError as exc:
            return {"error": _error(exc)}
        inside, margin = hamilton_in_distribution(self.h, q, self.tol)
        return {
            "fold_test": ct.as_dict(),
            "agree": ct.independent == (c.kind is Kind.FOLD_LIKE),
            "hamilton_in_D1": inside,
            "hamilton_distance": margin,
        }

    # -- tasks ---------------------------------------------------------------------------

    def classify_points(self, task, points, refine: bool, contact: bool = False) -> dict:
        rows = []
        for p in points:
            row: dict = {"input": p}
            try:
                q = refine_to_S(self.h, p) if refine else np.asarray(p, dtype=float)
                row["point"] = q.tolist()
                c = classify_any(self.h, q, self.tol)
                row["classification"] = c.as_dict()
                self.note_classification(task.name, c, q)
                if contact:
                    row["contact"] = (
                        self.contact_entry(q, c) if c.kind not in (Kind.REGULAR, Kind.RANK_ZERO) else None
                    )
                else:
                    row["cross_checks"] = self.cross_checks(q, c)
                    for name, chk in row["cross_checks"].items():
                        if chk.get("agree") is False:
                            self.warn(task.name, f"cross-check {name} disagrees", q)
            except BundleSingError as exc:
                row["point"] = list(p)
                row["error"] = self.fail(task.name, exc, p)
            rows.append(row)
        if self.cfg.output.csv:
            self.artifacts[f"{task.name}.csv"] = points_csv(rows, self.cfg.coordinates)
        return {"points": rows}

    def scan(self, task) -> dict:
        o = task.options
        box = Box.from_pairs(o["box"])
        s = scan_singular_set(self.h, box, o["grid"], self.tol, threads=self.threads)
        samples = []
        for x in s.samples:
            self.note_classification(task.name, x.classification, x.point)
            samples.append({"point": x.point.tolist(), "classification": x.classification.as_dict()})
        for point, reason in s.failures:
            self.warn(task.name, f"refinement failed: {reason}", point)
        out = {
            "box": box.as_pairs(),
            "grid": o["grid"],
            "count": len(s),
            "class_counts": dict(Counter(str(x.classification.cls) for x in s.samples)),
            "samples": samples,
            "failures": [{"point": list(p), "reason": r} for p, r in s.failures],
        }
        if o["check"]:
            report = check_fold_cusp_geometry(self.h, s.samples, tol=self.tol)
            out["geometry_check"] = report.as_dict()
            if not report.ok:
                self.warn(task.name, f"{len(report.violations)} geometry violations")
        if self.cfg.output.csv:
            self.artifacts[f"{task.name}.csv"] = points_csv(samples, self.cfg.coordinates)
        if self.cfg.output.svg:
            pts = [(x.point, x.classification.kind.value) for x in s.samples]
            self.artifacts[f"{task.name}.svg"] = projection_svg(
                pts, [], (box.lo, box.hi), self.cfg.coordinates, title=f"{task.name}: S samples"
            )
        return out

    def trace(self, task) -> dict:
        o = task.options
        box = Box.from_pairs(o["box"]) if o["box"] else None
        curves, entries = [], []
        for seed in o["seeds"]:
            try:
                c = trace_S2(
                    self.h, seed, step=o["step"], max_steps=o["max_steps"], tol=self.tol,
                    box=box, direction=o["direction"],
                )
            except BundleSingError as exc:
                entries.append({"seed": seed, "error": self.fail(task.name, exc, seed)})
                continue
            curves.append(c)
            verts = []
            for v in c.vertices:
                if v.flags:
                    self.warn(task.name, "vertex flags: " + ", ".join(v.flags), v.point)
                if v.classification is not None and v.classification.kind in (Kind.DEGENERATE, Kind.RANK_ZERO):
                    self.warn(task.name, f"degenerate point ({v.classification.cls})", v.point)
                verts.append({
                    "point": v.point.tolist(),
                    "eta": v.eta.tolist(),
                    "tangent": v.tangent.tolist(),
                    "residual": v.residual,
                    "flags": list(v.flags),
                    "classification": v.classification.as_dict() if v.classification else None,
                })
            entry = {
                "seed": seed,
                "step": c.step,
                "stop_reasons": dict(c.stop_reasons),
                "seed_index": c.seed_index,
                "vertices": verts,
                "class_counts": dict(
                    Counter(str(v.classification.cls) for v in c.vertices if v.classification)
                ),
            }
            if o["check"]:
                entry["checks"] = self.curve_checks(task, c)
            entries.append(entry)
        out = {"curves": entries}
        if self.cfg.output.csv:
            self.artifacts[f"{task.name}.csv"] = curves_csv(
                [e for e in entries if "vertices" in e], self.cfg.coordinates
            )
        if self.cfg.output.svg and curves:
            if box is None:
                pts = np.vstack([c.points() for c in curves])
                lo, hi = pts.min(axis=0), pts.max(axis=0)
                pad = np.maximum(0.05 * (hi - lo), 1e-3)
                bounds = (lo - pad, hi + pad)
            else:
                bounds = (box.lo, box.hi)
            polys = [
                [(v.point, v.classification.kind.value if v.classification else "") for v in c.vertices]
                for c in curves
            ]
            self.artifacts[f"{task.name}.svg"] = projection_svg(
                [], polys, bounds, self.cfg.coordinates, title=f"{task.name}: S2 curves"
            )
        return out

    def curve_checks(self, task, c) -> dict:
        checks: dict = {}
        geo = check_fold_cusp_geometry(self.h, curves=[c], tol=self.tol)
        checks["geometry"] = geo.as_dict()
        if not geo.ok:
            self.warn(task.name, f"{len(geo.violations)} geometry violations on S2")
        mus = []
        for v in c.vertices:
            if v.kind is Kind.SWALLOWTAIL_LIKE:
                try:
                    m = check_swallowtail_mu(self.h, c, v.point, self.tol)
                    mus.append({"point": v.point.tolist(), **m.as_dict()})
                except BundleSingError as exc:
                    mus.append({"point": v.point.tolist(), "error": _error(exc)})
        checks["swallowtail_mu"] = mus
        if self.cfg.is_contact:
            try:
                checks["contact"] = check_contact_corollary(self.h, [c], self.tol).as_dict()
            except BundleSingError as exc:
                checks["contact"] = {"error": self.fail(task.name, exc)}
        return checks

    def morin(self, task) -> dict:
        rows = []
        for p in task.options["points"]:
            try:
                m = morin_classify(self.h.f, p, self.tol)
                if m.near_threshold:
                    self.warn(task.name, f"near-threshold decision ({m.kind.value})", p)
                rows.append({"point": p, "morin": m.as_dict()})
            except BundleSingError as exc:
                rows.append({"point": p, "error": self.fail(task.name, exc, p)})
        return {"points": rows}

    def run(self) -> dict:
        results = []
        for task in self.cfg.tasks:
            log.info("running task %s (%s)", task.name, task.kind)
            entry = {"name": task.name, "kind": task.kind}
            try:
                if task.kind == "classify":
                    entry.update(self.classify_points(task, task.options["points"], task.options["refine"]))
                elif task.kind == "contact-check":
                    entry.update(
                        self.classify_points(task, task.options["points"], task.options["refine"], contact=True)
                    )
                elif task.kind == "scan":
                    entry.update(self.scan(task))
                elif task.kind == "trace":
                    entry.update(self.trace(task))
                elif task.kind == "morin":
                    entry.update(self.morin(task))
            except BundleSingError as exc:
                entry["error"] = self.fail(task.name, exc)
            results.append(entry)
        return {
            "tool": {"name": "bundlesing", "version": __version__},
            "config": self.cfg.raw,
            "seed": self.seed,
            "tolerances": self.tol.as_dict(),
            "tasks": results,
            "warnings": self.warnings,
            "status": "numerical_failure" if self.failed else "ok",
        }


def run_scene(cfg: SceneConfig, threads: int = 1, seed: int | None = None) -> tuple[dict, dict[str, str], bool]:
    """Run all tasks; returns (report, extra artifacts by file name, failed)."""
    r = SceneRun(cfg, threads, seed)
    report = r.run()
    return report, r.artifacts, r.failed


def cmd_classify(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out:
        out_dir = Path(args.out)
    elif cfg.output.dir:
        out_dir = Path(args.config).parent / cfg.output.dir
    else:
        out_dir = Path(args.config).parent / "out"
    report_path = out_dir / cfg.output.report
    if report_path.exists() and not args.force:
        print(f"error: {report_path} exists (use --force to overwrite)", file=sys.stderr)
        return EXIT_CONFIG
    report, artifacts, failed = run_scene(cfg, threads=args.threads, seed=args.seed)
    out_dir.mkdir(parents=True, exist_ok=True)
    targets = {report_path: canonical_json(report)}
    targets.update({out_dir / name: text for name, text in sorted(artifacts.items())})
    if not args.force:
        clash = [str(p) for p in targets if p.exists()]
        if clash:
            print(f"error: refusing to overwrite {', '.join(clash)} (use --force)", file=sys.stderr)
            return EXIT_CONFIG
    for path, text in targets.items():
        path.write_text(text, encoding="utf-8")
    print(f"wrote {len(targets)} file(s) to {out_dir}")
    for w in report["warnings"]:
        log.warning("%s: %s", w["task"], w["message"])
    if failed:
        print("numerical failure: see the report for the failing task(s)", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _parse_tol(items: Sequence[str]) -> ToleranceSet:
    aliases = {"on_S": "on_s", "on_s": "on_s", "zero": "zero", "rank": "rank"}
    overrides = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or key not in aliases:
            raise ValueError(f"bad --tol {item!r}; expected on_s=V, zero=V or rank=V")
        overrides[aliases[key]] = float(value)
    return ToleranceSet().updated(**overrides)


def cmd_selfcheck(args) -> int:
    if args.list:
        print("\n".join(CASES))
        return EXIT_OK
    try:
        tol = _parse_tol(args.tol)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    results = run_all(tol, seed=args.seed)
    print(format_table(results))
    return EXIT_OK if all(r.ok for r in results) else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bundlesing",
        description="Classify singular points of rank-two bundle homomorphisms on R^3.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="run the tasks of a scene config")
    p.add_argument("config", help="TOML scene file")
    p.add_argument("--out", help="output directory (default: [output].dir or ./out next to the config)")
    p.add_argument("--force", action="store_true", help="overwrite existing outputs")
    p.add_argument("--threads", type=int, default=1, help="worker threads for grid scans")
    p.add_argument("--seed", type=int, default=0, help="recorded in the report")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("selfcheck", help="run the built-in normal-form suite")
    p.add_argument("--list", action="store_true", help="list case names and exit")
    p.add_argument("--tol", action="append", default=[], metavar="K=V",
                   help="tolerance override (on_s, zero, rank); repeatable")
    p.add_argument("--seed", type=int, default=0, help="seed of the random genericity case")
    p.set_defaults(func=cmd_selfcheck)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be >= 1")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
