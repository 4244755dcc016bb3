import csv
import io
import json
import math
import subprocess
import sys
import textwrap
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np
import pytest

from bundlesing.cli import EXIT_CONFIG, EXIT_FAILED, EXIT_NUMERICAL, EXIT_OK, main
from bundlesing.config import load_config, parse_config
from bundlesing.errors import ConfigError
from bundlesing.report import MARGIN_COLUMNS, canonical_json, format_float

SCENES = Path(__file__).resolve().parent.parent / "scenes"

CONTACT = """
[homomorphism]
mode = "induced"
map = ["x", "y^2 + z"]

[frame]
preset = "contact"

[[tasks]]
kind = "classify"
points = [[0.0, 0.0, 0.0]]
"""

QUARTIC = """
[homomorphism]
mode = "explicit"
matrix = [["1", "0"], ["0", "y^4 + x*y + z + z*y^2"]]

[[tasks]]
kind = "classify"
points = [[0.0, 0.0, 0.0]]
"""

FULL = """
[homomorphism]
mode = "explicit"
matrix = [["1", "0"], ["0", "y^3 + x*y + z"]]

[[tasks]]
kind = "classify"
points = [[0.0, 0.0, 0.0], [0.1, 0.5, 0.0]]
refine = true

[[tasks]]
kind = "scan"
box = [[-1, 1], [-1, 1], [-1, 1]]
grid = 6

[[tasks]]
kind = "trace"
seeds = [[0.0, 0.0, 0.0]]
box = [[-0.5, 0.5], [-0.5, 0.5], [-0.5, 0.5]]
"""


def write(tmp_path, text, name="scene.toml"):
    p = tmp_path / name
    p.write_text(textwrap.dedent(text))
    return p


def run(tmp_path, text, *extra):
    cfg = write(tmp_path, text)
    code = main(["classify", str(cfg), "--out", str(tmp_path / "out"), *extra])
    report_path = tmp_path / "out" / "report.json"
    report = json.loads(report_path.read_text()) if report_path.exists() else None
    return code, report


def test_contact_fold_scene(tmp_path):
    code, report = run(tmp_path, CONTACT)
    assert code == EXIT_OK
    row = report["tasks"][0]["points"][0]
    assert row["classification"]["class"] == "FoldLike"
    contact = row["cross_checks"]["contact"]
    assert contact["agree"] is True
    assert contact["fold_test"]["independent"] is True
    assert report["status"] == "ok"


def test_quartic_scene_reports_computed_class(tmp_path):
    code, report = run(tmp_path, QUARTIC)
    assert code == EXIT_OK
    c = report["tasks"][0]["points"][0]["classification"]
    # the gradient rows (0,0,1), (1,0,0), (0,0,2) are dependent
    assert c["kind"] == "DegenerateNonClassified"
    assert c["diagnostics"]["d_lambda"] == [0.0, 0.0, 1.0]
    assert c["diagnostics"]["d_eta2_lambda"] == [0.0, 0.0, 2.0]
    assert any("degenerate" in w["message"] for w in report["warnings"])


def test_every_classification_has_margins(tmp_path):
    code, report = run(tmp_path, FULL)
    assert code == EXIT_OK

    def walk(node):
        if isinstance(node, dict):
            if "class" in node and "tests" in node:
                assert node["tests"], node
                for t in node["tests"]:
                    assert {"margin", "tolerance", "name"} <= set(t)
            for v in node.values():
                walk(v)
        elif isinstance(node, list):
            for v in node:
                walk(v)

    walk(report)
    kinds = [t["kind"] for t in report["tasks"]]
    assert kinds == ["classify", "scan", "trace"]


def test_unknown_key_is_config_error(tmp_path, capsys):
    code, _ = run(tmp_path, CONTACT.replace("[frame]", "[framee]"))
    assert code == EXIT_CONFIG
    assert "framee" in capsys.readouterr().err


def test_unknown_nested_key(tmp_path, capsys):
    code, _ = run(tmp_path, CONTACT.replace('preset = "contact"', 'preset = "contact"\ncolour = 1'))
    assert code == EXIT_CONFIG
    assert "colour" in capsys.readouterr().err


def test_malformed_toml(tmp_path, capsys):
    code, _ = run(tmp_path, "[homomorphism\n")
    assert code == EXIT_CONFIG
    assert "malformed" in capsys.readouterr().err


def test_overwrite_requires_force(tmp_path, capsys):
    assert run(tmp_path, CONTACT)[0] == EXIT_OK
    code, _ = run(tmp_path, CONTACT)
    assert code == EXIT_CONFIG
    assert "--force" in capsys.readouterr().err
    assert run(tmp_path, CONTACT, "--force")[0] == EXIT_OK


def test_numerical_failure_writes_partial_report(tmp_path):
    text = """
    [homomorphism]
    mode = "explicit"
    matrix = [["1", "0"], ["0", "log(x) + y"]]

    [[tasks]]
    kind = "classify"
    points = [[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]
    """
    code, report = run(tmp_path, text)
    assert code == EXIT_NUMERICAL
    assert report["status"] == "numerical_failure"
    rows = report["tasks"][0]["points"]
    assert rows[0]["error"]["type"] == "DomainError"
    assert rows[1]["classification"]["class"] == "FoldLike"


def test_output_dir_relative_to_config(tmp_path):
    cfg = write(tmp_path, '[output]\ndir = "results"\n' + CONTACT)
    assert main(["classify", str(cfg)]) == EXIT_OK
    assert (tmp_path / "results" / "report.json").exists()


def test_threads_give_identical_reports(tmp_path):
    cfg = write(tmp_path, FULL)
    outs = []
    for threads in ("1", "4"):
        out = tmp_path / f"out{threads}"
        assert main(["classify", str(cfg), "--out", str(out), "--threads", threads]) == EXIT_OK
        outs.append(out)
    names = sorted(p.name for p in outs[0].iterdir())
    assert names == sorted(p.name for p in outs[1].iterdir())
    for name in names:
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_csv_and_svg_artifacts(tmp_path):
    code, report = run(tmp_path, FULL)
    assert code == EXIT_OK
    out = tmp_path / "out"
    rows = list(csv.DictReader(io.StringIO((out / "classify-0.csv").read_text())))
    assert len(rows) == 2
    assert {f"margin_{n}" for n in MARGIN_COLUMNS} <= set(rows[0])
    scan_rows = list(csv.DictReader(io.StringIO((out / "scan-1.csv").read_text())))
    assert len(scan_rows) == report["tasks"][1]["count"]
    curve_rows = list(csv.DictReader(io.StringIO((out / "trace-2.csv").read_text())))
    assert len(curve_rows) == len(report["tasks"][2]["curves"][0]["vertices"])
    for svg in out.glob("*.svg"):
        root = ET.fromstring(svg.read_text())
        assert root.tag.endswith("svg")
        assert len([g for g in root if g.tag.endswith("g")]) == 3


def test_example_scenes_run(tmp_path):
    for scene in sorted(SCENES.glob("*.toml")):
        out = tmp_path / scene.stem
        assert main(["classify", str(scene), "--out", str(out)]) == EXIT_OK, scene.name


# -- selfcheck -------------------------------------------------------------------------------


def test_selfcheck_default_passes(capsys):
    assert main(["selfcheck"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "FAIL" not in out


def test_selfcheck_loose_tolerance_fails(capsys):
    assert main(["selfcheck", "--tol", "zero=1e-1"]) == EXIT_FAILED
    out = capsys.readouterr().out
    # borderline cases are flagged rather than silently passed
    assert "NEAR" in out or "FAIL" in out


def test_selfcheck_list(capsys):
    assert main(["selfcheck", "--list"]) == EXIT_OK
    names = capsys.readouterr().out.split()
    assert "explicit_cusp_transverse" in names and "swallowtail_mu" in names


def test_selfcheck_bad_tol(capsys):
    assert main(["selfcheck", "--tol", "bogus=1"]) == EXIT_CONFIG


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "bundlesing", "selfcheck", "--list"], capture_output=True, text=True)
    assert r.returncode == 0 and "jet_series" in r.stdout


# -- config ---------------------------------------------------------------------------------


def base():
    return {
        "homomorphism": {"mode": "induced", "map": ["x", "y^2"]},
        "tasks": [{"kind": "classify", "points": [[0, 0, 0]]}],
    }


def test_config_defaults():
    cfg = parse_config(base())
    assert cfg.coordinates == ("x", "y", "z")
    assert cfg.frame_preset == "foliation" and not cfg.is_contact
    assert cfg.tasks[0].name == "classify-0"
    assert cfg.tasks[0].options["refine"] is False
    assert cfg.output.report == "report.json"


@pytest.mark.parametrize(
    "mutate, message",
    [
        (lambda r: r.update(tasks=[]), "at least one"),
        (lambda r: r["homomorphism"].update(mode="implicit"), "mode"),
        (lambda r: r["homomorphism"].update(matrix=[["1", "0"], ["0", "1"]]), "no 'matrix'"),
        (lambda r: r.update(frame={"preset": "symplectic"}), "symplectic"),
        (lambda r: r.update(frame={"preset": "contact", "fields": []}), "not both"),
        (lambda r: r.update(tolerances={"zero": -1.0}), "positive"),
        (lambda r: r.update(coordinates=["x", "x", "y"]), "distinct"),
        (lambda r: r["tasks"].append({"kind": "scan", "box": [[1, 0], [0, 1], [0, 1]], "grid": 4}), "min < max"),
        (lambda r: r["tasks"].append({"kind": "morph"}), "kind"),
        (lambda r: r["tasks"].append({"kind": "contact-check", "points": [[0, 0, 0]]}), "contact frame"),
        (lambda r: r["homomorphism"].update(map=["x", "y^^2"]), "invalid homomorphism"),
        (lambda r: r["tasks"][0].update(points=[[0, 0]]), "3 numbers"),
    ],
)
def test_config_validation(mutate, message):
    raw = base()
    mutate(raw)
    with pytest.raises(ConfigError, match=message):
        parse_config(raw)


def test_morin_needs_induced():
    raw = {
        "homomorphism": {"mode": "explicit", "matrix": [["1", "0"], ["0", "y"]]},
        "tasks": [{"kind": "morin", "points": [[0, 0, 0]]}],
    }
    with pytest.raises(ConfigError, match="induced"):
        parse_config(raw)


def test_custom_frame_fields():
    raw = base()
    raw["frame"] = {"fields": [["1", "0", "0"], ["0", "1", "-x"]]}
    cfg = parse_config(raw)
    assert not cfg.is_contact
    # frame fields are the matrix columns
    assert cfg.frame().matrix((0.5, 0, 0)).T.tolist() == [[1, 0, 0], [0, 1, -0.5]]


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "nope.toml")


# -- canonical serialisation ------------------------------------------------------------------


def test_format_float():
    assert format_float(1.0) == "1.0"
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(-0.0) == "0.0"
    assert format_float(1e300) == "1.0000000000000001e+300"
    assert format_float(math.nan) is None


def test_canonical_json_is_sorted_and_parseable():
    obj = {"b": [1.5, np.float64(2.0), np.bool_(True)], "a": {"z": None, "y": math.inf}, "c": "q\"\n"}
    text = canonical_json(obj)
    assert text.index('"a"') < text.index('"b"') < text.index('"c"')
    assert json.loads(text) == {"a": {"y": None, "z": None}, "b": [1.5, 2.0, True], "c": 'q"\n'}
    assert canonical_json(obj) == text


def test_canonical_json_rejects_unknown_objects():
    with pytest.raises(TypeError):
        canonical_json({"a": object()})
