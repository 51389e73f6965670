import json

import pytest

from gogcalc.cli import main, shipped_files
from gogcalc.dsl import emit_manifold
from gogcalc.presets import load_preset, preset_names


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate(capsys, tmp_path):
    code, out, _ = run(capsys, "validate", "preset:graph_manifold")
    assert code == 0 and out.startswith("valid: 2 vertices, 1 edges, base A")
    bad = tmp_path / "bad.gog"
    bad.write_text("manifold m\nvertex A : circle_bundle(k=2)\nvertex B : circle_bundle(k=2)\nedge e : A.T0 -> B.T0 [[1,0],[0,1]]\n")
    code, out, _ = run(capsys, "validate", str(bad))
    assert code == 1 and "fibers match" in out


def test_parse_errors_exit_1_with_a_position(capsys, tmp_path):
    bad = tmp_path / "bad.gog"
    bad.write_text("manifold m\nvertex A : circle_bundle(k=1)\n")
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 1
    assert err.strip() == "parse error at line 2, column 12: free rank must be between 2 and 16"


def test_query_summary(capsys):
    code, out, _ = run(capsys, "query", "preset:trefoil", "divisibility(K: h^-1)")
    assert code == 0
    assert "max_n: 3" in out and "root: K: q2" in out


def test_query_certificate_and_replay(capsys, tmp_path):
    cert = tmp_path / "c.json"
    code, out, _ = run(
        capsys, "query", "preset:graph_manifold", "reduce(A: x1 ; e ; h ; ~e ; 1)", "--json", "--certificate", str(cert)
    )
    assert code == 0
    assert json.loads(out) == json.loads(cert.read_text())
    code, out, _ = run(capsys, "replay", str(cert))
    assert code == 0 and out.strip() == "replayed 1 checks: ok"
    doc = json.loads(cert.read_text())
    doc["answer"]["reduced"] = "A: 1"
    cert.write_text(json.dumps(doc))
    code, _, err = run(capsys, "replay", str(cert))
    assert code == 1 and "differs" in err


def test_query_from_a_file(capsys, tmp_path):
    model = tmp_path / "m.gog"
    model.write_text(emit_manifold(load_preset("mixed")))
    query = tmp_path / "q.txt"
    query.write_text("conjclass(K: q1)\n")
    code, out, _ = run(capsys, "query", str(model), str(query), "--no-trace")
    assert code == 0 and "checked: 5" in out


def test_budget_exhaustion_exits_2(capsys):
    code, _, err = run(capsys, "--budget", "0", "query", "preset:fig8", "centralizer(F: b^3 a b^-3)")
    assert code == 2 and err.startswith("budget exhausted")


def test_precondition_errors_exit_1(capsys):
    code, _, err = run(capsys, "query", "preset:trefoil", "centralizer(K: 1)")
    assert code == 1 and err.startswith("error:")
    code, _, err = run(capsys, "validate", "preset:nope")
    assert code == 1 and "unknown preset" in err


def test_preset_listing_and_emit(capsys):
    code, out, _ = run(capsys, "preset", "--list")
    assert code == 0 and [line.split(":")[0] for line in out.splitlines()] == preset_names()
    code, out, _ = run(capsys, "preset", "hnn_bundle", "--emit")
    assert out == emit_manifold(load_preset("hnn_bundle"))


def test_shipped_files_match_presets():
    files = shipped_files()
    assert sorted(files) == sorted(preset_names())
    for name, text in files.items():
        assert text.endswith(emit_manifold(load_preset(name)))


@pytest.mark.parametrize("jobs", ["1", "2"])
def test_fuzz(capsys, jobs):
    code, out, _ = run(capsys, "--jobs", jobs, "fuzz", "--seed", "4", "--count", "300")
    assert code == 0 and out.startswith("fuzzed 300 inputs") and out.rstrip().endswith("0 crashes")
