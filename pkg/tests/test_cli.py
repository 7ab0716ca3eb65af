import json

import numpy as np
import pytest

from torusfm import presets
from torusfm.cli import main
from torusfm.fm_transform import forward_transform, inverse_transform
from torusfm.serialize import (
    family_to_json,
    rep_from_json,
    rep_to_json,
    spectral_from_json,
    spectral_to_json,
)
from torusfm.spectral_family import FamilySample
from torusfm.unitary_rep import UnitaryRep, are_equivalent, direct_sum

W3 = np.exp(2j * np.pi / 3)
SWAP = [[0, 1], [1, 0]]


def klein_rep():
    return UnitaryRep([np.diag([W3, W3.conjugate()])], [SWAP])


@pytest.fixture
def write(tmp_path):
    def _write(name, obj):
        path = tmp_path / name
        path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(path)
    return _write


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_transform_klein(write, capsys):
    path = write("rep.json", rep_to_json(klein_rep(), presets.klein()))
    code, out, _ = run(["transform", path], capsys)
    assert code == 0
    data = json.loads(out)
    (comp,) = data["components"]
    assert [pt for pt in comp["orbit"]] == [["1/3"], ["2/3"]]
    assert comp["k"] == 1 and list(comp["eta"]) == ["t^2"]
    assert np.allclose(comp["eta"]["t^2"], [[[1, 0]]])


def test_invert_accepts_flat_orbit(write, capsys, tmp_path):
    data = {"n": 2, "presentation": presets.klein().to_json(),
            "components": [{"orbit": ["1/3", "2/3"], "base_index": 0, "k": 1,
                            "eta": {"t^2": [[[1, 0]]]}}]}
    out_path = str(tmp_path / "out.json")
    code, _, _ = run(["invert", write("s.json", data), "-o", out_path], capsys)
    assert code == 0
    rep = rep_from_json(json.loads(open(out_path).read()))
    assert are_equivalent(rep, klein_rep())


def test_validate_broken_covariance(write, capsys):
    broken = UnitaryRep(klein_rep().lattice_images, [np.eye(2)])
    path = write("bad.json", rep_to_json(broken))
    code, out, _ = run(["validate", path, "--preset", "klein"], capsys)
    assert code == 2
    report = json.loads(out)
    assert not report["valid"] and report["residuals"]["covariance"] > 1


def test_validate_ok(write, capsys):
    code, out, _ = run(["validate", write("rep.json", rep_to_json(klein_rep(), presets.klein()))], capsys)
    assert code == 0 and json.loads(out)["valid"]


def test_atlas_klein(capsys, tmp_path):
    out_path, csv_path = str(tmp_path / "atlas.jsonl"), str(tmp_path / "atlas.csv")
    code, _, _ = run(["atlas", "--preset", "klein", "--n", "2", "--q", "6", "-o", out_path,
                      "--csv", csv_path], capsys)
    assert code == 0
    lines = open(out_path).read().splitlines()
    assert len(lines) == 7
    assert json.loads(lines[0])["feasible"] is False
    assert open(csv_path).read().startswith("ell,count,feasible_count")
    # sample from a line of the persisted atlas
    code, out, _ = run(["sample", "--preset", "klein", "--atlas", out_path, "--index", "2",
                        "--seed", "4"], capsys)
    assert code == 0 and json.loads(out)["seed"] == 4
    code, _, _ = run(["sample", "--preset", "klein", "--atlas", out_path, "--index", "0"], capsys)
    assert code == 2


def test_roundtrip_and_queries(write, capsys):
    p = presets.klein()
    path = write("rep.json", rep_to_json(direct_sum(klein_rep(), klein_rep()), p))
    code, out, _ = run(["roundtrip", path], capsys)
    assert code == 0 and json.loads(out)["equivalent"]
    code, out, _ = run(["irreducible", path], capsys)
    assert json.loads(out) == {"irreducible": False, "commutant_dim": 4}
    code, out, _ = run(["decompose", path], capsys)
    data = json.loads(out)
    assert data["mass"] == 4 and [c["multiplicity"] for c in data["components"]] == [2]
    other = write("other.json", rep_to_json(klein_rep(), p))
    code, out, _ = run(["equivalent", other, other], capsys)
    assert code == 0 and json.loads(out)["equivalent"]


def test_flow(write, capsys, tmp_path):
    fam = [FamilySample(b, [np.diag([np.exp(1j * np.pi * b), np.exp(-1j * np.pi * b)])])
           for b in (0, 0.25, 0.5, 0.75, 1)]
    report = str(tmp_path / "report.json")
    code, out, _ = run(["flow", write("fam.json", family_to_json(fam)), "--report", report], capsys)
    assert code == 0
    assert out.splitlines()[0] == "b,xi0,multiplicity"
    assert json.loads(open(report).read())["counting"] == [1, 2, 2, 2, 1]


def test_exit_code_io_and_schema(write, capsys):
    assert run(["transform", "/nonexistent/rep.json", "--preset", "klein"], capsys)[0] == 1
    assert run(["transform", write("junk.json", "{not json"), "--preset", "klein"], capsys)[0] == 1
    assert run(["transform", write("empty.json", {}), "--preset", "klein"], capsys)[0] == 1
    assert run(["transform", write("r.json", rep_to_json(klein_rep())), "--qmax", "0",
                "--preset", "klein"], capsys)[0] == 1
    assert run(["transform", write("r.json", rep_to_json(klein_rep()))], capsys)[0] == 1


def test_exit_code_numerical(write, capsys):
    w = np.exp(2j * np.pi * 0.1234)
    rep = UnitaryRep([np.diag([w, w.conjugate()])], [SWAP])
    path = write("rep.json", rep_to_json(rep, presets.klein()))
    assert run(["transform", path, "--qmax", "5"], capsys)[0] == 3


def test_exit_code_invalid_presentation(write, capsys):
    p = {"d": 1, "generators": [{"name": "t", "matrix": [[-1]]}], "relators": ["t"]}
    rep = rep_to_json(klein_rep())
    rep["presentation"] = p
    assert run(["transform", write("rep.json", rep)], capsys)[0] == 2


def test_workers_env(write, capsys, monkeypatch):
    monkeypatch.setenv("TORUSFM_WORKERS", "2")
    path = write("rep.json", rep_to_json(klein_rep(), presets.klein()))
    assert run(["transform", path], capsys)[0] == 0


def test_schema_roundtrips():
    p = presets.dihedral()
    rep = inverse_transform(forward_transform(UnitaryRep.trivial(2, p), p), p)
    back = rep_from_json(json.loads(json.dumps(rep_to_json(rep, p))))
    assert all(np.array_equal(a, b) for a, b in zip(rep.images, back.images))
    s = forward_transform(direct_sum(klein_rep(), klein_rep()), presets.klein())
    s2 = spectral_from_json(json.loads(json.dumps(spectral_to_json(s, presets.klein()))), presets.klein())
    assert [c.orbit for c in s2.components] == [c.orbit for c in s.components]
    assert all(np.array_equal(a, b) for c1, c2 in zip(s.components, s2.components)
               for a, b in zip(c1.monodromy, c2.monodromy))
