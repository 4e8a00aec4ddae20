import json

import pytest

from concur import io
from concur.cli import main
from concur.state import DensityMatrix, ghz_state, w_state


@pytest.fixture
def write(tmp_path):
    def _write(name, obj):
        p = tmp_path / name
        p.write_text(obj if isinstance(obj, str) else io.dumps(obj))
        return str(p)
    return _write


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_compute_ghz_calibrated(write, capsys):
    path = write("ghz.json", io.state_to_dict(ghz_state(3)))
    code, out, _ = _run(capsys, "compute", path, "--normalization", "ghz", "--report", "json")
    assert code == 0
    assert json.loads(out)["total"] == pytest.approx(1.0, abs=1e-9)


def test_compute_w_text(write, capsys):
    path = write("w.json", io.state_to_dict(w_state(3)))
    code, out, _ = _run(capsys, "compute", path)
    assert code == 0
    assert "total          0.577350269" in out
    assert "wSum           0.333333333" in out


def test_compute_json_schema(write, capsys):
    path = write("w.json", io.state_to_dict(w_state(4)))
    code, out, _ = _run(capsys, "compute", path, "--report", "json")
    doc = json.loads(out)
    assert set(doc) == {"dims", "normalization", "contributions", "wSum", "ghzSums", "total"}
    assert set(doc["ghzSums"]) == {"3", "4"}


def test_malformed_json(write, capsys):
    path = write("bad.json", '{"dims": [2, 2,\n  "x"')
    code, _, err = _run(capsys, "compute", path)
    assert code == 1
    assert "bad.json:2:" in err


def test_unnormalized(write, capsys):
    path = write("u.json", io.state_to_dict(ghz_state(3).scaled(2)))
    assert _run(capsys, "compute", path)[0] == 2
    assert _run(capsys, "compute", path, "--allow-unnormalized")[0] == 0


def test_compute_out_file(write, tmp_path, capsys):
    path = write("w.json", io.state_to_dict(w_state(3)))
    target = tmp_path / "report.json"
    _run(capsys, "compute", path, "--report", "json", "--out", str(target))
    assert json.loads(target.read_text())["total"] == pytest.approx(3 ** -0.5)


def test_verify_ghz(write, capsys):
    path = write("ghz.json", io.state_to_dict(ghz_state(3)))
    code, out, _ = _run(capsys, "verify", path, "--report", "json")
    assert code == 0
    assert json.loads(out)["maxDeviation"] <= 1e-12


def test_verify_random(tmp_path, capsys):
    assert _run(capsys, "random", "--dims", "3,2,2", "--seed", "7", "--out", str(tmp_path))[0] == 0
    assert _run(capsys, "verify", str(tmp_path / "state_000.json"))[0] == 0


def test_verify_size_guard(write, capsys):
    big = write("big.json", {"dims": [9, 8, 8, 8], "amplitudes": [{"index": [0, 0, 0, 0], "re": 1}]})
    assert _run(capsys, "verify", big)[0] == 4


def test_calibrate(capsys):
    code, out, _ = _run(capsys, "calibrate", "--m", "3")
    assert code == 0 and out.strip() == "1.333333333"


def test_calibrate_bad(capsys):
    assert _run(capsys, "calibrate", "--m", "2")[0] == 1


def test_random_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert _run(capsys, "random", "--dims", "2,2,2", "--seed", "1", "--count", "2", "--out", str(d))[0] == 0
    for name in ("state_000.json", "state_001.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_random_requires_seed(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["random", "--dims", "2,2,2"])
    assert exc.value.code == 1


def test_roof_rank_one(write, capsys):
    path = write("rho.json", io.density_to_dict(DensityMatrix.from_pure(w_state(3))))
    code, out, _ = _run(capsys, "roof", path, "--seed", "3", "--report", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["value"] == pytest.approx(0.577350, abs=1e-6)
    assert doc["isUpperBound"] is True
    assert sum(m["weight"] for m in doc["ensemble"]) == pytest.approx(1.0, abs=1e-12)
    assert all(m["stateRef"]["dims"] == [2, 2, 2] for m in doc["ensemble"])


def test_roof_json_stable(write, capsys):
    rho = DensityMatrix.from_ensemble((2, 2, 2), [0.5, 0.5], [ghz_state(3), w_state(3)])
    path = write("mix.json", io.density_to_dict(rho))
    args = ("roof", path, "--seed", "2", "--restarts", "2", "--iters", "20", "--report", "json")
    assert _run(capsys, *args)[1] == _run(capsys, *args)[1]


def test_roof_invalid_density(write, capsys):
    path = write("bad.json", {"dims": [2, 2, 2], "entries": [{"row": [0, 0, 0], "col": [0, 0, 0], "re": 2}]})
    assert _run(capsys, "roof", path, "--seed", "1")[0] == 1


def test_missing_file(capsys, tmp_path):
    assert _run(capsys, "compute", str(tmp_path / "nope.json"))[0] == 1
