import json

import pytest

from TreeCap.cli import run


@pytest.fixture
def files(tmp_path):
    tree = {"edges": [{"id": "w", "children": ["a", "b"]}, {"id": "a"}, {"id": "b"}]}
    paths = {
        "tree": tmp_path / "tree.json",
        "set": tmp_path / "set.json",
        "measure": tmp_path / "measure.json",
        "doubled": tmp_path / "doubled.json",
        "broken": tmp_path / "broken.json",
    }
    paths["tree"].write_text(json.dumps(tree))
    paths["set"].write_text(json.dumps(["a"]))
    paths["measure"].write_text(json.dumps({"weights": {"a": 1 / 3, "b": 1 / 3}}))
    paths["doubled"].write_text(json.dumps({"weights": {"a": 2 / 3, "b": 2 / 3}}))
    paths["broken"].write_text("{not json")
    return {k: str(v) for k, v in paths.items()}


def _run(capsys, *argv):
    code = run(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _json(capsys, *argv):
    code, out, err = _run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


class TestCommands:
    def test_tree(self, capsys):
        data = _json(capsys, "tree", "--spec", "homogeneous:2", "--depth", "2")
        assert len(data["edges"]) == 7
        assert sum(1 for e in data["edges"] if e.get("tail")) == 4

    def test_capacity_of_spec(self, capsys):
        data = _json(capsys, "capacity", "--spec", "homogeneous:2", "--depth", "30")
        assert data["capacity"]["lower"] <= 0.5 <= data["capacity"]["upper"]
        assert data["capacity"]["upper"] - data["capacity"]["lower"] < 1e-5

    def test_capacity_of_tree(self, capsys, files):
        data = _json(capsys, "capacity", "--tree", files["tree"])
        assert data["capacity"]["lower"] == pytest.approx(2 / 3)
        assert "M" not in data

    def test_capacity_of_truncated_spec(self, capsys):
        data = _json(capsys, "capacity", "--spec", "spherical:3:2", "--depth", "6", "--tail", "1")
        assert data["capacity"]["lower"] > 0

    def test_equilibrium_of_set(self, capsys, files):
        data = _json(capsys, "equilibrium", "--tree", files["tree"], "--set", files["set"], "--p", "3")
        assert data["capacity"]["lower"] == pytest.approx(0.25)
        assert data["M"]["b"] == 0.0
        assert data["c"]["a"] == 1.0

    def test_verify(self, capsys, files):
        code, out, _ = _run(capsys, "verify", "--tree", files["tree"], "--measure", files["measure"])
        assert code == 0
        assert json.loads(out)["recovered_set"] == ["a", "b"]
        code, out, _ = _run(capsys, "verify", "--tree", files["tree"], "--measure", files["doubled"])
        assert code == 1
        assert json.loads(out)["is_equilibrium"] is False

    def test_tile(self, capsys, files, tmp_path):
        svg = tmp_path / "out.svg"
        data = _json(capsys, "tile", "--tree", files["tree"], "--svg", str(svg), "--labels")
        assert data["width"] == pytest.approx(2 / 3)
        assert data["validation"]["ok"] is True
        assert svg.read_text().count("<rect") == 3

    def test_tile_of_truncated_spec(self, capsys, tmp_path):
        svg = tmp_path / "h.svg"
        data = _json(capsys, "tile", "--spec", "homogeneous:2", "--depth", "6", "--svg", str(svg))
        assert data["width"] == pytest.approx(64 / 127)
        assert data["validation"]["ok"] is True
        assert svg.read_text().count("<rect") == 2 ** 7 - 1

    def test_tile_rejects_other_exponents(self, capsys, files):
        code, out, err = _run(capsys, "tile", "--tree", files["tree"], "--p", "3")
        assert code == 2
        assert out == ""
        assert err.startswith("treecap: error:")

    def test_symmetric(self, capsys):
        data = _json(capsys, "symmetric", "--n", "2")
        assert data["closed_form"] == pytest.approx(0.5)
        assert data["capacity"]["lower"] <= 0.5 <= data["capacity"]["upper"]
        data = _json(capsys, "symmetric", "--degrees", "2,2,2,2", "--eventual-min", "2", "--depth", "10")
        assert data["capacity"]["lower"] <= 0.5 <= data["capacity"]["upper"]

    def test_resistance(self, capsys, files):
        data = _json(capsys, "resistance", "--tree", files["tree"])
        assert data["resistance"]["lower"] == pytest.approx(0.5)
        assert data["identity_residual"] < 1e-12

    def test_resistance_of_infinite_tree(self, capsys):
        data = _json(capsys, "resistance", "--spec", "homogeneous:2", "--depth", "8")
        assert data["capacity"]["lower"] - 1e-12 <= 0.5 <= data["capacity"]["upper"] + 1e-12
        data = _json(capsys, "resistance", "--spec", "homogeneous:2", "--depth", "4", "--tail", "0")
        assert data["resistance"]["upper"] is None

    def test_construct_set(self, capsys):
        data = _json(capsys, "construct-set", "--n", "2", "--t", "0.2", "--depth", "8", "--tol", "0.01")
        assert data["capacity"]["lower"] == pytest.approx(0.2, abs=0.01)

    def test_construct_tree(self, capsys):
        data = _json(capsys, "construct-tree", "--c", "0.3", "--p", "2")
        assert data["capacity"]["lower"] == pytest.approx(0.3, abs=1e-6)
        assert data["spec"]["kind"] == "subdyadic"
        assert len(data["digits"]) == 30

    def test_oracle(self, capsys, files):
        data = _json(capsys, "oracle", "--tree", files["tree"])
        assert data["capacity"] == pytest.approx(2 / 3)
        assert data["method"] == "kkt"

    def test_human_format_and_output_file(self, capsys, files, tmp_path):
        out = tmp_path / "result.txt"
        code, stdout, _ = _run(capsys, "capacity", "--tree", files["tree"], "--format", "human", "--out", str(out))
        assert code == 0
        assert stdout == ""
        text = out.read_text()
        assert "capacity:" in text
        assert "lower: 0.666666666667" in text


class TestErrors:
    @pytest.mark.parametrize("argv", [
        [],
        ["bogus"],
        ["capacity"],
        ["capacity", "--tree", "x.json", "--spec", "homogeneous:2"],
        ["capacity", "--spec", "nonsense:1"],
        ["capacity", "--spec", "homogeneous:2", "--p", "1"],
        ["capacity", "--spec", "homogeneous:2", "--threads", "0"],
        ["capacity", "--spec", "homogeneous:2", "--log-level", "LOUD"],
        ["construct-tree", "--c", "0.9"],
    ])
    def test_usage_and_input_errors(self, capsys, argv):
        code, out, err = _run(capsys, *argv)
        assert code == 2
        assert out == ""
        assert err.startswith("treecap: error:")
        assert err.count("\n") == 1

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = _run(capsys, "capacity", "--tree", str(tmp_path / "missing.json"))
        assert code == 2
        assert "missing.json" in err

    def test_malformed_json(self, capsys, files):
        code, _, _ = _run(capsys, "capacity", "--tree", files["broken"])
        assert code == 2

    def test_leaf_set_with_inner_edge(self, capsys, files, tmp_path):
        inner = tmp_path / "inner.json"
        inner.write_text(json.dumps({"leaves": ["w"]}))
        code, _, err = _run(capsys, "capacity", "--tree", files["tree"], "--set", str(inner))
        assert code == 2
        assert "not a leaf" in err
