import json
from fractions import Fraction

import pytest

from isobuild.cli import exit_code, run
from isobuild.cli.io import load_instance, parse_entry
from isobuild.core.exceptions import (
    BallNotCrystal,
    InputError,
    NotInMin,
    PrecisionExhausted,
    SlopeNotIntegral,
    SlopeRange,
)

HALF = {"p": 2, "b": [[0, "p"], [1, 0]]}


@pytest.fixture
def instance(tmp_path):
    def write(data, name="instance.json") -> str:
        path = tmp_path / name
        path.write_text(data if isinstance(data, str) else json.dumps(data))
        return str(path)

    return write


def output(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


class TestParseEntry:
    def test_numbers(self, qp):
        assert parse_entry(qp, 3) == qp.from_int(3)
        assert parse_entry(qp, "1/3") == qp.from_fraction(Fraction(1, 3))
        assert parse_entry(qp, "p^-1") == qp.p_power(-1)
        assert parse_entry(qp, "-p + 3*p^2") == qp.from_int(10)

    def test_generator(self, q4):
        z = q4.gen()
        assert parse_entry(q4, "2*z+1") == q4.from_int(2) * z + q4.one()
        assert parse_entry(q4, "z^2 - z") == z * z - z

    def test_errors(self, qp):
        for bad in ("x", "2**p", "", "+", True):
            with pytest.raises(InputError):
                parse_entry(qp, bad)


def test_load_instance_wraps_bare_isocrystal(instance):
    model = load_instance(instance(HALF))
    assert model.isocrystal.p == 2
    assert model.norm is None


class TestRun:
    def test_slopes(self, instance, capsys):
        assert run(["slopes", "-i", instance(HALF)]) == 0
        data = output(capsys)
        assert data["slopes"] == [{"num": 1, "den": 2, "mult": 2}]
        assert data["config"]["precision"] == 40
        assert "schema_version" in data

    def test_filter(self, instance, capsys):
        assert run(["slopes", "-i", instance(HALF), "-F", ".slopes[0].den"]) == 0
        assert output(capsys) == 2

    def test_output_file(self, instance, tmp_path, capsys):
        path = tmp_path / "out.json"
        assert run(["decompose", "-i", instance(HALF), "-o", str(path)]) == 0
        assert capsys.readouterr().out == ""
        blocks = json.loads(path.read_text())["decomposition"]["blocks"]
        assert [b["slope"] for b in blocks] == ["1/2"]

    def test_decent(self, instance, capsys):
        assert run(["decent", "-i", instance(HALF)]) == 0
        result = output(capsys)
        assert (result["s"], result["decent"]) == (2, True)
        assert run(["decent", "-i", instance(HALF), "--s", "1"]) == 0
        assert output(capsys)["decent"] is False

    def test_min_check(self, instance, capsys):
        data = {"isocrystal": HALF, "norm": {"exponents": [0, "1/2"]}}
        assert run(["min-check", "-i", instance(data)]) == 0
        result = output(capsys)
        assert result["in_min"] is True
        assert result["displacement_sq"] == result["min_nu_sq"] == "1/2"

    def test_min_check_needs_norm(self, instance, capsys):
        assert run(["min-check", "-i", instance(HALF)]) == 2
        assert json.loads(capsys.readouterr().err.strip().splitlines()[-1])["code"] == "InputError"

    def test_min_point(self, instance, capsys):
        data = {"isocrystal": HALF, "params": {"offsets": ["1"]}}
        assert run(["min-point", "-i", instance(data)]) == 0
        assert output(capsys)["offsets"] == ["1"]

    def test_crystals(self, instance, capsys):
        data = {
            "isocrystal": HALF,
            "lattices": [{"basis": [[1, 0], [0, 1]]}, {"basis": [["p", 0], [0, "p"]]}],
        }
        assert run(["crystals", "-i", instance(data), "--radius", "0"]) == 0
        result = output(capsys)
        assert result["count"] == 1
        assert result["isomorphisms"][0]["g"] is not None

    def test_verify(self, instance, capsys):
        args = ["verify", "-i", instance(HALF), "--suite", "thm2", "--seed", "7", "--samples", "6"]
        assert run(args) == 0
        report = output(capsys)
        assert report["status"] == "PASS"
        assert report["seed"] == 7
        assert len(report["instance"]["sha256"]) == 64

    def test_verify_needs_suite(self, instance):
        assert run(["verify", "-i", instance(HALF)]) == 2

    def test_config_file(self, instance, tmp_path, capsys):
        config = tmp_path / "isobuild.toml"
        config.write_text("seed = 3\nsamples = 5\nworkers = 2\n")
        assert run(["scan", "-i", instance(HALF), "--config", str(config), "--seed", "4"]) == 0
        report = output(capsys)
        assert report["samples"] == 5
        assert report["seed"] == 4

    def test_malformed_json(self, instance, capsys):
        assert run(["slopes", "-i", instance("{not json")]) == 2
        assert json.loads(capsys.readouterr().err.strip().splitlines()[-1])["code"] == "InputError"

    def test_invalid_instance(self, instance):
        assert run(["slopes", "-i", instance({"p": 2})]) == 2
        assert run(["slopes", "-i", instance({"p": 4, "b": [[1]]})]) == 2
        assert run(["slopes", "-i", instance({"p": 2, "s": 2, "m": 3, "b": [[1]]})]) == 2


def test_exit_codes():
    assert exit_code(PrecisionExhausted("x")) == 3
    assert exit_code(InputError("x")) == 2
    assert exit_code(SlopeRange("x")) == 2
    assert exit_code(SlopeNotIntegral("x")) == 1
    assert exit_code(NotInMin("x")) == 2
    assert exit_code(BallNotCrystal("x")) == 1
