"""JSON transport and the command-line front end."""

import csv
import io
import json
import random
import subprocess
import sys
from fractions import Fraction

import pytest

from loopcurv.algebra import su2
from loopcurv.cli import JobSpec, main, run
from loopcurv.errors import InputError
from loopcurv.fields import LoopField, random_field
from loopcurv.serialize import field_to_json, parse_algebra, parse_field_spec, parse_rational
from loopcurv.trig import TrigPoly

SIN_E = json.dumps({"components": [[{"freq": 1, "kind": "sin", "coeff": "1"}], [], []]})
SIN_F = json.dumps({"components": [[], [{"freq": 1, "kind": "sin", "coeff": "1"}], []]})


class TestParse:
    def test_rational(self):
        assert parse_rational("-3/4") == Fraction(-3, 4)
        assert parse_rational(2) == 2
        for bad in ("0.5", "1e3", True, 1.5, "1/0", "x"):
            with pytest.raises(InputError):
                parse_rational(bad, "$")

    def test_field_examples(self, L):
        assert parse_field_spec(SIN_E, L) == LoopField.along(L, 0, TrigPoly(sin={1: 1}))
        assert parse_field_spec('{"components": [[], [], []]}', L).is_zero()
        third = {"components": [[], [{"freq": 2, "kind": "cos", "coeff": "1/3"}], []]}
        assert parse_field_spec(third, L) == LoopField.along(L, 1, TrigPoly(cos={2: Fraction(1, 3)}))

    def test_round_trip(self, L):
        rng = random.Random(3)
        for _ in range(10):
            X = random_field(L, rng, 3)
            assert parse_field_spec(json.dumps(field_to_json(X)), L) == X

    @pytest.mark.parametrize(
        "text, position",
        [
            ('{"components": [[{"freq": 1, "kind": "sin", "coeff": 0.5}], [], []]}', "$.components[0][0].coeff"),
            ('{"components": [[], [{"freq": -1, "kind": "cos", "coeff": "1"}], []]}', "$.components[1][0].freq"),
            ('{"components": [[], [], [{"freq": 1, "kind": "tan", "coeff": "1"}]]}', "$.components[2][0].kind"),
            ('{"components": [[{"freq": 1, "kind": "sin", "coeff": "1", "x": 1}], [], []]}', "$.components[0][0]"),
            ('{"components": [[], []]}', "$.components"),
            ('{"components": [[], [], []], "extra": 1}', "$"),
            ('{"components": [[], [], [}', "line 1 column 26"),
        ],
    )
    def test_errors_carry_position(self, L, text, position):
        with pytest.raises(InputError) as info:
            parse_field_spec(text, L)
        assert info.value.position == position

    def test_algebra(self):
        assert parse_algebra("su2") == su2()
        inline = {"dim": 1, "structure": [[["0"]]]}
        assert parse_algebra(json.dumps(inline)).is_abelian()
        with pytest.raises(InputError):
            parse_algebra("g2")
        with pytest.raises(InputError):
            parse_algebra('{"dim": 1, "structure": [[[0.5]]]}')


def job(command, **kw):
    return JobSpec(command=command, **kw)


class TestRun:
    def test_curvature_json(self):
        code, out = run(job("curvature", X=SIN_E, Y=SIN_F, s="2/1", format="json"))
        assert code == 0
        data = json.loads(out)
        assert {"provenance", "terms", "cutoff"} <= set(data)
        assert data["provenance"]["leading_order"] == "-2"
        (term,) = [t for t in data["terms"] if t["grade"]["value"] == "-2"]
        assert set(term) >= {"grade", "parity", "matrix"}
        assert set(term["grade"]) == {"a", "b", "value"}
        assert term["matrix"][1][0] == {"re": {"const": "8", "cos": {"2": "8"}}, "im": {}}

    def test_curvature_table(self):
        code, out = run(job("curvature", X=SIN_E, Y=SIN_F, s="2"))
        assert code == 0
        assert "# convention_note" in out and "(2,1)" in out

    def test_symbols_verbose_audit(self):
        code, out = run(job("symbols", X=SIN_E, s="3/2", format="json", verbose=True))
        assert code == 0
        assert set(json.loads(out)["audit"]) <= {"a", "b", "c"}

    def test_symbols_csv(self):
        code, out = run(job("symbols", X=SIN_E, s="3/2", format="csv"))
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert len(rows) > 1 and len({len(r) for r in rows}) == 1

    def test_jacobi(self):
        assert run(job("jacobi-check", algebra="abelian3"))[0] == 0
        broken = {"dim": 3, "structure": [[["0"] * 3] * 3, [["0"] * 3] * 3, [["0", "1", "0"], ["-1", "0", "0"], ["0"] * 3]]}
        broken["structure"][1] = [["0", "0", "0"], ["0", "0", "1"], ["0", "-1", "0"]]
        assert run(job("jacobi-check", algebra=json.dumps(broken)))[0] == 1

    def test_verify_order_fractional(self):
        code, out = run(job("verify-order", s="3/4", N=512))
        assert code == 0 and "PASS" in out

    def test_verify_order_tolerance_breach(self):
        code, out = run(job("verify-order", s="3/4", N=512, tol=0.001))
        assert code == 1 and "FAIL" in out

    def test_verify_order_csv(self):
        code, out = run(job("verify-order", s="2", N=300, format="csv"))
        assert out.splitlines()[0] == "n,norm,fitted"

    @pytest.mark.parametrize(
        "kw",
        [
            {"command": "curvature", "X": SIN_E, "s": "1/2"},
            {"command": "curvature", "X": SIN_E, "s": "2"},
            {"command": "curvature", "X": SIN_E, "Y": SIN_F, "s": "0.75"},
            {"command": "symbols", "X": SIN_E, "s": "2", "cutoff": "1"},
            {"command": "symbols", "X": '{"components": [[{"freq": 1, "kind": "sin", "coeff": 1.5}], [], []]}'},
            {"command": "symbols", "X": "@/nonexistent/x.json"},
            {"command": "symbols", "X": SIN_E, "algebra": "e8"},
        ],
    )
    def test_input_errors_exit_2(self, kw):
        code, out = run(JobSpec(**kw))
        assert code == 2 and out.startswith("error:")

    def test_float_error_mentions_position(self):
        bad = '{"components": [[{"freq": 1, "kind": "sin", "coeff": 1.5}], [], []]}'
        code, out = run(job("symbols", X=bad))
        assert code == 2 and "$.components[0][0].coeff" in out


class TestMain:
    def test_output_file(self, tmp_path):
        target = tmp_path / "k.json"
        assert main(["curvature", "--X", SIN_E, "--Y", SIN_F, "--s", "2", "--format", "json", "-o", str(target)]) == 0
        assert json.loads(target.read_text())["provenance"]["s"] == "2"

    def test_field_from_file(self, tmp_path):
        x = tmp_path / "x.json"
        x.write_text(SIN_E)
        assert main(["symbols", "--X", f"@{x}", "--s", "3/2"]) == 0

    def test_entry_point_subprocess(self):
        proc = subprocess.run(
            [sys.executable, "-m", "loopcurv", "jacobi-check", "--algebra", "su2"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0 and "PASS" in proc.stdout

    def test_bad_threads_env(self, monkeypatch):
        monkeypatch.setenv("LOOPCURV_THREADS", "many")
        assert main(["jacobi-check"]) == 2
