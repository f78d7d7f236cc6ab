"""Command-line interface: dispatch, formats, and exit codes."""

import json

import pytest

from susyfluid.cli import build_parser, main


class TestExitCodes:
    def test_table_passes(self, capsys):
        assert main(["table"]) == 0
        out = capsys.readouterr().out
        assert "result: PASS" in out

    def test_nonstandard_reduce_is_a_diagnostic(self, capsys):
        assert main(["reduce", "--subalgebra", "L4"]) == 1
        err = capsys.readouterr().err
        assert "non-standard" in err
        assert "L44" in err  # cites the full list

    def test_unknown_command_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_unknown_flag_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["table", "--bogus"])
        assert exc.value.code == 2

    def test_missing_eval_file(self, capsys):
        assert main(["eval", "--input", "/nonexistent/path.prog"]) == 1

    def test_bad_program_is_a_check_failure(self, tmp_path, capsys):
        bad = tmp_path / "bad.prog"
        bad.write_text("x + * t", encoding="utf-8")
        assert main(["eval", "--input", str(bad)]) == 1


class TestFormats:
    def test_classify_json(self, capsys):
        assert main(["classify", "--level", "A", "--format", "json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["suite"] == "classify-A"
        assert data["passed"] is True
        payload = next(c for c in data["checks"] if c["name"] == "class list")
        assert len(payload["payload"]["classes"]) == 3

    def test_classify_level_l_counts(self, capsys):
        assert main(["classify", "--level", "L", "--format", "json"]) == 0
        data = json.loads(capsys.readouterr().out)
        payload = next(c for c in data["checks"] if c["name"] == "class list")
        assert len(payload["payload"]["classes"]) == 63

    def test_eval_formats(self, tmp_path, capsys):
        prog = tmp_path / "p.prog"
        prog.write_text("fn Phi(x, t, th1, th2) even\n"
                        "D1(D1(Phi)) - dx(Phi)\nth1*th2", encoding="utf-8")
        assert main(["eval", "--input", str(prog), "--format", "latex"]) == 0
        out = capsys.readouterr().out
        assert r"\theta_1\theta_2" in out

    def test_seeded_conjugacy_flag(self, capsys):
        assert main(["classify", "--level", "L", "--sample-conjugacy", "25",
                     "--seed", "0", "--format", "json"]) == 0
        data = json.loads(capsys.readouterr().out)
        names = [c["name"] for c in data["checks"]]
        assert any("sampled non-conjugacy (25 trials, seed 0)" in n for n in names)


class TestVerifyCommands:
    def test_verify_solutions_single_family(self, capsys):
        assert main(["verify-solutions", "--id", "l3.3"]) == 0
        out = capsys.readouterr().out
        assert "l3.3" in out and "result: PASS" in out

    def test_verify_solutions_unknown_family(self, capsys):
        assert main(["verify-solutions", "--id", "nope"]) == 1

    def test_reduce_l1(self, capsys):
        assert main(["reduce", "--subalgebra", "L1"]) == 0
        out = capsys.readouterr().out
        assert "reduction constraint" in out

    def test_verify_symmetries(self, capsys):
        assert main(["verify-symmetries"]) == 0
        out = capsys.readouterr().out
        assert "M1 maps the system" in out


def test_parser_help_lists_commands():
    parser = build_parser()
    commands = parser.format_help()
    for name in ("table", "verify-system", "verify-symmetries", "classify",
                 "reduce", "verify-solutions", "eval", "serve"):
        assert name in commands
