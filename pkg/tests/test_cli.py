"""Command line contract: flags, exit codes, files written, SVG content."""

import json
import re
import subprocess
import sys
from fractions import Fraction

import pytest

from interpbisect import trace_from_jsonl
from interpbisect.cli import EXIT_CLAIM, EXIT_OK, EXIT_SIGN, EXIT_USAGE, main
from reference import SAMPLE_TEXT

F = Fraction

RUN_SAMPLE = [
    "run",
    "--function", SAMPLE_TEXT,
    "--a", "-1",
    "--b", "1",
    "--epsilon", "1/3",
]


def run_cli(args, capsys):
    code = main([str(a) for a in args])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestRun:
    def test_writes_trace_and_summarizes(self, tmp_path, capsys):
        out = tmp_path / "t.jsonl"
        code, stdout, _ = run_cli(RUN_SAMPLE + ["--out", out], capsys)
        assert code == EXIT_OK
        lines = out.read_text().splitlines()
        assert len(lines) == 42  # config + 40 steps + final
        assert '"c_n":"0/1","f_c_n":"1/7","d_n":"13/14"' in lines[1]
        assert "witness: |f(c_1)| < epsilon at c_1 = 0/1, f = 1/7" in stdout
        assert "limit estimate:" in stdout

    def test_default_output_path(self, tmp_path, capsys, monkeypatch):
        monkeypatch.chdir(tmp_path)
        code, _, _ = run_cli(RUN_SAMPLE + ["--max-steps", "3"], capsys)
        assert code == EXIT_OK
        assert (tmp_path / "trace.jsonl").exists()

    def test_deterministic_bytes(self, tmp_path, capsys):
        out1, out2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        run_cli(RUN_SAMPLE + ["--out", out1], capsys)
        run_cli(RUN_SAMPLE + ["--out", out2], capsys)
        assert out1.read_bytes() == out2.read_bytes()

    def test_float_backend(self, tmp_path, capsys):
        out = tmp_path / "f.jsonl"
        code, _, _ = run_cli(
            RUN_SAMPLE + ["--backend", "float", "--max-steps", "8", "--out", out], capsys
        )
        assert code == EXIT_OK
        trace = trace_from_jsonl(out.read_text())
        assert isinstance(trace.limit_estimate, float)

    def test_stop_early(self, tmp_path, capsys):
        out = tmp_path / "s.jsonl"
        code, stdout, _ = run_cli(
            ["run", "-f", "x", "--a", "-1", "--b", "1", "-e", "1/2",
             "--stop-early", "--out", out],
            capsys,
        )
        assert code == EXIT_OK
        assert "stopped early at step 1" in stdout
        assert len(out.read_text().splitlines()) == 3

    def test_classical_mode_flag(self, tmp_path, capsys):
        out = tmp_path / "c.jsonl"
        code, _, _ = run_cli(
            RUN_SAMPLE + ["--mode", "classical", "--max-steps", "2", "--out", out], capsys
        )
        assert code == EXIT_OK
        assert '"mode":"classical"' in out.read_text().splitlines()[0]

    def test_reversed_interval_is_usage_error(self, tmp_path, capsys):
        code, _, err = run_cli(
            ["run", "-f", "x", "--a", "1", "--b", "-1", "-e", "1/3",
             "--out", tmp_path / "x.jsonl"],
            capsys,
        )
        assert code == EXIT_USAGE
        assert "a < b" in err

    def test_zero_epsilon_is_usage_error(self, tmp_path, capsys):
        code, _, err = run_cli(
            ["run", "-f", "x", "--a", "-1", "--b", "1", "-e", "0",
             "--out", tmp_path / "x.jsonl"],
            capsys,
        )
        assert code == EXIT_USAGE
        assert "epsilon" in err

    def test_unparsable_rational_flag(self, capsys):
        code, _, _ = run_cli(["run", "-f", "x", "--a", "abc", "--b", "1", "-e", "1/3"], capsys)
        assert code == EXIT_USAGE

    def test_missing_required_flag(self, capsys):
        code, _, _ = run_cli(["run", "-f", "x", "--a", "-1", "--b", "1"], capsys)
        assert code == EXIT_USAGE

    def test_sign_violation_exits_3(self, tmp_path, capsys):
        code, _, err = run_cli(
            ["run", "-f", "x+10", "--a", "-1", "--b", "1", "-e", "1/3",
             "--out", tmp_path / "x.jsonl"],
            capsys,
        )
        assert code == EXIT_SIGN
        assert "f(a) = 9" in err

    def test_syntax_error_exits_2_with_offset(self, capsys):
        code, _, err = run_cli(
            ["run", "-f", "min(", "--a", "-1", "--b", "1", "-e", "1/3"], capsys
        )
        assert code == EXIT_USAGE
        assert "offset 4" in err

    def test_division_by_zero_during_run(self, tmp_path, capsys):
        # f(0) divides by zero and 0 is the very first midpoint; note the
        # --a=-1/3 form, argparse only recognizes plain negative numbers
        # as flag values
        code, _, err = run_cli(
            ["run", "-f", "x+1/(100x)", "--a=-1/3", "--b", "1/3", "-e", "1/9",
             "--out", tmp_path / "x.jsonl"],
            capsys,
        )
        assert code == EXIT_USAGE
        assert "division by zero" in err

    def test_no_subcommand_is_usage_error(self, capsys):
        assert main([]) == EXIT_USAGE

    def test_version_flag(self, capsys):
        assert main(["--version"]) == EXIT_OK


class TestVerify:
    @pytest.fixture()
    def trace_path(self, tmp_path, capsys):
        out = tmp_path / "t.jsonl"
        assert run_cli(RUN_SAMPLE + ["--out", out], capsys)[0] == EXIT_OK
        return out

    def test_clean_trace_verifies(self, trace_path, capsys):
        code, stdout, _ = run_cli(
            ["verify", "--trace", trace_path, "--function", SAMPLE_TEXT], capsys
        )
        assert code == EXIT_OK
        report = json.loads(stdout)
        assert report["claim_holds"] is True
        assert report["violations"] == 0
        assert report["witness"]["kind"] == "midpoint"

    def test_budget_flags(self, trace_path, capsys):
        code, stdout, _ = run_cli(
            ["verify", "-t", trace_path, "-f", SAMPLE_TEXT, "--delta", "1/8", "--m", "6"],
            capsys,
        )
        assert code == EXIT_OK
        report = json.loads(stdout)
        budget = report["continuity_budget"]
        assert budget["halfwidth_within_half_delta"] is True
        assert budget["limit_gap_within_half_delta"] is False

    def test_budget_flags_must_pair(self, trace_path, capsys):
        code, _, err = run_cli(
            ["verify", "-t", trace_path, "-f", SAMPLE_TEXT, "--delta", "1/8"], capsys
        )
        assert code == EXIT_USAGE
        assert "--delta and --m" in err

    def test_wrong_function_is_a_violation(self, trace_path, capsys):
        code, stdout, err = run_cli(
            ["verify", "-t", trace_path, "-f", "x+10"], capsys
        )
        assert code == EXIT_CLAIM
        report = json.loads(stdout)
        assert report["claim_holds"] is False
        assert "claim violated at step" in err

    def test_tampered_step_is_a_violation(self, tmp_path, capsys):
        # a witness-free straddling trace (f = x, tiny epsilon), with one
        # step's endpoints replaced by an interval that does not straddle
        trace = tmp_path / "straddle.jsonl"
        run_cli(
            ["run", "-f", "x", "--a=-1", "--b", "2", "-e", "1/1000",
             "--mode", "classical", "--max-steps", "5", "--out", trace],
            capsys,
        )
        lines = trace.read_text().splitlines()
        assert lines[3].startswith('{"n":3')
        lines[3] = (
            '{"n":3,"a_n":"2/1","b_n":"3/1","c_n":"5/2","f_c_n":"5/2","d_n":"1/1"}'
        )
        bad = tmp_path / "bad.jsonl"
        bad.write_text("\n".join(lines) + "\n")
        code, stdout, err = run_cli(["verify", "-t", bad, "-f", "x"], capsys)
        assert code == EXIT_CLAIM
        report = json.loads(stdout)
        cases = [entry["case"] for entry in report["claim"]]
        assert cases == ["straddle", "straddle", "violation", "straddle", "straddle"]
        assert "claim violated at step 3" in err

    def test_malformed_trace_is_usage_error(self, tmp_path, capsys):
        bad = tmp_path / "garbage.jsonl"
        bad.write_text("this is not a trace\n")
        code, _, err = run_cli(["verify", "-t", bad, "-f", "x"], capsys)
        assert code == EXIT_USAGE
        assert "trace:" in err

    def test_missing_trace_file(self, tmp_path, capsys):
        code, _, _ = run_cli(["verify", "-t", tmp_path / "nope.jsonl", "-f", "x"], capsys)
        assert code == EXIT_USAGE

    def test_float_trace_is_refused(self, tmp_path, capsys):
        out = tmp_path / "f.jsonl"
        run_cli(RUN_SAMPLE + ["--backend", "float", "--out", out], capsys)
        code, _, err = run_cli(["verify", "-t", out, "-f", SAMPLE_TEXT], capsys)
        assert code == EXIT_USAGE
        assert "exact" in err


class TestCompare:
    def test_table_and_csv(self, tmp_path, capsys):
        csv_path = tmp_path / "cmp.csv"
        code, stdout, _ = run_cli(
            ["compare", "-f", SAMPLE_TEXT, "--a", "-1", "--b", "1", "-e", "1/3",
             "--max-steps", "6", "--csv", csv_path],
            capsys,
        )
        assert code == EXIT_OK
        rows = [line for line in stdout.splitlines() if re.match(r"\s+\d+ ", line)]
        assert len(rows) == 6
        assert "interpolated: first |f(c_n)| < epsilon at step 1" in stdout
        assert "classical: first |f(c_n)| < epsilon at step 1" in stdout

        csv_lines = csv_path.read_text().splitlines()
        assert csv_lines[0] == "n,c_interp,f_interp,d_interp,c_classical,f_classical"
        assert csv_lines[1] == "1,0/1,1/7,13/14,0/1,1/7"
        assert csv_lines[2] == "2,-3/7,103/343,1/1,-1/2,5/14"
        assert len(csv_lines) == 7

    def test_no_csv_by_default(self, tmp_path, capsys, monkeypatch):
        monkeypatch.chdir(tmp_path)
        code, stdout, _ = run_cli(
            ["compare", "-f", "x", "--a", "-1", "--b", "2", "-e", "1/10",
             "--max-steps", "4"],
            capsys,
        )
        assert code == EXIT_OK
        assert list(tmp_path.iterdir()) == []

    def test_sign_violation_propagates(self, capsys):
        code, _, _ = run_cli(
            ["compare", "-f", "x+10", "--a", "-1", "--b", "1", "-e", "1/3"], capsys
        )
        assert code == EXIT_SIGN


class TestPlot:
    @pytest.fixture()
    def short_trace(self, tmp_path, capsys):
        out = tmp_path / "t.jsonl"
        run_cli(RUN_SAMPLE + ["--max-steps", "6", "--out", out], capsys)
        return out

    def test_svg_structure(self, short_trace, tmp_path, capsys):
        svg_path = tmp_path / "p.svg"
        code, _, _ = run_cli(
            ["plot", "-t", short_trace, "-f", SAMPLE_TEXT, "--out", svg_path], capsys
        )
        assert code == EXIT_OK
        svg = svg_path.read_text()
        assert svg.startswith("<svg ")
        assert svg.rstrip().endswith("</svg>")
        dots = re.findall(r'<circle class="midpoint-dot"[^>]*/>', svg)
        assert len(dots) == 6
        assert 'data-x="0/1"' in dots[0] and 'data-y="1/7"' in dots[0]
        assert svg.count('class="limit-marker"') == 1
        assert "ε = 1/3" in svg
        assert "<desc>min((1+6*x^2)/7, 8+9*x)</desc>" in svg

    def test_deterministic_bytes(self, short_trace, tmp_path, capsys):
        p1, p2 = tmp_path / "p1.svg", tmp_path / "p2.svg"
        run_cli(["plot", "-t", short_trace, "-f", SAMPLE_TEXT, "--out", p1], capsys)
        run_cli(["plot", "-t", short_trace, "-f", SAMPLE_TEXT, "--out", p2], capsys)
        assert p1.read_bytes() == p2.read_bytes()

    def test_single_step_trace_plots(self, tmp_path, capsys):
        trace = tmp_path / "one.jsonl"
        run_cli(
            ["run", "-f", "x", "--a", "-1", "--b", "1", "-e", "1/2",
             "--max-steps", "1", "--out", trace],
            capsys,
        )
        svg_path = tmp_path / "one.svg"
        code, _, _ = run_cli(["plot", "-t", trace, "-f", "x", "--out", svg_path], capsys)
        assert code == EXIT_OK
        assert 'data-x="0/1"' in svg_path.read_text()

    def test_explicit_ranges(self, short_trace, tmp_path, capsys):
        svg_path = tmp_path / "r.svg"
        code, _, _ = run_cli(
            ["plot", "-t", short_trace, "-f", SAMPLE_TEXT, "--out", svg_path,
             "--x-min", "-2", "--x-max", "2", "--y-min", "-2", "--y-max", "2"],
            capsys,
        )
        assert code == EXIT_OK

    def test_range_flags_must_pair(self, short_trace, tmp_path, capsys):
        code, _, err = run_cli(
            ["plot", "-t", short_trace, "-f", SAMPLE_TEXT,
             "--out", tmp_path / "r.svg", "--x-min", "-2"],
            capsys,
        )
        assert code == EXIT_USAGE
        assert "--x-min and --x-max" in err

    def test_too_few_samples(self, short_trace, tmp_path, capsys):
        code, _, _ = run_cli(
            ["plot", "-t", short_trace, "-f", SAMPLE_TEXT,
             "--out", tmp_path / "r.svg", "--samples", "1"],
            capsys,
        )
        assert code == EXIT_USAGE

    def test_function_with_pole_still_plots(self, tmp_path, capsys):
        # curve sampling tolerates isolated evaluation failures
        trace = tmp_path / "t.jsonl"
        run_cli(
            ["run", "-f", "x", "--a", "-1", "--b", "1", "-e", "1/2",
             "--max-steps", "1", "--out", trace],
            capsys,
        )
        svg_path = tmp_path / "pole.svg"
        # pole at x = -1/2, which the 33-point sampling grid hits exactly
        # but the trace's midpoints and limit (all 0) do not
        code, _, _ = run_cli(
            ["plot", "-t", trace, "-f", "1/(2x+1)+x", "--out", svg_path, "--samples", "33"],
            capsys,
        )
        assert code == EXIT_OK
        assert "<path" in svg_path.read_text()


class TestProcessLevel:
    def test_module_entry_help(self):
        proc = subprocess.run(
            [sys.executable, "-m", "interpbisect", "--help"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        for sub in ("run", "compare", "verify", "plot"):
            assert sub in proc.stdout

    def test_console_script_round_trip(self, tmp_path):
        trace = tmp_path / "t.jsonl"
        proc = subprocess.run(
            [
                "interpbisect", "run", "-f", SAMPLE_TEXT,
                "--a", "-1", "--b", "1", "-e", "1/2",
                "--max-steps", "10", "--out", str(trace),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        proc = subprocess.run(
            ["interpbisect", "verify", "-t", str(trace), "-f", SAMPLE_TEXT],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert json.loads(proc.stdout)["claim_holds"] is True
