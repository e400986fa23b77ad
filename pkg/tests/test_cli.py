import io
import json
import subprocess
import sys

import pytest
from hypothesis import given

from probcorr import pccs, ppi
from probcorr.cli import ParseError, parse_corpus, parse_pccs, parse_ppi, pretty, run
from probcorr.cli.main import default_corpus_text
from probcorr.cli.parsing import parse_pccs_process
from strategies import source_processes, target_processes


def invoke(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


class TestExitCodes:
    def test_holds(self):
        assert invoke("check", "weak-poc", "--entry", "tau-steps")[0] == 0

    def test_fails_with_counterexample(self):
        code, text = invoke("check", "weak-poc", "--mutation", "drop-iota-input",
                            "--entry", "comm-basic", "--format", "records")
        assert code == 1
        failing = [json.loads(line) for line in text.splitlines() if '"fails"' in line]
        assert any(r["direction"] == "complete" and r["source"] for r in failing)

    def test_inconclusive(self):
        code, _ = invoke("check", "weak-poc", "--mutation", "swap-branch-probs", "--entry", "loop")
        assert code == 2

    def test_parse_error(self, capsys):
        assert invoke("check", "weak-poc", "--term", "tau.(1/2: ok + 1/3: 0)")[0] == 3
        assert "probabilities sum to 5/6" in capsys.readouterr().err

    def test_unknown_checker(self):
        with pytest.raises(SystemExit) as exc:
            invoke("check", "nowhere")
        assert exc.value.code == 3

    def test_unknown_entry(self):
        assert invoke("suite", "--entry", "no-such-entry")[0] == 3

    def test_console_entry_point(self):
        done = subprocess.run([sys.executable, "-m", "probcorr.cli", "encode", "--entry", "r-step"],
                              capture_output=True, text=True, check=False)
        assert done.returncode == 0
        assert "new #C_C. #C_C!<>.0 | !#C_C().ok" in done.stdout


class TestCommands:
    def test_steps_lists_both_layers(self):
        code, text = invoke("steps", "--depth", "2", "--entry", "tau-steps")
        assert code == 0
        assert "1/8" in text and "7/8" in text
        for prob in ("3/40", "1/20", "21/40", "7/20"):
            assert prob in text

    def test_encode(self):
        code, text = invoke("encode", "--entry", "r-step")
        assert code == 0 and "new #C_C. #C_C!<>.0 | !#C_C().ok" in text

    def test_trace_tags_step_classes(self):
        code, text = invoke("trace", "--entry", "comm-basic")
        assert code == 0
        tags = [line.split(":")[0].strip() for line in text.splitlines() if "target" in line]
        assert tags == ["target A", "target B"]

    def test_records_are_byte_identical(self):
        argv = ("check", "weak-poc", "--entry", "comm-basic", "--format", "records")
        assert invoke(*argv) == invoke(*argv)

    def test_records_have_stable_keys(self):
        _, text = invoke("check", "weak-poc", "--entry", "tau-steps", "--format", "records")
        keys = {tuple(json.loads(line)) for line in text.splitlines()}
        assert len(keys) == 1


class TestParsing:
    def test_nil(self):
        assert pretty(ppi.Nil()) == "0"
        assert pretty(pccs.Inert()) == "0"

    def test_bad_selection(self):
        with pytest.raises(ParseError):
            parse_ppi("x!{1/2 1(): 0}")

    def test_error_position(self):
        with pytest.raises(ParseError, match="line 1, column 1"):
            parse_pccs("tau.(1/2: ok + 1/3: 0)")

    def test_duplicate_definition(self):
        with pytest.raises(ParseError):
            parse_pccs("def C() = ok\ndef C() = 0\nC<>")

    def test_duplicate_entry(self):
        with pytest.raises(ParseError):
            parse_corpus("=== a\nok\n=== a\n0\n")

    def test_reserved_names_are_not_source_names(self):
        with pytest.raises(ParseError):
            parse_pccs_process("'#t.(1: 0)")

    def test_shipped_corpus(self):
        entries = parse_corpus(default_corpus_text())
        assert len(entries) >= 20
        for entry in entries:
            again = parse_pccs(str(entry.program))
            assert again == entry.program, entry.name


@given(source_processes(with_calls=True))
def test_source_round_trip(proc):
    assert parse_pccs_process(pretty(proc)) == proc


@given(target_processes())
def test_target_round_trip(proc):
    assert ppi.alpha_equivalent(parse_ppi(pretty(proc)), proc)
