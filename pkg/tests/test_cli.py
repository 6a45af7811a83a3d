import io
import json
import sys
from pathlib import Path

import pytest

# ensure project root is on sys.path so 'verificador_fgr' package can be imported
proj_root = Path(__file__).resolve().parents[1]
if str(proj_root) not in sys.path:
    sys.path.insert(0, str(proj_root))

from verificador_fgr import cli
from verificador_fgr.basisreduce import BasisCombo
from verificador_fgr.cli import Command, OutputFormat, RunConfig, build_parser, config_from_args, main, run
from verificador_fgr.errors import ExpressionSyntaxError, NonPositiveIndex, UnknownFamily
from verificador_fgr.exactfield import sqrt2
from verificador_fgr.logger import teardown_logging
from verificador_fgr.quadrature import TStrategy
from verificador_fgr.report import load_report, write_report


@pytest.fixture(autouse=True)
def reset_logging():
    yield
    teardown_logging()


def _run(cfg):
    stream = io.StringIO()
    code = run(cfg, stream)
    return code, stream.getvalue()


def test_parse_basis_expr_examples():
    c = cli.parse_basis_expr("2*sqrt2*b3 - b5")
    assert c == BasisCombo.of(("b", 3, sqrt2() * 2), ("b", 5, -1))
    assert cli.parse_basis_expr("sqrt2*(a5 - 2*a7)") == BasisCombo.of(("a", 5, sqrt2()), ("a", 7, sqrt2() * -2))
    assert cli.parse_basis_expr("p1 - p1").is_empty()


@pytest.mark.parametrize("text, error, position", [
    ("2*z9", UnknownFamily, 2),
    ("p1 + p0", NonPositiveIndex, 5),
    ("p1 +", ExpressionSyntaxError, 4),
    ("p1 $ q1", ExpressionSyntaxError, 3),
    ("p1*q1", ExpressionSyntaxError, 2),
])
def test_parse_errors_carry_position(text, error, position):
    with pytest.raises(error) as info:
        cli.parse_basis_expr(text)
    assert info.value.position == position


def test_exponent_is_capped():
    with pytest.raises(ExpressionSyntaxError) as info:
        cli.parse_basis_expr("log2^10000000*p1")
    assert info.value.position == 5
    assert cli.parse_basis_expr("log2^2*p1") == cli.parse_basis_expr("log2*log2*p1")
    assert cli.parse_basis_expr("sqrt2^16*p1") == BasisCombo.of(("p", 1, 256))


def test_reduce_prints_core_combination():
    code, out = _run(RunConfig(Command.REDUCE, "r3"))
    assert code == 0
    assert out.strip() == "-r1 + s1 + sqrt2*p1"


def test_reduce_of_even_index_adds_a_note():
    code, out = _run(RunConfig(Command.REDUCE, "p4"))
    assert code == 0
    assert "note:" in out


def test_reduce_json_output():
    code, out = _run(RunConfig(Command.REDUCE, "b1", output_format=OutputFormat.JSON))
    assert code == 0
    payload = json.loads(out)
    assert payload["text"] == "p1"
    assert payload["flags"] == []


def test_bad_expression_is_a_usage_error():
    code, _ = _run(RunConfig(Command.REDUCE, "2*z9"))
    assert code == 2


def test_eval_prints_value():
    code, out = _run(RunConfig(Command.EVAL, "p3 - p1"))
    assert code == 0
    assert "reduced: 0" in out


def test_verify_single_claim():
    code, out = _run(RunConfig(Command.VERIFY_CLAIM, "redp_5"))
    assert code == 0
    assert out.startswith("PASS: redp_5")


def test_unknown_claim_is_a_usage_error():
    code, _ = _run(RunConfig(Command.VERIFY_CLAIM, "gamma_999", numeric=False))
    assert code == 2


def test_run_config_needs_argument():
    with pytest.raises(ValueError):
        RunConfig(Command.REDUCE)
    with pytest.raises(ValueError):
        RunConfig(Command.LIST, tol=0.0)


def test_list_shows_every_claim():
    code, out = _run(RunConfig(Command.LIST, output_format=OutputFormat.JSON))
    assert code == 0
    ids = [entry["id"] for entry in json.loads(out)]
    assert len(ids) == 61
    assert "theorem_fgr" in ids


def test_json_report_roundtrip_is_byte_identical(tmp_path):
    first = tmp_path / "report.json"
    code, out = _run(RunConfig(Command.VERIFY_ALL, numeric=False, json_path=first))
    assert code == 0
    assert "VERDICT: PASS" in out
    second = write_report(load_report(first), tmp_path / "again.json")
    assert first.read_bytes() == second.read_bytes()

    code, out = _run(RunConfig(Command.REPORT, str(first)))
    assert code == 0
    assert "VERDICT: PASS" in out


def test_report_of_missing_file_is_a_usage_error(tmp_path):
    code, _ = _run(RunConfig(Command.REPORT, str(tmp_path / "missing.json")))
    assert code == 2


def test_flags_override_environment():
    args = build_parser().parse_args(["verify", "--tol", "1e-9", "--t-strategy", "incomplete_beta"])
    cfg = config_from_args(args, {"FGR_TOL": "1e-7", "FGR_PARALLEL": "yes", "FGR_T_STRATEGY": "convolution"})
    assert cfg.command is Command.VERIFY_ALL
    assert cfg.tol == 1e-9
    assert cfg.parallel is True
    assert cfg.t_strategy is TStrategy.INCOMPLETE_BETA


def test_environment_overrides_defaults():
    args = build_parser().parse_args(["verify", "redq_3"])
    cfg = config_from_args(args, {"FGR_NUMERIC": "0", "FGR_FORMAT": "json", "FGR_TRUNCATION": "50"})
    assert cfg.command is Command.VERIFY_CLAIM
    assert cfg.argument == "redq_3"
    assert cfg.numeric is False
    assert cfg.output_format is OutputFormat.JSON
    assert cfg.truncation == 50.0


def test_main_reads_environment(capsys):
    code = main(["list"], environ={"FGR_FORMAT": "json"})
    assert code == 0
    assert len(json.loads(capsys.readouterr().out)) == 61


def test_main_rejects_bad_environment():
    assert main(["list"], environ={"FGR_TOL": "small"}) == 2


def test_main_rejects_unknown_subcommand():
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"], environ={})
    assert info.value.code == 2
