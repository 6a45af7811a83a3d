import json
import math
import sys
from pathlib import Path

import numpy as np
import pytest

# ensure project root is on sys.path so 'verificador_fgr' package can be imported
proj_root = Path(__file__).resolve().parents[1]
if str(proj_root) not in sys.path:
    sys.path.insert(0, str(proj_root))

from verificador_fgr import paperpipeline, quadrature
from verificador_fgr.basisreduce import BasisCombo, BasisIntegral, Family, eliminate_derived
from verificador_fgr.errors import CancellationFailure, FixtureError, UnknownClaim
from verificador_fgr.exactfield import FieldElem, inv_sqrt2
from verificador_fgr.exprparse import parse_basis_expr
from verificador_fgr.fixtures import ClaimFixture, Stage, default_fixtures, get_fixture, load_fixtures
from verificador_fgr.funcalg import FuncExpr, h31
from verificador_fgr.paperpipeline import Pairing, build_gamma, gamma_symbolic, verify_all, verify_claim
from verificador_fgr.quadrature import QuadConfig, TStrategy, TValues
from verificador_fgr.report import strip_timing


@pytest.fixture(scope="module")
def symbolic_suites():
    sequential = verify_all(numeric=False)
    parallel = verify_all(numeric=False, parallel=True)
    return sequential, parallel


def test_suite_starts_from_an_empty_T_cache():
    quadrature.t_values(np.linspace(-2.0, 2.0, 5) + 0.017, QuadConfig(T_strategy=TStrategy.CONVOLUTION_CACHED))
    assert len(quadrature.T_CACHE) > 0
    suite = verify_all(numeric=False, ids=["redp_3"])
    assert suite.passed
    assert len(quadrature.T_CACHE) == 0


def test_fixture_file_loads():
    fixtures = default_fixtures()
    assert len(fixtures) == 61
    assert get_fixture("theorem_fgr").stage is Stage.CORE
    assert get_fixture("gamma_111").stage is Stage.RAW


def test_fourth_term_matches_its_published_form():
    assert build_gamma(4) == get_fixture("lemma_gamma4").expected
    assert eliminate_derived(build_gamma(4)) == parse_basis_expr("sqrt2*(q1 - q3 + a1 - 2*a3)")


def test_third_term_matches_its_published_form():
    assert build_gamma(3) == get_fixture("lemma_gamma3").expected
    expected = parse_basis_expr("sqrt2*(-33/2*p3 + 127/2*p5 - 47*p7 + 18*a3 - 84*a5 + 72*a7)")
    assert eliminate_derived(build_gamma(3)) == expected


def test_total_cancels_to_p1_over_sqrt2():
    assert gamma_symbolic() == BasisCombo.single(BasisIntegral(Family.P, 1), inv_sqrt2())


def test_core_contributions_cancel():
    table = paperpipeline.core_coefficients()
    for letter in "qars":
        target = BasisIntegral(Family(letter), 1)
        contributions = table.get(target, [])
        assert sum((value for _, value in contributions), FieldElem()).is_zero()
    p1 = table[BasisIntegral(Family.P, 1)]
    assert sum((value for _, value in p1), FieldElem()) == inv_sqrt2()
    assert len(table[BasisIntegral(Family.Q, 1)]) == 4


def test_cancellation_failure_is_reported(monkeypatch):
    monkeypatch.setattr(paperpipeline, "gamma_raw_total", lambda: parse_basis_expr("p1 + q1"))
    with pytest.raises(CancellationFailure) as info:
        gamma_symbolic()
    assert not info.value.residual.is_empty()


def test_subclaims_add_up_to_their_lemmas():
    pairs = paperpipeline.subclaim_pairings()
    first = sum((pairs[f"gamma_1{j}{half}"].combo() for j in range(1, 6) for half in (1, 2)), BasisCombo())
    assert first == build_gamma(1)
    second = sum((pairs[name].combo() for name in ("gamma_21", "gamma_22", "gamma_23")), BasisCombo())
    assert second == build_gamma(2)
    third = pairs["gamma_31"].combo() + pairs["gamma_32"].combo()
    assert third == build_gamma(3)


def test_zero_weight_pairing_is_empty():
    assert Pairing(FuncExpr.zero(), h31(), project_null=True).combo().is_empty()


def test_every_fixture_matches_exactly(symbolic_suites):
    sequential, _ = symbolic_suites
    assert len(sequential.claims) == 61
    mismatched = [r.claim_id for r in sequential.claims if not r.exact_match]
    assert mismatched == []
    assert sequential.passed
    assert sequential.gamma["cancellation"] is True


def test_parallel_run_gives_the_same_report(symbolic_suites):
    sequential, parallel = symbolic_suites
    assert strip_timing(sequential.to_dict()) == strip_timing(parallel.to_dict())
    ids = [r.claim_id for r in parallel.claims]
    assert ids == sorted(ids)


def test_single_claim_numerically():
    report = verify_claim("redsr_r3")
    assert report.exact_match
    assert report.numeric_residual < 1e-8
    assert report.direct_residual < 1e-8
    assert report.passed()


def test_first_order_combination_numerically():
    report = verify_claim("prop_1st")
    assert report.passed()
    assert report.direct_residual < 1e-8


def test_unknown_claim():
    with pytest.raises(UnknownClaim):
        verify_claim("gamma_999", numeric=False)


def _patched_fixture(monkeypatch, claim_id, expected):
    original = get_fixture(claim_id)
    fixture = ClaimFixture(claim_id, parse_basis_expr(expected), original.stage, original.source, expected)
    monkeypatch.setattr(paperpipeline, "get_fixture", lambda _: fixture)


def test_equivalent_fixture_is_flagged_not_exact(monkeypatch):
    _patched_fixture(monkeypatch, "red001_b_1", "p1")
    report = verify_claim("red001_b_1", numeric=False)
    assert not report.exact_match
    assert report.adjudication == "equivalent_after_reduction"
    assert not report.passed()


def test_fixture_typo_is_adjudicated(monkeypatch):
    _patched_fixture(monkeypatch, "red001_b_1", "2*p3 - p1 + p5")
    report = verify_claim("red001_b_1")
    assert report.symbolic_residual == parse_basis_expr("-p5")
    assert report.adjudication == "fixture_typo"


def test_gamma_numeric():
    g = paperpipeline.gamma_numeric()
    assert g.difference < 1e-10
    assert g.value == pytest.approx(math.pi / (math.sqrt(2) * math.cosh(math.pi / 2)), abs=1e-10)
    assert g.p1 == pytest.approx(quadrature.p1_closed_form(), abs=1e-12)


def test_c0_kernels_agree():
    c0 = paperpipeline.c0_numeric()
    assert c0.consistent
    assert c0.value > 0.25


def test_c0_without_kernel_is_one_quarter(monkeypatch):
    def no_kernel(xs, cfg):
        zeros = np.zeros_like(np.asarray(xs, dtype=float))
        return TValues(zeros, zeros, zeros, zeros)
    monkeypatch.setattr(quadrature, "t_values", no_kernel)
    c0 = paperpipeline.c0_numeric(QuadConfig())
    assert c0.value == 0.25
    assert c0.difference == 0.0


def _write_fixture_file(path, payload):
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


def test_fixture_loader_rejects_duplicate_ids(tmp_path):
    claim = {"id": "x", "stage": "raw", "expected": "p1"}
    path = _write_fixture_file(tmp_path / "claims.json", {"version": 1, "claims": [claim, claim]})
    with pytest.raises(FixtureError):
        load_fixtures(path)


def test_fixture_loader_rejects_duplicate_keys(tmp_path):
    path = tmp_path / "claims.json"
    path.write_text('{"version": 1, "version": 1, "claims": []}', encoding="utf-8")
    with pytest.raises(FixtureError):
        load_fixtures(path)


def test_fixture_loader_rejects_bad_version_and_expression(tmp_path):
    path = _write_fixture_file(tmp_path / "v2.json", {"version": 2, "claims": []})
    with pytest.raises(FixtureError):
        load_fixtures(path)
    path = _write_fixture_file(tmp_path / "bad.json",
                               {"version": 1, "claims": [{"id": "x", "stage": "raw", "expected": "p0 + q1"}]})
    with pytest.raises(FixtureError):
        load_fixtures(path)
    with pytest.raises(FixtureError):
        load_fixtures(tmp_path / "missing.json")


def test_fixture_loader_keeps_file_order(tmp_path):
    claims = [{"id": name, "stage": "core", "expected": "p1"} for name in ("z", "a", "m")]
    path = _write_fixture_file(tmp_path / "claims.json", {"version": 1, "claims": claims})
    assert list(load_fixtures(path)) == ["z", "a", "m"]
