"""
Reconstrução da constante de Fermi a partir das definições e
verificação de cada fórmula intermediária publicada.

Cada claim tem dois lados: o lado calculado (álgebra de funções +
reduções) e o lado publicado (fixture). A comparação exata é estrutural;
a numérica avalia ainda o integrando definidor, o que permite decidir
de que lado está um erro de transcrição.
"""
from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from . import quadrature
from .basisreduce import (BasisCombo, BasisIntegral, Family, eliminate_derived, flags,
                          reduce_a, reduce_full, reduce_p, reduce_q, reduce_rs)
from .constants import Constants
from .errors import AnomalyError, CancellationFailure, FixtureError
from .exactfield import FieldElem, inv_sqrt2, to_float
from .fixtures import default_fixtures, get_fixture
from .funcalg import (E, F, FuncExpr, G32, G32_factor, R1, R2, basis_integrand, delta1, delta2, h31, h31_cos,
                      h31_sin, h32, inner_product, phi3, xi31, xi32)
from .quadrature import QuadConfig, QuadResult, TStrategy
from .report import SuiteReport, VerificationReport

logger = logging.getLogger(__name__)

P1 = BasisIntegral(Family.P, 1)


@dataclass(frozen=True)
class Pairing:
    """⟨weight, resonance⟩, optionally without the null direction of h31."""
    weight: FuncExpr
    resonance: FuncExpr
    project_null: bool = False
    scale: Fraction = Fraction(1)

    def projected_weight(self) -> FuncExpr:
        w = self.weight.without_null_direction() if self.project_null else self.weight
        return w * self.scale

    def integrand(self) -> FuncExpr:
        return self.projected_weight() * self.resonance

    def combo(self) -> BasisCombo:
        return inner_product(self.projected_weight(), self.resonance)


def gamma_pairing(i: int) -> Pairing:
    """The i-th term of the constant as a single pairing."""
    if i == 1:
        return Pairing(delta1(), h31(), project_null=True)
    if i == 2:
        return Pairing(delta2(), h32(), scale=Fraction(2))
    if i == 3:
        return Pairing(G32_factor() * G32(), h31(), project_null=True, scale=Fraction(1, 2))
    if i == 4:
        return Pairing(E(), h31(), project_null=True, scale=Fraction(-2))
    raise ValueError(f"the constant has four terms, got {i}")


def _check_anomaly(label: str, c: BasisCombo) -> BasisCombo:
    if c.max_l_degree() >= 2:
        raise AnomalyError(f"{label}: coefficient of log2-degree {c.max_l_degree()} in {c}")
    return c


@lru_cache(maxsize=None)
def build_gamma(i: int) -> BasisCombo:
    out = _check_anomaly(f"gamma_{i}", gamma_pairing(i).combo())
    logger.debug("gamma_%d has %d basis terms", i, len(out))
    return out


def gamma_raw_total() -> BasisCombo:
    return sum((build_gamma(i) for i in (1, 2, 3, 4)), BasisCombo())


def gamma_symbolic() -> BasisCombo:
    """Reduce the constant to core bases; anything but (1/sqrt2)*p1 is a failure."""
    core_combo = reduce_full(gamma_raw_total())
    expected = BasisCombo.single(P1, inv_sqrt2())
    if core_combo != expected:
        raise CancellationFailure(core_combo - expected)
    logger.info("cancellation verified: Gamma = %s", core_combo)
    return core_combo


def core_coefficients() -> Dict[BasisIntegral, List[Tuple[BasisIntegral, FieldElem]]]:
    """
    Contribution of every term of the derived-free constant to each core basis.

    The contributions to q1, a1, r1 and s1 sum to zero, the ones to p1 to 1/sqrt2.
    """
    table: Dict[BasisIntegral, List[Tuple[BasisIntegral, FieldElem]]] = {}
    for b, coeff in eliminate_derived(gamma_raw_total()).items():
        for target, value in reduce_full(BasisCombo.single(b, coeff)).items():
            table.setdefault(target, []).append((b, value))
    return table


# the sub-pairings the published expansion is split into

@lru_cache(maxsize=None)
def subclaim_pairings() -> Dict[str, Pairing]:
    phi, xi1, xi2 = phi3(), xi31(), xi32()
    cos_half, sin_half = h31_cos(), h31_sin()
    f31 = F() * xi1 * xi1 * 3
    f32 = -(F() * xi2 * xi2)
    pure = phi * xi1 * xi1
    r1_part = phi * xi1 * R1() * 6
    r2_part = -(phi * xi2 * R2() * 2)
    half_g32 = G32() * Fraction(1, 2)
    minus_2e = E() * -2
    pairs = {}
    for name, weight in (("11", f31), ("12", f32), ("13", pure), ("14", r1_part), ("15", r2_part)):
        pairs[f"gamma_{name}1"] = Pairing(weight, cos_half, project_null=True)
        pairs[f"gamma_{name}2"] = Pairing(weight, sin_half, project_null=True)
    pairs["gamma_21"] = Pairing(F() * xi1 * xi2 * 2, h32())
    pairs["gamma_22"] = Pairing(phi * R1() * xi2 * 2, h32())
    pairs["gamma_23"] = Pairing(phi * xi1 * R2() * 2, h32())
    weight3 = G32_factor()
    pairs["gamma_31"] = Pairing(weight3.filter(lambda m: m.x_pow > 0) * half_g32, h31(), project_null=True)
    pairs["gamma_32"] = Pairing(weight3.filter(lambda m: m.x_pow == 0) * half_g32, h31(), project_null=True)
    pairs["gamma_42"] = Pairing(minus_2e.filter(lambda m: m.logsech_pow > 0), h31(), project_null=True)
    pairs["gamma_43"] = Pairing(minus_2e.filter(lambda m: m.x_pow > 0), h31(), project_null=True)
    return pairs


# computed side and defining integrand of every claim

Computation = Callable[[], BasisCombo]
Direct = Callable[[QuadConfig], QuadResult]


@dataclass(frozen=True)
class ClaimComputation:
    compute: Computation
    direct: Direct


def _direct_sum(indices: Iterable[int]) -> Direct:
    indices = tuple(indices)

    def direct(cfg: QuadConfig) -> QuadResult:
        total = QuadResult(0.0, 0.0, 0)
        for i in indices:
            total = total + quadrature.eval_gamma_direct(i, cfg)
        return total
    return direct


def _direct_basis(b: BasisIntegral) -> Direct:
    return lambda cfg: quadrature.eval_monomial(basis_integrand(b), cfg)


def _direct_pairing(name: str) -> Direct:
    return lambda cfg: quadrature.eval_funcexpr(subclaim_pairings()[name].integrand(), cfg)


@lru_cache(maxsize=1)
def claim_table() -> Dict[str, ClaimComputation]:
    table: Dict[str, ClaimComputation] = {}
    for name in subclaim_pairings():
        table[name] = ClaimComputation(lambda name=name: subclaim_pairings()[name].combo(), _direct_pairing(name))
    for i in (1, 2, 3, 4):
        table[f"lemma_gamma{i}"] = ClaimComputation(lambda i=i: build_gamma(i), _direct_sum([i]))
        table[f"eq_gam{i}"] = ClaimComputation(lambda i=i: eliminate_derived(build_gamma(i)), _direct_sum([i]))
    table["prop_1st"] = ClaimComputation(lambda: eliminate_derived(gamma_raw_total()), _direct_sum([1, 2, 3, 4]))
    table["theorem_fgr"] = ClaimComputation(gamma_symbolic, _direct_sum([1, 2, 3, 4]))
    for k in (1, 3, 5, 7):
        for letter in "bcdef":
            lhs = BasisIntegral(Family(letter), k)
            table[f"red001_{letter}_{k}"] = ClaimComputation(
                lambda lhs=lhs: eliminate_derived(BasisCombo.single(lhs)), _direct_basis(lhs))
    stages = {"redp": (Family.P, reduce_p), "redq": (Family.Q, reduce_q), "reda": (Family.A, reduce_a)}
    for k in (3, 5, 7):
        for prefix, (family, stage) in stages.items():
            lhs = BasisIntegral(family, k)
            table[f"{prefix}_{k}"] = ClaimComputation(
                lambda lhs=lhs, stage=stage: stage(BasisCombo.single(lhs)), _direct_basis(lhs))
        for family in (Family.R, Family.S):
            if family is Family.S and k == 7:
                continue
            lhs = BasisIntegral(family, k)
            table[f"redsr_{family.value}{k}"] = ClaimComputation(
                lambda lhs=lhs: reduce_rs(BasisCombo.single(lhs)), _direct_basis(lhs))
    return table


def _adjudicate(computed: float, expected: float, direct: Optional[float], tol: float) -> str:
    if direct is None:
        return "undecided"
    computed_ok = abs(computed - direct) < tol
    expected_ok = abs(expected - direct) < tol
    if computed_ok and not expected_ok:
        return "fixture_typo"
    if expected_ok and not computed_ok:
        return "computation_error"
    return "undecided"


def verify_claim(claim_id: str, cfg: Optional[QuadConfig] = None, numeric: bool = True,
                 numeric_tol: float = Constants.NUMERIC_TOL) -> VerificationReport:
    """Check one published formula against its recomputation."""
    started = time.perf_counter()
    fixture = get_fixture(claim_id)
    computation = claim_table().get(claim_id)
    if computation is None:
        raise FixtureError(f"claim {claim_id} has no computation attached")
    cfg = cfg or QuadConfig()

    computed = _check_anomaly(claim_id, computation.compute())
    residual = computed - fixture.expected
    exact = residual.is_empty()
    if exact:
        adjudication = "exact"
    elif reduce_full(residual).is_empty():
        adjudication = "equivalent_after_reduction"
    else:
        adjudication = "undecided"

    report = VerificationReport(claim_id=claim_id, stage=fixture.stage.value, exact_match=exact,
                                symbolic_residual=residual, adjudication=adjudication,
                                flags=flags(computed) if fixture.stage.value == "core" else [])

    if numeric:
        q_computed = quadrature.eval_combo(computed, cfg)
        q_expected = quadrature.eval_combo(fixture.expected, cfg)
        q_direct = computation.direct(cfg)
        report.numeric_residual = abs(q_computed.value - q_expected.value)
        report.direct_residual = abs(q_computed.value - q_direct.value)
        report.quadrature_error_estimate = (q_computed.error_estimate + q_expected.error_estimate
                                            + q_direct.error_estimate)
        if not exact and adjudication == "undecided":
            report.adjudication = _adjudicate(q_computed.value, q_expected.value, q_direct.value, numeric_tol)

    report.elapsed = time.perf_counter() - started
    if report.passed(numeric_tol):
        logger.info("%s verified", claim_id)
    else:
        logger.warning("%s FAILED: residual %s (%s)", claim_id, residual, report.adjudication)
    return report


@dataclass(frozen=True)
class GammaNumeric:
    value: float
    p1: float
    closed_form: float
    difference: float
    error_estimate: float
    direct: Optional[float] = None


def gamma_numeric(cfg: Optional[QuadConfig] = None, precision: int = Constants.DEFAULT_PRECISION,
                  with_direct: bool = False) -> GammaNumeric:
    cfg = cfg or QuadConfig()
    p1 = quadrature.eval_monomial(basis_integrand(P1), cfg)
    factor = float(to_float(inv_sqrt2(), precision))
    value = factor * p1.value
    closed = quadrature.gamma_closed_form()
    direct = _direct_sum([1, 2, 3, 4])(cfg).value if with_direct else None
    return GammaNumeric(value, p1.value, closed, abs(value - closed), factor * p1.error_estimate, direct)


@dataclass(frozen=True)
class C0Numeric:
    value: float
    pairing: float
    pairing_check: float
    difference: float

    @property
    def consistent(self) -> bool:
        return self.difference < Constants.KERNEL_TOL


def c0_numeric(cfg: Optional[QuadConfig] = None) -> C0Numeric:
    """c0 = 1/4 + (1/(32 sqrt2)) ⟨phi3^2, T⟩, with T by convolution and by the beta closed form."""
    cfg = cfg or QuadConfig()

    def pairing(strategy: TStrategy) -> float:
        sub = cfg.with_strategy(strategy)

        def func(xs):
            s = quadrature.sech_values(xs)
            return 2.0 * s * s * quadrature.t_values(xs, sub).T
        return quadrature.eval_function(func, sub, label=f"c0 [{strategy.value}]").value

    main = pairing(cfg.T_strategy if cfg.T_strategy is not TStrategy.INCOMPLETE_BETA
                   else TStrategy.CONVOLUTION_CACHED)
    check = pairing(TStrategy.INCOMPLETE_BETA)
    value = 0.25 + main / (32.0 * quadrature.SQRT2)
    return C0Numeric(value, main, check, abs(main - check))


def _gamma_summary(cfg: QuadConfig, numeric: bool) -> Dict:
    summary: Dict = {}
    try:
        symbolic = gamma_symbolic()
        summary["cancellation"] = True
    except CancellationFailure as exc:
        symbolic = exc.residual
        summary["cancellation"] = False
    summary["symbolic"] = symbolic.render()
    if numeric:
        g = gamma_numeric(cfg, with_direct=True)
        c0 = c0_numeric(cfg)
        summary.update({
            "numeric": g.value,
            "p1": g.p1,
            "closed_form": g.closed_form,
            "difference": g.difference,
            "direct": g.direct,
            "c0": c0.value,
            "c0_kernel_difference": c0.difference,
        })
    return summary


def verify_all(cfg: Optional[QuadConfig] = None, parallel: bool = False, numeric: bool = True,
               ids: Optional[Iterable[str]] = None, numeric_tol: float = Constants.NUMERIC_TOL) -> SuiteReport:
    """Verify every fixture; results are ordered by claim id whatever the scheduling."""
    started = time.perf_counter()
    cfg = cfg or QuadConfig()
    claim_ids = sorted(ids if ids is not None else default_fixtures())
    # T samples from an earlier run are dropped so the cache stays bounded by one suite
    logger.debug("clearing T cache (%d entries)", len(quadrature.T_CACHE))
    quadrature.T_CACHE.clear()
    # warm the shared caches before fanning out
    gamma_raw_total()
    claim_table()

    def run(claim_id: str) -> VerificationReport:
        return verify_claim(claim_id, cfg, numeric=numeric, numeric_tol=numeric_tol)

    if parallel:
        with ThreadPoolExecutor() as pool:
            reports = list(pool.map(run, claim_ids))
    else:
        reports = [run(claim_id) for claim_id in claim_ids]

    suite = SuiteReport(
        claims=sorted(reports, key=lambda r: r.claim_id),
        gamma=_gamma_summary(cfg, numeric),
        config={
            "abs_tol": cfg.abs_tol,
            "truncation_radius": cfg.truncation_radius,
            "T_strategy": cfg.T_strategy.value,
            "numeric": numeric,
            "numeric_tol": numeric_tol,
        },
    )
    suite.elapsed = time.perf_counter() - started
    logger.info("verified %d claims, %d failed", len(reports), suite.fail_count)
    return suite
