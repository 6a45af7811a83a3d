import math
import sys
from pathlib import Path

import numpy as np
import pytest
from scipy import integrate as scipy_integrate

# ensure project root is on sys.path so 'verificador_fgr' package can be imported
proj_root = Path(__file__).resolve().parents[1]
if str(proj_root) not in sys.path:
    sys.path.insert(0, str(proj_root))

from verificador_fgr import quadrature
from verificador_fgr.basisreduce import BasisCombo, BasisIntegral, Family, rule_instances
from verificador_fgr.errors import NonConvergence
from verificador_fgr.exprparse import parse_basis_expr
from verificador_fgr.funcalg import Monomial, Parity, Trig, basis_integrand, parity
from verificador_fgr.quadrature import QuadConfig, TStrategy, eval_combo, eval_monomial, eval_T, eval_T_prime


@pytest.fixture(scope="module")
def cfg():
    return QuadConfig()


def p(k):
    return basis_integrand(BasisIntegral(Family.P, k))


def test_p1_matches_closed_form(cfg):
    result = eval_monomial(p(1), cfg)
    assert result.value == pytest.approx(quadrature.p1_closed_form(), abs=1e-12)
    assert result.value == pytest.approx(math.pi / math.cosh(math.pi / 2), rel=1e-12)
    assert result.error_estimate < 1e-9


def test_p3_equals_p1(cfg):
    assert eval_monomial(p(3), cfg).value == pytest.approx(eval_monomial(p(1), cfg).value, abs=1e-12)


def test_empty_combo_is_zero(cfg):
    result = eval_combo(BasisCombo(), cfg)
    assert result.value == 0.0
    assert result.error_estimate == 0.0


def test_gamma_closed_form_value():
    assert quadrature.gamma_closed_form() == pytest.approx(math.pi / (math.sqrt(2) * math.cosh(math.pi / 2)), rel=1e-12)


def test_config_rejects_short_window():
    with pytest.raises(ValueError):
        QuadConfig(truncation_radius=10.0)
    with pytest.raises(ValueError):
        QuadConfig(abs_tol=0.0)


def test_odd_monomials_vanish(cfg):
    rng = np.random.default_rng(31)
    checked = 0
    while checked < 100:
        m = Monomial(sech_pow=int(rng.integers(1, 7)), tanh_pow=int(rng.integers(0, 2)),
                     x_pow=int(rng.integers(0, 3)), logsech_pow=int(rng.integers(0, 2)),
                     T_pow=int(rng.integers(0, 2)), Tprime_pow=int(rng.integers(0, 2)),
                     trig=list(Trig)[int(rng.integers(0, 3))])
        if parity(m) is not Parity.ODD:
            continue
        assert abs(eval_monomial(m, cfg).value) < cfg.abs_tol
        checked += 1


def test_T_is_even_and_decays(cfg):
    for value in (0.3, 1.7, 5.0, 12.5):
        assert eval_T(value, cfg).value == pytest.approx(eval_T(-value, cfg).value, abs=1e-14)
        assert eval_T_prime(value, cfg).value == pytest.approx(-eval_T_prime(-value, cfg).value, abs=1e-14)
    assert eval_T(30.0, cfg).value < 1e-9


def test_T_at_zero_is_positive_and_maximal(cfg):
    t0 = eval_T(0.0, cfg).value
    assert t0 > 0
    assert abs(eval_T_prime(0.0, cfg).value) < 1e-13
    assert all(eval_T(v, cfg).value < t0 for v in (0.5, 1.0, 3.0))


def _ode_residual(points, h, cfg):
    # max |T'' - 2T + 2 sqrt2 sech^2| by central differences
    tv = quadrature.t_values(np.concatenate([points - h, points, points + h]), cfg)
    tm, t0, tp = np.split(tv.T, 3)
    s = quadrature.sech_values(points)
    second = (tp - 2.0 * t0 + tm) / h ** 2
    return np.max(np.abs(second - (2.0 * t0 - 2.0 * math.sqrt(2.0) * s ** 2)))


@pytest.mark.parametrize("strategy", list(TStrategy))
def test_T_solves_its_ode(strategy):
    cfg = QuadConfig(T_strategy=strategy)
    rng = np.random.default_rng(37)
    points = rng.uniform(-10.0, 10.0, size=50)
    assert _ode_residual(points, 1e-3, cfg) < 1e-4


@pytest.mark.parametrize("strategy", [TStrategy.CONVOLUTION, TStrategy.INCOMPLETE_BETA])
def test_T_ode_residual_converges_at_second_order(strategy):
    # halving h must divide the central difference error by about four
    cfg = QuadConfig(T_strategy=strategy)
    points = np.random.default_rng(41).uniform(-5.0, 5.0, size=50)
    coarse = _ode_residual(points, 0.1, cfg)
    fine = _ode_residual(points, 0.05, cfg)
    assert math.log2(coarse / fine) >= 1.9


def test_T_strategies_agree():
    xs = np.linspace(-15.0, 15.0, 61)
    by_convolution = quadrature.t_values(xs, QuadConfig(T_strategy=TStrategy.CONVOLUTION))
    by_cache = quadrature.t_values(xs, QuadConfig(T_strategy=TStrategy.CONVOLUTION_CACHED))
    by_beta = quadrature.t_values(xs, QuadConfig(T_strategy=TStrategy.INCOMPLETE_BETA))
    np.testing.assert_allclose(by_convolution.T, by_beta.T, rtol=0, atol=1e-10)
    np.testing.assert_allclose(by_convolution.Tp, by_beta.Tp, rtol=0, atol=1e-10)
    np.testing.assert_allclose(by_convolution.T, by_cache.T, rtol=0, atol=1e-13)


def test_T_left_moment_limit():
    assert quadrature._left_moment(np.array([60.0]))[0] == pytest.approx(quadrature.t_limit_integral(), rel=1e-12)


def test_cache_is_reused():
    cfg = QuadConfig(T_strategy=TStrategy.CONVOLUTION_CACHED)
    xs = np.linspace(-3.0, 3.0, 7) + 0.123
    quadrature.t_values(xs, cfg)
    before = quadrature.T_CACHE.misses
    quadrature.t_values(xs, cfg)
    assert quadrature.T_CACHE.misses == before


def test_window_doubling_is_stable():
    narrow = QuadConfig(truncation_radius=40.0)
    wide = QuadConfig(truncation_radius=80.0)
    for b in (BasisIntegral(Family.Q, 3), BasisIntegral(Family.R, 1), BasisIntegral(Family.A, 5)):
        m = basis_integrand(b)
        a, c = eval_monomial(m, narrow), eval_monomial(m, wide)
        assert abs(a.value - c.value) <= max(a.error_estimate, c.error_estimate) + quadrature.tail_bound(40.0)


def test_agrees_with_adaptive_quadrature(cfg):
    def integrand(v):
        s = 1.0 / math.cosh(v)
        return s ** 3 * math.log(s) * math.cos(v)
    reference, _ = scipy_integrate.quad(integrand, -40.0, 40.0, limit=400, epsabs=1e-13)
    m = basis_integrand(BasisIntegral(Family.Q, 3))
    assert eval_monomial(m, cfg).value == pytest.approx(reference, abs=1e-10)


@pytest.mark.parametrize("k", [1, 3, 5, 7])
def test_every_rewrite_rule_is_numerically_sound(cfg, k):
    for rule in rule_instances(k):
        lhs = eval_monomial(basis_integrand(rule.lhs), cfg).value
        rhs = eval_combo(rule.rhs, cfg).value
        assert lhs == pytest.approx(rhs, abs=1e-8), rule.name


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6, 7])
def test_a_recurrence_numerically(cfg, k):
    rule = next(r for r in rule_instances(k) if r.name == "recurrence_a")
    lhs = eval_monomial(basis_integrand(rule.lhs), cfg).value
    assert lhs == pytest.approx(eval_combo(rule.rhs, cfg).value, abs=1e-8)


def test_reduced_core_values_numerically(cfg):
    for text, reduced in (("r3", "-r1 + s1 + sqrt2*p1"), ("s5", "-2/5*r1 + 1/15*s1 + 13/36*sqrt2*p1"),
                          ("q7", "13/18*q1 - 121/360*p1")):
        assert eval_combo(parse_basis_expr(text), cfg).value == pytest.approx(
            eval_combo(parse_basis_expr(reduced), cfg).value, abs=1e-8)


def test_direct_terms_sum_to_the_closed_form(cfg):
    total = sum(quadrature.eval_gamma_direct(i, cfg).value for i in (1, 2, 3, 4))
    assert total == pytest.approx(quadrature.gamma_closed_form(), abs=1e-8)


def test_direct_term_with_zero_resonance_is_zero(cfg):
    def silent(xs):
        return np.zeros_like(xs), np.zeros_like(xs)
    for i in (1, 2, 3, 4):
        assert quadrature.eval_gamma_direct(i, cfg, resonance=silent).value == 0.0


def test_non_convergence_is_reported():
    cfg = QuadConfig(max_refinement_depth=1)
    with pytest.raises(NonConvergence):
        quadrature.integrate(lambda xs: np.sign(xs - 0.3), cfg)
