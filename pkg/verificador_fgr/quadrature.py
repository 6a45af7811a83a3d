"""
Avaliação numérica das integrais de base e do núcleo T.

O integrador é Gauss-Legendre composto sobre [-X, X], com refinamento
por duplicação de painéis até que duas estimativas sucessivas concordem
dentro de abs_tol. Fora da janela todos os integrandos decaem como
e^{-|x|}, e QuadConfig recusa janelas cuja cauda exceda abs_tol/10.

T(x) = ∫ e^{-√2|x-y|} sech²(y) dy é obtido por três caminhos:
convolução direta, convolução com cache por nó e forma fechada via
função beta incompleta.
"""
from __future__ import annotations

import logging
import math
import threading
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Callable, Dict, NamedTuple, Optional, Tuple

import numpy as np
from scipy.special import beta, betainc, expit, roots_legendre

from .basisreduce import BasisCombo
from .constants import Constants
from .errors import NonConvergence
from .exactfield import to_float
from .funcalg import FuncExpr, Monomial, basis_integrand, log_sech_values, sech_values

logger = logging.getLogger(__name__)

EPS = float(np.finfo(float).eps)
SQRT2 = math.sqrt(2.0)


class TStrategy(Enum):
    CONVOLUTION = "convolution"
    CONVOLUTION_CACHED = "convolution_cached"
    INCOMPLETE_BETA = "incomplete_beta"


@dataclass(frozen=True)
class QuadConfig:
    """
    Parameters of every numeric evaluation.

    Parameters
    ----------
    abs_tol : float
        Target absolute error of one integral.
    truncation_radius : float
        X, the integration window is [-X, X].
    max_refinement_depth : int
        Number of panel doublings before giving up.
    T_strategy : TStrategy
        How T and T' are evaluated at the quadrature nodes.
    gauss_order : int
        Nodes per panel.
    panel_width : float
        Width of the panels at depth 0.
    """
    abs_tol: float = Constants.DEFAULT_TOL
    truncation_radius: float = Constants.DEFAULT_TRUNCATION
    max_refinement_depth: int = Constants.MAX_REFINEMENT_DEPTH
    T_strategy: TStrategy = TStrategy.CONVOLUTION_CACHED
    gauss_order: int = Constants.GAUSS_ORDER
    panel_width: float = Constants.PANEL_WIDTH

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol}")
        if not self.truncation_radius > 0:
            raise ValueError(f"truncation_radius must be positive, got {self.truncation_radius}")
        if self.max_refinement_depth < 1:
            raise ValueError("max_refinement_depth must be at least 1")
        if self.gauss_order < 2 or not self.panel_width > 0:
            raise ValueError("gauss_order must be >= 2 and panel_width positive")
        if not isinstance(self.T_strategy, TStrategy):
            object.__setattr__(self, "T_strategy", TStrategy(self.T_strategy))
        if tail_bound(self.truncation_radius) >= self.abs_tol / 10:
            raise ValueError(
                f"truncation radius {self.truncation_radius} leaves a tail of "
                f"{tail_bound(self.truncation_radius):.2e}, above abs_tol/10 = {self.abs_tol / 10:.2e}")

    def with_strategy(self, strategy: TStrategy) -> "QuadConfig":
        return replace(self, T_strategy=strategy)


def tail_bound(radius: float) -> float:
    """Bound on ∫_{|x|>X} of an integrand dominated by (1+|x|)·sech(x)."""
    return 4.0 * (radius + 1.0) * math.exp(-radius)


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_estimate: float
    evaluations: int

    def __add__(self, other: "QuadResult") -> "QuadResult":
        return QuadResult(self.value + other.value, self.error_estimate + other.error_estimate,
                          self.evaluations + other.evaluations)

    def scaled(self, factor: float) -> "QuadResult":
        return QuadResult(factor * self.value, abs(factor) * self.error_estimate, self.evaluations)


class TValues(NamedTuple):
    T: np.ndarray
    Tp: np.ndarray
    T_err: np.ndarray
    Tp_err: np.ndarray


# quadrature rule

@lru_cache(maxsize=None)
def _gauss_rule(order: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = roots_legendre(order)
    # exact mirror symmetry keeps odd integrands at exactly zero
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    return nodes, weights


def composite_nodes(lower: float, upper: float, panels: int, order: int) -> Tuple[np.ndarray, np.ndarray]:
    nodes, weights = _gauss_rule(order)
    h = (upper - lower) / panels
    mid = 0.5 * (lower + upper)
    centers = mid + h * (np.arange(panels) - 0.5 * (panels - 1))
    xs = (centers[:, None] + 0.5 * h * nodes[None, :]).ravel()
    ws = np.tile(0.5 * h * weights, panels)
    return xs, ws


Integrand = Callable[[np.ndarray], np.ndarray]


def integrate(func: Integrand, cfg: QuadConfig, lower: Optional[float] = None, upper: Optional[float] = None,
              pointwise_error: Optional[Integrand] = None, label: str = "integrand") -> QuadResult:
    """
    Integrate a vectorized ``func`` by composite Gauss-Legendre with panel doubling.

    The error estimate is the larger of the last difference and a roundoff
    floor of 50·eps·Σ|w·f|, plus Σ w·|pointwise_error| when given.
    """
    lower = -cfg.truncation_radius if lower is None else lower
    upper = cfg.truncation_radius if upper is None else upper
    panels = max(1, int(math.ceil((upper - lower) / cfg.panel_width)))

    xs, ws = composite_nodes(lower, upper, panels, cfg.gauss_order)
    previous = float(np.dot(ws, func(xs)))
    evaluations = xs.size
    difference = float("inf")
    for depth in range(1, cfg.max_refinement_depth + 1):
        panels *= 2
        xs, ws = composite_nodes(lower, upper, panels, cfg.gauss_order)
        values = func(xs)
        current = float(np.dot(ws, values))
        evaluations += xs.size
        difference = abs(current - previous)
        if difference <= cfg.abs_tol:
            floor = Constants.ROUNDOFF_FACTOR * EPS * float(np.dot(ws, np.abs(values)))
            estimate = max(difference, floor)
            if pointwise_error is not None:
                estimate += float(np.dot(ws, np.abs(pointwise_error(xs))))
            return QuadResult(current, estimate, evaluations)
        logger.debug("%s: depth %d, difference %.3e", label, depth, difference)
        previous = current
    raise NonConvergence(f"quadrature of {label} did not converge", difference, cfg.max_refinement_depth)


# the kernel T

_BETA_C = 1.0 + 1.0 / SQRT2
_BETA_SCALE = 2.0 * beta(_BETA_C, 2.0 - _BETA_C)


def _left_moment(x: np.ndarray) -> np.ndarray:
    """∫_{-∞}^x e^{√2y} sech²(y) dy as a regularized incomplete beta function."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    left = x <= 0
    out[left] = _BETA_SCALE * betainc(_BETA_C, 2.0 - _BETA_C, expit(2.0 * x[left]))
    right = ~left
    out[right] = _BETA_SCALE * (1.0 - betainc(2.0 - _BETA_C, _BETA_C, expit(-2.0 * x[right])))
    return out


def _t_incomplete_beta(xs: np.ndarray) -> TValues:
    xs = np.asarray(xs, dtype=float)
    below = np.exp(-SQRT2 * xs) * _left_moment(xs)
    above = np.exp(SQRT2 * xs) * _left_moment(-xs)
    T = below + above
    Tp = SQRT2 * (above - below)
    err = 32.0 * EPS * (np.abs(below) + np.abs(above))
    return TValues(T, Tp, err, SQRT2 * err)


def _kernel_sums(xs: np.ndarray, radius: float, panels: int, order: int,
                 chunk: int = 256) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    # T(x) = ∫_0^U e^{-√2u} [sech²(x-u) + sech²(x+u)] du, smooth in u
    u, w = composite_nodes(0.0, radius, panels, order)
    g = w * np.exp(-SQRT2 * u)
    T = np.empty_like(xs)
    Tp = np.empty_like(xs)
    mag = np.empty_like(xs)
    for start in range(0, xs.size, chunk):
        xc = xs[start:start + chunk, None]
        minus = xc - u[None, :]
        plus = xc + u[None, :]
        s2m = sech_values(minus) ** 2
        s2p = sech_values(plus) ** 2
        kernel = s2m + s2p
        dkernel = -2.0 * (s2m * np.tanh(minus) + s2p * np.tanh(plus))
        T[start:start + chunk] = kernel @ g
        Tp[start:start + chunk] = dkernel @ g
        mag[start:start + chunk] = (kernel + np.abs(dkernel)) @ g
    return T, Tp, mag


def _t_convolution(xs: np.ndarray, cfg: QuadConfig) -> TValues:
    xs = np.asarray(xs, dtype=float)
    radius = cfg.truncation_radius
    panels = max(1, int(math.ceil(radius / cfg.panel_width)))
    target = cfg.abs_tol / 10
    T0, Tp0, _ = _kernel_sums(xs, radius, panels, cfg.gauss_order)
    worst = float("inf")
    for depth in range(1, cfg.max_refinement_depth + 1):
        panels *= 2
        T1, Tp1, mag = _kernel_sums(xs, radius, panels, cfg.gauss_order)
        dT = np.abs(T1 - T0)
        dTp = np.abs(Tp1 - Tp0)
        worst = float(max(dT.max(initial=0.0), dTp.max(initial=0.0)))
        if worst <= target:
            floor = Constants.ROUNDOFF_FACTOR * EPS * mag
            return TValues(T1, Tp1, dT + floor, dTp + floor)
        T0, Tp0 = T1, Tp1
    raise NonConvergence("convolution for T did not converge", worst, cfg.max_refinement_depth)


class TCache:
    """Per-node memo of T, T' and their errors, shared across threads."""

    def __init__(self):
        self._lock = threading.Lock()
        self._store: Dict[Tuple, Dict[float, Tuple[float, float, float, float]]] = {}
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key(cfg: QuadConfig) -> Tuple:
        return (cfg.truncation_radius, cfg.abs_tol, cfg.gauss_order, cfg.panel_width, cfg.max_refinement_depth)

    def values(self, xs: np.ndarray, cfg: QuadConfig) -> TValues:
        xs = np.asarray(xs, dtype=float)
        key = self.key(cfg)
        with self._lock:
            table = self._store.setdefault(key, {})
            found = [table.get(float(v)) for v in xs]
        missing = np.array([i for i, entry in enumerate(found) if entry is None], dtype=int)
        if missing.size:
            fresh = _t_convolution(xs[missing], cfg)
            with self._lock:
                for j, i in enumerate(missing):
                    entry = (float(fresh.T[j]), float(fresh.Tp[j]), float(fresh.T_err[j]), float(fresh.Tp_err[j]))
                    table[float(xs[i])] = entry
                    found[i] = entry
                self.misses += int(missing.size)
                self.hits += int(xs.size - missing.size)
        else:
            with self._lock:
                self.hits += int(xs.size)
        arr = np.array(found, dtype=float).reshape(-1, 4)
        return TValues(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3])

    def clear(self) -> None:
        with self._lock:
            self._store.clear()
            self.hits = 0
            self.misses = 0

    def __len__(self) -> int:
        with self._lock:
            return sum(len(t) for t in self._store.values())


T_CACHE = TCache()


def t_values(xs: np.ndarray, cfg: QuadConfig) -> TValues:
    """T and T' at every point of ``xs``, with pointwise error bounds."""
    xs = np.asarray(xs, dtype=float)
    if cfg.T_strategy is TStrategy.INCOMPLETE_BETA:
        return _t_incomplete_beta(xs)
    if cfg.T_strategy is TStrategy.CONVOLUTION_CACHED:
        return T_CACHE.values(xs, cfg)
    return _t_convolution(xs, cfg)


def eval_T(x: float, cfg: QuadConfig) -> QuadResult:
    tv = t_values(np.array([float(x)]), cfg)
    return QuadResult(float(tv.T[0]), float(tv.T_err[0]), 1)


def eval_T_prime(x: float, cfg: QuadConfig) -> QuadResult:
    tv = t_values(np.array([float(x)]), cfg)
    return QuadResult(float(tv.Tp[0]), float(tv.Tp_err[0]), 1)


def t_limit_integral() -> float:
    """∫ e^{√2y} sech²(y) dy over the whole line, √2π/sin(π/√2)."""
    return SQRT2 * math.pi / math.sin(math.pi / SQRT2)


# integrals of symbolic expressions

TIntegrand = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


def integrate_with_T(func: TIntegrand, cfg: QuadConfig, needs_T: bool = True, label: str = "integrand") -> QuadResult:
    """
    Integrate ``func(x, T, T')``, assumed affine in (T, T').

    The errors of T and T' are propagated to first order.
    """
    if not needs_T:
        return integrate(lambda xs: func(xs, np.zeros_like(xs), np.zeros_like(xs)), cfg, label=label)

    def integrand(xs):
        tv = t_values(xs, cfg)
        return func(xs, tv.T, tv.Tp)

    def propagated(xs):
        tv = t_values(xs, cfg)
        base = func(xs, tv.T, tv.Tp)
        return (np.abs(func(xs, tv.T + tv.T_err, tv.Tp) - base)
                + np.abs(func(xs, tv.T, tv.Tp + tv.Tp_err) - base))

    return integrate(integrand, cfg, pointwise_error=propagated, label=label)


@lru_cache(maxsize=4096)
def eval_monomial(m: Monomial, cfg: QuadConfig) -> QuadResult:
    return integrate_with_T(m.evaluate, cfg, needs_T=m.needs_T(), label=m.render())


def eval_funcexpr(e: FuncExpr, cfg: QuadConfig) -> QuadResult:
    """∫ e(x) dx evaluated pointwise, without classification into basis integrals."""
    if e.is_zero():
        return QuadResult(0.0, 0.0, 0)
    return integrate_with_T(e.evaluate, cfg, needs_T=e.needs_T(), label="expression")


def eval_function(func: Callable[[np.ndarray], np.ndarray], cfg: QuadConfig, label: str = "function") -> QuadResult:
    return integrate(func, cfg, label=label)


def eval_combo(c: BasisCombo, cfg: QuadConfig, precision: int = Constants.DEFAULT_PRECISION) -> QuadResult:
    """Σ coefficient · quadrature of each basis integral."""
    total = QuadResult(0.0, 0.0, 0)
    for b, coeff in c.items():
        total = total + eval_monomial(basis_integrand(b), cfg).scaled(float(to_float(coeff, precision)))
    return total


# the four terms of the constant, straight from the profile, bypassing the algebra

def _profiles(x: np.ndarray, T: np.ndarray, Tp: np.ndarray) -> Dict[str, np.ndarray]:
    s = sech_values(x)
    th = np.tanh(x)
    phi = SQRT2 * s
    dphi = -SQRT2 * s * th
    dlog = -th  # φ'/φ without dividing underflowed values
    logphi = 0.5 * math.log(2.0) + log_sech_values(x)
    xi1 = 1.0 - phi ** 2
    xi2 = 1.0
    r1 = -x * phi * dphi - (3.0 - phi ** 2) * T / (4.0 * SQRT2) - dlog * Tp / (2.0 * SQRT2)
    r2 = 0.5 * phi ** 2 + 3.0 * T / (4.0 * SQRT2) + dlog * Tp / (2.0 * SQRT2)
    e = 0.5 * phi * (0.25 - logphi) + 0.5 * x * dphi
    f = e + phi * logphi
    return {
        "phi": phi, "dlog": dlog, "s": s, "tanh": th, "xi1": xi1,
        "E": e,
        "delta1": f * (3.0 * xi1 ** 2 - xi2 ** 2) + phi * xi1 ** 2 + 6.0 * phi * xi1 * r1 - 2.0 * phi * xi2 * r2,
        "delta2": f * xi1 * xi2 + phi * r1 * xi2 + phi * xi1 * r2,
    }


def resonances(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(h31, h32) at x."""
    s = sech_values(x)
    th = np.tanh(x)
    return s ** 2 * np.cos(x) - th * np.sin(x), -th * np.sin(x)


def eval_gamma_direct(i: int, cfg: QuadConfig,
                      resonance: Optional[Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]] = None) -> QuadResult:
    """
    Numeric value of the i-th term of the constant from its defining integral.

    ``resonance`` replaces the pair (h31, h32); by default the true ones.
    """
    if i not in (1, 2, 3, 4):
        raise ValueError(f"the constant has four terms, got {i}")
    resonance = resonance or resonances

    def func(x, T, Tp):
        prof = _profiles(x, T, Tp)
        h31, h32 = resonance(x)
        if i == 1:
            return prof["delta1"] * h31
        if i == 2:
            return 2.0 * prof["delta2"] * h32
        if i == 3:
            weight = 6.0 * x * prof["tanh"] * prof["s"] ** 2 - 3.5 * prof["s"] ** 2
            return weight * prof["phi"] * prof["xi1"] * h31
        return -2.0 * prof["E"] * h31

    return integrate_with_T(func, cfg, needs_T=i in (1, 2), label=f"gamma_{i}")


# closed forms

def p1_closed_form() -> float:
    return math.pi / math.cosh(math.pi / 2.0)


def gamma_closed_form() -> float:
    return math.pi / (SQRT2 * math.cosh(math.pi / 2.0))
