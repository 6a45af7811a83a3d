"""
Verificador da constante de Fermi para NLS de potência pura perto de p = 3.

Recalcula, de forma exata em Q(√2)[log 2] e também numérica, cada
fórmula intermediária publicada e a identidade final
Gamma = (1/√2)·p1 = π/(√2·cosh(π/2)).
"""
from .basisreduce import BasisCombo, BasisIntegral, Family, reduce_full
from .exactfield import FieldElem, QSqrt2
from .paperpipeline import build_gamma, gamma_symbolic, verify_all, verify_claim
from .quadrature import QuadConfig, TStrategy

__all__ = [
    "BasisCombo",
    "BasisIntegral",
    "Family",
    "FieldElem",
    "QSqrt2",
    "QuadConfig",
    "TStrategy",
    "build_gamma",
    "gamma_symbolic",
    "reduce_full",
    "verify_all",
    "verify_claim",
]
