"""
Relatórios de verificação e sua serialização em JSON.

A serialização é determinística (chaves ordenadas, indentação fixa);
fora os campos de tempo, duas execuções produzem os mesmos bytes.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from .basisreduce import BasisCombo
from .constants import Constants

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
TIMING_KEYS = ("elapsed",)


@dataclass
class VerificationReport:
    """
    Outcome of checking one published formula.

    Attributes
    ----------
    claim_id : str
        Fixture id.
    stage : str
        Stage of the fixture (raw, derived_eliminated, core).
    exact_match : bool
        Computed and published combinations are structurally equal.
    symbolic_residual : BasisCombo
        computed - expected, empty on a match.
    numeric_residual : float or None
        |quad(computed) - quad(expected)|.
    direct_residual : float or None
        |quad(computed) - quadrature of the defining integrand|.
    quadrature_error_estimate : float or None
    adjudication : str
        exact, equivalent_after_reduction, fixture_typo, computation_error
        or undecided.
    """
    claim_id: str
    stage: str
    exact_match: bool
    symbolic_residual: BasisCombo = field(default_factory=BasisCombo)
    numeric_residual: Optional[float] = None
    direct_residual: Optional[float] = None
    quadrature_error_estimate: Optional[float] = None
    adjudication: str = "exact"
    flags: List[str] = field(default_factory=list)
    elapsed: float = 0.0

    def passed(self, numeric_tol: float = Constants.NUMERIC_TOL) -> bool:
        if not self.exact_match:
            return False
        for residual in (self.numeric_residual, self.direct_residual):
            if residual is not None and not residual < numeric_tol:
                return False
        return True

    def __str__(self) -> str:
        status = "PASS" if self.passed() else "FAIL"
        out = f"{status}: {self.claim_id} [{self.stage}]"
        if self.numeric_residual is not None:
            out += f" numeric={self.numeric_residual:.2e}"
        if self.direct_residual is not None:
            out += f" direct={self.direct_residual:.2e}"
        if not self.exact_match:
            out += f" residual: {self.symbolic_residual} ({self.adjudication})"
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.claim_id,
            "stage": self.stage,
            "passed": self.passed(),
            "exact_match": self.exact_match,
            "symbolic_residual": self.symbolic_residual.to_json(),
            "numeric_residual": self.numeric_residual,
            "direct_residual": self.direct_residual,
            "error_estimate": self.quadrature_error_estimate,
            "adjudication": self.adjudication,
            "flags": list(self.flags),
            "elapsed": self.elapsed,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "VerificationReport":
        return cls(
            claim_id=data["id"],
            stage=data["stage"],
            exact_match=bool(data["exact_match"]),
            symbolic_residual=BasisCombo.from_json(data.get("symbolic_residual", [])),
            numeric_residual=data.get("numeric_residual"),
            direct_residual=data.get("direct_residual"),
            quadrature_error_estimate=data.get("error_estimate"),
            adjudication=data.get("adjudication", "exact"),
            flags=list(data.get("flags", [])),
            elapsed=data.get("elapsed", 0.0),
        )


@dataclass
class SuiteReport:
    """Every claim plus the summary of the constant."""
    claims: List[VerificationReport] = field(default_factory=list)
    gamma: Dict[str, Any] = field(default_factory=dict)
    config: Dict[str, Any] = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed() for c in self.claims) and self.gamma.get("cancellation", True) is not False

    @property
    def fail_count(self) -> int:
        return sum(1 for c in self.claims if not c.passed())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "verdict": "PASS" if self.passed else "FAIL",
            "summary": {
                "total": len(self.claims),
                "failed": self.fail_count,
            },
            "claims": [c.to_dict() for c in self.claims],
            "gamma": self.gamma,
            "config": self.config,
            "elapsed": self.elapsed,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SuiteReport":
        if data.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {data.get('schema_version')!r}")
        return cls(
            claims=[VerificationReport.from_dict(c) for c in data.get("claims", [])],
            gamma=dict(data.get("gamma", {})),
            config=dict(data.get("config", {})),
            elapsed=data.get("elapsed", 0.0),
        )

    def render_text(self) -> str:
        lines = ["=== FERMI GOLDEN RULE VERIFICATION ==="]
        lines.extend(str(c) for c in self.claims)
        lines.append("")
        if self.gamma:
            lines.append(f"Gamma = {self.gamma.get('symbolic')}")
            if self.gamma.get("numeric") is not None:
                lines.append(f"  numeric     {self.gamma['numeric']:.15g}")
                lines.append(f"  closed form {self.gamma['closed_form']:.15g}")
                lines.append(f"  difference  {self.gamma['difference']:.2e}")
        lines.append(f"SUMMARY: {len(self.claims)} claims, {self.fail_count} FAIL")
        lines.append(f"VERDICT: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def dumps(data: Union[SuiteReport, VerificationReport, Dict[str, Any]]) -> str:
    if hasattr(data, "to_dict"):
        data = data.to_dict()
    return json.dumps(data, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_report(data: Union[SuiteReport, VerificationReport, Dict[str, Any]], path: Union[str, Path]) -> Path:
    """Write JSON atomically: temp file, then replace."""
    output_file = Path(path)
    output_file.parent.mkdir(parents=True, exist_ok=True)
    tmp_path = output_file.with_suffix(output_file.suffix + '.tmp')
    try:
        with open(tmp_path, 'w', encoding='utf-8') as f:
            f.write(dumps(data))
        tmp_path.replace(output_file)
    finally:
        if tmp_path.exists():
            try:
                tmp_path.unlink()
            except OSError:
                pass
    logger.info("report written to %s", output_file)
    return output_file


def load_report(path: Union[str, Path]) -> SuiteReport:
    with open(path, 'r', encoding='utf-8') as f:
        return SuiteReport.from_dict(json.load(f))


def strip_timing(data: Any) -> Any:
    """Copy of a report dict without the timing fields."""
    if isinstance(data, dict):
        return {k: strip_timing(v) for k, v in data.items() if k not in TIMING_KEYS}
    if isinstance(data, list):
        return [strip_timing(v) for v in data]
    return data
