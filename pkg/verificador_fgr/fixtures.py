"""
Carregamento das fórmulas publicadas (claims) a partir de data/claims.json.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Dict, Optional, Union

from .basisreduce import BasisCombo
from .constants import Constants
from .errors import ExpressionSyntaxError, FixtureError, UnknownClaim
from .exprparse import parse_basis_expr

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).resolve().parent / "data"


class Stage(Enum):
    RAW = "raw"
    DERIVED_ELIMINATED = "derived_eliminated"
    CORE = "core"


@dataclass(frozen=True)
class ClaimFixture:
    id: str
    expected: BasisCombo
    stage: Stage
    source: str
    display: str


def _reject_duplicate_keys(pairs):
    out = {}
    for key, value in pairs:
        if key in out:
            raise FixtureError(f"duplicate key {key!r} in fixture file")
        out[key] = value
    return out


def load_fixtures(path: Optional[Union[str, Path]] = None) -> Dict[str, ClaimFixture]:
    """Read and validate a fixture file; ids keep the file order."""
    path = Path(path) if path is not None else DATA_DIR / Constants.FIXTURE_FILE
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f, object_pairs_hook=_reject_duplicate_keys)
    except OSError as exc:
        raise FixtureError(f"cannot read fixture file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FixtureError(f"fixture file {path} is not valid JSON: {exc}") from exc

    version = data.get("version")
    if version != Constants.FIXTURE_VERSION:
        raise FixtureError(f"unsupported fixture version {version!r} in {path}")

    fixtures: Dict[str, ClaimFixture] = {}
    for entry in data.get("claims", []):
        try:
            claim_id = entry["id"]
            display = entry["expected"]
            stage = Stage(entry["stage"])
        except (KeyError, ValueError) as exc:
            raise FixtureError(f"malformed fixture entry {entry!r}: {exc}") from exc
        if claim_id in fixtures:
            raise FixtureError(f"duplicate claim id {claim_id!r}")
        try:
            expected = parse_basis_expr(display)
        except ExpressionSyntaxError as exc:
            raise FixtureError(f"claim {claim_id}: {exc}") from exc
        fixtures[claim_id] = ClaimFixture(claim_id, expected, stage, entry.get("source", ""), display)

    logger.debug("loaded %d fixtures from %s", len(fixtures), path)
    return fixtures


@lru_cache(maxsize=1)
def default_fixtures() -> Dict[str, ClaimFixture]:
    return load_fixtures()


def get_fixture(claim_id: str) -> ClaimFixture:
    fixtures = default_fixtures()
    if claim_id not in fixtures:
        raise UnknownClaim(claim_id)
    return fixtures[claim_id]
