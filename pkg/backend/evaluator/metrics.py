"""
Implication checks between criterion verdicts.

The oracle is ground truth. The zigzag and dsg criteria are one-sided and
the rotation algorithm is exact, so each contributes one implication that a
verdict set can violate. The dsg certificate and the absence of a full-length
zigzag bar are equally discerning, which needs no oracle to check.
"""
from typing import Dict, List

from evasion.reeb import EVASION_EXISTS
from homology.dsg import NO_EVASION_CERTIFIED as DSG_CERTIFIED
from oracle.spacetime import EVASION
from zigzag.streaming import NO_EVASION_CERTIFIED as ZIGZAG_CERTIFIED

IMPLICATIONS = {
    "zigzag": "no_evasion_certified implies oracle no_evasion (a full-length bar is necessary for evasion)",
    "zigzag_vr": "no_evasion_certified implies oracle no_evasion",
    "dsg": "no_evasion_certified implies oracle no_evasion (inconclusive says nothing)",
    "rotation": "evasion_exists iff oracle evasion, on connected coverage",
    "dsg_zigzag": "dsg no_evasion_certified iff zigzag no_evasion_certified (no full-length bar)",
}


def implication_violations(verdicts: Dict[str, str]) -> List[str]:
    """
    Violated implications for one scenario. Criteria that were not run, or
    that ended in an error, are skipped; so are the oracle implications
    when the oracle is missing.
    """
    out = _equivalence_violations(verdicts)
    oracle = verdicts.get("oracle")
    if oracle is None or oracle.startswith("error"):
        return out
    evasion = oracle == EVASION
    for name in ("zigzag", "zigzag_vr"):
        if verdicts.get(name) == ZIGZAG_CERTIFIED and evasion:
            out.append(f"{name} certified no evasion but the oracle found an evasion path")
    if verdicts.get("dsg") == DSG_CERTIFIED and evasion:
        out.append("dsg certified no evasion but the oracle found an evasion path")
    rotation = verdicts.get("rotation")
    if rotation is not None and not rotation.startswith("error"):
        if (rotation == EVASION_EXISTS) != evasion:
            out.append(f"rotation says {rotation} but the oracle says {oracle}")
    return out


def _equivalence_violations(verdicts: Dict[str, str]) -> List[str]:
    dsg, zigzag = verdicts.get("dsg"), verdicts.get("zigzag")
    if dsg is None or zigzag is None or dsg.startswith("error") or zigzag.startswith("error"):
        return []
    if (dsg == DSG_CERTIFIED) != (zigzag == ZIGZAG_CERTIFIED):
        return [f"dsg_zigzag disagree: dsg says {dsg} but zigzag says {zigzag}"]
    return []


def violation_rate(rows: List[List[str]]) -> float:
    """Share of scenarios with at least one violation."""
    if not rows:
        return 0.0
    return round(sum(1 for r in rows if r) / len(rows), 3)
