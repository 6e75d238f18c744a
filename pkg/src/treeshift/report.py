"""Certificate reports: every checked (in)equality with its slack.

A report never claims operator-level facts; "certified" means the checked
premises hold exactly (or within the stated tolerance) to the stated
depth/window.  Structured rendering is canonical JSON with rationals as
"p/q" strings, so identical inputs produce byte-identical reports.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

from .rationals import INF, Scalar, format_human, format_struct


class Verdict(str, Enum):
    CERTIFIED = "certified"
    VIOLATED = "violated"
    INCONCLUSIVE = "inconclusive"


EXIT_CODES = {Verdict.CERTIFIED: 0, Verdict.VIOLATED: 1, Verdict.INCONCLUSIVE: 2}


@dataclass(frozen=True)
class Check:
    cid: str
    relation: str            # "<=", "==", ">=", "psd", "flag"
    lhs: object
    rhs: object
    passed: bool
    slack: object = None
    note: str = ""


def _close(lhs, rhs, tol: float) -> bool:
    return abs(float(lhs) - float(rhs)) <= tol * max(1.0, abs(float(rhs)))


def check_le(cid: str, lhs: Scalar, rhs: Scalar, mode: str = "exact",
             tol: float = 1e-9, note: str = "") -> Check:
    if mode == "exact":
        ok = lhs <= rhs
    else:
        ok = float(lhs) <= float(rhs) + tol * max(1.0, abs(float(rhs)))
    slack = -INF if lhs == INF else rhs - lhs
    return Check(cid, "<=", lhs, rhs, bool(ok), slack, note)


def check_eq(cid: str, lhs: Scalar, rhs: Scalar, mode: str = "exact",
             tol: float = 1e-9, note: str = "") -> Check:
    if lhs == INF or rhs == INF:
        ok = lhs == rhs
        slack = INF
    elif mode == "exact":
        ok = lhs == rhs
        slack = rhs - lhs
    else:
        ok = _close(lhs, rhs, tol)
        slack = float(rhs) - float(lhs)
    return Check(cid, "==", lhs, rhs, bool(ok), slack, note)


def check_flag(cid: str, passed: bool, note: str = "") -> Check:
    return Check(cid, "flag", "", "", bool(passed), None, note)


def check_psd(cid: str, passed: bool, witness_note: str = "") -> Check:
    return Check(cid, "psd", "", "", bool(passed), None, witness_note)


def _render(value, machine: bool) -> object:
    if value is None or value == "":
        return ""
    if isinstance(value, bool):
        return value
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    try:
        return format_struct(value) if machine else format_human(value)
    except TypeError:
        return str(value)


@dataclass
class CertificateReport:
    criterion: str
    verdict: Verdict
    arithmetic: str
    checks: List[Check] = field(default_factory=list)
    params: dict = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == Verdict.CERTIFIED

    def witness(self) -> Optional[Check]:
        for c in self.checks:
            if not c.passed:
                return c
        return None

    def failed_checks(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def exit_code(self) -> int:
        return EXIT_CODES[self.verdict]

    def to_struct(self) -> dict:
        return {
            "criterion": self.criterion,
            "verdict": self.verdict.value,
            "arithmetic": self.arithmetic,
            "params": {k: _render(v, True) for k, v in sorted(self.params.items())},
            "checks": [
                {
                    "id": c.cid,
                    "relation": c.relation,
                    "lhs": _render(c.lhs, True),
                    "rhs": _render(c.rhs, True),
                    "slack": _render(c.slack, True),
                    "passed": c.passed,
                    "note": c.note,
                }
                for c in self.checks
            ],
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_struct(), sort_keys=True, separators=(",", ":")) + "\n"

    def to_text(self) -> str:
        lines = [f"criterion: {self.criterion}"]
        lines.append(f"verdict: {self.verdict.value.upper()}   arithmetic: {self.arithmetic}")
        if self.params:
            rendered = " ".join(f"{k}={_render(v, False)}" for k, v in sorted(self.params.items()))
            lines.append(f"params: {rendered}")
        for c in self.checks:
            mark = "pass" if c.passed else "FAIL"
            if c.relation in ("flag", "psd"):
                body = c.note or c.relation
            else:
                body = f"{_render(c.lhs, False)} {c.relation} {_render(c.rhs, False)}"
                if c.slack is not None:
                    body += f" (slack {_render(c.slack, False)})"
                if c.note:
                    body += f" -- {c.note}"
            lines.append(f"  [{mark}] {c.cid}: {body}")
        for n in self.notes:
            lines.append(f"note: {n}")
        return "\n".join(lines) + "\n"


def verdict_from_checks(checks: List[Check]) -> Verdict:
    return Verdict.CERTIFIED if all(c.passed for c in checks) else Verdict.VIOLATED


def merge_subreports(criterion: str, parts: List[tuple], params: dict,
                     notes: Optional[List[str]] = None) -> CertificateReport:
    """Aggregate labeled sub-reports; any violation dominates, then inconclusive."""
    checks: List[Check] = []
    verdict = Verdict.CERTIFIED
    all_notes = list(notes or [])
    for label, sub in parts:
        for c in sub.checks:
            checks.append(Check(f"{label}:{c.cid}", c.relation, c.lhs, c.rhs,
                                c.passed, c.slack, c.note))
        all_notes.append(f"{label}: {sub.verdict.value}")
        if sub.verdict == Verdict.VIOLATED:
            verdict = Verdict.VIOLATED
        elif sub.verdict == Verdict.INCONCLUSIVE and verdict != Verdict.VIOLATED:
            verdict = Verdict.INCONCLUSIVE
    arithmetic = "exact" if all(sub.arithmetic == "exact" for _, sub in parts) else "float"
    return CertificateReport(criterion, verdict, arithmetic, checks, params, all_notes)
