"""Deterministic verdict reports with text and JSON renderings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .bundle import ValidationReport

CONVENTIONS = (
    "coefficients: exact rationals",
    "derivatives: left convention",
    "odd bracket normalisation: (x,chi) = (pi,theta) = +1",
    "derived bracket: -[[s1,P],s2]",
    "jet normalisation: weight-r velocity = x^(r)/r!",
    "lie algebra field: Q(xi^c) = -1/2 c^c_ab xi^a xi^b",
)


@dataclass
class ReportItem:
    check_id: str
    verdict: str  # PASS / FAIL / INFO
    residual: str = ""
    weights: str = ""


@dataclass
class Report:
    command: str
    items: list[ReportItem] = field(default_factory=list)
    conventions: tuple[str, ...] = CONVENTIONS

    def add(self, check_id: str, ok: bool, residual: str = "", weights: str = ""):
        self.items.append(
            ReportItem(check_id, "PASS" if ok else "FAIL", residual, weights)
        )

    def info(self, check_id: str, value: str = "", weights: str = ""):
        self.items.append(ReportItem(check_id, "INFO", value, weights))

    def merge_validation(self, rep: ValidationReport, prefix: str = ""):
        for item in rep.items:
            self.add(prefix + item.check_id, item.ok, item.residual)

    @property
    def passed(self) -> bool:
        return all(i.verdict != "FAIL" for i in self.items)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1


def render_text(report: Report) -> str:
    lines = [f"command: {report.command}"]
    for c in report.conventions:
        lines.append(f"convention: {c}")
    for item in report.items:
        line = f"{item.verdict:4}  {item.check_id}"
        if item.residual:
            line += f"  :: {item.residual}"
        if item.weights:
            line += f"  [weights {item.weights}]"
        lines.append(line)
    lines.append(f"result: {'PASS' if report.passed else 'FAIL'}")
    return "\n".join(lines) + "\n"


def render_json(report: Report) -> str:
    payload = {
        "command": report.command,
        "conventions": list(report.conventions),
        "checks": [
            {
                "check_id": i.check_id,
                "verdict": i.verdict,
                "residual": i.residual,
                "weights": i.weights,
            }
            for i in report.items
        ],
        "result": "PASS" if report.passed else "FAIL",
    }
    return json.dumps(payload, indent=2) + "\n"
