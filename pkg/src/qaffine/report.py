"""Check results and the report-line grammar."""

from __future__ import annotations

from dataclasses import dataclass

PASS, FAIL, SKIPPED = "PASS", "FAIL", "SKIPPED"


@dataclass
class CheckResult:
    name: str
    status: str
    certified_order: int = 0
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status == PASS

    def line(self, type_label: str, K: int) -> str:
        out = (f"CHECK {self.name} type={type_label} K={K} "
               f"certified_order={self.certified_order} status={self.status}")
        if self.detail:
            out += " " + " ".join(self.detail.split())
        return out


def combine(name: str, parts: list, certified_order: int) -> CheckResult:
    """Fold sub-results into one line; the first failure provides the detail."""
    bad = [p for p in parts if not p.ok]
    if bad:
        return CheckResult(name, FAIL, certified_order,
                           f"{bad[0].name}: {bad[0].detail}".strip())
    notes = "; ".join(p.detail for p in parts if p.detail)
    return CheckResult(name, PASS, certified_order, notes)
