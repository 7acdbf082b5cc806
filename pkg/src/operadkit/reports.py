"""Pass/fail reports shared by the verification routines."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class ReportEntry:
    name: str
    ok: bool
    detail: str = ""
    residual: object = None
    skipped: bool = False

    def line(self) -> str:
        if self.skipped:
            status = "SKIP"
        else:
            status = "PASS" if self.ok else "FAIL"
        msg = f"{status}  {self.name}"
        if self.detail:
            msg += f"  {self.detail}"
        return msg


@dataclass
class Report:
    title: str
    entries: list = field(default_factory=list)

    def add(self, name, ok, detail="", residual=None, skipped=False):
        self.entries.append(ReportEntry(name, ok, detail, residual, skipped))

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries if not e.skipped)

    def failures(self):
        return [e for e in self.entries if not e.skipped and not e.ok]

    def lines(self):
        out = [self.title]
        out.extend("  " + e.line() for e in self.entries)
        out.append(f"  => {'PASS' if self.ok else 'FAIL'}")
        return out

    def __str__(self):
        return "\n".join(self.lines())
