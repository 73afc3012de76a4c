from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

TAGS = ("PAPER", "DERIVED", "TRIVIAL")


@dataclass(frozen=True)
class Check:
    name: str
    computed: float
    expected: float
    tolerance: float
    passed: bool
    tag: str
    detail: str = ""

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown provenance tag {self.tag!r}")


def check_abs(name, computed, expected, tol, tag, detail="") -> Check:
    err = abs(computed - expected)
    return Check(name, _real(computed), _real(expected), tol, bool(err <= tol), tag, detail)


def check_rel(name, computed, expected, tol, tag, detail="") -> Check:
    err = abs(computed - expected) / abs(expected)
    return Check(name, _real(computed), _real(expected), tol, bool(err <= tol), tag, detail or f"rel err {err:.3e}")


def check_max(name, worst, tol, tag, detail="") -> Check:
    """Pass when a worst-case error is at most tol."""
    return Check(name, float(worst), 0.0, tol, bool(worst <= tol), tag, detail)


def check_min(name, value, floor, tag, detail="") -> Check:
    """Pass when value strictly exceeds floor."""
    return Check(name, float(value), float(floor), float(floor), bool(value > floor), tag, detail)


def check_true(name, ok, tag, detail="") -> Check:
    return Check(name, float(bool(ok)), 1.0, 0.0, bool(ok), tag, detail)


def _real(v) -> float:
    v = complex(v)
    return v.real if v.imag == 0 else abs(v)


@dataclass
class Table:
    """A CSV artifact: header plus rows of plain numbers/strings."""

    name: str
    header: list
    rows: list = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header)
        for row in self.rows:
            w.writerow([_fmt(v) for v in row])
        return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return str(v)


@dataclass
class ScenarioResult:
    kind: str
    checks: list = field(default_factory=list)
    tables: list = field(default_factory=list)
    series: dict = field(default_factory=dict)
    error: str = ""


@dataclass
class RunReport:
    config: dict
    results: list = field(default_factory=list)
    wall_clock: float = 0.0
    artifacts: list = field(default_factory=list)

    @property
    def checks(self) -> list:
        return [c for r in self.results for c in r.checks]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and not any(r.error for r in self.results)

    def series(self, kind: str) -> dict:
        for r in self.results:
            if r.kind == kind:
                return r.series
        return {}

    def checks_table(self) -> Table:
        t = Table("checks", ["scenario", "name", "computed", "expected", "tolerance", "passed", "tag", "detail"])
        for r in self.results:
            for c in r.checks:
                t.rows.append([r.kind, c.name, float(c.computed), float(c.expected), float(c.tolerance), c.passed, c.tag, c.detail])
            if r.error:
                t.rows.append([r.kind, "error", "", "", "", False, "DERIVED", r.error])
        return t

    def write(self, out_dir) -> list[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = []
        for table in [self.checks_table()] + [t for r in self.results for t in r.tables]:
            p = out / f"{table.name}.csv"
            p.write_text(table.to_csv(), encoding="utf-8")
            paths.append(p)
        summary = {
            "passed": self.passed,
            "n_checks": len(self.checks),
            "n_failed": sum(not c.passed for c in self.checks),
            "wall_clock_s": self.wall_clock,
            "config": self.config,
            "errors": {r.kind: r.error for r in self.results if r.error},
            "checks": [asdict(c) for c in self.checks],
        }
        p = out / "report.json"
        p.write_text(json.dumps(summary, indent=2, default=str), encoding="utf-8")
        paths.append(p)
        self.artifacts.extend(str(x) for x in paths)
        return paths
