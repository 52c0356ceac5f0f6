"""Equivalence reports, their CSV rows and a small SVG plotter."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

CSV_COLUMNS = ("case_id", "lhs", "rhs", "constant", "pass")
DEFAULT_DRIFT = 0.2
DEFAULT_EMPIRICAL_BOUND = 10.0


def fmt(x: float) -> str:
    """17 significant digits, so rows round-trip exactly."""
    if isinstance(x, bool):
        return str(x).lower()
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


@dataclass(frozen=True)
class Check:
    """One row: ``lhs <= constant * rhs``."""

    case_id: str
    lhs: float
    rhs: float
    constant: float

    @property
    def passed(self) -> bool:
        if self.lhs == 0.0:
            return True
        return bool(self.lhs <= self.constant * self.rhs)

    def row(self) -> list[str]:
        return [self.case_id, fmt(self.lhs), fmt(self.rhs), fmt(self.constant),
                "pass" if self.passed else "FAIL"]


@dataclass(frozen=True)
class EquivalenceReport:
    """Ratio ``lhs/rhs`` of two seminorms of one element.

    With a ``bracket (low, high)`` the ratio must lie in
    ``[low (1 - slack), high (1 + slack)]``. Without one the comparison is
    empirical: the ratio must stay within ``[1/bound, bound]``. A
    ``reference`` ratio from a refined grid adds a drift test.
    """

    name: str
    lhs: float
    rhs: float
    bracket: tuple | None = None
    slack: float = 0.0
    reference: float | None = None
    drift: float = DEFAULT_DRIFT
    bound: float = DEFAULT_EMPIRICAL_BOUND
    note: str = field(default="", compare=False)

    @property
    def ratio(self) -> float:
        if self.rhs > 0:
            return self.lhs / self.rhs
        return math.inf if self.lhs > 0 else math.nan

    @property
    def kind(self) -> str:
        return "empirical" if self.bracket is None else "bracket"

    @property
    def stable(self) -> bool | None:
        if self.reference is None:
            return None
        return self.checks()[-1].passed

    def checks(self) -> list[Check]:
        lhs, rhs = float(self.lhs), float(self.rhs)
        if lhs == 0.0 and rhs == 0.0:
            return [Check(f"{self.name}:zero", 0.0, 0.0, 1.0)]
        out = []
        if self.bracket is None:
            lo, hi = 1.0 / self.bound, self.bound
        else:
            lo = self.bracket[0] * (1 - self.slack)
            hi = self.bracket[1] * (1 + self.slack)
        out.append(Check(f"{self.name}:upper", lhs, rhs, hi))
        if lo > 0:
            out.append(Check(f"{self.name}:lower", rhs, lhs, 1.0 / lo))
        if self.reference is not None:
            r = self.ratio if rhs > 0 else math.inf
            out.append(Check(f"{self.name}:drift", abs(r - self.reference),
                             abs(self.reference), self.drift))
        return out

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks())


def report_rows(reports) -> list[Check]:
    """All checks sorted by case id (the canonical output order)."""
    rows = [c for r in reports for c in (r.checks() if isinstance(r, EquivalenceReport) else [r])]
    return sorted(rows, key=lambda c: c.case_id)


def csv_text(checks) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for c in checks:
        w.writerow(c.row())
    return buf.getvalue()


def write_csv(checks, path) -> Path:
    path = Path(path)
    path.write_text(csv_text(checks))
    return path


def read_csv(path) -> list[Check]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_COLUMNS:
        raise ValueError(f"{path}: not a report table")
    return [Check(r[0], float(r[1]), float(r[2]), float(r[3])) for r in rows[1:]]


def svg_loglog(series: dict, path, title: str = "", xlabel: str = "t",
               ylabel: str = "", size=(640, 420)) -> Path:
    """Write a log-log line plot of ``{label: (xs, ys)}``; nonpositive points are skipped."""
    W, H = size
    left, right, top, bottom = 70, 150, 30, 50
    pts = {k: [(math.log10(x), math.log10(y)) for x, y in zip(*v) if x > 0 and y > 0]
           for k, v in series.items()}
    allp = [p for v in pts.values() for p in v]
    if not allp:
        allp = [(0.0, 0.0), (1.0, 1.0)]
    x0, x1 = min(p[0] for p in allp), max(p[0] for p in allp)
    y0, y1 = min(p[1] for p in allp), max(p[1] for p in allp)
    x1, y1 = (x1 if x1 > x0 else x0 + 1), (y1 if y1 > y0 else y0 + 1)

    def sx(x):
        return left + (x - x0) / (x1 - x0) * (W - left - right)

    def sy(y):
        return H - bottom - (y - y0) / (y1 - y0) * (H - top - bottom)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"]
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
           f'font-family="sans-serif" font-size="12">',
           f'<rect width="{W}" height="{H}" fill="white"/>',
           f'<text x="{W / 2:.1f}" y="18" text-anchor="middle">{_esc(title)}</text>',
           f'<line x1="{left}" y1="{H - bottom}" x2="{W - right}" y2="{H - bottom}" stroke="black"/>',
           f'<line x1="{left}" y1="{top}" x2="{left}" y2="{H - bottom}" stroke="black"/>']
    for e in range(math.ceil(x0), math.floor(x1) + 1):
        out.append(f'<text x="{sx(e):.1f}" y="{H - bottom + 16}" text-anchor="middle">1e{e}</text>')
    for e in range(math.ceil(y0), math.floor(y1) + 1):
        out.append(f'<text x="{left - 6}" y="{sy(e) + 4:.1f}" text-anchor="end">1e{e}</text>')
    out.append(f'<text x="{(left + W - right) / 2:.1f}" y="{H - 10}" '
               f'text-anchor="middle">{_esc(xlabel)}</text>')
    out.append(f'<text x="14" y="{(top + H - bottom) / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 14 {(top + H - bottom) / 2:.1f})">{_esc(ylabel)}</text>')
    for i, (label, p) in enumerate(pts.items()):
        c = colors[i % len(colors)]
        if p:
            d = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in p)
            out.append(f'<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{d}"/>')
        ly = top + 16 * i + 10
        out.append(f'<line x1="{W - right + 10}" y1="{ly}" x2="{W - right + 30}" y2="{ly}" '
                   f'stroke="{c}" stroke-width="2"/>')
        out.append(f'<text x="{W - right + 34}" y="{ly + 4}">{_esc(label)}</text>')
    out.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(out) + "\n")
    return path


def _esc(s: str) -> str:
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
