"""Report files: CSV tables, JSON manifest and a minimal SVG line plot."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import mpmath


def fmt(v) -> str:
    """17 significant digits for reals; everything else via ``str``."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, mpmath.mpf):
        if v == 0 or (abs(v) >= 1e-300 and abs(v) <= 1e300):
            return f"{float(v):.17g}"
        return mpmath.nstr(v, 17, strip_zeros=False)
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def write_csv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)  # excel dialect: minimal quoting, CRLF rows
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


@dataclass
class Verdict:
    check: str
    measured: float
    bound: float
    passed: bool
    note: str = ""

    @property
    def margin(self) -> float:
        return float(self.bound) - float(self.measured)


@dataclass
class Report:
    header: list
    rows: list
    verdicts: list[Verdict]
    plot: dict | None = None
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)


def write_verdicts(path: Path, verdicts: Sequence[Verdict]) -> None:
    write_csv(path, ["check", "measured", "bound", "margin", "passed", "note"],
              [(v.check, v.measured, v.bound, v.margin, v.passed, v.note) for v in verdicts])


def write_manifest(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")


PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def svg_lines(series: dict, title: str, xlabel: str, ylabel: str, logy: bool = True,
              width: int = 640, height: int = 400) -> str:
    """Polyline chart for ``{label: (xs, ys)}``; nonpositive values are dropped on a log axis."""
    pad = 56
    cleaned = {}
    for label, (xs, ys) in series.items():
        pts = []
        for x, y in zip(xs, ys):
            if not logy:
                pts.append((float(x), float(y)))
            elif y > 0:
                # mpf values may sit far below the float64 range
                ly = float(mpmath.log10(y)) if isinstance(y, mpmath.mpf) else math.log10(float(y))
                pts.append((float(x), ly))
        if pts:
            cleaned[label] = pts
    allp = [p for pts in cleaned.values() for p in pts] or [(0.0, 0.0), (1.0, 1.0)]
    x0, x1 = min(p[0] for p in allp), max(p[0] for p in allp)
    y0, y1 = min(p[1] for p in allp), max(p[1] for p in allp)
    x1, y1 = (x1 if x1 > x0 else x0 + 1), (y1 if y1 > y0 else y0 + 1)

    def sx(x):
        return pad + (x - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(y):
        return height - pad - (y - y0) / (y1 - y0) * (height - 2 * pad)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'font-family="sans-serif" font-size="12">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width / 2:.1f}" y="20" text-anchor="middle">{_esc(title)}</text>',
           f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
           f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
           f'<text x="{width / 2:.1f}" y="{height - 12}" text-anchor="middle">{_esc(xlabel)}</text>',
           f'<text x="14" y="{height / 2:.1f}" transform="rotate(-90 14 {height / 2:.1f})" '
           f'text-anchor="middle">{_esc(("log10 " if logy else "") + ylabel)}</text>',
           f'<text x="{pad - 4}" y="{height - pad:.1f}" text-anchor="end">{y0:.3g}</text>',
           f'<text x="{pad - 4}" y="{pad + 4:.1f}" text-anchor="end">{y1:.3g}</text>',
           f'<text x="{pad}" y="{height - pad + 16:.1f}" text-anchor="middle">{x0:.3g}</text>',
           f'<text x="{width - pad}" y="{height - pad + 16:.1f}" text-anchor="middle">{x1:.3g}</text>']
    for k, (label, pts) in enumerate(cleaned.items()):
        colour = PALETTE[k % len(PALETTE)]
        path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{path}"/>')
        out.append(f'<text x="{width - pad - 4}" y="{pad + 16 * (k + 1)}" text-anchor="end" '
                   f'fill="{colour}">{_esc(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
