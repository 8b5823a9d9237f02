"""Deterministic table and figure emission: CSV, JSON mirrors, SVG, DOT.

Every emitter is a pure function of its input: no timestamps, no randomness,
fixed number formatting, so identical analyses yield byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Sequence

from .dsm import FieldGraph

VIEW_W = 960
VIEW_H = 540
MARGIN_L = 70
MARGIN_R = 24
MARGIN_T = 42
MARGIN_B = 52

PALETTE = (
    "#2e8b57",  # green, the conventional association-rate color
    "#1f6fb4",
    "#c23b22",
    "#8a5fbf",
    "#d49a2a",
    "#4aa3a3",
    "#7f7f7f",
    "#b5651d",
)


def fmt_percent(value: Fraction) -> str:
    """Display form of an exact percentage: 2 decimals, half-up."""
    dec = Decimal(value.numerator) / Decimal(value.denominator)
    return str(dec.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def fmt_rate(value: Fraction, places: int = 6) -> str:
    dec = Decimal(value.numerator) / Decimal(value.denominator)
    return str(dec.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP))


def fraction_json(value: Fraction) -> dict:
    """Exact rational as a JSON-safe numerator/denominator pair."""
    return {"num": value.numerator, "den": value.denominator}


def emit_csv(header: Sequence, rows: Sequence[Sequence]) -> str:
    """RFC-4180 CSV with a header row and LF line endings."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(header))
    for row in rows:
        writer.writerow(list(row))
    return buf.getvalue()


def emit_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# Timeline SVG
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Series:
    name: str
    points: tuple[tuple[int, float], ...]


@dataclass(frozen=True)
class TimelinePlotSpec:
    series: tuple[Series, ...]
    y_kind: str = "count"  # count | rate | dice
    title: str = ""
    x_range: tuple[int, int] | None = None
    smoothing: int | None = None

    def __post_init__(self):
        if not self.series:
            raise ValueError("timeline needs at least one series")
        if any(len(s.points) < 2 for s in self.series):
            raise ValueError("every series needs at least two points")
        axis = tuple(x for x, _ in self.series[0].points)
        for s in self.series[1:]:
            if tuple(x for x, _ in s.points) != axis:
                raise ValueError("all series must share the same bin axis")
        if self.smoothing is not None and (self.smoothing < 3 or self.smoothing % 2 == 0):
            raise ValueError("smoothing width must be odd and >= 3")
        if self.y_kind not in ("count", "rate", "dice"):
            raise ValueError(f"unknown y_kind {self.y_kind!r}")


def moving_average(values: Sequence[float], width: int) -> list[float]:
    """Centered moving average, window clipped at the series edges."""
    half = width // 2
    out = []
    n = len(values)
    for i in range(n):
        lo = max(0, i - half)
        hi = min(n, i + half + 1)
        out.append(sum(values[lo:hi]) / (hi - lo))
    return out


def _nice_step(span: float, target_ticks: int) -> float:
    raw = span / max(target_ticks, 1)
    mag = 10 ** math.floor(math.log10(raw)) if raw > 0 else 1
    for mult in (1, 2, 5, 10):
        if raw <= mult * mag:
            return mult * mag
    return 10 * mag


def _ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1
    step = _nice_step(hi - lo, target)
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + step * 1e-9:
        ticks.append(t)
        t += step
    return ticks


def _fnum(x: float) -> str:
    return f"{x:.2f}"


def emit_timeline_svg(spec: TimelinePlotSpec) -> str:
    """Render series of (midpoint year, value) points as a fixed-size SVG."""
    xs = [x for x, _ in spec.series[0].points]
    x_lo, x_hi = spec.x_range if spec.x_range else (min(xs), max(xs))
    if x_hi <= x_lo:
        x_hi = x_lo + 1

    plotted: list[tuple[str, list[float]]] = []
    for s in spec.series:
        ys = [y for _, y in s.points]
        name = s.name
        if spec.smoothing:
            ys = moving_average(ys, spec.smoothing)
            name = f"{s.name} (ma{spec.smoothing})"
        plotted.append((name, ys))

    if spec.y_kind == "dice":
        y_lo, y_hi = 0.0, 1.0
        y_ticks = [0.0, 0.25, 0.5, 0.75, 1.0]
    else:
        y_max = max((max(ys) for _, ys in plotted), default=0.0)
        y_lo = 0.0
        y_hi = y_max if y_max > 0 else 1.0
        y_ticks = [t for t in _ticks(0.0, y_hi) if t <= y_hi + 1e-9]

    plot_w = VIEW_W - MARGIN_L - MARGIN_R
    plot_h = VIEW_H - MARGIN_T - MARGIN_B

    def px(x: float) -> float:
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return MARGIN_T + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    out: list[str] = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {VIEW_W} {VIEW_H}" '
        f'font-family="sans-serif" font-size="12">'
    )
    out.append(f'<rect width="{VIEW_W}" height="{VIEW_H}" fill="white"/>')
    if spec.title:
        out.append(
            f'<text x="{VIEW_W // 2}" y="24" text-anchor="middle" font-size="16">'
            f"{_xml_escape(spec.title)}</text>"
        )
    # axes
    x0, y0 = MARGIN_L, MARGIN_T + plot_h
    out.append(
        f'<line x1="{x0}" y1="{y0}" x2="{MARGIN_L + plot_w}" y2="{y0}" stroke="black"/>'
    )
    out.append(f'<line x1="{x0}" y1="{MARGIN_T}" x2="{x0}" y2="{y0}" stroke="black"/>')
    for t in _ticks(x_lo, x_hi, 8):
        if t < x_lo - 1e-9 or t > x_hi + 1e-9:
            continue
        x = px(t)
        out.append(f'<line x1="{_fnum(x)}" y1="{y0}" x2="{_fnum(x)}" y2="{y0 + 5}" stroke="black"/>')
        out.append(
            f'<text x="{_fnum(x)}" y="{y0 + 18}" text-anchor="middle">{int(t)}</text>'
        )
    for t in y_ticks:
        y = py(t)
        label = f"{t:g}"
        out.append(f'<line x1="{x0 - 5}" y1="{_fnum(y)}" x2="{x0}" y2="{_fnum(y)}" stroke="black"/>')
        out.append(
            f'<text x="{x0 - 8}" y="{_fnum(y + 4)}" text-anchor="end">{label}</text>'
        )
    # series
    for i, (name, ys) in enumerate(plotted):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_fnum(px(x))},{_fnum(py(y))}" for x, y in zip(xs, ys))
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.8"/>'
        )
    # legend
    lx = MARGIN_L + plot_w - 150
    ly = MARGIN_T + 8
    for i, (name, _) in enumerate(plotted):
        color = PALETTE[i % len(PALETTE)]
        y = ly + i * 16
        out.append(
            f'<line x1="{lx}" y1="{y}" x2="{lx + 18}" y2="{y}" stroke="{color}" stroke-width="3"/>'
        )
        out.append(f'<text x="{lx + 24}" y="{y + 4}">{_xml_escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Field graph SVG / DOT
# ---------------------------------------------------------------------------


def emit_field_svg(graph: FieldGraph) -> str:
    """Circular field layout: target centered, neighbors ranked clockwise.

    Exactly one text element per node; edge opacity tracks similarity.
    """
    cx, cy = VIEW_W / 2, VIEW_H / 2
    radius = min(VIEW_W, VIEW_H) / 2 - 70
    coords: dict[str, tuple[float, float]] = {graph.target: (cx, cy)}
    ring = [lemma for lemma, _ in graph.nodes if lemma != graph.target]
    for i, lemma in enumerate(ring):
        angle = -math.pi / 2 + 2 * math.pi * i / max(len(ring), 1)
        coords[lemma] = (cx + radius * math.cos(angle), cy + radius * math.sin(angle))

    out: list[str] = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {VIEW_W} {VIEW_H}" '
        f'font-family="sans-serif" font-size="11">'
    )
    out.append(f'<rect width="{VIEW_W}" height="{VIEW_H}" fill="white"/>')
    for a, b, sim in graph.edges:
        xa, ya = coords[a]
        xb, yb = coords[b]
        opacity = min(1.0, max(0.12, sim))
        out.append(
            f'<line x1="{_fnum(xa)}" y1="{_fnum(ya)}" x2="{_fnum(xb)}" y2="{_fnum(yb)}" '
            f'stroke="#556" stroke-opacity="{opacity:.3f}"/>'
        )
    for lemma, sim in graph.nodes:
        x, y = coords[lemma]
        if lemma == graph.target:
            out.append(f'<circle cx="{_fnum(x)}" cy="{_fnum(y)}" r="6" fill="#2e8b57"/>')
            style = ' font-weight="bold"'
        else:
            out.append(f'<circle cx="{_fnum(x)}" cy="{_fnum(y)}" r="4" fill="#1f6fb4"/>')
            style = ""
        out.append(
            f'<text x="{_fnum(x + 7)}" y="{_fnum(y - 5)}"{style}>{_xml_escape(lemma)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_field_dot(graph: FieldGraph) -> str:
    """GraphViz DOT mirror; edge labels carry the similarity at 3 decimals."""
    out = ["graph field {"]
    out.append('  node [shape=ellipse fontname="Helvetica"];')
    for lemma, _ in graph.nodes:
        mark = " [penwidth=2]" if lemma == graph.target else ""
        out.append(f'  "{_dot_escape(lemma)}"{mark};')
    for a, b, sim in graph.edges:
        out.append(f'  "{_dot_escape(a)}" -- "{_dot_escape(b)}" [label="{sim:.3f}"];')
    out.append("}")
    return "\n".join(out) + "\n"


def field_json_payload(graph: FieldGraph) -> dict:
    return {
        "target": graph.target,
        "nodes": [{"lemma": lemma, "sim": round(sim, 6)} for lemma, sim in graph.nodes],
        "edges": [{"a": a, "b": b, "sim": round(sim, 6)} for a, b, sim in graph.edges],
    }


def _xml_escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')
