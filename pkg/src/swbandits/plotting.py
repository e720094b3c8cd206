"""Minimal static SVG line charts (no plotting backend required)."""
from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

__all__ = ["line_chart_svg", "regret_svg", "sweep_svg"]

_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"]
_W, _H = 720, 440
_L, _R, _TOP, _B = 80, 190, 40, 60


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(round(v, 12))
        v += step
    return ticks


def _fmt_tick(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e5 or abs(v) < 1e-3:
        return f"{v:.1e}"
    return f"{v:g}"


def line_chart_svg(
    series: Sequence[tuple[str, np.ndarray, np.ndarray, np.ndarray | None]],
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    log_x: bool = False,
    log_y: bool = False,
) -> str:
    """Render ``(label, x, y, band)`` series; ``band`` is a half-width drawn as a shaded area."""
    def tx(v):
        return np.log10(v) if log_x else v

    def ty(v):
        return np.log10(np.maximum(v, 1e-12)) if log_y else v

    xs = np.concatenate([tx(np.asarray(s[1], float)) for s in series])
    lows, highs = [], []
    for _, _, y, band in series:
        y = np.asarray(y, float)
        b = np.zeros_like(y) if band is None else np.asarray(band, float)
        lows.append(ty(np.maximum(y - b, 1e-12) if log_y else y - b))
        highs.append(ty(y + b))
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(np.min(np.concatenate(lows))), float(np.max(np.concatenate(highs)))
    if not log_y:
        y0 = min(y0, 0.0)
    if x1 <= x0:
        x1 = x0 + 1.0
    if y1 <= y0:
        y1 = y0 + 1.0
    pw, ph = _W - _L - _R, _H - _TOP - _B

    def px(v):
        return _L + (v - x0) / (x1 - x0) * pw

    def py(v):
        return _TOP + ph - (v - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}" '
        'font-family="sans-serif" font-size="12">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_L + pw / 2:.1f}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
    ]
    for v in _nice_ticks(y0, y1):
        y = py(v)
        label = _fmt_tick(10**v) if log_y else _fmt_tick(v)
        out.append(f'<line x1="{_L}" y1="{y:.2f}" x2="{_L + pw}" y2="{y:.2f}" stroke="#e5e5e5"/>')
        out.append(f'<text x="{_L - 6}" y="{y + 4:.2f}" text-anchor="end">{label}</text>')
    for v in _nice_ticks(x0, x1):
        x = px(v)
        label = _fmt_tick(10**v) if log_x else _fmt_tick(v)
        out.append(f'<line x1="{x:.2f}" y1="{_TOP + ph}" x2="{x:.2f}" y2="{_TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{_TOP + ph + 18}" text-anchor="middle">{label}</text>')
    out.append(f'<rect x="{_L}" y="{_TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    out.append(f'<text x="{_L + pw / 2:.1f}" y="{_H - 15}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="18" y="{_TOP + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {_TOP + ph / 2:.1f})">{escape(ylabel)}</text>'
    )
    for k, (label, x, y, band) in enumerate(series):
        color = _PALETTE[k % len(_PALETTE)]
        x = tx(np.asarray(x, float))
        y = np.asarray(y, float)
        if band is not None:
            b = np.asarray(band, float)
            lo = ty(np.maximum(y - b, 1e-12) if log_y else y - b)
            hi = ty(y + b)
            pts = [f"{px(a):.2f},{py(c):.2f}" for a, c in zip(x, hi)]
            pts += [f"{px(a):.2f},{py(c):.2f}" for a, c in zip(x[::-1], lo[::-1])]
            out.append(f'<polygon points="{" ".join(pts)}" fill="{color}" fill-opacity="0.2" stroke="none"/>')
        pts = " ".join(f"{px(a):.2f},{py(c):.2f}" for a, c in zip(x, ty(y)))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.6"/>')
        ly = _TOP + 14 + 18 * k
        lx = _L + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 20}" y2="{ly - 4}" stroke="{color}" stroke-width="3"/>')
        out.append(f'<text x="{lx + 26}" y="{ly}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def regret_svg(aggregates, decimate_step: int = 1, log_scale: bool = False) -> str:
    """Mean cumulative regret with a +/- one standard error band per policy."""
    series = []
    for agg in aggregates:
        T = agg.mean_regret.size
        rounds = np.arange(1, T + 1, decimate_step)
        if rounds[-1] != T:
            rounds = np.append(rounds, T)
        series.append((agg.label, rounds, agg.mean_regret[rounds - 1], agg.stderr[rounds - 1]))
    return line_chart_svg(series, "Cumulative dynamic regret", "round", "mean regret", log_y=log_scale)


def sweep_svg(rows, label: str = "") -> str:
    taus = np.array([r.tau for r in rows], float)
    order = np.argsort(taus)
    reg = np.array([r.final_regret for r in rows])[order]
    se = np.array([r.stderr for r in rows])[order]
    return line_chart_svg([(label or "final regret", taus[order], reg, se)],
                          "Final regret versus window length", "window length tau", "final regret",
                          log_x=True)
