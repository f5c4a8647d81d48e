"""Dependency-light static SVG line plots (log-log), two series max."""

from __future__ import annotations

import numpy as np

_W, _H = 640, 440
_ML, _MR, _MT, _MB = 72, 16, 34, 52  # margins
_COLORS = ("#1f77b4", "#d62728")


def _decades(lo: float, hi: float):
    first = int(np.floor(np.log10(lo)))
    last = int(np.ceil(np.log10(hi)))
    return [10.0**e for e in range(first, last + 1)]


def _fmt(v: float) -> str:
    e = int(np.round(np.log10(v)))
    return f"1e{e}" if abs(e) > 2 else f"{v:g}"


def line_plot_svg(series, xlabel: str, ylabel: str, title: str = "") -> str:
    """Render up to two (x, y, label) series on log-log axes; returns SVG text.

    Nonpositive points are dropped (log scale). Series are polylines with
    small circle markers.
    """
    if not 1 <= len(series) <= 2:
        raise ValueError("plot supports one or two series")
    clean = []
    for x, y, label in series:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        keep = (x > 0) & (y > 0) & np.isfinite(x) & np.isfinite(y)
        if keep.sum() == 0:
            raise ValueError(f"series {label!r} has no positive finite points")
        clean.append((x[keep], y[keep], label))

    x_lo = min(x.min() for x, _, _ in clean)
    x_hi = max(x.max() for x, _, _ in clean)
    y_lo = min(y.min() for _, y, _ in clean)
    y_hi = max(y.max() for _, y, _ in clean)
    if x_lo == x_hi:
        x_lo, x_hi = x_lo / 2, x_hi * 2
    if y_lo == y_hi:
        y_lo, y_hi = y_lo / 2, y_hi * 2

    lx0, lx1 = np.log10(x_lo), np.log10(x_hi)
    ly0, ly1 = np.log10(y_lo), np.log10(y_hi)
    pw, ph = _W - _ML - _MR, _H - _MT - _MB

    def X(v):
        return _ML + (np.log10(v) - lx0) / (lx1 - lx0) * pw

    def Y(v):
        return _MT + (ly1 - np.log10(v)) / (ly1 - ly0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="none" '
        'stroke="#333" stroke-width="1"/>',
    ]
    if title:
        out.append(f'<text x="{_W / 2:.0f}" y="20" text-anchor="middle" '
                   f'font-size="14">{title}</text>')

    for v in _decades(x_lo, x_hi):
        if not x_lo <= v <= x_hi:
            continue
        px = X(v)
        out.append(f'<line x1="{px:.1f}" y1="{_MT}" x2="{px:.1f}" '
                   f'y2="{_MT + ph}" stroke="#ddd" stroke-width="0.7"/>')
        out.append(f'<text x="{px:.1f}" y="{_MT + ph + 16}" '
                   f'text-anchor="middle">{_fmt(v)}</text>')
    for v in _decades(y_lo, y_hi):
        if not y_lo <= v <= y_hi:
            continue
        py = Y(v)
        out.append(f'<line x1="{_ML}" y1="{py:.1f}" x2="{_ML + pw}" '
                   f'y2="{py:.1f}" stroke="#ddd" stroke-width="0.7"/>')
        out.append(f'<text x="{_ML - 6}" y="{py + 4:.1f}" '
                   f'text-anchor="end">{_fmt(v)}</text>')

    out.append(f'<text x="{_ML + pw / 2:.0f}" y="{_H - 12}" '
               f'text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="16" y="{_MT + ph / 2:.0f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {_MT + ph / 2:.0f})">{ylabel}</text>')

    for i, (x, y, label) in enumerate(clean):
        color = _COLORS[i]
        pts = " ".join(f"{X(a):.1f},{Y(b):.1f}" for a, b in zip(x, y))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                   'stroke-width="1.5"/>')
        step = max(1, x.size // 40)
        for a, b in zip(x[::step], y[::step]):
            out.append(f'<circle cx="{X(a):.1f}" cy="{Y(b):.1f}" r="2.4" '
                       f'fill="{color}"/>')
        if label:
            ly = _MT + 16 + 16 * i
            out.append(f'<line x1="{_ML + pw - 130}" y1="{ly - 4}" '
                       f'x2="{_ML + pw - 108}" y2="{ly - 4}" stroke="{color}" '
                       'stroke-width="1.5"/>')
            out.append(f'<text x="{_ML + pw - 102}" y="{ly}">{label}</text>')

    out.append("</svg>")
    return "\n".join(out)
