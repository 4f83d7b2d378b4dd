"""Tiny dependency-free SVG line plots for curve outputs.

Just enough for DET/FDR curves: linear axes on [0, 1]-ish ranges, ticks,
a legend, and an optional chance diagonal. Output is deterministic for
fixed inputs (fixed float formatting, no timestamps).
"""

from __future__ import annotations

from collections.abc import Sequence
from xml.sax.saxutils import escape

PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#7f7f7f",
)

_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 64, 16, 40, 48


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def render_curves(
    path: str,
    curves: Sequence[tuple[str, Sequence[float], Sequence[float]]],
    *,
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    diagonal: bool = False,
    x_range: tuple[float, float] = (0.0, 1.0),
    y_range: tuple[float, float] = (0.0, 1.0),
    width: int = 720,
    height: int = 540,
) -> None:
    """Write an SVG file of labeled (xs, ys) polylines.

    ``diagonal`` draws the dashed y = x chance line (DET-curve reference).
    """
    x0, x1 = x_range
    y0, y1 = y_range
    pw = width - _MARGIN_L - _MARGIN_R
    ph = height - _MARGIN_T - _MARGIN_B

    def px(x: float) -> str:
        return _fmt(_MARGIN_L + (x - x0) / (x1 - x0) * pw)

    def py(y: float) -> str:
        return _fmt(_MARGIN_T + (1.0 - (y - y0) / (y1 - y0)) * ph)

    parts: list[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">'
    )
    parts.append(f'<rect width="{width}" height="{height}" fill="white"/>')
    if title:
        parts.append(
            f'<text x="{width / 2:.0f}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>'
        )

    # frame and ticks
    parts.append(
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{pw}" height="{ph}" '
        f'fill="none" stroke="#333" stroke-width="1"/>'
    )
    n_ticks = 6
    for i in range(n_ticks):
        fx = x0 + (x1 - x0) * i / (n_ticks - 1)
        fy = y0 + (y1 - y0) * i / (n_ticks - 1)
        gx, gy = px(fx), py(fy)
        parts.append(
            f'<line x1="{gx}" y1="{_MARGIN_T + ph}" x2="{gx}" y2="{_MARGIN_T + ph + 5}" stroke="#333"/>'
        )
        parts.append(
            f'<text x="{gx}" y="{_MARGIN_T + ph + 18}" text-anchor="middle">{fx:g}</text>'
        )
        parts.append(f'<line x1="{_MARGIN_L - 5}" y1="{gy}" x2="{_MARGIN_L}" y2="{gy}" stroke="#333"/>')
        parts.append(
            f'<text x="{_MARGIN_L - 8}" y="{gy}" text-anchor="end" dominant-baseline="middle">{fy:g}</text>'
        )
        if 0 < i < n_ticks - 1:
            parts.append(
                f'<line x1="{gx}" y1="{_MARGIN_T}" x2="{gx}" y2="{_MARGIN_T + ph}" '
                f'stroke="#ddd" stroke-width="0.5"/>'
            )
            parts.append(
                f'<line x1="{_MARGIN_L}" y1="{gy}" x2="{_MARGIN_L + pw}" y2="{gy}" '
                f'stroke="#ddd" stroke-width="0.5"/>'
            )
    if xlabel:
        parts.append(
            f'<text x="{_MARGIN_L + pw / 2:.0f}" y="{height - 10}" text-anchor="middle">{escape(xlabel)}</text>'
        )
    if ylabel:
        cy = _MARGIN_T + ph / 2
        parts.append(
            f'<text x="16" y="{cy:.0f}" text-anchor="middle" transform="rotate(-90 16 {cy:.0f})">'
            f"{escape(ylabel)}</text>"
        )

    if diagonal:
        parts.append(
            f'<line x1="{px(max(x0, y0))}" y1="{py(max(x0, y0))}" '
            f'x2="{px(min(x1, y1))}" y2="{py(min(x1, y1))}" '
            f'stroke="#999" stroke-width="1" stroke-dasharray="6,4"/>'
        )

    for i, (label, xs, ys) in enumerate(curves):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{px(float(x))},{py(float(y))}" for x, y in zip(xs, ys))
        if pts:
            parts.append(
                f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.6"/>'
            )

    # legend, top-left inside the frame
    lx, ly = _MARGIN_L + 12, _MARGIN_T + 14
    for i, (label, _, _) in enumerate(curves):
        color = PALETTE[i % len(PALETTE)]
        yy = ly + i * 17
        parts.append(
            f'<line x1="{lx}" y1="{yy - 4}" x2="{lx + 22}" y2="{yy - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(f'<text x="{lx + 28}" y="{yy}">{escape(str(label))}</text>')
    if diagonal:
        yy = ly + len(curves) * 17
        parts.append(
            f'<line x1="{lx}" y1="{yy - 4}" x2="{lx + 22}" y2="{yy - 4}" '
            f'stroke="#999" stroke-width="1" stroke-dasharray="6,4"/>'
        )
        parts.append(f'<text x="{lx + 28}" y="{yy}">coin flip</text>')

    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
