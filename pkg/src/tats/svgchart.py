"""Minimal standalone SVG line charts, no plotting dependency."""

from __future__ import annotations

from .errors import ConfigError

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2")


def _escape(text: str) -> str:
    return (
        str(text)
        .replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _fmt(value: float) -> str:
    return f"{value:.6g}"


def line_chart(
    title: str,
    series: list[tuple[str, list[float], list[float]]],
    x_label: str = "",
    y_label: str = "",
    width: int = 760,
    height: int = 440,
) -> str:
    """Render labeled (x, y) polylines into an SVG document string."""
    if not series:
        raise ConfigError("a chart needs at least one series")
    for label, xs, ys in series:
        if len(xs) != len(ys) or not xs:
            raise ConfigError(f"series '{label}' must have matching non-empty x and y")
    margin_left, margin_right, margin_top, margin_bottom = 64, 20, 44, 52
    plot_w = width - margin_left - margin_right
    plot_h = height - margin_top - margin_bottom
    all_x = [v for _, xs, _ in series for v in xs]
    all_y = [v for _, _, ys in series for v in ys]
    x_lo, x_hi = min(all_x), max(all_x)
    y_lo, y_hi = min(all_y), max(all_y)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    def sx(v: float) -> float:
        return margin_left + (v - x_lo) / (x_hi - x_lo) * plot_w

    def sy(v: float) -> float:
        return margin_top + (1.0 - (v - y_lo) / (y_hi - y_lo)) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="24" text-anchor="middle" font-size="15">{_escape(title)}</text>',
        f'<rect x="{margin_left}" y="{margin_top}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#444"/>',
    ]
    n_ticks = 5
    for i in range(n_ticks):
        frac = i / (n_ticks - 1)
        xv = x_lo + frac * (x_hi - x_lo)
        yv = y_lo + frac * (y_hi - y_lo)
        px = sx(xv)
        py = sy(yv)
        parts.append(
            f'<line x1="{px:.1f}" y1="{margin_top + plot_h}" x2="{px:.1f}" '
            f'y2="{margin_top + plot_h + 5}" stroke="#444"/>'
        )
        parts.append(
            f'<text x="{px:.1f}" y="{margin_top + plot_h + 18}" text-anchor="middle">'
            f"{_fmt(xv)}</text>"
        )
        parts.append(
            f'<line x1="{margin_left - 5}" y1="{py:.1f}" x2="{margin_left}" y2="{py:.1f}" '
            'stroke="#444"/>'
        )
        parts.append(
            f'<text x="{margin_left - 8}" y="{py + 4:.1f}" text-anchor="end">{_fmt(yv)}</text>'
        )
    if x_label:
        parts.append(
            f'<text x="{margin_left + plot_w / 2:.1f}" y="{height - 12}" '
            f'text-anchor="middle">{_escape(x_label)}</text>'
        )
    if y_label:
        cy = margin_top + plot_h / 2
        parts.append(
            f'<text x="16" y="{cy:.1f}" text-anchor="middle" '
            f'transform="rotate(-90 16 {cy:.1f})">{_escape(y_label)}</text>'
        )
    for idx, (label, xs, ys) in enumerate(series):
        color = _COLORS[idx % len(_COLORS)]
        points = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
        parts.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.6"/>'
        )
        lx = margin_left + plot_w - 150
        ly = margin_top + 16 + 16 * idx
        parts.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{lx + 28}" y="{ly}">{_escape(label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
