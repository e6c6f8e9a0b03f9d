"""Minimal SVG scatter emitter for planar projections."""
from __future__ import annotations

import numpy as np

SIZE = 800
MARGIN = 40


def _hyperbola(delta: float, t: float, sign: int, ymax: float, steps: int = 120) -> list[tuple[float, float]]:
    """Points of |d1 - d2| = 2t on the side given by ``sign`` (+1 is nearer p2)."""
    a = t  # half the difference of focal distances
    c = delta / 2.0
    if a >= c:
        return []
    b = np.sqrt(c * c - a * a)
    ys = np.linspace(0.0, ymax, steps)
    xs = sign * a * np.sqrt(1.0 + (ys / b) ** 2)
    return list(zip(xs.tolist(), ys.tolist()))


def scatter_svg(x, y, exclusive, delta: float, t: float, title: str = "") -> str:
    """Solid markers can exclude the opposing semispace; hollow ones cannot."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    exclusive = np.asarray(exclusive, dtype=bool)
    xs = np.concatenate([x, [-delta / 2, delta / 2]])
    ys = np.concatenate([y, [0.0, 0.0]])
    span = max(float(xs.max() - xs.min()), float(ys.max() - ys.min()), 1e-12)
    scale = (SIZE - 2 * MARGIN) / span
    x0 = (xs.min() + xs.max()) / 2.0
    y0 = (ys.min() + ys.max()) / 2.0

    def px(u, v):
        return SIZE / 2 + (u - x0) * scale, SIZE / 2 - (v - y0) * scale

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect width="{SIZE}" height="{SIZE}" fill="white"/>',
    ]
    ax0 = px(xs.min(), 0.0)
    ax1 = px(xs.max(), 0.0)
    out.append(f'<line x1="{ax0[0]:.2f}" y1="{ax0[1]:.2f}" x2="{ax1[0]:.2f}" y2="{ax1[1]:.2f}" stroke="#888"/>')
    top = float(ys.max())
    for sx in (-t, t):
        a, b = px(sx, 0.0), px(sx, top)
        out.append(f'<line x1="{a[0]:.2f}" y1="{a[1]:.2f}" x2="{b[0]:.2f}" y2="{b[1]:.2f}" '
                   'stroke="#1f77b4" stroke-dasharray="6 4"/>')
    for sign in (-1, 1):
        pts = _hyperbola(delta, t, sign, top)
        if pts:
            path = " ".join(f"{u:.2f},{v:.2f}" for u, v in (px(*p) for p in pts))
            out.append(f'<polyline points="{path}" fill="none" stroke="#d62728" stroke-dasharray="2 3"/>')
    r = 3.0
    for u, v, solid in zip(x, y, exclusive):
        cx, cy = px(u, v)
        fill = "black" if solid else "none"
        out.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{r}" fill="{fill}" stroke="black" stroke-width="0.8"/>')
    for u in (-delta / 2, delta / 2):
        cx, cy = px(u, 0.0)
        out.append(f'<rect x="{cx - 5:.2f}" y="{cy - 5:.2f}" width="10" height="10" fill="#d62728"/>')
    # legend: a circle of radius t at plot scale
    lr = max(t * scale, 1.0)
    lx, ly = SIZE - MARGIN - lr, MARGIN + lr
    out.append(f'<circle cx="{lx:.2f}" cy="{ly:.2f}" r="{lr:.2f}" fill="none" stroke="#1f77b4"/>')
    out.append(f'<text x="{lx - lr:.2f}" y="{ly + lr + 14:.2f}" font-size="12" font-family="sans-serif">t = {t:g}</text>')
    if title:
        out.append(f'<text x="{MARGIN}" y="{MARGIN - 14}" font-size="14" font-family="sans-serif">{_escape(title)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
