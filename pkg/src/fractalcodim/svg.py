"""Minimal deterministic SVG writer for chirp plots (no plotting dependency)."""

import numpy as np

WIDTH = 800
HEIGHT = 600
MARGIN = 60


def _fmt(x):
    return f"{x:.6g}"


def _ticks(lo, hi, n=5):
    return np.linspace(lo, hi, n)


def write_chirp_svg(path, segments, curve_xy, title):
    """Write an 800x600 SVG of chirp segments plus the critical curve.

    segments: (S, 3) array of (x_left, x_right, y); curve_xy: (C, 2) polyline
    of the critical curve in the same model coordinates.
    """
    segments = np.asarray(segments, dtype=float)
    curve_xy = np.asarray(curve_xy, dtype=float)
    xs = np.concatenate([segments[:, 0], segments[:, 1], curve_xy[:, 0]])
    ys = np.concatenate([segments[:, 2], curve_xy[:, 1]])
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_lo, y_hi = float(ys.min()), float(ys.max())
    x_pad = 0.05 * (x_hi - x_lo or 1.0)
    y_pad = 0.05 * (y_hi - y_lo or 1.0)
    x_lo -= x_pad
    x_hi += x_pad
    y_lo -= y_pad
    y_hi += y_pad

    def px(x):
        return MARGIN + (x - x_lo) / (x_hi - x_lo) * (WIDTH - 2 * MARGIN)

    def py(y):
        return HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - 2 * MARGIN)

    out = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">'
    )
    out.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    out.append(
        f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" font-size="16" '
        f'font-family="sans-serif">{title}</text>'
    )
    # axes
    out.append(
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="black"/>'
    )
    out.append(
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>'
    )
    for t in _ticks(x_lo, x_hi):
        x = px(t)
        out.append(
            f'<line x1="{_fmt(x)}" y1="{HEIGHT - MARGIN}" x2="{_fmt(x)}" '
            f'y2="{HEIGHT - MARGIN + 6}" stroke="black"/>'
        )
        out.append(
            f'<text x="{_fmt(x)}" y="{HEIGHT - MARGIN + 20}" text-anchor="middle" '
            f'font-size="11" font-family="sans-serif">{_fmt(t)}</text>'
        )
    for t in _ticks(y_lo, y_hi):
        y = py(t)
        out.append(
            f'<line x1="{MARGIN - 6}" y1="{_fmt(y)}" x2="{MARGIN}" y2="{_fmt(y)}" stroke="black"/>'
        )
        out.append(
            f'<text x="{MARGIN - 9}" y="{_fmt(y + 4)}" text-anchor="end" '
            f'font-size="11" font-family="sans-serif">{_fmt(t)}</text>'
        )
    # critical curve
    pts = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in curve_xy)
    out.append(f'<polyline points="{pts}" fill="none" stroke="#c02020" stroke-width="1.5"/>')
    # chirp segments
    for x0, x1, y in segments:
        out.append(
            f'<line x1="{_fmt(px(x0))}" y1="{_fmt(py(y))}" x2="{_fmt(px(x1))}" '
            f'y2="{_fmt(py(y))}" stroke="#2040c0" stroke-width="0.6"/>'
        )
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")
