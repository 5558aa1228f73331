"""SVG export of front/Lagrangian projections and their shape diagnostics.

The emitter writes plain SVG 1.1 with exactly one polyline per figure so
projections can be machine-checked downstream.  The diagnostics quantify
the two visual signatures of the construction: direction reversals of the
front projection (zig-zags) and small oriented loops in the Lagrangian
projection.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np


def projection_svg(xs: np.ndarray, ys: np.ndarray, *, title: str,
                   xlabel: str, ylabel: str, width: int = 880,
                   height: int = 440, margin: int = 56) -> str:
    """Standalone SVG of a planar curve with annotated axis ranges."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1 or len(xs) < 2:
        raise ValueError("need two 1-d coordinate arrays of equal length >= 2")
    x0, x1 = float(np.min(xs)), float(np.max(xs))
    y0, y1 = float(np.min(ys)), float(np.max(ys))
    sx = (width - 2 * margin) / ((x1 - x0) or 1.0)
    sy = (height - 2 * margin) / ((y1 - y0) or 1.0)

    px = margin + (xs - x0) * sx
    py = height - margin - (ys - y0) * sy  # flip: SVG y grows downward
    pts = " ".join(f"{a:.6g},{b:.6g}" for a, b in zip(px, py))

    ax_y = height - margin
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.6g}" y="{margin / 2:.6g}" text-anchor="middle" '
        f'font-family="monospace" font-size="14">{escape(title)}</text>',
        f'<line x1="{margin}" y1="{ax_y}" x2="{width - margin}" y2="{ax_y}" '
        f'stroke="#888" stroke-width="1"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{ax_y}" '
        f'stroke="#888" stroke-width="1"/>',
        f'<text x="{margin}" y="{ax_y + 18}" text-anchor="middle" '
        f'font-family="monospace" font-size="11">{x0:.6g}</text>',
        f'<text x="{width - margin}" y="{ax_y + 18}" text-anchor="middle" '
        f'font-family="monospace" font-size="11">{x1:.6g}</text>',
        f'<text x="{margin - 6}" y="{ax_y + 4}" text-anchor="end" '
        f'font-family="monospace" font-size="11">{y0:.6g}</text>',
        f'<text x="{margin - 6}" y="{margin + 4}" text-anchor="end" '
        f'font-family="monospace" font-size="11">{y1:.6g}</text>',
        f'<text x="{width / 2:.6g}" y="{height - 10}" text-anchor="middle" '
        f'font-family="monospace" font-size="12">{escape(xlabel)}</text>',
        f'<text x="16" y="{height / 2:.6g}" text-anchor="middle" '
        f'font-family="monospace" font-size="12" '
        f'transform="rotate(-90 16 {height / 2:.6g})">{escape(ylabel)}</text>',
        f'<polyline points="{pts}" fill="none" stroke="#1242a5" stroke-width="0.8"/>',
        '</svg>',
    ]
    return "\n".join(lines) + "\n"


def polyline_points(svg_text: str) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates of the single polyline in an emitted SVG."""
    import xml.etree.ElementTree as ET

    root = ET.fromstring(svg_text)
    ns = {"svg": "http://www.w3.org/2000/svg"}
    polys = root.findall(".//svg:polyline", ns)
    if len(polys) != 1:
        raise ValueError(f"expected exactly one polyline, found {len(polys)}")
    pairs = polys[0].attrib["points"].split()
    xy = np.array([[float(c) for c in p.split(",")] for p in pairs])
    return xy[:, 0], xy[:, 1]


def count_direction_alternations(x: np.ndarray, deadband_rel: float = 1e-9) -> int:
    """Sign changes of the step direction along a coordinate (zig-zag count)."""
    x = np.asarray(x, dtype=float)
    dx = np.diff(x)
    band = deadband_rel * (np.max(np.abs(dx)) or 1.0)
    signs = np.sign(dx)
    signs = signs[np.abs(dx) > band]
    if len(signs) < 2:
        return 0
    return int(np.count_nonzero(np.diff(signs) != 0))


def _shoelace(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def find_signed_loops(x: np.ndarray, y: np.ndarray, window: int = 80) -> list[float]:
    """Signed areas of the small loops along a planar polyline.

    Loops are located near each direction reversal of x by searching for a
    local self-intersection within ``window`` polyline steps; each loop
    contributes the shoelace area of the enclosed polygon (sign = winding
    orientation).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dx = np.diff(x)
    neg = dx < 0
    # contiguous runs of backward motion
    starts = np.flatnonzero(neg & ~np.roll(neg, 1))
    ends = np.flatnonzero(neg & ~np.roll(neg, -1))
    if len(starts) == 0 or len(ends) == 0:
        return []
    if ends[0] < starts[0]:
        ends = ends[1:]
    areas: list[float] = []
    for s, e in zip(starts, ends):
        lo = max(0, s - window)
        hi = min(len(x) - 1, e + window)
        area = _first_loop_area(x, y, lo, hi)
        if area is not None:
            areas.append(area)
    return areas


def _first_loop_area(x, y, lo, hi):
    pts = np.stack([x[lo:hi + 1], y[lo:hi + 1]], axis=-1)
    m = len(pts) - 1
    if m < 3:
        return None
    p = pts[:-1]
    r = pts[1:] - pts[:-1]
    # pairwise segment intersection tests, vectorized over all (i, j)
    denom = r[:, None, 0] * r[None, :, 1] - r[:, None, 1] * r[None, :, 0]
    d = p[None, :, :] - p[:, None, :]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        t = (d[..., 0] * r[None, :, 1] - d[..., 1] * r[None, :, 0]) / denom
        u = (d[..., 0] * r[:, None, 1] - d[..., 1] * r[:, None, 0]) / denom
    ii, jj = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    hits = ((denom != 0) & (t >= 0) & (t <= 1) & (u >= 0) & (u <= 1)
            & (jj >= ii + 2) & ~((ii == 0) & (jj == m - 1)))
    if not np.any(hits):
        return None
    flat = np.argmax(hits)  # first hit in (i, j) lexicographic order
    i, j = np.unravel_index(flat, hits.shape)
    cross = p[i] + t[i, j] * r[i]
    poly = np.vstack([cross[None, :], pts[i + 1:j + 1]])
    return _shoelace(poly)


def count_sign_changes(values) -> int:
    v = np.asarray(values, dtype=float)
    v = v[v != 0]
    if len(v) < 2:
        return 0
    return int(np.count_nonzero(np.diff(np.sign(v)) != 0))
