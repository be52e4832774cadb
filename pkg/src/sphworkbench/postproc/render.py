"""Deterministic SVG scatter snapshots of particle frames.

Rendering is plain string assembly (no plotting library), so identical
input frames produce identical bytes.
"""

from __future__ import annotations

import numpy as np

from ..particles import ParticleFrame

__all__ = ["UnknownField", "render_snapshot", "FIELDS", "PLANES"]

FIELDS = ("speed", "vx", "vy", "vz", "rho", "p", "mass", "group", "kind")
PLANES = {"xz": (0, 2), "xy": (0, 1), "yz": (1, 2)}

W, H = 640, 480
MARGIN = 56
BAR_W = 14


class UnknownField(Exception):
    pass


def _field(frame: ParticleFrame, name: str) -> np.ndarray:
    if name == "speed":
        return np.linalg.norm(frame.vel, axis=1)
    if name in ("vx", "vy", "vz"):
        return frame.vel[:, ("vx", "vy", "vz").index(name)]
    if name == "rho":
        return frame.rho
    if name == "p":
        return frame.p
    if name == "mass":
        return frame.mass
    if name == "group":
        return frame.group.astype(np.float64)
    if name == "kind":
        return frame.kind.astype(np.float64)
    raise UnknownField(f"unknown field {name!r}; have {FIELDS}")


def _g(x: float) -> str:
    return f"{x:.6g}"


def _color(t: float) -> str:
    """Linear blue -> red map on t in [0, 1]."""
    r = int(round(255 * t))
    b = int(round(255 * (1.0 - t)))
    g = int(round(64 * (1.0 - abs(2.0 * t - 1.0))))
    return f"#{r:02x}{g:02x}{b:02x}"


def render_snapshot(frame: ParticleFrame, color_by: str = "speed",
                    plane: str = "xz") -> str:
    """SVG scatter of the frame projected onto an axis-aligned plane."""
    if plane not in PLANES:
        raise ValueError(f"plane must be one of {sorted(PLANES)}, got {plane!r}")
    ax_u, ax_v = PLANES[plane]
    values = _field(frame, color_by)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
    ]
    plot_w = W - 2 * MARGIN - 3 * BAR_W
    plot_h = H - 2 * MARGIN
    out.append(
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="black"/>')

    if frame.n > 0:
        u = frame.pos[:, ax_u]
        v = frame.pos[:, ax_v]
        u0, u1 = float(u.min()), float(u.max())
        v0, v1 = float(v.min()), float(v.max())
        du = (u1 - u0) or 1.0
        dv = (v1 - v0) or 1.0
        span = max(du, dv)
        vmin, vmax = float(values.min()), float(values.max())
        vspan = (vmax - vmin) or 1.0

        sx = plot_w / span
        sy = plot_h / span
        scale = min(sx, sy)
        for k in range(frame.n):
            px = MARGIN + (u[k] - u0) * scale
            py = H - MARGIN - (v[k] - v0) * scale
            t = (values[k] - vmin) / vspan if vmax > vmin else 0.5
            out.append(
                f'<circle cx="{_g(px)}" cy="{_g(py)}" r="2" fill="{_color(t)}"/>')

        # color bar with min/max labels
        bar_x = W - MARGIN - 2 * BAR_W
        steps = 24
        for s in range(steps):
            t = 1.0 - s / (steps - 1)
            y = MARGIN + s * plot_h / steps
            out.append(
                f'<rect x="{bar_x}" y="{_g(y)}" width="{BAR_W}" '
                f'height="{_g(plot_h / steps + 0.5)}" fill="{_color(t)}"/>')
        out.append(
            f'<text x="{bar_x + BAR_W + 4}" y="{MARGIN + 10}" font-size="11">'
            f'{_g(vmax)}</text>')
        out.append(
            f'<text x="{bar_x + BAR_W + 4}" y="{H - MARGIN}" font-size="11">'
            f'{_g(vmin)}</text>')
        out.append(
            f'<text x="{MARGIN}" y="{MARGIN - 8}" font-size="12">'
            f'{color_by}, t = {_g(frame.time)} s</text>')
        out.append(
            f'<text x="{MARGIN}" y="{H - MARGIN + 16}" font-size="11">'
            f'{plane[0]} from {_g(u0)} to {_g(u1)} m</text>')
        out.append(
            f'<text x="{MARGIN - 48}" y="{MARGIN + 12}" font-size="11">'
            f'{plane[1]} to {_g(v1)} m</text>')
    else:
        out.append(
            f'<text x="{W // 2 - 40}" y="{H // 2}" font-size="12">empty frame</text>')

    out.append("</svg>")
    return "\n".join(out) + "\n"
