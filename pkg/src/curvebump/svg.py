"""Minimal deterministic SVG export for 1D and 2D results.

Draws the data points (shaded by estimated density), the bump boundaries
and, when present, the confidence-region boundaries.  3D results export
mesh JSON only and are not rendered here.
"""

import numpy as np

CANVAS = 640
MARGIN = 40

# light -> dark blue ramp for density shading
_RAMP_LO = (198, 219, 239)
_RAMP_HI = (8, 48, 107)


def _blend(t):
    rgb = [round(lo + t * (hi - lo)) for lo, hi in zip(_RAMP_LO, _RAMP_HI)]
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _density_colors(density):
    density = np.asarray(density, dtype=float)
    if density.size == 0:
        return []
    lo, hi = density.min(), density.max()
    span = hi - lo if hi > lo else 1.0
    return [_blend(t) for t in (density - lo) / span]


class _Scene:
    def __init__(self, lower, upper):
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        self.parts = []

    def map_xy(self, xy):
        span = self.upper - self.lower
        t = (np.atleast_2d(xy) - self.lower) / span
        px = MARGIN + t[:, 0] * (CANVAS - 2 * MARGIN)
        py = CANVAS - MARGIN - t[:, 1] * (CANVAS - 2 * MARGIN)
        return px, py

    def circles(self, xy, colors, radius=2.5):
        px, py = self.map_xy(xy)
        for x, y, c in zip(px, py, colors):
            self.parts.append(
                f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{radius}" fill="{c}" fill-opacity="0.8"/>'
            )

    def polyline(self, xy, color, width=2.0):
        px, py = self.map_xy(xy)
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(px, py))
        self.parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="{width}"/>'
        )

    def vline(self, x, color, width=1.5, dashed=False):
        px, _ = self.map_xy([[x, self.lower[1]]])
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        self.parts.append(
            f'<line x1="{px[0]:.2f}" y1="{MARGIN}" x2="{px[0]:.2f}" y2="{CANVAS - MARGIN}" '
            f'stroke="{color}" stroke-width="{width}"{dash}/>'
        )

    def to_svg(self):
        body = "\n".join(self.parts)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" '
            f'viewBox="0 0 {CANVAS} {CANVAS}">\n'
            f'<rect width="{CANVAS}" height="{CANVAS}" fill="white"/>\n'
            f"{body}\n</svg>\n"
        )


def render_svg(field, sample_points, density, boundaries):
    """Render a 1D or 2D scene; ``boundaries`` is a list of (geometry, color)."""
    d = field.grid.d
    if d == 2:
        return _render_2d(field, sample_points, density, boundaries)
    if d == 1:
        return _render_1d(field, sample_points, boundaries)
    raise ValueError("SVG export covers d <= 2 only; use the mesh JSON for d=3")


def _render_2d(field, sample_points, density, boundaries):
    scene = _Scene(field.grid.lower, field.grid.upper)
    if sample_points is not None and len(sample_points):
        scene.circles(sample_points, _density_colors(density))
    for geometry, color in boundaries:
        for line in geometry.polylines:
            scene.polyline(line, color)
    return scene.to_svg()


def _render_1d(field, sample_points, boundaries):
    values = field.values.ravel()
    axis = field.grid.axes()[0]
    vmax = max(np.abs(values).max(), 1e-300)
    scene = _Scene(
        [field.grid.lower[0], -1.05 * vmax], [field.grid.upper[0], 1.05 * vmax]
    )
    scene.polyline(np.column_stack([axis, np.zeros_like(axis)]), "#bbbbbb", width=1.0)
    scene.polyline(np.column_stack([axis, values]), "#444444", width=1.5)
    if sample_points is not None and len(sample_points):
        xs = np.asarray(sample_points, dtype=float).reshape(-1)
        rug = np.column_stack([xs, np.full_like(xs, -1.0 * vmax)])
        scene.circles(rug, ["#08306b"] * len(xs), radius=1.5)
    for geometry, color in boundaries:
        for root in geometry.points.reshape(-1):
            scene.vline(root, color, dashed=True)
    return scene.to_svg()
