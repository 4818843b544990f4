"""Peg cross-sections and small rotation helpers.

Pegs are prisms over a planar cross-section. A cross-section is either an
exact circle (cylinder) or a simple polygon; both answer the same two
questions needed by the contact model: where are boundary sample points,
and how far outside the section does a query point lie (with the inward
push-back direction).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SHAPE_KINDS = ("cylinder", "cuboid", "hexagon", "triangle", "trapezoid", "star")

# training shapes in easy-to-hard unlock order; trapezoid/star are held out
TRAIN_SHAPES = ("cylinder", "cuboid", "hexagon", "triangle")
EVAL_SHAPES = ("trapezoid", "star")

STAR_RADIUS_RATIO = 2.5        # outer/inner radius of the 5-point star
TRAPEZOID_TOP_RATIO = 0.7      # top/bottom width of the isosceles trapezoid
CIRCLE_SAMPLES = 12


@dataclass(frozen=True)
class PegShape:
    """Peg cross-section family plus circumscribed radius in meters."""

    kind: str
    radius: float

    def __post_init__(self):
        if self.kind not in SHAPE_KINDS:
            raise ValueError(f"unknown peg shape kind: {self.kind!r}")
        if not self.radius > 0:
            raise ValueError("peg radius must be positive")


def rotvec_to_matrix(rv: np.ndarray) -> np.ndarray:
    """Rodrigues rotation-vector to 3x3 matrix."""
    angle = float(np.linalg.norm(rv))
    if angle < 1e-12:
        return np.eye(3)
    axis = rv / angle
    kx, ky, kz = axis
    k = np.array([[0.0, -kz, ky], [kz, 0.0, -kx], [-ky, kx, 0.0]])
    return np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)


def wrap_rotvec(rv: np.ndarray) -> np.ndarray:
    """Re-express a rotation vector with magnitude <= pi."""
    angle = float(np.linalg.norm(rv))
    if angle <= np.pi or angle < 1e-12:
        return rv
    wrapped = angle % (2.0 * np.pi)
    if wrapped > np.pi:
        wrapped -= 2.0 * np.pi
    return rv * (wrapped / angle)


def _polygon_vertices(kind: str, radius: float) -> np.ndarray:
    """Counter-clockwise vertices of the cross-section polygon."""
    if kind == "cylinder":
        ang = np.linspace(0.0, 2.0 * np.pi, CIRCLE_SAMPLES, endpoint=False)
        return radius * np.stack([np.cos(ang), np.sin(ang)], axis=1)
    if kind == "cuboid":
        ang = np.deg2rad([45.0, 135.0, 225.0, 315.0])
    elif kind == "hexagon":
        ang = np.deg2rad(np.arange(6) * 60.0)
    elif kind == "triangle":
        ang = np.deg2rad([90.0, 210.0, 330.0])
    elif kind == "star":
        outer = np.deg2rad(90.0 + 72.0 * np.arange(5))
        inner = outer + np.deg2rad(36.0)
        pts = []
        for o, i in zip(outer, inner):
            pts.append([np.cos(o), np.sin(o)])
            pts.append([np.cos(i) / STAR_RADIUS_RATIO, np.sin(i) / STAR_RADIUS_RATIO])
        return radius * np.asarray(pts)
    elif kind == "trapezoid":
        raw = np.array(
            [
                [-1.0, -0.75],
                [1.0, -0.75],
                [TRAPEZOID_TOP_RATIO, 0.75],
                [-TRAPEZOID_TOP_RATIO, 0.75],
            ]
        )
        raw = raw - _polygon_centroid(raw)
        return radius * raw / np.max(np.linalg.norm(raw, axis=1))
    else:
        raise ValueError(f"unknown peg shape kind: {kind!r}")
    return radius * np.stack([np.cos(ang), np.sin(ang)], axis=1)


def _polygon_centroid(verts: np.ndarray) -> np.ndarray:
    x, y = verts[:, 0], verts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = cross.sum() / 2.0
    cx = ((x + xn) * cross).sum() / (6.0 * area)
    cy = ((y + yn) * cross).sum() / (6.0 * area)
    return np.array([cx, cy])


def points_in_polygon(verts: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Even-odd inside test; works for non-convex polygons (star)."""
    a = verts
    b = np.roll(verts, -1, axis=0)
    px = pts[:, 0][:, None]
    py = pts[:, 1][:, None]
    ay, by = a[:, 1][None, :], b[:, 1][None, :]
    ax, bx = a[:, 0][None, :], b[:, 0][None, :]
    straddles = (ay > py) != (by > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_cross = ax + (py - ay) * (bx - ax) / (by - ay)
    hits = straddles & (px < x_cross)
    return hits.sum(axis=1) % 2 == 1


def polygon_outside(verts: np.ndarray, pts: np.ndarray):
    """Distance from points to the polygon (0 inside) and the nearest
    boundary point, used as the push-back target for wall contacts."""
    a = verts
    ab = np.roll(verts, -1, axis=0) - a
    ap = pts[:, None, :] - a[None, :, :]
    denom = np.einsum("ej,ej->e", ab, ab)
    t = np.clip(np.einsum("pej,ej->pe", ap, ab) / denom, 0.0, 1.0)
    closest = a[None, :, :] + t[:, :, None] * ab[None, :, :]
    d = np.linalg.norm(pts[:, None, :] - closest, axis=2)
    idx = np.argmin(d, axis=1)
    rows = np.arange(len(pts))
    dist = d[rows, idx]
    nearest = closest[rows, idx]
    inside = points_in_polygon(verts, pts)
    dist = np.where(inside, 0.0, dist)
    return dist, nearest


class CrossSection:
    """Boundary sampling and outside-distance queries for one peg shape."""

    def __init__(self, shape: PegShape):
        self.shape = shape
        self.is_circle = shape.kind == "cylinder"
        self.vertices = _polygon_vertices(shape.kind, shape.radius)
        if self.is_circle:
            self.boundary = self.vertices
        else:
            mids = 0.5 * (self.vertices + np.roll(self.vertices, -1, axis=0))
            self.boundary = np.concatenate([self.vertices, mids], axis=0)

    def outside_distance(self, pts: np.ndarray):
        """Return (distance outside, inward unit direction) per point.

        Distance is 0 for points inside the section; the inward direction
        is arbitrary (zeros) there.
        """
        if self.is_circle:
            r = np.linalg.norm(pts, axis=1)
            dist = np.maximum(0.0, r - self.shape.radius)
            safe = np.where(r > 1e-12, r, 1.0)
            inward = -pts / safe[:, None]
            inward[dist <= 0.0] = 0.0
            return dist, inward
        dist, nearest = polygon_outside(self.vertices, pts)
        delta = nearest - pts
        norm = np.linalg.norm(delta, axis=1)
        safe = np.where(norm > 1e-12, norm, 1.0)
        inward = delta / safe[:, None]
        inward[dist <= 0.0] = 0.0
        return dist, inward
