"""Planar and 3D geometry primitives shared by every engine.

Coordinate convention: right-handed, +z is up, the floor sits at z=0.
Objects and planes rotate about z only (yaw), so all footprint math is
oriented-rectangle math in the horizontal plane plus vertical intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class GeometryError(ValueError):
    """Raised for non-finite or otherwise malformed geometric input."""


def _require_finite(name: str, *values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise GeometryError(f"{name} has non-finite component {v!r}")


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float

    def __post_init__(self) -> None:
        _require_finite("Vec2", self.x, self.y)

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def scaled(self, k: float) -> "Vec2":
        return Vec2(self.x * k, self.y * k)

    def dot(self, other: "Vec2") -> float:
        return self.x * other.x + self.y * other.y

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def normalized(self) -> "Vec2":
        n = self.norm()
        if n < 1e-12:
            raise GeometryError("cannot normalize zero-length Vec2")
        return Vec2(self.x / n, self.y / n)

    def perp_left(self) -> "Vec2":
        """90-degree counterclockwise rotation (the 'left' of a heading)."""
        return Vec2(-self.y, self.x)

    def rotated(self, theta: float) -> "Vec2":
        c, s = math.cos(theta), math.sin(theta)
        return Vec2(c * self.x - s * self.y, s * self.x + c * self.y)

    def angle(self) -> float:
        return math.atan2(self.y, self.x)


@dataclass(frozen=True)
class Vec3:
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        _require_finite("Vec3", self.x, self.y, self.z)

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def scaled(self, k: float) -> "Vec3":
        return Vec3(self.x * k, self.y * k, self.z * k)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def normalized(self) -> "Vec3":
        n = self.norm()
        if n < 1e-12:
            raise GeometryError("cannot normalize zero-length Vec3")
        return Vec3(self.x / n, self.y / n, self.z / n)

    def xy(self) -> Vec2:
        return Vec2(self.x, self.y)


def horizontal_distance(a: Vec3, b: Vec3) -> float:
    """Euclidean distance between the horizontal projections of two points.

    Announced distances are horizontal throughout: the simulated user walks
    on a floor, so the vertical offset to e.g. a tabletop object is ignored.
    """
    return math.hypot(a.x - b.x, a.y - b.y)


def unit_from_angle(theta: float) -> Vec2:
    return Vec2(math.cos(theta), math.sin(theta))


@dataclass(frozen=True)
class OrientedRect:
    """Rectangle in the horizontal plane: center, half extents, yaw.

    ``hx`` is the half extent along the rectangle's local x axis (yaw
    direction), ``hy`` along local y. A zero ``hy`` models a wall segment.
    """

    center: Vec2
    hx: float
    hy: float
    yaw: float

    def axis_x(self) -> Vec2:
        return unit_from_angle(self.yaw)

    def axis_y(self) -> Vec2:
        return unit_from_angle(self.yaw).perp_left()

    def corners(self) -> list[Vec2]:
        ax, ay = self.axis_x(), self.axis_y()
        out = []
        for sx, sy in ((-1, -1), (1, -1), (1, 1), (-1, 1)):
            out.append(self.center + ax.scaled(sx * self.hx) + ay.scaled(sy * self.hy))
        return out

    def to_local(self, p: Vec2) -> Vec2:
        d = p - self.center
        return Vec2(d.dot(self.axis_x()), d.dot(self.axis_y()))

    def contains_point(self, p: Vec2, eps: float = 0.0) -> bool:
        q = self.to_local(p)
        return abs(q.x) <= self.hx + eps and abs(q.y) <= self.hy + eps

    def contains_rect(self, other: "OrientedRect", eps: float = 0.0) -> bool:
        return all(self.contains_point(c, eps) for c in other.corners())

    def inflated(self, amount: float) -> "OrientedRect":
        return OrientedRect(self.center, self.hx + amount, self.hy + amount, self.yaw)


def rects_intersect(a: OrientedRect, b: OrientedRect) -> bool:
    """Separating-axis intersection test; touching boundaries do not count.

    The strict inequality makes an exactly-against-the-wall contact (gap 0
    against a zero-width wall segment) a non-intersection, while any true
    crossing intersects.
    """
    delta = b.center - a.center
    for axis in (a.axis_x(), a.axis_y(), b.axis_x(), b.axis_y()):
        ra = a.hx * abs(a.axis_x().dot(axis)) + a.hy * abs(a.axis_y().dot(axis))
        rb = b.hx * abs(b.axis_x().dot(axis)) + b.hy * abs(b.axis_y().dot(axis))
        if abs(delta.dot(axis)) >= ra + rb:
            return False
    return True


def intervals_overlap(a0: float, a1: float, b0: float, b1: float) -> bool:
    """Strict overlap of [a0,a1] and [b0,b1]; touching endpoints do not overlap."""
    return a0 < b1 and b0 < a1


@dataclass(frozen=True)
class Box3:
    """Yaw-aligned 3D box: an oriented footprint plus a vertical interval."""

    rect: OrientedRect
    z0: float
    z1: float


def ray_box_intersect(origin: Vec3, direction: Vec3, box: Box3) -> float | None:
    """First hit parameter t >= 0 of the ray against the box, or None.

    A ray starting inside the box hits at t=0. Uses the slab method in the
    box's local frame.
    """
    # Rotate into the footprint's local frame; z is unaffected by yaw.
    rel = origin.xy() - box.rect.center
    ax, ay = box.rect.axis_x(), box.rect.axis_y()
    o = (rel.dot(ax), rel.dot(ay), origin.z)
    dxy = Vec2(direction.x, direction.y)
    d = (dxy.dot(ax), dxy.dot(ay), direction.z)
    lo = (-box.rect.hx, -box.rect.hy, box.z0)
    hi = (box.rect.hx, box.rect.hy, box.z1)

    t_enter, t_exit = -math.inf, math.inf
    for i in range(3):
        if abs(d[i]) < 1e-15:
            if o[i] < lo[i] or o[i] > hi[i]:
                return None
            continue
        t1 = (lo[i] - o[i]) / d[i]
        t2 = (hi[i] - o[i]) / d[i]
        if t1 > t2:
            t1, t2 = t2, t1
        t_enter = max(t_enter, t1)
        t_exit = min(t_exit, t2)
    if t_exit < t_enter or t_exit < 0.0:
        return None
    return max(t_enter, 0.0)


def segment_intersection(p1: Vec2, d1: Vec2, p2: Vec2, d2: Vec2) -> Vec2 | None:
    """Intersection point of two infinite lines given as point+direction."""
    denom = d1.x * d2.y - d1.y * d2.x
    if abs(denom) < 1e-12:
        return None
    diff = p2 - p1
    t = (diff.x * d2.y - diff.y * d2.x) / denom
    return p1 + d1.scaled(t)


def camera_basis(forward: Vec3, fallback_right: Vec2) -> tuple[Vec3, Vec3]:
    """Right and up vectors for a camera looking along ``forward``.

    When the camera points straight up or down the horizontal cross product
    degenerates; the body heading's right side keeps the frame deterministic.
    """
    world_up = Vec3(0.0, 0.0, 1.0)
    right = forward.cross(world_up)
    if right.norm() < 1e-9:
        r = fallback_right
        right = Vec3(r.x, r.y, 0.0)
    right = right.normalized()
    up = right.cross(forward).normalized()
    return right, up
