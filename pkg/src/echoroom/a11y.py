"""Screen-reader bridge: projects objects to 2D elements, traverses focus,
and toggles the frozen snapshot.

Projection is a pinhole camera: each object's eight box corners map to the
viewport and the clipped 2D bounding rectangle becomes one accessibility
element. Elements read top-to-bottom, then left-to-right.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .events import AnnouncementEvent, Event, EventQueue
from .geometry import Vec3, camera_basis
from .scene import DeviceFrame, Snapshot, World, freeze

_NEAR_Z = 1e-6


@dataclass(frozen=True)
class Viewport:
    width: float
    height: float

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError("viewport dimensions must be positive")


@dataclass(frozen=True)
class ScreenElement:
    object_id: str
    label: str
    rect: tuple[float, float, float, float]  # x0, y0, x1, y1 in pixels
    actions: tuple[str, ...] = ("select",)

    def to_dict(self) -> dict:
        return {
            "object_id": self.object_id,
            "label": self.label,
            "rect": [round(v, 6) for v in self.rect],
            "actions": list(self.actions),
        }


def project_elements(
    world: World,
    frame: DeviceFrame,
    viewport: Viewport,
    actions_by_id: dict[str, tuple[str, ...]] | None = None,
) -> list[ScreenElement]:
    """One element per object in front of the camera and on screen.

    Partially visible rectangles are clipped to the viewport; fully
    off-screen or behind-camera objects yield nothing.
    """
    right, up = camera_basis(frame.camera_forward, frame.body_heading.rotated(-math.pi / 2))
    tan_h = math.tan(frame.horizontal_fov / 2.0)
    tan_v = math.tan(frame.vertical_fov / 2.0)
    elements: list[ScreenElement] = []
    for obj in world.objects:
        box = obj.box()
        center = obj.pose.position
        vc = Vec3(center.x, center.y, (box.z0 + box.z1) / 2.0) - frame.camera_origin
        if vc.dot(frame.camera_forward) <= _NEAR_Z:
            continue
        xs: list[float] = []
        ys: list[float] = []
        for corner2 in box.rect.corners():
            for z in (box.z0, box.z1):
                v = Vec3(corner2.x, corner2.y, z) - frame.camera_origin
                depth = max(v.dot(frame.camera_forward), _NEAR_Z)
                x_ndc = v.dot(right) / (depth * tan_h)
                y_ndc = v.dot(up) / (depth * tan_v)
                xs.append((x_ndc + 1.0) / 2.0 * viewport.width)
                ys.append((1.0 - y_ndc) / 2.0 * viewport.height)
        x0 = max(min(xs), 0.0)
        x1 = min(max(xs), viewport.width)
        y0 = max(min(ys), 0.0)
        y1 = min(max(ys), viewport.height)
        if x0 >= x1 or y0 >= y1:
            continue
        actions = (actions_by_id or {}).get(obj.id, ("select",))
        elements.append(ScreenElement(object_id=obj.id, label=obj.name, rect=(x0, y0, x1, y1), actions=actions))
    elements.sort(key=lambda e: (e.rect[1], e.rect[0], e.object_id))
    return elements


def focus_move(elements: list[ScreenElement], current: int | None, direction: str) -> int:
    """Next/previous element index, wrapping at both ends."""
    if not elements:
        raise ValueError("no elements to focus")
    if direction not in ("next", "prev"):
        raise ValueError(f"unknown focus direction {direction!r}")
    n = len(elements)
    if current is None:
        return 0 if direction == "next" else n - 1
    return (current + 1) % n if direction == "next" else (current - 1) % n


@dataclass
class SessionAccessibilityState:
    """Freeze snapshot, focus index, and the outbound event queue."""

    frozen: Snapshot | None = None
    focus: int | None = None
    queue: EventQueue = field(default_factory=EventQueue)


def magic_tap(state: SessionAccessibilityState, world: World, frame: DeviceFrame) -> list[Event]:
    """Two-finger double-tap: toggle the frozen snapshot."""
    if state.frozen is None:
        state.frozen = freeze(world, frame)
        text = "Frozen"
    else:
        state.frozen = None
        text = "Unfrozen"
    return [AnnouncementEvent(at=world.clock, tag="freeze", text=text)]


def drain_events(state: SessionAccessibilityState, up_to: float) -> list[Event]:
    return state.queue.drain(up_to)
