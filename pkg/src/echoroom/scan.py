"""Progressive surface detection driven by camera sweeps.

Each plane is partitioned into a grid of roughly ``scan_cell_m`` cells that
tile its extent exactly (edge cells shrink rather than spill over, so the
revealed area can never exceed the plane's true area). Five sample rays per
step approximate the camera frustum; each ray reveals the cell it first
hits within range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .events import AnnouncementEvent, Event
from .geometry import Vec2, Vec3, camera_basis
from .scene import Config, DeviceFrame, Orientation, Plane, World

CellKey = tuple[str, int, int]


@dataclass(frozen=True)
class PlaneGrid:
    """Exact-tiling cell grid over one plane's local (u, v) extent."""

    nu: int
    nv: int
    du: float
    dv: float

    @property
    def cell_area_m2(self) -> float:
        return self.du * self.dv

    def cell_of(self, u: float, v: float, half_u: float, half_v: float) -> tuple[int, int]:
        i = min(int((u + half_u) / self.du), self.nu - 1)
        j = min(int((v + half_v) / self.dv), self.nv - 1)
        return max(i, 0), max(j, 0)


def plane_grid(plane: Plane, config: Config) -> PlaneGrid:
    a, b = plane.half_extents
    nu = max(1, math.ceil(2.0 * a / config.scan_cell_m - 1e-9))
    nv = max(1, math.ceil(2.0 * b / config.scan_cell_m - 1e-9))
    return PlaneGrid(nu=nu, nv=nv, du=2.0 * a / nu, dv=2.0 * b / nv)


@dataclass
class ScanState:
    revealed_cells: set[CellKey] = field(default_factory=set)
    surfaces_order: list[str] = field(default_factory=list)
    last_new_area_at_us: int = 0
    last_progress_area_m2: float = 0.0
    inactivity_prompted: bool = False
    goal_announced: bool = False


@dataclass(frozen=True)
class ScanSummary:
    surface_count: int
    vertical_count: int
    total_area_m2: float


@dataclass(frozen=True)
class ScanGoal:
    min_surfaces: int = 0
    min_vertical: int = 0
    min_area_m2: float = 0.0

    def __post_init__(self) -> None:
        if self.min_surfaces < 0 or self.min_vertical < 0 or self.min_area_m2 < 0:
            raise ValueError("scan goal thresholds must be non-negative")


def _ray_plane_hit(origin: Vec3, direction: Vec3, plane: Plane, max_range: float) -> tuple[float, float, float] | None:
    """(t, u, v) of the ray against the plane's rectangle, or None.

    u runs along the plane's yaw axis; v along local y for horizontal planes
    and along height (from the bottom edge, centered) for walls.
    """
    axis = Vec2(math.cos(plane.yaw), math.sin(plane.yaw))
    if plane.orientation is Orientation.HORIZONTAL:
        if abs(direction.z) < 1e-12:
            return None
        t = (plane.center.z - origin.z) / direction.z
        if t <= 1e-9 or t > max_range:
            return None
        hit = origin + direction.scaled(t)
        rel = hit.xy() - plane.center.xy()
        u, v = rel.dot(axis), rel.dot(axis.perp_left())
        if abs(u) <= plane.half_extents[0] and abs(v) <= plane.half_extents[1]:
            return t, u, v
        return None
    normal = axis.perp_left()
    denom = direction.x * normal.x + direction.y * normal.y
    if abs(denom) < 1e-12:
        return None
    rel0 = plane.center.xy() - origin.xy()
    t = rel0.dot(normal) / denom
    if t <= 1e-9 or t > max_range:
        return None
    hit = origin + direction.scaled(t)
    u = (hit.xy() - plane.center.xy()).dot(axis)
    v = hit.z - plane.center.z
    if abs(u) <= plane.half_extents[0] and abs(v) <= plane.half_extents[1]:
        return t, u, v
    return None


def sample_rays(frame: DeviceFrame) -> list[Vec3]:
    """Center ray plus four rays offset by half the field of view."""
    right, up = camera_basis(frame.camera_forward, frame.body_heading.rotated(-math.pi / 2))
    rays = [frame.camera_forward]
    for angle, axis in (
        (frame.horizontal_fov / 2.0, right),
        (-frame.horizontal_fov / 2.0, right),
        (frame.vertical_fov / 2.0, up),
        (-frame.vertical_fov / 2.0, up),
    ):
        c, s = math.cos(angle), math.sin(angle)
        rays.append((frame.camera_forward.scaled(c) + axis.scaled(s)).normalized())
    return rays


def _nearest_plane_hit(world: World, origin: Vec3, direction: Vec3, max_range: float) -> tuple[Plane, float, float] | None:
    best: tuple[float, Plane, float, float] | None = None
    for plane in world.planes:
        hit = _ray_plane_hit(origin, direction, plane, max_range)
        if hit is None:
            continue
        t, u, v = hit
        if best is None or t < best[0] or (t == best[0] and plane.id < best[1].id):
            best = (t, plane, u, v)
    if best is None:
        return None
    return best[1], best[2], best[3]


def step_scan(world: World, frame: DeviceFrame, state: ScanState, dt: float, config: Config) -> list[Event]:
    """Advance the scan by one step; mutates ``state`` and returns events.

    Event order per step: new-surface notifications, then a progress
    announcement when at least ``scan_progress_area_m2`` has accrued since
    the last one, then the inactivity prompt when nothing new has been
    revealed for ``scan_inactivity_s``.
    """
    if dt <= 0:
        raise ValueError("step_scan requires dt > 0")
    events: list[Event] = []
    now = world.clock
    new_planes: list[str] = []
    revealed_any = False

    for ray in sample_rays(frame):
        found = _nearest_plane_hit(world, frame.camera_origin, ray, config.scan_range_m)
        if found is None:
            continue
        plane, u, v = found
        grid = plane_grid(plane, config)
        i, j = grid.cell_of(u, v, plane.half_extents[0], plane.half_extents[1])
        key = (plane.id, i, j)
        if key in state.revealed_cells:
            continue
        state.revealed_cells.add(key)
        revealed_any = True
        if plane.id not in state.surfaces_order:
            state.surfaces_order.append(plane.id)
            new_planes.append(plane.id)

    if revealed_any:
        state.last_new_area_at_us = world.clock_us
        state.inactivity_prompted = False

    for plane_id in new_planes:
        plane = world.plane(plane_id)
        assert plane is not None
        events.append(
            AnnouncementEvent(at=now, tag="new_surface", text=f"New {plane.orientation.value} surface detected")
        )

    summary = scan_summary(state, world, config)
    if summary.total_area_m2 - state.last_progress_area_m2 >= config.scan_progress_area_m2 - 1e-9:
        state.last_progress_area_m2 = summary.total_area_m2
        noun = "surface" if summary.surface_count == 1 else "surfaces"
        events.append(
            AnnouncementEvent(
                at=now,
                tag="scan_progress",
                text=f"{summary.surface_count} {noun} detected, {format_area(summary.total_area_m2)} square meters total",
            )
        )

    idle_us = world.clock_us - state.last_new_area_at_us
    if not state.inactivity_prompted and idle_us >= int(round(config.scan_inactivity_s * 1_000_000)):
        state.inactivity_prompted = True
        events.append(AnnouncementEvent(at=now, tag="scan_prompt", text="Move to a new area to scan"))

    return events


def scan_summary(state: ScanState, world: World, config: Config) -> ScanSummary:
    per_plane: dict[str, int] = {}
    for plane_id, _, _ in state.revealed_cells:
        per_plane[plane_id] = per_plane.get(plane_id, 0) + 1
    total = 0.0
    vertical = 0
    # Sorted iteration: float accumulation order must not depend on set order.
    for plane_id, count in sorted(per_plane.items()):
        plane = world.plane(plane_id)
        if plane is None:
            continue
        total += count * plane_grid(plane, config).cell_area_m2
        if plane.orientation is Orientation.VERTICAL:
            vertical += 1
    return ScanSummary(surface_count=len(per_plane), vertical_count=vertical, total_area_m2=total)


def check_goal(summary: ScanSummary, goal: ScanGoal) -> bool:
    return (
        summary.surface_count >= goal.min_surfaces
        and summary.vertical_count >= goal.min_vertical
        and summary.total_area_m2 >= goal.min_area_m2 - 1e-9
    )


def format_area(area_m2: float) -> str:
    rounded = math.floor(area_m2 * 10 + 0.5) / 10
    if abs(rounded - round(rounded)) < 1e-9:
        return str(int(round(rounded)))
    return f"{rounded:.1f}"
