"""Object placement: camera-tracked mode and dialog-guided candidate mode.

Camera mode proposes a pose that follows the user (snapping to the highest
surface under the device) and reports why the object does or does not fit.
Guided mode walks a fixed question tree (floor/table, then center/edge/
corner) and resolves edge and corner choices against walls with exact
contact, using the direction the user faces to disambiguate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .events import AnnouncementEvent, Event
from .geometry import OrientedRect, Vec2, Vec3, intervals_overlap, rects_intersect, segment_intersection
from .scene import Config, DeviceFrame, Orientation, Plane, PlaneKind, Pose, VirtualObject, World

_CONTAIN_EPS = 1e-6
_PERP_EPS = 1e-6


class PlacementError(Exception):
    pass


class NoFloorError(PlacementError):
    pass


class PlacementBlocked(PlacementError):
    def __init__(self, message: str, report: "FitReport | None" = None):
        super().__init__(message)
        self.report = report


class InvalidChoiceError(PlacementError):
    pass


class UnresolvableError(PlacementError):
    def __init__(self, message: str, report: "FitReport | None" = None):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class Violation:
    kind: str  # too_close_to_wall | too_close_to_object | does_not_fit_on_surface | does_not_fit_under_surface
    ref_id: str

    def phrase(self) -> str:
        return {
            "too_close_to_wall": "too close to a wall",
            "too_close_to_object": "too close to another object",
            "does_not_fit_on_surface": "too large for the surface",
            "does_not_fit_under_surface": "does not fit under the surface",
        }[self.kind]


@dataclass(frozen=True)
class FitReport:
    violations: tuple[Violation, ...]

    @property
    def fits(self) -> bool:
        return not self.violations

    def phrase(self) -> str:
        if self.fits:
            return "Fits here"
        seen: list[str] = []
        for v in self.violations:
            p = v.phrase()
            if p not in seen:
                seen.append(p)
        return "Does not fit here: " + ", ".join(seen)


def object_rect_at(obj: VirtualObject, pose: Pose) -> OrientedRect:
    return OrientedRect(pose.position.xy(), obj.footprint.depth / 2.0, obj.footprint.width / 2.0, pose.yaw)


def boxes_overlap(a: VirtualObject, b: VirtualObject, clearance: float) -> bool:
    """True iff the footprints inflated by the clearance intersect and the
    vertical intervals overlap. Symmetric; monotone in clearance."""
    ra = a.rect().inflated(clearance / 2.0)
    rb = b.rect().inflated(clearance / 2.0)
    if not rects_intersect(ra, rb):
        return False
    az0, az1 = a.pose.position.z, a.pose.position.z + a.footprint.height
    bz0, bz1 = b.pose.position.z, b.pose.position.z + b.footprint.height
    return intervals_overlap(az0, az1, bz0, bz1)


def infer_supporting_plane(world: World, pose: Pose) -> Plane | None:
    """Highest horizontal plane at the pose's height containing its center."""
    best: Plane | None = None
    for plane in world.planes:
        if plane.orientation is not Orientation.HORIZONTAL:
            continue
        if abs(plane.center.z - pose.position.z) > 1e-6:
            continue
        if not plane.rect().contains_point(pose.position.xy(), eps=_CONTAIN_EPS):
            continue
        if best is None or plane.center.z > best.center.z or (plane.center.z == best.center.z and plane.id < best.id):
            best = plane
    return best


def check_fit(
    world: World,
    obj: VirtualObject,
    pose: Pose,
    config: Config,
    supporting_plane_id: str | None = None,
    ignore_walls: frozenset[str] = frozenset(),
    ignore_objects: frozenset[str] = frozenset(),
) -> FitReport:
    """Evaluate a proposed pose against walls, objects, and surface extents.

    ``ignore_walls`` waives clearance for intentional guided wall contact;
    ``ignore_objects`` excludes the object itself while re-placing it.
    """
    rect = object_rect_at(obj, pose)
    z0 = pose.position.z
    z1 = z0 + obj.footprint.height
    violations: list[Violation] = []

    support = world.plane(supporting_plane_id) if supporting_plane_id else infer_supporting_plane(world, pose)

    for wall in sorted(world.walls(), key=lambda p: p.id):
        if wall.id in ignore_walls:
            continue
        wz0, wz1 = wall.z_interval()
        if not intervals_overlap(z0, z1, wz0, wz1):
            continue
        if rects_intersect(rect.inflated(config.wall_clearance_m), wall.rect()):
            violations.append(Violation("too_close_to_wall", wall.id))

    placed_obj = obj.at(pose, support.id if support else None)
    for other in world.objects:
        if other.id == obj.id or other.id in ignore_objects:
            continue
        if boxes_overlap(placed_obj, other, config.object_clearance_m):
            violations.append(Violation("too_close_to_object", other.id))

    if support is not None and not support.rect().contains_rect(rect, eps=_CONTAIN_EPS):
        violations.append(Violation("does_not_fit_on_surface", support.id))

    for plane in sorted(world.planes, key=lambda p: p.id):
        if plane.orientation is not Orientation.HORIZONTAL:
            continue
        if support is not None and plane.id == support.id:
            continue
        if plane.center.z <= z0 + 1e-9:
            continue
        if plane.center.z >= z1 - 1e-9:
            continue
        if rects_intersect(rect, plane.rect()):
            violations.append(Violation("does_not_fit_under_surface", plane.id))

    return FitReport(violations=tuple(violations))


def facing_yaw_toward(target: Vec2, source: Vec2, fallback: Vec2) -> float:
    """Yaw of the direction from source toward target; fallback when equal."""
    d = target - source
    if d.norm() < 1e-9:
        d = fallback
    return d.angle()


# --- camera-based placement -------------------------------------------------


@dataclass
class PlacementSession:
    """State of one in-progress placement, camera or guided."""

    mode: str  # "camera" | "guided"
    obj: VirtualObject
    candidates: "CandidateTree | None" = None
    stage: str | None = None  # guided: surface | position | facing | ready
    chosen_surface: str | None = None
    chosen_position: str | None = None
    proposed_pose: Pose | None = None
    supporting_plane_id: str | None = None
    wall_contacts: tuple[str, ...] = ()
    last_fits: bool | None = None
    placed: bool = False
    editing_object_id: str | None = None

    @property
    def awaiting_facing(self) -> bool:
        return self.stage == "facing"

    def current_prompt(self) -> "Prompt | None":
        if self.mode != "guided" or self.placed:
            return None
        name = self.obj.name
        if self.stage == "surface":
            options = ["floor"] + (["table"] if self.candidates and self.candidates.table_id else [])
            return Prompt(f"Place the {name} on the floor or on a table?", tuple(options))
        if self.stage == "position":
            if self.chosen_surface == "floor":
                return Prompt("Center of the floor, an edge, or a corner?", ("center", "edge", "corner"))
            return Prompt("Center of the table or an edge of the table?", ("center", "edge"))
        if self.stage == "facing":
            spot = "corner" if self.chosen_position == "corner" else "edge"
            return Prompt(f"Face the {spot} where the {name} should go, then confirm", ())
        return None


@dataclass(frozen=True)
class Prompt:
    question: str
    options: tuple[str, ...]


def track_position(
    world: World, frame: DeviceFrame, session: PlacementSession, config: Config
) -> tuple[Pose, FitReport, list[Event]]:
    """Follow the user: snap to the highest surface under the device, else
    the floor at their feet; announce surface changes and fit transitions."""
    floor = world.floor()
    if floor is None:
        raise NoFloorError("camera-based placement requires a floor plane")

    camera_xy = frame.camera_origin.xy()
    target = floor
    for plane in world.planes:
        if plane.orientation is not Orientation.HORIZONTAL:
            continue
        if not plane.rect().contains_point(camera_xy, eps=_CONTAIN_EPS):
            continue
        if plane.center.z > target.center.z or (plane.center.z == target.center.z and plane.id < target.id):
            target = plane

    forward = frame.camera_forward.xy()
    if forward.norm() < 1e-9:
        forward = frame.body_heading
    yaw = forward.scaled(-1.0).angle()  # object front looks back at the device
    pose = Pose(Vec3(frame.user_position.x, frame.user_position.y, target.center.z), yaw)

    ignore = frozenset({session.editing_object_id}) if session.editing_object_id else frozenset()
    report = check_fit(world, session.obj, pose, config, supporting_plane_id=target.id, ignore_objects=ignore)

    events: list[Event] = []
    now = world.clock
    if session.supporting_plane_id is not None and session.supporting_plane_id != target.id:
        events.append(
            AnnouncementEvent(at=now, tag="surface_changed", text=f"Object moved to the {target.kind.value}")
        )
    session.supporting_plane_id = target.id

    if (session.last_fits is None and not report.fits) or (
        session.last_fits is not None and report.fits != session.last_fits
    ):
        events.append(AnnouncementEvent(at=now, tag="fit_changed", text=report.phrase()))
    session.last_fits = report.fits

    session.proposed_pose = pose
    session.wall_contacts = ()
    return pose, report, events


def confirm_placement(world: World, session: PlacementSession, config: Config) -> tuple[VirtualObject, list[Event]]:
    """Drop the object at the proposed pose; refuses when it does not fit."""
    if session.placed:
        raise PlacementBlocked("placement already confirmed")
    if session.proposed_pose is None:
        raise PlacementBlocked("no proposed position to confirm")
    ignore = frozenset({session.editing_object_id}) if session.editing_object_id else frozenset()
    report = check_fit(
        world,
        session.obj,
        session.proposed_pose,
        config,
        supporting_plane_id=session.supporting_plane_id,
        ignore_walls=frozenset(session.wall_contacts),
        ignore_objects=ignore,
    )
    if not report.fits:
        raise PlacementBlocked(report.phrase(), report)
    placed = session.obj.at(session.proposed_pose, session.supporting_plane_id, session.wall_contacts)
    world.add_object(placed)
    session.placed = True
    return placed, [AnnouncementEvent(at=world.clock, tag="placed", text=f"Placed {placed.name}")]


# --- guided placement -------------------------------------------------------


@dataclass(frozen=True)
class CandidateTree:
    """Root options and children for the guided placement dialog."""

    floor_id: str
    table_id: str | None
    floor_children: tuple[str, ...] = ("center", "edge", "corner")
    table_children: tuple[str, ...] = ("center", "edge")

    def roots(self) -> tuple[str, ...]:
        return ("floor", "table") if self.table_id else ("floor",)


def generate_candidates(world: World, obj: VirtualObject, scan_order: list[str] | None = None) -> CandidateTree:
    """Build the dialog tree; the table slot goes to the first-scanned table
    (falling back to world order when nothing has been scanned)."""
    floor = world.floor()
    if floor is None:
        raise NoFloorError("guided placement requires a floor plane")
    tables = [p for p in world.planes if p.kind is PlaneKind.TABLE]
    table_id: str | None = None
    if tables:
        if scan_order:
            for plane_id in scan_order:
                if any(t.id == plane_id for t in tables):
                    table_id = plane_id
                    break
        if table_id is None:
            table_id = tables[0].id
    return CandidateTree(floor_id=floor.id, table_id=table_id)


def start_guided(session: PlacementSession, world: World, scan_order: list[str] | None = None) -> Prompt:
    session.candidates = generate_candidates(world, session.obj, scan_order)
    session.stage = "surface"
    prompt = session.current_prompt()
    assert prompt is not None
    return prompt


def answer_prompt(session: PlacementSession, choice: str) -> Prompt | None:
    """Advance the dialog; returns the next prompt or None when no further
    answer is needed (pose ready or facing instruction pending)."""
    prompt = session.current_prompt()
    if prompt is None:
        raise InvalidChoiceError("no prompt is active")
    if choice not in prompt.options:
        raise InvalidChoiceError(f"choice {choice!r} is not among {list(prompt.options)}")
    if session.stage == "surface":
        session.chosen_surface = choice
        session.stage = "position"
    elif session.stage == "position":
        session.chosen_position = choice
        session.stage = "ready" if choice == "center" else "facing"
    return session.current_prompt()


@dataclass(frozen=True)
class _EdgeCandidate:
    key: str
    anchor: Vec2
    select_normal: Vec2  # toward the user's side of the boundary
    place_normal: Vec2  # into the supported region's interior
    wall_ids: tuple[str, ...]


@dataclass(frozen=True)
class _CornerCandidate:
    key: str
    point: Vec2
    normals: tuple[Vec2, Vec2]
    wall_ids: tuple[str, ...]

    def bisector(self) -> Vec2:
        return (self.normals[0] + self.normals[1]).normalized()


def _rect_edges(rect: OrientedRect) -> list[tuple[int, Vec2, Vec2]]:
    """(index, midpoint, inward normal) for each edge of the rectangle."""
    ax, ay = rect.axis_x(), rect.axis_y()
    return [
        (0, rect.center + ax.scaled(rect.hx), ax.scaled(-1.0)),
        (1, rect.center - ax.scaled(rect.hx), ax),
        (2, rect.center + ay.scaled(rect.hy), ay.scaled(-1.0)),
        (3, rect.center - ay.scaled(rect.hy), ay),
    ]


def _wall_user_normal(wall: Plane, user: Vec2) -> Vec2:
    normal = Vec2(math.cos(wall.yaw), math.sin(wall.yaw)).perp_left()
    side = user - wall.center.xy()
    if normal.dot(side) < 0:
        normal = normal.scaled(-1.0)
    return normal


def _edge_candidates(world: World, plane: Plane, user: Vec2) -> list[_EdgeCandidate]:
    out: list[_EdgeCandidate] = []
    if plane.kind is PlaneKind.FLOOR and world.walls():
        for wall in sorted(world.walls(), key=lambda w: w.id):
            n = _wall_user_normal(wall, user)
            out.append(_EdgeCandidate(wall.id, wall.center.xy(), n, n, (wall.id,)))
        return out
    for idx, midpoint, inward in _rect_edges(plane.rect()):
        toward_user = inward if inward.dot(user - midpoint) >= 0 else inward.scaled(-1.0)
        out.append(_EdgeCandidate(f"{plane.id}#edge{idx}", midpoint, toward_user, inward, ()))
    return out


def _corner_candidates(world: World, plane: Plane, user: Vec2) -> list[_CornerCandidate]:
    walls = sorted(world.walls(), key=lambda w: w.id)
    out: list[_CornerCandidate] = []
    if plane.kind is PlaneKind.FLOOR and walls:
        for i, wa in enumerate(walls):
            for wb in walls[i + 1 :]:
                na = _wall_user_normal(wa, user)
                nb = _wall_user_normal(wb, user)
                if abs(na.dot(nb)) > _PERP_EPS:
                    continue  # corner resolution assumes perpendicular walls
                da = Vec2(math.cos(wa.yaw), math.sin(wa.yaw))
                db = Vec2(math.cos(wb.yaw), math.sin(wb.yaw))
                point = segment_intersection(wa.center.xy(), da, wb.center.xy(), db)
                if point is None:
                    continue
                ua = (point - wa.center.xy()).dot(da)
                ub = (point - wb.center.xy()).dot(db)
                if abs(ua) > wa.half_extents[0] + 1e-6 or abs(ub) > wb.half_extents[0] + 1e-6:
                    continue  # the wall lines cross beyond the actual segments
                out.append(_CornerCandidate(f"{wa.id}+{wb.id}", point, (na, nb), (wa.id, wb.id)))
        if out:
            return out
    # No usable wall pair: fall back to the surface rectangle's own corners,
    # pairing each with the inward normals of its two adjacent edges.
    corners = plane.rect().corners()
    ax, ay = plane.rect().axis_x(), plane.rect().axis_y()
    signs = [(-1, -1), (1, -1), (1, 1), (-1, 1)]
    for idx, corner in enumerate(corners):
        sx, sy = signs[idx]
        na = ax.scaled(-float(sx))
        nb = ay.scaled(-float(sy))
        out.append(_CornerCandidate(f"{plane.id}#corner{idx}", corner, (na, nb), ()))
    return out


def resolve_candidate(
    world: World,
    frame: DeviceFrame,
    obj: VirtualObject,
    surface_choice: str,
    position_choice: str,
    facing: Vec2,
    config: Config,
    table_id: str | None = None,
) -> tuple[Pose, str, tuple[str, ...]]:
    """Turn an answered dialog path plus a facing direction into a pose.

    Returns (pose, supporting plane id, contacted wall ids). Raises
    UnresolvableError when the object cannot fit at the selected candidate.
    """
    if surface_choice == "floor":
        plane = world.floor()
        if plane is None:
            raise NoFloorError("no floor plane")
    else:
        plane = world.plane(table_id) if table_id else None
        if plane is None or plane.kind is not PlaneKind.TABLE:
            raise UnresolvableError("no table available")

    user = frame.user_position.xy()
    facing = facing.normalized()
    half_depth = obj.footprint.depth / 2.0
    half_width = obj.footprint.width / 2.0
    z = plane.center.z
    contacts: tuple[str, ...] = ()

    if position_choice == "center":
        center = plane.center.xy()
        yaw = facing_yaw_toward(user, center, frame.body_heading.scaled(-1.0))
        pose = Pose(Vec3(center.x, center.y, z), yaw)
    elif position_choice == "edge":
        candidates = _edge_candidates(world, plane, user)
        chosen = min(candidates, key=lambda c: (round(facing.dot(c.select_normal), 9), c.key))
        pos = chosen.anchor + chosen.place_normal.scaled(half_depth)
        pose = Pose(Vec3(pos.x, pos.y, z), chosen.place_normal.angle())
        contacts = chosen.wall_ids
    elif position_choice == "corner":
        candidates = _corner_candidates(world, plane, user)
        if not candidates:
            raise UnresolvableError("no corner candidates available")
        chosen = min(candidates, key=lambda c: (round(facing.dot(c.bisector()), 9), c.key))
        # Back goes against the wall faced most directly; the other takes the side.
        ranked = sorted(
            (
                (round(facing.dot(n), 9), chosen.wall_ids[i] if chosen.wall_ids else str(i), n)
                for i, n in enumerate(chosen.normals)
            ),
            key=lambda item: (item[0], item[1]),
        )
        back_n, side_n = ranked[0][2], ranked[1][2]
        pos = chosen.point + back_n.scaled(half_depth) + side_n.scaled(half_width)
        pose = Pose(Vec3(pos.x, pos.y, z), back_n.angle())
        contacts = chosen.wall_ids
    else:
        raise InvalidChoiceError(f"unknown position choice {position_choice!r}")

    report = check_fit(
        world, obj, pose, config, supporting_plane_id=plane.id, ignore_walls=frozenset(contacts)
    )
    if not report.fits:
        raise UnresolvableError(report.phrase(), report)
    return pose, plane.id, contacts
