"""The two composed demo apps: furniture arrangement and the solar system.

Furniture combines camera placement and search with dwell selection:
standing near a placed piece long enough selects it and exposes edit and
delete actions. The solar system auto-places a row of planets, reads two
info panels, then runs the equal-size animation and lets the camera pick
planets for facts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .events import AnnouncementEvent, Event
from .geometry import Vec2, Vec3, horizontal_distance
from .placement import check_fit
from .scene import BoxDims, Config, DeviceFrame, Pose, VirtualObject, World


class NoSpaceError(Exception):
    pass


# --- furniture: dwell selection ----------------------------------------------


@dataclass
class FurnitureState:
    dwell_us: dict[str, int] = field(default_factory=dict)
    selected_id: str | None = None

    def reset(self) -> None:
        self.dwell_us.clear()
        self.selected_id = None


def dwell_step(world: World, frame: DeviceFrame, state: FurnitureState, dt_us: int, config: Config) -> list[Event]:
    """Accumulate time spent within the proximity threshold of each object;
    select after dwell_select_s of continuous presence, deselect on leave."""
    events: list[Event] = []
    now = world.clock
    inside: list[str] = []
    for obj in sorted(world.objects, key=lambda o: o.id):
        if horizontal_distance(frame.user_position, obj.pose.position) <= config.proximity_threshold_m:
            inside.append(obj.id)

    for oid in list(state.dwell_us):
        if oid not in inside:
            del state.dwell_us[oid]
    for oid in inside:
        state.dwell_us[oid] = state.dwell_us.get(oid, 0) + dt_us

    if state.selected_id is not None and state.selected_id not in inside:
        prev = world.object(state.selected_id)
        if prev is not None:
            events.append(AnnouncementEvent(at=now, tag="deselected", text=f"{prev.name} deselected"))
        state.selected_id = None

    if state.selected_id is None:
        dwell_needed = int(round(config.dwell_select_s * 1_000_000))
        for oid in inside:
            if state.dwell_us[oid] >= dwell_needed:
                obj = world.object(oid)
                assert obj is not None
                state.selected_id = oid
                events.append(
                    AnnouncementEvent(
                        at=now,
                        tag="selected",
                        text=f"{obj.name} selected. Actions: edit position, delete",
                    )
                )
                break
    return events


# --- solar system -------------------------------------------------------------

# name, box edge length in meters
SOLAR_BODIES: tuple[tuple[str, float], ...] = (
    ("sun", 0.30),
    ("mercury", 0.06),
    ("venus", 0.09),
    ("earth", 0.10),
    ("mars", 0.08),
    ("jupiter", 0.22),
    ("saturn", 0.19),
    ("uranus", 0.14),
    ("neptune", 0.13),
)

EQUALIZED_SIZE_M = 0.12
BODY_GAP_M = 0.06  # must exceed the object clearance or neighbors sit on the limit
MODEL_DISTANCE_M = 1.2  # row center this far in front of the user

PANEL_TEXT: dict[str, str] = {
    "panel-1": "The solar system model shows the sun and its eight planets",
    "panel-2": "Sizes are shown to a common scale; walk up to a planet to learn more",
}

BODY_FACTS: dict[str, str] = {
    "sun": "The sun is the star at the center of the solar system",
    "mercury": "Mercury is the smallest planet and closest to the sun",
    "venus": "Venus is the hottest planet",
    "earth": "Earth is the only planet known to support life",
    "mars": "Mars is called the red planet",
    "jupiter": "Jupiter is the largest planet",
    "saturn": "Saturn is known for its rings",
    "uranus": "Uranus rotates on its side",
    "neptune": "Neptune is the windiest planet",
}


@dataclass
class SolarState:
    body_ids: dict[str, str]  # body name -> object id
    row_anchor: Vec2 | None = None  # midpoint of the row on the floor
    row_across: Vec2 | None = None  # unit direction the row runs along
    panels_read: set[str] = field(default_factory=set)
    animated: bool = False

    def panel_ids(self) -> tuple[str, ...]:
        return tuple(sorted(PANEL_TEXT))


def place_solar_system(
    world: World, frame: DeviceFrame, config: Config, next_id: Callable[[], str]
) -> tuple[SolarState, list[Event]]:
    """Lay the bodies out in a row in front of the user, facing back.

    The row runs perpendicular to the user's heading. Raises NoSpaceError
    when the model's overall footprint does not fit there.
    """
    floor = world.floor()
    if floor is None:
        raise NoSpaceError("the solar system needs a floor")
    heading = frame.body_heading
    across = heading.perp_left()
    row_len = sum(size for _, size in SOLAR_BODIES) + BODY_GAP_M * (len(SOLAR_BODIES) - 1)
    max_size = max(size for _, size in SOLAR_BODIES)
    anchor = frame.user_position.xy() + heading.scaled(MODEL_DISTANCE_M)

    # One fit check for the whole row's footprint before touching the world.
    model = VirtualObject(
        id="solar-model-probe",
        name="solar system",
        footprint=BoxDims(width=row_len, depth=max_size, height=max_size),
        pose=Pose(Vec3(anchor.x, anchor.y, floor.center.z), heading.angle()),
    )
    report = check_fit(world, model, model.pose, config, supporting_plane_id=floor.id)
    if not report.fits:
        raise NoSpaceError(f"no space for the solar system: {report.phrase()}")

    events: list[Event] = []
    body_ids: dict[str, str] = {}
    offset = -row_len / 2.0
    facing_user = heading.scaled(-1.0).angle()
    for name, size in SOLAR_BODIES:
        center = anchor + across.scaled(offset + size / 2.0)
        obj = VirtualObject(
            id=next_id(),
            name=name,
            footprint=BoxDims(width=size, depth=size, height=size),
            pose=Pose(Vec3(center.x, center.y, floor.center.z), facing_user),
            supporting_plane=floor.id,
        )
        world.add_object(obj)
        body_ids[name] = obj.id
        offset += size + BODY_GAP_M
    events.append(
        AnnouncementEvent(at=world.clock, tag="placed", text="Solar system placed in front of you")
    )
    return SolarState(body_ids=body_ids, row_anchor=anchor, row_across=across), events


def solar_activate(state: SolarState, world: World, target_id: str) -> list[Event] | None:
    """Handle activation of a panel or body; None when the id is foreign."""
    now = world.clock
    if target_id in PANEL_TEXT:
        events = [AnnouncementEvent(at=now, tag="panel", text=PANEL_TEXT[target_id])]
        state.panels_read.add(target_id)
        if len(state.panels_read) == len(PANEL_TEXT) and not state.animated:
            events.extend(equalize_planets(state, world))
        return events
    for name, oid in state.body_ids.items():
        if oid == target_id:
            obj = world.object(oid)
            if obj is None:
                return None
            return [AnnouncementEvent(at=now, tag="fact", text=BODY_FACTS[name])]
    return None


def equalize_planets(state: SolarState, world: World) -> list[Event]:
    """The equal-size animation: every planet ends at the same box size.

    Growing the small planets in place would pull neighbors under the
    object clearance, so the whole row re-spaces around its midpoint with
    the original gap between the new edges.
    """
    new_sizes = {name: (size if name == "sun" else EQUALIZED_SIZE_M) for name, size in SOLAR_BODIES}
    poses: dict[str, Pose] = {}
    if state.row_anchor is not None and state.row_across is not None:
        row_len = sum(new_sizes.values()) + BODY_GAP_M * (len(SOLAR_BODIES) - 1)
        offset = -row_len / 2.0
        for name, _ in SOLAR_BODIES:
            size = new_sizes[name]
            center = state.row_anchor + state.row_across.scaled(offset + size / 2.0)
            old = world.object(state.body_ids[name])
            assert old is not None
            poses[name] = Pose(Vec3(center.x, center.y, old.pose.position.z), old.pose.yaw)
            offset += size + BODY_GAP_M

    for name, oid in sorted(state.body_ids.items()):
        idx = next(i for i, o in enumerate(world.objects) if o.id == oid)
        obj = world.objects[idx]
        size = new_sizes[name]
        world.objects[idx] = VirtualObject(
            id=obj.id,
            name=obj.name,
            footprint=BoxDims(size, size, size),
            pose=poses.get(name, obj.pose),
            supporting_plane=obj.supporting_plane,
            wall_contacts=obj.wall_contacts,
        )
    state.animated = True
    return [
        AnnouncementEvent(
            at=world.clock,
            tag="animation",
            text="All planets resized to the same size",
        )
    ]
