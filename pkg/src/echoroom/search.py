"""Finding placed objects: camera hit testing and verbal guidance.

Camera-based search announces the nearest object on the device's center
ray (with a haptic) and when it leaves view. Guided search picks a target
and speaks a rounded distance plus a body-relative direction on a fixed
cadence, with an arrival announcement at the proximity threshold.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .events import AnnouncementEvent, Event, HapticEvent
from .geometry import Vec3, horizontal_distance, ray_box_intersect
from .scene import Config, DeviceFrame, World


class SearchError(Exception):
    pass


class ZeroOffsetError(SearchError):
    """Target distance rounds to zero; there is no direction to speak."""


class TargetMissingError(SearchError):
    pass


class Direction(enum.Enum):
    FRONT = "in front of you"
    LEFT = "to the left"
    RIGHT = "to the right"
    BEHIND = "behind you"


def round_distance(distance_m: float, config: Config) -> float:
    """Round half-up to the announcement grid (0.1 m by default)."""
    steps = math.floor(distance_m / config.distance_round_m + 0.5)
    return steps * config.distance_round_m


def format_distance(distance_m: float, config: Config) -> tuple[str, str]:
    """(number text, unit word) for a rounded distance.

    Whole values print without a decimal point; exactly 1 uses the
    singular "meter".
    """
    value = round_distance(distance_m, config)
    if abs(value - round(value)) < 1e-9:
        text = str(int(round(value)))
    else:
        text = f"{value:.6f}".rstrip("0")
    unit = "meter" if abs(value - 1.0) < 1e-9 else "meters"
    return text, unit


@dataclass(frozen=True)
class DirectionPhrase:
    distance_m: float  # rounded
    distance_text: str
    unit: str
    direction: Direction

    def render(self, name: str) -> str:
        return f"The {name} is {self.distance_text} {self.unit} {self.direction.value}"


def quantize_direction(frame: DeviceFrame, target: Vec3, config: Config) -> DirectionPhrase:
    """Distance plus the dominant body-relative direction toward target.

    Ties between equally dominant axes resolve front, then left, then
    right, then behind.
    """
    offset = target.xy() - frame.user_position.xy()
    distance = offset.norm()
    rounded = round_distance(distance, config)
    if rounded < config.distance_round_m / 2.0:
        raise ZeroOffsetError("target is at the user's position")
    heading = frame.body_heading
    axes = (
        (Direction.FRONT, heading),
        (Direction.LEFT, heading.perp_left()),
        (Direction.RIGHT, heading.perp_left().scaled(-1.0)),
        (Direction.BEHIND, heading.scaled(-1.0)),
    )
    dots = [offset.dot(axis) for _, axis in axes]
    best = max(dots)
    direction = next(d for (d, _), dot in zip(axes, dots) if dot == best)
    text, unit = format_distance(distance, config)
    return DirectionPhrase(distance_m=rounded, distance_text=text, unit=unit, direction=direction)


def nearest_objects(world: World, frame: DeviceFrame) -> list[tuple[str, float]]:
    """(object id, horizontal distance) ascending; ties by id."""
    pairs = [
        (obj.id, horizontal_distance(frame.user_position, obj.pose.position))
        for obj in world.objects
    ]
    pairs.sort(key=lambda p: (p[1], p[0]))
    return pairs


@dataclass
class GuidanceState:
    """Per-target guidance bookkeeping for the periodic announcements."""

    target_id: str
    last_announce_at_us: int | None = None
    arrived: bool = False


def guidance_tick(
    state: GuidanceState, world: World, frame: DeviceFrame, config: Config, force: bool = False
) -> list[Event]:
    """Emit the arrival announcement and/or the periodic direction phrase.

    ``force`` models the immediate announcement right after target
    selection; afterwards phrases repeat every guidance_interval_s.
    """
    target = world.object(state.target_id)
    if target is None:
        raise TargetMissingError(f"guidance target {state.target_id} no longer exists")
    events: list[Event] = []
    now = world.clock
    distance = horizontal_distance(frame.user_position, target.pose.position)

    inside = distance <= config.proximity_threshold_m
    if inside and not state.arrived:
        events.append(AnnouncementEvent(at=now, tag="arrival", text=f"You have reached the {target.name}"))
    state.arrived = inside

    interval_us = int(round(config.guidance_interval_s * 1_000_000))
    due = (
        force
        or state.last_announce_at_us is None
        or world.clock_us - state.last_announce_at_us >= interval_us
    )
    if due:
        try:
            phrase = quantize_direction(frame, target.pose.position, config)
            events.append(AnnouncementEvent(at=now, tag="direction", text=phrase.render(target.name)))
        except ZeroOffsetError:
            pass
        state.last_announce_at_us = world.clock_us
    return events


@dataclass
class HitTestState:
    current_id: str | None = None
    current_name: str | None = None


def camera_hit_test(
    world: World, frame: DeviceFrame, state: HitTestState, config: Config
) -> tuple[str | None, float | None, list[Event]]:
    """Nearest object on the camera's center ray, with enter/exit events.

    Returns (object id or None, announced horizontal distance or None,
    events). Entering view announces "Found {name} {d} meters away" plus a
    haptic; leaving announces "{name} no longer in view".
    """
    best: tuple[float, str] | None = None
    for obj in world.objects:
        t = ray_box_intersect(frame.camera_origin, frame.camera_forward, obj.box())
        if t is None:
            continue
        if best is None or (t, obj.id) < best:
            best = (t, obj.id)

    events: list[Event] = []
    now = world.clock
    hit_id = best[1] if best else None
    distance: float | None = None
    if hit_id is not None:
        obj = world.object(hit_id)
        assert obj is not None
        distance = horizontal_distance(frame.user_position, obj.pose.position)

    if hit_id != state.current_id:
        if state.current_id is not None and state.current_name:
            events.append(
                AnnouncementEvent(at=now, tag="lost", text=f"{state.current_name} no longer in view")
            )
        if hit_id is not None:
            obj = world.object(hit_id)
            assert obj is not None and distance is not None
            text, unit = format_distance(distance, config)
            events.append(
                AnnouncementEvent(at=now, tag="found", text=f"Found {obj.name} {text} {unit} away")
            )
            events.append(HapticEvent(at=now))
        state.current_id = hit_id
        state.current_name = world.object(hit_id).name if hit_id else None
    return hit_id, distance, events


@dataclass
class ProximityState:
    inside: set[str] = field(default_factory=set)


def proximity_events(world: World, frame: DeviceFrame, state: ProximityState, config: Config) -> list[Event]:
    """Near/left announcements on proximity threshold crossings.

    One event per crossing per object; starting inside counts as a
    crossing. Objects removed from the world are pruned silently.
    """
    events: list[Event] = []
    now = world.clock
    live_ids = {obj.id for obj in world.objects}
    state.inside &= live_ids
    for obj in sorted(world.objects, key=lambda o: o.id):
        near = horizontal_distance(frame.user_position, obj.pose.position) <= config.proximity_threshold_m
        was = obj.id in state.inside
        if near and not was:
            state.inside.add(obj.id)
            events.append(AnnouncementEvent(at=now, tag="near", text=f"You are near the {obj.name}"))
        elif was and not near:
            state.inside.discard(obj.id)
            events.append(AnnouncementEvent(at=now, tag="left", text=f"You are no longer near the {obj.name}"))
    return events
