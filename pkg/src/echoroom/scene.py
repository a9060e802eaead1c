"""World model: planes, virtual objects, device pose, clock, snapshots.

The world clock is kept internally in integer microseconds so that timed
behaviour (guidance cadence, inactivity prompts, dwell selection) compares
exactly instead of accumulating binary-float drift across ticks.
"""

from __future__ import annotations

import copy
import enum
import math
from dataclasses import dataclass, field, replace

from .geometry import Box3, GeometryError, OrientedRect, Vec2, Vec3

FLOAT_DIGITS = 6  # serialized float precision, keeps transcripts byte-stable

_UNIT_EPS = 1e-6
_CAMERA_REACH_M = 2.0


class InvariantError(ValueError):
    """A scene value violates one of the documented model invariants."""


class Orientation(str, enum.Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"


class PlaneKind(str, enum.Enum):
    FLOOR = "floor"
    TABLE = "table"
    WALL = "wall"
    OTHER = "other"


@dataclass(frozen=True)
class Plane:
    """A detected flat surface.

    Horizontal planes are rectangles at height ``center.z`` with half
    extents (hx, hy) rotated by ``yaw``. Vertical planes are wall segments:
    ``half_extents`` is (half_length, half_height), ``yaw`` points along the
    wall, and the segment spans ``center.z +- half_height`` vertically.
    """

    id: str
    kind: PlaneKind
    orientation: Orientation
    center: Vec3
    half_extents: tuple[float, float]
    yaw: float = 0.0

    def __post_init__(self) -> None:
        if not self.id:
            raise InvariantError("plane id must be non-empty")
        if self.half_extents[0] <= 0 or self.half_extents[1] <= 0:
            raise InvariantError(f"plane {self.id}: half extents must be positive")
        if not math.isfinite(self.yaw):
            raise GeometryError(f"plane {self.id}: non-finite yaw")
        if self.kind in (PlaneKind.FLOOR, PlaneKind.TABLE) and self.orientation is not Orientation.HORIZONTAL:
            raise InvariantError(f"plane {self.id}: {self.kind.value} must be horizontal")
        if self.kind is PlaneKind.WALL and self.orientation is not Orientation.VERTICAL:
            raise InvariantError(f"plane {self.id}: wall must be vertical")

    def rect(self) -> OrientedRect:
        """Horizontal footprint; walls collapse to a zero-width segment."""
        if self.orientation is Orientation.HORIZONTAL:
            return OrientedRect(self.center.xy(), self.half_extents[0], self.half_extents[1], self.yaw)
        return OrientedRect(self.center.xy(), self.half_extents[0], 0.0, self.yaw)

    def z_interval(self) -> tuple[float, float]:
        if self.orientation is Orientation.HORIZONTAL:
            return (self.center.z, self.center.z)
        hh = self.half_extents[1]
        return (self.center.z - hh, self.center.z + hh)

    def area_m2(self) -> float:
        a, b = self.half_extents
        return 4.0 * a * b

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "orientation": self.orientation.value,
            "center": _vec3_list(self.center),
            "half_extents": [_f(self.half_extents[0]), _f(self.half_extents[1])],
            "yaw": _f(self.yaw),
        }

    @staticmethod
    def from_dict(d: dict) -> "Plane":
        return Plane(
            id=str(d["id"]),
            kind=PlaneKind(d["kind"]),
            orientation=Orientation(d["orientation"]),
            center=_vec3_from(d["center"]),
            half_extents=(float(d["half_extents"][0]), float(d["half_extents"][1])),
            yaw=float(d.get("yaw", 0.0)),
        )


@dataclass(frozen=True)
class BoxDims:
    """Object footprint: width (side to side), depth (front to back), height."""

    width: float
    depth: float
    height: float

    def __post_init__(self) -> None:
        if self.width <= 0 or self.depth <= 0 or self.height <= 0:
            raise InvariantError("object dimensions must be positive")


@dataclass(frozen=True)
class Pose:
    """Base-center position plus yaw. Yaw 0 means the front faces +x."""

    position: Vec3
    yaw: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.yaw):
            raise GeometryError("non-finite yaw")


@dataclass(frozen=True)
class VirtualObject:
    id: str
    name: str
    footprint: BoxDims
    pose: Pose
    supporting_plane: str | None = None
    wall_contacts: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.id:
            raise InvariantError("object id must be non-empty")

    def rect(self) -> OrientedRect:
        """Footprint rectangle: depth runs along the facing axis (local x)."""
        return OrientedRect(
            self.pose.position.xy(),
            self.footprint.depth / 2.0,
            self.footprint.width / 2.0,
            self.pose.yaw,
        )

    def box(self) -> Box3:
        z0 = self.pose.position.z
        return Box3(self.rect(), z0, z0 + self.footprint.height)

    def at(self, pose: Pose, supporting_plane: str | None, wall_contacts: tuple[str, ...] = ()) -> "VirtualObject":
        return replace(self, pose=pose, supporting_plane=supporting_plane, wall_contacts=wall_contacts)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "footprint": {
                "width": _f(self.footprint.width),
                "depth": _f(self.footprint.depth),
                "height": _f(self.footprint.height),
            },
            "pose": {"position": _vec3_list(self.pose.position), "yaw": _f(self.pose.yaw)},
            "supporting_plane": self.supporting_plane,
            "wall_contacts": list(self.wall_contacts),
        }

    @staticmethod
    def from_dict(d: dict) -> "VirtualObject":
        fp = d["footprint"]
        return VirtualObject(
            id=str(d["id"]),
            name=str(d["name"]),
            footprint=BoxDims(float(fp["width"]), float(fp["depth"]), float(fp["height"])),
            pose=Pose(_vec3_from(d["pose"]["position"]), float(d["pose"]["yaw"])),
            supporting_plane=d.get("supporting_plane"),
            wall_contacts=tuple(d.get("wall_contacts", ())),
        )


@dataclass(frozen=True)
class DeviceFrame:
    """User body pose plus hand-held device camera pose."""

    user_position: Vec3
    body_heading: Vec2
    camera_origin: Vec3
    camera_forward: Vec3
    vertical_fov: float = math.radians(60.0)
    horizontal_fov: float = math.radians(45.0)

    def __post_init__(self) -> None:
        if abs(self.body_heading.norm() - 1.0) > _UNIT_EPS:
            raise InvariantError("body_heading must be unit length")
        if abs(self.camera_forward.norm() - 1.0) > _UNIT_EPS:
            raise InvariantError("camera_forward must be unit length")
        if (self.camera_origin - self.user_position).norm() > _CAMERA_REACH_M + _UNIT_EPS:
            raise InvariantError("camera_origin farther than arm's reach from user")
        if self.vertical_fov <= 0 or self.horizontal_fov <= 0:
            raise InvariantError("fields of view must be positive")

    def to_dict(self) -> dict:
        return {
            "user_position": _vec3_list(self.user_position),
            "body_heading": [_f(self.body_heading.x), _f(self.body_heading.y)],
            "camera_origin": _vec3_list(self.camera_origin),
            "camera_forward": _vec3_list(self.camera_forward),
            "vertical_fov": _f(self.vertical_fov),
            "horizontal_fov": _f(self.horizontal_fov),
        }

    @staticmethod
    def from_dict(d: dict) -> "DeviceFrame":
        return DeviceFrame(
            user_position=_vec3_from(d["user_position"]),
            body_heading=Vec2(float(d["body_heading"][0]), float(d["body_heading"][1])),
            camera_origin=_vec3_from(d["camera_origin"]),
            camera_forward=_vec3_from(d["camera_forward"]),
            vertical_fov=float(d.get("vertical_fov", math.radians(60.0))),
            horizontal_fov=float(d.get("horizontal_fov", math.radians(45.0))),
        )


@dataclass
class World:
    planes: list[Plane] = field(default_factory=list)
    objects: list[VirtualObject] = field(default_factory=list)
    clock_us: int = 0

    def __post_init__(self) -> None:
        self.validate()

    @property
    def clock(self) -> float:
        return self.clock_us / 1_000_000.0

    def validate(self) -> None:
        plane_ids = [p.id for p in self.planes]
        if len(set(plane_ids)) != len(plane_ids):
            raise InvariantError("duplicate plane ids")
        object_ids = [o.id for o in self.objects]
        if len(set(object_ids)) != len(object_ids):
            raise InvariantError("duplicate object ids")
        floors = [p for p in self.planes if p.kind is PlaneKind.FLOOR]
        if len(floors) > 1:
            raise InvariantError("at most one floor plane allowed")
        if self.clock_us < 0:
            raise InvariantError("clock must be non-negative")
        for obj in self.objects:
            self._check_support(obj)

    def _check_support(self, obj: VirtualObject) -> None:
        if obj.supporting_plane is None:
            return
        plane = self.plane(obj.supporting_plane)
        if plane is None:
            raise InvariantError(f"object {obj.id}: unknown supporting plane {obj.supporting_plane}")
        if not plane.rect().contains_rect(obj.rect(), eps=1e-6):
            raise InvariantError(f"object {obj.id}: base extends beyond plane {plane.id}")

    def advance_clock(self, dt: float) -> None:
        """Advance simulation time by dt seconds (quantized to microseconds)."""
        if dt < 0:
            raise InvariantError("clock cannot move backwards")
        self.clock_us += int(round(dt * 1_000_000))

    def plane(self, plane_id: str) -> Plane | None:
        for p in self.planes:
            if p.id == plane_id:
                return p
        return None

    def object(self, object_id: str) -> VirtualObject | None:
        for o in self.objects:
            if o.id == object_id:
                return o
        return None

    def object_by_name(self, name: str) -> VirtualObject | None:
        for o in self.objects:
            if o.name == name:
                return o
        return None

    def floor(self) -> Plane | None:
        for p in self.planes:
            if p.kind is PlaneKind.FLOOR:
                return p
        return None

    def walls(self) -> list[Plane]:
        return [p for p in self.planes if p.kind is PlaneKind.WALL]

    def add_object(self, obj: VirtualObject) -> None:
        if self.object(obj.id) is not None:
            raise InvariantError(f"duplicate object id {obj.id}")
        self._check_support(obj)
        self.objects.append(obj)

    def remove_object(self, object_id: str) -> VirtualObject:
        for i, o in enumerate(self.objects):
            if o.id == object_id:
                return self.objects.pop(i)
        raise InvariantError(f"no such object {object_id}")

    def to_dict(self) -> dict:
        return {
            "planes": [p.to_dict() for p in self.planes],
            "objects": [o.to_dict() for o in self.objects],
            "clock": _f(self.clock),
        }

    @staticmethod
    def from_dict(d: dict) -> "World":
        return World(
            planes=[Plane.from_dict(p) for p in d.get("planes", [])],
            objects=[VirtualObject.from_dict(o) for o in d.get("objects", [])],
            clock_us=int(round(float(d.get("clock", 0.0)) * 1_000_000)),
        )


@dataclass(frozen=True)
class Snapshot:
    """Deep-frozen copy of world and device frame taken at freeze time."""

    world: World
    frame: DeviceFrame
    frozen_at: float

    def to_dict(self) -> dict:
        return {
            "world": self.world.to_dict(),
            "frame": self.frame.to_dict(),
            "frozen_at": _f(self.frozen_at),
        }


def freeze(world: World, frame: DeviceFrame) -> Snapshot:
    """Capture a stable copy, independent of later world or pose mutation."""
    return Snapshot(world=copy.deepcopy(world), frame=frame, frozen_at=world.clock)


@dataclass(frozen=True)
class Config:
    """Every tunable constant in one place; overridable per session."""

    proximity_threshold_m: float = 0.5
    wall_clearance_m: float = 0.05
    object_clearance_m: float = 0.05
    guidance_interval_s: float = 3.0
    scan_inactivity_s: float = 5.0
    dwell_select_s: float = 2.0
    scan_cell_m: float = 0.25
    distance_round_m: float = 0.1
    scan_range_m: float = 5.0
    scan_progress_area_m2: float = 1.0

    def __post_init__(self) -> None:
        for name, value in self.__dict__.items():
            if not (isinstance(value, (int, float)) and value > 0 and math.isfinite(value)):
                raise InvariantError(f"config {name} must be strictly positive, got {value!r}")

    def to_dict(self) -> dict:
        return {k: _f(v) for k, v in self.__dict__.items()}

    @staticmethod
    def from_dict(d: dict) -> "Config":
        known = set(Config.__dataclass_fields__)
        unknown = set(d) - known - {"schema_version"}
        if unknown:
            raise InvariantError(f"unknown config fields: {sorted(unknown)}")
        return Config(**{k: float(v) for k, v in d.items() if k in known})


def _f(value: float) -> float:
    return round(float(value), FLOAT_DIGITS)


def _vec3_list(v: Vec3) -> list[float]:
    return [_f(v.x), _f(v.y), _f(v.z)]


def _vec3_from(values) -> Vec3:
    return Vec3(float(values[0]), float(values[1]), float(values[2]))
