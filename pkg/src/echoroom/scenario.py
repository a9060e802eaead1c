"""Scenario and script files, deterministic replay, and transcripts.

A scenario file describes the room, the placeable catalog, and optional
goals; a script file is an ordered list of steps. Replaying a script
produces a line-oriented transcript (`T=<sec> <KIND> <payload>`) that is a
pure function of (scenario, script, config).
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field

from .geometry import Vec2, Vec3, intervals_overlap, rects_intersect
from .placement import boxes_overlap
from .scan import ScanGoal
from .scene import BoxDims, Config, World
from .session import CatalogItem, Session, SessionError

SCHEMA_VERSION = 1

TAXONOMY_TAGS = frozenset(
    {
        "observing_content",
        "physical_virtual_correspondence",
        "creating_content",
        "transforming_content",
        "activating_content",
    }
)


class SchemaError(ValueError):
    def __init__(self, message: str, where: str | None = None):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


class StepPreconditionError(Exception):
    def __init__(self, step_index: int, op: str, message: str):
        super().__init__(f"step {step_index} ({op}): {message}")
        self.step_index = step_index
        self.op = op


@dataclass(frozen=True)
class Scenario:
    name: str
    world: World
    catalog: tuple[CatalogItem, ...] = ()
    scan_goal: ScanGoal | None = None
    taxonomy_tags: frozenset[str] = frozenset()
    start_position: Vec2 | None = None
    start_heading_rad: float = 0.0


@dataclass(frozen=True)
class Step:
    op: str
    args: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Script:
    steps: tuple[Step, ...]


# op -> (required arg names, optional arg names)
_STEP_ARGS: dict[str, tuple[set[str], set[str]]] = {
    "move": ({"dx", "dy"}, set()),
    "turn": ({"dtheta"}, set()),
    "point_device": (set(), {"direction", "pitch", "yaw"}),
    "wait": ({"seconds"}, set()),
    "magic_tap": (set(), set()),
    "select_catalog_item": ({"name"}, set()),
    "confirm_placement": (set(), set()),
    "answer_prompt": ({"choice"}, set()),
    "select_search_target": ({"name"}, set()),
    "activate": ({"object_id"}, {"action"}),
    "set_mode": ({"mode"}, set()),
}


def _load_json(path: str, what: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as e:
        raise SchemaError(str(e), what)
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}", what)
    if not isinstance(data, dict):
        raise SchemaError("top level must be a JSON object", what)
    return data


def _check_version(data: dict, what: str) -> None:
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"schema_version must be {SCHEMA_VERSION}, got {version!r}", what)


def load_scenario(path: str) -> Scenario:
    data = _load_json(path, "scenario")
    _check_version(data, "scenario")
    if "world" not in data or not isinstance(data["world"], dict):
        raise SchemaError("missing world object", "scenario.world")

    world = World.from_dict(data["world"])

    catalog: list[CatalogItem] = []
    seen = set()
    for i, entry in enumerate(data.get("catalog", [])):
        where = f"scenario.catalog[{i}]"
        if not isinstance(entry, dict) or not isinstance(entry.get("name"), str) or not entry["name"]:
            raise SchemaError("catalog entries need a non-empty name", where)
        if entry["name"] in seen:
            raise SchemaError(f"duplicate catalog name {entry['name']!r}", where)
        seen.add(entry["name"])
        try:
            dims = BoxDims(float(entry["width"]), float(entry["depth"]), float(entry["height"]))
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaError(f"bad dimensions: {e}", where)
        catalog.append(CatalogItem(name=entry["name"], dims=dims))

    goal = None
    if "scan_goal" in data:
        g = data["scan_goal"]
        if not isinstance(g, dict):
            raise SchemaError("scan_goal must be an object", "scenario.scan_goal")
        goal = ScanGoal(
            min_surfaces=int(g.get("min_surfaces", 0)),
            min_vertical=int(g.get("min_vertical", 0)),
            min_area_m2=float(g.get("min_area_m2", 0.0)),
        )

    tags = frozenset(data.get("taxonomy_tags", []))
    unknown = tags - TAXONOMY_TAGS
    if unknown:
        raise SchemaError(f"unknown taxonomy tags: {sorted(unknown)}", "scenario.taxonomy_tags")

    start_position = None
    heading = 0.0
    if "start" in data:
        s = data["start"]
        if not isinstance(s, dict):
            raise SchemaError("start must be an object", "scenario.start")
        if "position" in s:
            start_position = Vec2(float(s["position"][0]), float(s["position"][1]))
        heading = float(s.get("heading_rad", 0.0))

    return Scenario(
        name=str(data.get("name", "scenario")),
        world=world,
        catalog=tuple(catalog),
        scan_goal=goal,
        taxonomy_tags=tags,
        start_position=start_position,
        start_heading_rad=heading,
    )


def load_script(path: str) -> Script:
    data = _load_json(path, "script")
    _check_version(data, "script")
    raw_steps = data.get("steps")
    if not isinstance(raw_steps, list):
        raise SchemaError("missing steps list", "script.steps")
    steps = []
    for i, raw in enumerate(raw_steps):
        steps.append(parse_step(raw, where=f"script.steps[{i}]"))
    return Script(steps=tuple(steps))


def parse_step(raw: dict, where: str = "step") -> Step:
    if not isinstance(raw, dict) or "op" not in raw:
        raise SchemaError("each step needs an op", where)
    op = raw["op"]
    if op not in _STEP_ARGS:
        raise SchemaError(f"unknown op {op!r}", where)
    required, optional = _STEP_ARGS[op]
    args = {k: v for k, v in raw.items() if k != "op"}
    missing = required - set(args)
    if missing:
        raise SchemaError(f"{op} missing {sorted(missing)}", where)
    unknown = set(args) - required - optional
    if unknown:
        raise SchemaError(f"{op} got unknown fields {sorted(unknown)}", where)
    if op == "point_device":
        has_vector = "direction" in args
        has_angles = "pitch" in args and "yaw" in args
        if has_vector == has_angles:
            raise SchemaError("point_device needs either direction or pitch+yaw", where)
    return Step(op=op, args=args)


def build_session(scenario: Scenario, config: Config) -> Session:
    """Fresh session on a deep copy of the scenario's world."""
    return Session(
        world=copy.deepcopy(scenario.world),
        config=config,
        catalog=scenario.catalog,
        goal=scenario.scan_goal,
        start_position=scenario.start_position,
        start_heading_rad=scenario.start_heading_rad,
    )


def apply_step(session: Session, step: Step) -> None:
    a = step.args
    if step.op == "move":
        session.move(float(a["dx"]), float(a["dy"]))
    elif step.op == "turn":
        session.turn(float(a["dtheta"]))
    elif step.op == "point_device":
        if "direction" in a:
            d = a["direction"]
            session.point_device_vector(Vec3(float(d[0]), float(d[1]), float(d[2])))
        else:
            session.point_device(float(a["pitch"]), float(a["yaw"]))
    elif step.op == "wait":
        session.tick(float(a["seconds"]))
    elif step.op == "magic_tap":
        session.magic_tap()
    elif step.op == "select_catalog_item":
        session.select_catalog_item(str(a["name"]))
    elif step.op == "confirm_placement":
        session.confirm_placement()
    elif step.op == "answer_prompt":
        session.answer_prompt(str(a["choice"]))
    elif step.op == "select_search_target":
        session.select_search_target(str(a["name"]))
    elif step.op == "activate":
        session.activate(str(a["object_id"]), str(a.get("action", "select")))
    elif step.op == "set_mode":
        session.set_mode(str(a["mode"]))
    else:  # pragma: no cover - parse_step rejects unknown ops
        raise SchemaError(f"unknown op {step.op!r}")


def format_time(seconds: float) -> str:
    text = f"{seconds:.6f}".rstrip("0")
    if text.endswith("."):
        text += "0"
    return text


def canonical_json(data: dict) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def run_script(scenario: Scenario, script: Script, config: Config) -> str:
    """Replay a script; returns the transcript text.

    Raises StepPreconditionError naming the failing step when a step is
    invalid against the current session state.
    """
    session = build_session(scenario, config)
    lines = [f"T={format_time(session.world.clock)} STATE {canonical_json(session.world.to_dict())}"]
    for index, step in enumerate(script.steps):
        prefix = f"T={format_time(session.world.clock)} STEP {step.op}"
        lines.append(f"{prefix} {canonical_json(step.args)}" if step.args else prefix)
        try:
            apply_step(session, step)
        except SessionError as e:
            raise StepPreconditionError(index, step.op, e.text)
        for event in session.drain_events():
            lines.append(f"T={format_time(event.at)} {event.transcript_line()}")
    lines.append(f"T={format_time(session.world.clock)} STATE {canonical_json(session.world.to_dict())}")
    return "\n".join(lines) + "\n"


def integrity_report(world: World, config: Config) -> list[str]:
    """Spatial-consistency violations in a world; empty means clean.

    Guided placements that intentionally touch a wall are exempt from the
    clearance check against that wall only.
    """
    problems: list[str] = []
    objs = sorted(world.objects, key=lambda o: o.id)
    for i, a in enumerate(objs):
        for b in objs[i + 1 :]:
            if boxes_overlap(a, b, config.object_clearance_m):
                problems.append(f"objects {a.id} and {b.id} closer than clearance")
    for obj in objs:
        z0 = obj.pose.position.z
        z1 = z0 + obj.footprint.height
        inflated = obj.rect().inflated(config.wall_clearance_m)
        for wall in world.walls():
            if wall.id in obj.wall_contacts:
                continue
            wz0, wz1 = wall.z_interval()
            if intervals_overlap(z0, z1, wz0, wz1) and rects_intersect(inflated, wall.rect()):
                problems.append(f"object {obj.id} within wall clearance of {wall.id}")
        if obj.supporting_plane is not None:
            plane = world.plane(obj.supporting_plane)
            if plane is None or not plane.rect().contains_rect(obj.rect(), eps=1e-6):
                problems.append(f"object {obj.id} not contained by its supporting plane")
    return problems
