"""One interactive session: world, user pose, mode, and engine wiring.

The session exposes the same operations whether driven by a script or over
the wire. Time advances only through tick(); pose-changing operations also
run the edge-triggered engines (placement tracking, hit test, proximity)
so announcements follow state transitions, not polling.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from . import a11y, apps, placement, scan, search
from .events import AnnouncementEvent, Event
from .geometry import Vec2, Vec3, unit_from_angle
from .scene import BoxDims, Config, DeviceFrame, Pose, VirtualObject, World

SCHEMA_VERSION = 1
TICK_S = 0.1
TICK_US = 100_000
CAMERA_HEIGHT_M = 1.4
VIEWPORT = a11y.Viewport(400.0, 800.0)

MODES = (
    "scan",
    "place_camera",
    "place_guided",
    "search_camera",
    "search_guided",
    "furniture",
    "solar",
)

_HIT_TEST_MODES = ("search_camera", "furniture", "solar")


class SessionError(Exception):
    """An operation the session refuses; the session itself stays usable."""

    def __init__(self, code: str, text: str):
        super().__init__(text)
        self.code = code
        self.text = text


@dataclass(frozen=True)
class CatalogItem:
    name: str
    dims: BoxDims


class Session:
    def __init__(
        self,
        world: World,
        config: Config,
        catalog: tuple[CatalogItem, ...] = (),
        goal: scan.ScanGoal | None = None,
        start_position: Vec2 | None = None,
        start_heading_rad: float = 0.0,
    ):
        self.world = world
        self.config = config
        self.catalog = tuple(catalog)
        self.goal = goal
        self.mode = "scan"

        floor = world.floor()
        if start_position is None:
            start_position = floor.center.xy() if floor else Vec2(0.0, 0.0)
        self.user_xy = start_position
        self.heading_rad = start_heading_rad % math.tau
        self.cam_pitch = 0.0  # positive pitches the camera down
        self.cam_yaw = self.heading_rad

        self.a11y = a11y.SessionAccessibilityState()
        self.scan = scan.ScanState(last_new_area_at_us=world.clock_us)
        self.placement: placement.PlacementSession | None = None
        self.guidance: search.GuidanceState | None = None
        self.hits = search.HitTestState()
        self.proximity = search.ProximityState()
        self.furniture = apps.FurnitureState()
        self.solar: apps.SolarState | None = None

        self._id_counter = 0
        for obj in world.objects:
            m = re.fullmatch(r"obj-(\d+)", obj.id)
            if m:
                self._id_counter = max(self._id_counter, int(m.group(1)))

    # -- pose and views -------------------------------------------------

    def frame(self) -> DeviceFrame:
        floor = self.world.floor()
        z = floor.center.z if floor else 0.0
        cp, sp = math.cos(self.cam_pitch), math.sin(self.cam_pitch)
        forward = Vec3(cp * math.cos(self.cam_yaw), cp * math.sin(self.cam_yaw), -sp)
        return DeviceFrame(
            user_position=Vec3(self.user_xy.x, self.user_xy.y, z),
            body_heading=unit_from_angle(self.heading_rad),
            camera_origin=Vec3(self.user_xy.x, self.user_xy.y, z + CAMERA_HEIGHT_M),
            camera_forward=forward,
        )

    def query_state(self) -> tuple[World, DeviceFrame]:
        """World and frame that camera-driven queries should answer from."""
        if self.a11y.frozen is not None:
            return self.a11y.frozen.world, self.a11y.frozen.frame
        return self.world, self.frame()

    @property
    def frozen(self) -> bool:
        return self.a11y.frozen is not None

    def _next_object_id(self) -> str:
        self._id_counter += 1
        return f"obj-{self._id_counter}"

    def _push(self, events: list[Event]) -> None:
        for event in events:
            self.a11y.queue.push(event)

    def _announce(self, tag: str, text: str) -> None:
        self._push([AnnouncementEvent(at=self.world.clock, tag=tag, text=text)])

    def drain_events(self) -> list[Event]:
        return self.a11y.queue.drain(self.world.clock)

    # -- operations -------------------------------------------------------

    def set_mode(self, mode: str) -> None:
        if mode not in MODES:
            raise SessionError("bad_mode", f"unknown mode {mode!r}")
        previous = self.mode
        self.placement = None
        self.guidance = None
        self.hits = search.HitTestState()
        self.proximity = search.ProximityState()
        self.furniture.reset()
        self.mode = mode
        if mode == "solar" and self.solar is None:
            try:
                self.solar, events = apps.place_solar_system(
                    self.world, self.frame(), self.config, self._next_object_id
                )
            except apps.NoSpaceError as e:
                self.mode = previous
                raise SessionError("no_space", str(e))
            self._push(events)
        self._edge_refresh()

    def move(self, dx: float, dy: float) -> None:
        if not (math.isfinite(dx) and math.isfinite(dy)):
            raise SessionError("bad_value", "move deltas must be finite")
        self.user_xy = self.user_xy + Vec2(dx, dy)
        self._edge_refresh()

    def turn(self, dtheta: float) -> None:
        if not math.isfinite(dtheta):
            raise SessionError("bad_value", "turn angle must be finite")
        self.heading_rad = (self.heading_rad + dtheta) % math.tau
        self.cam_yaw = (self.cam_yaw + dtheta) % math.tau
        self._edge_refresh()

    def point_device(self, pitch: float, yaw: float) -> None:
        if not (math.isfinite(pitch) and math.isfinite(yaw)):
            raise SessionError("bad_value", "device angles must be finite")
        self.cam_pitch = max(-math.pi / 2, min(math.pi / 2, pitch))
        self.cam_yaw = yaw % math.tau
        self._edge_refresh()

    def point_device_vector(self, direction: Vec3) -> None:
        n = direction.norm()
        if n < 1e-9:
            raise SessionError("bad_value", "device direction must be non-zero")
        d = direction.scaled(1.0 / n)
        pitch = -math.asin(max(-1.0, min(1.0, d.z)))
        yaw = math.atan2(d.y, d.x) if abs(d.x) + abs(d.y) > 1e-12 else self.cam_yaw
        self.point_device(pitch, yaw)

    def magic_tap(self) -> None:
        self._push(a11y.magic_tap(self.a11y, self.world, self.frame()))
        self._edge_refresh()

    def select_catalog_item(self, name: str) -> None:
        if self.mode not in ("place_camera", "place_guided", "furniture"):
            raise SessionError("bad_mode", f"cannot place objects in {self.mode} mode")
        item = next((c for c in self.catalog if c.name == name), None)
        if item is None:
            raise SessionError("bad_choice", f"no catalog item named {name!r}")
        obj = VirtualObject(
            id=self._next_object_id(),
            name=item.name,
            footprint=item.dims,
            pose=Pose(Vec3(0.0, 0.0, 0.0), 0.0),
        )
        if self.mode == "place_guided":
            self.placement = placement.PlacementSession(mode="guided", obj=obj)
            try:
                prompt = placement.start_guided(self.placement, self.world, self.scan.surfaces_order)
            except placement.NoFloorError as e:
                self.placement = None
                raise SessionError("no_floor", str(e))
            self._announce("prompt", prompt.question)
        else:
            self.placement = placement.PlacementSession(mode="camera", obj=obj)
            self._track_placement()

    def answer_prompt(self, choice: str) -> None:
        sess = self.placement
        if sess is None or sess.mode != "guided" or sess.placed:
            raise SessionError("bad_mode", "no placement question is active")
        try:
            nxt = placement.answer_prompt(sess, choice)
        except placement.InvalidChoiceError as e:
            raise SessionError("bad_choice", str(e))
        if sess.stage == "ready":
            self._resolve_guided()
        elif nxt is not None:
            self._announce("prompt", nxt.question)

    def confirm_placement(self) -> None:
        sess = self.placement
        if sess is None or sess.placed:
            raise SessionError("bad_mode", "no placement in progress")
        if sess.mode == "guided":
            if sess.stage == "facing":
                if not self._resolve_guided():
                    return
            if sess.proposed_pose is None:
                raise SessionError("bad_choice", "answer the placement questions first")
        try:
            _, events = placement.confirm_placement(self.world, sess, self.config)
        except placement.PlacementBlocked as e:
            if e.report is not None:
                self._announce("placement", e.report.phrase())
                return
            raise SessionError("bad_mode", str(e))
        self._push(events)
        self.placement = None
        self._edge_refresh()

    def select_search_target(self, name: str) -> None:
        if self.mode != "search_guided":
            raise SessionError("bad_mode", "target selection requires guided search mode")
        target_id = None
        for oid, _ in search.nearest_objects(self.world, self.frame()):
            obj = self.world.object(oid)
            if obj is not None and obj.name == name:
                target_id = oid
                break
        if target_id is None:
            raise SessionError("bad_choice", f"no object named {name!r}")
        self.guidance = search.GuidanceState(target_id=target_id)
        self._push(search.guidance_tick(self.guidance, self.world, self.frame(), self.config, force=True))

    def activate(self, object_id: str, action: str = "select") -> None:
        if self.mode == "solar" and self.solar is not None:
            handled = apps.solar_activate(self.solar, self.world, object_id)
            if handled is not None:
                self._push(handled)
                return
        obj = self.world.object(object_id)
        if obj is None:
            raise SessionError("bad_choice", f"no such element {object_id!r}")
        if action == "select":
            self._announce("element", obj.name)
            return
        if action not in ("edit_position", "delete"):
            raise SessionError("bad_choice", f"unknown action {action!r}")
        if self.mode != "furniture":
            raise SessionError("bad_mode", f"{action} requires furniture mode")
        if self.furniture.selected_id != object_id:
            raise SessionError("bad_choice", f"{obj.name} is not selected")
        if action == "delete":
            self.world.remove_object(object_id)
            self.furniture.reset()
            if self.hits.current_id == object_id:
                self.hits = search.HitTestState()
            self._announce("deleted", f"Deleted {obj.name}")
        else:
            removed = self.world.remove_object(object_id)
            self.furniture.reset()
            if self.hits.current_id == object_id:
                self.hits = search.HitTestState()
            self.proximity.inside.discard(object_id)
            self.placement = placement.PlacementSession(
                mode="camera", obj=removed, editing_object_id=object_id
            )
            self._announce("edit", f"Editing position of {obj.name}")
            self._track_placement()

    def tick(self, dt: float) -> None:
        n = int(round(dt / TICK_S))
        if n < 1 or abs(dt - n * TICK_S) > 1e-9:
            raise SessionError("bad_tick", f"dt must be a positive multiple of {TICK_S} s")
        for _ in range(n):
            self.world.advance_clock(TICK_S)
            self._tick_refresh()

    # -- engine stepping ---------------------------------------------------

    def _track_placement(self) -> None:
        sess = self.placement
        if sess is None or sess.mode != "camera" or sess.placed:
            return
        try:
            _, _, events = placement.track_position(self.world, self.frame(), sess, self.config)
        except placement.NoFloorError as e:
            self.placement = None
            raise SessionError("no_floor", str(e))
        self._push(events)

    def _run_camera_queries(self) -> None:
        qw, qf = self.query_state()
        _, _, events = search.camera_hit_test(qw, qf, self.hits, self.config)
        self._push(events)
        self._push(search.proximity_events(self.world, self.frame(), self.proximity, self.config))

    def _edge_refresh(self) -> None:
        self._track_placement()
        if self.mode in _HIT_TEST_MODES:
            self._run_camera_queries()

    def _tick_refresh(self) -> None:
        if self.mode == "scan":
            if self.frozen:
                # A frozen view cannot reveal new area; pause the idle clock too.
                self.scan.last_new_area_at_us += TICK_US
            else:
                self._push(scan.step_scan(self.world, self.frame(), self.scan, TICK_S, self.config))
                if self.goal is not None and not self.scan.goal_announced:
                    summary = scan.scan_summary(self.scan, self.world, self.config)
                    if scan.check_goal(summary, self.goal):
                        self.scan.goal_announced = True
                        self._announce("goal", "Scan goal met")
        self._track_placement()
        if self.mode == "search_guided" and self.guidance is not None:
            try:
                self._push(search.guidance_tick(self.guidance, self.world, self.frame(), self.config))
            except search.TargetMissingError:
                self.guidance = None
                self._announce("guidance", "Search target lost")
        if self.mode in _HIT_TEST_MODES:
            self._run_camera_queries()
        if self.mode == "furniture":
            self._push(apps.dwell_step(self.world, self.frame(), self.furniture, TICK_US, self.config))

    # -- derived views -----------------------------------------------------

    def current_prompt(self) -> placement.Prompt | None:
        if self.placement is not None:
            return self.placement.current_prompt()
        return None

    def elements(self) -> list[a11y.ScreenElement]:
        qw, qf = self.query_state()
        actions: dict[str, tuple[str, ...]] = {}
        if self.mode == "furniture" and self.furniture.selected_id:
            actions[self.furniture.selected_id] = ("select", "edit_position", "delete")
        out = a11y.project_elements(qw, qf, VIEWPORT, actions)
        if self.mode == "solar" and self.solar is not None:
            for i, panel_id in enumerate(self.solar.panel_ids()):
                rect = (0.0, 40.0 * i, VIEWPORT.width, 40.0 * (i + 1))
                out.insert(i, a11y.ScreenElement(panel_id, f"information panel {i + 1}", rect))
        return out

    def digest(self) -> dict:
        revealed: dict[str, dict] = {}
        for plane_id, i, j in sorted(self.scan.revealed_cells):
            if plane_id not in revealed:
                plane = self.world.plane(plane_id)
                if plane is None:
                    continue
                grid = scan.plane_grid(plane, self.config)
                revealed[plane_id] = {"nu": grid.nu, "nv": grid.nv, "cells": []}
            revealed[plane_id]["cells"].append([i, j])
        summary = scan.scan_summary(self.scan, self.world, self.config)
        sess = self.placement
        frame = self.frame()
        return {
            "schema_version": SCHEMA_VERSION,
            "mode": self.mode,
            "clock": round(self.world.clock, 6),
            "frozen": self.frozen,
            "user": {
                "position": [round(v, 6) for v in (frame.user_position.x, frame.user_position.y, frame.user_position.z)],
                "heading_rad": round(self.heading_rad, 6),
                "camera_pitch": round(self.cam_pitch, 6),
                "camera_yaw": round(self.cam_yaw, 6),
            },
            "world": self.world.to_dict(),
            "scan": {
                "surface_count": summary.surface_count,
                "vertical_count": summary.vertical_count,
                "total_area_m2": round(summary.total_area_m2, 6),
                "goal_met": self.scan.goal_announced if self.goal else None,
                "revealed": revealed,
            },
            "catalog": [c.name for c in self.catalog],
            "placement": None
            if sess is None
            else {
                "mode": sess.mode,
                "object": sess.obj.name,
                "stage": sess.stage,
                "fits": sess.last_fits,
                "proposed_pose": None
                if sess.proposed_pose is None
                else {
                    "position": [round(v, 6) for v in (
                        sess.proposed_pose.position.x,
                        sess.proposed_pose.position.y,
                        sess.proposed_pose.position.z,
                    )],
                    "yaw": round(sess.proposed_pose.yaw, 6),
                },
            },
            "prompt": None
            if self.current_prompt() is None
            else {"question": self.current_prompt().question, "options": list(self.current_prompt().options)},
            "guidance": None if self.guidance is None else {"target_id": self.guidance.target_id},
            "furniture": {"selected_id": self.furniture.selected_id},
            "targets": [[oid, round(d, 6)] for oid, d in search.nearest_objects(self.world, frame)],
        }

    def _resolve_guided(self) -> bool:
        """Resolve the answered guided path into a pose; False on failure."""
        sess = self.placement
        assert sess is not None and sess.candidates is not None
        assert sess.chosen_surface is not None and sess.chosen_position is not None
        try:
            pose, plane_id, contacts = placement.resolve_candidate(
                self.world,
                self.frame(),
                sess.obj,
                sess.chosen_surface,
                sess.chosen_position,
                unit_from_angle(self.heading_rad),
                self.config,
                table_id=sess.candidates.table_id,
            )
        except placement.UnresolvableError as e:
            sess.stage = "surface"
            sess.chosen_surface = None
            sess.chosen_position = None
            sess.proposed_pose = None
            self._announce("placement", f"Cannot place the {sess.obj.name} there: {e}")
            prompt = sess.current_prompt()
            if prompt is not None:
                self._announce("prompt", prompt.question)
            return False
        sess.proposed_pose = pose
        sess.supporting_plane_id = plane_id
        sess.wall_contacts = contacts
        sess.stage = "resolved"
        self._announce("placement", f"Ready to place the {sess.obj.name}")
        return True
