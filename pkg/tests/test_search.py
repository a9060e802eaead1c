import math
import random

import pytest
from hypothesis import given, strategies as st

from echoroom.events import AnnouncementEvent, HapticEvent
from echoroom.geometry import Vec2, Vec3
from echoroom.scene import Config
from echoroom.search import (
    Direction,
    GuidanceState,
    HitTestState,
    ProximityState,
    TargetMissingError,
    ZeroOffsetError,
    camera_hit_test,
    format_distance,
    guidance_tick,
    nearest_objects,
    proximity_events,
    quantize_direction,
    round_distance,
)
from _support import box_at, frame_at, room_world, run_follower


@pytest.mark.parametrize(
    "raw, expected",
    [(0.0, 0.0), (0.04, 0.0), (0.05, 0.1), (0.14, 0.1), (0.45, 0.5), (1.04, 1.0), (3.0, 3.0)],
)
def test_round_distance_half_up(raw, expected, config):
    assert round_distance(raw, config) == pytest.approx(expected)


@pytest.mark.parametrize(
    "raw, text, unit",
    [
        (0.5, "0.5", "meters"),
        (1.0, "1", "meter"),
        (0.96, "1", "meter"),
        (1.04, "1", "meter"),
        (2.0, "2", "meters"),
        (1.26, "1.3", "meters"),
        (0.0, "0", "meters"),
    ],
)
def test_format_distance(raw, text, unit, config):
    assert format_distance(raw, config) == (text, unit)


class TestQuantizeDirection:
    def phrase(self, offset, heading=0.0, config=None):
        frame = frame_at(0, 0, heading=heading)
        target = Vec3(offset[0], offset[1], 0.0)
        return quantize_direction(frame, target, config or Config())

    def test_cardinal_directions(self):
        assert self.phrase((2, 0)).direction is Direction.FRONT
        assert self.phrase((0, 3)).direction is Direction.LEFT
        assert self.phrase((0, -3)).direction is Direction.RIGHT
        assert self.phrase((-1, 0)).direction is Direction.BEHIND

    def test_exact_diagonal_prefers_front_then_left(self):
        assert self.phrase((1, 1)).direction is Direction.FRONT
        assert self.phrase((1, -1)).direction is Direction.FRONT
        assert self.phrase((-1, 1)).direction is Direction.LEFT
        # behind-left ties LEFT, behind-right ties RIGHT; BEHIND never wins a tie
        assert self.phrase((-1, -1)).direction is Direction.RIGHT

    def test_render(self):
        p = self.phrase((2.02, 0.3))
        assert p.render("chair") == "The chair is 2 meters in front of you"
        assert self.phrase((1.0, 0)).render("lamp") == "The lamp is 1 meter in front of you"

    def test_zero_offset_raises(self, config):
        with pytest.raises(ZeroOffsetError):
            self.phrase((0.04, 0))
        assert self.phrase((0.06, 0)).distance_m == pytest.approx(0.1)

    @given(
        heading=st.floats(0, math.tau, allow_nan=False),
        dist=st.floats(0.3, 8.0),
        bearing=st.floats(0, math.tau),
        turn=st.floats(0, math.tau),
    )
    def test_rotation_equivariance(self, heading, dist, bearing, turn):
        offset = Vec2(math.cos(bearing), math.sin(bearing)).scaled(dist)
        base = self.phrase((offset.x, offset.y), heading=heading)
        spun = offset.rotated(turn)
        other = self.phrase((spun.x, spun.y), heading=heading + turn)
        # ties can flip under rotation when dots stop being exactly equal
        rel = (bearing - heading) % (math.pi / 4)
        if min(rel, math.pi / 4 - rel) > 1e-6:
            assert other.direction is base.direction
        assert other.distance_text == base.distance_text


def test_nearest_objects_sorted_with_id_ties():
    world = room_world()
    world.add_object(box_at("obj-2", 1.0, 0))
    world.add_object(box_at("obj-1", 0, 1.0))
    world.add_object(box_at("obj-3", 0, -0.4))
    order = nearest_objects(world, frame_at(0, 0))
    assert [oid for oid, _ in order] == ["obj-3", "obj-1", "obj-2"]
    assert order[1][1] == pytest.approx(1.0)
    # obj-1 and obj-2 are both exactly 1.0 m out: id breaks the tie
    assert order[1][0] == "obj-1"


class TestGuidance:
    def setup_method(self):
        self.world = room_world(hx=4, hy=4)
        self.world.add_object(box_at("obj-1", 2.0, 0.3, name="chair"))
        self.state = GuidanceState(target_id="obj-1")
        self.config = Config()

    def tick(self, frame, force=False):
        return guidance_tick(self.state, self.world, frame, self.config, force=force)

    def test_first_forced_announcement(self):
        events = self.tick(frame_at(0, 0), force=True)
        assert [e.text for e in events] == ["The chair is 2 meters in front of you"]
        assert events[0].tag == "direction"
        assert self.state.last_announce_at_us == 0

    def test_interval_is_three_seconds_exactly(self):
        self.tick(frame_at(0, 0), force=True)
        self.world.advance_clock(2.9)
        assert self.tick(frame_at(0, 0)) == []
        self.world.advance_clock(0.1)
        events = self.tick(frame_at(0, 0))
        assert [e.tag for e in events] == ["direction"]
        assert self.state.last_announce_at_us == 3_000_000

    def test_arrival_announced_once_and_rearms(self):
        self.tick(frame_at(0, 0), force=True)
        self.world.advance_clock(3.0)
        events = self.tick(frame_at(1.8, 0.3))
        assert [e.tag for e in events] == ["arrival", "direction"]
        assert events[0].text == "You have reached the chair"

        self.world.advance_clock(3.0)
        assert [e.tag for e in self.tick(frame_at(1.9, 0.3))] == ["direction"]

        self.world.advance_clock(3.0)
        self.tick(frame_at(0, 0))  # step outside re-arms
        self.world.advance_clock(3.0)
        events = self.tick(frame_at(2.0, 0.3))
        assert events[0].tag == "arrival"

    def test_zero_offset_suppressed_but_still_scheduled(self):
        self.world.add_object(box_at("obj-2", 0.0, 0.0, name="vase"))
        state = GuidanceState(target_id="obj-2")
        events = guidance_tick(state, self.world, frame_at(0, 0), self.config, force=True)
        assert [e.tag for e in events] == ["arrival"]  # direction swallowed at distance 0
        assert state.last_announce_at_us == self.world.clock_us
        self.world.advance_clock(3.0)
        events = guidance_tick(state, self.world, frame_at(1.0, 0), self.config)
        assert [e.text for e in events] == ["The vase is 1 meter behind you"]

    def test_missing_target(self):
        self.world.remove_object("obj-1")
        with pytest.raises(TargetMissingError):
            self.tick(frame_at(0, 0))

    def test_follower_reaches_target(self):
        world = room_world(hx=4, hy=4)
        world.add_object(box_at("obj-1", 2.0, 0.0, name="couch"))
        arrived, heard = run_follower(world, "obj-1", Vec2(-2.0, 0.0), math.pi / 2, self.config)
        assert arrived
        assert heard[0] == "The couch is 4 meters to the right"
        assert len(heard) <= 8


class TestCameraHitTest:
    def setup_method(self):
        self.world = room_world(hx=4, hy=4)
        self.state = HitTestState()
        self.config = Config()

    def hit(self, frame):
        return camera_hit_test(self.world, frame, self.state, self.config)

    def test_found_with_haptic_then_silent(self):
        self.world.add_object(box_at("obj-1", 2.0, 0.0, name="chair", h=2.0))
        frame = frame_at(0, 0, heading=0.0)
        hit_id, distance, events = self.hit(frame)
        assert hit_id == "obj-1"
        assert distance == pytest.approx(2.0)
        texts = [e for e in events if isinstance(e, AnnouncementEvent)]
        haptics = [e for e in events if isinstance(e, HapticEvent)]
        assert [e.text for e in texts] == ["Found chair 2 meters away"]
        assert texts[0].tag == "found"
        assert len(haptics) == 1 and haptics[0].kind == "tap"

        _, _, again = self.hit(frame)
        assert again == []

    def test_distance_is_to_center_not_hit_point(self):
        # ray enters the front face at 1.75 m; the phrase still says 2
        self.world.add_object(box_at("obj-1", 2.0, 0.0, name="box", h=2.0))
        _, distance, events = self.hit(frame_at(0, 0))
        assert distance == pytest.approx(2.0)
        assert events[0].text == "Found box 2 meters away"

    def test_lost_on_look_away(self):
        self.world.add_object(box_at("obj-1", 2.0, 0.0, name="chair", h=2.0))
        self.hit(frame_at(0, 0, heading=0.0))
        _, _, events = self.hit(frame_at(0, 0, heading=math.pi))
        assert [e.text for e in events] == ["chair no longer in view"]
        assert events[0].tag == "lost"

    def test_switch_emits_lost_then_found(self):
        self.world.add_object(box_at("obj-1", 2.0, 0.0, name="chair", h=2.0))
        self.world.add_object(box_at("obj-2", 0.0, 2.0, name="lamp", h=2.0))
        self.hit(frame_at(0, 0, heading=0.0))
        _, _, events = self.hit(frame_at(0, 0, heading=math.pi / 2))
        texts = [e.text for e in events if isinstance(e, AnnouncementEvent)]
        assert texts == ["chair no longer in view", "Found lamp 2 meters away"]

    def test_nearer_object_wins(self):
        self.world.add_object(box_at("obj-far", 3.0, 0.0, name="far", h=2.0))
        self.world.add_object(box_at("obj-near", 1.5, 0.0, name="near", h=2.0))
        hit_id, _, _ = self.hit(frame_at(0, 0))
        assert hit_id == "obj-near"

    def test_equal_depth_tie_breaks_by_id(self):
        # both enclose the camera, so both intersect at t = 0
        self.world.add_object(box_at("obj-b", 0.0, 0.0, name="b", w=2, d=2, h=2.0))
        self.world.add_object(box_at("obj-a", 0.0, 0.0, name="a", w=2, d=2, h=2.0))
        hit_id, _, _ = self.hit(frame_at(0, 0))
        assert hit_id == "obj-a"

    def test_no_range_limit(self):
        world = room_world(hx=60, hy=2)
        world.add_object(box_at("obj-1", 50.0, 0.0, name="marker", h=2.0))
        hit_id, distance, _ = camera_hit_test(world, frame_at(0, 0), self.state, self.config)
        assert hit_id == "obj-1"
        assert distance == pytest.approx(50.0)

    def test_pitch_down_finds_short_object(self):
        self.world.add_object(box_at("obj-1", 1.0, 0.0, name="vase", h=0.4))
        level = frame_at(0, 0, heading=0.0, pitch=0.0)
        assert self.hit(level)[0] is None
        down = frame_at(0, 0, heading=0.0, pitch=0.9)
        assert self.hit(down)[0] == "obj-1"


class TestProximity:
    def setup_method(self):
        self.world = room_world(hx=4, hy=4)
        self.state = ProximityState()
        self.config = Config()

    def step(self, x, y):
        return proximity_events(self.world, frame_at(x, y), self.state, self.config)

    def test_crossings_announce_once_each_way(self):
        self.world.add_object(box_at("obj-1", 2.0, 0.0, name="chair"))
        assert self.step(0, 0) == []
        events = self.step(1.6, 0)
        assert [e.text for e in events] == ["You are near the chair"]
        assert events[0].tag == "near"
        assert self.step(1.7, 0) == []  # still inside, no repeat
        events = self.step(0, 0)
        assert [e.text for e in events] == ["You are no longer near the chair"]
        assert events[0].tag == "left"

    def test_threshold_is_inclusive(self):
        self.world.add_object(box_at("obj-1", 0.5, 0.0, name="chair"))
        assert [e.tag for e in self.step(0, 0)] == ["near"]

    def test_starting_inside_counts(self):
        self.world.add_object(box_at("obj-1", 0.1, 0.0, name="chair"))
        assert [e.tag for e in self.step(0, 0)] == ["near"]

    def test_removed_objects_leave_silently(self):
        self.world.add_object(box_at("obj-1", 0.1, 0.0, name="chair"))
        self.step(0, 0)
        self.world.remove_object("obj-1")
        assert self.step(0, 0) == []

    def test_simultaneous_events_sorted_by_id(self):
        self.world.add_object(box_at("obj-2", 0.2, 0.0, name="lamp"))
        self.world.add_object(box_at("obj-1", 0.0, 0.2, name="vase"))
        events = self.step(0, 0)
        assert [e.text for e in events] == ["You are near the vase", "You are near the lamp"]

    def test_event_stream_alternates_per_object(self):
        rng = random.Random(7)
        for i in range(3):
            self.world.add_object(
                box_at(f"obj-{i}", rng.uniform(-2, 2), rng.uniform(-2, 2), name=f"thing{i}")
            )
        seen: dict[str, list[str]] = {f"thing{i}": [] for i in range(3)}
        x = y = 0.0
        for _ in range(300):
            x = max(-3, min(3, x + rng.uniform(-0.4, 0.4)))
            y = max(-3, min(3, y + rng.uniform(-0.4, 0.4)))
            for event in self.step(x, y):
                name = event.text.rsplit("the ", 1)[1]
                seen[name].append(event.tag)
        for tags in seen.values():
            for i, tag in enumerate(tags):
                assert tag == ("near" if i % 2 == 0 else "left")
