import json
import math

import pytest

from echoroom.scenario import (
    SchemaError,
    Script,
    Step,
    StepPreconditionError,
    build_session,
    canonical_json,
    format_time,
    integrity_report,
    load_scenario,
    load_script,
    parse_step,
    run_script,
)
from echoroom.scene import Config
from _support import box_at, room_world


def write_json(tmp_path, data, name="file.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


BASE_SCENARIO = {
    "schema_version": 1,
    "name": "tiny",
    "world": {
        "planes": [
            {
                "id": "floor",
                "kind": "floor",
                "orientation": "horizontal",
                "center": [0, 0, 0],
                "half_extents": [2, 2],
                "yaw": 0,
            }
        ],
        "objects": [],
    },
    "catalog": [{"name": "chair", "width": 0.5, "depth": 0.5, "height": 0.9}],
}


class TestLoadScenario:
    def test_study_room(self, study_path):
        sc = load_scenario(study_path)
        assert sc.name == "study-room"
        planes = sc.world.planes
        assert [p.kind.value for p in planes].count("floor") == 1
        assert [p.kind.value for p in planes].count("wall") == 4
        assert [p.kind.value for p in planes].count("table") == 1
        assert sc.world.plane("table").center.z == pytest.approx(0.74)
        assert [c.name for c in sc.catalog] == ["chair", "couch", "coffee table", "lamp", "vase"]
        assert sc.scan_goal.min_surfaces == 4
        assert sc.scan_goal.min_vertical == 1
        assert sc.scan_goal.min_area_m2 == 5.0
        assert len(sc.taxonomy_tags) == 5
        assert sc.start_position is None

    def test_missing_file(self, tmp_path):
        with pytest.raises(SchemaError):
            load_scenario(str(tmp_path / "nope.json"))

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(SchemaError) as e:
            load_scenario(str(path))
        assert "line 1" in str(e.value)

    def test_top_level_must_be_object(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]")
        with pytest.raises(SchemaError):
            load_scenario(str(path))

    def test_wrong_version(self, tmp_path):
        with pytest.raises(SchemaError) as e:
            load_scenario(write_json(tmp_path, {**BASE_SCENARIO, "schema_version": 2}))
        assert "schema_version" in str(e.value)

    def test_missing_world(self, tmp_path):
        data = {k: v for k, v in BASE_SCENARIO.items() if k != "world"}
        with pytest.raises(SchemaError):
            load_scenario(write_json(tmp_path, data))

    def test_duplicate_catalog_name(self, tmp_path):
        data = {**BASE_SCENARIO, "catalog": BASE_SCENARIO["catalog"] * 2}
        with pytest.raises(SchemaError) as e:
            load_scenario(write_json(tmp_path, data))
        assert "duplicate" in str(e.value)

    def test_bad_catalog_dimensions(self, tmp_path):
        data = {**BASE_SCENARIO, "catalog": [{"name": "chair", "width": 0.5}]}
        with pytest.raises(SchemaError):
            load_scenario(write_json(tmp_path, data))
        data = {**BASE_SCENARIO, "catalog": [{"name": "chair", "width": -1, "depth": 1, "height": 1}]}
        with pytest.raises(SchemaError):
            load_scenario(write_json(tmp_path, data))

    def test_unknown_taxonomy_tag(self, tmp_path):
        data = {**BASE_SCENARIO, "taxonomy_tags": ["observing_content", "flying"]}
        with pytest.raises(SchemaError) as e:
            load_scenario(write_json(tmp_path, data))
        assert "flying" in str(e.value)

    def test_start_block(self, tmp_path):
        data = {**BASE_SCENARIO, "start": {"position": [0.5, -0.5], "heading_rad": 1.0}}
        sc = load_scenario(write_json(tmp_path, data))
        assert (sc.start_position.x, sc.start_position.y) == (0.5, -0.5)
        assert sc.start_heading_rad == 1.0

    def test_duplicate_plane_ids_rejected(self, tmp_path):
        plane = BASE_SCENARIO["world"]["planes"][0]
        data = {**BASE_SCENARIO, "world": {"planes": [plane, plane], "objects": []}}
        with pytest.raises(Exception):
            load_scenario(write_json(tmp_path, data))


class TestLoadScript:
    def script(self, tmp_path, steps):
        return load_script(write_json(tmp_path, {"schema_version": 1, "steps": steps}))

    def test_round_trip(self, tmp_path):
        script = self.script(
            tmp_path,
            [
                {"op": "move", "dx": 1.0, "dy": 0.0},
                {"op": "wait", "seconds": 0.5},
                {"op": "magic_tap"},
                {"op": "point_device", "pitch": 0.5, "yaw": 0.0},
                {"op": "point_device", "direction": [0, 0, -1]},
                {"op": "activate", "object_id": "obj-1", "action": "delete"},
            ],
        )
        assert [s.op for s in script.steps] == [
            "move", "wait", "magic_tap", "point_device", "point_device", "activate",
        ]
        assert script.steps[0].args == {"dx": 1.0, "dy": 0.0}
        assert script.steps[2].args == {}

    def test_missing_steps(self, tmp_path):
        with pytest.raises(SchemaError):
            load_script(write_json(tmp_path, {"schema_version": 1}))

    def test_unknown_op(self, tmp_path):
        with pytest.raises(SchemaError) as e:
            self.script(tmp_path, [{"op": "teleport"}])
        assert "teleport" in str(e.value)

    def test_missing_required_args(self, tmp_path):
        with pytest.raises(SchemaError) as e:
            self.script(tmp_path, [{"op": "move", "dx": 1.0}])
        assert "dy" in str(e.value)

    def test_unknown_fields(self, tmp_path):
        with pytest.raises(SchemaError) as e:
            self.script(tmp_path, [{"op": "turn", "dtheta": 1.0, "speed": 2}])
        assert "speed" in str(e.value)

    def test_point_device_needs_exactly_one_form(self):
        with pytest.raises(SchemaError):
            parse_step({"op": "point_device"})
        with pytest.raises(SchemaError):
            parse_step({"op": "point_device", "direction": [0, 0, -1], "pitch": 1, "yaw": 0})
        step = parse_step({"op": "point_device", "direction": [0, 0, -1]})
        assert step.args == {"direction": [0, 0, -1]}

    def test_error_names_the_step(self, tmp_path):
        with pytest.raises(SchemaError) as e:
            self.script(tmp_path, [{"op": "move", "dx": 0, "dy": 0}, {"op": "bogus"}])
        assert "steps[1]" in str(e.value)


class TestBuildSession:
    def test_deep_copies_world(self, study_scenario, config):
        session = build_session(study_scenario, config)
        session.world.add_object(box_at("obj-1", 0, 0))
        assert study_scenario.world.objects == []
        again = build_session(study_scenario, config)
        assert again.world.objects == []

    def test_start_defaults_to_floor_center(self, study_scenario, config):
        session = build_session(study_scenario, config)
        assert (session.user_xy.x, session.user_xy.y) == (0.0, 0.0)


@pytest.mark.parametrize(
    "seconds, text",
    [
        (0.0, "0.0"),
        (0.1, "0.1"),
        (1.0, "1.0"),
        (1.25, "1.25"),
        (10.0, "10.0"),
        (0.123456789, "0.123457"),
        (3.0000001, "3.0"),
    ],
)
def test_format_time(seconds, text):
    assert format_time(seconds) == text


def test_canonical_json_is_sorted_and_compact():
    blob = canonical_json({"b": 1, "a": [1, 2], "c": {"y": 0, "x": None}})
    assert blob == '{"a":[1,2],"b":1,"c":{"x":null,"y":0}}'


class TestRunScript:
    def test_transcript_structure(self, study_scenario, config):
        script = Script(
            steps=(
                Step("set_mode", {"mode": "search_camera"}),
                Step("move", {"dx": 0.4, "dy": 0.0}),
                Step("wait", {"seconds": 0.2}),
                Step("magic_tap"),
            )
        )
        text = run_script(study_scenario, script, config)
        lines = text.splitlines()
        assert lines[0].startswith("T=0.0 STATE {")
        assert lines[-1].startswith("T=0.2 STATE {")
        assert 'T=0.0 STEP set_mode {"mode":"search_camera"}' in lines
        assert 'T=0.0 STEP move {"dx":0.4,"dy":0.0}' in lines
        assert "T=0.2 STEP magic_tap" in lines
        assert 'T=0.2 ANNOUNCE freeze "Frozen"' in lines
        assert text.endswith("\n")
        # the first STATE is the scenario's world before any step
        payload = json.loads(lines[0].split(" STATE ", 1)[1])
        assert payload["objects"] == []

    def test_byte_identical_reruns(self, study_scenario, config):
        script = Script(
            steps=(
                Step("point_device", {"pitch": 0.9, "yaw": 0.0}),
                Step("wait", {"seconds": 1.0}),
                Step("turn", {"dtheta": math.pi / 2}),
                Step("wait", {"seconds": 1.0}),
                Step("set_mode", {"mode": "place_camera"}),
                Step("select_catalog_item", {"name": "chair"}),
                Step("confirm_placement"),
            )
        )
        first = run_script(study_scenario, script, config)
        second = run_script(study_scenario, script, config)
        assert first == second
        assert first.count("STEP") == len(script.steps)

    def test_announcements_carry_event_time(self, study_scenario, config):
        script = Script(
            steps=(
                Step("set_mode", {"mode": "search_guided"}),
                Step("set_mode", {"mode": "place_camera"}),
                Step("select_catalog_item", {"name": "vase"}),
                Step("confirm_placement"),
                Step("set_mode", {"mode": "search_guided"}),
                Step("select_search_target", {"name": "vase"}),
                Step("wait", {"seconds": 3.0}),
            )
        )
        text = run_script(study_scenario, script, config)
        assert 'T=0.0 ANNOUNCE placed "Placed vase"' in text
        # vase sits at the user's feet: guidance suppresses the zero phrase
        assert 'ANNOUNCE arrival "You have reached the vase"' in text

    def test_precondition_error_names_step(self, study_scenario, config):
        script = Script(steps=(Step("move", {"dx": 0.1, "dy": 0.0}), Step("confirm_placement"),))
        with pytest.raises(StepPreconditionError) as e:
            run_script(study_scenario, script, config)
        assert e.value.step_index == 1
        assert e.value.op == "confirm_placement"
        assert "step 1 (confirm_placement)" in str(e.value)

    def test_scenario_world_untouched(self, study_scenario, config):
        script = Script(
            steps=(
                Step("set_mode", {"mode": "place_camera"}),
                Step("select_catalog_item", {"name": "chair"}),
                Step("confirm_placement"),
            )
        )
        run_script(study_scenario, script, config)
        assert study_scenario.world.objects == []


class TestIntegrity:
    def test_clean_world(self, config):
        world = room_world(hx=2, hy=2)
        world.add_object(box_at("obj-1", 0, 0, support="floor"))
        assert integrity_report(world, config) == []

    def test_object_clearance_violation(self, config):
        world = room_world(hx=2, hy=2)
        world.add_object(box_at("obj-1", 0, 0))
        world.add_object(box_at("obj-2", 0.52, 0))
        problems = integrity_report(world, config)
        assert problems == ["objects obj-1 and obj-2 closer than clearance"]

    def test_wall_clearance_violation_and_waiver(self, config):
        world = room_world(hx=2, hy=2)
        world.add_object(box_at("obj-1", 1.72, 0))  # 0.03 m off the east wall
        problems = integrity_report(world, config)
        assert problems == ["object obj-1 within wall clearance of wall-e"]

        world.objects[0] = box_at("obj-1", 1.72, 0, contacts=("wall-e",))
        assert integrity_report(world, config) == []

    def test_unsupported_object_flagged(self, config):
        # claims table support while sitting at the room center
        from echoroom.scene import Orientation, Plane, PlaneKind, Vec3, VirtualObject

        world = room_world(hx=2, hy=2)
        world.planes.append(
            Plane("table", PlaneKind.TABLE, Orientation.HORIZONTAL, Vec3(1.0, -1.0, 0.74), (0.6, 0.4))
        )
        bad = box_at("obj-1", 0, 0)
        # bypass add_object: integrity_report exists to catch worlds that
        # drifted into violation, which the constructor would never allow
        world.objects.append(
            VirtualObject(
                id=bad.id, name=bad.name, footprint=bad.footprint,
                pose=bad.pose, supporting_plane="table",
            )
        )
        problems = integrity_report(world, config)
        assert problems == ["object obj-1 not contained by its supporting plane"]

    def test_stacked_disjoint_heights_are_fine(self, config):
        world = room_world(hx=2, hy=2)
        world.add_object(box_at("obj-1", 0, 0, h=0.4))
        world.add_object(box_at("obj-2", 0, 0, z=0.4, h=0.3))
        assert integrity_report(world, config) == []
