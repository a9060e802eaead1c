import json
import subprocess
import sys

import pytest

from echoroom.cli import main


@pytest.fixture()
def script_path(tmp_path):
    path = tmp_path / "script.json"
    path.write_text(
        json.dumps(
            {
                "schema_version": 1,
                "steps": [
                    {"op": "point_device", "pitch": 0.9, "yaw": 0.0},
                    {"op": "wait", "seconds": 0.5},
                    {"op": "magic_tap"},
                ],
            }
        )
    )
    return str(path)


class TestVerify:
    def test_ok(self, study_path, capsys):
        assert main(["verify", study_path]) == 0
        out = capsys.readouterr().out
        assert out == "study-room: 6 planes, 0 objects, 5 catalog items\n"

    def test_missing_file(self, tmp_path, capsys):
        assert main(["verify", str(tmp_path / "absent.json")]) == 1
        assert "echoroom:" in capsys.readouterr().err

    def test_schema_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"schema_version": 1}))
        assert main(["verify", str(bad)]) == 1
        assert "world" in capsys.readouterr().err


class TestRun:
    def test_transcript_to_stdout(self, study_path, script_path, capsys):
        assert main(["run", study_path, "--script", script_path]) == 0
        out = capsys.readouterr().out
        lines = out.splitlines()
        assert lines[0].startswith("T=0.0 STATE ")
        assert lines[-1].startswith("T=0.5 STATE ")
        assert 'T=0.5 ANNOUNCE freeze "Frozen"' in lines

    def test_transcript_to_file(self, study_path, script_path, tmp_path, capsys):
        dest = tmp_path / "out.txt"
        assert main(["run", study_path, "--script", script_path, "--transcript", str(dest)]) == 0
        assert capsys.readouterr().out == ""
        assert dest.read_text().startswith("T=0.0 STATE ")

    def test_deterministic_across_invocations(self, study_path, script_path, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        main(["run", study_path, "--script", script_path, "--transcript", str(a)])
        main(["run", study_path, "--script", script_path, "--transcript", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_step_failure_exits_2(self, study_path, tmp_path, capsys):
        bad = tmp_path / "bad-step.json"
        bad.write_text(
            json.dumps({"schema_version": 1, "steps": [{"op": "confirm_placement"}]})
        )
        assert main(["run", study_path, "--script", str(bad)]) == 2
        assert "step 0 (confirm_placement)" in capsys.readouterr().err

    def test_bad_script_schema_exits_1(self, study_path, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"schema_version": 1, "steps": [{"op": "warp"}]}))
        assert main(["run", study_path, "--script", str(bad)]) == 1
        assert "warp" in capsys.readouterr().err

    def test_config_override(self, study_path, tmp_path, capsys):
        cfg = tmp_path / "config.json"
        cfg.write_text(json.dumps({"guidance_interval_s": 1.0}))
        script = tmp_path / "script.json"
        script.write_text(
            json.dumps(
                {
                    "schema_version": 1,
                    "steps": [
                        {"op": "set_mode", "mode": "place_camera"},
                        {"op": "select_catalog_item", "name": "chair"},
                        {"op": "move", "dx": 0.6, "dy": 0.0},
                        {"op": "confirm_placement"},
                        {"op": "set_mode", "mode": "search_guided"},
                        {"op": "select_search_target", "name": "chair"},
                        {"op": "move", "dx": -0.6, "dy": 0.0},
                        {"op": "wait", "seconds": 1.0},
                    ],
                }
            )
        )
        assert main(["run", study_path, "--script", str(script)]) == 0
        base = capsys.readouterr().out
        assert main(["run", study_path, "--script", str(script), "--config", str(cfg)]) == 0
        out = capsys.readouterr().out
        # selection happens at the chair's own position, so the first phrase
        # is suppressed; the 1 s cadence still fits one update into the wait
        # where the default 3 s cadence fits none
        assert base.count("ANNOUNCE direction") == 0
        assert out.count("ANNOUNCE direction") == 1

    def test_unknown_config_key_exits_1(self, study_path, script_path, tmp_path, capsys):
        cfg = tmp_path / "config.json"
        cfg.write_text(json.dumps({"warp_speed": 9}))
        assert main(["run", study_path, "--script", script_path, "--config", str(cfg)]) == 1
        assert "warp_speed" in capsys.readouterr().err


class TestUsage:
    def test_missing_script_flag(self, study_path, capsys):
        with pytest.raises(SystemExit) as e:
            main(["run", study_path])
        assert e.value.code == 1
        assert "--script" in capsys.readouterr().err

    def test_unknown_command(self, capsys):
        with pytest.raises(SystemExit) as e:
            main(["dance"])
        assert e.value.code == 1

    def test_no_command(self, capsys):
        with pytest.raises(SystemExit) as e:
            main([])
        assert e.value.code == 1


def test_module_entry_point(study_path, script_path):
    proc = subprocess.run(
        [sys.executable, "-m", "echoroom", "run", study_path, "--script", script_path],
        capture_output=True,
        text=True,
        timeout=60,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("T=0.0 STATE ")
