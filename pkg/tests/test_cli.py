"""CLI tests driven through subprocesses, the way operators run it."""

import json
import shutil
import subprocess
import sys
import time
import urllib.request
from pathlib import Path

import pytest

from vesna.store import default_workspace_dir

SCRIPT = Path(__file__).parent / "data" / "demo_script.txt"


def run_cli(*argv, stdin=None):
    return subprocess.run(
        [sys.executable, "-m", "vesna", *argv],
        capture_output=True, text=True, input=stdin, timeout=60,
    )


@pytest.fixture()
def workspace(tmp_path):
    target = tmp_path / "ws"
    shutil.copytree(default_workspace_dir(), target)
    return target


class TestScript:
    def test_demo_script_transcript(self, workspace):
        result = run_cli("--workspace", str(workspace), "script", str(SCRIPT), "--json")
        assert result.returncode == 0, result.stderr
        transcript = json.loads(result.stdout)
        assert [t["ok"] for t in transcript["turns"]] == [True, True, True]
        assert [t["scene_version"] for t in transcript["turns"]] == [1, 2, 3]
        final = transcript["final_scene"]
        assert [o["ref_name"] for o in final["objects"]] == ["ABB IRB 2600"]

    def test_script_is_byte_deterministic(self, workspace):
        first = run_cli("--workspace", str(workspace), "script", str(SCRIPT), "--json")
        second = run_cli("--workspace", str(workspace), "script", str(SCRIPT), "--json")
        assert first.returncode == second.returncode == 0
        assert first.stdout == second.stdout
        assert first.stdout.encode() == second.stdout.encode()

    def test_script_does_not_touch_the_workspace(self, workspace):
        before = (workspace / "scene.json").read_bytes()
        run_cli("--workspace", str(workspace), "script", str(SCRIPT), "--json")
        assert (workspace / "scene.json").read_bytes() == before

    BAD_SCRIPT = (
        "Add a Yaskawa MA2010 in front on the right\n"
        "Add a ABB IRB 2600 in front on the right\n"   # occupied -> error
        "Add a Workbench in back on the left\n"
    )

    def test_script_aborts_on_first_error(self, workspace, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text(self.BAD_SCRIPT)
        result = run_cli("--workspace", str(workspace), "script", str(bad), "--json")
        assert result.returncode == 1
        transcript = json.loads(result.stdout)
        assert [t["ok"] for t in transcript["turns"]] == [True, False]

    def test_keep_going_runs_every_line(self, workspace, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text(self.BAD_SCRIPT)
        result = run_cli(
            "--workspace", str(workspace), "script", str(bad), "--json", "--keep-going"
        )
        assert result.returncode == 1
        transcript = json.loads(result.stdout)
        assert [t["ok"] for t in transcript["turns"]] == [True, False, True]
        assert len(transcript["final_scene"]["objects"]) == 2

    def test_human_readable_output(self, workspace):
        result = run_cli("--workspace", str(workspace), "script", str(SCRIPT))
        assert result.returncode == 0
        assert "> Add a Yaskawa MA2010 in front on the right" in result.stdout
        assert 'Done: added "Yaskawa MA2010" to the scene.' in result.stdout

    def test_missing_script_file_is_config_error(self, workspace):
        result = run_cli("--workspace", str(workspace), "script", "/nonexistent.txt")
        assert result.returncode == 2


class TestValidate:
    def test_default_workspace_validates(self, workspace):
        result = run_cli("--workspace", str(workspace), "validate")
        assert result.returncode == 0
        assert result.stdout.count("OK ") == 4

    def test_validate_json_report(self, workspace):
        result = run_cli("--workspace", str(workspace), "validate", "--json")
        report = json.loads(result.stdout)
        assert report["ok"] is True
        assert "AddObject" in report["intents"]

    def test_corrupt_workspace_is_exit_2(self, workspace):
        (workspace / "plans.json").write_text("[]")
        result = run_cli("--workspace", str(workspace), "validate")
        assert result.returncode == 2
        assert "plans.json" in result.stderr


class TestChatRepl:
    def test_transcript_session(self, workspace):
        lines = "\n".join([
            "Add a Yaskawa MA2010 in front on the right",
            "Add a ABB IRB 2600 left of Yaskawa MA2010",
            "Remove the Yaskawa MA2010",
            "",                     # blank line: prompt again, no output
            ":scene",
            ":quit",
        ]) + "\n"
        result = run_cli("--workspace", str(workspace), "chat", stdin=lines)
        assert result.returncode == 0
        assert result.stdout.count("Done: added") == 2
        assert 'Done: removed "Yaskawa MA2010"' in result.stdout
        # :scene after the walkthrough shows exactly one object left
        snapshot = json.loads(result.stdout[result.stdout.index("{"):result.stdout.rindex("}") + 1])
        assert [o["ref_name"] for o in snapshot["objects"]] == ["ABB IRB 2600"]

    def test_save_writes_scene_file(self, workspace):
        lines = "Add a Workbench in back on the left\n:save\n:quit\n"
        result = run_cli("--workspace", str(workspace), "chat", stdin=lines)
        assert result.returncode == 0
        saved = json.loads((workspace / "scene.json").read_text())
        assert [o["ref_name"] for o in saved["objects"]] == ["Workbench"]

    def test_eof_exits_cleanly(self, workspace):
        result = run_cli("--workspace", str(workspace), "chat", stdin="")
        assert result.returncode == 0


class TestServe:
    def test_serve_smoke(self, workspace):
        proc = subprocess.Popen(
            [sys.executable, "-m", "vesna", "--workspace", str(workspace),
             "serve", "--chat-port", "0", "--scene-port", "0"],
            stdout=subprocess.PIPE, stderr=subprocess.PIPE, text=True,
        )
        try:
            ready = json.loads(proc.stdout.readline())
            assert ready["status"] == "ready"
            base = f"http://127.0.0.1:{ready['chat_port']}"
            with urllib.request.urlopen(f"{base}/healthz", timeout=5) as resp:
                assert json.loads(resp.read()) == {"status": "ready"}
            body = json.dumps({"text": "Add a Yaskawa MA2010 in front on the right"}).encode()
            request = urllib.request.Request(f"{base}/chat", data=body)
            with urllib.request.urlopen(request, timeout=10) as resp:
                doc = json.loads(resp.read())
            assert doc["scene_version"] == 1
            # the scene listener saw the same world
            scene_base = f"http://127.0.0.1:{ready['scene_port']}"
            with urllib.request.urlopen(f"{scene_base}/list", timeout=5) as resp:
                assert resp.read().decode() == 'done:["Yaskawa MA2010"]'
        finally:
            proc.terminate()
            proc.wait(timeout=10)
