"""Operator entry points.

    vesna serve     run the chat and scene HTTP services
    vesna chat      interactive terminal REPL over the same pipeline
    vesna script    replay a file of utterances, one per line
    vesna validate  check the workspace files without starting anything

Exit codes: 0 ok, 1 pipeline error, 2 config error.
"""

from __future__ import annotations

import argparse
import json
import os
import signal
import sys
from pathlib import Path

from .httpd import (
    DEFAULT_CHAT_PORT,
    DEFAULT_SCENE_PORT,
    ChatServer,
    HttpSceneClient,
    SceneServer,
    start_in_thread,
)
from .service import Pipeline
from .store import (
    WORKSPACE_FILES,
    StoreError,
    default_workspace_dir,
    load_workspace,
    save_scene,
)

EXIT_OK = 0
EXIT_PIPELINE_ERROR = 1
EXIT_CONFIG_ERROR = 2


def _int_env(name: str, fallback: int) -> int:
    value = os.environ.get(name)
    if value is None:
        return fallback
    try:
        return int(value)
    except ValueError:
        raise SystemExit(f"{name} must be an integer, got {value!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vesna",
        description="Build a simulated factory floor by typing natural-language commands.",
    )
    parser.add_argument(
        "--workspace",
        type=Path,
        default=Path(os.environ.get("VESNA_CONFIG_DIR", default_workspace_dir())),
        help="directory holding nlu.json, plans.json, catalog.json, scene.json",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP services")
    serve.add_argument("--chat-port", type=int,
                       default=_int_env("VESNA_CHAT_PORT", DEFAULT_CHAT_PORT))
    serve.add_argument("--scene-port", type=int,
                       default=_int_env("VESNA_SCENE_PORT", DEFAULT_SCENE_PORT))
    serve.add_argument("--ui-dir", type=Path, default=None,
                       help="serve a web console from this directory at /")

    sub.add_parser("chat", help="interactive REPL")

    script = sub.add_parser("script", help="replay utterances from a file")
    script.add_argument("file", type=Path)
    script.add_argument("--keep-going", action="store_true",
                        help="run every line even after a fulfillment error")
    script.add_argument("--json", action="store_true",
                        help="print the machine-readable transcript")

    validate = sub.add_parser("validate", help="check the workspace and exit")
    validate.add_argument("--json", action="store_true")
    return parser


def _load_workspace_or_exit(directory: Path):
    try:
        return load_workspace(directory)
    except StoreError as err:
        print(f"error: {err}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG_ERROR)


def cmd_serve(args) -> int:
    workspace = _load_workspace_or_exit(args.workspace)
    pipeline = Pipeline(workspace)

    scene_server = SceneServer(pipeline.scene_host, args.scene_port)
    start_in_thread(scene_server)
    scene_port = scene_server.server_address[1]
    # plan actions travel the wire protocol, like any other scene client
    pipeline.scene_client = HttpSceneClient(f"http://127.0.0.1:{scene_port}")

    chat_server = ChatServer(pipeline, args.chat_port, ui_dir=args.ui_dir)
    start_in_thread(chat_server)
    chat_port = chat_server.server_address[1]

    print(json.dumps({
        "status": "ready", "chat_port": chat_port, "scene_port": scene_port,
    }), flush=True)

    stop = {"flag": False}

    def handle_signal(signum, frame):
        stop["flag"] = True

    signal.signal(signal.SIGINT, handle_signal)
    signal.signal(signal.SIGTERM, handle_signal)
    try:
        while not stop["flag"]:
            signal.pause()
    finally:
        chat_server.shutdown()
        scene_server.shutdown()
    return EXIT_OK


def _print_scene(pipeline: Pipeline) -> None:
    print(json.dumps(pipeline.scene_state(), indent=2))


def cmd_chat(args) -> int:
    workspace = _load_workspace_or_exit(args.workspace)
    pipeline = Pipeline(workspace)
    print('Type a command, ":scene" to inspect, ":save" to persist, ":quit" to leave.')
    while True:
        try:
            line = input("vesna> ")
        except (EOFError, KeyboardInterrupt):
            print()
            return EXIT_OK
        line = line.strip()
        if not line:
            continue
        if line == ":quit":
            return EXIT_OK
        if line == ":scene":
            _print_scene(pipeline)
            continue
        if line == ":save":
            save_scene(pipeline.scene_host.scene, workspace.scene_path)
            print(f"saved {workspace.scene_path}")
            continue
        if line.startswith(":"):
            print("commands: :scene :save :quit")
            continue
        print(pipeline.chat(line).reply)


def cmd_script(args) -> int:
    workspace = _load_workspace_or_exit(args.workspace)
    pipeline = Pipeline(workspace)
    try:
        lines = args.file.read_text(encoding="utf-8").splitlines()
    except OSError as err:
        print(f"error: {args.file}: {err.strerror}", file=sys.stderr)
        return EXIT_CONFIG_ERROR

    turns = []
    failed = False
    for line in lines:
        utterance = line.strip()
        if not utterance or utterance.startswith("#"):
            continue
        result = pipeline.chat(utterance)
        turns.append({
            "utterance": utterance,
            "reply": result.reply,
            "scene_version": result.scene_version,
            "ok": result.ok,
        })
        if not result.ok:
            failed = True
            if not args.keep_going:
                break

    transcript = {
        "schema_version": 1,
        "turns": turns,
        "final_scene": pipeline.scene_state(),
    }
    if args.json:
        print(json.dumps(transcript, indent=2))
    else:
        for turn in turns:
            print(f"> {turn['utterance']}")
            print(turn["reply"])
    return EXIT_PIPELINE_ERROR if failed else EXIT_OK


def cmd_validate(args) -> int:
    try:
        workspace = load_workspace(args.workspace)
    except StoreError as err:
        if args.json:
            print(json.dumps({"ok": False, "error": str(err)}))
        else:
            print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    report = {
        "ok": True,
        "workspace": str(args.workspace),
        "files": list(WORKSPACE_FILES),
        "intents": [i.name for i in workspace.nlu_config.intents],
        "plans": [p.name for p in workspace.plans],
        "prototypes": sorted(workspace.catalog.prototypes),
        "scene_objects": len(workspace.scene.objects),
    }
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        for name in WORKSPACE_FILES:
            print(f"OK {args.workspace / name}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "serve": cmd_serve,
        "chat": cmd_chat,
        "script": cmd_script,
        "validate": cmd_validate,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
