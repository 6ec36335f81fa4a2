"""Workspace loading and scene persistence.

A workspace is a directory with four JSON documents: nlu.json, plans.json,
catalog.json, and scene.json.  Loads are strict: unknown fields, a wrong
schema_version, or a scene that violates the engine invariants (overlap,
out of bounds, inconsistent naming counters) are rejected with the file
named in the error.  Scene saves are deterministic, objects in insertion
order, so saved files diff cleanly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .agent import Plan, PlanConfigError, plans_from_document
from .nlu import NluConfig, NluConfigError, load_nlu_config
from .scene import Catalog, Footprint, Scene, SceneObject

WORKSPACE_FILES = ("nlu.json", "plans.json", "catalog.json", "scene.json")


class StoreError(Exception):
    """A workspace artifact failed to load or validate."""


@dataclass
class Workspace:
    directory: Path
    nlu_config: NluConfig
    plans: list[Plan]
    catalog: Catalog
    scene: Scene

    @property
    def scene_path(self) -> Path:
        return self.directory / "scene.json"


def default_workspace_dir() -> Path:
    """The workspace shipped inside the package."""
    return Path(__file__).parent / "data"


def _read_json(path: Path) -> object:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise StoreError(f"{path}: {err.strerror or err}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise StoreError(f"{path}: not valid JSON ({err})") from None


def _positive_number(value: object, what: str, path: Path) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise StoreError(f"{path}: {what} must be a number")
    number = float(value)
    if not math.isfinite(number) or number <= 0:
        raise StoreError(f"{path}: {what} must be finite and positive")
    return number


def load_catalog(path: Path) -> Catalog:
    doc = _read_json(path)
    if not isinstance(doc, dict):
        raise StoreError(f"{path}: catalog must be a JSON object")
    unknown = set(doc) - {"schema_version", "prototypes"}
    if unknown:
        raise StoreError(f"{path}: unknown field(s) {sorted(unknown)}")
    if doc.get("schema_version") != 1:
        raise StoreError(f"{path}: unsupported schema_version {doc.get('schema_version')!r}")
    protos = doc.get("prototypes")
    if not isinstance(protos, dict):
        raise StoreError(f"{path}: prototypes must be an object")
    footprints: dict[str, Footprint] = {}
    for name, fdoc in protos.items():
        if not isinstance(fdoc, dict) or set(fdoc) != {"half_width_x", "half_depth_z", "height_y"}:
            raise StoreError(
                f'{path}: prototype "{name}" needs exactly half_width_x, half_depth_z, height_y'
            )
        footprints[name] = Footprint(
            _positive_number(fdoc["half_width_x"], f'"{name}" half_width_x', path),
            _positive_number(fdoc["half_depth_z"], f'"{name}" half_depth_z', path),
            _positive_number(fdoc["height_y"], f'"{name}" height_y', path),
        )
    try:
        return Catalog(footprints)
    except ValueError as err:
        raise StoreError(f"{path}: {err}") from None


def _load_scene_object(odoc: object, catalog: Catalog, path: Path) -> SceneObject:
    if not isinstance(odoc, dict) or set(odoc) != {"ref_name", "prototype", "center", "extents"}:
        raise StoreError(
            f"{path}: each object needs exactly ref_name, prototype, center, extents"
        )
    ref, proto = odoc["ref_name"], odoc["prototype"]
    if not isinstance(ref, str) or not ref:
        raise StoreError(f"{path}: object ref_name must be a non-empty string")
    if proto not in catalog.prototypes:
        raise StoreError(f'{path}: object "{ref}" uses unknown prototype "{proto}"')
    center = odoc["center"]
    if not isinstance(center, dict) or set(center) != {"x", "y", "z"}:
        raise StoreError(f'{path}: object "{ref}" center needs exactly x, y, z')
    for axis, value in center.items():
        if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
            raise StoreError(f'{path}: object "{ref}" center.{axis} must be a finite number')
    extents = odoc["extents"]
    if not isinstance(extents, dict) or set(extents) != {"half_width_x", "half_depth_z", "height_y"}:
        raise StoreError(f'{path}: object "{ref}" extents are malformed')
    footprint = Footprint(
        _positive_number(extents["half_width_x"], f'"{ref}" half_width_x', path),
        _positive_number(extents["half_depth_z"], f'"{ref}" half_depth_z', path),
        _positive_number(extents["height_y"], f'"{ref}" height_y', path),
    )
    if center["y"] != footprint.height_y / 2.0:
        raise StoreError(f'{path}: object "{ref}" does not rest on the floor (y != height/2)')
    return SceneObject(ref, proto, (float(center["x"]), float(center["y"]), float(center["z"])), footprint)


def _check_ref_counter_consistency(obj: SceneObject, counters: dict[str, int], path: Path) -> None:
    # refs the engine can produce: bare prototype (k=1) or "prototype#k"
    if obj.ref_name == obj.prototype:
        index = 1
    else:
        prefix = obj.prototype + "#"
        if not obj.ref_name.startswith(prefix) or not obj.ref_name[len(prefix):].isdigit():
            raise StoreError(
                f'{path}: ref_name "{obj.ref_name}" does not follow the '
                f'"{obj.prototype}" naming scheme'
            )
        index = int(obj.ref_name[len(prefix):])
        if index < 2:
            raise StoreError(f'{path}: ref_name "{obj.ref_name}" has an invalid index')
    if counters.get(obj.prototype, 0) < index:
        raise StoreError(
            f'{path}: name counter for "{obj.prototype}" is behind object "{obj.ref_name}"'
        )


def load_scene(path: Path, catalog: Catalog) -> Scene:
    doc = _read_json(path)
    if not isinstance(doc, dict):
        raise StoreError(f"{path}: scene must be a JSON object")
    required = {"schema_version", "floor", "gap", "version", "name_counters", "objects"}
    unknown = set(doc) - required
    if unknown:
        raise StoreError(f"{path}: unknown field(s) {sorted(unknown)}")
    missing = required - set(doc)
    if missing:
        raise StoreError(f"{path}: missing field(s) {sorted(missing)}")
    if doc["schema_version"] != 1:
        raise StoreError(f"{path}: unsupported schema_version {doc['schema_version']!r}")
    floor = doc["floor"]
    if not isinstance(floor, dict) or set(floor) != {"width_x", "depth_z"}:
        raise StoreError(f"{path}: floor needs exactly width_x and depth_z")
    width = _positive_number(floor["width_x"], "floor width_x", path)
    depth = _positive_number(floor["depth_z"], "floor depth_z", path)
    gap = doc["gap"]
    if not isinstance(gap, (int, float)) or isinstance(gap, bool) or not math.isfinite(gap) or gap < 0:
        raise StoreError(f"{path}: gap must be a finite number >= 0")
    version = doc["version"]
    if not isinstance(version, int) or isinstance(version, bool) or version < 0:
        raise StoreError(f"{path}: version must be a non-negative integer")
    counters = doc["name_counters"]
    if not isinstance(counters, dict) or not all(
        isinstance(k, str) and isinstance(v, int) and not isinstance(v, bool) and v >= 0
        for k, v in counters.items()
    ):
        raise StoreError(f"{path}: name_counters must map prototypes to counts")
    if not isinstance(doc["objects"], list):
        raise StoreError(f"{path}: objects must be a list")

    scene = Scene(width, depth, float(gap), version=version, name_counters=dict(counters))
    for odoc in doc["objects"]:
        obj = _load_scene_object(odoc, catalog, path)
        if obj.ref_name in scene.objects:
            raise StoreError(f'{path}: duplicate ref_name "{obj.ref_name}"')
        _check_ref_counter_consistency(obj, scene.name_counters, path)
        box = obj.aabb()
        if not scene._within_floor(box):
            raise StoreError(f'{path}: object "{obj.ref_name}" lies outside the floor')
        blocker = scene.check_collision(box)
        if blocker is not None:
            raise StoreError(
                f'{path}: objects "{obj.ref_name}" and "{blocker}" overlap'
            )
        scene.objects[obj.ref_name] = obj
    return scene


def scene_to_document(scene: Scene) -> dict:
    return {
        "schema_version": 1,
        "floor": {"width_x": scene.floor_width_x, "depth_z": scene.floor_depth_z},
        "gap": scene.gap,
        "version": scene.version,
        "name_counters": dict(scene.name_counters),
        "objects": [
            {
                "ref_name": obj.ref_name,
                "prototype": obj.prototype,
                "center": {"x": obj.center[0], "y": obj.center[1], "z": obj.center[2]},
                "extents": {
                    "half_width_x": obj.footprint.half_width_x,
                    "half_depth_z": obj.footprint.half_depth_z,
                    "height_y": obj.footprint.height_y,
                },
            }
            for obj in scene.objects.values()
        ],
    }


def save_scene(scene: Scene, path: Path) -> None:
    path.write_text(json.dumps(scene_to_document(scene), indent=2) + "\n", encoding="utf-8")


def load_workspace(directory: Path | str) -> Workspace:
    """Load and cross-validate the four workspace documents.

    Catalog-name and reference-name slot domains are supplied at call time by
    the pipeline (the catalog's key set and the live scene refs), so nothing
    about individual names is checked here beyond catalog validity itself.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise StoreError(f"{directory}: not a directory")
    for name in WORKSPACE_FILES:
        if not (directory / name).is_file():
            raise StoreError(f"{directory / name}: missing workspace file")

    catalog = load_catalog(directory / "catalog.json")

    nlu_path = directory / "nlu.json"
    nlu_doc = _read_json(nlu_path)
    try:
        nlu_config = load_nlu_config(nlu_doc)
    except NluConfigError as err:
        raise StoreError(f"{nlu_path}: {err}") from None

    plans_path = directory / "plans.json"
    plans_doc = _read_json(plans_path)
    try:
        plans = plans_from_document(plans_doc)
    except PlanConfigError as err:
        raise StoreError(f"{plans_path}: {err}") from None

    scene = load_scene(directory / "scene.json", catalog)
    return Workspace(directory, nlu_config, plans, catalog, scene)
