"""Scene engine: a bounded floor, an object catalog, and collision-checked placement.

Objects are axis-aligned boxes resting on the floor.  Placement is either
global (one of 9 floor cells, 3 columns x 3 rows) or relative to an object
already in the scene.  All placements are rejected rather than clamped when
they would overlap an existing object or stick out of the floor.

Axis convention: origin at the floor center, +x rightward, -z toward the
viewer ("front"), +y up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

GRID_COLUMNS = ("left", "center", "right")
GRID_ROWS = ("front", "center", "back")
RELATIVE_RELATIONS = ("left of", "right of", "behind", "in front of")

DEFAULT_FLOOR_WIDTH_X = 30.0
DEFAULT_FLOOR_DEPTH_Z = 30.0
DEFAULT_GAP = 0.5


class SceneError(Exception):
    """Base for every placement/lookup failure; carries a stable wire code."""

    code = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class UnknownPrototypeError(SceneError):
    code = "unknown-prototype"

    def __init__(self, prototype: str):
        super().__init__(f'unknown object "{prototype}"')
        self.prototype = prototype


class UnknownAnchorError(SceneError):
    code = "unknown-anchor"

    def __init__(self, anchor: str):
        super().__init__(f'no object named "{anchor}" in the scene')
        self.anchor = anchor


class NotFoundError(SceneError):
    code = "not-found"

    def __init__(self, ref_name: str):
        super().__init__(f'no object named "{ref_name}" in the scene')
        self.ref_name = ref_name


class OccupiedError(SceneError):
    code = "occupied"

    def __init__(self, blocker: str):
        super().__init__(f'position occupied by "{blocker}"')
        self.blocker = blocker


class OutOfBoundsError(SceneError):
    code = "out-of-bounds"

    def __init__(self):
        super().__init__("placement lies outside the floor bounds")


class InvalidPlacementError(SceneError):
    code = "bad-request"


@dataclass(frozen=True)
class Footprint:
    """Half-extents on the floor plane plus full height of a prototype."""

    half_width_x: float
    half_depth_z: float
    height_y: float

    def validate(self) -> None:
        for name in ("half_width_x", "half_depth_z", "height_y"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ValueError(f"{name} must be a number")
            if not math.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be a finite positive number")


class Catalog:
    """The placeable prototypes, keyed by their user-facing names."""

    def __init__(self, prototypes: dict[str, Footprint]):
        for name, fp in prototypes.items():
            if not name or not isinstance(name, str):
                raise ValueError("prototype names must be non-empty strings")
            fp.validate()
        self.prototypes = dict(prototypes)

    @property
    def names(self) -> set[str]:
        return set(self.prototypes)

    def footprint(self, prototype: str) -> Footprint:
        try:
            return self.prototypes[prototype]
        except KeyError:
            raise UnknownPrototypeError(prototype) from None


@dataclass(frozen=True)
class Aabb:
    min_x: float
    min_y: float
    min_z: float
    max_x: float
    max_y: float
    max_z: float

    @classmethod
    def from_center(cls, cx: float, cy: float, cz: float, fp: Footprint) -> "Aabb":
        half_h = fp.height_y / 2.0
        return cls(
            cx - fp.half_width_x, cy - half_h, cz - fp.half_depth_z,
            cx + fp.half_width_x, cy + half_h, cz + fp.half_depth_z,
        )

    def overlaps(self, other: "Aabb") -> bool:
        """Positive-volume intersection; face or edge contact does not count."""
        return (
            self.min_x < other.max_x and self.max_x > other.min_x
            and self.min_y < other.max_y and self.max_y > other.min_y
            and self.min_z < other.max_z and self.max_z > other.min_z
        )


@dataclass(frozen=True)
class SceneObject:
    ref_name: str
    prototype: str
    center: tuple[float, float, float]
    footprint: Footprint

    def aabb(self) -> Aabb:
        return Aabb.from_center(*self.center, self.footprint)


@dataclass(frozen=True)
class GlobalPlacement:
    col: str
    row: str


@dataclass(frozen=True)
class RelativePlacement:
    relation: str
    anchor: str


Placement = GlobalPlacement | RelativePlacement


def placement_from_strings(pos_x: str, pos_y: str) -> Placement:
    """Map the wire-level (posX, posY) pair onto a placement.

    posX carries either a grid column or a relative relation; in the relative
    case posY carries the anchor's reference name instead of a grid row.
    """
    if pos_x in RELATIVE_RELATIONS:
        if not pos_y:
            raise InvalidPlacementError("relative placement needs a reference name")
        return RelativePlacement(relation=pos_x, anchor=pos_y)
    if pos_x in GRID_COLUMNS:
        if pos_y not in GRID_ROWS:
            raise InvalidPlacementError(
                f'"{pos_y}" is not a grid row (expected one of {", ".join(GRID_ROWS)})'
            )
        return GlobalPlacement(col=pos_x, row=pos_y)
    raise InvalidPlacementError(
        f'"{pos_x}" is neither a grid column nor a relative relation'
    )


@dataclass
class Scene:
    """The floor-bounded world state.  Mutations keep two invariants:

    no two objects' boxes overlap with positive volume, and every box lies
    inside the floor.  A rejected mutation leaves the scene untouched.
    """

    floor_width_x: float = DEFAULT_FLOOR_WIDTH_X
    floor_depth_z: float = DEFAULT_FLOOR_DEPTH_Z
    gap: float = DEFAULT_GAP
    objects: dict[str, SceneObject] = field(default_factory=dict)
    name_counters: dict[str, int] = field(default_factory=dict)
    version: int = 0

    def resolve_global(self, col: str, row: str) -> tuple[float, float]:
        """Center of one of the 9 floor cells, computed from the floor size."""
        if col not in GRID_COLUMNS:
            raise InvalidPlacementError(f'"{col}" is not a grid column')
        if row not in GRID_ROWS:
            raise InvalidPlacementError(f'"{row}" is not a grid row')
        third_x = self.floor_width_x / 3.0
        third_z = self.floor_depth_z / 3.0
        x = {"left": -third_x, "center": 0.0, "right": third_x}[col]
        z = {"front": -third_z, "center": 0.0, "back": third_z}[row]
        return x, z

    def resolve_relative(
        self, catalog: Catalog, relation: str, anchor_ref: str, new_prototype: str
    ) -> tuple[float, float]:
        """Center next to the anchor, offset along one axis so the boxes clear
        each other by the scene's gap."""
        if relation not in RELATIVE_RELATIONS:
            raise InvalidPlacementError(f'"{relation}" is not a relative relation')
        anchor = self.objects.get(anchor_ref)
        if anchor is None:
            raise UnknownAnchorError(anchor_ref)
        new_fp = catalog.footprint(new_prototype)
        ax, _, az = anchor.center
        if relation in ("left of", "right of"):
            offset = anchor.footprint.half_width_x + new_fp.half_width_x + self.gap
            return (ax - offset, az) if relation == "left of" else (ax + offset, az)
        offset = anchor.footprint.half_depth_z + new_fp.half_depth_z + self.gap
        return (ax, az - offset) if relation == "in front of" else (ax, az + offset)

    def check_collision(self, candidate: Aabb) -> str | None:
        """Lexicographically smallest ref-name whose box overlaps the candidate."""
        for ref in sorted(self.objects):
            if self.objects[ref].aabb().overlaps(candidate):
                return ref
        return None

    def _within_floor(self, box: Aabb) -> bool:
        half_w = self.floor_width_x / 2.0
        half_d = self.floor_depth_z / 2.0
        return (
            box.min_x >= -half_w and box.max_x <= half_w
            and box.min_z >= -half_d and box.max_z <= half_d
        )

    def add_object(self, catalog: Catalog, prototype: str, placement: Placement) -> str:
        fp = catalog.footprint(prototype)
        if isinstance(placement, GlobalPlacement):
            x, z = self.resolve_global(placement.col, placement.row)
        else:
            x, z = self.resolve_relative(
                catalog, placement.relation, placement.anchor, prototype
            )
        y = fp.height_y / 2.0
        box = Aabb.from_center(x, y, z, fp)
        if not self._within_floor(box):
            raise OutOfBoundsError()
        blocker = self.check_collision(box)
        if blocker is not None:
            raise OccupiedError(blocker)
        # All checks passed; only now may the scene change.
        count = self.name_counters.get(prototype, 0) + 1
        self.name_counters[prototype] = count
        ref = prototype if count == 1 else f"{prototype}#{count}"
        assert ref not in self.objects
        self.objects[ref] = SceneObject(ref, prototype, (x, y, z), fp)
        self.version += 1
        return ref

    def remove_object(self, ref_name: str) -> SceneObject:
        obj = self.objects.pop(ref_name, None)
        if obj is None:
            raise NotFoundError(ref_name)
        self.version += 1
        return obj

    def list_objects(self) -> list[SceneObject]:
        """Snapshot in insertion order; removals keep the remaining order."""
        return list(self.objects.values())

    def snapshot(self) -> dict:
        """The state document served to UIs: floor, version, and all objects."""
        return {
            "scene_version": self.version,
            "floor": {"width_x": self.floor_width_x, "depth_z": self.floor_depth_z},
            "objects": [
                {
                    "ref_name": obj.ref_name,
                    "prototype": obj.prototype,
                    "center": {
                        "x": obj.center[0], "y": obj.center[1], "z": obj.center[2],
                    },
                    "extents": {
                        "half_width_x": obj.footprint.half_width_x,
                        "half_depth_z": obj.footprint.half_depth_z,
                        "height_y": obj.footprint.height_y,
                    },
                }
                for obj in self.objects.values()
            ],
        }
