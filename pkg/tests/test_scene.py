"""Scene engine tests.

The randomized placement tests compare the engine's accept/reject decisions
against a brute-force oracle written from scratch in this file: the oracle
recomputes candidate centers and does plain interval-overlap arithmetic,
without calling any engine geometry.
"""

import random

import pytest

from oracles import (
    oracle_accepts,
    oracle_box,
    oracle_boxes_overlap,
    oracle_global_center,
    oracle_relative_center,
)
from vesna.scene import (
    Aabb,
    Catalog,
    Footprint,
    GlobalPlacement,
    InvalidPlacementError,
    NotFoundError,
    OccupiedError,
    OutOfBoundsError,
    RelativePlacement,
    Scene,
    SceneError,
    SceneObject,
    UnknownAnchorError,
    UnknownPrototypeError,
    placement_from_strings,
)

ROBOT = Footprint(half_width_x=1.0, half_depth_z=1.0, height_y=2.0)


def demo_catalog() -> Catalog:
    return Catalog({
        "Yaskawa MA2010": ROBOT,
        "ABB IRB 2600": ROBOT,
        "Workbench": Footprint(1.5, 0.75, 1.0),
    })


# ---------------------------------------------------------------------------
# global grid
# ---------------------------------------------------------------------------

class TestResolveGlobal:
    def test_right_front_on_30x30(self):
        # by hand: x = +30/3 = 10, z = -30/3 = -10
        assert Scene(30.0, 30.0).resolve_global("right", "front") == (10.0, -10.0)

    def test_center_center_is_origin(self):
        assert Scene(7.0, 11.0).resolve_global("center", "center") == (0.0, 0.0)

    def test_left_back_on_12x18(self):
        # by hand: x = -12/3 = -4, z = +18/3 = 6
        assert Scene(12.0, 18.0).resolve_global("left", "back") == (-4.0, 6.0)

    def test_nine_cells_distinct_and_match_oracle(self):
        scene = Scene(30.0, 30.0)
        centers = set()
        for col in ("left", "center", "right"):
            for row in ("front", "center", "back"):
                c = scene.resolve_global(col, row)
                assert c == oracle_global_center(30.0, 30.0, col, row)
                centers.add(c)
        assert len(centers) == 9

    @pytest.mark.parametrize("col,row", [("up", "front"), ("left", "forward"), ("", "")])
    def test_invalid_tokens(self, col, row):
        with pytest.raises(InvalidPlacementError):
            Scene().resolve_global(col, row)


# ---------------------------------------------------------------------------
# relative placement
# ---------------------------------------------------------------------------

class TestResolveRelative:
    def make_scene_with_anchor(self, gap=0.5):
        scene = Scene(30.0, 30.0, gap=gap)
        scene.add_object(demo_catalog(), "Yaskawa MA2010", GlobalPlacement("right", "front"))
        return scene

    def test_left_of_offsets_x(self):
        # by hand: 10 - (1.0 + 1.0 + 0.5) = 7.5, z unchanged
        scene = self.make_scene_with_anchor()
        got = scene.resolve_relative(demo_catalog(), "left of", "Yaskawa MA2010", "ABB IRB 2600")
        assert got == (7.5, -10.0)

    def test_behind_offsets_z(self):
        scene = Scene(30.0, 30.0, gap=0.5)
        scene.add_object(demo_catalog(), "Yaskawa MA2010", GlobalPlacement("center", "center"))
        got = scene.resolve_relative(demo_catalog(), "behind", "Yaskawa MA2010", "ABB IRB 2600")
        assert got == (0.0, 2.5)  # by hand: 0 + (1.0 + 1.0 + 0.5)

    def test_zero_gap_touching_boxes_allowed(self):
        scene = Scene(30.0, 30.0, gap=0.0)
        cat = demo_catalog()
        scene.add_object(cat, "Yaskawa MA2010", GlobalPlacement("center", "center"))
        x, z = scene.resolve_relative(cat, "right of", "Yaskawa MA2010", "ABB IRB 2600")
        assert (x, z) == (2.0, 0.0)  # offset exactly 2 * half extent
        ref = scene.add_object(cat, "ABB IRB 2600", RelativePlacement("right of", "Yaskawa MA2010"))
        assert ref == "ABB IRB 2600"

    def test_unknown_anchor(self):
        with pytest.raises(UnknownAnchorError):
            Scene().resolve_relative(demo_catalog(), "left of", "Ghost", "Workbench")

    def test_unknown_prototype(self):
        scene = self.make_scene_with_anchor()
        with pytest.raises(UnknownPrototypeError):
            scene.resolve_relative(demo_catalog(), "left of", "Yaskawa MA2010", "Ghost")

    def test_all_relations_match_oracle(self):
        cat = demo_catalog()
        for relation in ("left of", "right of", "behind", "in front of"):
            scene = self.make_scene_with_anchor(gap=0.25)
            anchor = scene.objects["Yaskawa MA2010"]
            want = oracle_relative_center(
                (anchor.center[0], anchor.center[2]),
                anchor.footprint, cat.footprint("Workbench"), 0.25, relation,
            )
            got = scene.resolve_relative(cat, relation, "Yaskawa MA2010", "Workbench")
            assert got == want

    def test_positive_gap_never_collides_with_anchor(self):
        cat = demo_catalog()
        for relation in ("left of", "right of", "behind", "in front of"):
            scene = Scene(40.0, 40.0, gap=0.5)
            scene.add_object(cat, "Workbench", GlobalPlacement("center", "center"))
            scene.add_object(cat, "Yaskawa MA2010", RelativePlacement(relation, "Workbench"))
            assert len(scene.objects) == 2


# ---------------------------------------------------------------------------
# collision predicate
# ---------------------------------------------------------------------------

class TestCheckCollision:
    def test_identical_boxes_collide(self):
        scene = Scene(30.0, 30.0)
        scene.add_object(demo_catalog(), "Workbench", GlobalPlacement("center", "center"))
        box = scene.objects["Workbench"].aabb()
        assert scene.check_collision(box) == "Workbench"

    def test_face_contact_is_not_a_collision(self):
        scene = Scene(30.0, 30.0)
        scene.add_object(demo_catalog(), "Yaskawa MA2010", GlobalPlacement("center", "center"))
        touching = Aabb.from_center(2.0, 1.0, 0.0, ROBOT)  # shares the x = 1 face
        assert scene.check_collision(touching) is None

    def test_reports_lexicographically_smallest_blocker(self):
        scene = Scene(30.0, 30.0)
        cat = demo_catalog()
        scene.add_object(cat, "Yaskawa MA2010", GlobalPlacement("center", "center"))
        scene.add_object(cat, "ABB IRB 2600", GlobalPlacement("right", "center"))
        wide = Aabb(-12.0, 0.0, -0.5, 12.0, 1.0, 0.5)  # overlaps both
        assert scene.check_collision(wide) == "ABB IRB 2600"

    def test_matches_bruteforce_on_random_scenes(self):
        rng = random.Random(20240)
        fp = Footprint(0.8, 0.6, 1.0)
        for _ in range(200):
            scene = Scene(20.0, 20.0)
            placed = []
            for i in range(rng.randint(0, 20)):
                cx = rng.uniform(-9.0, 9.0)
                cz = rng.uniform(-9.0, 9.0)
                box = Aabb.from_center(cx, 0.5, cz, fp)
                if scene.check_collision(box) is None and scene._within_floor(box):
                    scene.objects[f"box#{i}"] = SceneObject(f"box#{i}", "box", (cx, 0.5, cz), fp)
                    placed.append((cx, cz, fp))
            probe_x = rng.uniform(-10.0, 10.0)
            probe_z = rng.uniform(-10.0, 10.0)
            probe = Aabb.from_center(probe_x, 0.5, probe_z, fp)
            want = any(
                oracle_boxes_overlap(oracle_box(probe_x, probe_z, fp), oracle_box(px, pz, pfp))
                for px, pz, pfp in placed
            )
            assert (scene.check_collision(probe) is not None) == want


# ---------------------------------------------------------------------------
# add / remove / list
# ---------------------------------------------------------------------------

class TestAddRemoveList:
    def test_demo_add_sequence(self):
        scene = Scene(30.0, 30.0, gap=0.5)
        cat = demo_catalog()
        ref1 = scene.add_object(cat, "Yaskawa MA2010", GlobalPlacement("right", "front"))
        assert ref1 == "Yaskawa MA2010"
        assert scene.objects[ref1].center == (10.0, 1.0, -10.0)

        ref2 = scene.add_object(cat, "ABB IRB 2600", RelativePlacement("left of", "Yaskawa MA2010"))
        assert ref2 == "ABB IRB 2600"
        assert scene.objects[ref2].center == (7.5, 1.0, -10.0)

        removed = scene.remove_object("Yaskawa MA2010")
        assert removed.ref_name == "Yaskawa MA2010"
        assert [o.ref_name for o in scene.list_objects()] == ["ABB IRB 2600"]

    def test_same_cell_twice_is_occupied(self):
        scene = Scene(30.0, 30.0)
        cat = demo_catalog()
        scene.add_object(cat, "Yaskawa MA2010", GlobalPlacement("right", "front"))
        with pytest.raises(OccupiedError) as exc:
            scene.add_object(cat, "ABB IRB 2600", GlobalPlacement("right", "front"))
        assert exc.value.blocker == "Yaskawa MA2010"

    def test_failed_add_leaves_scene_unchanged(self):
        scene = Scene(30.0, 30.0)
        cat = demo_catalog()
        scene.add_object(cat, "Yaskawa MA2010", GlobalPlacement("right", "front"))
        before = (dict(scene.objects), dict(scene.name_counters), scene.version)
        for placement in (
            GlobalPlacement("right", "front"),                 # occupied
            RelativePlacement("left of", "Ghost"),             # unknown anchor
        ):
            with pytest.raises(SceneError):
                scene.add_object(cat, "ABB IRB 2600", placement)
        with pytest.raises(UnknownPrototypeError):
            scene.add_object(cat, "Ghost", GlobalPlacement("left", "back"))
        assert (dict(scene.objects), dict(scene.name_counters), scene.version) == before

    def test_out_of_bounds_rejected(self):
        scene = Scene(4.0, 4.0)  # cell centers at +-4/3; robot half width 1.0 > 2 - 4/3
        with pytest.raises(OutOfBoundsError):
            scene.add_object(demo_catalog(), "Yaskawa MA2010", GlobalPlacement("right", "front"))

    def test_ref_names_never_reused(self):
        # trace by hand: counter 1 -> "Workbench", counter 2 -> "Workbench#2"
        scene = Scene(30.0, 30.0)
        cat = demo_catalog()
        assert scene.add_object(cat, "Workbench", GlobalPlacement("center", "center")) == "Workbench"
        scene.remove_object("Workbench")
        assert scene.add_object(cat, "Workbench", GlobalPlacement("center", "center")) == "Workbench#2"
        assert scene.add_object(cat, "Workbench", GlobalPlacement("left", "back")) == "Workbench#3"

    def test_remove_from_empty_scene(self):
        with pytest.raises(NotFoundError):
            Scene().remove_object("Yaskawa MA2010")

    def test_list_is_insertion_ordered_and_stable(self):
        scene = Scene(30.0, 30.0)
        cat = demo_catalog()
        scene.add_object(cat, "Workbench", GlobalPlacement("left", "front"))
        scene.add_object(cat, "ABB IRB 2600", GlobalPlacement("right", "back"))
        assert scene.list_objects() == scene.list_objects()
        assert [o.ref_name for o in scene.list_objects()] == ["Workbench", "ABB IRB 2600"]
        assert Scene().list_objects() == []

    def test_version_counts_successful_mutations_only(self):
        scene = Scene(30.0, 30.0)
        cat = demo_catalog()
        assert scene.version == 0
        scene.add_object(cat, "Workbench", GlobalPlacement("center", "center"))
        assert scene.version == 1
        with pytest.raises(OccupiedError):
            scene.add_object(cat, "Workbench", GlobalPlacement("center", "center"))
        assert scene.version == 1
        scene.remove_object("Workbench")
        assert scene.version == 2


# ---------------------------------------------------------------------------
# placement parsing from wire strings
# ---------------------------------------------------------------------------

class TestPlacementFromStrings:
    def test_global(self):
        assert placement_from_strings("right", "front") == GlobalPlacement("right", "front")

    def test_relative(self):
        got = placement_from_strings("left of", "Yaskawa MA2010")
        assert got == RelativePlacement("left of", "Yaskawa MA2010")

    @pytest.mark.parametrize("pos_x,pos_y", [
        ("sideways", "front"), ("right", "sideways"), ("", "front"), ("left of", ""),
    ])
    def test_rejects_bad_tokens(self, pos_x, pos_y):
        with pytest.raises(InvalidPlacementError):
            placement_from_strings(pos_x, pos_y)


# ---------------------------------------------------------------------------
# randomized engine-vs-oracle equivalence
# ---------------------------------------------------------------------------

def random_command(rng, live_refs, prototypes):
    if live_refs and rng.random() < 0.5:
        return ("relative",
                rng.choice(["left of", "right of", "behind", "in front of"]),
                rng.choice(sorted(live_refs)),
                rng.choice(prototypes))
    return ("global",
            rng.choice(["left", "center", "right"]),
            rng.choice(["front", "center", "back"]),
            rng.choice(prototypes))


def test_add_decisions_match_oracle_on_random_sequences():
    rng = random.Random(777)
    cat = demo_catalog()
    prototypes = sorted(cat.prototypes)
    for _ in range(150):
        w = rng.choice([12.0, 20.0, 30.0])
        scene = Scene(w, w, gap=rng.choice([0.0, 0.5]))
        placed = {}  # ref -> (cx, cz, fp)
        for _ in range(rng.randint(1, 20)):
            cmd = random_command(rng, set(placed), prototypes)
            fp = cat.footprint(cmd[3])
            if cmd[0] == "global":
                cx, cz = oracle_global_center(w, w, cmd[1], cmd[2])
                placement = GlobalPlacement(cmd[1], cmd[2])
            else:
                ax, az, afp = placed[cmd[2]]
                cx, cz = oracle_relative_center((ax, az), afp, fp, scene.gap, cmd[1])
                placement = RelativePlacement(cmd[1], cmd[2])
            want_accept = oracle_accepts(w, w, list(placed.values()), cx, cz, fp)
            try:
                ref = scene.add_object(cat, cmd[3], placement)
                assert want_accept, f"engine accepted what oracle rejects: {cmd}"
                placed[ref] = (cx, cz, fp)
            except (OccupiedError, OutOfBoundsError):
                assert not want_accept, f"engine rejected what oracle accepts: {cmd}"
        # post-sequence invariants, brute force
        objs = list(scene.objects.values())
        for i, a in enumerate(objs):
            box_a = oracle_box(a.center[0], a.center[2], a.footprint)
            assert box_a[0] >= -w / 2 and box_a[3] <= w / 2
            assert box_a[2] >= -w / 2 and box_a[5] <= w / 2
            for b in objs[i + 1:]:
                box_b = oracle_box(b.center[0], b.center[2], b.footprint)
                assert not oracle_boxes_overlap(box_a, box_b)
