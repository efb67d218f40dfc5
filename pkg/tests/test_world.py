import collections
import json

import numpy as np
import pytest

from storyloom.errors import ConfigError
from storyloom.world import (
    DEFAULT_FEATURES,
    Band,
    Entity,
    FeatureTable,
    NoPassableCellError,
    OutOfRangeError,
    UncoveredValueError,
    WorldFormatError,
    build_permutation,
    classify,
    feature_table_from_doc,
    feature_table_to_doc,
    generate_world,
    load_world,
    normalize,
    render_minimap,
    save_world,
    simplex2,
    world_from_doc,
    world_to_doc,
)


# --- noise -------------------------------------------------------------------


def test_permutation_is_a_doubled_shuffle_of_bytes():
    table = build_permutation(99)
    assert len(table.perm) == 512
    assert sorted(table.perm[:256]) == list(range(256))
    assert table.perm[256:] == table.perm[:256]


def test_permutation_is_seed_deterministic():
    assert build_permutation(5).perm == build_permutation(5).perm
    assert build_permutation(5).perm != build_permutation(6).perm


def test_noise_range_and_determinism():
    table = build_permutation(123)
    rng = np.random.default_rng(1)
    for x, y in rng.uniform(-50, 50, size=(2000, 2)):
        v = simplex2(table, x, y)
        assert -1.0 <= v <= 1.0
        assert simplex2(table, x, y) == v


def test_noise_is_continuous():
    # Nearby inputs give nearby outputs: empirical slope stays well
    # under the kernel's bound (observed max ~11, asserted at 20).
    table = build_permutation(123)
    rng = np.random.default_rng(2)
    h = 1e-3
    for _ in range(4000):
        x, y = rng.uniform(0, 50, size=2)
        angle = rng.uniform(0, 2 * np.pi)
        dx, dy = h * np.cos(angle), h * np.sin(angle)
        assert abs(simplex2(table, x + dx, y + dy) - simplex2(table, x, y)) <= 20 * h


def test_noise_varies():
    table = build_permutation(7)
    vals = {round(simplex2(table, x * 0.13, x * 0.21), 9) for x in range(100)}
    assert len(vals) > 50


# --- normalization -----------------------------------------------------------


def test_normalize_endpoints_exact():
    assert normalize(-1.0) == 0.0
    assert normalize(0.0) == 0.5
    assert normalize(1.0) == 1.0


def test_normalize_rejects_out_of_range():
    with pytest.raises(OutOfRangeError):
        normalize(1.0000001)
    with pytest.raises(OutOfRangeError):
        normalize(-1.1)


# --- classification ----------------------------------------------------------


@pytest.mark.parametrize("value,tag", [
    (0.0, "TUNNEL"),
    (0.10, "TUNNEL"),
    (0.199999, "TUNNEL"),
    (0.20, "CAVERN"),
    (0.349999, "CAVERN"),
    (0.35, "STREAM"),
    (0.40, "STREAM"),
    (0.55, "STREAM"),
    (0.550001, "VEGETATION"),
    (0.749999, "VEGETATION"),
    (0.75, "SNOW"),
    (1.0, "SNOW"),
])
def test_default_bands(value, tag):
    assert classify(value, DEFAULT_FEATURES) == tag


def test_uncovered_value_raises():
    table = FeatureTable((Band(0.0, 0.5, "ONLY", "o"),))
    with pytest.raises(UncoveredValueError):
        classify(0.9, table)


def test_first_match_wins():
    table = FeatureTable((Band(0.0, 1.0, "FIRST", "f"), Band(0.0, 1.0, "SECOND", "s")))
    assert classify(0.5, table) == "FIRST"


def test_feature_table_round_trip():
    doc = feature_table_to_doc(DEFAULT_FEATURES)
    assert feature_table_from_doc(doc) == DEFAULT_FEATURES


# --- world generation --------------------------------------------------------


def test_generated_world_is_deterministic():
    a = generate_world(7, 16, 16, npc_count=4)
    b = generate_world(7, 16, 16, npc_count=4)
    assert np.array_equal(a.values, b.values)
    assert a.tags == b.tags
    assert a.room_seeds == b.room_seeds
    assert a.entities == b.entities


def test_world_values_normalized_and_tagged():
    w = generate_world(3, 32, 32)
    assert ((w.values >= 0.0) & (w.values <= 1.0)).all()
    for y in range(w.height):
        for x in range(w.width):
            assert w.tag_at(x, y) == classify(w.values[y, x], w.feature_table)


def test_every_band_appears_at_default_scale():
    w = generate_world(7, 64, 64)
    counts = collections.Counter(t for row in w.tags for t in row)
    assert set(counts) == {"TUNNEL", "CAVERN", "STREAM", "VEGETATION", "SNOW"}


def test_room_seeds_are_64_bit_and_distinct_enough():
    w = generate_world(11, 16, 16)
    flat = [s for row in w.room_seeds for s in row]
    assert all(0 <= s < 2 ** 64 for s in flat)
    assert len(set(flat)) == len(flat)


def test_player_at_first_passable_cell():
    w = generate_world(7, 16, 16)
    assert w.player() == Entity("PLAYER", 0, 0)
    tag00 = w.tag_at(0, 0)
    w2 = generate_world(7, 16, 16, impassable={tag00})
    px, py = w2.player().x, w2.player().y
    assert w2.tag_at(px, py) != tag00
    for y in range(py + 1):
        for x in range(w2.width):
            if (y, x) < (py, px):
                assert w2.tag_at(x, y) == tag00


def test_npcs_distinct_and_not_on_player():
    w = generate_world(5, 12, 12, npc_count=20)
    spots = [(e.x, e.y) for e in w.entities]
    assert len(set(spots)) == len(spots)
    assert sum(1 for e in w.entities if e.kind == "NPC") == 20


def test_impassable_everything_fails():
    with pytest.raises(NoPassableCellError):
        generate_world(1, 4, 4,
                       impassable={"TUNNEL", "CAVERN", "STREAM",
                                   "VEGETATION", "SNOW"})


def test_bad_dimensions_rejected():
    with pytest.raises(ConfigError):
        generate_world(0, 0, 5)
    with pytest.raises(ConfigError):
        generate_world(0, 4, 4, npc_count=16)


# --- serialization -----------------------------------------------------------


def test_world_round_trip(tmp_path):
    w = generate_world(7, 16, 16, npc_count=3)
    path = tmp_path / "world.json"
    save_world(w, str(path))
    w2 = load_world(str(path))
    assert np.array_equal(w2.values, w.values)
    assert w2.tags == w.tags
    assert w2.room_seeds == w.room_seeds
    assert w2.entities == w.entities
    assert w2.feature_table == w.feature_table
    save_world(w2, str(tmp_path / "again.json"))
    assert (tmp_path / "again.json").read_bytes() == path.read_bytes()


def test_room_seeds_serialized_as_strings():
    w = generate_world(7, 4, 4)
    doc = world_to_doc(w)
    assert all(isinstance(s, str) for s in doc["room_seeds"])


def test_tampered_tag_rejected():
    doc = world_to_doc(generate_world(7, 4, 4))
    flat = list(doc["tags"])
    flat[0] = "SNOW" if flat[0] != "SNOW" else "TUNNEL"
    doc["tags"] = flat
    with pytest.raises(WorldFormatError):
        world_from_doc(doc)


def test_wrong_array_length_rejected():
    doc = world_to_doc(generate_world(7, 4, 4))
    doc["values"] = doc["values"][:-1]
    with pytest.raises(WorldFormatError):
        world_from_doc(doc)


def test_exactly_one_player_required():
    doc = world_to_doc(generate_world(7, 4, 4))
    doc["entities"] = []
    with pytest.raises(WorldFormatError):
        world_from_doc(doc)
    doc["entities"] = [{"kind": "PLAYER", "x": 0, "y": 0},
                       {"kind": "PLAYER", "x": 1, "y": 0}]
    with pytest.raises(WorldFormatError):
        world_from_doc(doc)


def test_out_of_bounds_entity_rejected():
    doc = world_to_doc(generate_world(7, 4, 4))
    doc["entities"] = [{"kind": "PLAYER", "x": 9, "y": 0}]
    with pytest.raises(WorldFormatError):
        world_from_doc(doc)


def test_garbage_file_rejected(tmp_path):
    path = tmp_path / "junk.json"
    path.write_text("{]")
    with pytest.raises(WorldFormatError):
        load_world(str(path))
    path.write_text(json.dumps({"width": 2}))
    with pytest.raises(WorldFormatError):
        load_world(str(path))


# --- minimap -----------------------------------------------------------------


def test_minimap_shape_and_glyphs():
    w = generate_world(7, 16, 16)
    art = render_minimap(w, 8, 8, 3)
    lines = art.split("\n")
    assert len(lines) == 7
    assert all(len(line) == 7 for line in lines)
    glyphs = {ch for line in lines for ch in line}
    allowed = {b.glyph for b in w.feature_table.bands} | {"@", "&", " "}
    assert glyphs <= allowed


def test_minimap_center_shows_terrain_from_that_cell():
    w = generate_world(7, 16, 16)
    art = render_minimap(w, 8, 8, 0)
    assert art == {b.tag: b.glyph for b in w.feature_table.bands}[w.tag_at(8, 8)]


def test_minimap_edge_padding():
    w = generate_world(7, 8, 8)
    art = render_minimap(w, 0, 0, 2)
    lines = art.split("\n")
    assert len(lines) == 5
    assert lines[0] == " " * 5
    assert lines[2][0] == " "
    assert lines[2][2] == "@"  # player lives at (0,0) on this world


def test_minimap_entities_override_terrain():
    w = generate_world(7, 16, 16, npc_count=8)
    art = render_minimap(w, w.width // 2, w.height // 2, max(w.width, w.height))
    flat = [ch for line in art.split("\n") for ch in line]
    assert flat.count("@") == 1
    assert flat.count("&") == len([e for e in w.entities if e.kind == "NPC"])


def test_minimap_player_wins_shared_cell():
    w = generate_world(7, 6, 6)
    npc_on_player = Entity("NPC", w.player().x, w.player().y)
    w.entities.append(npc_on_player)
    art = render_minimap(w, w.player().x, w.player().y, 0)
    assert art == "@"
