"""Simplex-noise world grid: terrain tags, entities, and the minimap.

Each cell samples 2-D simplex noise at scaled coordinates, normalizes
the value into [0, 1], and classifies it into an environment feature
band (TUNNEL, CAVERN, STREAM, VEGETATION, SNOW by default).  A seeded
64-bit room seed per cell lets downstream consumers pick storylets
deterministically without precomputing them.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import ConfigError, StoryloomError
from .rng import MASK64, SplitMix64

DEFAULT_NOISE_SCALE = 0.1

PLAYER = "PLAYER"
NPC = "NPC"

PLAYER_GLYPH = "@"
NPC_GLYPH = "&"


class OutOfRangeError(StoryloomError):
    """Raw noise value outside [-1, 1]."""


class UncoveredValueError(StoryloomError):
    """A normalized value matched no feature band (table misconfiguration)."""


class NoPassableCellError(StoryloomError):
    """Entity placement failed because passable cells ran out."""


class WorldFormatError(StoryloomError):
    """A world document failed validation."""


# --- simplex noise -----------------------------------------------------------

_F2 = 0.5 * (math.sqrt(3.0) - 1.0)
_G2 = (3.0 - math.sqrt(3.0)) / 6.0

# 8 gradient directions, midpoints of the lattice edges avoided so no
# axis lines up with a gradient exactly.
_GRAD2 = (
    (1, 2), (2, 1), (2, -1), (1, -2),
    (-1, -2), (-2, -1), (-2, 1), (-1, 2),
)


@dataclass(frozen=True)
class PermutationTable:
    """Doubled 0..255 permutation used to hash lattice corners."""

    perm: tuple[int, ...]
    seed: int


def build_permutation(seed: int) -> PermutationTable:
    """Fisher-Yates shuffle of 0..255 driven by splitmix64."""
    rng = SplitMix64(seed)
    return _build_permutation_from(rng, seed)


def _build_permutation_from(rng: SplitMix64, seed: int) -> PermutationTable:
    base = list(range(256))
    for i in range(255, 0, -1):
        j = rng.below(i + 1)
        base[i], base[j] = base[j], base[i]
    return PermutationTable(tuple(base + base), seed & MASK64)


def simplex2(table: PermutationTable, x: float, y: float) -> float:
    """2-D simplex noise in [-1, 1].

    Skew/unskew constants are the standard F2 = (sqrt(3)-1)/2 and
    G2 = (3-sqrt(3))/6; corner contributions use the (0.5 - d^2)^4
    falloff kernel against the 8-direction gradient set, summed and
    scaled by 70, then clamped.
    """
    perm = table.perm

    s = (x + y) * _F2
    i = math.floor(x + s)
    j = math.floor(y + s)
    t = (i + j) * _G2
    x0 = x - (i - t)
    y0 = y - (j - t)

    if x0 > y0:
        i1, j1 = 1, 0
    else:
        i1, j1 = 0, 1
    x1 = x0 - i1 + _G2
    y1 = y0 - j1 + _G2
    x2 = x0 - 1.0 + 2.0 * _G2
    y2 = y0 - 1.0 + 2.0 * _G2

    ii = i & 255
    jj = j & 255
    gi0 = perm[ii + perm[jj]] & 7
    gi1 = perm[ii + i1 + perm[jj + j1]] & 7
    gi2 = perm[ii + 1 + perm[jj + 1]] & 7

    total = 0.0
    for (gx, gy), dx, dy in ((_GRAD2[gi0], x0, y0),
                             (_GRAD2[gi1], x1, y1),
                             (_GRAD2[gi2], x2, y2)):
        falloff = 0.5 - dx * dx - dy * dy
        if falloff > 0.0:
            falloff *= falloff
            total += falloff * falloff * (gx * dx + gy * dy)
    value = 70.0 * total
    return max(-1.0, min(1.0, value))


def normalize(raw: float) -> float:
    """Affine map [-1, 1] -> [0, 1]."""
    if not -1.0 <= raw <= 1.0:
        raise OutOfRangeError(f"raw noise value {raw} outside [-1, 1]")
    return (raw + 1.0) / 2.0


# --- feature classification --------------------------------------------------


@dataclass(frozen=True)
class Band:
    lo: float
    hi: float
    tag: str
    glyph: str


@dataclass(frozen=True)
class FeatureTable:
    """Ordered closed bands; the first band containing a value wins, so
    list order decides ownership of shared endpoints."""

    bands: tuple[Band, ...]

    def glyph_for(self, tag: str) -> str:
        for band in self.bands:
            if band.tag == tag:
                return band.glyph
        raise UncoveredValueError(f"no band for tag {tag!r}")

    def tags(self) -> tuple[str, ...]:
        seen = []
        for band in self.bands:
            if band.tag not in seen:
                seen.append(band.tag)
        return tuple(seen)


# STREAM at [0.35, 0.55] owns both endpoints; the ordering gives the
# neighboring bands their half-open behavior (TUNNEL up to but not
# including 0.20, VEGETATION strictly between 0.55 and 0.75, ...).
DEFAULT_FEATURES = FeatureTable((
    Band(0.35, 0.55, "STREAM", "~"),
    Band(0.75, 1.00, "SNOW", "*"),
    Band(0.20, 0.35, "CAVERN", "."),
    Band(0.55, 0.75, "VEGETATION", '"'),
    Band(0.00, 0.20, "TUNNEL", "Δ"),
))


def classify(value: float, table: FeatureTable = DEFAULT_FEATURES) -> str:
    """Tag of the first band with lo <= value <= hi."""
    for band in table.bands:
        if band.lo <= value <= band.hi:
            return band.tag
    raise UncoveredValueError(f"value {value} matched no feature band")


# --- world grid --------------------------------------------------------------


@dataclass(frozen=True)
class Entity:
    kind: str  # PLAYER or NPC
    x: int
    y: int


@dataclass
class WorldGrid:
    """Immutable-by-convention world state.

    Arrays are indexed ``[y][x]`` and serialized row-major (y outer).
    """

    width: int
    height: int
    seed: int
    noise_scale: float
    feature_table: FeatureTable
    values: np.ndarray          # float64, shape (height, width), in [0, 1]
    tags: list[list[str]]
    entities: list[Entity]
    room_seeds: list[list[int]]  # 64-bit unsigned per cell
    impassable: frozenset[str] = field(default_factory=frozenset)

    def tag_at(self, x: int, y: int) -> str:
        return self.tags[y][x]

    def player(self) -> Entity:
        return next(e for e in self.entities if e.kind == PLAYER)

    def used_tags(self) -> list[str]:
        return sorted({t for row in self.tags for t in row})


def generate_world(seed: int, width: int, height: int,
                   feature_table: FeatureTable = DEFAULT_FEATURES,
                   npc_count: int = 0,
                   noise_scale: float = DEFAULT_NOISE_SCALE,
                   impassable: Iterable[str] = ()) -> WorldGrid:
    """Build the full grid deterministically from one seed.

    The permutation table, per-cell room seeds, and NPC placement all
    draw from a single splitmix64 stream in a fixed order, so equal
    seeds give structurally identical worlds.
    """
    if width < 1 or height < 1:
        raise ConfigError("world dimensions must be >= 1")
    if npc_count < 0 or npc_count >= width * height:
        raise ConfigError("npc_count must be in [0, width*height)")

    impassable = frozenset(impassable)
    rng = SplitMix64(seed)
    table = _build_permutation_from(rng, seed)

    values = np.empty((height, width), dtype=np.float64)
    tags: list[list[str]] = []
    for y in range(height):
        row = []
        for x in range(width):
            v = normalize(simplex2(table, x * noise_scale, y * noise_scale))
            values[y, x] = v
            row.append(classify(v, feature_table))
        tags.append(row)

    room_seeds = [[rng.next_u64() for _ in range(width)] for _ in range(height)]

    passable = [(x, y) for y in range(height) for x in range(width)
                if tags[y][x] not in impassable]
    if not passable:
        raise NoPassableCellError("every cell is impassable")
    entities = [Entity(PLAYER, *passable[0])]

    remaining = passable[1:]
    if npc_count > len(remaining):
        raise NoPassableCellError(
            f"need {npc_count} passable cells for NPCs, have {len(remaining)}"
        )
    for _ in range(npc_count):
        idx = rng.below(len(remaining))
        cx, cy = remaining.pop(idx)
        entities.append(Entity(NPC, cx, cy))

    return WorldGrid(width, height, seed & MASK64, noise_scale, feature_table,
                     values, tags, entities, room_seeds, impassable)


# --- minimap -----------------------------------------------------------------


def render_minimap(world: WorldGrid, center_x: int, center_y: int,
                   radius: int) -> str:
    """(2*radius+1)-line text view centered on (center_x, center_y).

    Entity glyphs override terrain (the player wins over NPCs); cells
    outside the world render as spaces.
    """
    if not (0 <= center_x < world.width and 0 <= center_y < world.height):
        raise ConfigError("viewport center out of bounds")
    overlay: dict[tuple[int, int], str] = {}
    for e in world.entities:  # player listed first, so it wins ties
        overlay.setdefault((e.x, e.y), PLAYER_GLYPH if e.kind == PLAYER else NPC_GLYPH)
    lines = []
    for y in range(center_y - radius, center_y + radius + 1):
        chars = []
        for x in range(center_x - radius, center_x + radius + 1):
            if not (0 <= x < world.width and 0 <= y < world.height):
                chars.append(" ")
            elif (x, y) in overlay:
                chars.append(overlay[(x, y)])
            else:
                chars.append(world.feature_table.glyph_for(world.tags[y][x]))
        lines.append("".join(chars))
    return "\n".join(lines)


# --- world document ----------------------------------------------------------


def feature_table_to_doc(table: FeatureTable) -> list[dict]:
    return [{"lo": b.lo, "hi": b.hi, "tag": b.tag, "glyph": b.glyph}
            for b in table.bands]


def feature_table_from_doc(doc: list[dict]) -> FeatureTable:
    try:
        bands = tuple(Band(float(b["lo"]), float(b["hi"]), str(b["tag"]),
                           str(b["glyph"])) for b in doc)
    except (KeyError, TypeError, ValueError) as e:
        raise WorldFormatError(f"bad feature table entry: {e}") from e
    for band in bands:
        if band.lo > band.hi:
            raise WorldFormatError(f"band {band.tag} has lo > hi")
    return FeatureTable(bands)


def world_to_doc(world: WorldGrid) -> dict:
    """World document for JSON serialization.

    Room seeds are decimal strings: they are full 64-bit values, which
    the browser explorer could not read losslessly as JSON numbers.
    """
    return {
        "width": world.width,
        "height": world.height,
        "seed": world.seed,
        "noise_scale": world.noise_scale,
        "feature_table": feature_table_to_doc(world.feature_table),
        "values": [float(v) for v in world.values.ravel()],
        "tags": [t for row in world.tags for t in row],
        "entities": [{"kind": e.kind, "x": e.x, "y": e.y}
                     for e in world.entities],
        "room_seeds": [str(s) for row in world.room_seeds for s in row],
        "impassable": sorted(world.impassable),
    }


def world_from_doc(doc: dict) -> WorldGrid:
    try:
        width = int(doc["width"])
        height = int(doc["height"])
        table = feature_table_from_doc(doc["feature_table"])
        flat_values = [float(v) for v in doc["values"]]
        flat_tags = [str(t) for t in doc["tags"]]
        flat_seeds = [int(s) for s in doc["room_seeds"]]
        entities = [Entity(str(e["kind"]), int(e["x"]), int(e["y"]))
                    for e in doc["entities"]]
        seed = int(doc["seed"])
        noise_scale = float(doc.get("noise_scale", DEFAULT_NOISE_SCALE))
        impassable = frozenset(str(t) for t in doc.get("impassable", []))
    except (KeyError, TypeError, ValueError) as e:
        raise WorldFormatError(f"bad world document: {e}") from e

    n = width * height
    if len(flat_values) != n or len(flat_tags) != n or len(flat_seeds) != n:
        raise WorldFormatError("value/tag/room_seed arrays do not match width*height")
    values = np.array(flat_values, dtype=np.float64).reshape(height, width)
    tags = [flat_tags[y * width:(y + 1) * width] for y in range(height)]
    room_seeds = [flat_seeds[y * width:(y + 1) * width] for y in range(height)]

    for y in range(height):
        for x in range(width):
            if classify(values[y, x], table) != tags[y][x]:
                raise WorldFormatError(
                    f"tag at ({x},{y}) does not match its value's band"
                )
    players = [e for e in entities if e.kind == PLAYER]
    if len(players) != 1:
        raise WorldFormatError("world must contain exactly one PLAYER")
    for e in entities:
        if not (0 <= e.x < width and 0 <= e.y < height):
            raise WorldFormatError(f"entity {e.kind} out of bounds at ({e.x},{e.y})")
    return WorldGrid(width, height, seed, noise_scale, table, values, tags,
                     entities, room_seeds, impassable)


def save_world(world: WorldGrid, path: str) -> None:
    from .jsonio import canonical_dumps
    with open(path, "w", encoding="utf-8") as f:
        f.write(canonical_dumps(world_to_doc(world)))


def load_world(path: str) -> WorldGrid:
    with open(path, encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise WorldFormatError(f"{path}: invalid JSON at line {e.lineno}") from e
    return world_from_doc(doc)
