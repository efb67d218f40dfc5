"""Regenerate the explorer test fixtures from the core package.

Produces test/fixtures/bundle.json (via the real export-web CLI) and
test/fixtures/parity.json, a table of expected room text for sampled
cells.  Expected descriptions and titles for grammar-path rows come
from the `generate` CLI subcommand, so the parity test compares the
explorer against actual CLI output, not against a reimplementation.

Run from the frontend directory:

    python3 scripts/make_fixtures.py

Requires the storyloom package to be installed (pip install -e ..).
"""

import json
import pathlib
import subprocess
import sys
import tempfile

from importlib import resources

from storyloom.evolve import load_archive
from storyloom.jsonio import canonical_dumps
from storyloom.rng import MASK64, SplitMix64
from storyloom.world import generate_world, world_to_doc

WORLD_SEED = 7
WIDTH = 12
HEIGHT = 12
NPCS = 2
IMPASSABLE = ("SNOW",)
SAMPLE_SEED = 99
ROWS = 25

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "test" / "fixtures"

STREAM_ARCHIVE = {
    "rho": 0.3,
    "members": [
        {"text": "The water keeps its own ledger here.",
         "tags": ["STREAM"], "novelty": 0.41, "generation": 2},
        {"text": "A stream braids itself around three stones.",
         "tags": ["STREAM"], "novelty": 0.38, "generation": 4},
        {"text": "Something upstream is counting drips.",
         "tags": ["STREAM"], "novelty": 0.52, "generation": 5},
        {"text": "The current carries a smell of cold iron.",
         "tags": ["STREAM"], "novelty": 0.35, "generation": 9},
    ],
}


def cli(*args: str) -> str:
    result = subprocess.run(
        [sys.executable, "-m", "storyloom", *args],
        capture_output=True, text=True, check=True,
    )
    return result.stdout


def generate_text(grammar_path: pathlib.Path, seed: int) -> str:
    out = cli("generate", "--grammar", str(grammar_path), "--seed", str(seed))
    return out[:-1] if out.endswith("\n") else out


def sample_cells(world) -> list[tuple[int, int, int]]:
    """(x, y, reroll counter) rows: first cell of each tag, reroll
    cycling on the first STREAM cell, then seeded random fill."""
    first_of_tag: dict[str, tuple[int, int]] = {}
    for y in range(world.height):
        for x in range(world.width):
            first_of_tag.setdefault(world.tags[y][x], (x, y))

    rows: list[tuple[int, int, int]] = []
    sx, sy = first_of_tag["STREAM"]
    rows.extend([(sx, sy, 0), (sx, sy, 1), (sx, sy, 2)])
    for tag in sorted(first_of_tag):
        if tag != "STREAM":
            x, y = first_of_tag[tag]
            rows.append((x, y, 0))
    tx, ty = first_of_tag["TUNNEL"]
    rows.append((tx, ty, 5))

    rng = SplitMix64(SAMPLE_SEED)
    seen = set(rows)
    while len(rows) < ROWS:
        cell = (rng.below(world.width), rng.below(world.height), 0)
        if cell not in seen:
            seen.add(cell)
            rows.append(cell)
    return rows


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    world = generate_world(WORLD_SEED, WIDTH, HEIGHT, npc_count=NPCS,
                           impassable=IMPASSABLE)

    with tempfile.TemporaryDirectory() as tmp:
        tmpdir = pathlib.Path(tmp)
        world_path = tmpdir / "world.json"
        world_path.write_text(canonical_dumps(world_to_doc(world)),
                              encoding="utf-8")

        archives_dir = tmpdir / "archives"
        archives_dir.mkdir()
        (archives_dir / "stream.json").write_text(
            canonical_dumps(STREAM_ARCHIVE), encoding="utf-8")
        load_archive(str(archives_dir / "stream.json"))  # schema check

        out_dir = tmpdir / "site"
        with resources.as_file(resources.files("storyloom") / "data") as data:
            cli("export-web", "--world", str(world_path),
                "--grammars", str(data), "--archives", str(archives_dir),
                "--out", str(out_dir))

        bundle_text = (out_dir / "bundle.json").read_text(encoding="utf-8")
        (FIXTURES / "bundle.json").write_text(bundle_text, encoding="utf-8")
        bundle = json.loads(bundle_text)

        grammar_files: dict[tuple[str, str], pathlib.Path] = {}
        for tag, pair in bundle["grammars"].items():
            for part in ("title", "description"):
                path = tmpdir / f"{tag}.{part}.json"
                path.write_text(json.dumps(pair[part]), encoding="utf-8")
                grammar_files[(tag, part)] = path

        rows = []
        for x, y, counter in sample_cells(world):
            tag = world.tags[y][x]
            seed = (world.room_seeds[y][x] + counter) & MASK64
            title = generate_text(grammar_files[(tag, "title")], seed)
            archive = bundle["archives"].get(tag)
            if archive and archive["members"]:
                members = archive["members"]
                description = members[seed % len(members)]["text"]
                from_archive = True
            else:
                description = generate_text(grammar_files[(tag, "description")],
                                            seed)
                from_archive = False
            rows.append({
                "x": x, "y": y, "counter": counter, "tag": tag,
                "title": title, "description": description,
                "from_archive": from_archive,
            })

    doc = {
        "world_seed": WORLD_SEED,
        "note": "expected explorer output; regenerate with make_fixtures.py",
        "rows": rows,
    }
    (FIXTURES / "parity.json").write_text(canonical_dumps(doc),
                                          encoding="utf-8")
    archived = sum(1 for r in rows if r["from_archive"])
    rerolled = sum(1 for r in rows if r["counter"] > 0)
    print(f"wrote {len(rows)} parity rows ({archived} archive-path, "
          f"{rerolled} rerolled) to {FIXTURES}")


if __name__ == "__main__":
    main()
