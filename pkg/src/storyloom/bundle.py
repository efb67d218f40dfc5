"""Static web bundle export.

Packs a world, per-tag grammars, and optional novelty archives into a
single ``bundle.json`` (plus the static explorer page) that the browser
client reads.  Nothing per-room is precomputed: the world's room seeds
let the explorer pick titles and descriptions deterministically on its
own, so the bundle stays small and byte-stable.
"""

from __future__ import annotations

import os
import shutil
from importlib import resources

from .errors import StoryloomError
from .evolve import load_archive, archive_to_doc
from .grammar import Grammar, grammar_to_doc, load_grammar
from .jsonio import canonical_dumps
from .world import WorldGrid, world_to_doc

FORMAT_VERSION = 1

# Display layer for the explorer's emoji mode; keys are the glyphs the
# terminal renderer emits.
EMOJI_MAP = {
    "@": "\U0001f642",   # player, a face
    "&": "\U0001f479",   # non-player character
    "~": "\U0001f30a",   # stream
    "*": "❄️", # snow
    ".": "\U0001faa8",   # cavern
    '"': "\U0001f33f",   # vegetation
    "Δ": "⛰️",  # tunnel
}


class MissingGrammarForTagError(StoryloomError):
    """The world uses a tag that has no grammar in the input directory."""

    def __init__(self, tag: str):
        super().__init__(f"no grammar found for tag {tag!r}")
        self.tag = tag


def _fallback_title_grammar(tag: str) -> Grammar:
    """Minimal stand-in when a tag ships only a description grammar."""
    doc = f'{{"origin": ["#place.capitalize#"], "place": ["{tag.lower()}"]}}'
    from .grammar import parse_grammar
    return parse_grammar(doc)


def load_tag_grammars(grammars_dir: str, tags: set[str],
                      ) -> dict[str, dict[str, Grammar]]:
    """Read ``<tag>.json`` (description) and ``<tag>.title.json`` (title,
    optional) for each tag, lowercase filenames."""
    out: dict[str, dict[str, Grammar]] = {}
    for tag in sorted(tags):
        desc_path = os.path.join(grammars_dir, f"{tag.lower()}.json")
        if not os.path.isfile(desc_path):
            raise MissingGrammarForTagError(tag)
        title_path = os.path.join(grammars_dir, f"{tag.lower()}.title.json")
        title = (load_grammar(title_path) if os.path.isfile(title_path)
                 else _fallback_title_grammar(tag))
        out[tag] = {"title": title, "description": load_grammar(desc_path)}
    return out


def load_tag_archives(archives_dir: str | None, tags: set[str]) -> dict:
    """Read ``<tag>.json`` archives for whichever tags have one."""
    out = {}
    if archives_dir is None:
        return out
    for tag in sorted(tags):
        path = os.path.join(archives_dir, f"{tag.lower()}.json")
        if os.path.isfile(path):
            out[tag] = load_archive(path)
    return out


def build_bundle(world: WorldGrid, grammars: dict[str, dict[str, Grammar]],
                 archives: dict | None = None) -> dict:
    """Assemble the bundle document.  ``grammars`` maps each room tag to
    its title and description grammars; ``archives`` is optional."""
    for tag in world.used_tags():
        if tag not in grammars:
            raise MissingGrammarForTagError(tag)
    doc = {
        "format_version": FORMAT_VERSION,
        "manifest": {
            "format_version": FORMAT_VERSION,
            "seeds": {"world": world.seed},
            "emoji": dict(EMOJI_MAP),
        },
        "world": world_to_doc(world),
        "grammars": {
            tag: {
                "title": grammar_to_doc(pair["title"]),
                "description": grammar_to_doc(pair["description"]),
            }
            for tag, pair in grammars.items()
        },
        "archives": {tag: archive_to_doc(a)
                     for tag, a in (archives or {}).items()},
    }
    return doc


def export_web(world: WorldGrid, grammars: dict[str, dict[str, Grammar]],
               archives: dict | None, out_dir: str) -> dict:
    """Write ``bundle.json`` and the static explorer assets to
    ``out_dir``; returns the bundle document.  Output bytes depend only
    on the inputs."""
    doc = build_bundle(world, grammars, archives)
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "bundle.json"), "w", encoding="utf-8") as f:
        f.write(canonical_dumps(doc))
    _copy_webassets(out_dir)
    return doc


def _copy_webassets(out_dir: str) -> None:
    assets = resources.files("storyloom") / "webassets"
    for entry in assets.iterdir():
        if entry.is_file():
            with resources.as_file(entry) as src:
                shutil.copy(src, os.path.join(out_dir, entry.name))
