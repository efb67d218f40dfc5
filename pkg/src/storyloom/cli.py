"""Command-line front end.

Every subcommand takes its randomness from an explicit --seed flag and
writes artifacts that the same CLI can read back.  Exit codes: 0 on
success, 1 on a domain error (message on stderr), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .errors import StoryloomError
from .bundle import export_web, load_tag_archives, load_tag_grammars
from .embeddings import TrainConfig, load_vectors, train_embeddings, save_vectors
from .evolve import (
    EvolutionConfig,
    evolve,
    export_augmented_grammar,
    load_archive,
    load_telemetry,
    save_archive,
    save_telemetry,
)
from .grammar import expand, load_grammar, save_grammar
from .world import generate_world, load_world, render_minimap, save_world
from .report import render_report


def _cmd_worldgen(args) -> int:
    world = generate_world(args.seed, args.width, args.height,
                           npc_count=args.npcs, noise_scale=args.noise_scale)
    save_world(world, args.out)
    return 0


def _cmd_train(args) -> int:
    with open(args.corpus, encoding="utf-8") as f:
        sentences = [line.strip() for line in f if line.strip()]
    cfg = TrainConfig(dim=args.dim, window=args.window, epochs=args.epochs,
                      min_count=args.min_count, seed=args.seed)
    model = train_embeddings(sentences, cfg)
    save_vectors(model, args.out)
    return 0


def _cmd_generate(args) -> int:
    grammar = load_grammar(args.grammar)
    storylet = expand(grammar, args.symbol, args.seed)
    print(storylet.text)
    return 0


def _cmd_evolve(args) -> int:
    grammar = load_grammar(args.grammar)
    model = load_vectors(args.vectors)
    cfg = EvolutionConfig(
        room_tag=args.tag,
        seed=args.seed,
        population_size=args.pop,
        generations=args.gens,
        k_neighbors=args.k,
        rho=args.rho,
    )
    archive, telemetry = evolve(grammar, cfg, model)
    save_archive(archive, args.out, cfg)
    if args.telemetry:
        save_telemetry(telemetry, args.telemetry)
    if args.plots:
        render_report(telemetry, args.plots)
    print(f"archived {len(archive)} storylets over {cfg.generations} generations",
          file=sys.stderr)
    return 0


def _cmd_augment(args) -> int:
    grammar = load_grammar(args.grammar)
    archive = load_archive(args.archive)
    save_grammar(export_augmented_grammar(grammar, archive, args.symbol),
                 args.out)
    return 0


def _cmd_minimap(args) -> int:
    world = load_world(args.world)
    cx, cy = args.cx, args.cy
    if cx is None or cy is None:
        player = world.player()
        cx = player.x if cx is None else cx
        cy = player.y if cy is None else cy
    print(render_minimap(world, cx, cy, args.radius))
    return 0


def _cmd_export_web(args) -> int:
    world = load_world(args.world)
    tags = world.used_tags()
    grammars = load_tag_grammars(args.grammars, tags)
    archives = load_tag_archives(args.archives, tags)
    export_web(world, grammars, archives, args.out)
    return 0


def _cmd_report(args) -> int:
    rows = load_telemetry(args.telemetry)
    for path in render_report(rows, args.out):
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="storyloom",
        description="Procedural storylets over a noise-derived world.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("worldgen", help="generate a world and save it")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--width", type=int, default=64)
    p.add_argument("--height", type=int, default=64)
    p.add_argument("--npcs", type=int, default=0)
    p.add_argument("--noise-scale", type=float, default=0.1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_worldgen)

    p = sub.add_parser("train", help="train embeddings on a corpus")
    p.add_argument("--corpus", required=True,
                   help="text file, one sentence per line")
    p.add_argument("--dim", type=int, default=50)
    p.add_argument("--window", type=int, default=4)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--min-count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("generate", help="expand a grammar once")
    p.add_argument("--grammar", required=True)
    p.add_argument("--symbol", default="origin")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("evolve", help="run novelty search over a grammar")
    p.add_argument("--grammar", required=True)
    p.add_argument("--vectors", required=True)
    p.add_argument("--tag", required=True, help="room tag for feasibility")
    p.add_argument("--pop", type=int, default=100)
    p.add_argument("--gens", type=int, default=50)
    p.add_argument("--k", type=int, default=15)
    p.add_argument("--rho", type=float, default=0.30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="archive JSON path")
    p.add_argument("--telemetry", help="per-generation CSV path")
    p.add_argument("--plots", help="directory for telemetry figures")
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("augment",
                       help="graft archive texts into a grammar rule")
    p.add_argument("--grammar", required=True)
    p.add_argument("--archive", required=True)
    p.add_argument("--symbol", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_augment)

    p = sub.add_parser("minimap", help="print a map crop around a cell")
    p.add_argument("--world", required=True)
    p.add_argument("--cx", type=int, default=None,
                   help="center x (default: player)")
    p.add_argument("--cy", type=int, default=None,
                   help="center y (default: player)")
    p.add_argument("--radius", type=int, default=5)
    p.set_defaults(func=_cmd_minimap)

    p = sub.add_parser("export-web",
                       help="write bundle.json and explorer assets")
    p.add_argument("--world", required=True)
    p.add_argument("--grammars", required=True,
                   help="directory of <tag>.json grammars")
    p.add_argument("--archives", default=None,
                   help="directory of <tag>.json archives (optional)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export_web)

    p = sub.add_parser("report", help="render telemetry CSV into figures")
    p.add_argument("--telemetry", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_report)

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except StoryloomError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
