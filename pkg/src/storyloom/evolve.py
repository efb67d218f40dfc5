"""Grammatical evolution driven by novelty instead of fitness.

Genomes decode through the grammar into storylets; selection pressure
comes from how *dissimilar* a storylet reads from its nearest neighbors
in the current population plus the archive (sparseness).  Individuals
whose novelty clears the threshold enter the archive, which is the
search's real output; the population itself is disposable.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field, asdict
from typing import Sequence

import numpy as np

from .errors import ConfigError, StoryloomError
from .grammar import (
    DEFAULT_COMPAT,
    Alternative,
    Grammar,
    InvalidMappingError,
    Storylet,
    check_feasibility,
    decode,
)
from .embeddings import EmbeddingModel, similarity
from .jsonio import DocumentError

CODON_BITS = 32
_CODON_HIGH = 1 << CODON_BITS


class UnevaluatedError(StoryloomError):
    """novelty_score was asked about an individual with no storylet."""


class TooFewStoryletsError(StoryloomError):
    """population_diversity needs at least two storylets."""


class LengthMismatchError(StoryloomError):
    """Crossover parents have different genome lengths."""


class EmptyArchiveError(StoryloomError):
    """export_augmented_grammar got an archive with no members."""


class NoFeasibleIndividualsWarning(UserWarning):
    """A whole generation decoded to nothing feasible (not fatal)."""


@dataclass
class Individual:
    genome: np.ndarray                 # uint32 codons
    storylet: Storylet | None = None   # None when the mapping was invalid
    feasible: bool = False
    novelty: float | None = None


@dataclass(frozen=True)
class ArchiveMember:
    text: str
    tags: frozenset[str]
    novelty: float
    generation: int


@dataclass
class NoveltyArchive:
    """Insertion-ordered store of threshold-passing storylets."""

    rho: float
    members: list[ArchiveMember] = field(default_factory=list)
    _texts: set[str] = field(default_factory=set, repr=False)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, text: str) -> bool:
        return text in self._texts


@dataclass
class EvolutionConfig:
    room_tag: str
    seed: int = 0
    population_size: int = 100
    generations: int = 50
    k_neighbors: int = 15
    rho: float = 0.30
    mutation_rate: float = 0.05
    crossover_rate: float = 0.9
    tournament_size: int = 3
    genome_length: int = 64

    def __post_init__(self):
        if self.population_size < 2:
            raise ConfigError("population_size must be >= 2")
        if self.generations < 1:
            raise ConfigError("generations must be >= 1")
        if self.k_neighbors < 1:
            raise ConfigError("k_neighbors must be >= 1")
        if not 0.0 <= self.rho <= 1.0:
            raise ConfigError("rho must be in [0, 1]")
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ConfigError("mutation_rate must be in [0, 1]")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ConfigError("crossover_rate must be in [0, 1]")
        if self.tournament_size < 1:
            raise ConfigError("tournament_size must be >= 1")
        if self.genome_length < 2:
            raise ConfigError("genome_length must be >= 2")


@dataclass(frozen=True)
class TelemetryRow:
    generation: int
    best_novelty: float
    mean_novelty: float
    diversity: float      # NaN when fewer than 2 storylets decoded
    archive_size: int


# --- scoring -----------------------------------------------------------------


def novelty_score(candidate: Individual, population: Sequence[Individual],
                  archive: NoveltyArchive, k: int,
                  model: EmbeddingModel) -> float:
    """Mean dissimilarity to the k nearest other storylets.

    Neighbors are every other decoded individual in the population
    (duplicate texts count once each) plus every archive member.  An
    exact duplicate of an archive member scores 0 outright; with no
    neighbors at all, the candidate is maximally novel and scores 1.
    """
    if candidate.storylet is None:
        raise UnevaluatedError("candidate has no decoded storylet")
    text = candidate.storylet.text
    if text in archive:
        return 0.0
    others = [ind.storylet.text for ind in population
              if ind is not candidate and ind.storylet is not None]
    others.extend(m.text for m in archive.members)
    if not others:
        return 1.0
    dists = sorted(1.0 - similarity(model, text, other) for other in others)
    nearest = dists[:k]
    return float(sum(nearest) / len(nearest))


def population_diversity(storylets: Sequence[str],
                         model: EmbeddingModel) -> float:
    """Mean similarity over all unordered pairs (lower = more diverse)."""
    if len(storylets) < 2:
        raise TooFewStoryletsError("diversity needs at least 2 storylets")
    total = 0.0
    pairs = 0
    for i in range(len(storylets)):
        for j in range(i + 1, len(storylets)):
            total += similarity(model, storylets[i], storylets[j])
            pairs += 1
    return total / pairs


# --- variation operators -----------------------------------------------------


def random_genome(rng: np.random.Generator, length: int) -> np.ndarray:
    return rng.integers(0, _CODON_HIGH, size=length, dtype=np.uint32)


def mutate(genome: np.ndarray, rate: float,
           rng: np.random.Generator) -> np.ndarray:
    """Independently replace each codon with a fresh 32-bit value with
    probability ``rate``.  Always draws the same amount of randomness,
    so the stream stays aligned whatever the outcome."""
    mask = rng.random(len(genome)) < rate
    fresh = rng.integers(0, _CODON_HIGH, size=len(genome), dtype=np.uint32)
    return np.where(mask, fresh, genome)


def crossover(a: np.ndarray, b: np.ndarray,
              rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Single-point crossover at a uniform cut in [1, len-1]."""
    if len(a) != len(b):
        raise LengthMismatchError(f"genome lengths differ: {len(a)} vs {len(b)}")
    cut = int(rng.integers(1, len(a)))
    child1 = np.concatenate([a[:cut], b[cut:]])
    child2 = np.concatenate([b[:cut], a[cut:]])
    return child1, child2


# --- archive -----------------------------------------------------------------


def try_archive_insert(archive: NoveltyArchive, individual: Individual,
                       generation: int = 0) -> bool:
    """Insert iff feasible, novelty >= rho, and the text is unseen."""
    if individual.novelty is None:
        raise UnevaluatedError("individual has not been scored")
    if not individual.feasible or individual.storylet is None:
        return False
    if individual.novelty < archive.rho:
        return False
    text = individual.storylet.text
    if text in archive:
        return False
    archive.members.append(ArchiveMember(text, individual.storylet.tags,
                                         individual.novelty, generation))
    archive._texts.add(text)
    return True


# --- the loop ----------------------------------------------------------------


def evolve(grammar: Grammar, cfg: EvolutionConfig, model: EmbeddingModel,
           compat: dict[str, frozenset[str]] | None = None,
           ) -> tuple[NoveltyArchive, list[TelemetryRow]]:
    """Run the novelty-search GE loop and return (archive, telemetry).

    Per generation: decode everyone, check feasibility against the room
    tag, score novelty against population + archive, then insert the
    threshold passers.  Parents are picked by tournament on novelty;
    there is no elitism — the archive is the persistent memory.  Fully
    deterministic for a fixed config.
    """
    if compat is None:
        compat = DEFAULT_COMPAT
    rng = np.random.default_rng(cfg.seed)
    population = [Individual(random_genome(rng, cfg.genome_length))
                  for _ in range(cfg.population_size)]
    archive = NoveltyArchive(rho=cfg.rho)
    telemetry: list[TelemetryRow] = []

    for generation in range(cfg.generations):
        for ind in population:
            try:
                ind.storylet = decode(grammar, grammar.start_symbol, ind.genome)
            except InvalidMappingError:
                ind.storylet = None
            ind.feasible = (ind.storylet is not None and
                            check_feasibility(ind.storylet, cfg.room_tag, compat))

        for ind in population:
            if ind.feasible:
                ind.novelty = novelty_score(ind, population, archive,
                                            cfg.k_neighbors, model)
            else:
                ind.novelty = 0.0

        for ind in population:
            try_archive_insert(archive, ind, generation)

        if not any(ind.feasible for ind in population):
            warnings.warn(
                f"generation {generation}: no feasible individuals",
                NoFeasibleIndividualsWarning,
                stacklevel=2,
            )

        novelties = [ind.novelty for ind in population]
        decoded = [ind.storylet.text for ind in population
                   if ind.storylet is not None]
        diversity = (population_diversity(decoded, model)
                     if len(decoded) >= 2 else float("nan"))
        telemetry.append(TelemetryRow(
            generation=generation,
            best_novelty=max(novelties),
            mean_novelty=float(sum(novelties) / len(novelties)),
            diversity=diversity,
            archive_size=len(archive),
        ))

        if generation < cfg.generations - 1:
            population = _next_generation(population, cfg, rng)

    return archive, telemetry


def _tournament(population: list[Individual], size: int,
                rng: np.random.Generator) -> Individual:
    picks = rng.integers(0, len(population), size=size)
    best = picks[0]
    for idx in picks[1:]:
        if population[idx].novelty > population[best].novelty:
            best = idx
    return population[best]


def _next_generation(population: list[Individual], cfg: EvolutionConfig,
                     rng: np.random.Generator) -> list[Individual]:
    children: list[Individual] = []
    while len(children) < cfg.population_size:
        p1 = _tournament(population, cfg.tournament_size, rng)
        p2 = _tournament(population, cfg.tournament_size, rng)
        if rng.random() < cfg.crossover_rate:
            g1, g2 = crossover(p1.genome, p2.genome, rng)
        else:
            g1, g2 = p1.genome.copy(), p2.genome.copy()
        children.append(Individual(mutate(g1, cfg.mutation_rate, rng)))
        children.append(Individual(mutate(g2, cfg.mutation_rate, rng)))
    return children[:cfg.population_size]


# --- augmented grammar -------------------------------------------------------


def export_augmented_grammar(base: Grammar, archive: NoveltyArchive,
                             target_symbol: str) -> Grammar:
    """Copy of ``base`` whose ``target_symbol`` rule is the archive's
    member texts, as literal alternatives carrying their tags, in
    archive order.  ``base`` is left untouched."""
    if not archive.members:
        raise EmptyArchiveError("cannot export an empty archive")
    rules = dict(base.rules)
    rules[target_symbol] = tuple(
        Alternative((m.text,) if m.text else (), m.tags)
        for m in archive.members
    )
    return Grammar(rules, base.start_symbol)


# --- persistence -------------------------------------------------------------


def archive_to_doc(archive: NoveltyArchive,
                   cfg: EvolutionConfig | None = None) -> dict:
    doc = {
        "rho": archive.rho,
        "members": [
            {"text": m.text, "tags": sorted(m.tags), "novelty": m.novelty,
             "generation": m.generation}
            for m in archive.members
        ],
    }
    if cfg is not None:
        doc["config"] = asdict(cfg)
    return doc


def archive_from_doc(doc: dict) -> NoveltyArchive:
    try:
        archive = NoveltyArchive(rho=float(doc["rho"]))
        for m in doc["members"]:
            member = ArchiveMember(str(m["text"]),
                                   frozenset(str(t) for t in m["tags"]),
                                   float(m["novelty"]), int(m["generation"]))
            archive.members.append(member)
            archive._texts.add(member.text)
    except (KeyError, TypeError, ValueError) as e:
        raise DocumentError(f"bad archive document: {e}") from e
    return archive


def save_archive(archive: NoveltyArchive, path: str,
                 cfg: EvolutionConfig | None = None) -> None:
    from .jsonio import dump_json
    dump_json(archive_to_doc(archive, cfg), path)


def load_archive(path: str) -> NoveltyArchive:
    from .jsonio import load_json
    return archive_from_doc(load_json(path))


TELEMETRY_FIELDS = ("generation", "best_novelty", "mean_novelty",
                    "diversity", "archive_size")


def save_telemetry(rows: Sequence[TelemetryRow], path: str) -> None:
    """One CSV row per generation, floats at fixed 6 decimals."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(TELEMETRY_FIELDS)
        for row in rows:
            writer.writerow([
                row.generation,
                f"{row.best_novelty:.6f}",
                f"{row.mean_novelty:.6f}",
                f"{row.diversity:.6f}",
                row.archive_size,
            ])


def load_telemetry(path: str) -> list[TelemetryRow]:
    rows = []
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or tuple(reader.fieldnames) != TELEMETRY_FIELDS:
            raise DocumentError(f"{path}: unexpected telemetry header")
        for rec in reader:
            try:
                rows.append(TelemetryRow(
                    generation=int(rec["generation"]),
                    best_novelty=float(rec["best_novelty"]),
                    mean_novelty=float(rec["mean_novelty"]),
                    diversity=float(rec["diversity"]),
                    archive_size=int(rec["archive_size"]),
                ))
            except (TypeError, ValueError) as e:
                raise DocumentError(f"{path}: bad telemetry row: {e}") from e
    return rows
