"""Word vectors and sentence similarity.

Vectors come from either a desk-scale skip-gram trainer
(:func:`train_embeddings`) or a plain-text vector file.  Sentences are
mean-pooled over in-vocabulary tokens and compared with cosine
similarity mapped onto [0, 1]:

    similarity = (1 + cos) / 2

so 1 means same direction, 0.5 unrelated (or either side empty), and 0
opposite.  The pooling sum runs in sorted-token order, which makes
similarity exactly invariant under token reordering.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, StoryloomError

_TOKEN_RE = re.compile(r"[a-z0-9]+")


class EmptyCorpusError(StoryloomError):
    """The training corpus yields no (center, context) pairs."""


class VectorFormatError(StoryloomError):
    """A vector file is malformed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class DimensionMismatchError(VectorFormatError):
    """A vector row's component count disagrees with the header."""


def tokenize(text: str) -> list[str]:
    """Lowercase tokens split on any non-alphanumeric run."""
    return _TOKEN_RE.findall(text.lower())


@dataclass
class TrainConfig:
    dim: int = 50
    window: int = 4
    epochs: int = 5
    negative_samples: int = 5
    learning_rate: float = 0.025
    min_count: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.dim < 2:
            raise ConfigError("dim must be >= 2")
        if self.window < 1:
            raise ConfigError("window must be >= 1")
        if self.epochs < 1:
            raise ConfigError("epochs must be >= 1")
        if self.negative_samples < 0:
            raise ConfigError("negative_samples must be >= 0")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be > 0")


@dataclass
class EmbeddingModel:
    """token -> vector table of fixed dimension.

    ``_pooled`` caches sentence vectors; it is derived data only and
    keeps repeated similarity evaluations (the novelty loop makes many)
    from re-pooling the same text.
    """

    dim: int
    vectors: dict[str, np.ndarray]
    metadata: dict | None = None
    _pooled: dict[str, np.ndarray] = field(default_factory=dict, repr=False,
                                           compare=False)

    def __post_init__(self):
        for token, vec in self.vectors.items():
            if not token or token != token.lower():
                raise VectorFormatError(f"token {token!r} must be lowercase, non-empty")
            if vec.shape != (self.dim,):
                raise DimensionMismatchError(
                    f"vector for {token!r} has length {vec.shape}, expected {self.dim}"
                )

    def __contains__(self, token: str) -> bool:
        return token in self.vectors


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -60.0, 60.0)))


def train_embeddings(corpus: Iterable[str], cfg: TrainConfig) -> EmbeddingModel:
    """Skip-gram with negative sampling over one-sentence-per-line text.

    Negative draws follow the unigram^0.75 distribution.  Training is
    single-threaded on purpose: the update order is part of the
    per-seed determinism contract.  Returns the center vectors.
    """
    sentences = [tokenize(line) for line in corpus]
    counts: dict[str, int] = {}
    for sent in sentences:
        for tok in sent:
            counts[tok] = counts.get(tok, 0) + 1
    vocab = [t for t, c in counts.items() if c >= cfg.min_count]
    index = {t: i for i, t in enumerate(vocab)}

    encoded = []
    for sent in sentences:
        ids = [index[t] for t in sent if t in index]
        if len(ids) >= 2:
            encoded.append(np.array(ids, dtype=np.int64))
    if not encoded:
        raise EmptyCorpusError("corpus has no sentence with >= 2 in-vocabulary tokens")

    rng = np.random.default_rng(cfg.seed)
    n = len(vocab)
    center = (rng.random((n, cfg.dim)) - 0.5) / cfg.dim
    context = np.zeros((n, cfg.dim))

    freq = np.array([counts[t] for t in vocab], dtype=np.float64)
    noise_cdf = np.cumsum(freq ** 0.75)
    noise_cdf /= noise_cdf[-1]

    pairs_per_epoch = sum(
        min(i + cfg.window + 1, len(ids)) - max(i - cfg.window, 0) - 1
        for ids in encoded for i in range(len(ids))
    )
    total = pairs_per_epoch * cfg.epochs
    done = 0
    k = cfg.negative_samples

    for _ in range(cfg.epochs):
        for ids in encoded:
            for i, c in enumerate(ids):
                lo = max(i - cfg.window, 0)
                hi = min(i + cfg.window + 1, len(ids))
                for j in range(lo, hi):
                    if j == i:
                        continue
                    lr = cfg.learning_rate * max(1e-4, 1.0 - done / total)
                    done += 1
                    targets = np.empty(k + 1, dtype=np.int64)
                    targets[0] = ids[j]
                    if k:
                        targets[1:] = np.searchsorted(noise_cdf, rng.random(k))
                    labels = np.zeros(k + 1)
                    labels[0] = 1.0
                    h = center[c]
                    t_vecs = context[targets]
                    g = lr * (labels - _sigmoid(t_vecs @ h))
                    # np.add.at handles a negative drawn twice in one step
                    np.add.at(context, targets, np.outer(g, h))
                    center[c] += t_vecs.T @ g

    vectors = {tok: center[index[tok]].copy() for tok in vocab}
    meta = {"trained": "sgns", "sentences": len(encoded), "config": vars(cfg).copy()}
    return EmbeddingModel(cfg.dim, vectors, meta)


# --- vector files ------------------------------------------------------------


def save_vectors(model: EmbeddingModel, path: str) -> None:
    """Write ``<count> <dim>`` then one ``token c1 .. cdim`` line per
    token (6 decimal places, tokens sorted)."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"{len(model.vectors)} {model.dim}\n")
        for token in sorted(model.vectors):
            comps = " ".join(f"{v:.6f}" for v in model.vectors[token])
            f.write(f"{token} {comps}\n")


def load_vectors(path: str) -> EmbeddingModel:
    with open(path, encoding="utf-8") as f:
        lines = f.read().splitlines()
    try:
        return _parse_vectors(lines)
    except VectorFormatError as e:
        err = type(e)(f"{path}: {e}")
        err.line = e.line
        raise err from e


def _parse_vectors(lines: list[str]) -> EmbeddingModel:
    if not lines:
        raise VectorFormatError("empty vector file", line=1)
    header = lines[0].split()
    if len(header) != 2:
        raise VectorFormatError("header must be '<count> <dim>'", line=1)
    try:
        count, dim = int(header[0]), int(header[1])
    except ValueError as e:
        raise VectorFormatError(f"bad header: {e}", line=1) from e

    vectors: dict[str, np.ndarray] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split()
        token = fields[0].lower()
        if len(fields) - 1 != dim:
            raise DimensionMismatchError(
                f"token {token!r} has {len(fields) - 1} components, expected {dim}",
                line=lineno,
            )
        if token in vectors:
            raise VectorFormatError(f"duplicate token {token!r}", line=lineno)
        try:
            vectors[token] = np.array([float(v) for v in fields[1:]])
        except ValueError as e:
            raise VectorFormatError(f"bad component: {e}", line=lineno) from e
    if len(vectors) != count:
        raise VectorFormatError(
            f"header promises {count} tokens, file has {len(vectors)}"
        )
    return EmbeddingModel(dim, vectors)


# --- sentence similarity -----------------------------------------------------


def sentence_vector(model: EmbeddingModel, text: str) -> np.ndarray:
    """Mean of in-vocabulary token vectors; zeros if none.

    Tokens are summed in sorted order so any permutation of the same
    sentence produces a bit-identical vector.
    """
    cached = model._pooled.get(text)
    if cached is not None:
        return cached
    toks = sorted(t for t in tokenize(text) if t in model.vectors)
    if not toks:
        vec = np.zeros(model.dim)
    else:
        vec = np.zeros(model.dim)
        for t in toks:
            vec += model.vectors[t]
        vec /= len(toks)
    model._pooled[text] = vec
    return vec


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.clip(float(a @ b) / (na * nb), -1.0, 1.0))


def similarity(model: EmbeddingModel, text_a: str, text_b: str) -> float:
    """Sentence similarity in [0, 1]; symmetric by construction.

    Pairs where either side pools to the zero vector score the neutral
    0.5 (zero-vector cosine is defined as 0).
    """
    va = sentence_vector(model, text_a)
    vb = sentence_vector(model, text_b)
    if np.array_equal(va, vb):
        return 1.0 if va.any() else 0.5
    return (1.0 + _cosine(va, vb)) / 2.0
