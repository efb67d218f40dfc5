import numpy as np
import pytest

from storyloom.errors import ConfigError
from storyloom.embeddings import (
    DimensionMismatchError,
    EmbeddingModel,
    EmptyCorpusError,
    TrainConfig,
    VectorFormatError,
    load_vectors,
    save_vectors,
    sentence_vector,
    similarity,
    tokenize,
    train_embeddings,
)

CORPUS = [
    "the stream ran cold over the stones",
    "cold water ran past the bank",
    "the tunnel was dark and narrow",
    "dust lay thick in the dark tunnel",
    "moss covered the damp cavern wall",
    "the cavern held a still black pool",
] * 4


def test_tokenize_lowercases_and_splits():
    assert tokenize("The QUICK, brown-fox! 42") == \
        ["the", "quick", "brown", "fox", "42"]
    assert tokenize("...") == []


def test_train_config_validation():
    with pytest.raises(ConfigError):
        TrainConfig(dim=1)
    with pytest.raises(ConfigError):
        TrainConfig(epochs=0)
    with pytest.raises(ConfigError):
        TrainConfig(learning_rate=0.0)


def test_model_rejects_bad_tokens():
    with pytest.raises(VectorFormatError):
        EmbeddingModel(2, {"Upper": np.zeros(2)})
    with pytest.raises(DimensionMismatchError):
        EmbeddingModel(2, {"ok": np.zeros(3)})


# --- training ----------------------------------------------------------------


def test_training_is_deterministic_per_seed(tmp_path):
    cfg = TrainConfig(dim=12, epochs=2, seed=9)
    a = train_embeddings(CORPUS, cfg)
    b = train_embeddings(CORPUS, cfg)
    pa, pb = tmp_path / "a.vec", tmp_path / "b.vec"
    save_vectors(a, str(pa))
    save_vectors(b, str(pb))
    assert pa.read_bytes() == pb.read_bytes()


def test_training_seed_changes_vectors():
    a = train_embeddings(CORPUS, TrainConfig(dim=12, epochs=2, seed=1))
    b = train_embeddings(CORPUS, TrainConfig(dim=12, epochs=2, seed=2))
    assert not np.allclose(a.vectors["stream"], b.vectors["stream"])


def test_min_count_prunes_rare_tokens():
    sentences = ["common words appear here"] * 5 + ["rarity shows once only"]
    model = train_embeddings(sentences, TrainConfig(dim=8, min_count=2))
    assert "common" in model
    assert "rarity" not in model


def test_empty_corpus_rejected():
    with pytest.raises(EmptyCorpusError):
        train_embeddings([], TrainConfig(dim=8))
    with pytest.raises(EmptyCorpusError):
        train_embeddings(["solo"], TrainConfig(dim=8))


# --- vector files ------------------------------------------------------------


def test_vector_file_round_trip(tmp_path):
    model = train_embeddings(CORPUS, TrainConfig(dim=10, epochs=1))
    path = tmp_path / "v.vec"
    save_vectors(model, str(path))
    again = load_vectors(str(path))
    assert again.dim == 10
    assert set(again.vectors) == set(model.vectors)
    for token in model.vectors:
        assert np.allclose(again.vectors[token], model.vectors[token],
                           atol=5e-7)


def test_load_rejects_bad_header(tmp_path):
    path = tmp_path / "v.vec"
    path.write_text("not a header\n")
    with pytest.raises(VectorFormatError) as exc:
        load_vectors(str(path))
    assert exc.value.line == 1


def test_load_rejects_component_count_mismatch(tmp_path):
    path = tmp_path / "v.vec"
    path.write_text("1 4\nword 0.1 0.2\n")
    with pytest.raises(DimensionMismatchError) as exc:
        load_vectors(str(path))
    assert exc.value.line == 2


def test_load_rejects_duplicate_token(tmp_path):
    path = tmp_path / "v.vec"
    path.write_text("2 2\nword 0.1 0.2\nWORD 0.3 0.4\n")
    with pytest.raises(VectorFormatError):
        load_vectors(str(path))


def test_load_rejects_count_mismatch(tmp_path):
    path = tmp_path / "v.vec"
    path.write_text("3 2\nword 0.1 0.2\n")
    with pytest.raises(VectorFormatError):
        load_vectors(str(path))


def test_load_reports_file_name(tmp_path):
    path = tmp_path / "broken.vec"
    path.write_text("nope\n")
    with pytest.raises(VectorFormatError) as exc:
        load_vectors(str(path))
    assert "broken.vec" in str(exc.value)


# --- pooling and similarity --------------------------------------------------


def unit_model():
    return EmbeddingModel(2, {
        "a": np.array([1.0, 0.0]),
        "b": np.array([0.0, 1.0]),
        "c": np.array([-1.0, 0.0]),
    })


def test_sentence_vector_is_token_mean():
    m = unit_model()
    assert np.allclose(sentence_vector(m, "a b"), [0.5, 0.5])
    assert np.allclose(sentence_vector(m, "a a b"), [2 / 3, 1 / 3])


def test_sentence_vector_ignores_out_of_vocab():
    m = unit_model()
    assert np.allclose(sentence_vector(m, "a zebra"), [1.0, 0.0])
    assert np.array_equal(sentence_vector(m, "zebra quagga"), [0.0, 0.0])


def test_token_order_never_changes_the_vector(fixed_model):
    rng = np.random.default_rng(4)
    tokens = sorted(fixed_model.vectors)
    for _ in range(200):
        picks = list(rng.choice(tokens, size=5, replace=True))
        shuffled = picks[:]
        rng.shuffle(shuffled)
        va = sentence_vector(fixed_model, " ".join(picks))
        vb = sentence_vector(fixed_model, " ".join(shuffled))
        assert np.array_equal(va, vb)


def test_similarity_range_and_symmetry(fixed_model):
    rng = np.random.default_rng(5)
    tokens = sorted(fixed_model.vectors)
    for _ in range(300):
        sa = " ".join(rng.choice(tokens, size=3))
        sb = " ".join(rng.choice(tokens, size=4))
        ab = similarity(fixed_model, sa, sb)
        assert 0.0 <= ab <= 1.0
        assert ab == similarity(fixed_model, sb, sa)


def test_self_similarity_is_exactly_one(fixed_model):
    assert similarity(fixed_model, "anchor basin", "anchor basin") == 1.0
    assert similarity(fixed_model, "basin anchor", "anchor basin") == 1.0


def test_opposite_vectors_score_zero():
    m = unit_model()
    assert similarity(m, "a", "c") == pytest.approx(0.0)


def test_orthogonal_vectors_score_half():
    m = unit_model()
    assert similarity(m, "a", "b") == pytest.approx(0.5)


def test_all_out_of_vocab_pair_scores_half():
    m = unit_model()
    assert similarity(m, "zebra", "quagga") == 0.5
    assert similarity(m, "zebra", "a") == 0.5
