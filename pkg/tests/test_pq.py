import numpy as np
import pytest

from ontoalign.embedding import EmbeddingMatrix
from ontoalign.pq import (
    BadShape,
    TooFewVectors,
    build_pq,
    load_pq,
    query_topk,
    save_pq,
)


def matrix_from(rows, prefix="http://v/"):
    rows = np.asarray(rows, dtype=np.float64)
    rows = rows / np.linalg.norm(rows, axis=1, keepdims=True)
    return EmbeddingMatrix(
        rows=rows,
        d=rows.shape[1],
        provider_id="fixture",
        row_keys=tuple(f"{prefix}{i:04d}" for i in range(rows.shape[0])),
    )


def clustered_matrix(n=500, d=64, clusters=50, noise=0.05, seed=13):
    rng = np.random.default_rng(seed)
    centers = rng.normal(size=(clusters, d))
    assignment = np.arange(n) % clusters
    rows = centers[assignment] + noise * rng.normal(size=(n, d))
    return matrix_from(rows), assignment


def exact_topk(vectors, query, k):
    scores = vectors.rows @ query
    order = np.lexsort((np.array(vectors.row_keys), -scores))[:k]
    return [vectors.row_keys[i] for i in order]


class TestBuild:
    def test_shape_divisibility(self):
        vectors = matrix_from(np.eye(8))
        with pytest.raises(BadShape):
            build_pq(vectors, m=3, kc=2, seed=0)

    def test_too_few_vectors(self):
        vectors = matrix_from(np.eye(4)[:3])
        with pytest.raises(TooFewVectors):
            build_pq(vectors, m=1, kc=4, seed=0)

    def test_centroid_count_limit(self):
        rows = np.ones((65536, 8))
        vectors = EmbeddingMatrix(
            rows=rows, d=8, provider_id="x",
            row_keys=tuple(f"http://v/{i}" for i in range(65536)),
        )
        with pytest.raises(ValueError, match="u16"):
            build_pq(vectors, m=1, kc=65536, seed=0)

    def test_determinism(self):
        vectors, _ = clustered_matrix(n=80, d=16, clusters=5)
        a = build_pq(vectors, m=4, kc=8, seed=42)
        b = build_pq(vectors, m=4, kc=8, seed=42)
        assert np.array_equal(a.codebooks, b.codebooks)
        assert np.array_equal(a.codes, b.codes)

    def test_two_tight_clusters_partition(self):
        rows = np.array(
            [[10.0, 0.1], [10.0, -0.1], [-10.0, 0.1], [-10.0, -0.1]]
        )
        vectors = matrix_from(rows)
        index = build_pq(vectors, m=1, kc=2, seed=0)
        codes = index.codes[:, 0]
        assert codes[0] == codes[1]
        assert codes[2] == codes[3]
        assert codes[0] != codes[2]

    def test_identity_codebook_when_kc_equals_n(self):
        vectors, _ = clustered_matrix(n=12, d=8, clusters=12, noise=0.0, seed=3)
        index = build_pq(vectors, m=1, kc=12, seed=0)
        reconstructed = index.codebooks[0][index.codes[:, 0]]
        assert np.allclose(reconstructed, vectors.rows, atol=1e-12)


class TestQuery:
    def test_exact_when_kc_equals_n(self):
        vectors, _ = clustered_matrix(n=40, d=16, clusters=8, seed=5)
        index = build_pq(vectors, m=1, kc=40, seed=0)
        rng = np.random.default_rng(6)
        for _ in range(100):
            query = rng.normal(size=16)
            query /= np.linalg.norm(query)
            approx = [key for key, _ in query_topk(index, query, 10)]
            assert approx == exact_topk(vectors, query, 10)

    def test_saturation_returns_everything(self):
        vectors, _ = clustered_matrix(n=20, d=16, clusters=4)
        index = build_pq(vectors, m=2, kc=4, seed=0)
        out = query_topk(index, vectors.rows[0], 50)
        assert len(out) == 20
        assert sorted(key for key, _ in out) == sorted(vectors.row_keys)

    def test_scores_descend_with_key_tiebreak(self):
        vectors, _ = clustered_matrix(n=30, d=16, clusters=3)
        index = build_pq(vectors, m=2, kc=3, seed=0)
        out = query_topk(index, vectors.rows[4], 30)
        for (key_a, score_a), (key_b, score_b) in zip(out, out[1:]):
            assert score_a > score_b or (score_a == score_b and key_a < key_b)

    def test_wrong_query_dimension(self):
        vectors, _ = clustered_matrix(n=20, d=16, clusters=4)
        index = build_pq(vectors, m=2, kc=4, seed=0)
        with pytest.raises(ValueError):
            query_topk(index, np.ones(8), 3)

    def test_recall_at_10_on_clustered_data(self):
        vectors, _ = clustered_matrix()
        index = build_pq(vectors, m=8, kc=16, seed=99)
        rng = np.random.default_rng(7)
        recalls = []
        for _ in range(50):
            query = vectors.rows[int(rng.integers(len(vectors.row_keys)))]
            query = query + 0.02 * rng.normal(size=query.shape)
            query /= np.linalg.norm(query)
            exact = set(exact_topk(vectors, query, 10))
            approx = {key for key, _ in query_topk(index, query, 10)}
            recalls.append(len(exact & approx) / 10)
        assert float(np.mean(recalls)) >= 0.9

    def test_mean_error_shrinks_with_more_centroids(self):
        vectors, _ = clustered_matrix(n=200, d=32, clusters=10, seed=21)
        rng = np.random.default_rng(22)
        queries = rng.normal(size=(20, 32))
        queries /= np.linalg.norm(queries, axis=1, keepdims=True)
        errors = []
        for kc in (4, 8, 16, 32):
            index = build_pq(vectors, m=4, kc=kc, seed=50)
            diffs = []
            for query in queries:
                exact = dict(zip(vectors.row_keys, vectors.rows @ query))
                for key, approx in query_topk(index, query, len(vectors.row_keys)):
                    diffs.append(abs(approx - exact[key]))
            errors.append(float(np.mean(diffs)))
        assert all(a >= b - 1e-12 for a, b in zip(errors, errors[1:]))


class TestPersistence:
    def test_round_trip(self, tmp_path):
        vectors, _ = clustered_matrix(n=60, d=16, clusters=6)
        index = build_pq(vectors, m=4, kc=8, seed=1)
        path = tmp_path / "index.pqx"
        save_pq(index, path)
        loaded = load_pq(path)
        assert loaded.m == index.m and loaded.kc == index.kc
        assert loaded.keys == index.keys
        assert np.array_equal(loaded.codebooks, index.codebooks)
        assert np.array_equal(loaded.codes, index.codes)
        query = vectors.rows[3]
        assert query_topk(loaded, query, 5) == query_topk(index, query, 5)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "index.pqx"
        path.write_bytes(b"NOPE" + b"\x00" * 30)
        with pytest.raises(ValueError, match="magic"):
            load_pq(path)

    def test_truncated_file(self, tmp_path):
        vectors, _ = clustered_matrix(n=20, d=16, clusters=4)
        index = build_pq(vectors, m=2, kc=4, seed=1)
        path = tmp_path / "index.pqx"
        save_pq(index, path)
        path.write_bytes(path.read_bytes()[:-7])
        with pytest.raises(ValueError):
            load_pq(path)

    def test_unsupported_version(self, tmp_path):
        vectors, _ = clustered_matrix(n=20, d=16, clusters=4)
        index = build_pq(vectors, m=2, kc=4, seed=1)
        path = tmp_path / "index.pqx"
        save_pq(index, path)
        blob = bytearray(path.read_bytes())
        blob[4] = 99
        path.write_bytes(bytes(blob))
        with pytest.raises(ValueError, match="version"):
            load_pq(path)
