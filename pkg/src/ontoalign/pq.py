"""Product-quantization index for approximate nearest-neighbor scoring.

Vectors are split into ``m`` contiguous subspaces; each subspace gets its
own codebook of ``kc`` centroids learned by k-means, and every vector is
stored as ``m`` small centroid indices. Queries stay unquantized:
scoring builds one dot-product lookup table per subspace against the raw
query, then sums table entries along each stored code row (asymmetric
distance computation). Exact search over the shortlisted ids is the
caller's job when exact scores matter.

Everything is deterministic for a fixed seed: k-means++ seeding draws
from a generator keyed on (seed, subspace), Lloyd iterations are capped
at 25 or centroid movement below 1e-6, and empty clusters are refilled
with the point currently farthest from its assigned centroid.
"""

from __future__ import annotations

import logging
import os
import struct
from dataclasses import dataclass
from typing import List, Tuple, Union

import numpy as np

from .embedding import EmbeddingMatrix
from .model import Iri

logger = logging.getLogger(__name__)

_MAGIC = b"PQIX"
_VERSION = 1
#: codes are stored as u16, so codebooks cannot exceed this many centroids.
_MAX_CENTROIDS = 65535


class BadShape(Exception):
    def __init__(self, d: int, m: int) -> None:
        super().__init__(f"dimension {d} is not divisible by m={m} subspaces")
        self.d = d
        self.m = m


class TooFewVectors(Exception):
    def __init__(self, n: int, kc: int) -> None:
        super().__init__(f"need at least kc={kc} vectors, got {n}")
        self.n = n
        self.kc = kc


@dataclass(frozen=True, eq=False)
class PqIndex:
    m: int
    kc: int
    codebooks: np.ndarray  # m × kc × (d/m)
    codes: np.ndarray  # n × m, uint16
    keys: Tuple[Iri, ...]

    @property
    def d(self) -> int:
        return self.m * self.codebooks.shape[2]

    def __len__(self) -> int:
        return len(self.keys)


def _squared_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """All pairwise squared distances, points × centroids."""
    cross = points @ centroids.T
    p2 = np.sum(points**2, axis=1)[:, np.newaxis]
    c2 = np.sum(centroids**2, axis=1)[np.newaxis, :]
    return np.maximum(p2 - 2.0 * cross + c2, 0.0)


def _kmeans_pp_init(data: np.ndarray, kc: int, rng: np.random.Generator) -> np.ndarray:
    n = data.shape[0]
    centroids = np.empty((kc, data.shape[1]), dtype=np.float64)
    centroids[0] = data[int(rng.integers(n))]
    nearest = _squared_distances(data, centroids[:1])[:, 0]
    for c in range(1, kc):
        total = float(nearest.sum())
        if total > 0.0:
            pick = int(rng.choice(n, p=nearest / total))
        else:
            pick = int(rng.integers(n))
        centroids[c] = data[pick]
        nearest = np.minimum(nearest, _squared_distances(data, centroids[c : c + 1])[:, 0])
    return centroids


def _kmeans(
    data: np.ndarray, kc: int, rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray]:
    """Lloyd's algorithm; returns (centroids, assignment)."""
    centroids = _kmeans_pp_init(data, kc, rng)
    assignment = np.zeros(len(data), dtype=np.int64)
    for _ in range(25):
        distances = _squared_distances(data, centroids)
        assignment = np.argmin(distances, axis=1)
        moved = 0.0
        claimed: set = set()
        for c in range(kc):
            members = np.flatnonzero(assignment == c)
            if members.size:
                new = data[members].mean(axis=0)
            else:
                # Refill an empty cluster with the worst-served point not
                # already claimed by an earlier empty cluster this round.
                order = np.argsort(-distances[np.arange(len(data)), assignment], kind="stable")
                pick = next(int(i) for i in order if int(i) not in claimed)
                claimed.add(pick)
                new = data[pick]
            moved = max(moved, float(np.linalg.norm(new - centroids[c])))
            centroids[c] = new
        if moved < 1e-6:
            break
    distances = _squared_distances(data, centroids)
    return centroids, np.argmin(distances, axis=1)


def build_pq(vectors: EmbeddingMatrix, m: int, kc: int, seed: int) -> PqIndex:
    """Learn per-subspace codebooks on the matrix rows and encode them."""
    n, d = vectors.rows.shape
    if m < 1 or d % m != 0:
        raise BadShape(d, m)
    if kc < 1 or n < kc:
        raise TooFewVectors(n, kc)
    if kc > _MAX_CENTROIDS:
        raise ValueError(f"kc={kc} exceeds the u16 code limit {_MAX_CENTROIDS}")
    width = d // m
    codebooks = np.empty((m, kc, width), dtype=np.float64)
    codes = np.empty((n, m), dtype=np.uint16)
    for sub in range(m):
        rng = np.random.default_rng([seed, sub])
        block = vectors.rows[:, sub * width : (sub + 1) * width]
        centroids, assignment = _kmeans(np.ascontiguousarray(block), kc, rng)
        codebooks[sub] = centroids
        codes[:, sub] = assignment.astype(np.uint16)
    codebooks.setflags(write=False)
    codes.setflags(write=False)
    logger.debug("built PQ index: n=%d d=%d m=%d kc=%d", n, d, m, kc)
    return PqIndex(m=m, kc=kc, codebooks=codebooks, codes=codes, keys=vectors.row_keys)


def query_topk(index: PqIndex, query: np.ndarray, k: int) -> List[Tuple[Iri, float]]:
    """Approximate top-k dot products, descending, ties broken by key.

    One lookup table of centroid dot products per subspace is built from
    the raw query, then every stored row's score is the sum of its m
    table entries. k larger than the index size returns everything.
    """
    query = np.asarray(query, dtype=np.float64).reshape(-1)
    if query.shape[0] != index.d:
        raise ValueError(f"query has dimension {query.shape[0]}, index has {index.d}")
    if k < 1:
        raise ValueError("k must be >= 1")
    width = index.d // index.m
    tables = np.einsum(
        "mkw,mw->mk", index.codebooks, query.reshape(index.m, width)
    )
    scores = np.zeros(len(index.keys), dtype=np.float64)
    for sub in range(index.m):
        scores += tables[sub, index.codes[:, sub]]
    order = np.lexsort((np.array(index.keys), -scores))[: min(k, len(index.keys))]
    return [(index.keys[i], float(scores[i])) for i in order]


def save_pq(index: PqIndex, path: Union[str, os.PathLike]) -> None:
    """Write the index as one little-endian binary file (layout in
    docs/pq-index-format.md)."""
    n = len(index.keys)
    with open(path, "wb") as handle:
        handle.write(_MAGIC)
        handle.write(struct.pack("<H4I", _VERSION, index.m, index.kc, index.d, n))
        handle.write(np.ascontiguousarray(index.codebooks, dtype="<f8").tobytes())
        handle.write(np.ascontiguousarray(index.codes, dtype="<u2").tobytes())
        for key in index.keys:
            raw = key.encode("utf-8")
            handle.write(struct.pack("<I", len(raw)))
            handle.write(raw)


def load_pq(path: Union[str, os.PathLike]) -> PqIndex:
    with open(path, "rb") as handle:
        blob = handle.read()
    if blob[:4] != _MAGIC:
        raise ValueError(f"{path}: not a PQ index file (bad magic)")
    version, m, kc, d, n = struct.unpack_from("<H4I", blob, 4)
    if version != _VERSION:
        raise ValueError(f"{path}: unsupported index version {version}")
    if m < 1 or d % m != 0:
        raise ValueError(f"{path}: inconsistent header (d={d}, m={m})")
    width = d // m
    offset = 4 + struct.calcsize("<H4I")
    cb_bytes = m * kc * width * 8
    codebooks = np.frombuffer(blob, dtype="<f8", count=m * kc * width, offset=offset)
    codebooks = codebooks.reshape(m, kc, width).copy()
    offset += cb_bytes
    codes = np.frombuffer(blob, dtype="<u2", count=n * m, offset=offset)
    codes = codes.reshape(n, m).copy()
    offset += n * m * 2
    keys: List[Iri] = []
    for _ in range(n):
        (length,) = struct.unpack_from("<I", blob, offset)
        offset += 4
        keys.append(blob[offset : offset + length].decode("utf-8"))
        offset += length
    if offset != len(blob):
        raise ValueError(f"{path}: trailing bytes after key table")
    if codes.size and int(codes.max()) >= kc:
        raise ValueError(f"{path}: code value out of range for kc={kc}")
    codebooks.setflags(write=False)
    codes.setflags(write=False)
    return PqIndex(m=m, kc=kc, codebooks=codebooks, codes=codes, keys=tuple(keys))
