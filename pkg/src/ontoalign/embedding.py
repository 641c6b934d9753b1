"""Pluggable text-embedding providers producing unit-normalized matrices.

No neural model ever runs in-process. Three providers cover every use:

* ``HASH_TEST``: deterministic hashed character 3-grams, platform
  independent, good enough for end-to-end tests because cognates share
  trigram mass across related languages.
* ``FILE_VECTORS``: precomputed vectors loaded from a plain text file
  (header ``dim=<d>``, then one ``<IRI> <f1> <f2> ...`` record per line).
* ``REMOTE_SERVICE``: HTTP client for an embedding service speaking the
  wire protocol documented in docs/embedding-protocol.md: POST /embed
  with ``{"texts": [...]}`` returning ``{"dim": d, "vectors": [...]}``
  in request order.

Whatever the provider returns is L2-normalized here, so downstream dot
products are cosines.
"""

from __future__ import annotations

import hashlib
import logging
import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import requests

from .model import Iri

logger = logging.getLogger(__name__)


class EmbeddingError(Exception):
    """Base class for everything this module raises on bad data or I/O."""


class MissingVector(EmbeddingError):
    def __init__(self, iri: Iri) -> None:
        super().__init__(f"no vector for {iri}")
        self.iri = iri


class ZeroVector(EmbeddingError):
    def __init__(self, row_index: int) -> None:
        super().__init__(f"row {row_index} has zero norm and cannot be normalized")
        self.row_index = row_index


class DimensionMismatch(EmbeddingError):
    pass


class ServiceError(EmbeddingError):
    """Non-success response from the remote service; status 0 means the
    request failed before any HTTP status was received."""

    def __init__(self, status: int, body: str) -> None:
        super().__init__(f"embedding service error (status {status}): {body}")
        self.status = status
        self.body = body


class ServiceTimeout(EmbeddingError):
    pass


class ProviderKind(Enum):
    HASH_TEST = "hash"
    FILE_VECTORS = "file"
    REMOTE_SERVICE = "remote"


@dataclass(frozen=True)
class ProviderConfig:
    kind: ProviderKind
    dimension: int = 256
    seed: int = 0
    path: Optional[Union[str, os.PathLike]] = None
    endpoint: Optional[str] = None
    batch_size: int = 32
    timeout: float = 30.0
    max_in_flight: int = 4

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.kind is ProviderKind.HASH_TEST and self.dimension < 8:
            raise ValueError("hash provider needs dimension >= 8")
        if self.kind is ProviderKind.FILE_VECTORS and self.path is None:
            raise ValueError("file provider needs a path")
        if self.kind is ProviderKind.REMOTE_SERVICE and not self.endpoint:
            raise ValueError("remote provider needs an endpoint URL")


@dataclass(frozen=True, eq=False)
class EmbeddingMatrix:
    """One unit-norm row per input text, rows keyed by ``row_keys``."""

    rows: np.ndarray
    d: int
    provider_id: str
    row_keys: Tuple[Iri, ...]


def normalize_rows(matrix: np.ndarray) -> np.ndarray:
    """Divide every row by its Euclidean norm. Zero rows are a hard error
    because a zero vector has no direction to compare."""
    rows = np.asarray(matrix, dtype=np.float64)
    norms = np.linalg.norm(rows, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ZeroVector(int(zero[0]))
    return rows / norms[:, np.newaxis]


def _collapse(text: str) -> str:
    return " ".join(text.lower().split())


def _hash_rows(texts: Sequence[str], dimension: int, seed: int) -> np.ndarray:
    """Accumulate SHA-256-hashed character 3-grams into count vectors.

    SHA-256 (rather than Python's salted ``hash``) keeps the mapping
    identical across processes, platforms, and the companion service's
    JavaScript implementation.
    """
    seed_bytes = struct.pack(">q", seed)
    rows = np.zeros((len(texts), dimension), dtype=np.float64)
    for row, text in enumerate(texts):
        collapsed = _collapse(text)
        if len(collapsed) >= 3:
            grams = [collapsed[i : i + 3] for i in range(len(collapsed) - 2)]
        else:
            grams = [collapsed]
        for gram in grams:
            digest = hashlib.sha256(seed_bytes + gram.encode("utf-8")).digest()
            rows[row, int.from_bytes(digest[:8], "big") % dimension] += 1.0
    return rows


def load_vector_file(path: Union[str, os.PathLike]) -> Tuple[int, Dict[Iri, np.ndarray]]:
    """Parse a precomputed-vector file into (dimension, IRI -> raw row)."""
    with open(path, encoding="utf-8") as handle:
        header = handle.readline().strip()
        if not header.startswith("dim=") or not header[4:].isdigit():
            raise ValueError(f"{path}:1: expected header 'dim=<d>', got {header!r}")
        dimension = int(header[4:])
        if dimension < 1:
            raise ValueError(f"{path}:1: dimension must be positive")
        table: Dict[Iri, np.ndarray] = {}
        for lineno, raw in enumerate(handle, 2):
            line = raw.strip()
            if not line:
                continue
            fields = line.split()
            if len(fields) != dimension + 1:
                raise ValueError(
                    f"{path}:{lineno}: expected IRI + {dimension} floats, "
                    f"got {len(fields)} fields"
                )
            try:
                table[fields[0]] = np.array([float(f) for f in fields[1:]])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return dimension, table


def _file_rows(iris: Sequence[Iri], config: ProviderConfig) -> np.ndarray:
    dimension, table = load_vector_file(config.path)
    rows = np.empty((len(iris), dimension), dtype=np.float64)
    for row, iri in enumerate(iris):
        if iri not in table:
            raise MissingVector(iri)
        rows[row] = table[iri]
    return rows


def _post_batch(url: str, batch: Sequence[str], config: ProviderConfig) -> Tuple[int, List[List[float]]]:
    try:
        response = requests.post(url, json={"texts": list(batch)}, timeout=config.timeout)
    except requests.Timeout as exc:
        raise ServiceTimeout(f"no response from {url} within {config.timeout}s") from exc
    except requests.RequestException as exc:
        raise ServiceError(0, str(exc)) from exc
    if response.status_code != 200:
        try:
            message = response.json().get("error", response.text)
        except ValueError:
            message = response.text[:500]
        raise ServiceError(response.status_code, message)
    try:
        body = response.json()
        dimension = int(body["dim"])
        vectors = body["vectors"]
    except (ValueError, KeyError, TypeError) as exc:
        raise ServiceError(200, f"malformed response body: {exc}") from exc
    if len(vectors) != len(batch):
        raise ServiceError(
            200, f"sent {len(batch)} texts, received {len(vectors)} vectors"
        )
    if any(len(vector) != dimension for vector in vectors):
        raise DimensionMismatch(f"service returned rows not matching dim={dimension}")
    return dimension, vectors


def _remote_rows(texts: Sequence[str], config: ProviderConfig) -> np.ndarray:
    url = config.endpoint.rstrip("/") + "/embed"
    batches = [
        texts[start : start + config.batch_size]
        for start in range(0, len(texts), config.batch_size)
    ]
    logger.debug(
        "embedding %d texts in %d batch(es) via %s", len(texts), len(batches), url
    )
    # map() preserves order, so reassembly is positional; the worker count
    # caps how many requests are in flight at once.
    with ThreadPoolExecutor(max_workers=config.max_in_flight) as pool:
        results = list(pool.map(lambda b: _post_batch(url, b, config), batches))
    dimensions = {dimension for dimension, _ in results}
    if len(dimensions) != 1:
        raise DimensionMismatch(
            f"service returned inconsistent dimensions across batches: {sorted(dimensions)}"
        )
    return np.array(
        [vector for _, vectors in results for vector in vectors], dtype=np.float64
    )


def _provider_id(config: ProviderConfig) -> str:
    if config.kind is ProviderKind.HASH_TEST:
        return f"hash-3gram-d{config.dimension}-seed{config.seed}"
    if config.kind is ProviderKind.FILE_VECTORS:
        return f"file:{config.path}"
    return f"remote:{config.endpoint}"


def embed_batch(
    texts: Sequence[Tuple[Iri, str]], config: ProviderConfig
) -> EmbeddingMatrix:
    """Embed `(IRI, text)` pairs into one matrix, one unit row per input.

    Ordering is positional: row i belongs to texts[i] no matter how the
    provider batches or parallelizes underneath.
    """
    if not texts:
        raise ValueError("texts must be non-empty")
    if any(not text for _, text in texts):
        raise ValueError("every text must be non-empty")
    iris = tuple(iri for iri, _ in texts)
    strings = [text for _, text in texts]

    if config.kind is ProviderKind.HASH_TEST:
        raw = _hash_rows(strings, config.dimension, config.seed)
    elif config.kind is ProviderKind.FILE_VECTORS:
        raw = _file_rows(iris, config)
    else:
        raw = _remote_rows(strings, config)

    rows = normalize_rows(raw)
    rows.setflags(write=False)
    return EmbeddingMatrix(
        rows=rows, d=rows.shape[1], provider_id=_provider_id(config), row_keys=iris
    )
