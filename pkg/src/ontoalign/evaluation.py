"""Scoring alignments against gold standards and running ablation sweeps.

Two metric families live here. Set metrics (precision, recall, F1) are
computed on the final thresholded alignment; ranked metrics (precision
at 1, mean reciprocal rank) are computed on the raw similarity matrix,
before any pruning. The split keeps both families well defined: a
thresholded set has no ranking, and a raw matrix has no decision
boundary.

Ablation arms rerun the whole pipeline with exactly one stage toggled
off, holding every other input fixed, and report one metrics row per
arm.
"""

from __future__ import annotations

import io
import json
import logging
import os
from dataclasses import dataclass, replace
from enum import Enum
from typing import BinaryIO, FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .matching import AlignmentSet, SimilarityMatrix
from .model import Iri
from .oaei import MalformedAlignment, read_alignment_tsv, read_alignment_xml
from .pipeline import ABLATION_ARMS, PipelineConfig, apply_arm, run_pipeline

logger = logging.getLogger(__name__)

__all__ = [
    "ABLATION_ARMS",
    "EmptyGold",
    "EvaluationError",
    "GoldAlignment",
    "GoldFormat",
    "MalformedAlignment",
    "Metrics",
    "MissingEntity",
    "UnknownArm",
    "ablation_jsonl",
    "check_arms",
    "format_metrics_table",
    "load_gold",
    "run_ablation",
    "score",
    "score_ranked",
    "set_metrics",
    "with_ranked",
]


class EvaluationError(Exception):
    """Base class for scoring failures."""


class EmptyGold(EvaluationError):
    """Scoring was asked for against a gold standard with no pairs."""


class MissingEntity(EvaluationError):
    """A gold IRI does not appear in the similarity matrix."""

    def __init__(self, iri: Iri) -> None:
        super().__init__(f"gold entity not present in the matrix: {iri}")
        self.iri = iri


class UnknownArm(EvaluationError):
    """An ablation arm name outside the supported set."""

    def __init__(self, name: str) -> None:
        supported = ", ".join(ABLATION_ARMS)
        super().__init__(f"unknown ablation arm {name!r} (supported: {supported})")
        self.name = name


class GoldFormat(Enum):
    ALIGNMENT_XML = "alignment-xml"
    TSV = "tsv"


@dataclass(frozen=True)
class GoldAlignment:
    """Reference equivalences; the relation is always "="."""

    pairs: FrozenSet[Tuple[Iri, Iri]]
    relation: str = "="

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class Metrics:
    """One row of evaluation results.

    ``counts`` is (true positives, false positives, false negatives).
    Ranked fields default to 0 and are filled by :func:`score_ranked`
    when a similarity matrix is available.
    """

    precision: float
    recall: float
    f1: float
    precision_at_1: float = 0.0
    mrr: float = 0.0
    counts: Tuple[int, int, int] = (0, 0, 0)

    def __post_init__(self) -> None:
        for name in ("precision", "recall", "f1", "precision_at_1", "mrr"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        p, r = self.precision, self.recall
        expected = 2.0 * p * r / (p + r) if p + r > 0 else 0.0
        if abs(self.f1 - expected) > 1e-9:
            raise ValueError("f1 must equal 2PR/(P+R)")
        if self.precision_at_1 > self.mrr + 1e-9:
            raise ValueError("precision_at_1 cannot exceed mrr")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be non-negative")


def set_metrics(tp: int, fp: int, fn: int) -> Metrics:
    """Build set metrics from raw counts, with empty precision = 0."""
    predicted = tp + fp
    gold = tp + fn
    precision = tp / predicted if predicted else 0.0
    recall = tp / gold if gold else 0.0
    f1 = 2.0 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return Metrics(precision=precision, recall=recall, f1=f1, counts=(tp, fp, fn))


GoldSource = Union[str, os.PathLike, bytes, BinaryIO]


def _as_bytes(source: GoldSource) -> bytes:
    if isinstance(source, bytes):
        return source
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as handle:
            return handle.read()
    if isinstance(source, io.IOBase) or hasattr(source, "read"):
        return source.read()
    raise TypeError(f"unsupported gold source type: {type(source).__name__}")


def load_gold(source: GoldSource, format: GoldFormat) -> GoldAlignment:
    """Read a gold alignment from a path, bytes, or binary stream.

    Keeps equivalence pairs only; see the format readers for the exact
    skip and deduplication rules. Raises MalformedAlignment on
    uninterpretable input.
    """
    data = _as_bytes(source)
    if format is GoldFormat.ALIGNMENT_XML:
        pairs = read_alignment_xml(data)
    else:
        pairs = read_alignment_tsv(data)
    return GoldAlignment(pairs=frozenset(pairs))


def score(predicted: AlignmentSet, gold: GoldAlignment) -> Metrics:
    """Set-based precision, recall, and F1 of an alignment.

    Precision of an empty prediction is 0 by definition, keeping
    parameter sweeps total. Raises EmptyGold when the gold standard has
    no pairs.
    """
    if not gold.pairs:
        raise EmptyGold("gold alignment has no pairs")
    predicted_pairs = predicted.pairs()
    tp = len(predicted_pairs & gold.pairs)
    return set_metrics(tp, len(predicted_pairs) - tp, len(gold.pairs) - tp)


def score_ranked(matrix: SimilarityMatrix, gold: GoldAlignment) -> Tuple[float, float]:
    """Precision at 1 and mean reciprocal rank over the raw matrix.

    For each gold pair the target's 1-based rank within the source's
    row is found, scores descending with ties broken by target IRI.
    Both IRIs of every gold pair must be present in the matrix; raises
    MissingEntity otherwise and EmptyGold for an empty gold standard.
    """
    if not gold.pairs:
        raise EmptyGold("gold alignment has no pairs")
    source_pos = {key: i for i, key in enumerate(matrix.source_keys)}
    target_pos = {key: j for j, key in enumerate(matrix.target_keys)}
    target_array = np.array(matrix.target_keys)
    hits = 0
    reciprocal_sum = 0.0
    for src, tgt in sorted(gold.pairs):
        if src not in source_pos:
            raise MissingEntity(src)
        if tgt not in target_pos:
            raise MissingEntity(tgt)
        row = matrix.scores[source_pos[src]]
        order = np.lexsort((target_array, -row))
        rank = int(np.nonzero(order == target_pos[tgt])[0][0]) + 1
        if rank == 1:
            hits += 1
        reciprocal_sum += 1.0 / rank
    n = len(gold.pairs)
    return hits / n, reciprocal_sum / n


def check_arms(arms: Sequence[str]) -> Tuple[str, ...]:
    """Validate ablation arm names before any pipeline work starts."""
    for name in arms:
        if name not in ABLATION_ARMS:
            raise UnknownArm(name)
    return tuple(arms)


def run_ablation(
    config: PipelineConfig, arms: Sequence[str], gold: GoldAlignment
) -> List[Tuple[str, Metrics]]:
    """Run the pipeline once per arm and score each result.

    All arm names are validated up front, so a typo fails before any
    expensive work. Every arm sees identical inputs; only the toggled
    stage differs. Rows come back in the order the arms were given,
    with ranked metrics filled in from each arm's raw matrix.
    """
    validated = check_arms(arms)
    rows: List[Tuple[str, Metrics]] = []
    for arm in validated:
        result = run_pipeline(apply_arm(config, arm))
        metrics = score(result.alignment, gold)
        if result.matrix.scores.size:
            try:
                p1, mrr = score_ranked(result.matrix, gold)
                metrics = with_ranked(metrics, p1, mrr)
            except MissingEntity as exc:
                logger.warning("ranked metrics skipped for %s: %s", arm, exc)
        rows.append((arm, metrics))
    return rows


def with_ranked(metrics: Metrics, precision_at_1: float, mrr: float) -> Metrics:
    """Merge ranked results into a set-metrics row."""
    return replace(metrics, precision_at_1=precision_at_1, mrr=mrr)


def ablation_jsonl(rows: Sequence[Tuple[str, Metrics]]) -> str:
    """One JSON object per arm, machine-readable, newline-delimited."""
    records = []
    for arm, m in rows:
        records.append(
            json.dumps(
                {
                    "arm": arm,
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "precision_at_1": m.precision_at_1,
                    "mrr": m.mrr,
                    "true_pos": m.counts[0],
                    "false_pos": m.counts[1],
                    "false_neg": m.counts[2],
                },
                sort_keys=True,
            )
        )
    return "\n".join(records) + "\n"


def format_metrics_table(rows: Sequence[Tuple[str, Metrics]]) -> str:
    """Fixed-width human-readable table of metric rows."""
    header = f"{'arm':<22} {'P':>7} {'R':>7} {'F1':>7} {'P@1':>7} {'MRR':>7}"
    lines = [header, "-" * len(header)]
    for arm, m in rows:
        lines.append(
            f"{arm:<22} {m.precision:>7.4f} {m.recall:>7.4f} {m.f1:>7.4f} "
            f"{m.precision_at_1:>7.4f} {m.mrr:>7.4f}"
        )
    return "\n".join(lines)
