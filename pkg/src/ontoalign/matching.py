"""Similarity computation and one-to-one correspondence extraction.

The matcher turns two unit-row embedding matrices into an alignment in
four stages: dense cosine matrix, mutual top-k candidate pruning,
optimal one-to-one assignment restricted to the candidates, then
threshold and type-compatibility filters. Candidate pruning runs before
assignment so the assignment problem stays sparse; thresholding runs
after assignment so the threshold judges the pair actually chosen, not a
pruned rival.

For inputs whose full matrix would be too large, an optional
approximate path builds product-quantization indexes over both sides,
shortlists neighbors per row, rescores the shortlists exactly, and feeds
the resulting sparse candidate set into the same downstream stages.
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .closure import InferredOntology
from .embedding import DimensionMismatch, EmbeddingMatrix
from .model import EntityKind, Iri
from .pq import build_pq, query_topk

logger = logging.getLogger(__name__)

#: Forbidden-cell score for the assignment solver. Scores are cosines in
#: [-1, 1], so any assignment using a forbidden cell loses to any
#: assignment of equal size that avoids one.
_FORBIDDEN = -1.0e6

#: Assignment totals closer than this count as tied. Sub-ulp differences
#: between float sums (e.g. 0.1+0.3 vs 0.2+0.2) are summation noise, not
#: signal, and the solver cannot order them reliably anyway.
_TIE_TOL = 1.0e-9

IndexPair = Tuple[int, int]


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    """Dense cosine scores with the IRI lists the axes refer to."""

    scores: np.ndarray
    source_keys: Tuple[Iri, ...]
    target_keys: Tuple[Iri, ...]

    def __post_init__(self) -> None:
        p, q = self.scores.shape
        if p != len(self.source_keys) or q != len(self.target_keys):
            raise ValueError("score matrix shape does not match key lists")
        if self.scores.size and float(np.max(np.abs(self.scores))) > 1.0 + 1e-6:
            raise ValueError("cosine scores must stay within [-1, 1] (+1e-6 slack)")


@dataclass(frozen=True)
class MatcherConfig:
    k: int = 5
    theta: float = 0.5
    enforce_types: bool = True
    enforce_one_to_one: bool = True
    #: When False, candidates are each source row's top-k alone, without
    #: requiring the target to reciprocate (ablation toggle).
    mutual: bool = True

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not -1.0 <= self.theta <= 1.0:
            raise ValueError("theta must lie in [-1, 1]")


@dataclass(frozen=True)
class AnnConfig:
    """Settings for the approximate candidate path.

    The approximate path activates only when p*q exceeds
    ``activation_cells``; below that the exact matrix is cheap enough.
    Shortlists hold ``oversample``-times more neighbors than the matcher
    keeps, leaving the final top-k to exact rescoring.
    """

    m: int = 8
    kc: int = 256
    seed: int = 0
    activation_cells: int = 4_000_000
    oversample: int = 4

    def __post_init__(self) -> None:
        if self.oversample < 1:
            raise ValueError("oversample must be >= 1")
        if self.activation_cells < 0:
            raise ValueError("activation_cells must be >= 0")


@dataclass(frozen=True)
class AlignmentCell:
    source: Iri
    target: Iri
    confidence: float
    relation: str = "="


@dataclass(frozen=True)
class AlignmentSet:
    cells: Tuple[AlignmentCell, ...]

    def pairs(self) -> Set[Tuple[Iri, Iri]]:
        return {(cell.source, cell.target) for cell in self.cells}

    def __len__(self) -> int:
        return len(self.cells)


def similarity_matrix(
    src: EmbeddingMatrix, tgt: EmbeddingMatrix, block_rows: int = 1024
) -> SimilarityMatrix:
    """All-pairs dot products of unit rows, computed in source-row blocks.

    The block partition is a parallelism/batching knob only: every row is
    computed by the same matrix-vector product whatever the block size,
    so results are bit-identical across partitions.
    """
    if src.d != tgt.d:
        raise DimensionMismatch(
            f"source dimension {src.d} != target dimension {tgt.d}"
        )
    if block_rows < 1:
        raise ValueError("block_rows must be >= 1")
    p = src.rows.shape[0]
    scores = np.empty((p, tgt.rows.shape[0]), dtype=np.float64)
    for start in range(0, p, block_rows):
        stop = min(start + block_rows, p)
        for offset in range(start, stop):
            scores[offset] = tgt.rows @ src.rows[offset]
    np.clip(scores, -1.0, 1.0, out=scores)
    scores.setflags(write=False)
    return SimilarityMatrix(
        scores=scores, source_keys=src.row_keys, target_keys=tgt.row_keys
    )


def mutual_topk(matrix: SimilarityMatrix, k: int) -> Set[IndexPair]:
    """Pairs where each side ranks the other within its k best.

    Ties at the k-th rank go to the smaller index, so the retained set is
    deterministic even on constant matrices.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    scores = matrix.scores
    p, q = scores.shape
    if p == 0 or q == 0:
        return set()
    k_row = min(k, q)
    k_col = min(k, p)
    # Stable sort on the negated scores keeps equal scores in index order.
    row_rank = np.argsort(-scores, axis=1, kind="stable")[:, :k_row]
    col_rank = np.argsort(-scores, axis=0, kind="stable")[:k_col, :]
    in_row_top = np.zeros((p, q), dtype=bool)
    in_row_top[np.arange(p)[:, np.newaxis], row_rank] = True
    in_col_top = np.zeros((p, q), dtype=bool)
    in_col_top[col_rank, np.arange(q)[np.newaxis, :]] = True
    return {(int(i), int(j)) for i, j in np.argwhere(in_row_top & in_col_top)}


def source_topk(matrix: SimilarityMatrix, k: int) -> Set[IndexPair]:
    """One-sided candidates: each source row's k best targets.

    Same ranking rules as :func:`mutual_topk` but without the reciprocity
    requirement; used when the mutual constraint is toggled off.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    scores = matrix.scores
    p, q = scores.shape
    if p == 0 or q == 0:
        return set()
    row_rank = np.argsort(-scores, axis=1, kind="stable")[:, : min(k, q)]
    return {(i, int(j)) for i in range(p) for j in row_rank[i]}


def _assignment_components(
    candidates: Set[IndexPair],
) -> List[List[IndexPair]]:
    """Split the candidate cells into connected components of the bipartite
    row/column graph; the assignment problem decomposes across them."""
    parent: Dict[Tuple[str, int], Tuple[str, int]] = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in candidates:
        a, b = find(("r", i)), find(("c", j))
        if a != b:
            parent[b] = a
    groups: Dict[Tuple[str, int], List[IndexPair]] = defaultdict(list)
    for i, j in candidates:
        groups[find(("r", i))].append((i, j))
    return [sorted(cells) for _, cells in sorted(groups.items())]


def _best_completion(
    scores: np.ndarray, cells: List[IndexPair]
) -> Tuple[int, List[IndexPair]]:
    """Maximum-cardinality, maximum-total assignment over the given cells.

    Uses the rectangular solver with forbidden-cell sentinels; sentinel
    pairs forced in by the solver are dropped afterwards, which is what
    leaves rows without viable candidates unmatched.
    """
    if not cells:
        return 0, []
    rows = sorted({i for i, _ in cells})
    cols = sorted({j for _, j in cells})
    row_pos = {r: a for a, r in enumerate(rows)}
    col_pos = {c: a for a, c in enumerate(cols)}
    sub = np.full((len(rows), len(cols)), _FORBIDDEN, dtype=np.float64)
    for i, j in cells:
        sub[row_pos[i], col_pos[j]] = scores[i, j]
    ri, ci = linear_sum_assignment(sub, maximize=True)
    kept = [
        (rows[a], cols[b]) for a, b in zip(ri, ci) if sub[a, b] != _FORBIDDEN
    ]
    return len(kept), kept


def _canonical_total(scores: np.ndarray, pairs: Sequence[IndexPair]) -> float:
    """Order-independent (correctly rounded) sum of pair scores, so equal
    totals compare equal regardless of summation order."""
    return math.fsum(float(scores[i, j]) for i, j in pairs)


def _lex_min_component(scores: np.ndarray, cells: List[IndexPair]) -> List[IndexPair]:
    """Lexicographically smallest pair set among the optimal assignments of
    one component; totals within ``_TIE_TOL`` of the optimum count as tied.

    Greedy over sorted candidate cells: a cell joins the solution when
    forcing it (and banning every smaller unused cell) still completes to
    the component's optimal cardinality and total. The scan never revisits
    a cell, so the whole refinement costs at most one reduced solve per
    candidate cell.
    """
    best_card, best_pairs = _best_completion(scores, cells)
    if best_card == 0:
        return []
    best_total = _canonical_total(scores, best_pairs)
    chosen: List[IndexPair] = []
    used_rows: Set[int] = set()
    used_cols: Set[int] = set()
    start = 0
    while len(chosen) < best_card:
        advanced = False
        for idx in range(start, len(cells)):
            i, j = cells[idx]
            if i in used_rows or j in used_cols:
                continue
            remainder = [
                (a, b)
                for a, b in cells[idx + 1 :]
                if a != i and b != j and a not in used_rows and b not in used_cols
            ]
            card, pairs = _best_completion(scores, remainder)
            if len(chosen) + 1 + card != best_card:
                continue
            total = _canonical_total(scores, chosen + [(i, j)] + pairs)
            if total >= best_total - _TIE_TOL:
                chosen.append((i, j))
                used_rows.add(i)
                used_cols.add(j)
                start = idx + 1
                advanced = True
                break
        if not advanced:
            raise RuntimeError("assignment tie refinement failed to converge")
    return chosen


def hungarian_assign(
    matrix: SimilarityMatrix, candidates: Set[IndexPair]
) -> Set[IndexPair]:
    """Optimal one-to-one matching restricted to the candidate cells.

    Maximizes matched-pair count first, then total score; among optima
    with (near-)equal totals the lexicographically smallest pair set
    wins, which pins down a unique answer on tied inputs. Candidate
    cells outside the matrix bounds are an error. Tie refinement probes
    one reduced solve per candidate cell, so callers at scale should
    prune candidates first (the align pipeline always does).
    """
    if not candidates:
        raise ValueError("candidates must be non-empty")
    p, q = matrix.scores.shape
    for i, j in candidates:
        if not (0 <= i < p and 0 <= j < q):
            raise ValueError(f"candidate ({i}, {j}) outside {p}x{q} matrix")
    result: Set[IndexPair] = set()
    for component in _assignment_components(candidates):
        result.update(_lex_min_component(matrix.scores, component))
    return result


def threshold_filter(
    pairs: Set[IndexPair], matrix: SimilarityMatrix, theta: float
) -> Set[IndexPair]:
    """Keep pairs scoring at or above theta (inclusive boundary)."""
    return {(i, j) for i, j in pairs if matrix.scores[i, j] >= theta}


_COMPATIBLE_EXEMPT = EntityKind.UNKNOWN


def type_filter(
    pairs: Set[IndexPair],
    matrix: SimilarityMatrix,
    src_inf: InferredOntology,
    tgt_inf: InferredOntology,
) -> Set[IndexPair]:
    """Drop pairs whose entity kinds conflict; Unknown matches anything."""
    kept = set()
    for i, j in pairs:
        src_kind = src_inf.base.entities[matrix.source_keys[i]].kind
        tgt_kind = tgt_inf.base.entities[matrix.target_keys[j]].kind
        if (
            src_kind == tgt_kind
            or src_kind is _COMPATIBLE_EXEMPT
            or tgt_kind is _COMPATIBLE_EXEMPT
        ):
            kept.add((i, j))
    return kept


def _exact_rescore_topk(
    query_rows: np.ndarray,
    other: EmbeddingMatrix,
    index,
    k: int,
    shortlist: int,
) -> List[List[int]]:
    key_pos = {key: pos for pos, key in enumerate(other.row_keys)}
    out: List[List[int]] = []
    for row in query_rows:
        ids = [key_pos[key] for key, _ in query_topk(index, row, shortlist)]
        exact = other.rows[ids] @ row
        order = np.lexsort((np.array(ids), -exact))[:k]
        out.append([ids[int(o)] for o in order])
    return out


def _ann_candidates(
    src: EmbeddingMatrix,
    tgt: EmbeddingMatrix,
    k: int,
    ann: AnnConfig,
    mutual: bool = True,
) -> Tuple[SimilarityMatrix, Set[IndexPair]]:
    """Top-k candidates via PQ shortlists with exact rescoring.

    The returned matrix is exact at every retained candidate cell and
    zero elsewhere; downstream stages only ever read candidate cells.
    """
    shortlist = max(k * ann.oversample, k)
    tgt_index = build_pq(tgt, ann.m, ann.kc, ann.seed)
    row_top = _exact_rescore_topk(src.rows, tgt, tgt_index, k, min(shortlist, len(tgt.row_keys)))
    if mutual:
        src_index = build_pq(src, ann.m, ann.kc, ann.seed)
        col_top = _exact_rescore_topk(tgt.rows, src, src_index, k, min(shortlist, len(src.row_keys)))
        col_sets = [set(ids) for ids in col_top]
        retained = {
            (i, j)
            for i, ids in enumerate(row_top)
            for j in ids
            if i in col_sets[j]
        }
    else:
        retained = {(i, j) for i, ids in enumerate(row_top) for j in ids}
    scores = np.zeros((src.rows.shape[0], tgt.rows.shape[0]), dtype=np.float64)
    for i, j in retained:
        scores[i, j] = min(1.0, max(-1.0, float(np.dot(src.rows[i], tgt.rows[j]))))
    scores.setflags(write=False)
    matrix = SimilarityMatrix(
        scores=scores, source_keys=src.row_keys, target_keys=tgt.row_keys
    )
    return matrix, retained


def align_scored(
    src_emb: EmbeddingMatrix,
    tgt_emb: EmbeddingMatrix,
    src_inf: InferredOntology,
    tgt_inf: InferredOntology,
    config: MatcherConfig = MatcherConfig(),
    ann: Optional[AnnConfig] = None,
) -> Tuple[AlignmentSet, SimilarityMatrix]:
    """Like :func:`align` but also returns the similarity matrix, which
    ranked evaluation reads directly."""
    p, q = src_emb.rows.shape[0], tgt_emb.rows.shape[0]
    if ann is not None and p * q > ann.activation_cells:
        logger.info("approximate candidate path active (%d cells)", p * q)
        matrix, pairs = _ann_candidates(src_emb, tgt_emb, config.k, ann, config.mutual)
    else:
        matrix = similarity_matrix(src_emb, tgt_emb)
        pairs = (
            mutual_topk(matrix, config.k)
            if config.mutual
            else source_topk(matrix, config.k)
        )
    if config.enforce_one_to_one and pairs:
        pairs = hungarian_assign(matrix, pairs)
    pairs = threshold_filter(pairs, matrix, config.theta)
    if config.enforce_types:
        pairs = type_filter(pairs, matrix, src_inf, tgt_inf)
    cells = tuple(
        sorted(
            (
                AlignmentCell(
                    source=matrix.source_keys[i],
                    target=matrix.target_keys[j],
                    confidence=min(1.0, max(0.0, float(matrix.scores[i, j]))),
                )
                for i, j in pairs
            ),
            key=lambda cell: (cell.source, cell.target),
        )
    )
    return AlignmentSet(cells=cells), matrix


def align(
    src_emb: EmbeddingMatrix,
    tgt_emb: EmbeddingMatrix,
    src_inf: InferredOntology,
    tgt_inf: InferredOntology,
    config: MatcherConfig = MatcherConfig(),
    ann: Optional[AnnConfig] = None,
) -> AlignmentSet:
    """Full matcher pipeline: candidates, assignment, threshold, types.

    Cells come out sorted by (source IRI, target IRI) with confidences
    clamped to [0, 1], so identical inputs yield identical output
    regardless of execution details.
    """
    return align_scored(src_emb, tgt_emb, src_inf, tgt_inf, config, ann)[0]
