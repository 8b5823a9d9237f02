"""Windowed distributional model: sparse lemma x lemma counts, PPMI/logDice
weighting, cosine neighborhoods and semantic field graphs.

Lemmas with similar context distributions get similar rows, so the k nearest
rows of a target approximate its semantic field. Diagonal (self) cooccurrence
is excluded: a lemma repeated near itself would otherwise dominate its own
field.
"""

from __future__ import annotations

import difflib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy import sparse

from . import chrono
from ._kernels import window_pair_ids
from .corpus import Corpus, CorpusError, Document, indexed_positions

DEFAULT_K = 30


class VocabularyError(CorpusError):
    """Target lemma missing from the model vocabulary; carries suggestions."""

    def __init__(self, lemma: str, suggestions: list[str]):
        self.lemma = lemma
        self.suggestions = suggestions
        hint = f"; similar: {', '.join(suggestions)}" if suggestions else ""
        super().__init__(f"lemma {lemma!r} not in vocabulary{hint}")


@dataclass(frozen=True)
class DsmConfig:
    window: int = 5
    min_freq: int = 10
    weighting: str = "ppmi"
    k: int = DEFAULT_K
    edge_threshold: float = 0.5

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.min_freq < 1:
            raise ValueError("min_freq must be >= 1")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not 0.0 <= self.edge_threshold <= 1.0:
            raise ValueError("edge_threshold must be in [0, 1]")
        if self.weighting not in ("raw", "ppmi", "logdice"):
            raise ValueError(f"unknown weighting {self.weighting!r}")


@dataclass(frozen=True)
class FieldGraph:
    target: str
    nodes: tuple[tuple[str, float], ...]
    edges: tuple[tuple[str, str, float], ...]


@dataclass(frozen=True)
class FieldOverlap:
    shared: tuple[str, ...]
    a_has_b: bool
    b_has_a: bool

    @property
    def count(self) -> int:
        return len(self.shared)


@dataclass
class DsmMatrix:
    vocabulary: tuple[str, ...]
    counts: sparse.csr_matrix
    weights: sparse.csr_matrix
    corpus_fingerprint: str
    config: DsmConfig
    subset_years: tuple[int, int] | None = None
    frequencies: dict[str, int] = field(default_factory=dict)
    _vid: dict[str, int] = field(default_factory=dict, repr=False)
    _norms: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self._vid:
            self._vid = {lemma: i for i, lemma in enumerate(self.vocabulary)}

    def vid(self, lemma: str) -> int:
        try:
            return self._vid[lemma]
        except KeyError:
            candidates = difflib.get_close_matches(lemma, self.vocabulary, n=5, cutoff=0.6)
            candidates.sort(key=lambda c: (-self.frequencies.get(c, 0), c))
            raise VocabularyError(lemma, candidates) from None

    def row_norms(self) -> np.ndarray:
        if self._norms is None:
            sq = self.weights.multiply(self.weights).sum(axis=1)
            self._norms = np.sqrt(np.asarray(sq).ravel())
        return self._norms


def _subset_documents(
    corpus: Corpus,
    years: tuple[int, int] | None,
    policy: str,
    max_span: int,
) -> list[Document]:
    if years is None:
        return list(corpus.documents)
    docs = []
    for doc in corpus.documents:
        if not doc.date.is_dated:
            continue
        assignment = chrono.assign_year(doc, policy, max_span)
        if assignment is not None and years[0] <= assignment.year <= years[1]:
            docs.append(doc)
    return docs


def dsm_build(
    corpus: Corpus,
    config: DsmConfig = DsmConfig(),
    *,
    years: tuple[int, int] | None = None,
    policy: str = "midpoint",
    max_span: int = chrono.DEFAULT_MAX_SPAN,
    skip_punctuation: bool = True,
    extra_skip: Iterable[str] = (),
    threads: int = 1,
) -> DsmMatrix:
    """Build the cooccurrence model over a corpus subset.

    ``years`` restricts the model to documents whose assigned year falls in
    the closed range (the same dating rules the chronological slicer uses).
    The vocabulary keeps lemmas with subset frequency >= min_freq, sorted
    lexicographically; counts[i, j] is the number of occurrence pairs of
    lemma_i and lemma_j within the window.
    """
    extra = frozenset(extra_skip)
    docs = _subset_documents(corpus, years, policy, max_span)
    if not docs:
        raise CorpusError("empty corpus subset")

    def stream(doc: Document) -> list[str]:
        return [doc.tokens[i].lemma for i in indexed_positions(doc, skip_punctuation, extra)]

    if threads > 1 and len(docs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            streams = list(pool.map(stream, docs))
    else:
        streams = [stream(doc) for doc in docs]

    freq: dict[str, int] = {}
    for lemmas in streams:
        for lemma in lemmas:
            freq[lemma] = freq.get(lemma, 0) + 1
    vocabulary = tuple(sorted(l for l, n in freq.items() if n >= config.min_freq))
    if not vocabulary:
        raise CorpusError(f"vocabulary empty after min_freq={config.min_freq} threshold")
    vid = {lemma: i for i, lemma in enumerate(vocabulary)}

    lefts: list[np.ndarray] = []
    rights: list[np.ndarray] = []
    for lemmas in streams:
        ids = np.fromiter(
            (vid.get(lemma, -1) for lemma in lemmas), count=len(lemmas), dtype=np.int32
        )
        a, b = window_pair_ids(ids, config.window)
        if len(a):
            lefts.append(a)
            rights.append(b)

    n = len(vocabulary)
    if lefts:
        rows = np.concatenate(lefts)
        cols = np.concatenate(rights)
        data = np.ones(len(rows), dtype=np.int64)
        half = sparse.coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()
        counts = (half + half.T).tocsr()
    else:
        counts = sparse.csr_matrix((n, n), dtype=np.int64)

    if counts.nnz == 0:
        weights = sparse.csr_matrix((n, n), dtype=np.float64)
    else:
        weights = apply_weighting(counts, config.weighting)
    return DsmMatrix(
        vocabulary=vocabulary,
        counts=counts,
        weights=weights,
        corpus_fingerprint=corpus.fingerprint,
        config=config,
        subset_years=years,
        frequencies={lemma: freq[lemma] for lemma in vocabulary},
    )


def apply_weighting(counts: sparse.csr_matrix, weighting: str) -> sparse.csr_matrix:
    if weighting == "raw":
        return counts.astype(np.float64).tocsr()
    if weighting == "ppmi":
        return ppmi_weight(counts)
    if weighting == "logdice":
        return logdice_weight(counts)
    raise ValueError(f"unknown weighting {weighting!r}")


def ppmi_weight(counts: sparse.spmatrix) -> sparse.csr_matrix:
    """Positive pointwise mutual information of a symmetric count matrix.

    weight[i, j] = max(0, log(c_ij * N / (r_i * r_j))) with N the total count
    mass and r the row sums; structural zeros stay zero. Exact independence
    (c_ij = r_i * r_j / N) maps to 0.
    """
    coo = sparse.coo_matrix(counts)
    if coo.nnz == 0 or coo.sum() == 0:
        raise ValueError("all-zero count matrix")
    row_sums = np.asarray(counts.sum(axis=1)).ravel().astype(np.float64)
    total = float(row_sums.sum())
    data = coo.data.astype(np.float64)
    ratio = (data * total) / (row_sums[coo.row] * row_sums[coo.col])
    weights = np.log(ratio)
    np.maximum(weights, 0.0, out=weights)
    out = sparse.csr_matrix((weights, (coo.row, coo.col)), shape=counts.shape)
    out.eliminate_zeros()
    return out


def logdice_weight(counts: sparse.spmatrix) -> sparse.csr_matrix:
    """logDice scoring: 14 + log2(2 c_ij / (r_i + r_j)). Symmetric, may be < 0."""
    coo = sparse.coo_matrix(counts)
    if coo.nnz == 0 or coo.sum() == 0:
        raise ValueError("all-zero count matrix")
    row_sums = np.asarray(counts.sum(axis=1)).ravel().astype(np.float64)
    data = coo.data.astype(np.float64)
    scores = 14.0 + np.log2(2.0 * data / (row_sums[coo.row] + row_sums[coo.col]))
    out = sparse.csr_matrix((scores, (coo.row, coo.col)), shape=counts.shape)
    out.eliminate_zeros()
    return out


def _similarities(matrix: DsmMatrix, vid: int) -> np.ndarray:
    norms = matrix.row_norms()
    target_row = matrix.weights.getrow(vid)
    dots = np.asarray((matrix.weights @ target_row.T).todense()).ravel()
    denom = norms * norms[vid]
    out = np.zeros(len(norms), dtype=np.float64)
    nz = denom > 0
    out[nz] = dots[nz] / denom[nz]
    return out


def cosine_neighbors(
    matrix: DsmMatrix, target: str, k: int | None = None
) -> list[tuple[str, float]]:
    """Top-k lemmas by cosine similarity of weighted rows, excluding the target.

    Descending similarity, ties broken lexicographically.
    """
    if k is None:
        k = matrix.config.k
    if k < 1:
        raise ValueError("k must be >= 1")
    vid = matrix.vid(target)
    sims = _similarities(matrix, vid)
    order = sorted(
        (i for i in range(len(matrix.vocabulary)) if i != vid),
        key=lambda i: (-sims[i], matrix.vocabulary[i]),
    )
    return [(matrix.vocabulary[i], float(sims[i])) for i in order[:k]]


def semantic_field(
    matrix: DsmMatrix, target: str, config: DsmConfig | None = None
) -> FieldGraph:
    """Field graph: the target, its k neighbors, and above-threshold edges.

    Target-to-neighbor edges are always present; neighbor-neighbor edges are
    added when their pairwise similarity reaches the edge threshold.
    """
    cfg = config if config is not None else matrix.config
    neighbors = cosine_neighbors(matrix, target, cfg.k)
    nodes = [(target, 1.0)] + [(lemma, sim) for lemma, sim in neighbors]

    ids = [matrix.vid(lemma) for lemma, _ in nodes]
    sub = matrix.weights[ids]
    norms = matrix.row_norms()[ids]
    gram = np.asarray((sub @ sub.T).todense())
    denom = np.outer(norms, norms)
    with np.errstate(invalid="ignore", divide="ignore"):
        sims = np.where(denom > 0, gram / np.where(denom > 0, denom, 1.0), 0.0)

    edges: list[tuple[str, str, float]] = []
    for j in range(1, len(nodes)):
        edges.append((target, nodes[j][0], float(nodes[j][1])))
    for i in range(1, len(nodes)):
        for j in range(i + 1, len(nodes)):
            sim = float(sims[i, j])
            if sim >= cfg.edge_threshold:
                edges.append((nodes[i][0], nodes[j][0], sim))
    return FieldGraph(target=target, nodes=tuple(nodes), edges=tuple(edges))


def field_overlap(matrix: DsmMatrix, a: str, b: str, k: int | None = None) -> FieldOverlap:
    """Neighbor-set overlap of two lemmas, with mutual-membership flags."""
    na = {lemma for lemma, _ in cosine_neighbors(matrix, a, k)}
    nb = {lemma for lemma, _ in cosine_neighbors(matrix, b, k)}
    return FieldOverlap(
        shared=tuple(sorted(na & nb)),
        a_has_b=b in na,
        b_has_a=a in nb,
    )


def matrix_triplets(matrix: DsmMatrix) -> list[tuple[int, int, float]]:
    """Sparse (i, j, weight) triplets in row-major order."""
    coo = sparse.coo_matrix(matrix.weights)
    order = np.lexsort((coo.col, coo.row))
    return [
        (int(coo.row[i]), int(coo.col[i]), float(coo.data[i])) for i in order
    ]
