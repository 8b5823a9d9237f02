"""Positional inverted index and windowed collocation measures.

Positions are counted over the indexed token sequence of each document
(punctuation lemmas are skipped from distance numbering by default) and
windows never cross document boundaries. Association counting is
occurrence-level: a target occurrence is "associated" when at least one
probe-group token lies within the window, so associations <= occurrences
and every rate below is a true proportion.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import chrono
from ._kernels import count_window_hits
from .chrono import Binning
from .corpus import Corpus, CorpusError, GroupError, LemmaGroup, indexed_positions

DEFAULT_WINDOW = 5


class CorpusMismatchError(CorpusError):
    """Bins or matrices were computed from a different corpus."""


@dataclass(frozen=True, slots=True)
class CoocRow:
    target: str
    occurrences: int
    associations: int
    percent: Fraction


@dataclass(frozen=True, slots=True)
class DicePoint:
    bin_index: int
    f_a: int
    f_b: int
    hits_a: int
    hits_b: int
    dice: Fraction


@dataclass(frozen=True, slots=True)
class KwicLine:
    doc_id: str
    position: int
    left: tuple[str, ...]
    keyword: str
    right: tuple[str, ...]
    year: int | None = None


class PositionalIndex:
    """Per-lemma postings of (document, indexed position), plus totals.

    Built once from an immutable corpus; all queries are read-only and safe
    for concurrent callers.
    """

    def __init__(self, corpus: Corpus, skip_punctuation: bool, extra_skip: frozenset[str]):
        self.corpus = corpus
        self.fingerprint = corpus.fingerprint
        self.skip_punctuation = skip_punctuation
        self.extra_skip = extra_skip
        self.doc_ids: tuple[str, ...] = tuple(d.id for d in corpus.documents)
        self._docno = {doc_id: i for i, doc_id in enumerate(self.doc_ids)}
        self.lemmas: list[str] = []
        self.lemma_id: dict[str, int] = {}
        self.doc_tokens: list[np.ndarray] = []   # per doc: global lemma ids, int32
        self.doc_rawpos: list[np.ndarray] = []   # per doc: raw token index, int32
        self.postings: list[dict[int, np.ndarray]] = []  # lemma id -> {docno: positions}
        self.freq: list[int] = []
        self.n_indexed = 0
        self.dated_docnos: frozenset[int] = frozenset(
            i for i, d in enumerate(corpus.documents) if d.date.is_dated
        )

    # -- construction ------------------------------------------------------

    def _add_document(self, docno: int, lemmas: Sequence[str], rawpos: Sequence[int]):
        ids = np.empty(len(lemmas), dtype=np.int32)
        buckets: dict[int, list[int]] = {}
        for pos, lemma in enumerate(lemmas):
            lid = self.lemma_id.get(lemma)
            if lid is None:
                lid = len(self.lemmas)
                self.lemma_id[lemma] = lid
                self.lemmas.append(lemma)
                self.postings.append({})
                self.freq.append(0)
            ids[pos] = lid
            self.freq[lid] += 1
            buckets.setdefault(lid, []).append(pos)
        self.doc_tokens.append(ids)
        self.doc_rawpos.append(np.asarray(rawpos, dtype=np.int32))
        self.n_indexed += len(lemmas)
        for lid, positions in buckets.items():
            self.postings[lid][docno] = np.asarray(positions, dtype=np.int64)

    # -- lookups -----------------------------------------------------------

    def docno(self, doc_id: str) -> int:
        try:
            return self._docno[doc_id]
        except KeyError:
            raise CorpusMismatchError(f"unknown document id {doc_id!r}") from None

    def group_ids(self, group: LemmaGroup) -> list[int]:
        ids = [self.lemma_id[m] for m in group.members if m in self.lemma_id]
        ids.sort()
        return ids

    def group_docnos(self, ids: Iterable[int]) -> set[int]:
        out: set[int] = set()
        for lid in ids:
            out.update(self.postings[lid].keys())
        return out

    def group_positions(self, docno: int, ids: Sequence[int]) -> np.ndarray:
        arrays = [self.postings[lid][docno] for lid in ids if docno in self.postings[lid]]
        if not arrays:
            return np.empty(0, dtype=np.int64)
        if len(arrays) == 1:
            return arrays[0]
        return np.sort(np.concatenate(arrays))


def _doc_stream(doc, skip_punctuation, extra_skip):
    raw = indexed_positions(doc, skip_punctuation, extra_skip)
    lemmas = [doc.tokens[i].lemma for i in raw]
    return lemmas, raw


def build_index(
    corpus: Corpus,
    *,
    skip_punctuation: bool = True,
    extra_skip: Iterable[str] = (),
    threads: int = 1,
) -> PositionalIndex:
    """Build the positional index; results are independent of thread count."""
    extra = frozenset(extra_skip)
    index = PositionalIndex(corpus, skip_punctuation, extra)
    if threads > 1 and len(corpus.documents) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            streams = list(
                pool.map(lambda d: _doc_stream(d, skip_punctuation, extra), corpus.documents)
            )
    else:
        streams = [_doc_stream(d, skip_punctuation, extra) for d in corpus.documents]
    for docno, (lemmas, raw) in enumerate(streams):
        index._add_document(docno, lemmas, raw)
    return index


# ---------------------------------------------------------------------------
# Counting operations
# ---------------------------------------------------------------------------


def _require_disjoint(a: LemmaGroup, b: LemmaGroup):
    shared = a.members & b.members
    if shared:
        raise GroupError(
            f"groups {a.name!r} and {b.name!r} share lemma {sorted(shared)[0]!r}"
        )


def _check_binning(index: PositionalIndex, binning: Binning):
    if binning.corpus_fingerprint != index.fingerprint:
        raise CorpusMismatchError("bins were computed from a different corpus")


def _scope_docnos(index: PositionalIndex, scope: str) -> frozenset[int] | None:
    if scope == "all":
        return None
    if scope == "dated":
        return index.dated_docnos
    raise ValueError(f"unknown scope {scope!r}")


def percent(occurrences: int, associations: int) -> Fraction:
    """Association share of a lemma's occurrences, in [0, 100]."""
    if occurrences == 0:
        return Fraction(0)
    return Fraction(100 * associations, occurrences)


def association_hits(
    index: PositionalIndex,
    target: LemmaGroup,
    probe: LemmaGroup,
    w: int = DEFAULT_WINDOW,
    scope: str = "all",
) -> tuple[int, int]:
    """(occurrences, associations) of the target group against a probe group.

    ``occurrences`` counts target tokens in scope; ``associations`` counts
    those with at least one probe token within distance ``w`` in the same
    document.
    """
    if w < 1:
        raise ValueError("window radius must be >= 1")
    _require_disjoint(target, probe)
    scope_set = _scope_docnos(index, scope)
    t_ids = index.group_ids(target)
    p_ids = index.group_ids(probe)

    occurrences = 0
    t_docs = index.group_docnos(t_ids)
    if scope_set is not None:
        t_docs &= scope_set
    for docno in t_docs:
        occurrences += len(index.group_positions(docno, t_ids))

    associations = 0
    for docno in sorted(t_docs & index.group_docnos(p_ids)):
        tpos = index.group_positions(docno, t_ids)
        ppos = index.group_positions(docno, p_ids)
        associations += count_window_hits(tpos, ppos, w)
    return occurrences, associations


def association_table(
    index: PositionalIndex,
    targets: Sequence[LemmaGroup],
    probe: LemmaGroup,
    w: int = DEFAULT_WINDOW,
    scope: str = "all",
) -> list[CoocRow]:
    """One row per target, sorted by association percentage descending."""
    rows = []
    for target in targets:
        occ, assoc = association_hits(index, target, probe, w, scope)
        rows.append(CoocRow(target.name, occ, assoc, percent(occ, assoc)))
    rows.sort(key=lambda r: (-r.percent, -r.occurrences, r.target))
    return rows


def dice_score(
    index: PositionalIndex,
    a: LemmaGroup,
    b: LemmaGroup,
    w: int = DEFAULT_WINDOW,
    docs: Iterable[str] | None = None,
) -> Fraction:
    """Symmetric association rate (hits_a + hits_b) / (f_a + f_b) in [0, 1].

    hits_x counts x-occurrences having at least one y within the window, so
    the score is bounded even when one occurrence pairs with many.
    """
    point = _dice_point(index, a, b, w, docs, bin_index=0)
    return point.dice


def _dice_point(
    index: PositionalIndex,
    a: LemmaGroup,
    b: LemmaGroup,
    w: int,
    docs: Iterable[str] | None,
    bin_index: int,
) -> DicePoint:
    if w < 1:
        raise ValueError("window radius must be >= 1")
    _require_disjoint(a, b)
    a_ids = index.group_ids(a)
    b_ids = index.group_ids(b)
    if docs is None:
        docnos = None
    else:
        docnos = {index.docno(doc_id) for doc_id in docs}

    a_docs = index.group_docnos(a_ids)
    b_docs = index.group_docnos(b_ids)
    if docnos is not None:
        a_docs &= docnos
        b_docs &= docnos

    f_a = sum(len(index.group_positions(d, a_ids)) for d in a_docs)
    f_b = sum(len(index.group_positions(d, b_ids)) for d in b_docs)
    hits_a = hits_b = 0
    for docno in sorted(a_docs & b_docs):
        apos = index.group_positions(docno, a_ids)
        bpos = index.group_positions(docno, b_ids)
        hits_a += count_window_hits(apos, bpos, w)
        hits_b += count_window_hits(bpos, apos, w)
    denom = f_a + f_b
    dice = Fraction(hits_a + hits_b, denom) if denom else Fraction(0)
    return DicePoint(bin_index, f_a, f_b, hits_a, hits_b, dice)


def dice_series(
    index: PositionalIndex,
    binning: Binning,
    a: LemmaGroup,
    b: LemmaGroup,
    w: int = DEFAULT_WINDOW,
) -> list[DicePoint]:
    """One DicePoint per chronological bin, computed on that bin's documents."""
    _check_binning(index, binning)
    return [
        _dice_point(index, a, b, w, bin.doc_ids, bin.index) for bin in binning.bins
    ]


def frequency_series(
    index: PositionalIndex, binning: Binning, group: LemmaGroup
) -> list[int]:
    """Per-bin occurrence counts of the group across the binning."""
    _check_binning(index, binning)
    ids = index.group_ids(group)
    series = []
    for bin in binning.bins:
        count = 0
        for doc_id in bin.doc_ids:
            docno = index.docno(doc_id)
            count += len(index.group_positions(docno, ids))
        series.append(count)
    return series


def concordance(
    index: PositionalIndex,
    group: LemmaGroup,
    w: int = DEFAULT_WINDOW,
    limit: int | None = None,
    years: tuple[int, int] | None = None,
    policy: str = "midpoint",
    max_span: int = chrono.DEFAULT_MAX_SPAN,
) -> list[KwicLine]:
    """KWIC lines for the group, in corpus order, contexts clipped at doc edges.

    Contexts are the ``w`` nearest indexed tokens on each side; surfaces are
    shown, falling back to the lemma when the surface is empty. ``years``
    filters documents by assigned year.
    """
    if w < 1:
        raise ValueError("window radius must be >= 1")
    if limit is not None and limit <= 0:
        return []
    ids = index.group_ids(group)
    hit_docs = sorted(index.group_docnos(ids))
    lines: list[KwicLine] = []
    for docno in hit_docs:
        doc = index.corpus.documents[docno]
        year: int | None = None
        if doc.date.is_dated:
            assignment = chrono.assign_year(doc, policy, max_span)
            year = assignment.year if assignment is not None else None
        if years is not None:
            if year is None or not (years[0] <= year <= years[1]):
                continue
        tokens = index.doc_tokens[docno]
        rawpos = index.doc_rawpos[docno]
        n = len(tokens)
        positions = index.group_positions(docno, ids)
        for pos in positions:
            pos = int(pos)
            left = tuple(
                _display(doc, rawpos[i]) for i in range(max(0, pos - w), pos)
            )
            right = tuple(
                _display(doc, rawpos[i]) for i in range(pos + 1, min(n, pos + w + 1))
            )
            lines.append(
                KwicLine(doc.id, int(rawpos[pos]), left, _display(doc, rawpos[pos]), right, year)
            )
            if limit is not None and len(lines) >= limit:
                return lines
    return lines


def _display(doc, raw_index: int) -> str:
    tok = doc.tokens[int(raw_index)]
    return tok.surface if tok.surface else tok.lemma
