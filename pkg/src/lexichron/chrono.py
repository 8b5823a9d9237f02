"""Equal-mass chronological binning of a dated corpus.

Raw per-period frequencies are only comparable when every period holds about
the same amount of text, so the dated documents are sorted by assigned year
and split into contiguous runs of roughly ``target_mass`` tokens each.
Documents are never split across bins.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Corpus, CorpusError, Document

DEFAULT_TARGET_MASS = 1_000_000
DEFAULT_MAX_SPAN = 100
POLICIES = ("midpoint", "start", "end")


class EmptyDatedCorpusError(CorpusError):
    """No dated, non-excluded documents to bin."""


@dataclass(frozen=True, slots=True)
class YearAssignment:
    doc_id: str
    year: int
    span_width: int


@dataclass(frozen=True, slots=True)
class ChronoBin:
    index: int
    year_start: int
    year_end: int
    token_mass: int
    doc_ids: tuple[str, ...]
    undersized: bool = False


@dataclass(frozen=True)
class Binning:
    """A full partition of the dated corpus, tied to its source by fingerprint."""

    bins: tuple[ChronoBin, ...]
    target_mass: int
    policy: str
    max_span: int
    corpus_fingerprint: str

    def __iter__(self):
        return iter(self.bins)

    def __len__(self):
        return len(self.bins)


def assign_year(
    doc: Document, policy: str = "midpoint", max_span: int = DEFAULT_MAX_SPAN
) -> YearAssignment | None:
    """Collapse a document's date to one working year, or None when excluded.

    Exact dates keep their year. Interval dates take the midpoint (floor),
    start, or end year per policy; intervals wider than ``max_span`` years
    are excluded so that loosely dated acts do not smear the timeline.
    """
    date = doc.date
    if not date.is_dated:
        raise ValueError(f"document {doc.id!r} is undated")
    if policy not in POLICIES:
        raise ValueError(f"unknown year policy {policy!r}")
    assert date.year_min is not None and date.year_max is not None
    span = date.year_max - date.year_min
    if span > max_span:
        return None
    if policy == "midpoint":
        year = (date.year_min + date.year_max) // 2
    elif policy == "start":
        year = date.year_min
    else:
        year = date.year_max
    return YearAssignment(doc.id, year, span)


def dated_assignments(
    corpus: Corpus, policy: str = "midpoint", max_span: int = DEFAULT_MAX_SPAN
) -> list[YearAssignment]:
    """Assignments for all dated, non-excluded documents, sorted by (year, id)."""
    out = []
    for doc in corpus.documents:
        if not doc.date.is_dated:
            continue
        assignment = assign_year(doc, policy, max_span)
        if assignment is not None:
            out.append(assignment)
    out.sort(key=lambda a: (a.year, a.doc_id))
    return out


def slice_equal_mass(
    corpus: Corpus,
    target_mass: int = DEFAULT_TARGET_MASS,
    *,
    policy: str = "midpoint",
    max_span: int = DEFAULT_MAX_SPAN,
) -> Binning:
    """Greedy equal-mass partition of the dated documents.

    Documents sorted by (assigned year, id) are accumulated in order; a bin
    closes as soon as its token mass reaches ``target_mass``. The final bin
    keeps the remainder and is flagged undersized when its mass falls below
    half the target.
    """
    if target_mass < 1:
        raise ValueError("target_mass must be >= 1")
    assignments = dated_assignments(corpus, policy, max_span)
    if not assignments:
        raise EmptyDatedCorpusError("corpus has no dated, non-excluded documents")

    mass_by_id = {doc.id: len(doc.tokens) for doc in corpus.documents}

    bins: list[ChronoBin] = []
    cur_ids: list[str] = []
    cur_years: list[int] = []
    cur_mass = 0

    def flush(last: bool):
        nonlocal cur_ids, cur_years, cur_mass
        if not cur_ids:
            return
        undersized = last and cur_mass < target_mass / 2
        bins.append(
            ChronoBin(
                index=len(bins),
                year_start=cur_years[0],
                year_end=cur_years[-1],
                token_mass=cur_mass,
                doc_ids=tuple(cur_ids),
                undersized=undersized,
            )
        )
        cur_ids = []
        cur_years = []
        cur_mass = 0

    for assignment in assignments:
        cur_ids.append(assignment.doc_id)
        cur_years.append(assignment.year)
        cur_mass += mass_by_id[assignment.doc_id]
        if cur_mass >= target_mass:
            flush(last=False)
    flush(last=True)

    return Binning(
        bins=tuple(bins),
        target_mass=target_mass,
        policy=policy,
        max_span=max_span,
        corpus_fingerprint=corpus.fingerprint,
    )


def bin_label(bin: ChronoBin) -> str:
    """Axis label, e.g. ``"900–1000"``."""
    return f"{bin.year_start}–{bin.year_end}"


def bin_midpoint(bin: ChronoBin) -> int:
    """Plot x-coordinate of a bin."""
    return (bin.year_start + bin.year_end) // 2


def bin_table_rows(binning: Binning) -> list[list]:
    """Rows for the bin-table CSV export: index, years, midpoint, mass, docs."""
    return [
        [b.index, b.year_start, b.year_end, bin_midpoint(b), b.token_mass, len(b.doc_ids)]
        for b in binning.bins
    ]


BIN_TABLE_HEADER = ["index", "year_start", "year_end", "midpoint", "token_mass", "n_docs"]
