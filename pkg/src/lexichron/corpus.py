"""Lemmatized corpus model: vertical-format parsing, documents, lemma groups.

A corpus is a sequence of dated documents, each an ordered list of
``surface<TAB>lemma[<TAB>pos]`` tokens wrapped in ``<doc …>`` / ``</doc>``
tags. All counting downstream operates on the lemma column; lemmas are
lower-cased at ingest, surfaces are kept verbatim.
"""

from __future__ import annotations

import hashlib
import re
import unicodedata
from dataclasses import dataclass
from typing import Iterable, Iterator

ERA_DEFAULT = (300, 1600)


class CorpusError(Exception):
    """Base class for corpus-level failures."""


class ParseError(CorpusError):
    """Malformed vertical input. Carries the line number and document id."""

    def __init__(self, reason: str, line: int | None = None, doc_id: str | None = None):
        self.reason = reason
        self.line = line
        self.doc_id = doc_id
        where = []
        if line is not None:
            where.append(f"line {line}")
        if doc_id is not None:
            where.append(f"doc {doc_id!r}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(reason + suffix)


class GroupError(CorpusError):
    """Invalid lemma-group configuration (empty group or shared member)."""


@dataclass(frozen=True, slots=True)
class DateSpec:
    """Document dating: an exact year, a closed year interval, or undated."""

    kind: str
    year_min: int | None = None
    year_max: int | None = None

    def __post_init__(self):
        if self.kind == "exact":
            if self.year_min is None or self.year_min != self.year_max:
                raise ValueError("exact date requires year_min == year_max")
        elif self.kind == "interval":
            if self.year_min is None or self.year_max is None or self.year_min >= self.year_max:
                raise ValueError("interval date requires year_min < year_max")
        elif self.kind == "undated":
            if self.year_min is not None or self.year_max is not None:
                raise ValueError("undated spec must carry no years")
        else:
            raise ValueError(f"unknown date kind {self.kind!r}")

    @classmethod
    def exact(cls, year: int) -> "DateSpec":
        return cls("exact", year, year)

    @classmethod
    def interval(cls, year_min: int, year_max: int) -> "DateSpec":
        if year_min == year_max:
            return cls.exact(year_min)
        return cls("interval", year_min, year_max)

    @classmethod
    def undated(cls) -> "DateSpec":
        return cls("undated")

    @property
    def is_dated(self) -> bool:
        return self.kind != "undated"


@dataclass(frozen=True, slots=True)
class Token:
    surface: str
    lemma: str
    pos: str | None = None


@dataclass(frozen=True, slots=True)
class Document:
    """A dated, provenance-tagged token sequence; the unit of dating and context."""

    id: str
    date: DateSpec
    tokens: tuple[Token, ...]
    collection: str = ""
    region: str | None = None

    def __post_init__(self):
        if not self.tokens:
            raise ValueError(f"document {self.id!r} has no tokens")


@dataclass(frozen=True, slots=True)
class CorpusStats:
    n_documents: int
    n_dated: int
    n_tokens: int
    n_dated_tokens: int
    year_span: tuple[int, int] | None


def compute_stats(documents: Iterable[Document]) -> CorpusStats:
    n_docs = n_dated = n_tokens = n_dated_tokens = 0
    ymin: int | None = None
    ymax: int | None = None
    for doc in documents:
        n_docs += 1
        n_tokens += len(doc.tokens)
        if doc.date.is_dated:
            n_dated += 1
            n_dated_tokens += len(doc.tokens)
            assert doc.date.year_min is not None and doc.date.year_max is not None
            ymin = doc.date.year_min if ymin is None else min(ymin, doc.date.year_min)
            ymax = doc.date.year_max if ymax is None else max(ymax, doc.date.year_max)
    span = (ymin, ymax) if ymin is not None and ymax is not None else None
    return CorpusStats(n_docs, n_dated, n_tokens, n_dated_tokens, span)


class Corpus:
    """Immutable document collection; safe for concurrent read access."""

    __slots__ = ("documents", "stats", "_fingerprint")

    def __init__(self, documents: Iterable[Document]):
        self.documents: tuple[Document, ...] = tuple(documents)
        self.stats: CorpusStats = compute_stats(self.documents)
        self._fingerprint: str | None = None

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self) -> Iterator[Document]:
        return iter(self.documents)

    def __eq__(self, other) -> bool:
        return isinstance(other, Corpus) and self.documents == other.documents

    @property
    def fingerprint(self) -> str:
        """SHA-256 of the canonical serialization; identifies corpus content."""
        if self._fingerprint is None:
            digest = hashlib.sha256(serialize_vertical(self).encode("utf-8"))
            self._fingerprint = digest.hexdigest()
        return self._fingerprint

    def recompute_stats(self) -> CorpusStats:
        return compute_stats(self.documents)


@dataclass(frozen=True)
class LemmaGroup:
    """A named set of lemmas treated as one analytic unit (spelling variants etc.)."""

    name: str
    members: frozenset[str]

    def __post_init__(self):
        if not self.name:
            raise GroupError("group name must be non-empty")
        if not self.members:
            raise GroupError(f"group {self.name!r} has no members")

    @classmethod
    def of(cls, name: str, *members: str) -> "LemmaGroup":
        return cls(name, frozenset(m.lower() for m in members))


def validate_groups(groups: Iterable[LemmaGroup]) -> None:
    """Raise GroupError when two groups share a member lemma."""
    seen: dict[str, str] = {}
    for group in groups:
        for lemma in group.members:
            if lemma in seen and seen[lemma] != group.name:
                raise GroupError(
                    f"lemma {lemma!r} appears in both group {seen[lemma]!r} and group {group.name!r}"
                )
            seen[lemma] = group.name


def group_frequency(corpus: Corpus, group: LemmaGroup, dated_only: bool = False) -> int:
    """Total token occurrences whose lemma belongs to the group."""
    members = group.members
    total = 0
    for doc in corpus.documents:
        if dated_only and not doc.date.is_dated:
            continue
        for tok in doc.tokens:
            if tok.lemma in members:
                total += 1
    return total


def total_mentions(counts: Iterable[int]) -> int:
    """Grand-total row of a per-group mention table."""
    return sum(int(c) for c in counts)


def lexicon_report(
    corpus: Corpus, groups: Iterable[LemmaGroup], dated_only: bool = False
) -> list[tuple[str, int]]:
    """Per-group frequency table sorted by count descending, with a total row."""
    rows = [(g.name, group_frequency(corpus, g, dated_only)) for g in groups]
    rows.sort(key=lambda r: (-r[1], r[0]))
    rows.append(("total", total_mentions(c for _, c in rows)))
    return rows


def is_punctuation_lemma(lemma: str) -> bool:
    """Default skip rule: single-character punctuation lemmas carry no distance."""
    return len(lemma) == 1 and unicodedata.category(lemma).startswith("P")


def indexed_positions(
    doc: Document, skip_punctuation: bool = True, extra_skip: frozenset[str] | tuple = ()
) -> list[int]:
    """Raw token indices that participate in window-distance numbering."""
    out = []
    for i, tok in enumerate(doc.tokens):
        if skip_punctuation and is_punctuation_lemma(tok.lemma):
            continue
        if tok.lemma in extra_skip:
            continue
        out.append(i)
    return out


# ---------------------------------------------------------------------------
# Vertical format
# ---------------------------------------------------------------------------

_ATTR_RE = re.compile(r'\s+([A-Za-z_][A-Za-z0-9_]*)="([^"]*)"')
_KNOWN_ATTRS = frozenset({"id", "date", "date_min", "date_max", "collection", "region"})
_WS_RE = re.compile(r"\s")


def _unescape(value: str) -> str:
    return value.replace("&quot;", '"').replace("&amp;", "&")


def _escape(value: str) -> str:
    return value.replace("&", "&amp;").replace('"', "&quot;")


def _parse_header(line: str, lineno: int) -> dict[str, str]:
    body = line[len("<doc"):-1]
    attrs: dict[str, str] = {}
    pos = 0
    for m in _ATTR_RE.finditer(body):
        if body[pos:m.start()].strip():
            raise ParseError(f"malformed doc header: {line!r}", lineno)
        key, raw = m.group(1), m.group(2)
        if key not in _KNOWN_ATTRS:
            raise ParseError(f"unknown doc attribute {key!r}", lineno)
        if key in attrs:
            raise ParseError(f"duplicate doc attribute {key!r}", lineno)
        attrs[key] = _unescape(raw)
        pos = m.end()
    if body[pos:].strip():
        raise ParseError(f"malformed doc header: {line!r}", lineno)
    if "id" not in attrs or not attrs["id"]:
        raise ParseError("doc header missing id attribute", lineno)
    return attrs


def _parse_year(value: str, attr: str, lineno: int, doc_id: str) -> int:
    if not re.fullmatch(r"\d+", value):
        raise ParseError(f"non-numeric {attr} {value!r}", lineno, doc_id)
    return int(value)


def _date_from_attrs(attrs: dict[str, str], lineno: int, era: tuple[int, int]) -> DateSpec:
    doc_id = attrs["id"]
    has_exact = "date" in attrs
    has_min = "date_min" in attrs
    has_max = "date_max" in attrs
    if has_exact and (has_min or has_max):
        raise ParseError("date and date_min/date_max are mutually exclusive", lineno, doc_id)
    if has_min != has_max:
        raise ParseError("date_min and date_max must be given together", lineno, doc_id)
    if has_exact:
        year = _parse_year(attrs["date"], "date", lineno, doc_id)
        spec = DateSpec.exact(year)
    elif has_min:
        ymin = _parse_year(attrs["date_min"], "date_min", lineno, doc_id)
        ymax = _parse_year(attrs["date_max"], "date_max", lineno, doc_id)
        if ymin > ymax:
            raise ParseError(f"date_min {ymin} exceeds date_max {ymax}", lineno, doc_id)
        spec = DateSpec.interval(ymin, ymax)
    else:
        return DateSpec.undated()
    lo, hi = era
    assert spec.year_min is not None and spec.year_max is not None
    if spec.year_min < lo or spec.year_max > hi:
        raise ParseError(
            f"year outside era bounds [{lo}, {hi}]: {spec.year_min}-{spec.year_max}",
            lineno,
            doc_id,
        )
    return spec


def _parse_token(line: str, lineno: int, doc_id: str) -> Token:
    fields = line.split("\t")
    if len(fields) not in (2, 3):
        raise ParseError(f"token line needs 2 or 3 tab-separated fields: {line!r}", lineno, doc_id)
    surface = fields[0]
    lemma = fields[1].strip().lower()
    if not lemma:
        raise ParseError("empty lemma", lineno, doc_id)
    if _WS_RE.search(lemma):
        raise ParseError(f"lemma contains whitespace: {fields[1]!r}", lineno, doc_id)
    pos = fields[2] if len(fields) == 3 and fields[2] else None
    return Token(surface, lemma, pos)


def parse_vertical(
    source,
    *,
    era: tuple[int, int] = ERA_DEFAULT,
    strict: bool = True,
    rejects: list | None = None,
) -> Corpus:
    """Parse a vertical-format character stream into a Corpus.

    ``source`` is a string or an iterable of lines. In strict mode the first
    malformed document raises ParseError; in lenient mode the offending
    document is skipped and a ``{"id", "line", "reason"}`` record is appended
    to ``rejects`` (when given). Lemmas are lower-cased; token order is
    preserved.
    """
    if isinstance(source, str):
        lines: Iterable[str] = source.split("\n")
    else:
        lines = (ln.rstrip("\n") for ln in source)

    documents: list[Document] = []
    seen_ids: set[str] = set()

    inside = False
    cur_id = ""
    cur_date: DateSpec | None = None
    cur_collection = ""
    cur_region: str | None = None
    cur_tokens: list[Token] = []
    cur_broken: ParseError | None = None
    cur_line = 0

    def reject(err: ParseError):
        if strict:
            raise err
        if rejects is not None:
            rejects.append(
                {"id": err.doc_id or "", "line": err.line or 0, "reason": err.reason}
            )

    def open_doc(line: str, lineno: int):
        nonlocal inside, cur_id, cur_date, cur_collection, cur_region
        nonlocal cur_tokens, cur_broken, cur_line
        inside = True
        cur_line = lineno
        cur_tokens = []
        cur_broken = None
        cur_id = ""
        cur_date = None
        cur_collection = ""
        cur_region = None
        try:
            attrs = _parse_header(line, lineno)
            cur_id = attrs["id"]
            cur_date = _date_from_attrs(attrs, lineno, era)
            cur_collection = attrs.get("collection", "")
            cur_region = attrs.get("region")
        except ParseError as err:
            # best-effort id so the reject record can name the document
            m = re.search(r'id="([^"]*)"', line)
            if m and not err.doc_id:
                err.doc_id = _unescape(m.group(1))
            cur_id = err.doc_id or ""
            cur_broken = err

    def close_doc(lineno: int):
        nonlocal inside
        inside = False
        err = cur_broken
        if err is None and not cur_tokens:
            err = ParseError("document has no tokens", lineno, cur_id)
        if err is None and cur_id in seen_ids:
            err = ParseError(f"duplicate document id {cur_id!r}", cur_line, cur_id)
        if err is not None:
            reject(err)
            return
        assert cur_date is not None
        seen_ids.add(cur_id)
        documents.append(
            Document(cur_id, cur_date, tuple(cur_tokens), cur_collection, cur_region)
        )

    lineno = 0
    for raw in lines:
        lineno += 1
        line = raw.rstrip("\r")
        if line.startswith("<doc") and line.endswith(">"):
            if inside:
                reject(ParseError("unterminated document", lineno, cur_id))
            open_doc(line, lineno)
        elif line == "</doc>":
            if not inside:
                reject(ParseError("close tag without open document", lineno))
                continue
            close_doc(lineno)
        elif inside:
            if cur_broken is None:
                try:
                    cur_tokens.append(_parse_token(line, lineno, cur_id))
                except ParseError as err:
                    cur_broken = err
        else:
            if not line.strip():
                continue
            reject(ParseError(f"expected doc header, got {line!r}", lineno))

    if inside:
        reject(ParseError("unterminated document", lineno, cur_id))

    return Corpus(documents)


def serialize_vertical(corpus: Corpus) -> str:
    """Canonical vertical serialization; parsing it back reproduces the corpus."""
    out: list[str] = []
    for doc in corpus.documents:
        attrs = [f'id="{_escape(doc.id)}"']
        date = doc.date
        if date.kind == "exact":
            attrs.append(f'date="{date.year_min}"')
        elif date.kind == "interval":
            attrs.append(f'date_min="{date.year_min}" date_max="{date.year_max}"')
        if doc.collection:
            attrs.append(f'collection="{_escape(doc.collection)}"')
        if doc.region is not None:
            attrs.append(f'region="{_escape(doc.region)}"')
        out.append(f"<doc {' '.join(attrs)}>")
        for tok in doc.tokens:
            if tok.pos is not None:
                out.append(f"{tok.surface}\t{tok.lemma}\t{tok.pos}")
            else:
                out.append(f"{tok.surface}\t{tok.lemma}")
        out.append("</doc>")
    return "\n".join(out) + "\n" if out else ""
