import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lexichron.corpus import (
    Corpus,
    DateSpec,
    Document,
    GroupError,
    LemmaGroup,
    ParseError,
    Token,
    group_frequency,
    lexicon_report,
    parse_vertical,
    serialize_vertical,
    total_mentions,
    validate_groups,
)

import oracle

MINIMAL = """<doc id="a" date="1096">
In\tin
horreo\thorreum
frumentum\tfrumentum
</doc>
"""


def test_minimal_document():
    corpus = parse_vertical(MINIMAL)
    assert corpus.stats.n_documents == 1
    assert corpus.stats.n_tokens == 3
    assert corpus.stats.year_span == (1096, 1096)
    assert corpus.documents[0].tokens[0] == Token("In", "in")


def test_unterminated_document_names_doc():
    broken = MINIMAL.replace("</doc>\n", "")
    with pytest.raises(ParseError) as err:
        parse_vertical(broken)
    assert "unterminated" in str(err.value)
    assert err.value.doc_id == "a"


def test_lemma_lowercased_surface_verbatim():
    corpus = parse_vertical('<doc id="a" date="900">\nHorreum\tHORREUM\n</doc>\n')
    tok = corpus.documents[0].tokens[0]
    assert tok.lemma == "horreum"
    assert tok.surface == "Horreum"


def test_interval_and_undated_dates():
    text = (
        '<doc id="a" date_min="1050" date_max="1100">\nx\tx\n</doc>\n'
        '<doc id="b">\ny\ty\n</doc>\n'
    )
    corpus = parse_vertical(text)
    a, b = corpus.documents
    assert a.date == DateSpec.interval(1050, 1100)
    assert b.date == DateSpec.undated()
    assert corpus.stats.n_dated == 1
    assert corpus.stats.n_dated_tokens == 1


def test_equal_interval_bounds_coerced_to_exact():
    corpus = parse_vertical('<doc id="a" date_min="900" date_max="900">\nx\tx\n</doc>\n')
    assert corpus.documents[0].date == DateSpec.exact(900)


def test_attribute_escaping_round_trip():
    doc = Document(
        'he said "no" & left',
        DateSpec.exact(1000),
        (Token("x", "x"),),
        collection='a&b "c"',
    )
    corpus = Corpus([doc])
    assert parse_vertical(serialize_vertical(corpus)) == corpus


@pytest.mark.parametrize(
    "header, message",
    [
        ('<doc id="a" date="nope">', "non-numeric"),
        ('<doc id="a" date="2000">', "era bounds"),
        ('<doc id="a" date="900" date_min="800" date_max="950">', "mutually exclusive"),
        ('<doc id="a" date_min="900">', "together"),
        ('<doc id="a" date_min="950" date_max="900">', "exceeds"),
        ("<doc>", "missing id"),
        ('<doc id="a" shady="1">', "unknown doc attribute"),
    ],
)
def test_header_errors(header, message):
    with pytest.raises(ParseError, match=message):
        parse_vertical(f"{header}\nx\tx\n</doc>\n")


@pytest.mark.parametrize(
    "token_line",
    ["loneword", "a\tb\tc\td", "x\t", "x\ttwo words"],
)
def test_token_errors(token_line):
    with pytest.raises(ParseError):
        parse_vertical(f'<doc id="a" date="900">\n{token_line}\n</doc>\n')


def test_duplicate_id_strict():
    text = MINIMAL + MINIMAL
    with pytest.raises(ParseError, match="duplicate document id"):
        parse_vertical(text)


def test_lenient_mode_skips_and_reports():
    text = (
        '<doc id="good" date="900">\nx\tx\n</doc>\n'
        '<doc id="bad" date="9999">\nx\tx\n</doc>\n'
        '<doc id="empty" date="901">\n</doc>\n'
        '<doc id="good" date="902">\nx\tx\n</doc>\n'
    )
    rejects = []
    corpus = parse_vertical(text, strict=False, rejects=rejects)
    assert [d.id for d in corpus.documents] == ["good"]
    assert {(r["id"], r["reason"].split(":")[0]) for r in rejects} == {
        ("bad", "year outside era bounds [300, 1600]"),
        ("empty", "document has no tokens"),
        ("good", "duplicate document id 'good'"),
    }
    assert all(r["line"] > 0 for r in rejects)


def test_era_bounds_configurable():
    text = '<doc id="a" date="250">\nx\tx\n</doc>\n'
    with pytest.raises(ParseError):
        parse_vertical(text)
    corpus = parse_vertical(text, era=(200, 1600))
    assert corpus.stats.n_documents == 1


def test_fixture_stats_match_manifest(fixture_corpus, fixture_manifest):
    stats = fixture_corpus.stats
    assert stats.n_documents == fixture_manifest["n_documents"]
    assert stats.n_dated == fixture_manifest["n_dated"]
    assert stats.n_tokens == fixture_manifest["n_tokens"]
    assert stats.n_dated_tokens == fixture_manifest["n_dated_tokens"]
    assert list(stats.year_span) == fixture_manifest["year_span"]


def test_fixture_parse_round_trip(fixture_corpus):
    reparsed = parse_vertical(serialize_vertical(fixture_corpus))
    assert reparsed == fixture_corpus
    assert reparsed.stats == fixture_corpus.stats
    assert reparsed.fingerprint == fixture_corpus.fingerprint


def test_stats_round_trip(fixture_corpus):
    assert fixture_corpus.recompute_stats() == fixture_corpus.stats


# -- groups ------------------------------------------------------------------


def test_validate_groups_ok():
    validate_groups([LemmaGroup.of("storage", "horreum"), LemmaGroup.of("grain", "frumentum")])


def test_validate_groups_overlap_names_both():
    with pytest.raises(GroupError) as err:
        validate_groups([LemmaGroup.of("a", "x", "y"), LemmaGroup.of("b", "y")])
    message = str(err.value)
    assert "'y'" in message and "'a'" in message and "'b'" in message


def test_grain_variant_groups_are_disjoint():
    groups = [
        LemmaGroup.of("rye", "siligo", "sigale"),
        LemmaGroup.of("barley", "hordeum"),
        LemmaGroup.of("wheat", "triticum", "cibaria"),
        LemmaGroup.of("spelt", "spelta"),
        LemmaGroup.of("oats", "avena", "civata"),
        LemmaGroup.of("corn", "frumentum"),
        LemmaGroup.of("millet", "milium", "panicum"),
        LemmaGroup.of("bladum", "bladum"),
    ]
    validate_groups(groups)


def test_empty_group_rejected():
    with pytest.raises(GroupError):
        LemmaGroup("nothing", frozenset())


def test_group_frequency_absent_is_zero(fixture_corpus):
    assert group_frequency(fixture_corpus, LemmaGroup.of("g", "zzz")) == 0


def test_group_frequency_matches_manifest(fixture_corpus, fixture_manifest):
    for lemma, count in fixture_manifest["lemma_counts"].items():
        assert group_frequency(fixture_corpus, LemmaGroup.of(lemma, lemma)) == count
    for lemma, count in fixture_manifest["lemma_counts_dated"].items():
        assert (
            group_frequency(fixture_corpus, LemmaGroup.of(lemma, lemma), dated_only=True)
            == count
        )


def test_group_frequency_dated_only_invariant_on_all_dated():
    corpus = parse_vertical(MINIMAL)
    group = LemmaGroup.of("g", "horreum")
    assert group_frequency(corpus, group) == group_frequency(corpus, group, dated_only=True)


def test_group_frequency_additivity(fixture_corpus):
    merged = LemmaGroup.of("m", "horreum", "frumentum")
    split = [LemmaGroup.of("a", "horreum"), LemmaGroup.of("b", "frumentum")]
    assert group_frequency(fixture_corpus, merged) == sum(
        group_frequency(fixture_corpus, g) for g in split
    )


def test_total_mentions():
    assert total_mentions([1, 2, 3]) == 6
    assert total_mentions([]) == 0


def test_lexicon_report_sorted_with_total(fixture_corpus, fixture_manifest):
    groups = [LemmaGroup.of(l, l) for l in ("horreum", "frumentum", "spelta")]
    rows = lexicon_report(fixture_corpus, groups)
    assert rows[-1][0] == "total"
    counts = [c for _, c in rows[:-1]]
    assert counts == sorted(counts, reverse=True)
    assert rows[-1][1] == sum(counts)


# -- properties --------------------------------------------------------------

lemma_st = st.text(alphabet="abcdefg", min_size=1, max_size=4)
token_st = st.builds(
    Token,
    surface=st.text(alphabet="abcdefgABCDEFG ", max_size=5).filter(lambda s: "\t" not in s),
    lemma=lemma_st,
    pos=st.one_of(st.none(), st.sampled_from(["n", "v"])),
)
date_st = st.one_of(
    st.just(DateSpec.undated()),
    st.integers(min_value=300, max_value=1600).map(DateSpec.exact),
    st.tuples(
        st.integers(min_value=300, max_value=1500), st.integers(min_value=1, max_value=99)
    ).map(lambda t: DateSpec.interval(t[0], t[0] + t[1])),
)


@st.composite
def corpus_st(draw):
    n = draw(st.integers(min_value=1, max_value=6))
    docs = []
    for i in range(n):
        tokens = draw(st.lists(token_st, min_size=1, max_size=12))
        docs.append(Document(f"d{i}", draw(date_st), tuple(tokens)))
    return Corpus(docs)


@settings(max_examples=60, deadline=None)
@given(corpus_st())
def test_serialize_parse_round_trip(corpus):
    assert parse_vertical(serialize_vertical(corpus)) == corpus


@settings(max_examples=60, deadline=None)
@given(corpus_st(), st.sets(lemma_st, min_size=1, max_size=4))
def test_group_frequency_properties(corpus, members):
    group = LemmaGroup("g", frozenset(members))
    dated = group_frequency(corpus, group, dated_only=True)
    full = group_frequency(corpus, group)
    assert dated <= full
    assert full == oracle.group_frequency(corpus, group.members)
    assert full == sum(
        group_frequency(corpus, LemmaGroup.of(m, m)) for m in group.members
    )


def test_parsing_order_stable():
    a = parse_vertical(MINIMAL)
    b = parse_vertical(MINIMAL)
    for doc_a, doc_b in zip(a.documents, b.documents):
        assert doc_a.tokens == doc_b.tokens


def test_parse_accepts_line_iterables(tmp_path):
    path = tmp_path / "c.vrt"
    path.write_text(MINIMAL, encoding="utf-8")
    with path.open(encoding="utf-8") as fh:
        corpus = parse_vertical(fh)
    assert corpus == parse_vertical(MINIMAL)


def test_empty_document_rejected_at_type_level():
    with pytest.raises(ValueError):
        Document("empty", DateSpec.exact(900), ())
