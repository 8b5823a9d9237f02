from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lexichron.chrono import slice_equal_mass
from lexichron.colloc import (
    CorpusMismatchError,
    association_hits,
    association_table,
    build_index,
    concordance,
    dice_score,
    dice_series,
    frequency_series,
    percent,
)
from lexichron.corpus import Corpus, DateSpec, Document, GroupError, LemmaGroup, Token
from lexichron.report import fmt_percent

import oracle


def toks(*lemmas):
    return tuple(Token(l, l) for l in lemmas)


def one_doc_corpus(*lemmas, year=1000):
    return Corpus([Document("d1", DateSpec.exact(year), toks(*lemmas))])


G = LemmaGroup.of


# -- index -------------------------------------------------------------------


def test_empty_corpus_empty_index():
    index = build_index(Corpus([]))
    assert index.n_indexed == 0
    assert index.lemmas == []


def test_index_totals_match_manifest(fixture_corpus, fixture_manifest):
    index = build_index(fixture_corpus)
    for lemma, count in fixture_manifest["lemma_counts"].items():
        assert index.freq[index.lemma_id[lemma]] == count


def test_postings_lengths_sum_to_indexed_tokens(fixture_corpus):
    index = build_index(fixture_corpus)
    total = sum(
        len(positions) for per_doc in index.postings for positions in per_doc.values()
    )
    assert total == index.n_indexed == sum(index.freq)
    non_skipped = sum(len(oracle.doc_lemmas(d)) for d in fixture_corpus.documents)
    assert total == non_skipped


def test_postings_sorted_no_duplicates(fixture_corpus):
    index = build_index(fixture_corpus)
    for per_doc in index.postings:
        for positions in per_doc.values():
            as_list = positions.tolist()
            assert as_list == sorted(set(as_list))


def test_punctuation_skipped_from_numbering():
    corpus = one_doc_corpus("a", ".", ".", "b")
    index = build_index(corpus)
    # indexed distance between a and b is 1 once punctuation drops out
    occ, assoc = association_hits(index, G("x", "a"), G("y", "b"), w=1)
    assert (occ, assoc) == (1, 1)
    keep = build_index(corpus, skip_punctuation=False)
    occ, assoc = association_hits(keep, G("x", "a"), G("y", "b"), w=1)
    assert (occ, assoc) == (1, 0)


def test_extra_skip_list():
    corpus = one_doc_corpus("a", "et", "b")
    index = build_index(corpus, extra_skip=["et"])
    occ, assoc = association_hits(index, G("x", "a"), G("y", "b"), w=1)
    assert (occ, assoc) == (1, 1)


def test_index_thread_count_invariance(fixture_corpus):
    one = build_index(fixture_corpus, threads=1)
    four = build_index(fixture_corpus, threads=4)
    assert one.lemmas == four.lemmas
    assert one.n_indexed == four.n_indexed
    for a, b in zip(one.doc_tokens, four.doc_tokens):
        assert a.tolist() == b.tolist()


# -- percent arithmetic (cross-table rows) ------------------------------------


@pytest.mark.parametrize(
    "occurrences, associations, printed",
    [
        (317, 85, "26.81"),
        (64, 14, "21.88"),
        (31, 6, "19.35"),
        (622, 79, "12.70"),
        (1384, 143, "10.33"),
        (40, 3, "7.50"),
        (182, 9, "4.95"),
        (6435, 318, "4.94"),
        (1362, 20, "1.47"),
        (3306, 1, "0.03"),
    ],
)
def test_percent_display(occurrences, associations, printed):
    value = percent(occurrences, associations)
    assert value == Fraction(100 * associations, occurrences)
    assert fmt_percent(value) == printed


def test_percent_zero_occurrences():
    assert percent(0, 0) == Fraction(0)


# -- association hits ----------------------------------------------------------


def test_all_targets_adjacent_to_probe():
    corpus = one_doc_corpus("t", "p", "x", "t", "p", "x", "t", "p")
    index = build_index(corpus)
    occ, assoc = association_hits(index, G("t", "t"), G("p", "p"), w=5)
    assert occ == assoc == 3
    assert percent(occ, assoc) == 100


def test_interleaved_six_apart_no_hits():
    # t and p separated by exactly 6 indexed tokens; w=5 misses, w=6 hits
    corpus = one_doc_corpus("t", "f", "f", "f", "f", "f", "p")
    index = build_index(corpus)
    assert association_hits(index, G("t", "t"), G("p", "p"), w=5) == (1, 0)
    assert association_hits(index, G("t", "t"), G("p", "p"), w=6) == (1, 1)
    assert oracle.association_hits(corpus, {"t"}, {"p"}, 5) == (1, 0)


def test_windows_do_not_cross_documents():
    docs = [
        Document("d1", DateSpec.exact(900), toks("t")),
        Document("d2", DateSpec.exact(901), toks("p")),
    ]
    index = build_index(Corpus(docs))
    assert association_hits(index, G("t", "t"), G("p", "p"), w=5) == (1, 0)


def test_scope_dated_excludes_undated():
    docs = [
        Document("d1", DateSpec.exact(900), toks("t", "p")),
        Document("d2", DateSpec.undated(), toks("t", "p")),
    ]
    index = build_index(Corpus(docs))
    assert association_hits(index, G("t", "t"), G("p", "p"), w=2, scope="all") == (2, 2)
    assert association_hits(index, G("t", "t"), G("p", "p"), w=2, scope="dated") == (1, 1)


def test_overlapping_groups_rejected():
    index = build_index(one_doc_corpus("a", "b"))
    with pytest.raises(GroupError):
        association_hits(index, G("x", "a", "b"), G("y", "b"), w=2)


def test_association_table_sorted_zero_last(fixture_corpus):
    index = build_index(fixture_corpus)
    targets = [G("horreum", "horreum"), G("granarium", "granarium"), G("ghost", "zzz")]
    rows = association_table(index, targets, G("grain", "frumentum"), w=5, scope="dated")
    percents = [r.percent for r in rows]
    assert percents == sorted(percents, reverse=True)
    assert rows[-1].target == "ghost"
    assert (rows[-1].occurrences, rows[-1].associations, rows[-1].percent) == (0, 0, 0)
    for row in rows:
        assert row.associations <= row.occurrences


def test_association_table_equals_recomputed_hits(fixture_corpus):
    index = build_index(fixture_corpus)
    targets = [G("horreum", "horreum"), G("granarium", "granarium")]
    probe = G("grain", "frumentum", "granum")
    rows = {r.target: r for r in association_table(index, targets, probe, w=5, scope="all")}
    for target in targets:
        occ, assoc = oracle.association_hits(
            fixture_corpus, target.members, probe.members, 5
        )
        assert (rows[target.name].occurrences, rows[target.name].associations) == (occ, assoc)


# -- dice ----------------------------------------------------------------------


def test_dice_never_within_window_is_zero():
    corpus = one_doc_corpus("a", "f", "f", "f", "f", "f", "f", "b")
    index = build_index(corpus)
    assert dice_score(index, G("a", "a"), G("b", "b"), w=5) == 0


def test_dice_adjacent_pairs_is_one():
    docs = [
        Document(f"d{i}", DateSpec.exact(900 + i), toks("a", "b")) for i in range(4)
    ]
    index = build_index(Corpus(docs))
    assert dice_score(index, G("a", "a"), G("b", "b"), w=5) == 1


def test_dice_matches_oracle_on_random_corpora():
    for seed in range(8):
        corpus = oracle.random_corpus(seed, approx_tokens=400)
        index = build_index(corpus)
        a, b = G("a", "l0", "l1"), G("b", "l2", "l3")
        for w in (1, 3, 5):
            assert dice_score(index, a, b, w) == oracle.dice_score(
                corpus, a.members, b.members, w
            )


def test_dice_symmetry_and_bounds():
    for seed in range(6):
        corpus = oracle.random_corpus(seed, approx_tokens=300)
        index = build_index(corpus)
        a, b = G("a", "l0"), G("b", "l1", "l2")
        ab = dice_score(index, a, b, w=4)
        ba = dice_score(index, b, a, w=4)
        assert ab == ba
        assert 0 <= ab <= 1


def test_dice_window_monotonicity():
    for seed in range(6):
        corpus = oracle.random_corpus(seed, approx_tokens=300)
        index = build_index(corpus)
        a, b = G("a", "l0"), G("b", "l1")
        previous = Fraction(-1)
        for w in range(1, 11):
            value = dice_score(index, a, b, w)
            assert value >= previous
            previous = value


def test_dice_subset_and_pooled(fixture_corpus):
    index = build_index(fixture_corpus)
    binning = slice_equal_mass(fixture_corpus, 900)
    a, b = G("a", "horreum"), G("b", "frumentum")
    points = dice_series(index, binning, a, b, w=5)
    union = [doc_id for bin in binning.bins for doc_id in bin.doc_ids]
    pooled = dice_score(index, a, b, w=5, docs=union)
    total = Fraction(
        sum(p.hits_a + p.hits_b for p in points), sum(p.f_a + p.f_b for p in points)
    )
    assert pooled == total
    for p in points:
        assert p.hits_a <= p.f_a and p.hits_b <= p.f_b
        assert 0 <= p.dice <= 1


def test_dice_series_absent_group_is_zero(fixture_corpus):
    index = build_index(fixture_corpus)
    binning = slice_equal_mass(fixture_corpus, 900)
    points = dice_series(index, binning, G("a", "horreum"), G("b", "zzz"), w=5)
    assert all(p.dice == 0 for p in points)


def test_dice_series_fixture_sign_pattern(fixture_corpus, fixture_manifest):
    """Association planted only after 1100: zero before, positive after."""
    index = build_index(fixture_corpus)
    binning = slice_equal_mass(fixture_corpus, 900)
    points = dice_series(index, binning, G("a", "horreum"), G("b", "frumentum"), w=5)
    pair_docs = {
        p["doc"] for pair in fixture_manifest["pairs"] for p in pair["placements"]
        if pair["gap"] <= 5
    }
    for point, bin in zip(points, binning.bins):
        if pair_docs & set(bin.doc_ids):
            assert point.dice > 0
        else:
            assert point.dice == 0


# -- frequency series -----------------------------------------------------------


def test_frequency_series_absent_group(fixture_corpus):
    index = build_index(fixture_corpus)
    binning = slice_equal_mass(fixture_corpus, 900)
    assert frequency_series(index, binning, G("g", "zzz")) == [0] * len(binning.bins)


def test_frequency_series_matches_manifest_split(fixture_corpus, fixture_manifest):
    index = build_index(fixture_corpus)
    binning = slice_equal_mass(fixture_corpus, 900)
    series = frequency_series(index, binning, G("g", "horreum"))

    placements: dict[str, int] = {}
    for plant in fixture_manifest["plants"]:
        if plant["lemma"] != "horreum":
            continue
        for p in plant["placements"]:
            placements[p["doc"]] = placements.get(p["doc"], 0) + p["n"]
    for pair in fixture_manifest["pairs"]:
        for key in ("a", "b"):
            if pair[key] == "horreum":
                for p in pair["placements"]:
                    placements[p["doc"]] = placements.get(p["doc"], 0) + p["n"]

    expected = [
        sum(placements.get(doc_id, 0) for doc_id in bin.doc_ids) for bin in binning.bins
    ]
    assert series == expected
    assert sum(series) == oracle.group_frequency(fixture_corpus, {"horreum"}, dated_only=True)


def test_frequency_series_merged_group_additivity(fixture_corpus):
    index = build_index(fixture_corpus)
    binning = slice_equal_mass(fixture_corpus, 900)
    merged = frequency_series(index, binning, G("m", "horreum", "frumentum"))
    split_a = frequency_series(index, binning, G("a", "horreum"))
    split_b = frequency_series(index, binning, G("b", "frumentum"))
    assert merged == [a + b for a, b in zip(split_a, split_b)]


def test_series_rejects_foreign_bins(fixture_corpus):
    index = build_index(fixture_corpus)
    other = one_doc_corpus("a", "b")
    foreign = slice_equal_mass(other, 1)
    with pytest.raises(CorpusMismatchError):
        frequency_series(index, foreign, G("g", "a"))
    with pytest.raises(CorpusMismatchError):
        dice_series(index, foreign, G("a", "a"), G("b", "b"))


# -- oracle equivalence property ------------------------------------------------


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=1, max_value=8))
def test_association_equals_oracle(seed, w):
    corpus = oracle.random_corpus(seed, approx_tokens=300)
    index = build_index(corpus)
    target, probe = G("t", "l0", "l4"), G("p", "l1", "l2")
    for scope in ("all", "dated"):
        assert association_hits(index, target, probe, w, scope) == oracle.association_hits(
            corpus, target.members, probe.members, w, scope
        )


def test_scope_dated_componentwise_below_all():
    for seed in range(5):
        corpus = oracle.random_corpus(seed)
        index = build_index(corpus)
        target, probe = G("t", "l0"), G("p", "l1")
        occ_d, assoc_d = association_hits(index, target, probe, 5, "dated")
        occ_a, assoc_a = association_hits(index, target, probe, 5, "all")
        assert occ_d <= occ_a and assoc_d <= assoc_a


def test_association_window_monotonicity():
    for seed in range(5):
        corpus = oracle.random_corpus(seed, approx_tokens=300)
        index = build_index(corpus)
        target, probe = G("t", "l0"), G("p", "l1")
        previous = -1
        for w in range(1, 11):
            occ, assoc = association_hits(index, target, probe, w)
            assert assoc >= previous
            previous = assoc


# -- concordance -----------------------------------------------------------------


def test_kwic_keyword_at_position_zero():
    index = build_index(one_doc_corpus("t", "x", "y"))
    lines = concordance(index, G("t", "t"), w=2)
    assert len(lines) == 1
    assert lines[0].left == ()
    assert lines[0].keyword == "t"
    assert lines[0].right == ("x", "y")


def test_kwic_limit_zero():
    index = build_index(one_doc_corpus("t"))
    assert concordance(index, G("t", "t"), w=2, limit=0) == []


def test_kwic_limit_caps_results(fixture_corpus):
    index = build_index(fixture_corpus)
    assert len(concordance(index, G("g", "horreum"), w=3, limit=4)) == 4


def test_kwic_count_matches_year_filtered_frequency(fixture_corpus, fixture_manifest):
    index = build_index(fixture_corpus)
    lines = concordance(index, G("g", "horreum"), w=5, years=(1100, 1290))
    expected = 0
    for plant in fixture_manifest["plants"]:
        if plant["lemma"] == "horreum":
            expected += sum(
                p["n"] for p in plant["placements"]
                if p["year"] is not None and 1100 <= p["year"] <= 1290
            )
    for pair in fixture_manifest["pairs"]:
        for key in ("a", "b"):
            if pair[key] == "horreum":
                expected += sum(
                    p["n"] for p in pair["placements"]
                    if p["year"] is not None and 1100 <= p["year"] <= 1290
                )
    assert len(lines) == expected
    assert all(1100 <= line.year <= 1290 for line in lines)


def test_kwic_surface_fallback_to_lemma():
    corpus = Corpus(
        [Document("d1", DateSpec.exact(900), (Token("", "alpha"), Token("Beta", "beta")))]
    )
    index = build_index(corpus)
    lines = concordance(index, G("g", "alpha"), w=2)
    assert lines[0].keyword == "alpha"
    assert lines[0].right == ("Beta",)


def test_kwic_contexts_clipped_at_document_edges(fixture_corpus):
    index = build_index(fixture_corpus)
    for line in concordance(index, G("g", "horreum"), w=7, limit=50):
        assert len(line.left) <= 7 and len(line.right) <= 7


def test_concurrent_readers_agree(fixture_corpus):
    """The index is read-only after build: parallel queries match serial ones."""
    from concurrent.futures import ThreadPoolExecutor

    index = build_index(fixture_corpus)
    a, b = G("a", "horreum"), G("b", "frumentum")
    expected = [
        (association_hits(index, a, b, w), dice_score(index, a, b, w))
        for w in range(1, 9)
    ]

    def query(w):
        return association_hits(index, a, b, w), dice_score(index, a, b, w)

    with ThreadPoolExecutor(max_workers=8) as pool:
        results = list(pool.map(query, range(1, 9)))
    assert results == expected
