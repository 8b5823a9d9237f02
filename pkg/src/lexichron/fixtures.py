"""Synthetic corpus generator with a ground-truth manifest.

A JSON plan describes what to plant; the generator writes a deterministic
vertical corpus plus a manifest recording every planted truth, which the
test suite uses as its oracle. Plan shape:

    {
      "era": [800, 1300],
      "background": {
        "docs": 50,
        "tokens": [40, 120],
        "vocab_size": 120,
        "undated_docs": 3,
        "interval_docs": 5,
        "interval_width": [10, 80],
        "punct_rate": 0.08
      },
      "plants": [
        {"lemma": "horreum", "count": 17, "years": [900, 950]},
        {"pair": ["granarium", "frumentum"], "count": 12, "gap": 1,
         "years": [1100, 1300]},
        {"lemma": "spelta", "count": 4, "years": null}
      ],
      "clusters": [
        {"members": ["granarium", "granica"], "twins": true,
         "contexts": ["granum", "modius", "sextarius", "decima"],
         "count": 18, "years": [1100, 1300]}
      ]
    }

Background filler lemmas match ``f###`` (plus "." for punctuation) and are
reserved: planted lemmas and cluster contexts must not collide with them.
Every planted segment is padded with fillers (or cluster context lemmas) so
that plants are at indexed distance > PAD_WIDTH from anything outside their
segment; analyses with window <= PAD_WIDTH see exactly the planted geometry.
"""

from __future__ import annotations

import json
import random
import re
from pathlib import Path

from .corpus import Corpus, CorpusError, DateSpec, Document, Token

PAD_WIDTH = 10
_FILLER_RE = re.compile(r"^(f\d+|\.)$")


class PlanError(CorpusError):
    pass


def load_plan(path: str | Path) -> dict:
    try:
        plan = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as err:
        raise PlanError(f"cannot read plan {path}: {err}") from err
    validate_plan(plan)
    return plan


def validate_plan(plan: dict) -> None:
    if not isinstance(plan, dict):
        raise PlanError("plan must be a JSON object")
    era = plan.get("era", [800, 1300])
    if not (isinstance(era, list) and len(era) == 2 and era[0] < era[1]):
        raise PlanError("era must be [min_year, max_year]")
    tokens = plan.get("background", {}).get("tokens", [40, 120])
    if not (isinstance(tokens, list) and len(tokens) == 2 and 1 <= tokens[0] <= tokens[1]):
        raise PlanError("background tokens must be [min >= 1, max >= min]")
    reserved = []
    for plant in plan.get("plants", []):
        if "lemma" in plant:
            reserved.append(plant["lemma"])
        elif "pair" in plant:
            if not (isinstance(plant["pair"], list) and len(plant["pair"]) == 2):
                raise PlanError("pair plant needs exactly two lemmas")
            reserved.extend(plant["pair"])
            if plant.get("gap", 1) < 1:
                raise PlanError("pair gap must be >= 1")
        else:
            raise PlanError("plant needs a 'lemma' or 'pair' key")
        if plant.get("count", 0) < 1:
            raise PlanError("plant count must be >= 1")
    for cluster in plan.get("clusters", []):
        members = cluster.get("members", [])
        contexts = cluster.get("contexts", [])
        if len(members) < 1 or len(contexts) < 2:
            raise PlanError("cluster needs members and >= 2 context lemmas")
        if cluster.get("count", 0) < 1:
            raise PlanError("cluster count must be >= 1")
        reserved.extend(members)
        reserved.extend(contexts)
    for lemma in reserved:
        if not isinstance(lemma, str) or not lemma or _FILLER_RE.match(lemma):
            raise PlanError(f"planted lemma {lemma!r} is empty or collides with fillers")


def _filler(rng: random.Random, vocab_size: int) -> str:
    return f"f{rng.randrange(vocab_size):03d}"


def _surface(rng: random.Random, lemma: str) -> str:
    if lemma != "." and rng.random() < 0.1:
        return lemma.capitalize()
    return lemma


def _background_tokens(rng, count, vocab_size, punct_rate):
    tokens = []
    for _ in range(count):
        if rng.random() < punct_rate:
            tokens.append(Token(".", "."))
        else:
            lemma = _filler(rng, vocab_size)
            tokens.append(Token(_surface(rng, lemma), lemma))
    return tokens


def generate(plan: dict, seed: int) -> tuple[Corpus, dict]:
    """Build the synthetic corpus and its manifest. Deterministic in (plan, seed)."""
    validate_plan(plan)
    rng = random.Random(seed)
    era = tuple(plan.get("era", [800, 1300]))
    bg = plan.get("background", {})
    n_docs = bg.get("docs", 50)
    tok_lo, tok_hi = bg.get("tokens", [40, 120])
    vocab_size = bg.get("vocab_size", 120)
    n_undated = bg.get("undated_docs", 0)
    n_interval = bg.get("interval_docs", 0)
    iw_lo, iw_hi = bg.get("interval_width", [10, 80])
    punct_rate = bg.get("punct_rate", 0.05)
    if n_undated + n_interval > n_docs:
        raise PlanError("undated_docs + interval_docs exceeds docs")

    # document skeletons: token lists stay mutable until the end
    docs: list[dict] = []
    kinds = ["undated"] * n_undated + ["interval"] * n_interval
    kinds += ["exact"] * (n_docs - len(kinds))
    rng.shuffle(kinds)
    for i, kind in enumerate(kinds):
        if kind == "undated":
            date = DateSpec.undated()
        elif kind == "interval":
            ymin = rng.randint(era[0], max(era[0], era[1] - iw_lo))
            width = rng.randint(iw_lo, iw_hi)
            ymax = min(era[1], ymin + width)
            date = DateSpec.interval(ymin, ymax) if ymax > ymin else DateSpec.exact(ymin)
        else:
            date = DateSpec.exact(rng.randint(era[0], era[1]))
        docs.append(
            {
                "id": f"d{i + 1:04d}",
                "date": date,
                "tokens": _background_tokens(
                    rng, rng.randint(tok_lo, tok_hi), vocab_size, punct_rate
                ),
            }
        )

    def candidates(years):
        if years is None:
            pool = [d for d in docs if d["date"].kind == "undated"]
        else:
            pool = [
                d
                for d in docs
                if d["date"].kind == "exact" and years[0] <= d["date"].year_min <= years[1]
            ]
        if not pool:
            # no suitable document: create one so the plant always lands
            if years is None:
                date = DateSpec.undated()
            else:
                date = DateSpec.exact(rng.randint(max(years[0], era[0]), min(years[1], era[1])))
            doc = {
                "id": f"d{len(docs) + 1:04d}",
                "date": date,
                "tokens": _background_tokens(rng, rng.randint(tok_lo, tok_hi), vocab_size, punct_rate),
            }
            docs.append(doc)
            pool = [doc]
        return pool

    def pad(k=PAD_WIDTH):
        return [Token(_surface(rng, lemma), lemma) for lemma in
                (_filler(rng, vocab_size) for _ in range(k))]

    def doc_year(d):
        return d["date"].year_min if d["date"].kind == "exact" else None

    manifest_plants = []
    manifest_pairs = []
    for plant in plan.get("plants", []):
        years = plant.get("years")
        years = tuple(years) if years is not None else None
        count = plant["count"]
        if "lemma" in plant:
            lemma = plant["lemma"]
            placements: dict[str, dict] = {}
            for _ in range(count):
                doc = rng.choice(candidates(years))
                doc["tokens"] += pad() + [Token(_surface(rng, lemma), lemma)] + pad()
                rec = placements.setdefault(
                    doc["id"], {"doc": doc["id"], "year": doc_year(doc), "n": 0}
                )
                rec["n"] += 1
            manifest_plants.append(
                {
                    "lemma": lemma,
                    "count": count,
                    "years": list(years) if years else None,
                    "placements": sorted(placements.values(), key=lambda r: r["doc"]),
                }
            )
        else:
            a, b = plant["pair"]
            gap = plant.get("gap", 1)
            placements = {}
            for _ in range(count):
                doc = rng.choice(candidates(years))
                middle = pad(gap - 1) if gap > 1 else []
                doc["tokens"] += (
                    pad()
                    + [Token(_surface(rng, a), a)]
                    + middle
                    + [Token(_surface(rng, b), b)]
                    + pad()
                )
                rec = placements.setdefault(
                    doc["id"], {"doc": doc["id"], "year": doc_year(doc), "n": 0}
                )
                rec["n"] += 1
            manifest_pairs.append(
                {
                    "a": a,
                    "b": b,
                    "gap": gap,
                    "count": count,
                    "years": list(years) if years else None,
                    "placements": sorted(placements.values(), key=lambda r: r["doc"]),
                }
            )

    manifest_clusters = []
    for cluster in plan.get("clusters", []):
        members = list(cluster["members"])
        contexts = list(cluster["contexts"])
        count = cluster["count"]
        twins = bool(cluster.get("twins", False))
        years = cluster.get("years")
        years = tuple(years) if years is not None else None
        for _ in range(count):
            # one context template per round; twins share it verbatim so
            # their cooccurrence rows come out identical
            template = [rng.choice(contexts) for _ in range(2 * PAD_WIDTH + 2)]
            for j, member in enumerate(members):
                if not twins and j > 0:
                    template = [rng.choice(contexts) for _ in range(2 * PAD_WIDTH + 2)]
                seg = [Token(t, t) for t in template]
                seg.insert(PAD_WIDTH + 1, Token(member, member))
                doc = rng.choice(candidates(years))
                doc["tokens"] += seg
        manifest_clusters.append(
            {
                "members": members,
                "contexts": contexts,
                "count": count,
                "twins": twins,
                "years": list(years) if years else None,
            }
        )

    documents = [
        Document(d["id"], d["date"], tuple(d["tokens"]), collection="synthetic")
        for d in docs
    ]
    corpus = Corpus(documents)

    lemma_counts: dict[str, int] = {}
    lemma_counts_dated: dict[str, int] = {}
    planted = {p["lemma"] for p in manifest_plants}
    for p in manifest_pairs:
        planted.update((p["a"], p["b"]))
    for c in manifest_clusters:
        planted.update(c["members"])
        planted.update(c["contexts"])
    for doc in documents:
        for tok in doc.tokens:
            if tok.lemma in planted:
                lemma_counts[tok.lemma] = lemma_counts.get(tok.lemma, 0) + 1
                if doc.date.is_dated:
                    lemma_counts_dated[tok.lemma] = lemma_counts_dated.get(tok.lemma, 0) + 1

    stats = corpus.stats
    manifest = {
        "seed": seed,
        "era": list(era),
        "pad_width": PAD_WIDTH,
        "n_documents": stats.n_documents,
        "n_dated": stats.n_dated,
        "n_tokens": stats.n_tokens,
        "n_dated_tokens": stats.n_dated_tokens,
        "year_span": list(stats.year_span) if stats.year_span else None,
        "documents": [
            {
                "id": doc.id,
                "kind": doc.date.kind,
                "year_min": doc.date.year_min,
                "year_max": doc.date.year_max,
                "n_tokens": len(doc.tokens),
            }
            for doc in documents
        ],
        "lemma_counts": dict(sorted(lemma_counts.items())),
        "lemma_counts_dated": dict(sorted(lemma_counts_dated.items())),
        "plants": manifest_plants,
        "pairs": manifest_pairs,
        "clusters": manifest_clusters,
    }
    return corpus, manifest


def write_fixture(plan: dict, seed: int, out_dir: str | Path) -> tuple[Path, Path]:
    """Write fixture.vrt and manifest.json under out_dir; returns both paths."""
    from .corpus import serialize_vertical

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus, manifest = generate(plan, seed)
    corpus_path = out / "fixture.vrt"
    manifest_path = out / "manifest.json"
    corpus_path.write_text(serialize_vertical(corpus), encoding="utf-8")
    manifest_path.write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return corpus_path, manifest_path
