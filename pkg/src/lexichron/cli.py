"""Command-line front end: corpus -> analyses -> reports.

Subcommands: stats, freq, assoc, dice, field, kwic, gen-fixture. Every
command is a thin composition of library operations; outputs carry an
8-digit fingerprint over corpus + parameters so stale files are detectable.

Exit codes: 0 ok, 2 corpus/parse errors, 3 no dated documents for a
chronological analysis, 4 bad group or analysis configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction
from pathlib import Path

from . import chrono, colloc, dsm, fixtures, report
from ._kernels import BACKEND
from .chrono import EmptyDatedCorpusError, slice_equal_mass
from .colloc import build_index
from .config import ConfigError, ProjectConfig, read_config, run_fingerprint
from .corpus import (
    Corpus,
    CorpusError,
    GroupError,
    ParseError,
    parse_vertical,
    validate_groups,
)
from .dsm import DsmConfig, VocabularyError

EXIT_PARSE = 2
EXIT_NO_DATED = 3
EXIT_BAD_GROUPS = 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _fail(message: str, code: int) -> CliError:
    return CliError(message, code)


def _load_effective_config(args) -> ProjectConfig:
    cfg = read_config(args.config) if args.config else ProjectConfig()
    if args.corpus:
        cfg.corpus_paths = tuple(args.corpus)
    if args.out is not None:
        cfg.out_dir = args.out
    if getattr(args, "strictness", None) == "strict":
        cfg.strict = True
    elif getattr(args, "strictness", None) == "lenient":
        cfg.strict = False
    if getattr(args, "target_mass", None) is not None:
        cfg.target_mass = args.target_mass
    if getattr(args, "policy", None) is not None:
        cfg.policy = args.policy
    if getattr(args, "max_span", None) is not None:
        cfg.max_span = args.max_span
    if getattr(args, "window", None) is not None:
        cfg.window = args.window
    dsm_over = {}
    for key in ("dsm_window", "min_freq", "weighting", "k", "edge_threshold"):
        value = getattr(args, key, None)
        if value is not None:
            dsm_over[key.replace("dsm_window", "window")] = value
    if dsm_over:
        base = cfg.dsm
        cfg.dsm = DsmConfig(
            window=dsm_over.get("window", base.window),
            min_freq=dsm_over.get("min_freq", base.min_freq),
            weighting=dsm_over.get("weighting", base.weighting),
            k=dsm_over.get("k", base.k),
            edge_threshold=dsm_over.get("edge_threshold", base.edge_threshold),
        )
    return cfg


def _threads(args) -> int:
    if args.threads and args.threads > 0:
        return args.threads
    return os.cpu_count() or 1


def _load_corpus(cfg: ProjectConfig, args) -> Corpus:
    if not cfg.corpus_paths:
        raise _fail("no corpus given (use --corpus or a config file)", EXIT_PARSE)
    documents = []
    rejects: list = []
    for path in cfg.corpus_paths:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as err:
            raise _fail(f"cannot read corpus {path!r}: {err}", EXIT_PARSE) from err
        try:
            part = parse_vertical(text, era=cfg.era, strict=cfg.strict, rejects=rejects)
        except ParseError as err:
            raise _fail(f"{path}: {err}", EXIT_PARSE) from err
        documents.extend(part.documents)
    if rejects:
        print(f"warning: {len(rejects)} document(s) rejected", file=sys.stderr)
        if getattr(args, "rejects", None):
            out = Path(args.rejects)
            out.parent.mkdir(parents=True, exist_ok=True)
            with out.open("w", encoding="utf-8") as fh:
                for rec in rejects:
                    fh.write(json.dumps(rec, sort_keys=True) + "\n")
    seen = set()
    for doc in documents:
        if doc.id in seen:
            raise _fail(f"duplicate document id across corpus files: {doc.id!r}", EXIT_PARSE)
        seen.add(doc.id)
    corpus = Corpus(documents)
    if corpus.stats.n_documents == 0:
        raise _fail("corpus is empty", EXIT_PARSE)
    return corpus


def _resolve_groups(cfg: ProjectConfig, names, probe_name=None):
    try:
        groups = [cfg.group(name) for name in names]
        probe = cfg.group(probe_name) if probe_name else None
        validate_groups(groups + ([probe] if probe else []))
    except GroupError as err:
        raise _fail(str(err), EXIT_BAD_GROUPS) from err
    return (groups, probe) if probe_name else groups


def _bins(corpus: Corpus, cfg: ProjectConfig):
    try:
        return slice_equal_mass(
            corpus, cfg.target_mass, policy=cfg.policy, max_span=cfg.max_span
        )
    except EmptyDatedCorpusError as err:
        raise _fail(str(err), EXIT_NO_DATED) from err
    except ValueError as err:
        raise _fail(str(err), EXIT_BAD_GROUPS) from err


def _check_smoothing(smooth):
    if smooth is not None and (smooth < 3 or smooth % 2 == 0):
        raise _fail("smoothing width must be odd and >= 3", EXIT_BAD_GROUPS)


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_-]+", "-", name)


def _write(out_dir: str, name: str, content: str) -> Path:
    path = Path(out_dir) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(content, encoding="utf-8", newline="")
    print(path)
    return path


def _write_bins_csv(binning, out_dir: str, fp: str):
    content = report.emit_csv(chrono.BIN_TABLE_HEADER, chrono.bin_table_rows(binning))
    _write(out_dir, f"bins_{fp}.csv", content)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_stats(args) -> int:
    cfg = _load_effective_config(args)
    corpus = _load_corpus(cfg, args)
    stats = corpus.stats
    span = f"{stats.year_span[0]}–{stats.year_span[1]}" if stats.year_span else "-"
    rows = [
        ("documents", stats.n_documents),
        ("dated documents", stats.n_dated),
        ("tokens", stats.n_tokens),
        ("dated tokens", stats.n_dated_tokens),
        ("year span", span),
    ]
    width = max(len(k) for k, _ in rows)
    for key, value in rows:
        print(f"{key:<{width}}  {value}")
    payload = {
        "n_documents": stats.n_documents,
        "n_dated": stats.n_dated,
        "n_tokens": stats.n_tokens,
        "n_dated_tokens": stats.n_dated_tokens,
        "year_span": list(stats.year_span) if stats.year_span else None,
        "fingerprint": corpus.fingerprint,
    }
    print(json.dumps(payload, sort_keys=True))
    return 0


def cmd_freq(args) -> int:
    cfg = _load_effective_config(args)
    _check_smoothing(args.smooth)
    corpus = _load_corpus(cfg, args)
    groups = _resolve_groups(cfg, args.groups)
    binning = _bins(corpus, cfg)
    index = build_index(corpus, threads=_threads(args))

    series = {g.name: colloc.frequency_series(index, binning, g) for g in groups}
    params = {
        "groups": {g.name: sorted(g.members) for g in groups},
        "target_mass": cfg.target_mass,
        "policy": cfg.policy,
        "max_span": cfg.max_span,
        "rate": bool(args.rate),
        "smooth": args.smooth,
    }
    fp = run_fingerprint(corpus.fingerprint, "freq", params)
    bins_fp = run_fingerprint(
        corpus.fingerprint,
        "bins",
        {"target_mass": cfg.target_mass, "policy": cfg.policy, "max_span": cfg.max_span},
    )
    _write_bins_csv(binning, cfg.out_dir, bins_fp)

    header = ["bin_index", "year_start", "year_end", "midpoint"] + [g.name for g in groups]
    rows = []
    for bin in binning.bins:
        row = [bin.index, bin.year_start, bin.year_end, chrono.bin_midpoint(bin)]
        for g in groups:
            value = series[g.name][bin.index]
            if args.rate:
                row.append(report.fmt_rate(Fraction(value, bin.token_mass)))
            else:
                row.append(value)
        rows.append(row)

    slug = _slug("-".join(g.name for g in groups))
    _write(cfg.out_dir, f"freq_{slug}_{fp}.csv", report.emit_csv(header, rows))

    payload = {
        "bins": [
            {
                "index": b.index,
                "year_start": b.year_start,
                "year_end": b.year_end,
                "midpoint": chrono.bin_midpoint(b),
                "token_mass": b.token_mass,
                "n_docs": len(b.doc_ids),
                "undersized": b.undersized,
            }
            for b in binning.bins
        ],
        "series": series,
        "rate": bool(args.rate),
    }
    _write(cfg.out_dir, f"freq_{slug}_{fp}.json", report.emit_json(payload))

    try:
        svg_series = []
        for g in groups:
            points = []
            for bin in binning.bins:
                y = series[g.name][bin.index]
                if args.rate:
                    y = y / bin.token_mass
                points.append((chrono.bin_midpoint(bin), float(y)))
            svg_series.append(report.Series(g.name, tuple(points)))
        spec = report.TimelinePlotSpec(
            series=tuple(svg_series),
            y_kind="rate" if args.rate else "count",
            title=f"frequency of {', '.join(g.name for g in groups)}",
            smoothing=args.smooth,
        )
        _write(cfg.out_dir, f"freq_{slug}_{fp}.svg", report.emit_timeline_svg(spec))
    except ValueError as err:
        print(f"warning: timeline not drawn: {err}", file=sys.stderr)
    return 0


def cmd_assoc(args) -> int:
    cfg = _load_effective_config(args)
    corpus = _load_corpus(cfg, args)
    targets, probe = _resolve_groups(cfg, args.targets, args.probe)
    index = build_index(corpus, threads=_threads(args))
    try:
        table = colloc.association_table(index, targets, probe, cfg.window, args.scope)
    except (GroupError, ValueError) as err:
        raise _fail(str(err), EXIT_BAD_GROUPS) from err

    params = {
        "targets": {g.name: sorted(g.members) for g in targets},
        "probe": sorted(probe.members),
        "window": cfg.window,
        "scope": args.scope,
    }
    fp = run_fingerprint(corpus.fingerprint, "assoc", params)
    header = ["target", "occurrences", "associations", "percent"]
    rows = [
        [r.target, r.occurrences, r.associations, report.fmt_percent(r.percent)]
        for r in table
    ]
    slug = _slug(args.probe)
    _write(cfg.out_dir, f"assoc_{slug}_{fp}.csv", report.emit_csv(header, rows))
    payload = {
        "window": cfg.window,
        "scope": args.scope,
        "probe": args.probe,
        "rows": [
            {
                "target": r.target,
                "occurrences": r.occurrences,
                "associations": r.associations,
                "percent": report.fraction_json(r.percent),
            }
            for r in table
        ],
    }
    _write(cfg.out_dir, f"assoc_{slug}_{fp}.json", report.emit_json(payload))
    return 0


def cmd_dice(args) -> int:
    cfg = _load_effective_config(args)
    _check_smoothing(args.smooth)
    corpus = _load_corpus(cfg, args)
    a, b = _resolve_groups(cfg, [args.a, args.b])
    binning = _bins(corpus, cfg)
    index = build_index(corpus, threads=_threads(args))
    try:
        points = colloc.dice_series(index, binning, a, b, cfg.window)
    except (GroupError, ValueError) as err:
        raise _fail(str(err), EXIT_BAD_GROUPS) from err

    params = {
        "a": sorted(a.members),
        "b": sorted(b.members),
        "window": cfg.window,
        "target_mass": cfg.target_mass,
        "policy": cfg.policy,
        "max_span": cfg.max_span,
    }
    fp = run_fingerprint(corpus.fingerprint, "dice", params)
    bins_fp = run_fingerprint(
        corpus.fingerprint,
        "bins",
        {"target_mass": cfg.target_mass, "policy": cfg.policy, "max_span": cfg.max_span},
    )
    _write_bins_csv(binning, cfg.out_dir, bins_fp)

    header = [
        "bin_index",
        "year_start",
        "year_end",
        "midpoint",
        "f_a",
        "f_b",
        "hits_a",
        "hits_b",
        "dice",
    ]
    rows = []
    for point, bin in zip(points, binning.bins):
        rows.append(
            [
                bin.index,
                bin.year_start,
                bin.year_end,
                chrono.bin_midpoint(bin),
                point.f_a,
                point.f_b,
                point.hits_a,
                point.hits_b,
                report.fmt_rate(point.dice),
            ]
        )
    slug = _slug(f"{a.name}-{b.name}")
    _write(cfg.out_dir, f"dice_{slug}_{fp}.csv", report.emit_csv(header, rows))

    payload = {
        "a": a.name,
        "b": b.name,
        "window": cfg.window,
        "points": [
            {
                "bin": p.bin_index,
                "year_start": bin.year_start,
                "year_end": bin.year_end,
                "f_a": p.f_a,
                "f_b": p.f_b,
                "hits_a": p.hits_a,
                "hits_b": p.hits_b,
                "dice": report.fraction_json(p.dice),
            }
            for p, bin in zip(points, binning.bins)
        ],
    }
    _write(cfg.out_dir, f"dice_{slug}_{fp}.json", report.emit_json(payload))

    try:
        pts = tuple(
            (chrono.bin_midpoint(bin), float(p.dice))
            for p, bin in zip(points, binning.bins)
        )
        spec = report.TimelinePlotSpec(
            series=(report.Series(f"dice({a.name}, {b.name})", pts),),
            y_kind="dice",
            title=f"association rate of {a.name} and {b.name} (window {cfg.window})",
            smoothing=args.smooth,
        )
        _write(cfg.out_dir, f"dice_{slug}_{fp}.svg", report.emit_timeline_svg(spec))
    except ValueError as err:
        print(f"warning: timeline not drawn: {err}", file=sys.stderr)
    return 0


def cmd_field(args) -> int:
    cfg = _load_effective_config(args)
    corpus = _load_corpus(cfg, args)
    years = tuple(args.years) if args.years else None
    if years and corpus.stats.n_dated == 0:
        raise _fail("corpus has no dated documents", EXIT_NO_DATED)
    try:
        matrix = dsm.dsm_build(
            corpus,
            cfg.dsm,
            years=years,
            policy=cfg.policy,
            max_span=cfg.max_span,
            threads=_threads(args),
        )
        graph = dsm.semantic_field(matrix, args.target.lower(), cfg.dsm)
    except VocabularyError as err:
        raise _fail(str(err), EXIT_BAD_GROUPS) from err
    except CorpusError as err:
        raise _fail(str(err), EXIT_NO_DATED if years else EXIT_PARSE) from err

    params = {
        "target": args.target.lower(),
        "years": list(years) if years else None,
        "dsm": {
            "window": cfg.dsm.window,
            "min_freq": cfg.dsm.min_freq,
            "weighting": cfg.dsm.weighting,
            "k": cfg.dsm.k,
            "edge_threshold": cfg.dsm.edge_threshold,
        },
    }
    fp = run_fingerprint(corpus.fingerprint, "field", params)
    slug = _slug(args.target.lower())
    _write(cfg.out_dir, f"field_{slug}_{fp}.dot", report.emit_field_dot(graph))
    _write(cfg.out_dir, f"field_{slug}_{fp}.json", report.emit_json(report.field_json_payload(graph)))
    _write(cfg.out_dir, f"field_{slug}_{fp}.svg", report.emit_field_svg(graph))
    if args.matrix:
        triplets = dsm.matrix_triplets(matrix)
        csv_text = report.emit_csv(
            ["i", "j", "weight"], [[i, j, f"{wt:.12g}"] for i, j, wt in triplets]
        )
        _write(cfg.out_dir, f"field_{slug}_{fp}.matrix.csv", csv_text)
        _write(cfg.out_dir, f"field_{slug}_{fp}.vocab.txt", "\n".join(matrix.vocabulary) + "\n")
    return 0


def cmd_kwic(args) -> int:
    cfg = _load_effective_config(args)
    corpus = _load_corpus(cfg, args)
    (group,) = _resolve_groups(cfg, [args.group])
    index = build_index(corpus, threads=_threads(args))
    years = tuple(args.years) if args.years else None
    lines = colloc.concordance(
        index, group, cfg.window, limit=args.limit, years=years,
        policy=cfg.policy, max_span=cfg.max_span,
    )
    if args.csv:
        params = {
            "group": sorted(group.members),
            "window": cfg.window,
            "limit": args.limit,
            "years": list(years) if years else None,
        }
        fp = run_fingerprint(corpus.fingerprint, "kwic", params)
        header = ["doc_id", "year", "position", "left", "keyword", "right"]
        rows = [
            [k.doc_id, k.year if k.year is not None else "", k.position,
             " ".join(k.left), k.keyword, " ".join(k.right)]
            for k in lines
        ]
        _write(cfg.out_dir, f"kwic_{_slug(group.name)}_{fp}.csv", report.emit_csv(header, rows))
    else:
        for k in lines:
            year = k.year if k.year is not None else "----"
            left = " ".join(k.left)
            right = " ".join(k.right)
            print(f"{k.doc_id}\t{year}\t{left} [{k.keyword}] {right}")
    return 0


def cmd_gen_fixture(args) -> int:
    try:
        plan = fixtures.load_plan(args.plan)
        corpus_path, manifest_path = fixtures.write_fixture(plan, args.seed, args.out or "out")
    except fixtures.PlanError as err:
        raise _fail(str(err), EXIT_BAD_GROUPS) from err
    print(corpus_path)
    print(manifest_path)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lexichron",
        description="Diachronic corpus mining: equal-mass binning, collocation, "
        "Dice timelines, semantic fields.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s 0.1.0 ({BACKEND} kernels)")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--corpus", action="append", help="vertical corpus file (repeatable)")
    common.add_argument("--config", help="project config file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--threads", type=int, default=0, help="worker threads (0 = auto)")
    common.add_argument("--json", action="store_true", dest="json_errors",
                        help="emit errors as single-line JSON on stderr")
    common.add_argument("--rejects", help="write lenient-mode rejects to this JSONL file")
    strictness = common.add_mutually_exclusive_group()
    strictness.add_argument("--strict", dest="strictness", action="store_const", const="strict")
    strictness.add_argument("--lenient", dest="strictness", action="store_const", const="lenient")

    binargs = argparse.ArgumentParser(add_help=False)
    binargs.add_argument("--target-mass", dest="target_mass", type=int)
    binargs.add_argument("--policy", choices=chrono.POLICIES)
    binargs.add_argument("--max-span", dest="max_span", type=int)

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", parents=[common], help="corpus statistics")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("freq", parents=[common, binargs], help="per-bin frequency series")
    p.add_argument("--groups", nargs="+", required=True, help="group names or bare lemmas")
    p.add_argument("--rate", action="store_true", help="normalize by bin token mass")
    p.add_argument("--smooth", type=int, help="odd moving-average width")
    p.set_defaults(func=cmd_freq)

    p = sub.add_parser("assoc", parents=[common], help="occurrence/association cross-table")
    p.add_argument("--targets", nargs="+", required=True)
    p.add_argument("--probe", required=True)
    p.add_argument("--window", type=int)
    p.add_argument("--scope", choices=("all", "dated"), default="dated")
    p.set_defaults(func=cmd_assoc)

    p = sub.add_parser("dice", parents=[common, binargs], help="per-bin Dice timeline")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--window", type=int)
    p.add_argument("--smooth", type=int)
    p.set_defaults(func=cmd_dice)

    p = sub.add_parser("field", parents=[common], help="semantic field graph")
    p.add_argument("--target", required=True)
    p.add_argument("--years", nargs=2, type=int, metavar=("Y1", "Y2"))
    p.add_argument("--dsm-window", dest="dsm_window", type=int)
    p.add_argument("--min-freq", dest="min_freq", type=int)
    p.add_argument("--weighting", choices=("raw", "ppmi", "logdice"))
    p.add_argument("--k", type=int)
    p.add_argument("--edge-threshold", dest="edge_threshold", type=float)
    p.add_argument("--policy", choices=chrono.POLICIES)
    p.add_argument("--max-span", dest="max_span", type=int)
    p.add_argument("--matrix", action="store_true", help="also export matrix triplets + vocabulary")
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("kwic", parents=[common], help="keyword-in-context concordance")
    p.add_argument("--group", required=True)
    p.add_argument("--window", type=int)
    p.add_argument("--limit", type=int)
    p.add_argument("--years", nargs=2, type=int, metavar=("Y1", "Y2"))
    p.add_argument("--csv", action="store_true", help="write CSV instead of printing text")
    p.set_defaults(func=cmd_kwic)

    p = sub.add_parser("gen-fixture", parents=[common], help="synthetic corpus + manifest")
    p.add_argument("--plan", required=True, help="JSON plan file")
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=cmd_gen_fixture)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        try:
            return args.func(args)
        except CliError:
            raise
        except ParseError as err:
            raise _fail(str(err), EXIT_PARSE) from err
        except EmptyDatedCorpusError as err:
            raise _fail(str(err), EXIT_NO_DATED) from err
        except (GroupError, VocabularyError, ConfigError) as err:
            raise _fail(str(err), EXIT_BAD_GROUPS) from err
        except CorpusError as err:
            raise _fail(str(err), EXIT_PARSE) from err
        except ValueError as err:
            raise _fail(str(err), EXIT_BAD_GROUPS) from err
    except CliError as err:
        if getattr(args, "json_errors", False):
            print(json.dumps({"error": str(err), "code": err.code}), file=sys.stderr)
        else:
            print(f"error: {err}", file=sys.stderr)
        return err.code


if __name__ == "__main__":
    sys.exit(main())
