"""Diachronic corpus mining for lemmatized, dated text collections.

Pipeline: parse a vertical corpus, slice it into equal-token-mass
chronological bins, then run frequency series, windowed association tables,
Dice timelines, KWIC concordances and distributional semantic fields over it.
"""

from ._kernels import BACKEND as kernel_backend
from .chrono import (
    Binning,
    ChronoBin,
    YearAssignment,
    assign_year,
    bin_label,
    bin_midpoint,
    slice_equal_mass,
)
from .colloc import (
    CoocRow,
    DicePoint,
    KwicLine,
    PositionalIndex,
    association_hits,
    association_table,
    build_index,
    concordance,
    dice_score,
    dice_series,
    frequency_series,
    percent,
)
from .corpus import (
    Corpus,
    CorpusError,
    CorpusStats,
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
from .dsm import (
    DsmConfig,
    DsmMatrix,
    FieldGraph,
    FieldOverlap,
    VocabularyError,
    cosine_neighbors,
    dsm_build,
    field_overlap,
    logdice_weight,
    ppmi_weight,
    semantic_field,
)

__version__ = "0.1.0"

__all__ = [
    "kernel_backend",
    "__version__",
    # corpus
    "Corpus", "CorpusError", "CorpusStats", "DateSpec", "Document", "GroupError",
    "LemmaGroup", "ParseError", "Token", "group_frequency", "lexicon_report",
    "parse_vertical", "serialize_vertical", "total_mentions", "validate_groups",
    # chrono
    "Binning", "ChronoBin", "YearAssignment", "assign_year", "bin_label",
    "bin_midpoint", "slice_equal_mass",
    # colloc
    "CoocRow", "DicePoint", "KwicLine", "PositionalIndex", "association_hits",
    "association_table", "build_index", "concordance", "dice_score",
    "dice_series", "frequency_series", "percent",
    # dsm
    "DsmConfig", "DsmMatrix", "FieldGraph", "FieldOverlap", "VocabularyError",
    "cosine_neighbors", "dsm_build", "field_overlap", "logdice_weight",
    "ppmi_weight", "semantic_field",
]
