"""Forensic analysis toolkit for review-bombing incidents."""

__version__ = "0.1.0"

from .corpus import (
    Corpus,
    IngestError,
    IngestResult,
    Review,
    attach_user_history,
    f_k1,
    ingest_reviews,
    write_corpus,
)
from .fakecues import (
    FakeFlag,
    SimilarityConfig,
    cue_numeric_username,
    cue_repeated_char,
    cue_repeated_token,
    detect_fakes,
    levenshtein,
    similarity_pairs,
)
from .langid import GroupingScheme, detect_language, language_summary, tag_corpus
from .phases import (
    PhasePartition,
    binary_sentiment,
    partition_equal_count,
    sentiment_bucket,
    trend_table,
)
from .stats import StatRow, cell_stats, cluster_of, label_stats, score_table, shift_report
from .textnorm import lexical_diversity, load_stoplist, normalize, remove_stopwords, tokenize
from .vocab import (
    LabelAssignment,
    VocabEntry,
    Vocabulary,
    default_vocabularies,
    expansion_step,
    filter_unlabeled,
    label_review,
    load_vocabulary,
    match_entry,
    save_vocabulary,
    top_tokens,
)

__all__ = [
    "Corpus",
    "FakeFlag",
    "GroupingScheme",
    "IngestError",
    "IngestResult",
    "LabelAssignment",
    "PhasePartition",
    "Review",
    "SimilarityConfig",
    "StatRow",
    "VocabEntry",
    "Vocabulary",
    "attach_user_history",
    "binary_sentiment",
    "cell_stats",
    "cluster_of",
    "cue_numeric_username",
    "cue_repeated_char",
    "cue_repeated_token",
    "default_vocabularies",
    "detect_fakes",
    "detect_language",
    "expansion_step",
    "f_k1",
    "filter_unlabeled",
    "ingest_reviews",
    "label_review",
    "label_stats",
    "language_summary",
    "levenshtein",
    "lexical_diversity",
    "load_stoplist",
    "load_vocabulary",
    "match_entry",
    "normalize",
    "partition_equal_count",
    "remove_stopwords",
    "save_vocabulary",
    "score_table",
    "sentiment_bucket",
    "shift_report",
    "similarity_pairs",
    "tag_corpus",
    "tokenize",
    "top_tokens",
    "trend_table",
    "write_corpus",
]
