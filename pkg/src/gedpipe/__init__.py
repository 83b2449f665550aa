"""gedpipe: post-inference pipeline for marked-sentence grammatical error
detection — output reconciliation, rule-based fallback, exact-match
lookup, and Levenshtein ablation reporting."""

from .corpus import (
    CorpusRecord,
    CorpusStats,
    MarkedSentence,
    corpus_stats,
    load_corpus,
    parse_marked,
    render_marked,
    strip_markers,
)
from .evaluation import EvalReport, SplitAssignment, average_distance, levenshtein, split_report
from .lookup import SentenceLookup, build_lookup, find
from .pipeline import (
    AblationVariant,
    PipelineTables,
    PredictionRecord,
    StageCounters,
    apply_p2,
    process_sentence,
    run_pipeline,
)
from .reconcile import (
    CharLookupTable,
    Corrected,
    Mismatch,
    ReconcileOutcome,
    char_correct,
    reconcile,
    word_correct,
)
from .rules import MiningConfig, RuleSet, load_wordlist, mine_common_errors, regex_correction
from .simgen import DegradeConfig, degrade
from .stages import Stage
from .textnorm import NormConfig, normalize

__version__ = "0.1.0"

__all__ = [
    "AblationVariant",
    "CharLookupTable",
    "Corrected",
    "CorpusRecord",
    "CorpusStats",
    "DegradeConfig",
    "EvalReport",
    "MarkedSentence",
    "MiningConfig",
    "Mismatch",
    "NormConfig",
    "PipelineTables",
    "PredictionRecord",
    "ReconcileOutcome",
    "RuleSet",
    "SentenceLookup",
    "SplitAssignment",
    "Stage",
    "StageCounters",
    "apply_p2",
    "average_distance",
    "build_lookup",
    "char_correct",
    "corpus_stats",
    "degrade",
    "find",
    "levenshtein",
    "load_corpus",
    "load_wordlist",
    "mine_common_errors",
    "normalize",
    "parse_marked",
    "process_sentence",
    "reconcile",
    "regex_correction",
    "render_marked",
    "run_pipeline",
    "split_report",
    "strip_markers",
    "word_correct",
]
