"""Acceptance suite: one test (or test group) per exit criterion, each
printing a PASS line on success. Run with `pytest tests/test_acceptance.py -v`
(add -s to see the lines inline).

The heavy corpora are deterministic: every random draw is seeded.
"""

from __future__ import annotations

import os
import random
import time

import pytest

from gedpipe.corpus import (
    CorpusRecord,
    MarkedSentence,
    load_corpus,
    parse_marked,
    render_marked,
    strip_markers,
)
from gedpipe.errors import OddMarkerCountError, FormatError
from gedpipe.evaluation import (
    Side,
    SplitAssignment,
    average_distance,
    levenshtein,
    split_report,
)
from gedpipe.lookup import build_lookup
from gedpipe.pipeline import AblationVariant, PipelineTables, run_pipeline
from gedpipe.reconcile import CharLookupTable, reconcile
from gedpipe.rules import RuleSet
from gedpipe.simgen import DegradeConfig, degrade
from gedpipe.stages import Stage
from gedpipe.textnorm import NormConfig, normalize

from reference import levenshtein_full_matrix

NORM = NormConfig()

VOCAB = [
    "alpha", "bravo", "carta", "delta", "fable", "gatos", "haven", "irons",
    "jolly", "koala", "lemon", "manga", "noble", "opera", "pasta", "quill",
]
RULE_WORDS = ["zarko", "velux", "quorn", "wyvex", "yonder"]
TABLE = CharLookupTable({"4": "a", "3": "e", "0": "o", "1": "i"})
WORD_SWAPS = {w: w[:-1] + "qq" for w in ("alpha", "bravo", "carta", "delta")}


def _passline(criterion: int, name: str) -> None:
    print(f"ACCEPTANCE criterion {criterion} ({name}): PASS")


def _word_span(plain: str, words: list[str], index: int) -> tuple[int, int]:
    start = len(" ".join(words[:index])) + (1 if index else 0)
    return (start, start + len(words[index]))


# ---------------------------------------------------------------------------
# Criterion 1: Table II aggregation arithmetic, exact to 4 decimals.
# ---------------------------------------------------------------------------

TABLE2_ROWS = [
    ("Raw", 3.216, 3.208, 3.212),
    ("No Corr.", 1.5072, 1.5168, 1.512),
    ("R", 1.1896, 1.1916, 1.1906),
    ("CC", 1.1072, 1.134, 1.1206),
    ("CC+R", 1.0732, 1.1048, 1.089),
    ("CC+WC+R", 1.072, 1.1012, 1.0866),
    ("CC+WC+R+L+P2", 1.0224, 1.0564, 1.0394),
]


def _split_with_means(private_mean: float, public_mean: float):
    """Synthesize predictions whose per-split distance means are exact.

    Each side holds 10,000 records, so any 4-decimal mean is an integer
    total; distances are realized as deletions of 'x' runs.
    """
    n = 10000
    preds: dict[str, str] = {}
    golds: dict[str, str] = {}
    sides: dict[str, Side] = {}
    for side, mean in ((Side.PRIVATE, private_mean), (Side.PUBLIC, public_mean)):
        total = round(mean * n)
        base, extra = divmod(total, n)
        for i in range(n):
            rec_id = f"{side.value}-{i}"
            dist = base + (1 if i < extra else 0)
            preds[rec_id] = "x" * dist
            golds[rec_id] = ""
            sides[rec_id] = side
    return preds, golds, SplitAssignment(sides)


@pytest.mark.parametrize("label,private,public,aggregated", TABLE2_ROWS)
def test_criterion_1_table2_aggregation(label, private, public, aggregated):
    start = time.perf_counter()
    preds, golds, split = _split_with_means(private, public)
    report = split_report(preds, golds, split)
    elapsed = time.perf_counter() - start
    assert round(report.private_avg, 4) == private
    assert round(report.public_avg, 4) == public
    assert round(report.aggregated, 4) == aggregated
    assert elapsed < 2.0
    _passline(1, f"Table II row {label}")


@pytest.mark.xfail(
    strict=True,
    reason=(
        "Paper-internal arithmetic slip: the CC+WC+R+L row prints aggregated "
        "1.0416, but (1.0224 + 1.0588) / 2 = 1.0406 exactly; rounding of the "
        "printed split scores can move the true mean by at most 0.0001, so "
        "1.0416 is unreachable from the stated inputs. Asserted as stated."
    ),
)
def test_criterion_1_table2_row_cc_wc_r_l_as_printed():
    preds, golds, split = _split_with_means(1.0224, 1.0588)
    report = split_report(preds, golds, split)
    assert round(report.aggregated, 4) == 1.0416


def test_criterion_1_table2_row_cc_wc_r_l_consistent_mean():
    preds, golds, split = _split_with_means(1.0224, 1.0588)
    report = split_report(preds, golds, split)
    assert round(report.aggregated, 4) == 1.0406
    _passline(1, "Table II row CC+WC+R+L (arithmetically consistent mean)")


# ---------------------------------------------------------------------------
# Criterion 2: model-score replication is out of scope by declaration.
# ---------------------------------------------------------------------------

def test_criterion_2_model_replication_substituted():
    pytest.skip(
        "Model-score replication needs the fine-tuned seq2seq model and the "
        "private competition test set; substituted by the property-based "
        "criteria 3-7 per the scope declaration."
    )


# ---------------------------------------------------------------------------
# Shared synthetic corpora.
# ---------------------------------------------------------------------------

def _random_sentence(rng: random.Random, vocab, min_words=4, max_words=9) -> list[str]:
    return [rng.choice(vocab) for _ in range(rng.randrange(min_words, max_words))]


def _make_soundness_corpus(n: int, seed: int):
    """Sentences with arbitrary (even mid-word) spans plus mixed degradations."""
    rng = random.Random(seed)
    records = []
    seen = set()
    while len(records) < n:
        plain = " ".join(_random_sentence(rng, VOCAB))
        if plain in seen:
            continue
        seen.add(plain)
        nspans = rng.randrange(0, 3)
        bounds = sorted(rng.randrange(0, len(plain) + 1) for _ in range(2 * nspans))
        spans = list(zip(bounds[0::2], bounds[1::2]))
        gold = MarkedSentence.from_plain(plain, spans)
        records.append(CorpusRecord(id=f"s{len(records):05d}", input=plain, gold=gold))
    cfg = DegradeConfig(
        char_swap_rate=0.15,
        word_swap_pairs=WORD_SWAPS,
        truncate_at_tokens=7,
        marker_drop_rate=0.1,
        seed=seed,
        char_swap_pairs=TABLE.inverted(),
    )
    raws = {rec.id: degrade(rec.gold, cfg) for rec in records}
    return records, raws


@pytest.fixture(scope="module")
def ablation_corpus():
    """2,000 records in four deterministic degradation classes:
    60% invertible char swaps, 20% word swaps, 10% truncations,
    10% dropped markers (always on rule-word spans)."""
    seed = 20240601
    rng = random.Random(seed)
    records: list[CorpusRecord] = []
    raws: dict[str, str] = {}
    lookup_ids: set[str] = set()
    seen: set[str] = set()

    swap_cfg = DegradeConfig(
        char_swap_rate=0.15, seed=seed, char_swap_pairs=TABLE.inverted(),
        truncate_at_tokens=None,
    )
    word_cfg = DegradeConfig(
        word_swap_pairs=WORD_SWAPS, seed=seed, truncate_at_tokens=None,
    )
    trunc_cfg = DegradeConfig(seed=seed, truncate_at_tokens=6)
    drop_cfg = DegradeConfig(marker_drop_rate=1.0, seed=seed, truncate_at_tokens=None)

    i = 0
    while len(records) < 2000:
        cls = len(records) % 10
        rec_id = f"a{len(records):05d}"
        i += 1
        if cls <= 5:
            # recoverable char swaps, word-aligned spans
            words = _random_sentence(rng, VOCAB, 5, 9)
            plain = " ".join(words)
            if plain in seen:
                continue
            k = rng.randrange(0, 3)
            idxs = sorted(rng.sample(range(len(words)), k)) if k else []
            spans = [_word_span(plain, words, j) for j in idxs]
            cfg = swap_cfg
        elif cls <= 7:
            # one respelled word from the swap map, one marked word
            words = _random_sentence(rng, VOCAB, 5, 9)
            words[rng.randrange(len(words))] = rng.choice(sorted(WORD_SWAPS))
            plain = " ".join(words)
            if plain in seen:
                continue
            spans = [_word_span(plain, words, rng.randrange(len(words)))]
            cfg = word_cfg
        elif cls == 8:
            # 12 tokens truncated to 6; one rule-word span in the kept
            # region, one plain span wholly beyond the cut
            words = _random_sentence(rng, VOCAB, 12, 13)
            words[1] = rng.choice(RULE_WORDS)
            plain = " ".join(words)
            if plain in seen:
                continue
            spans = sorted([_word_span(plain, words, 1), _word_span(plain, words, 8)])
            cfg = trunc_cfg
            if len(records) % 20 == 8:
                lookup_ids.add(rec_id)
        else:
            # content kept, every marker pair dropped; spans sit exactly on
            # rule words so the P2 sweep can restore them
            words = _random_sentence(rng, VOCAB, 5, 9)
            positions = sorted(rng.sample(range(len(words)), rng.randrange(1, 3)))
            for pos in positions:
                words[pos] = rng.choice(RULE_WORDS)
            plain = " ".join(words)
            if plain in seen:
                continue
            spans = [_word_span(plain, words, pos) for pos in positions]
            cfg = drop_cfg
        seen.add(plain)
        gold = MarkedSentence.from_plain(plain, spans)
        records.append(CorpusRecord(id=rec_id, input=plain, gold=gold))
        raws[rec_id] = degrade(gold, cfg)

    lookup = build_lookup([rec for rec in records if rec.id in lookup_ids], NORM)
    assert lookup.conflicts == 0
    tables = PipelineTables(
        char_table=TABLE,
        ruleset=RuleSet.build(common_error_words=RULE_WORDS),
        lookup=lookup,
    )
    return records, raws, tables


# ---------------------------------------------------------------------------
# Criterion 3: soundness on 10,000 degraded sentences, all variants but Raw.
# ---------------------------------------------------------------------------

def test_criterion_3_soundness_10k():
    start = time.perf_counter()
    records, raws = _make_soundness_corpus(10000, seed=777)
    lookup = build_lookup(records[:500], NORM)
    tables = PipelineTables(
        char_table=TABLE, ruleset=RuleSet.build(common_error_words=RULE_WORDS),
        lookup=lookup,
    )
    violations = 0
    variants = [v for v in AblationVariant if v is not AblationVariant.RAW]
    for variant in variants:
        preds, counters = run_pipeline(records, raws, tables, variant, NORM)
        assert counters.total == len(records)
        for pred in preds:
            if pred.predicted.count("$") % 2:
                violations += 1
            if variant is not AblationVariant.NO_CORRECTION:
                # NoCorrection passes degraded content through by design;
                # every managed variant must strip back to its input.
                if strip_markers(pred.predicted) != pred.input:
                    violations += 1
    elapsed = time.perf_counter() - start
    assert violations == 0
    assert elapsed < 10.0, f"soundness sweep took {elapsed:.1f}s"
    _passline(3, f"soundness, 10000 records x {len(variants)} variants in {elapsed:.1f}s")


# ---------------------------------------------------------------------------
# Criterion 4: char-swap-only degradations recover exactly, 1,000 cases.
# ---------------------------------------------------------------------------

def test_criterion_4_recoverability_1000():
    rng = random.Random(4242)
    rules = RuleSet.build(common_error_words=RULE_WORDS)
    recovered = 0
    for i in range(1000):
        plain = " ".join(_random_sentence(rng, VOCAB))
        nspans = rng.randrange(0, 3)
        bounds = sorted(rng.randrange(0, len(plain) + 1) for _ in range(2 * nspans))
        gold = MarkedSentence.from_plain(plain, list(zip(bounds[0::2], bounds[1::2])))
        cfg = DegradeConfig(
            char_swap_rate=rng.uniform(0.0, 0.2),
            seed=i,
            char_swap_pairs=TABLE.inverted(),
            truncate_at_tokens=None,
        )
        outcome = reconcile(degrade(gold, cfg), plain, TABLE, rules)
        if outcome.stage is Stage.CHAR_LEVEL and outcome.result == gold.raw:
            recovered += 1
    assert recovered == 1000
    _passline(4, "recoverability, 1000/1000 char-swap cases exact")


# ---------------------------------------------------------------------------
# Criterion 5: optimized metric vs full DP matrix, plus metric axioms.
# ---------------------------------------------------------------------------

MIXED_ALPHABET = "abcdef আমিভাতখাই$।,XYZ 0123"


def test_criterion_5_metric_oracle_10k_pairs():
    rng = random.Random(55)
    discrepancies = 0
    for _ in range(10000):
        a = "".join(rng.choice(MIXED_ALPHABET) for _ in range(rng.randrange(0, 65)))
        b = "".join(rng.choice(MIXED_ALPHABET) for _ in range(rng.randrange(0, 65)))
        if levenshtein(a, b) != levenshtein_full_matrix(a, b):
            discrepancies += 1
    assert discrepancies == 0
    _passline(5, "metric oracle, 10000 pairs, zero discrepancies")


def test_criterion_5_metric_axioms_1000_triples():
    rng = random.Random(56)
    for _ in range(1000):
        a, b, c = (
            "".join(rng.choice(MIXED_ALPHABET) for _ in range(rng.randrange(0, 48)))
            for _ in range(3)
        )
        assert levenshtein(a, a) == 0
        assert levenshtein(a, b) == levenshtein(b, a)
        assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)
        assert levenshtein(a, b) >= abs(len(a) - len(b))
    _passline(5, "metric axioms, 1000 triples")


# ---------------------------------------------------------------------------
# Criterion 6: ablation monotonicity on the mixed 2,000-record corpus.
# ---------------------------------------------------------------------------

def test_criterion_6_ablation_monotonicity(ablation_corpus):
    start = time.perf_counter()
    records, raws, tables = ablation_corpus
    golds = {rec.id: normalize(rec.gold.raw, NORM) for rec in records}
    split = SplitAssignment.alternating([rec.id for rec in records])
    chain = [
        AblationVariant.RAW,
        AblationVariant.NO_CORRECTION,
        AblationVariant.CC,
        AblationVariant.CC_WC_R,
        AblationVariant.CC_WC_R_L,
        AblationVariant.CC_WC_R_L_P2,
    ]
    scores = {}
    for variant in chain:
        preds, _ = run_pipeline(records, raws, tables, variant, NORM)
        report = split_report({p.id: p.predicted for p in preds}, golds, split)
        scores[variant] = report.aggregated
    elapsed = time.perf_counter() - start
    for earlier, later in zip(chain, chain[1:]):
        assert scores[later] <= scores[earlier], (
            f"{later.value} ({scores[later]:.4f}) worse than "
            f"{earlier.value} ({scores[earlier]:.4f})"
        )
    assert scores[AblationVariant.CC_WC_R_L_P2] <= scores[AblationVariant.CC_WC_R_L]
    assert elapsed < 30.0, f"ablation sweep took {elapsed:.1f}s"
    chain_text = " >= ".join(f"{scores[v]:.4f}" for v in chain)
    _passline(6, f"ablation monotone: {chain_text} ({elapsed:.1f}s)")


# ---------------------------------------------------------------------------
# Criterion 7: training replays resolve via lookup at distance zero.
# ---------------------------------------------------------------------------

def test_criterion_7_lookup_exactness(ablation_corpus):
    records, _, tables = ablation_corpus
    replay = build_lookup(records, NORM)
    assert replay.conflicts == 0
    full_tables = PipelineTables(
        char_table=tables.char_table, ruleset=tables.ruleset, lookup=replay
    )
    raws = {rec.id: "model noise" for rec in records}
    preds, counters = run_pipeline(records, raws, full_tables, AblationVariant.CC_WC_R_L, NORM)
    golds = {rec.id: normalize(rec.gold.raw, NORM) for rec in records}
    assert counters.lookup_hits == len(records)
    assert all(pred.stage is Stage.LOOKUP for pred in preds)
    assert average_distance({p.id: p.predicted for p in preds}, golds) == 0.0
    _passline(7, f"lookup exactness, {len(records)} replayed records at distance 0")


# ---------------------------------------------------------------------------
# Criterion 8: corpus statistics against an independent recount.
# ---------------------------------------------------------------------------

def _recount_stats_from_file(path) -> tuple[int, int, int]:
    """Oracle: recount totals straight off the TSV text."""
    lines = path.read_text(encoding="utf-8").splitlines()[1:]
    total = len(lines)
    with_error = 0
    num_errors = 0
    for line in lines:
        gold_cell = line.split("\t")[2]
        pairs = gold_cell.count("$") // 2
        if pairs:
            with_error += 1
            num_errors += pairs
    return total, with_error, num_errors


def test_criterion_8_stats_fixture(fold_sample, capsys):
    from gedpipe.cli import main

    assert main(["stats", "--in", str(fold_sample)]) == 0
    out = capsys.readouterr().out
    printed = dict(line.split() for line in out.strip().splitlines())
    expected = _recount_stats_from_file(fold_sample)
    assert (
        int(printed["total"]),
        int(printed["with_error"]),
        int(printed["num_errors"]),
    ) == expected
    _passline(8, f"stats on shipped fixture match recount {expected}")


@pytest.mark.parametrize(
    "env_var,expected",
    [
        ("GEDPIPE_FOLD1", (9385, 3693, 7133)),
        ("GEDPIPE_FOLD2", (10000, 4393, 7352)),
    ],
)
def test_criterion_8_stats_real_folds(env_var, expected, capsys):
    path = os.environ.get(env_var)
    if not path:
        pytest.skip(f"{env_var} not set; real fold not available in this environment")
    from gedpipe.cli import main

    assert main(["stats", "--in", path]) == 0
    out = capsys.readouterr().out
    printed = dict(line.split() for line in out.strip().splitlines())
    assert (
        int(printed["total"]),
        int(printed["with_error"]),
        int(printed["num_errors"]),
    ) == expected
    _passline(8, f"stats on {env_var} match the published counts")


# ---------------------------------------------------------------------------
# Criterion 9: byte-identical round-trips and odd-marker rejection.
# ---------------------------------------------------------------------------

def test_criterion_9_roundtrip_fixture_lines(fold_sample):
    lines = fold_sample.read_text(encoding="utf-8").splitlines()[1:]
    for line in lines:
        gold_cell = line.split("\t")[2]
        parsed = parse_marked(gold_cell)
        assert render_marked(parsed.plain, parsed.spans) == gold_cell
    _passline(9, f"round-trip byte-identical on {len(lines)} fixture lines")


def test_criterion_9_odd_marker_rejection(fold_sample, tmp_path):
    rng = random.Random(9)
    lines = fold_sample.read_text(encoding="utf-8").splitlines()[1:]
    rejected = 0
    cases = []
    for i in range(100):
        base = lines[rng.randrange(len(lines))].split("\t")[2]
        pos = rng.randrange(len(base) + 1)
        cases.append(base[:pos] + "$" + base[pos:])
    for malformed in cases:
        assert malformed.count("$") % 2 == 1
        with pytest.raises(OddMarkerCountError):
            parse_marked(malformed)
        rejected += 1
    assert rejected == len(cases)

    # the same rejection, through a file, must carry the line number
    bad_file = tmp_path / "bad.tsv"
    bad_line_no = 17
    rows = ["id\tinput\tgold"]
    for i, line in enumerate(lines[:30], start=2):
        rec_id, input_text, gold = line.split("\t")
        if i == bad_line_no:
            gold = "$" + gold
            input_text = strip_markers(gold)
        rows.append(f"{rec_id}\t{input_text}\t{gold}")
    bad_file.write_text("\n".join(rows) + "\n", encoding="utf-8")
    with pytest.raises(FormatError) as exc_info:
        load_corpus(bad_file, schema="train")
    assert exc_info.value.line_no == bad_line_no
    _passline(9, f"{len(cases)} odd-marker cases rejected; file rejection names the line")
