"""Batch command-line front door.

Every command reads and writes explicit file paths, is deterministic
given its inputs (simulate via --seed), and exits nonzero with a
line-numbered diagnostic on malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import corpus, evaluation, lookup, pipeline, rules, simgen
from .errors import GedPipeError
from .pipeline import AblationVariant, PipelineConfig, PipelineTables
from .reconcile import CharLookupTable
from .textnorm import NormConfig, normalize


def _add_config_arg(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--config",
        help="pipeline config JSON; values set there override flags",
    )


def _effective(args: argparse.Namespace) -> tuple[PipelineConfig, NormConfig]:
    """Fold --config over the flags; config values win where present."""
    file_cfg: dict = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            file_cfg = json.load(fh)
    variant = PipelineConfig().variant
    if getattr(args, "variant", None):
        variant = AblationVariant.from_cli(args.variant)
    if "variant" in file_cfg:
        variant = AblationVariant.from_cli(file_cfg["variant"])
    norm = NormConfig.from_dict(file_cfg["norm"]) if "norm" in file_cfg else NormConfig()

    def pick(key: str, flag_value):
        return file_cfg.get(key) or flag_value

    merged = PipelineConfig(
        variant=variant,
        norm=norm,
        char_table_path=pick("char_table_path", getattr(args, "char_table", None)),
        ruleset_path=pick("ruleset_path", getattr(args, "rules", None)),
        lookup_path=pick("lookup_path", getattr(args, "lookup", None)),
        raw_outputs_path=pick("raw_outputs_path", getattr(args, "raw", None)),
    )
    return merged, norm


def _load_tables(cfg: PipelineConfig, need_lookup: bool) -> PipelineTables:
    char_table = (
        CharLookupTable.load(cfg.char_table_path)
        if cfg.char_table_path
        else CharLookupTable.default()
    )
    ruleset = rules.RuleSet.load(cfg.ruleset_path) if cfg.ruleset_path else rules.RuleSet()
    table = None
    if need_lookup and cfg.lookup_path:
        table = lookup.SentenceLookup.load(cfg.lookup_path)
    return PipelineTables(char_table=char_table, ruleset=ruleset, lookup=table)


def cmd_validate(args: argparse.Namespace) -> int:
    records = corpus.load_corpus(args.infile, schema=args.schema)
    print(f"OK: {len(records)} records")
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    records = corpus.load_corpus(args.infile, schema="train")
    stats = corpus.corpus_stats(records)
    print(f"total {stats.total}")
    print(f"with_error {stats.with_error}")
    print(f"num_errors {stats.num_errors}")
    return 0


def cmd_mine_rules(args: argparse.Namespace) -> int:
    records = corpus.load_corpus(args.infile, schema="train")
    cfg = rules.MiningConfig(min_support=args.min_support, min_precision=args.min_precision)
    ruleset = rules.mine_common_errors(records, cfg)
    if args.wordlist:
        ruleset = ruleset.merged_words(rules.load_wordlist(args.wordlist))
    ruleset.save(args.out)
    print(f"wrote {len(ruleset.common_error_words)} common error words to {args.out}")
    return 0


def cmd_build_lookup(args: argparse.Namespace) -> int:
    _, norm = _effective(args)
    records = corpus.load_corpus(args.infile, schema="train", norm=norm)
    table = lookup.build_lookup(records, norm)
    table.save(args.out)
    print(f"wrote {len(table.entries)} entries to {args.out} ({table.conflicts} conflicts)")
    return 0


def cmd_reconcile(args: argparse.Namespace) -> int:
    cfg, norm = _effective(args)
    records = corpus.load_corpus(args.infile, schema=args.schema)
    raw_outputs = (
        pipeline.load_raw_outputs(cfg.raw_outputs_path) if cfg.raw_outputs_path else {}
    )
    tables = _load_tables(cfg, need_lookup=cfg.variant.uses_lookup)
    preds, counters = pipeline.run_pipeline(records, raw_outputs, tables, cfg.variant, norm)
    corpus.write_predictions(args.out, {p.id: p.predicted for p in preds})
    print(f"wrote {len(preds)} predictions to {args.out}")
    for name, count in counters.to_dict().items():
        print(f"{name} {count}")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    _, norm = _effective(args)
    preds = corpus.read_predictions(args.infile)
    gold_records = corpus.load_corpus(args.gold, schema="train", norm=norm)
    golds = {rec.id: normalize(rec.gold.raw, norm) for rec in gold_records}
    split = (
        evaluation.SplitAssignment.load(args.split)
        if args.split
        else evaluation.SplitAssignment.alternating(list(preds))
    )
    report = evaluation.split_report(preds, golds, split)
    payload = report.to_dict()
    print(json.dumps(payload, ensure_ascii=False, indent=2))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False, indent=2)
            fh.write("\n")
    return 0


_GRID_COLUMNS = ("Model", "Regex", "Match", "Private", "Public", "Aggregated")


def _format_grid(rows: list[tuple[str, ...]]) -> str:
    widths = [
        max(len(row[i]) for row in [_GRID_COLUMNS, *rows]) for i in range(len(_GRID_COLUMNS))
    ]
    lines = []
    for row in [_GRID_COLUMNS, *rows]:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    return "\n".join(lines)


def cmd_ablate(args: argparse.Namespace) -> int:
    cfg, norm = _effective(args)
    gold_records = corpus.load_corpus(args.gold, schema="train", norm=norm)
    golds = {rec.id: normalize(rec.gold.raw, norm) for rec in gold_records}
    raw_outputs = (
        pipeline.load_raw_outputs(cfg.raw_outputs_path) if cfg.raw_outputs_path else {}
    )
    split = (
        evaluation.SplitAssignment.load(args.split)
        if args.split
        else evaluation.SplitAssignment.alternating([rec.id for rec in gold_records])
    )
    tables = _load_tables(cfg, need_lookup=True)
    rows = []
    reports = []
    for variant in AblationVariant:
        preds, counters = pipeline.run_pipeline(gold_records, raw_outputs, tables, variant, norm)
        report = evaluation.split_report(
            {p.id: p.predicted for p in preds}, golds, split, counters, variant.value
        )
        reports.append(report.to_dict())
        rows.append(
            (
                variant.value,
                str(counters.regex_fallback) if variant.uses_regex else "-",
                str(counters.lookup_hits) if variant.uses_lookup else "-",
                f"{report.private_avg:.4f}",
                f"{report.public_avg:.4f}",
                f"{report.aggregated:.4f}",
            )
        )
    print(_format_grid(rows))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(reports, fh, ensure_ascii=False, indent=2)
            fh.write("\n")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    records = corpus.load_corpus(args.infile, schema="train")
    char_table = (
        CharLookupTable.load(args.char_table) if args.char_table else CharLookupTable.default()
    )
    word_swaps = {}
    if args.word_swaps:
        with open(args.word_swaps, encoding="utf-8") as fh:
            word_swaps = json.load(fh)
    cfg = simgen.DegradeConfig(
        char_swap_rate=args.char_swap_rate,
        word_swap_pairs=word_swaps,
        truncate_at_tokens=args.truncate_at,
        marker_drop_rate=args.marker_drop_rate,
        seed=args.seed,
        char_swap_pairs=char_table.inverted(),
    )
    outputs = {rec.id: simgen.degrade(rec.gold, cfg) for rec in records}
    pipeline.write_raw_outputs(args.out, outputs)
    print(f"wrote {len(outputs)} simulated outputs to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gedpipe",
        description="Post-inference pipeline for marked-sentence grammatical error detection",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check corpus well-formedness")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--schema", choices=("train", "test"), default="train")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("stats", help="print corpus statistics")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("mine-rules", help="learn common error words from training data")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--wordlist", help="extra always-error tokens, one per line")
    p.add_argument("--min-support", type=int, default=rules.MiningConfig().min_support)
    p.add_argument("--min-precision", type=float, default=rules.MiningConfig().min_precision)
    p.set_defaults(func=cmd_mine_rules)

    p = sub.add_parser("build-lookup", help="build the exact-match sentence table")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    _add_config_arg(p)
    p.set_defaults(func=cmd_build_lookup)

    p = sub.add_parser("reconcile", help="run the correction pipeline over raw outputs")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--schema", choices=("train", "test"), default="test")
    p.add_argument("--raw", help="raw outputs TSV")
    p.add_argument("--char-table")
    p.add_argument("--rules")
    p.add_argument("--lookup")
    p.add_argument("--variant", default=AblationVariant.CC_WC_R_L_P2.cli_name)
    p.add_argument("--out", required=True)
    _add_config_arg(p)
    p.set_defaults(func=cmd_reconcile)

    p = sub.add_parser("evaluate", help="score predictions against gold")
    p.add_argument("--in", dest="infile", required=True, help="predictions TSV")
    p.add_argument("--gold", required=True, help="train-schema gold TSV")
    p.add_argument("--split", help="id<TAB>Private|Public TSV; default alternates sorted ids")
    p.add_argument("--out", help="write the report JSON here")
    _add_config_arg(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("ablate", help="run and score all eight variants")
    p.add_argument("--gold", required=True)
    p.add_argument("--raw")
    p.add_argument("--char-table")
    p.add_argument("--rules")
    p.add_argument("--lookup")
    p.add_argument("--split")
    p.add_argument("--out", help="write all reports as JSON here")
    _add_config_arg(p)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("simulate", help="emit synthetic raw outputs from gold data")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--char-table")
    p.add_argument("--char-swap-rate", type=float, default=0.0)
    p.add_argument("--marker-drop-rate", type=float, default=0.0)
    p.add_argument("--truncate-at", type=int, default=256)
    p.add_argument("--word-swaps", help="JSON file mapping token to alternate spelling")
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UnicodeDecodeError as exc:
        print(f"error: invalid UTF-8 input: {exc}", file=sys.stderr)
        return 1
    except (GedPipeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
