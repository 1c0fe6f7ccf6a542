"""Command-line entry point.

Subcommands: ingest, analyze, convert, summarize, evaluate, stride-eval.
Every flag can also come from a JSON --config file (flags win); the merged
configuration is echoed into a run_config header record at the top of every
output file, so a result can always be traced back to its invocation.
Errors print one machine-parsable JSON line to stderr and exit 1; usage
problems exit 2.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import analysis, figures, jsonl, metrics, minicorpus
from .backends import make_backend
from .conversion import chains_records, export_dataset, gold_snippets, load_chains
from .corpus import SPLITS, load_corpus, save_corpus
from .errors import ConfigurationError, WinsummError
from .windowing import DEFAULT_TAU, DEFAULT_WINDOW, MODES, run_transcript

DEFAULTS = {
    "mode": "dynamic",
    "window_size": DEFAULT_WINDOW,
    "tau": DEFAULT_TAU,
    "seed": 0,
    "backend": "oracle",
    "min_overlap": 1,
    "jobs": 1,
    "lead_n": 2,
    "timeout": 60.0,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="winsumm",
                                     description="sliding-window meeting summarization toolkit")
    sub = parser.add_subparsers(dest="subcommand", metavar="subcommand")

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON file supplying any flag value (flags override)")
        return p

    p = add("ingest", "validate a corpus file and write it back normalized")
    p.add_argument("--corpus", help="input corpus file")
    p.add_argument("--demo", action="store_true", default=None,
                   help="use the bundled demo corpus as input")
    p.add_argument("--out", required=True, help="normalized corpus output")
    p.add_argument("--chains", help="coreference chains file to normalize alongside")
    p.add_argument("--chains-out", help="where to write the normalized chains")

    p = add("analyze", "corpus statistics: lengths, order concordance, coverage")
    p.add_argument("--corpus", required=True)
    p.add_argument("--split", choices=SPLITS)
    p.add_argument("--multiset-coverage", action="store_true", default=None,
                   help="count word occurrences instead of word types")
    p.add_argument("--out", required=True, help="report file (JSONL)")

    p = add("convert", "build snippet-level dataset files from a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--chains", help="coreference chains file")
    p.add_argument("--seed", type=int)
    p.add_argument("--min-overlap", type=int, dest="min_overlap")
    p.add_argument("--out-dir", required=True, dest="out_dir")

    p = add("summarize", "run the sliding-window engine over a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--split", choices=SPLITS)
    p.add_argument("--mode", choices=MODES)
    p.add_argument("--window-size", type=int, dest="window_size")
    p.add_argument("--tau", type=float)
    p.add_argument("--backend", choices=("oracle", "lead", "http"))
    p.add_argument("--endpoint", help="http backend URL (or WINSUMM_ENDPOINT)")
    p.add_argument("--timeout", type=float, help="http backend timeout in seconds")
    p.add_argument("--lead-n", type=int, dest="lead_n", help="lead backend sentence budget")
    p.add_argument("--chains", help="chains file for the oracle's gold snippets")
    p.add_argument("--min-overlap", type=int, dest="min_overlap")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, help="concurrent transcripts")
    p.add_argument("--out", help="summary output file (default: stdout)")
    p.add_argument("--trace", help="per-step trace output file")

    p = add("evaluate", "ROUGE-1/2/L of hypothesis summaries against references")
    p.add_argument("--hyp", required=True, help="hypothesis summary file")
    p.add_argument("--ref", required=True, help="reference summary file")
    p.add_argument("--out", required=True, help="report file (JSONL)")
    p.add_argument("--figure", help="render per-transcript F1 bars to this image")

    p = add("stride-eval", "boundary distances of a dynamic trace against gold snippets")
    p.add_argument("--trace", required=True, help="engine trace file")
    p.add_argument("--gold", required=True, nargs="+", help="dataset files from convert")
    p.add_argument("--corpus", required=True, help="corpus file (for character offsets)")
    p.add_argument("--out", required=True, help="report file (JSONL)")
    p.add_argument("--figure", help="render the distance histogram to this image")

    return parser


def _merge_config(args: argparse.Namespace) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("config", "subcommand")}
    if getattr(args, "config", None):
        try:
            loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config file {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigurationError(f"config file {args.config} must hold a JSON object")
        for key, value in loaded.items():
            key = key.replace("-", "_")
            if key in cfg and cfg[key] is None:
                cfg[key] = value
    for key, value in cfg.items():
        if value is None and key in DEFAULTS:
            cfg[key] = DEFAULTS[key]
    cfg["subcommand"] = args.subcommand
    return cfg


def _header(cfg: dict) -> dict:
    return {key: value for key, value in sorted(cfg.items())
            if not callable(value)}


def _summary_file(path) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, rec in jsonl.read_records(path):
        if rec.get("kind") != "summary":
            continue
        tid = jsonl.require(rec, "id", str, path=path, line=lineno)
        out[tid] = jsonl.require(rec, "text", str, path=path, line=lineno)
    if not out:
        raise ConfigurationError(f"{path} contains no summary records")
    return out


def _emit_records(records, path, header):
    if path is None:
        for rec in records:
            sys.stdout.write(jsonl.dump_record(rec) + "\n")
    else:
        jsonl.write_records(path, records, header=header)


def cmd_ingest(cfg: dict) -> int:
    corpus_path = cfg.get("corpus")
    chains_path = cfg.get("chains")
    if cfg.get("demo"):
        corpus_path, bundled_chains = minicorpus.bundled_paths()
        chains_path = chains_path or bundled_chains
    if not corpus_path:
        raise ConfigurationError("ingest needs --corpus or --demo")
    corpus = load_corpus(corpus_path)
    save_corpus(corpus, cfg["out"], header=_header(cfg))
    if cfg.get("chains_out"):
        if not chains_path:
            raise ConfigurationError("--chains-out needs --chains or --demo")
        chains = load_chains(chains_path)
        jsonl.write_records(cfg["chains_out"], chains_records(chains), header=_header(cfg))
    print(f"ingested {len(corpus.transcripts)} transcripts, "
          f"{len(corpus.references)} references, {len(corpus.splits)} split assignments "
          f"-> {cfg['out']}")
    return 0


def cmd_analyze(cfg: dict) -> int:
    corpus = load_corpus(cfg["corpus"])
    split = cfg.get("split")
    sub = corpus.filtered(split)
    stats = analysis.length_stats(corpus, split)
    concordance = analysis.order_concordance(sub)
    coverage = analysis.segment_coverage(sub, multiset=bool(cfg.get("multiset_coverage")))

    records = [{
        "kind": "length_stats", "split": split or "all",
        "transcript_count": stats.transcript_count, "summary_count": stats.summary_count,
        "avg_src_sentences": stats.avg_src_sentences, "avg_src_words": stats.avg_src_words,
        "avg_sum_sentences": stats.avg_sum_sentences, "avg_sum_words": stats.avg_sum_words,
    }]
    for tid in sorted(concordance.per_transcript):
        records.append({"kind": "concordance", "id": tid,
                        "value": concordance.per_transcript[tid]})
    records.append({"kind": "concordance_overall", "value": concordance.overall})
    for tid, sent_index in sorted(coverage.per_sentence):
        records.append({"kind": "coverage", "id": tid, "sent_index": sent_index,
                        "value": coverage.per_sentence[(tid, sent_index)]})
    records.append({"kind": "coverage_overall", "value": coverage.overall,
                    "skipped": [list(pair) for pair in coverage.skipped]})
    jsonl.write_records(cfg["out"], records, header=_header(cfg))

    print(f"split                {split or 'all'}")
    print(f"transcripts          {stats.transcript_count}")
    print(f"with summaries       {stats.summary_count}")
    print(f"avg src sentences    {stats.avg_src_sentences:.2f}")
    print(f"avg src words        {stats.avg_src_words:.2f}")
    print(f"avg sum sentences    {stats.avg_sum_sentences:.2f}")
    print(f"avg sum words        {stats.avg_sum_words:.2f}")
    print(f"order concordance    {concordance.overall:.4f}")
    print(f"segment coverage     {coverage.overall:.4f}")
    return 0


def cmd_convert(cfg: dict) -> int:
    corpus = load_corpus(cfg["corpus"])
    chains = load_chains(cfg["chains"]) if cfg.get("chains") else None
    per_split = export_dataset(corpus, chains, cfg["seed"], cfg["out_dir"],
                               min_overlap=cfg["min_overlap"], header=_header(cfg))
    for split in SPLITS:
        print(f"{split:<12} {len(per_split[split])} samples")
    return 0


def cmd_summarize(cfg: dict) -> int:
    corpus = load_corpus(cfg["corpus"]).filtered(cfg.get("split"))
    chains = load_chains(cfg["chains"]) if cfg.get("chains") else None

    kind = cfg["backend"]
    gold = None
    if kind == "oracle":
        gold = gold_snippets(corpus, chains, min_overlap=cfg["min_overlap"])
        ids = sorted(gold)
    else:
        ids = corpus.ids()
    endpoint = cfg.get("endpoint") or os.environ.get("WINSUMM_ENDPOINT")
    if kind == "http" and not endpoint:
        raise ConfigurationError("http backend needs --endpoint or WINSUMM_ENDPOINT")
    backend = make_backend(kind, gold=gold, lead_n=cfg["lead_n"],
                           endpoint=endpoint, timeout=cfg["timeout"])
    if not ids:
        raise ConfigurationError("no transcripts selected")

    def run(tid):
        return run_transcript(corpus.transcripts[tid], backend, cfg["mode"],
                              k=cfg["window_size"], tau=cfg["tau"])

    jobs = max(1, int(cfg["jobs"]))
    if jobs == 1:
        results = [run(tid) for tid in ids]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, ids))
    results.sort(key=lambda r: r.transcript_id)

    _emit_records(({"kind": "summary", "id": r.transcript_id, "mode": r.mode,
                    "text": r.summary} for r in results), cfg.get("out"), _header(cfg))
    if cfg.get("trace"):
        jsonl.write_records(cfg["trace"],
                            (step.record() for r in results for step in r.trace),
                            header=_header(cfg))
    if cfg.get("out"):
        total_steps = sum(len(r.trace) for r in results)
        print(f"summarized {len(results)} transcripts in {total_steps} steps -> {cfg['out']}")
    return 0


def cmd_evaluate(cfg: dict) -> int:
    hyp = _summary_file(cfg["hyp"])
    ref = _summary_file(cfg["ref"])
    missing = sorted(set(hyp) - set(ref))
    if missing:
        raise ConfigurationError(f"no reference for id '{missing[0]}'")

    per_id = {tid: metrics.rouge_all(hyp[tid], ref[tid]) for tid in sorted(hyp)}
    overall = metrics.average_scores(list(per_id.values()))

    records = [{"kind": "rouge", "id": tid, **per_id[tid].record()} for tid in sorted(per_id)]
    records.append({"kind": "rouge_overall", "count": len(per_id), **overall.record()})
    jsonl.write_records(cfg["out"], records, header=_header(cfg))
    if cfg.get("figure"):
        figures.rouge_figure(per_id, overall, cfg["figure"])
    print(f"R-1 {overall.r1.f1:.4f}  R-2 {overall.r2.f1:.4f}  R-L {overall.rl.f1:.4f}  "
          f"({len(per_id)} transcripts)")
    return 0


def cmd_stride_eval(cfg: dict) -> int:
    corpus = load_corpus(cfg["corpus"])

    steps: dict[str, list[dict]] = {}
    for lineno, rec in jsonl.read_records(cfg["trace"]):
        if rec.get("kind") != "step":
            continue
        tid = jsonl.require(rec, "transcript_id", str, path=cfg["trace"], line=lineno)
        steps.setdefault(tid, []).append(rec)
    if not steps:
        raise ConfigurationError(f"{cfg['trace']} contains no step records")

    gold: dict[str, list[dict]] = {}
    for path in cfg["gold"]:
        for lineno, rec in jsonl.read_records(path):
            if rec.get("kind") != "sample":
                continue
            tid = jsonl.require(rec, "transcript_id", str, path=path, line=lineno)
            gold.setdefault(tid, []).append(rec)

    predicted = []
    expected = []
    pair_records = []
    for tid in sorted(steps):
        if tid not in gold:
            raise ConfigurationError(f"no gold samples for transcript '{tid}'")
        emitting = [rec for rec in sorted(steps[tid], key=lambda r: r["step"])
                    if rec.get("snippet_text")]
        gold_snips = sorted(gold[tid], key=lambda r: r["snippet_index"])
        if len(emitting) != len(gold_snips):
            raise ConfigurationError(
                f"'{tid}': {len(emitting)} emitted snippets vs {len(gold_snips)} gold")
        for ordinal, (step, snip) in enumerate(zip(emitting, gold_snips)):
            predicted.append((tid, ordinal, step.get("boundary_utt")))
            expected.append((tid, ordinal, snip["boundary_utt"]))
            pred = step.get("boundary_utt")
            pair_records.append({"kind": "boundary_step", "transcript_id": tid,
                                 "ordinal": ordinal, "predicted": pred,
                                 "gold": snip["boundary_utt"],
                                 "utt_distance": (abs(pred - snip["boundary_utt"])
                                                  if pred is not None else None)})

    report = metrics.boundary_distance(predicted, expected, corpus.transcripts)
    jsonl.write_records(cfg["out"], pair_records + [report.record()], header=_header(cfg))
    if cfg.get("figure"):
        distances = [rec["utt_distance"] for rec in pair_records
                     if rec["utt_distance"] is not None]
        figures.distance_figure(distances, report, cfg["figure"])
    print(f"mean distance {report.mean_utt_distance:.3f} utterances / "
          f"{report.mean_char_distance:.1f} chars over {report.count} boundaries "
          f"({report.absent} absent)")
    return 0


_COMMANDS = {
    "ingest": cmd_ingest,
    "analyze": cmd_analyze,
    "convert": cmd_convert,
    "summarize": cmd_summarize,
    "evaluate": cmd_evaluate,
    "stride-eval": cmd_stride_eval,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.subcommand:
        parser.print_usage(sys.stderr)
        return 2
    try:
        cfg = _merge_config(args)
        return _COMMANDS[args.subcommand](cfg)
    except WinsummError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1
    except OSError as exc:
        print(json.dumps({"error": "OSError", "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
