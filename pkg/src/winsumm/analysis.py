"""Corpus characterization: length statistics, agenda-order concordance, coverage.

Order concordance treats a summary as agenda-ordered to the extent that its
sentences (positioned at the smallest linked utterance index) form a long
non-decreasing subsequence; the reported fraction is |LNDS| / annotated count.
Coverage is word-type recall of each annotated summary sentence against the
tokens of its supporting utterance range; a multiset variant is available
behind a flag but the default is type-level.
"""

from __future__ import annotations

from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass

from .corpus import Corpus
from .tokenization import tokenize_words


@dataclass(frozen=True)
class CorpusStats:
    avg_src_sentences: float
    avg_src_words: float
    avg_sum_sentences: float
    avg_sum_words: float
    transcript_count: int
    summary_count: int


@dataclass(frozen=True)
class ConcordanceReport:
    per_transcript: dict[str, float]
    overall: float


@dataclass(frozen=True)
class CoverageReport:
    per_sentence: dict[tuple[str, int], float]
    overall: float
    skipped: tuple[tuple[str, int], ...]


def length_stats(corpus: Corpus, split: str | None = None) -> CorpusStats:
    """Average source/summary lengths at sentence and word level.

    One utterance counts as one source sentence. Summary averages run over
    transcripts that have a reference; source averages over all selected.
    """
    selected = corpus.filtered(split)
    transcripts = list(selected.transcripts.values())
    if not transcripts:
        raise ValueError(f"no transcripts selected (split={split!r})")
    src_sent = sum(len(t.utterances) for t in transcripts) / len(transcripts)
    src_words = sum(t.n_tokens for t in transcripts) / len(transcripts)
    refs = [selected.references[tid] for tid in selected.references]
    if refs:
        sum_sent = sum(len(r) for r in refs) / len(refs)
        sum_words = sum(sum(len(tokenize_words(s.text)) for s in r) for r in refs) / len(refs)
    else:
        sum_sent = 0.0
        sum_words = 0.0
    return CorpusStats(
        avg_src_sentences=src_sent,
        avg_src_words=src_words,
        avg_sum_sentences=sum_sent,
        avg_sum_words=sum_words,
        transcript_count=len(transcripts),
        summary_count=len(refs),
    )


def lnds_members(values: list[int]) -> list[int]:
    """Indices of one fixed longest non-decreasing subsequence (patience construction)."""
    if not values:
        return []
    tails_val: list[int] = []   # smallest tail value of an LNDS of each length
    tails_idx: list[int] = []
    parent = [-1] * len(values)
    for i, v in enumerate(values):
        pos = bisect_right(tails_val, v)
        if pos == len(tails_val):
            tails_val.append(v)
            tails_idx.append(i)
        else:
            tails_val[pos] = v
            tails_idx[pos] = i
        parent[i] = tails_idx[pos - 1] if pos > 0 else -1
    members = []
    i = tails_idx[-1]
    while i != -1:
        members.append(i)
        i = parent[i]
    return members[::-1]


def sentence_positions(corpus: Corpus, transcript_id: str) -> list[int]:
    """Occurrence positions (min linked utterance index) of annotated sentences, in summary order."""
    return [min(s.links) for s in corpus.references.get(transcript_id, ())
            if s.links]


def order_concordance(corpus: Corpus) -> ConcordanceReport:
    per_transcript: dict[str, float] = {}
    concordant = 0
    total = 0
    for tid in sorted(corpus.references):
        positions = sentence_positions(corpus, tid)
        if not positions:
            continue
        n_concordant = len(lnds_members(positions))
        per_transcript[tid] = n_concordant / len(positions)
        concordant += n_concordant
        total += len(positions)
    if total == 0:
        raise ValueError("no summary sentence carries links; concordance is undefined")
    return ConcordanceReport(per_transcript=per_transcript, overall=concordant / total)


def segment_coverage(corpus: Corpus, multiset: bool = False) -> CoverageReport:
    per_sentence: dict[tuple[str, int], float] = {}
    skipped: list[tuple[str, int]] = []
    matched_total = 0
    types_total = 0
    for tid in sorted(corpus.references):
        transcript = corpus.transcripts[tid]
        for sentence in corpus.references[tid]:
            if not sentence.links:
                continue
            tokens = tokenize_words(sentence.text)
            if not tokens:
                skipped.append((tid, sentence.sent_index))
                continue
            first, last = min(sentence.links), max(sentence.links)
            segment_tokens = [tok for u in transcript.utterances[first:last + 1]
                              for tok in tokenize_words(u.text)]
            if multiset:
                have = Counter(tokens)
                matched = sum((have & Counter(segment_tokens)).values())
                denom = len(tokens)
            else:
                have = set(tokens)
                matched = len(have & set(segment_tokens))
                denom = len(have)
            per_sentence[(tid, sentence.sent_index)] = matched / denom
            matched_total += matched
            types_total += denom
    if types_total == 0:
        raise ValueError("no annotated summary sentence with tokens; coverage is undefined")
    return CoverageReport(per_sentence=per_sentence,
                          overall=matched_total / types_total,
                          skipped=tuple(skipped))
