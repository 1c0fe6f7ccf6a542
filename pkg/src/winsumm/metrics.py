"""Exact ROUGE-1/2/L and boundary-distance evaluation.

ROUGE here is the plain Lin (2004) form over the pinned word tokenizer:
clipped n-gram overlap for ROUGE-N, whole-text LCS for ROUGE-L, no
stemming, no stopword removal. Boundary distance compares predicted and
gold supporting-utterance indices step by step, in utterances and in
characters between utterance end offsets.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from .corpus import Transcript
from .tokenization import tokenize_words


@dataclass(frozen=True)
class PrfScore:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, overlap: float, hyp_total: int, ref_total: int) -> "PrfScore":
        p = overlap / hyp_total if hyp_total else 0.0
        r = overlap / ref_total if ref_total else 0.0
        f1 = 2 * p * r / (p + r) if p + r else 0.0
        return cls(precision=p, recall=r, f1=f1)


@dataclass(frozen=True)
class RougeScore:
    r1: PrfScore
    r2: PrfScore
    rl: PrfScore

    def record(self) -> dict:
        out: dict = {}
        for name, score in (("r1", self.r1), ("r2", self.r2), ("rl", self.rl)):
            out[name] = {"p": score.precision, "r": score.recall, "f1": score.f1}
        return out


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(hypothesis: str, reference: str, n: int) -> PrfScore:
    hyp = _ngrams(tokenize_words(hypothesis), n)
    ref = _ngrams(tokenize_words(reference), n)
    overlap = sum(min(count, ref[gram]) for gram, count in hyp.items())
    return PrfScore.from_counts(overlap, sum(hyp.values()), sum(ref.values()))


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(hypothesis: str, reference: str) -> PrfScore:
    hyp = tokenize_words(hypothesis)
    ref = tokenize_words(reference)
    return PrfScore.from_counts(_lcs_length(hyp, ref), len(hyp), len(ref))


def rouge_all(hypothesis: str, reference: str) -> RougeScore:
    return RougeScore(r1=rouge_n(hypothesis, reference, 1),
                      r2=rouge_n(hypothesis, reference, 2),
                      rl=rouge_l(hypothesis, reference))


def average_scores(scores: Sequence[RougeScore]) -> RougeScore:
    if not scores:
        raise ValueError("cannot average an empty score list")

    def mean(pick) -> PrfScore:
        n = len(scores)
        return PrfScore(precision=sum(pick(s).precision for s in scores) / n,
                        recall=sum(pick(s).recall for s in scores) / n,
                        f1=sum(pick(s).f1 for s in scores) / n)

    return RougeScore(r1=mean(lambda s: s.r1), r2=mean(lambda s: s.r2),
                      rl=mean(lambda s: s.rl))


@dataclass(frozen=True)
class StrideReport:
    mean_utt_distance: float
    mean_char_distance: float
    count: int
    absent: int

    def record(self) -> dict:
        return {"kind": "stride_report", "mean_utt_distance": self.mean_utt_distance,
                "mean_char_distance": self.mean_char_distance, "count": self.count,
                "absent": self.absent}


BoundaryStep = tuple[str, int, int | None]  # (transcript_id, step, utterance index)


def boundary_distance(predicted: Sequence[BoundaryStep], gold: Sequence[BoundaryStep],
                      transcripts: Mapping[str, Transcript]) -> StrideReport:
    """Mean |predicted − gold| boundary distance over aligned steps.

    Steps where the prediction is absent are excluded from the means and
    tallied in `absent`. The two lists must align pairwise on
    (transcript_id, step).
    """
    if len(predicted) != len(gold):
        raise ValueError(f"{len(predicted)} predictions vs {len(gold)} gold steps")
    utt_total = 0
    char_total = 0
    count = 0
    absent = 0
    for (p_tid, p_step, p_utt), (g_tid, g_step, g_utt) in zip(predicted, gold):
        if (p_tid, p_step) != (g_tid, g_step):
            raise ValueError(f"misaligned steps: ({p_tid}, {p_step}) vs ({g_tid}, {g_step})")
        if g_utt is None:
            raise ValueError(f"gold boundary missing at ({g_tid}, {g_step})")
        if p_utt is None:
            absent += 1
            continue
        transcript = transcripts[p_tid]
        utt_total += abs(p_utt - g_utt)
        char_total += abs(transcript.char_end_offset(p_utt) - transcript.char_end_offset(g_utt))
        count += 1
    return StrideReport(
        mean_utt_distance=utt_total / count if count else 0.0,
        mean_char_distance=char_total / count if count else 0.0,
        count=count, absent=absent)
