"""Snippet-level ground truth construction.

Reference summaries plus their extractive links are turned into summary
snippets: sentences are positioned by their supporting utterance range,
adjacent sentences with intersecting ranges are merged, unannotated
sentences are attached by word overlap, and a snippet that opens with a
personal pronoun gets it replaced by its coreference representative when a
chains file supplies one. Training chunks then grow each snippet's segment
by 6..14 adjacent utterances drawn from the seeded generator.

Chains file records:

    {"kind": "chains", "id": str, "chains": [{"representative": str,
        "mentions": [{"sent_index": int, "start": int, "end": int, "text": str}]}]}

Mention spans are character offsets inside the original summary sentence.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import jsonl
from .corpus import Corpus, SummarySentence, Transcript
from .errors import CorpusLoadError
from .rng import Lcg64, derive_seed
from .tokenization import tokenize_words

SEPARATOR = "[SEP]"
LEADING_PRONOUNS = frozenset({"he", "she", "they", "it", "him", "her", "them"})
NOISE_MIN = 6
NOISE_MAX = 14


@dataclass(frozen=True)
class ContextSegment:
    transcript_id: str
    first_utt: int
    last_utt: int

    def overlap(self, other: "ContextSegment") -> int:
        return max(0, min(self.last_utt, other.last_utt) - max(self.first_utt, other.first_utt) + 1)

    def token_span(self, transcript: Transcript) -> tuple[int, int]:
        utts = transcript.utterances
        return utts[self.first_utt].token_start, utts[self.last_utt].token_end


@dataclass(frozen=True)
class SummarySnippet:
    snippet_index: int
    sentences: tuple[SummarySentence, ...]
    segment: ContextSegment
    boundary_utt: int
    boundary_text: str

    def joined_sentences(self) -> str:
        return " ".join(s.text for s in self.sentences)

    def target_text(self) -> str:
        return f"{self.joined_sentences()} {SEPARATOR} {self.boundary_text}"


@dataclass(frozen=True)
class SnippetSample:
    transcript_id: str
    snippet: SummarySnippet
    chunk_first_utt: int
    chunk_last_utt: int

    def chunk_text(self, transcript: Transcript) -> str:
        lines = [f"{u.speaker}: {u.text}"
                 for u in transcript.utterances[self.chunk_first_utt:self.chunk_last_utt + 1]]
        return "\n".join(lines)


@dataclass(frozen=True)
class Mention:
    sent_index: int
    start: int
    end: int
    text: str


@dataclass(frozen=True)
class CorefChain:
    representative: str
    mentions: tuple[Mention, ...]


def build_segments(reference: Sequence[SummarySentence], transcript: Transcript,
                   ) -> tuple[list[tuple[SummarySentence, ContextSegment]], list[SummarySentence]]:
    """Pair each linked sentence with its [min(links), max(links)] segment."""
    annotated: list[tuple[SummarySentence, ContextSegment]] = []
    unannotated: list[SummarySentence] = []
    for sentence in reference:
        if sentence.links:
            annotated.append((sentence, ContextSegment(
                transcript_id=transcript.id,
                first_utt=min(sentence.links),
                last_utt=max(sentence.links))))
        else:
            unannotated.append(sentence)
    return annotated, unannotated


def _make_snippet(index: int, members: list[SummarySentence], segment: ContextSegment,
                  transcript: Transcript) -> SummarySnippet:
    ordered = tuple(sorted(members, key=lambda s: s.sent_index))
    return SummarySnippet(
        snippet_index=index,
        sentences=ordered,
        segment=segment,
        boundary_utt=segment.last_utt,
        boundary_text=transcript.utterances[segment.last_utt].text)


def merge_into_snippets(annotated: Sequence[tuple[SummarySentence, ContextSegment]],
                        transcript: Transcript, min_overlap: int = 1) -> list[SummarySnippet]:
    """Greedy left-to-right merge of sentences whose segments overlap.

    Scan order is (segment.first_utt, sent_index); a sentence joins the open
    snippet when its range shares at least `min_overlap` utterances with the
    snippet's current hull, otherwise it opens a new snippet. Within a
    snippet, sentences keep original summary order. With the default
    min_overlap of 1 the resulting segments are pairwise disjoint and
    strictly ordered by first_utt.
    """
    if not annotated:
        raise ValueError("merge_into_snippets requires at least one annotated sentence")
    ordered = sorted(annotated, key=lambda pair: (pair[1].first_utt, pair[0].sent_index))
    snippets: list[SummarySnippet] = []
    members = [ordered[0][0]]
    hull = ordered[0][1]
    for sentence, segment in ordered[1:]:
        if hull.overlap(segment) >= min_overlap:
            members.append(sentence)
            hull = ContextSegment(transcript_id=hull.transcript_id,
                                  first_utt=min(hull.first_utt, segment.first_utt),
                                  last_utt=max(hull.last_utt, segment.last_utt))
        else:
            snippets.append(_make_snippet(len(snippets), members, hull, transcript))
            members = [sentence]
            hull = segment
    snippets.append(_make_snippet(len(snippets), members, hull, transcript))
    return snippets


def _type_recall(sentence_tokens: set[str], segment_tokens: set[str]) -> float:
    if not sentence_tokens:
        return 0.0
    return len(sentence_tokens & segment_tokens) / len(sentence_tokens)


def assign_unannotated(unannotated: Sequence[SummarySentence], snippets: list[SummarySnippet],
                       transcript: Transcript) -> list[SummarySnippet]:
    """Attach link-less sentences to the snippet with the highest word-type recall.

    Ties go to the snippet with the smaller first_utt; sentences with zero
    overlap everywhere go to the last snippet. With no snippets at all, the
    whole batch becomes one trailing snippet spanning the full transcript.
    """
    if not snippets:
        if not unannotated:
            return []
        segment = ContextSegment(transcript_id=transcript.id, first_utt=0,
                                 last_utt=len(transcript.utterances) - 1)
        return [_make_snippet(0, list(unannotated), segment, transcript)]
    if not unannotated:
        return list(snippets)

    segment_types: list[set[str]] = []
    for snip in snippets:
        tokens: set[str] = set()
        for u in transcript.utterances[snip.segment.first_utt:snip.segment.last_utt + 1]:
            tokens.update(tokenize_words(u.text))
        segment_types.append(tokens)

    extras: dict[int, list[SummarySentence]] = {}
    for sentence in sorted(unannotated, key=lambda s: s.sent_index):
        types = set(tokenize_words(sentence.text))
        best_idx = len(snippets) - 1
        best_recall = 0.0
        for idx, snip in enumerate(snippets):
            recall = _type_recall(types, segment_types[idx])
            better = recall > best_recall
            tie = recall == best_recall and recall > 0.0 and \
                snip.segment.first_utt < snippets[best_idx].segment.first_utt
            if better or tie:
                best_idx = idx
                best_recall = recall
        extras.setdefault(best_idx, []).append(sentence)

    out: list[SummarySnippet] = []
    for idx, snip in enumerate(snippets):
        if idx in extras:
            snip = replace(snip, sentences=snip.sentences + tuple(extras[idx]))
        out.append(snip)
    return out


_LEADING_TOKEN = re.compile(r"[^\W\d_]+")


def replace_leading_pronoun(snippet: SummarySnippet, chains: Sequence[CorefChain]) -> SummarySnippet:
    """Swap a snippet-initial personal pronoun for its chain representative."""
    if not chains or not snippet.sentences:
        return snippet
    first = snippet.sentences[0]
    match = _LEADING_TOKEN.match(first.text)
    if match is None or match.start() != 0 or match.group(0).lower() not in LEADING_PRONOUNS:
        return snippet
    span = (match.start(), match.end())
    for chain in chains:
        for mention in chain.mentions:
            if mention.sent_index == first.sent_index and (mention.start, mention.end) == span:
                rep = chain.representative
                rep = rep[0].upper() + rep[1:]
                new_text = first.text[:span[0]] + rep + first.text[span[1]:]
                new_first = replace(first, text=new_text)
                return replace(snippet, sentences=(new_first,) + snippet.sentences[1:])
    return snippet


def inject_noise(segment: ContextSegment, utterance_count: int, rng: Lcg64) -> tuple[int, int]:
    """Grow a segment by g ~ U{6..14} adjacent utterances, ceil(g/2) on the left.

    Each side is clipped to the transcript bounds; clipped amounts are not
    moved to the other side.
    """
    g = rng.randint(NOISE_MIN, NOISE_MAX)
    left = (g + 1) // 2
    right = g - left
    return (max(0, segment.first_utt - left),
            min(utterance_count - 1, segment.last_utt + right))


def gold_snippets(corpus: Corpus, chains: Mapping[str, Sequence[CorefChain]] | None = None,
                  min_overlap: int = 1) -> dict[str, list[SummarySnippet]]:
    """Full conversion pipeline (no noise): snippets per transcript id."""
    chains = chains or {}
    out: dict[str, list[SummarySnippet]] = {}
    for tid in sorted(corpus.references):
        transcript = corpus.transcripts[tid]
        annotated, unannotated = build_segments(corpus.references[tid], transcript)
        snippets = (merge_into_snippets(annotated, transcript, min_overlap=min_overlap)
                    if annotated else [])
        snippets = assign_unannotated(unannotated, snippets, transcript)
        snippets = [replace_leading_pronoun(s, chains.get(tid, ())) for s in snippets]
        out[tid] = snippets
    return out


def gold_summary_text(snippets: Sequence[SummarySnippet]) -> str:
    from .windowing import aggregate_output
    return aggregate_output([s.joined_sentences() for s in snippets])


def make_samples(transcript: Transcript, snippets: Sequence[SummarySnippet],
                 rng: Lcg64) -> list[SnippetSample]:
    samples = []
    for snippet in snippets:
        first, last = inject_noise(snippet.segment, len(transcript.utterances), rng)
        samples.append(SnippetSample(transcript_id=transcript.id, snippet=snippet,
                                     chunk_first_utt=first, chunk_last_utt=last))
    return samples


def export_dataset(corpus: Corpus, chains: Mapping[str, Sequence[CorefChain]] | None,
                   seed: int, out_dir, min_overlap: int = 1,
                   header: dict | None = None) -> dict[str, list[SnippetSample]]:
    """Build snippet samples for every split and write one JSONL file per split.

    Deterministic given the seed: every transcript draws from its own
    sub-generator, so ordering and parallelism cannot change the output.
    Transcripts without a split assignment or a reference are skipped.
    Also writes references.jsonl with the aggregated gold summary per id.
    """
    out_dir = Path(out_dir)
    snippets_by_id = gold_snippets(corpus, chains, min_overlap=min_overlap)
    per_split: dict[str, list[SnippetSample]] = {s: [] for s in ("train", "validation", "test")}
    for tid in sorted(snippets_by_id):
        split = corpus.splits.get(tid)
        if split is None:
            continue
        transcript = corpus.transcripts[tid]
        rng = Lcg64(derive_seed(seed, tid))
        per_split[split].extend(make_samples(transcript, snippets_by_id[tid], rng))

    for split, samples in per_split.items():
        records = [sample_record(s, corpus.transcripts[s.transcript_id]) for s in samples]
        jsonl.write_records(out_dir / f"{split}.jsonl", records, header=header)
    reference_records = [
        {"kind": "summary", "id": tid, "text": gold_summary_text(snippets_by_id[tid])}
        for tid in sorted(snippets_by_id)]
    jsonl.write_records(out_dir / "references.jsonl", reference_records, header=header)
    return per_split


def sample_record(sample: SnippetSample, transcript: Transcript) -> dict:
    return {
        "kind": "sample",
        "transcript_id": sample.transcript_id,
        "snippet_index": sample.snippet.snippet_index,
        "chunk_first_utt": sample.chunk_first_utt,
        "chunk_last_utt": sample.chunk_last_utt,
        "chunk_text": sample.chunk_text(transcript),
        "target_text": sample.snippet.target_text(),
        "boundary_utt": sample.snippet.boundary_utt,
    }


def load_chains(path) -> dict[str, list[CorefChain]]:
    """Load a chains file; rejects empty representatives and cross-chain mention overlap."""
    out: dict[str, list[CorefChain]] = {}
    for lineno, rec in jsonl.read_records(path):
        kind = jsonl.require(rec, "kind", str, path=path, line=lineno)
        if kind != "chains":
            raise CorpusLoadError(f"unknown record kind '{kind}'", path=path, line=lineno)
        tid = jsonl.require(rec, "id", str, path=path, line=lineno)
        if tid in out:
            raise CorpusLoadError(f"duplicate chains record for '{tid}'", path=path, line=lineno)
        chains: list[CorefChain] = []
        claimed: list[tuple[int, int, int]] = []
        for raw_chain in jsonl.require(rec, "chains", list, path=path, line=lineno):
            if not isinstance(raw_chain, dict):
                raise CorpusLoadError("chain is not an object", path=path, line=lineno)
            rep = jsonl.require(raw_chain, "representative", str, path=path, line=lineno)
            if not rep:
                raise CorpusLoadError(f"empty representative in chains for '{tid}'",
                                      path=path, line=lineno)
            mentions = []
            for raw in jsonl.require(raw_chain, "mentions", list, path=path, line=lineno):
                if not isinstance(raw, dict):
                    raise CorpusLoadError("mention is not an object", path=path, line=lineno)
                mention = Mention(
                    sent_index=jsonl.require(raw, "sent_index", int, path=path, line=lineno),
                    start=jsonl.require(raw, "start", int, path=path, line=lineno),
                    end=jsonl.require(raw, "end", int, path=path, line=lineno),
                    text=jsonl.require(raw, "text", str, path=path, line=lineno))
                if mention.start >= mention.end:
                    raise CorpusLoadError("mention span is empty", path=path, line=lineno)
                for seen in claimed:
                    if seen[0] == mention.sent_index and mention.start < seen[2] and seen[1] < mention.end:
                        raise CorpusLoadError(
                            f"overlapping chains claim the same mention in '{tid}' "
                            f"(sentence {mention.sent_index})", path=path, line=lineno)
                claimed.append((mention.sent_index, mention.start, mention.end))
                mentions.append(mention)
            chains.append(CorefChain(representative=rep,
                                     mentions=tuple(sorted(mentions, key=lambda m: (m.sent_index, m.start)))))
        out[tid] = chains
    return out


def chains_records(chains: Mapping[str, Sequence[CorefChain]]) -> Iterable[dict]:
    for tid in sorted(chains):
        yield {"kind": "chains", "id": tid,
               "chains": [{"representative": c.representative,
                           "mentions": [{"sent_index": m.sent_index, "start": m.start,
                                         "end": m.end, "text": m.text} for m in c.mentions]}
                          for c in chains[tid]]}
