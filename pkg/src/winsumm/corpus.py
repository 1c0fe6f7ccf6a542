"""Corpus model and its file format.

A corpus file is a JSONL document with three record kinds:

    {"kind": "transcript", "id": str, "utterances": [{"speaker": str, "text": str}]}
    {"kind": "reference",  "id": str, "sentences":  [{"text": str, "links": [int]}]}
    {"kind": "split",      "id": str, "split": "train"|"validation"|"test"}

Loading computes word-token offsets for every utterance, drops utterances
that are empty after tokenization (re-basing indices and remapping links),
and validates referential integrity. Loaded objects are immutable and safe
to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from . import jsonl
from .errors import CorpusLoadError
from .tokenization import tokenize_words

SPLITS = ("train", "validation", "test")


@dataclass(frozen=True)
class Utterance:
    index: int
    speaker: str
    text: str
    token_start: int
    token_len: int

    @property
    def token_end(self) -> int:
        return self.token_start + self.token_len


@dataclass(frozen=True)
class Transcript:
    id: str
    utterances: tuple[Utterance, ...]

    @property
    def n_tokens(self) -> int:
        if not self.utterances:
            return 0
        last = self.utterances[-1]
        return last.token_start + last.token_len

    def char_end_offset(self, utt_index: int) -> int:
        """End offset of an utterance in the newline-joined raw transcript text."""
        offset = 0
        for u in self.utterances[: utt_index + 1]:
            offset += len(u.text)
        return offset + utt_index  # one separator char per preceding utterance


@dataclass(frozen=True)
class SummarySentence:
    sent_index: int
    text: str
    links: frozenset[int]


@dataclass(frozen=True)
class Corpus:
    transcripts: Mapping[str, Transcript]
    references: Mapping[str, tuple[SummarySentence, ...]]
    splits: Mapping[str, str]

    def ids(self) -> list[str]:
        return sorted(self.transcripts)

    def filtered(self, split: str | None) -> "Corpus":
        """Sub-corpus containing only transcripts assigned to `split`."""
        if split is None:
            return self
        if split not in SPLITS:
            raise ValueError(f"unknown split {split!r}")
        keep = {tid for tid, s in self.splits.items() if s == split}
        return Corpus(
            transcripts={tid: t for tid, t in self.transcripts.items() if tid in keep},
            references={tid: r for tid, r in self.references.items() if tid in keep},
            splits={tid: s for tid, s in self.splits.items() if tid in keep},
        )


def _build_transcript(tid: str, raw_utterances, *, path, line) -> tuple[Transcript, dict[int, int]]:
    """Tokenize, drop empty utterances, re-base indices. Returns old->new index map."""
    kept: list[Utterance] = []
    index_map: dict[int, int] = {}
    token_start = 0
    for old_index, rec in enumerate(raw_utterances):
        if not isinstance(rec, dict):
            raise CorpusLoadError(f"utterance {old_index} of '{tid}' is not an object", path=path, line=line)
        speaker = jsonl.require(rec, "speaker", str, path=path, line=line)
        text = jsonl.require(rec, "text", str, path=path, line=line)
        n = len(tokenize_words(text))
        if n == 0:
            continue
        index_map[old_index] = len(kept)
        kept.append(Utterance(index=len(kept), speaker=speaker, text=text,
                              token_start=token_start, token_len=n))
        token_start += n
    if not kept:
        raise CorpusLoadError(f"transcript '{tid}' has no utterances left after tokenization",
                              path=path, line=line)
    return Transcript(id=tid, utterances=tuple(kept)), index_map


def load_corpus(path) -> Corpus:
    """Load and validate a corpus file. Raises CorpusLoadError with a locator on any defect."""
    transcripts: dict[str, Transcript] = {}
    index_maps: dict[str, dict[int, int]] = {}
    original_counts: dict[str, int] = {}
    raw_references: list[tuple[int, dict]] = []
    raw_splits: list[tuple[int, dict]] = []

    for lineno, rec in jsonl.read_records(path):
        kind = jsonl.require(rec, "kind", str, path=path, line=lineno)
        if kind == "transcript":
            tid = jsonl.require(rec, "id", str, path=path, line=lineno)
            if tid in transcripts:
                raise CorpusLoadError(f"duplicate transcript id '{tid}'", path=path, line=lineno)
            utts = jsonl.require(rec, "utterances", list, path=path, line=lineno)
            transcript, index_map = _build_transcript(tid, utts, path=path, line=lineno)
            transcripts[tid] = transcript
            index_maps[tid] = index_map
            original_counts[tid] = len(utts)
        elif kind == "reference":
            raw_references.append((lineno, rec))
        elif kind == "split":
            raw_splits.append((lineno, rec))
        else:
            raise CorpusLoadError(f"unknown record kind '{kind}'", path=path, line=lineno)

    references: dict[str, tuple[SummarySentence, ...]] = {}
    for lineno, rec in raw_references:
        tid = jsonl.require(rec, "id", str, path=path, line=lineno)
        if tid not in transcripts:
            raise CorpusLoadError(f"reference for missing transcript id '{tid}'", path=path, line=lineno)
        if tid in references:
            raise CorpusLoadError(f"duplicate reference id '{tid}'", path=path, line=lineno)
        sentences: list[SummarySentence] = []
        for sent_index, sent in enumerate(jsonl.require(rec, "sentences", list, path=path, line=lineno)):
            if not isinstance(sent, dict):
                raise CorpusLoadError(f"sentence {sent_index} of '{tid}' is not an object",
                                      path=path, line=lineno)
            text = jsonl.require(sent, "text", str, path=path, line=lineno)
            links = sent.get("links", [])
            if not isinstance(links, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in links):
                raise CorpusLoadError(f"links of sentence {sent_index} of '{tid}' must be integers",
                                      path=path, line=lineno)
            n_original = original_counts[tid]
            bad = [x for x in links if x < 0 or x >= n_original]
            if bad:
                raise CorpusLoadError(
                    f"dangling link {bad[0]} in sentence {sent_index} of '{tid}' "
                    f"({n_original} utterances)", path=path, line=lineno)
            # Links to utterances dropped at tokenization are discarded by the remap.
            remap = index_maps[tid]
            remapped = frozenset(remap[x] for x in links if x in remap)
            sentences.append(SummarySentence(sent_index=sent_index, text=text, links=remapped))
        references[tid] = tuple(sentences)

    splits: dict[str, str] = {}
    for lineno, rec in raw_splits:
        tid = jsonl.require(rec, "id", str, path=path, line=lineno)
        if tid not in transcripts:
            raise CorpusLoadError(f"split for missing transcript id '{tid}'", path=path, line=lineno)
        if tid in splits:
            raise CorpusLoadError(f"duplicate split record for '{tid}'", path=path, line=lineno)
        value = jsonl.require(rec, "split", str, path=path, line=lineno)
        if value not in SPLITS:
            raise CorpusLoadError(f"unknown split value '{value}' for '{tid}'", path=path, line=lineno)
        splits[tid] = value

    return Corpus(transcripts=transcripts, references=references, splits=splits)


def corpus_records(corpus: Corpus) -> Iterable[dict]:
    """Serialize a corpus back to its record form (ids sorted for stable bytes)."""
    for tid in sorted(corpus.transcripts):
        t = corpus.transcripts[tid]
        yield {"kind": "transcript", "id": tid,
               "utterances": [{"speaker": u.speaker, "text": u.text} for u in t.utterances]}
    for tid in sorted(corpus.references):
        yield {"kind": "reference", "id": tid,
               "sentences": [{"text": s.text, "links": sorted(s.links)}
                             for s in corpus.references[tid]]}
    for tid in sorted(corpus.splits):
        yield {"kind": "split", "id": tid, "split": corpus.splits[tid]}


def save_corpus(corpus: Corpus, path, header: dict | None = None) -> None:
    jsonl.write_records(path, corpus_records(corpus), header=header)
