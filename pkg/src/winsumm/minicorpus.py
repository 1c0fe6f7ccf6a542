"""Synthetic meeting corpus generator and the bundled demo corpus.

Transcripts mimic AMI-style design meetings: four speaker roles, topic
blocks separated by chit-chat, reference summaries with extractive links
into their topic block. Every utterance carries one unique nonce word, so
no two utterances in a transcript share a token-type set and no two summary
sentences normalize to the same form — boundary localization and sentence
dedup stay unambiguous on this corpus.

Geometry is constrained so an oracle-driven dynamic run reproduces the gold
summary: topic segments are far shorter than the window budget, and the gap
between consecutive segments always fits inside the next window.

Two profiles:

* "standard" — 6 transcripts (4/1/1 split), >=3000 tokens each, 6 snippets
  each, one coref chain, two order inversions, two unannotated sentences.
  This build is frozen under data/ and shipped with the package.
* "tail" — 2 test transcripts whose first topic block stretches to ~800
  tokens while the other five topics sit beyond token 1024, so a truncated
  run can reach only the first snippet.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from . import jsonl
from .conversion import CorefChain, Mention, chains_records, gold_snippets, gold_summary_text, load_chains
from .corpus import Corpus, SummarySentence, Transcript, Utterance, load_corpus, save_corpus
from .metrics import rouge_n
from .rng import Lcg64, derive_seed
from .tokenization import tokenize_words
from .windowing import normalize_sentence

DEFAULT_SEED = 714025
WINDOW_BUDGET = 1024  # the default engine window the geometry is tuned for

ROLES = ("PM", "ID", "UI", "ME")

TOPICS: dict[str, tuple[str, ...]] = {
    "budget": ("budget", "cost", "twelve", "euros", "production", "target",
               "pricing", "margin", "finance", "cheap"),
    "buttons": ("buttons", "rubber", "layout", "channel", "volume", "keypad",
                "press", "grip", "tactile", "click"),
    "screen": ("screen", "display", "backlight", "icons", "menu", "contrast",
               "pixels", "glass", "brightness", "flip"),
    "battery": ("battery", "solar", "charging", "dock", "power", "cells",
                "standby", "drain", "recharge", "kinetic"),
    "casing": ("casing", "plastic", "curved", "yellow", "fruit", "shape",
               "mould", "texture", "ergonomic", "shell"),
    "speech": ("speech", "recognition", "microphone", "voice", "commands",
               "whistle", "beep", "locator", "chip", "sensor"),
    "remote": ("remote", "control", "television", "infrared", "signal",
               "range", "universal", "gadget", "spongy", "unit"),
    "testing": ("testing", "usability", "survey", "subjects", "trial",
                "scores", "whiteboard", "slides", "lab", "participants"),
}
TOPIC_NAMES = tuple(TOPICS)

FILLERS = ("okay", "so", "we", "the", "think", "should", "maybe", "right",
           "about", "just", "really", "well", "can", "need", "look", "then")
OPENERS = ("okay", "so", "right", "well", "yeah", "um")

_SYLLABLES = ("ka", "re", "mo", "ta", "li", "zu", "no", "bi", "sa", "du")

TEMPLATES = (
    "The group agreed the {0} {1} should use {2} {3}.",
    "The team settled on {0} {1} after weighing {2} {3}.",
    "The meeting covered {0} {1} and closed on {2} {3}.",
    "Everyone accepted that {0} {1} would determine {2} {3}.",
)


def _codename(n: int) -> str:
    return _SYLLABLES[n // 100 % 10] + _SYLLABLES[n // 10 % 10] + _SYLLABLES[n % 10]


def _sample_distinct(rng: Lcg64, seq, k: int) -> list:
    seq = list(seq)
    if len(seq) <= k:
        return seq
    out: list = []
    taken: set[int] = set()
    while len(out) < k:
        j = rng.randint(0, len(seq) - 1)
        if j not in taken:
            taken.add(j)
            out.append(seq[j])
    return out


@dataclass(frozen=True)
class MiniBuild:
    corpus: Corpus
    chains: dict[str, list[CorefChain]]
    meta: dict


class _TranscriptBuilder:
    def __init__(self, tid: str, rng: Lcg64, nonce_base: int):
        self.tid = tid
        self.rng = rng
        self.nonce = nonce_base
        self.texts: list[str] = []
        self.topic_words: list[tuple[str, ...]] = []  # content words per utterance

    def _emit(self, words: list[str], content: tuple[str, ...]) -> int:
        self.nonce += 1
        text = " ".join([self.rng.choice(OPENERS)] + words + [_codename(self.nonce)]) + " ."
        self.texts.append(text)
        self.topic_words.append(content)
        return len(self.texts) - 1

    def gap_utterance(self) -> int:
        n = self.rng.randint(8, 13)
        return self._emit([self.rng.choice(FILLERS) for _ in range(n)], ())

    def topic_utterance(self, pool: tuple[str, ...], slot: int) -> int:
        content = (pool[(2 * slot) % 10], pool[(2 * slot + 1) % 10],
                   pool[(2 * slot + 3) % 10], pool[(2 * slot + 7) % 10])
        n = self.rng.randint(4, 9)
        extra = [self.rng.choice(pool) if self.rng.randint(0, 2) > 0 else self.rng.choice(FILLERS)
                 for _ in range(n)]
        return self._emit(list(content) + extra, content)

    def finish(self) -> Transcript:
        utts = []
        start = 0
        for i, text in enumerate(self.texts):
            n = len(tokenize_words(text))
            utts.append(Utterance(index=i, speaker=ROLES[i % 4], text=text,
                                  token_start=start, token_len=n))
            start += n
        return Transcript(id=self.tid, utterances=tuple(utts))


def _sentence_words(builder: _TranscriptBuilder, rng: Lcg64, links: list[int],
                    pool: tuple[str, ...]) -> list[str]:
    union: list[str] = []
    for u in links:
        for w in builder.topic_words[u]:
            if w not in union:
                union.append(w)
    words = _sample_distinct(rng, union, 4)
    for w in pool:
        if len(words) >= 4:
            break
        if w not in words:
            words.append(w)
    return words


def _topic_links(rng: Lcg64, s: int, e: int, inverted: bool) -> list[list[int]]:
    """Two link sets inside block [s, e] whose ranges overlap (same snippet)."""
    if inverted:
        j = rng.randint(0, 1)
        first = [s + 6 + j, e - 2]
        second = [s + 1, s + 7 + j]
        return [first, second]
    x1 = s + rng.randint(1, 2)
    x2 = x1 + rng.randint(2, 3)
    x3 = x2 + rng.randint(2, 3)
    y1 = x3 - rng.randint(0, 1)
    return [[x1, x2, x3], [y1, e - 2]]


def _build_transcript(tid: str, seed: int, nonce_base: int, *, topics: list[str],
                      profile: str, invert_topic: int | None, pronoun_topic: int | None,
                      it_topic: int | None, unannotated_topic: int | None,
                      ) -> tuple[Transcript, list[SummarySentence], dict]:
    rng = Lcg64(derive_seed(seed, tid))
    b = _TranscriptBuilder(tid, rng, nonce_base)
    meta: dict = {}

    for _ in range(rng.randint(2, 3)):
        b.gap_utterance()

    sentences: list[tuple[str, list[int]]] = []  # (text, links)
    blocks: list[tuple[int, int]] = []
    for t, topic in enumerate(topics):
        pool = TOPICS[topic]
        if profile == "tail" and t == 0:
            n_block = rng.randint(52, 58)
        else:
            n_block = rng.randint(16, 20)
        s = len(b.texts)
        for slot in range(n_block):
            b.topic_utterance(pool, slot)
        e = len(b.texts) - 1
        blocks.append((s, e))

        if profile == "tail" and t == 0:
            links = [s + 2, e - 2]
            words = _sentence_words(b, rng, links, pool)
            sentences.append((TEMPLATES[0].format(*words), links))
        else:
            link_sets = _topic_links(rng, s, e, inverted=(t == invert_topic))
            for si, links in enumerate(link_sets):
                words = _sentence_words(b, rng, links, pool)
                if t == pronoun_topic and si == 0:
                    text = "They agreed the {0} {1} should use {2} {3}.".format(*words)
                elif t == it_topic and si == 0:
                    text = "It was decided that the {0} {1} connects to the {2} {3}.".format(*words)
                else:
                    text = rng.choice(TEMPLATES).format(*words)
                sentences.append((text, links))

        if profile == "tail" and t == 0:
            # push the next topic past the default window budget
            while b.finish().n_tokens <= WINDOW_BUDGET + 40:
                b.gap_utterance()
        else:
            for _ in range(rng.randint(9, 12)):
                b.gap_utterance()

    if profile == "standard":
        while b.finish().n_tokens < 3050:
            b.gap_utterance()

    reference: list[SummarySentence] = []
    for text, links in sentences:
        reference.append(SummarySentence(sent_index=len(reference), text=text,
                                         links=frozenset(links)))
    if unannotated_topic is not None:
        s, e = blocks[unannotated_topic]
        pool = TOPICS[topics[unannotated_topic]]
        words = _sentence_words(b, rng, list(range(s, e + 1)), pool)
        text = "Overall the {0} {1} questions stayed open for review.".format(words[0], words[1])
        reference.append(SummarySentence(sent_index=len(reference), text=text,
                                         links=frozenset()))

    transcript = b.finish()
    meta["blocks"] = blocks
    meta["nonce_end"] = b.nonce
    return transcript, reference, meta


def _check_geometry(transcript: Transcript, reference: list[SummarySentence], k: int) -> None:
    """Assert the layout that makes the oracle fixpoint hold at window size k."""
    utts = transcript.utterances
    assert all(u.token_len <= 20 for u in utts), "utterance too long for the geometry"
    type_sets = [frozenset(tokenize_words(u.text)) for u in utts]
    assert len(set(type_sets)) == len(type_sets), "duplicate utterance token-type set"

    hulls: list[tuple[int, int]] = []
    for sent in reference:
        if not sent.links:
            continue
        lo, hi = min(sent.links), max(sent.links)
        if hulls and lo <= hulls[-1][1]:
            hulls[-1] = (min(hulls[-1][0], lo), max(hulls[-1][1], hi))
        else:
            hulls.append((lo, hi))
    prev_start = 0
    for lo, hi in hulls:
        # the window opening after the previous boundary must reach past this hull
        assert utts[hi].token_end - prev_start <= k - 24, "segment cannot fit its window"
        prev_start = utts[hi + 1].token_start if hi + 1 < len(utts) else transcript.n_tokens


def _check_sentences(corpus: Corpus, chains: dict[str, list[CorefChain]]) -> None:
    for tid, snippets in gold_snippets(corpus, chains).items():
        seen: set[str] = set()
        for snip in snippets:
            for sent in snip.sentences:
                norm = normalize_sentence(sent.text)
                assert norm and norm not in seen, f"sentence collision in {tid}"
                seen.add(norm)


def build_corpus(profile: str = "standard", seed: int = DEFAULT_SEED) -> MiniBuild:
    if profile not in ("standard", "tail"):
        raise ValueError(f"unknown profile {profile!r}")

    transcripts: dict[str, Transcript] = {}
    references: dict[str, tuple[SummarySentence, ...]] = {}
    splits: dict[str, str] = {}
    chains: dict[str, list[CorefChain]] = {}
    meta: dict = {}

    if profile == "standard":
        plan = [("mtg0", "train"), ("mtg1", "train"), ("mtg2", "train"),
                ("mtg3", "train"), ("mtg4", "validation"), ("mtg5", "test")]
    else:
        plan = [("cut0", "test"), ("cut1", "test")]

    nonce = 0
    for pos, (tid, split) in enumerate(plan):
        topics = [TOPIC_NAMES[(pos + j) % len(TOPIC_NAMES)] for j in range(6)]
        transcript, reference, build_meta = _build_transcript(
            tid, seed, nonce,
            topics=topics, profile=profile,
            invert_topic=3 if (profile == "standard" and tid in ("mtg1", "mtg3")) else None,
            pronoun_topic=2 if tid == "mtg0" else None,
            it_topic=4 if tid == "mtg0" else None,
            unannotated_topic=3 if tid in ("mtg0", "mtg4") else None)
        nonce = build_meta["nonce_end"] + 1
        transcripts[tid] = transcript
        references[tid] = tuple(reference)
        splits[tid] = split
        if profile == "standard":
            assert transcript.n_tokens >= 3000, f"{tid} too short"
        _check_geometry(transcript, reference, WINDOW_BUDGET)

    if profile == "standard":
        pron_sent = next(s for s in references["mtg0"] if s.text.startswith("They "))
        chains["mtg0"] = [CorefChain(
            representative="the industrial designers",
            mentions=(Mention(sent_index=pron_sent.sent_index, start=0, end=4, text="They"),))]

    corpus = Corpus(transcripts=transcripts, references=references, splits=splits)
    _check_sentences(corpus, chains)

    if profile == "tail":
        snippets = gold_snippets(corpus, chains)
        bound = 0.0
        shares = []
        for tid, snips in snippets.items():
            transcript = transcripts[tid]
            assert transcript.utterances[snips[0].segment.last_utt].token_end <= WINDOW_BUDGET - 24
            assert transcript.utterances[snips[1].segment.first_utt].token_start > WINDOW_BUDGET
            gold = gold_summary_text(snips)
            bound = max(bound, rouge_n(snips[0].joined_sentences(), gold, 1).recall)
            beyond = sum(len(tokenize_words(s.joined_sentences())) for s in snips[1:])
            total = beyond + len(tokenize_words(snips[0].joined_sentences()))
            shares.append(beyond / total)
        assert min(shares) >= 0.5, "not enough gold content beyond the window"
        assert bound <= 0.6, f"truncation bound {bound:.3f} too high"
        meta["truncate_recall_bound"] = bound
        meta["beyond_window_share"] = min(shares)

    return MiniBuild(corpus=corpus, chains=chains, meta=meta)


def bundled_paths() -> tuple[Path, Path]:
    root = resources.files("winsumm").joinpath("data")
    return Path(str(root.joinpath("mini_corpus.jsonl"))), Path(str(root.joinpath("mini_chains.jsonl")))


def load_bundled() -> tuple[Corpus, dict[str, list[CorefChain]]]:
    corpus_path, chains_path = bundled_paths()
    return load_corpus(corpus_path), load_chains(chains_path)


def write_bundle(out_dir) -> tuple[Path, Path]:
    """Regenerate the frozen demo corpus files (used once at packaging time)."""
    out_dir = Path(out_dir)
    build = build_corpus("standard", DEFAULT_SEED)
    corpus_path = out_dir / "mini_corpus.jsonl"
    chains_path = out_dir / "mini_chains.jsonl"
    save_corpus(build.corpus, corpus_path)
    jsonl.write_records(chains_path, chains_records(build.chains))
    return corpus_path, chains_path
