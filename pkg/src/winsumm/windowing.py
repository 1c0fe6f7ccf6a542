"""Sliding-window inference engine.

Runs a transcript through a summarizer backend in one of three modes:

* ``truncate`` — one window from the start, one call, snippet text only.
* ``fixed`` — consecutive utterance-aligned windows (stride = window fill).
* ``dynamic`` — the backend's output names the last supporting utterance
  after the final "[SEP]"; that utterance's right edge becomes the next
  window's start. When the boundary is missing or cannot be located in the
  window, the start falls back to the first utterance at or after
  i_left + k//2. Progress is mandatory, so every run terminates.

Windows are utterance-aligned under the token budget k: an utterance is
never split, and any utterance longer than k is a configuration error.
Snippets from all steps are merged by aggregate_output, which drops repeated
sentences.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

from .backends import Backend, BackendRequest
from .corpus import Transcript
from .errors import BackendError, ConfigurationError
from .tokenization import tokenize_words

SEPARATOR = "[SEP]"
DEFAULT_WINDOW = 1024
DEFAULT_TAU = 0.5
MODES = ("truncate", "fixed", "dynamic")


@dataclass(frozen=True)
class Window:
    i_left: int
    i_right: int
    first_utt: int
    last_utt: int


@dataclass(frozen=True)
class BackendOutput:
    raw_text: str
    snippet_text: str
    boundary_text: str | None


@dataclass(frozen=True)
class StepRecord:
    transcript_id: str
    step: int
    i_left: int
    i_right: int
    first_utt: int
    last_utt: int
    stride: int
    boundary_utt: int | None
    match_score: float | None
    snippet_text: str

    def record(self) -> dict:
        return {
            "kind": "step",
            "transcript_id": self.transcript_id,
            "step": self.step,
            "i_left": self.i_left,
            "i_right": self.i_right,
            "first_utt": self.first_utt,
            "last_utt": self.last_utt,
            "stride": self.stride,
            "boundary_utt": self.boundary_utt,
            "match_score": self.match_score,
            "snippet_text": self.snippet_text,
        }


@dataclass(frozen=True)
class RunResult:
    transcript_id: str
    mode: str
    summary: str
    snippets: tuple[str, ...]
    trace: tuple[StepRecord, ...]


def fill_window(transcript: Transcript, first_utt: int, k: int) -> Window:
    """Greedily include whole utterances from first_utt while tokens <= k."""
    utts = transcript.utterances
    i_left = utts[first_utt].token_start
    last = first_utt
    while last + 1 < len(utts) and utts[last + 1].token_end - i_left <= k:
        last += 1
    return Window(i_left=i_left, i_right=utts[last].token_end,
                  first_utt=first_utt, last_utt=last)


def initial_window(transcript: Transcript, k: int) -> Window:
    for u in transcript.utterances:
        if u.token_len > k:
            raise ConfigurationError(
                f"utterance {u.index} of '{transcript.id}' has {u.token_len} "
                f"tokens, exceeding window size {k}")
    return fill_window(transcript, 0, k)


def parse_retrospective(raw: str) -> BackendOutput:
    """Split at the last "[SEP]"; no separator means no boundary signal."""
    if SEPARATOR not in raw:
        return BackendOutput(raw_text=raw, snippet_text=raw.strip(), boundary_text=None)
    left, right = raw.rsplit(SEPARATOR, 1)
    return BackendOutput(raw_text=raw, snippet_text=left.strip(), boundary_text=right.strip())


def _type_f1(left: frozenset[str], right: frozenset[str]) -> float:
    if not left or not right:
        return 0.0
    hits = len(left & right)
    if hits == 0:
        return 0.0
    p = hits / len(left)
    r = hits / len(right)
    return 2 * p * r / (p + r)


def best_boundary_match(boundary_text: str, window: Window,
                        transcript: Transcript) -> tuple[int, float]:
    """(utterance index, token-type F1) of the best match; ties go rightmost."""
    target = frozenset(tokenize_words(boundary_text))
    best_idx = window.last_utt
    best_f1 = 0.0
    for idx in range(window.first_utt, window.last_utt + 1):
        cand = frozenset(tokenize_words(transcript.utterances[idx].text))
        f1 = _type_f1(target, cand)
        if f1 >= best_f1:
            best_idx, best_f1 = idx, f1
    return best_idx, best_f1


def locate_boundary(boundary_text: str, window: Window, transcript: Transcript,
                    tau: float = DEFAULT_TAU) -> int | None:
    idx, f1 = best_boundary_match(boundary_text, window, transcript)
    return idx if f1 >= tau else None


def advance_window(transcript: Transcript, window: Window, k: int,
                   boundary_utt: int | None) -> Window | None:
    """Next window after this step, or None when the transcript is exhausted."""
    utts = transcript.utterances
    if boundary_utt is not None:
        if boundary_utt >= len(utts) - 1:
            return None
        nxt = utts[boundary_utt + 1].token_start
        if nxt > window.i_left:
            return fill_window(transcript, boundary_utt + 1, k)
    # fallback: jump half a window past the current start, never standing still
    target = window.i_left + max(k // 2, 1)
    for idx in range(window.first_utt, len(utts)):
        if utts[idx].token_start >= target:
            return fill_window(transcript, idx, k)
    return None


def run_transcript(transcript: Transcript, backend: Backend, mode: str,
                   k: int = DEFAULT_WINDOW, tau: float = DEFAULT_TAU) -> RunResult:
    if mode not in MODES:
        raise ConfigurationError(f"unknown mode '{mode}'")
    window = initial_window(transcript, k)
    n_utts = len(transcript.utterances)
    request_mode = "retrospective" if mode == "dynamic" else "plain"
    snippets: list[str] = []
    trace: list[StepRecord] = []

    step = 0
    while window is not None:
        if step >= n_utts:
            raise RuntimeError(
                f"step count exceeded utterance count on '{transcript.id}' "
                "(progress invariant breached)")
        request = BackendRequest(
            transcript_id=transcript.id,
            utterances=tuple((u.index, u.speaker, u.text)
                             for u in transcript.utterances[window.first_utt:window.last_utt + 1]),
            mode=request_mode)
        try:
            response = backend.summarize(request)
        except BackendError as exc:
            raise type(exc)(
                f"step {step} (utterances {window.first_utt}-{window.last_utt}) "
                f"of '{transcript.id}': {exc}") from exc
        parsed = parse_retrospective(response.output)
        snippets.append(parsed.snippet_text)

        boundary = None
        score = None
        if mode == "truncate":
            nxt = None
        elif mode == "fixed":
            nxt = (fill_window(transcript, window.last_utt + 1, k)
                   if window.last_utt + 1 < n_utts else None)
        else:
            if parsed.boundary_text:
                boundary, score = best_boundary_match(parsed.boundary_text, window, transcript)
                if score < tau:
                    boundary = None
            nxt = advance_window(transcript, window, k, boundary)
        if nxt is not None and nxt.i_left <= window.i_left:
            raise RuntimeError(
                f"window start did not advance on '{transcript.id}' at step {step}")
        end_left = transcript.n_tokens if nxt is None else nxt.i_left
        stride = 0 if mode == "truncate" else end_left - window.i_left
        trace.append(StepRecord(
            transcript_id=transcript.id, step=step,
            i_left=window.i_left, i_right=window.i_right,
            first_utt=window.first_utt, last_utt=window.last_utt,
            stride=stride, boundary_utt=boundary, match_score=score,
            snippet_text=parsed.snippet_text))
        window = nxt
        step += 1

    return RunResult(transcript_id=transcript.id, mode=mode,
                     summary=aggregate_output(snippets),
                     snippets=tuple(snippets), trace=tuple(trace))


_SENT_BOUNDARY = re.compile(r"(?<=[.?!])\s+")


def split_sentences(text: str) -> list[str]:
    return [s for s in (part.strip() for part in _SENT_BOUNDARY.split(text)) if s]


def normalize_sentence(text: str) -> str:
    chars = []
    for ch in text.lower():
        if unicodedata.category(ch)[0] in ("P", "S"):
            chars.append(" ")
        else:
            chars.append(ch)
    return " ".join("".join(chars).split())


def aggregate_output(snippets: list[str] | tuple[str, ...]) -> str:
    """Merge snippet texts, dropping sentences already seen (normalized)."""
    seen: set[str] = set()
    kept: list[str] = []
    for snippet in snippets:
        for sentence in split_sentences(snippet):
            key = normalize_sentence(sentence)
            if key and key not in seen:
                seen.add(key)
                kept.append(sentence)
    return " ".join(kept)
