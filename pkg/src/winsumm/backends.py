"""Summarizer backends behind one uniform contract.

A backend maps a window's utterances to an output string, optionally
carrying a boundary utterance after " [SEP] ". Three implementations:

* OracleBackend — replays gold snippets (verification without a model).
* LeadBackend — first-N-utterances baseline.
* HttpBackend — remote model server speaking the versioned wire protocol.

All backends are safe for concurrent calls across transcripts.
"""

from __future__ import annotations

import json
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Mapping, Sequence

import requests

from .conversion import SEPARATOR, SummarySnippet
from .errors import BackendError, BackendTimeout, MalformedResponse, RemoteFailure

PROTOCOL_VERSION = 1
DEFAULT_TIMEOUT = 60.0


@dataclass(frozen=True)
class BackendRequest:
    transcript_id: str
    utterances: tuple[tuple[int, str, str], ...]  # (index, speaker, text)
    mode: str  # "retrospective" | "plain"

    def wire_payload(self) -> dict:
        return {
            "v": PROTOCOL_VERSION,
            "transcript_id": self.transcript_id,
            "mode": self.mode,
            "utterances": [{"index": i, "speaker": s, "text": t}
                           for i, s, t in self.utterances],
        }


@dataclass(frozen=True)
class BackendResponse:
    output: str


class Backend(ABC):
    @abstractmethod
    def summarize(self, request: BackendRequest) -> BackendResponse:
        raise NotImplementedError


class OracleBackend(Backend):
    """Replays gold snippets in order.

    Returns the first not-yet-emitted snippet whose segment starts inside
    the requested window, as "sentences [SEP] boundary utterance". When no
    snippet qualifies, answers with an empty snippet plus the window's last
    utterance as boundary, which tells the engine to move on.
    """

    def __init__(self, gold: Mapping[str, Sequence[SummarySnippet]]):
        self._gold = {tid: tuple(snips) for tid, snips in gold.items()}
        self._emitted: dict[str, set[int]] = {tid: set() for tid in self._gold}
        self._lock = threading.Lock()

    def summarize(self, request: BackendRequest) -> BackendResponse:
        if request.transcript_id not in self._gold:
            raise BackendError(f"oracle has no snippets for '{request.transcript_id}'")
        lo = request.utterances[0][0]
        hi = request.utterances[-1][0]
        with self._lock:
            emitted = self._emitted[request.transcript_id]
            for snippet in self._gold[request.transcript_id]:
                if snippet.snippet_index in emitted:
                    continue
                if lo <= snippet.segment.first_utt <= hi:
                    emitted.add(snippet.snippet_index)
                    return BackendResponse(output=snippet.target_text())
        return BackendResponse(output=f" {SEPARATOR} {request.utterances[-1][2]}")


class LeadBackend(Backend):
    """First lead_n utterance texts as the snippet; window end as boundary."""

    def __init__(self, lead_n: int = 2):
        self.lead_n = lead_n

    def summarize(self, request: BackendRequest) -> BackendResponse:
        lead = " ".join(t for _, _, t in request.utterances[:self.lead_n])
        return BackendResponse(output=f"{lead} {SEPARATOR} {request.utterances[-1][2]}")


class HttpBackend(Backend):
    """POSTs the wire payload to <endpoint>/summarize and returns `output`."""

    def __init__(self, endpoint: str, timeout: float = DEFAULT_TIMEOUT):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout

    def summarize(self, request: BackendRequest) -> BackendResponse:
        # no shared Session: plain per-call posts keep concurrent runs safe
        url = f"{self.endpoint}/summarize"
        try:
            resp = requests.post(url, json=request.wire_payload(), timeout=self.timeout)
        except requests.Timeout as exc:
            raise BackendTimeout(f"no response from {url} within {self.timeout}s") from exc
        except requests.RequestException as exc:
            raise RemoteFailure(f"request to {url} failed: {exc}") from exc
        if resp.status_code != 200:
            raise RemoteFailure(f"{url} returned status {resp.status_code}")
        try:
            body = resp.json()
        except (json.JSONDecodeError, ValueError) as exc:
            raise MalformedResponse(f"{url} returned a non-JSON body") from exc
        if not isinstance(body, dict) or body.get("v") != PROTOCOL_VERSION:
            raise MalformedResponse(f"{url} returned an unknown protocol version")
        output = body.get("output")
        if not isinstance(output, str):
            raise MalformedResponse(f"{url} response is missing `output`")
        return BackendResponse(output=output)


def make_backend(kind: str, *, gold=None, lead_n: int = 2, endpoint: str | None = None,
                 timeout: float = DEFAULT_TIMEOUT) -> Backend:
    if kind == "oracle":
        if gold is None:
            raise BackendError("oracle backend needs gold snippets")
        return OracleBackend(gold)
    if kind == "lead":
        return LeadBackend(lead_n)
    if kind == "http":
        if not endpoint:
            raise BackendError("http backend needs an endpoint")
        return HttpBackend(endpoint, timeout=timeout)
    raise BackendError(f"unknown backend '{kind}'")
