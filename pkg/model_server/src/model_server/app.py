"""FastAPI application implementing the wire protocol.

POST /summarize takes {"v":1, "transcript_id", "mode", "utterances":[...]}
and answers {"v":1, "output":str}. Inputs beyond the configured token
limit are truncated and flagged with "truncated":true. GET /healthz
reports version and model identity.
"""

import threading

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from . import PROTOCOL_VERSION, __version__
from .config import ServerConfig
from .models import load_model


class WireUtterance(BaseModel):
    index: int
    speaker: str
    text: str


class WireRequest(BaseModel):
    v: int
    transcript_id: str
    mode: str
    utterances: list[WireUtterance]


def truncate_words(text: str, limit: int) -> tuple[str, bool]:
    """Cut to the first `limit` whitespace words, preserving line structure."""
    if len(text.split()) <= limit:
        return text, False
    kept = []
    remaining = limit
    for line in text.splitlines():
        if remaining <= 0:
            break
        words = line.split()
        if not words:
            continue
        kept.append(" ".join(words[:remaining]))
        remaining -= len(words[:remaining])
    return "\n".join(kept), True


def create_app(config: ServerConfig | None = None) -> FastAPI:
    config = config or ServerConfig()
    model = load_model(config)
    # one request at a time through the model; fastapi threads queue here
    inference = threading.Lock()
    app = FastAPI(title="model-server", version=__version__)

    @app.get("/healthz")
    def healthz():
        return {"version": __version__,
                "model": getattr(model, "name", config.model),
                "protocol": PROTOCOL_VERSION}

    @app.post("/summarize")
    def summarize(request: WireRequest):
        if request.v != PROTOCOL_VERSION:
            raise HTTPException(status_code=400,
                                detail=f"unsupported protocol version {request.v}")
        if request.mode not in ("retrospective", "plain"):
            raise HTTPException(status_code=400,
                                detail=f"unknown mode '{request.mode}'")
        text = "\n".join(f"{u.speaker}: {u.text}" for u in request.utterances)
        text, truncated = truncate_words(text, config.max_input_tokens)
        with inference:
            output = model.generate(text, request.mode)
        body = {"v": PROTOCOL_VERSION, "output": output}
        if truncated:
            body["truncated"] = True
        return body

    return app
