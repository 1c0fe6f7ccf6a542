"""Model wrappers behind one generate(text, mode) -> str interface."""

import json
from pathlib import Path

from . import ModelServerError
from .config import ServerConfig

SEPARATOR = "[SEP]"


def strip_speaker(line: str) -> str:
    head, sep, tail = line.partition(": ")
    return tail if sep else line


class StubModel:
    """Deterministic extractive stand-in for a trained summarizer.

    Emits the first `lead_lines` utterance texts as the summary; in
    retrospective mode it appends the last visible utterance after the
    separator, the way a trained model marks its supporting boundary.
    Exists so every serving and protocol path can be exercised without
    model weights.
    """

    name = "stub"

    def __init__(self, lead_lines: int = 2):
        self.lead_lines = lead_lines

    def generate(self, text: str, mode: str) -> str:
        texts = [strip_speaker(line) for line in text.splitlines() if line.strip()]
        lead = " ".join(texts[:self.lead_lines])
        if mode != "retrospective":
            return lead
        boundary = texts[-1] if texts else ""
        return f"{lead} {SEPARATOR} {boundary}"


def load_model(config: ServerConfig):
    if config.model == "stub":
        return StubModel()
    path = Path(config.model)
    if path.exists():
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ModelServerError(f"cannot read checkpoint {path}: {exc}") from exc
        if data.get("model") != "stub":
            raise ModelServerError(
                f"checkpoint {path} was not written by the stub sweep")
        return StubModel(lead_lines=int(data["lead_lines"]))
    return _load_pretrained(config)


class _PretrainedModel:  # pragma: no cover - needs downloaded weights
    def __init__(self, config: ServerConfig):
        import torch
        from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

        self.name = config.model
        self.config = config
        self.torch = torch
        self.tokenizer = AutoTokenizer.from_pretrained(config.model)
        self.model = AutoModelForSeq2SeqLM.from_pretrained(config.model)
        self.model.eval()
        torch.manual_seed(config.seed)

    def generate(self, text: str, mode: str) -> str:
        del mode  # a fine-tuned model learned the separator from its targets
        batch = self.tokenizer(text, truncation=True,
                               max_length=self.config.max_input_tokens,
                               return_tensors="pt")
        with self.torch.no_grad():
            ids = self.model.generate(**batch,
                                      num_beams=self.config.beam_size,
                                      max_length=self.config.max_output_tokens)
        return self.tokenizer.decode(ids[0], skip_special_tokens=True)


def _load_pretrained(config: ServerConfig):  # pragma: no cover
    try:
        return _PretrainedModel(config)
    except ImportError as exc:
        raise ModelServerError(
            f"loading '{config.model}' needs torch and transformers: {exc}") from exc
    except OSError as exc:
        raise ModelServerError(f"cannot load model '{config.model}': {exc}") from exc
