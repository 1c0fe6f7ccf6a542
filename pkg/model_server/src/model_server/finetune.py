"""Checkpoint sweep over a converted snippet dataset.

The stub model has no gradients, so its "fine-tuning" sweeps the one
decoding parameter it owns (lead_lines) across epochs, scores each epoch
on the validation split with local ROUGE-2, and links the best checkpoint
— the same select-on-validation shape a real training run uses. The
pre-trained path below does run actual gradient steps when weights are
available, but it is best-effort by design.

Dataset files are the engine's convert output: records with kind
"sample" carrying chunk_text (speaker-prefixed lines) and target_text.
"""

import json
from pathlib import Path
from typing import Sequence

from . import ModelServerError
from .config import ServerConfig
from .models import StubModel
from .rouge2 import rouge2_f1

LEAD_CANDIDATES = (1, 2, 3, 4, 5)


def load_samples(paths: Sequence) -> list[dict]:
    samples = []
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                if record.get("kind") != "sample":
                    continue
                samples.append({"chunk_text": record["chunk_text"],
                                "target_text": record["target_text"]})
    return samples


def select_best(scores: Sequence[float]) -> int:
    """Argmax over per-epoch scores; ties resolve to the earlier epoch."""
    best = 0
    for epoch, score in enumerate(scores):
        if score > scores[best]:
            best = epoch
    return best


def validation_rouge2(model, samples: Sequence[dict]) -> float:
    scores = [rouge2_f1(model.generate(s["chunk_text"], "retrospective"),
                        s["target_text"]) for s in samples]
    return sum(scores) / len(scores)


def finetune(train_paths, validation_paths, out_dir, config: ServerConfig | None = None,
             epochs: int = 20) -> Path:
    """Run the sweep and return the path of the best-checkpoint link."""
    config = config or ServerConfig()
    if epochs < 1:
        raise ModelServerError("epochs must be >= 1")
    train = load_samples(train_paths)
    validation = load_samples(validation_paths)
    if not train:
        raise ModelServerError("training dataset is empty")
    if not validation:
        raise ModelServerError("validation dataset is empty")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if config.model != "stub":
        return _finetune_pretrained(train, validation, out_dir, config, epochs)

    scores: list[float] = []
    with (out_dir / "epochs.jsonl").open("w", encoding="utf-8") as log:
        for epoch in range(epochs):
            lead = LEAD_CANDIDATES[epoch % len(LEAD_CANDIDATES)]
            score = validation_rouge2(StubModel(lead_lines=lead), validation)
            scores.append(score)
            name = f"checkpoint-{epoch:02d}.json"
            (out_dir / name).write_text(
                json.dumps({"model": "stub", "epoch": epoch, "lead_lines": lead,
                            "train_samples": len(train),
                            "validation_rouge2": score}) + "\n",
                encoding="utf-8")
            log.write(json.dumps({"epoch": epoch, "lead_lines": lead,
                                  "rouge2": score}) + "\n")
    return _link_best(out_dir, select_best(scores))


def _link_best(out_dir: Path, epoch: int) -> Path:
    link = out_dir / "best"
    target = f"checkpoint-{epoch:02d}.json"
    if link.is_symlink() or link.exists():
        link.unlink()
    try:
        link.symlink_to(target)
    except OSError:  # filesystems without symlink support get a copy
        link.write_bytes((out_dir / target).read_bytes())
    return link


def _finetune_pretrained(train, validation, out_dir, config,
                         epochs):  # pragma: no cover - needs weights + GPU time
    try:
        import torch
        from torch.optim import AdamW
        from transformers import AutoModelForSeq2SeqLM, AutoTokenizer
    except ImportError as exc:
        raise ModelServerError(
            f"fine-tuning '{config.model}' needs torch and transformers: {exc}") from exc

    torch.manual_seed(config.seed)
    tokenizer = AutoTokenizer.from_pretrained(config.model)
    model = AutoModelForSeq2SeqLM.from_pretrained(config.model)
    optimizer = AdamW(model.parameters(), lr=2e-5)

    def batch(sample):
        enc = tokenizer(sample["chunk_text"], truncation=True,
                        max_length=config.max_input_tokens, return_tensors="pt")
        enc["labels"] = tokenizer(sample["target_text"], truncation=True,
                                  max_length=config.max_output_tokens,
                                  return_tensors="pt").input_ids
        return enc

    scores: list[float] = []
    with (out_dir / "epochs.jsonl").open("w", encoding="utf-8") as log:
        for epoch in range(epochs):
            model.train()
            for sample in train:
                optimizer.zero_grad()
                loss = model(**batch(sample)).loss
                loss.backward()
                optimizer.step()
            model.eval()
            outputs = []
            with torch.no_grad():
                for sample in validation:
                    enc = tokenizer(sample["chunk_text"], truncation=True,
                                    max_length=config.max_input_tokens,
                                    return_tensors="pt")
                    ids = model.generate(**enc, num_beams=config.beam_size,
                                         max_length=config.max_output_tokens)
                    outputs.append(tokenizer.decode(ids[0], skip_special_tokens=True))
            score = sum(rouge2_f1(out, s["target_text"])
                        for out, s in zip(outputs, validation)) / len(validation)
            scores.append(score)
            checkpoint = out_dir / f"checkpoint-{epoch:02d}"
            model.save_pretrained(checkpoint)
            tokenizer.save_pretrained(checkpoint)
            log.write(json.dumps({"epoch": epoch, "rouge2": score}) + "\n")
    best = select_best(scores)
    link = out_dir / "best"
    if link.is_symlink() or link.exists():
        link.unlink()
    link.symlink_to(f"checkpoint-{best:02d}")
    return link
