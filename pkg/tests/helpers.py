"""Shared construction helpers for the test suite."""

import json

from winsumm.corpus import Transcript, Utterance
from winsumm.tokenization import tokenize_words


def make_transcript(tid, texts, speakers=None):
    utts = []
    start = 0
    for i, text in enumerate(texts):
        n = len(tokenize_words(text))
        assert n > 0, f"helper got an empty utterance: {text!r}"
        speaker = speakers[i] if speakers else ("PM", "ID", "UI", "ME")[i % 4]
        utts.append(Utterance(index=i, speaker=speaker, text=text,
                              token_start=start, token_len=n))
        start += n
    return Transcript(id=tid, utterances=tuple(utts))


def write_jsonl(path, records):
    path.write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")
    return path


def corpus_file(tmp_path, transcripts, references=(), splits=(), name="corpus.jsonl"):
    """transcripts: {id: [utterance text, ...]}; references: {id: [(text, links), ...]}."""
    records = []
    for tid, texts in transcripts.items():
        records.append({"kind": "transcript", "id": tid,
                        "utterances": [{"speaker": "PM", "text": t} for t in texts]})
    for tid, sentences in dict(references).items():
        records.append({"kind": "reference", "id": tid,
                        "sentences": [{"text": t, "links": list(links)}
                                      for t, links in sentences]})
    for tid, split in dict(splits).items():
        records.append({"kind": "split", "id": tid, "split": split})
    return write_jsonl(tmp_path / name, records)


class FixedRng:
    """Stands in for Lcg64 where a test needs a forced draw sequence."""

    def __init__(self, values):
        self.values = list(values)

    def randint(self, lo, hi):
        value = self.values.pop(0)
        assert lo <= value <= hi, f"forced draw {value} outside [{lo}, {hi}]"
        return value
