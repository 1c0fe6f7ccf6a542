"""Bigram-overlap F1 used to rank fine-tuning checkpoints.

Local on purpose: checkpoint selection must not depend on the engine
package, and a plain clipped-bigram F1 is enough to order candidates.
"""

import re
from collections import Counter

_WORD = re.compile(r"[0-9a-z]+")


def _bigrams(text: str) -> Counter:
    words = _WORD.findall(text.lower())
    return Counter(zip(words, words[1:]))


def rouge2_f1(hypothesis: str, reference: str) -> float:
    hyp = _bigrams(hypothesis)
    ref = _bigrams(reference)
    overlap = sum((hyp & ref).values())
    if overlap == 0:
        return 0.0
    precision = overlap / sum(hyp.values())
    recall = overlap / sum(ref.values())
    return 2 * precision * recall / (precision + recall)
