import pytest

from helpers import FixedRng, make_transcript, write_jsonl
from winsumm.conversion import (ContextSegment, CorefChain, Mention, SummarySnippet,
                                assign_unannotated, build_segments, gold_snippets,
                                inject_noise, load_chains, merge_into_snippets,
                                replace_leading_pronoun)
from winsumm.corpus import SummarySentence
from winsumm.errors import CorpusLoadError
from winsumm.rng import Lcg64


def _sent(i, text, links):
    return SummarySentence(sent_index=i, text=text, links=frozenset(links))


def _transcript(n=16):
    return make_transcript("t", [f"utterance number {i} alpha{i}" for i in range(n)])


def _seg(lo, hi):
    return ContextSegment(transcript_id="t", first_utt=lo, last_utt=hi)


def test_build_segments_min_max():
    t = _transcript(16)
    annotated, unannotated = build_segments(
        [_sent(0, "a.", [12, 15, 14]), _sent(1, "b.", [7]), _sent(2, "c.", [])], t)
    assert annotated[0][1] == _seg(12, 15)
    assert annotated[1][1] == _seg(7, 7)
    assert [s.sent_index for s in unannotated] == [2]


def test_merge_overlapping_ranges():
    t = _transcript(16)
    snippets = merge_into_snippets(
        [(_sent(0, "a.", []), _seg(2, 8)), (_sent(1, "b.", []), _seg(6, 12))], t)
    assert len(snippets) == 1
    assert (snippets[0].segment.first_utt, snippets[0].segment.last_utt) == (2, 12)
    assert snippets[0].boundary_utt == 12
    assert snippets[0].boundary_text == t.utterances[12].text


def test_merge_disjoint_ranges():
    t = _transcript(16)
    snippets = merge_into_snippets(
        [(_sent(0, "a.", []), _seg(2, 5)), (_sent(1, "b.", []), _seg(9, 12))], t)
    assert [(s.segment.first_utt, s.segment.last_utt) for s in snippets] == [(2, 5), (9, 12)]
    assert [s.snippet_index for s in snippets] == [0, 1]


def test_merge_chained_intersections():
    t = _transcript(16)
    snippets = merge_into_snippets(
        [(_sent(0, "a.", []), _seg(1, 4)), (_sent(1, "b.", []), _seg(3, 6)),
         (_sent(2, "c.", []), _seg(6, 9))], t)
    assert len(snippets) == 1
    assert (snippets[0].segment.first_utt, snippets[0].segment.last_utt) == (1, 9)


def test_merge_min_overlap_threshold():
    t = _transcript(16)
    pairs = [(_sent(0, "a.", []), _seg(2, 6)), (_sent(1, "b.", []), _seg(6, 10))]
    assert len(merge_into_snippets(pairs, t, min_overlap=1)) == 1
    assert len(merge_into_snippets(pairs, t, min_overlap=2)) == 2


def test_merge_orders_sentences_by_sent_index():
    t = _transcript(16)
    snippets = merge_into_snippets(
        [(_sent(3, "late.", []), _seg(2, 8)), (_sent(1, "early.", []), _seg(5, 9))], t)
    assert [s.sent_index for s in snippets[0].sentences] == [1, 3]


def test_merge_is_idempotent():
    t = _transcript(16)
    first = merge_into_snippets(
        [(_sent(0, "a.", []), _seg(1, 4)), (_sent(1, "b.", []), _seg(3, 6)),
         (_sent(2, "c.", []), _seg(9, 12))], t)
    again = merge_into_snippets(
        [(s, snip.segment) for snip in first for s in snip.sentences], t)
    assert [(s.segment.first_utt, s.segment.last_utt) for s in again] == \
        [(s.segment.first_utt, s.segment.last_utt) for s in first]
    assert [tuple(x.sent_index for x in s.sentences) for s in again] == \
        [tuple(x.sent_index for x in s.sentences) for s in first]


def test_merge_requires_input():
    with pytest.raises(ValueError):
        merge_into_snippets([], _transcript(4))


def _snippets_for_assignment():
    texts = ["red green blue", "cyan magenta", "violet indigo", "amber bronze copper"]
    t = make_transcript("t", texts)
    snips = merge_into_snippets(
        [(_sent(0, "a.", []), _seg(0, 1)), (_sent(1, "b.", []), _seg(3, 3))], t)
    return t, snips


def test_assign_unannotated_argmax_recall():
    t, snips = _snippets_for_assignment()
    out = assign_unannotated([_sent(5, "amber copper", [])], snips, t)
    assert [s.sent_index for s in out[1].sentences] == [1, 5]
    assert [s.sent_index for s in out[0].sentences] == [0]


def test_assign_unannotated_tie_goes_to_earlier_segment():
    t, snips = _snippets_for_assignment()
    # one word from each segment: recall ties at 1/2
    out = assign_unannotated([_sent(5, "red amber", [])], snips, t)
    assert [s.sent_index for s in out[0].sentences] == [0, 5]


def test_assign_unannotated_zero_overlap_goes_last():
    t, snips = _snippets_for_assignment()
    out = assign_unannotated([_sent(5, "zzz qqq", [])], snips, t)
    assert [s.sent_index for s in out[1].sentences] == [1, 5]


def test_assign_unannotated_without_snippets_forms_trailing_snippet():
    t, _ = _snippets_for_assignment()
    out = assign_unannotated([_sent(0, "a.", []), _sent(1, "b.", [])], [], t)
    assert len(out) == 1
    assert (out[0].segment.first_utt, out[0].segment.last_utt) == (0, len(t.utterances) - 1)
    assert [s.sent_index for s in out[0].sentences] == [0, 1]


def test_assign_unannotated_appends_in_original_order():
    t, snips = _snippets_for_assignment()
    out = assign_unannotated([_sent(7, "copper", []), _sent(5, "amber", [])], snips, t)
    assert [s.sent_index for s in out[1].sentences] == [1, 5, 7]


def _pronoun_snippet(text, sent_index=0):
    t = _transcript(6)
    return SummarySnippet(snippet_index=0,
                          sentences=(_sent(sent_index, text, [1]),),
                          segment=_seg(1, 3), boundary_utt=3,
                          boundary_text=t.utterances[3].text)


def test_replace_leading_pronoun():
    chains = [CorefChain(representative="the project manager",
                         mentions=(Mention(sent_index=0, start=0, end=2, text="He"),))]
    snip = replace_leading_pronoun(_pronoun_snippet("He asked about the button."), chains)
    assert snip.sentences[0].text == "The project manager asked about the button."


def test_replace_requires_matching_mention_span():
    chains = [CorefChain(representative="the pm",
                         mentions=(Mention(sent_index=0, start=3, end=5, text="he"),))]
    snip = replace_leading_pronoun(_pronoun_snippet("He asked."), chains)
    assert snip.sentences[0].text == "He asked."


def test_replace_ignores_non_pronoun_start():
    chains = [CorefChain(representative="x",
                         mentions=(Mention(sent_index=0, start=0, end=3, text="The"),))]
    snip = replace_leading_pronoun(_pronoun_snippet("The group decided."), chains)
    assert snip.sentences[0].text == "The group decided."


def test_replace_with_empty_chains_is_identity():
    snip = _pronoun_snippet("She left early.")
    assert replace_leading_pronoun(snip, []) is snip


def test_replace_only_first_sentence_counts():
    chains = [CorefChain(representative="the pm",
                         mentions=(Mention(sent_index=4, start=0, end=4, text="They"),))]
    # mention matches sent_index 4, but the snippet's first sentence is index 2
    snip = replace_leading_pronoun(_pronoun_snippet("They studied it.", sent_index=2), chains)
    assert snip.sentences[0].text == "They studied it."


def test_inject_noise_hand_example():
    first, last = inject_noise(_seg(20, 25), 100, FixedRng([8]))
    assert (first, last) == (16, 29)


def test_inject_noise_clipping():
    first, last = inject_noise(_seg(1, 3), 100, FixedRng([9]))
    assert (first, last) == (0, 7)


def test_inject_noise_draws_in_range():
    rng = Lcg64(99)
    seen = set()
    for _ in range(10_000):
        first, last = inject_noise(_seg(40, 45), 1000, rng)
        g = (40 - first) + (last - 45)
        seen.add(g)
        assert 6 <= g <= 14
    assert seen == set(range(6, 15))


def test_gold_snippets_partition(standard_build):
    corpus = standard_build.corpus
    for tid, snippets in gold_snippets(corpus, standard_build.chains).items():
        got = sorted(s.sent_index for snip in snippets for s in snip.sentences)
        assert got == [s.sent_index for s in corpus.references[tid]]
        firsts = [s.segment.first_utt for s in snippets]
        assert firsts == sorted(firsts)
        for snip in snippets:
            assert snip.boundary_utt == snip.segment.last_utt
            assert snip.boundary_text == \
                corpus.transcripts[tid].utterances[snip.boundary_utt].text


def test_gold_snippets_applies_chains(standard_build):
    snippets = gold_snippets(standard_build.corpus, standard_build.chains)["mtg0"]
    texts = [s.text for snip in snippets for s in snip.sentences]
    assert any(t.startswith("The industrial designers ") for t in texts)
    assert not any(t.startswith("They ") for t in texts)
    # the plain reference still holds the pronoun form
    raw = [s.text for s in standard_build.corpus.references["mtg0"]]
    assert any(t.startswith("They ") for t in raw)


def test_load_chains_roundtrip(tmp_path):
    path = write_jsonl(tmp_path / "chains.jsonl", [
        {"kind": "chains", "id": "t",
         "chains": [{"representative": "the manager",
                     "mentions": [{"sent_index": 0, "start": 0, "end": 2, "text": "He"}]}]}])
    chains = load_chains(path)
    assert chains["t"][0].representative == "the manager"
    assert chains["t"][0].mentions[0] == Mention(sent_index=0, start=0, end=2, text="He")


def test_load_chains_rejects_empty_representative(tmp_path):
    path = write_jsonl(tmp_path / "chains.jsonl", [
        {"kind": "chains", "id": "t",
         "chains": [{"representative": "", "mentions": []}]}])
    with pytest.raises(CorpusLoadError, match="empty representative"):
        load_chains(path)


def test_load_chains_rejects_overlapping_mentions(tmp_path):
    path = write_jsonl(tmp_path / "chains.jsonl", [
        {"kind": "chains", "id": "t", "chains": [
            {"representative": "a",
             "mentions": [{"sent_index": 0, "start": 0, "end": 4, "text": "They"}]},
            {"representative": "b",
             "mentions": [{"sent_index": 0, "start": 2, "end": 5, "text": "ey w"}]},
        ]}])
    with pytest.raises(CorpusLoadError, match="overlapping chains"):
        load_chains(path)
