import random

import pytest

from xeroalign.metrics import Span, accuracy, bio_spans, span_f1


class TestAccuracy:
    def test_identity(self):
        assert accuracy(["a", "b"], ["a", "b"]) == 1.0

    def test_complement(self):
        assert accuracy(["a", "b"], ["b", "a"]) == 0.0

    def test_three_of_four(self):
        assert accuracy([1, 2, 3, 4], [1, 2, 3, 0]) == 0.75

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            accuracy([1], [1, 2])


class TestBioSpans:
    def test_hand_decode(self):
        tags = ["B-LOC", "I-LOC", "O", "B-PER"]
        assert bio_spans(tags) == {Span("LOC", 0, 2), Span("PER", 3, 4)}

    def test_empty(self):
        assert bio_spans(["O", "O"]) == set()

    def test_lenient_bare_inside_tags(self):
        assert bio_spans(["I-LOC", "I-LOC"]) == {Span("LOC", 0, 2)}

    def test_adjacent_b_tags_split(self):
        assert bio_spans(["B-X", "B-X"]) == {Span("X", 0, 1), Span("X", 1, 2)}

    def test_type_change_splits(self):
        assert bio_spans(["B-X", "I-Y"]) == {Span("X", 0, 1), Span("Y", 1, 2)}


def brute_force_spans(tags):
    """Independent oracle: enumerate every (type, start, end) candidate and
    test the decoding predicate directly on the tag sequence."""
    same = lambda tag, label: tag in (f"B-{label}", f"I-{label}")
    labels = {t[2:] for t in tags if len(t) > 2 and t[1] == "-"}
    found = set()
    n = len(tags)
    for label in labels:
        for s in range(n):
            for e in range(s + 1, n + 1):
                if not all(same(tags[k], label) for k in range(s, e)):
                    continue
                if any(tags[k] == f"B-{label}" for k in range(s + 1, e)):
                    continue  # an inner B starts a new span
                starts = tags[s] == f"B-{label}" or (
                    tags[s] == f"I-{label}" and (s == 0 or not same(tags[s - 1], label)))
                ends = e == n or tags[e] != f"I-{label}"
                if starts and ends:
                    found.add(Span(label, s, e))
    return found


def brute_force_prf(gold_seqs, pred_seqs):
    matched = n_gold = n_pred = 0
    for g, p in zip(gold_seqs, pred_seqs):
        gs, ps = brute_force_spans(g), brute_force_spans(p)
        matched += len(gs & ps)
        n_gold += len(gs)
        n_pred += len(ps)
    precision = matched / n_pred if n_pred else 0.0
    recall = matched / n_gold if n_gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def random_bio(rng, length, types):
    return [rng.choice(["O"] + [f"{b}-{t}" for b in "BI" for t in types])
            for _ in range(length)]


class TestSpanF1:
    def test_identity(self):
        seqs = [["B-LOC", "I-LOC", "O"], ["B-PER"]]
        assert span_f1(seqs, seqs) == (1.0, 1.0, 1.0)

    def test_hand_counts(self):
        gold = [["B-LOC", "I-LOC", "O", "B-PER"]]
        pred = [["B-LOC", "I-LOC", "O", "O"]]
        p, r, f1 = span_f1(gold, pred)
        assert p == 1.0 and r == 0.5
        assert abs(f1 - 2 / 3) < 1e-12

    def test_no_predictions_convention(self):
        assert span_f1([["B-LOC"]], [["O"]]) == (0.0, 0.0, 0.0)

    def test_length_mismatch_names_sequence(self):
        with pytest.raises(ValueError, match="sequence 1"):
            span_f1([["O"], ["O", "O"]], [["O"], ["O"]])

    def test_permutation_invariance(self):
        rng = random.Random(7)
        gold = [random_bio(rng, rng.randint(1, 10), ["A", "B"]) for _ in range(20)]
        pred = [random_bio(rng, len(g), ["A", "B"]) for g in gold]
        order = list(range(20))
        rng.shuffle(order)
        assert span_f1(gold, pred) == span_f1([gold[i] for i in order],
                                              [pred[i] for i in order])

    def test_matches_brute_force_oracle_on_1000_random_pairs(self):
        rng = random.Random(1234)
        types = ["LOC", "PER", "NUM"]
        gold_seqs, pred_seqs = [], []
        for _ in range(1000):
            n = rng.randint(1, 12)
            gold_seqs.append(random_bio(rng, n, types))
            pred_seqs.append(random_bio(rng, n, types))
            assert bio_spans(gold_seqs[-1]) == brute_force_spans(gold_seqs[-1])
        assert span_f1(gold_seqs, pred_seqs) == brute_force_prf(gold_seqs, pred_seqs)

    def test_bounds(self):
        rng = random.Random(99)
        for _ in range(50):
            n = rng.randint(1, 12)
            gold = [random_bio(rng, n, ["A", "B"])]
            pred = [random_bio(rng, n, ["A", "B"])]
            p, r, f1 = span_f1(gold, pred)
            assert 0.0 <= p <= 1.0 and 0.0 <= r <= 1.0 and 0.0 <= f1 <= 1.0
            assert f1 <= max(p, r) + 1e-15
