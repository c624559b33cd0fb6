"""Sequence-labeling metrics: exact-match accuracy and entity-span F1.

Span decoding is lenient: an ``I-X`` with no live ``X`` span opens a new
one, and a ``B-X`` always opens one. Precision/recall/F1 are micro-averaged
over exact (type, start, end) matches, with the 0/0 -> 0 convention.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence


class Span(NamedTuple):
    label: str
    start: int
    end: int  # exclusive


def accuracy(preds: Sequence, golds: Sequence) -> float:
    if len(preds) != len(golds):
        raise ValueError(f"accuracy: {len(preds)} predictions vs {len(golds)} golds")
    if not golds:
        raise ValueError("accuracy of an empty sequence is undefined")
    return sum(p == g for p, g in zip(preds, golds)) / len(golds)


def bio_spans(tags: Sequence[str]) -> set[Span]:
    """Decode maximal same-type contiguous spans from a BIO sequence."""
    spans: set[Span] = set()
    label = None
    start = 0
    for i, tag in enumerate(tags):
        if len(tag) > 2 and tag[1] == "-" and tag[0] in "BI":
            kind, cur = tag[0], tag[2:]
        else:
            kind, cur = "O", None
        if kind == "I" and cur == label:
            continue
        if label is not None:
            spans.add(Span(label, start, i))
        label, start = cur, i
    if label is not None:
        spans.add(Span(label, start, len(tags)))
    return spans


def span_f1(gold: Sequence[Sequence[str]],
            pred: Sequence[Sequence[str]]) -> tuple[float, float, float]:
    """Micro-averaged (precision, recall, f1) over exactly matching spans."""
    if len(gold) != len(pred):
        raise ValueError(f"span_f1: {len(gold)} gold sequences vs {len(pred)} predicted")
    matched = n_gold = n_pred = 0
    for i, (g, p) in enumerate(zip(gold, pred)):
        if len(g) != len(p):
            raise ValueError(
                f"span_f1: sequence {i} length mismatch ({len(g)} gold vs {len(p)} predicted)")
        gs = bio_spans(g)
        ps = bio_spans(p)
        matched += len(gs & ps)
        n_gold += len(gs)
        n_pred += len(ps)
    precision = matched / n_pred if n_pred else 0.0
    recall = matched / n_gold if n_gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1
