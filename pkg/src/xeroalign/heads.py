"""Task heads and the joint training losses.

Each head is a single affine map: intent classification reads the CLS
vector, slot tagging reads every token's contextual vector. The task loss
is intent cross-entropy plus (when slot targets exist) slot cross-entropy,
combined by unweighted sum. The alignment loss is the mean squared error
between the CLS embeddings of a parallel sentence pair, and the total is
``task + lam * align`` with gradients flowing through both encoder passes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .autodiff import Tensor, add, cross_entropy, matmul, mse, reshape, scale
from .encoder import SequenceEncoding, _trunc_normal

IGNORE_INDEX = -100  # slot target sentinel for CLS and pad positions


@dataclass
class HeadParams:
    """One linear layer per task, no hidden layers."""

    intent_w: Tensor
    intent_b: Tensor
    slot_w: Tensor
    slot_b: Tensor

    def tensors(self) -> dict[str, Tensor]:
        return {"head.intent_w": self.intent_w, "head.intent_b": self.intent_b,
                "head.slot_w": self.slot_w, "head.slot_b": self.slot_b}

    @property
    def n_intents(self) -> int:
        return self.intent_w.shape[1]

    @property
    def n_slot_tags(self) -> int:
        return self.slot_w.shape[1]


def init_head_params(d_model: int, n_intents: int, n_slot_tags: int, seed) -> HeadParams:
    """Truncated-normal weights, zero biases; `seed` as in the encoder init."""
    rng = np.random.default_rng(seed)
    return HeadParams(
        intent_w=Tensor(_trunc_normal(rng, (d_model, n_intents)), requires_grad=True),
        intent_b=Tensor(np.zeros(n_intents), requires_grad=True),
        slot_w=Tensor(_trunc_normal(rng, (d_model, n_slot_tags)), requires_grad=True),
        slot_b=Tensor(np.zeros(n_slot_tags), requires_grad=True),
    )


def intent_logits(cls: Tensor, heads: HeadParams) -> Tensor:
    return add(matmul(cls, heads.intent_w), heads.intent_b)


def slot_logits(tokens: Tensor, heads: HeadParams) -> Tensor:
    return add(matmul(tokens, heads.slot_w), heads.slot_b)


@dataclass
class LossBundle:
    """Scalars of one training step; tensors stay on the live graph."""

    total: Tensor
    task: Tensor
    align: Optional[Tensor]
    intent: Tensor
    slot: Optional[Tensor]

    @property
    def total_loss(self) -> float:
        return self.total.item()

    @property
    def task_loss(self) -> float:
        return self.task.item()

    @property
    def align_loss(self) -> float:
        return self.align.item() if self.align is not None else 0.0


def task_loss(encoding: SequenceEncoding, intent_targets, slot_targets,
              heads: HeadParams) -> tuple[Tensor, Tensor, Optional[Tensor]]:
    """Return (task, intent, slot) losses; slot is None without slot targets.

    `slot_targets` must mark CLS and pad positions with IGNORE_INDEX so they
    contribute neither loss nor gradient.
    """
    intent_targets = np.asarray(intent_targets)
    if intent_targets.ndim != 1 or intent_targets.shape[0] != encoding.cls.shape[0]:
        raise ValueError(
            f"intent targets shape {intent_targets.shape} does not match batch "
            f"{encoding.cls.shape[0]}")
    intent = cross_entropy(intent_logits(encoding.cls, heads), intent_targets)
    if slot_targets is None:
        return intent, intent, None
    slot_targets = np.asarray(slot_targets)
    b, length, _ = encoding.tokens.shape
    if slot_targets.shape != (b, length):
        raise ValueError(
            f"slot targets shape {slot_targets.shape} does not match tokens "
            f"({b}, {length})")
    logits = reshape(slot_logits(encoding.tokens, heads),
                     (b * length, heads.n_slot_tags))
    slot = cross_entropy(logits, slot_targets.reshape(-1), ignore_index=IGNORE_INDEX)
    return add(intent, slot), intent, slot


def xero_align_loss(cls_source: Tensor, cls_target: Tensor) -> Tensor:
    """MSE between parallel CLS embeddings; rows must be aligned pairs."""
    if cls_source.shape[0] != cls_target.shape[0]:
        raise ValueError(
            f"alignment pairing broken: {cls_source.shape[0]} source rows vs "
            f"{cls_target.shape[0]} target rows")
    return mse(cls_source, cls_target)


def total_loss(task: Tensor, align: Tensor, lam: float = 1.0) -> Tensor:
    return add(task, scale(align, lam))
