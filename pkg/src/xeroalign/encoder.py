"""A small pre-norm transformer encoder over whitespace tokens.

The encoder consumes id sequences that start with a CLS token and returns
both per-token contextual embeddings and the position-0 (CLS) vector used
as the pooled sentence representation. Blocks are pre-norm
(norm -> sublayer -> residual add) with a final layer norm, learned
positional embeddings, and gelu feed-forwards. No dropout: runs are fully
deterministic given (seed, inputs).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .autodiff import (
    Tensor, add, embedding_lookup, gelu, layer_norm, matmul, reshape, scale,
    select, softmax, transpose,
)

INIT_STD = 0.02
MASKED_LOGIT_BIAS = -1e9

# Two sizes so experiments can compare a smaller against a larger model.
PRESETS: dict[str, dict] = {
    "tiny": {"d_model": 64, "n_heads": 4, "n_layers": 2, "d_ff": 128},
    "small": {"d_model": 128, "n_heads": 8, "n_layers": 4, "d_ff": 256},
}


@dataclass(frozen=True)
class EncoderConfig:
    vocab_size: int
    d_model: int = 64
    n_heads: int = 4
    n_layers: int = 2
    d_ff: int = 128
    max_len: int = 32
    cls_id: int = 1
    pad_id: int = 0

    def __post_init__(self):
        if min(self.vocab_size, self.d_model, self.n_heads,
               self.n_layers, self.d_ff, self.max_len) < 1:
            raise ValueError("all encoder dimensions must be positive")
        if self.d_model % self.n_heads:
            raise ValueError(
                f"d_model {self.d_model} not divisible by n_heads {self.n_heads}")
        if self.cls_id == self.pad_id:
            raise ValueError("cls_id and pad_id must differ")
        if max(self.cls_id, self.pad_id) >= self.vocab_size:
            raise ValueError("reserved token ids must fit inside the vocabulary")

    @property
    def head_dim(self) -> int:
        return self.d_model // self.n_heads


def config_for_preset(preset: str, vocab_size: int, max_len: int = 32) -> EncoderConfig:
    if preset not in PRESETS:
        raise ValueError(f"unknown encoder preset {preset!r}; know {sorted(PRESETS)}")
    return EncoderConfig(vocab_size=vocab_size, max_len=max_len, **PRESETS[preset])


class EncoderParams:
    """Named parameter tensors in fixed creation order."""

    def __init__(self, config: EncoderConfig, tensors: dict[str, Tensor]):
        self.config = config
        self.tensors = tensors

    def __getitem__(self, name: str) -> Tensor:
        return self.tensors[name]

    def arrays(self) -> dict[str, np.ndarray]:
        return {name: t.data for name, t in self.tensors.items()}


@dataclass
class SequenceEncoding:
    """CLS vector [B, H] plus per-token outputs [B, L, H]."""

    cls: Tensor
    tokens: Tensor


def _trunc_normal(rng: np.random.Generator, shape, std: float = INIT_STD) -> np.ndarray:
    x = rng.standard_normal(shape) * std
    bad = np.abs(x) > 2 * std
    while bad.any():
        x[bad] = rng.standard_normal(int(bad.sum())) * std
        bad = np.abs(x) > 2 * std
    return x


def init_encoder_params(config: EncoderConfig, seed) -> EncoderParams:
    """Deterministic initialization: N(0, 0.02^2) truncated at two sigma for
    weights, zeros for biases, ones for layer-norm gains.

    `seed` may be an int or a numpy Generator (to share a stream with other
    parameter groups).
    """
    rng = np.random.default_rng(seed)
    h, ff = config.d_model, config.d_ff

    def param(shape):
        return Tensor(_trunc_normal(rng, shape), requires_grad=True)

    def zeros(shape):
        return Tensor(np.zeros(shape), requires_grad=True)

    def ones(shape):
        return Tensor(np.ones(shape), requires_grad=True)

    t: dict[str, Tensor] = {}
    t["tok_emb"] = param((config.vocab_size, h))
    t["pos_emb"] = param((config.max_len, h))
    for i in range(config.n_layers):
        p = f"layer{i}."
        t[p + "attn_norm.gain"] = ones((h,))
        t[p + "attn_norm.bias"] = zeros((h,))
        t[p + "wq"] = param((h, h))
        t[p + "wk"] = param((h, h))
        t[p + "wv"] = param((h, h))
        t[p + "wo"] = param((h, h))
        t[p + "ff_norm.gain"] = ones((h,))
        t[p + "ff_norm.bias"] = zeros((h,))
        t[p + "w1"] = param((h, ff))
        t[p + "b1"] = zeros((ff,))
        t[p + "w2"] = param((ff, h))
        t[p + "b2"] = zeros((h,))
    t["final_norm.gain"] = ones((h,))
    t["final_norm.bias"] = zeros((h,))
    return EncoderParams(config, t)


def parameter_count(config: EncoderConfig) -> int:
    """Closed-form tensor-element count of :func:`init_encoder_params`."""
    h, ff = config.d_model, config.d_ff
    per_layer = 4 * h * h + (h * ff + ff) + (ff * h + h) + 4 * h
    return (config.vocab_size * h + config.max_len * h
            + config.n_layers * per_layer + 2 * h)


def _mask_bias(pad_mask: np.ndarray) -> Tensor:
    # [B, 1, 1, L] additive bias: 0 where attendable, -1e9 at padded keys
    bias = np.where(pad_mask, 0.0, MASKED_LOGIT_BIAS)[:, None, None, :]
    return Tensor(bias)


def attention(q: Tensor, k: Tensor, v: Tensor, key_mask: np.ndarray,
              return_weights: bool = False):
    """Scaled dot-product attention over [B, heads, L, head_dim] inputs.

    `key_mask` is a boolean [B, L] array; masked keys get -1e9 added to
    their logits before the softmax.
    """
    if q.ndim != 4 or q.shape != k.shape or k.shape != v.shape:
        raise ValueError(
            f"attention expects matching [B, heads, L, head_dim] inputs, "
            f"got {q.shape}, {k.shape}, {v.shape}")
    head_dim = q.shape[-1]
    scores = scale(matmul(q, transpose(k, (0, 1, 3, 2))), 1.0 / math.sqrt(head_dim))
    scores = add(scores, _mask_bias(np.asarray(key_mask, dtype=bool)))
    weights = softmax(scores, axis=-1)
    out = matmul(weights, v)
    if return_weights:
        return out, weights
    return out


def encode(params: EncoderParams, config: EncoderConfig,
           token_ids, pad_mask) -> SequenceEncoding:
    """Run the full stack; position 0 of the output is the CLS embedding."""
    ids = np.asarray(token_ids, dtype=np.int64)
    mask = np.asarray(pad_mask, dtype=bool)
    if ids.ndim != 2 or mask.shape != ids.shape:
        raise ValueError(f"expected [B, L] ids and matching mask, got {ids.shape} / {mask.shape}")
    batch, length = ids.shape
    if length > config.max_len:
        raise ValueError(f"sequence length {length} exceeds max_len {config.max_len}")
    if not (ids[:, 0] == config.cls_id).all():
        raise ValueError("every sequence must start with the CLS token id")
    if not (ids[~mask] == config.pad_id).all():
        raise ValueError("masked-out positions must hold the pad token id")

    h = config.d_model
    x = add(embedding_lookup(params["tok_emb"], ids),
            embedding_lookup(params["pos_emb"], np.arange(length)))
    bias = _mask_bias(mask)
    inv_sqrt = 1.0 / math.sqrt(config.head_dim)

    def split_heads(t: Tensor) -> Tensor:
        return transpose(reshape(t, (batch, length, config.n_heads, config.head_dim)),
                         (0, 2, 1, 3))

    for i in range(config.n_layers):
        p = f"layer{i}."
        hn = layer_norm(x, params[p + "attn_norm.gain"], params[p + "attn_norm.bias"])
        q = split_heads(matmul(hn, params[p + "wq"]))
        k = split_heads(matmul(hn, params[p + "wk"]))
        v = split_heads(matmul(hn, params[p + "wv"]))
        scores = add(scale(matmul(q, transpose(k, (0, 1, 3, 2))), inv_sqrt), bias)
        ctx = matmul(softmax(scores, axis=-1), v)
        ctx = reshape(transpose(ctx, (0, 2, 1, 3)), (batch, length, h))
        x = add(x, matmul(ctx, params[p + "wo"]))

        hn = layer_norm(x, params[p + "ff_norm.gain"], params[p + "ff_norm.bias"])
        ff = gelu(add(matmul(hn, params[p + "w1"]), params[p + "b1"]))
        ff = add(matmul(ff, params[p + "w2"]), params[p + "b2"])
        x = add(x, ff)

    x = layer_norm(x, params["final_norm.gain"], params["final_norm.bias"])
    return SequenceEncoding(cls=select(x, 1, 0), tokens=x)
