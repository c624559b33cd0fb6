"""Adam optimizer and a one-cycle learning-rate schedule.

Adam follows the standard bias-corrected update: m and v are exponential
moving averages of the gradient and its square, and the step is
``theta -= lr * m_hat / (sqrt(v_hat) + eps)``. The one-cycle schedule
ramps cosine-style from ``max_lr / div_factor`` up to ``max_lr`` at
``round(pct_start * total_steps)`` and anneals down to
``max_lr / (div_factor * final_div_factor)`` at the last step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .autodiff import Tensor


@dataclass
class AdamState:
    """Per-parameter first/second moments plus the shared step counter."""

    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.0

    @classmethod
    def for_params(cls, params: dict[str, Tensor]) -> "AdamState":
        return cls(m={name: np.zeros_like(p.data) for name, p in params.items()},
                   v={name: np.zeros_like(p.data) for name, p in params.items()})


def adam_step(params: dict[str, Tensor], state: AdamState, lr: float):
    """Apply one Adam update in place and clear gradients.

    Every parameter must carry a gradient; a missing one indicates a
    broken training step and raises immediately.
    """
    for name, p in params.items():
        if p.grad is None:
            raise ValueError(f"adam_step: parameter '{name}' has no gradient")
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    bc1 = 1.0 - b1 ** state.t
    bc2 = 1.0 - b2 ** state.t
    for name, p in params.items():
        g = p.grad
        if state.weight_decay:
            g = g + state.weight_decay * p.data
        m = state.m[name]
        v = state.v[name]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        m_hat = m / bc1
        v_hat = v / bc2
        p.data -= lr * m_hat / (np.sqrt(v_hat) + state.eps)
        p.grad = None


@dataclass(frozen=True)
class OneCycleSchedule:
    """Cosine one-cycle schedule over a fixed number of steps."""

    max_lr: float
    total_steps: int
    pct_start: float = 0.3
    div_factor: float = 25.0
    final_div_factor: float = 1e4

    def __post_init__(self):
        if self.total_steps < 1:
            raise ValueError(f"total_steps must be >= 1, got {self.total_steps}")
        if not 0.0 < self.pct_start < 1.0:
            raise ValueError(f"pct_start must be in (0, 1), got {self.pct_start}")

    @property
    def initial_lr(self) -> float:
        return self.max_lr / self.div_factor

    @property
    def final_lr(self) -> float:
        return self.initial_lr / self.final_div_factor

    @property
    def peak_step(self) -> int:
        peak = round(self.pct_start * self.total_steps)
        # keep both ramp and anneal non-degenerate
        return min(max(peak, 1), max(self.total_steps - 2, 1))


def _cosine_blend(a: float, b: float, frac: float) -> float:
    # formulated so frac == 0 returns exactly a and frac == 1 exactly b
    w = 0.5 * (1.0 - math.cos(math.pi * frac))
    return a * (1.0 - w) + b * w


def lr_at(schedule: OneCycleSchedule, step: int) -> float:
    """Learning rate at an integer step in [0, total_steps)."""
    if not 0 <= step < schedule.total_steps:
        raise ValueError(
            f"step {step} outside schedule range [0, {schedule.total_steps})")
    if schedule.total_steps == 1:
        return schedule.initial_lr
    if schedule.total_steps == 2:
        return schedule.initial_lr if step == 0 else schedule.final_lr
    peak = schedule.peak_step
    if step <= peak:
        return _cosine_blend(schedule.initial_lr, schedule.max_lr, step / peak)
    return _cosine_blend(schedule.max_lr, schedule.final_lr,
                         (step - peak) / (schedule.total_steps - 1 - peak))
