import numpy as np
import pytest

from xeroalign.autodiff import Tensor
from xeroalign.optim import AdamState, OneCycleSchedule, adam_step, lr_at


def _unrolled_adam(grads, lr, beta1=0.9, beta2=0.999, eps=1e-8):
    """Independent hand-unrolled Adam recurrence on a scalar parameter."""
    theta, m, v = 0.0, 0.0, 0.0
    for t, g in enumerate(grads, start=1):
        m = beta1 * m + (1.0 - beta1) * g
        v = beta2 * v + (1.0 - beta2) * (g * g)
        m_hat = m / (1.0 - beta1 ** t)
        v_hat = v / (1.0 - beta2 ** t)
        theta -= lr * m_hat / (np.sqrt(v_hat) + eps)
    return theta


class TestAdam:
    def _single_param(self, value=0.0):
        p = Tensor(np.array([value]), requires_grad=True)
        params = {"w": p}
        return p, params, AdamState.for_params(params)

    def test_first_step_hand_value(self):
        p, params, state = self._single_param()
        p.grad = np.array([1.0])
        adam_step(params, state, lr=1e-3)
        expected = _unrolled_adam([1.0], lr=1e-3)
        assert abs(p.data[0] - expected) < 1e-15
        # m_hat = v_hat = 1 on the first step, so the update is -lr / (1 + eps)
        assert abs(p.data[0] - (-1e-3 / (1.0 + 1e-8))) < 1e-12

    def test_two_steps_match_hand_unroll(self):
        p, params, state = self._single_param()
        for _ in range(2):
            p.grad = np.array([1.0])
            adam_step(params, state, lr=1e-3)
        assert abs(p.data[0] - _unrolled_adam([1.0, 1.0], lr=1e-3)) < 1e-12
        assert state.t == 2

    def test_zero_gradient_leaves_parameter(self):
        p, params, state = self._single_param(value=0.75)
        p.grad = np.array([0.0])
        adam_step(params, state, lr=1e-3)
        assert p.data[0] == 0.75
        assert state.t == 1

    def test_missing_gradient_names_parameter(self):
        _, params, state = self._single_param()
        with pytest.raises(ValueError, match="'w'"):
            adam_step(params, state, lr=1e-3)

    def test_gradients_cleared_after_step(self):
        p, params, state = self._single_param()
        p.grad = np.array([1.0])
        adam_step(params, state, lr=1e-3)
        assert p.grad is None

    def test_first_step_direction_and_magnitude(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            g = rng.standard_normal(8)
            g[np.abs(g) < 1e-3] = 1e-3
            p = Tensor(np.zeros(8), requires_grad=True)
            params = {"w": p}
            p.grad = g.copy()
            adam_step(params, AdamState.for_params(params), lr=1e-3)
            assert (np.sign(p.data) == -np.sign(g)).all()
            np.testing.assert_allclose(np.abs(p.data), 1e-3, rtol=1e-6)


class TestOneCycle:
    def test_anchors_hold_exactly(self):
        s = OneCycleSchedule(max_lr=1e-3, total_steps=100)
        assert lr_at(s, 0) == 1e-3 / 25
        assert lr_at(s, s.peak_step) == 1e-3
        assert lr_at(s, 99) == (1e-3 / 25) / 1e4

    def test_peak_step_position(self):
        s = OneCycleSchedule(max_lr=1e-3, total_steps=100)
        assert s.peak_step == 30

    def test_ramp_midpoint_hand_value(self):
        # peak at step 30; halfway up the cosine ramp sits at the mean rate
        s = OneCycleSchedule(max_lr=1e-3, total_steps=100)
        assert abs(lr_at(s, 15) - 5.2e-4) < 1e-12

    def test_monotone_ramp_then_anneal(self):
        s = OneCycleSchedule(max_lr=3e-4, total_steps=57)
        rates = [lr_at(s, i) for i in range(57)]
        peak = s.peak_step
        assert all(rates[i] <= rates[i + 1] for i in range(peak))
        assert all(rates[i] >= rates[i + 1] for i in range(peak, 56))

    def test_out_of_range_step(self):
        s = OneCycleSchedule(max_lr=1e-3, total_steps=10)
        with pytest.raises(ValueError):
            lr_at(s, 10)
        with pytest.raises(ValueError):
            lr_at(s, -1)

    def test_tiny_schedules(self):
        s1 = OneCycleSchedule(max_lr=1e-3, total_steps=1)
        assert lr_at(s1, 0) == s1.initial_lr
        s2 = OneCycleSchedule(max_lr=1e-3, total_steps=2)
        assert lr_at(s2, 0) == s2.initial_lr
        assert lr_at(s2, 1) == s2.final_lr
