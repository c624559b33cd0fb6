import numpy as np
import pytest

from xeroalign.autodiff import Graph, Tensor, backward, grad_check, tensor_sum
from xeroalign.encoder import EncoderConfig, SequenceEncoding, encode, init_encoder_params
from xeroalign.heads import (
    IGNORE_INDEX, HeadParams, init_head_params, intent_logits, slot_logits,
    task_loss, total_loss, xero_align_loss,
)


def heads_from(intent_w, intent_b, slot_w, slot_b):
    return HeadParams(Tensor(intent_w, requires_grad=True), Tensor(intent_b, requires_grad=True),
                      Tensor(slot_w, requires_grad=True), Tensor(slot_b, requires_grad=True))


def encoding_from(cls_data, tokens_data):
    return SequenceEncoding(cls=Tensor(cls_data), tokens=Tensor(tokens_data))


class TestIntentLogits:
    def test_zero_weights_yield_bias(self):
        heads = heads_from(np.zeros((3, 4)), np.array([1.0, 2.0, 3.0, 4.0]),
                           np.zeros((3, 2)), np.zeros(2))
        out = intent_logits(Tensor(np.random.default_rng(0).standard_normal((5, 3))), heads)
        np.testing.assert_array_equal(out.data, np.tile([1.0, 2.0, 3.0, 4.0], (5, 1)))

    def test_hand_affine(self):
        heads = heads_from(np.array([[1.0, 2.0], [3.0, 4.0]]), np.zeros(2),
                           np.zeros((2, 2)), np.zeros(2))
        out = intent_logits(Tensor(np.array([[1.0, 0.0]])), heads)
        np.testing.assert_array_equal(out.data, [[1.0, 2.0]])

    def test_weight_gradient_finite_differences(self):
        rng = np.random.default_rng(1)
        heads = init_head_params(4, 3, 2, seed=0)
        cls = Tensor(rng.standard_normal((2, 4)))
        r = Tensor(rng.standard_normal((2, 3)))

        def f(w, b):
            h = HeadParams(w, b, heads.slot_w, heads.slot_b)
            from xeroalign.autodiff import mul
            return tensor_sum(mul(intent_logits(cls, h), r))

        report = grad_check(f, [heads.intent_w, heads.intent_b], rel_tol=1e-5)
        assert report.passed, report


class TestSlotLogits:
    def test_shape_contract(self):
        heads = init_head_params(8, 3, 5, seed=1)
        tokens = Tensor(np.random.default_rng(2).standard_normal((2, 7, 8)))
        assert slot_logits(tokens, heads).shape == (2, 7, 5)

    def test_matches_rowwise_intent_style_head(self):
        rng = np.random.default_rng(3)
        heads = init_head_params(6, 2, 4, seed=2)
        tokens_data = rng.standard_normal((2, 3, 6))
        out = slot_logits(Tensor(tokens_data), heads)
        for b in range(2):
            for l in range(3):
                row = tokens_data[b, l] @ heads.slot_w.data + heads.slot_b.data
                np.testing.assert_allclose(out.data[b, l], row, rtol=0, atol=1e-12)


class TestTaskLoss:
    def test_without_slots_equals_intent_loss(self):
        rng = np.random.default_rng(4)
        heads = init_head_params(4, 3, 2, seed=3)
        enc = encoding_from(rng.standard_normal((2, 4)), rng.standard_normal((2, 3, 4)))
        task, intent, slot = task_loss(enc, np.array([0, 2]), None, heads)
        assert slot is None
        assert task.item() == intent.item()

    def test_uniform_logits_four_classes(self):
        heads = heads_from(np.zeros((4, 4)), np.zeros(4), np.zeros((4, 2)), np.zeros(2))
        enc = encoding_from(np.ones((1, 4)), np.ones((1, 2, 4)))
        task, _, _ = task_loss(enc, np.array([1]), None, heads)
        assert abs(task.item() - np.log(4.0)) < 1e-12

    def test_perfect_margin_near_zero(self):
        cls = np.array([[100.0, 0.0], [0.0, 100.0]])
        heads = heads_from(np.eye(2), np.zeros(2), np.zeros((2, 2)), np.zeros(2))
        enc = encoding_from(cls, cls[:, None, :])
        task, _, _ = task_loss(enc, np.array([0, 1]), None, heads)
        assert task.item() < 1e-12

    def test_slot_loss_added(self):
        rng = np.random.default_rng(5)
        heads = init_head_params(4, 3, 3, seed=4)
        enc = encoding_from(rng.standard_normal((2, 4)), rng.standard_normal((2, 3, 4)))
        slots = np.array([[IGNORE_INDEX, 1, 2], [IGNORE_INDEX, 0, IGNORE_INDEX]])
        task, intent, slot = task_loss(enc, np.array([0, 1]), slots, heads)
        assert task.item() == intent.item() + slot.item()

    def test_ignored_positions_contribute_zero_gradient(self):
        rng = np.random.default_rng(6)
        heads = init_head_params(4, 2, 3, seed=5)
        tokens = Tensor(rng.standard_normal((1, 3, 4)), requires_grad=True)
        enc = SequenceEncoding(cls=Tensor(rng.standard_normal((1, 4))), tokens=tokens)
        slots = np.array([[IGNORE_INDEX, 1, IGNORE_INDEX]])
        with Graph():
            task, _, _ = task_loss(enc, np.array([0]), slots, heads)
            backward(task)
        np.testing.assert_array_equal(tokens.grad[0, 0], np.zeros(4))
        np.testing.assert_array_equal(tokens.grad[0, 2], np.zeros(4))
        assert np.abs(tokens.grad[0, 1]).max() > 0


class TestAlignLoss:
    def test_identical_inputs(self):
        x = np.random.default_rng(7).standard_normal((3, 8))
        assert xero_align_loss(Tensor(x), Tensor(x.copy())).item() == 0.0

    def test_hand_value(self):
        out = xero_align_loss(Tensor(np.array([[1.0, 0.0]])), Tensor(np.array([[0.0, 1.0]])))
        assert out.item() == 1.0

    def test_symmetry(self):
        rng = np.random.default_rng(8)
        a, b = rng.standard_normal((2, 4)), rng.standard_normal((2, 4))
        assert xero_align_loss(Tensor(a), Tensor(b)).item() == \
            xero_align_loss(Tensor(b), Tensor(a)).item()

    def test_row_mismatch_is_pairing_error(self):
        with pytest.raises(ValueError, match="pairing"):
            xero_align_loss(Tensor(np.zeros((2, 4))), Tensor(np.zeros((3, 4))))

    def test_gradients_reach_both_branches(self):
        rng = np.random.default_rng(9)
        a = Tensor(rng.standard_normal((2, 4)), requires_grad=True)
        b = Tensor(rng.standard_normal((2, 4)), requires_grad=True)
        with Graph():
            backward(xero_align_loss(a, b))
        assert np.abs(a.grad).max() > 0
        assert np.abs(b.grad).max() > 0
        np.testing.assert_array_equal(a.grad, -b.grad)


class TestTotalLoss:
    def test_hand_sum(self):
        out = total_loss(Tensor(np.asarray(2.0)), Tensor(np.asarray(0.5)), lam=1.0)
        assert out.item() == 2.5

    def test_lam_zero_is_task_only(self):
        out = total_loss(Tensor(np.asarray(1.25)), Tensor(np.asarray(9.0)), lam=0.0)
        assert out.item() == 1.25

    def test_exact_identity(self):
        rng = np.random.default_rng(10)
        for _ in range(20):
            t = float(rng.random() * 3)
            a = float(rng.random())
            lam = float(rng.choice([0.0, 0.5, 1.0, 2.0]))
            out = total_loss(Tensor(np.asarray(t)), Tensor(np.asarray(a)), lam)
            assert out.item() - (t + lam * a) == 0.0

    def test_gradient_is_sum_of_component_gradients(self):
        config = EncoderConfig(vocab_size=15, d_model=8, n_heads=2, n_layers=1,
                               d_ff=16, max_len=6)
        enc_params = init_encoder_params(config, 6)
        heads = init_head_params(8, 3, 2, seed=7)
        ids = np.array([[config.cls_id, 3, 4]])
        mask = np.ones((1, 3), dtype=bool)
        tgt_ids = np.array([[config.cls_id, 5, 6]])
        lam = 0.7
        probe = enc_params["layer0.wq"]

        def run(task_on, align_on):
            probe.zero_grad()
            for t in list(enc_params.tensors.values()) + list(heads.tensors().values()):
                t.zero_grad()
            with Graph():
                enc_s = encode(enc_params, config, ids, mask)
                enc_t = encode(enc_params, config, tgt_ids, mask)
                task, _, _ = task_loss(enc_s, np.array([1]), None, heads)
                align = xero_align_loss(enc_s.cls, enc_t.cls)
                if task_on and align_on:
                    backward(total_loss(task, align, lam))
                elif task_on:
                    backward(task)
                else:
                    backward(align)
            return probe.grad.copy()

        g_total = run(True, True)
        g_task = run(True, False)
        g_align = run(False, True)
        np.testing.assert_allclose(g_total, g_task + lam * g_align, rtol=1e-12, atol=1e-18)
