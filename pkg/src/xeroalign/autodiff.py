"""Dense float64 tensors with define-by-run reverse-mode automatic differentiation.

The engine is deliberately small: only the operations a compact transformer
encoder and its losses need. Every op computes its result with numpy and
appends a node to the active :class:`Graph` tape; ``backward`` replays the
tape in strict reverse append order. Graphs are cheap and meant to be
rebuilt per forward pass (``with Graph(): ...``).

All arithmetic is 64-bit. This makes tight finite-difference tolerances
attainable and keeps every operation bitwise deterministic.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

# Constant of the tanh-based gelu approximation.
GELU_CUBIC_COEFF = 0.044715
_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


class DimensionError(ValueError):
    """Operand shapes are incompatible with the requested operation."""


class _Node:
    """One recorded operation: parents always precede it on the tape."""

    __slots__ = ("kind", "parents", "backward", "leaf")

    def __init__(self, kind, parents, backward, leaf=None):
        self.kind = kind
        self.parents = parents
        self.backward = backward
        self.leaf = leaf


class Graph:
    """Append-only operation tape; also a context manager selecting itself."""

    __slots__ = ("nodes",)

    def __init__(self):
        self.nodes: list[_Node] = []

    def __enter__(self) -> "Graph":
        _GRAPH_STACK.append(self)
        return self

    def __exit__(self, exc_type, exc, tb):
        _GRAPH_STACK.pop()
        return False

    def __len__(self) -> int:
        return len(self.nodes)


_GRAPH_STACK: list[Graph] = [Graph()]
_NO_GRAD_DEPTH = 0


def active_graph() -> Graph:
    return _GRAPH_STACK[-1]


@contextmanager
def no_grad():
    """Disable tape recording (evaluation / finite-difference passes)."""
    global _NO_GRAD_DEPTH
    _NO_GRAD_DEPTH += 1
    try:
        yield
    finally:
        _NO_GRAD_DEPTH -= 1


class Tensor:
    """n-dimensional float64 value, optionally tracked on a graph.

    ``grad`` is populated (and accumulated into) by :func:`backward` for
    leaf tensors with ``requires_grad=True``; intermediates never hold
    gradients.
    """

    __slots__ = ("data", "requires_grad", "grad", "_graph", "_node_id")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.requires_grad = bool(requires_grad)
        self.grad: Optional[np.ndarray] = None
        self._graph: Optional[Graph] = None
        self._node_id: Optional[int] = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        if self.data.size != 1:
            raise DimensionError(f"item() on non-scalar tensor of shape {self.shape}")
        return float(self.data)

    def zero_grad(self):
        self.grad = None

    def backward(self):
        backward(self)

    def __repr__(self):
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"

    # operator sugar
    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return scale(self, float(other))
        return mul(self, other)

    def __rmul__(self, other):
        return scale(self, float(other))

    def __matmul__(self, other):
        return matmul(self, other)

    def __neg__(self):
        return scale(self, -1.0)


def _node_id_in(t: Tensor, g: Graph) -> int:
    """Return t's node id on g, registering it as a leaf if needed."""
    if t._graph is g and t._node_id is not None:
        return t._node_id
    nid = len(g.nodes)
    g.nodes.append(_Node("leaf", (), None, t))
    t._graph = g
    t._node_id = nid
    return nid


def _record(kind: str, out_data: np.ndarray, parents: Sequence[Tensor],
            backward_fn: Callable[[np.ndarray], tuple]) -> Tensor:
    out = Tensor(out_data)
    if _NO_GRAD_DEPTH or not any(p.requires_grad for p in parents):
        return out
    g = _GRAPH_STACK[-1]
    pids = tuple(_node_id_in(p, g) for p in parents)
    out.requires_grad = True
    out._graph = g
    out._node_id = len(g.nodes)
    g.nodes.append(_Node(kind, pids, backward_fn, None))
    return out


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Reduce grad back to `shape` by summing broadcast axes."""
    extra = grad.ndim - len(shape)
    if extra:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad


def _check_broadcast_to_first(a: Tensor, b: Tensor, op: str):
    try:
        out = np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        out = None
    if out != a.shape:
        raise DimensionError(f"{op}: shape {b.shape} does not broadcast onto {a.shape}")


# ---------------------------------------------------------------------------
# elementwise operations


def add(a: Tensor, b: Union[Tensor, float, int]) -> Tensor:
    if isinstance(b, (int, float)):
        c = float(b)
        return _record("add_scalar", a.data + c, (a,), lambda g: (g,))
    _check_broadcast_to_first(a, b, "add")
    b_shape = b.shape

    def backward_fn(g):
        return g, _unbroadcast(g, b_shape)

    return _record("add", a.data + b.data, (a, b), backward_fn)


def sub(a: Tensor, b: Union[Tensor, float, int]) -> Tensor:
    if isinstance(b, (int, float)):
        c = float(b)
        return _record("sub_scalar", a.data - c, (a,), lambda g: (g,))
    _check_broadcast_to_first(a, b, "sub")
    b_shape = b.shape

    def backward_fn(g):
        return g, -_unbroadcast(g, b_shape)

    return _record("sub", a.data - b.data, (a, b), backward_fn)


def mul(a: Tensor, b: Tensor) -> Tensor:
    _check_broadcast_to_first(a, b, "mul")
    a_data, b_data = a.data, b.data

    def backward_fn(g):
        return g * b_data, _unbroadcast(g * a_data, b_data.shape)

    return _record("mul", a_data * b_data, (a, b), backward_fn)


def scale(a: Tensor, c: float) -> Tensor:
    c = float(c)
    return _record("scale", a.data * c, (a,), lambda g: (g * c,))


def relu(a: Tensor) -> Tensor:
    pos = a.data > 0

    def backward_fn(g):
        return (g * pos,)

    return _record("relu", np.maximum(a.data, 0.0), (a,), backward_fn)


def gelu(a: Tensor) -> Tensor:
    """Gaussian error linear unit, tanh approximation."""
    x = a.data
    inner = _SQRT_2_OVER_PI * (x + GELU_CUBIC_COEFF * x ** 3)
    t = np.tanh(inner)

    def backward_fn(g):
        d_inner = _SQRT_2_OVER_PI * (1.0 + 3.0 * GELU_CUBIC_COEFF * x * x)
        return (g * (0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * d_inner),)

    return _record("gelu", 0.5 * x * (1.0 + t), (a,), backward_fn)


# ---------------------------------------------------------------------------
# linear algebra and structural ops


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.ndim < 2 or b.ndim < 2:
        raise DimensionError(f"matmul needs rank >= 2 operands, got {a.shape} x {b.shape}")
    if a.shape[-1] != b.shape[-2]:
        raise DimensionError(f"matmul inner dimensions disagree: {a.shape} x {b.shape}")
    try:
        np.broadcast_shapes(a.shape[:-2], b.shape[:-2])
    except ValueError:
        raise DimensionError(f"matmul batch dimensions do not broadcast: {a.shape} x {b.shape}")
    a_data, b_data = a.data, b.data

    def backward_fn(g):
        ga = _unbroadcast(g @ np.swapaxes(b_data, -1, -2), a_data.shape)
        gb = _unbroadcast(np.swapaxes(a_data, -1, -2) @ g, b_data.shape)
        return ga, gb

    return _record("matmul", a_data @ b_data, (a, b), backward_fn)


def reshape(a: Tensor, shape: Sequence[int]) -> Tensor:
    shape = tuple(shape)
    if int(np.prod(shape, dtype=np.int64)) != a.size:
        raise DimensionError(f"cannot reshape {a.shape} into {shape}")
    old = a.shape
    return _record("reshape", a.data.reshape(shape), (a,), lambda g: (g.reshape(old),))


def transpose(a: Tensor, axes: Sequence[int]) -> Tensor:
    axes = tuple(axes)
    inv = tuple(np.argsort(axes))
    return _record("transpose", np.transpose(a.data, axes), (a,),
                   lambda g: (np.transpose(g, inv),))


def select(a: Tensor, axis: int, index: int) -> Tensor:
    """Pick one slice along `axis`, dropping that axis."""
    if not -a.ndim <= axis < a.ndim:
        raise DimensionError(f"select axis {axis} invalid for shape {a.shape}")
    axis = axis % a.ndim
    if not 0 <= index < a.shape[axis]:
        raise DimensionError(f"select index {index} out of range for shape {a.shape}")
    shape = a.shape
    slicer = tuple(index if i == axis else slice(None) for i in range(a.ndim))

    def backward_fn(g):
        full = np.zeros(shape)
        full[slicer] = g
        return (full,)

    return _record("select", a.data[slicer], (a,), backward_fn)


def embedding_lookup(table: Tensor, ids) -> Tensor:
    """Row gather from a [V, H] table; backward scatter-adds into the table."""
    ids = np.asarray(ids)
    if not np.issubdtype(ids.dtype, np.integer):
        raise TypeError(f"embedding ids must be integers, got dtype {ids.dtype}")
    if table.ndim != 2:
        raise DimensionError(f"embedding table must be rank 2, got {table.shape}")
    vocab = table.shape[0]
    if ids.size and (ids.min() < 0 or ids.max() >= vocab):
        bad = ids[(ids < 0) | (ids >= vocab)]
        raise IndexError(f"token id {int(bad.flat[0])} out of range for table with {vocab} rows")
    shape = table.shape

    def backward_fn(g):
        gt = np.zeros(shape)
        np.add.at(gt, ids, g)
        return (gt,)

    return _record("embedding", table.data[ids], (table,), backward_fn)


# ---------------------------------------------------------------------------
# reductions, normalization and losses


def tensor_sum(a: Tensor) -> Tensor:
    shape = a.shape
    return _record("sum", np.asarray(a.data.sum()), (a,),
                   lambda g: (np.full(shape, float(g)),))


def softmax(a: Tensor, axis: int = -1) -> Tensor:
    if not -a.ndim <= axis < a.ndim:
        raise DimensionError(f"softmax axis {axis} invalid for shape {a.shape}")
    x = a.data
    e = np.exp(x - x.max(axis=axis, keepdims=True))
    out = e / e.sum(axis=axis, keepdims=True)

    def backward_fn(g):
        s = (g * out).sum(axis=axis, keepdims=True)
        return (out * (g - s),)

    return _record("softmax", out, (a,), backward_fn)


def layer_norm(x: Tensor, gain: Tensor, bias: Tensor, eps: float = 1e-5) -> Tensor:
    """Normalize the last axis to zero mean / unit variance, then affine."""
    h = x.shape[-1]
    if gain.shape != (h,) or bias.shape != (h,):
        raise DimensionError(
            f"layer_norm affine shapes {gain.shape}/{bias.shape} do not match width {h}")
    mu = x.data.mean(axis=-1, keepdims=True)
    xc = x.data - mu
    var = (xc * xc).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = xc * inv
    gain_data = gain.data

    def backward_fn(g):
        dgain = (g * xhat).reshape(-1, h).sum(axis=0)
        dbias = g.reshape(-1, h).sum(axis=0)
        dxh = g * gain_data
        m1 = dxh.mean(axis=-1, keepdims=True)
        m2 = (dxh * xhat).mean(axis=-1, keepdims=True)
        dx = inv * (dxh - m1 - xhat * m2)
        return dx, dgain, dbias

    return _record("layer_norm", xhat * gain_data + bias.data, (x, gain, bias), backward_fn)


def mse(a: Tensor, b: Tensor) -> Tensor:
    """Mean over all elements of squared differences."""
    if a.shape != b.shape:
        raise DimensionError(f"mse operands differ in shape: {a.shape} vs {b.shape}")
    diff = a.data - b.data
    k = 2.0 / diff.size

    def backward_fn(g):
        gd = g * k * diff
        return gd, -gd

    return _record("mse", np.asarray(np.mean(diff * diff)), (a, b), backward_fn)


def cross_entropy(logits: Tensor, targets, ignore_index: int = -100) -> Tensor:
    """Mean negative log-softmax over rows whose target is not `ignore_index`."""
    if logits.ndim != 2:
        raise DimensionError(f"cross_entropy expects [N, C] logits, got {logits.shape}")
    targets = np.asarray(targets)
    if targets.ndim != 1 or targets.shape[0] != logits.shape[0]:
        raise DimensionError(
            f"cross_entropy targets shape {targets.shape} does not match logits {logits.shape}")
    n_classes = logits.shape[1]
    valid = targets != ignore_index
    n_valid = int(valid.sum())
    if n_valid == 0:
        raise ValueError("cross_entropy: every row is ignored, mean loss undefined")
    tv = targets[valid]
    if tv.min() < 0 or tv.max() >= n_classes:
        bad = tv[(tv < 0) | (tv >= n_classes)]
        raise IndexError(f"target class {int(bad.flat[0])} out of range for {n_classes} classes")

    x = logits.data
    m = x.max(axis=1, keepdims=True)
    e = np.exp(x - m)
    z = e.sum(axis=1, keepdims=True)
    log_probs = (x - m) - np.log(z)
    loss = -log_probs[valid, tv].mean()
    probs = e / z

    def backward_fn(g):
        gl = np.zeros_like(x)
        gl[valid] = probs[valid]
        gl[valid, tv] -= 1.0
        gl[valid] *= float(g) / n_valid
        return (gl,)

    return _record("cross_entropy", np.asarray(loss), (logits,), backward_fn)


# ---------------------------------------------------------------------------
# reverse pass and gradient checking


def backward(loss: Tensor):
    """Accumulate d(loss)/d(leaf) into every reachable requires_grad leaf.

    Repeated calls on the same graph add on top of existing gradients.
    """
    if loss.data.size != 1:
        raise DimensionError(f"backward expects a scalar loss, got shape {loss.shape}")
    if loss._graph is None:
        if loss.requires_grad:
            if loss.grad is None:
                loss.grad = np.zeros_like(loss.data)
            loss.grad += np.ones_like(loss.data)
        return
    g = loss._graph
    grads: dict[int, np.ndarray] = {loss._node_id: np.ones_like(loss.data)}
    for nid in range(loss._node_id, -1, -1):
        gout = grads.pop(nid, None)
        if gout is None:
            continue
        node = g.nodes[nid]
        if node.leaf is not None:
            t = node.leaf
            if t.requires_grad:
                if t.grad is None:
                    t.grad = np.zeros_like(t.data)
                t.grad += gout.reshape(t.data.shape)
            continue
        for pid, pg in zip(node.parents, node.backward(gout)):
            if pg is None:
                continue
            held = grads.get(pid)
            grads[pid] = pg if held is None else held + pg


@dataclass
class GradCheckReport:
    """Result of comparing analytic against central-difference gradients."""

    max_rel_error: float
    failures: list[tuple[int, int, float, float]]  # (input idx, flat element, analytic, numeric)
    passed: bool

    def __str__(self):
        status = "ok" if self.passed else f"{len(self.failures)} failing elements"
        return f"GradCheckReport(max_rel_error={self.max_rel_error:.3e}, {status})"


def grad_check(f, inputs: Sequence[Tensor], rel_tol: float = 1e-4,
               abs_tol: float = 1e-8, step: float = 1e-5) -> GradCheckReport:
    """Check analytic gradients of scalar-valued `f` per element.

    Central differences with the given step; differences below `abs_tol`
    count as zero relative error (they are below finite-difference noise).
    """
    inputs = list(inputs)
    for t in inputs:
        t.zero_grad()
    with Graph():
        out = f(*inputs)
        if out.data.size != 1:
            raise DimensionError("grad_check requires a scalar-valued function")
        backward(out)
    analytic = [np.zeros_like(t.data) if t.grad is None else t.grad.copy() for t in inputs]

    max_rel = 0.0
    failures: list[tuple[int, int, float, float]] = []
    with no_grad():
        for i, t in enumerate(inputs):
            flat = t.data.reshape(-1)
            for j in range(flat.size):
                orig = flat[j]
                flat[j] = orig + step
                f_plus = float(f(*inputs).data)
                flat[j] = orig - step
                f_minus = float(f(*inputs).data)
                flat[j] = orig
                numeric = (f_plus - f_minus) / (2.0 * step)
                a = float(analytic[i].reshape(-1)[j])
                diff = abs(a - numeric)
                if diff <= abs_tol:
                    continue
                rel = diff / max(abs(a), abs(numeric))
                max_rel = max(max_rel, rel)
                if rel > rel_tol:
                    failures.append((i, j, a, numeric))
    for t in inputs:
        t.zero_grad()
    return GradCheckReport(max_rel_error=max_rel, failures=failures, passed=not failures)
