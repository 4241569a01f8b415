"""Minimal dense tensors with reverse-mode automatic differentiation.

A Tensor wraps a numpy float array plus an optional tape node: the tuple of
parent tensors and a closure mapping the output gradient to parent
gradients.  Calling ``backward()`` on a scalar loss walks the tape once in
reverse topological order and accumulates ``.grad`` arrays on every tensor
that requires gradient.  This is deliberately small: just enough machinery
to express, train, and finite-difference-check the residual micro networks.

Everything runs in double precision by default (the correctness tolerances
assume it); pass float32 data explicitly for throughput experiments.

Gradient recording can be suspended with the ``no_grad()`` context manager,
used for evaluation passes and for teacher forward passes during
distillation.

Randomness comes from ``make_rng``/``spawn_rng``: numpy's PCG64 generator
behind a SeedSequence, so one integer seed from a config file reproducibly
derives every weight init and batch shuffle via independent child streams.
"""

from __future__ import annotations

import contextlib

import numpy as np

from .errors import MissingGradient, ShapeMismatch

_grad_enabled = True


@contextlib.contextmanager
def no_grad():
    """Context manager suspending tape construction."""
    global _grad_enabled
    prev = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = prev


def grad_enabled() -> bool:
    return _grad_enabled


class Tensor:
    """Array value plus optional autodiff tape node.

    Parameters
    ----------
    data : array_like
        Values; converted to a float numpy array (float64 unless the input
        is already float32).
    requires_grad : bool
        Leaf flag; interior nodes set it automatically from their parents.
    """

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad=False, _parents=(), _backward=None):
        arr = np.asarray(data)
        if arr.dtype != np.float32:
            arr = np.asarray(arr, dtype=np.float64)
        self.data = arr
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self._parents = _parents
        self._backward = _backward

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def item(self) -> float:
        return float(self.data)

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self):
        tag = ", grad" if self.requires_grad else ""
        return f"Tensor(shape={self.data.shape}{tag})"

    # -- arithmetic used by losses and residual connections ---------------

    def __add__(self, other):
        other = other if isinstance(other, Tensor) else Tensor(other)
        try:
            np.broadcast_shapes(self.data.shape, other.data.shape)
        except ValueError:
            raise ShapeMismatch(f"add: {self.data.shape} vs {other.data.shape}") from None
        return make_op(
            self.data + other.data,
            (self, other),
            lambda g: (_unbroadcast(g, self.data.shape), _unbroadcast(g, other.data.shape)),
        )

    __radd__ = __add__

    def __neg__(self):
        return make_op(-self.data, (self,), lambda g: (-g,))

    def __sub__(self, other):
        other = other if isinstance(other, Tensor) else Tensor(other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Tensor):
            return make_op(
                self.data * other.data,
                (self, other),
                lambda g: (
                    _unbroadcast(g * other.data, self.data.shape),
                    _unbroadcast(g * self.data, other.data.shape),
                ),
            )
        c = float(other)
        return make_op(self.data * c, (self,), lambda g: (g * c,))

    __rmul__ = __mul__

    def sum(self) -> "Tensor":
        return make_op(
            np.asarray(self.data.sum()), (self,), lambda g: (np.broadcast_to(g, self.data.shape),)
        )

    def mean(self) -> "Tensor":
        n = self.data.size
        return make_op(
            np.asarray(self.data.mean()),
            (self,),
            lambda g: (np.broadcast_to(g / n, self.data.shape),),
        )

    def reshape(self, *shape) -> "Tensor":
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        old = self.data.shape
        return make_op(self.data.reshape(shape), (self,), lambda g: (g.reshape(old),))

    # -- tape walk ---------------------------------------------------------

    def backward(self, grad=None) -> None:
        """Reverse-mode sweep seeding this tensor's gradient.

        Without an explicit seed the tensor must be scalar (a loss).
        """
        if grad is None:
            if self.data.size != 1:
                raise ShapeMismatch("backward() without seed requires a scalar")
            grad = np.ones_like(self.data)
        else:
            grad = np.asarray(grad, dtype=self.data.dtype)
            if grad.shape != self.data.shape:
                raise ShapeMismatch(f"seed shape {grad.shape} != value shape {self.data.shape}")

        order = _toposort(self)
        grads = {id(self): grad.copy()}
        for t in order:
            g = grads.pop(id(t), None)
            if g is None:
                continue
            if t.requires_grad and t._backward is None:
                t.grad = g if t.grad is None else t.grad + g
            if t._backward is None:
                continue
            for parent, pg in zip(t._parents, t._backward(g)):
                if pg is None or not parent.requires_grad:
                    continue
                key = id(parent)
                if key in grads:
                    grads[key] = grads[key] + pg
                else:
                    grads[key] = pg


def _toposort(root: Tensor):
    """Iterative depth-first postorder, returned in reverse (root first)."""
    order, visited, stack = [], set(), [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for p in node._parents:
            if id(p) not in visited:
                stack.append((p, False))
    order.reverse()
    return order


def _unbroadcast(g: np.ndarray, shape) -> np.ndarray:
    """Sum a gradient back down to ``shape`` after numpy broadcasting."""
    if g.shape == tuple(shape):
        return g
    extra = g.ndim - len(shape)
    if extra:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g.reshape(shape)


def make_op(data, parents, backward_fn) -> Tensor:
    """Create an op output, recording the tape node when gradients are on."""
    if _grad_enabled and any(p.requires_grad for p in parents):
        return Tensor(data, requires_grad=True, _parents=tuple(parents), _backward=backward_fn)
    return Tensor(data)


class Parameter(Tensor):
    """A learnable leaf tensor carrying an SGD momentum buffer.

    ``learnable=False`` marks state that is serialized but never updated by
    the optimizer (unused here but part of the contract; batchnorm running
    statistics live outside the tape as plain arrays).
    """

    __slots__ = ("learnable", "momentum")

    def __init__(self, data, learnable=True):
        super().__init__(data, requires_grad=bool(learnable))
        self.learnable = bool(learnable)
        self.momentum = np.zeros_like(self.data)

    def materialized_grad(self) -> np.ndarray:
        if self.grad is None:
            raise MissingGradient("parameter has no gradient; run backward() first")
        return self.grad


def make_rng(seed: int) -> np.random.Generator:
    """Root generator: PCG64 behind a SeedSequence built from one integer."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


def spawn_rngs(seed: int, n: int) -> list[np.random.Generator]:
    """n independent child generators derived from one seed.

    Splitting via SeedSequence.spawn keeps streams statistically independent
    regardless of how many draws each consumer makes, so adding a consumer
    never perturbs the others.
    """
    root = np.random.SeedSequence(int(seed))
    return [np.random.Generator(np.random.PCG64(child)) for child in root.spawn(n)]
