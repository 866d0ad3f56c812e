"""Small reverse-mode differentiation tape over numpy arrays.

Residual evaluators are ordinary Python callables built from the closed
operator set (+, -, *, /, **, neg, sin, cos, exp, sqrt, log, tanh).  They are
evaluated once per loss computation on ``Var`` nodes holding whole point
batches, so the tape length is the size of the expression, not of the sample.

Every operation is elementwise, so each node stores, per parent, the local
derivative as an array and the backward sweep is a multiply-accumulate in
reverse topological order.  Broadcasting against scalars and smaller shapes is
supported; cotangents are summed back down to the parent's shape.
"""

from __future__ import annotations

from typing import Callable

import numpy as np


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum ``grad`` down to ``shape`` (inverse of numpy broadcasting)."""
    if grad.shape == shape:
        return grad
    # Collapse leading axes added by broadcasting.
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for ax, n in enumerate(shape):
        if n == 1 and grad.shape[ax] != 1:
            grad = grad.sum(axis=ax, keepdims=True)
    return grad


class Var:
    """One node of the tape: a value plus links to its parents."""

    __slots__ = ("val", "parents", "grad", "_order")

    # Make numpy yield to our reflected operators instead of wrapping Vars
    # in object arrays (ndarray + Var must hit Var.__radd__).
    __array_ufunc__ = None

    _counter = 0

    def __init__(self, val, parents=()):
        self.val = np.asarray(val, dtype=float)
        # parents: tuple of (Var, local_derivative_array_or_"sum")
        self.parents = parents
        self.grad = None
        Var._counter += 1
        self._order = Var._counter

    # -- helpers ----------------------------------------------------------

    @staticmethod
    def _lift(x) -> "Var":
        return x if isinstance(x, Var) else Var(x)

    def _make(self, val, *links) -> "Var":
        return Var(val, parents=tuple(links))

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        o = Var._lift(other)
        return self._make(self.val + o.val, (self, 1.0), (o, 1.0))

    __radd__ = __add__

    def __sub__(self, other):
        o = Var._lift(other)
        return self._make(self.val - o.val, (self, 1.0), (o, -1.0))

    def __rsub__(self, other):
        o = Var._lift(other)
        return o.__sub__(self)

    def __mul__(self, other):
        o = Var._lift(other)
        return self._make(self.val * o.val, (self, o.val), (o, self.val))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Var._lift(other)
        inv = 1.0 / o.val
        return self._make(
            self.val * inv, (self, inv), (o, -self.val * inv * inv)
        )

    def __rtruediv__(self, other):
        return Var._lift(other).__truediv__(self)

    def __neg__(self):
        return self._make(-self.val, (self, -1.0))

    def __pow__(self, p):
        if isinstance(p, Var):
            # a**b = exp(b log a); only needed for strictly positive bases.
            return (self.log() * p).exp()
        p = float(p)
        if p == 2.0:
            return self._make(self.val * self.val, (self, 2.0 * self.val))
        if p == 3.0:
            return self._make(
                self.val**3, (self, 3.0 * self.val * self.val)
            )
        return self._make(self.val**p, (self, p * self.val ** (p - 1.0)))

    # -- elementwise functions -------------------------------------------

    def sin(self):
        return self._make(np.sin(self.val), (self, np.cos(self.val)))

    def cos(self):
        return self._make(np.cos(self.val), (self, -np.sin(self.val)))

    def exp(self):
        e = np.exp(self.val)
        return self._make(e, (self, e))

    def log(self):
        return self._make(np.log(self.val), (self, 1.0 / self.val))

    def sqrt(self):
        r = np.sqrt(self.val)
        return self._make(r, (self, 0.5 / r))

    def tanh(self):
        t = np.tanh(self.val)
        return self._make(t, (self, 1.0 - t * t))

    def sum(self):
        return self._make(self.val.sum(), (self, "sum"))

    # -- backward ---------------------------------------------------------

    def backward(self, seed=1.0) -> None:
        """Accumulate d(self)/d(leaf) into each reachable node's ``.grad``.

        ``seed`` is the cotangent of ``self`` (array broadcastable to its
        shape).  Grads accumulate across repeated calls; reset with
        ``zero_grad`` when reusing leaves.
        """
        topo: list[Var] = []
        seen: set[int] = set()
        stack = [(self, False)]
        while stack:
            node, done = stack.pop()
            if done:
                topo.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent, _ in node.parents:
                if id(parent) not in seen:
                    stack.append((parent, False))

        if self.grad is None:
            self.grad = np.zeros_like(self.val)
        self.grad = self.grad + np.broadcast_to(
            np.asarray(seed, dtype=float), self.val.shape
        )
        for node in reversed(topo):
            if node.grad is None:
                continue
            g = node.grad
            for parent, local in node.parents:
                if isinstance(local, str):  # "sum" reduction
                    contrib = np.broadcast_to(g, parent.val.shape)
                else:
                    contrib = _unbroadcast(
                        np.asarray(g * local, dtype=float), parent.val.shape
                    )
                if parent.grad is None:
                    parent.grad = np.array(contrib, dtype=float)
                else:
                    parent.grad = parent.grad + contrib


# Module-level wrappers so evaluators can be written np-style on Vars or
# plain arrays interchangeably.

def _dispatch(name: str) -> Callable:
    np_fn = getattr(np, name)

    def fn(x):
        return getattr(x, name)() if isinstance(x, Var) else np_fn(x)

    fn.__name__ = name
    return fn


sin = _dispatch("sin")
cos = _dispatch("cos")
exp = _dispatch("exp")
log = _dispatch("log")
sqrt = _dispatch("sqrt")
tanh = _dispatch("tanh")


def grad_accumulate(loss_eval: Callable, theta: np.ndarray) -> tuple[float, np.ndarray]:
    """Exact gradient of a scalar program over a flat parameter vector.

    ``loss_eval`` receives one ``Var`` wrapping ``theta`` and must return a
    scalar ``Var`` built from tape operations.  Returns (value, gradient).
    """
    leaf = Var(np.asarray(theta, dtype=float))
    out = loss_eval(leaf)
    if not isinstance(out, Var):
        raise TypeError("loss_eval must return a Var built from tape operations")
    if out.val.shape != ():
        raise ValueError("loss_eval must return a scalar")
    out.backward(1.0)
    g = leaf.grad if leaf.grad is not None else np.zeros_like(leaf.val)
    return float(out.val), np.asarray(g, dtype=float)
