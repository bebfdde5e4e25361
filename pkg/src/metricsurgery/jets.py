"""Truncated derivative jets evaluated pointwise on a grid.

A ``Jet`` stores ``data[k] = d^k g / dx^k`` for ``k = 0..order`` at every grid
point.  Products and quotients follow the Leibniz rule, so curvature
expressions built from warping-function jets carry their exact derivatives
along without any symbolic algebra.
"""
from __future__ import annotations

from math import comb

import numpy as np


class Jet:
    __slots__ = ("data",)

    def __init__(self, data):
        data = np.asarray(data, dtype=float)
        if data.ndim == 1:
            data = data[:, None]
        self.data = data

    @classmethod
    def constant(cls, value, order, npts):
        data = np.zeros((order + 1, npts))
        data[0] = value
        return cls(data)

    @property
    def order(self) -> int:
        return self.data.shape[0] - 1

    @property
    def value(self) -> np.ndarray:
        return self.data[0]

    def __getitem__(self, k):
        return self.data[k]

    def truncate(self, order):
        return Jet(self.data[: order + 1])

    def d(self) -> "Jet":
        """Derivative jet; loses one order."""
        if self.order < 1:
            raise ValueError("cannot differentiate an order-0 jet")
        return Jet(self.data[1:])

    def _coerce(self, other):
        if isinstance(other, Jet):
            k = min(self.order, other.order)
            return self.data[: k + 1], other.data[: k + 1]
        c = np.zeros_like(self.data)
        c[0] = other
        return self.data, c

    def __add__(self, other):
        a, b = self._coerce(other)
        return Jet(a + b)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._coerce(other)
        return Jet(a - b)

    def __rsub__(self, other):
        a, b = self._coerce(other)
        return Jet(b - a)

    def __neg__(self):
        return Jet(-self.data)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.data * other)
        a, b = self._coerce(other)
        out = np.zeros_like(a)
        for k in range(a.shape[0]):
            for i in range(k + 1):
                out[k] += comb(k, i) * a[i] * b[k - i]
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.data / other)
        a, b = self._coerce(other)
        q = np.zeros_like(a)
        for k in range(a.shape[0]):
            acc = a[k].copy()
            for i in range(k):
                acc -= comb(k, i) * q[i] * b[k - i]
            q[k] = acc / b[0]
        return Jet(q)

    def __rtruediv__(self, other):
        return Jet.constant(other, self.order, self.data.shape[1]) / self

    def __pow__(self, n: int):
        if n < 0 or int(n) != n:
            raise ValueError("only non-negative integer powers")
        out = Jet.constant(1.0, self.order, self.data.shape[1])
        for _ in range(int(n)):
            out = out * self
        return out


def to_arclength(g: Jet, lapse: Jet | None) -> Jet:
    """Convert x-derivatives of ``g`` into derivatives along ``dt = N dx``.

    ``lapse`` must have order at least ``g.order - 1``.  With ``lapse=None``
    the coordinate is already arclength.
    """
    if lapse is None:
        return g
    rows = [g.value]
    cur = g
    for _ in range(g.order):
        cur = cur.d() / lapse
        rows.append(cur.value)
    return Jet(np.array(rows))
