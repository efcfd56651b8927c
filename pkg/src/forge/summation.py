"""Compensated (Neumaier) accumulation helpers.

All reductions here run in a fixed order, so results are reproducible
bit-for-bit for a given input ordering.
"""

from __future__ import annotations

import math

import numpy as np


class Accumulator:
    """Running Neumaier sum over arrays of a common shape (real or complex)."""

    def __init__(self, shape=(), dtype=complex):
        self.total = np.zeros(shape, dtype=dtype)
        self.comp = np.zeros(shape, dtype=dtype)

    def add(self, x) -> None:
        x = np.asarray(x, dtype=self.total.dtype)
        if np.iscomplexobj(self.total):
            re, cre = _neumaier_step(self.total.real, self.comp.real, x.real)
            im, cim = _neumaier_step(self.total.imag, self.comp.imag, x.imag)
            self.total = re + 1j * im
            self.comp = cre + 1j * cim
        else:
            self.total, self.comp = _neumaier_step(self.total, self.comp, x)

    def value(self):
        return self.total + self.comp


def _neumaier_step(s, c, x):
    t = s + x
    big = np.abs(s) >= np.abs(x)
    c = c + np.where(big, (s - t) + x, (x - t) + s)
    return t, c


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _cascade(v):
    """Pairwise TwoSum tree along axis 0; the rounding errors are summed on the side."""
    err = np.zeros(v.shape[1:], dtype=v.dtype)
    while v.shape[0] > 1:
        if v.shape[0] % 2:
            v = np.concatenate([v, np.zeros_like(v[:1])])
        s, e = _two_sum(v[0::2], v[1::2])
        err = err + e.sum(axis=0)
        v = s
    return v[0], err


def neumaier_sum(values, axis: int = 0, chunk: int = 256):
    """Compensated sum along ``axis``: TwoSum trees within chunks, Neumaier across them."""
    values = np.moveaxis(np.asarray(values), axis, 0)
    dtype = np.result_type(values.dtype, float)
    values = values.astype(dtype, copy=False)
    acc = Accumulator(values.shape[1:], dtype=dtype)
    if values.shape[0] == 0:
        return acc.value()
    for start in range(0, values.shape[0], chunk):
        head, err = _cascade(values[start:start + chunk])
        acc.add(head)
        acc.add(err)
    return acc.value()


def fsum_complex(values) -> complex:
    values = np.asarray(values, dtype=complex).ravel()
    return complex(math.fsum(values.real), math.fsum(values.imag))
