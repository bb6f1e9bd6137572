"""Compensated accumulation helpers.

Long series sums and short alternating sums both go through the Neumaier
variant of Kahan summation so results do not depend on how callers batch
their terms. Works for real or complex scalars and for numpy arrays of
either, elementwise.
"""

from __future__ import annotations

import numpy as np

__all__ = ["CompensatedSum"]


class CompensatedSum:
    """Running sum with a Neumaier compensation term.

    The compensation branch needs |running| >= |term| to decide which operand
    loses low-order bits; np.where keeps that decision elementwise for array
    accumulators.
    """

    def __init__(self, zero: complex | float | np.ndarray = 0.0):
        self._sum = np.asarray(zero).copy()
        self._comp = np.zeros_like(self._sum)

    def add(self, value) -> None:
        value = np.asarray(value)
        total = self._sum + value
        big_first = np.abs(self._sum) >= np.abs(value)
        lost = np.where(
            big_first,
            (self._sum - total) + value,
            (value - total) + self._sum,
        )
        self._comp = self._comp + lost
        self._sum = total

    @property
    def value(self):
        result = self._sum + self._comp
        if result.ndim == 0:
            return result[()]
        return result
