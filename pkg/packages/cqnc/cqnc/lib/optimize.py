# Copyright 2025 Lincoln Institute of Land Policy
# SPDX-License-Identifier: MIT

import math
from typing import Callable

import msgspec

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2


class Minimum(msgspec.Struct, frozen=True):
    x: float
    value: float
    evaluations: int


def golden_section_minimize(
    f: Callable[[float], float], a: float, b: float, tol: float = 1e-10
) -> Minimum:
    """
    Golden-section search.

    Given a function f with a single local minimum in [a, b], shrink the
    bracket until it is narrower than `tol` and return the best point seen.

    `tol` bounds the bracket width, not the error in x. Near a smooth minimum
    f changes by O(dx²), so below roughly sqrt(eps)·|x| the comparisons are
    decided by rounding and x is only known to that precision.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        x = (a + b) / 2
        return Minimum(x=x, value=f(x), evaluations=1)

    # Required steps to achieve tolerance
    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))

    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = f(c)
    yd = f(d)
    evaluations = 2

    for _ in range(n - 1):
        if yc < yd:
            b = d
            d = c
            yd = yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = f(c)
        else:
            a = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)
        evaluations += 1

    if yc < yd:
        return Minimum(x=c, value=yc, evaluations=evaluations)
    return Minimum(x=d, value=yd, evaluations=evaluations)
