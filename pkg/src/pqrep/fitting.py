"""Log-log least squares, used to report density exponents."""

from __future__ import annotations

import math


def fit_exponent(points) -> float | None:
    """Least-squares slope of log(count) against log(n).

    Takes (n, count) pairs; pairs with count < 1 are dropped.  Returns None
    when fewer than two usable points remain (empty set, single point, or a
    degenerate n column) -- the exponent is undefined there, not zero.
    """
    usable = [(n, c) for n, c in points if c >= 1]
    if len(usable) < 2:
        return None
    xs = [math.log(n) for n, _ in usable]
    ys = [math.log(c) for _, c in usable]
    count = len(xs)
    xbar = sum(xs) / count
    ybar = sum(ys) / count
    sxx = sum((xi - xbar) ** 2 for xi in xs)
    if sxx == 0:
        return None
    sxy = sum((xi - xbar) * (yi - ybar) for xi, yi in zip(xs, ys))
    return sxy / sxx
