"""Grid-then-golden-section minimization on a bounded interval."""

from __future__ import annotations

import math

import numpy as np

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f, lo: float, hi: float, xtol: float, max_iter: int = 500) -> tuple[float, float]:
    """Minimize a unimodal ``f`` on ``[lo, hi]`` until the bracket is below ``xtol``."""
    x1 = hi - INVPHI * (hi - lo)
    x2 = lo + INVPHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if hi - lo <= xtol:
            break
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INVPHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INVPHI * (hi - lo)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def golden_section_vec(f, lo, hi, xtol: float, max_iter: int = 200):
    """Elementwise golden section: ``f`` maps an array of abscissae to an array of values."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    x1 = hi - INVPHI * (hi - lo)
    x2 = lo + INVPHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if np.all(hi - lo <= xtol):
            break
        left = f1 <= f2
        lo, hi = np.where(left, lo, x1), np.where(left, x2, hi)
        keep_x, keep_f = np.where(left, x1, x2), np.where(left, f1, f2)
        new_x = np.where(left, hi - INVPHI * (hi - lo), lo + INVPHI * (hi - lo))
        new_f = f(new_x)
        x1, f1 = np.where(left, new_x, keep_x), np.where(left, new_f, keep_f)
        x2, f2 = np.where(left, keep_x, new_x), np.where(left, keep_f, new_f)
    take1 = f1 <= f2
    return np.where(take1, x1, x2), np.where(take1, f1, f2)
