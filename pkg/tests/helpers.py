"""Shared numerical oracles for the test suite.

The finite-difference code here is deliberately independent of the library:
central stencils plus one Richardson extrapolation step, giving O(h^4)
truncation error.  Step sizes are chosen per derivative order because the
rounding floor scales like eps/h^m.
"""

from __future__ import annotations

import numpy as np

# Central-difference step per derivative order; tuned so that for factor
# frequencies up to ~20 both truncation and roundoff sit below 1e-8 relative.
FD_STEPS = {1: 1e-5, 2: 1e-4, 3: 1e-3}


def _central(fn, x, m: int, h: float):
    if m == 0:
        return fn(x)
    if m == 1:
        return (fn(x + h) - fn(x - h)) / (2.0 * h)
    if m == 2:
        return (fn(x + h) - 2.0 * fn(x) + fn(x - h)) / (h * h)
    if m == 3:
        return (fn(x + 2 * h) - 2.0 * fn(x + h) + 2.0 * fn(x - h) - fn(x - 2 * h)) / (
            2.0 * h**3
        )
    raise ValueError(f"unsupported order {m}")


def richardson(fn, x, m: int, h: float | None = None):
    """Order-m derivative of fn at x, O(h^4) accurate."""
    if h is None:
        h = FD_STEPS.get(m, 1e-4)
    if m == 0:
        return fn(x)
    coarse = _central(fn, x, m, h)
    fine = _central(fn, x, m, h / 2.0)
    return (4.0 * fine - coarse) / 3.0


def rel_err(approx, exact, floor: float = 1.0):
    """Elementwise |a - e| / max(floor, |e|), reduced to its maximum."""
    approx = np.asarray(approx, dtype=float)
    exact = np.asarray(exact, dtype=float)
    scale = np.maximum(floor, np.abs(exact))
    return float(np.max(np.abs(approx - exact) / scale))
