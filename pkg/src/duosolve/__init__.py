"""duosolve: dual-basis physics-informed solver for ODEs and PDEs.

A small solver that represents fields as sums of separable sine, sigmoid and
sine*sigmoid neurons, differentiates them exactly through truncated jets, and
fits differential-equation residuals plus initial/boundary conditions with
ADAM followed by BFGS.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .network import NetParams, evaluate, eval_jet, init, load_checkpoint, save_checkpoint

__all__ = [
    "NetParams",
    "evaluate",
    "eval_jet",
    "init",
    "load_checkpoint",
    "save_checkpoint",
    "__version__",
]
