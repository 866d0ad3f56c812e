"""Benchmark case container and the catalog self-consistency gate.

A case bundles a ProblemSpec with its default hyperparameters, the published
reference row, and (when one exists) a symbolic closed-form solution.  The
symbolic form feeds two independent consumers: a vectorized evaluator for
validation grids, and exact partial derivatives for the self-consistency
gate, which substitutes the solution into the residual and every stated
condition.  That gate is deliberately separate from the training loss code:
it rebuilds condition mismatches from scratch so a bug in the loss row
builders cannot hide a bad case definition (or the other way round).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
import sympy as sp

from .. import problem
from .refs import PaperResult


# ---------------------------------------------------------------------------
# Case container
# ---------------------------------------------------------------------------

@dataclass
class BenchmarkCase:
    id: str
    name: str
    summary: str
    spec: problem.ProblemSpec
    hyper: problem.Hyper
    reference: PaperResult | None = None
    notes: tuple[str, ...] = ()
    # Closed-form solution: sympy expressions over the coordinate symbols,
    # one per output component.  None for the oracle-validated cases.
    solution_symbols: tuple = ()
    solution_exprs: tuple | None = None
    # Numerically stable replacement for the lambdified solution (used when
    # the closed form has a removable singularity inside the domain).
    analytic_override: Callable | None = None
    # Builds a dense reference solver for cases without a closed form.
    oracle_builder: Callable | None = None
    # Evaluate symbolic jets through mpmath instead of float64 (needed when
    # the differentiated closed form loses too many digits to cancellation).
    jet_modules: str = "numpy"

    _zero_fn: Callable | None = field(default=None, repr=False, compare=False)
    _oracle_fn: Callable | None = field(default=None, repr=False, compare=False)
    _jet_fns: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def defaults(self) -> problem.Hyper:
        return self.hyper

    @property
    def dimension(self) -> int:
        return self.spec.D

    @property
    def analytic(self) -> Callable | None:
        """Vectorized solution evaluator (P, D) -> (P, n_o), or None."""
        if self.analytic_override is not None:
            return self.analytic_override
        if self.solution_exprs is None:
            return None
        if self._zero_fn is None:
            fns = tuple(
                sp.lambdify(self.solution_symbols, e, modules="numpy")
                for e in self.solution_exprs
            )

            def evaluate(X, _fns=fns):
                X = np.asarray(X, dtype=float)
                cols = [
                    np.broadcast_to(np.asarray(f(*X.T), dtype=float), (len(X),))
                    for f in _fns
                ]
                return np.column_stack(cols)

            self._zero_fn = evaluate
        return self._zero_fn

    def reference_values(self, X: np.ndarray) -> np.ndarray:
        """Reference solution on arbitrary points, from the closed form or
        the case's oracle solver (built once, then cached)."""
        fn = self.analytic
        if fn is None:
            if self.oracle_builder is None:
                raise ValueError(f"case {self.id} has no reference solution")
            if self._oracle_fn is None:
                self._oracle_fn = self.oracle_builder()
            fn = self._oracle_fn
        return np.asarray(fn(X), dtype=float)

    def error_evaluator(self) -> Callable | None:
        """Trained-params -> validation error r; None when unverifiable."""
        if self.solution_exprs is None and self.analytic_override is None \
                and self.oracle_builder is None:
            return None
        from .. import validate

        return lambda params: validate.rms_error(params, self)


def case_to_json(case: BenchmarkCase) -> dict:
    return {
        "catalog": case.id,
        "hyper": case.hyper.as_dict(),
        "notes": list(case.notes),
    }


# ---------------------------------------------------------------------------
# Symbolic jets
# ---------------------------------------------------------------------------

def _compile_jet(case: BenchmarkCase, alpha: tuple) -> list:
    fns = case._jet_fns.get(alpha)
    if fns is None:
        fns = []
        for expr in case.solution_exprs:
            d = expr
            for sym, k in zip(case.solution_symbols, alpha):
                if k:
                    d = sp.diff(d, sym, k)
            fns.append(sp.lambdify(case.solution_symbols, d,
                                   modules=case.jet_modules))
        case._jet_fns[alpha] = fns
    return fns


def analytic_jets(case: BenchmarkCase, alphas, X: np.ndarray) -> dict:
    """Exact partial derivatives of the closed-form solution.

    Returns {multi-index: (P, n_o) array} for every requested index.  With
    jet_modules="mpmath" each point is evaluated in extended precision and
    rounded once at the end.
    """
    if case.solution_exprs is None:
        raise ValueError(f"case {case.id} has no closed-form solution")
    X = np.asarray(X, dtype=float)
    P = len(X)
    out = {}
    for alpha in alphas:
        alpha = tuple(alpha)
        fns = _compile_jet(case, alpha)
        if case.jet_modules == "mpmath":
            import mpmath

            with mpmath.workdps(50):
                cols = [
                    np.array([float(f(*row)) for row in X], dtype=float)
                    for f in fns
                ]
        else:
            cols = [
                np.broadcast_to(np.asarray(f(*X.T), dtype=float), (P,))
                for f in fns
            ]
        out[alpha] = np.column_stack(cols)
    return out


class _JetAccessor:
    """Minimal u-accessor over precomputed jets, for residual evaluation."""

    def __init__(self, jets: dict, D: int, n_outputs: int):
        self._jets = jets
        self.D = D
        self.n_outputs = n_outputs

    def d(self, l: int, *alpha):
        return self._jets[tuple(alpha)][:, l]

    def val(self, l: int = 0):
        return self._jets[(0,) * self.D][:, l]

    def delayed(self, l: int = 0):
        raise ValueError("delay terms have no closed-form jets here")


def _as_rows(out):
    return list(out) if isinstance(out, (list, tuple)) else [out]


def _stack_rows(out) -> np.ndarray:
    return np.column_stack([np.asarray(r, dtype=float) for r in _as_rows(out)])


# ---------------------------------------------------------------------------
# Self-consistency gate
# ---------------------------------------------------------------------------

def self_consistency(case: BenchmarkCase, seed: int = 0,
                     n_bulk: int = 1000) -> dict:
    """Substitute the closed-form solution into the case definition.

    Samples collocation points exactly as a training run would, then checks
    that the residual vanishes in the bulk and that every initial/boundary
    row is satisfied.  Returns {"max_residual": .., "max_condition": ..}.
    """
    spec = case.spec
    D = spec.D
    zero = (0,) * D
    hyper = replace(case.hyper, n_bulk=n_bulk)
    pts = problem.sample(spec, hyper, np.random.default_rng(seed))

    jets = analytic_jets(case, pts.bulk.indices, pts.bulk.X)
    u = _JetAccessor(jets, D, spec.n_outputs)
    rows = _as_rows(spec.residual(u, pts.bulk.X))
    max_residual = max(float(np.max(np.abs(np.asarray(r, dtype=float))))
                       for r in rows)

    max_condition = 0.0

    def track(mismatch):
        nonlocal max_condition
        if mismatch.size:
            max_condition = max(max_condition,
                                float(np.max(np.abs(mismatch))))

    if pts.initial is not None:
        blk = pts.initial
        jets = analytic_jets(case, blk.indices, blk.X)
        u = _JetAccessor(jets, D, spec.n_outputs)
        for term in blk.terms:
            cond = term.cond
            comps = list(cond.components)
            if cond.kind == "value":
                vals = jets[zero][:, comps]
            elif cond.kind == "velocity":
                dt = tuple(1 if j == 0 else 0 for j in range(D))
                vals = jets[dt][:, comps]
            else:
                vals = _stack_rows(cond.evaluator(u, blk.X))
            track(vals - term.target_vals)

    for blk in pts.boundary:
        cond = blk.cond
        comps = list(cond.components)
        jets = analytic_jets(case, blk.indices, blk.X)

        def normal_derivative():
            dn = np.zeros((len(blk.X), len(comps)))
            for j in range(D):
                w = blk.normal[:, j]
                if np.any(w != 0.0):
                    ej = tuple(1 if i == j else 0 for i in range(D))
                    dn += w[:, None] * jets[ej][:, comps]
            return dn

        if cond.kind == "dirichlet":
            track(jets[zero][:, comps] - blk.target_vals)
        elif cond.kind == "neumann":
            track(normal_derivative() - blk.target_vals)
        elif cond.kind == "robin":
            combo = (cond.robin_normal_coeff * normal_derivative()
                     + cond.robin_value_coeff * jets[zero][:, comps])
            track(combo - blk.target_vals)
        elif cond.kind == "periodic":
            jets2 = analytic_jets(case, blk.indices, blk.X2)
            track(jets[zero][:, comps] - jets2[zero][:, comps])
            if cond.match_normal_derivative:
                ej = tuple(1 if i == cond.face[0] else 0 for i in range(D))
                track(jets[ej][:, comps] - jets2[ej][:, comps])
        else:  # custom
            u = _JetAccessor(jets, D, spec.n_outputs)
            track(_stack_rows(cond.evaluator(u, blk.X)) - blk.target_vals)

    return {"max_residual": max_residual, "max_condition": max_condition}
