"""Three-part root-mean-square training loss and its exact gradient.

    total = L_bulk + alpha_0 * L_initial + alpha_boundary * L_boundary

Each part is the square root of the mean of every squared residual entry in
its group, pooled across blocks, points and components.  For a second-order
problem with value and velocity conditions on a shared initial point set this
reproduces the 1/(2 n_0) normalization; for first-order problems it is
1/n_0.  Groups a problem does not declare are absent (None), not zero, and
never produce NaN.

The square root is not differentiable at zero; a part whose squared sum is
exactly zero contributes value 0 and gradient 0 (subgradient convention,
keeps BFGS stable once a part has fully converged).

Gradients run in two stages: residual expressions are taped elementwise
(:mod:`duosolve.tape`) down to the network jet values, and the resulting
cotangents are pushed through the closed-form network backward pass.  Sums
use numpy's pairwise reduction in a fixed block order, so results are
reproducible run to run and independent of any threading.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import network, tape
from .network import NetParams
from .problem import (
    BoundaryBlock,
    BulkBlock,
    CollocationSet,
    InitialBlock,
    InitialTerm,
    JetVars,
    ProblemSpec,
    _unit_alpha,
    _zero_alpha,
)


class NonFiniteResidual(RuntimeError):
    """A residual entry came out NaN or infinite; message names the point."""


@dataclass(frozen=True)
class LossWeights:
    alpha_0: float = 1.0
    alpha_boundary: float = 1.0

    def __post_init__(self):
        for name in ("alpha_0", "alpha_boundary"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and non-negative, got {v}")


@dataclass(frozen=True)
class LossBreakdown:
    """Group losses; absent groups are None and contribute nothing."""

    L_bulk: float
    L_initial: float | None
    L_boundary: float | None
    total: float

    @classmethod
    def combine(cls, bulk, initial, boundary, w: LossWeights) -> "LossBreakdown":
        # bulk can be None only for mini-batch evaluations that happened to
        # draw no bulk rows; full-problem breakdowns always carry it
        total = 0.0 if bulk is None else bulk
        if initial is not None:
            total += w.alpha_0 * initial
        if boundary is not None:
            total += w.alpha_boundary * boundary
        return cls(bulk, initial, boundary, total)


# ---------------------------------------------------------------------------
# Accessors: taped (JetVars, in problem.py) vs. plain numpy
# ---------------------------------------------------------------------------

class JetValues:
    """Numpy-only twin of JetVars for gradient-free loss evaluation."""

    def __init__(self, jets: dict, D: int, n_outputs: int, delay=None):
        self._jets = jets
        self.D = D
        self.n_outputs = n_outputs
        self._delay = delay

    def d(self, l: int, *alpha):
        return self._jets[tuple(alpha)][:, l]

    def val(self, l: int = 0):
        return self._jets[_zero_alpha(self.D)][:, l]

    def delayed(self, l: int = 0):
        jets2, keep, hist_blend = self._delay
        return jets2[_zero_alpha(self.D)][:, l] * keep + hist_blend


def _row_value(row):
    return row.val if isinstance(row, tape.Var) else np.asarray(row)


def _as_rows(out):
    return list(out) if isinstance(out, (list, tuple)) else [out]


def _check_finite(rows, labels, X):
    for row, label in zip(rows, labels):
        vals = _row_value(row)
        bad = ~np.isfinite(vals)
        if np.any(bad):
            i = int(np.argmax(bad))
            raise NonFiniteResidual(
                f"non-finite residual in {label} at point {i} "
                f"x={X[i].tolist()} (value {vals[i]!r})"
            )


# ---------------------------------------------------------------------------
# Residual rows per block
# ---------------------------------------------------------------------------

def _bulk_rows(spec: ProblemSpec, block: BulkBlock, u, X):
    rows = _as_rows(spec.residual(u, X))
    labels = [f"bulk residual component {i}" for i in range(len(rows))]
    return rows, labels


def _initial_rows(spec: ProblemSpec, block: InitialBlock, u, X):
    rows, labels = [], []
    e0 = _unit_alpha(spec.D, 0)
    for term in block.terms:
        cond, tv = term.cond, term.target_vals
        if cond.kind == "value":
            for i, l in enumerate(cond.components):
                rows.append(u.val(l) - tv[:, i])
                labels.append(f"initial value, component {l}")
        elif cond.kind == "velocity":
            for i, l in enumerate(cond.components):
                rows.append(u.d(l, *e0) - tv[:, i])
                labels.append(f"initial velocity, component {l}")
        else:
            out = _as_rows(cond.evaluator(u, X))
            for i, r in enumerate(out):
                rows.append(r - tv[:, i])
                labels.append(f"initial observable, row {i}")
    return rows, labels


def _normal_derivative(u, l, normal, D):
    acc = None
    for j in range(D):
        nj = normal[:, j]
        if not np.any(nj != 0.0):
            continue
        term = u.d(l, *_unit_alpha(D, j)) * nj
        acc = term if acc is None else acc + term
    return acc


def _boundary_rows(spec: ProblemSpec, block: BoundaryBlock, u, u2, X):
    cond, tv = block.cond, block.target_vals
    D = spec.D
    rows, labels = [], []
    if cond.kind == "dirichlet":
        for i, l in enumerate(cond.components):
            rows.append(u.val(l) - tv[:, i])
            labels.append(f"dirichlet boundary, component {l}")
    elif cond.kind == "neumann":
        for i, l in enumerate(cond.components):
            rows.append(_normal_derivative(u, l, block.normal, D) - tv[:, i])
            labels.append(f"neumann boundary, component {l}")
    elif cond.kind == "robin":
        for i, l in enumerate(cond.components):
            dn = _normal_derivative(u, l, block.normal, D)
            rows.append(
                dn * cond.robin_normal_coeff
                + u.val(l) * cond.robin_value_coeff
                - tv[:, i]
            )
            labels.append(f"robin boundary, component {l}")
    elif cond.kind == "periodic":
        dim = cond.face[0]
        for l in cond.components:
            rows.append(u.val(l) - u2.val(l))
            labels.append(f"periodic value, component {l}")
        if cond.match_normal_derivative:
            ed = _unit_alpha(D, dim)
            for l in cond.components:
                rows.append(u.d(l, *ed) - u2.d(l, *ed))
                labels.append(f"periodic derivative, component {l}")
    else:  # custom
        out = _as_rows(cond.evaluator(u, X))
        for i, r in enumerate(out):
            rows.append(r - tv[:, i])
            labels.append(f"custom boundary, row {i}")
    return rows, labels


# ---------------------------------------------------------------------------
# Core evaluation
# ---------------------------------------------------------------------------

def _take(arr, rows):
    return arr if (rows is None or arr is None) else arr[rows]


def _sum_squares(rows):
    """Pairwise-summed squared entries, Var-aware, in fixed row order."""
    acc = None
    for r in rows:
        term = (r * r).sum() if isinstance(r, tape.Var) else float(np.sum(r * r))
        acc = term if acc is None else acc + term
    return acc


def _evaluate(params: NetParams, spec: ProblemSpec, pts: CollocationSet,
              w: LossWeights, need_grad: bool, subset: dict | None = None):
    """Shared loss/gradient engine.

    ``subset`` maps block ids ("bulk", "initial", ("boundary", i)) to sorted
    row index arrays; None means the full set.  Group means divide by the
    number of entries present in the evaluation, which is what mini-batch
    steps need.
    """
    D, n_o = spec.D, spec.n_outputs
    acc = {"bulk": [None, 0], "initial": [None, 0], "boundary": [None, 0]}
    back = []  # (cache, jetvars) plus optional delay/partner entries

    def eval_block(group, block_id, block, build_rows):
        if subset is not None:
            rows_idx = subset.get(block_id)
            if rows_idx is None or len(rows_idx) == 0:
                return
            rows_idx = np.sort(np.asarray(rows_idx))
        else:
            rows_idx = None
        X = _take(block.X, rows_idx)
        jets, cache = network.jet_forward(params, X, block.indices)

        delay = None
        cache2 = None
        if isinstance(block, BulkBlock) and block.X_shift is not None:
            X2 = _take(block.X_shift, rows_idx)
            jets2, cache2 = network.jet_forward(params, X2, [_zero_alpha(D)])
            delay = (jets2, _take(block.keep, rows_idx),
                     _take(block.hist_blend, rows_idx))

        u2 = None
        cache_p = None
        if isinstance(block, BoundaryBlock) and block.X2 is not None:
            Xp = _take(block.X2, rows_idx)
            jets_p, cache_p = network.jet_forward(params, Xp, block.indices)
            u2 = (JetVars if need_grad else JetValues)(jets_p, D, n_o)

        cls = JetVars if need_grad else JetValues
        u = cls(jets, D, n_o, delay=delay)

        rows, labels = build_rows(u, u2, X, rows_idx)
        _check_finite(rows, labels, X)
        ss = _sum_squares(rows)
        n_entries = X.shape[0] * block.n_entries_per_point
        slot = acc[group]
        slot[0] = ss if slot[0] is None else slot[0] + ss
        slot[1] += n_entries
        if need_grad:
            back.append((cache, u, cache2, cache_p, u2))

    eval_block("bulk", "bulk", pts.bulk,
               lambda u, u2, X, ri: _bulk_rows(spec, pts.bulk, u, X))
    if pts.initial is not None:
        def build_init(u, u2, X, ri, blk=pts.initial):
            terms = blk if ri is None else _sliced_initial(blk, ri)
            return _initial_rows(spec, terms, u, X)
        eval_block("initial", "initial", pts.initial, build_init)
    for bi, blk in enumerate(pts.boundary):
        def build_bnd(u, u2, X, ri, blk=blk):
            b = blk if ri is None else _sliced_boundary(blk, ri)
            return _boundary_rows(spec, b, u, u2, X)
        eval_block("boundary", ("boundary", bi), blk, build_bnd)

    # Assemble the three parts; sqrt-at-zero contributes exactly 0.
    part_vals = {}
    part_vars = {}
    for group, (ss, n_e) in acc.items():
        if ss is None:
            part_vals[group] = None
            continue
        ss_val = float(ss.val) if isinstance(ss, tape.Var) else float(ss)
        if ss_val == 0.0:
            part_vals[group] = 0.0
            continue
        if isinstance(ss, tape.Var):
            part = (ss / float(n_e)).sqrt()
            part_vars[group] = part
            part_vals[group] = float(part.val)
        else:
            part_vals[group] = float(np.sqrt(ss / n_e))

    breakdown = LossBreakdown.combine(
        part_vals["bulk"], part_vals["initial"], part_vals["boundary"], w
    )
    if not need_grad:
        return breakdown, None

    total_var = None
    for group, weight in (("bulk", 1.0), ("initial", w.alpha_0),
                          ("boundary", w.alpha_boundary)):
        pv = part_vars.get(group)
        if pv is None:
            continue
        term = pv * weight if weight != 1.0 else pv
        total_var = term if total_var is None else total_var + term

    grad = params.zeros_like()
    if total_var is not None:
        total_var.backward(1.0)
        for cache, u, cache2, cache_p, u2 in back:
            cots = u.cotangents()
            if cots:
                g = network.jet_backward(params, cache, cots)
                _accumulate(grad, g)
            if cache2 is not None:
                dcots = u.delay_cotangents()
                if dcots:
                    g = network.jet_backward(params, cache2, dcots)
                    _accumulate(grad, g)
            if u2 is not None:
                cots2 = u2.cotangents()
                if cots2:
                    g = network.jet_backward(params, cache_p, cots2)
                    _accumulate(grad, g)
    return breakdown, grad


def _accumulate(grad: NetParams, g: NetParams) -> None:
    for name in ("omega", "phi", "w", "b", "d", "a"):
        arr = getattr(grad, name)
        arr += getattr(g, name)


def _sliced_initial(blk: InitialBlock, rows_idx) -> InitialBlock:
    return replace(
        blk,
        X=blk.X[rows_idx],
        terms=[InitialTerm(t.cond, t.target_vals[rows_idx]) for t in blk.terms],
    )


def _sliced_boundary(blk: BoundaryBlock, rows_idx) -> BoundaryBlock:
    return replace(
        blk,
        X=blk.X[rows_idx],
        X2=None if blk.X2 is None else blk.X2[rows_idx],
        normal=None if blk.normal is None else blk.normal[rows_idx],
        target_vals=None if blk.target_vals is None else blk.target_vals[rows_idx],
    )


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------

def loss(theta: NetParams, spec: ProblemSpec, pts: CollocationSet,
         w: LossWeights) -> LossBreakdown:
    """Three-part loss at fixed parameters (no gradient)."""
    breakdown, _ = _evaluate(theta, spec, pts, w, need_grad=False)
    return breakdown


def loss_grad(theta: NetParams, spec: ProblemSpec, pts: CollocationSet,
              w: LossWeights):
    """(LossBreakdown, flat gradient) with the exact two-stage backward pass."""
    breakdown, grad = _evaluate(theta, spec, pts, w, need_grad=True)
    return breakdown, grad.flatten()


class PinnObjective:
    """Flat-vector objective bound to one sampled problem, for the optimizers.

    Exposes full and subset evaluations; block ids and row counts let the
    ADAM loop build global-shuffle mini-batches.
    """

    def __init__(self, spec: ProblemSpec, pts: CollocationSet, w: LossWeights,
                 like: NetParams):
        self.spec = spec
        self.pts = pts
        self.w = w
        self.D, self.N, self.n_o = like.D, like.N, like.n_o

    def _unflatten(self, theta: np.ndarray) -> NetParams:
        return NetParams.from_flat(theta, self.D, self.N, self.n_o)

    def block_rows(self) -> list:
        """(block id, row count) pairs in canonical order."""
        out = [("bulk", self.pts.bulk.X.shape[0])]
        if self.pts.initial is not None:
            out.append(("initial", self.pts.initial.X.shape[0]))
        for i, blk in enumerate(self.pts.boundary):
            out.append((("boundary", i), blk.X.shape[0]))
        return out

    def loss(self, theta: np.ndarray) -> LossBreakdown:
        return loss(self._unflatten(theta), self.spec, self.pts, self.w)

    def loss_grad(self, theta: np.ndarray, subset: dict | None = None):
        breakdown, grad = _evaluate(
            self._unflatten(theta), self.spec, self.pts, self.w,
            need_grad=True, subset=subset,
        )
        return breakdown, grad.flatten()

    def value_grad(self, theta: np.ndarray):
        """(total, flat grad) view for generic optimizers."""
        breakdown, grad = self.loss_grad(theta)
        return breakdown.total, grad
