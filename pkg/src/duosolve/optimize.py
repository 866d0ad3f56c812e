"""Two-phase training: mini-batch ADAM, then full-batch BFGS.

ADAM runs a fixed number of epochs over the one-time collocation sample with
a deliberately large initial learning rate, halving it whenever the full-set
loss plateaus.  BFGS then polishes with a dense inverse-Hessian update and a
strong-Wolfe line search until the sup-norm of the gradient drops below
tolerance (parameter counts here stay in the hundreds, so dense algebra is
cheap).  Reported epoch counts are ADAM epochs plus BFGS iterations, matching
how the benchmark tables count them.

Everything is deterministic given (problem, seed): collocation is fixed
before training, batch shuffles come from a dedicated seeded stream, and all
reductions use fixed-order sums.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import network, problem
from .loss import LossBreakdown, LossWeights, NonFiniteResidual, PinnObjective


@dataclass
class PlateauConfig:
    factor: float = 0.5
    patience: int = 30
    min_delta: float = 1e-4
    floor: float = 1e-6

    def __post_init__(self):
        if not (0.0 < self.factor < 1.0):
            raise ValueError("plateau factor must lie in (0, 1)")


@dataclass
class AdamConfig:
    epochs: int = 150
    batch_size: int = 256
    lr0: float = 0.1
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    plateau: PlateauConfig = field(default_factory=PlateauConfig)

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")


@dataclass
class BfgsConfig:
    grad_tol_inf: float = 1e-8
    max_iters: int = 20000
    c1: float = 1e-4
    c2: float = 0.9

    def __post_init__(self):
        if self.grad_tol_inf <= 0:
            raise ValueError("grad_tol_inf must be positive")


@dataclass
class TrainingReport:
    name: str
    seed: int
    adam_epochs_run: int
    bfgs_iters_run: int
    total_epochs: int
    wall_seconds: float
    adam_trace: list          # [{"epoch", "loss", "lr"}]
    bfgs_trace: list          # [{"iter", "loss"}]
    final_loss: LossBreakdown
    final_r: float | None
    stop_reason: str
    config: dict
    bfgs_symmetry_drift: float = 0.0


class TrainingAbort(RuntimeError):
    """Non-finite loss or gradient; carries the last finite parameters."""

    def __init__(self, message: str, theta_last, phase: str, trace):
        super().__init__(message)
        self.theta_last = theta_last
        self.phase = phase
        self.trace = trace


# ---------------------------------------------------------------------------
# ADAM with plateau decay
# ---------------------------------------------------------------------------

def train_adam(theta, objective, cfg: AdamConfig, seed):
    """Run exactly cfg.epochs epochs; returns (theta, trace).

    Each epoch shuffles the union of all collocation rows, splits it into
    batches (last one smaller), and takes one ADAM step per batch with group
    means over the rows present.  The plateau rule watches the full-set loss
    once per epoch.
    """
    rng = np.random.default_rng(seed)
    theta = np.asarray(theta, dtype=float).copy()

    blocks = objective.block_rows()
    universe = []
    for block_id, n in blocks:
        universe.extend((block_id, i) for i in range(n))
    n_rows = len(universe)

    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    t = 0
    lr = cfg.lr0
    best = np.inf
    wait = 0
    trace = []
    theta_last_good = theta.copy()

    for epoch in range(cfg.epochs):
        order = rng.permutation(n_rows)
        for start in range(0, n_rows, cfg.batch_size):
            chosen = order[start:start + cfg.batch_size]
            subset: dict = {}
            for gi in chosen:
                block_id, row = universe[gi]
                subset.setdefault(block_id, []).append(row)
            subset = {k: np.asarray(vv, dtype=int) for k, vv in subset.items()}
            try:
                bd, g = objective.loss_grad(theta, subset=subset)
            except NonFiniteResidual as exc:
                raise TrainingAbort(
                    f"ADAM epoch {epoch}: {exc}", theta_last_good, "adam", trace
                ) from exc
            if not np.all(np.isfinite(g)):
                raise TrainingAbort(
                    f"ADAM epoch {epoch}: non-finite gradient",
                    theta_last_good, "adam", trace,
                )
            t += 1
            m = cfg.beta1 * m + (1.0 - cfg.beta1) * g
            v = cfg.beta2 * v + (1.0 - cfg.beta2) * (g * g)
            mhat = m / (1.0 - cfg.beta1**t)
            vhat = v / (1.0 - cfg.beta2**t)
            theta = theta - lr * mhat / (np.sqrt(vhat) + cfg.eps)

        try:
            full = objective.loss(theta)
        except NonFiniteResidual as exc:
            raise TrainingAbort(
                f"ADAM epoch {epoch} monitor: {exc}", theta_last_good, "adam", trace
            ) from exc
        if not np.isfinite(full.total):
            raise TrainingAbort(
                f"ADAM epoch {epoch}: non-finite loss {full.total}",
                theta_last_good, "adam", trace,
            )
        theta_last_good = theta.copy()
        trace.append({"epoch": epoch, "loss": full.total, "lr": lr})

        # plateau rule on the epoch-end full-set loss
        if full.total < best - cfg.plateau.min_delta:
            best = full.total
            wait = 0
        else:
            wait += 1
            if wait >= cfg.plateau.patience:
                lr = max(lr * cfg.plateau.factor, cfg.plateau.floor)
                wait = 0

    return theta, trace


# ---------------------------------------------------------------------------
# BFGS with strong-Wolfe line search
# ---------------------------------------------------------------------------

def _quad_min(a, fa, ga, b, fb):
    """Minimizer of the parabola through (a, fa) with slope ga and (b, fb)."""
    d = b - a
    if d == 0.0:
        return None
    with np.errstate(all="ignore"):
        alpha = a - 0.5 * ga * d * d / (fb - fa - ga * d)
    if not np.isfinite(alpha):
        return None
    return float(alpha)


def _wolfe_search(fn_grad, theta, p, f0, g0, cfg: BfgsConfig, max_evals=60):
    """Strong-Wolfe step along p (bracket then zoom).

    Returns (alpha, f_new, g_new, n_evals) or None on failure.  Near the
    noise floor of f the Armijo comparison is meaningless, so a trial that
    satisfies the approximate (slope-only) Wolfe conditions with essentially
    unchanged f is also accepted; without this, convergence stalls around
    |g| ~ sqrt(eps) on well-conditioned problems.

    The root-mean-square loss parts are creased (|.|-shaped) wherever one
    part passes through zero, and near such a crease no step satisfies the
    strong curvature condition: the one-sided slopes both exceed c2*|d0|.
    When the zoom interval collapses without a strong-Wolfe point, the best
    weak-Wolfe trial seen (Armijo plus the one-sided curvature bound
    d >= c2*d0, the Lewis-Overton condition for nonsmooth quasi-Newton) is
    returned instead; its curvature product y.s is positive, so the
    inverse-Hessian update absorbs the crease geometry and later directions
    travel along the crease rather than across it.  Failing that, the best
    plain-Armijo trial is returned, the same convention MINPACK's dcsrch
    uses on its xtol exit; the caller's curvature guard skips the update
    for such steps.
    """
    d0 = float(np.dot(g0, p))
    if d0 >= 0.0:
        return None
    eps_f = 1e-10 * abs(f0)
    best = None       # lowest-f trial satisfying plain Armijo
    best_weak = None  # lowest-f trial satisfying Armijo + weak curvature

    def approx_ok(f, d):
        return (f <= f0 + eps_f) and (cfg.c2 * d0 <= d <= (2.0 * cfg.c1 - 1.0) * d0)

    def phi(alpha):
        nonlocal best, best_weak
        try:
            f, g = fn_grad(theta + alpha * p)
        except NonFiniteResidual:
            return np.inf, None, np.inf
        if not np.isfinite(f):
            return np.inf, None, np.inf
        d = float(np.dot(g, p))
        if f <= f0 + cfg.c1 * alpha * d0:
            if best is None or f < best[1]:
                best = (alpha, f, g)
            if d >= cfg.c2 * d0 and (best_weak is None or f < best_weak[1]):
                best_weak = (alpha, f, g)
        return f, g, d

    def fallback(evals):
        got = best_weak if best_weak is not None else best
        if got is None:
            return None
        return got[0], got[1], got[2], evals

    def zoom(lo, f_lo, d_lo, hi, f_hi, evals):
        for _ in range(max_evals - evals):
            evals += 1
            alpha = _quad_min(lo, f_lo, d_lo, hi, f_hi)
            lo_, hi_ = min(lo, hi), max(lo, hi)
            width = hi_ - lo_
            if (alpha is None or not (lo_ + 0.1 * width <= alpha <= hi_ - 0.1 * width)):
                alpha = 0.5 * (lo + hi)
            f, g, d = phi(alpha)
            if not np.isfinite(f):
                hi, f_hi = alpha, f
                continue
            if approx_ok(f, d):
                return alpha, f, g, evals
            if f > f0 + cfg.c1 * alpha * d0 or f >= f_lo:
                hi, f_hi = alpha, f
            else:
                if abs(d) <= -cfg.c2 * d0:
                    return alpha, f, g, evals
                if d * (hi - lo) >= 0.0:
                    hi, f_hi = lo, f_lo
                lo, f_lo, d_lo = alpha, f, d
            # relative collapse: a shrinking interval with no strong-Wolfe
            # point means the slope jumps across the window (a crease);
            # further refinement cannot succeed, hand over to the fallback.
            # With a weak-Wolfe exit already in hand there is no reason to
            # keep paying evaluations, so give up much earlier.
            w_tol = 1e-3 if best_weak is not None else 1e-8
            if abs(hi - lo) < w_tol * (abs(lo) + abs(hi) + 1e-300):
                break
        return fallback(evals)

    alpha_prev, f_prev, d_prev = 0.0, f0, d0
    alpha = 1.0
    evals = 0
    for _ in range(max_evals):
        evals += 1
        f, g, d = phi(alpha)
        if not np.isfinite(f):
            # step too long; retreat into a zoom between the last good point
            out = zoom(alpha_prev, f_prev, d_prev, alpha, np.inf, evals)
            return out
        if approx_ok(f, d):
            return alpha, f, g, evals
        if f > f0 + cfg.c1 * alpha * d0 or (evals > 1 and f >= f_prev):
            return zoom(alpha_prev, f_prev, d_prev, alpha, f, evals)
        if abs(d) <= -cfg.c2 * d0:
            return alpha, f, g, evals
        if d >= 0.0:
            return zoom(alpha, f, d, alpha_prev, f_prev, evals)
        alpha_prev, f_prev, d_prev = alpha, f, d
        alpha *= 2.0
        if alpha > 1e10:
            break
    return fallback(evals)


def train_bfgs(theta, objective, cfg: BfgsConfig):
    """Full-batch BFGS; returns (theta, trace, stop_reason).

    stop_reason is one of "grad_tol", "max_iters", "line_search_failure".
    Non-finite evaluations raise TrainingAbort with the last finite point.
    """
    theta = np.asarray(theta, dtype=float).copy()
    n = theta.size
    fn_grad = objective.value_grad

    trace = []
    try:
        f, g = fn_grad(theta)
    except NonFiniteResidual as exc:
        raise TrainingAbort(f"BFGS start: {exc}", theta, "bfgs", trace) from exc
    if not (np.isfinite(f) and np.all(np.isfinite(g))):
        raise TrainingAbort("BFGS start: non-finite objective", theta, "bfgs", trace)

    if float(np.max(np.abs(g))) < cfg.grad_tol_inf:
        return theta, trace, "grad_tol"

    H = np.eye(n)
    first_step = True
    stop_reason = "max_iters"
    for it in range(cfg.max_iters):
        p = -np.einsum("ij,j->i", H, g, optimize=False)
        if float(np.dot(p, g)) >= 0.0:
            # numerical loss of descent; restart from steepest descent
            H = np.eye(n)
            p = -g
        found = _wolfe_search(fn_grad, theta, p, f, g, cfg)
        if found is None:
            stop_reason = "line_search_failure"
            break
        alpha, f_new, g_new, _ = found
        s = alpha * p
        y = g_new - g
        theta = theta + s
        f, g = f_new, g_new
        entry = {"iter": it, "loss": f, "sym_drift": 0.0}
        trace.append(entry)

        if float(np.max(np.abs(g))) < cfg.grad_tol_inf:
            stop_reason = "grad_tol"
            break

        ys = float(np.dot(y, s))
        if ys > 1e-10 * float(np.linalg.norm(y) * np.linalg.norm(s)):
            if first_step:
                H = (ys / float(np.dot(y, y))) * np.eye(n)
                first_step = False
            rho = 1.0 / ys
            Hy = np.einsum("ij,j->i", H, y, optimize=False)
            # H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
            H -= rho * np.outer(s, Hy)
            H -= rho * np.outer(Hy, s)
            H += (rho * rho * float(np.dot(y, Hy)) + rho) * np.outer(s, s)
            entry["sym_drift"] = float(np.max(np.abs(H - H.T)))
            H = 0.5 * (H + H.T)
        # else: curvature too weak, skip the update entirely

    return theta, trace, stop_reason


# ---------------------------------------------------------------------------
# Full pipeline
# ---------------------------------------------------------------------------

def solve(case, *, seed: int = 0, hyper: problem.Hyper | None = None,
          adam: AdamConfig | None = None, bfgs: BfgsConfig | None = None,
          reference=None, name: str | None = None):
    """init -> sample -> ADAM -> BFGS -> validate, fully seeded.

    ``case`` is either a catalog entry (anything with .spec, .hyper, .name
    and optionally .reference) or a bare ProblemSpec, in which case ``hyper``
    is required.  ``reference`` overrides the case's reference evaluator; it
    receives the trained NetParams and returns the validation error r.
    """
    if isinstance(case, problem.ProblemSpec):
        spec = case
        if hyper is None:
            raise ValueError("solving a bare ProblemSpec requires hyper=")
        case_name = name or spec.name
        ref = reference
    else:
        spec = case.spec
        hyper = hyper or case.hyper
        case_name = name or case.name
        ref = reference
        if ref is None:
            make_ref = getattr(case, "error_evaluator", None)
            if callable(make_ref):
                ref = make_ref()
            else:
                ref = getattr(case, "reference", None)

    if adam is None:
        adam = AdamConfig(epochs=hyper.adam_epochs)
    if bfgs is None:
        bfgs = BfgsConfig()
    weights = LossWeights(hyper.alpha_initial, hyper.alpha_boundary)

    t_start = time.perf_counter()
    root = np.random.SeedSequence(seed)
    ss_init, ss_sample, ss_shuffle = root.spawn(3)

    params0 = network.init(
        hyper.neurons, spec.D, spec.n_outputs,
        spec.domain.extents_array(), np.random.default_rng(ss_init),
    )
    pts = problem.sample(spec, hyper, np.random.default_rng(ss_sample))
    objective = PinnObjective(spec, pts, weights, params0)

    stop_reason = None
    adam_trace: list = []
    bfgs_trace: list = []
    try:
        theta, adam_trace = train_adam(
            params0.flatten(), objective, adam, np.random.default_rng(ss_shuffle)
        )
        theta, bfgs_trace, stop_reason = train_bfgs(theta, objective, bfgs)
    except TrainingAbort as abort:
        theta = np.asarray(abort.theta_last, dtype=float)
        if abort.phase == "adam":
            adam_trace = abort.trace
        else:
            bfgs_trace = abort.trace
        stop_reason = "nonfinite"
    drift = max((e.get("sym_drift", 0.0) for e in bfgs_trace), default=0.0)

    wall = time.perf_counter() - t_start
    final_params = network.NetParams.from_flat(
        theta, spec.D, hyper.neurons, spec.n_outputs
    )
    final_loss = objective.loss(theta)
    final_r = None
    if ref is not None:
        final_r = float(ref(final_params))

    report = TrainingReport(
        name=case_name,
        seed=seed,
        adam_epochs_run=len(adam_trace),
        bfgs_iters_run=len(bfgs_trace),
        total_epochs=len(adam_trace) + len(bfgs_trace),
        wall_seconds=wall,
        adam_trace=adam_trace,
        bfgs_trace=bfgs_trace,
        final_loss=final_loss,
        final_r=final_r,
        stop_reason=stop_reason,
        config={
            "hyper": hyper.as_dict(),
            "adam": {
                "epochs": adam.epochs, "batch_size": adam.batch_size,
                "lr0": adam.lr0, "beta1": adam.beta1, "beta2": adam.beta2,
                "eps": adam.eps,
                "plateau": {
                    "factor": adam.plateau.factor,
                    "patience": adam.plateau.patience,
                    "min_delta": adam.plateau.min_delta,
                    "floor": adam.plateau.floor,
                },
            },
            "bfgs": {
                "grad_tol_inf": bfgs.grad_tol_inf, "max_iters": bfgs.max_iters,
                "c1": bfgs.c1, "c2": bfgs.c2,
            },
            "weights": {
                "alpha_0": weights.alpha_0,
                "alpha_boundary": weights.alpha_boundary,
            },
        },
        bfgs_symmetry_drift=drift,
    )
    return final_params, report
