"""Reference solutions and error measurement.

Everything a trained network is graded against lives here: dense-output
integrators for the time-marching problems, a second-order space-time
scheme for the viscous transport benchmark, a spectral-in-angle solver for
the disk problems, and the pooled grid error that the benchmark tables
report.  The solvers are deliberately independent of the network and loss
code; they share only the problem descriptions.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg
from scipy.interpolate import CubicSpline

from . import network

# regular validation grid resolution per spacetime dimension
GRID_POINTS = {1: 200, 2: 50, 3: 30}


# ---------------------------------------------------------------------------
# Dense-output Runge-Kutta
# ---------------------------------------------------------------------------

class _CubicHermite:
    """Piecewise cubic interpolant from node values and one-sided slopes.

    Slopes are stored per span rather than per node so a derivative jump
    at a node (which delay equations produce) is represented exactly.
    """

    def __init__(self, ts, ys, f_lo, f_hi):
        self.ts = np.asarray(ts, dtype=float)
        self.ys = np.asarray(ys, dtype=float)
        self.f_lo = np.asarray(f_lo, dtype=float)
        self.f_hi = np.asarray(f_hi, dtype=float)

    def __call__(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        i = np.searchsorted(self.ts, t, side="right") - 1
        i = np.clip(i, 0, len(self.ts) - 2)
        h = (self.ts[i + 1] - self.ts[i])[:, None]
        w = ((t - self.ts[i])[:, None]) / h
        w2 = w * w
        w3 = w2 * w
        return ((2 * w3 - 3 * w2 + 1) * self.ys[i]
                + (w3 - 2 * w2 + w) * h * self.f_lo[i]
                + (3 * w2 - 2 * w3) * self.ys[i + 1]
                + (w3 - w2) * h * self.f_hi[i])


def rk4_dense(rhs, t0, t1, y0, n_steps):
    """March ``y' = rhs(t, y)`` with classic fourth-order Runge-Kutta and
    return a cubic-Hermite dense evaluator ``t -> (P, n_state)``."""
    y = np.asarray(y0, dtype=float).copy()
    ts = np.linspace(t0, t1, n_steps + 1)
    ys = np.empty((n_steps + 1, y.size))
    fs = np.empty_like(ys)
    ys[0] = y
    for i in range(n_steps):
        t = ts[i]
        h = ts[i + 1] - t
        k1 = np.asarray(rhs(t, y), dtype=float)
        k2 = np.asarray(rhs(t + 0.5 * h, y + 0.5 * h * k1), dtype=float)
        k3 = np.asarray(rhs(t + 0.5 * h, y + 0.5 * h * k2), dtype=float)
        k4 = np.asarray(rhs(t + h, y + h * k3), dtype=float)
        fs[i] = k1
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        ys[i + 1] = y
    fs[-1] = np.asarray(rhs(ts[-1], y), dtype=float)
    return _CubicHermite(ts, ys, fs[:-1], fs[1:])


def dde_dense(rhs, history, t0, t1, *, delay, y0, steps_per_interval):
    """Method-of-steps integrator for ``y' = rhs(t, y, y(t - delay))``.

    ``history(t_array)`` supplies pre-window values as a (P, n) array.  The
    march proceeds one delay interval at a time; within an interval every
    delayed lookup lands on already-completed spans, so the stage values
    can be gathered up front in three vectorized calls.  Returns the same
    dense evaluator as ``rk4_dense``.

    The initial value may jump away from the history (``y0`` need not equal
    ``history(t0)``).  Integration over the first interval then uses the
    history's own value at the window start, which is its left limit, while
    later intervals see the integrated branch that starts from ``y0``.
    """
    y = np.asarray(y0, dtype=float).copy()
    n = y.size
    node_ts = [np.array([t0])]
    node_ys = [y[None].copy()]
    span_lo: list[np.ndarray] = []
    span_hi: list[np.ndarray] = []
    done = None
    edge = 1e-12 * max(1.0, abs(t0))

    def lagged(times):
        if done is None:
            # the whole first interval lags into the history window; the
            # lookup at the seam itself takes the history's left limit,
            # which is the correct one-sided value for this interval
            return np.asarray(history(times), dtype=float).reshape(-1, n)
        out = np.empty((len(times), n))
        past = times < t0 - edge
        if past.any():
            out[past] = np.asarray(
                history(times[past]), dtype=float).reshape(-1, n)
        if (~past).any():
            out[~past] = done(times[~past])
        return out

    t_lo = t0
    while t_lo < t1 - 1e-12 * max(1.0, abs(t1)):
        t_hi = min(t_lo + delay, t1)
        m = steps_per_interval
        ts = np.linspace(t_lo, t_hi, m + 1)
        h = (t_hi - t_lo) / m
        lag_lo = lagged(ts[:-1] - delay)
        lag_mid = lagged(ts[:-1] + 0.5 * h - delay)
        lag_hi = lagged(ts[1:] - delay)
        ys = np.empty((m + 1, n))
        fs = np.empty((m + 1, n))
        ys[0] = y
        for i in range(m):
            t = ts[i]
            k1 = np.asarray(rhs(t, y, lag_lo[i]), dtype=float)
            k2 = np.asarray(
                rhs(t + 0.5 * h, y + 0.5 * h * k1, lag_mid[i]), dtype=float)
            k3 = np.asarray(
                rhs(t + 0.5 * h, y + 0.5 * h * k2, lag_mid[i]), dtype=float)
            k4 = np.asarray(rhs(t + h, y + h * k3, lag_hi[i]), dtype=float)
            fs[i] = k1
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            ys[i + 1] = y
        fs[m] = np.asarray(rhs(t_hi, ys[m], lag_hi[m - 1]), dtype=float)
        node_ts.append(ts[1:])
        node_ys.append(ys[1:])
        span_lo.append(fs[:-1])
        span_hi.append(fs[1:])
        done = _CubicHermite(np.concatenate(node_ts), np.vstack(node_ys),
                             np.vstack(span_lo), np.vstack(span_hi))
        t_lo = t_hi
    return done


# ---------------------------------------------------------------------------
# Generic forward integration of catalog ODEs
# ---------------------------------------------------------------------------

class _ScalarProbe:
    """Field accessor that reports fixed value/slope/curvature numbers, used
    to read a one-dimensional residual as an algebraic function of them."""

    __slots__ = ("value", "slope", "curvature", "lag")

    def __init__(self, value, slope, curvature, lag):
        self.value = value
        self.slope = slope
        self.curvature = curvature
        self.lag = lag

    def d(self, l, order):
        return (self.value, self.slope, self.curvature)[order]

    def val(self, l):
        return self.value

    def delayed(self, l):
        if self.lag is None:
            raise ValueError("residual references a delayed value but no "
                             "history was supplied")
        return self.lag


class _TraceProbe:
    def __init__(self):
        self.max_order = 0
        self.uses_delay = False

    def d(self, l, order):
        self.max_order = max(self.max_order, int(order))
        return 0.0

    def val(self, l):
        return 0.0

    def delayed(self, l):
        self.uses_delay = True
        return 0.0


def ode_oracle(case, n_steps=20000):
    """Integrate a one-dimensional catalog case forward in time, reading the
    right-hand side straight off its residual closure, and return the dense
    state evaluator (column 0 is the solution value).

    The residual must be affine in its highest derivative, which the whole
    catalog satisfies; the slope (or curvature) is recovered from two probe
    evaluations per stage.  Boundary-value problems are rejected because
    they have no marching form.
    """
    spec = case.spec
    if spec.D != 1 or spec.n_outputs != 1:
        raise ValueError("forward integration covers scalar 1-D cases only")
    if spec.boundary:
        raise ValueError(f"{case.id} is a boundary-value problem; it cannot "
                         "be integrated forward in time")
    if not spec.initial:
        raise ValueError(f"{case.id} carries no initial data")

    tracer = _TraceProbe()
    spec.residual(tracer, np.array([[0.0]]))
    order = tracer.max_order
    if order not in (1, 2):
        raise ValueError(f"unsupported differential order {order}")

    t0, t1 = spec.domain.extents_array()[0]
    X0 = np.array([[t0]])
    seed = {"value": 0.0, "velocity": 0.0}
    for cond in spec.initial:
        if cond.kind not in seed:
            raise ValueError("observable initial data has no marching form")
        if cond.target is not None:
            seed[cond.kind] = float(np.asarray(cond.target(X0)).ravel()[0])

    def residual_at(t, value, slope, curvature, lag):
        probe = _ScalarProbe(value, slope, curvature, lag)
        row = spec.residual(probe, np.array([[t]]))[0]
        return float(np.asarray(row).ravel()[0])

    if tracer.uses_delay:
        if order != 1:
            raise ValueError("delayed cases are handled at first order only")
        hist = spec.history
        if hist is None:
            raise ValueError(f"{case.id} uses a delayed value but its "
                             "problem carries no history")

        def rhs(t, y, yd):
            r0 = residual_at(t, y[0], 0.0, 0.0, yd[0])
            r1 = residual_at(t, y[0], 1.0, 0.0, yd[0])
            return np.array([-r0 / (r1 - r0)])

        def history(times):
            return np.asarray(hist.fn(np.asarray(times, dtype=float)),
                              dtype=float).reshape(len(times), 1)

        per = max(200, int(round(n_steps * hist.delay / (t1 - t0))))
        return dde_dense(rhs, history, t0, t1, delay=hist.delay,
                         y0=np.array([seed["value"]]),
                         steps_per_interval=per)

    if order == 1:
        def rhs(t, y):
            r0 = residual_at(t, y[0], 0.0, 0.0, None)
            r1 = residual_at(t, y[0], 1.0, 0.0, None)
            return np.array([-r0 / (r1 - r0)])

        y0 = np.array([seed["value"]])
    else:
        def rhs(t, y):
            r0 = residual_at(t, y[0], y[1], 0.0, None)
            r1 = residual_at(t, y[0], y[1], 1.0, None)
            return np.array([y[1], -r0 / (r1 - r0)])

        y0 = np.array([seed["value"], seed["velocity"]])
    return rk4_dense(rhs, t0, t1, y0, n_steps)


# ---------------------------------------------------------------------------
# Viscous transport benchmark (space-time grid)
# ---------------------------------------------------------------------------

def burgers_oracle(nu, nx=2058, nt=2058):
    """Second-order reference field for u_t + u u_x = nu u_xx on the unit
    square with u(0, x) = x(1 - x) and pinned ends.

    Diffusion is Crank-Nicolson, advection is central in space and
    Adams-Bashforth in time after one trapezoidal bootstrap step, so the
    scheme is O(dx^2, dt^2) throughout.  The default resolutions are
    multiples of 49, which places every point of the 50-per-axis
    validation grid exactly on a node.  Returns an evaluator mapping
    (P, 2) points (t, x) to values by bilinear lookup (exact on nodes).
    """
    dx = 1.0 / nx
    dt = 1.0 / nt
    x = np.linspace(0.0, 1.0, nx + 1)
    U = np.empty((nt + 1, nx + 1))
    U[0] = x * (1.0 - x)
    U[:, 0] = 0.0
    U[:, -1] = 0.0

    r = nu * dt / (2.0 * dx * dx)
    n_in = nx - 1
    ab = np.zeros((3, n_in))
    ab[0, 1:] = -r
    ab[1, :] = 1.0 + 2.0 * r
    ab[2, :-1] = -r

    def diffuse_half(u):
        return r * (u[:-2] - 2.0 * u[1:-1] + u[2:])

    def advect(u):
        return u[1:-1] * (u[2:] - u[:-2]) / (2.0 * dx)

    def implicit_step(explicit_part):
        inner = scipy.linalg.solve_banded((1, 1), ab, explicit_part)
        out = np.zeros(nx + 1)
        out[1:-1] = inner
        return out

    # bootstrap with a trapezoidal corrector so the multistep start loses
    # no order
    a_prev = advect(U[0])
    pred = implicit_step(U[0][1:-1] + diffuse_half(U[0]) - dt * a_prev)
    U[1] = implicit_step(U[0][1:-1] + diffuse_half(U[0])
                         - 0.5 * dt * (a_prev + advect(pred)))
    for nstep in range(1, nt):
        a_now = advect(U[nstep])
        U[nstep + 1] = implicit_step(
            U[nstep][1:-1] + diffuse_half(U[nstep])
            - dt * (1.5 * a_now - 0.5 * a_prev))
        a_prev = a_now

    def evaluate(X):
        X = np.asarray(X, dtype=float)
        ti = np.clip(X[:, 0], 0.0, 1.0) / dt
        xi = np.clip(X[:, 1], 0.0, 1.0) / dx
        i = np.clip(np.floor(ti).astype(int), 0, nt - 1)
        j = np.clip(np.floor(xi).astype(int), 0, nx - 1)
        ft = ti - i
        fx = xi - j
        return ((1 - ft) * (1 - fx) * U[i, j]
                + (1 - ft) * fx * U[i, j + 1]
                + ft * (1 - fx) * U[i + 1, j]
                + ft * fx * U[i + 1, j + 1])

    return evaluate


# ---------------------------------------------------------------------------
# Disk problems (spectral in angle, finite differences in radius)
# ---------------------------------------------------------------------------

def _disk_modes(forcing, boundary_value, n_r, n_theta):
    """Solve lap(u) = forcing on the unit disk with a constant rim value.

    Fourier transform in the angle decouples the problem into one
    tridiagonal radial system per mode on a cell-centered grid (first
    center at h/2, so the pole needs no special casing).  Returns radius
    nodes (rim appended) and the mode coefficient matrix.
    """
    h = 1.0 / n_r
    centers = (np.arange(n_r) + 0.5) * h
    faces = np.arange(n_r + 1) * h
    theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
    R, T = np.meshgrid(centers, theta, indexing="ij")
    F = np.asarray(forcing(R * np.cos(T), R * np.sin(T)), dtype=float)
    Fh = np.fft.rfft(F, axis=1)

    n_modes = n_theta // 2 + 1
    Uh = np.empty((n_r + 1, n_modes), dtype=complex)
    inv_rh2 = 1.0 / (centers * h * h)
    lower = faces[1:-1] * inv_rh2[1:]     # coupling to the inner neighbour
    upper = faces[1:-1] * inv_rh2[:-1]    # coupling to the outer neighbour
    base_diag = -(faces[:-1] + faces[1:]) * inv_rh2
    base_diag[-1] -= faces[-1] * inv_rh2[-1]  # ghost-cell rim closure
    rim_flux = 2.0 * faces[-1] * inv_rh2[-1]

    g0 = boundary_value * n_theta  # transform of a constant rim value
    for m in range(n_modes):
        diag = base_diag - (m / centers) ** 2
        ab = np.zeros((3, n_r), dtype=complex)
        ab[0, 1:] = upper
        ab[1, :] = diag
        ab[2, :-1] = lower
        rhs = Fh[:, m].astype(complex)
        if m == 0:
            rhs[-1] -= rim_flux * g0
        Uh[:-1, m] = scipy.linalg.solve_banded((1, 1), ab, rhs)
    Uh[-1, :] = 0.0
    Uh[-1, 0] = g0
    return np.append(centers, 1.0), Uh


def poisson_disk_oracle(forcing, boundary_value=0.0, n_r=3000, n_theta=128):
    """Reference field for lap(u) = forcing(c0, c1) on the unit disk with a
    constant rim value.

    The radial scheme is second order, so two resolutions (n_r and 2 n_r)
    are combined pointwise in a Richardson step; with cubic radial
    interpolation the evaluator is accurate to O(h^4).  Returns an
    evaluator mapping (P, 2) cartesian points to values.
    """
    grids = []
    for n in (n_r, 2 * n_r):
        nodes, Uh = _disk_modes(forcing, boundary_value, n, n_theta)
        grids.append([CubicSpline(nodes, Uh[:, m])
                      for m in range(Uh.shape[1])])

    def eval_modes(splines, rr, th):
        total = np.zeros_like(rr)
        for m, spline in enumerate(splines):
            vals = spline(rr)
            if m == 0:
                total += vals.real
            else:
                weight = 2.0 if m < n_theta // 2 else 1.0
                total += weight * (vals * np.exp(1j * m * th)).real
        return total / n_theta

    def evaluate(X):
        X = np.asarray(X, dtype=float)
        rr = np.minimum(np.hypot(X[:, 0], X[:, 1]), 1.0)
        th = np.arctan2(X[:, 1], X[:, 0])
        coarse = eval_modes(grids[0], rr, th)
        fine = eval_modes(grids[1], rr, th)
        return (4.0 * fine - coarse) / 3.0

    return evaluate


# ---------------------------------------------------------------------------
# Grid error
# ---------------------------------------------------------------------------

def validation_grid(case) -> np.ndarray:
    """Inclusive regular evaluation grid for a case; disk domains use the
    bounding-box grid restricted to the disk."""
    spec = case.spec
    if spec.domain.kind == "disk":
        g = np.linspace(-1.0, 1.0, GRID_POINTS[2])
        A, B = np.meshgrid(g, g, indexing="ij")
        X = np.column_stack([A.ravel(), B.ravel()])
        return X[np.hypot(X[:, 0], X[:, 1]) <= 1.0 + 1e-12]
    axes = [np.linspace(lo, hi, GRID_POINTS[spec.D])
            for lo, hi in spec.domain.extents_array()]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([m.ravel() for m in mesh])


def rms_error(theta: network.NetParams, case) -> float:
    """Root-mean-square deviation from the reference solution over the
    validation grid, pooled over output components."""
    X = validation_grid(case)
    diff = network.evaluate(theta, X) - case.reference_values(X)
    return float(np.sqrt(np.mean(diff * diff)))


def error_table(theta: network.NetParams, case):
    """Pointwise comparison on the validation grid: returns (header, rows)
    ready for delimited output."""
    X = validation_grid(case)
    pred = network.evaluate(theta, X)
    ref = case.reference_values(X)
    names = ["t", "x", "y"][:X.shape[1]]
    header = (names
              + [f"u_hat_{l}" for l in range(pred.shape[1])]
              + [f"u_ref_{l}" for l in range(ref.shape[1])]
              + [f"abs_err_{l}" for l in range(pred.shape[1])])
    rows = np.column_stack([X, pred, ref, np.abs(pred - ref)])
    return header, rows


def _log10(value) -> float | None:
    if value is None or not np.isfinite(value) or value <= 0.0:
        return None
    return float(np.log10(value))


def compare_report(report, case) -> dict:
    """Summarize a training run against the case's published row.

    The grid error entry is the string "n/a (*)" when the case has no
    reference solution to compare against.
    """
    fl = report.final_loss
    out = {
        "case": case.id,
        "name": case.name,
        "wall_seconds": report.wall_seconds,
        "epochs": report.total_epochs,
        "log_total": _log10(fl.total),
        "log_bulk": _log10(fl.L_bulk),
        "log_initial": _log10(fl.L_initial),
        "log_boundary": _log10(fl.L_boundary),
        "log_r": (_log10(report.final_r)
                  if report.final_r is not None else "n/a (*)"),
    }
    ref = case.reference
    if ref is not None:
        out["reference"] = ref.as_dict()
        for mine, theirs, key in (
            (out["log_total"], ref.log_total, "delta_log_total"),
            (out["log_r"], ref.log_r, "delta_log_r"),
        ):
            out[key] = (mine - theirs
                        if isinstance(mine, float) and theirs is not None
                        else None)
    return out
