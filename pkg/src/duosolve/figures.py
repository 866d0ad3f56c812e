"""Non-interactive figure rendering for solve runs.

Everything goes through the Agg backend so runs work headless; callers
get back the list of files written.  Three-dimensional cases are drawn
as a mid-time slice heatmap rather than any volume rendering.
"""
from __future__ import annotations

import numpy as np

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from . import network, validate  # noqa: E402


def training_trace(report, path) -> str:
    """Loss vs. epoch across both phases, phase boundary marked."""
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    a_end = 0
    if report.adam_trace:
        ep = [t["epoch"] for t in report.adam_trace]
        ax.semilogy(ep, [t["loss"] for t in report.adam_trace],
                    color="tab:blue", label="adam (full-set loss)")
        a_end = ep[-1] + 1
    if report.bfgs_trace:
        it = [a_end + t["iter"] for t in report.bfgs_trace]
        ax.semilogy(it, [t["loss"] for t in report.bfgs_trace],
                    color="tab:red", label="bfgs")
        ax.axvline(a_end, color="grey", lw=0.8, ls="--")
    ax.set_xlabel("epoch / iteration")
    ax.set_ylabel("total loss")
    ax.set_title(f"{report.name} (seed {report.seed}, {report.stop_reason})")
    ax.legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return str(path)


def _axis_names(D: int) -> list[str]:
    return ["t", "x", "y"][:D]


def _predictions(params, case):
    X = validate.validation_grid(case)
    pred = network.evaluate(params, X)
    ref = None
    if getattr(case, "reference_values", None) is not None:
        try:
            ref = case.reference_values(X)
        except Exception:
            ref = None
    return X, pred, ref


def solution_figure(params, case, path) -> str:
    """Solution overview figure; layout depends on the dimension.

    1D: curve against the reference plus a log error panel.  2D: value
    heatmap plus absolute-error heatmap (scatter for disk domains).
    3D: the two heatmaps on the mid-time slice of the value grid.
    """
    D = case.spec.D
    X, pred, ref = _predictions(params, case)
    if D == 1:
        return _figure_1d(case, X, pred, ref, path)
    if D == 2:
        return _figure_2d(case, X, pred, ref, path)
    return _figure_3d(case, X, pred, ref, path)


def _figure_1d(case, X, pred, ref, path):
    t = X[:, 0]
    n_o = pred.shape[1]
    n_rows = 2 if ref is not None else 1
    fig, axes = plt.subplots(n_rows, 1, figsize=(7.0, 3.0 * n_rows),
                             sharex=True, squeeze=False)
    ax = axes[0, 0]
    for l in range(n_o):
        ax.plot(t, pred[:, l], label=f"network u_{l}" if n_o > 1 else "network")
    if ref is not None:
        for l in range(ref.shape[1]):
            ax.plot(t, ref[:, l], "k--", lw=0.9,
                    label="reference" if l == 0 else None)
        err = np.abs(pred - ref)
        ax2 = axes[1, 0]
        ax2.semilogy(t, np.maximum(err.max(axis=1), 1e-18), color="tab:red")
        ax2.set_ylabel("|error|")
        ax2.set_xlabel("t")
    ax.set_ylabel("u")
    ax.set_title(f"{case.id} {case.name}")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return str(path)


def _heat(ax, fig, x, y, v, shape, title):
    if shape is None:
        sc = ax.scatter(x, y, c=v, s=4.0, cmap="viridis")
        fig.colorbar(sc, ax=ax, shrink=0.85)
    else:
        pm = ax.pcolormesh(x.reshape(shape), y.reshape(shape),
                           v.reshape(shape), shading="auto", cmap="viridis")
        fig.colorbar(pm, ax=ax, shrink=0.85)
    ax.set_title(title, fontsize=9)


def _figure_2d(case, X, pred, ref, path):
    n = validate.GRID_POINTS[2]
    shape = (n, n) if case.spec.domain.kind == "box" else None
    names = _axis_names(2)
    n_cols = 2 if ref is not None else 1
    fig, axes = plt.subplots(1, n_cols, figsize=(5.2 * n_cols, 4.2),
                             squeeze=False)
    _heat(axes[0, 0], fig, X[:, 0], X[:, 1], pred[:, 0], shape,
          f"{case.id} network u_0")
    if ref is not None:
        err = np.abs(pred - ref).max(axis=1)
        _heat(axes[0, 1], fig, X[:, 0], X[:, 1], err, shape, "abs error")
    for ax in axes[0]:
        ax.set_xlabel(names[0])
        ax.set_ylabel(names[1])
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return str(path)


def _figure_3d(case, X, pred, ref, path):
    n = validate.GRID_POINTS[3]
    mid = n // 2
    cube = lambda v: v.reshape(n, n, n)[mid]  # noqa: E731
    x = cube(X[:, 1])
    y = cube(X[:, 2])
    t_mid = X.reshape(n, n, n, 3)[mid, 0, 0, 0]
    n_cols = 2 if ref is not None else 1
    fig, axes = plt.subplots(1, n_cols, figsize=(5.2 * n_cols, 4.2),
                             squeeze=False)
    pm = axes[0, 0].pcolormesh(x, y, cube(pred[:, 0]), shading="auto",
                               cmap="viridis")
    fig.colorbar(pm, ax=axes[0, 0], shrink=0.85)
    axes[0, 0].set_title(f"{case.id} u_0 at t={t_mid:.3g}", fontsize=9)
    if ref is not None:
        err = np.abs(pred - ref).max(axis=1)
        pm = axes[0, 1].pcolormesh(x, y, cube(err), shading="auto",
                                   cmap="magma")
        fig.colorbar(pm, ax=axes[0, 1], shrink=0.85)
        axes[0, 1].set_title(f"abs error at t={t_mid:.3g}", fontsize=9)
    for ax in axes[0]:
        ax.set_xlabel("x")
        ax.set_ylabel("y")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return str(path)


def render_run(params, case, report, out_dir) -> list[str]:
    """Write the standard figure set for one finished solve."""
    from pathlib import Path

    out = Path(out_dir)
    written = [training_trace(report, out / "training.png"),
               solution_figure(params, case, out / "solution.png")]
    return written
