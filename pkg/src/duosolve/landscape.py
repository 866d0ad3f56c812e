"""Closed-form loss surfaces for two analytically tractable toy setups.

Both toys strip the solver down to a handful of sine neurons so the loss
can be written in closed form and compared against its sampled estimate:

* a single sine neuron ``d sin(omega t + phi)`` fitted to the harmonic
  oscillator u'' + (5 pi)^2 u = 0, u(0)=0, u'(0)=10 pi on t in [0, 1];
  the global minimum sits at (omega, phi, d) = (5 pi, 0, 2) up to the
  2 pi k phase family.
* a product of three sine neurons fitted to the 2+1 dimensional wave
  equation on the unit cube with initial slice sin(3 pi x) sin(4 pi y);
  the bulk loss vanishes on the entire frequency cone
  omega_t^2 = omega_x^2 + omega_y^2, which is why the bulk part alone
  cannot identify the solution.

The closed forms make two failure modes of sine-based fitting easy to
demonstrate: sampling the bulk on a too-coarse uniform grid manufactures
spurious minima along the frequency axis (grid step 0.1 aliases near
omega = 10 pi k), and the bulk part towers over the initial/boundary
parts at large frequency, which is what the alpha weights compensate.

Every formula here is kept stable at its removable singularities
(omega -> 0, resonant overlaps) by writing the trigonometric integrals
through sin(z)/z rather than as printed differences.
"""
from __future__ import annotations

import numpy as np

from .loss import LossBreakdown, LossWeights

# The toy oscillator: frequency 5 pi, velocity condition u'(0) = 10 pi.
HO_OMEGA = 5.0 * np.pi
HO_VELOCITY = 10.0 * np.pi


# ---------------------------------------------------------------------------
# Stable trigonometric building blocks
# ---------------------------------------------------------------------------

def _sinc(z):
    """sin(z)/z with the value 1 at z = 0 (numpy's sinc is normalized)."""
    return np.sinc(np.asarray(z) / np.pi)


def sine_mean_square(omega, phi):
    """Mean of sin(omega t + phi)^2 over t in [0, 1].

    Equals 1/2 - cos(omega + 2 phi) sinc(omega) / 2; finite for all omega
    including 0, where it degenerates to sin(phi)^2.
    """
    omega = np.asarray(omega, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return 0.5 - 0.5 * np.cos(omega + 2.0 * phi) * _sinc(omega)


def sine_overlap(omega, phi, m: int):
    """Integral of sin(omega x + phi) sin(m pi x) over x in [0, 1].

    Written as a difference of two shifted sinc terms so the resonance
    omega = m pi needs no special casing: the limit value (1/2 at
    phi = 0 mod the parity of m) comes out automatically.
    """
    omega = np.asarray(omega, dtype=float)
    phi = np.asarray(phi, dtype=float)
    lo = 0.5 * (omega - m * np.pi)
    hi = 0.5 * (omega + m * np.pi)
    return 0.5 * (np.cos(phi + lo) * _sinc(lo) - np.cos(phi + hi) * _sinc(hi))


# ---------------------------------------------------------------------------
# One-neuron harmonic-oscillator toy
# ---------------------------------------------------------------------------

def ho_loss(omega, phi, d, alpha_0: float = 1.0,
            grid_dt: float | None = None) -> LossBreakdown:
    """Loss of the single-neuron ansatz d sin(omega t + phi).

    With ``grid_dt`` None the bulk part is the continuous-limit closed
    form; with a step it is the discrete mean over the inclusive uniform
    grid on [0, 1], which is what exposes the aliasing minima.  The
    initial part is a single point either way.  Inputs broadcast, so
    passing meshgrid arrays returns whole surfaces.
    """
    omega = np.asarray(omega, dtype=float)
    phi = np.asarray(phi, dtype=float)
    d = np.asarray(d, dtype=float)
    detune = np.abs(HO_OMEGA ** 2 - omega ** 2)
    if grid_dt is None:
        ms = sine_mean_square(omega, phi)
    else:
        t = np.arange(0.0, 1.0 + 0.5 * grid_dt, grid_dt)
        s = np.sin(np.multiply.outer(omega, t) + phi[..., None])
        ms = np.mean(s * s, axis=-1)
    bulk = np.abs(d) * detune * np.sqrt(ms)
    initial = np.sqrt(0.5 * ((d * np.sin(phi)) ** 2
                             + (d * omega * np.cos(phi) - HO_VELOCITY) ** 2))
    w = LossWeights(alpha_0=alpha_0)
    return LossBreakdown.combine(bulk, initial, None, w)


def ho_omega_minima_count(omegas, grid_dt: float, phi: float = 0.0,
                          d: float = 2.0, alpha_0: float = 1.0) -> int:
    """Strict interior local minima of the sampled total loss along omega."""
    omegas = np.asarray(omegas, dtype=float)
    total = ho_loss(omegas, np.full_like(omegas, phi), d,
                    alpha_0=alpha_0, grid_dt=grid_dt).total
    inner = (total[1:-1] < total[:-2]) & (total[1:-1] < total[2:])
    return int(np.count_nonzero(inner))


# ---------------------------------------------------------------------------
# Three-neuron wave toy
# ---------------------------------------------------------------------------

def wave_toy_losses(omega_t, omega_x, omega_y,
                    phi_t=0.0, phi_x=0.0, phi_y=0.0):
    """Closed-form (bulk, initial, boundary) losses of the product ansatz.

    The ansatz is sin(omega_t t + phi_t) sin(omega_x x + phi_x)
    sin(omega_y y + phi_y) against the homogeneous wave equation on the
    unit cube, initial value sin(3 pi x) sin(4 pi y), zero initial
    velocity, and zero Dirichlet data on the four spatial faces.  All six
    arguments broadcast.
    """
    ot = np.asarray(omega_t, dtype=float)
    ox = np.asarray(omega_x, dtype=float)
    oy = np.asarray(omega_y, dtype=float)
    pt = np.asarray(phi_t, dtype=float)
    px = np.asarray(phi_x, dtype=float)
    py = np.asarray(phi_y, dtype=float)

    it = sine_mean_square(ot, pt)
    ix = sine_mean_square(ox, px)
    iy = sine_mean_square(oy, py)

    cone = ox ** 2 + oy ** 2 - ot ** 2
    bulk = np.abs(cone) * np.sqrt(it * ix * iy)

    jx = sine_overlap(ox, px, 3)
    jy = sine_overlap(oy, py, 4)
    sq = (0.25
          - 2.0 * np.sin(pt) * jx * jy
          + (np.sin(pt) ** 2 + ot ** 2 * np.cos(pt) ** 2) * ix * iy)
    initial = np.sqrt(np.maximum(0.5 * sq, 0.0))

    edge_x = np.sin(px) ** 2 + np.sin(ox + px) ** 2
    edge_y = np.sin(py) ** 2 + np.sin(oy + py) ** 2
    boundary = np.sqrt(0.25 * it * (edge_x * iy + edge_y * ix))
    return bulk, initial, boundary


def wave_toy_sampled(omega_t, omega_x, omega_y,
                     phi_t=0.0, phi_x=0.0, phi_y=0.0,
                     n_points: int = 100_000, seed: int = 0):
    """Monte-Carlo estimates of the wave-toy losses, for cross-checking.

    Bulk points are uniform in the cube, initial points uniform on the
    t=0 face, and boundary points split evenly across the four spatial
    faces (all faces have equal measure here).  Scalar arguments only.
    """
    rng = np.random.default_rng(seed)
    ot, ox, oy = (float(omega_t), float(omega_x), float(omega_y))
    pt, px, py = (float(phi_t), float(phi_x), float(phi_y))

    t, x, y = rng.uniform(0.0, 1.0, size=(3, n_points))
    u = np.sin(ot * t + pt) * np.sin(ox * x + px) * np.sin(oy * y + py)
    bulk = np.abs(ox ** 2 + oy ** 2 - ot ** 2) * np.sqrt(np.mean(u * u))

    x0, y0 = rng.uniform(0.0, 1.0, size=(2, n_points))
    sxy = np.sin(ox * x0 + px) * np.sin(oy * y0 + py)
    val = np.sin(pt) * sxy - np.sin(3.0 * np.pi * x0) * np.sin(4.0 * np.pi * y0)
    vel = ot * np.cos(pt) * sxy
    initial = np.sqrt(0.5 * (np.mean(val * val) + np.mean(vel * vel)))

    n_face = n_points // 4
    tb, sb = rng.uniform(0.0, 1.0, size=(2, 4 * n_face))
    st = np.sin(ot * tb + pt)
    vals = np.empty(4 * n_face)
    # faces x=0 and x=1 vary y, faces y=0 and y=1 vary x
    for i, (fx, fy) in enumerate(((0.0, None), (1.0, None),
                                  (None, 0.0), (None, 1.0))):
        sl = slice(i * n_face, (i + 1) * n_face)
        if fy is None:
            vals[sl] = (st[sl] * np.sin(ox * fx + px)
                        * np.sin(oy * sb[sl] + py))
        else:
            vals[sl] = (st[sl] * np.sin(ox * sb[sl] + px)
                        * np.sin(oy * fy + py))
    boundary = np.sqrt(np.mean(vals * vals))
    return bulk, initial, boundary


# ---------------------------------------------------------------------------
# Grid exports
# ---------------------------------------------------------------------------

def ho_surface(omegas, phis, d: float = 2.0, alpha_0: float = 1.0,
               grid_dt: float | None = None):
    """Total-loss surface over an (omega, phi) grid; returns OM, PH, L."""
    om, ph = np.meshgrid(np.asarray(omegas, dtype=float),
                         np.asarray(phis, dtype=float), indexing="ij")
    bd = ho_loss(om, ph, d, alpha_0=alpha_0, grid_dt=grid_dt)
    return om, ph, bd.total


def wave_surfaces(omega_ts, omega_xs, omega_ys,
                  phi_t: float = 0.5 * np.pi, phi_x: float = 0.0,
                  phi_y: float = 0.0):
    """(bulk, initial, boundary) volumes over an omega_t/x/y grid.

    Phases default to the exact-solution values (pi/2, 0, 0) so the
    surfaces show the frequency structure alone, the same slice the
    alpha-hierarchy argument is made on.
    """
    ot, ox, oy = np.meshgrid(np.asarray(omega_ts, dtype=float),
                             np.asarray(omega_xs, dtype=float),
                             np.asarray(omega_ys, dtype=float),
                             indexing="ij")
    bulk, initial, boundary = wave_toy_losses(ot, ox, oy, phi_t, phi_x, phi_y)
    return (ot, ox, oy), (bulk, initial, boundary)
