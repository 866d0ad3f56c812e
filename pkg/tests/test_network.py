"""Network evaluation and exact-gradient tests.

Two oracle routes: coordinate derivatives are checked against Richardson
finite differences on the plain forward evaluation, and parameter gradients
against central differences on randomly weighted jet outputs.
"""

from __future__ import annotations

import numpy as np
import pytest
from helpers import FD_STEPS, rel_err, richardson

from duosolve import network


def make_params(D, N, n_o, seed, extents=None):
    rng = np.random.default_rng(seed)
    if extents is None:
        extents = [[0.0, 1.0]] * D
    p = network.init(N, D, n_o, extents, rng)
    # generic interior point: nonzero phases, order-one slopes and amplitudes
    p.phi += rng.normal(0.0, 0.5, p.phi.shape)
    p.b += rng.normal(0.0, 0.5, p.b.shape)
    p.w += rng.normal(0.0, 2.0, p.w.shape)
    p.d = rng.normal(0.0, 0.5, p.d.shape)
    p.a = rng.normal(0.0, 0.5, p.a.shape)
    return p


def all_indices(D, total=3):
    out = []
    if D == 1:
        return [(m,) for m in range(total + 1)]
    if D == 2:
        return [(i, j) for i in range(4) for j in range(4) if i + j <= total]
    return [
        (i, j, k)
        for i in range(4) for j in range(4) for k in range(4)
        if i + j + k <= total
    ]


# ---------------------------------------------------------------------------
# Initialization contract
# ---------------------------------------------------------------------------

def test_init_ranges_and_constants():
    N, D, n_o = 12, 2, 3
    extents = [[0.0, 2.0], [0.0, 0.5]]
    p = network.init(N, D, n_o, extents, 123)
    lengths = np.array([2.0, 0.5])
    for j in range(D):
        lo, hi = np.pi / lengths[j], N * np.pi / lengths[j]
        assert np.all(p.omega[j] >= lo) and np.all(p.omega[j] <= hi)
    assert np.all(p.w >= 0.0) and np.all(p.w <= 1e-3)
    assert np.all(p.phi == 0.0) and np.all(p.b == 0.0) and np.all(p.a == 0.0)
    assert np.all(p.d == 1e-4)
    assert p.size == 4 * D * N + n_o * (3 * N + 1)


def test_init_is_seed_deterministic():
    a = network.init(8, 3, 1, [[0, 1]] * 3, 42)
    b = network.init(8, 3, 1, [[0, 1]] * 3, 42)
    c = network.init(8, 3, 1, [[0, 1]] * 3, 43)
    assert np.array_equal(a.omega, b.omega) and np.array_equal(a.w, b.w)
    assert not np.array_equal(a.omega, c.omega)


def test_init_rejects_bad_extents():
    with pytest.raises(ValueError):
        network.init(4, 2, 1, [[0, 1]], 0)
    with pytest.raises(ValueError):
        network.init(4, 1, 1, [[1.0, 1.0]], 0)


# ---------------------------------------------------------------------------
# Vector packing and checkpoints
# ---------------------------------------------------------------------------

def test_flatten_roundtrip():
    p = make_params(3, 5, 2, seed=1)
    q = network.NetParams.from_flat(p.flatten(), 3, 5, 2)
    for name in ("omega", "phi", "w", "b", "d", "a"):
        np.testing.assert_array_equal(getattr(p, name), getattr(q, name))


def test_from_flat_rejects_wrong_size():
    with pytest.raises(ValueError):
        network.NetParams.from_flat(np.zeros(10), 2, 3, 1)


def test_checkpoint_roundtrip_is_bit_exact(tmp_path):
    p = make_params(2, 4, 2, seed=9)
    fp = tmp_path / "ck.json"
    network.save_checkpoint(p, fp, domain=[[0, 1], [0, 1]], seed=9)
    q, meta = network.load_checkpoint(fp)
    for name in ("omega", "phi", "w", "b", "d", "a"):
        np.testing.assert_array_equal(getattr(p, name), getattr(q, name))
    assert meta["N"] == 4 and meta["D"] == 2 and meta["n_o"] == 2
    assert meta["seed"] == 9 and meta["domain"] == [[0, 1], [0, 1]]


# ---------------------------------------------------------------------------
# Jet values vs Richardson finite differences
# ---------------------------------------------------------------------------

def fd_mixed_partial(eval_fn, X, alpha, h):
    """Nested Richardson differences, one pass per coordinate with m > 0.

    The same step is used on every axis; callers pick it from the *total*
    order, since the deepest stencil divides by a product of all the steps.
    """
    dims = [j for j, m in enumerate(alpha) if m > 0]
    if not dims:
        return eval_fn(X)
    j = dims[0]
    rest = tuple(0 if jj == j else mm for jj, mm in enumerate(alpha))

    def along(t):
        Xs = X.copy()
        Xs[:, j] = t
        return fd_mixed_partial(eval_fn, Xs, rest, h)

    return richardson(along, X[:, j].copy(), alpha[j], h)


@pytest.mark.parametrize("D", [1, 2, 3])
def test_jets_match_richardson_fd(D):
    p = make_params(D, 6, 2, seed=10 + D)
    rng = np.random.default_rng(100 + D)
    X = rng.uniform(0.1, 0.9, (7, D))
    indices = all_indices(D)
    jets = network.eval_jet(p, X, indices)

    for alpha in indices:
        total = sum(alpha)
        if total == 0:
            continue
        approx = fd_mixed_partial(
            lambda Xc: network.evaluate(p, Xc), X, alpha, FD_STEPS[total]
        )
        assert rel_err(approx, jets[alpha]) < 1e-6, f"alpha={alpha}"


def test_evaluate_equals_zero_jet_bitwise():
    p = make_params(2, 7, 1, seed=21)
    X = np.random.default_rng(0).uniform(0, 1, (11, 2))
    jets = network.eval_jet(p, X, [(0, 0), (1, 0)])
    np.testing.assert_array_equal(network.evaluate(p, X), jets[(0, 0)])


def test_jet_rejects_bad_indices():
    p = make_params(2, 3, 1, seed=2)
    X = np.zeros((1, 2))
    with pytest.raises(ValueError):
        network.eval_jet(p, X, [(2, 2)])
    with pytest.raises(ValueError):
        network.eval_jet(p, X, [(1,)])
    with pytest.raises(ValueError):
        network.eval_jet(p, np.zeros((1, 3)), [(0, 0)])


# ---------------------------------------------------------------------------
# Parameter gradients vs central differences
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("D", [1, 2, 3])
def test_backward_matches_fd(D):
    p = make_params(D, 4, 2, seed=30 + D)
    rng = np.random.default_rng(200 + D)
    X = rng.uniform(0.1, 0.9, (6, D))
    indices = all_indices(D)
    cots = {a: rng.normal(0, 1, (6, 2)) for a in indices}

    jets, cache = network.jet_forward(p, X, indices)
    grad = network.jet_backward(p, cache, cots)

    def objective(params):
        js, _ = network.jet_forward(params, X, indices)
        return sum(float(np.sum(cots[a] * js[a])) for a in indices)

    h = 1e-6
    rng2 = np.random.default_rng(999)
    for name in ("omega", "phi", "w", "b", "d", "a"):
        arr = getattr(p, name)
        ganalytic = getattr(grad, name)
        # spot-check a random sample of entries per block (FD is slow)
        flat_idx = rng2.choice(arr.size, size=min(arr.size, 8), replace=False)
        for fi in flat_idx:
            idx = np.unravel_index(fi, arr.shape)
            pp = p.copy(); getattr(pp, name)[idx] += h
            pm = p.copy(); getattr(pm, name)[idx] -= h
            fd = (objective(pp) - objective(pm)) / (2 * h)
            assert abs(fd - ganalytic[idx]) / max(1.0, abs(fd)) < 1e-5, (
                f"{name}[{idx}]"
            )


def test_backward_subset_of_indices():
    """Cotangents over a subset must only see those terms."""
    p = make_params(1, 5, 1, seed=77)
    X = np.linspace(0.1, 0.9, 9)[:, None]
    jets, cache = network.jet_forward(p, X, [(0,), (1,), (2,)])
    cot = {(2,): np.ones((9, 1))}
    g = network.jet_backward(p, cache, cot)
    assert np.all(g.a == 0.0)  # bias only enters the zero-order jet

    def objective(params):
        js, _ = network.jet_forward(params, X, [(2,)])
        return float(np.sum(js[(2,)]))

    h = 1e-6
    pp = p.copy(); pp.omega[0, 2] += h
    pm = p.copy(); pm.omega[0, 2] -= h
    fd = (objective(pp) - objective(pm)) / (2 * h)
    assert abs(fd - g.omega[0, 2]) / max(1.0, abs(fd)) < 1e-5


def test_forward_shapes():
    p = make_params(3, 4, 5, seed=8)
    X = np.zeros((13, 3))
    jets = network.eval_jet(p, X, [(0, 0, 0), (1, 1, 1)])
    assert jets[(0, 0, 0)].shape == (13, 5)
    assert jets[(1, 1, 1)].shape == (13, 5)


# ---------------------------------------------------------------------------
# Compiled kernels vs numpy reference
# ---------------------------------------------------------------------------

needs_kernels = pytest.mark.skipif(
    network._kernels is None, reason="compiled kernels unavailable"
)


@needs_kernels
@pytest.mark.parametrize("D,n_o", [(1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2)])
def test_kernel_route_matches_numpy_route(D, n_o):
    """The fused kernels and the numpy sweep are independent implementations
    of the same jets; they must agree to accumulation error."""
    rng = np.random.default_rng(1000 + 10 * D + n_o)
    N, P = 11, 37
    p = make_params(D, N, n_o, seed=int(rng.integers(1 << 30)))
    X = rng.uniform(-2.0, 3.0, (P, D))
    pool = all_indices(D)
    take = rng.choice(len(pool), size=min(6, len(pool)), replace=False)
    indices = [pool[i] for i in take]
    zero = (0,) * D
    if zero not in indices:
        indices.append(zero)
    max_m = max(max(a) for a in indices)

    jf, cf = network._jet_forward_fast(p, X, indices, max_m)
    jn, cn = network._jet_forward_np(p, X, indices, max_m)
    # 1e-12 allows for the different (but fixed) summation orders of the two
    # routes under cancellation; logic errors show up ten orders larger.
    for a in indices:
        assert rel_err(jf[a], jn[a]) < 1e-12

    cots = {a: rng.normal(0.0, 1.0, (P, n_o)) for a in indices[:-1]}
    gf = network._jet_backward_fast(p, cf, cots)
    gn = network._jet_backward_np(p, cn, cots)
    for name in network._FLAT_ORDER:
        assert rel_err(getattr(gf, name), getattr(gn, name)) < 1e-12, name


@needs_kernels
def test_kernel_route_is_deterministic():
    p = make_params(2, 9, 2, seed=5)
    X = np.random.default_rng(6).uniform(0.0, 1.0, (50, 2))
    indices = [(0, 0), (1, 0), (0, 2), (1, 1)]
    jets1, cache1 = network.jet_forward(p, X, indices)
    jets2, cache2 = network.jet_forward(p, X, indices)
    for a in indices:
        assert np.array_equal(jets1[a], jets2[a])
    cot = {a: np.full((50, 2), 0.25) for a in indices}
    g1 = network.jet_backward(p, cache1, cot)
    g2 = network.jet_backward(p, cache2, cot)
    for name in network._FLAT_ORDER:
        assert np.array_equal(getattr(g1, name), getattr(g2, name))
