"""Two-dimensional benchmark problems, ids C.1 through C.12.

Ten cases live on the unit square with coordinates (t, x); the last two are
stationary problems on the closed unit disk.  Shared defaults: 10 neurons
per branch, {1000, 200, 200} bulk/boundary/initial points, initial weight
10.  The disk cases have no initial group.
"""
from __future__ import annotations

import numpy as np
import sympy as sp

from ..problem import (
    BoundaryCondition,
    Hyper,
    InitialCondition,
    ProblemSpec,
    box,
    unit_disk,
)
from .core import BenchmarkCase
from .refs import reference_for

_T, _X = sp.symbols("t x")
_PI = np.pi


def _hyper(n_initial: int = 200) -> Hyper:
    return Hyper(neurons=10, n_bulk=1000, n_initial=n_initial,
                 n_boundary=200, alpha_initial=10.0, alpha_boundary=1.0,
                 adam_epochs=210)


def _case(case_id, name, summary, residual, *, domain=None, initial=(),
          boundary=(), solution=None, oracle=None, notes=(),
          time_dependent=True, n_initial=200):
    spec = ProblemSpec(
        name=name,
        domain=domain if domain is not None else box((0.0, 1.0), (0.0, 1.0)),
        residual=residual,
        initial=initial,
        boundary=boundary,
        time_dependent=time_dependent,
        description=summary,
    )
    return BenchmarkCase(
        id=case_id,
        name=name,
        summary=summary,
        spec=spec,
        hyper=_hyper(n_initial=n_initial),
        reference=reference_for(case_id),
        notes=tuple(notes),
        solution_symbols=(_T, _X),
        solution_exprs=None if solution is None else (solution,),
        oracle_builder=oracle,
    )


# ---------------------------------------------------------------------------
# Residuals and condition targets
# ---------------------------------------------------------------------------

def _wave(u, X):
    return [u.d(0, 2, 0) - u.d(0, 0, 2)]


def _advect(u, X):
    return [u.d(0, 1, 0) - u.d(0, 0, 1)]


def _heat(kappa):
    def residual(u, X):
        return [u.d(0, 1, 0) - kappa * u.d(0, 0, 2)]

    return residual


def _laplace_plus(forcing):
    def residual(u, X):
        return [u.d(0, 2, 0) + u.d(0, 0, 2) + forcing(X)]

    return residual


def _burgers(u, X):
    return [u.d(0, 1, 0) + u.val(0) * u.d(0, 0, 1) - 0.25 * u.d(0, 0, 2)]


def _sin3x(X):
    return np.sin(3.0 * _PI * X[:, 1])


def _cos3x(X):
    return np.cos(3.0 * _PI * X[:, 1])


def _two_modes(X):
    x = X[:, 1]
    return 2.0 * np.sin(9.0 * _PI * x) + 0.3 * np.sin(4.0 * _PI * x)


def _interior_dirichlet_faces():
    """The three zero-valued faces of the elliptic square problems: far
    time face plus both x faces (the t = 0 face is the initial group)."""
    return tuple(
        BoundaryCondition("dirichlet", face=f, target=None)
        for f in ((0, 1), (1, 0), (1, 1))
    )


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------

def _burgers_oracle():
    from .. import validate

    sol = validate.burgers_oracle(0.25, nx=2058, nt=2058)

    def evaluate(X):
        return sol(np.asarray(X, dtype=float))[:, None]

    return evaluate


def _disk_gaussian_oracle():
    from .. import validate

    def forcing(t, x):
        return np.exp(-(t ** 2 + 10.0 * x ** 2))

    sol = validate.poisson_disk_oracle(forcing, boundary_value=0.0)

    def evaluate(X):
        return sol(np.asarray(X, dtype=float))[:, None]

    return evaluate


# ---------------------------------------------------------------------------
# The cases
# ---------------------------------------------------------------------------

def _build() -> list[BenchmarkCase]:
    decay = sp.exp(-sp.Float("0.05") * (3 * sp.pi) ** 2 * _T)
    return [
        _case(
            "C.1", "wave-dirichlet", "standing wave, pinned ends",
            _wave,
            initial=(InitialCondition("value", _sin3x),
                     InitialCondition("velocity", None)),
            boundary=(BoundaryCondition("dirichlet", target=None),),
            solution=sp.cos(3 * sp.pi * _T) * sp.sin(3 * sp.pi * _X),
        ),
        _case(
            "C.2", "wave-neumann", "standing wave, free ends",
            _wave,
            initial=(InitialCondition("value", _cos3x),
                     InitialCondition("velocity", None)),
            boundary=(BoundaryCondition("neumann", target=None),),
            solution=sp.cos(3 * sp.pi * _T) * sp.cos(3 * sp.pi * _X),
            notes=("initial profile corrected to cos(3 pi x): the stated "
                   "sine contradicts both the quoted solution and the "
                   "zero-flux boundary",),
        ),
        _case(
            "C.3", "advection-wave", "left-moving wave with driven ends",
            _advect,
            initial=(InitialCondition(
                "value", lambda X: np.sin(2.0 * _PI * X[:, 1])),),
            boundary=(BoundaryCondition(
                "dirichlet",
                target=lambda X: np.sin(2.0 * _PI * X[:, 0])),),
            solution=sp.sin(2 * sp.pi * (_T + _X)),
            notes=("solution corrected to sin(2 pi (t+x)); the quoted "
                   "cosine fails the stated initial profile",),
        ),
        _case(
            "C.4", "heat-single-mode", "single decaying sine mode",
            _heat(0.05),
            initial=(InitialCondition("value", _sin3x),),
            boundary=(BoundaryCondition("dirichlet", target=None),),
            solution=sp.sin(3 * sp.pi * _X) * decay,
        ),
        _case(
            "C.5", "heat-two-mode", "two modes decaying at different rates",
            _heat(0.01),
            initial=(InitialCondition("value", _two_modes),),
            boundary=(BoundaryCondition("dirichlet", target=None),),
            solution=(2 * sp.sin(9 * sp.pi * _X)
                      * sp.exp(-sp.Float("0.01") * (9 * sp.pi) ** 2 * _T)
                      + sp.Float("0.3") * sp.sin(4 * sp.pi * _X)
                      * sp.exp(-sp.Float("0.01") * (4 * sp.pi) ** 2 * _T)),
            notes=("second-mode sign follows the stated initial profile "
                   "(+0.3); the quoted solution's minus sign contradicts "
                   "it",),
        ),
        _case(
            "C.6", "heat-neumann", "decaying cosine mode, insulated ends",
            _heat(0.05),
            initial=(InitialCondition("value", _cos3x),),
            boundary=(BoundaryCondition("neumann", target=None),),
            solution=sp.cos(3 * sp.pi * _X) * decay,
            notes=("initial profile corrected to cos(3 pi x), matching the "
                   "quoted solution and the zero-flux boundary",),
        ),
        _case(
            "C.7", "poisson-sine-forcing", "product-sine source, zero rim",
            _laplace_plus(lambda X: 2.0 * _PI ** 2
                          * np.sin(_PI * X[:, 0]) * np.sin(_PI * X[:, 1])),
            initial=(InitialCondition("value", None),),
            boundary=_interior_dirichlet_faces(),
            solution=sp.sin(sp.pi * _T) * sp.sin(sp.pi * _X),
        ),
        _case(
            "C.8", "poisson-polynomial-sine",
            "separable polynomial-times-sine solution",
            _laplace_plus(lambda X: (
                -10.0 * (X[:, 0] - 1.0) * np.cos(5.0 * X[:, 1])
                + 25.0 * (X[:, 0] - 1.0) * (X[:, 1] - 1.0)
                * np.sin(5.0 * X[:, 1]))),
            initial=(InitialCondition(
                "value",
                lambda X: (1.0 - X[:, 1]) * np.sin(5.0 * X[:, 1])),),
            boundary=_interior_dirichlet_faces(),
            solution=(1 - _T) * (1 - _X) * sp.sin(5 * _X),
            notes=("sign of the cosine source term flipped; as printed the "
                   "quoted solution does not satisfy the equation",),
        ),
        _case(
            "C.9", "heat-quarter-amplitude", "quarter-amplitude sine decay",
            _heat(0.25),
            initial=(InitialCondition(
                "value", lambda X: 0.25 * np.sin(_PI * X[:, 1])),),
            boundary=(BoundaryCondition("dirichlet", target=None),),
            solution=sp.exp(-sp.pi ** 2 * _T / 4) * sp.sin(sp.pi * _X) / 4,
        ),
        _case(
            "C.10", "burgers", "viscous shock-free transport",
            _burgers,
            initial=(InitialCondition(
                "value", lambda X: X[:, 1] * (1.0 - X[:, 1])),),
            boundary=(BoundaryCondition("dirichlet", target=None),),
            oracle=_burgers_oracle,
        ),
        _case(
            "C.11", "disk-uniform-source", "uniform source on the unit disk",
            _laplace_plus(lambda X: -4.0 * np.ones(len(X))),
            domain=unit_disk(),
            boundary=(BoundaryCondition(
                "dirichlet", target=lambda X: np.ones(len(X))),),
            solution=_T ** 2 + _X ** 2,
            time_dependent=False, n_initial=0,
            notes=("quoted solution block repeats C.9's; the radial "
                   "paraboloid is the solution of this problem",),
        ),
        _case(
            "C.12", "disk-gaussian-source",
            "anisotropic gaussian source on the unit disk",
            _laplace_plus(lambda X: -np.exp(
                -(X[:, 0] ** 2 + 10.0 * X[:, 1] ** 2))),
            domain=unit_disk(),
            boundary=(BoundaryCondition("dirichlet", target=None),),
            oracle=_disk_gaussian_oracle,
            time_dependent=False, n_initial=0,
        ),
    ]


_CASES = _build()


def cases() -> list[BenchmarkCase]:
    return _CASES
