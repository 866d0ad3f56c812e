"""Problem specifications: domains, conditions, collocation sampling.

A :class:`ProblemSpec` describes one differential-equation problem in solver
terms: a domain, a residual evaluator, and lists of initial and boundary
conditions.  Evaluators are plain callables ``fn(u, X)`` where ``X`` is the
(P, D) coordinate array and ``u`` gives access to the network fields:

    u.val(l)          value of output component l            (default l=0)
    u.d(l, *alpha)    mixed partial, alpha is a length-D multi-index
    u.delayed(l)      u_l at time t - delay, with history substitution

They return one residual row set of shape (P,), or a sequence of them, and
must combine coordinate arrays with field terms through the operators and the
:mod:`duosolve.tape` function wrappers (sin, cos, exp, ...), which work on
plain arrays and tape variables alike.  The same callable is therefore usable
both for numeric evaluation and for gradient taping.

Coordinate 0 is time whenever ``time_dependent`` is set.  Initial conditions
live on the low-time face and share one point set; boundary conditions get
points on their faces, with the total boundary budget split evenly across
(condition, face) units by largest remainder.  Elliptic problems that weight
one face separately simply declare that face's data as an initial condition.

Collocation is drawn once per run.  The draw order is part of the
reproducibility contract: bulk first, then the initial face, then each
boundary condition in declaration order (faces in ascending (dim, side)
order), one generator call per block.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import tape
from .jets import check_multi_index

# ---------------------------------------------------------------------------
# Domains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Domain:
    """Axis-aligned box, or the closed unit disk (kind "disk", D=2).

    ``extents`` is (D, 2) low/high per coordinate; for the disk it is the
    bounding box [[-1, 1], [-1, 1]] and is what the frequency initialization
    scales against.
    """

    kind: str
    extents: tuple

    def __post_init__(self):
        if self.kind not in ("box", "disk"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        ext = np.asarray(self.extents, dtype=float)
        if ext.ndim != 2 or ext.shape[1] != 2:
            raise ValueError("extents must be a (D, 2) array of lows and highs")
        if np.any(ext[:, 1] <= ext[:, 0]):
            raise ValueError("extents must have positive length")
        if self.kind == "disk" and ext.shape[0] != 2:
            raise ValueError("disk domains are two-dimensional")

    @property
    def D(self) -> int:
        return len(self.extents)

    def extents_array(self) -> np.ndarray:
        return np.asarray(self.extents, dtype=float)

    def sample_interior(self, n: int, rng: np.random.Generator) -> np.ndarray:
        ext = self.extents_array()
        if self.kind == "box":
            u = rng.uniform(0.0, 1.0, size=(n, self.D))
            return ext[:, 0] + u * (ext[:, 1] - ext[:, 0])
        # disk: radius sqrt(u) is area-uniform
        u = rng.uniform(0.0, 1.0, size=(n, 2))
        r = np.sqrt(u[:, 0])
        th = 2.0 * np.pi * u[:, 1]
        return np.column_stack([r * np.cos(th), r * np.sin(th)])

    def sample_rim(self, n: int, rng: np.random.Generator):
        """Boundary circle of the disk; returns (points, outward normals)."""
        if self.kind != "disk":
            raise ValueError("sample_rim is only defined for disk domains")
        th = rng.uniform(0.0, 2.0 * np.pi, size=n)
        pts = np.column_stack([np.cos(th), np.sin(th)])
        return pts, pts.copy()


def box(*extents) -> Domain:
    return Domain("box", tuple(tuple(float(v) for v in e) for e in extents))


def unit_disk() -> Domain:
    return Domain("disk", ((-1.0, 1.0), (-1.0, 1.0)))


# ---------------------------------------------------------------------------
# Conditions
# ---------------------------------------------------------------------------

@dataclass
class InitialCondition:
    """Condition on the low-time face.

    kind "value":      u_l - target            for each listed component
    kind "velocity":   du_l/dt - target
    kind "observable": evaluator(u, X) - target  (rows as returned)

    ``target`` maps the full (P, D) face coordinates to (P,) or (P, k); None
    means zero.
    """

    kind: str
    target: Callable | None = None
    components: tuple[int, ...] = (0,)
    evaluator: Callable | None = None

    def __post_init__(self):
        if self.kind not in ("value", "velocity", "observable"):
            raise ValueError(f"unknown initial condition kind {self.kind!r}")
        if self.kind == "observable" and self.evaluator is None:
            raise ValueError("observable initial conditions need an evaluator")
        self.components = tuple(self.components)


@dataclass
class BoundaryCondition:
    """Condition on domain faces.

    ``face`` is (dim, side) with side 0 low / 1 high; None means every
    spatial face of a box (all faces except the time pair when the problem
    is time-dependent) or the rim of a disk.  Periodic conditions give the
    paired dimension in ``face`` and sample matched low/high point pairs;
    ``match_normal_derivative`` additionally ties the first derivatives.

    kinds: dirichlet | neumann | robin | periodic | custom.  Robin enforces
    robin_normal_coeff * du/dn + robin_value_coeff * u = target.
    """

    kind: str
    face: tuple[int, int] | None = None
    target: Callable | None = None
    components: tuple[int, ...] = (0,)
    robin_value_coeff: float = 1.0
    robin_normal_coeff: float = 1.0
    match_normal_derivative: bool = False
    evaluator: Callable | None = None

    def __post_init__(self):
        kinds = ("dirichlet", "neumann", "robin", "periodic", "custom")
        if self.kind not in kinds:
            raise ValueError(f"unknown boundary condition kind {self.kind!r}")
        if self.kind == "custom" and self.evaluator is None:
            raise ValueError("custom boundary conditions need an evaluator")
        if self.kind == "periodic" and self.face is None:
            raise ValueError("periodic conditions must name the paired dimension")
        self.components = tuple(self.components)


@dataclass
class History:
    """Pre-domain history for delay equations: u(t) = fn(t) for t < t0."""

    delay: float
    fn: Callable


@dataclass
class ProblemSpec:
    name: str
    domain: Domain
    residual: Callable
    n_outputs: int = 1
    initial: Sequence[InitialCondition] = field(default_factory=list)
    boundary: Sequence[BoundaryCondition] = field(default_factory=list)
    history: History | None = None
    time_dependent: bool = True
    description: str = ""

    @property
    def D(self) -> int:
        return self.domain.D

    def spatial_dims(self) -> list[int]:
        return list(range(1, self.D)) if self.time_dependent else list(range(self.D))


@dataclass
class Hyper:
    """Per-case training knobs (network width, sample counts, weights)."""

    neurons: int
    n_bulk: int
    n_initial: int
    n_boundary: int
    alpha_initial: float = 1.0
    alpha_boundary: float = 1.0
    adam_epochs: int = 150

    def as_dict(self) -> dict:
        return {
            "neurons": self.neurons,
            "n_bulk": self.n_bulk,
            "n_initial": self.n_initial,
            "n_boundary": self.n_boundary,
            "alpha_initial": self.alpha_initial,
            "alpha_boundary": self.alpha_boundary,
            "adam_epochs": self.adam_epochs,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Hyper":
        return cls(**{k: d[k] for k in (
            "neurons", "n_bulk", "n_initial", "n_boundary",
            "alpha_initial", "alpha_boundary", "adam_epochs",
        )})


# ---------------------------------------------------------------------------
# Field accessors handed to evaluators
# ---------------------------------------------------------------------------

def _zero_alpha(D: int) -> tuple[int, ...]:
    return (0,) * D


def _unit_alpha(D: int, j: int) -> tuple[int, ...]:
    a = [0] * D
    a[j] = 1
    return tuple(a)


class JetProbe:
    """Duck-typed ``u`` that records which partials an evaluator touches."""

    def __init__(self, D: int, n_outputs: int, P: int = 3):
        self.D = D
        self.n_outputs = n_outputs
        self.P = P
        self.alphas: set[tuple[int, ...]] = set()
        self.uses_delay = False

    def d(self, l: int, *alpha):
        if not (0 <= l < self.n_outputs):
            raise ValueError(f"component {l} out of range (n_outputs={self.n_outputs})")
        alpha = check_multi_index(alpha)
        if len(alpha) != self.D:
            raise ValueError(f"multi-index {alpha} must have length {self.D}")
        self.alphas.add(alpha)
        return np.ones(self.P)

    def val(self, l: int = 0):
        return self.d(l, *_zero_alpha(self.D))

    def delayed(self, l: int = 0):
        if not (0 <= l < self.n_outputs):
            raise ValueError(f"component {l} out of range (n_outputs={self.n_outputs})")
        self.uses_delay = True
        return np.ones(self.P)


class JetVars:
    """``u`` accessor backed by network jets, taped for backpropagation.

    One leaf Var is created per (component, multi-index) pair on first use;
    after a backward sweep :meth:`cotangents` repacks the leaf gradients into
    the {alpha: (P, n_o)} layout that ``network.jet_backward`` consumes.
    """

    def __init__(self, jets: dict, D: int, n_outputs: int, delay=None):
        self._jets = jets
        self.D = D
        self.n_outputs = n_outputs
        self._leaves: dict = {}
        # delay: (jets_shifted, keep, hist_blend) or None
        self._delay = delay
        self._delay_leaves: dict = {}

    def d(self, l: int, *alpha):
        alpha = check_multi_index(alpha)
        if len(alpha) != self.D:
            raise ValueError(f"multi-index {alpha} must have length {self.D}")
        key = (alpha, l)
        leaf = self._leaves.get(key)
        if leaf is None:
            leaf = tape.Var(self._jets[alpha][:, l])
            self._leaves[key] = leaf
        return leaf

    def val(self, l: int = 0):
        return self.d(l, *_zero_alpha(self.D))

    def delayed(self, l: int = 0):
        if self._delay is None:
            raise ValueError("this problem has no delay term")
        jets2, keep, hist_blend = self._delay
        leaf = self._delay_leaves.get(l)
        if leaf is None:
            leaf = tape.Var(jets2[_zero_alpha(self.D)][:, l])
            self._delay_leaves[l] = leaf
        # rows whose shifted time precedes the domain use the history value;
        # the keep mask zeroes the network term (and its gradient) there
        return leaf * keep + hist_blend

    def cotangents(self) -> dict:
        return self._collect(self._leaves)

    def delay_cotangents(self) -> dict:
        zero = _zero_alpha(self.D)
        return self._collect(
            {(zero, l): leaf for l, leaf in self._delay_leaves.items()}
        )

    def _collect(self, leaves: dict) -> dict:
        out: dict = {}
        for (alpha, l), leaf in leaves.items():
            if leaf.grad is None:
                continue
            if alpha not in out:
                P = leaf.val.shape[0]
                out[alpha] = np.zeros((P, self.n_outputs))
            out[alpha][:, l] += leaf.grad
        return out


# ---------------------------------------------------------------------------
# Collocation sampling
# ---------------------------------------------------------------------------

@dataclass
class BulkBlock:
    X: np.ndarray
    indices: list
    n_entries_per_point: int
    # delay equations: shifted points, keep mask, blended history values
    X_shift: np.ndarray | None = None
    keep: np.ndarray | None = None
    hist_blend: np.ndarray | None = None


@dataclass
class InitialTerm:
    cond: InitialCondition
    target_vals: np.ndarray  # (P, k)


@dataclass
class InitialBlock:
    X: np.ndarray
    indices: list
    terms: list
    n_entries_per_point: int


@dataclass
class BoundaryBlock:
    cond: BoundaryCondition
    X: np.ndarray
    indices: list
    n_entries_per_point: int
    X2: np.ndarray | None = None       # periodic partner points
    normal: np.ndarray | None = None   # (P, D) outward unit normals
    target_vals: np.ndarray | None = None


@dataclass
class CollocationSet:
    spec: ProblemSpec
    bulk: BulkBlock
    initial: InitialBlock | None
    boundary: list

    def total_points(self) -> int:
        n = self.bulk.X.shape[0]
        if self.initial is not None:
            n += self.initial.X.shape[0]
        for blk in self.boundary:
            n += blk.X.shape[0]
        return n


def _trace_residual(spec: ProblemSpec):
    """Run the residual once on a probe to learn its partials and arity."""
    probe = JetProbe(spec.D, spec.n_outputs)
    out = spec.residual(probe, np.full((probe.P, spec.D), 0.5))
    rows = out if isinstance(out, (list, tuple)) else [out]
    for r in rows:
        r = np.asarray(r)
        if r.shape != (probe.P,):
            raise ValueError(
                "residual evaluator must return rows of shape (P,); got "
                f"{r.shape}"
            )
    alphas = set(probe.alphas)
    if probe.uses_delay:
        if spec.history is None:
            raise ValueError("residual uses u.delayed but the problem has no history")
        alphas.add(_zero_alpha(spec.D))
    return sorted(alphas), len(rows), probe.uses_delay


def _trace_evaluator(spec: ProblemSpec, evaluator: Callable):
    probe = JetProbe(spec.D, spec.n_outputs)
    out = evaluator(probe, np.full((probe.P, spec.D), 0.5))
    rows = out if isinstance(out, (list, tuple)) else [out]
    if probe.uses_delay:
        raise ValueError("condition evaluators cannot reference delayed values")
    return sorted(probe.alphas), len(rows)


def _normalize_target(cond_target, X: np.ndarray, k: int) -> np.ndarray:
    """Evaluate a target callable to a dense (P, k) array (zero if None)."""
    P = X.shape[0]
    if cond_target is None:
        return np.zeros((P, k))
    vals = np.asarray(cond_target(X), dtype=float)
    if vals.ndim == 0:
        return np.full((P, k), float(vals))
    if vals.shape == (P,):
        return np.repeat(vals[:, None], k, axis=1)
    if vals.shape == (P, k):
        return vals.copy()
    raise ValueError(f"target returned shape {vals.shape}; need ({P},) or ({P},{k})")


def _box_faces(spec: ProblemSpec) -> list[tuple[int, int]]:
    return [(dim, side) for dim in spec.spatial_dims() for side in (0, 1)]


def _face_points(spec: ProblemSpec, dim: int, side: int, n: int,
                 rng: np.random.Generator) -> np.ndarray:
    ext = spec.domain.extents_array()
    X = np.empty((n, spec.D))
    free = [j for j in range(spec.D) if j != dim]
    if free:
        u = rng.uniform(0.0, 1.0, size=(n, len(free)))
        for c, j in enumerate(free):
            X[:, j] = ext[j, 0] + u[:, c] * (ext[j, 1] - ext[j, 0])
    X[:, dim] = ext[dim, side]
    return X


def _face_normal(spec: ProblemSpec, dim: int, side: int, n: int) -> np.ndarray:
    nrm = np.zeros((n, spec.D))
    nrm[:, dim] = 1.0 if side == 1 else -1.0
    return nrm


def _allocate(total: int, units: int) -> list[int]:
    """Split a point budget across equal-weight units, largest remainder."""
    if units == 0:
        return []
    base, rem = divmod(total, units)
    return [base + (1 if i < rem else 0) for i in range(units)]


def _boundary_units(spec: ProblemSpec) -> list[tuple[int, tuple | None]]:
    """(condition index, face or None) sampling units in canonical order."""
    units = []
    for ci, cond in enumerate(spec.boundary):
        if cond.kind == "periodic":
            units.append((ci, (cond.face[0], 0)))
        elif cond.face is not None:
            units.append((ci, tuple(cond.face)))
        elif spec.domain.kind == "disk":
            units.append((ci, None))
        else:
            for f in _box_faces(spec):
                units.append((ci, f))
    return units


def sample(spec: ProblemSpec, hyper: Hyper, rng: np.random.Generator) -> CollocationSet:
    """Draw every collocation block for one run.

    One-dimensional problems place exactly one point per boundary face
    (a face is a single point there), ignoring the boundary budget.
    """
    D = spec.D
    zero = _zero_alpha(D)

    bulk_alphas, n_res_rows, uses_delay = _trace_residual(spec)
    Xb = spec.domain.sample_interior(hyper.n_bulk, rng)
    bulk = BulkBlock(X=Xb, indices=bulk_alphas, n_entries_per_point=n_res_rows)
    if uses_delay:
        h = spec.history
        X_shift = Xb.copy()
        X_shift[:, 0] -= h.delay
        t0 = spec.domain.extents_array()[0, 0]
        keep = (X_shift[:, 0] >= t0).astype(float)
        hist = np.asarray(h.fn(X_shift[:, 0]), dtype=float)
        bulk.X_shift = X_shift
        bulk.keep = keep
        bulk.hist_blend = hist * (1.0 - keep)

    initial = None
    if spec.initial:
        if spec.domain.kind != "box":
            raise NotImplementedError("initial conditions on non-box domains")
        if not spec.time_dependent:
            raise ValueError("initial conditions require a time coordinate")
        Xi = _face_points(spec, 0, 0, hyper.n_initial, rng)
        alphas: set = set()
        terms = []
        entries = 0
        for cond in spec.initial:
            if cond.kind == "value":
                alphas.add(zero)
                k = len(cond.components)
            elif cond.kind == "velocity":
                alphas.add(_unit_alpha(D, 0))
                k = len(cond.components)
            else:
                al, k = _trace_evaluator(spec, cond.evaluator)
                alphas.update(al)
            terms.append(InitialTerm(cond, _normalize_target(cond.target, Xi, k)))
            entries += k
        initial = InitialBlock(
            X=Xi, indices=sorted(alphas), terms=terms, n_entries_per_point=entries
        )

    boundary: list[BoundaryBlock] = []
    units = _boundary_units(spec)
    if D == 1:
        counts = [1] * len(units)
    else:
        counts = _allocate(hyper.n_boundary, len(units))
    ext = spec.domain.extents_array()
    for (ci, face), n_pts in zip(units, counts):
        cond = spec.boundary[ci]
        if n_pts == 0:
            continue
        X2 = normal = None
        if face is None:  # disk rim
            X, normal = spec.domain.sample_rim(n_pts, rng)
        else:
            dim, side = face
            X = _face_points(spec, dim, side, n_pts, rng)
            normal = _face_normal(spec, dim, side, n_pts)
            if cond.kind == "periodic":
                X2 = X.copy()
                X2[:, dim] = ext[dim, 1]

        k = len(cond.components)
        if cond.kind == "dirichlet":
            alphas = [zero]
            entries = k
        elif cond.kind == "neumann":
            dims = [j for j in range(D) if np.any(normal[:, j] != 0.0)]
            alphas = [_unit_alpha(D, j) for j in dims]
            entries = k
        elif cond.kind == "robin":
            dims = [j for j in range(D) if np.any(normal[:, j] != 0.0)]
            alphas = [zero] + [_unit_alpha(D, j) for j in dims]
            entries = k
        elif cond.kind == "periodic":
            alphas = [zero]
            entries = k
            if cond.match_normal_derivative:
                alphas.append(_unit_alpha(D, face[0]))
                entries *= 2
        else:  # custom
            alphas, entries = _trace_evaluator(spec, cond.evaluator)

        tv = None
        if cond.kind != "periodic":
            tk = entries if cond.kind == "custom" else k
            tv = _normalize_target(cond.target, X, tk)
        boundary.append(BoundaryBlock(
            cond=cond, X=X, indices=list(alphas),
            n_entries_per_point=entries, X2=X2, normal=normal, target_vals=tv,
        ))

    return CollocationSet(spec=spec, bulk=bulk, initial=initial, boundary=boundary)


# ---------------------------------------------------------------------------
# JSON problem definitions
# ---------------------------------------------------------------------------
#
# A problem file is a JSON object:
#
#   {
#     "name": "my-problem",
#     "outputs": 1,
#     "time_dependent": true,
#     "domain": {"kind": "box", "extents": [[0, 1], [0, 1]]},
#     "residual": ["sub", ["u", 0, [1, 0]], ["u", 0, [0, 2]]],
#     "initial": [
#       {"kind": "value", "components": [0],
#        "target": ["sin", ["mul", ["const", 3.141592653589793], ["coord", 1]]]}
#     ],
#     "boundary": [{"kind": "dirichlet", "target": ["const", 0]}],
#     "hyper": {"neurons": 10, "n_bulk": 1000, "n_initial": 200,
#               "n_boundary": 200, "alpha_initial": 10.0,
#               "alpha_boundary": 1.0, "adam_epochs": 210}
#   }
#
# Expressions are prefix lists.  Leaves: ["const", v], ["coord", j],
# ["u", l, [m_0, ..., m_{D-1}]], ["u_delayed", l].  Operators: add, sub, mul,
# div, neg, pow (constant exponent), sin, cos, exp, log, sqrt, tanh.
# "residual" may be one expression or a list of them.  A file of the form
# {"catalog": "C.4", "hyper": {...}} copies a built-in case, overriding any
# hyperparameters given; "residual": {"catalog": "C.4"} borrows just that
# case's residual.

_BINARY_OPS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
}
_UNARY_OPS = {
    "neg": lambda a: -a,
    "sin": tape.sin,
    "cos": tape.cos,
    "exp": tape.exp,
    "log": tape.log,
    "sqrt": tape.sqrt,
    "tanh": tape.tanh,
}


def compile_expr(node, *, with_fields: bool):
    """Compile a prefix-list expression into fn(u, X) (or fn(X) for targets)."""
    if not isinstance(node, (list, tuple)) or not node:
        raise ValueError(f"malformed expression node: {node!r}")
    op = node[0]
    if op == "const":
        v = float(node[1])
        return lambda u, X: v
    if op == "coord":
        j = int(node[1])
        return lambda u, X: X[:, j]
    if op == "u":
        if not with_fields:
            raise ValueError("field references are not allowed in target expressions")
        l = int(node[1])
        alpha = tuple(int(m) for m in node[2])
        if all(m == 0 for m in alpha):
            return lambda u, X: u.val(l)
        return lambda u, X: u.d(l, *alpha)
    if op == "u_delayed":
        if not with_fields:
            raise ValueError("field references are not allowed in target expressions")
        l = int(node[1])
        return lambda u, X: u.delayed(l)
    if op in _BINARY_OPS:
        fa = compile_expr(node[1], with_fields=with_fields)
        fb = compile_expr(node[2], with_fields=with_fields)
        f = _BINARY_OPS[op]
        return lambda u, X: f(fa(u, X), fb(u, X))
    if op == "pow":
        fa = compile_expr(node[1], with_fields=with_fields)
        p = float(node[2][1]) if isinstance(node[2], (list, tuple)) else float(node[2])
        return lambda u, X: fa(u, X) ** p
    if op in _UNARY_OPS:
        fa = compile_expr(node[1], with_fields=with_fields)
        f = _UNARY_OPS[op]
        return lambda u, X: f(fa(u, X))
    raise ValueError(f"unknown expression operator {op!r}")


def _compile_target(node):
    if node is None:
        return None
    fn = compile_expr(node, with_fields=False)
    return lambda X: np.broadcast_to(
        np.asarray(fn(None, X), dtype=float), (X.shape[0],)
    ).copy()


def _compile_residual(node, catalog_lookup):
    if isinstance(node, dict):
        if "catalog" not in node or catalog_lookup is None:
            raise ValueError("residual dict must be a {'catalog': id} reference")
        return catalog_lookup(node["catalog"]).spec.residual
    if isinstance(node, list) and node and isinstance(node[0], (list, tuple)):
        fns = [compile_expr(n, with_fields=True) for n in node]
        return lambda u, X: [f(u, X) for f in fns]
    return compile_expr(node, with_fields=True)


def problem_from_json(doc: dict, catalog_lookup=None):
    """Build (ProblemSpec, Hyper) from a parsed JSON problem document.

    ``catalog_lookup`` maps a case id to a catalog entry (injected by the CLI
    to avoid an import cycle); it enables the {"catalog": ...} shorthands.
    """
    if "catalog" in doc:
        if catalog_lookup is None:
            raise ValueError("catalog references need a catalog lookup")
        case = catalog_lookup(doc["catalog"])
        hyper = case.hyper
        if "hyper" in doc:
            merged = hyper.as_dict()
            merged.update(doc["hyper"])
            hyper = Hyper.from_dict(merged)
        return case.spec, hyper

    dom = doc["domain"]
    domain = (
        unit_disk() if dom["kind"] == "disk" else box(*dom["extents"])
    )
    initial = []
    for c in doc.get("initial", []):
        initial.append(InitialCondition(
            kind=c["kind"],
            target=_compile_target(c.get("target")),
            components=tuple(c.get("components", (0,))),
            evaluator=(
                _compile_residual(c["evaluator"], catalog_lookup)
                if "evaluator" in c else None
            ),
        ))
    boundary = []
    for c in doc.get("boundary", []):
        boundary.append(BoundaryCondition(
            kind=c["kind"],
            face=tuple(c["face"]) if c.get("face") is not None else None,
            target=_compile_target(c.get("target")),
            components=tuple(c.get("components", (0,))),
            robin_value_coeff=float(c.get("robin_value_coeff", 1.0)),
            robin_normal_coeff=float(c.get("robin_normal_coeff", 1.0)),
            match_normal_derivative=bool(c.get("match_normal_derivative", False)),
            evaluator=(
                _compile_residual(c["evaluator"], catalog_lookup)
                if "evaluator" in c else None
            ),
        ))
    history = None
    if "history" in doc:
        hfn = _compile_target(doc["history"]["fn"])
        history = History(
            delay=float(doc["history"]["delay"]),
            fn=lambda t: hfn(np.asarray(t)[:, None]),
        )
    spec = ProblemSpec(
        name=doc.get("name", "problem"),
        domain=domain,
        residual=_compile_residual(doc["residual"], catalog_lookup),
        n_outputs=int(doc.get("outputs", 1)),
        initial=initial,
        boundary=boundary,
        history=history,
        time_dependent=bool(doc.get("time_dependent", True)),
        description=doc.get("description", ""),
    )
    hyper = Hyper.from_dict(doc["hyper"])
    return spec, hyper
