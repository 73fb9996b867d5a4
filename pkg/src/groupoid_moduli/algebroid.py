"""Numerical checks for Lie algebroids in local coordinates.

Index conventions (arrays are indexed in this order):

* ``rho[mu, A]``  anchor, ``rho(e^A) = rho^{mu A} d_mu``
* ``f[A, B, C]``  structure functions, ``{e^A, e^B} = f^{AB}_C e^C``
* ``j[A, alpha]`` the worldsheet one-form ``j_A = j_{A alpha} du^alpha``

Derivatives in the base are central differences with step ``h``; fields are
vectorised callables ``points (n, dim_M) -> (n, ...)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .expr import parse, point_env

Field = Callable[[np.ndarray], np.ndarray]

DEFAULT_H = 1e-4
DEFAULT_TOL = 1e-6


def _as_points(points, dim: int) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, dim) if dim else pts.reshape(len(pts), 0)
    if pts.shape[1] != dim:
        raise ValueError(f"points have dimension {pts.shape[1]}, expected {dim}")
    return pts


def _expr_field(exprs, shape: tuple[int, ...], dim: int) -> tuple[Field, list]:
    """Vectorised callable from a nested list of expressions of ``x0..``."""
    parsed = np.empty(shape, dtype=object)
    flat = np.asarray(exprs, dtype=object)
    if flat.shape != shape:
        raise ValueError(f"expression array has shape {flat.shape}, expected {shape}")
    for idx in np.ndindex(*shape):
        e = parse(flat[idx])
        bad = sorted(n for n in e.names if not (n.startswith("x") and int(n[1:]) < dim))
        if bad:
            raise ValueError(f"expression {e.source!r} uses {bad}; only x0..x{dim - 1} are bound")
        parsed[idx] = e

    def evaluate(points: np.ndarray) -> np.ndarray:
        pts = _as_points(points, dim)
        env = point_env(pts) if dim else {}
        out = np.empty((len(pts),) + shape)
        for idx in np.ndindex(*shape):
            out[(slice(None),) + idx] = parsed[idx](env, (len(pts),))
        return out

    return evaluate, flat.tolist()


def _const_field(value: np.ndarray) -> Field:
    value = np.asarray(value, dtype=float)

    def evaluate(points: np.ndarray) -> np.ndarray:
        n = np.asarray(points).shape[0]
        return np.broadcast_to(value, (n,) + value.shape).copy()

    return evaluate


@dataclass
class AlgebroidData:
    dim_M: int
    rank_E: int
    rho: Field
    f: Field
    source: dict | None = field(default=None, repr=False)

    def anchor(self, points) -> np.ndarray:
        pts = _as_points(points, self.dim_M)
        out = np.asarray(self.rho(pts), dtype=float)
        if out.shape != (len(pts), self.dim_M, self.rank_E):
            raise ValueError(f"anchor has shape {out.shape[1:]}, expected {(self.dim_M, self.rank_E)}")
        return out

    def structure(self, points) -> np.ndarray:
        pts = _as_points(points, self.dim_M)
        out = np.asarray(self.f(pts), dtype=float)
        r = self.rank_E
        if out.shape != (len(pts), r, r, r):
            raise ValueError(f"structure functions have shape {out.shape[1:]}, expected {(r, r, r)}")
        return out

    @classmethod
    def from_expressions(cls, dim_M: int, rank_E: int, rho, f) -> "AlgebroidData":
        rho_fn, rho_src = _expr_field(rho, (dim_M, rank_E), dim_M) if dim_M else (_const_field(np.zeros((0, rank_E))), [])
        f_fn, f_src = _expr_field(f, (rank_E,) * 3, dim_M)
        return cls(dim_M, rank_E, rho_fn, f_fn, {"dim_M": dim_M, "rank_E": rank_E, "rho": rho_src, "f": f_src})

    def to_json(self) -> dict:
        return self.source if self.source is not None else {"dim_M": self.dim_M, "rank_E": self.rank_E}


@dataclass
class PoissonData:
    dim_M: int
    alpha: Field
    source: dict | None = field(default=None, repr=False)

    def bivector(self, points) -> np.ndarray:
        pts = _as_points(points, self.dim_M)
        out = np.asarray(self.alpha(pts), dtype=float)
        if out.shape != (len(pts), self.dim_M, self.dim_M):
            raise ValueError(f"bivector has shape {out.shape[1:]}, expected {(self.dim_M, self.dim_M)}")
        return out

    @classmethod
    def from_expressions(cls, dim_M: int, alpha) -> "PoissonData":
        fn, src = _expr_field(alpha, (dim_M, dim_M), dim_M)
        return cls(dim_M, fn, {"dim_M": dim_M, "alpha": src})

    def to_json(self) -> dict:
        return self.source if self.source is not None else {"dim_M": self.dim_M}


# -- standard examples ---------------------------------------------------------


def levi_civita() -> np.ndarray:
    eps = np.zeros((3, 3, 3))
    for (a, b, c), s in {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1, (0, 2, 1): -1, (2, 1, 0): -1, (1, 0, 2): -1}.items():
        eps[a, b, c] = s
    return eps


def so3_constants() -> np.ndarray:
    return levi_civita()


def lie_algebra(constants, dim_M: int = 0) -> AlgebroidData:
    """Constant structure functions and zero anchor over ``R^dim_M``."""
    c = np.asarray(constants, dtype=float)
    r = c.shape[0]
    rho = np.zeros((dim_M, r))
    return AlgebroidData(
        dim_M, r, _const_field(rho), _const_field(c),
        {"dim_M": dim_M, "rank_E": r, "rho": rho.tolist(), "f": c.tolist()},
    )


def tangent(dim: int) -> AlgebroidData:
    """``TR^dim``: identity anchor, vanishing bracket of coordinate fields."""
    rho = np.eye(dim)
    f = np.zeros((dim,) * 3)
    return AlgebroidData(dim, dim, _const_field(rho), _const_field(f),
                         {"dim_M": dim, "rank_E": dim, "rho": rho.tolist(), "f": f.tolist()})


def lie_poisson_so3() -> PoissonData:
    """``alpha^{mu nu} = eps^{mu nu lam} x_lam`` on ``so(3)* = R^3``."""
    eps = levi_civita()
    alpha = [[" + ".join(f"{int(eps[m, n, l])}*x{l}" for l in range(3) if eps[m, n, l]) or "0"
              for n in range(3)] for m in range(3)]
    return PoissonData.from_expressions(3, alpha)


def broken_so3() -> AlgebroidData:
    """The Lie-Poisson algebroid of ``so(3)*`` with ``f^{12}_3, f^{21}_3`` negated.

    The anchor is kept: with zero anchor the flipped constants still define a
    Lie algebra (``so(2,1)``), so the anchor is what makes the data fail.
    """
    a = poisson_to_algebroid(lie_poisson_so3())
    f = so3_constants()
    f[0, 1, 2] = -f[0, 1, 2]
    f[1, 0, 2] = -f[1, 0, 2]
    rho_src = [[a.source["rho"][m][A] for A in range(3)] for m in range(3)]
    return AlgebroidData.from_expressions(3, 3, rho_src, f.tolist())


def sample_ball(n: int, dim: int, seed: int = 0, radius: float = 1.0) -> np.ndarray:
    """``n`` uniform points in the closed ball of ``R^dim``."""
    rng = np.random.default_rng(seed)
    if dim == 0:
        return np.zeros((n, 0))
    g = rng.standard_normal((n, dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = rng.random(n) ** (1.0 / dim)
    return radius * g * r[:, None]


# -- derivatives ---------------------------------------------------------------


def _gradient(fn: Field, pts: np.ndarray, h: float) -> np.ndarray:
    """``out[n, nu, ...] = d_nu fn`` by central differences."""
    d = pts.shape[1]
    cols = []
    for nu in range(d):
        step = np.zeros(d)
        step[nu] = h
        cols.append((np.asarray(fn(pts + step)) - np.asarray(fn(pts - step))) / (2 * h))
    if not cols:
        return np.zeros((len(pts), 0) + np.asarray(fn(pts)).shape[1:])
    return np.stack(cols, axis=1)


# -- axioms --------------------------------------------------------------------


@dataclass
class AxiomReport:
    anchor_residual: float
    jacobi_residual: float
    tol: float
    h: float
    n_points: int
    worst_point: list[float]
    symmetry_residual: float

    @property
    def max_residual(self) -> float:
        return max(self.anchor_residual, self.jacobi_residual, self.symmetry_residual)

    @property
    def ok(self) -> bool:
        return self.max_residual <= self.tol

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "anchor_residual": self.anchor_residual,
            "jacobi_residual": self.jacobi_residual,
            "antisymmetry_residual": self.symmetry_residual,
            "max_residual": self.max_residual,
            "tol": self.tol,
            "h": self.h,
            "n_points": self.n_points,
            "worst_point": self.worst_point,
        }


def axiom_residuals(a: AlgebroidData, points, h: float = DEFAULT_H) -> tuple[np.ndarray, np.ndarray]:
    """Per-point residual tensors of the two compatibility equations.

    ``E1[n, mu, A, B] = rho^{nu A} d_nu rho^{mu B} - rho^{nu B} d_nu rho^{mu A} - f^{AB}_C rho^{mu C}``

    ``E2[n, D, A, B, C]`` is the antisymmetrisation over ``(D, A, B)`` of
    ``rho^{mu D} d_mu f^{AB}_C + f^{AB}_L f^{DL}_C``, normalised as the
    signed sum over the six permutations divided by six.
    """
    pts = _as_points(points, a.dim_M)
    rho = a.anchor(pts)
    f = a.structure(pts)
    drho = _gradient(a.anchor, pts, h)  # [n, nu, mu, A]
    df = _gradient(a.structure, pts, h)  # [n, mu, A, B, C]
    lhs = np.einsum("nvA,nvmB->nmAB", rho, drho)
    e1 = lhs - lhs.transpose(0, 1, 3, 2) - np.einsum("nABC,nmC->nmAB", f, rho)
    t = np.einsum("nmD,nmABC->nDABC", rho, df) + np.einsum("nABL,nDLC->nDABC", f, f)
    e2 = (
        t
        - t.transpose(0, 2, 1, 3, 4)  # swap D,A
        - t.transpose(0, 3, 2, 1, 4)  # swap D,B
        - t.transpose(0, 1, 3, 2, 4)  # swap A,B
        + t.transpose(0, 2, 3, 1, 4)  # cyclic
        + t.transpose(0, 3, 1, 2, 4)  # cyclic
    ) / 6.0
    return e1, e2


def check_axioms(a: AlgebroidData, points, h: float = DEFAULT_H, tol: float = DEFAULT_TOL) -> AxiomReport:
    pts = _as_points(points, a.dim_M)
    e1, e2 = axiom_residuals(a, pts, h)
    f = a.structure(pts)
    per1 = np.abs(e1).reshape(len(pts), -1).max(axis=1, initial=0.0)
    per2 = np.abs(e2).reshape(len(pts), -1).max(axis=1, initial=0.0)
    sym = float(np.abs(f + f.transpose(0, 2, 1, 3)).max(initial=0.0))
    per = np.maximum(per1, per2)
    worst = int(np.argmax(per)) if len(per) else 0
    return AxiomReport(
        anchor_residual=float(per1.max(initial=0.0)),
        jacobi_residual=float(per2.max(initial=0.0)),
        tol=tol,
        h=h,
        n_points=len(pts),
        worst_point=pts[worst].tolist() if len(pts) else [],
        symmetry_residual=sym,
    )


def poisson_to_algebroid(p: PoissonData, h: float = DEFAULT_H) -> AlgebroidData:
    """Cotangent algebroid of a Poisson manifold.

    The anchor contracts the first slot, ``rho^{mu A} = alpha^{A mu}``, and
    ``f^{AB}_C = d_C alpha^{AB}`` is taken by central differences.
    """
    dim = p.dim_M

    def rho(points):
        return p.bivector(points).transpose(0, 2, 1)

    def f(points):
        pts = _as_points(points, dim)
        return _gradient(p.bivector, pts, h).transpose(0, 2, 3, 1)

    src = None
    if p.source is not None:
        alpha = p.source["alpha"]
        src = {"dim_M": dim, "rank_E": dim, "rho": [[alpha[A][m] for A in range(dim)] for m in range(dim)],
               "f": "central differences of alpha"}
    return AlgebroidData(dim, dim, rho, f, src)


# -- Poisson tensors -----------------------------------------------------------


@dataclass
class JacobiReport:
    residual: float
    antisymmetry: float
    tol: float
    h: float
    n_points: int
    dimension: int

    @property
    def ok(self) -> bool:
        return max(self.residual, self.antisymmetry) <= self.tol

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "jacobi_residual": self.residual,
            "antisymmetry_residual": self.antisymmetry,
            "tol": self.tol,
            "h": self.h,
            "n_points": self.n_points,
            "dimension": self.dimension,
        }


def jacobi_tensor(pi: Field, points: np.ndarray, h: float = DEFAULT_H) -> np.ndarray:
    """``J^{ijk} = pi^{li} d_l pi^{jk} + pi^{lj} d_l pi^{ki} + pi^{lk} d_l pi^{ij}``."""
    p = np.asarray(pi(points))
    dp = _gradient(pi, points, h)  # [n, l, j, k]
    t = np.einsum("nli,nljk->nijk", p, dp)
    return t + t.transpose(0, 2, 3, 1) + t.transpose(0, 3, 1, 2)


def jacobi_residual(p: PoissonData, points, h: float = DEFAULT_H, tol: float = DEFAULT_TOL) -> JacobiReport:
    pts = _as_points(points, p.dim_M)
    vals = p.bivector(pts)
    jac = jacobi_tensor(p.bivector, pts, h)
    return JacobiReport(
        residual=float(np.abs(jac).max(initial=0.0)),
        antisymmetry=float(np.abs(vals + vals.transpose(0, 2, 1)).max(initial=0.0)),
        tol=tol,
        h=h,
        n_points=len(pts),
        dimension=p.dim_M,
    )


def dual_poisson(a: AlgebroidData) -> PoissonData:
    """Fiberwise-linear Poisson tensor on ``E*`` in coordinates ``(X, lambda)``.

    ``pi^{lambda_A lambda_B} = f^{AB}_C lambda_C`` and
    ``pi^{lambda_A X^mu} = -pi^{X^mu lambda_A} = rho^{mu A}``; the ``XX``
    block vanishes.
    """
    d, r = a.dim_M, a.rank_E

    def alpha(points):
        pts = _as_points(points, d + r)
        x, lam = pts[:, :d], pts[:, d:]
        out = np.zeros((len(pts), d + r, d + r))
        rho = a.anchor(x)
        out[:, d:, d:] = np.einsum("nABC,nC->nAB", a.structure(x), lam)
        out[:, d:, :d] = rho.transpose(0, 2, 1)
        out[:, :d, d:] = -rho
        return out

    src = {"dim_M": d + r, "coordinates": [f"X{i}" for i in range(d)] + [f"lambda{A}" for A in range(r)]}
    return PoissonData(d + r, alpha, src)


# -- subalgebroids -------------------------------------------------------------


@dataclass(frozen=True)
class SubalgebroidChart:
    """Tangent (``tilde``) and transverse (``hat``) base coordinates, sub-fiber
    (``a``) and complementary (``n``) fiber indices."""

    tangent: tuple[int, ...]
    transverse: tuple[int, ...]
    sub_fiber: tuple[int, ...]
    normal_fiber: tuple[int, ...]

    def validate(self, dim_M: int, rank_E: int) -> None:
        if sorted(self.tangent + self.transverse) != list(range(dim_M)):
            raise ValueError("tangent and transverse indices must partition the base coordinates")
        if sorted(self.sub_fiber + self.normal_fiber) != list(range(rank_E)):
            raise ValueError("sub and normal fiber indices must partition the fiber basis")


@dataclass
class SubalgebroidReport:
    anchor_residual: float
    bracket_residual: float
    tol: float
    n_points: int

    @property
    def ok(self) -> bool:
        return max(self.anchor_residual, self.bracket_residual) <= self.tol

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "anchor_residual": self.anchor_residual,
            "bracket_residual": self.bracket_residual,
            "tol": self.tol,
            "n_points": self.n_points,
        }


def subalgebroid_check(a: AlgebroidData, chart: SubalgebroidChart, points, tol: float = DEFAULT_TOL) -> SubalgebroidReport:
    """Max of ``|rho^{hat mu, a}|`` and ``|f^{ab}_n|`` on points of the submanifold."""
    chart.validate(a.dim_M, a.rank_E)
    pts = _as_points(points, a.dim_M)
    if chart.transverse and np.abs(pts[:, list(chart.transverse)]).max(initial=0.0) > 0:
        raise ValueError("sample points must have vanishing transverse coordinates")
    rho = a.anchor(pts)[:, list(chart.transverse)][:, :, list(chart.sub_fiber)]
    f = a.structure(pts)[:, list(chart.sub_fiber)][:, :, list(chart.sub_fiber)][:, :, :, list(chart.normal_fiber)]
    return SubalgebroidReport(
        anchor_residual=float(np.abs(rho).max(initial=0.0)),
        bracket_residual=float(np.abs(f).max(initial=0.0)),
        tol=tol,
        n_points=len(pts),
    )


# -- worldsheet fields ---------------------------------------------------------


@dataclass
class MorphismField:
    """Sampled ``(X, j)`` on a rectangular chart grid.

    ``X`` has shape ``(n1, n2, dim_M)`` and ``j`` has shape ``(n1, n2, rank_E, 2)``.
    """

    h: tuple[float, float]
    X: np.ndarray
    j: np.ndarray
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.j = np.asarray(self.j, dtype=float)
        if self.X.ndim != 3 or self.j.ndim != 4 or self.j.shape[-1] != 2:
            raise ValueError("X must be (n1, n2, dim_M) and j must be (n1, n2, rank_E, 2)")
        if self.X.shape[:2] != self.j.shape[:2]:
            raise ValueError("X and j live on different grids")
        if min(self.h) <= 0:
            raise ValueError("grid spacing must be positive")
        if not (np.all(np.isfinite(self.X)) and np.all(np.isfinite(self.j))):
            raise ValueError("field values must be finite")

    @property
    def shape(self) -> tuple[int, int]:
        return self.X.shape[0], self.X.shape[1]

    def coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        n1, n2 = self.shape
        u0 = self.origin[0] + self.h[0] * np.arange(n1)
        u1 = self.origin[1] + self.h[1] * np.arange(n2)
        return np.meshgrid(u0, u1, indexing="ij")

    @classmethod
    def from_expressions(cls, shape, h, X: Sequence, j: Sequence, origin=(0.0, 0.0)) -> "MorphismField":
        hh = (float(h), float(h)) if np.isscalar(h) else (float(h[0]), float(h[1]))
        n1, n2 = int(shape[0]), int(shape[1])
        u0 = origin[0] + hh[0] * np.arange(n1)
        u1 = origin[1] + hh[1] * np.arange(n2)
        U0, U1 = np.meshgrid(u0, u1, indexing="ij")
        env = {"u0": U0, "u1": U1}
        Xv = np.stack([_grid_expr(e, env, (n1, n2)) for e in X], axis=-1) if len(X) else np.zeros((n1, n2, 0))
        jv = np.array([[_grid_expr(e, env, (n1, n2)) for e in row] for row in j]).reshape(len(j), 2, n1, n2)
        return cls(hh, Xv, jv.transpose(2, 3, 0, 1), (float(origin[0]), float(origin[1])))


def _grid_expr(source, env, shape) -> np.ndarray:
    e = parse(source)
    bad = sorted(n for n in e.names if n not in ("u0", "u1"))
    if bad:
        raise ValueError(f"grid expression {e.source!r} uses {bad}; only u0, u1 are bound")
    return e(env, shape)


def grid_expressions(shape, h, exprs: Sequence, origin=(0.0, 0.0)) -> np.ndarray:
    """Evaluate a list of ``u0, u1`` expressions on a grid, stacked last."""
    hh = (float(h), float(h)) if np.isscalar(h) else (float(h[0]), float(h[1]))
    n1, n2 = int(shape[0]), int(shape[1])
    U0, U1 = np.meshgrid(origin[0] + hh[0] * np.arange(n1), origin[1] + hh[1] * np.arange(n2), indexing="ij")
    env = {"u0": U0, "u1": U1}
    if not len(exprs):
        return np.zeros((n1, n2, 0))
    return np.stack([_grid_expr(e, env, (n1, n2)) for e in exprs], axis=-1)


@dataclass
class MorphismReport:
    bracket_residual: float
    anchor_residual: float
    tol: float
    interior_nodes: int
    bracket_field: np.ndarray = field(repr=False)
    anchor_field: np.ndarray = field(repr=False)

    @property
    def max_residual(self) -> float:
        return max(self.bracket_residual, self.anchor_residual)

    @property
    def ok(self) -> bool:
        return self.max_residual <= self.tol

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "bracket_residual": self.bracket_residual,
            "anchor_residual": self.anchor_residual,
            "max_residual": self.max_residual,
            "tol": self.tol,
            "interior_nodes": self.interior_nodes,
        }


def _check_dims(a: AlgebroidData, m: MorphismField) -> None:
    if m.X.shape[2] != a.dim_M or m.j.shape[2] != a.rank_E:
        raise ValueError(
            f"field has dim_M={m.X.shape[2]}, rank_E={m.j.shape[2]}; algebroid has {a.dim_M}, {a.rank_E}"
        )


def morphism_residual(a: AlgebroidData, m: MorphismField, tol: float = DEFAULT_TOL) -> MorphismReport:
    """Residuals of the two morphism equations at interior nodes.

    ``R_A = d_1 j_{A2} - d_2 j_{A1} + f^{BC}_A(X) j_{B1} j_{C2}`` and
    ``R^mu_alpha = d_alpha X^mu - rho^{mu A}(X) j_{A alpha}``.
    """
    _check_dims(a, m)
    n1, n2 = m.shape
    if n1 < 3 or n2 < 3:
        raise ValueError("grid needs at least 3 nodes in each direction")
    h1, h2 = m.h
    j = m.j
    X = m.X
    inner = (slice(1, -1), slice(1, -1))
    d1j2 = (j[2:, 1:-1, :, 1] - j[:-2, 1:-1, :, 1]) / (2 * h1)
    d2j1 = (j[1:-1, 2:, :, 0] - j[1:-1, :-2, :, 0]) / (2 * h2)
    d1X = (X[2:, 1:-1] - X[:-2, 1:-1]) / (2 * h1)
    d2X = (X[1:-1, 2:] - X[1:-1, :-2]) / (2 * h2)
    n_in = (n1 - 2) * (n2 - 2)
    Xi = X[inner].reshape(n_in, a.dim_M)
    ji = j[inner].reshape(n_in, a.rank_E, 2)
    f = a.structure(Xi)
    rho = a.anchor(Xi)
    quad = np.einsum("nBCA,nB,nC->nA", f, ji[:, :, 0], ji[:, :, 1])
    bracket = (d1j2 - d2j1).reshape(n_in, a.rank_E) + quad
    dX = np.stack([d1X, d2X], axis=-1).reshape(n_in, a.dim_M, 2)
    anchor = dX - np.einsum("nmA,nAa->nma", rho, ji)
    shape = (n1 - 2, n2 - 2)
    return MorphismReport(
        bracket_residual=float(np.abs(bracket).max(initial=0.0)),
        anchor_residual=float(np.abs(anchor).max(initial=0.0)),
        tol=tol,
        interior_nodes=shape[0] * shape[1],
        bracket_field=bracket.reshape(shape + (a.rank_E,)),
        anchor_field=anchor.reshape(shape + (a.dim_M, 2)),
    )


def infinitesimal_gauge(a: AlgebroidData, m: MorphismField, beta, epsilon: float) -> MorphismField:
    """``m + epsilon * delta m`` with

    ``delta j_A = -d beta_A - f^{BC}_A(X) j_B beta_C`` and
    ``delta X^mu = -rho^{mu A}(X) beta_A``; ``d beta`` uses second-order
    differences (central in the interior).
    """
    _check_dims(a, m)
    beta = np.asarray(beta, dtype=float)
    n1, n2 = m.shape
    if beta.shape != (n1, n2, a.rank_E):
        raise ValueError(f"beta has shape {beta.shape}, expected {(n1, n2, a.rank_E)}")
    if n1 < 3 or n2 < 3:
        raise ValueError("grid needs at least 3 nodes in each direction")
    dbeta = np.stack(
        [np.gradient(beta, m.h[0], axis=0, edge_order=2), np.gradient(beta, m.h[1], axis=1, edge_order=2)],
        axis=-1,
    )
    Xf = m.X.reshape(n1 * n2, a.dim_M)
    f = a.structure(Xf).reshape(n1, n2, a.rank_E, a.rank_E, a.rank_E)
    rho = a.anchor(Xf).reshape(n1, n2, a.dim_M, a.rank_E)
    dj = -dbeta - np.einsum("xyBCA,xyBa,xyC->xyAa", f, m.j, beta)
    dX = -np.einsum("xymA,xyA->xym", rho, beta)
    return MorphismField(m.h, m.X + epsilon * dX, m.j + epsilon * dj, m.origin)


# -- convergence studies -------------------------------------------------------


def fitted_order(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    x = np.log(np.asarray(xs, dtype=float))
    y = np.log(np.asarray(ys, dtype=float))
    if len(x) < 2 or not np.all(np.isfinite(y)):
        return float("nan")
    return float(np.polyfit(x, y, 1)[0])


@dataclass
class OrderStudy:
    parameter: str
    values: list[float]
    residuals: list[float]
    order: float
    window: tuple[float, float] = (1.8, 2.2)

    @property
    def ok(self) -> bool:
        return self.window[0] <= self.order <= self.window[1]

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "parameter": self.parameter,
            "values": self.values,
            "residuals": self.residuals,
            "fitted_order": self.order,
            "window": list(self.window),
        }


def refinement_study(
    a: AlgebroidData,
    make_field: Callable[[float], MorphismField],
    hs: Sequence[float],
    window: tuple[float, float] = (1.8, 2.2),
) -> OrderStudy:
    """Max morphism residual of ``make_field(h)`` for each ``h`` and its fitted order."""
    res = [morphism_residual(a, make_field(h)).max_residual for h in hs]
    return OrderStudy("h", [float(h) for h in hs], res, fitted_order(hs, res), window)


def gauge_order_study(
    a: AlgebroidData,
    m: MorphismField,
    beta,
    epsilons: Sequence[float],
    window: tuple[float, float] = (1.8, 2.2),
) -> OrderStudy:
    """Growth of ``residual(eps) - residual(0)`` under the infinitesimal gauge flow."""
    r0 = morphism_residual(a, m).max_residual
    diffs = [abs(morphism_residual(a, infinitesimal_gauge(a, m, beta, e)).max_residual - r0) for e in epsilons]
    return OrderStudy("epsilon", [float(e) for e in epsilons], diffs, fitted_order(epsilons, diffs), window)


def abelian_exact_field(h: float, dphi=("cos(u0)*cos(2*u1)", "-2*sin(u0)*sin(2*u1)"), extent: float = 1.0) -> MorphismField:
    """``j = d phi`` for ``phi = sin(u0) cos(2 u1)``, sampled on ``[0, extent]^2`` over a point base."""
    n = int(round(extent / h)) + 1
    return MorphismField.from_expressions((n, n), h, [], [list(dphi)])


def lie_algebra_point(rank: int = 1) -> AlgebroidData:
    return lie_algebra(np.zeros((rank,) * 3), 0)
