"""Closest singular poses under four distance notions.

All solvers return a ``PedalSet``: the real stationary points of the squared
distance restricted to the singularity variety, sorted by distance.

* fixed orientation: translation length, exact degree-6 multiplier polynomial
* fixed position: spherical angle, exact resultant elimination to a
  univariate in ``w``
* general: the anchor-point metric on all six coordinates, multistart Newton
* equiform: as general with the unit-length side condition dropped
"""
from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .errors import (
    DegenerateCandidateWarning,
    DegenerateSpecializationError,
    NonGenericWarning,
    PolynomialError,
    SolverError,
)
from .pentapod import (
    Architecture,
    Configuration,
    SingularityModel,
    derivatives,
    orientation_quadric,
    position_cone,
)
from .polyalg import (
    MultiPoly,
    UniPoly,
    interpolate_uni,
    is_exact,
    sylvester_resultant,
    to_exact,
    uni_gcd,
    uni_roots,
)

MODES = ("fixed_orientation", "fixed_position", "general", "equiform")

DEDUP_TOL = 1e-7
RESIDUAL_TOL = 1e-10
# Below this relative gradient a candidate sits on the singular locus of F = 0,
# where the multiplier is unbounded and the KKT root is not regular.
GRADIENT_RATIO_TOL = 1e-7
IMAG_TOL = 1e-8


def working_precision() -> int:
    """Bits used when polishing univariate roots (``PENTAPOD_PRECISION``, default 256)."""
    raw = os.environ.get("PENTAPOD_PRECISION", "").strip()
    if not raw:
        return 256
    bits = int(raw)
    if bits < 53:
        raise ValueError("PENTAPOD_PRECISION must be at least 53 bits")
    return bits


# ---------------------------------------------------------------------------
# metric


@dataclass(frozen=True)
class MetricContext:
    """Mean offset and mean squared offset of the platform anchor points."""

    mean_r: float
    mean_r2: float

    @classmethod
    def from_architecture(cls, arch: Architecture) -> "MetricContext":
        r = arch.offsets_array()
        ctx = cls(float(r.mean()), float((r * r).mean()))
        if not ctx.mean_r2 > ctx.mean_r ** 2:
            raise ValueError("metric is degenerate: all offsets equal")
        return ctx

    def gram(self) -> np.ndarray:
        """6x6 matrix of the squared distance in (u, v, w, px, py, pz)."""
        I = np.eye(3)
        return np.block([[self.mean_r2 * I, self.mean_r * I], [self.mean_r * I, I]])

    def squared(self, c1: Configuration, c2: Configuration) -> float:
        di = np.asarray(c1.orientation, float) - np.asarray(c2.orientation, float)
        dp = np.asarray(c1.position, float) - np.asarray(c2.position, float)
        return float(dp @ dp + 2 * self.mean_r * (dp @ di) + self.mean_r2 * (di @ di))

    def distance(self, c1: Configuration, c2: Configuration) -> float:
        return math.sqrt(max(self.squared(c1, c2), 0.0))


def metric_d(arch: Architecture, c1: Configuration, c2: Configuration) -> float:
    """Root mean square displacement of the five platform anchor points."""
    R = arch.offsets_array()
    i1, p1 = np.asarray(c1.orientation, float), np.asarray(c1.position, float)
    i2, p2 = np.asarray(c2.orientation, float), np.asarray(c2.position, float)
    B1 = p1[None, :] + R[:, None] * i1[None, :]
    B2 = p2[None, :] + R[:, None] * i2[None, :]
    return float(math.sqrt(((B1 - B2) ** 2).sum() / 5))


def spherical_distance(i1: Sequence, i2: Sequence) -> float:
    """Angle in degrees between two directions."""
    a = np.asarray(i1, float)
    b = np.asarray(i2, float)
    c = float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))
    return math.degrees(math.acos(min(1.0, max(-1.0, c))))


# ---------------------------------------------------------------------------
# result types


@dataclass(frozen=True)
class PedalPoint:
    pose: Configuration
    distance: float
    residual: float
    lambda1: float | None = None
    lambda2: float | None = None
    mu: float | None = None
    is_real: bool = True

    def as_array(self) -> np.ndarray:
        return self.pose.as_array()


@dataclass
class PedalSet:
    mode: str
    points: list
    complex_count: int | None = None
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        self.points = sorted(self.points, key=lambda q: (q.distance, tuple(q.as_array())))

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, k):
        return self.points[k]

    @property
    def minimizer(self) -> PedalPoint:
        real = [q for q in self.points if q.is_real]
        if not real:
            raise SolverError("no real pedal point")
        return real[0]

    @property
    def distances(self) -> np.ndarray:
        return np.array([q.distance for q in self.points])


# ---------------------------------------------------------------------------
# KKT system shared by all modes


@dataclass
class KKTProblem:
    """Stationarity system of ``(z-t)^T W (z-t) + lambda_G G + lambda_F F``.

    ``free`` lists the pose coordinates that vary; the others stay at their
    ``target`` value.  Unknowns are ``(z_free, [lambda_G], lambda_F)``.
    """

    model: SingularityModel
    W: np.ndarray
    target: np.ndarray
    free: np.ndarray
    use_G: bool

    def __post_init__(self):
        self.W = np.asarray(self.W, float)
        self.target = np.asarray(self.target, float)
        self.free = np.asarray(self.free, dtype=np.int64)
        exps, coeffs = self.model.F.compile()
        self.exps = exps
        self.coeffs = coeffs
        self._abs = (exps, np.abs(coeffs))

    @property
    def size(self) -> int:
        return len(self.free) + (1 if self.use_G else 0) + 1

    def pose(self, x) -> np.ndarray:
        z = self.target.copy()
        z[self.free] = np.asarray(x, float)[: len(self.free)]
        return z

    def multipliers(self, x):
        """``(lambda_G, lambda_F)``; ``lambda_G`` is ``None`` when unused."""
        x = np.asarray(x, float)
        return (x[len(self.free)] if self.use_G else None), x[-1]

    def pack(self, z, lamG, lamF) -> np.ndarray:
        parts = [np.asarray(z, float)[self.free]]
        if self.use_G:
            parts.append([lamG])
        parts.append([lamF])
        return np.concatenate(parts)

    def lagrangian(self, x) -> float:
        z = self.pose(x)
        lamG, lamF = self.multipliers(x)
        d = z - self.target
        val = float(d @ self.W @ d) + lamF * self.model.value(z)
        if self.use_G:
            val += lamG * float(z[:3] @ z[:3] - 1)
        return val

    def residual_jacobian(self, x):
        """Gradient and Hessian of the Lagrangian in the unknowns."""
        R, J = kernels._kernels_py.kkt_residual_jacobian(
            self.exps, self.coeffs, self.W, self.target, self.free, self.use_G,
            np.asarray(x, float)[None, :])
        return R[0], J[0]

    def residual(self, x) -> np.ndarray:
        return self.residual_jacobian(x)[0]

    def normalized_residual(self, x) -> float:
        """Max over equations of ``|e_k| / (1 + sum of |terms of e_k|)``."""
        x = np.asarray(x, float)
        z = self.pose(x)
        lamG, lamF = self.multipliers(x)
        r = self.residual(x)
        _, agrad, _ = derivatives(self._abs, np.abs(z))
        aval = self.model.term_magnitude(z)
        mags = []
        for a, k in enumerate(self.free):
            m = float(np.abs(2 * self.W[k] * (z - self.target)).sum()) + abs(lamF) * agrad[k]
            if self.use_G and k < 3:
                m += abs(2 * lamG * z[k])
            mags.append(m)
        if self.use_G:
            mags.append(float(z[:3] @ z[:3]) + 1)
        mags.append(aval)
        return float(np.max(np.abs(r) / (1 + np.array(mags))))

    def gradient_ratio(self, x) -> float:
        """``|grad F|`` over the free coordinates relative to the gradient of ``|F|``'s terms."""
        z = self.pose(np.asarray(x, float))
        _, agrad, _ = derivatives(self._abs, np.abs(z))
        den = float(np.linalg.norm(agrad[self.free]))
        return float(np.linalg.norm(self.model.gradient(z)[self.free])) / den if den > 0 else 0.0

    def initial_multipliers(self, Z: np.ndarray) -> np.ndarray:
        """Least-squares multipliers for a batch of poses; returns full unknown vectors."""
        Z = np.asarray(Z, float)
        N = Z.shape[0]
        _, grad, _ = kernels._kernels_py.poly_derivs_batch(self.exps, self.coeffs, Z)
        free = self.free
        rhs = -2 * (Z - self.target) @ self.W[free, :].T  # (N, nf)
        cols = [grad[:, free]]
        if self.use_G:
            orient = (free < 3).astype(float)
            cols.insert(0, 2 * Z[:, free] * orient)
        A = np.stack(cols, axis=2)  # (N, nf, ncol)
        AtA = np.einsum("nki,nkj->nij", A, A) + 1e-300 * np.eye(A.shape[2])
        Atb = np.einsum("nki,nk->ni", A, rhs)
        lam = np.zeros((N, A.shape[2]))
        for k in range(N):
            lam[k] = np.linalg.lstsq(AtA[k], Atb[k], rcond=None)[0]
        return np.concatenate([Z[:, free], lam], axis=1)

    def solve_batch(self, X0, backend=None, maxit=60, tol=1e-15, max_halvings=0):
        return kernels.kkt_newton_batch(self.exps, self.coeffs, self.W, self.target, self.free,
                                        self.use_G, X0, maxit=maxit, tol=tol,
                                        max_halvings=max_halvings, backend=backend)

    def polish(self, x, steps: int = 8) -> np.ndarray:
        """Plain Newton steps, keeping the best iterate."""
        x = np.asarray(x, float).copy()
        best, best_r = x.copy(), self.normalized_residual(x)
        for _ in range(steps):
            r, J = self.residual_jacobian(x)
            try:
                dx = np.linalg.solve(J, r)
            except np.linalg.LinAlgError:
                dx = np.linalg.lstsq(J, r, rcond=None)[0]
            x = x - dx
            if not np.all(np.isfinite(x)):
                break
            nr = self.normalized_residual(x)
            if nr < best_r:
                best, best_r = x.copy(), nr
            if nr < 1e-15 or np.abs(dx).max() < 1e-16 * (1 + np.abs(x).max()):
                break
        return best


def fixed_orientation_problem(model, g: Configuration, target=None) -> KKTProblem:
    t = g.as_array()
    if target is not None:
        t[3:] = np.asarray(target, float)
    return KKTProblem(model, np.diag([0, 0, 0, 1.0, 1, 1]), t, [3, 4, 5], False)


def fixed_position_problem(model, g: Configuration, target=None) -> KKTProblem:
    t = g.as_array()
    if target is not None:
        t[:3] = np.asarray(target, float)
    return KKTProblem(model, np.diag([1.0, 1, 1, 0, 0, 0]), t, [0, 1, 2], True)


def general_problem(model, arch: Architecture, g: Configuration) -> KKTProblem:
    ctx = MetricContext.from_architecture(arch)
    return KKTProblem(model, ctx.gram(), g.as_array(), [0, 1, 2, 3, 4, 5], True)


def equiform_problem(model, arch: Architecture, g: Configuration) -> KKTProblem:
    ctx = MetricContext.from_architecture(arch)
    return KKTProblem(model, ctx.gram(), g.as_array(), [0, 1, 2, 3, 4, 5], False)


# ---------------------------------------------------------------------------
# fixed orientation


def _adj3(M):
    (a, b, c), (d, e, f), (g, h, i) = M
    adj = [
        [e * i - f * h, c * h - b * i, b * f - c * e],
        [f * g - d * i, a * i - c * g, c * d - a * f],
        [d * h - e * g, b * g - a * h, a * e - b * d],
    ]
    det = a * adj[0][0] + b * adj[1][0] + c * adj[2][0]
    return adj, det


def _chebyshev_nodes(count: int, scale=1) -> list:
    out = []
    for k in range(count):
        x = math.cos((2 * k + 1) * math.pi / (2 * count))
        out.append(Fraction(x).limit_denominator(10 ** 6) * scale)
    return out


def multiplier_polynomial(quadric, q) -> UniPoly:
    """``K(lambda) = det(M)^2 F(p(lambda))`` for the fixed-orientation system.

    With ``F = p^T A p + b.p + c`` the stationarity condition is
    ``M p = 2 q - lambda b`` where ``M = 2 I + 2 lambda A``.  Writing
    ``p = adj(M) rhs / det(M)`` clears all denominators, so ``K`` is a
    polynomial of degree at most 6; it is recovered exactly by interpolation.
    """
    exact = all(is_exact(x) for row in quadric.A for x in row) and all(is_exact(x) for x in q)
    conv = to_exact if exact else float
    A = [[conv(x) for x in row] for row in quadric.A]
    b = [conv(x) for x in quadric.b]
    c = conv(quadric.c)
    q = [conv(x) for x in q]

    def K(lam):
        M = [[(2 if i == j else 0) + 2 * lam * A[i][j] for j in range(3)] for i in range(3)]
        adj, det = _adj3(M)
        rhs = [2 * q[i] - lam * b[i] for i in range(3)]
        y = [sum(adj[i][j] * rhs[j] for j in range(3)) for i in range(3)]
        quad = sum(y[i] * A[i][j] * y[j] for i in range(3) for j in range(3))
        return quad + det * sum(b[i] * y[i] for i in range(3)) + det * det * c

    nodes = _chebyshev_nodes(9)
    if not exact:
        nodes = [float(x) for x in nodes]
    return interpolate_uni(K, 6, nodes, var="lambda")


def _real_roots(poly: UniPoly, precision: int):
    roots = uni_roots(poly, precision=precision)
    real, nonreal = [], 0
    for r in roots:
        z = complex(r)
        if abs(z.imag) <= IMAG_TOL * max(1.0, abs(z)):
            real.append(z.real)
        else:
            nonreal += 1
    return real, nonreal, roots


def _finish(problem: KKTProblem, x, tol=RESIDUAL_TOL):
    x = problem.polish(x)
    res = problem.normalized_residual(x)
    return x, res, res < tol and problem.gradient_ratio(x) >= GRADIENT_RATIO_TOL


def closest_fixed_orientation(model: SingularityModel, arch: Architecture, g: Configuration,
                              tol: float = RESIDUAL_TOL) -> PedalSet:
    """Translations of ``g`` onto the singularity quadric of its orientation."""
    quadric = orientation_quadric(model, g.orientation)
    q = g.position
    K = multiplier_polynomial(quadric, q)
    if K.is_zero():
        raise DegenerateSpecializationError("degenerate orientation: multiplier polynomial vanishes")
    real, nonreal, _ = _real_roots(K, working_precision())
    problem = fixed_orientation_problem(model, g)
    A, b, _ = quadric.arrays()
    qf = np.array([float(x) for x in q])
    points = []
    for lam in real:
        M = 2 * np.eye(3) + 2 * lam * A
        if abs(np.linalg.det(M)) < 1e-12 * max(1.0, np.abs(M).max()) ** 3:
            warnings.warn(f"multiplier {lam:.6g} makes the linear system singular; candidate dropped",
                          DegenerateCandidateWarning, stacklevel=2)
            continue
        p = np.linalg.solve(M, 2 * qf - lam * b)
        x, res, ok = _finish(problem, np.r_[p, lam], tol)
        if not ok:
            warnings.warn(f"candidate at multiplier {lam:.6g} failed the residual check ({res:.2e})",
                          DegenerateCandidateWarning, stacklevel=2)
            continue
        pose = Configuration(g.orientation, tuple(x[:3]), check_unit=False)
        points.append(PedalPoint(pose, float(np.linalg.norm(x[:3] - qf)), res, lambda1=float(x[3])))
    return PedalSet("fixed_orientation", _dedup(points), nonreal, {"K": K, "degree": K.degree})


# ---------------------------------------------------------------------------
# fixed position


def fixed_position_system(model: SingularityModel, position, target) -> tuple:
    """The three quadratics in (u, v, w) left after eliminating the multipliers.

    Returns ``(N, F, G, D)``: ``N`` is the numerator of the w-equation,
    ``F`` the cubic at the fixed position, ``G`` the unit sphere and ``D``
    the determinant of the 2x2 multiplier system.
    """
    pos = [to_exact(x) for x in position]
    q1, q2, q3 = [to_exact(x) for x in target]
    Fp = model.F.subs(dict(zip(("px", "py", "pz"), pos)))
    Fp = Fp.with_vars(("u", "v", "w"))
    u, v, w = MultiPoly.gens(("u", "v", "w"))
    Fu, Fv, Fw = Fp.diff("u"), Fp.diff("v"), Fp.diff("w")
    D = v * Fu * 2 - u * Fv * 2
    lam1 = (v * q1 - u * q2) * 4
    lam2 = (Fv * (u - q1) - Fu * (v - q2)) * 2
    N = (w - q3) * D * 2 + lam1 * Fw + w * lam2 * 2
    G = u * u + v * v + w * w - 1
    return N, Fp, G, D


def _best_root(candidates, scorers):
    best, best_s = None, math.inf
    for c in candidates:
        s = max(f(c) for f in scorers)
        if s < best_s:
            best, best_s = c, s
    return best, best_s


def _uni_in(poly: MultiPoly, var: str, values: dict) -> UniPoly:
    sub = poly.subs(values)
    return sub.to_uni(var) if not sub.is_zero() else UniPoly([], var)


def _scaled_abs(poly: UniPoly):
    coeffs = [complex(c) for c in poly.coeffs]
    def f(x):
        x = complex(x)
        mag = sum(abs(c) * abs(x) ** k for k, c in enumerate(coeffs))
        val = sum(c * x ** k for k, c in enumerate(coeffs))
        return abs(val) / mag if mag else 0.0
    return f


def fixed_position_elimination(model: SingularityModel, position, target) -> dict:
    """Exact resultant elimination of the fixed-position system down to ``w``."""
    N, Fp, G, D = fixed_position_system(model, position, target)
    for name, p in (("N", N), ("F", Fp)):
        if p.degree("u") < 1:
            raise PolynomialError(f"{name} does not involve u")
    R1 = sylvester_resultant(Fp, G, "u")
    R2 = sylvester_resultant(N, G, "u")
    R3 = sylvester_resultant(N, Fp, "u")
    G1 = sylvester_resultant(R2, R3, "v")
    G2 = sylvester_resultant(R1, R3, "v")
    G3 = sylvester_resultant(R1, R2, "v")
    unis = [g.to_uni("w") for g in (G1, G2, G3)]
    h = unis[0]
    for other in unis[1:]:
        h = uni_gcd(h, other)
    return {"N": N, "F": Fp, "G": G, "D": D, "R": (R1, R2, R3), "H": h}


def _fixed_position_candidates(elim, w_roots, precision):
    R = elim["R"]
    N, Fp, G = elim["N"], elim["F"], elim["G"]
    out = []
    for w0 in w_roots:
        rv = [_uni_in(r, "v", {"w": w0}) for r in R]
        cands = []
        for r in rv:
            if r.degree >= 1:
                cands += [complex(z).real for z in uni_roots(r) if abs(complex(z).imag) <= 1e-6 * max(1, abs(z))]
        scorers = [_scaled_abs(r) for r in rv if r.degree >= 1]
        v0, _ = _best_root(cands, scorers)
        if v0 is None:
            continue
        ucands = []
        for p in (G, Fp, N):
            pu = _uni_in(p, "u", {"v": v0, "w": w0})
            if pu.degree >= 1:
                ucands += [complex(z).real for z in uni_roots(pu)]
        uscorers = [_scaled_abs(_uni_in(p, "u", {"v": v0, "w": w0})) for p in (G, Fp, N)]
        u0, _ = _best_root(ucands, uscorers)
        if u0 is None:
            continue
        out.append(np.array([u0, v0, w0]))
    return out


def closest_fixed_position(model: SingularityModel, arch: Architecture, g: Configuration,
                           target=None, tol: float = RESIDUAL_TOL, starts: int = 2000,
                           seed: int = 0) -> PedalSet:
    """Rotations of ``g`` about its position onto the singular orientations.

    ``target`` is the direction whose spherical distance is minimized; by
    default the orientation of ``g``.
    """
    target = tuple(g.orientation) if target is None else tuple(target)
    position_cone(model, g.position)  # raises on a degenerate position
    problem = fixed_position_problem(model, g, target)
    tdir = np.asarray([float(x) for x in target])
    precision = working_precision()
    info = {}
    try:
        elim = fixed_position_elimination(model, g.position, target)
        H = elim["H"]
        info.update(degree=H.degree, H=H)
        if H.degree != 8:
            raise PolynomialError(f"eliminated univariate has degree {H.degree}")
        real, nonreal, roots = _real_roots(H, precision)
        info["roots"] = roots
        seeds = _fixed_position_candidates(elim, real, precision)
        Dc = elim["D"]
    except PolynomialError as exc:
        warnings.warn(f"non-generic fixed-position instance ({exc}); using multistart",
                      NonGenericWarning, stacklevel=2)
        nonreal = None
        seeds = None
    points = []
    if seeds is not None:
        for i0 in seeds:
            dval = float(Dc(tuple(float(x) for x in i0)))
            if abs(dval) < 1e-12:
                warnings.warn("degenerate multiplier system at a candidate; dropped",
                              DegenerateCandidateWarning, stacklevel=2)
                continue
            z = problem.target.copy()
            z[:3] = i0
            x0 = problem.initial_multipliers(z[None, :])[0]
            x, res, ok = _finish(problem, x0, tol)
            if not ok:
                warnings.warn(f"candidate failed the residual check ({res:.2e})",
                              DegenerateCandidateWarning, stacklevel=2)
                continue
            points.append(_fixed_position_point(problem, x, tdir, res))
    else:
        rng = np.random.Generator(np.random.Philox(seed))
        O = rng.standard_normal((starts, 3))
        O /= np.linalg.norm(O, axis=1)[:, None]
        Z = np.tile(problem.target, (starts, 1))
        Z[:, :3] = O
        for x, res in _multistart(problem, Z, tol):
            points.append(_fixed_position_point(problem, x, tdir, res))
    return PedalSet("fixed_position", _dedup(points), nonreal, info)


def _fixed_position_point(problem, x, tdir, res):
    z = problem.pose(x)
    lamG, lamF = problem.multipliers(x)
    pose = Configuration(tuple(z[:3]), tuple(z[3:]), check_unit=False)
    return PedalPoint(pose, spherical_distance(z[:3], tdir), res, lambda1=float(lamF), lambda2=float(lamG))


# ---------------------------------------------------------------------------
# multistart (general and equiform)


@dataclass(frozen=True)
class MultistartOptions:
    starts: int = 5000
    seed: int = 0
    box: float | None = None
    tol: float = RESIDUAL_TOL
    backend: str | None = None
    maxit: int = 60
    max_halvings: int = 0


def _multistart(problem: KKTProblem, Z: np.ndarray, tol: float, backend=None, maxit=60,
                max_halvings=0):
    """Newton from every start; returns polished, residual-verified solutions."""
    X0 = problem.initial_multipliers(Z)
    X, status, rnorm = problem.solve_batch(X0, backend=backend, maxit=maxit, max_halvings=max_halvings)
    finite = np.all(np.isfinite(X), axis=1)
    scale = (1 + np.abs(np.where(finite[:, None], X, 0)).max(axis=1)) ** 2
    ok = finite & (status != kernels.DIVERGED) & (rnorm < 1e-6 * scale)
    order = np.flatnonzero(ok)[np.argsort(rnorm[ok], kind="stable")]
    reps = []
    nf = len(problem.free)
    for k in order:
        z = X[k, :nf]
        if reps and np.min(np.abs(np.array(reps)[:, :nf] - z).max(axis=1)) < 1e-6:
            continue
        reps.append(X[k])
    out = []
    for x in reps:
        x, res, good = _finish(problem, x, tol)
        if good:
            out.append((x, res))
    return out


def _dedup(points: list) -> list:
    points = sorted(points, key=lambda q: q.residual)
    kept = []
    for q in points:
        a = q.as_array()
        if all(np.linalg.norm(a - b) >= DEDUP_TOL * (1 + max(np.abs(a).max(), np.abs(b).max()))
               for b in (k.as_array() for k in kept)):
            kept.append(q)
    return kept


def _default_box(model, arch, g) -> float:
    try:
        return 3.0 * closest_fixed_orientation(model, arch, g).minimizer.distance
    except Exception:
        return 3.0 * (1.0 + float(np.linalg.norm(np.asarray(g.position, float))))


def _metric_starts(problem, g, opts: MultistartOptions, box: float) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(opts.seed))
    O = rng.standard_normal((opts.starts, 3))
    O /= np.linalg.norm(O, axis=1)[:, None]
    P = np.asarray(g.position, float) + rng.uniform(-box, box, size=(opts.starts, 3))
    return np.concatenate([O, P], axis=1)


def _metric_solve(mode, problem, model, arch, g, opts):
    box = opts.box if opts.box is not None else _default_box(model, arch, g)
    Z = _metric_starts(problem, g, opts, box)
    ctx = MetricContext.from_architecture(arch)
    points = []
    for x, res in _multistart(problem, Z, opts.tol, opts.backend, opts.maxit, opts.max_halvings):
        z = problem.pose(x)
        lamG, lamF = problem.multipliers(x)
        pose = Configuration(tuple(z[:3]), tuple(z[3:]), check_unit=False)
        d = ctx.distance(pose, g)
        if mode == "general":
            points.append(PedalPoint(pose, d, res, lambda1=float(lamG), lambda2=float(lamF)))
        else:
            points.append(PedalPoint(pose, d, res, lambda2=float(lamF), mu=float(np.linalg.norm(z[:3]))))
    points = _dedup(points)
    if not points:
        raise SolverError("no pedal point found; enlarge box or starts")
    return PedalSet(mode, points, None, {"box": box, "starts": opts.starts, "seed": opts.seed})


def closest_general(model: SingularityModel, arch: Architecture, g: Configuration,
                    opts: MultistartOptions | None = None) -> PedalSet:
    """Stationary points of the anchor-point metric on the singularity variety."""
    opts = opts or MultistartOptions()
    return _metric_solve("general", general_problem(model, arch, g), model, arch, g, opts)


def closest_equiform(model: SingularityModel, arch: Architecture, g: Configuration,
                     opts: MultistartOptions | None = None) -> PedalSet:
    """As ``closest_general`` but the orientation may have any length ``mu``."""
    opts = opts or MultistartOptions()
    return _metric_solve("equiform", equiform_problem(model, arch, g), model, arch, g, opts)


def solve(mode: str, model, arch, g, opts: MultistartOptions | None = None) -> PedalSet:
    if mode == "fixed_orientation":
        return closest_fixed_orientation(model, arch, g, tol=(opts.tol if opts else RESIDUAL_TOL))
    if mode == "fixed_position":
        o = opts or MultistartOptions()
        return closest_fixed_position(model, arch, g, tol=o.tol, seed=o.seed)
    if mode == "general":
        return closest_general(model, arch, g, opts)
    if mode == "equiform":
        return closest_equiform(model, arch, g, opts)
    raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")


def singularity_free_radius(model, arch, g, mode: str = "general",
                            opts: MultistartOptions | None = None) -> float:
    """Distance from ``g`` to the nearest singular pose in the given mode."""
    return solve(mode, model, arch, g, opts).minimizer.distance
