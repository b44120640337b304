"""Linear pentapod model: architecture, poses, Jacobian and the singularity cubic."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ArchitectureError, DegenerateSpecializationError
from .polyalg import MultiPoly, is_exact, minors_maximal, poly_divide_exact, poly_eval, to_exact

VARS = ("u", "v", "w", "px", "py", "pz")
ORIENT_VARS = VARS[:3]
POS_VARS = VARS[3:]

# Monomials carrying A_1..A_43 in the structured form of F, as exponent
# vectors over (u, v, w, px, py, pz).
_TEMPLATE_SPEC = [
    "u2 py", "u2 pz",
    "uv px", "uv py", "uv pz", "uv",
    "uw px", "uw py", "uw pz", "uw",
    "u px py", "u px pz", "u py2", "u py pz", "u py", "u pz2", "u pz",
    "v2 px", "v2 pz", "v2",
    "vw px", "vw py", "vw pz", "vw",
    "v px2", "v px py", "v px pz", "v px", "v py pz", "v py", "v pz2", "v pz",
    "w2 px", "w2 py", "w2",
    "w px2", "w px py", "w px pz", "w px", "w py2", "w py pz", "w py", "w pz",
]


def _parse_monomial(spec: str) -> tuple:
    exp = [0] * 6
    for tok in spec.split():
        if tok.startswith("p"):
            name, power = tok[:2], int(tok[2:] or 1)
            exp[VARS.index(name)] += power
        else:
            letters = tok.rstrip("0123456789")
            power = int(tok[len(letters):] or 1)
            for ch in letters:
                exp[VARS.index(ch)] += power
    return tuple(exp)


SUPPORT_TEMPLATE = tuple(_parse_monomial(s) for s in _TEMPLATE_SPEC)


@dataclass(frozen=True)
class Architecture:
    """Five base anchor points ``a_j`` and platform offsets ``r_j``.

    Values are kept as given (ints, Fractions or floats); ``exact()`` converts
    to rationals for the symbolic pipelines.
    """

    base: tuple
    offsets: tuple

    def __post_init__(self):
        base = tuple(tuple(pt) for pt in self.base)
        offsets = tuple(self.offsets)
        if len(base) != 5 or any(len(pt) != 3 for pt in base):
            raise ArchitectureError("base must hold five 3-vectors")
        if len(offsets) != 5:
            raise ArchitectureError("offsets must hold five scalars")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "offsets", offsets)
        if getattr(self, "_skip_checks", False):
            return
        pairs = [(pt, r) for pt, r in zip(base, offsets)]
        if len(set(pairs)) != 5:
            raise ArchitectureError("legs must be pairwise distinct")
        if len(set(offsets)) == 1:
            raise ArchitectureError("platform offsets must not all be equal")
        if len(set(base)) == 1:
            raise ArchitectureError("base points must not all coincide")

    @classmethod
    def unchecked(cls, base, offsets) -> "Architecture":
        """Build without the genericity checks (degenerate test designs)."""
        obj = cls.__new__(cls)
        object.__setattr__(obj, "_skip_checks", True)
        cls.__init__(obj, base, offsets)
        return obj

    def exact(self) -> "Architecture":
        cls = Architecture.unchecked if getattr(self, "_skip_checks", False) else Architecture
        return cls(
            tuple(tuple(to_exact(x) for x in pt) for pt in self.base),
            tuple(to_exact(r) for r in self.offsets),
        )

    @property
    def is_exact(self) -> bool:
        return all(is_exact(x) for pt in self.base for x in pt) and all(is_exact(r) for r in self.offsets)

    def base_array(self) -> np.ndarray:
        return np.array([[float(x) for x in pt] for pt in self.base])

    def offsets_array(self) -> np.ndarray:
        return np.array([float(r) for r in self.offsets])


@dataclass(frozen=True)
class Configuration:
    """Pose of the platform line: unit direction ``(u, v, w)`` and position ``p``."""

    orientation: tuple
    position: tuple
    check_unit: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        o = tuple(self.orientation)
        p = tuple(self.position)
        if len(o) != 3 or len(p) != 3:
            raise ValueError("orientation and position must be 3-vectors")
        object.__setattr__(self, "orientation", o)
        object.__setattr__(self, "position", p)
        if self.check_unit:
            n2 = sum(x * x for x in o)
            if abs(float(n2) - 1.0) > 1e-12:
                raise ValueError(f"orientation must be a unit vector (|i|^2 = {float(n2)!r})")

    @classmethod
    def from_values(cls, values: Sequence, check_unit: bool = True) -> "Configuration":
        values = tuple(values)
        if len(values) != 6:
            raise ValueError("a pose has six coordinates (u, v, w, px, py, pz)")
        return cls(values[:3], values[3:], check_unit)

    def as_tuple(self) -> tuple:
        return self.orientation + self.position

    def as_array(self) -> np.ndarray:
        return np.array([float(x) for x in self.as_tuple()])

    def exact(self) -> "Configuration":
        return Configuration(tuple(map(to_exact, self.orientation)),
                             tuple(map(to_exact, self.position)), check_unit=False)


# ---------------------------------------------------------------------------
# Jacobian and minors


def _row_entries(a, r, u, v, w, px, py, pz):
    x, y, z = a
    bx, by, bz = px + r * u, py + r * v, pz + r * w
    return [
        bx - x, by - y, bz - z,
        y * bz - z * by,
        z * bx - x * bz,
        x * by - y * bx,
    ]


def symbolic_jacobian(arch: Architecture) -> list:
    """5x6 Jacobian with ``MultiPoly`` entries in (u, v, w, px, py, pz)."""
    ex = arch.exact()
    gens = MultiPoly.gens(VARS)
    return [_row_entries(a, r, *gens) for a, r in zip(ex.base, ex.offsets)]


def jacobian(arch: Architecture, c: Configuration) -> np.ndarray:
    """Numeric 5x6 Jacobian; row ``j`` is ``(l_j, l^_j)``."""
    vals = c.as_array()
    A = arch.base_array()
    R = arch.offsets_array()
    return np.array([_row_entries(A[j], R[j], *vals) for j in range(5)], dtype=float)


def minors(arch: Architecture, c: Configuration | None = None):
    """The six 5x5 minors ``F_1..F_6`` (column ``j`` removed).

    Without a configuration they are returned as exact ``MultiPoly``;
    with one, as a float array.
    """
    if c is None:
        out = minors_maximal(symbolic_jacobian(arch))
        return [m if isinstance(m, MultiPoly) else MultiPoly.const(m, VARS) for m in out]
    J = jacobian(arch, c)
    return np.array([np.linalg.det(np.delete(J, j, axis=1)) for j in range(6)])


def normalized_minors(arch: Architecture, c: Configuration) -> np.ndarray:
    """Minors divided by the Hadamard bound of their 5x5 submatrix."""
    J = jacobian(arch, c)
    out = np.empty(6)
    for j in range(6):
        S = np.delete(J, j, axis=1)
        bound = np.prod(np.linalg.norm(S, axis=1))
        out[j] = abs(np.linalg.det(S)) / bound if bound > 0 else 0.0
    return out


class SingularityCheck(NamedTuple):
    singular: bool
    sigma_ratio: float
    sigma_min: float


def is_singular(arch: Architecture, c: Configuration, tol: float = 1e-8) -> SingularityCheck:
    sv = np.linalg.svd(jacobian(arch, c), compute_uv=False)
    ratio = sv[-1] / sv[0] if sv[0] > 0 else 0.0
    return SingularityCheck(bool(ratio < tol), float(ratio), float(sv[-1]))


# ---------------------------------------------------------------------------
# extraction of F


def _monomials_upto(nvars: int, degree: int) -> list:
    out = [()]
    for _ in range(nvars):
        out = [e + (k,) for e in out for k in range(degree + 1)]
    return sorted((e for e in out if sum(e) <= degree), key=lambda e: (sum(e), e))


def _sample_points(count: int, seed: int = 20170) -> list:
    rng = random.Random(seed)
    return [tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 7)) for _ in range(6)) for _ in range(count)]


def _nullspace(rows: list, ncols: int) -> list:
    """Exact nullspace basis of a rational matrix (reduced row echelon form)."""
    m = [list(map(Fraction, r)) for r in rows]
    pivots = []
    rank = 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        pr = m[rank]
        inv = 1 / pr[col]
        pr = [x * inv for x in pr]
        m[rank] = pr
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col]
                row = m[i]
                m[i] = [a - f * b for a, b in zip(row, pr)]
        pivots.append(col)
        rank += 1
        if rank == len(m):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -m[r][fc]
        basis.append(vec)
    return basis


def _cofactor_pair(Fa: MultiPoly, Fb: MultiPoly, max_degree: int = 2):
    """Smallest-degree (Qa, Qb) with ``Fa*Qb == Fb*Qa``."""
    for d in range(max_degree + 1):
        monos = _monomials_upto(6, d)
        k = len(monos)
        pts = _sample_points(2 * k + 12)
        rows = []
        for pt in pts:
            fa = poly_eval(Fa, pt)
            fb = poly_eval(Fb, pt)
            mv = [math.prod(x ** e for x, e in zip(pt, mono)) for mono in monos]
            rows.append([-fb * m for m in mv] + [fa * m for m in mv])
        basis = _nullspace(rows, 2 * k)
        if not basis:
            continue
        vec = basis[0]
        Qa = MultiPoly(VARS, {mono: c for mono, c in zip(monos, vec[:k])})
        Qb = MultiPoly(VARS, {mono: c for mono, c in zip(monos, vec[k:])})
        if Qa.is_zero():
            continue
        return Qa, Qb
    return None


def _normalize(F: MultiPoly):
    scale = F.max_abs_coeff()
    lead = F.sorted_terms()[0][1]
    factor = Fraction(1) / Fraction(scale)
    if lead < 0:
        factor = -factor
    return F * factor, factor


def _primitive_factor(F: MultiPoly) -> Fraction:
    """``k`` such that ``F / k`` has coprime integer coefficients."""
    coeffs = [Fraction(c) for c in F.terms.values()]
    den = math.lcm(*(c.denominator for c in coeffs))
    num = math.gcd(*(abs(c.numerator) * (den // c.denominator) for c in coeffs))
    return Fraction(num, den)


@dataclass(frozen=True, eq=False)
class SingularityModel:
    """The singularity cubic ``F`` of an architecture plus float evaluators.

    ``F`` is exact and normalized (largest coefficient magnitude 1, leading
    grlex coefficient positive).  ``F / primitive_factor`` has coprime
    integer coefficients.
    """

    architecture: Architecture
    F: MultiPoly
    normalization: Fraction
    primitive_factor: Fraction

    @cached_property
    def _compiled(self):
        exps, coeffs = self.F.compile()
        return exps, coeffs

    @cached_property
    def _term_list(self):
        return list(self.F.terms.items())

    def coefficients(self) -> list:
        """``A_1..A_43`` in template order (zeros where a monomial is absent)."""
        return [self.F.coeff(m) for m in SUPPORT_TEMPLATE]

    def support_within_template(self) -> bool:
        return self.F.monomials() <= set(SUPPORT_TEMPLATE)

    def value_exact(self, pose):
        return poly_eval(self.F, pose)

    # float evaluators -------------------------------------------------
    def value(self, pose) -> float:
        return float(self.value_batch(np.asarray(pose, dtype=float)[None, :])[0])

    def value_batch(self, X: np.ndarray) -> np.ndarray:
        exps, coeffs = self._compiled
        X = np.asarray(X, dtype=float)
        mono = np.prod(X[:, None, :] ** exps[None, :, :], axis=2)
        return mono @ coeffs

    def term_magnitude(self, pose) -> float:
        """Sum of absolute term values; the scale used for relative residuals."""
        exps, coeffs = self._compiled
        x = np.asarray(pose, dtype=float)
        return float(np.abs(np.prod(x[None, :] ** exps, axis=1) * coeffs).sum())

    def normalized_value(self, pose) -> float:
        mag = self.term_magnitude(pose)
        return abs(self.value(pose)) / mag if mag > 0 else 0.0

    def gradient(self, pose) -> np.ndarray:
        return derivatives(self._compiled, np.asarray(pose, dtype=float))[1]

    def hessian(self, pose) -> np.ndarray:
        return derivatives(self._compiled, np.asarray(pose, dtype=float))[2]


def derivatives(compiled, x: np.ndarray):
    """Value, gradient and Hessian of a compiled polynomial at one point."""
    exps, coeffs = compiled
    n = exps.shape[1]
    # powers[k, e] = x_k ** e, safe for e-1 < 0 via masking
    maxd = int(exps.max(initial=0)) + 1
    pw = np.ones((n, maxd + 1))
    for e in range(1, maxd + 1):
        pw[:, e] = pw[:, e - 1] * x
    cols = np.arange(n)
    base = pw[cols[None, :], exps]  # (m, n)
    val = float(coeffs @ np.prod(base, axis=1))
    grad = np.zeros(n)
    hess = np.zeros((n, n))
    for j in range(n):
        ej = exps[:, j]
        mask = ej > 0
        if not mask.any():
            continue
        t = base.copy()
        t[:, j] = np.where(mask, ej * pw[j, np.maximum(ej - 1, 0)], 0.0)
        grad[j] = coeffs @ np.prod(t, axis=1)
        for k in range(j, n):
            ek = exps[:, k]
            if k == j:
                mk = ej > 1
                if not mk.any():
                    continue
                s = base.copy()
                s[:, j] = np.where(mk, ej * (ej - 1) * pw[j, np.maximum(ej - 2, 0)], 0.0)
            else:
                mk = mask & (ek > 0)
                if not mk.any():
                    continue
                s = t.copy()
                s[:, k] = np.where(ek > 0, ek * pw[k, np.maximum(ek - 1, 0)], 0.0)
            hess[j, k] = hess[k, j] = coeffs @ np.prod(s, axis=1)
    return val, grad, hess


def extract_F(arch: Architecture, seed_pair: tuple = (0, 1)) -> SingularityModel:
    """Exact singularity cubic of ``arch`` (the gcd of the six minors).

    Cofactors ``Q_a, Q_b`` with ``F_a Q_b = F_b Q_a`` are found from an exact
    nullspace over sample evaluations; ``F = F_a / Q_a`` is then checked to
    divide every minor.
    """
    ex = arch.exact()
    Fs = minors(ex)
    if any(f.is_zero() for f in Fs):
        raise ArchitectureError("architecturally degenerate: a minor vanishes identically")
    a, b = seed_pair
    pair = _cofactor_pair(Fs[a], Fs[b])
    if pair is None:
        raise ArchitectureError("architecturally degenerate: no low-degree cofactors")
    Qa, _ = pair
    try:
        F = poly_divide_exact(Fs[a], Qa)
    except Exception as exc:
        raise ArchitectureError(f"architecturally degenerate: {exc}") from None
    if F.total_degree() != 3:
        raise ArchitectureError(f"architecturally degenerate: gcd has degree {F.total_degree()}")
    for j, Fj in enumerate(Fs):
        try:
            poly_divide_exact(Fj, F)
        except Exception:
            raise ArchitectureError(f"architecturally degenerate: F does not divide F_{j + 1}") from None
    F, factor = _normalize(F)
    return SingularityModel(ex, F, factor, _primitive_factor(F))


# ---------------------------------------------------------------------------
# specializations


@dataclass(frozen=True)
class QuadraticForm3:
    """``x^T A x + b.x + c`` in three variables, coefficients exact or float."""

    A: tuple
    b: tuple
    c: object
    variables: tuple

    @classmethod
    def from_poly(cls, poly: MultiPoly) -> "QuadraticForm3":
        if poly.total_degree() > 2:
            raise ValueError("polynomial has degree above 2")
        half = Fraction(1, 2) if all(is_exact(x) for x in poly.terms.values()) else 0.5
        A = [[0] * 3 for _ in range(3)]
        b = [0] * 3
        for e, coef in poly.terms.items():
            idx = [i for i, k in enumerate(e) for _ in range(k)]
            if len(idx) == 2:
                i, j = idx
                if i == j:
                    A[i][i] = A[i][i] + coef
                else:
                    A[i][j] = A[i][j] + coef * half
                    A[j][i] = A[j][i] + coef * half
            elif len(idx) == 1:
                b[idx[0]] = b[idx[0]] + coef
        c = poly.coeff((0, 0, 0))
        return cls(tuple(map(tuple, A)), tuple(b), c, poly.vars)

    def __call__(self, x):
        x = list(x)
        quad = sum(self.A[i][j] * x[i] * x[j] for i in range(3) for j in range(3))
        return quad + sum(bi * xi for bi, xi in zip(self.b, x)) + self.c

    def matrix4(self) -> np.ndarray:
        """Homogeneous symmetric 4x4 matrix ``M`` with value ``[x,1] M [x,1]^T``."""
        M = np.zeros((4, 4))
        M[:3, :3] = np.array(self.A, dtype=float)
        M[:3, 3] = M[3, :3] = np.array([float(v) for v in self.b]) / 2
        M[3, 3] = float(self.c)
        return M

    def arrays(self):
        return (np.array(self.A, dtype=float), np.array([float(v) for v in self.b]), float(self.c))

    def poly(self) -> MultiPoly:
        gens = MultiPoly.gens(self.variables)
        out = MultiPoly.const(self.c, self.variables)
        for i in range(3):
            out = out + gens[i] * self.b[i]
            for j in range(3):
                out = out + gens[i] * gens[j] * self.A[i][j]
        return out


def orientation_quadric(model: SingularityModel, i) -> QuadraticForm3:
    """The quadric Omega(i) in position space (F with the orientation fixed)."""
    poly = model.F.subs(dict(zip(ORIENT_VARS, i)))
    if poly.is_zero():
        raise DegenerateSpecializationError("F vanishes identically for this orientation")
    return QuadraticForm3.from_poly(poly)


def position_cone(model: SingularityModel, p) -> QuadraticForm3:
    """F with the position fixed: quadratic in (u, v, w)."""
    poly = model.F.subs(dict(zip(POS_VARS, p)))
    if poly.is_zero():
        raise DegenerateSpecializationError("F vanishes identically for this position")
    return QuadraticForm3.from_poly(poly)


# ---------------------------------------------------------------------------
# frame normalization


@dataclass(frozen=True)
class SimilarityTransform:
    """``x -> scale * R (x - origin)``; orientations map by ``R`` alone."""

    rotation: np.ndarray
    origin: np.ndarray
    scale: float

    def point(self, x) -> np.ndarray:
        return self.scale * self.rotation @ (np.asarray(x, dtype=float) - self.origin)

    def direction(self, d) -> np.ndarray:
        return self.rotation @ np.asarray(d, dtype=float)

    def pose(self, c: Configuration) -> Configuration:
        return Configuration(tuple(self.direction(c.orientation)), tuple(self.point(c.position)),
                             check_unit=c.check_unit)

    def inverse_pose(self, c: Configuration) -> Configuration:
        o = self.rotation.T @ np.asarray(c.orientation, dtype=float)
        p = self.rotation.T @ np.asarray(c.position, dtype=float) / self.scale + self.origin
        return Configuration(tuple(o), tuple(p), check_unit=c.check_unit)

    def is_identity(self, tol: float = 1e-12) -> bool:
        return (np.allclose(self.rotation, np.eye(3), atol=tol)
                and np.allclose(self.origin, 0, atol=tol) and abs(self.scale - 1) < tol)


def normalize_frame(arch: Architecture):
    """Move ``a_1`` to the origin, ``a_2`` to ``(1,0,0)`` and ``a_3`` into z=0.

    The rotation about the x-axis is fixed by making the new z-axis point
    into the old upper half space; for collinear ``a_1, a_2, a_3`` the y-axis
    is chosen closest to the old y-axis, which gives ``y_3 = 0``.
    """
    A = arch.base_array()
    a1, a2, a3 = A[0], A[1], A[2]
    d = a2 - a1
    length = np.linalg.norm(d)
    if length == 0:
        raise ArchitectureError("a_1 and a_2 coincide")
    e1 = d / length
    n = np.cross(e1, a3 - a1)
    if np.linalg.norm(n) < 1e-12 * max(1.0, np.linalg.norm(a3 - a1)):
        ref = np.array([0.0, 1.0, 0.0])
        if abs(ref @ e1) > 0.9:
            ref = np.array([0.0, 0.0, 1.0])
        e2 = ref - (ref @ e1) * e1
        e2 /= np.linalg.norm(e2)
        e3 = np.cross(e1, e2)
    else:
        e3 = n / np.linalg.norm(n)
        for axis in (np.array([0, 0, 1.0]), np.array([0, 1.0, 0]), np.array([1.0, 0, 0])):
            s = e3 @ axis
            if abs(s) > 1e-14:
                if s < 0:
                    e3 = -e3
                break
        e2 = np.cross(e3, e1)
    R = np.vstack([e1, e2, e3])
    T = SimilarityTransform(R, a1.copy(), 1.0 / length)
    base = tuple(tuple(float(x) for x in T.point(a)) for a in A)
    # snap the coordinates fixed by construction
    base = (
        (0.0, 0.0, 0.0),
        (1.0, 0.0, 0.0),
        (base[2][0], base[2][1], 0.0),
        base[3],
        base[4],
    )
    offsets = tuple(float(r) * T.scale for r in arch.offsets)
    return Architecture(base, offsets), T
