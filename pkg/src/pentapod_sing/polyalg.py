"""Sparse multivariate and dense univariate polynomials.

Coefficients are plain Python numbers.  ``int``/``Fraction`` coefficients give
exact rational arithmetic; ``float``/``mpmath.mpf`` give floating arithmetic at
whatever precision the coefficients carry.  Nothing here mixes the two modes on
purpose: callers pick one by the type of the data they feed in.

Notes
-----
Terms are stored as ``{exponent_tuple: coefficient}``.  Iteration order for
printing and leading-term decisions is descending graded lexicographic with
the variable order of the polynomial.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Mapping, Sequence

import mpmath
import numpy as np

from .errors import PolynomialError

__all__ = [
    "MultiPoly",
    "UniPoly",
    "is_exact",
    "to_exact",
    "poly_eval",
    "det_poly",
    "sylvester_resultant",
    "uni_roots",
    "uni_gcd",
    "interpolate_uni",
    "poly_divide_exact",
]


def is_exact(x) -> bool:
    return isinstance(x, Rational)


def to_exact(x):
    """Convert a number (or ``"p/q"`` string) to an exact rational."""
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, mpmath.mpf):
        m, e = mpmath.mpf(x).man_exp
        return Fraction(int(m)) * Fraction(2) ** int(e)
    return Fraction(x)


def _grlex_key(exp):
    return (sum(exp), exp)


class MultiPoly:
    """Sparse polynomial in an ordered tuple of named variables."""

    __slots__ = ("vars", "terms")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple, object] | None = None):
        self.vars = tuple(variables)
        n = len(self.vars)
        clean = {}
        if terms:
            for exp, c in terms.items():
                exp = tuple(exp)
                if len(exp) != n:
                    raise PolynomialError(f"exponent {exp} does not match variables {self.vars}")
                if c != 0:
                    clean[exp] = c
        self.terms = clean

    # -- constructors -------------------------------------------------
    @classmethod
    def const(cls, c, variables):
        return cls(variables, {(0,) * len(tuple(variables)): c})

    @classmethod
    def var(cls, name, variables, coeff=1):
        variables = tuple(variables)
        exp = [0] * len(variables)
        exp[variables.index(name)] = 1
        return cls(variables, {tuple(exp): coeff})

    @classmethod
    def gens(cls, variables):
        return [cls.var(v, variables) for v in variables]

    # -- basic queries ------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree(self, var: str | None = None) -> int:
        if var is None:
            return self.total_degree()
        k = self.vars.index(var)
        if not self.terms:
            return -1
        return max(e[k] for e in self.terms)

    def sorted_terms(self):
        """Terms in descending graded lexicographic order."""
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def leading_term(self):
        if not self.terms:
            raise PolynomialError("zero polynomial has no leading term")
        exp = max(self.terms, key=_grlex_key)
        return exp, self.terms[exp]

    def max_abs_coeff(self):
        return max((abs(c) for c in self.terms.values()), default=0)

    def coeff(self, exp):
        return self.terms.get(tuple(exp), 0)

    def monomials(self):
        return set(self.terms)

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other.vars != self.vars:
                raise PolynomialError(f"variable mismatch {self.vars} vs {other.vars}")
            return other
        return MultiPoly.const(other, self.vars)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = s
        return MultiPoly(self.vars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            if other == 0:
                return MultiPoly(self.vars)
            return MultiPoly(self.vars, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(self.vars, out)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if isinstance(scalar, MultiPoly):
            return poly_divide_exact(self, scalar)
        if is_exact(scalar) and all(is_exact(c) for c in self.terms.values()):
            scalar = Fraction(scalar)
        return MultiPoly(self.vars, {e: c / scalar for e, c in self.terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise PolynomialError("negative power")
        result = MultiPoly.const(1, self.vars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.vars == other.vars and self.terms == other.terms
        if other == 0:
            return not self.terms
        return self.terms == MultiPoly.const(other, self.vars).terms

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k)
            parts.append(f"{c}*{mono}" if mono else f"{c}")
        return " + ".join(parts)

    # -- calculus / substitution ---------------------------------------
    def diff(self, var: str):
        k = self.vars.index(var)
        out = {}
        for e, c in self.terms.items():
            if e[k]:
                ne = list(e)
                ne[k] -= 1
                out[tuple(ne)] = c * e[k]
        return MultiPoly(self.vars, out)

    def map_coeffs(self, fn: Callable):
        return MultiPoly(self.vars, {e: fn(c) for e, c in self.terms.items()})

    def subs(self, values: Mapping[str, object], drop: bool = True):
        """Substitute numbers for some variables.

        With ``drop`` the substituted variables are removed from the result's
        variable tuple.
        """
        idx = [i for i, v in enumerate(self.vars) if v in values]
        keep = [i for i, v in enumerate(self.vars) if v not in values]
        vals = [values[self.vars[i]] for i in idx]
        out: dict = {}
        for e, c in self.terms.items():
            term = c
            for i, x in zip(idx, vals):
                if e[i]:
                    term = term * x ** e[i]
            if drop:
                ne = tuple(e[i] for i in keep)
            else:
                ne = tuple(0 if i in idx else e[i] for i in range(len(e)))
            out[ne] = out.get(ne, 0) + term
        newvars = tuple(self.vars[i] for i in keep) if drop else self.vars
        return MultiPoly(newvars, out)

    def coefficients_in(self, var: str) -> list["MultiPoly"]:
        """Coefficient polynomials of ``var**k`` (same variable tuple, ``var`` absent)."""
        k = self.vars.index(var)
        deg = self.degree(var)
        out = [dict() for _ in range(max(deg, 0) + 1)]
        for e, c in self.terms.items():
            ne = list(e)
            ne[k] = 0
            out[e[k]][tuple(ne)] = c
        return [MultiPoly(self.vars, d) for d in out]

    def to_uni(self, var: str | None = None) -> "UniPoly":
        if var is None:
            if len(self.vars) != 1:
                raise PolynomialError("variable must be given for a multivariate polynomial")
            var = self.vars[0]
        k = self.vars.index(var)
        deg = max(self.degree(var), 0)
        coeffs = [0] * (deg + 1)
        for e, c in self.terms.items():
            if any(x for i, x in enumerate(e) if i != k):
                raise PolynomialError(f"polynomial involves variables other than {var}")
            coeffs[e[k]] = c
        return UniPoly(coeffs, var)

    def with_vars(self, variables: Sequence[str]):
        """Re-embed into a larger (or reordered) variable tuple."""
        variables = tuple(variables)
        pos = [variables.index(v) for v in self.vars]
        out = {}
        for e, c in self.terms.items():
            ne = [0] * len(variables)
            for p, k in zip(pos, e):
                ne[p] = k
            out[tuple(ne)] = c
        return MultiPoly(variables, out)

    def __call__(self, *args, **kwargs):
        if args:
            return poly_eval(self, args[0] if len(args) == 1 and not _is_number(args[0]) else args)
        return poly_eval(self, kwargs)

    def compile(self):
        """Return ``(exps, coeffs)`` as float arrays for vectorised evaluation."""
        items = self.sorted_terms()
        exps = np.array([e for e, _ in items], dtype=np.int64).reshape(-1, len(self.vars))
        coeffs = np.array([float(c) for _, c in items], dtype=float)
        return exps, coeffs


def _is_number(x):
    return isinstance(x, (int, float, complex, Fraction, mpmath.mpf, mpmath.mpc, np.number))


def poly_eval(p: MultiPoly, point):
    """Evaluate ``p`` at a point given as a mapping name->value or a sequence."""
    if isinstance(point, Mapping):
        try:
            vals = [point[v] for v in p.vars]
        except KeyError as exc:
            raise PolynomialError(f"no value given for variable {exc.args[0]!r}") from None
    else:
        vals = list(point)
        if len(vals) != len(p.vars):
            raise PolynomialError(f"expected {len(p.vars)} values, got {len(vals)}")
    if not p.terms:
        return 0
    maxdeg = [0] * len(vals)
    for e in p.terms:
        for i, k in enumerate(e):
            if k > maxdeg[i]:
                maxdeg[i] = k
    powers = []
    for x, m in zip(vals, maxdeg):
        pw = [1]
        for _ in range(m):
            pw.append(pw[-1] * x)
        powers.append(pw)
    total = 0
    for e, c in p.terms.items():
        t = c
        for i, k in enumerate(e):
            if k:
                t = t * powers[i][k]
        total = total + t
    return total


class UniPoly:
    """Dense univariate polynomial, ``coeffs[k]`` multiplies ``x**k``."""

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Iterable, var: str = "x"):
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)
        self.var = var

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    @property
    def lc(self):
        return self.coeffs[-1]

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other):
        if isinstance(other, UniPoly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"UniPoly({list(self.coeffs)!r}, {self.var!r})"

    def __add__(self, other):
        other = other if isinstance(other, UniPoly) else UniPoly([other], self.var)
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return UniPoly([x + y for x, y in zip(a, b)], self.var)

    __radd__ = __add__

    def __neg__(self):
        return UniPoly([-c for c in self.coeffs], self.var)

    def __sub__(self, other):
        other = other if isinstance(other, UniPoly) else UniPoly([other], self.var)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, UniPoly):
            return UniPoly([c * other for c in self.coeffs], self.var)
        if self.is_zero() or other.is_zero():
            return UniPoly([], self.var)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UniPoly(out, self.var)

    __rmul__ = __mul__

    def derivative(self):
        return UniPoly([k * c for k, c in enumerate(self.coeffs)][1:], self.var)

    def divmod(self, other: "UniPoly"):
        if other.is_zero():
            raise PolynomialError("division by zero polynomial")
        exact = all(is_exact(c) for c in self.coeffs + other.coeffs)
        r = [Fraction(c) if exact else c for c in self.coeffs]
        q = [0] * max(len(r) - len(other.coeffs) + 1, 0)
        lc = Fraction(other.lc) if exact else other.lc
        dd = other.degree
        for k in range(len(r) - 1, dd - 1, -1):
            f = r[k] / lc
            q[k - dd] = f
            if f != 0:
                for j, c in enumerate(other.coeffs):
                    r[k - dd + j] -= f * c
            r[k] = 0
        return UniPoly(q, self.var), UniPoly(r[:dd], self.var)

    def monic(self):
        if self.is_zero():
            return self
        lc = Fraction(self.lc) if is_exact(self.lc) else self.lc
        return UniPoly([c / lc for c in self.coeffs], self.var)

    def to_multi(self, variables=None):
        variables = tuple(variables) if variables else (self.var,)
        k = variables.index(self.var)
        terms = {}
        for d, c in enumerate(self.coeffs):
            e = [0] * len(variables)
            e[k] = d
            terms[tuple(e)] = c
        return MultiPoly(variables, terms)

    def norm(self):
        return math.sqrt(sum(float(abs(c)) ** 2 for c in self.coeffs))


# ---------------------------------------------------------------------------
# determinants and resultants


def det_poly(matrix: Sequence[Sequence]):
    """Division-free determinant by Laplace expansion over column subsets.

    Works for any commutative ring elements (numbers or ``MultiPoly``).
    Cost is ``O(n 2^n)`` ring multiplications, fine for ``n <= 12``.
    """
    n = len(matrix)
    if n == 0:
        return 1
    if any(len(row) != n for row in matrix):
        raise PolynomialError("matrix must be square")
    table = _laplace_table(matrix, n)
    return table.get((1 << n) - 1, 0)


def _laplace_table(matrix, nrows):
    """Minors of the first ``popcount(mask)`` rows on column set ``mask``."""
    ncols = len(matrix[0])
    table = {0: 1}
    layer = [0]
    for k in range(nrows):
        nxt = {}
        row = matrix[k]
        for mask in layer:
            sub = table[mask]
            if _is_zero(sub):
                continue
            for c in range(ncols):
                if mask >> c & 1:
                    continue
                entry = row[c]
                if _is_zero(entry):
                    continue
                new = mask | (1 << c)
                above = bin(mask >> (c + 1)).count("1")
                term = entry * sub
                if above & 1:
                    term = -term
                if new in nxt:
                    nxt[new] = nxt[new] + term
                else:
                    nxt[new] = term
        table.update(nxt)
        layer = list(nxt)
    return table


def _is_zero(x):
    if isinstance(x, MultiPoly):
        return x.is_zero()
    return x == 0


def minors_maximal(matrix: Sequence[Sequence]) -> list:
    """All maximal minors of an ``n x (n+1)`` matrix; entry ``j`` drops column ``j``."""
    n = len(matrix)
    ncols = len(matrix[0])
    if ncols != n + 1:
        raise PolynomialError("expected an n x (n+1) matrix")
    table = _laplace_table(matrix, n)
    full = (1 << ncols) - 1
    return [table.get(full & ~(1 << j), 0) for j in range(ncols)]


def sylvester_resultant(p: MultiPoly, q: MultiPoly, var: str) -> MultiPoly:
    """Resultant of ``p`` and ``q`` with respect to ``var``.

    Returned in the same variable tuple; ``var`` no longer occurs.
    """
    if p.vars != q.vars:
        raise PolynomialError("variable mismatch")
    m, n = p.degree(var), q.degree(var)
    if m < 1 or n < 1:
        raise PolynomialError(f"both polynomials need positive degree in {var}")
    pc = p.coefficients_in(var)[::-1]
    qc = q.coefficients_in(var)[::-1]
    zero = MultiPoly(p.vars)
    size = m + n
    rows = []
    for i in range(n):
        rows.append([zero] * i + pc + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + qc + [zero] * (size - n - 1 - i))
    res = det_poly(rows)
    if not isinstance(res, MultiPoly):
        res = MultiPoly.const(res, p.vars)
    return res


def poly_divide_exact(n: MultiPoly, d: MultiPoly, tol: float = 0.0) -> MultiPoly:
    """Quotient ``q`` with ``n == q*d``; raise if the division is not exact.

    ``tol`` (floating coefficients only) discards remainder terms whose
    magnitude is below ``tol`` times the largest coefficient of ``n``.
    """
    if d.is_zero():
        raise PolynomialError("division by zero polynomial")
    if n.vars != d.vars:
        raise PolynomialError("variable mismatch")
    exact = all(is_exact(c) for c in list(n.terms.values()) + list(d.terms.values()))
    lt_exp, lt_c = d.leading_term()
    if exact:
        lt_c = Fraction(lt_c)
    rem = dict(n.terms)
    quot: dict = {}
    leftover: dict = {}
    floor = tol * float(n.max_abs_coeff()) if tol else 0.0
    while rem:
        exp = max(rem, key=_grlex_key)
        c = rem.pop(exp)
        if not exact and floor and abs(c) <= floor:
            continue
        if all(a >= b for a, b in zip(exp, lt_exp)):
            qe = tuple(a - b for a, b in zip(exp, lt_exp))
            qc = c / lt_c
            quot[qe] = quot.get(qe, 0) + qc
            for de, dc in d.terms.items():
                if de == lt_exp:
                    continue
                e = tuple(a + b for a, b in zip(qe, de))
                v = rem.get(e, 0) - qc * dc
                if v == 0:
                    rem.pop(e, None)
                else:
                    rem[e] = v
        else:
            leftover[exp] = c
    if leftover:
        norm = math.sqrt(sum(float(abs(c)) ** 2 for c in leftover.values()))
        err = PolynomialError(f"division is not exact (remainder norm {norm:.3e})")
        err.remainder_norm = norm
        raise err
    return MultiPoly(n.vars, quot)


# ---------------------------------------------------------------------------
# univariate root finding


def _aberth_numpy(c: np.ndarray, maxiter: int = 500):
    """Aberth-Ehrlich iteration; ``c`` ascending complex coefficients, monic-safe."""
    n = len(c) - 1
    p = c[::-1]  # descending for polyval
    dp = np.polyder(p)
    # Initial points on a circle sized by the Fujiwara bound, rotated off axes.
    a = np.abs(c[:-1] / c[-1])
    ks = np.arange(n, 0, -1)
    radius = 2.0 * np.max(a ** (1.0 / ks))
    radius = radius if radius > 0 else 1.0
    z = radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    converged = False
    for _ in range(maxiter):
        pz = np.polyval(p, z)
        dpz = np.polyval(dp, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pz / dpz
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            s = inv.sum(axis=1)
            step = ratio / (1.0 - ratio * s)
        if not np.all(np.isfinite(step)):
            break
        z = z - step
        if np.all(np.abs(step) <= 1e-15 * np.maximum(1.0, np.abs(z))):
            converged = True
            break
    return z, converged


def _newton_polish(c, z, steps=3):
    p = c[::-1]
    dp = np.polyder(p)
    for _ in range(steps):
        pz = np.polyval(p, z)
        dpz = np.polyval(dp, z)
        ok = dpz != 0
        new = z.copy()
        new[ok] = z[ok] - pz[ok] / dpz[ok]
        better = np.abs(np.polyval(p, new)) < np.abs(pz)
        z = np.where(better, new, z)
    return z


def _expansion_error(c, z):
    """Relative coefficient error of ``lc * prod(x - z_k)`` against ``c``."""
    q = c[-1] * np.poly(z)
    return float(np.abs(q[::-1] - c).max() / np.abs(c).max())


def _residual_ok(c, z, rtol=1e-12):
    n = len(c) - 1
    p = c[::-1]
    norm = np.linalg.norm(c)
    r = np.abs(np.polyval(p, z)) / (norm * np.maximum(1.0, np.abs(z)) ** n)
    return r < rtol


def uni_roots(p: UniPoly, precision: int | None = None) -> list:
    """All complex roots of ``p`` with multiplicity, sorted by (real, imag).

    Aberth iteration in double precision, eigenvalue fallback, Newton polish.
    With ``precision`` (bits) the roots are further polished in mpmath on the
    original coefficients and returned as ``mpmath.mpc``.
    """
    if p.is_zero():
        raise PolynomialError("zero polynomial has no well-defined roots")
    if p.degree < 1:
        raise PolynomialError("constant polynomial has no roots")
    coeffs = list(p.coeffs)
    nzero = 0
    while coeffs[0] == 0:
        coeffs.pop(0)
        nzero += 1
    roots = [0j] * nzero
    if len(coeffs) > 1:
        scale = max(abs(complex(c)) for c in coeffs)
        c = np.array([complex(x) / scale for x in coeffs], dtype=complex)
        if len(c) == 2:
            z = np.array([-c[0] / c[1]])
        else:
            z, ok = _aberth_numpy(c)
            if not ok or not np.all(_residual_ok(c, z, 1e-10)):
                z = np.roots(c[::-1]).astype(complex)
            z = _newton_polish(c, z)
            if _expansion_error(c, z) > 1e-12:
                # Root clusters: eigenvalues are backward stable where Aberth is not.
                eig = np.roots(c[::-1]).astype(complex)
                z = min((z, eig, _newton_polish(c, eig)), key=lambda r: _expansion_error(c, r))
        roots.extend(complex(x) for x in z)
    if precision and precision > 53:
        with mpmath.workprec(precision):
            mp_coeffs = [_to_mpf(c) for c in p.coeffs]
            roots = [_mp_polish(mp_coeffs, mpmath.mpc(r)) for r in roots]
            roots = [+r for r in roots]
    return sorted(roots, key=lambda r: (float(r.real), float(r.imag)))


def _to_mpf(c):
    if isinstance(c, Fraction):
        return mpmath.mpf(c.numerator) / c.denominator
    return mpmath.mpf(c)


def _mp_polish(coeffs, z, steps=60):
    def ev(x):
        acc = mpmath.mpc(0)
        dacc = mpmath.mpc(0)
        for c in reversed(coeffs):
            dacc = dacc * x + acc
            acc = acc * x + c
        return acc, dacc

    eps = mpmath.mpf(2) ** (-mpmath.mp.prec + 8)
    for _ in range(steps):
        f, df = ev(z)
        if df == 0:
            break
        step = f / df
        z = z - step
        if abs(step) <= eps * max(1, abs(z)):
            break
    return z


# ---------------------------------------------------------------------------
# gcd


def _subresultant_prs_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    if a.degree < b.degree:
        a, b = b, a
    a = UniPoly([Fraction(c) for c in a.coeffs], a.var)
    b = UniPoly([Fraction(c) for c in b.coeffs], b.var)
    g = h = Fraction(1)
    while not b.is_zero():
        delta = a.degree - b.degree
        # pseudo-remainder prem(a, b) = lc(b)^(delta+1) a mod b
        _, r = (a * (b.lc ** (delta + 1))).divmod(b)
        a = b
        if r.is_zero():
            break
        b = r * (1 / (g * h ** delta))
        g = a.lc
        h = h ** (1 - delta) * g ** delta
    return a.monic()


def _sylvester_matrix(a, b):
    m, n = len(a) - 1, len(b) - 1
    size = m + n
    S = np.zeros((size, size), dtype=float)
    ad = np.array(a[::-1], dtype=float)
    bd = np.array(b[::-1], dtype=float)
    for i in range(n):
        S[i, i:i + m + 1] = ad
    for i in range(m):
        S[n + i, i:i + n + 1] = bd
    return S


def _float_gcd(a: UniPoly, b: UniPoly, tol: float) -> UniPoly:
    ca = np.array([complex(c).real for c in a.coeffs], dtype=float)
    cb = np.array([complex(c).real for c in b.coeffs], dtype=float)
    ca /= np.linalg.norm(ca)
    cb /= np.linalg.norm(cb)
    m, n = len(ca) - 1, len(cb) - 1
    if m == 0 or n == 0:
        return UniPoly([1.0], a.var)
    S = _sylvester_matrix(ca, cb)
    sv = np.linalg.svd(S, compute_uv=False)
    rank = int(np.sum(sv > tol * sv[0]))
    k = m + n - rank
    if k <= 0:
        return UniPoly([1.0], a.var)
    # cofactors: a*v = b*w with deg v = n-k, deg w = m-k (ascending coefficients)
    nv, nw = n - k + 1, m - k + 1
    A = np.zeros((m + n - k + 1, nv + nw))
    for j in range(nv):
        A[j:j + m + 1, j] += ca
    for j in range(nw):
        A[j:j + n + 1, nv + j] -= cb
    _, _, vt = np.linalg.svd(A)
    null = vt[-1]
    w = null[nv:]
    # a = g * w  ->  least-squares deconvolution for g
    C = np.zeros((m + 1, k + 1))
    for j in range(k + 1):
        C[j:j + nw, j] = w
    g, *_ = np.linalg.lstsq(C, ca, rcond=None)
    g = g / g[-1]
    return UniPoly([float(x) for x in g], a.var)


def uni_gcd(p: UniPoly, q: UniPoly, tol: float = 1e-8) -> UniPoly:
    """Monic greatest common divisor.

    Exact coefficients: subresultant PRS.  Floating coefficients: numerical
    rank of the Sylvester matrix decides the degree (threshold ``tol``
    relative to the largest singular value).
    """
    if p.is_zero() or q.is_zero():
        raise PolynomialError("gcd needs nonzero polynomials")
    if all(is_exact(c) for c in p.coeffs + q.coeffs):
        return _subresultant_prs_gcd(p, q)
    return _float_gcd(p, q, tol)


# ---------------------------------------------------------------------------
# interpolation


def interpolate_uni(fn: Callable, degree_bound: int, nodes: Sequence, var: str = "x",
                    rtol: float = 1e-9) -> UniPoly:
    """Interpolating polynomial of degree <= ``degree_bound``.

    The first ``degree_bound + 1`` nodes define it; any further nodes are
    checked (exactly for rational data, to ``rtol`` otherwise).
    """
    nodes = list(nodes)
    if len(set(nodes)) != len(nodes):
        raise PolynomialError("interpolation nodes must be distinct")
    if len(nodes) < degree_bound + 1:
        raise PolynomialError("not enough interpolation nodes")
    values = [fn(x) for x in nodes]
    exact = all(is_exact(x) for x in nodes) and all(is_exact(v) for v in values)
    conv = Fraction if exact else (lambda t: t)
    xs = [conv(x) for x in nodes[: degree_bound + 1]]
    dd = [conv(v) for v in values[: degree_bound + 1]]
    n = len(xs)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j])
    poly = UniPoly([dd[-1]], var)
    for i in range(n - 2, -1, -1):
        poly = poly * UniPoly([-xs[i], 1], var) + dd[i]
    scale = max((abs(v) for v in values), default=0)
    for x, v in zip(nodes[degree_bound + 1:], values[degree_bound + 1:]):
        got = poly(conv(x))
        if exact:
            if got != v:
                raise PolynomialError("samples are not consistent with the degree bound")
        elif abs(got - v) > rtol * max(scale, 1e-300):
            raise PolynomialError("samples are not consistent with the degree bound")
    return poly
