"""Rational parametrization of the singularity variety and its inverse."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import LineOnQuadricError, NorthPoleError, NotSingularError
from .pentapod import Configuration, SingularityModel
from .polyalg import is_exact, poly_eval, to_exact


def _exact_inputs(*xs) -> bool:
    return all(is_exact(x) for x in xs)


def stereographic(t3, t4) -> tuple:
    """Point of the unit sphere for chart coordinates ``(t3, t4)``."""
    D = t3 * t3 + t4 * t4 + 1
    return (2 * t3 / D, 2 * t4 / D, (t3 * t3 + t4 * t4 - 1) / D)


def stereographic_partials(t3, t4) -> tuple:
    """Closed-form ``dx/dt3`` and ``dx/dt4`` of ``stereographic``."""
    D = t3 * t3 + t4 * t4 + 1
    D2 = D * D
    dx3 = (2 * (-t3 * t3 + t4 * t4 + 1) / D2, -4 * t3 * t4 / D2, 4 * t3 / D2)
    dx4 = (-4 * t3 * t4 / D2, 2 * (t3 * t3 - t4 * t4 + 1) / D2, 4 * t4 / D2)
    return dx3, dx4


def stereographic_inverse(i: Sequence, tol: float = 1e-12) -> tuple:
    """Chart coordinates of the unit vector ``i``; undefined at ``(0, 0, 1)``."""
    u, v, w = i
    if abs(float(w) - 1.0) <= tol:
        raise NorthPoleError("orientation (0, 0, 1) is not covered by the chart")
    den = 1 - w
    return (u / den, v / den)


def bundle_point(a, t: Sequence) -> tuple:
    """``a x(t3,t4) + t1 dx/dt3 + t2 dx/dt4``."""
    t1, t2, t3, t4 = t
    x = stereographic(t3, t4)
    dx3, dx4 = stereographic_partials(t3, t4)
    return tuple(a * x[k] + t1 * dx3[k] + t2 * dx4[k] for k in range(3))


@dataclass(frozen=True)
class LinearSolution:
    a: object
    slope: object
    offset: object


def _restricted(model: SingularityModel, t: Sequence, exact: bool):
    """Values of F on the bundle line at a = 0, 1, -1."""
    x = stereographic(t[2], t[3])
    out = []
    for a in (0, 1, -1):
        pose = tuple(x) + bundle_point(a, t)
        out.append(poly_eval(model.F, pose) if exact else model.value(np.array(pose, dtype=float)))
    return out


def solve_a(model: SingularityModel, t: Sequence, rtol: float = 1e-12) -> LinearSolution:
    """The bundle parameter ``a`` putting the point on the quadric of ``x(t3,t4)``.

    Raises ``LineOnQuadricError`` when the coefficient of ``a`` vanishes.
    """
    exact = _exact_inputs(*t)
    f0, f1, fm = _restricted(model, t, exact)
    slope = (f1 - fm) / 2
    quad = (f1 + fm) / 2 - f0
    scale = max(abs(float(f0)), abs(float(f1)), abs(float(fm)), 1e-300)
    if exact:
        if quad != 0:
            raise ArithmeticError("restriction of F to the bundle line is not linear")
        if slope == 0:
            raise LineOnQuadricError("the whole bundle line lies on the quadric")
    else:
        if abs(slope) <= rtol * scale:
            raise LineOnQuadricError("the whole bundle line lies on the quadric")
    return LinearSolution(-f0 / slope, slope, f0)


def param_point(model: SingularityModel, t: Sequence) -> Configuration:
    """Singular pose for parameters ``(t1, t2, t3, t4)``."""
    sol = solve_a(model, t)
    x = stereographic(t[2], t[3])
    p = bundle_point(sol.a, t)
    return Configuration(x, p, check_unit=not _exact_inputs(*t))


def param_inverse(model: SingularityModel, c: Configuration, tol: float = 1e-8) -> tuple:
    """Parameters ``(t1, t2, t3, t4)`` of a singular pose.

    The chart is conformal, so the two tangent vectors are orthogonal with
    equal squared length ``4 / D^2`` and ``t1, t2`` are plain projections.
    """
    pose = c.as_tuple()
    exact = _exact_inputs(*pose)
    if exact:
        if poly_eval(model.F, pose) != 0:
            raise NotSingularError("pose is not on the singularity variety")
    elif model.normalized_value(np.array(pose, dtype=float)) > tol:
        raise NotSingularError("pose is not on the singularity variety")
    t3, t4 = stereographic_inverse(c.orientation)
    dx3, dx4 = stereographic_partials(t3, t4)
    p = c.position
    n3 = sum(d * d for d in dx3)
    n4 = sum(d * d for d in dx4)
    t1 = sum(a * b for a, b in zip(p, dx3)) / n3
    t2 = sum(a * b for a, b in zip(p, dx4)) / n4
    return (t1, t2, t3, t4)


@dataclass(frozen=True)
class GridRecord:
    """One grid sample: the parameters and either a pose or the exclusion hit."""

    index: int
    t: tuple
    pose: Configuration | None
    skipped: str | None = None


def sample_parameters(n: int, box: float = 10.0, seed: int = 0) -> np.ndarray:
    """``n`` Halton points in ``[-box, box]^4``; ``seed`` skips a prefix."""
    from scipy.stats import qmc

    sampler = qmc.Halton(d=4, scramble=False)
    if seed:
        sampler.fast_forward(int(seed))
    pts = sampler.random(n)
    return (2 * pts - 1) * box


def param_grid(model: SingularityModel, n: int, box: float = 10.0, seed: int = 0) -> Iterator[GridRecord]:
    """Parametrized poses over a low-discrepancy grid, exclusions reported in place."""
    for k, t in enumerate(sample_parameters(n, box, seed)):
        t = tuple(float(x) for x in t)
        try:
            yield GridRecord(k, t, param_point(model, t))
        except LineOnQuadricError as exc:
            yield GridRecord(k, t, None, f"line-on-quadric: {exc}")


def exact_t(t: Sequence) -> tuple:
    return tuple(to_exact(x) for x in t)
