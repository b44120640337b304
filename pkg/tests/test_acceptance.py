"""Acceptance suite: one PASS/FAIL line per criterion.

Run under pytest (lines appear in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""
import sys
import time
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pentapod_sing.distance import (  # noqa: E402
    MetricContext,
    MultistartOptions,
    closest_equiform,
    closest_fixed_orientation,
    closest_fixed_position,
    closest_general,
    fixed_orientation_problem,
    fixed_position_problem,
    general_problem,
    metric_d,
)
from pentapod_sing.errors import ArchitectureError, LineOnQuadricError  # noqa: E402
from pentapod_sing.pentapod import (  # noqa: E402
    SUPPORT_TEMPLATE,
    Architecture,
    Configuration,
    extract_F,
    minors,
    normalized_minors,
)
from pentapod_sing.polyalg import poly_divide_exact  # noqa: E402
from pentapod_sing.ratparam import param_inverse, param_point, sample_parameters, solve_a, stereographic  # noqa: E402
from pentapod_sing.reference import REFERENCE_ARCHITECTURE, REFERENCE_POSE  # noqa: E402
from reference_data import (  # noqa: E402
    D_O_G,
    D_P_G,
    EQUIFORM_ROWS,
    EQUIFORM_MIN_POSITION,
    GENERAL_MIN_POSITION,
    FIXED_ORIENTATION_ROWS,
    FIXED_POSITION_ROWS,
    GENERAL_ROWS,
)

ARCH, G = REFERENCE_ARCHITECTURE, REFERENCE_POSE


@lru_cache(maxsize=None)
def reference_model():
    return extract_F(ARCH)


def timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


def verdict(ok, number, title, detail):
    return ok, f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}"


def criterion_1():
    model, secs = timed(extract_F, ARCH)
    F = model.F
    degree_ok = F.total_degree() == 3
    support_ok = F.monomials() <= set(SUPPORT_TEMPLATE)
    remainders_zero = True
    for m in minors(ARCH):
        try:
            poly_divide_exact(m, F)
        except Exception:
            remainders_zero = False
    ok = degree_ok and support_ok and remainders_zero and secs < 60
    return verdict(ok, 1, "F extraction",
                   f"degree {F.total_degree()}, {len(F.terms)} terms within the 43-monomial template={support_ok}, "
                   f"exact division of all six minors={remainders_zero}, {secs:.1f} s (< 60 s)")


def criterion_2():
    model = reference_model()
    t0 = time.perf_counter()
    ts = sample_parameters(10_000, 10.0, seed=0)
    worst_F = worst_minor = worst_rel = worst_abs = 0.0
    skipped = over = 0
    worst_slope = None
    for t in ts:
        t = tuple(float(x) for x in t)
        try:
            c = param_point(model, t)
        except LineOnQuadricError:
            skipped += 1
            continue
        z = c.as_array()
        worst_F = max(worst_F, model.normalized_value(z))
        worst_minor = max(worst_minor, normalized_minors(ARCH, c).max())
        z2 = param_point(model, param_inverse(model, c)).as_array()
        err = np.abs(z2 - z).max()
        worst_abs = max(worst_abs, err)
        rel = err / max(1.0, np.abs(z).max())
        over += rel >= 1e-9
        if rel > worst_rel:
            worst_rel, worst_slope = rel, solve_a(model, t).slope
    secs = time.perf_counter() - t0
    ok = worst_F < 1e-9 and worst_minor < 1e-8 and worst_rel < 1e-9 and secs < 30 and skipped == 0
    return verdict(ok, 2, "parametrization residuals",
                   f"10^4 samples ({skipped} excluded), max normalized |F| {worst_F:.1e} (< 1e-9), "
                   f"max normalized minor {worst_minor:.1e} (< 1e-8), round-trip pose error {worst_rel:.1e} "
                   f"relative / {worst_abs:.1e} absolute (< 1e-9; {over} samples over, worst at bundle slope "
                   f"{worst_slope:.1e}), {secs:.1f} s (< 30 s)")


def criterion_3():
    model = reference_model()
    ps, secs = timed(closest_fixed_orientation, model, ARCH, G)
    count_ok = len(ps) == 4
    worst = max((np.abs(np.r_[q.pose.position, q.distance] - np.r_[row[:3], row[4]]).max()
                 for q, row in zip(ps, FIXED_ORIENTATION_ROWS)), default=np.inf)
    deg = ps.info["degree"]
    ok = count_ok and worst < 1e-6 and deg == 6 and secs < 5
    return verdict(ok, 3, "fixed-orientation table",
                   f"{len(ps)} real solutions (4), max |(px,py,pz,l) diff| {worst:.1e} (< 1e-6), "
                   f"deg K = {deg} (6), {secs:.2f} s (< 5 s)")


def criterion_4():
    model = reference_model()
    ps, secs = timed(closest_fixed_position, model, ARCH, G)
    deg = ps.info["degree"]
    nroots = len(ps.info["roots"])
    pose_diff = s_diff = np.inf
    if len(ps) == len(FIXED_POSITION_ROWS):
        pose_diff = max(np.abs(np.array(q.pose.orientation, float) - row[:3]).max() for q, row in zip(ps, FIXED_POSITION_ROWS))
        s_diff = max(abs(q.distance - row[5]) for q, row in zip(ps, FIXED_POSITION_ROWS))
    ok = deg == 8 and nroots == 8 and len(ps) == 2 and pose_diff < 1e-6 and s_diff < 1e-5 and secs < 10
    s_text = ", ".join(f"{q.distance:.6f}" for q in ps)
    return verdict(ok, 4, "fixed-position table",
                   f"univariate degree {deg} with {nroots} roots (8), {len(ps)} real (2), "
                   f"max |(u,v,w) diff| {pose_diff:.1e} (< 1e-6), max |s diff| {s_diff:.1e} deg (< 1e-5), "
                   f"s = [{s_text}] vs reference [{FIXED_POSITION_ROWS[0][5]}, {FIXED_POSITION_ROWS[1][5]}], {secs:.2f} s (< 10 s)")


def criterion_5():
    model = reference_model()
    ps, secs = timed(closest_general, model, ARCH, G)
    d_diff = np.inf
    if len(ps) == len(GENERAL_ROWS):
        d_diff = max(abs(q.distance - row[4]) for q, row in zip(ps, GENERAL_ROWS))
    q = ps.minimizer
    min_diff = np.abs(q.as_array() - np.r_[GENERAL_ROWS[0][:3], GENERAL_MIN_POSITION]).max()
    ok = len(ps) == 16 and d_diff < 1e-6 and min_diff < 1e-6 and secs < 120
    return verdict(ok, 5, "general-metric table",
                   f"{len(ps)} distinct real pedal points (16), max |d diff| {d_diff:.1e} (< 1e-6), "
                   f"minimizer pose diff {min_diff:.1e} (< 1e-6), {secs:.1f} s at 5000 starts (< 120 s)")


def criterion_6():
    model = reference_model()
    ps, secs = timed(closest_equiform, model, ARCH, G)
    d_diff = mu_diff = np.inf
    if len(ps) == len(EQUIFORM_ROWS):
        d_diff = max(abs(q.distance - row[4]) for q, row in zip(ps, EQUIFORM_ROWS))
        mu_diff = max(abs(q.mu - row[5]) for q, row in zip(ps, EQUIFORM_ROWS))
    d_min = ps.minimizer.distance
    pos_diff = np.abs(np.array(ps.minimizer.pose.position, float) - EQUIFORM_MIN_POSITION).max()
    d_general = closest_general(model, ARCH, G).minimizer.distance
    ok = (len(ps) == 6 and d_diff < 1e-6 and mu_diff < 1e-6 and abs(d_min - 1.4517670618) < 1e-6
          and pos_diff < 1e-6 and d_min <= d_general and secs < 60)
    return verdict(ok, 6, "equiform table",
                   f"{len(ps)} real pedal points (6), max |d diff| {d_diff:.1e}, max |mu diff| {mu_diff:.1e} "
                   f"(< 1e-6), minimizer d = {d_min:.10f} (1.4517670618), position diff {pos_diff:.1e}, "
                   f"d_equiform {d_min:.6f} <= d_general {d_general:.6f}, {secs:.1f} s (< 60 s)")


def criterion_7():
    O = Configuration(G.orientation, FIXED_ORIENTATION_ROWS[0][:3], check_unit=False)
    P = Configuration(FIXED_POSITION_ROWS[0][:3], G.position, check_unit=False)
    d_og, d_pg = metric_d(ARCH, O, G), metric_d(ARCH, P, G)
    ctx = MetricContext.from_architecture(ARCH)
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(1000):
        a, b = (Configuration(tuple(i / np.linalg.norm(i)), tuple(10 * rng.standard_normal(3)))
                for i in rng.standard_normal((2, 3)))
        d1, d2 = metric_d(ARCH, a, b), ctx.distance(a, b)
        worst = max(worst, abs(d1 - d2) / max(1.0, d1))
    ok = abs(d_og - D_O_G) < 1e-3 and abs(d_pg - D_P_G) < 1e-3 and worst < 1e-12
    return verdict(ok, 7, "cross distances",
                   f"d(O,G) = {d_og:.4f} ({D_O_G}), d(P,G) = {d_pg:.4f} ({D_P_G}), "
                   f"closed form vs anchor-point sum max diff {worst:.1e} on 10^3 pairs (< 1e-12)")


def _fd_error(prob, x, h=1e-6):
    r = prob.residual(x)
    fd = np.empty_like(r)
    for k in range(len(x)):
        e = np.zeros_like(x)
        e[k] = h
        fd[k] = (prob.lagrangian(x + e) - prob.lagrangian(x - e)) / (2 * h)
    return np.linalg.norm(fd - r) / np.linalg.norm(r)


def criterion_8():
    model = reference_model()
    rng = np.random.default_rng(8)
    worst = {}
    for name in ("fixed orientation", "fixed position", "general"):
        errs = []
        for _ in range(100):
            i = rng.standard_normal(3)
            g = Configuration(tuple(i / np.linalg.norm(i)), tuple(rng.uniform(-5, 5, 3)))
            if name == "fixed orientation":
                prob = fixed_orientation_problem(model, g)
            elif name == "fixed position":
                prob = fixed_position_problem(model, g)
            else:
                prob = general_problem(model, ARCH, g)
            z = np.r_[rng.standard_normal(3), rng.uniform(-5, 5, 3)]
            x = np.r_[z[prob.free], rng.standard_normal(prob.size - len(prob.free))]
            errs.append(_fd_error(prob, x))
        worst[name] = max(errs)
    ok = all(v < 1e-6 for v in worst.values())
    return verdict(ok, 8, "gradient validation",
                   ", ".join(f"{k} max rel err {v:.1e}" for k, v in worst.items()) + " (< 1e-6, 100 configs each)")


def random_instance(seed):
    """Integer design and rational unit orientation; redraws degenerate designs."""
    rng = np.random.default_rng(seed)
    while True:
        base = [[0, 0, 0]] + rng.integers(-9, 10, size=(4, 3)).tolist()
        r = [0] + sorted(rng.choice(np.arange(1, 11), 4, replace=False).tolist())
        try:
            arch = Architecture(tuple(map(tuple, base)), tuple(r))
            break
        except ArchitectureError:
            continue
    t3, t4 = (Fraction(int(x), 5) for x in rng.integers(-10, 11, 2))
    pos = tuple(int(x) for x in rng.integers(-5, 6, 3))
    return arch, Configuration(stereographic(t3, t4), pos)


def _is_local_min(model, arch, g, q, use_G, rng, trials=50, step=1e-3):
    W = MetricContext.from_architecture(arch).gram()
    z0, t = q.as_array(), g.as_array().astype(float)
    for _ in range(trials):
        z = z0 + step * rng.standard_normal(6) / np.sqrt(6)
        for _ in range(50):
            rows, vals = [model.gradient(z)], [model.value(z)]
            if use_G:
                rows.append(np.r_[2 * z[:3], 0, 0, 0])
                vals.append(z[:3] @ z[:3] - 1)
            J = np.array(rows)
            dz = J.T @ np.linalg.solve(J @ J.T, np.array(vals))
            z = z - dz
            if np.abs(dz).max() < 1e-15 * (1 + np.abs(z).max()):
                break
        if np.sqrt((z - t) @ W @ (z - t)) < q.distance - 1e-12:
            return False
    return True


def criterion_9(seeds=range(5), starts=5000):
    rng = np.random.default_rng(99)
    notes, ok = [], True
    for seed in seeds:
        arch, g = random_instance(seed)
        model = extract_F(arch)
        for mode, fn, use_G in (("general", closest_general, True), ("equiform", closest_equiform, False)):
            a = fn(model, arch, g, MultistartOptions(starts=starts))
            b = fn(model, arch, g, MultistartOptions(starts=2 * starts))
            verified = all(q.residual < 1e-10 for q in list(a) + list(b))
            A = np.array([q.as_array() for q in a])
            extra = [q for q in b if np.abs(A - q.as_array()).max(axis=1).min() > 1e-6 * (1 + np.abs(A).max())]
            local_min = _is_local_min(model, arch, g, a.minimizer, use_G, rng)
            good = verified and not extra and local_min
            ok &= good
            note = f"seed {seed} {mode}: {len(a)} -> {len(b)}"
            if extra:
                note += " new d=" + "/".join(f"{q.distance:.1f}" for q in extra)
            if not (verified and local_min):
                note += f" verified={verified} local_min={local_min}"
            notes.append(note)
    return verdict(ok, 9, "random instances, doubled starts",
                   f"all points residual-verified stationary and minimizers local minima; "
                   f"N={starts} vs 2N: " + "; ".join(notes))


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
            criterion_8, criterion_9]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{k}" for k in range(1, 10)])
def test_acceptance(criterion, acceptance_log):
    ok, line = criterion()
    acceptance_log.append(line)
    print(line)
    assert ok, line


if __name__ == "__main__":
    results = []
    for criterion in CRITERIA:
        ok, line = criterion()
        print(line, flush=True)
        results.append(ok)
    sys.exit(0 if all(results) else 1)
