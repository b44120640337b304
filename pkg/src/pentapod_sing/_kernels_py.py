"""Vectorized numpy implementation of the batched KKT Newton kernel.

Unknowns are ``x = (z_free, [lambda_G], lambda_F)``; the stationarity
system is the gradient of

    L = (z - t)^T W (z - t) + lambda_G (u^2 + v^2 + w^2 - 1) + lambda_F F(z)

with respect to the free pose coordinates and the multipliers.  Pose
coordinates outside ``free`` are held at their ``target`` value.
"""
from __future__ import annotations

import numpy as np

CONVERGED, MAXITER, DIVERGED, SINGULAR = 0, 1, 2, 3


def poly_derivs_batch(exps: np.ndarray, coeffs: np.ndarray, Z: np.ndarray):
    """Value ``(N,)``, gradient ``(N, 6)`` and Hessian ``(N, 6, 6)`` at rows of ``Z``."""
    N, n = Z.shape
    maxd = int(exps.max(initial=0))
    pw = np.ones((N, n, maxd + 1))
    for e in range(1, maxd + 1):
        pw[:, :, e] = pw[:, :, e - 1] * Z
    cols = np.arange(n)
    base = pw[:, cols[None, :], exps]  # (N, m, n)
    val = np.prod(base, axis=2) @ coeffs
    grad = np.zeros((N, n))
    hess = np.zeros((N, n, n))
    first = []
    for j in range(n):
        ej = exps[:, j]
        t = base.copy()
        t[:, :, j] = np.where(ej > 0, ej * pw[:, j, np.maximum(ej - 1, 0)], 0.0)
        first.append(t)
        grad[:, j] = np.prod(t, axis=2) @ coeffs
    for j in range(n):
        ej = exps[:, j]
        for k in range(j, n):
            ek = exps[:, k]
            if k == j:
                if not (ej > 1).any():
                    continue
                s = base.copy()
                s[:, :, j] = np.where(ej > 1, ej * (ej - 1) * pw[:, j, np.maximum(ej - 2, 0)], 0.0)
            else:
                if not ((ej > 0) & (ek > 0)).any():
                    continue
                s = first[j].copy()
                s[:, :, k] = np.where(ek > 0, ek * pw[:, k, np.maximum(ek - 1, 0)], 0.0)
            h = np.prod(s, axis=2) @ coeffs
            hess[:, j, k] = h
            hess[:, k, j] = h
    return val, grad, hess


def _expand(X, target, free):
    Z = np.broadcast_to(target, (X.shape[0], 6)).copy()
    Z[:, free] = X[:, : len(free)]
    return Z


def kkt_residual_jacobian(exps, coeffs, W, target, free, use_G, X):
    """Residual ``(N, n)`` and Jacobian ``(N, n, n)`` of the KKT system."""
    free = np.asarray(free, dtype=np.int64)
    nf = len(free)
    N = X.shape[0]
    n = X.shape[1]
    Z = _expand(X, target, free)
    val, grad, hess = poly_derivs_batch(exps, coeffs, Z)
    lamF = X[:, -1]
    lamG = X[:, nf] if use_G else np.zeros(N)
    orient = (free < 3).astype(float)
    Wf = W[np.ix_(free, free)]
    Wfa = W[free, :]
    R = np.empty((N, n))
    R[:, :nf] = 2 * (Z - target) @ Wfa.T + 2 * lamG[:, None] * Z[:, free] * orient + lamF[:, None] * grad[:, free]
    J = np.zeros((N, n, n))
    J[:, :nf, :nf] = 2 * Wf + lamF[:, None, None] * hess[:, free[:, None], free[None, :]]
    J[:, np.arange(nf), np.arange(nf)] += 2 * lamG[:, None] * orient
    J[:, :nf, -1] = grad[:, free]
    J[:, -1, :nf] = grad[:, free]
    if use_G:
        G = (Z[:, :3] ** 2).sum(axis=1) - 1
        R[:, nf] = G
        J[:, :nf, nf] = 2 * Z[:, free] * orient
        J[:, nf, :nf] = 2 * Z[:, free] * orient
    R[:, -1] = val
    return R, J


def _scale(X):
    """Residual scale ``(1 + |x|_inf)^2`` used by the stopping test."""
    return (1.0 + np.abs(X).max(axis=1)) ** 2


def _residual_only(exps, coeffs, W, target, free, use_G, X):
    return kkt_residual_jacobian(exps, coeffs, W, target, free, use_G, X)[0]


def _solve_batch(J, R):
    try:
        return np.linalg.solve(J, R[:, :, None])[:, :, 0], np.zeros(len(R), dtype=bool)
    except np.linalg.LinAlgError:
        out = np.zeros_like(R)
        bad = np.zeros(len(R), dtype=bool)
        for k in range(len(R)):
            try:
                out[k] = np.linalg.solve(J[k], R[k])
            except np.linalg.LinAlgError:
                bad[k] = True
        return out, bad


def kkt_newton_batch(exps, coeffs, W, target, free, use_G, X0, maxit=60, tol=1e-15,
                     max_halvings=12, max_norm=1e7):
    """Damped Newton from every row of ``X0``.

    Each step backtracks on ``0.5 |r|^2`` by halving; when no trial decreases
    it, the smallest trial step is taken anyway.  A start has converged when
    ``|r|_inf < tol (1 + |x|_inf)^2``.  Returns the final iterates, a status
    code per start and the final residual infinity norm.
    """
    exps = np.ascontiguousarray(exps, dtype=np.int64)
    coeffs = np.ascontiguousarray(coeffs, dtype=float)
    W = np.ascontiguousarray(W, dtype=float)
    target = np.ascontiguousarray(target, dtype=float)
    free = np.ascontiguousarray(free, dtype=np.int64)
    X = np.array(X0, dtype=float, copy=True)
    N = X.shape[0]
    status = np.full(N, MAXITER, dtype=np.int8)
    active = np.ones(N, dtype=bool)
    R, J = kkt_residual_jacobian(exps, coeffs, W, target, free, use_G, X)
    rnorm = np.abs(R).max(axis=1)
    for _ in range(maxit):
        done = active & (rnorm < tol * _scale(X))
        status[done] = CONVERGED
        active &= ~done
        if not active.any():
            break
        idx = np.flatnonzero(active)
        step, bad = _solve_batch(J[idx], R[idx])
        if bad.any():
            status[idx[bad]] = SINGULAR
            active[idx[bad]] = False
            idx, step = idx[~bad], step[~bad]
        phi = 0.5 * (R[idx] ** 2).sum(axis=1)
        t = np.ones(len(idx))
        pending = np.ones(len(idx), dtype=bool)
        Xnew = X[idx].copy()
        for h in range(max_halvings + 1):
            sel = np.flatnonzero(pending)
            if sel.size == 0:
                break
            trial = X[idx[sel]] - t[sel, None] * step[sel]
            Rt = _residual_only(exps, coeffs, W, target, free, use_G, trial)
            ok = 0.5 * (Rt ** 2).sum(axis=1) < phi[sel]
            last = h == max_halvings
            take = ok | last
            Xnew[sel[take]] = trial[take]
            pending[sel[take]] = False
            t[sel[~take]] *= 0.5
        X[idx] = Xnew
        Rn, Jn = kkt_residual_jacobian(exps, coeffs, W, target, free, use_G, X[idx])
        R[idx] = Rn
        J[idx] = Jn
        rnorm[idx] = np.abs(Rn).max(axis=1)
        div = idx[~np.isfinite(X[idx]).all(axis=1) | (np.abs(X[idx]).max(axis=1) > max_norm)]
        status[div] = DIVERGED
        active[div] = False
    done = active & (rnorm < tol * _scale(X))
    status[done] = CONVERGED
    return X, status, rnorm
