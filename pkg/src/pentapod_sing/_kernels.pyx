# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled batched KKT Newton kernel (same algorithm as ``_kernels_py``)."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, isfinite

cnp.import_array()

DEF MAXN = 8
DEF MAXDEG = 8

cdef enum:
    CONVERGED = 0
    MAXITER = 1
    DIVERGED = 2
    SINGULAR = 3


cdef struct Problem:
    const long long* exps
    const double* coeffs
    int m
    const double* W
    const double* target
    const long long* free
    int nf
    int n
    int use_G


cdef void poly_derivs(const Problem* P, const double* z, double* val, double* grad, double* hess) noexcept nogil:
    cdef double pw[6][MAXDEG + 1]
    cdef int i, j, k, t, e, ej, ek
    cdef double c, prod, g, h
    for i in range(6):
        pw[i][0] = 1.0
        for e in range(1, MAXDEG + 1):
            pw[i][e] = pw[i][e - 1] * z[i]
    val[0] = 0.0
    for i in range(6):
        grad[i] = 0.0
        for j in range(6):
            hess[i * 6 + j] = 0.0
    for t in range(P.m):
        c = P.coeffs[t]
        prod = c
        for i in range(6):
            prod *= pw[i][P.exps[t * 6 + i]]
        val[0] += prod
        for j in range(6):
            ej = <int>P.exps[t * 6 + j]
            if ej == 0:
                continue
            g = c * ej * pw[j][ej - 1]
            for i in range(6):
                if i != j:
                    g *= pw[i][P.exps[t * 6 + i]]
            grad[j] += g
            for k in range(j, 6):
                ek = <int>P.exps[t * 6 + k]
                if k == j:
                    if ej < 2:
                        continue
                    h = c * ej * (ej - 1) * pw[j][ej - 2]
                    for i in range(6):
                        if i != j:
                            h *= pw[i][P.exps[t * 6 + i]]
                else:
                    if ek == 0:
                        continue
                    h = c * ej * pw[j][ej - 1] * ek * pw[k][ek - 1]
                    for i in range(6):
                        if i != j and i != k:
                            h *= pw[i][P.exps[t * 6 + i]]
                hess[j * 6 + k] += h
                if k != j:
                    hess[k * 6 + j] += h


cdef void residual_jacobian(const Problem* P, const double* x, double* R, double* J, int want_J) noexcept nogil:
    cdef double z[6]
    cdef double val
    cdef double grad[6]
    cdef double hess[36]
    cdef int a, b, i, ia, ib, n = P.n, nf = P.nf
    cdef double lamF = x[n - 1]
    cdef double lamG = x[nf] if P.use_G else 0.0
    cdef double s
    for i in range(6):
        z[i] = P.target[i]
    for a in range(nf):
        z[P.free[a]] = x[a]
    poly_derivs(P, z, &val, grad, hess)
    for a in range(nf):
        ia = <int>P.free[a]
        s = 0.0
        for i in range(6):
            s += P.W[ia * 6 + i] * (z[i] - P.target[i])
        R[a] = 2.0 * s + lamF * grad[ia]
        if ia < 3:
            R[a] += 2.0 * lamG * z[ia]
    if P.use_G:
        R[nf] = z[0] * z[0] + z[1] * z[1] + z[2] * z[2] - 1.0
    R[n - 1] = val
    if not want_J:
        return
    for a in range(n * n):
        J[a] = 0.0
    for a in range(nf):
        ia = <int>P.free[a]
        for b in range(nf):
            ib = <int>P.free[b]
            J[a * n + b] = 2.0 * P.W[ia * 6 + ib] + lamF * hess[ia * 6 + ib]
        if ia < 3:
            J[a * n + a] += 2.0 * lamG
            if P.use_G:
                J[a * n + nf] = 2.0 * z[ia]
                J[nf * n + a] = 2.0 * z[ia]
        J[a * n + n - 1] = grad[ia]
        J[(n - 1) * n + a] = grad[ia]


cdef int gauss_solve(double* A, double* b, int n) noexcept nogil:
    """Solve ``A y = b`` in place (partial pivoting); returns 0 when singular."""
    cdef int i, j, k, p
    cdef double best, f, tmp
    for k in range(n):
        p = k
        best = fabs(A[k * n + k])
        for i in range(k + 1, n):
            if fabs(A[i * n + k]) > best:
                best = fabs(A[i * n + k])
                p = i
        if best == 0.0:
            return 0
        if p != k:
            for j in range(n):
                tmp = A[k * n + j]
                A[k * n + j] = A[p * n + j]
                A[p * n + j] = tmp
            tmp = b[k]
            b[k] = b[p]
            b[p] = tmp
        for i in range(k + 1, n):
            f = A[i * n + k] / A[k * n + k]
            if f != 0.0:
                for j in range(k, n):
                    A[i * n + j] -= f * A[k * n + j]
                b[i] -= f * b[k]
    for i in range(n - 1, -1, -1):
        tmp = b[i]
        for j in range(i + 1, n):
            tmp -= A[i * n + j] * b[j]
        b[i] = tmp / A[i * n + i]
    return 1


cdef inline double half_sq(const double* r, int n) noexcept nogil:
    cdef double s = 0.0
    cdef int i
    for i in range(n):
        s += r[i] * r[i]
    return 0.5 * s


cdef inline double inf_norm(const double* r, int n) noexcept nogil:
    cdef double s = 0.0
    cdef int i
    for i in range(n):
        if fabs(r[i]) > s or r[i] != r[i]:
            s = fabs(r[i])
    return s


cdef signed char newton_one(const Problem* P, double* x, int maxit, double tol,
                            int max_halvings, double max_norm, double* rnorm_out) noexcept nogil:
    cdef double R[MAXN]
    cdef double Rt[MAXN]
    cdef double J[MAXN * MAXN]
    cdef double step[MAXN]
    cdef double trial[MAXN]
    cdef int n = P.n, it, h, i
    cdef double phi, t, rn, sc
    residual_jacobian(P, x, R, J, 1)
    rn = inf_norm(R, n)
    for it in range(maxit):
        sc = 1.0 + inf_norm(x, n)
        if rn < tol * sc * sc:
            rnorm_out[0] = rn
            return CONVERGED
        for i in range(n):
            step[i] = R[i]
        if not gauss_solve(J, step, n):
            rnorm_out[0] = rn
            return SINGULAR
        phi = half_sq(R, n)
        t = 1.0
        for h in range(max_halvings + 1):
            for i in range(n):
                trial[i] = x[i] - t * step[i]
            residual_jacobian(P, trial, Rt, J, 0)
            if half_sq(Rt, n) < phi:
                break
            t *= 0.5
        for i in range(n):
            x[i] = trial[i]
        residual_jacobian(P, x, R, J, 1)
        rn = inf_norm(R, n)
        for i in range(n):
            if not isfinite(x[i]) or fabs(x[i]) > max_norm:
                rnorm_out[0] = rn
                return DIVERGED
    rnorm_out[0] = rn
    sc = 1.0 + inf_norm(x, n)
    if rn < tol * sc * sc:
        return CONVERGED
    return MAXITER


def kkt_newton_batch(exps, coeffs, W, target, free, bint use_G, X0, int maxit=60, double tol=1e-15,
                     int max_halvings=12, double max_norm=1e7):
    """Damped Newton from every row of ``X0``; see ``_kernels_py.kkt_newton_batch``."""
    cdef cnp.ndarray[long long, ndim=2, mode="c"] E = np.ascontiguousarray(exps, dtype=np.int64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] C = np.ascontiguousarray(coeffs, dtype=float)
    cdef cnp.ndarray[double, ndim=2, mode="c"] Wm = np.ascontiguousarray(W, dtype=float)
    cdef cnp.ndarray[double, ndim=1, mode="c"] T = np.ascontiguousarray(target, dtype=float)
    cdef cnp.ndarray[long long, ndim=1, mode="c"] Fr = np.ascontiguousarray(free, dtype=np.int64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] X = np.array(X0, dtype=float, order="C", copy=True)
    cdef Py_ssize_t N = X.shape[0], k
    cdef cnp.ndarray[signed char, ndim=1] status = np.empty(N, dtype=np.int8)
    cdef cnp.ndarray[double, ndim=1] rnorm = np.empty(N, dtype=float)
    cdef Problem P
    if E.shape[1] != 6:
        raise ValueError("exponent rows must have six entries")
    if E.shape[0] and E.max() > MAXDEG:
        raise ValueError("polynomial degree too high for the compiled kernel")
    P.exps = &E[0, 0] if E.shape[0] else NULL
    P.coeffs = &C[0] if C.shape[0] else NULL
    P.m = E.shape[0]
    P.W = &Wm[0, 0]
    P.target = &T[0]
    P.free = &Fr[0]
    P.nf = Fr.shape[0]
    P.use_G = use_G
    P.n = P.nf + (1 if use_G else 0) + 1
    if X.shape[1] != P.n or P.n > MAXN:
        raise ValueError("start vectors have the wrong length")
    with nogil:
        for k in range(N):
            status[k] = newton_one(&P, &X[k, 0], maxit, tol, max_halvings, max_norm, &rnorm[k])
    return X, status, rnorm
