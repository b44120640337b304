import importlib

import numpy as np
import pytest

from pentapod_sing import _kernels_py, kernels
from pentapod_sing.distance import (
    fixed_orientation_problem,
    fixed_position_problem,
    general_problem,
    equiform_problem,
)

HAVE_CYTHON = "cython" in kernels.available_backends()
needs_cython = pytest.mark.skipif(not HAVE_CYTHON, reason="compiled kernel not built")


def problems(model, arch, pose_g):
    return {
        "fixed_orientation": fixed_orientation_problem(model, pose_g),
        "fixed_position": fixed_position_problem(model, pose_g),
        "general": general_problem(model, arch, pose_g),
        "equiform": equiform_problem(model, arch, pose_g),
    }


def starts(prob, n, seed):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-3, 3, size=(n, prob.size))
    return X


class TestBackendSelection:
    def test_python_always_available(self):
        assert "python" in kernels.available_backends()
        assert kernels.get_backend("python") is _kernels_py

    def test_unknown_backend(self):
        with pytest.raises(ValueError):
            kernels.get_backend("fortran")

    def test_env_forces_python(self, monkeypatch):
        monkeypatch.setenv("PENTAPOD_PURE_PYTHON", "1")
        assert kernels.backend_name() == "python"
        monkeypatch.setenv("PENTAPOD_PURE_PYTHON", "0")
        assert kernels.backend_name() == ("cython" if HAVE_CYTHON else "python")

    def test_fallback_when_extension_missing(self, monkeypatch):
        real_import = importlib.import_module

        def fake(name, *a, **k):
            if name.endswith("._kernels"):
                raise ImportError(name)
            return real_import(name, *a, **k)

        monkeypatch.setattr(importlib, "import_module", fake)
        assert kernels._load_compiled() is None

    def test_status_codes_distinct(self):
        assert len({kernels.CONVERGED, kernels.MAXITER, kernels.DIVERGED, kernels.SINGULAR}) == 4


class TestPythonKernel:
    def test_residual_matches_problem(self, model, arch, pose_g):
        for prob in problems(model, arch, pose_g).values():
            X = starts(prob, 20, 0)
            R, J = _kernels_py.kkt_residual_jacobian(prob.exps, prob.coeffs, prob.W, prob.target,
                                                     prob.free, prob.use_G, X)
            for k in range(len(X)):
                r, Jk = prob.residual_jacobian(X[k])
                assert np.allclose(R[k], r, rtol=1e-12, atol=1e-12)
                assert np.allclose(J[k], Jk, rtol=1e-12, atol=1e-12)

    def test_poly_derivs_fd(self, model):
        rng = np.random.default_rng(1)
        Z = rng.standard_normal((10, 6))
        exps, coeffs = model.F.compile()
        v, g, H = _kernels_py.poly_derivs_batch(exps, coeffs, Z)
        h = 1e-6
        for i in range(6):
            e = np.zeros(6)
            e[i] = h
            vp, gp, _ = _kernels_py.poly_derivs_batch(exps, coeffs, Z + e)
            vm, gm, _ = _kernels_py.poly_derivs_batch(exps, coeffs, Z - e)
            assert np.allclose((vp - vm) / (2 * h), g[:, i], rtol=1e-6, atol=1e-8)
            assert np.allclose((gp - gm) / (2 * h), H[:, :, i], rtol=1e-6, atol=1e-8)

    def test_converged_points_are_stationary(self, model, arch, pose_g):
        prob = problems(model, arch, pose_g)["general"]
        X, status, rnorm = prob.solve_batch(starts(prob, 200, 2), backend="python", max_halvings=12)
        ok = status == kernels.CONVERGED
        assert ok.any()
        for x in X[ok]:
            assert np.abs(prob.residual(x)).max() < 1e-12 * (1 + np.abs(x).max()) ** 2

    def test_singular_start(self, model, arch, pose_g):
        prob = problems(model, arch, pose_g)["fixed_orientation"]
        # An empty polynomial makes the multiplier column of the Jacobian vanish.
        X, status, _ = _kernels_py.kkt_newton_batch(prob.exps[:0], prob.coeffs[:0], prob.W, prob.target,
                                                    prob.free, prob.use_G, np.zeros((1, prob.size)))
        assert status[0] == kernels.SINGULAR

    def test_divergence_flag(self, model, arch, pose_g):
        prob = problems(model, arch, pose_g)["general"]
        X0 = np.full((1, prob.size), 1e8)
        _, status, _ = prob.solve_batch(X0, backend="python", maxit=1)
        assert status[0] == kernels.DIVERGED


@needs_cython
class TestBackendAgreement:
    @pytest.mark.parametrize("mode", ["fixed_orientation", "fixed_position", "general", "equiform"])
    def test_same_iterates(self, model, arch, pose_g, mode):
        prob = problems(model, arch, pose_g)[mode]
        X0 = starts(prob, 300, 5)
        Xp, sp, rp = prob.solve_batch(X0, backend="python", max_halvings=12)
        Xc, sc, rc = prob.solve_batch(X0, backend="cython", max_halvings=12)
        both = (sp == kernels.CONVERGED) & (sc == kernels.CONVERGED)
        assert both.sum() >= 0.5 * (sp == kernels.CONVERGED).sum()
        same = np.abs(Xp[both] - Xc[both]).max(axis=1) < 1e-6 * (1 + np.abs(Xp[both]).max(axis=1))
        # Rounding differences can send a start from a fractal basin boundary elsewhere.
        assert same.mean() > 0.9

    def test_single_step_identical(self, model, arch, pose_g):
        prob = problems(model, arch, pose_g)["general"]
        X0 = starts(prob, 50, 6)
        Xp, _, _ = prob.solve_batch(X0, backend="python", maxit=1, max_halvings=0)
        Xc, _, _ = prob.solve_batch(X0, backend="cython", maxit=1, max_halvings=0)
        assert np.allclose(Xp, Xc, rtol=1e-9, atol=1e-9)

    def test_status_codes_agree(self, model, arch, pose_g):
        prob = problems(model, arch, pose_g)["general"]
        X0 = np.vstack([np.full(prob.size, 1e8), starts(prob, 1, 0)])
        for maxit, want in ((1, kernels.DIVERGED), (0, kernels.MAXITER)):
            _, sp, _ = prob.solve_batch(X0[:1], backend="python", maxit=maxit)
            _, sc, _ = prob.solve_batch(X0[:1], backend="cython", maxit=maxit)
            assert sp[0] == sc[0] == want
        empty = (prob.exps[:0], prob.coeffs[:0], prob.W, prob.target, prob.free, prob.use_G,
                 np.zeros((1, prob.size)))
        assert kernels.kkt_newton_batch(*empty, backend="cython")[1][0] == kernels.SINGULAR

    def test_rejects_bad_exponents(self, model, arch, pose_g):
        prob = problems(model, arch, pose_g)["general"]
        with pytest.raises(ValueError):
            kernels.kkt_newton_batch(prob.exps[:, :5], prob.coeffs, prob.W, prob.target, prob.free,
                                     prob.use_G, starts(prob, 1, 0), backend="cython")
