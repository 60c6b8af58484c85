"""Solver tests: Riccati via stable subspace, Lyapunov, covariance integration."""

import numpy as np
import pytest
import scipy.linalg
from numpy.testing import assert_allclose

import cavity_oracle as co
from qobs import (
    DomainError,
    ImaginaryAxisEigenvalue,
    NoStabilizingSolution,
    NotHurwitz,
    integrate_covariance,
    make_cavity_plant,
    solve_care,
    solve_lyapunov,
    stable_subspace,
)

J = np.array([[0.0, 1.0], [-1.0, 0.0]])


def cavity_noise_blocks(k1, k2, kn):
    plant = make_cavity_plant(k1, k2, kn)
    S_w = plant.ito.S
    return (
        plant.A,
        plant.C,
        plant.B @ S_w @ plant.B.T,
        plant.B @ S_w @ plant.D.T,
        plant.D @ S_w @ plant.D.T,
    )


class TestSolveCare:
    def test_scenario1_vacuum_limit(self):
        kd = solve_care(*cavity_noise_blocks(0.1, 0.1, 0.0))
        assert_allclose(kd.Q, np.eye(2), atol=1e-12)
        assert np.max(np.abs(kd.K)) < 1e-12

    def test_scenario1_kn10(self):
        kd = solve_care(*cavity_noise_blocks(0.1, 0.1, 10.0))
        # scalar oracle: q = sqrt(21), k = sqrt(0.1) (q - 1)
        assert_allclose(kd.Q, np.sqrt(21.0) * np.eye(2), rtol=1e-12)
        assert_allclose(kd.K, 1.132909908602106 * np.eye(2), rtol=1e-10)

    def test_scenario2_kn69(self):
        kd = solve_care(*cavity_noise_blocks(0.5, 0.01, 69.0))
        assert_allclose(kd.Q, 2.227843491226986 * np.eye(2), rtol=1e-10)
        assert_allclose(kd.K, 0.8682164588823672 * np.eye(2), rtol=1e-10)

    @pytest.mark.parametrize("kn", [0.0, 0.3, 2.0, 42.0, 1e3])
    @pytest.mark.parametrize("scenario", [co.S1, co.S2, co.S3])
    def test_matches_scalar_oracle_along_family(self, scenario, kn):
        k1, k2 = scenario
        kd = solve_care(*cavity_noise_blocks(k1, k2, kn))
        q = co.q_coherent(k1, k2, kn)
        assert_allclose(kd.Q, q * np.eye(2), rtol=1e-10)
        assert_allclose(kd.K, co.gain(k1, k2, kn) * np.eye(2), rtol=1e-10, atol=1e-12)

    def test_random_instances_residual_and_stability(self):
        rng = np.random.default_rng(99)
        for _ in range(200):
            n = int(rng.choice([2, 4]))
            p = int(rng.choice([2, n]))
            A = rng.normal(size=(n, n))
            C = rng.normal(size=(p, n))
            Bn = rng.normal(size=(n, n + p))
            Dn = rng.normal(size=(p, n + p))
            V1 = Bn @ Bn.T
            V12 = Bn @ Dn.T
            V2 = Dn @ Dn.T + 0.1 * np.eye(p)
            kd = solve_care(A, C, V1, V12, V2)
            assert kd.residual_norm <= 1e-8 * (1.0 + np.linalg.norm(kd.Q))
            assert np.max(np.linalg.eigvals(A - kd.K @ C).real) < 0.0
            assert_allclose(kd.Q, kd.Q.T, atol=1e-10)
            assert np.min(np.linalg.eigvalsh(kd.Q)) > -1e-9

    def test_agrees_with_scipy_care(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            n = 4
            A = rng.normal(size=(n, n))
            C = rng.normal(size=(2, n))
            Bn = rng.normal(size=(n, 6))
            Dn = rng.normal(size=(2, 6))
            V1, V12 = Bn @ Bn.T, Bn @ Dn.T
            V2 = Dn @ Dn.T + 0.1 * np.eye(2)
            kd = solve_care(A, C, V1, V12, V2)
            V2i = np.linalg.inv(V2)
            Abar = A - V12 @ V2i @ C
            ref = scipy.linalg.solve_continuous_are(
                Abar.T, C.T, V1 - V12 @ V2i @ V12.T, V2
            )
            assert_allclose(kd.Q, ref, rtol=1e-8, atol=1e-10)

    def test_undetectable_pair_fails(self):
        # unstable mode invisible to the output: no stabilizing solution
        A = np.diag([1.0, 1.0])
        C = np.zeros((2, 2))
        with pytest.raises(NoStabilizingSolution):
            solve_care(A, C, np.eye(2), np.zeros((2, 2)), np.eye(2))


class TestSolveLyapunov:
    def test_scalar_balance(self):
        assert_allclose(solve_lyapunov(-0.1 * np.eye(2), 0.2 * np.eye(2)), np.eye(2))

    def test_scenario1_alg1_metric_value(self):
        assert_allclose(solve_lyapunov(-0.1 * np.eye(2), 2.0 * np.eye(2)), 10.0 * np.eye(2))

    def test_unstable_input_rejected(self):
        with pytest.raises(NotHurwitz):
            solve_lyapunov(0.1 * np.eye(2), np.eye(2))

    def test_agrees_with_scipy(self):
        rng = np.random.default_rng(17)
        for _ in range(25):
            n = int(rng.choice([2, 4, 6]))
            M = rng.normal(size=(n, n))
            A = M - (np.max(np.linalg.eigvals(M).real) + 0.3) * np.eye(n)
            G = rng.normal(size=(n, n))
            N = G @ G.T
            P = solve_lyapunov(A, N)
            ref = scipy.linalg.solve_continuous_lyapunov(A, -N)
            assert_allclose(P, ref, rtol=1e-9, atol=1e-11)
            assert np.max(np.abs(A @ P + P @ A.T + N)) <= 1e-8 * (1.0 + np.linalg.norm(P))


class TestIntegrateCovariance:
    def test_fixed_point(self):
        A = -0.1 * np.eye(2)
        N = 0.2 * np.eye(2)
        P = solve_lyapunov(A, N)
        out = integrate_covariance(A, N, P, horizon=50.0)
        assert_allclose(out, P, atol=1e-6)

    def test_analytic_scalar_relaxation(self):
        # p(t) = 1 - exp(-0.2 t) for dp/dt = -0.2 p + 0.2
        A = -0.1 * np.eye(2)
        N = 0.2 * np.eye(2)
        out = integrate_covariance(A, N, np.zeros((2, 2)), horizon=200.0)
        assert_allclose(out, (1.0 - np.exp(-40.0)) * np.eye(2), atol=1e-6)

    def test_homogeneous_decay(self):
        A = np.array([[-0.5, 0.2], [0.0, -0.3]])
        P0 = np.eye(2)
        out = integrate_covariance(A, np.zeros((2, 2)), P0, horizon=100.0)
        assert np.max(np.abs(out)) < 1e-10

    def test_bad_step_rejected(self):
        with pytest.raises(DomainError):
            integrate_covariance(-np.eye(2), np.eye(2), np.zeros((2, 2)), horizon=1.0, step=2.0)


class TestStableSubspace:
    def test_diagonal_split(self):
        X1, X2 = stable_subspace(np.diag([-1.0, 1.0]))
        # the stacked column spans e1
        v = np.concatenate([X1.ravel(), X2.ravel()])
        assert_allclose(np.abs(v), [1.0, 0.0], atol=1e-14)

    def test_cavity_transform_matrix_eigenvalues(self):
        # filter (aI, kI, I): the doubled matrix has eigenvalues
        # +/- sqrt(a^2 - k^2), each twice (block-determinant reduction)
        a = co.ahat(0.1, 0.1, 0.1)
        k = co.gain(0.1, 0.1, 0.1)
        Z = np.block([[a * np.eye(2), -k * k * J], [-J, -a * np.eye(2)]])
        eigs = np.sort(np.linalg.eigvals(Z).real)
        lam = np.sqrt(a * a - k * k)
        assert_allclose(eigs, [-lam, -lam, lam, lam], atol=1e-12)
        X1, X2 = stable_subspace(Z)
        X = X2 @ np.linalg.inv(X1)
        assert_allclose(X.real, co.x_root(a, k) * J, atol=1e-9)

    def test_imaginary_axis_detected(self):
        a = co.ahat(0.5, 0.01, 70.0)
        k = co.gain(0.5, 0.01, 70.0)
        assert a * a < k * k  # oracle: purely imaginary spectrum
        Z = np.block([[a * np.eye(2), -k * k * J], [-J, -a * np.eye(2)]])
        with pytest.raises(ImaginaryAxisEigenvalue):
            stable_subspace(Z)

    def test_odd_dimension_rejected(self):
        with pytest.raises(DomainError):
            stable_subspace(np.eye(3))

    def test_unbalanced_split_rejected(self):
        from qobs import WrongSplitCount

        with pytest.raises(WrongSplitCount):
            stable_subspace(np.diag([-1.0, -2.0, -3.0, 1.0]))


class TestSolverCrossValidation:
    @pytest.mark.parametrize("scenario,kn", [(co.S1, 0.0), (co.S1, 10.0), (co.S2, 69.0)])
    def test_lyapunov_matches_integration(self, scenario, kn):
        k1, k2 = scenario
        kd = solve_care(*cavity_noise_blocks(k1, k2, kn))
        plant = make_cavity_plant(k1, k2, kn)
        A_e = plant.A - kd.K @ plant.C
        N = (plant.B - kd.K @ plant.D) @ plant.ito.S @ (plant.B - kd.K @ plant.D).T
        P = solve_lyapunov(A_e, N)
        horizon = 50.0 / abs(np.max(np.linalg.eigvals(A_e).real))
        P_int = integrate_covariance(A_e, N, np.zeros_like(P), horizon)
        assert np.max(np.abs(P - P_int)) < 1e-6
