import numpy as np
import pytest

from conegen.controls import GenControls
from conegen.certify import verify_sdo
from conegen.randkit import GenerationError, gen_orthonormal, RngStream
from conegen.sdo_gen import (
    assemble_sdo_interior,
    assemble_sdo_optimal,
    basis_products,
    blockdiag,
    extend_sdo_with_interior,
    gen_sdo_block_both,
    gen_sdo_block_optimal,
    gen_sdo_eig_both,
    gen_sdo_eig_optimal,
    gen_sdo_interior,
    gen_sdo_maxcomp,
    gen_sdo_maxcomp_Bempty,
    gen_sdo_maxcomp_both,
    trace_dot,
)
from conegen.randkit import numerical_rank


def _certified_identities(inst, cert, tol=1e-10):
    A, b, C = inst.A, inst.b, inst.C
    X, y, S = cert.optimal
    X0, y0, S0 = cert.interior
    scale_b = 1.0 + np.abs(b).max(initial=0.0)
    scale_c = 1.0 + np.linalg.norm(C)
    assert np.linalg.eigvalsh(X).min() >= -1e-10 * (1 + np.linalg.eigvalsh(X).max())
    assert np.linalg.eigvalsh(S).min() >= -1e-10 * (1 + np.linalg.eigvalsh(S).max())
    assert np.linalg.eigvalsh(X0).min() > 0 and np.linalg.eigvalsh(S0).min() > 0
    assert abs(trace_dot(X, S)) <= tol * (1 + np.linalg.norm(X) * np.linalg.norm(S))
    for XX, yy, SS in ((X, y, S), (X0, y0, S0)):
        assert max(abs(trace_dot(Ai, XX) - bi) for Ai, bi in zip(A, b)) <= tol * scale_b
        assert np.linalg.norm(np.tensordot(yy, A, axes=1) + SS - C) <= tol * scale_c


def test_interior_forced_arithmetic():
    A = np.array([[[1.0, 0.0], [0.0, 2.0]]])
    inst, cert = assemble_sdo_interior(A, np.eye(2), np.array([1.0]), np.eye(2))
    assert inst.b.tolist() == [3.0]
    assert inst.C.tolist() == [[2.0, 0.0], [0.0, 3.0]]


def test_interior_diagonal_mu_rule():
    inst, cert = gen_sdo_interior(2, 4, GenControls(seed=1), mu=1.0, diagonal_mode=True)
    X0, y0, S0 = cert.interior
    d = np.diag(X0)
    assert np.array_equal(X0, np.diag(d)) and np.array_equal(S0, np.diag(1.0 / d))
    assert trace_dot(X0, S0) == 4.0  # n * mu


def test_interior_mu_inverse_coupling():
    inst, cert = gen_sdo_interior(2, 5, GenControls(seed=2), mu=1.0)
    X0, y0, S0 = cert.interior
    assert np.linalg.norm(X0 @ S0 - np.eye(5)) <= 1e-10
    assert verify_sdo(inst, cert).passed


def test_interior_validation():
    with pytest.raises(ValueError):
        gen_sdo_interior(2, 4, GenControls(), mu=0.0)
    with pytest.raises(ValueError):
        gen_sdo_interior(10, 4, GenControls())  # m >= n(n+1)/2


def test_block_optimal_forced_arithmetic():
    A = np.array([[[1.0, 1.0], [1.0, 0.0]]])
    X = np.array([[2.0, 0.0], [0.0, 0.0]])
    S = np.array([[0.0, 0.0], [0.0, 3.0]])
    inst, cert = assemble_sdo_optimal(A, X, np.array([1.0]), S, (1, 0, 1))
    assert inst.b.tolist() == [2.0]
    assert inst.C.tolist() == [[1.0, 1.0], [1.0, 3.0]]
    assert cert.strictly_complementary and cert.maximally_complementary


def test_block_optimal_flags_and_ranks():
    inst, cert = gen_sdo_block_optimal(2, 5, 2, 2, GenControls(seed=3))
    X, y, S = cert.optimal
    assert not cert.strictly_complementary  # n_T = 1
    assert not cert.maximally_complementary
    assert np.linalg.norm(X @ S) == 0.0  # disjoint supports
    assert np.linalg.matrix_rank(X) == 2 and np.linalg.matrix_rank(S) == 2
    inst, cert = gen_sdo_block_optimal(2, 5, 2, 3, GenControls(seed=3))
    assert cert.strictly_complementary and cert.maximally_complementary


def test_block_both_special_case_settings():
    inner, icert = gen_sdo_block_optimal(2, 4, 2, 2, GenControls(seed=4))
    Xhat, yhat, Shat = icert.optimal
    X0i = blockdiag(Xhat[:2, :2], np.eye(2))
    S0i = blockdiag(np.eye(2), Shat[2:, 2:])
    inst, cert = extend_sdo_with_interior(
        inner.A, Xhat, yhat, Shat, X0i, S0i, 1.0, 1.0, np.append(yhat, 1.0), (2, 0, 2)
    )
    # these choices cancel the correction term entirely
    assert trace_dot(X0i - Xhat, S0i - Shat) == 0.0
    X, y, S = cert.optimal
    assert S[4, 4] == 1.0  # appended optimal slack equals the interior one
    _certified_identities(inst, cert)
    assert verify_sdo(inst, cert).passed


def test_block_both_identities_and_orthogonality():
    for seed in range(30):
        inst, cert = gen_sdo_block_both(2, 4, 1, 2, GenControls(seed=seed))
        assert inst.A.shape == (3, 5, 5)
        _certified_identities(inst, cert)
        X0, _, S0 = cert.interior
        X, _, S = cert.optimal
        scale = 1.0 + np.linalg.norm(X0 - X) * np.linalg.norm(S0 - S)
        assert abs(trace_dot(X0 - X, S0 - S)) <= 1e-11 * scale
        assert cert.partition_dims == (1, 1, 3)


def test_eig_optimal_spectrum_and_orthogonality():
    inst, cert = gen_sdo_eig_optimal(3, 6, 2, 3, GenControls(seed=5))
    X, y, S = cert.optimal
    Q = cert.basis
    w = np.sort(np.linalg.eigvalsh(X))[-2:]
    # nonzero eigenvalues of X* match the top block of Q' X* Q
    sigma = np.sort(np.diag(Q.T @ X @ Q)[:2])
    assert np.abs(w - sigma).max() <= 1e-10 * max(1.0, sigma.max())
    assert np.linalg.norm(X @ S) <= 1e-10 * (1 + np.linalg.norm(X) * np.linalg.norm(S))
    assert verify_sdo(inst, cert).passed


def test_eig_optimal_identity_rotation_is_block_layout():
    # spectral layout with Q = I coincides with the block-diagonal form
    sigma, lam = np.array([2.0]), np.array([3.0])
    X = np.diag([2.0, 0.0, 0.0])
    S = np.diag([0.0, 0.0, 3.0])
    A = np.array([np.diag([1.0, 1.0, 1.0])])
    inst, cert = assemble_sdo_optimal(A, X, np.array([1.0]), S, (1, 1, 1), basis=np.eye(3))
    assert inst.b.tolist() == [2.0]
    assert np.array_equal(inst.C, np.diag([1.0, 1.0, 4.0]))


def test_eig_both_identity_basis_delta():
    # all interior spectra pinned to one: the correction term collapses to
    # sum over B of (1 - sigma_i) plus n_T plus sum over N of (1 - lambda_i)
    n, n_B, n_N = 4, 1, 2
    stream = RngStream(11)
    sigma = stream.uniform(0.5, 1.5, size=n_B)
    lam = stream.uniform(0.5, 1.5, size=n_N)
    Xhat = np.diag(np.concatenate([sigma, [0.0], np.zeros(n_N)]))
    Shat = np.diag(np.concatenate([np.zeros(n_B), [0.0], lam]))
    A = np.stack([np.diag(stream.uniform(size=n)) for _ in range(2)])
    yhat = stream.uniform(size=2)
    delta = trace_dot(np.eye(n) - Xhat, np.eye(n) - Shat)
    expected = (1 - sigma).sum() + 1.0 + (1 - lam).sum()
    assert abs(delta - expected) <= 1e-12 * (1 + abs(expected))
    s0_extra = max(0.0, -delta) + 0.5
    inst, cert = extend_sdo_with_interior(
        A, Xhat, yhat, Shat, np.eye(n), np.eye(n), 1.0, s0_extra,
        np.append(yhat, 1.0), (n_B, 1, n_N), basis=np.eye(n),
    )
    _certified_identities(inst, cert)


def test_eig_both_identities_and_subspace():
    for seed in range(20):
        inst, cert = gen_sdo_eig_both(2, 5, 2, 2, GenControls(seed=seed))
        assert inst.A.shape == (3, 6, 6)
        _certified_identities(inst, cert)
        X0, _, S0 = cert.interior
        X, _, S = cert.optimal
        scale = 1.0 + np.linalg.norm(X0 - X) * np.linalg.norm(S0 - S)
        assert abs(trace_dot(X0 - X, S0 - S)) <= 1e-11 * scale
        # eigenbasis of X* spans the leading block of the recorded basis;
        # sin of the largest principal angle via the projection residual
        Q = cert.basis
        w, U = np.linalg.eigh(X)
        U_pos = U[:, w > 1e-8 * w.max()]
        Q_B = Q[:, :2]
        sin_angle = np.linalg.norm(U_pos - Q_B @ (Q_B.T @ U_pos), ord=2)
        assert sin_angle <= 1e-8


def test_maxcomp_structure():
    inst, cert = gen_sdo_maxcomp(3, 6, 2, 2, GenControls(seed=6))
    Q, gamma = cert.basis, cert.gamma
    n_B, n_T, n_N = cert.partition_dims
    assert (n_B, n_T, n_N) == (2, 2, 2)
    assert np.all(gamma[:2] == 0.0)
    assert gamma[2:4].min() >= 0.1
    # first constraint shares the solution eigenbasis
    assert np.linalg.norm(inst.A[0] - (Q * gamma) @ Q.T) <= 1e-12 * (1 + np.abs(gamma).max())
    # trace identity kills the first right-hand side entry
    X = cert.optimal[0]
    assert abs(inst.b[0]) <= 1e-12 * (1 + np.linalg.norm(X))
    P = basis_products(inst.A, Q[:, :2])
    assert np.linalg.norm(P[0]) <= 1e-12
    assert numerical_rank(P[1:], 1e-8) == 2  # m - 1 independent rows
    assert cert.maximally_complementary
    assert verify_sdo(inst, cert).passed


def test_maxcomp_toy_trace_identity():
    inst, cert = gen_sdo_maxcomp(2, 3, 1, 1, GenControls(seed=7))
    X = cert.optimal[0]
    Q, gamma = cert.basis, cert.gamma
    sigma = np.diag(Q.T @ X @ Q)
    assert abs((gamma * sigma).sum()) <= 1e-12 * (1 + np.abs(sigma).max())
    assert abs(inst.b[0]) <= 1e-12


def test_maxcomp_preconditions():
    with pytest.raises(ValueError):
        gen_sdo_maxcomp(2, 5, 0, 2, GenControls())
    with pytest.raises(ValueError):
        gen_sdo_maxcomp(2, 5, 2, 0, GenControls())


def test_maxcomp_Bempty():
    inst, cert = gen_sdo_maxcomp_Bempty(2, 5, 3, GenControls(seed=8))
    assert np.all(inst.b == 0.0)
    X, y, S = cert.optimal
    assert np.all(X == 0.0)
    assert all(trace_dot(Ai, X) == 0.0 for Ai in inst.A)
    w = np.linalg.eigvalsh(S)
    assert int(np.sum(w > 1e-8 * w.max())) == 3
    assert verify_sdo(inst, cert).passed


def test_maxcomp_Bempty_requires_enough_room():
    with pytest.raises(GenerationError):
        gen_sdo_maxcomp_Bempty(4, 6, 3, GenControls(seed=1))


def test_maxcomp_both_structure_and_identities():
    for seed in range(10):
        inst, cert = gen_sdo_maxcomp_both(3, 6, 2, 2, GenControls(seed=seed))
        assert inst.A.shape == (4, 7, 7)
        _certified_identities(inst, cert)
        assert cert.partition_dims == (2, 2, 3)  # appended direction joins N
        gamma = cert.gamma
        assert np.all(gamma[:2] == 0.0)
        assert gamma[2:4].min() >= 0.1
        Q_B = cert.basis[:, :2]
        P = basis_products(inst.A, Q_B)
        assert np.linalg.norm(P[0]) <= 1e-12
        assert numerical_rank(P[1:], 1e-8) == 3  # inner m rows stay independent
        assert verify_sdo(inst, cert).passed


def test_symmetry_of_emitted_matrices():
    inst, cert = gen_sdo_eig_both(2, 5, 2, 2, GenControls(seed=9))
    for M in (*inst.A, inst.C, *cert.optimal[::2], *cert.interior[::2]):
        assert np.linalg.norm(M - M.T) <= 1e-13 * max(1.0, np.linalg.norm(M))


def test_maxcomp_room_preconditions():
    # basis products live in an (n * n_B)-dimensional space
    with pytest.raises(ValueError):
        gen_sdo_maxcomp(5, 3, 1, 1, GenControls(seed=0))
    with pytest.raises(ValueError):
        gen_sdo_maxcomp_both(4, 3, 1, 2, GenControls(seed=0))
    # boundary cases still generate
    inst, cert = gen_sdo_maxcomp(4, 3, 1, 1, GenControls(seed=0))
    assert verify_sdo(inst, cert).passed
    inst, cert = gen_sdo_maxcomp_both(3, 3, 1, 2, GenControls(seed=0))
    assert verify_sdo(inst, cert).passed
