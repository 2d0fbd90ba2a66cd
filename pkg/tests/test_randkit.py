import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conegen.randkit import (
    GenerationError,
    MatrixRecipe,
    RngStream,
    gen_conditioned,
    gen_matrix,
    gen_orthonormal,
    gen_psd,
    next_uniform,
    numerical_rank,
)


def test_next_uniform_range_and_determinism():
    v = next_uniform(RngStream(1), 0.0, 1.0)
    assert 0.0 <= v < 1.0
    assert next_uniform(RngStream(1), 0.0, 1.0) == v


def test_next_uniform_distinct_seeds_differ():
    a = [next_uniform(s, -1, 1) for s in [RngStream(1)] for _ in range(10)]
    s1, s2 = RngStream(1), RngStream(2)
    a = [next_uniform(s1, -1, 1) for _ in range(10)]
    b = [next_uniform(s2, -1, 1) for _ in range(10)]
    assert a != b


def test_next_uniform_bad_interval():
    with pytest.raises(ValueError):
        next_uniform(RngStream(0), 1.0, 1.0)


def test_stream_ids_are_independent_subsequences():
    base = RngStream(42, 0)
    other = RngStream(42, 1)
    assert base.uniform(size=8).tolist() != other.uniform(size=8).tolist()
    # identical (seed, id) replays exactly
    assert RngStream(42, 1).uniform(size=8).tolist() == RngStream(42, 1).uniform(size=8).tolist()


def test_child_streams_do_not_alias():
    s = RngStream(7, 3)
    c1, c2 = s.child(1), s.child(2)
    assert c1.uniform(size=4).tolist() != c2.uniform(size=4).tolist()


def test_gen_matrix_scalar_norm_target():
    A = gen_matrix(MatrixRecipe(1, 1, fro_norm_target=3.0), RngStream(5))
    assert A.shape == (1, 1)
    assert abs(abs(A[0, 0]) - 3.0) <= 1e-12 * 3.0


def test_gen_matrix_full_row_rank():
    A = gen_matrix(MatrixRecipe(2, 4), RngStream(3))
    s = np.linalg.svd(A, compute_uv=False)
    assert s[-1] > 1e-10 * s[0]


def test_gen_matrix_density_window():
    A = gen_matrix(MatrixRecipe(4, 4, kind="sparse", density=0.5), RngStream(9))
    frac = np.count_nonzero(A) / 16
    assert 0.4 <= frac <= 0.6


def test_gen_matrix_density_keeps_rank():
    for seed in range(20):
        A = gen_matrix(MatrixRecipe(3, 8, kind="sparse", density=0.4), RngStream(seed))
        assert numerical_rank(A) == 3


def test_gen_matrix_unsatisfiable_density():
    with pytest.raises(GenerationError):
        gen_matrix(MatrixRecipe(6, 6, kind="sparse", density=0.02), RngStream(1))


def test_gen_matrix_norm_scaling_relative():
    A = gen_matrix(MatrixRecipe(5, 7, fro_norm_target=2.5), RngStream(11))
    assert abs(np.linalg.norm(A) - 2.5) <= 1e-12 * 2.5


def test_recipe_validation():
    with pytest.raises(ValueError):
        MatrixRecipe(3, 4, kind="psd")
    with pytest.raises(ValueError):
        MatrixRecipe(3, 3, kind="weird")
    with pytest.raises(ValueError):
        MatrixRecipe(3, 3, density=0.0)


def test_gen_conditioned_flat_spectrum():
    A = gen_conditioned(3, 3, 1.0, RngStream(2))
    s = np.linalg.svd(A, compute_uv=False)
    assert s[0] / s[-1] <= 1.01


def test_gen_conditioned_target():
    A = gen_conditioned(3, 5, 1e6, RngStream(2))
    s = np.linalg.svd(A, compute_uv=False)
    measured = s[0] / s[-1]
    assert 1e6 / 1.01 <= measured <= 1.01e6


def test_gen_conditioned_scalar():
    A = gen_conditioned(1, 1, 1.0, RngStream(4))
    assert A.shape == (1, 1) and A[0, 0] != 0.0


def test_gen_conditioned_bad_cond():
    with pytest.raises(ValueError):
        gen_conditioned(2, 3, 0.5, RngStream(0))


def test_gen_psd_identity_spectrum():
    P = gen_psd(3, "spectral", (1.0, 1.0, 1.0), RngStream(6))
    assert np.abs(P - np.eye(3)).max() <= 1e-12


def test_gen_psd_zeroed_cholesky_factor_is_singular():
    L = np.tril(RngStream(8).uniform(size=(2, 2)))
    L[1, 1] = 0.0
    P = L @ L.T
    w = np.linalg.eigvalsh(P)
    assert abs(np.linalg.det(P)) <= 1e-12
    assert w.min() >= -1e-12


def test_gen_psd_eigen_condition():
    eigs = np.array([1e3, 1.0, 1.0, 1.0])
    P = gen_psd(4, "spectral", eigs, RngStream(10))
    w = np.linalg.eigvalsh(P)
    assert abs(w.max() / w.min() - 1e3) <= 10.0  # 1% of 1e3


def test_gen_psd_methods_psd():
    for method in ("gram", "cholesky-like", "spectral", "ldl"):
        P = gen_psd(5, method, None, RngStream(12))
        assert np.allclose(P, P.T)
        w = np.linalg.eigvalsh(P)
        assert w.min() >= -1e-9 * (1 + w.max())


def test_gen_psd_ldl_spectrum_feeds_inner_diagonal():
    d = np.array([2.0, 0.0, 1.0])
    P = gen_psd(3, "ldl", d, RngStream(13))
    w = np.linalg.eigvalsh(P)
    assert w.min() >= -1e-12  # zero diagonal entry keeps it merely psd
    assert abs(np.linalg.det(P)) <= 1e-10


def test_gen_psd_validation():
    with pytest.raises(ValueError):
        gen_psd(3, "spectral", (-1.0, 1.0, 1.0), RngStream(0))
    with pytest.raises(ValueError):
        gen_psd(3, "gram", (1.0, 1.0, 1.0), RngStream(0))


def test_gen_orthonormal_small():
    Q = gen_orthonormal(1, RngStream(3))
    assert Q.shape == (1, 1) and abs(abs(Q[0, 0]) - 1.0) <= 1e-14
    Q = gen_orthonormal(5, RngStream(3))
    assert np.linalg.norm(Q.T @ Q - np.eye(5)) <= 5e-12


def test_gen_orthonormal_determinant():
    Q = gen_orthonormal(4, RngStream(17))
    assert abs(abs(np.linalg.det(Q)) - 1.0) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 20))
def test_orthonormal_invariance(seed, n):
    Q = gen_orthonormal(n, RngStream(seed))
    eye = np.eye(n)
    assert np.linalg.norm(Q.T @ Q - eye) <= 1e-12 * n
    assert np.linalg.norm(Q @ Q.T - eye) <= 1e-12 * n


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 50))
def test_spectral_psd_reproduces_spectrum(seed, n):
    stream = RngStream(seed)
    eigs = np.sort(stream.uniform(0.0, 10.0, size=n))
    P = gen_psd(n, "spectral", eigs, stream)
    w = np.sort(np.linalg.eigvalsh(P))
    assert np.abs(w - eigs).max() <= 1e-10 * max(1.0, eigs.max())


def test_gen_conditioned_full_row_rank_property():
    for seed in range(25):
        rows = 1 + seed % 6
        cols = rows + seed % 5
        A = gen_conditioned(rows, cols, 10.0 ** (seed % 4), RngStream(seed))
        assert numerical_rank(A) == rows
