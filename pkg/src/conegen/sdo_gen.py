"""Semidefinite optimization instance generators.

Instances are  min C.X  s.t. A_i.X = b_i, X psd  with certified interior
and/or optimal solutions.  Optimal solutions come in block-diagonal form,
in a general eigenbasis form (a random orthonormal similarity of a
diagonal profile), and in a restricted form whose first constraint matrix
pins the declared subspace partition (the maximal-complementarity
construction).  "Both" variants append one row and one column so a
prescribed interior point becomes feasible next to the optimal one; a
scalar correction term keeps the two certified points trace-orthogonal in
their differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .controls import GenControls
from .randkit import (
    GenerationError,
    RngStream,
    gen_orthonormal,
    numerical_rank,
    sym,
)

_RETRIES = 5


def trace_dot(A: np.ndarray, B: np.ndarray) -> float:
    """Frobenius inner product A.B = trace(A B) for symmetric A, B."""
    return float(np.tensordot(A, B))


@dataclass
class SdoInstance:
    """Problem data: m symmetric constraint matrices, rhs b, cost matrix C."""

    A: np.ndarray  # shape (m, n, n)
    b: np.ndarray
    C: np.ndarray

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    def validate(self) -> None:
        m, n = self.m, self.n
        if self.A.shape != (m, n, n) or self.b.shape != (m,) or self.C.shape != (n, n):
            raise ValueError("inconsistent shapes")
        if m >= n * (n + 1) // 2:
            raise ValueError(f"require m < n(n+1)/2, got m={m}, n={n}")
        for M in (*self.A, self.C):
            nrm = np.linalg.norm(M)
            if np.linalg.norm(M - M.T) > 1e-12 * max(1.0, nrm):
                raise ValueError("constraint/cost matrices must be symmetric")
        if numerical_rank(self.A.reshape(m, -1), 1e-8) != m:
            raise ValueError("constraint matrices are linearly dependent")


@dataclass
class SdoCertificate:
    """Certified solutions, declared subspace partition, and structure data.

    ``basis`` is an orthonormal matrix whose leading/middle/trailing column
    blocks span the declared (B, T, N) subspaces; None means the standard
    basis.  ``gamma`` is the eigenvalue vector of the structural first
    constraint matrix for maximal-complementarity outputs.
    """

    interior: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None
    optimal: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None
    partition_dims: tuple[int, int, int] = (0, 0, 0)
    basis: np.ndarray | None = None
    gamma: np.ndarray | None = None
    maximally_complementary: bool = False
    strictly_complementary: bool = False
    # True only for the dedicated construction whose first constraint pins
    # the partition; tells the verifier its structural hypotheses apply.
    maxcomp_construction: bool = False
    scaling: dict = field(default_factory=dict)

    def basis_matrix(self, n: int) -> np.ndarray:
        return np.eye(n) if self.basis is None else self.basis


def _check_dims(m: int, n: int, n_B: int, n_N: int) -> int:
    if m < 1:
        raise ValueError("m must be >= 1")
    if m >= n * (n + 1) // 2:
        raise ValueError(f"require m < n(n+1)/2, got m={m}, n={n}")
    if n_B < 0 or n_N < 0 or n_B + n_N > n:
        raise ValueError(f"require n_B + n_N <= n, got n_B={n_B}, n_N={n_N}, n={n}")
    return n - n_B - n_N


def random_symmetric(n: int, stream: RngStream, density: float | None = None) -> np.ndarray:
    """Random symmetric matrix; an optional Bernoulli mask sparsifies the
    upper triangle symmetrically."""
    M = stream.uniform(size=(n, n))
    if density is not None:
        keep = stream.uniform(0.0, 1.0, size=(n, n)) < density
        keep = np.triu(keep)
        keep = keep | keep.T
        M = np.where(keep, M, 0.0)
    return sym(M)


def independent_symmetric_family(
    m: int, n: int, stream: RngStream, density: float | None = None
) -> np.ndarray:
    """m random symmetric matrices with linearly independent vectorizations."""
    for _ in range(_RETRIES):
        A = np.stack([random_symmetric(n, stream, density) for _ in range(m)])
        if numerical_rank(A.reshape(m, -1), 1e-8) == m:
            return A
    raise GenerationError(f"failed to draw {m} independent symmetric matrices")


def positive_diag(stream: RngStream, k: int, floor: float = 0.5) -> np.ndarray:
    lo = max(floor, 0.5)
    return stream.uniform(lo, lo + 1.0, size=k)


def blockdiag(*blocks: np.ndarray) -> np.ndarray:
    """Dense block-diagonal assembly (scalars allowed as 1x1 blocks)."""
    mats = [np.atleast_2d(np.asarray(B, dtype=float)) for B in blocks if np.size(B)]
    if not mats:
        return np.zeros((0, 0))
    n = sum(M.shape[0] for M in mats)
    out = np.zeros((n, n))
    at = 0
    for M in mats:
        k = M.shape[0]
        out[at : at + k, at : at + k] = M
        at += k
    return out


def _apply_norm_targets(inst: SdoInstance, cert: SdoCertificate, controls: GenControls) -> None:
    """Rescale primal (X side) and dual (y, S side) so ||b||, ||C||_F hit targets."""
    A = inst.A
    ref = cert.optimal if cert.optimal is not None else cert.interior
    if controls.norm_b is not None:
        X_ref = ref[0] if cert.optimal is not None else cert.interior[0]
        nb = np.linalg.norm(np.array([trace_dot(Ai, X_ref) for Ai in A]))
        if nb == 0.0:
            raise GenerationError("norm_b target is unreachable: assembled b is zero")
        t = controls.norm_b / nb
        cert.scaling["primal"] = t
        if cert.optimal is not None:
            X, y, S = cert.optimal
            cert.optimal = (X * t, y, S)
        if cert.interior is not None:
            X0, y0, S0 = cert.interior
            cert.interior = (X0 * t, y0, S0)
    if controls.norm_c is not None:
        y_ref, S_ref = (
            (cert.optimal[1], cert.optimal[2])
            if cert.optimal is not None
            else (cert.interior[1], cert.interior[2])
        )
        nc = np.linalg.norm(np.tensordot(y_ref, A, axes=1) + S_ref)
        if nc == 0.0:
            raise GenerationError("norm_c target is unreachable: assembled C is zero")
        u = controls.norm_c / nc
        cert.scaling["dual"] = u
        if cert.optimal is not None:
            X, y, S = cert.optimal
            cert.optimal = (X, y * u, S * u)
        if cert.interior is not None:
            X0, y0, S0 = cert.interior
            cert.interior = (X0, y0 * u, S0 * u)
    if cert.optimal is not None:
        X, y, S = cert.optimal
    else:
        X, y, S = cert.interior
    inst.b = np.array([trace_dot(Ai, X) for Ai in A])
    inst.C = sym(np.tensordot(y, A, axes=1) + S)


def assemble_sdo_interior(A, X0, y0, S0, mu=None) -> tuple[SdoInstance, SdoCertificate]:
    A = np.asarray(A, dtype=float)
    X0, S0 = sym(np.asarray(X0, dtype=float)), sym(np.asarray(S0, dtype=float))
    y0 = np.asarray(y0, dtype=float)
    b = np.array([trace_dot(Ai, X0) for Ai in A])
    C = sym(np.tensordot(y0, A, axes=1) + S0)
    inst = SdoInstance(A, b, C)
    cert = SdoCertificate(interior=(X0, y0, S0))
    if mu is not None:
        cert.scaling["mu"] = mu
    return inst, cert


def gen_sdo_interior(
    m: int,
    n: int,
    controls: GenControls | None = None,
    mu: float | None = None,
    diagonal_mode: bool = False,
) -> tuple[SdoInstance, SdoCertificate]:
    """Instance with a predefined positive definite interior pair.

    With ``mu`` the dual slack is coupled as S0 = mu * inv(X0) (computed
    through the eigendecomposition of X0); in ``diagonal_mode`` both
    matrices are diagonal and the coupling is entrywise.
    """
    controls = controls or GenControls()
    _check_dims(m, n, 0, 0)
    if mu is not None and mu <= 0:
        raise ValueError("mu must be positive")
    stream = controls.stream()
    floor = controls.eigen_floor
    if diagonal_mode:
        d = positive_diag(stream, n, floor)
        X0 = np.diag(d)
        S0 = np.diag(mu / d) if mu is not None else np.diag(positive_diag(stream, n, floor))
    else:
        Qx = gen_orthonormal(n, stream)
        wx = positive_diag(stream, n, floor)
        X0 = sym((Qx * wx) @ Qx.T)
        if mu is not None:
            S0 = sym((Qx * (mu / wx)) @ Qx.T)
        else:
            Qs = gen_orthonormal(n, stream)
            S0 = sym((Qs * positive_diag(stream, n, floor)) @ Qs.T)
    A = independent_symmetric_family(m, n, stream, controls.density)
    y0 = stream.uniform(size=m)
    inst, cert = assemble_sdo_interior(A, X0, y0, S0, mu=mu)
    _apply_norm_targets(inst, cert, controls)
    inst.validate()
    return inst, cert


def assemble_sdo_optimal(
    A, X_star, y_star, S_star, partition_dims, basis=None, gamma=None, maxcomp=False
) -> tuple[SdoInstance, SdoCertificate]:
    A = np.asarray(A, dtype=float)
    X, S = sym(np.asarray(X_star, dtype=float)), sym(np.asarray(S_star, dtype=float))
    y = np.asarray(y_star, dtype=float)
    b = np.array([trace_dot(Ai, X) for Ai in A])
    C = sym(np.tensordot(y, A, axes=1) + S)
    inst = SdoInstance(A, b, C)
    n_B, n_T, n_N = partition_dims
    cert = SdoCertificate(
        optimal=(X, y, S),
        partition_dims=tuple(partition_dims),
        basis=basis,
        gamma=gamma,
        maximally_complementary=maxcomp or n_T == 0,
        strictly_complementary=n_T == 0,
        maxcomp_construction=maxcomp,
    )
    return inst, cert


def gen_sdo_block_optimal(
    m: int, n: int, n_B: int, n_N: int, controls: GenControls | None = None
) -> tuple[SdoInstance, SdoCertificate]:
    """Optimal pair with explicit block-diagonal structure.

    X* carries a positive definite leading block of order n_B, S* a
    positive definite trailing block of order n_N; their disjoint supports
    make X* S* vanish identically.  Unless n_T = 0 the declared partition
    is only a containment of the instance's true one.
    """
    controls = controls or GenControls()
    n_T = _check_dims(m, n, n_B, n_N)
    stream = controls.stream()
    X_B = _random_pd(n_B, stream, controls.eigen_floor)
    S_N = _random_pd(n_N, stream, controls.eigen_floor)
    X = blockdiag(X_B, np.zeros((n_T + n_N, n_T + n_N)))
    S = blockdiag(np.zeros((n_B + n_T, n_B + n_T)), S_N)
    A = independent_symmetric_family(m, n, stream, controls.density)
    y = stream.uniform(size=m)
    inst, cert = assemble_sdo_optimal(A, X, y, S, (n_B, n_T, n_N))
    _apply_norm_targets(inst, cert, controls)
    inst.validate()
    return inst, cert


def _random_pd(k: int, stream: RngStream, floor: float) -> np.ndarray:
    if k == 0:
        return np.zeros((0, 0))
    Q = gen_orthonormal(k, stream)
    return sym((Q * positive_diag(stream, k, floor)) @ Q.T)


def gen_sdo_eig_optimal(
    m: int, n: int, n_B: int, n_N: int, controls: GenControls | None = None
) -> tuple[SdoInstance, SdoCertificate]:
    """Optimal pair built by inverting an eigenvalue decomposition.

    A shared random orthonormal basis Q masks prescribed eigenvalue
    profiles: X* = Q diag(sigma, 0, 0) Q', S* = Q diag(0, 0, lambda) Q'.
    """
    controls = controls or GenControls()
    n_T = _check_dims(m, n, n_B, n_N)
    stream = controls.stream()
    sigma = positive_diag(stream, n_B, controls.eigen_floor)
    lam = positive_diag(stream, n_N, controls.eigen_floor)
    Q = gen_orthonormal(n, stream)
    X = sym((Q[:, :n_B] * sigma) @ Q[:, :n_B].T)
    S = sym((Q[:, n_B + n_T :] * lam) @ Q[:, n_B + n_T :].T)
    A = independent_symmetric_family(m, n, stream, controls.density)
    y = stream.uniform(size=m)
    inst, cert = assemble_sdo_optimal(A, X, y, S, (n_B, n_T, n_N), basis=Q)
    _apply_norm_targets(inst, cert, controls)
    inst.validate()
    return inst, cert


def basis_products(A: np.ndarray, Q_B: np.ndarray) -> np.ndarray:
    """Rows vec(A_i Q_B), the objects whose independence the
    maximal-complementarity construction requires."""
    return np.stack([(Ai @ Q_B).ravel() for Ai in A])


def _maxcomp_family(
    m: int, n: int, n_B: int, gamma: np.ndarray, Q: np.ndarray, stream: RngStream
) -> np.ndarray:
    """First constraint Q diag(gamma) Q' plus m-1 matrices built from random
    n x n_B factors so the products A_i Q_B (i >= 2) are independent.

    A_1 Q_B is identically zero because gamma vanishes on the leading
    block, so independence (and the rank check) covers the remaining rows.
    """
    A1 = sym((Q * gamma) @ Q.T)
    Q_B = Q[:, :n_B]
    for _ in range(_RETRIES):
        rest = [sym(stream.uniform(size=(n, n_B)) @ Q_B.T) for _ in range(m - 1)]
        A = np.stack([A1, *rest])
        if m > 1 and numerical_rank(basis_products(A[1:], Q_B), 1e-8) != m - 1:
            continue
        if numerical_rank(A.reshape(m, -1), 1e-8) != m:
            continue
        return A
    raise GenerationError("independent basis products not reached after retries")


def gen_sdo_maxcomp(
    m: int, n: int, n_B: int, n_N: int, controls: GenControls | None = None
) -> tuple[SdoInstance, SdoCertificate]:
    """Optimal pair declared maximally complementary with partition
    dimensions (n_B, n_T, n_N).

    The first constraint matrix shares the solution eigenbasis with a
    spectrum that vanishes on the B block and is positive (>= 0.1) on the
    T block; the remaining constraints keep their products with the B-block
    basis linearly independent.  These are the structural hypotheses the
    verifier re-checks; maximal complementarity itself is declared, not
    re-proved numerically.
    """
    controls = controls or GenControls()
    n_T = _check_dims(m, n, n_B, n_N)
    if n_B < 1 or n_N < 1:
        raise ValueError(
            "this construction requires n_B >= 1 and n_N >= 1 "
            "(for n_B = 0 use gen_sdo_maxcomp_Bempty)"
        )
    if m - 1 > n * n_B:
        # products with the B-block basis live in an (n * n_B)-dimensional
        # space; beyond that the required independence cannot exist
        raise ValueError(f"require m - 1 <= n * n_B, got m={m}, n={n}, n_B={n_B}")
    stream = controls.stream()
    sigma = positive_diag(stream, n_B, controls.eigen_floor)
    lam = positive_diag(stream, n_N, controls.eigen_floor)
    Q = gen_orthonormal(n, stream)
    X = sym((Q[:, :n_B] * sigma) @ Q[:, :n_B].T)
    S = sym((Q[:, n_B + n_T :] * lam) @ Q[:, n_B + n_T :].T)
    gamma = np.concatenate(
        [np.zeros(n_B), stream.uniform(0.5, 1.5, size=n_T), stream.uniform(size=n_N)]
    )
    A = _maxcomp_family(m, n, n_B, gamma, Q, stream)
    y = stream.uniform(size=m)
    inst, cert = assemble_sdo_optimal(
        A, X, y, S, (n_B, n_T, n_N), basis=Q, gamma=gamma, maxcomp=True
    )
    _apply_norm_targets(inst, cert, controls)
    inst.validate()
    return inst, cert


def gen_sdo_maxcomp_Bempty(
    m: int, n: int, n_N: int, controls: GenControls | None = None
) -> tuple[SdoInstance, SdoCertificate]:
    """Maximal-complementarity variant for an empty B block: X* = 0, b = 0.

    Every constraint matrix is diagonal in the shared basis with zeros on
    the T block; independence of the m constraint spectra needs m <= n_N.
    """
    controls = controls or GenControls()
    if not 1 <= n_N <= n:
        raise ValueError("require 1 <= n_N <= n")
    _check_dims(m, n, 0, n_N)
    if m > n_N:
        raise GenerationError(
            f"m={m} diagonal constraints supported on an {n_N}-dimensional block "
            "cannot be independent"
        )
    n_T = n - n_N
    stream = controls.stream()
    lam = positive_diag(stream, n_N, controls.eigen_floor)
    Q = gen_orthonormal(n, stream)
    S = sym((Q[:, n_T:] * lam) @ Q[:, n_T:].T)
    X = np.zeros((n, n))
    A = None
    for _ in range(_RETRIES):
        gammas = np.hstack([np.zeros((m, n_T)), stream.uniform(size=(m, n_N))])
        if numerical_rank(gammas[:, n_T:], 1e-8) == m:
            A = np.stack([sym((Q * g) @ Q.T) for g in gammas])
            break
    if A is None:
        raise GenerationError("independent diagonal constraint spectra not reached")
    y = stream.uniform(size=m)
    C = sym(np.tensordot(y, A, axes=1) + S)
    inst = SdoInstance(A, np.zeros(m), C)
    cert = SdoCertificate(
        optimal=(X, y, S),
        partition_dims=(0, n_T, n_N),
        basis=Q,
        maximally_complementary=True,
        strictly_complementary=n_T == 0,
        maxcomp_construction=True,
    )
    if controls.norm_b is not None:
        raise GenerationError("norm_b target is unreachable: b is identically zero")
    if controls.norm_c is not None:
        _apply_norm_targets(inst, cert, controls)
        inst.b = np.zeros(m)
    inst.validate()
    return inst, cert


def extend_sdo_with_interior(
    Ahat,
    Xhat,
    yhat,
    Shat,
    X0_inner,
    S0_inner,
    x0_extra: float,
    s0_extra: float,
    y0_full,
    partition_dims,
    basis=None,
    gamma=None,
    maxcomp: bool = False,
) -> tuple[SdoInstance, SdoCertificate]:
    """Append one row and column so (X0, y0, S0) is interior feasible next
    to the inner optimal pair (Xhat, yhat, Shat).

    The correction scalar delta = (X0 - Xhat).(S0 - Shat) over the inner
    coordinates is absorbed by the appended diagonal entries, which keeps
    the difference matrices of the two certified points trace-orthogonal.
    The appended eigen-direction joins the N block of the partition.
    """
    Ahat = np.asarray(Ahat, dtype=float)
    m, n = Ahat.shape[0], Ahat.shape[1]
    Xhat, Shat = np.asarray(Xhat, dtype=float), np.asarray(Shat, dtype=float)
    X0i, S0i = np.asarray(X0_inner, dtype=float), np.asarray(S0_inner, dtype=float)
    y0 = np.asarray(y0_full, dtype=float)
    yhat = np.asarray(yhat, dtype=float)
    if x0_extra <= 0:
        raise ValueError("appended primal entry must be positive")
    if y0.shape != (m + 1,) or y0[m] == 0:
        raise ValueError("y0 must have m+1 entries with a nonzero last entry")

    delta = trace_dot(X0i - Xhat, S0i - Shat)
    if not s0_extra > max(0.0, -delta / x0_extra):
        raise ValueError("appended dual entry violates the strict lower bound")
    shat_extra = delta / x0_extra + s0_extra

    alphas = np.array([trace_dot(Ai, Xhat - X0i) / x0_extra for Ai in Ahat])
    A_ext = np.zeros((m + 1, n + 1, n + 1))
    for i in range(m):
        A_ext[i, :n, :n] = Ahat[i]
        A_ext[i, n, n] = alphas[i]
    D = np.zeros((n + 1, n + 1))
    D[:n, :n] = Shat - S0i
    D[n, n] = shat_extra - s0_extra
    y0_top, y0_last = y0[:m], y0[m]
    A_ext[m] = sym((np.tensordot(yhat - y0_top, A_ext[:m], axes=1) + D) / y0_last)

    X_star = blockdiag(Xhat, 0.0)
    X0 = blockdiag(X0i, x0_extra)
    S_star = blockdiag(Shat, shat_extra)
    S0 = blockdiag(S0i, s0_extra)
    y_star = np.append(yhat, 0.0)

    b = np.array([trace_dot(Ai, X_star) for Ai in A_ext])
    C = sym(np.tensordot(y_star, A_ext, axes=1) + S_star)

    inst = SdoInstance(A_ext, b, C)
    n_B, n_T, n_N = partition_dims
    ext_basis = None
    if basis is not None:
        ext_basis = blockdiag(basis, 1.0)
    cert = SdoCertificate(
        interior=(X0, y0, S0),
        optimal=(X_star, y_star, S_star),
        partition_dims=(n_B, n_T, n_N + 1),
        basis=ext_basis,
        gamma=None if gamma is None else np.append(gamma, alphas[0]),
        maximally_complementary=maxcomp,
        strictly_complementary=n_T == 0,
        maxcomp_construction=maxcomp,
    )
    return inst, cert


def _interior_margin(delta: float, x0_extra: float, floor: float) -> float:
    bound = max(0.0, -delta / x0_extra)
    return bound + max(floor, floor * abs(delta / x0_extra))


def gen_sdo_block_both(
    m: int, n: int, n_B: int, n_N: int, controls: GenControls | None = None
) -> tuple[SdoInstance, SdoCertificate]:
    """Block-diagonal optimal pair plus a certified interior point.

    Output dimensions are (m+1, n+1); the appended direction lands in the
    N block.
    """
    controls = controls or GenControls()
    n_T = _check_dims(m, n, n_B, n_N)
    inner, inner_cert = gen_sdo_block_optimal(m, n, n_B, n_N, controls)
    Xhat, yhat, Shat = inner_cert.optimal
    stream = controls.stream().child(1)
    floor = controls.eigen_floor
    X0i = blockdiag(
        _random_pd(n_B, stream, floor), _random_pd(n_T, stream, floor), _random_pd(n_N, stream, floor)
    )
    S0i = blockdiag(
        _random_pd(n_B, stream, floor), _random_pd(n_T, stream, floor), _random_pd(n_N, stream, floor)
    )
    x0_extra = float(stream.uniform(0.5, 1.5))
    delta = trace_dot(X0i - Xhat, S0i - Shat)
    s0_extra = _interior_margin(delta, x0_extra, controls.margin)
    y0 = np.append(stream.uniform(size=m), stream.nonzero_scalar())
    inst, cert = extend_sdo_with_interior(
        inner.A, Xhat, yhat, Shat, X0i, S0i, x0_extra, s0_extra, y0, (n_B, n_T, n_N)
    )
    _apply_norm_targets(inst, cert, controls)
    inst.validate()
    return inst, cert


def gen_sdo_eig_both(
    m: int, n: int, n_B: int, n_N: int, controls: GenControls | None = None
) -> tuple[SdoInstance, SdoCertificate]:
    """Eigenbasis-form optimal pair plus a certified interior point.

    All four certified matrices share the extended orthonormal basis
    blockdiag(Q, 1); interior spectra are positive on every block.
    """
    controls = controls or GenControls()
    n_T = _check_dims(m, n, n_B, n_N)
    inner, inner_cert = gen_sdo_eig_optimal(m, n, n_B, n_N, controls)
    Xhat, yhat, Shat = inner_cert.optimal
    Q = inner_cert.basis
    stream = controls.stream().child(1)
    floor = controls.eigen_floor
    sig0 = positive_diag(stream, n, floor)
    lam0 = positive_diag(stream, n, floor)
    X0i = sym((Q * sig0) @ Q.T)
    S0i = sym((Q * lam0) @ Q.T)
    x0_extra = float(stream.uniform(0.5, 1.5))
    delta = trace_dot(X0i - Xhat, S0i - Shat)
    s0_extra = _interior_margin(delta, x0_extra, controls.margin)
    y0 = np.append(stream.uniform(size=m), stream.nonzero_scalar())
    inst, cert = extend_sdo_with_interior(
        inner.A, Xhat, yhat, Shat, X0i, S0i, x0_extra, s0_extra, y0, (n_B, n_T, n_N), basis=Q
    )
    _apply_norm_targets(inst, cert, controls)
    inst.validate()
    return inst, cert


def gen_sdo_maxcomp_both(
    m: int, n: int, n_B: int, n_N: int, controls: GenControls | None = None
) -> tuple[SdoInstance, SdoCertificate]:
    """Maximal-complementarity construction plus a certified interior point.

    Combines the structural first constraint (spectrum zero on B, positive
    on T) with the one-row/one-column interior extension; the appended
    eigen-direction joins the N block, so the declared partition has
    dimensions (n_B, n_T, n_N + 1) over n + 1.
    """
    controls = controls or GenControls()
    n_T = _check_dims(m, n, n_B, n_N)
    if n_B < 1 or n_N < 1:
        raise ValueError("require n_B >= 1 and n_N >= 1")
    if m > n * n_B:
        # the appended coordinate of every basis product is structurally
        # zero, so the m independent products must fit in n * n_B dimensions
        raise ValueError(f"require m <= n * n_B, got m={m}, n={n}, n_B={n_B}")
    inner, inner_cert = gen_sdo_maxcomp(m, n, n_B, n_N, controls)
    last_err = None
    for attempt in range(_RETRIES):
        Xhat, yhat, Shat = inner_cert.optimal
        Q = inner_cert.basis
        stream = controls.stream().child(1 + attempt)
        floor = controls.eigen_floor
        sig0 = positive_diag(stream, n, floor)
        lam0 = positive_diag(stream, n, floor)
        X0i = sym((Q * sig0) @ Q.T)
        S0i = sym((Q * lam0) @ Q.T)
        x0_extra = float(stream.uniform(0.5, 1.5))
        delta = trace_dot(X0i - Xhat, S0i - Shat)
        s0_extra = _interior_margin(delta, x0_extra, controls.margin)
        y0 = np.append(stream.uniform(size=m), stream.nonzero_scalar())
        inst, cert = extend_sdo_with_interior(
            inner.A,
            Xhat,
            yhat,
            Shat,
            X0i,
            S0i,
            x0_extra,
            s0_extra,
            y0,
            (n_B, n_T, n_N),
            basis=Q,
            gamma=inner_cert.gamma,
            maxcomp=True,
        )
        Q_B = cert.basis[:, :n_B]
        if numerical_rank(basis_products(inst.A[1:], Q_B), 1e-8) == m:
            _apply_norm_targets(inst, cert, controls)
            inst.validate()
            return inst, cert
        last_err = GenerationError("extended basis products lost independence")
    raise last_err
