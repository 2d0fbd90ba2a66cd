"""Seeded random scalar/vector/matrix construction.

Everything here is a pure function of its inputs and the state of the
supplied :class:`RngStream`, so identical (seed, stream_id) pairs reproduce
identical output on every platform.  Matrix factories cover dense/sparse
rectangular matrices with full row rank, matrices with a prescribed
condition number, positive semidefinite matrices built by four standard
constructions (Gram, triangular factor, spectral, LDL^T), and orthonormal
matrices from a Householder QR factorization with sign correction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MATRIX_KINDS = ("dense", "sparse", "psd", "pd", "orthonormal", "lower-triangular")
PSD_METHODS = ("gram", "cholesky-like", "spectral", "ldl")

# Scalars that must be strictly positive are drawn from this window so
# interiority margins stay testable.
POSITIVE_LO, POSITIVE_HI = 0.1, 1.1

_FULL_RANK_RETRIES = 5


class GenerationError(RuntimeError):
    """A random construction failed to satisfy its contract after retries."""


class RngStream:
    """Splittable deterministic random stream.

    Wraps a PCG64 generator keyed by a 64-bit seed and a 32-bit stream id.
    Distinct stream ids derived from one seed yield independent
    subsequences, which is what batch drivers rely on.
    """

    def __init__(self, seed: int, stream_id: int = 0, _subkey: tuple[int, ...] = ()):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.stream_id = int(stream_id) & 0xFFFFFFFF
        self._subkey = tuple(int(k) for k in _subkey)
        seq = np.random.SeedSequence(
            entropy=self.seed, spawn_key=(self.stream_id, *self._subkey)
        )
        self._gen = np.random.Generator(np.random.PCG64(seq))

    def spawn(self, stream_id: int) -> "RngStream":
        """Fresh stream with the same seed and a different stream id."""
        return RngStream(self.seed, stream_id)

    def child(self, tag: int) -> "RngStream":
        """Derived stream independent of this one and of other tags."""
        return RngStream(self.seed, self.stream_id, _subkey=(*self._subkey, tag))

    def uniform(self, lo: float = -1.0, hi: float = 1.0, size=None):
        return self._gen.uniform(lo, hi, size=size)

    def positive(self, size=None):
        """Strictly positive draws bounded away from zero."""
        return self._gen.uniform(POSITIVE_LO, POSITIVE_HI, size=size)

    def signs(self, size=None):
        return np.where(self._gen.random(size=size) < 0.5, -1.0, 1.0)

    def nonzero_scalar(self, lo: float = 0.5, hi: float = 1.5) -> float:
        """Scalar with |value| in [lo, hi] and random sign."""
        return float(self._gen.uniform(lo, hi) * (1.0 if self._gen.random() < 0.5 else -1.0))

    def integers(self, low, high, size=None):
        return self._gen.integers(low, high, size=size)

    def permutation(self, n: int):
        return self._gen.permutation(n)


def next_uniform(stream: RngStream, lo: float, hi: float) -> float:
    """One uniform draw from [lo, hi); advances the stream."""
    if not lo < hi:
        raise ValueError(f"require lo < hi, got lo={lo}, hi={hi}")
    return float(stream.uniform(lo, hi))


@dataclass(frozen=True)
class MatrixRecipe:
    """Specification of a random matrix draw for :func:`gen_matrix`."""

    rows: int
    cols: int
    kind: str = "dense"
    density: float | None = None
    cond_target: float | None = None
    fro_norm_target: float | None = None
    eigen_floor: float = 0.0

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("rows and cols must be positive")
        if self.kind not in MATRIX_KINDS:
            raise ValueError(f"unknown matrix kind {self.kind!r}")
        if self.kind in ("psd", "pd", "orthonormal") and self.rows != self.cols:
            raise ValueError(f"kind {self.kind!r} requires a square shape")
        if self.density is not None and not 0.0 < self.density <= 1.0:
            raise ValueError("density must lie in (0, 1]")
        if self.cond_target is not None and self.cond_target < 1.0:
            raise ValueError("cond_target must be >= 1")
        if self.fro_norm_target is not None and self.fro_norm_target <= 0.0:
            raise ValueError("fro_norm_target must be positive")
        if self.eigen_floor < 0.0:
            raise ValueError("eigen_floor must be nonnegative")


def sym(M: np.ndarray) -> np.ndarray:
    """Symmetrize; kills rounding asymmetry without changing the analysis."""
    return (M + M.T) / 2.0


def numerical_rank(M: np.ndarray, rel_tol: float = 1e-10) -> int:
    """Rank by singular values above rel_tol * sigma_max."""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


def gen_orthonormal(n: int, stream: RngStream) -> np.ndarray:
    """Random n-by-n orthonormal matrix.

    Householder QR of a square uniform matrix, with the columns flipped so
    the triangular factor has a positive diagonal (reproducible sign
    convention).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    A = stream.uniform(size=(n, n))
    Q, R = np.linalg.qr(A)
    d = np.sign(np.diag(R))
    d[d == 0] = 1.0
    return Q * d


def gen_conditioned(rows: int, cols: int, cond: float, stream: RngStream) -> np.ndarray:
    """rows-by-cols matrix with prescribed spectral condition number.

    Built as U diag(sigma) V^T with orthonormal factors and singular values
    geometrically spaced from 1 down to 1/cond.
    """
    if cond < 1.0:
        raise ValueError(f"cond must be >= 1, got {cond}")
    if rows > cols:
        raise ValueError("require rows <= cols")
    sigma = np.geomspace(1.0, 1.0 / cond, rows)
    U = gen_orthonormal(rows, stream)
    V = gen_orthonormal(cols, stream)
    return (U * sigma) @ V[:, :rows].T


def gen_psd(n: int, method: str = "gram", spectrum=None, stream: RngStream | None = None) -> np.ndarray:
    """Random n-by-n symmetric positive semidefinite matrix.

    Methods: ``gram`` (A A^T), ``cholesky-like`` (L L^T with positive
    diagonal, hence positive definite), ``spectral`` (Q diag(spectrum) Q^T,
    reproducing a prescribed eigenvalue profile), and ``ldl``
    (L D L^T with unit lower-triangular L; a ``spectrum`` argument, when
    given, supplies the diagonal of D).
    """
    if stream is None:
        raise ValueError("an RngStream is required")
    if n < 1:
        raise ValueError("n must be >= 1")
    if method not in PSD_METHODS:
        raise ValueError(f"unknown psd method {method!r}")
    if spectrum is not None:
        spectrum = np.asarray(spectrum, dtype=float)
        if spectrum.shape != (n,):
            raise ValueError(f"spectrum must have length {n}")
        if np.any(spectrum < 0):
            raise ValueError("spectrum entries must be nonnegative")
        if method not in ("spectral", "ldl"):
            raise ValueError("a prescribed spectrum requires method 'spectral' or 'ldl'")

    if method == "gram":
        A = stream.uniform(size=(n, n))
        return sym(A @ A.T)
    if method == "cholesky-like":
        L = np.tril(stream.uniform(size=(n, n)), k=-1)
        np.fill_diagonal(L, stream.positive(size=n))
        return sym(L @ L.T)
    if method == "ldl":
        L = np.tril(stream.uniform(size=(n, n)), k=-1)
        np.fill_diagonal(L, 1.0)
        d = spectrum if spectrum is not None else stream.positive(size=n)
        return sym((L * d) @ L.T)
    # spectral
    lam = spectrum if spectrum is not None else stream.positive(size=n)
    Q = gen_orthonormal(n, stream)
    return sym((Q * lam) @ Q.T)


def _ensure_full_row_rank(A: np.ndarray, redraw, tries: int = _FULL_RANK_RETRIES) -> np.ndarray:
    """Full numerical row rank via redraws, then a diagonal-pattern nudge."""
    m = A.shape[0]
    for _ in range(tries):
        if numerical_rank(A) == m:
            return A
        A = redraw()
    if numerical_rank(A) == m:
        return A
    eps = 1e-6 * np.linalg.norm(A)
    if eps == 0.0:
        eps = 1e-6
    A = A.copy()
    for i in range(m):
        A[i, i % A.shape[1]] += eps
    if numerical_rank(A) != m:
        raise GenerationError(
            f"could not reach full row rank {m} after {tries} redraws and perturbation"
        )
    return A


def _sparse_draw(rows: int, cols: int, density: float, stream: RngStream) -> np.ndarray:
    mask = stream.uniform(0.0, 1.0, size=(rows, cols)) < density
    for i in range(rows):
        if not mask[i].any():
            mask[i, int(stream.integers(0, cols))] = True
    A = np.zeros((rows, cols))
    A[mask] = stream.uniform(size=int(mask.sum()))
    return A


def gen_matrix(recipe: MatrixRecipe, stream: RngStream) -> np.ndarray:
    """Draw a matrix according to ``recipe``.

    Dense/sparse rectangular outputs with rows <= cols are guaranteed full
    numerical row rank.  The nonzero fraction of sparse outputs stays
    within 10% (relative, plus a one-cell discretization allowance) of the
    requested density.  A Frobenius-norm target is applied by exact
    post-scaling.
    """
    r = recipe
    if r.kind == "orthonormal":
        A = gen_orthonormal(r.rows, stream)
    elif r.kind == "lower-triangular":
        A = np.tril(stream.uniform(size=(r.rows, r.cols)))
    elif r.kind in ("psd", "pd"):
        if r.cond_target is not None:
            lam = np.geomspace(r.cond_target, 1.0, r.rows)
            lam = lam * max(r.eigen_floor, POSITIVE_LO)
            A = gen_psd(r.rows, "spectral", lam, stream)
        elif r.kind == "pd":
            lo = max(r.eigen_floor, POSITIVE_LO)
            A = gen_psd(r.rows, "spectral", stream.uniform(lo, lo + 1.0, size=r.rows), stream)
        else:
            A = gen_psd(r.rows, "gram", None, stream)
    elif r.kind == "sparse" or (r.kind == "dense" and r.density is not None):
        if r.cond_target is not None:
            raise GenerationError("cond_target is not supported together with a sparsity mask")
        density = r.density if r.density is not None else 0.5
        total = r.rows * r.cols
        tol = max(0.1 * density, 1.0 / total)

        def draw():
            return _sparse_draw(r.rows, r.cols, density, stream)

        A = None
        for _ in range(50):
            cand = draw()
            if abs(np.count_nonzero(cand) / total - density) <= tol:
                A = cand
                break
        if A is None:
            raise GenerationError(
                f"could not hit nonzero fraction {density} within {tol} in 50 draws"
            )
        if r.rows <= r.cols:
            A = _ensure_full_row_rank(A, draw)
            if abs(np.count_nonzero(A) / total - density) > tol:
                raise GenerationError(
                    "density target and full row rank are incompatible for this recipe"
                )
    else:  # dense
        if r.cond_target is not None:
            A = gen_conditioned(min(r.rows, r.cols), max(r.rows, r.cols), r.cond_target, stream)
            if r.rows > r.cols:
                A = A.T
        else:
            A = stream.uniform(size=(r.rows, r.cols))
            if r.rows <= r.cols:
                A = _ensure_full_row_rank(A, lambda: stream.uniform(size=(r.rows, r.cols)))

    if r.fro_norm_target is not None:
        nrm = np.linalg.norm(A)
        if nrm == 0.0:
            raise GenerationError("cannot scale an all-zero matrix to a norm target")
        A = A * (r.fro_norm_target / nrm)
    return A
