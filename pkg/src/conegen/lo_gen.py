"""Linear optimization instance generators.

Instances are standard-form problems  min c'x  s.t. Ax = b, x >= 0  built
around predefined certified solutions: an interior point, a (strictly)
complementary optimal point with a declared support partition, or both at
once.  Assembly uses exact formulas (b = A x, c = A'y + s), never solves,
so certified residuals sit at rounding level by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .controls import GenControls
from .randkit import (
    GenerationError,
    MatrixRecipe,
    RngStream,
    gen_matrix,
    numerical_rank,
)


@dataclass
class LinearInstance:
    """Problem data (A, b, c) with full-row-rank A and m < n."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    def validate(self) -> None:
        m, n = self.A.shape
        if m >= n:
            raise ValueError(f"require m < n, got {m}x{n}")
        if self.b.shape != (m,) or self.c.shape != (n,):
            raise ValueError("b/c shapes inconsistent with A")
        if numerical_rank(self.A, 1e-10) != m:
            raise ValueError("coefficient matrix is numerically row-rank deficient")


@dataclass
class LoCertificate:
    """Certified solutions and the declared support partition.

    ``partition`` is a pair (B, N) of index arrays covering [0, n); it is
    None for interior-only outputs where no optimal support is declared.
    ``scaling`` records the primal/dual rescaling applied for norm targets.
    """

    interior: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None
    optimal: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None
    partition: tuple[np.ndarray, np.ndarray] | None = None
    mu: float | None = None
    strictly_complementary: bool = False
    unique_basis: bool = False
    scaling: dict = field(default_factory=dict)


def split_partition(n: int, partition) -> tuple[np.ndarray, np.ndarray]:
    """Normalize a (B, N) pair into sorted, disjoint index arrays covering [0, n)."""
    B, N = partition
    B = np.asarray(sorted(int(i) for i in B), dtype=int)
    N = np.asarray(sorted(int(i) for i in N), dtype=int)
    if B.size + N.size != n or np.intersect1d(B, N).size != 0:
        raise ValueError("partition must split {0,...,n-1} into disjoint B and N")
    if (B.size and (B.min() < 0 or B.max() >= n)) or (N.size and (N.min() < 0 or N.max() >= n)):
        raise ValueError("partition indices out of range")
    return B, N


def random_partition(n: int, stream: RngStream) -> tuple[np.ndarray, np.ndarray]:
    """Uniform nonempty-B-biased random split of [0, n)."""
    k = int(stream.integers(1, n))  # |B| in [1, n-1]
    perm = stream.permutation(n)
    return np.sort(perm[:k]), np.sort(perm[k:])


def _coefficient_matrix(m: int, n: int, controls: GenControls, stream: RngStream) -> np.ndarray:
    recipe = MatrixRecipe(
        rows=m,
        cols=n,
        kind="sparse" if controls.density is not None else "dense",
        density=controls.density,
        cond_target=controls.cond,
    )
    return gen_matrix(recipe, stream)


def _apply_norm_targets(A, cert: LoCertificate, controls: GenControls):
    """Rescale primal and dual certified vectors so ||b||, ||c|| hit targets.

    Scaling every primal vector by one factor and every dual vector by
    another preserves feasibility identities exactly and keeps
    complementarity at zero, so b and c are recomputed afterwards.
    """
    x_ref = cert.optimal[0] if cert.optimal is not None else cert.interior[0]
    if controls.norm_b is not None:
        nb = np.linalg.norm(A @ x_ref)
        if nb == 0.0:
            raise GenerationError("norm_b target is unreachable: assembled b is zero")
        t = controls.norm_b / nb
        cert.scaling["primal"] = t
        if cert.optimal is not None:
            x, y, s = cert.optimal
            cert.optimal = (x * t, y, s)
        if cert.interior is not None:
            x0, y0, s0 = cert.interior
            cert.interior = (x0 * t, y0, s0)
    if controls.norm_c is not None:
        y_ref, s_ref = (
            (cert.optimal[1], cert.optimal[2])
            if cert.optimal is not None
            else (cert.interior[1], cert.interior[2])
        )
        nc = np.linalg.norm(A.T @ y_ref + s_ref)
        if nc == 0.0:
            raise GenerationError("norm_c target is unreachable: assembled c is zero")
        u = controls.norm_c / nc
        cert.scaling["dual"] = u
        if cert.optimal is not None:
            x, y, s = cert.optimal
            cert.optimal = (x, y * u, s * u)
        if cert.interior is not None:
            x0, y0, s0 = cert.interior
            cert.interior = (x0, y0 * u, s0 * u)
    if cert.mu is not None and cert.scaling:
        cert.mu *= cert.scaling.get("primal", 1.0) * cert.scaling.get("dual", 1.0)

    if cert.optimal is not None:
        x, y, s = cert.optimal
    else:
        x, y, s = cert.interior
    return A @ x, A.T @ y + s


def assemble_lo_interior(A, x0, y0, s0, mu=None) -> tuple[LinearInstance, LoCertificate]:
    """Exact assembly of an instance whose interior point is (x0, y0, s0)."""
    A = np.asarray(A, dtype=float)
    x0, y0, s0 = (np.asarray(v, dtype=float) for v in (x0, y0, s0))
    if np.any(x0 <= 0) or np.any(s0 <= 0):
        raise ValueError("interior solution requires strictly positive x0 and s0")
    b = A @ x0
    c = A.T @ y0 + s0
    inst = LinearInstance(A, b, c)
    cert = LoCertificate(interior=(x0, y0, s0), mu=mu)
    return inst, cert


def gen_lo_interior(
    m: int,
    n: int,
    controls: GenControls | None = None,
    x0=None,
    s0=None,
    mu: float | None = None,
) -> tuple[LinearInstance, LoCertificate]:
    """Instance with a predefined interior solution.

    When ``mu`` is given, the dual slack is coupled as s0_i = mu / x0_i so
    the duality gap is exactly n * mu; supplying both mu and s0 is
    rejected.
    """
    controls = controls or GenControls()
    if m >= n:
        raise ValueError(f"require m < n, got m={m}, n={n}")
    if mu is not None and s0 is not None:
        raise ValueError("mu and s0 are mutually exclusive")
    if mu is not None and mu <= 0:
        raise ValueError("mu must be positive")
    stream = controls.stream()
    x0 = stream.positive(size=n) if x0 is None else np.asarray(x0, dtype=float)
    if np.any(x0 <= 0):
        raise ValueError("x0 must be strictly positive")
    if mu is not None:
        s0 = mu / x0
    elif s0 is None:
        s0 = stream.positive(size=n)
    else:
        s0 = np.asarray(s0, dtype=float)
    if np.any(s0 <= 0):
        raise ValueError("s0 must be strictly positive")
    A = _coefficient_matrix(m, n, controls, stream)
    y0 = stream.uniform(size=m)
    inst, cert = assemble_lo_interior(A, x0, y0, s0, mu=mu)
    inst.b, inst.c = _apply_norm_targets(A, cert, controls)
    inst.validate()
    return inst, cert


def assemble_lo_optimal(A, B, N, x_star, y_star, s_star) -> tuple[LinearInstance, LoCertificate]:
    """Exact assembly around a complementary optimal point supported on (B, N)."""
    A = np.asarray(A, dtype=float)
    x, y, s = (np.asarray(v, dtype=float) for v in (x_star, y_star, s_star))
    n = A.shape[1]
    B, N = split_partition(n, (B, N))
    if np.any(x[N] != 0) or np.any(s[B] != 0):
        raise ValueError("x* must vanish on N and s* must vanish on B")
    if np.any(x < 0) or np.any(s < 0):
        raise ValueError("x* and s* must be nonnegative")
    b = A @ x
    c = A.T @ y + s
    inst = LinearInstance(A, b, c)
    strict = bool(np.all(x + s > 0))
    unique = False
    if B.size == A.shape[0]:
        AB = A[:, B]
        sv = np.linalg.svd(AB, compute_uv=False)
        unique = bool(sv[-1] > 1e-8 * sv[0])
    cert = LoCertificate(
        optimal=(x, y, s),
        partition=(B, N),
        strictly_complementary=strict,
        unique_basis=unique,
    )
    return inst, cert


def gen_lo_optimal(
    m: int,
    n: int,
    partition=None,
    controls: GenControls | None = None,
    strict: bool = True,
) -> tuple[LinearInstance, LoCertificate]:
    """Instance with a predefined complementary optimal solution.

    With ``strict`` the point is strictly complementary and the declared
    (B, N) is the optimal partition of the instance; otherwise entries on
    the support are merely nonnegative and (B, N) is only a containment.
    Degenerate splits are allowed: B empty forces b = 0, N empty forces
    c = A'y*.
    """
    controls = controls or GenControls()
    if m >= n:
        raise ValueError(f"require m < n, got m={m}, n={n}")
    stream = controls.stream()
    if partition is None:
        B, N = random_partition(n, stream)
    else:
        B, N = split_partition(n, partition)
    if B.size == 0 and strict and controls.norm_b:
        raise GenerationError("empty B forces b = 0; nonzero norm_b target is unreachable")
    x = np.zeros(n)
    s = np.zeros(n)
    if strict:
        x[B] = stream.positive(size=B.size)
        s[N] = stream.positive(size=N.size)
    else:
        # Nonnegative variant: a random subset of the support is pinned to zero.
        xb = stream.positive(size=B.size)
        xb[stream.uniform(0.0, 1.0, size=B.size) < 0.3] = 0.0
        x[B] = xb
        sn = stream.positive(size=N.size)
        sn[stream.uniform(0.0, 1.0, size=N.size) < 0.3] = 0.0
        s[N] = sn
    A = _coefficient_matrix(m, n, controls, stream)
    y = stream.uniform(size=m)
    inst, cert = assemble_lo_optimal(A, B, N, x, y, s)
    inst.b, inst.c = _apply_norm_targets(A, cert, controls)
    inst.validate()
    return inst, cert


def positive_part(v: float) -> float:
    return max(0.0, v)


def strict_margin(bound: float, floor: float = 0.1) -> float:
    """Offset used to realize a strict inequality v > bound robustly."""
    return max(floor, floor * abs(bound))


def extend_lo_with_interior(
    Ahat, B, N, xhat, yhat, shat, x0_inner, s0_inner, x0_extra, s0_extra, y0_full
) -> tuple[LinearInstance, LoCertificate]:
    """Append one variable and one constraint so a given interior point
    becomes feasible alongside the inner problem's optimal point.

    The correction scalar delta accounts for the inner product mismatch
    between the two points; the appended slack entries absorb it so that
    (x0 - x*)'(s0 - s*) = 0 exactly in exact arithmetic.
    """
    Ahat = np.asarray(Ahat, dtype=float)
    m, n = Ahat.shape
    B, N = split_partition(n, (B, N))
    xhat, yhat, shat = (np.asarray(v, dtype=float) for v in (xhat, yhat, shat))
    x0_inner, s0_inner = (np.asarray(v, dtype=float) for v in (x0_inner, s0_inner))
    y0_full = np.asarray(y0_full, dtype=float)
    if np.any(x0_inner <= 0) or np.any(s0_inner <= 0) or x0_extra <= 0:
        raise ValueError("interior components must be strictly positive")
    if y0_full.shape != (m + 1,) or y0_full[m] == 0:
        raise ValueError("y0 must have m+1 entries with a nonzero last entry")

    delta = float((x0_inner[B] - xhat[B]) @ s0_inner[B] + (s0_inner[N] - shat[N]) @ x0_inner[N])
    if not s0_extra > positive_part(-delta / x0_extra):
        raise ValueError("appended dual slack violates the strict lower bound")
    shat_extra = delta / x0_extra + s0_extra

    a_col = Ahat @ (xhat - x0_inner) / x0_extra
    y0_top, y0_last = y0_full[:m], y0_full[m]
    d = (Ahat.T @ (yhat - y0_top) + shat - s0_inner) / y0_last
    d_extra = float(d @ (xhat - x0_inner)) / x0_extra

    A = np.zeros((m + 1, n + 1))
    A[:m, :n] = Ahat
    A[:m, n] = a_col
    A[m, :n] = d
    A[m, n] = d_extra

    x_star = np.append(xhat, 0.0)
    s_star = np.append(shat, shat_extra)
    y_star = np.append(yhat, 0.0)
    x0 = np.append(x0_inner, x0_extra)
    s0 = np.append(s0_inner, s0_extra)

    b = np.append(Ahat @ xhat, float(d @ xhat))
    c = np.append(Ahat.T @ yhat + shat, float(a_col @ yhat) + shat_extra)

    inst = LinearInstance(A, b, c)
    cert = LoCertificate(
        interior=(x0, y0_full, s0),
        optimal=(x_star, y_star, s_star),
        partition=(B, np.sort(np.append(N, n))),
        strictly_complementary=bool(np.all(x_star + s_star > 0)),
    )
    return inst, cert


def gen_lo_both(
    m: int,
    n: int,
    partition=None,
    controls: GenControls | None = None,
    simplified: bool = False,
) -> tuple[LinearInstance, LoCertificate]:
    """Instance carrying both an optimal and an interior certified solution.

    The inner m-by-n problem comes from :func:`gen_lo_optimal`; the output
    has m+1 constraints and n+1 variables.  ``simplified`` pins the
    interior point to the inner optimal data (x0_B = x*_B, s0_N = s*_N,
    y0 top = y*, unit entries elsewhere), which makes the correction
    scalar vanish.
    """
    controls = controls or GenControls()
    if m >= n:
        raise ValueError(f"require m < n, got m={m}, n={n}")
    inner, inner_cert = gen_lo_optimal(m, n, partition, controls, strict=True)
    B, N = inner_cert.partition
    xhat, yhat, shat = inner_cert.optimal
    stream = controls.stream().child(1)

    if simplified:
        x0_inner = np.ones(n)
        x0_inner[B] = xhat[B]
        s0_inner = np.ones(n)
        s0_inner[N] = shat[N]
        y0_full = np.append(yhat, 1.0)
        x0_extra, s0_extra = 1.0, 1.0
    else:
        x0_inner = stream.positive(size=n)
        s0_inner = stream.positive(size=n)
        y0_full = np.append(stream.uniform(size=m), stream.nonzero_scalar())
        x0_extra = float(stream.positive())
        delta = float(
            (x0_inner[B] - xhat[B]) @ s0_inner[B] + (s0_inner[N] - shat[N]) @ x0_inner[N]
        )
        bound = positive_part(-delta / x0_extra)
        s0_extra = bound + strict_margin(delta / x0_extra, controls.margin)

    inst, cert = extend_lo_with_interior(
        inner.A, B, N, xhat, yhat, shat, x0_inner, s0_inner, x0_extra, s0_extra, y0_full
    )
    inst.b, inst.c = _apply_norm_targets(inst.A, cert, controls)
    inst.validate()
    return inst, cert
