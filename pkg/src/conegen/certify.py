"""Independent verification of instances against their certificates.

Nothing here trusts a certificate flag or a generator-side quantity:
residuals, cone memberships, complementarity gaps and structural rank
facts are all recomputed from the raw instance data.  Claims that follow
from the construction but cannot be checked without solving (maximal
complementarity itself) are reported as "hypotheses verified" notes.  A brute-force vertex enumerator
provides an optimality oracle for small linear instances.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .lo_gen import LinearInstance, LoCertificate
from .randkit import numerical_rank
from .sdo_gen import SdoCertificate, SdoInstance, basis_products, trace_dot
from .soco_gen import SocoCertificate, SocoInstance, block_slices, cone_margin, jordan_product


@dataclass(frozen=True)
class Tolerances:
    """Default thresholds: an order above accumulation rounding for n <= 100."""

    feas: float = 1e-8  # residuals, relative to 1 + ||rhs||
    complementarity: float = 1e-10  # gap, relative to 1 + ||x|| ||s||
    psd: float = 1e-9  # min eig >= -psd * (1 + max eig)
    rank: float = 1e-8  # singular values above rank * sigma_max count
    zero: float = 1e-12  # structural "vanishes exactly" checks, relative
    cone: float = 1e-10  # cone membership slack, relative
    jordan: float = 1e-11  # blockwise product, relative to 1 + ||x|| ||s||

    def to_dict(self) -> dict:
        return {
            "feas": self.feas,
            "complementarity": self.complementarity,
            "psd": self.psd,
            "rank": self.rank,
            "zero": self.zero,
            "cone": self.cone,
            "jordan": self.jordan,
        }


@dataclass
class VerifyReport:
    """Recomputed verification facts with one pass/fail entry per check."""

    primal_residual: float = 0.0
    dual_residual: float = 0.0
    complementarity_gap: float = 0.0
    cone_margins: dict = field(default_factory=dict)
    structural_checks: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    passed: bool = False
    tolerances_used: dict = field(default_factory=dict)
    notes: tuple = ()

    def finalize(self) -> "VerifyReport":
        self.passed = all(self.checks.values()) and all(self.structural_checks.values())
        return self

    def summary(self) -> str:
        lines = [
            f"primal residual       {self.primal_residual:.3e}",
            f"dual residual         {self.dual_residual:.3e}",
            f"complementarity gap   {self.complementarity_gap:.3e}",
        ]
        for name, val in sorted(self.cone_margins.items()):
            lines.append(f"margin {name:<15}{val:+.3e}")
        for name, ok in sorted(self.checks.items()):
            lines.append(f"check  {name:<22}{'pass' if ok else 'FAIL'}")
        for name, ok in sorted(self.structural_checks.items()):
            lines.append(f"struct {name:<22}{'pass' if ok else 'FAIL'}")
        for note in self.notes:
            lines.append(f"note   {note}")
        lines.append(f"verdict               {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "primal_residual": float(self.primal_residual),
            "dual_residual": float(self.dual_residual),
            "complementarity_gap": float(self.complementarity_gap),
            "cone_margins": {k: float(v) for k, v in self.cone_margins.items()},
            "structural_checks": {k: bool(v) for k, v in self.structural_checks.items()},
            "checks": {k: bool(v) for k, v in self.checks.items()},
            "passed": bool(self.passed),
            "tolerances_used": dict(self.tolerances_used),
            "notes": list(self.notes),
        }


def _rel_residual(vec: np.ndarray, ref: np.ndarray) -> float:
    return float(np.linalg.norm(vec) / (1.0 + np.linalg.norm(ref)))


def verify_lo(
    instance: LinearInstance, cert: LoCertificate, tol: Tolerances | None = None
) -> VerifyReport:
    """Recompute feasibility, nonnegativity, complementarity and support
    consistency for a linear instance."""
    tol = tol or Tolerances()
    A, b, c = instance.A, instance.b, instance.c
    m, n = A.shape
    for name, v, size in (("x", 0, n), ("y", 1, m), ("s", 2, n)):
        for sol in (cert.interior, cert.optimal):
            if sol is not None and sol[v].shape != (size,):
                raise ValueError(f"certificate vector {name} has wrong shape")

    rep = VerifyReport(tolerances_used=tol.to_dict())
    primal, dual = [], []
    if cert.interior is not None:
        x0, y0, s0 = cert.interior
        primal.append(_rel_residual(A @ x0 - b, b))
        dual.append(_rel_residual(A.T @ y0 + s0 - c, c))
        rep.cone_margins["x_interior"] = float(x0.min())
        rep.cone_margins["s_interior"] = float(s0.min())
        rep.checks["interior_positivity"] = x0.min() > 0 and s0.min() > 0
    if cert.optimal is not None:
        x, y, s = cert.optimal
        primal.append(_rel_residual(A @ x - b, b))
        dual.append(_rel_residual(A.T @ y + s - c, c))
        rep.cone_margins["x_optimal"] = float(x.min())
        rep.cone_margins["s_optimal"] = float(s.min())
        scale_x = 1.0 + float(np.abs(x).max(initial=0.0))
        scale_s = 1.0 + float(np.abs(s).max(initial=0.0))
        rep.checks["optimal_nonnegativity"] = (
            x.min() >= -tol.cone * scale_x and s.min() >= -tol.cone * scale_s
        )
        gap_scale = 1.0 + np.linalg.norm(x) * np.linalg.norm(s)
        rep.complementarity_gap = float(abs(x @ s))
        rep.checks["complementarity"] = rep.complementarity_gap <= tol.complementarity * gap_scale
        if cert.partition is not None:
            B, N = cert.partition
            ok = np.all(np.abs(x[N]) <= tol.zero * scale_x) and np.all(
                np.abs(s[B]) <= tol.zero * scale_s
            )
            rep.checks["partition_consistency"] = bool(ok)
        if cert.strictly_complementary:
            rep.checks["strict_complementarity"] = bool((x + s).min() > 0)
    rep.primal_residual = max(primal, default=0.0)
    rep.dual_residual = max(dual, default=0.0)
    rep.checks["primal_residual"] = rep.primal_residual <= tol.feas
    rep.checks["dual_residual"] = rep.dual_residual <= tol.feas
    rep.structural_checks["instance_rank"] = numerical_rank(A, tol.rank) == m
    return rep.finalize()


def _eigvals(M: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh((M + M.T) / 2.0)


def _check_symmetric(M: np.ndarray, what: str) -> None:
    if np.linalg.norm(M - M.T) > 1e-10 * (1.0 + np.linalg.norm(M)):
        raise ValueError(f"{what} is not symmetric within 1e-10")


def verify_sdo(
    instance: SdoInstance, cert: SdoCertificate, tol: Tolerances | None = None
) -> VerifyReport:
    """Recompute trace residuals, definiteness margins, complementarity and
    the structural hypotheses behind declared maximal complementarity."""
    tol = tol or Tolerances()
    A, b, C = instance.A, instance.b, instance.C
    m, n = instance.m, instance.n
    for Mi in A:
        _check_symmetric(Mi, "constraint matrix")
    _check_symmetric(C, "cost matrix")
    for sol in (cert.interior, cert.optimal):
        if sol is not None:
            _check_symmetric(sol[0], "certificate matrix")
            _check_symmetric(sol[2], "certificate matrix")

    rep = VerifyReport(tolerances_used=tol.to_dict())
    primal, dual = [], []

    def add_residuals(X, y, S):
        pr = max(
            abs(trace_dot(Ai, X) - bi) / (1.0 + abs(bi)) for Ai, bi in zip(A, b)
        )
        primal.append(float(pr))
        dual.append(_rel_residual((np.tensordot(y, A, axes=1) + S - C).ravel(), C.ravel()))

    if cert.interior is not None:
        X0, y0, S0 = cert.interior
        add_residuals(X0, y0, S0)
        ex, es = _eigvals(X0), _eigvals(S0)
        rep.cone_margins["X_interior_eig"] = float(ex.min())
        rep.cone_margins["S_interior_eig"] = float(es.min())
        rep.checks["interior_definiteness"] = ex.min() > 0 and es.min() > 0
    if cert.optimal is not None:
        X, y, S = cert.optimal
        add_residuals(X, y, S)
        ex, es = _eigvals(X), _eigvals(S)
        rep.cone_margins["X_optimal_eig"] = float(ex.min())
        rep.cone_margins["S_optimal_eig"] = float(es.min())
        rep.checks["optimal_psd"] = ex.min() >= -tol.psd * (1.0 + ex.max()) and es.min() >= -tol.psd * (
            1.0 + es.max()
        )
        scale = 1.0 + np.linalg.norm(X) * np.linalg.norm(S)
        rep.complementarity_gap = float(abs(trace_dot(X, S)))
        rep.checks["complementarity"] = rep.complementarity_gap <= tol.complementarity * scale
        rep.checks["complementarity_product"] = (
            np.linalg.norm(X @ S) <= 1e-10 * scale
        )
        n_B, n_T, n_N = cert.partition_dims
        if n_B + n_T + n_N == n:
            rank_x = int(np.sum(ex > tol.rank * max(1.0, ex.max())))
            rank_s = int(np.sum(es > tol.rank * max(1.0, es.max())))
            rep.checks["rank_X_matches_nB"] = rank_x == n_B
            rep.checks["rank_S_matches_nN"] = rank_s == n_N
        if cert.strictly_complementary:
            rep.checks["strict_complementarity"] = bool(_eigvals(X + S).min() > 0)
    rep.primal_residual = max(primal, default=0.0)
    rep.dual_residual = max(dual, default=0.0)
    rep.checks["primal_residual"] = rep.primal_residual <= tol.feas
    rep.checks["dual_residual"] = rep.dual_residual <= tol.feas
    rep.structural_checks["constraint_independence"] = (
        numerical_rank(A.reshape(m, -1), tol.rank) == m
    )
    if cert.maxcomp_construction and cert.optimal is not None:
        _sdo_maxcomp_structure(instance, cert, tol, rep)
        rep.notes = (*rep.notes, "maximal complementarity: hypotheses verified, conclusion declared")
    return rep.finalize()


def _sdo_maxcomp_structure(instance, cert, tol, rep) -> None:
    """Structural hypotheses of the maximal-complementarity construction.

    The first constraint matrix is diagonal in the certificate basis with a
    zero B block and positive T block, which makes its product with the
    B-block basis vanish identically; independence is therefore required
    (and checked) over the remaining constraints.
    """
    A, b = instance.A, instance.b
    n = instance.n
    count = instance.m
    n_B, n_T, n_N = cert.partition_dims
    Q = cert.basis_matrix(n)
    rep.structural_checks["basis_orthonormal"] = (
        np.linalg.norm(Q.T @ Q - np.eye(n)) <= 1e-12 * n
    )
    scale = 1.0 + float(np.abs(A[0]).max())
    if n_B == 0:
        # Empty-B variant: every constraint diagonal in Q with a zero T block.
        ok_diag, ok_tzero = True, True
        nt = n_T
        for Ai in A:
            G = Q.T @ Ai @ Q
            off = G - np.diag(np.diag(G))
            ok_diag &= np.abs(off).max() <= 1e-10 * (1.0 + np.abs(G).max())
            if nt:
                ok_tzero &= np.abs(np.diag(G)[:nt]).max() <= tol.zero * scale
        rep.structural_checks["constraints_diagonal_in_basis"] = bool(ok_diag)
        rep.structural_checks["gamma_T_zero"] = bool(ok_tzero)
        spectra = np.stack([np.diag(Q.T @ Ai @ Q)[nt:] for Ai in A])
        rep.structural_checks["spectra_independent"] = (
            numerical_rank(spectra, tol.rank) == count
        )
        rep.structural_checks["b_zero"] = bool(np.abs(b).max(initial=0.0) == 0.0)
        return
    G = Q.T @ A[0] @ Q
    gamma = np.diag(G)
    rep.structural_checks["first_constraint_diagonal_in_basis"] = (
        np.abs(G - np.diag(gamma)).max() <= 1e-10 * (1.0 + np.abs(G).max())
    )
    rep.structural_checks["gamma_B_zero"] = np.abs(gamma[:n_B]).max() <= tol.zero * scale
    if n_T:
        g_t = gamma[n_B : n_B + n_T]
        rep.cone_margins["gamma_T_min"] = float(g_t.min())
        rep.structural_checks["gamma_T_positive"] = bool(g_t.min() > tol.zero * scale)
    P = basis_products(A, Q[:, :n_B])
    sigma_max = np.linalg.svd(P, compute_uv=False)[0]
    rep.structural_checks["first_product_vanishes"] = (
        np.linalg.norm(P[0]) <= 1e-10 * max(1.0, sigma_max)
    )
    rep.structural_checks["products_independent"] = (
        numerical_rank(P[1:], tol.rank) == count - 1
    )


def verify_soco(
    instance: SocoInstance, cert: SocoCertificate, tol: Tolerances | None = None
) -> VerifyReport:
    """Recompute residuals, blockwise cone margins, blockwise products and
    the per-label semantics of the declared partition."""
    tol = tol or Tolerances()
    A, b, c = instance.A, instance.b, instance.c
    dims = instance.cone_dims
    if sum(dims) != instance.n:
        raise ValueError("cone dimensions inconsistent with instance")
    if cert.partition is not None and len(cert.partition) != len(dims):
        raise ValueError("one partition label per cone required")
    slices = block_slices(dims)

    rep = VerifyReport(tolerances_used=tol.to_dict())
    primal, dual = [], []
    if cert.interior is not None:
        x0, y0, s0 = cert.interior
        primal.append(_rel_residual(A @ x0 - b, b))
        dual.append(_rel_residual(A.T @ y0 + s0 - c, c))
        mx = min(cone_margin(x0[sl]) for sl in slices)
        ms = min(cone_margin(s0[sl]) for sl in slices)
        rep.cone_margins["x_interior"] = float(mx)
        rep.cone_margins["s_interior"] = float(ms)
        rep.checks["interior_cone_margin"] = mx > 0 and ms > 0
    if cert.optimal is not None:
        x, y, s = cert.optimal
        primal.append(_rel_residual(A @ x - b, b))
        dual.append(_rel_residual(A.T @ y + s - c, c))
        scale_x = 1.0 + float(np.abs(x).max(initial=0.0))
        scale_s = 1.0 + float(np.abs(s).max(initial=0.0))
        mx = min(cone_margin(x[sl]) for sl in slices)
        ms = min(cone_margin(s[sl]) for sl in slices)
        rep.cone_margins["x_optimal"] = float(mx)
        rep.cone_margins["s_optimal"] = float(ms)
        rep.checks["optimal_cone_membership"] = (
            mx >= -tol.cone * scale_x and ms >= -tol.cone * scale_s
        )
        gap_scale = 1.0 + np.linalg.norm(x) * np.linalg.norm(s)
        jmax = max(
            float(np.abs(jordan_product(x[sl], s[sl])).max()) for sl in slices
        )
        rep.complementarity_gap = jmax
        rep.checks["complementarity"] = jmax <= tol.jordan * gap_scale
        if cert.partition is not None:
            rep.checks["partition_consistency"] = _soco_labels_ok(
                x, s, slices, cert.partition, tol, scale_x, scale_s
            )
    rep.primal_residual = max(primal, default=0.0)
    rep.dual_residual = max(dual, default=0.0)
    rep.checks["primal_residual"] = rep.primal_residual <= tol.feas
    rep.checks["dual_residual"] = rep.dual_residual <= tol.feas
    rep.structural_checks["instance_rank"] = numerical_rank(A, 1e-10) == instance.m
    if cert.maximally_complementary and cert.optimal is not None and cert.partition is not None:
        _soco_maxcomp_structure(instance, cert, tol, rep)
        rep.notes = (*rep.notes, "maximal complementarity: hypotheses verified, conclusion declared")
    return rep.finalize()


def _soco_labels_ok(x, s, slices, labels, tol, scale_x, scale_s) -> bool:
    for sl, lab in zip(slices, labels):
        xb, sb = x[sl], s[sl]
        x_zero = np.abs(xb).max(initial=0.0) <= tol.zero * scale_x
        s_zero = np.abs(sb).max(initial=0.0) <= tol.zero * scale_s
        x_margin = cone_margin(xb)
        s_margin = cone_margin(sb)
        x_boundary = abs(x_margin) <= tol.zero * scale_x and not x_zero
        s_boundary = abs(s_margin) <= tol.zero * scale_s and not s_zero
        if lab == "B":
            ok = s_zero and x_margin > 0
        elif lab == "N":
            ok = x_zero and s_margin > 0
        elif lab == "T1":
            ok = x_zero and s_zero
        elif lab == "T2":
            ok = s_zero and x_boundary
        elif lab == "T3":
            ok = x_zero and s_boundary
        else:  # R: both on the boundary, nonzero, anti-aligned
            anti = np.abs(jordan_product(xb, sb)).max() <= tol.jordan * (
                1.0 + np.linalg.norm(xb) * np.linalg.norm(sb)
            )
            ok = x_boundary and s_boundary and anti
        if not ok:
            return False
    return True


def _soco_maxcomp_structure(instance, cert, tol, rep) -> None:
    """Structural hypotheses of the maximal-complementarity row pattern.

    Row 0 vanishes on B/R/T2 columns and on the optimal support, so both
    the B/R/T2 column block and diag(x*) A' carry a structurally zero first
    row/column; full rank is therefore required over the remaining rows.
    For extended instances (an interior certificate is present) the
    appended last coordinate is exempt from the T2 row-support pattern.
    """
    A, b = instance.A, instance.b
    dims = instance.cone_dims
    labels = cert.partition
    slices = block_slices(dims)
    x = cert.optimal[0]
    rows = instance.m
    extended = cert.interior is not None
    scale_a = 1.0 + float(np.abs(A).max())

    support_cols = np.concatenate(
        [np.arange(sl.start, sl.stop) for sl, lab in zip(slices, labels) if lab in ("B", "R", "T2")]
    )
    row0 = A[0]
    ok_zero = np.abs(row0[support_cols]).max(initial=0.0) <= tol.zero * scale_a
    ok_t13 = True
    for sl, lab in zip(slices, labels):
        if lab in ("T1", "T3"):
            ok_t13 &= row0[sl.start] > 0
            if sl.stop - sl.start > 1:
                ok_t13 &= np.abs(row0[sl.start + 1 : sl.stop]).max() <= tol.zero * scale_a
    rep.structural_checks["first_row_pattern"] = bool(ok_zero and ok_t13)
    rep.structural_checks["b_first_zero"] = abs(b[0]) <= 1e-12 * (1.0 + np.linalg.norm(x))

    t2 = [i for i, lab in enumerate(labels) if lab == "T2"]
    ok_rows = True
    for k, p in enumerate(t2):
        sl = slices[p]
        row = A[1 + k]
        outside = np.ones(instance.n, dtype=bool)
        outside[sl] = False
        if extended:
            outside[-1] = False
        ok_rows &= np.abs(row[outside]).max(initial=0.0) <= tol.zero * scale_a
        ok_rows &= abs(row @ x) <= 1e-12 * (1.0 + np.linalg.norm(x)) * scale_a
    rep.structural_checks["t2_row_pattern"] = bool(ok_rows)

    sub = A[1:][:, support_cols]
    rep.structural_checks["support_block_rank"] = numerical_rank(sub, tol.rank) == rows - 1
    W = A * x
    sigma_max = np.linalg.svd(W, compute_uv=False)[0]
    rep.structural_checks["weighted_first_row_vanishes"] = (
        np.linalg.norm(W[0]) <= 1e-10 * max(1.0, sigma_max)
    )
    rep.structural_checks["weighted_rows_rank"] = numerical_rank(W[1:], tol.rank) == rows - 1


def lo_bruteforce_optimal(instance: LinearInstance) -> tuple[float, np.ndarray | None]:
    """Enumerate all basis candidates of a small linear instance.

    Returns (min c'x over feasible vertices, argmin vertex).  +inf means no
    feasible basic solution was found; -inf means an improving feasible ray
    was detected at some feasible basis (unboundedness is only detected
    through this reduced-cost screen, a documented limitation).
    """
    A, b, c = instance.A, instance.b, instance.c
    m, n = A.shape
    if n > 12:
        raise ValueError("enumeration limited to n <= 12")
    if numerical_rank(A, 1e-10) != m:
        raise ValueError("A must have full row rank")
    best = np.inf
    best_x = None
    feas_tol = 1e-9 * (1.0 + np.linalg.norm(b))
    for basis in combinations(range(n), m):
        B = np.array(basis)
        AB = A[:, B]
        sv = np.linalg.svd(AB, compute_uv=False)
        if sv[-1] <= 1e-10 * max(1.0, sv[0]):
            continue
        xB = np.linalg.solve(AB, b)
        if xB.min() < -feas_tol:
            continue
        # Reduced-cost screen for an improving feasible ray.
        yB = np.linalg.solve(AB.T, c[B])
        NB = np.setdiff1d(np.arange(n), B)
        reduced = c[NB] - A[:, NB].T @ yB
        for j, rj in zip(NB, reduced):
            if rj < -1e-9:
                direction = np.linalg.solve(AB, A[:, j])
                if direction.max(initial=-np.inf) <= 1e-10:
                    return -np.inf, None
        val = float(c[B] @ xB)
        if val < best - 1e-12:
            best = val
            best_x = np.zeros(n)
            best_x[B] = np.maximum(xB, 0.0)
    return best, best_x


def lo_data_from_soco(instance: SocoInstance, cert: SocoCertificate):
    """Reinterpret an all-1-dimensional-cones instance as linear data.

    Labels map to the linear support partition: B keeps its index, all
    other labels (N, T1) go to the dual side.
    """
    if any(d != 1 for d in instance.cone_dims):
        raise ValueError("requires all cone dimensions equal to 1")
    lin = LinearInstance(instance.A.copy(), instance.b.copy(), instance.c.copy())
    partition = None
    if cert.partition is not None:
        B = np.array([i for i, lab in enumerate(cert.partition) if lab == "B"], dtype=int)
        N = np.setdiff1d(np.arange(instance.n), B)
        partition = (B, N)
    lo_cert = LoCertificate(
        interior=cert.interior,
        optimal=cert.optimal,
        partition=partition,
        strictly_complementary=False,
    )
    return lin, lo_cert
