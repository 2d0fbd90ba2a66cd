"""Second-order cone optimization instance generators.

Instances are  min c'x  s.t. Ax = b  over a Cartesian product of Lorentz
cones.  Optimal solutions follow a six-way per-cone labeling: B (primal
block interior, dual block zero), N (the reverse), T1 (both zero), T2
(primal on the boundary and nonzero, dual zero), T3 (the reverse), and R
(both on the boundary, nonzero and anti-aligned).  The
maximal-complementarity construction additionally patterns the first
|T2|+1 rows of A; "both" variants extend the last cone by one coordinate
so a prescribed interior point can live next to the optimal one.
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

LABELS = ("B", "N", "R", "T1", "T2", "T3")

_RETRIES = 5


@dataclass
class SocoInstance:
    """Problem data (A, b, c) over cones of the given dimensions."""

    cone_dims: tuple[int, ...]
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
        if sum(self.cone_dims) != n or any(d < 1 for d in self.cone_dims):
            raise ValueError("cone dimensions inconsistent with A")
        if m >= n:
            raise ValueError(f"require m < n, got {m}x{n}")
        if self.b.shape != (m,) or self.c.shape != (n,):
            raise ValueError("b/c shapes inconsistent with A")
        if numerical_rank(self.A, 1e-10) != m:
            raise ValueError("coefficient matrix is numerically row-rank deficient")


@dataclass
class SocoCertificate:
    """Certified solutions plus the declared per-cone labeling."""

    interior: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None
    optimal: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None
    partition: tuple[str, ...] | None = None
    r_scalars: dict[int, float] = field(default_factory=dict)
    maximally_complementary: bool = False
    scaling: dict = field(default_factory=dict)


def block_slices(cone_dims) -> list[slice]:
    out, at = [], 0
    for d in cone_dims:
        out.append(slice(at, at + d))
        at += d
    return out


def cone_margin(v: np.ndarray) -> float:
    """head - ||tail||; nonnegative on the cone, positive in its interior."""
    v = np.asarray(v, dtype=float)
    if v.size == 1:
        return float(v[0])
    return float(v[0] - np.linalg.norm(v[1:]))


def jordan_product(x_block, s_block) -> np.ndarray:
    """Blockwise product whose vanishing encodes cone complementarity:
    head x's, tail x1*s_tail + s1*x_tail."""
    x = np.asarray(x_block, dtype=float)
    s = np.asarray(s_block, dtype=float)
    if x.shape != s.shape or x.ndim != 1 or x.size < 1:
        raise ValueError("blocks must be equal-length vectors")
    out = np.empty_like(x)
    out[0] = x @ s
    out[1:] = x[0] * s[1:] + s[0] * x[1:]
    return out


def interiorize(v) -> np.ndarray:
    """Push a block strictly inside the cone: head becomes ||tail|| + |head|."""
    v = np.asarray(v, dtype=float).copy()
    if v.size < 1:
        raise ValueError("block must be nonempty")
    if v[0] == 0.0:
        raise ValueError("head must be nonzero, otherwise the margin is zero")
    v[0] = np.linalg.norm(v[1:]) + abs(v[0])
    return v


def check_partition(cone_dims, labels) -> tuple[str, ...]:
    labels = tuple(labels)
    if len(labels) != len(cone_dims):
        raise ValueError("one label per cone required")
    for lab, d in zip(labels, cone_dims):
        if lab not in LABELS:
            raise ValueError(f"unknown label {lab!r}")
        if lab in ("R", "T2", "T3") and d < 2:
            raise ValueError(f"label {lab} needs cone dimension >= 2, got {d}")
    return labels


def random_partition(cone_dims, stream: RngStream) -> tuple[str, ...]:
    labels = []
    for d in cone_dims:
        allowed = LABELS if d >= 2 else ("B", "N", "T1")
        labels.append(allowed[int(stream.integers(0, len(allowed)))])
    return tuple(labels)


def random_maxcomp_partition(
    m: int, cone_dims, stream: RngStream, last_n: bool = False, tries: int = 200
) -> tuple[str, ...]:
    """Random labeling admissible for the maximal-complementarity
    construction: |T2|+1 < m <= |B|+|R|+|T2|, a nonempty N/T1/T3 side, and
    optionally the last cone pinned to N (for the interior extension)."""
    for _ in range(tries):
        labels = list(random_partition(cone_dims, stream))
        if last_n:
            labels[-1] = "N"
        try:
            check_maxcomp_partition(m, cone_dims, labels)
        except ValueError:
            continue
        return tuple(labels)
    raise GenerationError(
        f"no admissible labeling found for m={m}, cone_dims={tuple(cone_dims)}"
    )


def _interior_block(d: int, stream: RngStream, min_head: float = 0.0) -> np.ndarray:
    """Strictly interior block with margin >= 0.1 absolute and >= 10% of the
    block's sup-norm."""
    tail = stream.uniform(size=d - 1)
    h = max(float(stream.positive()), np.linalg.norm(tail) / 9.0, min_head)
    return np.concatenate([[np.linalg.norm(tail) + h], tail])


def _boundary_block(d: int, stream: RngStream) -> np.ndarray:
    tail = stream.positive(size=d - 1) * stream.signs(size=d - 1)
    return np.concatenate([[np.linalg.norm(tail)], tail])


def draw_optimal_solution(
    cone_dims, labels, stream: RngStream, last_cone_min_head: float = 0.0
):
    """Per-label optimal blocks (x*, s*) plus the R-cone scalars.

    The R construction pairs x = (||v||, v) with s = delta (||v||, -v) for a
    positive delta, the unique anti-aligned boundary pairing with vanishing
    blockwise product.
    """
    n = sum(cone_dims)
    x = np.zeros(n)
    s = np.zeros(n)
    r_scalars: dict[int, float] = {}
    slices = block_slices(cone_dims)
    last = len(cone_dims) - 1
    for i, (sl, lab, d) in enumerate(zip(slices, labels, cone_dims)):
        min_head = last_cone_min_head if i == last else 0.0
        if lab == "B":
            x[sl] = _interior_block(d, stream, min_head)
        elif lab == "N":
            s[sl] = _interior_block(d, stream, min_head)
        elif lab == "T1":
            pass
        elif lab == "T2":
            x[sl] = _boundary_block(d, stream)
        elif lab == "T3":
            s[sl] = _boundary_block(d, stream)
        else:  # R
            v = stream.positive(size=d - 1) * stream.signs(size=d - 1)
            delta = float(stream.uniform(0.5, 1.5))
            nv = np.linalg.norm(v)
            x[sl] = np.concatenate([[nv], v])
            s[sl] = delta * np.concatenate([[nv], -v])
            r_scalars[i] = delta
    return x, s, r_scalars


def _coefficient_matrix(m, n, controls: GenControls, stream: RngStream) -> np.ndarray:
    recipe = MatrixRecipe(
        rows=m,
        cols=n,
        kind="sparse" if controls.density is not None else "dense",
        density=controls.density,
        cond_target=controls.cond,
    )
    return gen_matrix(recipe, stream)


def _apply_norm_targets(inst: SocoInstance, cert: SocoCertificate, controls: GenControls):
    A = inst.A
    if controls.norm_b is not None:
        x_ref = cert.optimal[0] if cert.optimal is not None else cert.interior[0]
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
    if cert.optimal is not None:
        x, y, s = cert.optimal
    else:
        x, y, s = cert.interior
    inst.b = A @ x
    inst.c = A.T @ y + s


def gen_soco_interior(
    m: int, cone_dims, controls: GenControls | None = None
) -> tuple[SocoInstance, SocoCertificate]:
    """Instance with a predefined interior solution on every cone block."""
    controls = controls or GenControls()
    cone_dims = tuple(int(d) for d in cone_dims)
    n = sum(cone_dims)
    if m >= n:
        raise ValueError(f"require m < n, got m={m}, n={n}")
    stream = controls.stream()
    slices = block_slices(cone_dims)
    x0 = np.zeros(n)
    s0 = np.zeros(n)
    for sl, d in zip(slices, cone_dims):
        x0[sl] = _interior_block(d, stream)
        s0[sl] = _interior_block(d, stream)
    A = _coefficient_matrix(m, n, controls, stream)
    y0 = stream.uniform(size=m)
    inst = SocoInstance(cone_dims, A, A @ x0, A.T @ y0 + s0)
    cert = SocoCertificate(interior=(x0, y0, s0))
    _apply_norm_targets(inst, cert, controls)
    inst.validate()
    return inst, cert


def gen_soco_optimal(
    m: int, cone_dims, partition=None, controls: GenControls | None = None
) -> tuple[SocoInstance, SocoCertificate]:
    """Instance with a predefined optimal solution over a six-set labeling.

    The declared labeling is in general only a containment of the true
    partition (the point need not be maximally complementary).
    """
    controls = controls or GenControls()
    cone_dims = tuple(int(d) for d in cone_dims)
    n = sum(cone_dims)
    if m >= n:
        raise ValueError(f"require m < n, got m={m}, n={n}")
    stream = controls.stream()
    labels = random_partition(cone_dims, stream) if partition is None else check_partition(cone_dims, partition)
    x, s, r_scalars = draw_optimal_solution(cone_dims, labels, stream)
    A = _coefficient_matrix(m, n, controls, stream)
    y = stream.uniform(size=m)
    inst = SocoInstance(cone_dims, A, A @ x, A.T @ y + s)
    cert = SocoCertificate(optimal=(x, y, s), partition=labels, r_scalars=r_scalars)
    _apply_norm_targets(inst, cert, controls)
    inst.validate()
    return inst, cert


def _label_indices(labels, *wanted) -> list[int]:
    return [i for i, lab in enumerate(labels) if lab in wanted]


def maxcomp_row_pattern(cone_dims, labels, x_star, stream: RngStream, m: int) -> np.ndarray:
    """Coefficient matrix of the maximal-complementarity construction.

    Row 0 vanishes on B/R/T2 cones, has a positive head and zero tail on
    T1/T3 cones, and is free on N cones (so b_0 = 0 when dotted with x*).
    The next |T2| rows each carry the outward normal of one T2 cone at its
    boundary point.  Remaining rows are free.
    """
    slices = block_slices(cone_dims)
    n = sum(cone_dims)
    t2 = _label_indices(labels, "T2")
    A = np.zeros((m, n))
    for i, (sl, lab) in enumerate(zip(slices, labels)):
        if lab in ("T1", "T3"):
            A[0, sl.start] = float(stream.positive())
        elif lab == "N":
            A[0, sl] = stream.uniform(size=cone_dims[i])
    for k, p in enumerate(t2):
        sl = slices[p]
        tail = x_star[sl][1:]
        A[1 + k, sl.start] = -1.0
        A[1 + k, sl.start + 1 : sl.stop] = tail / np.linalg.norm(tail)
    A[1 + len(t2) :] = stream.uniform(size=(m - 1 - len(t2), n))
    return A


def _maxcomp_support_columns(cone_dims, labels) -> np.ndarray:
    slices = block_slices(cone_dims)
    cols = []
    for sl, lab in zip(slices, labels):
        if lab in ("B", "R", "T2"):
            cols.extend(range(sl.start, sl.stop))
    return np.asarray(cols, dtype=int)


def check_maxcomp_partition(m: int, cone_dims, labels) -> None:
    labels = check_partition(cone_dims, labels)
    n_t2 = len(_label_indices(labels, "T2"))
    support = len(_label_indices(labels, "B", "R", "T2"))
    if not n_t2 + 1 < m <= support:
        raise ValueError(
            f"partition sizes violate |T2|+1 < m <= |B|+|R|+|T2| "
            f"(|T2|={n_t2}, m={m}, |B|+|R|+|T2|={support})"
        )
    if not _label_indices(labels, "N", "T1", "T3"):
        raise ValueError(
            "at least one cone must carry label N, T1 or T3, otherwise the "
            "structural first row is identically zero"
        )


def gen_soco_maxcomp(
    m: int, cone_dims, partition, controls: GenControls | None = None
) -> tuple[SocoInstance, SocoCertificate]:
    """Instance whose optimal solution is declared maximally complementary
    with the given labeling as its optimal partition.

    Structural facts enforced and re-checked by the verifier: b_0 = 0, the
    T2 rows annihilate their own boundary points, the B/R/T2 column block
    of the non-structural rows has full rank, and diag(x*) A' has full rank
    over the non-structural columns.
    """
    controls = controls or GenControls()
    cone_dims = tuple(int(d) for d in cone_dims)
    n = sum(cone_dims)
    if m >= n:
        raise ValueError(f"require m < n, got m={m}, n={n}")
    labels = check_partition(cone_dims, partition)
    check_maxcomp_partition(m, cone_dims, labels)
    stream = controls.stream()
    x, s, r_scalars = draw_optimal_solution(cone_dims, labels, stream)
    support_cols = _maxcomp_support_columns(cone_dims, labels)
    A = None
    for _ in range(_RETRIES):
        cand = maxcomp_row_pattern(cone_dims, labels, x, stream, m)
        ok = (
            numerical_rank(cand, 1e-10) == m
            and numerical_rank(cand[1:][:, support_cols], 1e-8) == m - 1
            and numerical_rank((cand * x)[1:], 1e-8) == m - 1
        )
        if ok:
            A = cand
            break
    if A is None:
        raise GenerationError("maximal-complementarity rank conditions not reached")
    y = stream.uniform(size=m)
    inst = SocoInstance(cone_dims, A, A @ x, A.T @ y + s)
    cert = SocoCertificate(
        optimal=(x, y, s), partition=labels, r_scalars=r_scalars, maximally_complementary=True
    )
    _apply_norm_targets(inst, cert, controls)
    inst.validate()
    return inst, cert


def extend_soco_with_interior(
    Ahat,
    cone_dims,
    labels,
    xhat,
    yhat,
    shat,
    x0_inner,
    s0_inner,
    x0_extra: float,
    s0_extra: float,
    y0_full,
    r_scalars=None,
    maxcomp: bool = False,
) -> tuple[SocoInstance, SocoCertificate]:
    """Extend the last cone by one coordinate and append one constraint so
    (x0, y0, s0) becomes a certified interior point.

    The appended dual coordinate absorbs the correction scalar
    delta = (x0 - x*)'(s0 - s*) over the inner coordinates; cone
    membership of the extended blocks requires the last cone to be labeled
    N and is asserted here.
    """
    Ahat = np.asarray(Ahat, dtype=float)
    m, n = Ahat.shape
    cone_dims = tuple(int(d) for d in cone_dims)
    xhat, yhat, shat = (np.asarray(v, dtype=float) for v in (xhat, yhat, shat))
    x0i, s0i = (np.asarray(v, dtype=float) for v in (x0_inner, s0_inner))
    y0 = np.asarray(y0_full, dtype=float)
    if labels is not None and labels[-1] != "N":
        raise ValueError("the last cone must be labeled N to extend it")
    if x0_extra <= 0:
        raise ValueError("appended primal entry must be positive")
    if y0.shape != (m + 1,) or y0[m] == 0:
        raise ValueError("y0 must have m+1 entries with a nonzero last entry")

    delta = float((x0i - xhat) @ (s0i - shat))
    if not s0_extra > max(0.0, -delta / x0_extra):
        raise ValueError("appended dual entry violates the strict lower bound")
    shat_extra = delta / x0_extra + s0_extra

    alpha = Ahat @ (xhat - x0i) / x0_extra
    A_top = np.hstack([Ahat, alpha[:, None]])
    x_star = np.append(xhat, 0.0)
    s_star = np.append(shat, shat_extra)
    x0 = np.append(x0i, x0_extra)
    s0 = np.append(s0i, s0_extra)
    y_star = np.append(yhat, 0.0)
    beta = (A_top.T @ (yhat - y0[:m]) + s_star - s0) / y0[m]
    A = np.vstack([A_top, beta])

    ext_dims = (*cone_dims[:-1], cone_dims[-1] + 1)
    sl_last = block_slices(ext_dims)[-1]
    for v, name, strict in ((x_star, "x*", False), (s_star, "s*", False), (x0, "x0", True), (s0, "s0", True)):
        mrg = cone_margin(v[sl_last])
        if mrg < 0 or (strict and mrg <= 0):
            raise GenerationError(f"extended last block of {name} left the cone (margin {mrg})")

    inst = SocoInstance(ext_dims, A, A @ x_star, A.T @ y_star + s_star)
    cert = SocoCertificate(
        interior=(x0, y0, s0),
        optimal=(x_star, y_star, s_star),
        partition=tuple(labels) if labels is not None else None,
        r_scalars=dict(r_scalars or {}),
        maximally_complementary=maxcomp,
    )
    return inst, cert


def _both_interior_pieces(cone_dims, labels, xhat, shat, stream, margin_floor: float):
    """Interior draws and appended-coordinate choices for the extension.

    Copying the optimal dual block on the last (N) cone removes that cone
    from the correction scalar, which decouples the appended coordinate
    choices from the interior draw and lets the appended entries stay
    within the block's cone margin.
    """
    n = sum(cone_dims)
    slices = block_slices(cone_dims)
    x0i = np.zeros(n)
    s0i = np.zeros(n)
    for i, (sl, d) in enumerate(zip(slices, cone_dims)):
        x0i[sl] = _interior_block(d, stream)
        if i < len(cone_dims) - 1:
            s0i[sl] = _interior_block(d, stream)
    sl = slices[-1]
    s0i[sl] = shat[sl]

    delta = float((x0i - xhat) @ (s0i - shat))
    s_last = shat[sl]
    ms = float(np.sqrt(max(s_last[0] ** 2 - np.linalg.norm(s_last[1:]) ** 2, 0.0)))
    if ms <= 0:
        raise GenerationError("last cone's optimal dual block has no interior margin")
    x0_extra = max(1.0, 8.0 * abs(delta) / ms)
    margin = min(max(margin_floor, margin_floor * abs(delta / x0_extra)), ms / 4.0)
    s0_extra = max(0.0, -delta / x0_extra) + margin

    # Re-head the last primal block so the appended coordinate fits inside.
    tail = x0i[sl][1:]
    ext_tail_norm = float(np.hypot(np.linalg.norm(tail), x0_extra))
    h = max(float(stream.positive()), ext_tail_norm / 9.0)
    x0i[sl.start] = ext_tail_norm + h
    return x0i, s0i, x0_extra, s0_extra


def gen_soco_both(
    m: int, cone_dims, partition=None, controls: GenControls | None = None
) -> tuple[SocoInstance, SocoCertificate]:
    """Instance carrying both an optimal and an interior certified solution.

    The output has m+1 constraints and n+1 variables; the last cone gains
    one coordinate and must be labeled N (its dual block needs interior
    slack to absorb the appended entries).
    """
    controls = controls or GenControls()
    cone_dims = tuple(int(d) for d in cone_dims)
    n = sum(cone_dims)
    if m >= n:
        raise ValueError(f"require m < n, got m={m}, n={n}")
    stream = controls.stream()
    if partition is None:
        labels = list(random_partition(cone_dims, stream))
        labels[-1] = "N"
        labels = tuple(labels)
    else:
        labels = check_partition(cone_dims, partition)
        if labels[-1] != "N":
            raise ValueError("gen_soco_both requires the last cone to be labeled N")
    xhat, shat, r_scalars = draw_optimal_solution(cone_dims, labels, stream, last_cone_min_head=0.5)
    Ahat = _coefficient_matrix(m, n, controls, stream)
    yhat = stream.uniform(size=m)

    ext = controls.stream().child(1)
    x0i, s0i, x0_extra, s0_extra = _both_interior_pieces(
        cone_dims, labels, xhat, shat, ext, controls.margin
    )
    y0 = np.append(ext.uniform(size=m), ext.nonzero_scalar())
    inst, cert = extend_soco_with_interior(
        Ahat, cone_dims, labels, xhat, yhat, shat, x0i, s0i, x0_extra, s0_extra, y0, r_scalars
    )
    _apply_norm_targets(inst, cert, controls)
    inst.validate()
    return inst, cert


def gen_soco_maxcomp_both(
    m: int, cone_dims, partition, controls: GenControls | None = None
) -> tuple[SocoInstance, SocoCertificate]:
    """Interior point next to a declared maximally complementary solution.

    Runs the interior extension on top of the maximal-complementarity
    construction; the appended column lands in the last cone, which must be
    labeled N so the structural properties survive the extension.
    """
    controls = controls or GenControls()
    cone_dims = tuple(int(d) for d in cone_dims)
    n = sum(cone_dims)
    labels = check_partition(cone_dims, partition)
    if labels[-1] != "N":
        raise ValueError("the last cone must be labeled N")
    check_maxcomp_partition(m, cone_dims, labels)
    stream = controls.stream()
    xhat, shat, r_scalars = draw_optimal_solution(cone_dims, labels, stream, last_cone_min_head=0.5)
    support_cols = _maxcomp_support_columns(cone_dims, labels)
    yhat = stream.uniform(size=m)

    last_err = None
    for attempt in range(_RETRIES):
        Ahat = maxcomp_row_pattern(cone_dims, labels, xhat, stream, m)
        if not (
            numerical_rank(Ahat, 1e-10) == m
            and numerical_rank(Ahat[1:][:, support_cols], 1e-8) == m - 1
            and numerical_rank((Ahat * xhat)[1:], 1e-8) == m - 1
        ):
            last_err = GenerationError("maximal-complementarity rank conditions not reached")
            continue
        ext = controls.stream().child(1 + attempt)
        x0i, s0i, x0_extra, s0_extra = _both_interior_pieces(
            cone_dims, labels, xhat, shat, ext, controls.margin
        )
        y0 = np.append(ext.uniform(size=m), ext.nonzero_scalar())
        inst, cert = extend_soco_with_interior(
            Ahat,
            cone_dims,
            labels,
            xhat,
            yhat,
            shat,
            x0i,
            s0i,
            x0_extra,
            s0_extra,
            y0,
            r_scalars,
            maxcomp=True,
        )
        x_star = cert.optimal[0]
        ok = (
            numerical_rank(inst.A, 1e-10) == m + 1
            and numerical_rank(inst.A[1:][:, support_cols], 1e-8) == m
            and numerical_rank((inst.A * x_star)[1:], 1e-8) == m
        )
        if ok:
            _apply_norm_targets(inst, cert, controls)
            inst.validate()
            return inst, cert
        last_err = GenerationError("extended rank conditions not reached")
    raise last_err
