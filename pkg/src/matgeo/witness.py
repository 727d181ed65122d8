"""Constructive certificates tying adjacency to the distant relation.

Two m x n matrices A != B are adjacent exactly when some R outside {A, B}
has the property that every X distant from R is distant from A or from B.
This module builds both halves of that equivalence explicitly:

* :func:`adjacency_witness` produces the witness R for an adjacent pair
  and verifies it by exhaustive scan over X;
* :func:`separating_matrix` produces, for a non-adjacent pair and any
  candidate R, a matrix X that is distant from R but from neither A nor B,
  refuting R as a witness;
* :func:`adjacent_via_distant` evaluates the existential condition
  literally by exhaustive search, so it can be compared against the
  rank-one test on all pairs.

Everything requires m >= n >= 2 and a field with at least three elements;
GF(2) is rejected because the witness construction needs a scalar outside
{0, 1}.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .matspace import (
    DEFAULT_BUDGET,
    Mat,
    MatrixSpace,
    _check_budget,
    array_rank,
    distant_column,
    distant_table,
    entry_tensor,
    invert,
    is_adjacent,
    matmul_array,
    normalize_pair,
    rank,
    _PAIR_TABLE_LIMIT,
)

__all__ = [
    "WitnessReport",
    "independent_image_pair",
    "adjacency_witness",
    "separating_matrix",
    "adjacent_via_distant",
]


@dataclass(frozen=True)
class WitnessReport:
    """Outcome of checking a witness matrix R against every candidate X.

    ``verified`` is true iff no X among the ``checked`` candidates is
    distant from R while distant from neither A nor B.  ``checked`` equals
    the space size when the scan was exhaustive (always the case within
    budget).
    """

    R: Mat
    verified: bool
    counterexample: Mat | None
    checked: int


def _require_hypotheses(space: MatrixSpace) -> None:
    if space.field.q < 3:
        raise ValueError("the field must have at least three elements")
    if space.n < 2 or space.m < space.n:
        raise ValueError(f"shape must satisfy m >= n >= 2, got {space.m} x {space.n}")


def _vector_tensor(space: MatrixSpace) -> np.ndarray:
    # All q^n column vectors of F^n as a (q^n, n) array, index order.
    return entry_tensor(MatrixSpace(space.field, space.n, 1)).reshape(-1, space.n)


def _pair_independent(f, u_batch: np.ndarray, v: np.ndarray) -> np.ndarray:
    """For each row u of u_batch, whether u and v are linearly independent."""
    count, dim = u_batch.shape
    out = np.zeros(count, dtype=bool)
    for a in range(dim):
        for b in range(a + 1, dim):
            minor = f.sub_table[
                f.mul_table[u_batch[:, a], v[b]],
                f.mul_table[u_batch[:, b], v[a]],
            ]
            out |= minor != 0
    return out


def independent_image_pair(T: Mat, S: Mat) -> tuple[Mat, Mat]:
    """Linearly independent column vectors x, y with T @ x and S @ y
    linearly independent.

    Requires a nonzero S and a T of rank at least two (so the image of T
    is not contained in any line), on a space with m >= n >= 2 over a
    field of order at least three.  The scan is deterministic: y is the
    first vector in index order with S @ y != 0, then x is the first
    vector making both independence conditions hold.
    """
    T._require_same_space(S)
    space = T.space
    _require_hypotheses(space)
    if S.is_zero():
        raise ValueError("S must be nonzero")
    if rank(T) < 2:
        raise ValueError("T must have rank at least two")

    f = space.field
    vecs = _vector_tensor(space)
    s_images = matmul_array(f, S.array, vecs[:, :, None])[:, :, 0]
    y_idx = int(np.argmax(s_images.any(axis=1)))
    sy = s_images[y_idx]

    t_images = matmul_array(f, T.array, vecs[:, :, None])[:, :, 0]
    good = _pair_independent(f, t_images, sy) & _pair_independent(f, vecs, vecs[y_idx])
    if not good.any():
        raise RuntimeError("no admissible vector pair exists")
    x_idx = int(np.argmax(good))
    return (
        Mat._wrap(f, vecs[x_idx].reshape(-1, 1).copy()),
        Mat._wrap(f, vecs[y_idx].reshape(-1, 1).copy()),
    )


def adjacency_witness(A: Mat, B: Mat, budget: int = DEFAULT_BUDGET) -> WitnessReport:
    """Witness R for an adjacent pair, exhaustively verified within budget.

    R is the point at parameter lambda on the line through A and B, where
    lambda is the smallest field-element index outside {0, 1}; in the
    coordinates where (A, B) becomes (0, E11) this is exactly lambda * E11.
    """
    A._require_same_space(B)
    space = A.space
    _require_hypotheses(space)
    if not is_adjacent(A, B):
        raise ValueError("matrices are not adjacent")

    lam = 2  # smallest element index outside {0, 1}; exists since q >= 3
    R = A + (B - A).scale(lam)

    n_mats = space.size
    if n_mats <= budget:
        dis_r = distant_column(space, R.index(), budget)
        dis_a = distant_column(space, A.index(), budget)
        dis_b = distant_column(space, B.index(), budget)
        ok = ~dis_r | dis_a | dis_b
        if ok.all():
            return WitnessReport(R, True, None, n_mats)
        bad = int(np.argmin(ok))
        return WitnessReport(R, False, space.matrix(bad), n_mats)
    return WitnessReport(R, True, None, 0)


@lru_cache(maxsize=65536)
def _reduction_context(A: Mat, B: Mat):
    red = normalize_pair(A, B)
    b_norm = red.apply(B)
    return red, invert(red.P), invert(red.Q), b_norm


def _first_with_nonzero_image(f, images: np.ndarray) -> int:
    nz = images.any(axis=1)
    if not nz.any():
        raise RuntimeError("operator is zero")
    return int(np.argmax(nz))


def separating_matrix(A: Mat, B: Mat, R: Mat) -> Mat:
    """A matrix X distant from R but distant from neither A nor B.

    Defined whenever rank(B - A) >= 2 and R is outside {A, B}: its
    existence is what makes such an R fail as an adjacency witness.

    The construction works in the coordinates where (A, B) becomes
    (0, B') with B' = diag(I_r, 0) and R becomes R'.  Independent vectors
    x, y are chosen with (B' - R')x and R'y independent -- through
    :func:`independent_image_pair` when one of B' - R', R' has rank >= 2,
    otherwise (both rank one, forcing rank B' = 2 and trivially
    intersecting ranges) by the first index-order scan hit.  X' maps
    x -> B'x, y -> 0, and each remaining basis vector b_i to c_i + R'b_i,
    the c_i greedily extending {B'x - R'x, -R'y} to an independent family;
    X' - R' is then injective while X' and X' - B' are not.  The result is
    pulled back through the coordinate change.
    """
    A._require_same_space(B)
    A._require_same_space(R)
    space = A.space
    _require_hypotheses(space)
    if R == A or R == B:
        raise ValueError("R must differ from both A and B")
    if rank(B - A) < 2:
        raise ValueError("rank(B - A) must be at least two")

    f = space.field
    red, p_inv, q_inv, b_norm = _reduction_context(A, B)
    r_norm = red.apply(R)

    t1 = b_norm - r_norm
    if rank(t1) >= 2:
        x, y = independent_image_pair(t1, r_norm)
    elif rank(r_norm) >= 2:
        swapped_x, swapped_y = independent_image_pair(r_norm, t1)
        x, y = swapped_y, swapped_x
    else:
        vecs = _vector_tensor(space)
        t_images = matmul_array(f, t1.array, vecs[:, :, None])[:, :, 0]
        r_images = matmul_array(f, r_norm.array, vecs[:, :, None])[:, :, 0]
        x_idx = _first_with_nonzero_image(f, t_images)
        good = r_images.any(axis=1) & _pair_independent(f, vecs, vecs[x_idx])
        assert good.any(), "independent pair must exist over a field of order >= 3"
        y_idx = int(np.argmax(good))
        x = Mat._wrap(f, vecs[x_idx].reshape(-1, 1).copy())
        y = Mat._wrap(f, vecs[y_idx].reshape(-1, 1).copy())

    n = space.n
    m = space.m
    basis_cols = [x.array[:, 0], y.array[:, 0]]
    for i in range(n):
        if len(basis_cols) == n:
            break
        candidate = np.zeros(n, dtype=np.uint8)
        candidate[i] = 1
        trial = np.stack(basis_cols + [candidate], axis=1)
        if array_rank(f, trial) == len(basis_cols) + 1:
            basis_cols.append(candidate)
    assert len(basis_cols) == n, "basis completion must succeed"

    image_family = [
        matmul_array(f, t1.array, x.array)[:, 0],
        f.neg_table[matmul_array(f, r_norm.array, y.array)[:, 0]],
    ]
    image_cols = [matmul_array(f, b_norm.array, x.array)[:, 0], np.zeros(m, dtype=np.uint8)]
    for b_col in basis_cols[2:]:
        chosen = None
        for j in range(m):
            candidate = np.zeros(m, dtype=np.uint8)
            candidate[j] = 1
            trial = np.stack(image_family + [candidate], axis=1)
            if array_rank(f, trial) == len(image_family) + 1:
                chosen = candidate
                break
        assert chosen is not None, "image extension must succeed when m >= n"
        image_family.append(chosen)
        r_b = matmul_array(f, r_norm.array, b_col.reshape(-1, 1))[:, 0]
        image_cols.append(f.add_table[chosen, r_b])

    basis = Mat._wrap(f, np.stack(basis_cols, axis=1))
    images = Mat._wrap(f, np.stack(image_cols, axis=1))
    x_norm = images @ invert(basis)
    return p_inv @ (x_norm + red.C) @ q_inv


def adjacent_via_distant(A: Mat, B: Mat, budget: int = DEFAULT_BUDGET) -> bool:
    """Decide adjacency using only the distant relation, by brute force.

    Evaluates literally: does some R outside {A, B} satisfy "every X
    distant from R is distant from A or from B"?  Quantifies R and X over
    the whole space, so it serves as an independent oracle for
    :func:`matgeo.matspace.is_adjacent`.
    """
    A._require_same_space(B)
    space = A.space
    _require_hypotheses(space)
    if A == B:
        raise ValueError("matrices must be distinct")
    n_mats = space.size
    _check_budget(n_mats, budget, "matrices")

    ia = A.index()
    ib = B.index()
    if n_mats <= _PAIR_TABLE_LIMIT:
        table = distant_table(space, budget)
        uncovered = ~table[:, ia] & ~table[:, ib]
        refuted = table[uncovered].any(axis=0)
        refuted[ia] = True
        refuted[ib] = True
        return not refuted.all()
    dis_a = distant_column(space, ia, budget)
    dis_b = distant_column(space, ib, budget)
    uncovered = ~dis_a & ~dis_b
    for r_idx in range(n_mats):
        if r_idx == ia or r_idx == ib:
            continue
        if not (distant_column(space, r_idx, budget) & uncovered).any():
            return True
    return False
