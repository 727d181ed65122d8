"""The Grassmannian of m-dimensional subspaces of F^(m+n) over GF(q).

A point is stored as the unique reduced row echelon basis of its
subspace, written in the block form [X Y] with X the left m x n block
and Y the right m x m block (the file format records this convention).
Points whose Y block is singular are "at infinity"; the remaining finite
points correspond bijectively to m x n matrices via X, Y -> Y^-1 @ X,
and under that dictionary subspace adjacency (dim(U + V) = m + 1)
matches matrix adjacency, while complementarity of subspaces (square
case, U + V = F^(2n)) matches the distant relation.
"""

from __future__ import annotations

from itertools import combinations, product

import numpy as np

from .matspace import (
    DEFAULT_BUDGET,
    Mat,
    MatrixSpace,
    _check_budget,
    array_rank,
    gaussian_binomial,
    invert,
    rref_array,
)

__all__ = [
    "GrassmannPoint",
    "subspace_count",
    "enumerate_points",
    "is_adjacent",
    "is_at_infinity",
    "to_matrix",
    "from_matrix",
    "is_complementary",
]


class GrassmannPoint:
    """An m-dimensional subspace of F^(m+n), canonicalized to RREF.

    ``space`` names the associated matrix space M(m x n, GF(q)); the
    ambient vector space has dimension m + n.  Two points are equal
    exactly when their canonical bases are equal.
    """

    __slots__ = ("space", "_b")

    def __init__(self, space: MatrixSpace, rows):
        arr = np.array(rows, dtype=np.uint8)
        ambient = space.m + space.n
        if arr.shape != (space.m, ambient):
            raise ValueError(f"basis must be {space.m} x {ambient}")
        if arr.size and int(arr.max()) >= space.field.q:
            raise ValueError(f"entry index out of range for GF({space.field.q})")
        reduced, pivots = rref_array(space.field, arr)
        if len(pivots) != space.m:
            raise ValueError("rows do not span an m-dimensional subspace")
        reduced.setflags(write=False)
        self.space = space
        self._b = reduced

    @property
    def basis(self) -> np.ndarray:
        """Canonical RREF basis, shape (m, m + n), read-only."""
        return self._b

    def to_text(self) -> str:
        m, ambient = self._b.shape
        body = " ".join(str(int(e)) for e in self._b.reshape(-1))
        return f"{self.space.field.q} {self.space.m} {self.space.n} | {body}"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GrassmannPoint)
            and self.space == other.space
            and bool(np.array_equal(self._b, other._b))
        )

    def __hash__(self) -> int:
        return hash((self.space, self._b.tobytes()))

    def __repr__(self) -> str:
        return f"GrassmannPoint({self.space}, {self._b.tolist()})"


def subspace_count(space: MatrixSpace) -> int:
    """Number of m-dimensional subspaces of F^(m+n)."""
    return gaussian_binomial(space.m + space.n, space.m, space.field.q)


def enumerate_points(space: MatrixSpace, budget: int = DEFAULT_BUDGET) -> list[GrassmannPoint]:
    """Every point exactly once, generated directly in canonical RREF form.

    Pivot-column patterns run in lexicographic order; for each pattern the
    free entries (right of the pivot, outside pivot columns) run through
    all field assignments.
    """
    _check_budget(subspace_count(space), budget, "subspaces")
    q = space.field.q
    m = space.m
    ambient = space.m + space.n
    points: list[GrassmannPoint] = []
    for pivots in combinations(range(ambient), m):
        pivot_set = set(pivots)
        free = [
            (i, j)
            for i in range(m)
            for j in range(pivots[i] + 1, ambient)
            if j not in pivot_set
        ]
        base = np.zeros((m, ambient), dtype=np.uint8)
        for i, c in enumerate(pivots):
            base[i, c] = 1
        for values in product(range(q), repeat=len(free)):
            arr = base.copy()
            for (i, j), v in zip(free, values):
                arr[i, j] = v
            points.append(GrassmannPoint(space, arr))
    return points


def _require_same_space(U: GrassmannPoint, V: GrassmannPoint) -> None:
    if U.space != V.space:
        raise ValueError("points belong to different Grassmannians")


def _joint_dimension(U: GrassmannPoint, V: GrassmannPoint) -> int:
    stacked = np.concatenate([U._b, V._b], axis=0)
    return array_rank(U.space.field, stacked)


def is_adjacent(U: GrassmannPoint, V: GrassmannPoint) -> bool:
    """Whether dim(U + V) = m + 1."""
    _require_same_space(U, V)
    return _joint_dimension(U, V) == U.space.m + 1


def is_at_infinity(U: GrassmannPoint) -> bool:
    """Whether the right m x m block Y of the basis is singular.

    Basis changes multiply [X Y] by an invertible matrix on the left, so
    singularity of Y does not depend on the basis choice.
    """
    space = U.space
    y = U._b[:, space.n :]
    return array_rank(space.field, y) < space.m


def to_matrix(U: GrassmannPoint) -> Mat:
    """The matrix Y^-1 @ X associated to a finite point."""
    if is_at_infinity(U):
        raise ValueError("point at infinity has no matrix representative")
    space = U.space
    x = Mat._wrap(space.field, U._b[:, : space.n].copy())
    y = Mat._wrap(space.field, U._b[:, space.n :].copy())
    return invert(y) @ x


def from_matrix(A: Mat) -> GrassmannPoint:
    """The (always finite) point with basis [A I]."""
    m = A.nrows
    rows = np.concatenate([A.array, np.eye(m, dtype=np.uint8)], axis=1)
    return GrassmannPoint(A.space, rows)


def is_complementary(U: GrassmannPoint, V: GrassmannPoint) -> bool:
    """Whether U and V intersect trivially, i.e. U + V = F^(2n) (square case)."""
    _require_same_space(U, V)
    space = U.space
    if space.m != space.n:
        raise ValueError("complementarity requires m = n")
    return _joint_dimension(U, V) == space.m + space.n
