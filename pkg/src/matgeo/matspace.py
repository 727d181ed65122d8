"""Dense matrices over small Galois fields.

Provides rank and reduced echelon forms by exact Gaussian elimination,
the two relations the rest of the package is built on -- adjacency
(``rank(A - B) == 1``) and the "distant" relation (``A - B`` has full
rank, i.e. rank n for an m x n matrix) -- together with rank normal
form, pair normalization, enumeration of whole matrix spaces, and
rank-one factorization.

Matrices are immutable: entries are read-only uint8 arrays of element
indices.  The index of a matrix inside its space is the little-endian
base-q encoding of its entries in row-major order, entry (0, 0) least
significant.  The text form of a matrix is the single line
``"q m n e00 e01 ... e(m-1)(n-1)"``.

The enumeration helpers at the bottom (entry tensors, rank tables, the
pairwise distant table) precompute whole-space data once per space and
are what make the exhaustive searches run in seconds.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .gf import GF, FieldAutomorphism, field

__all__ = [
    "BudgetError",
    "Mat",
    "MatrixSpace",
    "RankNormalForm",
    "PairReduction",
    "rank",
    "array_rank",
    "is_distant",
    "is_adjacent",
    "rank_normal_form",
    "normalize_pair",
    "invert",
    "enumerate_matrices",
    "count_by_rank",
    "rank_one_factor",
    "gaussian_binomial",
    "entry_tensor",
    "batch_index",
    "matmul_array",
    "rank_table",
    "full_rank_table",
    "rank_distance_table",
    "distant_table",
    "distant_column",
    "DEFAULT_BUDGET",
]

DEFAULT_BUDGET = 10**6

# The pairwise distant table is quadratic in the space size; refuse to
# materialize it past this point regardless of the enumeration budget.
_PAIR_TABLE_LIMIT = 10_000


class BudgetError(ValueError):
    """An enumeration would exceed the configured budget."""


def _check_budget(count: int, budget: int, what: str) -> None:
    if count > budget:
        raise BudgetError(f"{count} {what} exceed the budget of {budget}")


class Mat:
    """An immutable m x n matrix of field-element indices."""

    __slots__ = ("field", "_a")

    def __init__(self, f: GF, entries):
        a = np.array(entries, dtype=np.uint8)
        if a.ndim != 2:
            raise ValueError("matrix entries must form a two-dimensional array")
        if a.size and int(a.max()) >= f.q:
            raise ValueError(f"entry index out of range for GF({f.q})")
        a.setflags(write=False)
        self.field = f
        self._a = a

    @classmethod
    def _wrap(cls, f: GF, a: np.ndarray) -> "Mat":
        # Fast path for internally produced arrays: skips range validation.
        m = object.__new__(cls)
        a.setflags(write=False)
        m.field = f
        m._a = a
        return m

    @classmethod
    def zeros(cls, f: GF, m: int, n: int) -> "Mat":
        return cls._wrap(f, np.zeros((m, n), dtype=np.uint8))

    @classmethod
    def identity(cls, f: GF, k: int) -> "Mat":
        return cls._wrap(f, np.eye(k, dtype=np.uint8))

    @classmethod
    def unit(cls, f: GF, m: int, n: int, i: int, j: int) -> "Mat":
        a = np.zeros((m, n), dtype=np.uint8)
        a[i, j] = 1
        return cls._wrap(f, a)

    @classmethod
    def from_text(cls, line: str) -> "Mat":
        parts = line.split()
        if len(parts) < 3:
            raise ValueError(f"malformed matrix line: {line!r}")
        q, m, n = (int(t) for t in parts[:3])
        entries = [int(t) for t in parts[3:]]
        if len(entries) != m * n:
            raise ValueError(f"expected {m * n} entries, got {len(entries)}")
        return cls(field(q), np.array(entries, dtype=np.uint8).reshape(m, n))

    @property
    def array(self) -> np.ndarray:
        """Read-only entry array."""
        return self._a

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @property
    def nrows(self) -> int:
        return self._a.shape[0]

    @property
    def ncols(self) -> int:
        return self._a.shape[1]

    @property
    def space(self) -> "MatrixSpace":
        return MatrixSpace(self.field, self.nrows, self.ncols)

    def _require_same_space(self, other: "Mat") -> None:
        if not isinstance(other, Mat):
            raise TypeError(f"expected a Mat, got {type(other).__name__}")
        if self.field is not other.field or self.shape != other.shape:
            raise ValueError("matrices belong to different spaces")

    def __add__(self, other: "Mat") -> "Mat":
        self._require_same_space(other)
        return Mat._wrap(self.field, self.field.add_table[self._a, other._a])

    def __sub__(self, other: "Mat") -> "Mat":
        self._require_same_space(other)
        return Mat._wrap(self.field, self.field.sub_table[self._a, other._a])

    def __neg__(self) -> "Mat":
        return Mat._wrap(self.field, self.field.neg_table[self._a])

    def __matmul__(self, other: "Mat") -> "Mat":
        if not isinstance(other, Mat):
            return NotImplemented
        if self.field is not other.field:
            raise ValueError("matrices belong to different fields")
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        return Mat._wrap(self.field, matmul_array(self.field, self._a, other._a))

    def scale(self, c: int) -> "Mat":
        """Entrywise multiplication by the field element of index c."""
        if not 0 <= c < self.field.q:
            raise ValueError(f"scalar index {c} out of range for GF({self.field.q})")
        return Mat._wrap(self.field, self.field.mul_table[c, self._a])

    def twist(self, sigma: FieldAutomorphism) -> "Mat":
        """Apply a field automorphism entrywise."""
        if sigma.field is not self.field:
            raise ValueError("automorphism belongs to a different field")
        return Mat._wrap(self.field, sigma.table[self._a])

    def transpose(self) -> "Mat":
        return Mat._wrap(self.field, np.ascontiguousarray(self._a.T))

    def is_zero(self) -> bool:
        return not self._a.any()

    def index(self) -> int:
        """Position of this matrix in the enumeration of its space."""
        flat = self._a.reshape(-1).astype(np.int64)
        return int(flat @ _index_weights(self.field.q, flat.size))

    def to_text(self) -> str:
        m, n = self.shape
        body = " ".join(str(int(e)) for e in self._a.reshape(-1))
        return f"{self.field.q} {m} {n} {body}".rstrip()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Mat)
            and self.field is other.field
            and self.shape == other.shape
            and bool(np.array_equal(self._a, other._a))
        )

    def __hash__(self) -> int:
        return hash((id(self.field), self.shape, self._a.tobytes()))

    def __repr__(self) -> str:
        return f"Mat(GF({self.field.q}), {self._a.tolist()})"


@dataclass(frozen=True)
class MatrixSpace:
    """The space of all m x n matrices over a fixed field."""

    field: GF
    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n < 0:
            raise ValueError(f"invalid matrix shape {self.m} x {self.n}")

    @property
    def size(self) -> int:
        return self.field.q ** (self.m * self.n)

    def zero(self) -> Mat:
        return Mat.zeros(self.field, self.m, self.n)

    def unit(self, i: int, j: int) -> Mat:
        return Mat.unit(self.field, self.m, self.n, i, j)

    def matrix(self, index: int) -> Mat:
        """The matrix at a given enumeration index."""
        if not 0 <= index < self.size:
            raise ValueError(f"index {index} out of range for {self}")
        q = self.field.q
        count = self.m * self.n
        digits = [(index // q**t) % q for t in range(count)]
        a = np.array(digits, dtype=np.uint8).reshape(self.m, self.n)
        return Mat._wrap(self.field, a)

    def __str__(self) -> str:
        return f"M({self.m}x{self.n}, GF({self.field.q}))"


@lru_cache(maxsize=None)
def _index_weights(q: int, count: int) -> np.ndarray:
    w = q ** np.arange(count, dtype=np.int64)
    w.setflags(write=False)
    return w


def batch_index(space: MatrixSpace, arr: np.ndarray) -> np.ndarray:
    """Enumeration indices of a stack of entry arrays with shape (..., m, n)."""
    count = space.m * space.n
    flat = arr.reshape(arr.shape[: arr.ndim - 2] + (count,)).astype(np.int64)
    return flat @ _index_weights(space.field.q, count)


def matmul_array(f: GF, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Field matrix product of entry arrays, batched over leading axes."""
    if f.k == 1:
        prod = x.astype(np.int64) @ y.astype(np.int64)
        return (prod % f.p).astype(np.uint8)
    terms = f.mul_table[x[..., :, :, None], y[..., None, :, :]]
    acc = terms[..., 0, :]
    for t in range(1, x.shape[-1]):
        acc = f.add_table[acc, terms[..., t, :]]
    return acc


def _rank_cols_le2(f: GF, rows: list, m: int, n: int) -> int:
    # Scalar fast path for matrices with at most two columns.
    if n == 0:
        return 0
    if n == 1:
        return 1 if any(r[0] for r in rows) else 0
    mul, sub = f.mul_py, f.sub_py
    first = -1
    for i in range(m):
        a, b = rows[i]
        if a or b:
            first = i
            break
    if first < 0:
        return 0
    a, b = rows[first]
    for i in range(first + 1, m):
        c, d = rows[i]
        if sub[mul[a][d]][mul[b][c]]:
            return 2
    return 1


def _rank_gauss(f: GF, arr: np.ndarray) -> int:
    a = arr.copy()
    m, n = a.shape
    mul, sub, inv = f.mul_table, f.sub_table, f.inv_table
    r = 0
    for c in range(n):
        pivot = -1
        for i in range(r, m):
            if a[i, c]:
                pivot = i
                break
        if pivot < 0:
            continue
        if pivot != r:
            a[[r, pivot]] = a[[pivot, r]]
        v = a[r, c]
        if v != 1:
            a[r] = mul[inv[v], a[r]]
        for i in range(r + 1, m):
            w = a[i, c]
            if w:
                a[i] = sub[a[i], mul[w, a[r]]]
        r += 1
        if r == m:
            break
    return r


def array_rank(f: GF, arr: np.ndarray) -> int:
    """Rank of an entry array over the field."""
    m, n = arr.shape
    if min(m, n) <= 2:
        if m < n:
            arr, m, n = arr.T, n, m
        return _rank_cols_le2(f, arr.tolist(), m, n)
    return _rank_gauss(f, arr)


def rank(A: Mat) -> int:
    """Rank by exact Gaussian elimination."""
    return array_rank(A.field, A._a)


def is_distant(A: Mat, B: Mat) -> bool:
    """Whether A - B has full rank (rank n for an m x n matrix)."""
    A._require_same_space(B)
    return array_rank(A.field, A.field.sub_table[A._a, B._a]) == A.ncols


def is_adjacent(A: Mat, B: Mat) -> bool:
    """Whether A - B has rank one."""
    A._require_same_space(B)
    return array_rank(A.field, A.field.sub_table[A._a, B._a]) == 1


def rref_array(f: GF, arr: np.ndarray, pivot_limit: int | None = None):
    """Reduced row echelon form; returns (rref, pivot_columns).

    Pivots are searched in the first ``pivot_limit`` columns only, while
    row operations apply to the full width (supports augmented arrays).
    """
    a = arr.copy()
    m, n = a.shape
    limit = n if pivot_limit is None else pivot_limit
    mul, sub, inv = f.mul_table, f.sub_table, f.inv_table
    pivots: list[int] = []
    r = 0
    for c in range(limit):
        pivot = -1
        for i in range(r, m):
            if a[i, c]:
                pivot = i
                break
        if pivot < 0:
            continue
        if pivot != r:
            a[[r, pivot]] = a[[pivot, r]]
        v = a[r, c]
        if v != 1:
            a[r] = mul[inv[v], a[r]]
        for i in range(m):
            if i != r and a[i, c]:
                a[i] = sub[a[i], mul[a[i, c], a[r]]]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return a, pivots


def _invert_2x2(f: GF, a: np.ndarray) -> np.ndarray:
    mul, sub, neg, inv = f.mul_py, f.sub_py, f.neg_py, f.inv_py
    p, q_, r, s = int(a[0, 0]), int(a[0, 1]), int(a[1, 0]), int(a[1, 1])
    det = sub[mul[p][s]][mul[q_][r]]
    if det == 0:
        raise ValueError("matrix is singular")
    d = inv[det]
    out = np.array(
        [
            [mul[d][s], mul[d][neg[q_]]],
            [mul[d][neg[r]], mul[d][p]],
        ],
        dtype=np.uint8,
    )
    return out


def invert(A: Mat) -> Mat:
    """Inverse of a square matrix; raises ValueError when singular."""
    m, n = A.shape
    if m != n:
        raise ValueError("only square matrices can be inverted")
    f = A.field
    if n == 1:
        v = int(A._a[0, 0])
        if v == 0:
            raise ValueError("matrix is singular")
        return Mat._wrap(f, np.array([[f.inv_py[v]]], dtype=np.uint8))
    if n == 2:
        return Mat._wrap(f, _invert_2x2(f, A._a))
    aug = np.concatenate([A._a, np.eye(n, dtype=np.uint8)], axis=1)
    reduced, pivots = rref_array(f, aug, pivot_limit=n)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return Mat._wrap(f, reduced[:, n:].copy())


class RankNormalForm(NamedTuple):
    """Invertible P, Q with P @ A @ Q = diag(I_r, 0)."""

    P: Mat
    Q: Mat
    r: int


def rank_normal_form(A: Mat) -> RankNormalForm:
    """Change of bases taking A to the block matrix diag(I_r, 0)."""
    f = A.field
    m, n = A.shape
    mul, sub = f.mul_table, f.sub_table

    aug = np.concatenate([A._a, np.eye(m, dtype=np.uint8)], axis=1)
    reduced, pivots = rref_array(f, aug, pivot_limit=n)
    e = reduced[:, :n].copy()
    p = reduced[:, n:].copy()

    # Column phase: clear non-pivot columns (their entries live only in
    # pivot rows after the RREF), then permute pivot columns to the front.
    q_arr = np.eye(n, dtype=np.uint8)
    pivot_set = set(pivots)
    for t, c in enumerate(pivots):
        for j in range(n):
            if j not in pivot_set and e[t, j]:
                v = e[t, j]
                e[:, j] = sub[e[:, j], mul[v, e[:, c]]]
                q_arr[:, j] = sub[q_arr[:, j], mul[v, q_arr[:, c]]]
    order = pivots + [j for j in range(n) if j not in pivot_set]
    e = e[:, order]
    q_arr = q_arr[:, order]

    return RankNormalForm(Mat._wrap(f, p), Mat._wrap(f, q_arr), len(pivots))


class PairReduction(NamedTuple):
    """The transform X -> P @ X @ Q - C sending a pair (A, B) to (0, diag(I_r, 0))."""

    P: Mat
    Q: Mat
    C: Mat

    def apply(self, X: Mat) -> Mat:
        return self.P @ X @ self.Q - self.C


def normalize_pair(A: Mat, B: Mat) -> PairReduction:
    """Joint change of coordinates with P @ A @ Q - C = 0 and
    P @ B @ Q - C = diag(I_r, 0), where r = rank(B - A)."""
    A._require_same_space(B)
    nf = rank_normal_form(B - A)
    c = nf.P @ A @ nf.Q
    return PairReduction(nf.P, nf.Q, c)


@lru_cache(maxsize=None)
def _entry_tensor(space: MatrixSpace) -> np.ndarray:
    n_mats = space.size
    q = space.field.q
    count = space.m * space.n
    idx = np.arange(n_mats, dtype=np.int64)
    digits = (idx[:, None] // _index_weights(q, count)[None, :]) % q
    tensor = digits.astype(np.uint8).reshape(n_mats, space.m, space.n)
    tensor.setflags(write=False)
    return tensor


def entry_tensor(space: MatrixSpace, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Entries of every matrix in the space, shape (size, m, n), index order."""
    _check_budget(space.size, budget, "matrices")
    return _entry_tensor(space)


def enumerate_matrices(space: MatrixSpace, budget: int = DEFAULT_BUDGET) -> list[Mat]:
    """All q^(m*n) matrices of the space in index order."""
    tensor = entry_tensor(space, budget)
    return [Mat._wrap(space.field, tensor[i]) for i in range(space.size)]


@lru_cache(maxsize=None)
def _rank_table(space: MatrixSpace) -> np.ndarray:
    tensor = _entry_tensor(space)
    f = space.field
    out = np.empty(space.size, dtype=np.uint8)
    for i in range(space.size):
        out[i] = array_rank(f, tensor[i])
    out.setflags(write=False)
    return out


def rank_table(space: MatrixSpace, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Rank of every matrix in the space, aligned with enumeration order."""
    _check_budget(space.size, budget, "matrices")
    return _rank_table(space)


def full_rank_table(space: MatrixSpace, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Boolean vector marking the full-rank matrices of the space."""
    return rank_table(space, budget) == space.n


@lru_cache(maxsize=None)
def _rank_distance_table(space: MatrixSpace) -> np.ndarray:
    n_mats = space.size
    flat = _entry_tensor(space).reshape(n_mats, -1)
    ranks = _rank_table(space)
    w = _index_weights(space.field.q, space.m * space.n)
    out = np.empty((n_mats, n_mats), dtype=np.uint8)
    block = max(1, 2**22 // max(n_mats, 1))
    for start in range(0, n_mats, block):
        stop = min(start + block, n_mats)
        diff = space.field.sub_table[flat[start:stop, None, :], flat[None, :, :]]
        idx = diff.astype(np.int64) @ w
        out[start:stop] = ranks[idx]
    out.setflags(write=False)
    return out


def rank_distance_table(space: MatrixSpace, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Table D with D[i, j] = rank of the difference of matrices i and j.

    Quadratic in the space size; capped independently of the enumeration
    budget.
    """
    _check_budget(space.size, min(budget, _PAIR_TABLE_LIMIT), "matrices (pairwise table)")
    return _rank_distance_table(space)


@lru_cache(maxsize=None)
def _distant_table(space: MatrixSpace) -> np.ndarray:
    out = _rank_distance_table(space) == space.n
    out.setflags(write=False)
    return out


def distant_table(space: MatrixSpace, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Boolean table D with D[i, j] true iff matrices i and j are distant.

    Quadratic in the space size; capped independently of the enumeration
    budget.
    """
    _check_budget(space.size, min(budget, _PAIR_TABLE_LIMIT), "matrices (pairwise table)")
    return _distant_table(space)


def distant_column(space: MatrixSpace, index: int, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Boolean vector of is_distant(X, M) over all X, for M at the given index."""
    if space.size <= _PAIR_TABLE_LIMIT:
        return distant_table(space, budget)[:, index]
    flat = entry_tensor(space, budget).reshape(space.size, -1)
    diff = space.field.sub_table[flat, flat[index][None, :]]
    idx = diff.astype(np.int64) @ _index_weights(space.field.q, space.m * space.n)
    return full_rank_table(space, budget)[idx]


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of an n-dimensional space over GF(q)."""
    if k < 0 or k > n:
        return 0
    num = 1
    den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def count_by_rank(space: MatrixSpace, r: int) -> int:
    """Number of matrices of the space with rank exactly r (closed form)."""
    if not 0 <= r <= min(space.m, space.n):
        raise ValueError(f"rank {r} out of range for {space}")
    q = space.field.q
    count = gaussian_binomial(space.n, r, q)
    for i in range(r):
        count *= q**space.m - q**i
    return count


def rank_one_factor(A: Mat) -> tuple[Mat, Mat]:
    """Factor a rank-one matrix as an outer product A = x @ y^T.

    x and y are column vectors; the first nonzero coordinate of x equals 1,
    which makes the factorization canonical.
    """
    if rank(A) != 1:
        raise ValueError("matrix must have rank one")
    f = A.field
    a = A._a
    i0, j0 = map(int, np.argwhere(a)[0])
    x = f.mul_table[f.inv_py[int(a[i0, j0])], a[:, j0]]
    y = a[i0, :].copy()
    return (
        Mat._wrap(f, x.reshape(-1, 1)),
        Mat._wrap(f, y.reshape(-1, 1)),
    )
