"""Standard preservers and the inverse problem for tabulated bijections.

A *standard preserver* is a map ``A -> T @ twist(A, sigma) @ S + R`` on an
m x n matrix space (with the extra transposed variant
``A -> T @ twist(A, sigma)^T @ S + R`` when m = n), where T and S are
invertible and sigma is a field automorphism applied entrywise.  Such maps
are exactly the bijections that preserve the distant relation in both
directions, so this module provides:

* applying and composing standard preservers, and sampling random ones;
* :func:`to_table`, freezing a preserver into an explicit permutation of
  the whole space (a :class:`MapTable`);
* :func:`certify`, checking whether a tabulated bijection preserves the
  distant relation (exhaustively or on a seeded sample);
* :func:`decompose`, recovering the (T, S, R, sigma, transposed) data
  from a certified table.

The pair (T, S) is only determined up to (c*T, c^-1*S); constructors
normalize the gauge so the first nonzero entry of T in row-major order
equals 1, which makes recovered parameters comparable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf import GF, FieldAutomorphism, automorphism_group
from .matspace import (
    DEFAULT_BUDGET,
    Mat,
    MatrixSpace,
    _check_budget,
    _PAIR_TABLE_LIMIT,
    _index_weights,
    array_rank,
    batch_index,
    distant_table,
    entry_tensor,
    matmul_array,
    rank,
    rank_one_factor,
    rank_table,
)

__all__ = [
    "StandardPreserver",
    "MapTable",
    "Certificate",
    "DecompositionError",
    "to_table",
    "certify",
    "decompose",
    "compose",
    "random_preserver",
    "rank_one_perturbation_profile",
]


def _require_hypotheses(space: MatrixSpace) -> None:
    if space.field.q < 3:
        raise ValueError("the field must have at least three elements")
    if space.n < 2 or space.m < space.n:
        raise ValueError(f"shape must satisfy m >= n >= 2, got {space.m} x {space.n}")


class StandardPreserver:
    """The map A -> T @ twist(A, sigma) @ S + R, optionally transposing.

    Instances are gauge-canonical: the first nonzero entry of T in
    row-major order equals 1 (rescaling (T, S) to (c*T, c^-1*S) leaves the
    map unchanged, so construction normalizes).  ``transposed`` requires a
    square space.
    """

    __slots__ = ("T", "S", "R", "sigma", "transposed")

    def __init__(self, T: Mat, S: Mat, R: Mat, sigma: FieldAutomorphism, transposed: bool = False):
        f = R.field
        m, n = R.shape
        if T.field is not f or S.field is not f or sigma.field is not f:
            raise ValueError("components belong to different fields")
        if T.shape != (m, m) or S.shape != (n, n):
            raise ValueError("T must be m x m and S must be n x n")
        if transposed and m != n:
            raise ValueError("the transposed form requires a square space")
        if rank(T) != m:
            raise ValueError("T must be invertible")
        if rank(S) != n:
            raise ValueError("S must be invertible")

        flat = T.array.reshape(-1)
        lead = int(flat[np.flatnonzero(flat)[0]])
        if lead != 1:
            T = T.scale(f.inv_py[lead])
            S = S.scale(lead)
        self.T = T
        self.S = S
        self.R = R
        self.sigma = sigma
        self.transposed = bool(transposed)

    @property
    def space(self) -> MatrixSpace:
        return self.R.space

    def __call__(self, A: Mat) -> Mat:
        if A.field is not self.R.field or A.shape != self.R.shape:
            raise ValueError("matrix belongs to a different space")
        twisted = A.twist(self.sigma)
        if self.transposed:
            twisted = twisted.transpose()
        return self.T @ twisted @ self.S + self.R

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, StandardPreserver)
            and self.T == other.T
            and self.S == other.S
            and self.R == other.R
            and self.sigma == other.sigma
            and self.transposed == other.transposed
        )

    def __hash__(self) -> int:
        return hash((self.T, self.S, self.R, self.sigma, self.transposed))

    def __repr__(self) -> str:
        return (
            f"StandardPreserver(T={self.T!r}, S={self.S!r}, R={self.R!r}, "
            f"sigma={self.sigma!r}, transposed={self.transposed})"
        )


class MapTable:
    """A bijection of a matrix space stored as an index permutation.

    ``image[i]`` is the enumeration index of the image of the matrix at
    index i.
    """

    __slots__ = ("space", "image")

    def __init__(self, space: MatrixSpace, image):
        arr = np.asarray(image, dtype=np.int64).copy()
        if arr.shape != (space.size,):
            raise ValueError(f"image must have length {space.size}")
        counts = np.bincount(arr, minlength=space.size) if arr.size else np.array([])
        if arr.size and (arr.min() < 0 or arr.max() >= space.size or (counts != 1).any()):
            raise ValueError("image is not a permutation of the space")
        arr.setflags(write=False)
        self.space = space
        self.image = arr

    def matrix_image(self, A: Mat) -> Mat:
        return self.space.matrix(int(self.image[A.index()]))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MapTable)
            and self.space == other.space
            and bool(np.array_equal(self.image, other.image))
        )

    def __hash__(self) -> int:
        return hash((self.space, self.image.tobytes()))


@dataclass(frozen=True)
class Certificate:
    """Outcome of checking a table for distant preservation.

    In sampled mode only ``preserving=False`` is conclusive; a sampled
    pass just means no violation was found among the checked pairs.
    """

    preserving: bool
    counterexample: tuple[Mat, Mat] | None
    pairs_checked: int
    mode: str


class DecompositionError(ValueError):
    """A table could not be decomposed into standard-preserver form.

    ``step`` identifies the failing validation: "rank_one_image",
    "transpose_detection", "sigma_not_automorphism", or "table_mismatch".
    """

    def __init__(self, step: str, message: str):
        super().__init__(message)
        self.step = step


def to_table(f: StandardPreserver, budget: int = DEFAULT_BUDGET) -> MapTable:
    """Tabulate a preserver over its whole space."""
    space = f.space
    _check_budget(space.size, budget, "matrices")
    fld = space.field
    tensor = entry_tensor(space, budget)
    twisted = f.sigma.table[tensor]
    if f.transposed:
        twisted = twisted.transpose(0, 2, 1)
    out = matmul_array(fld, f.T.array, twisted)
    out = matmul_array(fld, out, f.S.array)
    out = fld.add_table[out, f.R.array[None, :, :]]
    return MapTable(space, batch_index(space, out))


def _distant_flags(space: MatrixSpace, left: np.ndarray, right: np.ndarray, flat, fr) -> np.ndarray:
    diff = space.field.sub_table[flat[left], flat[right]]
    idx = diff.astype(np.int64) @ _index_weights(space.field.q, space.m * space.n)
    return fr[idx]


def certify(
    table: MapTable,
    mode: str = "exhaustive",
    samples: int = 10_000,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
) -> Certificate:
    """Check that a table preserves the distant relation on ordered pairs.

    Exhaustive mode scans all ordered pairs (A, B) with A != B and is
    conclusive both ways.  Sampled mode checks ``samples`` seeded uniform
    pairs and is conclusive only when it reports a violation.  The first
    failing pair is returned as a counterexample.
    """
    space = table.space
    n_mats = space.size
    perm = table.image
    flat = entry_tensor(space, budget).reshape(n_mats, -1)
    fr = rank_table(space, budget) == space.n

    if mode == "exhaustive":
        if n_mats <= _PAIR_TABLE_LIMIT:
            dis = distant_table(space, budget)
            mapped = dis[perm][:, perm]
            mismatch = dis != mapped
            if not mismatch.any():
                return Certificate(True, None, n_mats * (n_mats - 1), "exhaustive")
            i, j = map(int, np.argwhere(mismatch)[0])
        else:
            i = j = -1
            block = max(1, 2**22 // n_mats)
            img_flat = flat[perm]
            found = False
            for start in range(0, n_mats, block):
                stop = min(start + block, n_mats)
                d1 = _distant_flags(space, np.arange(start, stop)[:, None], np.arange(n_mats)[None, :], flat, fr)
                d2 = _distant_flags(space, perm[start:stop][:, None], perm[None, :], flat, fr)
                bad = d1 != d2
                if bad.any():
                    bi, bj = map(int, np.argwhere(bad)[0])
                    i, j = start + bi, bj
                    found = True
                    break
            if not found:
                return Certificate(True, None, n_mats * (n_mats - 1), "exhaustive")
        checked = i * (n_mats - 1) + j + (0 if j < i else -1) + 1
        return Certificate(False, (space.matrix(i), space.matrix(j)), checked, "exhaustive")

    if mode == "sampled":
        rng = np.random.default_rng(seed)
        left = rng.integers(0, n_mats, samples)
        right = (left + 1 + rng.integers(0, n_mats - 1, samples)) % n_mats
        d1 = _distant_flags(space, left, right, flat, fr)
        d2 = _distant_flags(space, perm[left], perm[right], flat, fr)
        bad = d1 != d2
        if not bad.any():
            return Certificate(True, None, samples, "sampled")
        k = int(np.argmax(bad))
        pair = (space.matrix(int(left[k])), space.matrix(int(right[k])))
        return Certificate(False, pair, k + 1, "sampled")

    raise ValueError(f"unknown mode {mode!r}")


def _direction(v: Mat) -> Mat:
    # Scale a nonzero column vector so its first nonzero coordinate is 1;
    # equal directions then mean equal spans.
    flat = v.array.reshape(-1)
    lead = int(flat[np.flatnonzero(flat)[0]])
    return v.scale(v.field.inv_py[lead])


def decompose(table: MapTable, budget: int = DEFAULT_BUDGET) -> StandardPreserver:
    """Recover the standard-preserver form of a tabulated bijection.

    The table must preserve the distant relation (run :func:`certify`
    first); on corrupted input a :class:`DecompositionError` reports which
    validation failed.  Recovery: R is the image of 0; after subtracting
    it the map sends rank-one matrices to rank-one matrices, the images of
    the unit matrices pin down the columns of T and rows of S (and whether
    the transposed form applies), and the images of the scalar multiples
    of E11 read off sigma.  The result is validated against every table
    entry before it is returned.
    """
    space = table.space
    _require_hypotheses(space)
    fld = space.field
    m, n = space.m, space.n
    q = fld.q
    img = table.image

    R = space.matrix(int(img[0]))
    r_flat = R.array.reshape(1, -1)

    ranks = rank_table(space, budget)
    flat = entry_tensor(space, budget).reshape(space.size, -1)
    rank_one_sources = np.nonzero(ranks == 1)[0]
    diff = fld.sub_table[flat[img[rank_one_sources]], r_flat]
    shifted = diff.astype(np.int64) @ _index_weights(q, m * n)
    bad = ranks[shifted] != 1
    if bad.any():
        culprit = space.matrix(int(rank_one_sources[int(np.argmax(bad))]))
        raise DecompositionError(
            "rank_one_image",
            f"image of rank-one matrix {culprit!r} is not rank-one after removing the translation",
        )

    def shifted_image(source: Mat) -> Mat:
        return space.matrix(int(img[source.index()])) - R

    transposed = False
    if m == n:
        w_11 = shifted_image(space.unit(0, 0))
        w_12 = shifted_image(space.unit(0, 1))
        col_11, row_11 = rank_one_factor(w_11)
        col_12, row_12 = rank_one_factor(w_12)
        if col_11 == col_12:
            transposed = False
        elif _direction(row_11) == _direction(row_12):
            transposed = True
        else:
            raise DecompositionError(
                "transpose_detection",
                "images of the first two unit matrices share neither column nor row space",
            )

    def probe(source: Mat) -> Mat:
        return shifted_image(source.transpose() if transposed else source)

    w = probe(space.unit(0, 0))
    t1, s1 = rank_one_factor(w)
    r_star = int(np.flatnonzero(t1.array.reshape(-1))[0])
    c_star = int(np.flatnonzero(s1.array.reshape(-1))[0])
    pivot = int(w.array[r_star, c_star])

    sigma_map = []
    for lam in range(q):
        image = probe(space.matrix(lam))  # source is lam * E11
        mu = fld.mul_py[int(image.array[r_star, c_star])][fld.inv_py[pivot]]
        if image != w.scale(mu):
            raise DecompositionError(
                "sigma_not_automorphism",
                f"image of the scalar multiple lam={lam} of the unit matrix leaves the expected line",
            )
        sigma_map.append(mu)
    sigma = None
    for j, frob in enumerate(fld.frob_tables):
        if sigma_map == list(frob):
            sigma = FieldAutomorphism(fld, j)
            break
    if sigma is None:
        raise DecompositionError(
            "sigma_not_automorphism",
            f"recovered scalar action {sigma_map} is not a field automorphism",
        )

    s1_scale = fld.inv_py[int(s1.array[c_star, 0])]
    t_cols = [t1.array[:, 0]]
    for i in range(1, m):
        image = probe(space.unit(i, 0))
        t_cols.append(fld.mul_table[s1_scale, image.array[:, c_star]])
    s_rows = [s1.array[:, 0]]
    for j in range(1, n):
        image = probe(space.unit(0, j))
        s_rows.append(image.array[r_star, :].copy())  # t1[r_star] = 1 by gauge

    t_arr = np.stack(t_cols, axis=1)
    s_arr = np.stack(s_rows, axis=0)
    if array_rank(fld, t_arr) != m or array_rank(fld, s_arr) != n:
        raise DecompositionError("table_mismatch", "recovered factors are singular")

    recovered = StandardPreserver(
        Mat._wrap(fld, t_arr), Mat._wrap(fld, s_arr), R, sigma, transposed
    )
    if not np.array_equal(to_table(recovered, budget).image, img):
        raise DecompositionError(
            "table_mismatch",
            "recovered preserver does not reproduce the table",
        )
    return recovered


def compose(f: StandardPreserver, g: StandardPreserver) -> StandardPreserver:
    """The preserver A -> f(g(A)), re-canonicalized.

    Closure under composition follows from twisting g's components by
    f's automorphism; a transposed factor flips the flag and exchanges
    the roles (and sides) of g's T and S.
    """
    if f.space != g.space:
        raise ValueError("preservers act on different spaces")
    fld = f.space.field
    sigma = FieldAutomorphism(fld, (f.sigma.power + g.sigma.power) % fld.k)
    tg = g.T.twist(f.sigma)
    sg = g.S.twist(f.sigma)
    rg = g.R.twist(f.sigma)
    if f.transposed:
        T = f.T @ sg.transpose()
        S = tg.transpose() @ f.S
        R = f.T @ rg.transpose() @ f.S + f.R
        transposed = not g.transposed
    else:
        T = f.T @ tg
        S = sg @ f.S
        R = f.T @ rg @ f.S + f.R
        transposed = g.transposed
    return StandardPreserver(T, S, R, sigma, transposed)


def _random_invertible(fld: GF, k: int, rng: np.random.Generator) -> Mat:
    while True:
        candidate = Mat(fld, rng.integers(0, fld.q, (k, k)))
        if rank(candidate) == k:
            return candidate


def random_preserver(space: MatrixSpace, seed: int, allow_transpose: bool = True) -> StandardPreserver:
    """Seeded random standard preserver.

    T and S are uniform over invertible matrices (rejection sampling),
    R uniform, sigma uniform over the automorphism group; the transposed
    flag is a fair coin when allowed and the space is square.  The draw
    order is fixed, so a seed fully determines the output.
    """
    _require_hypotheses(space)
    fld = space.field
    rng = np.random.default_rng(seed)
    T = _random_invertible(fld, space.m, rng)
    S = _random_invertible(fld, space.n, rng)
    R = Mat(fld, rng.integers(0, fld.q, (space.m, space.n)))
    sigma = FieldAutomorphism(fld, int(rng.integers(0, fld.k)))
    transposed = bool(allow_transpose and space.m == space.n and rng.integers(0, 2))
    return StandardPreserver(T, S, R, sigma, transposed)


def rank_one_perturbation_profile(A: Mat, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Invertibility of A - P across all rank-one P of the space.

    Returns a boolean vector aligned with the rank-one matrices in
    enumeration order.  Distinct invertible matrices have distinct
    profiles, which is what lets rank-one perturbations separate them.
    """
    space = A.space
    if space.m != space.n:
        raise ValueError("perturbation profile is defined for square matrices")
    fld = space.field
    ranks = rank_table(space, budget)
    flat = entry_tensor(space, budget).reshape(space.size, -1)
    rank_one = np.nonzero(ranks == 1)[0]
    diff = fld.sub_table[A.array.reshape(1, -1), flat[rank_one]]
    idx = diff.astype(np.int64) @ _index_weights(fld.q, space.m * space.n)
    return ranks[idx] == space.n
