import numpy as np
import pytest

from matgeo.gf import FieldAutomorphism, field
from matgeo.matspace import Mat, MatrixSpace, is_distant, rank, rank_table
from matgeo.preserver import (
    Certificate,
    DecompositionError,
    MapTable,
    StandardPreserver,
    certify,
    compose,
    decompose,
    random_preserver,
    rank_one_perturbation_profile,
    to_table,
)

F3 = field(3)
M22 = MatrixSpace(F3, 2, 2)
M32 = MatrixSpace(F3, 3, 2)


def identity_preserver(space):
    f = space.field
    return StandardPreserver(
        Mat.identity(f, space.m),
        Mat.identity(f, space.n),
        space.zero(),
        FieldAutomorphism(f, 0),
    )


def transpose_preserver(space):
    f = space.field
    return StandardPreserver(
        Mat.identity(f, space.m),
        Mat.identity(f, space.n),
        space.zero(),
        FieldAutomorphism(f, 0),
        transposed=True,
    )


def test_apply_identity():
    ident = identity_preserver(M22)
    for i in (0, 5, 80):
        A = M22.matrix(i)
        assert ident(A) == A


def test_apply_translation():
    R = M22.matrix(46)
    f = StandardPreserver(Mat.identity(F3, 2), Mat.identity(F3, 2), R, FieldAutomorphism(F3, 0))
    assert f(M22.zero()) == R


def test_apply_frobenius_twist_gf4():
    f4 = field(4)
    space = MatrixSpace(f4, 2, 2)
    f = StandardPreserver(
        Mat.identity(f4, 2),
        Mat.identity(f4, 2),
        space.zero(),
        FieldAutomorphism(f4, 1),
    )
    image = f(space.unit(0, 0).scale(2))
    assert image == space.unit(0, 0).scale(3)  # g^2 = g + 1


def test_constructor_validations():
    with pytest.raises(ValueError):
        StandardPreserver(Mat.zeros(F3, 2, 2), Mat.identity(F3, 2), M22.zero(), FieldAutomorphism(F3, 0))
    with pytest.raises(ValueError):
        StandardPreserver(Mat.identity(F3, 3), Mat.identity(F3, 2), M32.zero(), FieldAutomorphism(F3, 0), transposed=True)
    with pytest.raises(ValueError):
        StandardPreserver(Mat.identity(F3, 2), Mat.identity(F3, 2), M32.zero(), FieldAutomorphism(F3, 0))


def test_gauge_canonicalization():
    f = random_preserver(M22, seed=4)
    flat = f.T.array.reshape(-1)
    assert flat[np.flatnonzero(flat)[0]] == 1
    for c in range(1, 3):
        g = StandardPreserver(f.T.scale(c), f.S.scale(F3.inv(c)), f.R, f.sigma, f.transposed)
        assert g == f


def test_to_table_identity():
    table = to_table(identity_preserver(M22))
    assert np.array_equal(table.image, np.arange(81))


def test_to_table_translation_has_no_fixed_points():
    R = M22.matrix(7)
    f = StandardPreserver(Mat.identity(F3, 2), Mat.identity(F3, 2), R, FieldAutomorphism(F3, 0))
    table = to_table(f)
    assert not (table.image == np.arange(81)).any()


def test_to_table_matches_pointwise_application():
    for seed in range(5):
        f = random_preserver(M22, seed=seed)
        table = to_table(f)
        for i in (0, 1, 13, 52, 80):
            assert int(table.image[i]) == f(M22.matrix(i)).index()
    f4 = field(4)
    space = MatrixSpace(f4, 2, 2)
    for seed in range(3):
        f = random_preserver(space, seed=seed)
        table = to_table(f)
        for i in (0, 17, 255):
            assert int(table.image[i]) == f(space.matrix(i)).index()


def test_map_table_rejects_non_permutation():
    with pytest.raises(ValueError):
        MapTable(M22, np.zeros(81, dtype=np.int64))
    with pytest.raises(ValueError):
        MapTable(M22, np.arange(80))


def test_certify_accepts_preserver_tables():
    for seed in range(5):
        cert = certify(to_table(random_preserver(M22, seed=seed)))
        assert cert.preserving
        assert cert.counterexample is None
        assert cert.pairs_checked == 81 * 80
        assert cert.mode == "exhaustive"


def test_certify_accepts_transpose_table():
    cert = certify(to_table(transpose_preserver(M22)))
    assert cert.preserving


def test_certify_detects_swapped_identity_table():
    image = np.arange(81)
    # Swap a rank-one matrix with a full-rank one: not distant-preserving.
    i, j = M22.unit(0, 0).index(), Mat.identity(F3, 2).index()
    image[[i, j]] = image[[j, i]]
    cert = certify(MapTable(M22, image))
    assert not cert.preserving
    A, B = cert.counterexample
    table = MapTable(M22, image)
    assert is_distant(A, B) != is_distant(table.matrix_image(A), table.matrix_image(B))


def test_certify_sampled_mode():
    table = to_table(random_preserver(M22, seed=9))
    cert = certify(table, mode="sampled", samples=500, seed=1)
    assert cert == Certificate(True, None, 500, "sampled")
    image = table.image.copy()
    image[[0, 1]] = image[[1, 0]]
    bad = certify(MapTable(M22, image), mode="sampled", samples=5000, seed=1)
    assert not bad.preserving
    assert bad.pairs_checked <= 5000


def test_certify_rejects_unknown_mode():
    with pytest.raises(ValueError):
        certify(to_table(identity_preserver(M22)), mode="cursory")


def test_decompose_identity_table():
    f = decompose(MapTable(M22, np.arange(81)))
    assert f == identity_preserver(M22)
    assert not f.transposed


def test_decompose_transpose_table():
    f = decompose(to_table(transpose_preserver(M22)))
    assert f.transposed
    assert f.T == Mat.identity(F3, 2)
    assert f.S == Mat.identity(F3, 2)
    assert f.R == M22.zero()
    assert f.sigma.is_identity


def test_decompose_round_trip_smoke():
    for space, seeds in [(M22, range(8)), (M32, range(4)), (MatrixSpace(field(4), 2, 2), range(4))]:
        for seed in seeds:
            f = random_preserver(space, seed=seed)
            table = to_table(f)
            g = decompose(table)
            assert g == f
            assert to_table(g) == table


def test_decompose_error_rank_one_image():
    image = np.arange(81)
    i, j = M22.unit(0, 0).index(), Mat.identity(F3, 2).index()
    image[[i, j]] = image[[j, i]]
    with pytest.raises(DecompositionError) as err:
        decompose(MapTable(M22, image))
    assert err.value.step == "rank_one_image"


def test_decompose_error_sigma_not_automorphism():
    f5 = field(5)
    space = MatrixSpace(f5, 2, 2)
    image = np.arange(space.size)
    # Swap the images of 2*E11 and 3*E11: rank-one images survive but the
    # recovered scalar action 2 <-> 3 is not an automorphism of GF(5).
    image[[2, 3]] = image[[3, 2]]
    with pytest.raises(DecompositionError) as err:
        decompose(MapTable(space, image))
    assert err.value.step == "sigma_not_automorphism"


def test_decompose_error_table_mismatch():
    image = np.arange(81)
    a = Mat(F3, [[1, 0], [0, 1]]).index()
    b = Mat(F3, [[1, 0], [1, 1]]).index()
    image[[a, b]] = image[[b, a]]
    with pytest.raises(DecompositionError) as err:
        decompose(MapTable(M22, image))
    assert err.value.step == "table_mismatch"


def test_decompose_rejects_gf2():
    f2 = field(2)
    space = MatrixSpace(f2, 2, 2)
    with pytest.raises(ValueError):
        decompose(MapTable(space, np.arange(space.size)))


def test_compose_with_identity():
    f = random_preserver(M22, seed=21)
    ident = identity_preserver(M22)
    assert compose(f, ident) == f
    assert compose(ident, f) == f


def test_compose_two_transposed_maps():
    t = transpose_preserver(M22)
    assert compose(t, t) == identity_preserver(M22)
    f = random_preserver(M22, seed=33, allow_transpose=True)
    g = random_preserver(M22, seed=35, allow_transpose=True)
    assert compose(f, g).transposed == (f.transposed != g.transposed)


def test_compose_matches_table_composition():
    for fs, gs in [(1, 2), (3, 14), (6, 7)]:
        f = random_preserver(M22, seed=fs)
        g = random_preserver(M22, seed=gs)
        fg = compose(f, g)
        tf, tg = to_table(f), to_table(g)
        assert np.array_equal(to_table(fg).image, tf.image[tg.image])
    f4 = field(4)
    space = MatrixSpace(f4, 2, 2)
    f = random_preserver(space, seed=5)
    g = random_preserver(space, seed=6)
    assert np.array_equal(to_table(compose(f, g)).image, to_table(f).image[to_table(g).image])


def test_random_preserver_determinism():
    a = random_preserver(M22, seed=99)
    b = random_preserver(M22, seed=99)
    assert a == b
    assert random_preserver(M22, seed=100) != a


def test_random_preserver_respects_transpose_flag():
    for seed in range(30):
        assert not random_preserver(M22, seed=seed, allow_transpose=False).transposed
    assert any(random_preserver(M22, seed=s).transposed for s in range(30))


def test_random_preserver_tables_certify():
    for seed in (2, 12):
        cert = certify(to_table(random_preserver(M32, seed=seed)))
        assert cert.preserving


def test_random_preserver_rejects_bad_spaces():
    with pytest.raises(ValueError):
        random_preserver(MatrixSpace(field(2), 2, 2), seed=0)
    with pytest.raises(ValueError):
        random_preserver(MatrixSpace(F3, 2, 3), seed=0)


def test_rank_one_perturbation_profile_smoke():
    profile = rank_one_perturbation_profile(Mat.identity(F3, 2))
    ranks = rank_table(M22)
    assert profile.shape == ((ranks == 1).sum(),)
    # I - E11 = diag(0, 1) is singular; I - 2*E22 = diag(1, 2) is not.
    rank_ones = np.nonzero(ranks == 1)[0]
    e11 = M22.unit(0, 0).index()
    e22_twice = M22.unit(1, 1).scale(2).index()
    assert not profile[list(rank_ones).index(e11)]
    assert profile[list(rank_ones).index(e22_twice)]
