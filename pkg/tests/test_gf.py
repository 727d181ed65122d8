import itertools

import pytest

from matgeo.gf import SUPPORTED_ORDERS, FieldAutomorphism, automorphism_group, field


@pytest.mark.parametrize("q", SUPPORTED_ORDERS)
def test_field_axioms_exhaustive(q):
    F = field(q)
    els = list(F.elements())
    assert els == list(range(q))
    for a, b in itertools.product(els, repeat=2):
        assert F.add(a, b) == F.add(b, a)
        assert F.mul(a, b) == F.mul(b, a)
    for a, b, c in itertools.product(els, repeat=3):
        assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    for a in els:
        assert F.add(a, 0) == a
        assert F.mul(a, 1) == a
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1


def test_known_values_gf3():
    F = field(3)
    assert F.add(2, 2) == 1
    assert F.mul(2, 2) == 1
    assert F.inv(2) == 2


def test_known_values_gf4():
    # g is the class of x under the modulus x^2 + x + 1, i.e. index 2.
    F = field(4)
    g = 2
    assert F.add(g, g) == 0
    assert F.mul(g, g) == 3  # g^2 = g + 1
    assert F.inv(g) == 3


def test_known_values_gf5():
    assert field(5).inv(2) == 3


def test_known_values_gf9():
    # Modulus x^2 + 1: x * x = -1 = 2, and index 3 encodes x.
    F = field(9)
    assert F.mul(3, 3) == 2


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        field(3).inv(0)


def test_unsupported_order_rejected():
    with pytest.raises(ValueError):
        field(6)
    with pytest.raises(ValueError):
        field(11)


def test_subtraction_matches_addition():
    for q in SUPPORTED_ORDERS:
        F = field(q)
        for a, b in itertools.product(F.elements(), repeat=2):
            assert F.add(F.sub(a, b), b) == a


def test_division():
    for q in (3, 4, 9):
        F = field(q)
        for a in F.elements():
            for b in range(1, q):
                assert F.mul(F.div(a, b), b) == a


@pytest.mark.parametrize("q,size", [(2, 1), (3, 1), (4, 2), (5, 1), (7, 1), (8, 3), (9, 2)])
def test_automorphism_group_sizes(q, size):
    assert len(automorphism_group(field(q))) == size


@pytest.mark.parametrize("q", SUPPORTED_ORDERS)
def test_automorphisms_are_field_maps(q):
    F = field(q)
    for sigma in automorphism_group(F):
        for a, b in itertools.product(F.elements(), repeat=2):
            assert sigma(F.add(a, b)) == F.add(sigma(a), sigma(b))
            assert sigma(F.mul(a, b)) == F.mul(sigma(a), sigma(b))


def test_identity_automorphism():
    F = field(9)
    ident = FieldAutomorphism(F, 0)
    assert ident.is_identity
    assert all(ident(a) == a for a in F.elements())


def test_gf4_frobenius_squares():
    F = field(4)
    sigma = FieldAutomorphism(F, 1)
    assert sigma(2) == 3  # g -> g^2 = g + 1


def test_gf9_frobenius_is_cubing_and_fixes_prime_subfield():
    F = field(9)
    sigma = FieldAutomorphism(F, 1)
    for a in F.elements():
        assert sigma(a) == F.mul(F.mul(a, a), a)
    for a in range(3):
        assert sigma(a) == a


@pytest.mark.parametrize("q", SUPPORTED_ORDERS)
def test_frobenius_powers_compose_to_identity(q):
    F = field(q)
    group = automorphism_group(F)
    for j, sigma in enumerate(group):
        tau = group[(F.k - j) % F.k]
        for a in F.elements():
            assert tau(sigma(a)) == a


def test_invalid_frobenius_power():
    with pytest.raises(ValueError):
        FieldAutomorphism(field(4), 2)


def test_field_factory_is_cached():
    assert field(3) is field(3)
