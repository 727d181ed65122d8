"""Exact arithmetic in small Galois fields GF(p^k).

A field element is an integer index in ``[0, q)`` encoding its coefficient
vector over GF(p) in little-endian base p: the polynomial
``a0 + a1*x + a2*x^2 + ...`` has index ``a0 + a1*p + a2*p^2 + ...``.
Index 0 is the additive identity and index 1 the multiplicative identity.

Reduction moduli are fixed per order so that element indices (and every
file format built on them) are reproducible:

    GF(4): x^2 + x + 1
    GF(8): x^3 + x + 1
    GF(9): x^2 + 1

All arithmetic is table-driven.  The q x q numpy tables exist because the
enumeration-heavy callers index them with whole arrays at a time; the
parallel plain-list tables serve scalar hot loops.  Everything here is
immutable after construction and safe to share across workers.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = [
    "GF",
    "FieldAutomorphism",
    "field",
    "automorphism_group",
    "SUPPORTED_ORDERS",
]

# (p, k, little-endian modulus) per supported order.  Prime orders carry
# the degree-1 modulus x; their arithmetic is plain mod p.
_FIELD_PARAMS: dict[int, tuple[int, int, tuple[int, ...]]] = {
    2: (2, 1, (0, 1)),
    3: (3, 1, (0, 1)),
    4: (2, 2, (1, 1, 1)),
    5: (5, 1, (0, 1)),
    7: (7, 1, (0, 1)),
    8: (2, 3, (1, 1, 0, 1)),
    9: (3, 2, (1, 0, 1)),
}

SUPPORTED_ORDERS = tuple(sorted(_FIELD_PARAMS))


def _coeffs(index: int, p: int, k: int) -> tuple[int, ...]:
    return tuple((index // p**i) % p for i in range(k))


def _index(coeffs, p: int) -> int:
    return sum(int(c) * p**i for i, c in enumerate(coeffs))


def _poly_mul_mod(a, b, modulus, p: int) -> tuple[int, ...]:
    """Product of little-endian coefficient tuples, reduced by the monic modulus."""
    k = len(modulus) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    for d in range(len(prod) - 1, k - 1, -1):
        c = prod[d]
        if c:
            for t in range(k + 1):
                prod[d - k + t] = (prod[d - k + t] - c * modulus[t]) % p
    out = prod[:k]
    out += [0] * (k - len(out))
    return tuple(out)


class GF:
    """The Galois field GF(q) for a supported order q.

    Use the :func:`field` factory; it caches one instance per order, so
    field identity can be tested with ``is`` / ``==``.
    """

    __slots__ = (
        "p", "k", "q", "modulus",
        "add_table", "sub_table", "neg_table", "mul_table", "inv_table",
        "frob_tables",
        "add_py", "sub_py", "neg_py", "mul_py", "inv_py",
    )

    def __init__(self, q: int):
        if q not in _FIELD_PARAMS:
            raise ValueError(
                f"unsupported field order {q}; supported orders: {SUPPORTED_ORDERS}"
            )
        p, k, modulus = _FIELD_PARAMS[q]
        self.p = p
        self.k = k
        self.q = q
        self.modulus = modulus

        coeffs = [_coeffs(i, p, k) for i in range(q)]
        add = [[0] * q for _ in range(q)]
        mul = [[0] * q for _ in range(q)]
        for a in range(q):
            for b in range(q):
                add[a][b] = _index(
                    [(x + y) % p for x, y in zip(coeffs[a], coeffs[b])], p
                )
                m = _index(_poly_mul_mod(coeffs[a], coeffs[b], modulus, p), p)
                if m == 0 and a and b:
                    raise ValueError(f"modulus {modulus} is reducible over GF({p})")
                mul[a][b] = m
        neg = [add[a].index(0) for a in range(q)]
        sub = [[add[a][neg[b]] for b in range(q)] for a in range(q)]
        inv = [0] * q
        for a in range(1, q):
            inv[a] = mul[a].index(1)

        # Frobenius powers x -> x^(p^j) for j = 0 .. k-1.
        frob = [list(range(q))]
        for _ in range(1, k):
            prev = frob[-1]
            step = []
            for a in range(q):
                v = prev[a]
                acc = v
                for _ in range(p - 1):
                    acc = mul[acc][v]
                step.append(acc)
            frob.append(step)

        self.add_py = add
        self.sub_py = sub
        self.neg_py = neg
        self.mul_py = mul
        self.inv_py = inv
        self.add_table = self._freeze(add)
        self.sub_table = self._freeze(sub)
        self.neg_table = self._freeze(neg)
        self.mul_table = self._freeze(mul)
        self.inv_table = self._freeze(inv)
        self.frob_tables = self._freeze(frob)

    @staticmethod
    def _freeze(data) -> np.ndarray:
        arr = np.array(data, dtype=np.uint8)
        arr.setflags(write=False)
        return arr

    # Scalar operations on element indices.

    def add(self, a: int, b: int) -> int:
        return self.add_py[a][b]

    def sub(self, a: int, b: int) -> int:
        return self.sub_py[a][b]

    def neg(self, a: int) -> int:
        return self.neg_py[a]

    def mul(self, a: int, b: int) -> int:
        return self.mul_py[a][b]

    def inv(self, a: int) -> int:
        """Multiplicative inverse; raises ZeroDivisionError on 0."""
        if a == 0:
            raise ZeroDivisionError(f"0 has no multiplicative inverse in GF({self.q})")
        return self.inv_py[a]

    def div(self, a: int, b: int) -> int:
        return self.mul_py[a][self.inv(b)]

    def elements(self) -> range:
        """All q element indices, in index order."""
        return range(self.q)

    def __repr__(self) -> str:
        return f"GF({self.q})"


class FieldAutomorphism:
    """The field automorphism x -> x^(p^power) of GF(p^k).

    Every automorphism of GF(p^k) is a power of the Frobenius map x -> x^p,
    so ``power`` ranges over [0, k); power 0 is the identity.
    """

    __slots__ = ("field", "power", "table")

    def __init__(self, field: GF, power: int):
        if not 0 <= power < field.k:
            raise ValueError(f"power must lie in [0, {field.k}), got {power}")
        self.field = field
        self.power = power
        self.table = field.frob_tables[power]

    def __call__(self, a: int) -> int:
        return int(self.table[a])

    @property
    def is_identity(self) -> bool:
        return self.power == 0

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FieldAutomorphism)
            and self.field is other.field
            and self.power == other.power
        )

    def __hash__(self) -> int:
        return hash((id(self.field), self.power))

    def __repr__(self) -> str:
        return f"FieldAutomorphism(GF({self.field.q}), x -> x^{self.field.p ** self.power})"


@lru_cache(maxsize=None)
def field(q: int) -> GF:
    """The canonical GF(q) instance for a supported order q."""
    return GF(q)


def automorphism_group(f: GF) -> tuple[FieldAutomorphism, ...]:
    """All k automorphisms of GF(p^k), Frobenius powers 0 .. k-1."""
    return tuple(FieldAutomorphism(f, j) for j in range(f.k))
