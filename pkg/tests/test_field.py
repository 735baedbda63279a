import numpy as np
import pytest

from upkit.errors import (
    BadParams,
    CharDividesSix,
    DivisionByZero,
    FieldTooLarge,
    MixedFields,
    NotPrime,
)
from upkit.field import Field, arith, field_new, frobenius, inv


def op_tables(F):
    """Index-valued addition and multiplication tables."""
    q = F.order
    els = F.elements()
    add = np.zeros((q, q), dtype=np.int64)
    mul = np.zeros((q, q), dtype=np.int64)
    for i, a in enumerate(els):
        for j, b in enumerate(els):
            add[i, j] = F.index_of(a + b)
            mul[i, j] = F.index_of(a * b)
    return add, mul


# every constructible size up to 125, exhaustively
AXIOM_FIELDS = [(5, 1), (7, 1), (11, 1), (5, 2), (5, 3)]


@pytest.mark.parametrize("p,k", AXIOM_FIELDS)
def test_field_axioms_exhaustive(p, k):
    F = Field(p, k)
    q = F.order
    add, mul = op_tables(F)
    ar = np.arange(q)

    assert np.array_equal(add, add.T)
    assert np.array_equal(mul, mul.T)
    # zero is index 0, one is index 1 by the from_index convention
    assert np.array_equal(add[0], ar)
    assert np.array_equal(mul[1], ar)
    assert np.array_equal(mul[0], np.zeros(q, dtype=np.int64))

    # associativity over all triples
    assert np.array_equal(add[add, :], np.take(add, add, axis=1))
    assert np.array_equal(mul[mul, :], np.take(mul, mul, axis=1))

    # distributivity over all triples
    left = np.take(mul, add, axis=1)
    for a in range(q):
        assert np.array_equal(left[a], add[mul[a]][:, mul[a]])

    # inverses: every row of add hits 0, every nonzero row of mul hits 1
    assert np.array_equal(np.sort(add, axis=1)[:, :1], np.zeros((q, 1), dtype=np.int64))
    assert all(0 in add[i] for i in range(q))
    assert all(1 in mul[i] for i in range(1, q))


@pytest.mark.parametrize("p,k", AXIOM_FIELDS)
def test_frobenius_is_field_automorphism(p, k):
    F = Field(p, k)
    add, mul = op_tables(F)
    els = F.elements()
    for m in range(k):
        f = np.array([F.index_of(a.frobenius(m)) for a in els], dtype=np.int64)
        assert np.array_equal(f[add], add[np.ix_(f, f)])
        assert np.array_equal(f[mul], mul[np.ix_(f, f)])


def test_canonical_moduli_frozen():
    # lexicographically smallest irreducible, ascending coefficients
    assert Field(5, 1).modulus == (0, 1)
    assert Field(5, 2).modulus == (2, 0, 1)   # x^2 + 2
    assert Field(7, 2).modulus == (1, 0, 1)   # x^2 + 1
    assert Field(5, 3).modulus == (1, 1, 0, 1)  # x^3 + x + 1


def test_prime_field_arith_examples():
    F = Field(5)
    assert F.embed(2) + F.embed(4) == F.embed(1)
    assert F.embed(3) * F.embed(2) == F.embed(1)
    assert F.embed(0) - F.embed(1) == F.embed(4)
    assert inv(F.embed(1)) == F.embed(1)
    assert inv(F.embed(2)) == F.embed(3)
    F7 = Field(7)
    assert inv(F7.embed(3)) == F7.embed(5)


def test_construction_errors():
    with pytest.raises(NotPrime):
        Field(4)
    with pytest.raises(NotPrime):
        Field(1)
    with pytest.raises(NotPrime):
        Field(9)
    with pytest.raises(CharDividesSix):
        Field(2)
    with pytest.raises(CharDividesSix):
        Field(3)
    with pytest.raises(FieldTooLarge):
        Field(5, 6)
    with pytest.raises(FieldTooLarge):
        Field(101, 2)
    with pytest.raises(BadParams):
        Field(5, 0)
    # the bound is configurable
    F = Field(5, 6, max_order=20000)
    assert F.order == 15625


def test_division_by_zero():
    F = Field(5)
    with pytest.raises(DivisionByZero):
        inv(F.zero)
    with pytest.raises(DivisionByZero):
        F.one / F.zero


def test_mixed_fields_rejected():
    a = Field(5).embed(1)
    b = Field(7).embed(1)
    with pytest.raises(MixedFields):
        a + b
    c = Field(5, 2).one
    with pytest.raises(MixedFields):
        a * c
    # equal specs from separate constructions interoperate
    d = Field(5).embed(3)
    assert a + d == Field(5).embed(4)


def test_frobenius_examples():
    F = Field(5)
    for a in F.elements():
        assert frobenius(a, 0) == a
    F25 = Field(5, 2)
    for a in F25.elements():
        assert frobenius(a, 0) == a
        assert frobenius(frobenius(a, 1), 1) == a
        assert frobenius(a, 1) == a ** 5
    for c in range(5):
        e = F25.embed(c)
        assert frobenius(e, 1) == e


def test_pow_and_inverse():
    F = Field(5, 2)
    for a in F.elements():
        if a:
            assert a * a.inverse() == F.one
            assert a ** (F.order - 1) == F.one
            assert a ** -1 == a.inverse()
    assert F.zero ** 0 == F.one


def test_enumeration_roundtrip():
    for p, k in [(5, 1), (5, 2), (7, 1)]:
        F = Field(p, k)
        els = F.elements()
        assert len(els) == F.order
        assert len(set(els)) == F.order
        for i, a in enumerate(els):
            assert F.index_of(a) == i
            assert F.from_index(i) == a


def test_serialization():
    F = Field(5, 2)
    a = F.from_index(13)
    data = a.to_json()
    assert isinstance(data, list) and len(data) == 2
    assert all(0 <= c < 5 for c in data)
    assert F.elem_from_json(data) == a
    assert F.spec_json() == {"p": 5, "k": 2, "modulus": [2, 0, 1]}


def test_spec_level_ops():
    F = field_new(5, 2)
    a, b = F.from_index(7), F.from_index(18)
    assert arith(a, b, "add") == a + b
    assert arith(a, b, "sub") == a - b
    assert arith(a, b, "mul") == a * b
    with pytest.raises(BadParams):
        arith(a, b, "div")


def test_int_coercion_in_ops():
    F = Field(5)
    a = F.embed(2)
    assert a + 4 == F.embed(1)
    assert 4 + a == F.embed(1)
    assert a - 3 == F.embed(4)
    assert 3 - a == F.embed(1)
    assert a * 3 == F.embed(1)
    assert 1 / a == F.embed(3)
    assert a == 2 and a != 3
