import random

import numpy as np
import pytest

from upkit.errors import (
    BadIndices,
    DimensionMismatch,
    NotInGroup,
    ZeroTorusEntry,
)
from upkit.field import Field
from upkit.group import (
    commutator,
    elem_unipotent,
    filtration_level,
    group,
    in_P_i_k,
    invert_unitriangular,
    multiply,
    normal_form,
    torus_elem,
    word_to_matrix,
)


def steinberg_holds(G, a, b, xi, zeta):
    """Compare [x_a(xi), x_b(zeta)] against the measured-constant expansion."""
    lhs = G.commutator_of_gens(a, xi, b, zeta)
    factors = []
    for root, e1, e2, c in G.constants.terms(a, b):
        factors.append((root, G.field.embed(c) * xi ** e1 * zeta ** e2))
    return lhs == G.product_of_gens(factors)


def test_generator_entries(G4, F5):
    n, d = 4, 8
    xi = F5.embed(3)
    m = G4.elem(G4.rs.root(1, -1), xi)
    expect = G4.one().arr.copy()
    expect[0, d - 1, 0] = 3
    assert np.array_equal(m.arr, expect)

    m = G4.elem(G4.rs.root(1, 2), xi)
    expect = G4.one().arr.copy()
    expect[0, 1, 0] = 3
    expect[6, 7, 0] = 2  # -3 mod 5
    assert np.array_equal(m.arr, expect)

    for r in G4.rs.roots:
        assert G4.elem(r, F5.zero).is_one()


def test_generators_symplectic_and_unitriangular(G4, F5, rng):
    for r in G4.rs.roots:
        for _ in range(20):
            m = G4.elem(r, F5.sample(rng))
            assert G4.is_unitriangular(m.arr)
            assert G4.is_symplectic(m.arr)


def test_generators_symplectic_extension(G4_25, F25, rng):
    for r in G4_25.rs.roots:
        m = G4_25.elem(r, F25.sample(rng))
        assert G4_25.is_symplectic(m.arr)


def test_additivity_in_the_argument(G4, F5, rng):
    # x_a(xi) x_a(zeta) = x_a(xi + zeta)
    for r in G4.rs.roots:
        for _ in range(5):
            xi, zeta = F5.sample(rng), F5.sample(rng)
            assert G4.elem(r, xi) * G4.elem(r, zeta) == G4.elem(r, xi + zeta)


def test_multiply_basics(G4, rng):
    a = G4.random_element(rng)
    assert a * G4.one() == a
    assert G4.one() * a == a
    a1 = G4.elem(G4.rs.simple[0], G4.field.one)
    a2 = G4.elem(G4.rs.simple[1], G4.field.one)
    left, right = a1 * a2, a2 * a1
    assert left != right
    assert not np.array_equal(left.arr[0, 2], right.arr[0, 2])


def test_multiply_mismatch(G4, F5):
    G3 = group(3, F5)
    with pytest.raises(DimensionMismatch):
        multiply(G4.one(), G3.one())
    G4_7 = group(4, Field(7))
    with pytest.raises(DimensionMismatch):
        multiply(G4.one(), G4_7.one())


def test_inverse(G4, F5, rng):
    assert invert_unitriangular(G4.one()).is_one()
    for r in G4.rs.roots:
        xi = F5.sample(rng)
        assert G4.invert(G4.elem(r, xi)) == G4.elem(r, -xi)
    for _ in range(25):
        a = G4.random_element(rng)
        assert (a * a.inv()).is_one()
        assert a.inv().inv() == a


def test_commutator_examples(G4, F5, rng):
    a = G4.random_element(rng)
    assert commutator(a, a).is_one()
    rs = G4.rs
    T = G4.constants
    a1, a2 = rs.simple[0], rs.simple[1]
    xi, zeta = F5.embed(2), F5.embed(3)
    expect = G4.elem(rs.root(1, 3), F5.embed(T.n1(a1, a2)) * xi * zeta)
    assert commutator(G4.elem(a1, xi), G4.elem(a2, zeta)) == expect
    # short + short = long carries the factor 2
    sa, sb = rs.root(1, 2), rs.root(1, -2)
    c = T.n1(sa, sb)
    assert abs(c) == 2
    expect = G4.elem(rs.alpha_max, F5.embed(c) * xi * zeta)
    assert commutator(G4.elem(sa, xi), G4.elem(sb, zeta)) == expect


def test_steinberg_relations_all_pairs(G4, F5, rng):
    roots = G4.rs.roots
    for a in roots:
        for b in roots:
            if a is b:
                continue
            for _ in range(5):
                xi, zeta = F5.sample(rng), F5.sample(rng)
                assert steinberg_holds(G4, a, b, xi, zeta), (a, b, xi, zeta)


def test_steinberg_relations_extension_spot(G4_25, F25, rng):
    roots = G4_25.rs.roots
    for _ in range(150):
        a, b = rng.choice(roots), rng.choice(roots)
        if a is b:
            continue
        assert steinberg_holds(G4_25, a, b, F25.sample(rng), F25.sample(rng))


def test_torus(G4, F5, rng):
    one = F5.one
    t = G4.torus([one, one, one, one])
    a = G4.random_element(rng)
    assert t.conjugate(a) == a
    assert G4.is_symplectic(t.matrix_arr())

    t = G4.torus([F5.embed(2), one, one, one])
    assert t.conjugate(G4.elem(G4.rs.root(1, 2), one)) == G4.elem(G4.rs.root(1, 2), F5.embed(2))
    assert t.conjugate(G4.elem(G4.rs.root(1, -1), one)) == G4.elem(G4.rs.root(1, -1), F5.embed(4))
    assert G4.is_symplectic(t.matrix_arr())

    # generic scaling law: e_i - e_j by t_i/t_j, e_i + e_j by t_i t_j, 2e_i by t_i^2
    tv = [F5.sample_nonzero(rng) for _ in range(4)]
    t = torus_elem(tv)
    for r in G4.rs.roots:
        if r.is_long:
            scale = tv[r.i - 1] * tv[r.i - 1]
        elif r.j > 0:
            scale = tv[r.i - 1] / tv[r.j - 1]
        else:
            scale = tv[r.i - 1] * tv[-r.j - 1]
        xi = F5.sample(rng)
        assert t.conjugate(G4.elem(r, xi)) == G4.elem(r, scale * xi)

    with pytest.raises(ZeroTorusEntry):
        G4.torus([F5.zero, one, one, one])


def test_normal_form_basics(G4, F5):
    assert len(normal_form(G4.one())) == 0
    for r in G4.rs.roots:
        w = normal_form(G4.elem(r, F5.embed(2)))
        assert [(t[0], t[1]) for t in w] == [(r, F5.embed(2))]
    a2a1 = G4.elem(G4.rs.simple[1], F5.one) * G4.elem(G4.rs.simple[0], F5.one)
    w = normal_form(a2a1)
    assert w.support() == {G4.rs.simple[0], G4.rs.simple[1], G4.rs.root(1, 3)}
    reorder = w.coeff(G4.rs.root(1, 3))
    assert reorder == F5.embed(-G4.constants.n1(G4.rs.simple[0], G4.rs.simple[1]))


def test_normal_form_roundtrip(G4, rng):
    for _ in range(200):
        a = G4.random_element(rng)
        w = G4.normal_form(a)
        assert w.is_canonical()
        assert word_to_matrix(w) == a


def test_normal_form_roundtrip_extension(G4_25, rng):
    for _ in range(60):
        a = G4_25.random_element(rng)
        assert word_to_matrix(G4_25.normal_form(a)) == a


def test_word_order_matters(G4, F5):
    a1, a2 = G4.rs.simple[0], G4.rs.simple[1]
    w_fwd = [(a1, F5.one), (a2, F5.one)]
    w_rev = [(a2, F5.one), (a1, F5.one)]
    assert G4.word_to_matrix(w_fwd) != G4.word_to_matrix(w_rev)


def test_normal_form_rejects_bad_matrix(G4):
    arr = G4.one().arr.copy()
    arr[0, 1, 0] = 1  # missing mirror entry: not symplectic
    bad = type(G4.one())(G4, arr)
    with pytest.raises(NotInGroup):
        G4.normal_form(bad)
    arr2 = G4.one().arr.copy()
    arr2[3, 2, 0] = 1  # below diagonal
    with pytest.raises(NotInGroup):
        G4.normal_form(type(G4.one())(G4, arr2))


def test_filtration_level(G4, F5, rng):
    assert filtration_level(G4.one()) == 8
    assert filtration_level(G4.elem(G4.rs.alpha_max, F5.one)) == 7
    for r in G4.rs.roots:
        assert filtration_level(G4.elem(r, F5.one)) == r.height
    for _ in range(30):
        i = rng.randrange(1, 8)
        j = rng.randrange(1, 8)
        a = G4.random_element(rng, min_height=i)
        b = G4.random_element(rng, min_height=j)
        assert filtration_level(commutator(a, b)) >= min(i + j, 8)


def mirror_symmetric(G, a, i, s):
    """a_{i,i+s} = -eps_i eps_{i+s} a_{2n+1-(i+s),2n+1-i}, indices 1-based."""
    n, d = G.n, G.d
    eps = lambda t: 1 if t <= n else -1
    lhs = a.entry(i - 1, i + s - 1)
    rhs = a.entry(d - (i + s), d - i)
    return lhs == -eps(i) * eps(i + s) * rhs


def test_symmetry_of_zeros_row_hypothesis(G4, rng):
    # the per-row form: zero prefix in row i (or zero suffix in column i+s
    # of the inverse) forces the +- symmetry at (i, i+s)
    d = 8
    checked = 0
    for _ in range(300):
        a = G4.random_element(rng, min_height=rng.choice([1, 1, 1, 2, 3]))
        ainv = a.inv()
        for s in range(1, d):
            for i in range(1, d - s + 1):
                row_zero = all(not a.entry(i - 1, i + k - 1) for k in range(1, s))
                col_zero = all(not ainv.entry(i + k - 1, i + s - 1) for k in range(1, s))
                if row_zero or col_zero:
                    assert mirror_symmetric(G4, a, i, s), (i, s)
                    checked += 1
    assert checked > 1000


def test_symmetry_of_zeros_on_filtration(G4, rng):
    # for s >= 3 every element of level >= s-1 is symmetric on diagonal s;
    # level >= s works for every s
    d = 8
    for s in range(3, 8):
        for _ in range(40):
            a = G4.random_element(rng, min_height=s - 1)
            for i in range(1, d - s + 1):
                assert mirror_symmetric(G4, a, i, s)
    for s in range(1, 8):
        for _ in range(20):
            a = G4.random_element(rng, min_height=s)
            for i in range(1, d - s + 1):
                assert mirror_symmetric(G4, a, i, s)


def test_symmetry_of_zeros_fails_at_s2_level1(G4, rng):
    # the corollary's literal s = 2 case is false: a level-1 element keeps
    # the middle term a_{i,i+1} a'_{i+1,i+2}
    broken = 0
    for _ in range(50):
        a = G4.random_element(rng, min_height=1)
        if not all(mirror_symmetric(G4, a, i, 2) for i in range(1, 7)):
            broken += 1
    assert broken > 0


def test_center(G4, F5, rng):
    # commutes with 50 random elements iff support is {alpha_max}
    probes = [G4.random_element(rng) for _ in range(50)]

    def commutes_with_all(a):
        return all(commutator(a, b).is_one() for b in probes)

    for xi in F5.elements():
        assert commutes_with_all(G4.elem(G4.rs.alpha_max, xi))
    noncentral = 0
    for _ in range(30):
        a = G4.random_element(rng)
        sup = G4.normal_form(a).support()
        central = sup <= {G4.rs.alpha_max}
        assert commutes_with_all(a) == central
        noncentral += not central
    assert noncentral > 0


def test_in_P_i_k_basics(G4, F5):
    e = G4.one()
    for i in range(1, 8):
        for k in range(1, 5):
            assert in_P_i_k(e, i, k)
    a1 = G4.elem(G4.rs.simple[0], F5.one)
    assert in_P_i_k(a1, 1, 1)
    assert not in_P_i_k(a1, 1, 2)
    a4 = G4.elem(G4.rs.simple[3], F5.one)
    assert in_P_i_k(a4, 1, 4)
    with pytest.raises(BadIndices):
        in_P_i_k(e, 0, 1)
    with pytest.raises(BadIndices):
        in_P_i_k(e, 8, 1)
    with pytest.raises(BadIndices):
        in_P_i_k(e, 1, 0)


def centralizer_support_of_filtration(G, m):
    """Roots b with b + g never a root for any root g of height >= m."""
    rs = G.rs
    tall = [g for g in rs.roots if g.height >= m]
    return {b for b in rs.roots if all(rs.sum(b, g) is None for g in tall)}


@pytest.mark.parametrize("i,k", [(i, k) for i in range(1, 8) for k in range(1, 5)])
def test_P_i_k_centralizer_identity(G4, F5, rng, i, k):
    """P^i_k = (C(Up^(2n+1-i-k)) * Up^(i+1)) cap Up^(i), except the degenerate
    corner i = 2n-1, k >= 2 where the right side is strictly larger."""
    n, d = 4, 8
    rs = G4.rs
    m = 2 * n + 1 - i - k
    S = centralizer_support_of_filtration(G4, m)
    allowed = {r for r in rs.of_height.get(i, ()) if all(r.m[t] == 0 for t in range(k - 1))}
    from_centralizer = {r for r in rs.of_height.get(i, ()) if r in S}
    if i == d - 1 and k >= 2:
        assert allowed == set() and from_centralizer == set(rs.of_height[i])
        return
    assert allowed == from_centralizer
    # matrix-level: height-i part of a member centralizes Up^(m) exactly
    for _ in range(5):
        terms = [(r, F5.sample(rng)) for r in allowed]
        tail = G4.random_element(rng, min_height=i + 1)
        a = G4.product_of_gens(terms) * tail
        assert G4.in_P_i_k(a, i, k)
        c = G4.product_of_gens(terms)
        for _ in range(10):
            g = G4.random_element(rng, min_height=max(m, 1))
            assert commutator(c, g).is_one()


def test_P_1_3_without_padding_fails(G4, F5):
    """The same identity with no Up^(i+1) padding is false: a height-2
    element of P^1_3 need not centralize Up^(2n-3)."""
    a = G4.elem(G4.rs.root(1, 3), F5.one)
    assert G4.in_P_i_k(a, 1, 3)
    g = G4.elem(G4.rs.root(1, -3), F5.one)  # height 2n-3 = 5
    assert g.group.filtration_level(g) == 5
    assert not commutator(a, g).is_one()


def test_in_U1(G4, F5, rng):
    for _ in range(20):
        a = G4.random_u1(rng)
        assert G4.in_U1(a)
        sup = G4.normal_form(a).support()
        assert all(r.m[0] >= 1 for r in sup)
    a2 = G4.elem(G4.rs.simple[1], F5.one)
    assert not G4.in_U1(a2)
    for _ in range(10):
        b = G4.random_u1(rng, min_height=2)
        assert G4.in_U1_level2(b)
    assert not G4.in_U1_level2(G4.elem(G4.rs.simple[0], F5.one))


def test_uniform_words_cover_group(G4, rng):
    # normal-form coordinates of random elements look unconstrained
    seen01 = set()
    for _ in range(40):
        a = G4.random_element(rng)
        seen01.add(int(a.arr[0, 1, 0]))
    assert seen01 == {0, 1, 2, 3, 4}


def test_matrix_serialization(G4, rng):
    a = G4.random_element(rng)
    data = a.to_json()
    assert G4.matrix_from_json(data) == a
    w = G4.normal_form(a)
    assert G4.word_to_matrix(G4.word_from_json(w.to_json())) == a


def test_spec_wrappers(F5, rng):
    rs = group(4, F5).rs
    m = elem_unipotent(rs.root(2, 3), F5.embed(2))
    assert m.entry(1, 2) == F5.embed(2)
    assert m.group is group(4, F5)
