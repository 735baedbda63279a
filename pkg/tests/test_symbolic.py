import json
import random
from fractions import Fraction

import pytest

from upkit.errors import MismatchAtCoefficient, RankTooSmall
from upkit.field import Field
from upkit.group import group
from upkit.roots import compute_structure_constants, root_system
from upkit.symbolic import (
    SparsePoly,
    SymMatrix,
    check_evaluation_consistency,
    cleanup_factors,
    expansion_text,
    extract_in_order,
    match_coefficient_table,
    parametric_element,
    substitute_matrix,
    sym_commutator,
    sym_gen,
    sym_normal_form,
    tower_roots,
    verify_cleanup_identities,
    verify_tower_expansion,
)

X = SparsePoly.var("x")
Y = SparsePoly.var("y")
Z = SparsePoly.var("z")


def rand_poly(rng):
    p = SparsePoly.const(Fraction(rng.randrange(-4, 5), rng.choice((1, 2, 3, 4, 6))))
    for _ in range(rng.randrange(1, 4)):
        term = SparsePoly.var(rng.choice("xyzw"), rng.randrange(1, 3))
        p = p + term * Fraction(rng.randrange(-3, 4), rng.choice((1, 2, 3)))
    return p


def test_poly_ring_laws(rng):
    zero, one = SparsePoly.zero(), SparsePoly.const(1)
    for _ in range(25):
        p, q, r = rand_poly(rng), rand_poly(rng), rand_poly(rng)
        assert p + q == q + p
        assert (p + q) + r == p + (q + r)
        assert p * q == q * p
        assert (p * q) * r == p * (q * r)
        assert p * (q + r) == p * q + p * r
        assert p + zero == p
        assert p * one == p
        assert (p - p).is_zero


def test_poly_normalization():
    assert (X + (-1) * X).terms == {}
    assert X + X == X * 2
    assert SparsePoly({(("x", 1),): 0}).is_zero
    # exponents consolidate into canonical monomials
    assert X * X == SparsePoly.var("x", 2)


def test_poly_denominator_guard():
    SparsePoly.const(Fraction(5, 6))  # 2*3 is fine
    with pytest.raises(AssertionError):
        SparsePoly.const(Fraction(1, 5))
    with pytest.raises(AssertionError):
        X * Fraction(7, 10)


def test_poly_pow_and_substitute():
    sq = (X + Y) ** 2
    assert sq == SparsePoly.var("x", 2) + 2 * X * Y + SparsePoly.var("y", 2)
    assert sq.substitute("y", SparsePoly.zero()) == SparsePoly.var("x", 2)
    assert sq.substitute("y", X) == 4 * SparsePoly.var("x", 2)
    assert sq.variables() == {"x", "y"}


def test_poly_evaluate_respects_ring_ops(F5, F25, rng):
    for field in (F5, F25):
        for _ in range(10):
            p, q = rand_poly(rng), rand_poly(rng)
            point = {v: field.sample(rng) for v in "xyzw"}
            assert (p + q).evaluate(field, point) == \
                p.evaluate(field, point) + q.evaluate(field, point)
            assert (p * q).evaluate(field, point) == \
                p.evaluate(field, point) * q.evaluate(field, point)
        half = SparsePoly.const(Fraction(1, 2)).evaluate(field, {})
        assert half * field.embed(2) == field.one


def test_poly_text_stable():
    p = SparsePoly.const(Fraction(1, 2)) + 2 * X * Y - Z
    assert p.text() == "1/2 - z + 2*x*y"
    q = 2 * X * Y - Z + SparsePoly.const(Fraction(1, 2))
    assert q.text() == p.text()
    assert SparsePoly.zero().text() == "0"


def test_parametric_empty_is_identity():
    rs = root_system(3)
    assert parametric_element(rs, []) == SymMatrix.identity(6)


def test_parametric_generator_shape():
    rs = root_system(3)
    a1 = rs.root(1, 2)
    m = parametric_element(rs, [(a1, "a1")])
    r, c = a1.pos0
    assert m.rows[r][c] == SparsePoly.var("a1")
    mr, mc = a1.mirror0
    assert m.rows[mr][mc] == SparsePoly.var("a1") * a1.mirror_sign
    others = [(i, j) for i in range(6) for j in range(i + 1, 6)
              if (i, j) not in ((r, c), (mr, mc))]
    assert all(m.rows[i][j].is_zero for i, j in others)


def test_parametric_full_element_first_entry():
    # the six-factor parametric element keeps its lead coefficient visible
    rs = root_system(3)
    a_spec, _, _ = cleanup_factors(rs)
    m = parametric_element(rs, a_spec)
    assert m.rows[0][1] == SparsePoly.var("a1")


def test_sym_matrix_inverse_and_associativity():
    rs = root_system(3)
    a_spec, c_spec, _ = cleanup_factors(rs)
    a = parametric_element(rs, a_spec)
    assert a * a.inverse() == SymMatrix.identity(6)
    g1 = sym_gen(rs, rs.root(1, 2), "s")
    g2 = sym_gen(rs, rs.root(2, 3), "t")
    g3 = parametric_element(rs, c_spec)
    assert (g1 * g2) * g3 == g1 * (g2 * g3)


def test_commutator_with_self_is_identity():
    rs = root_system(3)
    a_spec, _, _ = cleanup_factors(rs)
    a = parametric_element(rs, a_spec)
    assert sym_commutator(a, a) == SymMatrix.identity(6)


def test_commutator_of_composable_short_roots():
    rs = root_system(4)
    N = compute_structure_constants(4, Field(5))
    alpha, beta = rs.root(1, 2), rs.root(2, 3)
    K = sym_commutator(sym_gen(rs, alpha, "s"), sym_gen(rs, beta, "t"))
    nf = sym_normal_form(rs, K)
    assert set(nf) == {rs.root(1, 3)}
    want = SparsePoly.const(N.n1(alpha, beta)) * SparsePoly.var("s") * SparsePoly.var("t")
    assert nf[rs.root(1, 3)] == want


def test_cleanup_first_commutator_support():
    rs = root_system(3)
    a_spec, c_spec, _ = cleanup_factors(rs)
    K = sym_commutator(parametric_element(rs, a_spec),
                       parametric_element(rs, c_spec))
    nf = sym_normal_form(rs, K)
    assert {repr(r) for r in nf} == {"2e1", "e1+e2", "e1+e3"}
    # the lowest of the three rows carries exactly two monomials
    low = nf[rs.root(1, -3)]
    assert {frozenset(dict(m)) for m in low.terms} == \
        {frozenset({"am1122", "c12"}), frozenset({"a1", "cm112"})}


def test_match_tolerates_per_monomial_sign_only():
    rs = root_system(3)
    root = rs.root(1, 2)
    p = 2 * X * Y - Z
    match_coefficient_table("t", root, p, -2 * X * Y - Z)
    match_coefficient_table("t", root, p, 2 * X * Y + Z)
    with pytest.raises(MismatchAtCoefficient, match="z"):
        match_coefficient_table("t", root, p, 2 * X * Y)
    with pytest.raises(MismatchAtCoefficient, match="x\\*y"):
        match_coefficient_table("t", root, p, 3 * X * Y - Z)


def test_extract_in_order_certifies_the_factor_list():
    rs = root_system(3)
    a1, amax = rs.root(1, 2), rs.root(1, -1)
    m = parametric_element(rs, [(a1, "s"), (amax, "t")])
    pairs = extract_in_order(rs, m, [a1, amax])
    assert dict(pairs)[amax] == SparsePoly.var("t")
    with pytest.raises(MismatchAtCoefficient):
        extract_in_order(rs, m, [amax])  # incomplete list cannot close


def test_substitute_matrix_commutes_with_products():
    rs = root_system(3)
    a_spec, c_spec, _ = cleanup_factors(rs)
    a = parametric_element(rs, a_spec)
    c = parametric_element(rs, c_spec)
    zero = SparsePoly.zero()
    lhs = substitute_matrix(a * c.inverse(), "c12", zero)
    rhs = substitute_matrix(a, "c12", zero) * substitute_matrix(c, "c12", zero).inverse()
    assert lhs == rhs


@pytest.mark.parametrize("n", [3, 4])
def test_verify_cleanup_identities(n):
    rep = verify_cleanup_identities(n)
    assert rep["status"] == "pass"
    assert rep["check"] == "cleanup_identities"
    assert [len(rep["support"][k]) for k in ("[a,c]", "[c,b]", "[a,b]c^-1")] == [3, 5, 6]
    assert rep["forced_zero"] == ["am1122", "am112", "cm1122", "cm112", "cm11"]
    assert rep["also_zero"] == ["cm1"]
    assert len(rep["side_relations"]) == 2
    assert any("am112*b12" in note for note in rep["notes"])
    json.dumps(rep)


def test_verify_cleanup_rank_guard():
    with pytest.raises(RankTooSmall):
        verify_cleanup_identities(2)


def test_cleanup_deduction_exercises_the_unit_hypotheses():
    # the chain must divide by 2 and by 3 somewhere, and solve through the
    # invertible lead coefficients; the recorded unit coefficients show it
    units = {abs(s["unit_coefficient"]) for s in verify_cleanup_identities(3)["deduction"]
             if "unit_coefficient" in s}
    assert units == {1, 2, 3}


def test_tower_roots_shape():
    rs = root_system(4)
    T, M = tower_roots(rs)
    assert repr(T[1]) == "e1-e2" and repr(T[4]) == "e1+e4"
    assert repr(M[0]) == "2e1" and repr(M[3]) == "e1+e4"
    assert M[4] == T[3]  # complement of the full tower folds back


def test_tower_ladder_base_case():
    rs = root_system(4)
    N = compute_structure_constants(4, Field(5))
    T, M = tower_roots(rs)
    alpha1 = rs.simple[0]
    K = sym_commutator(sym_gen(rs, alpha1, "xi1"), sym_gen(rs, M[1], "t"))
    nf = sym_normal_form(rs, K)
    assert set(nf) == {M[0]}
    want = (SparsePoly.const(N.n1(alpha1, M[1]))
            * SparsePoly.var("xi1") * SparsePoly.var("t"))
    assert nf[M[0]] == want


@pytest.mark.parametrize("n", [4, 5])
def test_verify_tower_expansion(n):
    rep = verify_tower_expansion(n)
    assert rep["status"] == "pass"
    assert rep["check"] == "tower_expansion"
    assert rep["ladder_depths_checked"] == list(range(1, n))
    rs = root_system(n)
    T, M = tower_roots(rs)
    order = []
    for i in range(2, n):
        order.extend([T[i], M[i - 1]])
    order.extend([T[n], M[0]])
    assert rep["support"] == [repr(r) for r in order]
    json.dumps(rep)


def test_verify_tower_rank_guard():
    with pytest.raises(RankTooSmall):
        verify_tower_expansion(3)


def test_tower_top_row_cross_terms():
    # each middle index contributes one central zeta*eta*xi monomial of
    # absolute coefficient 2 beyond the base table
    rep = verify_tower_expansion(4)
    cross = rep["top_cross_terms"]
    assert "2*eta2*xi2*zeta1" in cross and "2*eta3*xi3*zeta2" in cross
    assert rep["notes"]
    top = rep["expanded"]["2e1"]
    assert "eta2*xi2*zeta1" in top


def test_expansion_text_deterministic():
    rs = root_system(3)
    a_spec, c_spec, _ = cleanup_factors(rs)
    K = sym_commutator(parametric_element(rs, a_spec),
                       parametric_element(rs, c_spec))
    t1 = expansion_text(sym_normal_form(rs, K))
    t2 = expansion_text(sym_normal_form(rs, K))
    assert t1 == t2
    lines = t1.splitlines()
    assert len(lines) == 3
    assert lines[0].startswith("e1+e3:") and lines[-1].startswith("2e1:")


def test_evaluation_consistency_small(F5, G4):
    g3 = group(3, F5)
    assert check_evaluation_consistency(g3, trials=25) == 75
    assert check_evaluation_consistency(G4, trials=10) == 40


def test_evaluation_consistency_extension_field(G4_25):
    assert check_evaluation_consistency(G4_25, trials=5) == 20
