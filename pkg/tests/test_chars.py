from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rmspectrum import chars as ch
from rmspectrum.ff import gf
from rmspectrum.ideals import brute_all_ideals
from rmspectrum.quotring import ideal_span, ring_make, whole_ring

LISTED = [(2, 1, 2), (2, 1, 3), (3, 1, 2), (2, 2, 2), (4, 1, 2), (3, 2, 2)]


def R(q, v, n):
    return ring_make(gf(q), v, n)


def psi(ring, lam):
    return ch.AdditiveChar(ring, lam)


# additive characters ----------------------------------------------------


@pytest.mark.parametrize("q", [2, 3, 4, 5, 8, 9])
def test_field_has_q_additive_characters(q):
    r = R(q, 1, 1)
    chars = ch.additive_chars(r)
    assert len(chars) == q and chars[0].is_trivial()


def test_f2_dual_numbers_characters_are_signs():
    r = R(2, 1, 2)
    chars = ch.additive_chars(r)
    assert len(chars) == 4
    E = r.all_elements()
    for c in chars:
        vals = c(E)
        assert np.allclose(np.abs(vals.imag), 0) and set(np.round(vals.real).astype(int)) <= {1, -1}


@pytest.mark.parametrize("qvn", [(2, 1, 3), (4, 1, 2), (3, 2, 2), (2, 2, 3)])
def test_additive_orthogonality_and_distinctness(qvn):
    r = R(*qvn)
    E = r.all_elements()
    phases = ch.additive_phases(r, E, E)
    vals = ch.root_of_unity(phases, r.ctx.p)
    sums = vals.sum(axis=1)
    assert abs(sums[0] - r.size) < 1e-9 and np.allclose(sums[1:], 0, atol=1e-8)
    assert len({row.tobytes() for row in phases}) == r.size


@settings(max_examples=30, deadline=None)
@given(qvn=st.sampled_from([(3, 2, 2), (4, 2, 2), (9, 1, 2)]), seed=st.integers(0, 2**32 - 1))
def test_additive_homomorphism(qvn, seed):
    r = R(*qvn)
    rng = np.random.default_rng(seed)
    lam, a, b = (rng.integers(0, r.q, size=r.dim) for _ in range(3))
    c = psi(r, lam)
    assert (c.phase(r.add(a, b)) - c.phase(a) - c.phase(b)) % r.ctx.p == 0
    s = rng.integers(0, r.q, size=r.dim)
    assert c.shift(s).phase(a) == c.phase(r.mul(a, s))


def test_k_psi_examples():
    r = R(2, 1, 2)
    assert ch.k_psi(psi(r, [0, 0])) == whole_ring(r)
    assert ch.k_psi(psi(r, [1, 0])) == ideal_span(r, [r.variable(0)])
    assert ch.k_psi(psi(r, [0, 1])).dim == 0


@pytest.mark.parametrize("qvn", [(2, 1, 3), (3, 1, 2), (2, 2, 2), (4, 1, 2), (2, 2, 3)])
def test_k_psi_is_the_largest_ideal_in_the_kernel(qvn):
    r = R(*qvn)
    ideals = brute_all_ideals(r)
    E = r.all_elements()
    for lam in E:
        c = psi(r, lam)
        K = ch.k_psi(c)
        assert K == ch.k_psi_brute(c)
        inside = [I for I in ideals if np.all(c.phase(I.elements()) == 0)]
        assert all(K.contains_ideal(I) for I in inside) and K in inside


def test_g_value_examples():
    r = R(2, 1, 2)
    for lam in r.all_elements():
        assert ch.g_value(psi(r, lam), r.zero()) == r.unit_count
    assert ch.g_value(psi(r, [0, 1]), r.variable(0)) == 0


def test_g_table_matches_g_value():
    r = R(3, 1, 2)
    E = r.all_elements()
    T = ch.g_table(r, E, E)
    for i, lam in enumerate(E):
        for j, c in enumerate(E):
            assert T[i, j] == ch.g_value(psi(r, lam), c)


def test_kernel_lemma_frozen_counts():
    # failures of g(psi, c) = ((p-1)|R|/p)[c in K_psi] over all c / c - 1 for units c / the maximal ideal
    expected = {
        (2, 1, 2): (0, 0, 0),
        (2, 1, 3): (8, 8, 8),
        (3, 1, 2): (18, 18, 0),
        (2, 2, 2): (0, 0, 0),
    }
    for qvn, (_, shift, maximal) in expected.items():
        rep = ch.verify_kernel_lemma(R(*qvn))
        assert rep["unit_shift"]["failures"] == shift
        assert rep["maximal_ideal"]["failures"] == maximal
    # with c = 0 allowed, q != p fails at once: g(psi, 0) = |R_x| != (p-1)|R|/p
    r = R(4, 1, 2)
    assert ch.g_value(psi(r, [1, 0]), r.zero()) == 12 != (2 - 1) * 16 // 2


def test_kernel_lemma_all_c_counts():
    got = {qvn: ch.verify_kernel_lemma(R(*qvn))["all"]["failures"] for qvn in LISTED}
    assert got == {(2, 1, 2): 4, (2, 1, 3): 32, (3, 1, 2): 36, (2, 2, 2): 24, (4, 1, 2): 240, (3, 2, 2): 432}


# unit group and multiplicative characters --------------------------------


def test_unit_group_examples():
    for q in [2, 3, 4, 5, 7, 8, 9]:
        g = ch.unit_group_decompose(R(q, 1, 1))
        assert sorted(g.orders) == [q - 1] or (q == 2 and g.size == 1)
    g = ch.unit_group_decompose(R(2, 1, 2))
    assert g.orders == (2,) and g.size == 2
    g = ch.unit_group_decompose(R(2, 1, 3))
    assert g.orders == (4,)
    r = R(2, 1, 3)
    assert g.element_order(r.element([1, 1, 0]).coeffs) == 4


@pytest.mark.parametrize("qvn", LISTED + [(2, 2, 3), (5, 1, 3), (3, 1, 4)])
def test_unit_group_exact(qvn):
    r = R(*qvn)
    g = ch.unit_group_decompose(r)
    assert int(np.prod(g.orders)) == r.unit_count
    # dlog is a bijection onto the exponent box and a homomorphism
    assert len({tuple(row) for row in g.dlog.tolist()}) == g.size
    rng = np.random.default_rng(0)
    for _ in range(20):
        i, j = rng.integers(0, g.size, size=2)
        prod = r.mul(g.units[i], g.units[j])
        assert np.array_equal(g.log(prod), (g.dlog[i] + g.dlog[j]) % np.array(g.orders))


@pytest.mark.parametrize("qvn", [(2, 1, 3), (3, 1, 2), (2, 2, 2), (4, 1, 2)])
def test_mult_char_duality_and_orthogonality(qvn):
    r = R(*qvn)
    g = ch.unit_group_decompose(r)
    chars = ch.mult_chars(g)
    assert len(chars) == r.unit_count and chars[0].is_trivial()
    vals = ch.root_of_unity(ch.mult_phase_table(g, chars), g.L)
    sums = vals.sum(axis=1)
    assert abs(sums[0] - g.size) < 1e-9 and np.allclose(sums[1:], 0, atol=1e-8)
    a, b = chars[1], chars[-1]
    u, w = g.units[1], g.units[-1]
    assert np.isclose(a(r.mul(u, w)), a(u) * a(w))
    assert np.isclose((a * b)(u), a(u) * b(u))
    assert np.isclose(a(r.one().coeffs), 1)


def test_mult_chars_with_constraints():
    r = R(2, 1, 3)
    I = ideal_span(r, [r.monomial((2,))])
    assert len(ch.mult_chars(r, trivial_on_scalars=True, trivial_on_one_plus=I)) == 2
    assert len(ch.mult_chars(R(5, 1, 1), trivial_on_scalars=True)) == 1


# Gauss sums -----------------------------------------------------------------


def test_gauss_examples_f2_dual_numbers():
    r = R(2, 1, 2)
    g = ch.unit_group_decompose(r)
    chi = ch.MultChar(g, (1,))
    G = ch.gauss_sum(chi, psi(r, [0, 1]))
    assert np.isclose(G, 2) and np.isclose(abs(G) ** 2, r.size * ch.k_psi(psi(r, [0, 1])).size)
    assert np.isclose(ch.gauss_sum(chi, psi(r, [1, 0])), 0)


@pytest.mark.parametrize("q", [3, 4, 5, 7, 8, 9])
def test_classical_gauss_magnitude(q):
    r = R(q, 1, 1)
    g = ch.unit_group_decompose(r)
    for chi in ch.mult_chars(g)[1:]:
        for lam in r.all_elements()[1:]:
            assert np.isclose(abs(ch.gauss_sum(chi, psi(r, lam))) ** 2, q)


def test_gauss_matrix_matches_direct():
    r = R(3, 2, 2)
    g = ch.unit_group_decompose(r)
    chars = ch.mult_chars(g)[:7]
    lams = r.all_elements()[:9]
    M = ch.gauss_matrix(g, chars, lams)
    for a, chi in enumerate(chars):
        for b, lam in enumerate(lams):
            assert np.isclose(M[a, b], ch.gauss_sum(chi, psi(r, lam)))
    assert np.all(np.abs(M) <= r.unit_count + 1e-9)


def test_gauss_formula_counterexample_f2_cubic():
    # R = F_2[x]/(x^3), R_x = <1 + x> of order 4; lam = (0, 0, 1) has K_psi = 0
    r = R(2, 1, 3)
    g = ch.unit_group_decompose(r)
    p = psi(r, [0, 0, 1])
    assert ch.k_psi(p).dim == 0
    gen = g.log(r.element([1, 1, 0]).coeffs)
    # character of order 2: value -1 on the generator
    chi = ch.MultChar(g, tuple(2 * int(x) for x in gen))
    assert np.isclose(chi(r.element([1, 1, 0]).coeffs), -1)
    assert np.isclose(ch.gauss_sum(chi, p), 0)  # the magnitude formula predicts |G|^2 = 8


def test_gauss_formula_counterexample_f3_dual_numbers():
    # chi = sign on F_3^*, trivial on 1 + xF_3; psi(a + bx) = w^b; the b-sum vanishes
    r = R(3, 1, 2)
    g = ch.unit_group_decompose(r)
    sign = [c for c in ch.mult_chars(g, trivial_on_one_plus=ideal_span(r, [r.variable(0)])) if not c.is_trivial()]
    assert len(sign) == 1
    p = psi(r, [0, 1])
    assert ch.k_psi(p).dim == 0
    assert abs(ch.gauss_sum(sign[0], p)) < 1e-12  # predicted 9


def test_gauss_failure_counts_frozen():
    got = {qvn: ch.verify_gauss_formula(R(*qvn))["failures"] for qvn in LISTED}
    assert got == {(2, 1, 2): 0, (2, 1, 3): 4, (3, 1, 2): 6, (2, 2, 2): 0, (4, 1, 2): 24, (3, 2, 2): 24}


def test_gauss_magnitude_near_integer():
    r = R(4, 1, 2)
    rep = ch.verify_gauss_formula(r, all_rows=True)
    G2 = np.array([row["G2"] for row in rep["failed_pairs"]])
    assert len(G2) == rep["pairs"]
    assert np.allclose(G2, np.round(G2), atol=1e-8)


# additive counting by kernel --------------------------------------------------


def test_additive_count_examples():
    rep = ch.verify_additive_count(R(2, 1, 2))
    zero = [row for row in rep["rows"] if row["dim"] == 0][0]
    assert zero["predicted"] == "2" and zero["observed"] == 2
    full = [row for row in rep["rows"] if row["codim"] == 0][0]
    assert full["observed"] == 1
    rep = ch.verify_additive_count(R(3, 1, 2))
    x = [row for row in rep["rows"] if row["dim"] == 1][0]
    assert x["predicted"] == "2" and x["observed"] == 2


@pytest.mark.parametrize("qvn", [(2, 1, 3), (2, 2, 2), (3, 2, 2), (4, 1, 3), (2, 3, 2)])
def test_additive_count_holds(qvn):
    rep = ch.verify_additive_count(R(*qvn))
    assert rep["holds"] and rep["complete_ideal_list"]


# character tuples ----------------------------------------------------------------


def test_tuple_count_examples():
    G = ch.AbelianGroup([2, 2])
    full, triv = G.elements(), G.subgroup([])
    r = ch.char_tuple_count(G, [full], full, (0, 0))
    assert r["count"] == 1 and r["holds"]
    r = ch.char_tuple_count(G, [triv, triv], full, (0, 0))
    assert r["count"] == 4 and r["formula"] == Fraction(4)
    assert ch.char_tuple_count_literal(G, [triv, triv], full, (0, 0)) == 4
    r = ch.char_tuple_count(G, [triv, triv], full, (1, 0))
    assert r["count"] == 4  # K = G here, so H cap K = H and chi restricted to H is unconstrained
    Z4 = ch.AbelianGroup([4])
    r = ch.char_tuple_count(Z4, [Z4.subgroup([[2]])], Z4.elements(), (1,))
    assert r["count"] == 0 and r["formula"] == 0


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_tuple_count_closed_form(seed):
    G, subs, H, chi = ch.random_tuple_instance(np.random.default_rng(seed), max_size=64)
    r = ch.char_tuple_count(G, subs, H, chi)
    assert r["holds"]
    if G.size ** len(subs) <= 4096:
        assert ch.char_tuple_count_literal(G, subs, H, chi) == r["count"]


# unit statistics --------------------------------------------------------------


def test_orders_of_linear_factors():
    u = ch.unit_statistics(R(2, 1, 3))
    assert u["orders"] == {1: 4} and u["claimed_order"] == 4
    u = ch.unit_statistics(R(2, 1, 2))
    assert u["orders"] == {1: 2}
    # odd q: ord(x - a) = p^ceil(log_p n) * ord(-a)
    u = ch.unit_statistics(R(3, 1, 2))
    assert u["orders"] == {1: 6, 2: 3} and u["claimed_order"] == 3
    assert u["projective_match"] and u["one_minus_match"] and not u["orders_match"]
    u = ch.unit_statistics(R(4, 1, 2))
    assert u["orders"] == {1: 2, 2: 6, 3: 6} and u["claimed_order"] == 2


@pytest.mark.parametrize("qvn", LISTED)
def test_mean_character_sum_bound(qvn):
    r = R(*qvn)
    for l in range(r.v):
        u = ch.unit_statistics(r, l)
        assert u["mean_holds"] and u["projective_match"] and u["one_minus_match"]


def test_p_independence_q5():
    r = R(5, 1, 3)
    rep = ch.p_independence_check(r, kmax=2)
    assert rep["holds"] and rep["checked"] > 0


def test_tuple_probability_fraction_rows_frozen():
    # (n0, |T0|) rows where the empirical fraction exceeds the probability bound
    rep = ch.verify_tuple_probability(R(3, 1, 3), k=2, max_ideals=4)
    assert [(r["n0"], r["max_fraction"], r["holds"]) for r in rep["rows"]] == [
        (0, "1", False),
        (1, "1/3", True),
        (2, "1/9", True),
    ]
    # the maximal ideal makes every constrained character trivial
    rep = ch.verify_tuple_probability(R(5, 1, 3), k=2, max_ideals=8)
    assert [r["max_fraction"] for r in rep["rows"]] == ["1", "1/5", "1/25"]
    assert [r["holds"] for r in rep["rows"]] == [False, False, True]


def test_tuple_probability_failure_counts():
    got = {}
    for qvn in [(2, 1, 3), (2, 2, 3), (3, 2, 2)]:
        rows = ch.verify_tuple_probability(R(*qvn), k=2, max_ideals=8)["rows"]
        got[qvn] = (len(rows), sum(not r["holds"] for r in rows))
    assert got == {(2, 1, 3): (3, 2), (2, 2, 3): (24, 18), (3, 2, 2): (15, 9)}
