import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rmspectrum import mpoly
from rmspectrum.ff import gf
from rmspectrum.mpoly import BoxPolynomial, EvalTable


def poly(q, v, terms):
    return BoxPolynomial.from_terms(gf(q), v, terms)


def horner_table(f):
    """Point-by-point evaluation, independent of the axis transform."""
    ctx, q, v = f.ctx, f.ctx.q, f.v
    out = np.zeros((q,) * v, dtype=np.int64)
    for w in itertools.product(range(q), repeat=v):
        acc = 0
        for e in itertools.product(range(q), repeat=v):
            c = int(f.coeffs[e])
            if c:
                term = c
                for wi, ei in zip(w, e):
                    term = ctx.mul(term, ctx.pow(wi, ei))
                acc = ctx.add(acc, term)
        out[w] = acc
    return out


def all_box(q, v):
    N = q**v
    idx = np.arange(q**N)
    return ((idx[:, None] // q ** np.arange(N)) % q).reshape((-1,) + (q,) * v)


def test_eval_examples():
    f = poly(2, 2, {(0, 0): 1, (1, 1): 1})
    assert mpoly.eval_all(f).values.ravel().tolist() == [1, 1, 1, 0]
    g = poly(2, 2, {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1})
    assert mpoly.eval_all(g).values.ravel().tolist() == [1, 0, 0, 0]
    h = poly(3, 1, {(2,): 1})
    assert mpoly.eval_all(h).values.tolist() == [0, 1, 1]


def test_interpolate_examples():
    ctx = gf(2)
    assert mpoly.interpolate(EvalTable(ctx, 2, np.zeros(4))).is_zero()
    t = EvalTable(ctx, 2, [1, 0, 0, 0])
    assert mpoly.interpolate(t) == poly(2, 2, {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1})


@pytest.mark.parametrize("qv", [(2, 2), (3, 2), (2, 3), (4, 1), (3, 1)])
def test_roundtrip_exhaustive(qv):
    q, v = qv
    ctx = gf(q)
    C = all_box(q, v)
    vals = mpoly.eval_batch(ctx, C, v)
    assert np.array_equal(mpoly.interpolate_batch(ctx, vals, v), C)
    # evaluation is a bijection between boxes and tables
    assert len({x.tobytes() for x in vals}) == len(C)


@settings(max_examples=40, deadline=None)
@given(qv=st.sampled_from([(4, 2), (5, 2), (3, 3), (8, 1), (9, 2)]), seed=st.integers(0, 2**32 - 1))
def test_transform_matches_pointwise(qv, seed):
    q, v = qv
    c = np.random.default_rng(seed).integers(0, q, size=(q,) * v)
    f = BoxPolynomial(gf(q), v, c)
    assert np.array_equal(mpoly.eval_all(f).values, horner_table(f))
    assert mpoly.interpolate(mpoly.eval_all(f)) == f


def test_count_zeroes_examples():
    assert mpoly.count_zeroes(poly(2, 2, {(0, 0): 1})) == 0
    g = poly(2, 2, {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1})
    assert mpoly.count_zeroes(g, include_origin=True) == 3
    f = poly(2, 2, {(0, 0): 1, (1, 1): 1})
    assert mpoly.count_zeroes(f, include_origin=False) == 1


def test_reversal_examples():
    assert mpoly.reversal(poly(2, 2, {(0, 0): 1})) == poly(2, 2, {(1, 1): 1})
    assert mpoly.reversal(poly(2, 2, {(1, 0): 1})) == poly(2, 2, {(0, 1): 1})


@settings(max_examples=30, deadline=None)
@given(qv=st.sampled_from([(2, 2), (3, 2), (4, 2), (5, 1)]), seed=st.integers(0, 2**32 - 1))
def test_reversal_involution_and_definition(qv, seed):
    q, v = qv
    f = BoxPolynomial(gf(q), v, np.random.default_rng(seed).integers(0, q, size=(q,) * v))
    r = mpoly.reversal(f)
    assert mpoly.reversal(r) == f
    for e in itertools.product(range(q), repeat=v):
        assert r.coeffs[e] == f.coeffs[tuple(q - 1 - i for i in e)]


def test_reversal_is_homogenised_inverse_substitution():
    # on the torus, reversal(f)(w) = w^{q-1} f(1/w) = f(1/w) since w^{q-1} = 1
    q, v = 5, 2
    ctx = gf(q)
    f = BoxPolynomial(ctx, v, np.random.default_rng(3).integers(0, q, size=(q, q)))
    rv = mpoly.eval_all(mpoly.reversal(f)).values
    fv = mpoly.eval_all(f).values
    for a in range(1, q):
        for b in range(1, q):
            assert rv[a, b] == fv[ctx.inv(a), ctx.inv(b)]


def test_lagrange_examples():
    assert mpoly.lagrange_basis(gf(2), (0, 0)) == poly(2, 2, {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1})
    assert mpoly.lagrange_basis(gf(3), (0,)) == poly(3, 1, {(0,): 1, (2,): 2})


@pytest.mark.parametrize("qv", [(2, 1), (2, 2), (3, 2), (4, 2), (5, 2), (2, 3), (7, 1), (8, 1), (9, 1)])
def test_lagrange_indicator_and_partition_of_unity(qv):
    q, v = qv
    ctx = gf(q)
    total = BoxPolynomial.zero(ctx, v)
    for c in mpoly.points(q, v):
        P = mpoly.lagrange_basis(ctx, c)
        ind = np.zeros((q,) * v, dtype=np.int64)
        ind[c] = 1
        assert np.array_equal(mpoly.eval_all(P).values, ind)
        total = total + P
    assert total == poly(q, v, {(0,) * v: 1})


def test_prefix_truncate_examples():
    f = poly(2, 2, {(0, 0): 1, (1, 0): 1, (1, 1): 1})
    assert mpoly.prefix_truncate(f, 2).coeffs.tolist() == mpoly.prefix_truncate(poly(2, 2, {(0, 0): 1, (1, 0): 1}), 2).coeffs.tolist()
    t = mpoly.prefix_truncate(f, 1)
    assert t.coeffs.tolist() == [1]
    assert mpoly.low_degree_zero_check(poly(2, 2, {(1, 1): 1}), 2)
    assert not mpoly.low_degree_zero_check(poly(2, 2, {(1, 0): 1}), 2)
    assert mpoly.low_degree_zero_check(BoxPolynomial.zero(gf(2), 2), 3)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), ell=st.integers(1, 5))
def test_prefix_linear(seed, ell):
    q, v = 3, 2
    rng = np.random.default_rng(seed)
    ctx = gf(q)
    f, g = (BoxPolynomial(ctx, v, rng.integers(0, q, size=(q, q))) for _ in range(2))
    lhs = mpoly.prefix_truncate(f + g, ell)
    assert lhs == mpoly.prefix_truncate(f, ell) + mpoly.prefix_truncate(g, ell)
    batch = mpoly.prefix_vectors(ctx, np.stack([f.coeffs, g.coeffs]), v, ell)
    assert np.array_equal(batch[0], mpoly.prefix_truncate(f, ell).coeffs)


@pytest.mark.parametrize("q", [2, 3])
def test_exact_zero_sets_counted(q):
    # #{f in box : f vanishes exactly on Z} = (q-1)^{q^v - |Z|} for every Z in F_q^2 minus 0
    v = 2
    ctx = gf(q)
    C = all_box(q, v)
    vals = mpoly.eval_batch(ctx, C, v).reshape(len(C), -1)
    keys = {}
    for row in vals == 0:
        k = row.tobytes()
        keys[k] = keys.get(k, 0) + 1
    for bits in itertools.product([False, True], repeat=q**v - 1):
        mask = np.array((False,) + bits)
        assert keys.get(mask.tobytes(), 0) == (q - 1) ** (q**v - int(mask.sum()))


def test_bad_size_rejected():
    with pytest.raises(ValueError):
        BoxPolynomial(gf(2), 2, [1, 0, 0])


def test_total_degree():
    assert poly(3, 2, {(2, 1): 1, (0, 1): 2}).total_degree() == 3
    assert BoxPolynomial.zero(gf(3), 2).total_degree() == -1
