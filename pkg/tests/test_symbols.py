import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from eqbirat.groups import FinAbGroup, automorphisms, cyclic, parse_group
from eqbirat.linalg import Cokernel, in_row_space, rank_mod_p, rank_rational
from eqbirat.symbols import (
    antisymmetry_relations,
    apply_automorphism,
    blowup_relations,
    enumerate_symbols,
    general_blowup_relations,
    permute_rows,
    relations,
)

import oracles


def cyc(N, n, **kw):
    return enumerate_symbols(cyclic(N), n, **kw)


def listed(B):
    return [tuple(x[0] for x in B.symbol(i)) for i in range(B.size)]


def test_c3_symbols():
    assert listed(cyc(3, 2)) == [(0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]


def test_c4_symbols():
    assert listed(cyc(4, 2)) == [(0, 1), (0, 3), (1, 1), (1, 2), (1, 3), (2, 3), (3, 3)]


def test_symbol_counts():
    assert cyc(8, 3).size == 100
    assert cyc(8, 3, admissible=False).size == 120
    assert cyc(36, 4, admissible=False).size == 82251
    assert cyc(36, 4).size == 75027


@pytest.mark.parametrize("factors,n", [((6,), 2), ((2, 2), 3), ((2, 4), 2), ((5,), 3), ((3, 3), 2)])
def test_basis_matches_oracle(factors, n):
    B = enumerate_symbols(FinAbGroup(factors), n)
    assert [B.symbol(i) for i in range(B.size)] == oracles.symbols(B.group.invariant_factors, n)


def test_index_bijection():
    B = cyc(12, 3)
    for i in range(B.size):
        s = B.symbol(i)
        assert B.index(list(reversed(s))) == i
    with pytest.raises(KeyError):
        B.index([(2,), (4,), (6,)])


def test_c2_relations():
    B = cyc(2, 2)
    rows = blowup_relations(B).row_dicts()
    one1 = B.index([(1,), (1,)])
    zero1 = B.index([(0,), (1,)])
    # [1,1] = [0,1]; the row from [0,1] reads [0,1] = [0,1] + [1,1]
    assert {one1: 1, zero1: -1} in rows
    assert {one1: -1} in rows or {one1: 1} in rows
    assert rank_rational(blowup_relations(B)) == 2


def test_c3_relations():
    B = cyc(3, 2)
    e = {B.symbol(i)[0][0] * 10 + B.symbol(i)[1][0]: i for i in range(B.size)}
    rows = blowup_relations(B).row_dicts()
    # [1,2] = [1,1] + [2,2]
    assert {e[12]: 1, e[11]: -1, e[22]: -1} in rows
    assert B.size - rank_rational(blowup_relations(B)) == 1


def test_relations_deterministic():
    B = cyc(10, 3)
    a, b = blowup_relations(B), blowup_relations(B)
    assert np.array_equal(a.indptr, b.indptr) and np.array_equal(a.indices, b.indices) and np.array_equal(a.data, b.data)


def test_r2_is_blowup():
    for spec, n in (("C7", 3), ("C2xC4", 2), ("C6", 4)):
        B = enumerate_symbols(parse_group(spec), n)
        assert sorted(map(sorted, (r.items() for r in general_blowup_relations(B, 2).row_dicts()))) == sorted(
            map(sorted, (r.items() for r in blowup_relations(B).row_dicts()))
        )


def _span_contains_all(M, R):
    C = Cokernel(M)
    return all(C.is_zero(r) for r in R.row_dicts())


def test_b3_from_b2_c5():
    B = cyc(5, 3)
    assert _span_contains_all(blowup_relations(B), general_blowup_relations(B, 3))


def test_b4_from_b2_c12():
    B = cyc(12, 4)
    assert _span_contains_all(blowup_relations(B), general_blowup_relations(B, 4))


def test_row_support_bound():
    B = cyc(9, 4)
    for r in (2, 3, 4):
        M = general_blowup_relations(B, r)
        assert np.diff(M.indptr).max() <= r + 1
        assert M.indices.min() >= 0 and M.indices.max() < B.size


@pytest.mark.parametrize("p,dim", [(7, 0), (11, 1)])
def test_minus_dims(p, dim):
    B = cyc(p, 2)
    assert B.size - rank_rational(relations(B, minus=True)) == dim


def test_zero_entry_dies_in_minus():
    B = cyc(9, 3)
    M = relations(B, minus=True)
    for i in range(B.size):
        if (0,) in B.symbol(i):
            assert in_row_space(M, {i: 1})


def test_automorphism_identity_and_negation():
    B = cyc(3, 2)
    perm, signs = apply_automorphism(B, [[1]])
    assert perm.tolist() == list(range(B.size))
    perm, _ = apply_automorphism(B, [[-1]])
    img = {listed(B)[i]: listed(B)[perm[i]] for i in range(B.size)}
    assert img[(1, 1)] == (2, 2) and img[(0, 1)] == (0, 2) and img[(1, 2)] == (1, 2)


@pytest.mark.parametrize("spec,n", [("C5", 2), ("C8", 3), ("C2xC2", 3), ("C2xC4", 2)])
def test_relations_stable_under_automorphisms(spec, n):
    g = parse_group(spec)
    B = enumerate_symbols(g, n)
    for minus in (False, True):
        M = relations(B, minus=minus)
        r0 = rank_mod_p(M, 3)
        for sigma in automorphisms(g):
            perm, _ = apply_automorphism(B, sigma)
            P = permute_rows(M, perm)
            assert rank_mod_p(M.vstack(P), 3) == r0


@pytest.mark.parametrize("factors,n,minus", [((7,), 2, False), ((6,), 3, False), ((2, 2), 2, False), ((2, 4), 2, True), ((5,), 3, True)])
def test_dims_match_oracle(factors, n, minus):
    B = enumerate_symbols(FinAbGroup(factors), n)
    M = relations(B, minus=minus)
    f = B.group.invariant_factors
    assert B.size - rank_rational(M) == oracles.dim_quotient(f, n, minus=minus)
    assert B.size - rank_mod_p(M, 2) == oracles.dim_quotient(f, n, p=2, minus=minus)


def test_full_multiset_basis_gives_same_dims():
    for N, n in ((8, 3), (12, 2), (9, 3)):
        a = cyc(N, n)
        b = cyc(N, n, admissible=False)
        assert a.size - rank_rational(relations(a)) == b.size - rank_rational(relations(b))
        assert a.size - rank_mod_p(relations(a), 2) == b.size - rank_mod_p(relations(b), 2)


def test_antisymmetry_modes():
    B = enumerate_symbols(parse_group("C2xC8"), 2)
    single = B.size - rank_rational(relations(B, minus=True))
    every = B.size - rank_rational(blowup_relations(B).vstack(antisymmetry_relations(B, "all")))
    assert single == 1
    assert every != single


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 40))
def test_b1_is_free_of_rank_phi(N):
    B = cyc(N, 1)
    assert B.size == oracles.euler_phi(N)
    assert blowup_relations(B).nrows == 0


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 14), st.integers(2, 4))
def test_opposite_pairs_vanish(N, n):
    B = cyc(N, n)
    C = Cokernel(relations(B), guard=None)
    for i in range(B.size):
        s = [x for (x,) in B.symbol(i)]
        if any((s[j] + s[k]) % N == 0 and s[j] % N for j in range(n) for k in range(j + 1, n)):
            assert C.is_zero({i: 1})
