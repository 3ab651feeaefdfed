import math
from itertools import combinations

import pytest

from nilnf import Poly, VectorField
from nilnf.poly import normalized_inner
from nilnf.scalar import sqrt_rational
from nilnf.sl2 import (
    JordanType,
    build_triple,
    chain_action,
    chain_norm_formula,
    chain_norm_sq,
    decompose,
    sparse_inner,
)
from nilnf.vfield import lie_bracket

from conftest import triple_for
from oracles import bracket, box_matrix, eigen_multiplicities_match, field_basis, field_coords, gauss_jordan

TYPES = [(2,), (3,), (4,), (2, 2), (2, 3)]


def _vars(n):
    return [Poly.var(n, i) for i in range(n)]


def test_triple_two():
    t = triple_for((2,))
    x, y = _vars(2)
    o = Poly.zero(2)
    assert t.N == VectorField([y, o])
    assert t.Nstar == VectorField([o, x])
    assert t.Hprime == VectorField([x, -y])
    assert t.check_relations()


def test_triple_three():
    t = triple_for((3,))
    x, y, z = _vars(3)
    o = Poly.zero(3)
    s2 = sqrt_rational(2)
    assert t.N == VectorField([y.scale(s2), z.scale(s2), o])
    assert t.Hprime == VectorField([x.scale(2), o, z.scale(-2)])
    assert t.check_relations()


def test_unscaled_pair_fails_relation():
    x, y, z = _vars(3)
    o = Poly.zero(3)
    N = VectorField([y, z, o])
    Ns = VectorField([o, x, y])
    Hp = bracket(Ns, N)
    assert bracket(Hp, Ns) == Ns
    assert bracket(Hp, Ns) != Ns.scale(2)


@pytest.mark.parametrize("blocks", TYPES)
def test_relations_every_type(blocks):
    t = triple_for(blocks)
    assert t.check_relations()
    assert t.check_ad_relations(2)
    assert t.hprime_is_diagonal()
    # N* is the transpose of N
    A = t.N.linear_matrix()
    B = t.Nstar.linear_matrix()
    n = t.n
    assert all(A[i][j] == B[j][i] for i in range(n) for j in range(n))


@pytest.mark.parametrize("blocks", TYPES)
def test_L_conjugates_standard_form(blocks):
    assert triple_for(blocks).check_L()


def test_block_size_one_rejected():
    with pytest.raises(ValueError):
        JordanType((1,))
    with pytest.raises(ValueError):
        build_triple((3, 1))


def test_poly_linear_forms_three():
    t = triple_for((3,))
    dec = decompose(t, "poly", 1)
    assert dec.weights() == [2]
    b0 = dec.chain_vector(0, 0)
    assert set(b0.terms) == {(1, 0, 0)}


def test_poly_degree_two_in_two_variables():
    dec = decompose(triple_for((2,)), "poly", 2)
    assert dec.weights() == [2]
    assert dec.dim == 3


@pytest.mark.parametrize("blocks", TYPES)
@pytest.mark.parametrize("space,k", [("poly", 0), ("poly", 1), ("poly", 2), ("poly", 3), ("vf", 1), ("vf", 2)])
def test_dimension_count(blocks, space, k):
    t = triple_for(blocks)
    dec = decompose(t, space, k)
    n = t.n
    dim = math.comb(k + n - 1, n - 1) * (n if space == "vf" else 1)
    assert dec.dim == dim
    assert sum(w + 1 for w in dec.weights()) == dim
    assert all(isinstance(w, int) and w >= 0 for w in dec.weights())


@pytest.mark.parametrize("blocks,k", [((2,), 2), ((2,), 3), ((3,), 2), ((2, 2), 2)])
def test_vf_weights_match_box_spectrum(blocks, k):
    t = triple_for(blocks)
    dec = decompose(t, "vf", k)
    # [N, [N*, .]] acts on v_m by m(lam - m + 1)
    claimed = {}
    for w in dec.weights():
        for m in range(w + 1):
            mu = m * (w - m + 1)
            claimed[mu] = claimed.get(mu, 0) + 1
    assert eigen_multiplicities_match(box_matrix(t, k), claimed)


@pytest.mark.parametrize("blocks,k", [((2,), 2), ((3,), 2), ((2, 2), 1)])
def test_vf_weights_match_h_spectrum(blocks, k):
    t = triple_for(blocks)
    dec = decompose(t, "vf", k)
    keys = field_basis(t.n, k, k)
    cols = [field_coords(bracket(t.Hprime, VectorField.basis_element(a, i)), keys) for a, i in keys]
    M = [[cols[j][r] for j in range(len(keys))] for r in range(len(keys))]
    claimed = {}
    for w in dec.weights():
        for m in range(w + 1):
            claimed[w - 2 * m] = claimed.get(w - 2 * m, 0) + 1
    assert eigen_multiplicities_match(M, claimed)


@pytest.mark.parametrize("blocks,space,k", [((3,), "vf", 2), ((2, 2), "vf", 2), ((4,), "poly", 3)])
def test_chain_action_and_norms(blocks, space, k):
    t = triple_for(blocks)
    dec = decompose(t, space, k)
    for i, ch in enumerate(dec.chains):
        lam = ch.weight
        for m in range(lam + 1):
            cx, tx = chain_action(dec, i, "X", m, t)
            cy, ty = chain_action(dec, i, "Y", m, t)
            ch_, th = chain_action(dec, i, "H", m, t)
            assert cx == m * (lam - m + 1) and (tx == m - 1 if m else tx is None)
            assert ty == (m + 1 if m < lam else None)
            assert ch_ == lam - 2 * m and th == m
            direct = sparse_inner(ch.vectors[m], ch.vectors[m])
            assert chain_norm_sq(dec, i, m) == direct
            assert direct == chain_norm_formula(lam, m) * ch.norms_sq[0]


def test_chain_norm_values():
    dec = decompose(triple_for((3,)), "poly", 1)
    b = dec.chains[0].norms_sq[0]
    assert chain_norm_sq(dec, 0, 1) == 2 * b
    assert chain_norm_sq(dec, 0, 2) == 4 * b
    with pytest.raises(IndexError):
        chain_norm_sq(dec, 0, 3)
    with pytest.raises(IndexError):
        chain_action(dec, 0, "X", 5)


def test_chain_norm_matches_normalized_inner():
    dec = decompose(triple_for((3,)), "poly", 3)
    for i, ch in enumerate(dec.chains):
        for m in range(ch.weight + 1):
            v = dec.chain_vector(i, m)
            assert normalized_inner(v, v, 3) == chain_norm_sq(dec, i, m)


@pytest.mark.parametrize("blocks,space,k", [((3,), "vf", 2), ((2, 3), "vf", 1), ((3,), "poly", 4)])
def test_orthogonality(blocks, space, k):
    dec = decompose(triple_for(blocks), space, k)
    vecs = [v for ch in dec.chains for v in ch.vectors]
    for u, v in combinations(vecs, 2):
        assert sparse_inner(u, v) == 0


@pytest.mark.parametrize("blocks,k", [((3,), 2), ((2, 2), 2), ((4,), 1)])
def test_image_kernel_splitting(blocks, k):
    t = triple_for(blocks)
    keys = field_basis(t.n, k, k)
    im = [field_coords(lie_bracket(t.N, VectorField.basis_element(a, i)), keys) for a, i in keys]
    ker_rows = [field_coords(lie_bracket(t.Nstar, VectorField.basis_element(a, i)), keys) for a, i in keys]
    r_im, _ = gauss_jordan(im)
    M = [[ker_rows[j][r] for j in range(len(keys))] for r in range(len(keys))]
    r_ker_map, _ = gauss_jordan(M)
    dim_ker = len(keys) - r_ker_map
    assert r_im + dim_ker == len(keys)
    dec = decompose(t, "vf", k)
    # primitives span Ker ad_N* and are orthogonal to every Y-image
    assert len(dec.chains) == dim_ker
    for ch in dec.chains:
        b = dec.to_object(ch.vectors[0])
        assert lie_bracket(t.Nstar, b).is_zero()
        for a, i in keys:
            img = lie_bracket(t.N, VectorField.basis_element(a, i))
            assert b.inner(img) == 0


def test_coords_round_trip():
    t = triple_for((3,))
    dec = decompose(t, "vf", 2)
    import random

    rng = random.Random(5)
    vec = {k: rng.randint(-3, 3) for k in dec.basis}
    vec = {k: v for k, v in vec.items() if v}
    back = dec.assemble(dec.coords(vec))
    assert {k: v for k, v in back.items() if v} == {k: v for k, v in vec.items()}
