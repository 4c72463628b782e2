from __future__ import annotations

import itertools

import pytest

from hqft.bimod import (
    NotBalanced, ShapeMismatch, column_row_context, conjugate, conjugate_context, context_from_iso,
    equivalent_contexts, find_equivalence, identity_context, identity_map, induced_map, is_bimodule_map,
    is_compatible, left_multiplication_map, regular, reverse, right_multiplication_map, scaled_map,
    tensor_over, transfer_trace, validate_bimodule, validate_context, with_maps,
)
from hqft.frob import make_frobenius
from hqft.galg import group_algebra, matrix_model, model_trace
from hqft.groups import cyclic, klein, trivial
from hqft.scalars import ONE, ZERO, Matrix, cokernel, kron, mpq, rank, to_scalar


@pytest.fixture(scope="module")
def kz2():
    return group_algebra(cyclic(2))


@pytest.fixture(scope="module")
def col_row():
    return {G.order: column_row_context(group_algebra(G), matrix_model(G, [2])) for G in (trivial(), cyclic(2))}


def _twisted_pair():
    """K = M_2 model over Z/2, L = the same with l_s^2 = 1/4, iso l_s X -> 2 l_s X."""
    G = cyclic(2)
    K = matrix_model(G, [2])
    L = matrix_model(G, [2], tau=lambda g, h: (mpq(1, 4),) if (g, h) == (1, 1) else (1,))
    psi = {0: Matrix.identity(4), 1: Matrix.identity(4).scale(2)}
    return K, L, context_from_iso(K, L, psi)


# tensor products

@pytest.mark.parametrize("A", [group_algebra(klein()), matrix_model(cyclic(2), [1, 2])])
def test_tensor_over_self(A):
    R = regular(A)
    T = tensor_over(R, A, R)
    assert T.module.dims == A.dims
    e = A.e
    assert T.cls(e, A.one(), e, A.one()) == T.cls(e, A.one(), e, A.one())
    # unit maps to unit under multiplication m (x) n -> mn
    for g in A.group.elements:
        for i in range(A.dims[g]):
            x = A.basis(g, i)
            assert T.cls(g, x, e, A.one()) == T.cls(e, A.one(), g, x)


def test_tensor_dimension_formula():
    A = matrix_model(cyclic(2), [1, 2])
    R = regular(A)
    T = tensor_over(R, A, R)
    for g in A.group.elements:
        raw = T.raw_dim(g)
        rel = T.relations[g]
        assert T.module.dims[g] == raw - (rank(rel) if rel.cols else 0)


def test_rows_over_columns(col_row):
    c = col_row[1]
    assert c.VU.module.dims == (1,)
    assert c.UV.module.dims == (4,)


@pytest.mark.parametrize("blocks", [[2], [1, 2]])
def test_strong_grading_tensor_iso(blocks):
    # A_g (x)_{A_e} A_h -> A_gh is an isomorphism; cokernel computed by hand
    A = matrix_model(cyclic(2), blocks)
    G = A.group
    e = G.e
    de = A.dims[e]
    for g, h in itertools.product(G.elements, repeat=2):
        dg, dh = A.dims[g], A.dims[h]
        cols = []
        for i, a, j in itertools.product(range(dg), range(de), range(dh)):
            x, y, t = A.basis(g, i), A.basis(h, j), A.basis(e, a)
            lhs = kron(Matrix.column(A.mul(g, x, e, t)), Matrix.column(y)).col(0)
            rhs = kron(Matrix.column(x), Matrix.column(A.mul(e, t, h, y))).col(0)
            cols.append([p - q for p, q in zip(lhs, rhs)])
        proj, sec = cokernel(Matrix.from_columns(cols, dg * dh))
        assert proj.rows == A.dims[G.mul(g, h)]
        assert rank(A.mult[(g, h)] @ sec) == proj.rows


# induced maps

def test_induced_identity(kz2):
    R = regular(kz2)
    T = tensor_over(R, kz2, R)
    out = induced_map(identity_map(R), identity_map(R), T, T)
    assert all(out[g] == Matrix.identity(T.module.dims[g]) for g in kz2.group.elements)


def test_induced_central_element():
    A = matrix_model(cyclic(2), [1, 2], r=[1, 3])
    z = make_frobenius(A, model_trace([1, 2], [1, 3])).z
    R = regular(A)
    T = tensor_over(R, A, R)
    left = induced_map(right_multiplication_map(R, z), identity_map(R), T, T)
    right = induced_map(identity_map(R), left_multiplication_map(R, z), T, T)
    assert all(left[g] == right[g] for g in A.group.elements)


def test_induced_not_balanced():
    A = matrix_model(trivial(), [2])
    R = regular(A)
    T = tensor_over(R, A, R)
    # a linear map that is not a module map: swap two basis vectors of M_2
    f = {0: Matrix([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])}
    with pytest.raises(NotBalanced):
        induced_map(f, identity_map(R), T, T)


# contexts

@pytest.mark.parametrize("A", [group_algebra(cyclic(2)), group_algebra(klein()),
                               matrix_model(cyclic(2), [1, 2], r=[1, 3])])
def test_identity_context_valid(A):
    rep = validate_context(identity_context(A))
    assert rep.ok, rep.to_json()


@pytest.mark.parametrize("order", [1, 2])
def test_column_row_context_valid(col_row, order):
    rep = validate_context(col_row[order])
    assert rep.ok, rep.to_json()


def test_scaled_mu_breaks_zigzag(kz2):
    c = identity_context(kz2)
    bad = with_maps(c, mu={g: c.mu[g].scale(2) for g in c.mu})
    rep = validate_context(bad)
    assert not rep.ok
    assert {"zigzag-U", "zigzag-V"} & set(rep.failures())


def test_transfer_identity(f_model):
    c = identity_context(f_model.algebra)
    assert transfer_trace(c, f_model.trace) == list(f_model.trace)


@pytest.mark.parametrize("order", [1, 2])
def test_transfer_to_matrix_trace(col_row, order):
    c = col_row[order]
    lam = transfer_trace(c, [1])
    assert lam == [ONE, ZERO, ZERO, ONE]
    assert transfer_trace(reverse(c), lam) == [ONE]


def test_transfer_round_trip_twisted():
    K, L, c = _twisted_pair()
    lam = model_trace([2], [mpq(1, 2)])
    assert transfer_trace(reverse(c), transfer_trace(c, lam)) == lam


def test_compatible_identity(f_model):
    assert is_compatible(identity_context(f_model.algebra), f_model, f_model).ok


def test_compatible_coboundary_twist():
    K, L, c = _twisted_pair()
    assert validate_context(c).ok
    fK = make_frobenius(K, model_trace([2], [1]))
    fL = make_frobenius(L, model_trace([2], [1]))
    assert is_compatible(c, fK, fL).ok
    fL2 = make_frobenius(L, [2 * x for x in model_trace([2], [1])])
    rep = is_compatible(c, fK, fL2)
    assert not rep.ok and "trace" in rep.failures()


def test_compatible_column_row(col_row):
    c = col_row[2]
    fK = make_frobenius(c.K, [1])
    fL = make_frobenius(c.L, transfer_trace(c, [1]))
    assert is_compatible(c, fK, fL).ok


# equivalences

def test_equivalence_identity(kz2):
    c = identity_context(kz2)
    ident = identity_map(c.U)
    assert equivalent_contexts(ident, identity_map(c.V), c, c)


@pytest.mark.parametrize("lam", [2, mpq(-1, 3)])
def test_equivalence_compensating(kz2, lam):
    c = identity_context(kz2)
    assert equivalent_contexts(scaled_map(c.U, to_scalar(lam)), scaled_map(c.V, 1 / to_scalar(lam)), c, c)


def test_equivalence_uncompensated(kz2):
    c = identity_context(kz2)
    assert not equivalent_contexts(scaled_map(c.U, to_scalar(2)), identity_map(c.V), c, c)


def test_find_equivalence_self(col_row):
    c = col_row[2]
    found = find_equivalence(c, c)
    assert found is not None
    assert equivalent_contexts(found[0], found[1], c, c)


def test_bimodule_map_check(kz2):
    R = regular(kz2)
    assert is_bimodule_map(identity_map(R), R, R) is None
    A = matrix_model(trivial(), [2])
    R2 = regular(A)
    x = [to_scalar(v) for v in (0, 1, 0, 0)]
    assert is_bimodule_map(left_multiplication_map(R2, x), R2, R2) is not None


# conjugation

@pytest.mark.parametrize("A", [group_algebra(cyclic(2)), matrix_model(cyclic(2), [2])])
def test_conjugate_involution(A):
    M = regular(A)
    assert conjugate(conjugate(M, strict=False), strict=False) == M


def test_conjugate_regular_commutative(kz2):
    R = regular(kz2)
    assert conjugate(R) == R


def test_conjugate_shape_mismatch():
    c = column_row_context(group_algebra(cyclic(2)), matrix_model(cyclic(2), [2]))
    with pytest.raises(ShapeMismatch):
        conjugate(c.U)


def test_conjugate_context_identity(kz2):
    c = conjugate_context(identity_context(kz2))
    assert validate_context(c).ok


def test_validate_bimodule_regular(f_model):
    assert validate_bimodule(regular(f_model.algebra)).ok
