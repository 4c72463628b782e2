from __future__ import annotations

import itertools
import random

import pytest

from hqft.frob import make_frobenius, z_inverse
from hqft.galg import group_algebra, matrix_model, model_element, model_trace
from hqft.gcenter import NotQuasiBiangular, centralizer, g_center, psi, verify_crossed, with_phi
from hqft.groups import cyclic, symmetric, trivial
from hqft.scalars import ONE, Matrix, rank, to_scalar

NAMES = ["kz2", "klein", "model"]


def _axioms(report):
    return {a["id"]: a["pass"] for a in report["axioms"]}


def test_psi_identity_on_group_algebra(f_klein):
    for g in f_klein.algebra.group.elements:
        assert psi(f_klein, [7], g) == [7]


def test_psi_model_projection(f_model):
    # block j: X -> (r_j k_j)^-1 Tr(X) I
    rng = random.Random(3)
    for g in (0, 1):
        for _ in range(5):
            X1 = [[rng.randint(-4, 4)]]
            X2 = [[rng.randint(-4, 4) for _ in range(2)] for _ in range(2)]
            a = model_element([1, 2], [X1, X2])
            t2 = to_scalar(X2[0][0] + X2[1][1]) / 6
            expect = model_element([1, 2], [[[to_scalar(X1[0][0])]], [[t2, 0], [0, t2]]])
            assert psi(f_model, a, g) == expect


@pytest.mark.parametrize("name", NAMES)
def test_psi_z_squared(frobs, name):
    f = frobs[name]
    A = f.algebra
    e = A.e
    z = list(f.z)
    assert psi(f, A.mul(e, z, e, z), e) == z


@pytest.mark.parametrize("name", NAMES)
def test_psi_twisted_product(frobs, name):
    f = frobs[name]
    A = f.algebra
    G = A.group
    e = G.e
    zi = z_inverse(f)
    for g, h in itertools.product(G.elements, repeat=2):
        gh = G.mul(g, h)
        for i, j in itertools.product(range(A.dims[g]), range(A.dims[h])):
            a, b = A.basis(g, i), A.basis(h, j)
            lhs = A.mul(gh, A.mul(g, psi(f, a, g), h, psi(f, b, h)), e, zi)
            rhs = psi(f, A.mul(gh, A.mul(g, a, h, psi(f, b, h)), e, zi), gh)
            assert lhs == rhs


def test_center_group_algebra(f_kz2):
    c = g_center(f_kz2)
    assert c.dims == (1, 1)
    assert all(c.phi[k] == Matrix.identity(1) for k in c.phi)


def test_center_model_dims(f_model):
    c = g_center(f_model)
    assert c.dims == (2, 2)


@pytest.mark.parametrize("name", NAMES)
def test_center_equals_centralizer(frobs, name):
    f = frobs[name]
    c = g_center(f)
    for g in f.algebra.group.elements:
        cz = centralizer(f, g)
        both = c.embed[g].hstack(cz)
        assert rank(c.embed[g]) == rank(cz) == rank(both)


@pytest.mark.parametrize("name", NAMES)
def test_unit_is_z(frobs, name):
    f = frobs[name]
    c = g_center(f)
    e = c.group.e
    assert c.to_vector(e, c.unit) == list(f.z)


@pytest.mark.parametrize("name", NAMES)
def test_phi_composition(frobs, name):
    c = g_center(frobs[name])
    G = c.group
    for g, h, l in itertools.product(G.elements, repeat=3):
        assert c.phi[(g, G.conj(h, l))] @ c.phi[(h, l)] == c.phi[(G.mul(g, h), l)]
    for g in G.elements:
        assert c.phi[(G.e, g)] == Matrix.identity(c.dims[g])


@pytest.mark.parametrize("name", NAMES)
def test_verify_crossed(frobs, name):
    rep = verify_crossed(g_center(frobs[name]))
    assert rep["pass"], rep
    assert set(_axioms(rep)) >= {"hom", "(i)", "(ii)", "(iii)", "trace-condition", "(iv)"}


def test_kz2_trace_condition_values(f_kz2):
    c = g_center(f_kz2)
    # g = e, h = s, c = 1: Tr(phi_s on Z_e) = Tr(phi_e on Z_s) = 1
    assert c.phi[(1, 0)].trace() == ONE
    assert c.phi[(0, 1)].trace() == ONE


def test_m2_trace():
    G = cyclic(2)
    A = matrix_model(G, [2])
    c = g_center(make_frobenius(A, model_trace([2], [1])))
    assert c.dims == (1, 1)
    assert verify_crossed(c)["pass"]
    assert c.phi[(1, 0)].trace() == ONE


def test_nonabelian_group_algebra():
    G = symmetric(3)
    c = g_center(make_frobenius(group_algebra(G), [1]))
    assert verify_crossed(c)["pass"]
    # phi_h on the 1-dim Z_g is conjugation of basis elements with coefficient 1
    for h, g in itertools.product(G.elements, repeat=2):
        assert c.phi[(h, g)] == Matrix.identity(1)


def test_corrupted_phi(f_kz2):
    c = g_center(f_kz2)
    phi = dict(c.phi)
    for g in c.group.elements:
        phi[(1, g)] = phi[(1, g)].scale(2)
    rep = _axioms(verify_crossed(with_phi(c, phi)))
    assert not rep["hom"]
    # s is its own inverse, so both sides of (iv) scale alike
    assert rep["(iv)"]


def test_corrupted_phi_z3():
    c = g_center(make_frobenius(group_algebra(cyclic(3)), [1]))
    phi = dict(c.phi)
    for g in c.group.elements:
        phi[(1, g)] = phi[(1, g)].scale(2)
    rep = _axioms(verify_crossed(with_phi(c, phi)))
    assert not rep["hom"]
    assert not rep["(iv)"]


def test_requires_quasi_biangular():
    from hqft.galg import build
    A = build(trivial(), [2], [((0, 0), (0, 0), (0, 0), 1), ((0, 0), (0, 1), (0, 1), 1),
                               ((0, 1), (0, 0), (0, 1), 1)], [1, 0])
    with pytest.raises(NotQuasiBiangular):
        g_center(make_frobenius(A, [0, 1]))
