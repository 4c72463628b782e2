from __future__ import annotations

import itertools

import pytest

from hqft.bimod import column_row_context, reverse
from hqft.frob import make_frobenius
from hqft.galg import group_algebra, matrix_model, model_trace
from hqft.groups import cyclic, trivial
from hqft.scalars import ONE, ZERO, Matrix, mpq
from hqft.stellar import (
    ExtendedCrossedPackage, IncompatibleStellar, NotInvolutory, check_quasi_biangular_compatibility,
    extract_phi_theta, klein_bottle, rp2, scaled, stellar_equivalence, suite_passes, transfer_stellar,
    transpose_stellar, trivial_stellar, unoriented_relation_suite, validate_stellar,
    verify_extended_crossed,
)

from conftest import MODEL_BLOCKS


@pytest.fixture(scope="module")
def cases(f_kz2, f_klein, f_model):
    return {
        "kz2": (trivial_stellar(f_kz2.algebra), f_kz2),
        "klein": (trivial_stellar(f_klein.algebra), f_klein),
        "model": (transpose_stellar(f_model.algebra, MODEL_BLOCKS), f_model),
    }


@pytest.fixture(scope="module")
def extended(cases):
    return {k: extract_phi_theta(s, f) for k, (s, f) in cases.items()}


def _axioms(rep):
    return {a["id"]: a["pass"] for a in rep["axioms"]}


NAMES = ["kz2", "klein", "model"]


@pytest.mark.parametrize("name", NAMES)
def test_validate(cases, name):
    rep = validate_stellar(cases[name][0])
    assert rep.ok, rep.to_json()


def test_minus_one_on_one_component(cases):
    s, _ = cases["kz2"]
    rep = validate_stellar(scaled(s, xi_factor=-1))
    assert not rep.ok
    assert "equivalence" in rep.failures()


def test_minus_one_on_both_components(cases, f_kz2):
    s, _ = cases["kz2"]
    s2 = scaled(s, xi_factor=-1, rho_factor=-1)
    assert validate_stellar(s2).ok
    ext = extract_phi_theta(s2, f_kz2)
    assert verify_extended_crossed(ext)["pass"]
    assert ext.theta[0] == [-ONE]


def test_broken_involution(cases):
    s, _ = cases["kz2"]
    rep = validate_stellar(scaled(s, back_factor=2))
    assert "rho-involution" in rep.failures()


def test_requires_involutory_group():
    with pytest.raises(NotInvolutory):
        trivial_stellar(group_algebra(cyclic(4)))


@pytest.mark.parametrize("name", NAMES)
def test_compatibility(cases, name):
    s, f = cases[name]
    rep = check_quasi_biangular_compatibility(s, f)
    assert rep.ok, rep.to_json()


@pytest.mark.parametrize("name", ["kz2", "model"])
def test_compatibility_doubled_z(cases, name):
    s, f = cases[name]
    rep = check_quasi_biangular_compatibility(s, f, z=[2 * x for x in f.z])
    assert not rep.ok and "iota-z" in rep.failures()


def test_extract_rejects_invalid(cases):
    s, f = cases["kz2"]
    with pytest.raises(IncompatibleStellar):
        extract_phi_theta(scaled(s, xi_factor=-1), f)


def test_phi_identity_kz2(extended):
    ext = extended["kz2"]
    for g in (0, 1):
        assert ext.Phi[g] == Matrix.identity(1)
    assert ext.theta == {0: [ONE], 1: [ONE]}


@pytest.mark.parametrize("name", NAMES)
def test_phi_unit(extended, name):
    ext = extended[name]
    c = ext.crossed
    e = c.group.e
    assert ext.Phi[e].apply(list(c.unit)) == list(c.unit)


def test_model_theta(extended, f_model):
    ext = extended["model"]
    c = ext.crossed
    for g in (0, 1):
        # block coordinates of theta_g in Z_e: 1 on the 1x1 block, 1/2 on the 2x2 block
        v = c.to_vector(0, ext.theta[g])
        assert v[0] == ONE and v[1] == mpq(1, 2) and v[4] == mpq(1, 2)


@pytest.mark.parametrize("name", NAMES)
def test_verify_extended(extended, name):
    rep = verify_extended_crossed(extended[name])
    assert rep["pass"], rep
    assert [a["id"] for a in rep["axioms"]] == [f"({i})" for i in range(1, 10)]
    assert rep["crossed"]["pass"]


def test_negated_phi(extended):
    ext = extended["kz2"]
    bad = ExtendedCrossedPackage(ext.crossed, {g: -m for g, m in ext.Phi.items()}, ext.theta)
    ax = _axioms(verify_extended_crossed(bad))
    assert not ax["(3)"]


def test_doubled_theta(extended):
    ext = extended["kz2"]
    bad = ExtendedCrossedPackage(ext.crossed, ext.Phi, {g: [2 * x for x in v] for g, v in ext.theta.items()})
    ax = _axioms(verify_extended_crossed(bad))
    assert not ax["(9)"]


@pytest.mark.parametrize("name", NAMES)
def test_phi_involution(extended, name):
    ext = extended[name]
    for g, m in ext.Phi.items():
        assert m @ m == Matrix.identity(m.rows)


@pytest.mark.parametrize("name", NAMES)
def test_phi_preserves_eta(extended, name):
    ext = extended[name]
    c = ext.crossed
    G = c.group
    for g in G.elements:
        gi = G.inv[g]
        for i, j in itertools.product(range(c.dims[g]), range(c.dims[gi])):
            v, w = c.basis(g, i), c.basis(gi, j)
            assert c.eta(g, ext.Phi[g].apply(v), gi, ext.Phi[gi].apply(w)) == c.eta(g, v, gi, w)


@pytest.mark.parametrize("name", NAMES)
def test_theta_fixed_by_phi_action(extended, name):
    ext = extended[name]
    c = ext.crossed
    e = c.group.e
    for h, g in itertools.product(c.group.elements, repeat=2):
        assert c.phi[(h, e)].apply(ext.theta[g]) == ext.theta[g]


@pytest.mark.parametrize("name", NAMES)
def test_klein_bottle_orderings(extended, name):
    ext = extended[name]
    G = ext.crossed.group
    for a, b in itertools.product(G.elements, repeat=2):
        assert klein_bottle(ext, a, b) == klein_bottle(ext, b, a)


def test_crosscap_values(extended):
    assert rp2(extended["kz2"], 0) == ONE
    assert klein_bottle(extended["kz2"], 0, 1) == ONE
    # model: 1 * 1 + 3 * 2 * Tr(1/2 I_2) = 7
    assert rp2(extended["model"], 0) == 7


@pytest.mark.parametrize("name", NAMES)
def test_unoriented_suite(cases, name):
    s, f = cases[name]
    report = unoriented_relation_suite(s, f)
    assert suite_passes(report), [r for r in report if not r["pass"]][:3]
    fams = {r["family"] for r in report}
    assert {"involution", "generator", "double-conjugate", "equivalence", "compatibility",
            "crossed", "extended", "klein-bottle"} <= fams


def test_unoriented_suite_doubled_reverse(cases):
    s, f = cases["kz2"]
    report = unoriented_relation_suite(scaled(s, back_factor=2), f)
    bad = {r["family"] for r in report if not r["pass"]}
    assert "involution" in bad


# transfer

def test_transfer_identity(cases):
    from hqft.bimod import identity_context
    s, _ = cases["kz2"]
    assert transfer_stellar(identity_context(s.base), s) is s


@pytest.mark.parametrize("G", [trivial(), cyclic(2)])
def test_transfer_to_m2(G):
    K = group_algebra(G)
    L = matrix_model(G, [2])
    ctx = column_row_context(K, L)
    s = trivial_stellar(K)
    s2 = transfer_stellar(ctx, s)
    assert s2.base == L
    assert validate_stellar(s2).ok
    back = transfer_stellar(reverse(ctx), s2)
    assert validate_stellar(back).ok
    assert stellar_equivalence(back, s) is not None
    assert stellar_equivalence(s2, transpose_stellar(L, [2])) is not None


def test_transferred_extended_package():
    G = cyclic(2)
    L = matrix_model(G, [2])
    s2 = transfer_stellar(column_row_context(group_algebra(G), L), trivial_stellar(group_algebra(G)))
    f = make_frobenius(L, model_trace([2], [mpq(1, 2)]))
    ext = extract_phi_theta(s2, f)
    assert verify_extended_crossed(ext)["pass"]
    assert ext.crossed.to_vector(0, ext.theta[0]) == [mpq(1, 2), ZERO, ZERO, mpq(1, 2)]
