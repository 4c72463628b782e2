from __future__ import annotations

import itertools
import json
from pathlib import Path

import pytest

from hqft.classify import (
    ClassifyError, ModelData, ModelMismatch, TooLarge, ValueGroupMismatch, are_equivalent,
    brute_force_class_count, build_package, coboundary, cocycles, cross_validate, enumerate_classes,
    homomorphisms, model_from_json, trivial_model, twist, validate_model,
)
from hqft.groups import cyclic, direct_product, load_json as load_group, trivial
from hqft.scalars import ONE, mpq
from hqft.tft import battery, surface_invariant

SPECS = Path(__file__).resolve().parents[1] / "specs"
Z2 = cyclic(2)
KLEIN = direct_product(cyclic(2), cyclic(2))


def _z2_model(t, n=1, m=2, sigma=None, r=None, blocks=None):
    """Z/2 model with tau(s, s) = t (exponents mod m)."""
    md = trivial_model(Z2, blocks or (1,) * n, r, m)
    tau = dict(md.tau)
    tau[(1, 1)] = tuple(t)
    return ModelData(Z2, md.blocks, tau, sigma or md.sigma, md.r, m)


def _all_z2_n2():
    out = []
    for sigma in homomorphisms(Z2, 2):
        for tau in cocycles(Z2, sigma, 2, 2):
            out.append(ModelData(Z2, (1, 1), tau, sigma, (ONE, ONE), 2))
    return out


# validate_model

def test_trivial_valid():
    for G in (trivial(), Z2, KLEIN):
        assert validate_model(trivial_model(G, [1, 2], [1, mpq(5, 2)])).ok


def test_sign_cocycle_valid():
    assert validate_model(_z2_model([1])).ok


def test_stabilizer_violated():
    md = trivial_model(Z2, [1, 1], [1, 2])
    bad = ModelData(Z2, md.blocks, md.tau, ((0, 1), (1, 0)), md.r, 2)
    rep = validate_model(bad)
    assert "stabilizer" in rep.failures()
    fixed = ModelData(Z2, md.blocks, md.tau, ((0, 1), (1, 0)), (ONE, ONE), 2)
    assert validate_model(fixed).ok


def test_non_homomorphism():
    md = trivial_model(cyclic(3), [1, 1])
    swap = ((0, 1), (1, 0), (1, 0))
    assert "homomorphism" in validate_model(ModelData(md.group, md.blocks, md.tau, swap, md.r, 2)).failures()


def test_unnormalized_and_noncocycle():
    md = trivial_model(Z2, [1])
    tau = dict(md.tau)
    tau[(0, 1)] = (1,)
    assert "normalized" in validate_model(ModelData(Z2, md.blocks, tau, md.sigma, md.r, 2)).failures()
    G = cyclic(3)
    md = trivial_model(G, [1])
    tau = dict(md.tau)
    tau[(1, 1)] = (1,)
    assert "cocycle" in validate_model(ModelData(G, md.blocks, tau, md.sigma, md.r, 2)).failures()


def test_model_json_roundtrip():
    md = _z2_model([3], m=4)
    assert model_from_json(Z2, md.to_json()).key() == md.key()
    with pytest.raises(ClassifyError):
        model_from_json(Z2, {"n": 2, "blocks": [1]})


# cocycles and coboundaries

def test_sign_cocycle_count_z2():
    # normalized tables on Z/2 have one free entry; all satisfy the cocycle identity
    assert len(cocycles(Z2, ((0,), (0,)), 1, 2)) == 2


def test_coboundary_is_cocycle():
    for G, m in ((Z2, 4), (cyclic(3), 3), (KLEIN, 2)):
        md = trivial_model(G, [1])
        others = [g for g in G.elements if g != G.e]
        for vals in itertools.islice(itertools.product(range(m), repeat=len(others)), 20):
            phi = {G.e: (0,), **{g: (v,) for g, v in zip(others, vals)}}
            assert validate_model(twist(md, phi)).ok
            assert coboundary(G, phi, md.sigma, m)[(G.e, G.e)] == (0,)


# enumeration

def test_z2_mu2_classes():
    classes = enumerate_classes(Z2, 1, 2)
    assert len(classes) == 2
    assert len(classes) == brute_force_class_count(Z2, 1, 2)
    assert {c.tau[(1, 1)] for c in classes} == {(0,), (1,)}


def test_z2_mu4_classes():
    # 2 phi(s) covers the even residues only
    assert len(enumerate_classes(Z2, 1, 4)) == brute_force_class_count(Z2, 1, 4) == 2


def test_z2_n2_mu1():
    assert len(enumerate_classes(Z2, 2, 1, [[1, 1]])) == 2
    assert len(enumerate_classes(Z2, 2, 1, [[1, 2]])) == 1


def test_trivial_group_one_class():
    for n in (1, 2, 3):
        for r in ([1] * n, list(range(1, n + 1))):
            assert len(enumerate_classes(trivial(), n, 2, [r])) == 1


def test_klein_classes():
    assert len(enumerate_classes(KLEIN, 1, 2)) == brute_force_class_count(KLEIN, 1, 2) == 8


def test_representatives_canonical_and_valid():
    classes = enumerate_classes(Z2, 2, 2, [[1, 1]])
    keys = [c.key() for c in classes]
    assert keys == sorted(keys)
    for c in classes:
        assert validate_model(c).ok
    for a, b in itertools.combinations(classes, 2):
        assert not are_equivalent(a, b)[0]
    assert enumerate_classes(Z2, 2, 2, [[1, 1]])[0].key() == keys[0]


def test_too_large():
    with pytest.raises(TooLarge):
        enumerate_classes(KLEIN, 3, 4, budget=100)


# equivalence

def test_sign_not_equivalent():
    assert not are_equivalent(_z2_model([0]), _z2_model([1]))[0]


def test_coboundary_witness():
    md = _z2_model([0], m=4)
    phi = {0: (0,), 1: (1,)}
    tw = twist(md, phi)
    assert tw.tau[(1, 1)] == (2,)
    eq, w = are_equivalent(md, tw)
    assert eq
    d = coboundary(Z2, {g: tuple(v) for g, v in w["phi"].items()}, md.sigma, 4)
    assert d[(1, 1)] == (2,)


def test_relabeling_witness():
    a = _z2_model([1, 0], n=2, r=[1, 2])
    b = _z2_model([0, 1], n=2, r=[2, 1])
    eq, w = are_equivalent(a, b)
    assert eq and w["pi"] == [1, 0]


def test_equivalence_relation_exhaustive():
    models = _all_z2_n2()
    # trivial sigma: 4 tables; swap sigma: tau(s, s) must be swap-invariant, 2 tables
    assert len(models) == 6
    rel = {(i, j): are_equivalent(a, b)[0] for (i, a), (j, b) in itertools.product(enumerate(models), repeat=2)}
    idx = range(len(models))
    assert all(rel[(i, i)] for i in idx)
    assert all(rel[(i, j)] == rel[(j, i)] for i in idx for j in idx)
    assert all(rel[(i, k)] for i in idx for j in idx for k in idx if rel[(i, j)] and rel[(j, k)])
    classes = {frozenset(j for j in idx if rel[(i, j)]) for i in idx}
    assert len(classes) == len(enumerate_classes(Z2, 2, 2, [[1, 1]]))


def test_value_group_mismatch():
    with pytest.raises(ValueGroupMismatch):
        are_equivalent(_z2_model([0]), _z2_model([0], m=4))


def test_model_mismatch():
    with pytest.raises(ModelMismatch):
        are_equivalent(_z2_model([0]), _z2_model([0, 0], n=2))
    with pytest.raises(ModelMismatch):
        are_equivalent(_z2_model([0]), trivial_model(KLEIN, [1]))


# cross-validation

def test_cross_validate_equivalent_pair():
    md = _z2_model([0], m=4)
    rep = cross_validate(md, twist(md, {0: (0,), 1: (1,)}), battery(Z2, 2))
    assert rep["pass"] and rep["equivalent"] and not rep["separated"]
    assert all(row["equal"] for row in rep["surfaces"])


def test_cross_validate_self():
    md = trivial_model(Z2, [1, 2], [1, 3])
    rep = cross_validate(md, md)
    assert rep["pass"] and rep["equivalent"]


def test_cross_validate_sign_classes():
    # separation is recorded, not required
    rep = cross_validate(_z2_model([0]), _z2_model([1]), battery(Z2, 2))
    assert rep["pass"] and not rep["equivalent"]
    assert isinstance(rep["separated"], bool)


def test_build_package_model_invariants():
    t = build_package(trivial_model(Z2, [1, 2], [1, 3]))
    assert surface_invariant(t, 0, ()) == 37
    assert surface_invariant(t, 1, ((0, 0),)) == 2


def test_spec_fixtures_equivalent():
    G = load_group(json.loads((SPECS / "z2.json").read_text()))
    a = model_from_json(G, json.loads((SPECS / "model_trivial.json").read_text()))
    b = model_from_json(G, json.loads((SPECS / "model_twisted.json").read_text()))
    assert validate_model(a).ok and validate_model(b).ok
    assert are_equivalent(a, b)[0]
