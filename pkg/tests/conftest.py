from __future__ import annotations

import pytest

from hqft.frob import make_frobenius
from hqft.galg import group_algebra, matrix_model, model_trace
from hqft.groups import cyclic, klein
from hqft.tft import standard_package

MODEL_BLOCKS = (1, 2)
MODEL_R = (1, 3)


def kz2_frob():
    A = group_algebra(cyclic(2))
    return make_frobenius(A, [1])


def klein_frob():
    A = group_algebra(klein())
    return make_frobenius(A, [1])


def model_frob():
    A = matrix_model(cyclic(2), MODEL_BLOCKS, r=MODEL_R)
    return make_frobenius(A, model_trace(MODEL_BLOCKS, MODEL_R))


@pytest.fixture(scope="session")
def f_kz2():
    return kz2_frob()


@pytest.fixture(scope="session")
def f_klein():
    return klein_frob()


@pytest.fixture(scope="session")
def f_model():
    return model_frob()


@pytest.fixture(scope="session")
def packages(f_kz2, f_klein, f_model):
    return {name: standard_package(f) for name, f in
            (("kz2", f_kz2), ("klein", f_klein), ("model", f_model))}


@pytest.fixture(scope="session")
def frobs(f_kz2, f_klein, f_model):
    return {"kz2": f_kz2, "klein": f_klein, "model": f_model}
