import pytest

from lambekmodal.algebra import chain, lattice_algebra
from lambekmodal.frames import make_frame


def one_point(O=("w",)):
    return make_frame(["w"], [("w", "w")], [("w", "w", "w")], O, box=[("w", "w")], dia=[("w", "w")])


@pytest.fixture
def F1():
    return one_point()


@pytest.fixture
def chain2():
    return chain(2)


@pytest.fixture
def chain3():
    return chain(3, ["0", "m", "1"])


@pytest.fixture
def square():
    names = ["0", "a", "b", "1"]
    leq = [(x, x) for x in names] + [("0", "a"), ("0", "b"), ("0", "1"), ("a", "1"), ("b", "1")]
    return lattice_algebra(names, leq)


@pytest.fixture
def m3_order():
    names = ["0", "a", "b", "c", "1"]
    leq = [(x, x) for x in names] + [("0", x) for x in names[1:]] + [(x, "1") for x in "abc"]
    return names, leq
