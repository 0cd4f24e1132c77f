import random

import pytest

from l2approx import (
    CyclicGroup,
    FreeAbelianGroup,
    FreeGroup,
    RingElement,
    RingMatrix,
    TrivialGroup,
    positive_square,
    symmetric_group,
)

SEED = 617


@pytest.fixture
def rng():
    return random.Random(SEED)


@pytest.fixture(scope="session")
def z_group():
    return FreeAbelianGroup(1)


@pytest.fixture(scope="session")
def z_laplacian(z_group):
    """The 1x1 matrix 2 - t - t^-1 over Z (the circle Laplacian)."""
    t = RingElement.delta(z_group, (1,))
    return RingMatrix.from_element(2 - t - t.star())


@pytest.fixture(scope="session")
def s3():
    return symmetric_group(3)


def random_element(group, rng, cmax=3):
    """A random ring element with small integer coefficients."""
    terms = {}
    for _ in range(rng.randint(1, 4)):
        terms[random_group_element(group, rng)] = rng.randint(-cmax, cmax)
    return RingElement(group, terms)


def random_group_element(group, rng):
    if isinstance(group, TrivialGroup):
        return ()
    if isinstance(group, CyclicGroup):
        return rng.randrange(group.n)
    if isinstance(group, FreeAbelianGroup):
        return tuple(rng.randint(-4, 4) for _ in range(group.rank))
    if isinstance(group, FreeGroup):
        word = []
        for _ in range(rng.randint(0, 4)):
            g = rng.randint(1, group.rank)
            word.append(g if rng.random() < 0.5 else -g)
        return group.multiply((), tuple(w for w in word if w))  # reduces
    # finite table or product
    elems = group.elements()
    return elems[rng.randrange(len(elems))]


def random_self_adjoint(group, rng, d=1):
    rows = [[random_element(group, rng) for _ in range(d)] for _ in range(d)]
    return positive_square(RingMatrix(group, rows))
