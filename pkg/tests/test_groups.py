import random

import pytest

from l2approx import (
    CyclicGroup,
    DirectProductGroup,
    FiniteTableGroup,
    FreeAbelianGroup,
    FreeGroup,
    Homomorphism,
    TrivialGroup,
    cyclic_quotient,
    free_abelian_quotient,
    product_group,
    symmetric_group,
)
from l2approx.errors import InfiniteGroup, MalformedGroup, MismatchedGroup, UndefinedGenerator
from l2approx.groups import reduce_word

from conftest import SEED, random_group_element

ALL_GROUPS = [
    TrivialGroup(),
    CyclicGroup(1),
    CyclicGroup(4),
    CyclicGroup(7),
    FreeAbelianGroup(1),
    FreeAbelianGroup(3),
    FreeGroup(1),
    FreeGroup(2),
    symmetric_group(3),
    DirectProductGroup(CyclicGroup(2), CyclicGroup(2)),
    product_group([CyclicGroup(2), CyclicGroup(3), CyclicGroup(4)]),
]


def test_free_cancellation():
    f2 = FreeGroup(2)
    assert f2.multiply((1,), (-1,)) == ()
    assert f2.multiply((1, 2), (-2, -1)) == ()
    assert f2.multiply((1,), (2,)) == (1, 2)


def test_free_abelian_addition():
    z2 = FreeAbelianGroup(2)
    assert z2.multiply((1, 0), (0, 3)) == (1, 3)


def test_cyclic_mod():
    assert CyclicGroup(4).multiply(3, 2) == 1


def test_inverse_examples(s3):
    f1 = FreeGroup(1)
    assert f1.inverse((1, 1)) == (-1, -1)
    assert CyclicGroup(5).inverse(2) == 3
    transposition = next(
        g for g in s3.elements()
        if g != s3.identity() and s3.multiply(g, g) == s3.identity()
    )
    assert s3.inverse(transposition) == transposition


def test_reduce_word_idempotent(rng):
    for _ in range(200):
        raw = [rng.choice([1, -1, 2, -2]) for _ in range(rng.randint(0, 10))]
        once = reduce_word(raw)
        assert reduce_word(once) == once
        assert FreeGroup(2).contains(once)


def test_apply_hom_examples(s3):
    # Z -> Z/4, generator -> 1: 6 -> 2
    q = cyclic_quotient(4)
    assert q.apply((6,)) == 2
    assert q.apply((0,)) == 0
    # Free(2) -> S3, a -> a transposition, b -> a 3-cycle
    f2 = FreeGroup(2)
    transposition = next(
        g for g in s3.elements()
        if g != s3.identity() and s3.multiply(g, g) == s3.identity()
    )
    cycle = next(
        g for g in s3.elements()
        if g != s3.identity() and s3.multiply(g, g) != s3.identity()
    )
    phi = Homomorphism(f2, s3, generator_images=[transposition, cycle])
    assert phi.apply((1, 2)) == s3.multiply(transposition, cycle)
    assert phi.apply(()) == s3.identity()


def test_enumerate_examples(s3):
    assert CyclicGroup(3).elements() == [0, 1, 2]
    klein = DirectProductGroup(CyclicGroup(2), CyclicGroup(2))
    elems = klein.elements()
    assert len(elems) == 4
    assert elems[0] == klein.identity()
    assert len(s3.elements()) == 6
    assert s3.elements()[0] == s3.identity()


def test_enumerate_infinite_raises():
    with pytest.raises(InfiniteGroup):
        FreeAbelianGroup(2).elements()
    with pytest.raises(InfiniteGroup):
        FreeGroup(1).elements()


@pytest.mark.parametrize("group", ALL_GROUPS, ids=str)
def test_group_laws_randomized(group):
    rng = random.Random(SEED)
    e = group.identity()
    for _ in range(120):  # 120 x 11 variants > 10^3 samples overall
        g = random_group_element(group, rng)
        h = random_group_element(group, rng)
        k = random_group_element(group, rng)
        assert group.multiply(group.multiply(g, h), k) == group.multiply(
            g, group.multiply(h, k)
        )
        assert group.multiply(g, e) == g
        assert group.multiply(e, g) == g
        assert group.multiply(g, group.inverse(g)) == e
        assert group.multiply(group.inverse(g), g) == e


@pytest.mark.parametrize("group", ALL_GROUPS, ids=str)
def test_power_matches_repeated_multiplication(group):
    rng = random.Random(SEED + 1)
    for _ in range(30):
        g = random_group_element(group, rng)
        k = rng.randint(-6, 6)
        expected = group.identity()
        step = g if k >= 0 else group.inverse(g)
        for _ in range(abs(k)):
            expected = group.multiply(expected, step)
        assert group.power(g, k) == expected


def test_homomorphism_property_randomized(s3):
    rng = random.Random(SEED + 2)
    homs = [
        cyclic_quotient(6),
        free_abelian_quotient(2, 4),
        free_abelian_quotient(2, [2, 3]),
        Homomorphism(FreeGroup(2), s3, generator_images=[1, 4]),
        Homomorphism(CyclicGroup(2), CyclicGroup(4), generator_images=[2]),
    ]
    for phi in homs:
        e_target = phi.target.identity()
        assert phi.apply(phi.source.identity()) == e_target
        for _ in range(200):
            g = random_group_element(phi.source, rng)
            h = random_group_element(phi.source, rng)
            assert phi.apply(phi.source.multiply(g, h)) == phi.target.multiply(
                phi.apply(g), phi.apply(h)
            )


def test_mismatched_payload_raises():
    with pytest.raises(MismatchedGroup):
        CyclicGroup(4).check(7)
    with pytest.raises(MismatchedGroup):
        FreeAbelianGroup(2).check((1,))
    with pytest.raises(MismatchedGroup):
        FreeGroup(2).check((1, -1))  # unreduced word


def test_finite_table_validation():
    with pytest.raises(MalformedGroup):
        FiniteTableGroup([[0, 1], [0, 1]])  # columns not permutations
    with pytest.raises(MalformedGroup):
        FiniteTableGroup([[1, 0, 2], [0, 2, 1], [2, 1, 0]])  # no two-sided identity
    # a Latin square with identity that is not associative (order 5 loop)
    loop = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(MalformedGroup):
        FiniteTableGroup(loop)


def test_hom_relation_validation():
    # generator image must have order dividing the cyclic order
    with pytest.raises(MalformedGroup):
        Homomorphism(CyclicGroup(2), CyclicGroup(4), generator_images=[1])
    # images of commuting generators must commute
    s3 = symmetric_group(3)
    a = 1
    b = next(
        g for g in s3.elements()
        if g not in (s3.identity(), a) and s3.multiply(a, g) != s3.multiply(g, a)
    )
    with pytest.raises(MalformedGroup):
        Homomorphism(FreeAbelianGroup(2), s3, generator_images=[a, b])
    with pytest.raises(UndefinedGenerator):
        Homomorphism(FreeAbelianGroup(2), CyclicGroup(2), generator_images=[1])


def test_injectivity_helpers():
    q = cyclic_quotient(4)
    assert q.kernel_avoids([(1,), (2,), (3,), (0,)])
    assert not q.kernel_avoids([(4,)])
    assert q.injective_on([(0,), (1,)])
    assert not q.injective_on([(0,), (4,)])


def test_element_map_homomorphism_on_product_source():
    klein = DirectProductGroup(CyclicGroup(2), CyclicGroup(2))
    target = CyclicGroup(2)
    projection = Homomorphism(
        klein, target, element_map={g: g[0] for g in klein.elements()}
    )
    assert projection.apply((1, 0)) == 1
    assert projection.apply((0, 1)) == 0
    with pytest.raises(UndefinedGenerator):
        Homomorphism(klein, target, element_map={klein.identity(): 0})
    with pytest.raises(MalformedGroup):
        # not multiplicative: (1,0)*(0,1) = (1,1) maps to 0 but 1 + 0 = 1
        bad = {(0, 0): 0, (1, 0): 1, (0, 1): 0, (1, 1): 0}
        Homomorphism(klein, target, element_map=bad)


def test_tower_injectivity_certificate():
    from l2approx import QuotientTower

    tower = QuotientTower.zn(1, [4, 16])
    small = [(-1,), (0,), (1,)]
    assert tower.injectivity_certificate(0, small)  # differences stay in (-4, 4)
    wide = [(k,) for k in range(-3, 4)]
    assert not tower.injectivity_certificate(0, wide)  # 3 - (-3) dies mod 4
    assert tower.injectivity_certificate(1, wide)


def test_cyclic_factors_and_exponents():
    g = product_group([CyclicGroup(2), CyclicGroup(3)])
    assert g.cyclic_factors() == [2, 3]
    elems = g.elements()
    seen = {g.exponents(x) for x in elems}
    assert len(seen) == 6
    assert FreeGroup(2).cyclic_factors() is None
    assert symmetric_group(3).cyclic_factors() is None
