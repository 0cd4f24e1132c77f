import random

import pytest

from l2approx import (
    ChainComplexSpec,
    FreeAbelianGroup,
    QuotientTower,
    RingElement,
    RingMatrix,
    l2_invariants,
    validate,
)
from l2approx.cw import circle_complex, laplacians, point_complex, torus_complex
from l2approx.errors import NotAComplex, TorsionUndefined

from conftest import SEED, random_element


def test_validate_fixtures():
    validate(circle_complex())
    validate(torus_complex())
    validate(point_complex())


def test_validate_rejects_noncomplex():
    z = FreeAbelianGroup(1)
    t = RingElement.delta(z, (1,))
    d1 = RingMatrix(z, [[1 - t]])
    d2 = RingMatrix(z, [[1 + t]])  # (1-t)(1+t) = 1 - t^2 != 0
    spec = ChainComplexSpec(z, (1, 1, 1), (d1, d2))
    with pytest.raises(NotAComplex) as err:
        validate(spec)
    assert err.value.degree == 2

    rng = random.Random(SEED)
    found_invalid = False
    for _ in range(5):
        b1 = RingMatrix(z, [[random_element(z, rng)]])
        b2 = RingMatrix(z, [[random_element(z, rng)]])
        try:
            validate(ChainComplexSpec(z, (1, 1, 1), (b1, b2)))
        except NotAComplex:
            found_invalid = True
    assert found_invalid


def test_validate_rejects_bad_shapes():
    z = FreeAbelianGroup(1)
    t = RingElement.delta(z, (1,))
    d1 = RingMatrix(z, [[1 - t]])
    with pytest.raises(NotAComplex):
        validate(ChainComplexSpec(z, (1, 2), (d1,)))


def test_laplacians_are_self_adjoint():
    for spec in (circle_complex(), torus_complex(), point_complex()):
        for delta in laplacians(spec):
            assert delta.is_self_adjoint()


def test_torus_middle_laplacian_is_diagonal():
    spec = torus_complex()
    deltas = laplacians(spec)
    z2 = spec.group
    zero = RingElement.zero(z2)
    assert deltas[1][0, 1] == zero
    assert deltas[1][1, 0] == zero
    assert deltas[0][0, 0] == deltas[2][0, 0]


def test_circle_invariants_oracle():
    rep = l2_invariants(circle_complex(), oracle_grid=2048)
    assert all(b == 0.0 for b in rep.betti)
    assert rep.acyclic
    assert abs(rep.torsion) <= 0.02
    assert rep.euler_cells == 0
    assert abs(rep.euler_l2) <= 0.02


def test_circle_invariants_tower_agrees_with_oracle():
    oracle = l2_invariants(circle_complex(), oracle_grid=2048)
    tower = l2_invariants(
        circle_complex(), tower=QuotientTower.zn(1, [8, 32, 128, 512, 1024])
    )
    for b_o, b_t in zip(oracle.betti, tower.betti):
        assert abs(b_o - b_t) <= 0.02
    assert abs(tower.torsion) <= 0.02


def test_torus_invariants_both_routes():
    oracle = l2_invariants(torus_complex(), oracle_grid=128)
    assert all(b <= 0.02 for b in oracle.betti)
    assert abs(oracle.torsion) <= 0.02
    tower = l2_invariants(torus_complex(), tower=QuotientTower.zn(2, [8, 16, 32, 64]))
    assert all(b <= 0.02 for b in tower.betti)
    for b_o, b_t in zip(oracle.betti, tower.betti):
        assert abs(b_o - b_t) <= 0.02
    assert abs(oracle.euler_l2 - oracle.euler_cells) <= 0.02
    assert abs(tower.euler_l2 - tower.euler_cells) <= 0.02


def test_point_has_no_torsion():
    rep = l2_invariants(point_complex())
    assert rep.betti == [1.0]
    assert rep.torsion is None
    assert not rep.acyclic
    with pytest.raises(TorsionUndefined):
        rep.require_torsion()
    assert rep.euler_l2 == 1.0 and rep.euler_cells == 1


def test_euler_characteristic_identity():
    for spec in (circle_complex(), torus_complex(), point_complex()):
        rep = l2_invariants(spec, oracle_grid=256)
        assert abs(rep.euler_l2 - rep.euler_cells) <= 0.02


def test_det_class_flags_are_reported():
    rep = l2_invariants(circle_complex(), oracle_grid=512)
    assert rep.det_class == [True, True]
    assert all(lb <= 0.0 for lb in rep.det_lower_bound)
