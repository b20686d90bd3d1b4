"""
Tests for the Picard lattice of the Hilbert scheme and its movable cone
"""
import numpy as np
import pytest

from errors import InstanceUnsupported
from hilbk3 import (
    B,
    H,
    HilbContext,
    HilbPicClass,
    bbf_pairing,
    effective_avoidance,
    movable_cone,
    pullback_kernel,
)

HILB4_K3_14 = HilbContext(n=4, d=7)


def test_context_validation():
    with pytest.raises(ValueError):
        HilbContext(n=1, d=7)
    with pytest.raises(ValueError):
        HilbContext(n=4, d=0)
    assert HILB4_K3_14.gram == ((14, 0), (0, -6))


def test_bbf_pairing_examples():
    assert bbf_pairing(HILB4_K3_14, H, H) == 14
    assert bbf_pairing(HILB4_K3_14, B, B) == -6
    assert bbf_pairing(HILB4_K3_14, H, B) == 0
    assert bbf_pairing(HILB4_K3_14, HilbPicClass(9, -14), H) == 126
    assert bbf_pairing(HILB4_K3_14, HilbPicClass(9, -14), HilbPicClass(55, -84)) == -126


def test_bbf_pairing_is_bilinear():
    rng = np.random.default_rng(11)
    for _ in range(200):
        n, d = int(rng.integers(2, 8)), int(rng.integers(1, 40))
        ctx = HilbContext(n, d)
        u, v, w = (HilbPicClass(*(int(c) for c in rng.integers(-50, 51, size=2))) for _ in range(3))
        k = int(rng.integers(-5, 6))
        uv = HilbPicClass(u.x + v.x, u.y + v.y)
        assert bbf_pairing(ctx, uv, w) == bbf_pairing(ctx, u, w) + bbf_pairing(ctx, v, w)
        assert bbf_pairing(ctx, k * u, w) == k * bbf_pairing(ctx, u, w)
        assert bbf_pairing(ctx, u, w) == bbf_pairing(ctx, w, u)


def test_movable_cone_hilb4_of_degree_14():
    cone = movable_cone(HILB4_K3_14)
    assert cone.case == "c"
    assert cone.square_value == 21
    assert not cone.is_square
    assert not cone.intermediate.solvable
    assert cone.intermediate.obstruction == 3
    assert cone.pell == (55, 12)
    assert cone.walls == (H, HilbPicClass(55, -84))
    assert str(cone.walls[1]) == "55H - 84B"
    assert cone.congruence_residue == 1
    assert cone.wall_status == "computed"


def test_movable_cone_case_c_with_minus_one_residue():
    cone = movable_cone(HilbContext(n=4, d=21))
    assert cone.case == "c"
    assert cone.pell == (8, 1)
    assert cone.walls[1] == HilbPicClass(8, -21)
    assert cone.congruence_residue == 2


def test_movable_cone_case_a():
    cone = movable_cone(HilbContext(n=2, d=4))
    assert cone.case == "a"
    assert cone.is_square
    assert cone.walls is None
    assert cone.wall_status == "instance-unsupported"
    with pytest.raises(InstanceUnsupported):
        cone.require_walls()


def test_movable_cone_case_b():
    cone = movable_cone(HilbContext(n=2, d=2))
    assert cone.case == "b"
    assert cone.intermediate.solvable
    assert cone.intermediate.solution == (3, 2)
    assert cone.walls is None


@pytest.mark.parametrize("d, solution", [(2, (3, 2)), (3, (2, 1)), (5, (9, 4))])
def test_movable_cone_case_b_reports_positive_y(d, solution):
    cone = movable_cone(HilbContext(n=2, d=d))
    assert cone.case == "b"
    assert cone.intermediate.solution == solution
    assert cone.intermediate.solution[1] > 0


def test_movable_walls_have_square_2d():
    for n in range(2, 7):
        for d in range(1, 51):
            ctx = HilbContext(n, d)
            cone = movable_cone(ctx)
            if cone.case != "c":
                continue
            for wall in cone.walls:
                assert bbf_pairing(ctx, wall, wall) == 2 * d
            X, Y = cone.pell
            assert X * X - d * (n - 1) * Y * Y == 1


def test_movable_cone_json():
    data = movable_cone(HILB4_K3_14).to_dict()
    assert data["case"] == "c"
    assert data["walls"] == [[1, 0], [55, -84]]
    assert data["pell"] == [55, 12]
    assert data["congruence_mod_nminus1"] == 1


def test_pullback_kernel():
    assert pullback_kernel(14, 9) == HilbPicClass(9, -14)
    assert pullback_kernel(0, 1) == H
    assert pullback_kernel(4, 6) == HilbPicClass(3, -2)
    with pytest.raises(ValueError):
        pullback_kernel(0, 0)


def test_effective_avoidance_for_the_cubic_pullbacks():
    result = effective_avoidance(HILB4_K3_14, 14, 9)
    assert result.kernel == HilbPicClass(9, -14)
    assert result.pairings == (126, -126)
    assert result.contradiction
    assert result.verdict == "no effective divisor avoids j(Y)"


def test_effective_avoidance_not_excluded():
    result = effective_avoidance(HILB4_K3_14, 0, 1)
    assert result.kernel == H
    assert result.pairings == (14, 770)
    assert not result.contradiction

    result = effective_avoidance(HILB4_K3_14, 14, -9)
    assert result.kernel == HilbPicClass(-9, -14)
    assert result.pairings == (-126, -13986)
    assert result.negated_pairings == (126, 13986)
    assert result.verdict == "avoidance not excluded"


def test_effective_avoidance_outside_case_c():
    with pytest.raises(InstanceUnsupported):
        effective_avoidance(HilbContext(n=2, d=4), 14, 9)
