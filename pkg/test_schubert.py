"""
Tests for Schubert calculus on Gr(2,6) x P^5 and the pullback computation
"""
from fractions import Fraction

import numpy as np
import pytest

from errors import InvariantViolation
from schubert import (
    TWISTED_EXPECTED,
    UNTWISTED_EXPECTED,
    AmbientClass,
    Partition2,
    chern_and_ch,
    en_ch_gamma,
    exp_class,
    format_h_polynomial,
    gamma_invariants,
    gr_integrate,
    grr_pushforward,
    h_polynomial,
    h_polynomial_to_json,
    hyperplane_line,
    multiply,
    porteous_gamma,
    pullback_polynomials,
    quotient_bundle,
    sub_bundle,
    tangent_bundle_k3,
    todd_series_coefficients,
    verify_pipeline,
    x_degree,
    x_integrate,
)

s = AmbientClass.sigma
PARTITIONS = [(a, b) for a in range(5) for b in range(a + 1)]


def test_partition_validation():
    assert Partition2(3, 1).degree == 4
    assert Partition2(3, 1).dual() == Partition2(3, 1)
    assert Partition2(2).dual() == Partition2(4, 2)
    assert str(Partition2(1, 1)) == "s11"
    with pytest.raises(ValueError):
        Partition2(5, 0)
    with pytest.raises(ValueError):
        Partition2(1, 2)


def test_pieri_examples():
    assert s(1) ** 2 == s(2) + s(1, 1)
    assert s(1) * s(4) == s(4, 1)
    assert s(3) * s(3) == s(3, 3) + s(4, 2)
    assert s(1, 1) * s(1, 1) == s(2, 2)
    assert s(4, 4) * s(1) == AmbientClass()


def test_grassmannian_integrals():
    assert gr_integrate(s(1) ** 8) == 14
    assert gr_integrate(s(2) ** 4) == 3
    assert gr_integrate(s(2) * s(1) ** 6) == 9
    assert gr_integrate(s(1, 1) * s(1) ** 6) == 5


def test_poincare_duality():
    for lam in PARTITIONS:
        for mu in PARTITIONS:
            expected = 1 if Partition2(*mu) == Partition2(*lam).dual() else 0
            assert gr_integrate(s(*lam) * s(*mu)) == expected


def _random_class(rng) -> AmbientClass:
    terms = {}
    for _ in range(4):
        a, b = PARTITIONS[int(rng.integers(len(PARTITIONS)))]
        e = int(rng.integers(0, 6))
        terms[(a, b, e)] = int(rng.integers(-3, 4))
    return AmbientClass(terms)


def test_ring_axioms():
    rng = np.random.default_rng(5)
    for _ in range(30):
        u, v, w = _random_class(rng), _random_class(rng), _random_class(rng)
        assert u * v == v * u
        assert (u * v) * w == u * (v * w)
        assert u * (v + w) == u * v + u * w
        assert u * AmbientClass.one() == u


def test_truncated_multiply_drops_high_degrees():
    product = multiply(s(1) + AmbientClass.h(), s(1) + AmbientClass.h(), max_degree=1)
    assert product == AmbientClass()
    assert AmbientClass.h(6) == AmbientClass()


def test_whitney_sum_and_chern_classes():
    P, Q = sub_bundle(), quotient_bundle()
    assert multiply(P.chern().truncate(2), Q.chern()) == AmbientClass.one()
    assert P.chern_class(1) == -s(1)
    assert P.chern_class(2) == s(1, 1)
    for k in range(1, 5):
        assert Q.chern_class(k) == s(k)
    assert Q.rank == 4
    assert P.rank == 2
    assert Q.dual().chern_class(1) == -s(1)


def test_line_bundle_character():
    ch = hyperplane_line().ch
    assert ch.coefficient(0, 0, 1) == 1
    assert ch.coefficient(0, 0, 2) == Fraction(1, 2)
    assert ch.coefficient(0, 0, 5) == Fraction(1, 120)
    assert exp_class(AmbientClass.h() * 2).coefficient(0, 0, 3) == Fraction(8, 6)


def test_todd_series_coefficients():
    a = todd_series_coefficients(4)
    assert a == (Fraction(1, 2), Fraction(-1, 24), Fraction(0), Fraction(1, 2880))


def test_exterior_and_symmetric_powers():
    P, Q = sub_bundle(), quotient_bundle()
    assert Q.wedge(2).rank == 6
    assert Q.wedge(4).rank == 1
    assert Q.sym(2).rank == 10
    assert P.wedge(3).rank == 0
    assert P.wedge(2).ch == P.det().ch
    assert Q.wedge(4).chern_class(1) == s(1)


def test_k3_surface():
    TX = tangent_bundle_k3()
    assert x_degree(s(1) ** 2) == 14
    assert TX.rank == 2
    assert TX.chern_class(1) == AmbientClass()
    assert x_degree(TX.todd()) == 2
    assert x_degree(TX.chern_class(2)) == 24


def test_eagon_northcott_matches_porteous():
    gamma = porteous_gamma()
    ch = en_ch_gamma()
    assert gamma.is_homogeneous(3)
    for k in range(3):
        assert ch.graded(k).is_zero()
    assert ch.graded(3) == gamma
    assert x_integrate(gamma) == {1: Fraction(12)}


def test_twisted_character_leads_with_gamma_times_plucker():
    twisted = en_ch_gamma(True)
    for k in range(4):
        assert twisted.graded(k).is_zero()
    assert twisted.graded(4) == multiply(porteous_gamma(), s(1))


def test_grr_of_structure_sheaf():
    pushed = grr_pushforward(AmbientClass.one())
    assert pushed.constant() == 2
    assert all(part.degree == 0 for part, _, _ in pushed.terms())


def test_pullback_polynomials():
    untwisted, twisted = pullback_polynomials()
    assert untwisted == UNTWISTED_EXPECTED
    assert twisted == TWISTED_EXPECTED


def test_pullback_rendering():
    assert format_h_polynomial(UNTWISTED_EXPECTED) == "12h - 27h^2 + (65/2)h^3 - (33/2)h^4 + (19/8)h^5"
    assert format_h_polynomial(TWISTED_EXPECTED) == "42h^2 - 91h^3 + 56h^4 - (35/4)h^5"
    assert format_h_polynomial({0: Fraction(2), 1: Fraction(-1)}) == "2 - h"
    assert format_h_polynomial({}) == "0"
    assert h_polynomial_to_json(UNTWISTED_EXPECTED) == {
        "h^1": "12", "h^2": "-27", "h^3": "65/2", "h^4": "-33/2", "h^5": "19/8",
    }


def test_gamma_invariants():
    invariants = gamma_invariants()
    assert invariants.rank == 4
    assert invariants.c1_coefficient == -9
    assert (invariants.jB, invariants.jH) == (9, 14)
    data = invariants.to_dict()
    assert data["twisted"] == {"h^2": "42", "h^3": "-91", "h^4": "56", "h^5": "-35/4"}


def test_verify_pipeline_passes():
    checks = verify_pipeline()
    failed = [c.name for c in checks if not c.passed]
    assert failed == []
    assert verify_pipeline(strict=True)


def test_error_cases():
    with pytest.raises(ValueError):
        chern_and_ch("R")
    with pytest.raises(ValueError):
        chern_and_ch(5)
    with pytest.raises(ValueError):
        gr_integrate(AmbientClass.h())
    with pytest.raises(ValueError):
        h_polynomial(s(1))
    with pytest.raises(ValueError):
        exp_class(AmbientClass.one())
    with pytest.raises(ValueError):
        AmbientClass({(0, 0, -1): 1})


def test_chern_and_ch_of_generator():
    c, ch, td = chern_and_ch("Q")
    assert c.graded(1) == s(1)
    assert ch.constant() == 4
    assert td.graded(1) == s(1) / 2


def test_invariant_violation_is_an_artifact_error():
    from errors import ArtifactError
    assert issubclass(InvariantViolation, ArtifactError)
