"""
Tests for the divisibility conditions on d and the isotropic witness
"""
import math
import time

import pytest

import config
from hassett import (
    LAMBDA_DIFF,
    a2_norm,
    check_star,
    check_star2,
    check_star2_prime,
    check_star3,
    check_star3_prime,
    condition_report,
    construct_w,
    enumerate_condition,
    incomparability_witnesses,
    search_star3,
    search_star3_prime,
    saturation_check,
    z_birationality_report,
)
from lattice import LatticeVector, pairing, tau_gram


@pytest.mark.parametrize("d, expected", [(14, True), (6, False), (8, True), (12, True), (7, False), (9, False)])
def test_check_star(d, expected):
    assert check_star(d) is expected


def test_check_star2():
    v = check_star2(14)
    assert v.holds and v.witness_n == 2

    v = check_star2(12)
    assert not v.holds and v.obstruction == "2"

    v = check_star2(8)
    assert not v.holds and v.obstruction == "2^2"

    v = check_star2(18)
    assert not v.holds and v.obstruction == "3^2"

    v = check_star2(7)
    assert not v.holds and "odd" in v.reason


def test_check_star2_witness_is_least_root():
    for d in range(2, 3001, 2):
        least = next((n for n in range(d) if (2 * n * n + 2 * n + 2) % d == 0), None)
        assert check_star2(d).witness_n == least


def test_check_star2_large_d():
    d = 2 * 7 * 13 * 19 * 31 * 37 * 43
    v = check_star2(d)
    assert v.holds
    assert 0 <= v.witness_n < d // 2
    assert (2 * v.witness_n ** 2 + 2 * v.witness_n + 2) % d == 0

    v = check_star2(2 * 10**9 + 14)
    assert not v.holds
    assert v.obstruction == "1000000007"


@pytest.mark.parametrize("d", [0, -14, -38])
def test_star3_checks_reject_nonpositive_d(d):
    for check in (check_star3, check_star3_prime):
        v = check(d)
        assert not v.holds
        assert v.witness_n is None
        assert "not positive" in v.reason


def test_check_star2_prime():
    assert check_star2_prime(8).holds
    assert not check_star2_prime(12).holds
    assert check_star2_prime(12).obstruction == "2"
    assert check_star2_prime(14).holds
    # 3 is unconstrained by (**')
    assert check_star2_prime(18).holds


@pytest.mark.parametrize("d, witness", [(14, (2, 1)), (26, (3, 1)), (38, (30, 7))])
def test_check_star3_witnesses(d, witness):
    v = check_star3(d)
    assert v.holds
    assert (v.witness_n, v.witness_a) == witness


@pytest.mark.parametrize("d, witness", [(14, (1, 1)), (38, (2, 1)), (62, (22, 7)), (74, (3, 1))])
def test_check_star3_prime_witnesses(d, witness):
    v = check_star3_prime(d)
    assert v.holds
    assert (v.witness_n, v.witness_a) == witness


def test_star3_failures():
    assert not check_star3(74).holds
    assert not check_star3_prime(42).holds
    assert not check_star3(8).holds


def test_a2_norm():
    assert a2_norm(0) == 2
    assert a2_norm(1) == 14
    assert a2_norm(5) == 182
    for n in range(-20, 21):
        assert a2_norm(n) == 6 * n * n + 6 * n + 2


def test_enumerations_from_the_lists():
    assert enumerate_condition("star3", 100) == [14, 26, 38, 42, 62, 86]
    assert enumerate_condition("star3p", 100) == [14, 38, 62, 74, 86]
    assert enumerate_condition("star", 14) == [8, 12, 14]


def test_enumerate_validation():
    with pytest.raises(ValueError):
        enumerate_condition("star4", 100)
    with pytest.raises(ValueError):
        enumerate_condition("star", 7)
    with pytest.raises(ValueError):
        enumerate_condition("star", 100, threads=0)


def test_enumerate_sharded_matches_serial():
    assert enumerate_condition("star3p", 400, threads=3) == enumerate_condition("star3p", 400, threads=1)


@pytest.mark.parametrize("d, expected", [
    (14, (2, 1, 0, (-1, -1, 1))),
    (38, (6, 2, 0, (-2, -2, 1))),
    (62, (10, 22, 2, (-20, -18, 7))),
    (74, (12, 3, 0, (-3, -3, 1))),
])
def test_construct_w(d, expected):
    k, n, m, w = expected
    witness = construct_w(d)
    assert (witness.k, witness.n, witness.m, witness.w) == (k, n, m, w)
    L = tau_gram(witness.k)
    assert pairing(L, w, w) == 0
    assert pairing(L, w, LAMBDA_DIFF) == 1


def test_construct_w_rejects_failing_d():
    with pytest.raises(ValueError):
        construct_w(26)


def test_saturation_check_62():
    check = saturation_check(62)
    assert check.disc == 3038
    assert check.disc == check.a ** 2 * 62
    assert check.holds


def test_z_birationality_report():
    r = z_birationality_report(14)
    assert r.moduli_of_sheaves and r.twisted_moduli and r.hilb4 and r.hilb2

    r = z_birationality_report(74)
    assert r.hilb4 and not r.hilb2

    report = condition_report(8)
    assert report.c8_flag
    assert not report.star2.holds
    assert "C_8" in report.birationality().note


def test_condition_report_json_schema():
    data = condition_report(14).to_dict()
    assert data["d"] == 14
    assert data["conditions"]["star"] is True
    assert data["conditions"]["star2"]["witness_n"] == 2
    assert data["conditions"]["star3p"]["witness_a"] == 1
    assert data["theorem3"]["hilb4"] is True
    assert data["c8"] is False


def test_incomparability_and_strictness():
    witnesses = incomparability_witnesses(100)
    assert 42 in witnesses["star3_not_star3p"]
    assert 74 in witnesses["star3p_not_star3"]
    assert 26 in witnesses["star2_not_star3p"]


def test_search_oracle_cutoff():
    assert search_star3(38, n_max=100) == (30, 7)
    assert search_star3(38, n_max=29) is None
    assert search_star3_prime(62, n_max=1000) == (22, 7)
    assert search_star3_prime(42, n_max=1000) is None


@pytest.mark.slow
def test_star2_forms_agree_up_to_10000():
    # check_star2 raises on any disagreement between the two forms
    for d in range(7, 10001):
        if check_star(d):
            v = check_star2(d)
            assert v.holds == (v.witness_n is not None)
            assert v.holds == (v.obstruction is None)


@pytest.mark.slow
def test_implication_chain_up_to_10000():
    for d in range(7, 10001):
        if not check_star(d):
            continue
        report = condition_report(d)
        if report.star3p.holds:
            assert report.star2.holds
            n, a = report.star3p.witness_n, report.star3p.witness_a
            assert d * a * a == a2_norm(n)
            assert math.gcd(n, n + 1) == 1
        if report.star2.holds:
            assert report.star2p.holds


@pytest.mark.slow
def test_pell_matches_search_up_to_2000():
    n0 = config.SEARCH_N0
    for d in range(7, 2001):
        if not check_star(d):
            continue
        for check, search in ((check_star3, search_star3), (check_star3_prime, search_star3_prime)):
            verdict = check(d)
            found = search(d, n0)
            if verdict.holds and verdict.witness_n <= n0:
                assert found == (verdict.witness_n, verdict.witness_a)
            else:
                assert found is None


@pytest.mark.slow
def test_construct_w_up_to_5000():
    started = time.perf_counter()
    for d in range(7, 5001):
        if not (check_star(d) and check_star3_prime(d).holds):
            continue
        witness = construct_w(d)
        L = tau_gram(witness.k)
        w = LatticeVector(witness.w)
        assert pairing(L, w, w) == 0
        assert pairing(L, w, LAMBDA_DIFF) == 1
        assert witness.a % 6 == 1
    assert time.perf_counter() - started < 30
