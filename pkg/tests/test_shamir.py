import itertools

import pytest
from hypothesis import given, settings, strategies as st

from sharing.errors import ParameterError
from sharing.shamir import (
    FeldmanParams,
    PrimeField,
    ShamirPolynomial,
    ShamirShare,
    feldman_commit,
    feldman_params_for,
    feldman_verify,
    is_prime,
    proactive_renew,
    shamir_recover,
    shamir_split,
)
from tests.conftest import FixedRandom
from utils.rng import make_rng

F7 = PrimeField(7)
MERSENNE_61 = PrimeField(2**61 - 1)


def test_worked_example_over_f7():
    polynomial, shares = shamir_split(5, 1, 3, F7, FixedRandom(2))
    assert polynomial.coefficients == (5, 2)
    assert shares == [ShamirShare(1, 0), ShamirShare(2, 2), ShamirShare(3, 4)]
    for pair in itertools.combinations(shares, 2):
        assert shamir_recover(pair, F7, t=1) == 5


def test_recover_needs_exactly_t_plus_one():
    _, shares = shamir_split(5, 1, 3, F7, FixedRandom(2))
    with pytest.raises(ParameterError):
        shamir_recover(shares, F7, t=1)
    with pytest.raises(ParameterError):
        shamir_recover([shares[0], shares[0]], F7)
    with pytest.raises(ParameterError):
        shamir_recover([ShamirShare(0, 5), shares[1]], F7)


@pytest.mark.parametrize(
    "t, n, q",
    [(1, 7, 7), (3, 3, 7), (-1, 3, 7)],
)
def test_split_rejects_bad_parameters(t, n, q):
    with pytest.raises(ParameterError):
        shamir_split(1, t, n, PrimeField(q), make_rng(1))


def test_field_must_be_prime():
    with pytest.raises(ParameterError):
        PrimeField(15)
    assert is_prime(2**61 - 1)
    assert not is_prime(1)


@pytest.mark.parametrize("x, y", [(x, y) for x in range(1, 4) for y in range(7)])
def test_single_share_is_consistent_with_every_secret(x, y):
    consistent = [
        (a0, a1)
        for a0 in range(7)
        for a1 in range(7)
        if ShamirPolynomial(F7, (a0, a1)).evaluate(x) == y
    ]
    assert len(consistent) == 7
    assert sorted(a0 for a0, _ in consistent) == list(range(7))


def test_roundtrip_over_all_subsets_q11():
    field = PrimeField(11)
    for secret in range(11):
        _, shares = shamir_split(secret, 1, 4, field, make_rng(secret))
        for pair in itertools.combinations(shares, 2):
            assert shamir_recover(pair, field, t=1) == secret


def test_t_shares_reveal_nothing():
    """Any t shares are consistent with exactly one polynomial per candidate secret."""
    q, t = 7, 2
    field = PrimeField(q)
    polynomial = ShamirPolynomial(field, (3, 5, 1))
    known = polynomial.shares(4)[1:3]

    consistent = [
        coefficients
        for coefficients in itertools.product(range(q), repeat=t + 1)
        if all(ShamirPolynomial(field, coefficients).evaluate(s.x) == s.y for s in known)
    ]
    assert len(consistent) == q
    assert sorted(c[0] for c in consistent) == list(range(q))


@settings(max_examples=50, deadline=None)
@given(
    st.integers(0, 2**61 - 2),
    st.integers(0, 5).flatmap(lambda t: st.tuples(st.just(t), st.integers(t + 1, 10))),
    st.integers(0, 2**32),
)
def test_any_t_plus_one_shares_recover(secret, params, seed):
    t, n = params
    _, shares = shamir_split(secret, t, n, MERSENNE_61, make_rng(seed))
    rng = make_rng(seed + 1)
    picked = sorted(shares, key=lambda _: rng.randbelow(1000))[: t + 1]
    assert shamir_recover(picked, MERSENNE_61, t) == secret


def test_renewal_keeps_secret_over_many_rounds():
    rng = make_rng(77)
    polynomial, shares = shamir_split(123456789, 2, 5, MERSENNE_61, rng)
    triples = list(itertools.combinations(range(5), 3))
    for _ in range(100):
        old_shares = shares
        polynomial, shares = proactive_renew(polynomial, 5, rng)
        assert polynomial.secret == 123456789
        assert polynomial.degree_bound == 2
        assert shares != old_shares
        picked = [shares[i] for i in triples[rng.randbelow(len(triples))]]
        assert shamir_recover(picked, MERSENNE_61, 2) == 123456789


def test_mixed_generations_do_not_recover():
    polynomial, shares = shamir_split(42, 1, 3, MERSENNE_61, make_rng(5))
    _, renewed = proactive_renew(polynomial, 3, make_rng(6))
    assert shamir_recover([shares[0], renewed[1]], MERSENNE_61, 1) != 42


def test_renewal_update_must_vanish_at_zero():
    polynomial = ShamirPolynomial(F7, (5, 2))
    with pytest.raises(ParameterError):
        proactive_renew(polynomial, 3, update=ShamirPolynomial(F7, (1, 3)))
    with pytest.raises(ParameterError):
        proactive_renew(polynomial, 3, update=ShamirPolynomial(F7, (0, 3, 1)))

    renewed, shares = proactive_renew(polynomial, 3, update=ShamirPolynomial(F7, (0, 3)))
    assert renewed.coefficients == (5, 5)
    assert shares == [ShamirShare(1, 3), ShamirShare(2, 1), ShamirShare(3, 6)]


def test_feldman_exhaustive_over_small_group():
    params = FeldmanParams(23, 11, 2)
    polynomial = ShamirPolynomial(params.field, (7, 3, 5))
    commitments = feldman_commit(polynomial, params)
    assert commitments[0] == pow(2, 7, 23)

    for x in range(1, 11):
        for y in range(11):
            assert feldman_verify(ShamirShare(x, y), commitments, params) == (y == polynomial.evaluate(x))


def test_feldman_params_for_small_q():
    params = feldman_params_for(11)
    assert (params.p, params.q, params.g) == (23, 11, 4)


@pytest.mark.parametrize("p, q, g", [(23, 11, 5), (22, 11, 2), (23, 7, 2), (23, 11, 1)])
def test_feldman_params_validated(p, q, g):
    with pytest.raises(ParameterError):
        FeldmanParams(p, q, g)


def test_feldman_over_large_field():
    params = feldman_params_for(2**61 - 1)
    polynomial, shares = shamir_split(99, 2, 5, params.field, make_rng(3))
    commitments = feldman_commit(polynomial, params)
    assert all(feldman_verify(s, commitments, params) for s in shares)
    bad = ShamirShare(shares[0].x, (shares[0].y + 1) % params.q)
    assert not feldman_verify(bad, commitments, params)


def test_constant_polynomial_when_t_is_zero():
    _, shares = shamir_split(5, 0, 3, F7, make_rng(1))
    assert {s.y for s in shares} == {5}
    assert shamir_recover([ShamirShare(3, 9)], PrimeField(11), t=0) == 9


def test_degree_two_roundtrip_over_q11():
    field = PrimeField(11)
    _, shares = shamir_split(8, 2, 4, field, make_rng(2))
    for triple in itertools.combinations(shares, 3):
        assert shamir_recover(triple, field, t=2) == 8


def test_zero_update_is_identity():
    polynomial = ShamirPolynomial(F7, (5, 2))
    _, shares = proactive_renew(polynomial, 3, update=ShamirPolynomial(F7, (0, 0)))
    assert shares == polynomial.shares(3)
