"""Unit tests for exact expansion, evaluation, cost, and continuant matrices."""

import math
import random
from fractions import Fraction

import pytest

from pqrep import continuant_product, cost, evaluate, expand, generator, reduce


def test_reduce_cancels_and_normalizes_sign():
    assert reduce(4, 8) == Fraction(1, 2)
    assert reduce(-3, -9) == Fraction(1, 3)
    assert reduce(5, 7) == Fraction(5, 7)
    assert reduce(3, -9) == Fraction(-1, 3)
    r = reduce(-3, -9)
    assert (r.numerator, r.denominator) == (1, 3)


def test_reduce_rejects_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        reduce(1, 0)


def test_expand_examples():
    assert expand(Fraction(0, 1)) == ()
    assert expand(Fraction(1, 2)) == (2,)
    # Euclid by hand: 11 = 2*4 + 3, 4 = 1*3 + 1, 3 = 3*1
    assert expand(Fraction(4, 11)) == (2, 1, 3)
    assert expand(Fraction(4, 17)) == (4, 4)


def test_expand_rejects_out_of_range():
    for bad in (Fraction(-1, 3), Fraction(1, 1), Fraction(7, 5)):
        with pytest.raises(ValueError):
            expand(bad)


def test_evaluate_examples():
    assert evaluate(()) == Fraction(0, 1)
    assert evaluate((2,)) == Fraction(1, 2)
    # bottom-up by hand: 1/(1 + 1/(1 + 1/2)) = 1/(1 + 2/3) = 3/5
    assert evaluate((1, 1, 2)) == Fraction(3, 5)


def test_evaluate_rejects_non_canonical():
    for bad in ((1,), (2, 1), (0, 2), (3, -1, 2)):
        with pytest.raises(ValueError):
            evaluate(bad)


def test_roundtrip_is_identity_small_corpus():
    for q in range(2, 201):
        for b in range(1, q):
            if math.gcd(b, q) != 1:
                continue
            x = Fraction(b, q)
            e = expand(x)
            assert e[-1] >= 2
            assert all(a >= 1 for a in e)
            assert evaluate(e) == x


def test_cost_examples():
    assert cost(Fraction(1, 2)) == 2
    assert cost(Fraction(4, 11)) == 6
    # cost is defined on the absolute value's fractional part
    assert cost(Fraction(-4, 11)) == 6
    assert cost(Fraction(0, 1)) == 0
    assert cost(Fraction(7, 5)) == cost(Fraction(2, 5))


def test_cost_lower_bound_sampled():
    rng = random.Random(7)
    for _ in range(2000):
        q = rng.randrange(2, 10**6)
        b = rng.randrange(1, q)
        g = math.gcd(b, q)
        b, q = b // g, q // g
        if q == 1:
            continue
        assert (1 << cost(Fraction(b, q))) >= q


def test_continuant_single_generator():
    m = continuant_product((2,))
    assert (m.g11, m.g12, m.g21, m.g22) == (0, 1, 1, 2)
    assert m.det() == -1


def test_continuant_right_column_is_the_fraction():
    m = continuant_product((2, 1, 3))
    assert (m.g12, m.g22) == (4, 11)
    assert m.value == Fraction(4, 11)
    assert abs(m.det()) == 1


def test_continuant_rejects_empty_and_bad_quotients():
    with pytest.raises(ValueError):
        continuant_product(())
    with pytest.raises(ValueError):
        continuant_product((2, 0, 3))
    with pytest.raises(ValueError):
        generator(0)


def test_continuant_matches_evaluate_randomized():
    rng = random.Random(11)
    for _ in range(500):
        n = rng.randrange(1, 13)
        e = [rng.randrange(1, 10) for _ in range(n)]
        e[-1] = max(2, e[-1])
        m = continuant_product(e)
        v = evaluate(e)
        assert (m.g12, m.g22) == (v.numerator, v.denominator)
        assert abs(m.det()) == 1
        assert math.gcd(m.g12, m.g22) == 1


def test_convergent_denominators_follow_recurrence():
    rng = random.Random(13)
    for _ in range(200):
        q = rng.randrange(3, 5000)
        b = rng.randrange(1, q)
        g = math.gcd(b, q)
        b, q = b // g, q // g
        if q < 2:
            continue
        e = expand(Fraction(b, q))
        dens = []
        q_prev, q_cur = 0, 1
        for a in e:
            q_prev, q_cur = q_cur, a * q_cur + q_prev
            dens.append(q_cur)
        assert dens[-1] == q
        for k in range(2, len(dens)):
            assert dens[k] > dens[k - 1]
