import random

import pytest

from darmoncheck import nt


def test_is_prime_small():
    primes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47}
    for n in range(1, 50):
        assert nt.is_prime(n) == (n in primes)


def test_is_prime_larger():
    assert nt.is_prime(10 ** 9 + 7)
    assert not nt.is_prime(10 ** 9 + 8)
    assert nt.is_prime(18811) is False  # 13 * 1447


def test_factorize_roundtrip():
    rng = random.Random(0)
    for _ in range(200):
        n = rng.randrange(2, 10 ** 6)
        f = nt.factorize(n)
        m = 1
        for p, e in f.items():
            assert nt.is_prime(p)
            m *= p ** e
        assert m == n


def test_kronecker_vs_euler_criterion():
    rng = random.Random(1)
    for _ in range(300):
        p = rng.choice([3, 5, 7, 11, 13, 17, 19, 23, 101, 997])
        a = rng.randrange(-50, 50)
        ls = pow(a % p, (p - 1) // 2, p) if a % p else 0
        expected = {0: 0, 1: 1, p - 1: -1}[ls]
        assert nt.kronecker(a, p) == expected


def test_kronecker_multiplicativity():
    rng = random.Random(2)
    for _ in range(200):
        a, m, n = rng.randrange(-30, 30), rng.randrange(1, 40), rng.randrange(1, 40)
        assert nt.kronecker(a, m * n) == nt.kronecker(a, m) * nt.kronecker(a, n)


def test_kronecker_two():
    # (2/n) for odd n follows the mod-8 rule
    for n in range(1, 100, 2):
        expected = 1 if n % 8 in (1, 7) else -1
        assert nt.kronecker(2, n) == expected


def test_primitive_root_orders():
    for p in (3, 5, 7, 11, 13, 101, 197):
        g = nt.primitive_root(p)
        assert nt.multiplicative_order(g, p) == p - 1
        # minimality
        for h in range(2, g):
            assert nt.multiplicative_order(h, p) != p - 1


def test_sqrt_mod_prime():
    rng = random.Random(3)
    for _ in range(200):
        p = rng.choice([3, 5, 7, 11, 13, 17, 101, 997, 65537])
        x = rng.randrange(p)
        a = x * x % p
        r = nt.sqrt_mod_prime(a, p)
        assert r * r % p == a
    with pytest.raises(ValueError):
        nt.sqrt_mod_prime(2, 5)


def test_crt():
    assert nt.crt([2, 3], [3, 5]) == 8
    assert nt.crt([1, 1, 1], [2, 3, 5]) == 1
    with pytest.raises(ValueError):
        nt.crt([0, 0], [4, 6])


def test_divisors():
    assert nt.divisors(1) == [1]
    assert nt.divisors(12) == [1, 2, 3, 4, 6, 12]
    assert nt.divisors(209) == [1, 11, 19, 209]


def test_discrete_log():
    rng = random.Random(4)
    for _ in range(50):
        p = rng.choice([11, 101, 997, 3301])
        g = nt.primitive_root(p)
        x = rng.randrange(p - 1)
        h = pow(g, x, p)
        assert nt.discrete_log(h, g, p, p - 1) == x


def test_euler_phi_and_squarefree():
    assert nt.euler_phi(209) == 180
    assert nt.euler_phi(1) == 1
    assert nt.is_squarefree(209) and not nt.is_squarefree(12)
