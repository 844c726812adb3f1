"""Elementary number theory helpers: primality, factoring, symbols, CRT."""

from __future__ import annotations

from math import gcd, isqrt


class ResourceLimitError(RuntimeError):
    """A configured search or size bound was exceeded."""


class BadAuxiliaryPrime(ValueError):
    """An auxiliary prime hit a zero/undefined evaluation; pick another."""


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (valid far beyond 64-bit inputs we use)."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> dict[int, int]:
    """Factor n > 0 by trial division (desk scale)."""
    if n <= 0:
        raise ValueError("positive integers only")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        f += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_factors(n: int) -> list[int]:
    return sorted(factorize(n))


def is_squarefree(n: int) -> bool:
    return n >= 1 and all(e == 1 for e in factorize(n).values())


def euler_phi(n: int) -> int:
    out = 1
    for p, e in factorize(n).items():
        out *= (p - 1) * p ** (e - 1)
    return out


def jacobi(a: int, m: int) -> int:
    """Jacobi symbol (a/m) for odd m > 0."""
    if m <= 0 or m % 2 == 0:
        raise ValueError("m must be odd and positive")
    a %= m
    acc = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if m % 8 in (3, 5):
                acc = -acc
        a, m = m, a
        if a % 4 == 3 and m % 4 == 3:
            acc = -acc
        a %= m
    return acc if m == 1 else 0


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n), extending Jacobi to all integers n."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    acc = 1
    if n < 0:
        n = -n
        if a < 0:
            acc = -acc
    t = 0
    while n % 2 == 0:
        n //= 2
        t += 1
    if t:
        if a % 2 == 0:
            return 0
        if t % 2 == 1 and a % 8 in (3, 5):
            acc = -acc
    return acc * jacobi(a, n) if n > 1 else acc


def crt(residues: list[int], moduli: list[int]) -> int:
    """Combine x = r_i mod m_i for pairwise coprime m_i."""
    x, m = 0, 1
    for r, mi in zip(residues, moduli):
        g = gcd(m, mi)
        if g != 1:
            raise ValueError("moduli must be coprime")
        x += m * ((r - x) * pow(m, -1, mi) % mi)
        m *= mi
    return x % m


def multiplicative_order(a: int, n: int, n_factors: dict[int, int] | None = None) -> int:
    if gcd(a, n) != 1:
        raise ValueError("a must be a unit mod n")
    order = euler_phi(n)
    for p in factorize(order):
        while order % p == 0 and pow(a, order // p, n) == 1:
            order //= p
    return order


def primitive_root(p: int) -> int:
    """Least primitive root of an odd prime p (g=1 for p=2)."""
    if p == 2:
        return 1
    if not is_prime(p):
        raise ValueError("p must be prime")
    qs = prime_factors(p - 1)
    g = 2
    while True:
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            return g
        g += 1


def sqrt_mod_prime(a: int, p: int) -> int:
    """A square root of a mod odd prime p (Tonelli-Shanks); raises if none."""
    a %= p
    if a == 0:
        return 0
    if p == 2:
        return a
    if pow(a, (p - 1) // 2, p) != 1:
        raise ValueError(f"{a} is not a square mod {p}")
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # Tonelli-Shanks
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def divisors(n: int) -> list[int]:
    """All positive divisors of n, sorted."""
    ds = [1]
    for p, e in factorize(n).items():
        ds = [d * p ** k for d in ds for k in range(e + 1)]
    return sorted(ds)


def discrete_log(h: int, g: int, p: int, order: int) -> int:
    """Solve g^x = h mod p for 0 <= x < order by baby-step giant-step."""
    m = isqrt(order) + 1
    table: dict[int, int] = {}
    cur = 1
    for j in range(m):
        table.setdefault(cur, j)
        cur = cur * g % p
    step = pow(g, -m, p)
    cur = h % p
    for i in range(m):
        if cur in table:
            return (i * m + table[cur]) % order
        cur = cur * step % p
    raise ValueError("discrete log not found (h not in <g>?)")


def v2(n: int) -> int:
    """2-adic valuation of n != 0."""
    if n == 0:
        raise ValueError("v2(0) undefined")
    k = 0
    while n % 2 == 0:
        n //= 2
        k += 1
    return k
