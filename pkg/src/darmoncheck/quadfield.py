"""Real quadratic fields: exact arithmetic, class data, and unit lattices.

A field is Q(sqrt(d)) for squarefree d > 1 with discriminant D (= d or 4d)
and conductor f = D.  The distinguished real embedding sends sqrt(d) to the
positive root; all absolute values and orientations refer to it.  Class
numbers come from cycles of reduced indefinite binary quadratic forms
(narrow class group) combined with the norm of the fundamental unit.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt, prod

from . import nt
from .nt import ResourceLimitError

NORM_SEARCH_CAP = 10 ** 7


class QuadNum:
    """An element a + b*sqrt(d) of Q(sqrt(d)), with exact rational a, b."""

    __slots__ = ("d", "a", "b")

    def __init__(self, d: int, a, b=0):
        self.d = d
        self.a = Fraction(a)
        self.b = Fraction(b)

    def _lift(self, other) -> "QuadNum":
        if isinstance(other, QuadNum):
            if other.d != self.d:
                raise ValueError("different fields")
            return other
        return QuadNum(self.d, other)

    def __add__(self, other):
        o = self._lift(other)
        return QuadNum(self.d, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return QuadNum(self.d, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return QuadNum(self.d, -self.a, -self.b)

    def __mul__(self, other):
        o = self._lift(other)
        return QuadNum(self.d, self.a * o.a + self.d * self.b * o.b,
                       self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        n = o.norm()
        if n == 0:
            raise ZeroDivisionError
        return self * o.conj() * QuadNum(self.d, Fraction(1, 1) / n)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return QuadNum(self.d, 1) / self ** (-k)
        out = QuadNum(self.d, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self) -> "QuadNum":
        return QuadNum(self.d, self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def sign(self) -> int:
        """Sign under the distinguished embedding (sqrt(d) > 0)."""
        if self.b == 0:
            return (self.a > 0) - (self.a < 0)
        if self.a == 0:
            return 1 if self.b > 0 else -1
        if self.a > 0 and self.b > 0:
            return 1
        if self.a < 0 and self.b < 0:
            return -1
        n = self.norm()
        if self.a > 0:  # b < 0: positive iff a^2 > d b^2
            return 1 if n > 0 else -1
        return 1 if n < 0 else -1

    def abs_cmp_one(self) -> int:
        """Compare |self| with 1 exactly: -1, 0 or +1."""
        sq = self * self
        t = sq - QuadNum(self.d, 1)
        if t.is_zero():
            return 0
        return t.sign()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QuadNum(self.d, other)
        return (isinstance(other, QuadNum) and self.d == other.d
                and self.a == other.a and self.b == other.b)

    def __hash__(self):
        return hash((self.d, self.a, self.b))

    def key(self):
        return (self.a, self.b)

    def __repr__(self):
        return f"QuadNum({self.a} + {self.b}*sqrt({self.d}))"


@dataclass(frozen=True)
class PrimePlace:
    """A prime of F above a split rational prime: sqrt(d) = root (mod ell)."""

    ell: int
    root: int  # the chosen square root of d mod ell, in (0, ell/2)

    def conj(self) -> "PrimePlace":
        return PrimePlace(self.ell, (-self.root) % self.ell)

    def __repr__(self):
        return f"PrimePlace({self.ell}, sqrt->{self.root})"


class QuadField:
    """Q(sqrt(d)) with discriminant, conductor and quadratic character."""

    def __init__(self, d: int):
        if d <= 1 or not nt.is_squarefree(d):
            raise ValueError("d must be a squarefree integer > 1")
        self.d = d
        self.disc = d if d % 4 == 1 else 4 * d
        self.conductor = self.disc
        self._class_data = None
        self._fund_unit = None
        self._lambda_cache: dict = {}
        self._basis_cache: dict = {}

    def omega(self, ell: int) -> int:
        """+1 if ell splits, -1 if inert, 0 if ramified."""
        return nt.kronecker(self.disc, ell)

    def sqrt(self, k=1):
        return QuadNum(self.d, 0, k)

    def num(self, a, b=0) -> QuadNum:
        return QuadNum(self.d, a, b)

    def tau(self, x: QuadNum) -> QuadNum:
        return x.conj()

    def place_above(self, ell: int) -> PrimePlace:
        """The distinguished prime above a split ell (smaller root of d)."""
        if self.omega(ell) != 1:
            raise ValueError(f"{ell} does not split in Q(sqrt({self.d}))")
        if ell == 2:
            return PrimePlace(2, 1)
        t = nt.sqrt_mod_prime(self.d % ell, ell)
        t = min(t, ell - t)
        return PrimePlace(ell, t)

    def n_plus(self, n: int) -> int:
        return prod([p for p in nt.prime_factors(n) if self.omega(p) == 1]) if n > 1 else 1

    def split_primes(self, n: int) -> list[int]:
        return [p for p in nt.prime_factors(n) if self.omega(p) == 1]

    def r_of(self, n: int) -> int:
        return len(self.split_primes(n))

    def s_of(self, n: int) -> int:
        return len([p for p in nt.prime_factors(n) if self.omega(p) != 1])

    def __repr__(self):
        return f"QuadField(d={self.d}, disc={self.disc})"


@lru_cache(maxsize=None)
def make_field(d: int) -> QuadField:
    return QuadField(d)


def omega(F: QuadField, ell: int) -> int:
    return F.omega(ell)


# ---------------------------------------------------------------------------
# fundamental unit


def _pell_pm1(d: int) -> tuple[int, int]:
    """Least x, y > 0 with x^2 - d y^2 = +-1, by the sqrt(d) continued fraction."""
    a0 = isqrt(d)
    if a0 * a0 == d:
        raise ValueError("d must not be a square")
    m, q, a = 0, 1, a0
    h0, h1 = 1, a0
    k0, k1 = 0, 1
    while True:
        m = a * q - m
        q = (d - m * m) // q
        a = (a0 + m) // q
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        if a == 2 * a0:
            return h0, k0


def fundamental_unit(F: QuadField) -> QuadNum:
    """The fundamental unit > 1 of O_F (exact, continued fractions)."""
    if F._fund_unit is not None:
        return F._fund_unit
    d = F.d
    x1, y1 = _pell_pm1(d)
    eps = None
    if d % 4 == 1:
        # the fundamental unit may be a cube root of x1 + y1*sqrt(d)
        approx = (2.0 * (x1 + y1 * d ** 0.5)) ** (1.0 / 3.0) / d ** 0.5
        bound = int(approx) + 2
        for b in range(1, min(bound, y1) + 1):
            for s in (-4, 4):
                t = d * b * b + s
                if t <= 0:
                    continue
                a = isqrt(t)
                if a * a == t and (a - d * b) % 2 == 0:
                    eps = QuadNum(d, Fraction(a, 2), Fraction(b, 2))
                    break
            if eps is not None:
                break
    if eps is None:
        eps = QuadNum(d, x1, y1)
    assert eps.norm() in (1, -1)
    F._fund_unit = eps
    return eps


# ---------------------------------------------------------------------------
# lambda-adic valuations and residues (Hensel lifting of sqrt(d))


def _hensel_sqrt(d: int, ell: int, root: int, prec: int) -> int:
    """t with t^2 = d mod ell^prec and t = root mod ell (odd ell)."""
    t, mod = root, ell
    while mod < ell ** prec:
        mod_next = min(mod * mod, ell ** prec)
        # Newton step: t <- t - (t^2 - d) / (2t)
        inv = pow(2 * t % mod_next, -1, mod_next)
        t = (t - (t * t - d) * inv) % mod_next
        mod = mod_next
    return t % ell ** prec


def _vl(n: int, ell: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % ell == 0:
        n //= ell
        v += 1
    return v


def ord_at(x: QuadNum, place: PrimePlace) -> int:
    """The place-adic valuation of x != 0 (exact)."""
    if x.is_zero():
        raise ValueError("valuation of 0")
    ell = place.ell
    if ell == 2:
        return _ord_at_two(x, place)
    den = (x.a.denominator * x.b.denominator) // gcd(x.a.denominator, x.b.denominator)
    u = int(x.a * den)
    v = int(x.b * den)
    if v == 0:
        return _vl(u, ell) - _vl(den, ell)
    nrm = u * u - x.d * v * v
    if nrm == 0:
        raise ValueError("not a field element")
    bound = _vl(nrm, ell) + 1
    t = _hensel_sqrt(x.d, ell, place.root, bound)
    w = u + v * t
    if w == 0:
        return bound - _vl(den, ell)  # cannot happen for genuine elements
    return min(_vl(w, ell), bound) - _vl(den, ell)


def _ord_at_two(x: QuadNum, place: PrimePlace) -> int:
    """Valuation above a split 2 (d = 1 mod 8), via 2-adic square roots."""
    den = (x.a.denominator * x.b.denominator) // gcd(x.a.denominator, x.b.denominator)
    u = int(x.a * den)
    v = int(x.b * den)
    if v == 0:
        return _vl(u, 2) - _vl(den, 2)
    nrm = u * u - x.d * v * v
    bound = _vl(nrm, 2) + 3
    # lift t^2 = d mod 2^bound with t = 1 mod 4 (fixes the place convention)
    t, j = 1, 3
    while j < bound:
        if (t * t - x.d) % (1 << (j + 1)):
            t += 1 << (j - 1)
        j += 1
    w = u + v * t
    if w == 0:
        return bound - _vl(den, 2)
    return min(_vl(w, 2), bound - 2) - _vl(den, 2)


def unit_residue(x: QuadNum, place: PrimePlace) -> int:
    """Residue mod ell of x / ell^(ord) at the place (the local unit part)."""
    ell = place.ell
    k = ord_at(x, place)
    den = (x.a.denominator * x.b.denominator) // gcd(x.a.denominator, x.b.denominator)
    u = int(x.a * den)
    v = int(x.b * den)
    vd = _vl(den, ell)
    if v == 0:
        w = u
        vw = _vl(u, ell)
        res = (w // ell ** vw) % ell
    else:
        nrm = u * u - x.d * v * v
        prec = _vl(nrm, ell) + 2
        t = _hensel_sqrt(x.d, ell, place.root, prec)
        w = (u + v * t) % ell ** prec
        vw = _vl(w, ell)
        res = (w // ell ** vw) % ell
    assert vw - vd == k
    return res * pow((den // ell ** vd) % ell, -1, ell) % ell


# ---------------------------------------------------------------------------
# integral ideals as Z-modules on the basis (1, w), w = (D%2 + sqrt(D))/2


class QuadIdeal:
    """A nonzero integral ideal in Hermite form Z*(a) + Z*(b + c*w)."""

    __slots__ = ("F", "a", "b", "c")

    def __init__(self, F: QuadField, a: int, b: int, c: int):
        self.F = F
        self.a = a
        self.b = b
        self.c = c

    @staticmethod
    def from_rows(F: QuadField, rows: list[tuple[int, int]]) -> "QuadIdeal":
        """Hermite form of the Z-module spanned by (x, y) = x + y*w pairs."""
        rows = [(x, y) for x, y in rows if x or y]
        if not rows:
            raise ValueError("zero module")
        # reduce on the y-column first
        while True:
            ys = [r for r in rows if r[1]]
            if len(ys) <= 1:
                break
            ys.sort(key=lambda r: abs(r[1]))
            x0, y0 = ys[0]
            new = []
            for x, y in rows:
                if (x, y) == (x0, y0) or y == 0:
                    new.append((x, y))
                else:
                    q = y // y0
                    new.append((x - q * x0, y - q * y0))
            rows = [r for r in new if r != (0, 0)] + [(x0, y0)]
            rows = list(dict.fromkeys(rows))
        ys = [r for r in rows if r[1]]
        if not ys:
            raise ValueError("module has rank 1; not an ideal")
        bx, cy = ys[0]
        if cy < 0:
            bx, cy = -bx, -cy
        g = 0
        for x, y in rows:
            if y == 0:
                g = gcd(g, abs(x))
        if g == 0:
            raise ValueError("module has rank 1; not an ideal")
        bx %= g
        return QuadIdeal(F, g, bx, cy)

    def rows(self) -> list[tuple[int, int]]:
        return [(self.a, 0), (self.b, self.c)]

    def norm(self) -> int:
        return self.a * self.c

    def contains(self, x: int, y: int) -> bool:
        if y % self.c:
            return False
        q = y // self.c
        return (x - q * self.b) % self.a == 0

    def contains_num(self, z: QuadNum) -> bool:
        x, y = _to_w_coords(self.F, z)
        if x is None:
            return False
        return self.contains(x, y)

    def mul(self, other: "QuadIdeal") -> "QuadIdeal":
        F = self.F
        t = F.disc % 2
        nw = (F.disc - t * t) // 4  # w^2 = t*w + nw
        rows = []
        for x1, y1 in self.rows():
            for x2, y2 in other.rows():
                # (x1 + y1 w)(x2 + y2 w)
                x = x1 * x2 + y1 * y2 * nw
                y = x1 * y2 + y1 * x2 + y1 * y2 * t
                rows.append((x, y))
        return QuadIdeal.from_rows(F, rows)

    def conj(self) -> "QuadIdeal":
        t = self.F.disc % 2
        # conj(b + c*w) = (b + c*t) - c*w
        return QuadIdeal.from_rows(self.F, [(self.a, 0), (self.b + self.c * t, -self.c)])

    def pow(self, k: int) -> "QuadIdeal":
        out = QuadIdeal(self.F, 1, 0, 1)
        base = self
        while k:
            if k & 1:
                out = out.mul(base)
            base = base.mul(base)
            k >>= 1
        return out

    def __eq__(self, other):
        return (isinstance(other, QuadIdeal) and self.F is other.F
                and (self.a, self.b, self.c) == (other.a, other.b, other.c))

    def __repr__(self):
        return f"QuadIdeal({self.a}, {self.b}+{self.c}w; N={self.norm()})"


def _to_w_coords(F: QuadField, z: QuadNum):
    """Express z = x + y*w with integer x, y, or (None, None) if not in O_F."""
    t = F.disc % 2
    # w = (t + sqrt(D))/2; sqrt(D) = sqrt(d) if D odd else 2 sqrt(d)
    s = 1 if F.disc % 2 else 2  # sqrt(D) = s * sqrt(d) requires D = s^2 d
    if F.disc == F.d:
        y2 = 2 * z.b  # coefficient of sqrt(D)/... : z = x + y*(t+sqrt(d))/2
        y = y2
        x = z.a - Fraction(t) * y / 2
    else:
        y = z.b  # w = sqrt(d)
        x = z.a
    if y.denominator != 1 or x.denominator != 1:
        return None, None
    return int(x), int(y)


def ideal_of(F: QuadField, z: QuadNum) -> QuadIdeal:
    """The principal ideal z*O_F for integral z."""
    x, y = _to_w_coords(F, z)
    if x is None:
        raise ValueError("element is not integral")
    t = F.disc % 2
    nw = (F.disc - t * t) // 4
    return QuadIdeal.from_rows(F, [(x, y), (y * nw, x + y * t)])


def prime_ideal(F: QuadField, place: PrimePlace) -> QuadIdeal:
    """The split prime ideal attached to a place descriptor."""
    ell, root = place.ell, place.root
    if F.disc % 2:
        w_res = (1 + root) * pow(2, -1, ell) % ell
    else:
        w_res = root % ell
    return QuadIdeal.from_rows(F, [(ell, 0), (-w_res % ell, 1)])


# ---------------------------------------------------------------------------
# class group via cycles of reduced indefinite forms


def _solve_linmod(a: int, b: int, m: int) -> tuple[int, int]:
    """u, v with the solutions of a x = b (mod m) being x = u + v Z."""
    g = gcd(a, m) or m
    if b % g:
        raise ValueError("no solution")
    mg = m // g
    u = (b // g) * pow((a // g) % mg, -1, mg) % mg if mg > 1 else 0
    return u, mg


class FormClassGroup:
    """The narrow class group of discriminant D > 0 via reduced form cycles."""

    def __init__(self, D: int):
        self.D = D
        self.s = isqrt(D)
        self._canon: dict = {}
        self.reduced = self._enumerate()
        reps = set()
        for f in self.reduced:
            reps.add(self.canonical(f))
        self.reps = sorted(reps)
        self.h_plus = len(reps)
        self.one = self.canonical(self.principal_form())
        self.minus_one = self.canonical((-1, D % 2, (D - (D % 2) ** 2) // 4))

    def is_reduced(self, f) -> bool:
        a, b, c = f
        if a == 0 or c == 0:
            return False
        return 0 < b <= self.s and b + 2 * abs(a) >= self.s + 1 and 2 * abs(a) - b <= self.s

    def _enumerate(self):
        out = []
        for b in range(1, self.s + 1):
            if (self.D - b * b) % 4:
                continue
            m = (self.D - b * b) // 4  # -4ac = D - b^2 > 0, so ac = -m < 0
            lo = max(1, (self.s + 1 - b + 1) // 2)
            hi = (self.s + b) // 2
            for aa in range(lo, hi + 1):
                if m % aa:
                    continue
                c = -(m // aa)
                for a in (aa, -aa):
                    f = (a, b, (self.D - b * b) // (-4 * a))
                    if self.is_reduced(f) and gcd(gcd(f[0], f[1]), f[2]) == 1:
                        out.append(f)
        return out

    def rho(self, f):
        """The reduction/cycle step."""
        a, b, c = f
        ac = abs(c)
        if ac > self.s:
            lo = -ac
        else:
            lo = self.s - 2 * ac
        # r = -b mod 2|c| in (lo, lo + 2|c|]
        r = lo + 1 + ((-b - lo - 1) % (2 * ac))
        return (c, r, (r * r - self.D) // (4 * c))

    def reduce(self, f):
        a, b, c = f
        g = gcd(gcd(a, b), c)
        if g > 1:
            raise ValueError("imprimitive form")
        n = 0
        while not self.is_reduced(f):
            f = self.rho(f)
            n += 1
            if n > 10000:
                raise RuntimeError("reduction did not terminate")
        return f

    def cycle(self, f):
        f = self.reduce(f)
        out = [f]
        g = self.rho(f)
        while g != f:
            out.append(g)
            g = self.rho(g)
        return out

    def canonical(self, f):
        f = self.reduce(f)
        if f in self._canon:
            return self._canon[f]
        cyc = self.cycle(f)
        rep = min(cyc)
        for g in cyc:
            self._canon[g] = rep
        return rep

    def principal_form(self):
        b = self.D % 2
        return (1, b, (b * b - self.D) // 4)

    def compose(self, f1, f2):
        """Gaussian composition of primitive forms of the same discriminant."""
        # use cycle representatives with positive leading coefficient
        f1 = self.reduce(f1)
        if f1[0] < 0:
            f1 = self.rho(f1)
        f2 = self.reduce(f2)
        if f2[0] < 0:
            f2 = self.rho(f2)
        a1, b1, c1 = f1
        a2, b2, c2 = f2
        g = (b1 + b2) // 2
        h = -(b1 - b2) // 2
        w = gcd(gcd(a1, a2), g)
        s = a1 // w
        t = a2 // w
        u = g // w
        mu, nu = _solve_linmod(t * u, h * u + s * c1, s * t)
        lam = _solve_linmod(t * nu, h - t * mu, s)[0] if s > 1 else 0
        k = mu + nu * lam
        l = (k * t - h) // s
        m = (t * u * k - h * u - c1 * s) // (s * t)
        A = s * t
        B = w * u - (k * t + l * s)
        C = k * l - w * m
        return self.canonical((A, B, C))

    def inverse(self, f):
        a, b, c = f
        return self.canonical((a, -b, c))

    def power(self, f, k: int):
        if k < 0:
            return self.power(self.inverse(f), -k)
        out = self.one
        base = self.canonical(f)
        while k:
            if k & 1:
                out = self.compose(out, base)
            base = self.compose(base, base)
            k >>= 1
        return out

    def subgroup(self, gens) -> set:
        """Closure of the given classes (with inverses) under composition."""
        group = {self.one}
        frontier = [self.one]
        gens = [self.canonical(g) for g in gens] + [self.inverse(g) for g in gens]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.compose(x, g)
                if y not in group:
                    group.add(y)
                    frontier.append(y)
        return group


@dataclass
class ClassData:
    """Class numbers of F: the form class group plus the unit norm."""

    F: QuadField
    group: FormClassGroup
    h_plus: int
    h: int

    def form_of_place(self, place: PrimePlace):
        F        = self.F
        ell, root = place.ell, place.root
        D = F.disc
        if F.disc % 2:
            w_res = (1 + root) * pow(2, -1, ell) % ell
        else:
            w_res = root % ell
        b = (2 * w_res - D % 2) % (2 * ell)
        if (b * b - D) % (4 * ell):
            b += ell  # fix parity within mod 2*ell
        assert (b * b - D) % (4 * ell) == 0
        return self.group.canonical((ell, b, (b * b - D) // (4 * ell)))

    def wide_subgroup_order(self, places: list[PrimePlace]) -> int:
        """Order of the subgroup of Pic(O_F) generated by the given primes."""
        G = self.group
        gens = [self.form_of_place(p) for p in places]
        big = G.subgroup(gens + [G.minus_one])
        return len(big) // len({G.one, G.minus_one})

    def order_mod(self, place: PrimePlace, prior: list[PrimePlace]) -> int:
        """Order of [lambda] in Pic(O_F[1/m]) for m = product of prior primes."""
        G = self.group
        H = G.subgroup([self.form_of_place(p) for p in prior] + [G.minus_one])
        f = self.form_of_place(place)
        x = f
        k = 1
        while x not in H:
            x = G.compose(x, f)
            k += 1
            if k > self.h + 1:
                raise RuntimeError("order computation failed")
        return k


def class_group(F: QuadField) -> ClassData:
    if F._class_data is not None:
        return F._class_data
    G = FormClassGroup(F.disc)
    eps = fundamental_unit(F)
    h = G.h_plus if eps.norm() == -1 else G.h_plus // 2
    # consistency: the minus-one class is principal iff a unit of norm -1 exists
    assert (G.minus_one == G.one) == (eps.norm() == -1)
    F._class_data = ClassData(F, G, G.h_plus, h)
    return F._class_data


def h_n(F: QuadField, n: int) -> int:
    """The n-class number: order of Pic(O_F[1/n])."""
    if n > 1 and gcd(n, F.conductor) != 1:
        raise ValueError("level must be coprime to the conductor")
    cd = class_group(F)
    places = [F.place_above(p) for p in F.split_primes(n)]
    return cd.h // cd.wide_subgroup_order(places)


# ---------------------------------------------------------------------------
# norm equation searches and the oriented unit lattice


def _norm_candidates(F: QuadField, target: int, y_bound: int):
    """Yield g = (x + y sqrt(D))/2 with |N(g)| = target, |y| <= y_bound."""
    D = F.disc
    for y in range(0, y_bound + 1):
        for s in (4 * target, -4 * target):
            t = D * y * y + s
            if t < 0:
                continue
            x = isqrt(t)
            if x * x != t:
                continue
            if (x - D * y) % 2:
                continue
            for sx in ((x, -x) if x else (x,)):
                # g = (sx + y sqrt(D))/2 as a QuadNum over sqrt(d)
                if D == F.d:
                    g = QuadNum(F.d, Fraction(sx, 2), Fraction(y, 2))
                else:
                    g = QuadNum(F.d, Fraction(sx, 2), y)
                if not g.is_zero():
                    yield g


def _search_bound(F: QuadField, target: int) -> int:
    eps = fundamental_unit(F)
    ef = float(eps.a) + float(eps.b) * F.d ** 0.5
    b = int((ef + 2.0) * 2.0 * (target ** 0.5) / (F.disc ** 0.5)) + 2
    if b > NORM_SEARCH_CAP:
        raise ResourceLimitError(f"norm-equation search bound {b} exceeds cap")
    return b


def lambda_generator(F: QuadField, place: PrimePlace) -> tuple[int, QuadNum]:
    """Least k with place^k principal in O_F, and an exact generator."""
    key = ("lg", place.ell, place.root)
    if key in F._lambda_cache:
        return F._lambda_cache[key]
    cd = class_group(F)
    k = cd.order_mod(place, [])
    lam = prime_ideal(F, place)
    target_ideal = lam.pow(k)
    target = place.ell ** k
    for g in _norm_candidates(F, target, _search_bound(F, target)):
        if target_ideal.contains_num(g) and ideal_of(F, g) == target_ideal:
            F._lambda_cache[key] = (k, g)
            return k, g
    raise ResourceLimitError("no generator found within the search bound")


def _mixed_generator(F: QuadField, place: PrimePlace, k: int,
                     prior: list[PrimePlace]) -> QuadNum:
    """A generator of place^k times some ideal supported on the prior primes.

    Used to extend an oriented basis: the element has valuation exactly k at
    the place, 0 at its conjugate, and support inside the allowed primes.
    """
    cd = class_group(F)
    bound_exp = 2 * cd.h + 1
    combos = [1]
    for q in prior:
        combos = [m * q.ell ** e for m in combos for e in range(bound_exp)]
    for m in sorted(set(combos)):
        target = place.ell ** k * m
        try:
            yb = _search_bound(F, target)
        except ResourceLimitError:
            continue
        for g in _norm_candidates(F, target, yb):
            if ord_at(g, place) != k or ord_at(g, place.conj()) != 0:
                continue
            if ideal_contained_support(F, g, [place.ell] + [q.ell for q in prior]):
                return g
    raise ResourceLimitError("no mixed generator found within the search bounds")


def ideal_contained_support(F: QuadField, g: QuadNum, primes: list[int]) -> bool:
    """True when (g) is supported only on primes above the given rationals."""
    n = g.norm()
    num = abs(n.numerator)
    den = n.denominator
    if den != 1:
        return False
    for p in primes:
        while num % p == 0:
            num //= p
    return num == 1


@dataclass
class PlaceData:
    """The standard ordered places of level n: archimedean + split primes."""

    level: int
    places: list[PrimePlace]  # ordered by increasing residue prime


@dataclass
class UnitLattice:
    """An oriented basis of (1-tau)E_n, nested along the split primes."""

    level: int
    basis: list[QuadNum]         # eps_0, ..., eps_r
    ords: list[list[int]]        # ords[i][j] = ord_{lambda_i}(eps_j), i >= 1
    places: list[PrimePlace]


def unit_basis(F: QuadField, n: int) -> tuple[PlaceData, UnitLattice]:
    """Standard places and an oriented nested basis of (1-tau)E_n."""
    if n > 1 and gcd(n, F.conductor) != 1:
        raise ValueError("level must be coprime to the conductor")
    key = ("ub", F.n_plus(n))
    if key in F._basis_cache:
        return F._basis_cache[key]
    split = F.split_primes(n)
    places = [F.place_above(p) for p in split]
    cd = class_group(F)
    u = fundamental_unit(F)
    eps0 = u / u.conj()
    if eps0.abs_cmp_one() < 0:
        eps0 = QuadNum(F.d, 1) / eps0
    basis = [eps0]
    for i, place in enumerate(places):
        prior = places[:i]
        k = cd.order_mod(place, prior)
        g = _mixed_generator(F, place, k, prior)
        eps = g.conj() / g  # ord at place = -k < 0
        basis.append(eps)
    ords = []
    for i, place in enumerate(places):
        ords.append([ord_at(e, place) for e in basis])
    lattice = UnitLattice(n, basis, ords, places)
    _orient(F, lattice)
    F._basis_cache[key] = (PlaceData(n, places), lattice)
    return F._basis_cache[key]


def _orient(F: QuadField, lat: UnitLattice) -> None:
    """Flip basis elements so the regulator determinant is positive."""
    sign = regulator_sign(F, lat.basis, lat.places)
    if sign == 0:
        raise RuntimeError("degenerate unit basis")
    if sign < 0:
        lat.basis[-1] = QuadNum(F.d, 1) / lat.basis[-1]
        for row in lat.ords:
            row[-1] = -row[-1]
        assert regulator_sign(F, lat.basis, lat.places) > 0


def regulator_sign(F: QuadField, basis: list[QuadNum], places: list[PrimePlace]) -> int:
    """Exact sign of det(log |eps_j|_{lambda_i}) with lambda_0 archimedean.

    Expanding along integer rows leaves sum_j c_j log|eps_j| with integer
    cofactors c_j; its sign is the exact sign of (prod eps_j^{c_j})^2 - 1.
    """
    r = len(places)
    if len(basis) != r + 1:
        raise ValueError("basis size mismatch")
    # integer matrix rows i=1..r: -ord_{lambda_i}(eps_j) (log ell > 0 factors out)
    M = [[-ord_at(e, pl) for e in basis] for pl in places]
    cof = []
    for j in range(r + 1):
        minor = [[M[i][jj] for jj in range(r + 1) if jj != j] for i in range(r)]
        cof.append((-1) ** j * _int_det(minor))
    y = QuadNum(F.d, 1)
    for j, c in enumerate(cof):
        y = y * basis[j] ** c
    return (y * y - QuadNum(F.d, 1)).sign()


def _int_det(M) -> int:
    n = len(M)
    if n == 0:
        return 1
    if n == 1:
        return M[0][0]
    total = 0
    for j in range(n):
        if M[0][j]:
            minor = [row[:j] + row[j + 1:] for row in M[1:]]
            total += (-1) ** j * M[0][j] * _int_det(minor)
    return total


# ---------------------------------------------------------------------------
# persistent cache


class FieldCache:
    """Optional JSON-backed cache of expensive per-discriminant data."""

    VERSION = 1

    def __init__(self, path: str | None = None):
        self.path = path or os.environ.get("DARMONCHECK_CACHE")
        self.data: dict = {"version": self.VERSION, "fields": {}}
        if self.path and os.path.exists(self.path):
            try:
                with open(self.path) as fh:
                    loaded = json.load(fh)
                if loaded.get("version") == self.VERSION:
                    self.data = loaded
            except (OSError, json.JSONDecodeError):
                pass

    def save(self) -> None:
        if not self.path:
            return
        with open(self.path, "w") as fh:
            json.dump(self.data, fh, indent=1, sort_keys=True)

    def warm(self, F: QuadField) -> None:
        rec = self.data["fields"].get(str(F.disc))
        if not rec:
            return
        a, b = rec["fund_unit"]
        F._fund_unit = QuadNum(F.d, Fraction(a), Fraction(b))
        for key, val in rec.get("lambda_gens", {}).items():
            ell, root = map(int, key.split(","))
            k, (ga, gb) = val
            F._lambda_cache[("lg", ell, root)] = (
                k, QuadNum(F.d, Fraction(ga), Fraction(gb)))

    def store(self, F: QuadField) -> None:
        rec = {"d": F.d}
        if F._fund_unit is not None:
            rec["fund_unit"] = [str(F._fund_unit.a), str(F._fund_unit.b)]
        gens = {}
        for (tag, ell, root), (k, g) in F._lambda_cache.items():
            if tag == "lg":
                gens[f"{ell},{root}"] = [k, [str(g.a), str(g.b)]]
        rec["lambda_gens"] = gens
        self.data["fields"][str(F.disc)] = rec
