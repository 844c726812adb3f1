"""Exact arithmetic in Z[(Z/nZ)^x] and its augmentation-ideal quotients.

The augmentation ideal I_n of the group ring Z[Gamma_n] (n squarefree,
Gamma_n = (Z/nZ)^x) is a free Z-module on {g - 1 : g != 1}.  Powers I_n^r
are computed as integer lattices in those coordinates, and quotients
I_n^r / I_n^{r+1} are presented by Smith normal form.  Because e * I_n^r
is contained in I_n^{r+1} for e = exponent(Gamma_n), all normal forms run
with a working modulus (see intmat).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, lcm, prod

import numpy as np

from . import nt
from .intmat import hnf_mod, hnf_solve, hnf_solve_mod, snf_mod
from .nt import ResourceLimitError

PHI_CAP = 1 << 14


class UnitGroupMod:
    """The unit group Gamma_n = (Z/nZ)^x of a squarefree level n."""

    def __init__(self, n: int):
        if n < 1 or not nt.is_squarefree(n):
            raise ValueError(f"level must be a squarefree positive integer, got {n}")
        self.n = n
        self.primes = tuple(nt.prime_factors(n))
        self.identity = 1 % n
        self.elements = tuple(r for r in range(n) if gcd(r, n) == 1) if n > 1 else (0,)
        self.index = {g: i for i, g in enumerate(self.elements)}
        self.phi = len(self.elements)
        # least primitive root of each odd prime factor, embedded via CRT
        self.gens = {}
        for p in self.primes:
            if p == 2:
                continue
            self.gens[p] = self.embed_from(p, nt.primitive_root(p))
        self.exponent = lcm(*[p - 1 for p in self.primes]) if self.primes else 1

    def mult(self, a: int, b: int) -> int:
        return a * b % self.n if self.n > 1 else 0

    def inv(self, a: int) -> int:
        return pow(a, -1, self.n) if self.n > 1 else 0

    def power(self, a: int, k: int) -> int:
        return pow(a, k, self.n) if self.n > 1 else 0

    def embed_from(self, m: int, r: int) -> int:
        """Image of r in Gamma_m under Gamma_m -> Gamma_n (r mod m, 1 mod n/m)."""
        if self.n % m:
            raise ValueError(f"{m} does not divide {self.n}")
        if self.n == 1:
            return 0
        if m == 1:
            return self.identity
        return nt.crt([r % m, 1 % (self.n // m)], [m, self.n // m])

    def project(self, a: int, d: int) -> int:
        """pi_d at the group level: a mod d, re-embedded into Gamma_n."""
        if self.n % d:
            raise ValueError(f"{d} does not divide {self.n}")
        return self.embed_from(d, a % d if d > 1 else 0)

    def component(self, a: int, m: int) -> int:
        """The Gamma_m-component of a under the CRT factorisation."""
        return a % m if m > 1 else 0

    def __len__(self):
        return self.phi

    def __repr__(self):
        return f"UnitGroupMod({self.n})"


@lru_cache(maxsize=None)
def gamma(n: int) -> UnitGroupMod:
    """The group Gamma_n with CRT data and fixed generators."""
    return UnitGroupMod(n)


def frobenius(q: int, n: int) -> int:
    """The Frobenius element at q in Gamma_n, i.e. the residue q mod n."""
    if n > 1 and gcd(q, n) != 1:
        raise ValueError(f"{q} is not coprime to the level {n}")
    return q % n


class RingElt:
    """A sparse element of Z[Gamma_n]."""

    __slots__ = ("level", "coeffs")

    def __init__(self, level: int, coeffs: dict[int, int] | None = None):
        self.level = level
        self.coeffs = {g: c for g, c in (coeffs or {}).items() if c}

    @staticmethod
    def unit(level: int, g: int | None = None) -> RingElt:
        G = gamma(level)
        return RingElt(level, {G.identity if g is None else g: 1})

    @staticmethod
    def gen_minus_one(level: int, g: int) -> RingElt:
        G = gamma(level)
        if g == G.identity:
            return RingElt(level)
        return RingElt(level, {g: 1, G.identity: -1})

    def __add__(self, other: RingElt) -> RingElt:
        out = dict(self.coeffs)
        for g, c in other.coeffs.items():
            out[g] = out.get(g, 0) + c
        return RingElt(self.level, out)

    def __sub__(self, other: RingElt) -> RingElt:
        out = dict(self.coeffs)
        for g, c in other.coeffs.items():
            out[g] = out.get(g, 0) - c
        return RingElt(self.level, out)

    def __neg__(self) -> RingElt:
        return RingElt(self.level, {g: -c for g, c in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return RingElt(self.level, {g: c * other for g, c in self.coeffs.items()})
        if other.level != self.level:
            raise ValueError("levels differ; embed first")
        G = gamma(self.level)
        out: dict[int, int] = {}
        for g1, c1 in self.coeffs.items():
            for g2, c2 in other.coeffs.items():
                g = G.mult(g1, g2)
                out[g] = out.get(g, 0) + c1 * c2
        return RingElt(self.level, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, RingElt) and self.level == other.level and self.coeffs == other.coeffs

    def aug(self) -> int:
        return sum(self.coeffs.values())

    def pi(self, d: int) -> RingElt:
        """The map pi_d: project each group element to Gamma_d inside Gamma_n."""
        G = gamma(self.level)
        out: dict[int, int] = {}
        for g, c in self.coeffs.items():
            h = G.project(g, d)
            out[h] = out.get(h, 0) + c
        return RingElt(self.level, out)

    def embed(self, n: int) -> RingElt:
        """Image under Z[Gamma_m] -> Z[Gamma_n] for m | n."""
        G = gamma(n)
        out: dict[int, int] = {}
        for g, c in self.coeffs.items():
            h = G.embed_from(self.level, g)
            out[h] = out.get(h, 0) + c
        return RingElt(n, out)

    def __repr__(self):
        return f"RingElt({self.level}, {self.coeffs})"


def _apply_gen(G: UnitGroupMod, coords: np.ndarray, sigma: int,
               perm: np.ndarray, sig_pos: int) -> np.ndarray:
    """Multiply elements of I (given in (g-1)-coordinates) by (sigma - 1)."""
    out = np.zeros_like(coords)
    valid = perm >= 0
    out[:, perm[valid]] += coords[:, valid]
    out -= coords
    out[:, sig_pos] -= coords.sum(axis=1)
    return out


class AugQuot:
    """The finite presentation of I_n^r / I_n^{r+1}."""

    def __init__(self, n: int, r: int):
        if r < 0:
            raise ValueError("degree must be nonnegative")
        G = gamma(n)
        if G.phi > PHI_CAP:
            raise ResourceLimitError(f"phi({n}) = {G.phi} exceeds the configured bound")
        self.gamma = G
        self.level = n
        self.degree = r
        self.ambient_rank = G.phi
        k = G.phi - 1
        self._k = k
        self._pi_matrices: dict[int, np.ndarray] = {}
        self._split_cache: dict[tuple, dict] = {}
        self._mult_cache: dict = {}
        if r == 0:
            # I^0/I^1 is Z via the augmentation; classes carry one integer.
            self.invariants = (0,)
            self.order = 0
            self.exponent_m = 1
            return
        if k == 0:
            self.invariants = ()
            self.order = 1
            self.exponent_m = 1
            return
        e = G.exponent
        self.exponent_m = e
        coord_elems = [g for g in G.elements if g != G.identity]
        self._pos = {g: i for i, g in enumerate(coord_elems)}
        self._coord_elems = coord_elems
        gens = sorted(G.gens.values())
        perms = []
        for s in gens:
            p = np.array([self._pos.get(G.mult(s, g), -1) for g in coord_elems], dtype=np.int64)
            perms.append((s, p, self._pos[s]))
        basis = np.eye(k, dtype=np.int64)  # I^1 in (g-1)-coordinates
        for j in range(1, r + 1):
            rows = [_apply_gen(G, basis, s, p, sp) for s, p, sp in perms]
            nxt = hnf_mod(np.vstack(rows), e ** j) if rows else np.zeros((0, k), dtype=np.int64)
            if j < r:
                basis = nxt
            else:
                self.basis_low = basis      # I^r
                self.basis_high = nxt       # I^{r+1}
        # present I^r / I^{r+1}
        if r == 1:
            X = self.basis_high
        else:
            # solving mod e^{r-1} keeps entries bounded; the drift lies in
            # e^{r-1} * Z^k which is absorbed by the Smith modulus e below
            X = _solve_matrix(self.basis_low, self.basis_high, e ** (r - 1))
        d, V, W = snf_mod(X, e)
        self.invariants = tuple(d)
        self._V = V
        self._W = W
        # representatives of the Smith basis; exact, valid mod I^{r+1}
        self._lifts = W @ self.basis_low
        self.order = prod(d)

    # -- element <-> class ------------------------------------------------

    def _coords_of(self, v: RingElt) -> np.ndarray:
        if v.aug() != 0 and self.degree >= 1:
            raise ValueError("element is not in the augmentation ideal")
        out = np.zeros(self._k, dtype=np.int64)
        for g, c in v.coeffs.items():
            if g != self.gamma.identity:
                out[self._pos[g]] = c
        return out

    def class_of(self, v: RingElt) -> AugClass:
        """Reduce an element of I^r to its class; raises if v is not in I^r."""
        if v.level != self.level:
            raise ValueError("level mismatch")
        if self.degree == 0:
            return AugClass(self, (v.aug(),))
        if v.aug() != 0:
            raise ValueError("element is not in the augmentation ideal")
        if self._k == 0:
            return AugClass(self, ())
        coords = self._coords_of(v)
        if self.degree == 1:
            x = coords
        else:
            x = hnf_solve_mod(self.basis_low, coords, self.exponent_m ** (self.degree - 1))
            if x is None:
                raise ValueError("element does not lie in the expected ideal power")
        y = np.asarray(x, dtype=np.int64) @ self._V
        return AugClass(self, tuple(int(y[i]) % d if d else int(y[i])
                                    for i, d in enumerate(self.invariants)))

    def contains(self, v: RingElt) -> bool:
        if self.degree <= 1:
            return v.aug() == 0 or self.degree == 0
        try:
            coords = self._coords_of(v)
        except ValueError:
            return False
        return hnf_solve_mod(self.basis_low, coords,
                             self.exponent_m ** (self.degree - 1)) is not None

    def zero(self) -> AugClass:
        if self.degree == 0:
            return AugClass(self, (0,))
        return AugClass(self, (0,) * len(self.invariants))

    def lift(self, c: AugClass) -> RingElt:
        """A group-ring representative of a class (well-defined mod I^{r+1})."""
        if self.degree == 0:
            return RingElt.unit(self.level) * c.coords[0]
        v = np.zeros(self._k, dtype=np.int64)
        for i, y in enumerate(c.coords):
            if y:
                v += y * self._lifts[i]
        out: dict[int, int] = {}
        tot = 0
        for i, cc in enumerate(v):
            if cc:
                out[self._coord_elems[i]] = int(cc)
                tot += int(cc)
        if tot:
            out[self.gamma.identity] = -tot
        return RingElt(self.level, out)

    # -- induced maps ------------------------------------------------------

    def pi_matrix(self, d: int) -> np.ndarray:
        """Matrix of pi_d acting on class coordinates."""
        if d not in self._pi_matrices:
            if self.level % d:
                raise ValueError(f"{d} does not divide {self.level}")
            kq = len(self.invariants)
            P = np.zeros((kq, kq), dtype=np.int64)
            for i in range(kq):
                basis_cls = AugClass(self, tuple(1 if j == i else 0 for j in range(kq)))
                img = self.class_of(self.lift(basis_cls).pi(d))
                P[i] = img.coords
            self._pi_matrices[d] = P
        return self._pi_matrices[d]

    def apply_matrix(self, c: AugClass, P: np.ndarray) -> AugClass:
        y = np.asarray(c.coords, dtype=np.int64) @ P
        return AugClass(self, tuple(int(y[i]) % d if d else int(y[i])
                                    for i, d in enumerate(self.invariants)))

    def splitting(self, plus: tuple[int, ...]) -> dict:
        """Data for the new/old decomposition relative to designated primes.

        Valid when degree == len(plus); the new component is cut out by the
        vanishing of every pi_{n/l}, and the projector is the product of the
        commuting idempotents (1 - pi_{n/l}).
        """
        plus = tuple(sorted(plus))
        if plus in self._split_cache:
            return self._split_cache[plus]
        if len(plus) != self.degree:
            raise ValueError("splitting requires degree == number of designated primes")
        for p in plus:
            if self.level % p:
                raise ValueError(f"{p} does not divide {self.level}")
        data: dict = {"plus": plus}
        if self.degree == 0:
            data["proj"] = None
            data["new_gen"] = AugClass(self, (1,))
            data["g"] = 0
            self._split_cache[plus] = data
            return data
        kq = len(self.invariants)
        P = np.eye(kq, dtype=np.int64)
        for p in plus:
            P = P @ (np.eye(kq, dtype=np.int64) - self.pi_matrix(self.level // p))
        data["proj"] = P
        G = self.gamma
        mono = RingElt.unit(self.level)
        for p in plus:
            if p == 2:
                mono = RingElt(self.level)
                break
            mono = mono * RingElt.gen_minus_one(self.level, G.gens[p])
        data["new_gen"] = self.class_of(mono)
        data["g"] = gcd(*[p - 1 for p in plus]) if plus else 0
        self._split_cache[plus] = data
        return data

    def __repr__(self):
        return f"AugQuot(n={self.level}, r={self.degree}, invariants={self.invariants})"


def _solve_matrix(B: np.ndarray, rows: np.ndarray, m: int) -> np.ndarray:
    """Solve X @ B = rows with X correct mod m (requires m*Z^k <= lattice(B)).

    Works mod m*det(B) so that the reduction drift is an integral multiple
    of m (see hnf_solve_mod); falls back to exact arithmetic if needed.
    """
    k = B.shape[0]
    det = 1
    for c in range(k):
        det *= int(B[c, c])
    m_work = m * det
    bmax = int(np.abs(B).max(initial=1))
    if m_work >= (1 << 31) or (k + 1) * m_work * bmax >= (1 << 62):
        out = []
        for r in rows:
            x = hnf_solve(B, r, as_python=True)
            if x is None:
                raise ValueError("rows are not in the lattice")
            out.append([xi % m for xi in x])
        return np.array(out, dtype=np.int64)
    W = rows.astype(np.int64).copy()
    X = np.zeros((rows.shape[0], k), dtype=np.int64)
    for c in range(k):
        p = B[c, c]
        if np.any(W[:, c] % p):
            raise ValueError("rows are not in the lattice")
        q = (W[:, c] // p) % m_work
        X[:, c] = q
        W[:, c:] -= np.outer(q, B[c, c:])
    if np.any(W % m_work):
        raise AssertionError("modular solve integrity check failed")
    return X % m


class AugClass:
    """An element of a presented quotient I_n^r / I_n^{r+1}."""

    __slots__ = ("parent", "coords")

    def __init__(self, parent: AugQuot, coords: tuple[int, ...]):
        self.parent = parent
        self.coords = coords

    def __add__(self, other: AugClass) -> AugClass:
        self._compat(other)
        d = self.parent.invariants
        return AugClass(self.parent, tuple((a + b) % m if m else a + b
                                           for a, b, m in zip(self.coords, other.coords, d)))

    def __sub__(self, other: AugClass) -> AugClass:
        return self + (-other)

    def __neg__(self) -> AugClass:
        d = self.parent.invariants
        return AugClass(self.parent, tuple((-a) % m if m else -a
                                           for a, m in zip(self.coords, d)))

    def __mul__(self, k: int) -> AugClass:
        d = self.parent.invariants
        return AugClass(self.parent, tuple((a * k) % m if m else a * k
                                           for a, m in zip(self.coords, d)))

    __rmul__ = __mul__

    def __eq__(self, other):
        return (isinstance(other, AugClass) and self.parent is other.parent
                and self.coords == other.coords)

    def __hash__(self):
        return hash((id(self.parent), self.coords))

    def _compat(self, other: AugClass):
        if self.parent is not other.parent:
            raise ValueError("classes belong to different quotients")

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def order(self) -> int:
        if self.parent.degree == 0:
            return 0 if self.coords[0] else 1
        o = 1
        for a, m in zip(self.coords, self.parent.invariants):
            if a:
                o = lcm(o, m // gcd(a, m))
        return o

    def __repr__(self):
        return f"AugClass({self.parent!r}, {self.coords})"


@lru_cache(maxsize=None)
def aug_quot(n: int, r: int) -> AugQuot:
    """The quotient I_n^r / I_n^{r+1}, computed by integer normal forms."""
    return AugQuot(n, r)


def monomial_class(quot: AugQuot, gammas: list[tuple[int, int]]) -> AugClass:
    """Class of prod (g_l - 1) for g_l in Gamma_l, one factor per listed prime."""
    if len(gammas) != quot.degree:
        raise ValueError(f"need exactly {quot.degree} factors, got {len(gammas)}")
    G = quot.gamma
    v = RingElt.unit(quot.level)
    for p, g in gammas:
        if quot.level % p:
            raise ValueError(f"{p} does not divide the level")
        if gcd(g, p) != 1:
            raise ValueError(f"{g} is not a unit mod {p}")
        v = v * RingElt.gen_minus_one(quot.level, G.embed_from(p, g % p))
    return quot.class_of(v)


def pi_d(x: AugClass, d: int) -> AugClass:
    """Image of a class under the induced map pi_d."""
    quot = x.parent
    if quot.level % d:
        raise ValueError(f"{d} does not divide the level {quot.level}")
    if quot.degree == 0:
        return x
    return quot.apply_matrix(x, quot.pi_matrix(d))


def proj_new(x: AugClass, plus: tuple[int, ...] | None = None) -> AugClass:
    """Projection onto the new component of the designated splitting."""
    quot = x.parent
    if plus is None:
        plus = quot.gamma.primes
    data = quot.splitting(tuple(plus))
    if quot.degree == 0:
        return x
    return quot.apply_matrix(x, data["proj"])


def in_new_component(x: AugClass, plus: tuple[int, ...] | None = None) -> bool:
    """Membership test via vanishing of every pi_{n/l}, l designated."""
    quot = x.parent
    if plus is None:
        plus = quot.gamma.primes
    if quot.degree == 0:
        return True
    return all(pi_d(x, quot.level // p).is_zero() for p in plus)


def subgroup_order(quot: AugQuot, classes: list[AugClass]) -> int:
    """Order of the subgroup of the quotient generated by the given classes."""
    if quot.degree == 0:
        raise ValueError("free quotient")
    kq = len(quot.invariants)
    if kq == 0:
        return 1
    rows = [list(c.coords) for c in classes]
    rows += [[quot.invariants[i] if j == i else 0 for j in range(kq)]
             for i in range(kq)]
    e = max(quot.exponent_m, 1)
    d, _, _ = snf_mod(np.array(rows, dtype=np.int64), e)
    cofactor = prod(d)
    return quot.order // cofactor if cofactor else 1


def embed_class(x: AugClass, n: int) -> AugClass:
    """Image of a class under the inclusion of levels m | n (same degree)."""
    quot = x.parent
    if n == quot.level:
        return x
    target = aug_quot(n, quot.degree)
    if quot.degree == 0:
        return AugClass(target, x.coords)
    return target.class_of(quot.lift(x).embed(n))


def mult_classes(a: AugClass, b: AugClass) -> AugClass:
    """Product I^r x I^s -> I^{r+s} on classes at a common level."""
    n = a.parent.level
    if b.parent.level != n:
        raise ValueError("levels differ; embed first")
    target = aug_quot(n, a.parent.degree + b.parent.degree)
    la = a.parent.lift(a)
    lb = b.parent.lift(b)
    return target.class_of(la * lb)


def mult_class_elt(a: AugClass, v: RingElt, deg_v: int) -> AugClass:
    """Product of a class of degree r with an element of I^deg_v."""
    n = a.parent.level
    target = aug_quot(n, a.parent.degree + deg_v)
    return target.class_of(a.parent.lift(a) * (v if v.level == n else v.embed(n)))


# ---------------------------------------------------------------------------
# determinants of Frobenius matrices and permutation expansions


@dataclass(frozen=True)
class PermData:
    """A permutation of the designated primes of a level, with sign data."""

    level: int
    sigma: tuple[tuple[int, int], ...]  # (prime, image) pairs

    @property
    def mapping(self) -> dict[int, int]:
        return dict(self.sigma)

    @property
    def d_sigma(self) -> int:
        return prod([p for p, q in self.sigma if p != q]) if self.sigma else 1

    @property
    def sign(self) -> int:
        return perm_sign(self.mapping)

    def __post_init__(self):
        m = dict(self.sigma)
        if sorted(m) != sorted(m.values()):
            raise ValueError("not a permutation")
        for p in m:
            if self.level % p:
                raise ValueError(f"{p} does not divide the level")


def perm_sign(mapping: dict[int, int]) -> int:
    seen: set[int] = set()
    sign = 1
    for start in mapping:
        if start in seen:
            continue
        length = 0
        x = start
        while x not in seen:
            seen.add(x)
            x = mapping[x]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def permutations_of(primes: list[int]):
    """All permutations of the given primes as PermData-style dicts."""
    for images in itertools.permutations(primes):
        yield dict(zip(primes, images))


def single_orbit_nonfixed(mapping: dict[int, int]) -> bool:
    """True when the non-fixed points form one cycle (identity included)."""
    moved = [p for p, q in mapping.items() if p != q]
    if not moved:
        return True
    start = moved[0]
    x = mapping[start]
    seen = {start}
    while x != start:
        seen.add(x)
        x = mapping[x]
    return len(seen) == len(moved)


def derangements(primes: list[int]):
    for m in permutations_of(primes):
        if all(m[p] != p for p in primes):
            yield m


def _frob_lift(n: int, target_level: int, q: int) -> RingElt:
    """(Frobenius at q projected to Gamma_{target_level}) - 1, in Z[Gamma_n]."""
    G = gamma(n)
    if target_level == 1:
        return RingElt(n)
    g = G.embed_from(target_level, q % target_level)
    return RingElt.gen_minus_one(n, g)


def d_det(n: int, d: int, plus: tuple[int, ...] | None = None):
    """The Frobenius matrix M_{n,d} and its determinant class D_{n,d}.

    Row/column i corresponds to the i-th prime of d in increasing order;
    the diagonal entry is pi_{n/d}(Fr_l - 1) and the (i, j) entry is
    pi_{l_j}(Fr_{l_i} - 1).  Returns (matrix of degree-1 classes, class of
    the determinant in I_n^t/I_n^{t+1}).
    """
    if plus is None:
        plus = gamma(n).primes
    if d == 1:
        one = aug_quot(n, 0)
        return [], AugClass(one, (1,))
    if n % d or prod(nt.prime_factors(d)) != d:
        raise ValueError(f"{d} must be a squarefree divisor of the level")
    for p in nt.prime_factors(d):
        if p not in plus:
            raise ValueError(f"{p} is not one of the designated primes")
    ls = nt.prime_factors(d)
    t = len(ls)
    lifts = [[None] * t for _ in range(t)]
    for i, li in enumerate(ls):
        for j, lj in enumerate(ls):
            if i == j:
                lifts[i][j] = _frob_lift(n, n // d, li)
            else:
                lifts[i][j] = _frob_lift(n, lj, li)
    quot1 = aug_quot(n, 1)
    matrix = [[quot1.class_of(lifts[i][j]) for j in range(t)] for i in range(t)]
    det = RingElt(n)
    for images in itertools.permutations(range(t)):
        term = RingElt.unit(n)
        for i, j in enumerate(images):
            term = term * lifts[i][j]
        s = perm_sign({i: j for i, j in enumerate(images)})
        det = det + (term * s)
    quot = aug_quot(n, t)
    return matrix, quot.class_of(det)


def perm_pi(p: PermData) -> AugClass:
    """The product class Pi(sigma) = prod over q | d_sigma of pi_q(Fr_{sigma(q)} - 1)."""
    n = p.level
    moved = [q for q, r in p.sigma if q != r]
    t = len(moved)
    v = RingElt.unit(n)
    for q in moved:
        v = v * _frob_lift(n, q, p.mapping[q])
    return aug_quot(n, t).class_of(v)
