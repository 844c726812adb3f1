"""Both sides of Darmon's refined class number congruence.

The regulator side is exact: determinants of local symbols applied to an
oriented unit basis, with coefficients in augmentation quotients.  The theta
side is reduced through homomorphisms into Z/(q-1) attached to auxiliary
primes q; the class of the reduced theta element in the augmentation
quotient is extracted by a linear solve over the power basis of I_n^r, with
the auxiliary-prime congruence chosen strong enough that the extracted
class is unique.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm, prod

import numpy as np

from . import cyclo, groupring as gr, localsym, nt, quadfield as qf
from .groupring import AugClass, RingElt, aug_quot, gamma
from .intmat import hnf_solve_mod
from .nt import BadAuxiliaryPrime, ResourceLimitError
from .quadfield import QuadField, QuadNum


# ---------------------------------------------------------------------------
# formal sums (global number) x (augmentation class)


def _payload_key(x):
    if isinstance(x, QuadNum):
        return ("q", x.d, x.a, x.b)
    if isinstance(x, tuple) and x and x[0] == "alpha":
        return x
    raise TypeError(f"unsupported payload {x!r}")


class TensorElt:
    """A formal sum of (global number) tensor (augmentation class).

    Payloads are either QuadNum values or alpha-twist descriptors
    ("alpha", d, m, c) meaning the c-twist of the cyclotomic unit of level m.
    Inverses are normalised onto the class side: x^{-1} (x) v = x (x) -v.
    """

    def __init__(self, quot, terms=None):
        self.quot = quot
        self.terms: dict = {}
        for x, c in (terms or []):
            self.add_term(x, c)

    @property
    def level(self):
        return self.quot.level

    @property
    def degree(self):
        return self.quot.degree

    def add_term(self, x, c: AugClass):
        if c.parent is not self.quot:
            raise ValueError("class belongs to a different quotient")
        if isinstance(x, QuadNum):
            if x == 1:
                return
            cmp = x.abs_cmp_one()
            if cmp < 0:
                x = QuadNum(x.d, 1) / x
                c = -c
            elif cmp == 0 and x.sign() < 0 and x.b == 0:
                pass  # payload -1 kept as is
        key = _payload_key(x)
        if key in self.terms:
            old_x, old_c = self.terms[key]
            new_c = old_c + c
            if new_c.is_zero():
                del self.terms[key]
            else:
                self.terms[key] = (old_x, new_c)
        else:
            if not c.is_zero():
                self.terms[key] = (x, c)

    def __add__(self, other: "TensorElt") -> "TensorElt":
        if other.quot is not self.quot:
            raise ValueError("tensor elements live in different quotients")
        out = TensorElt(self.quot, list(self.terms.values()))
        for x, c in other.terms.values():
            out.add_term(x, c)
        return out

    def __neg__(self) -> "TensorElt":
        return TensorElt(self.quot, [(x, -c) for x, c in self.terms.values()])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k: int) -> "TensorElt":
        return TensorElt(self.quot, [(x, k * c) for x, c in self.terms.values()])

    def map_classes(self, fn, quot=None) -> "TensorElt":
        out = TensorElt(quot or self.quot)
        for x, c in self.terms.values():
            out.add_term(x, fn(c))
        return out

    def pi(self, d: int) -> "TensorElt":
        return self.map_classes(lambda c: gr.pi_d(c, d))

    def proj_new(self, plus) -> "TensorElt":
        return self.map_classes(lambda c: gr.proj_new(c, plus))

    def mult_class(self, v: AugClass) -> "TensorElt":
        target = aug_quot(self.level, self.degree + v.parent.degree)
        return self.map_classes(lambda c: gr.mult_classes(c, v), target)

    def embed(self, n: int) -> "TensorElt":
        target = aug_quot(n, self.degree)
        return self.map_classes(lambda c: gr.embed_class(c, n), target)

    def __eq__(self, other):
        if not isinstance(other, TensorElt) or other.quot is not self.quot:
            return NotImplemented
        return self._canon() == other._canon()

    def _canon(self):
        return {k: c.coords for k, (x, c) in sorted(self.terms.items())}

    def is_zero(self):
        return not self.terms

    def __repr__(self):
        return f"TensorElt(level={self.level}, degree={self.degree}, {len(self.terms)} terms)"


# ---------------------------------------------------------------------------
# reduction homomorphisms


@dataclass
class ReductionHom:
    """Evaluation modulo a degree-one prime above q, then discrete log.

    Maps the multiplicative group generated by roots of unity of order nf,
    sqrt(d), and q-unit rationals into Z/(q-1).
    """

    F: QuadField
    level: int
    q: int
    g: int              # primitive root mod q
    zeta: int           # fixed image of the nf-th root of unity
    sqrt_disc: int      # image of sqrt(D)
    _dlog_cache: dict = field(default_factory=dict)
    _bsgs: list = field(default_factory=list)

    @property
    def modulus(self) -> int:
        return self.q - 1

    def dlog(self, x: int) -> int:
        x %= self.q
        if x == 0:
            raise BadAuxiliaryPrime(f"zero value mod {self.q}")
        if x in self._dlog_cache:
            return self._dlog_cache[x]
        if not self._bsgs:
            from math import isqrt
            m = isqrt(self.q - 1) + 1
            table = {}
            cur = 1
            for j in range(m):
                table.setdefault(cur, j)
                cur = cur * self.g % self.q
            self._bsgs.extend([m, pow(self.g, -m, self.q), table])
        m, step, table = self._bsgs
        cur = x
        for i in range(m):
            if cur in table:
                val = (i * m + table[cur]) % (self.q - 1)
                self._dlog_cache[x] = val
                return val
            cur = cur * step % self.q
        raise RuntimeError("discrete log failed")

    def zeta_power(self, k: int) -> int:
        return pow(self.zeta, k % (self.level * self.F.conductor), self.q)

    def eval_quad(self, x: QuadNum) -> int:
        sd = self.sqrt_disc if self.F.disc == self.F.d \
            else self.sqrt_disc * pow(2, -1, self.q) % self.q
        num = (x.a.numerator * x.b.denominator
               + x.b.numerator * x.a.denominator * sd)
        den = x.a.denominator * x.b.denominator
        if den % self.q == 0 or num % self.q == 0:
            raise BadAuxiliaryPrime(f"degenerate value at q={self.q}")
        return num * pow(den, -1, self.q) % self.q

    def value(self, payload) -> int:
        """h(payload) in Z/(q-1)."""
        if isinstance(payload, QuadNum):
            return self.dlog(self.eval_quad(payload))
        if isinstance(payload, tuple) and payload[0] == "alpha":
            _, d, m, c = payload
            return self.alpha_value(m, c)
        raise TypeError(f"unsupported payload {payload!r}")

    def alpha_value(self, m: int, c: int) -> int:
        """h of the c-twist of the level-m cyclotomic unit."""
        F = self.F
        mf = m * F.conductor
        t = (self.level * F.conductor) // mf
        plus, minus = cyclo.alpha_exponents(F, m)
        tot = 0
        for a in plus:
            tot += self.dlog(self.zeta_power(a * c * t) - 1)
        for a in minus:
            tot -= self.dlog(self.zeta_power(a * c * t) - 1)
        return tot % self.modulus


def _required_congruence(F: QuadField, n: int) -> int:
    """The modulus L with q = 1 mod L making the theta extraction unique.

    The class in (Z/(q-1)) (x) I^r/I^{r+1} of a solution is independent of
    all choices once v_p(q-1) >= v_p(e) + v_p(det I^r-basis) for each prime
    p dividing the quotient exponent e.
    """
    r = F.r_of(n)
    L = n * F.conductor
    quot = aug_quot(n, r)
    if r >= 1 and quot.order > 1:
        e = 1
        for d in quot.invariants:
            if d > 1:
                e = lcm(e, d)
        det = 1
        if r > 1:
            for c in range(quot._k):
                det *= int(quot.basis_low[c, c])
        extra = 1
        for p in nt.prime_factors(e):
            extra *= p ** (_vp(e, p) + _vp(det, p))
        L = lcm(L, extra)
    return L


def _vp(x: int, p: int) -> int:
    v = 0
    while x % p == 0 and x > 0:
        x //= p
        v += 1
    return v


def find_aux_primes(F: QuadField, n: int, count: int, bound: int = 10 ** 9):
    """Smallest primes q = 1 mod L usable for reductions at this level."""
    L = _required_congruence(F, n)
    out = []
    q = L + 1
    while len(out) < count:
        if q > bound:
            raise ResourceLimitError("not enough auxiliary primes below the bound")
        if nt.is_prime(q):
            out.append(q)
        q += L
    return out


def make_reduction_hom(F: QuadField, n: int, q: int) -> ReductionHom:
    """A reduction homomorphism at q (requires q = 1 mod nf)."""
    mf = n * F.conductor
    if (q - 1) % mf:
        raise ValueError(f"{q} is not 1 mod {mf}")
    if not nt.is_prime(q):
        raise ValueError(f"{q} is not prime")
    g = nt.primitive_root(q)
    zeta = pow(g, (q - 1) // mf, q)
    # image of sqrt(D) via the Gauss sum of the quadratic character
    f = F.conductor
    zf = pow(zeta, mf // f, q)
    sd = 0
    for a in range(1, f + 1):
        if gcd(a, f) == 1:
            sd += F.omega(a) * pow(zf, a, q)
    sd %= q
    if pow(sd, 2, q) != F.disc % q:
        raise BadAuxiliaryPrime(f"Gauss sum check failed at q={q}")
    return ReductionHom(F, n, q, g, zeta, sd)


def tensor_reduce(x: TensorElt, h: ReductionHom, odd_only: bool = False) -> AugClass:
    """Sum of h(payload) * class; the result lies in the quotient group."""
    quot = x.quot
    _check_hom_compat(quot, h)
    out = quot.zero()
    for payload, c in x.terms.values():
        out = out + h.value(payload) * c
    if odd_only:
        out = _odd_part(out)
    return out


def _check_hom_compat(quot, h: ReductionHom):
    for d in quot.invariants:
        if d > 1 and h.modulus % d:
            raise ValueError("auxiliary prime too weak for this quotient")


def _odd_part(c: AugClass) -> AugClass:
    e = 1
    for d in c.parent.invariants:
        if d > 1:
            e = lcm(e, d)
    return c * (2 ** _vp(e, 2) if e > 1 else 1)


def _reduce_deg0(x: TensorElt, h: ReductionHom) -> int:
    """Reduce a degree-0 tensor element to Z/(q-1)."""
    total = 0
    for payload, c in x.terms.values():
        total = (total + h.value(payload) * c.coords[0]) % h.modulus
    return total


# ---------------------------------------------------------------------------
# the regulator side (exact)


def del_lift(F: QuadField, x: QuadNum, place, n: int) -> RingElt:
    """Group-ring lift of the boundary symbol (for determinant products)."""
    G = gamma(n)
    k = qf.ord_at(x, place)
    ell = place.ell
    lift = RingElt(n)
    for qp in G.primes:
        if qp == 2:
            continue
        if qp == ell:
            u = qf.unit_residue(x, place)
            lift = lift + RingElt.gen_minus_one(n, G.embed_from(ell, pow(u, -1, ell)))
        else:
            base = ell % qp
            fr = pow(base, k, qp) if k >= 0 else pow(pow(base, -1, qp), -k, qp)
            lift = lift + RingElt.gen_minus_one(n, G.embed_from(qp, fr))
    return lift


def _minor_class(lifts: list[list[RingElt]], j: int, n: int, r: int) -> AugClass:
    """Determinant of the symbol matrix with column j removed."""
    quot = aug_quot(n, r)
    cols = [jj for jj in range(r + 1) if jj != j]
    det = RingElt(n)
    if r == 0:
        return AugClass(quot, (1,))
    for perm in itertools.permutations(range(r)):
        term = RingElt.unit(n)
        for i, pi_ in enumerate(perm):
            term = term * lifts[i][cols[pi_]]
        det = det + term * gr.perm_sign({i: p for i, p in enumerate(perm)})
    return quot.class_of(det)


def regulator(F: QuadField, n: int) -> TensorElt:
    """R_n as a formal sum of units tensor degree-r classes (exact)."""
    return bordered_regulator(F, n, n)


def bordered_regulator(F: QuadField, n: int, n2: int) -> TensorElt:
    """R_{n,n2}: unit basis of level n, symbols evaluated at level n2, n | n2."""
    if n2 % n:
        raise ValueError("the bordered level must be a multiple of the base level")
    pd, ul = qf.unit_basis(F, n)
    return regulator_from_basis(F, ul.basis, ul.places, n2)


def regulator_from_basis(F: QuadField, basis, places, n2: int) -> TensorElt:
    """The minors expansion for an explicit (oriented) basis and places."""
    r = len(places)
    lifts = [[del_lift(F, e, pl, n2) for e in basis] for pl in places]
    quot = aug_quot(n2, r)
    out = TensorElt(quot)
    for j, eps in enumerate(basis):
        sign = (-1) ** j
        out.add_term(eps, sign * _minor_class(lifts, j, n2, r))
    return out


def regulator_with_h(F: QuadField, n: int) -> TensorElt:
    return regulator(F, n).scale(qf.h_n(F, n))


# ---------------------------------------------------------------------------
# the theta side (reduced through homomorphisms)


def theta_values(F: QuadField, n: int, h: ReductionHom) -> dict[int, int]:
    """h(gamma(alpha_n)) for every gamma in Gamma_n."""
    th = cyclo.theta_prime(F, n)
    G = gamma(n)
    out = {}
    for g in G.elements:
        c = th.twist_residue(g if n > 1 else 1)
        out[g] = h.alpha_value(n, c)
    return out


def theta_class(F: QuadField, n: int, h: ReductionHom) -> AugClass:
    """The class of the reduced theta element in (Z/(q-1)) (x) I^r/I^{r+1}.

    Solves for coordinates of the reduced theta vector over the power basis
    of I_n^r; the auxiliary-prime congruence makes the class independent of
    the choice of solution.
    """
    r = F.r_of(n)
    quot = aug_quot(n, r)
    _check_hom_compat(quot, h)
    vals = theta_values(F, n, h)
    G = gamma(n)
    M = h.modulus
    if r == 0:
        return AugClass(quot, (sum(vals.values()) % M,))
    aug = sum(vals.values()) % M
    if aug:
        raise ArithmeticError("theta vector has nonzero augmentation; "
                              "norm compatibility violated")
    k = quot._k
    coords = np.zeros(k, dtype=np.int64)
    for g, v in vals.items():
        if g != G.identity:
            coords[quot._pos[g]] = v % M
    # identity coefficient is absorbed: subtracting aug * (identity basis row)
    # is unnecessary because the augmentation vanishes
    e = quot.exponent_m
    m_solve = 1
    for p in nt.prime_factors(e):
        m_solve *= p ** _vp(M, p)
    if r == 1 or k == 0:
        x = coords
    else:
        x = hnf_solve_mod(quot.basis_low, coords, m_solve)
        if x is None:
            raise ArithmeticError("reduced theta element is not in the expected "
                                  "ideal power (implementation or theory failure)")
    y = np.asarray(x, dtype=np.int64) @ quot._V
    return AugClass(quot, tuple(int(y[i]) % d if d else int(y[i])
                                for i, d in enumerate(quot.invariants)))


def beta_value(F: QuadField, n_plus: int, h: ReductionHom) -> int:
    """h applied to the Kolyvagin derivative D_{n+} alpha_{n+}."""
    G = gamma(n_plus)
    th = cyclo.theta_prime(F, n_plus)
    total = 0
    for g in G.elements:
        weight = 1
        for p in G.primes:
            if p == 2:
                weight = 0 if g % 2 == 0 else weight
                continue
            gen = nt.primitive_root(p)
            i = nt.discrete_log(g % p, gen, p, p - 1)
            weight = weight * i % h.modulus
        if weight:
            total = (total + weight * h.alpha_value(n_plus, th.twist_residue(g))) % h.modulus
    return total


def beta_class_at(F: QuadField, n: int) -> AugClass:
    """The monomial class prod (sigma_l - 1) over split l, at level n."""
    r = F.r_of(n)
    quot = aug_quot(n, r)
    G = gamma(n)
    v = RingElt.unit(n)
    for p in F.split_primes(n):
        v = v * RingElt.gen_minus_one(n, G.gens[p])
    return quot.class_of(v)


def derived_class(F: QuadField, n: int):
    """The derivative class as (value under homs, class side) functions."""
    n_plus = F.n_plus(n)

    def value(h: ReductionHom) -> int:
        return beta_value(F, n_plus, h)

    return value, beta_class_at(F, n)


# ---------------------------------------------------------------------------
# verification reports


@dataclass
class PrimeResult:
    q: int
    residual: tuple
    verdict: str


@dataclass
class VerifyReport:
    field: int
    level: int
    r: int
    s: int
    h_n: int
    primes: list[PrimeResult]
    verdict: str

    def as_dict(self):
        return {
            "field": self.field,
            "level": self.level,
            "r": self.r,
            "s": self.s,
            "h_n": self.h_n,
            "primes": [{"q": p.q, "residual": list(p.residual), "verdict": p.verdict}
                       for p in self.primes],
            "verdict": self.verdict,
        }


def _group_odd_trivial(quot) -> bool:
    return all(d & (d - 1) == 0 for d in quot.invariants if d >= 1)


def verify_darmon(F: QuadField, n: int, num_primes: int = 5,
                  wrong_sign: bool = False) -> VerifyReport:
    """Check that theta~' + 2^s h_n R_n has trivial odd part, per aux prime.

    wrong_sign flips the sign of the regulator side (soundness canary).
    """
    if n > 1 and gcd(n, F.conductor) != 1:
        raise ValueError("level shares a factor with the conductor")
    r, s = F.r_of(n), F.s_of(n)
    hn = qf.h_n(F, n)
    quot = aug_quot(n, r)
    reg = regulator(F, n).scale(hn * (2 ** s) * (-1 if wrong_sign else 1))
    results = []
    vacuous = r >= 1 and _group_odd_trivial(quot)
    qs = find_aux_primes(F, n, num_primes)
    for q in qs:
        try:
            h = make_reduction_hom(F, n, q)
            th = theta_class(F, n, h)
            if r == 0:
                # residual in Z/(q-1); kill the 2-part of the group
                M = h.modulus
                val = (th.coords[0] + _reduce_deg0(reg, h)) % M
                val = val * (2 ** _vp(M, 2)) % M
                ok = val == 0
                results.append(PrimeResult(q, (val,), "pass" if ok else "fail"))
                continue
            residual = _odd_part(th + tensor_reduce(reg, h))
        except BadAuxiliaryPrime:
            results.append(PrimeResult(q, (), "bad-prime"))
            continue
        ok = residual.is_zero()
        results.append(PrimeResult(q, residual.coords, "pass" if ok else "fail"))
    verdicts = [p.verdict for p in results if p.verdict != "bad-prime"]
    if vacuous:
        overall = "vacuous"
    elif verdicts and all(v == "pass" for v in verdicts):
        overall = "pass"
    else:
        overall = "fail"
    return VerifyReport(F.d, n, r, s, hn, results, overall)


def verify_base_case(F: QuadField) -> tuple[bool, int]:
    """Exact check alpha_1 = +-(eps/eps^tau)^{-h}; returns (ok, sign)."""
    a1 = cyclo.alpha(F, 1)
    eps = qf.fundamental_unit(F)
    hF = qf.class_group(F).h
    target = (eps / eps.conj()) ** (-hF)
    m = F.conductor
    t = cyclo.quad_to_cyclo(F, target, m)
    if a1 == t:
        return True, 1
    minus = cyclo.quad_to_cyclo(F, QuadNum(F.d, -1) * target, m)
    if a1 == minus:
        return True, -1
    return False, 0


def prop94_residual(F: QuadField, n: int, h: ReductionHom) -> AugClass:
    """Residual of: sum over d | n_+ of theta~'_{n/d} prod pi_{n/d}(Fr_l - 1)
    minus 2^s beta_{n_+}, evaluated under one reduction hom."""
    r = F.r_of(n)
    quot = aug_quot(n, r)
    total = quot.zero()
    for dd in nt.divisors(F.n_plus(n)):
        m = n // dd
        th_m = theta_class(F, m, _hom_at_level(F, m, h))
        cls = gr.embed_class(th_m, n)
        for p in nt.prime_factors(dd):
            lift = gr._frob_lift(n, n // dd, p)
            cls = gr.mult_class_elt(cls, lift, 1)
        total = total + cls
    bval, bcls = beta_value(F, F.n_plus(n), _hom_at_level(F, F.n_plus(n), h)), beta_class_at(F, n)
    rhs = (2 ** F.s_of(n) * bval) * bcls
    return total - rhs


def _hom_at_level(F: QuadField, m: int, h: ReductionHom) -> ReductionHom:
    """The same prime and compatible root-of-unity images at a divisor level."""
    if (h.q - 1) % (m * F.conductor):
        raise ValueError("hom not compatible with the level")
    zeta_m = pow(h.zeta, (h.level * F.conductor) // (m * F.conductor), h.q)
    return ReductionHom(F, m, h.q, h.g, zeta_m, h.sqrt_disc,
                        h._dlog_cache, h._bsgs)


# ---------------------------------------------------------------------------
# pre-Kolyvagin axioms for the two concrete systems


def _regulator_parts(F: QuadField, n: int, n2: int | None = None):
    """(unit lattice, symbol lifts, quotient, minor classes) at level n2."""
    n2 = n2 or n
    pd, ul = qf.unit_basis(F, n)
    r = len(ul.places)
    lifts = [[del_lift(F, e, pl, n2) for e in ul.basis] for pl in ul.places]
    minors = [_minor_class(lifts, j, n2, r) for j in range(r + 1)]
    return ul, lifts, aug_quot(n2, r), minors


def _fpart_dlog(F: QuadField, x: QuadNum, ell: int) -> int:
    """Discrete log mod ell-1 of the finite (unit) part of x at the place."""
    place = F.place_above(ell)
    u = qf.unit_residue(x, place)
    return nt.discrete_log(u, nt.primitive_root(ell), ell, ell - 1)


def regulator_axiom_i(F: QuadField, n: int, ell: int) -> bool:
    """Every term of R_n is a unit at ell (ell not dividing n)."""
    if n % ell == 0:
        raise ValueError("axiom (i) concerns ell not dividing n")
    _, ul = qf.unit_basis(F, n)
    if F.omega(ell) != 1:
        return True  # no transverse component exists at non-split primes
    place = F.place_above(ell)
    return all(qf.ord_at(e, place) == 0 and qf.ord_at(e, place.conj()) == 0
               for e in ul.basis)


def regulator_axiom_ii(F: QuadField, n: int, ell: int, homs=None):
    """(1 (x) pi_{n/ell})(h_n R_n) = h_{n/ell} R_{n/ell} pi_{n/ell}(1 - Fr_ell)."""
    if n % ell or F.omega(ell) != 1:
        raise ValueError("axiom (ii) needs a split prime dividing the level")
    m = n // ell
    lhs = regulator(F, n).scale(qf.h_n(F, n)).pi(m)
    fr = RingElt(n) - gr._frob_lift(n, m, ell)  # pi_m(1 - Fr_ell) as a lift
    fr_cls = aug_quot(n, 1).class_of(-1 * gr._frob_lift(n, m, ell))
    rhs = regulator(F, m).scale(qf.h_n(F, m)).embed(n).mult_class(fr_cls)
    if lhs == rhs:
        return True, "exact"
    return _tensor_equal_under_homs(F, n, lhs, rhs, homs)


def _tensor_equal_under_homs(F, n, a: TensorElt, b: TensorElt, homs=None):
    homs = homs or [make_reduction_hom(F, n, q) for q in find_aux_primes(F, n, 3)]
    for h in homs:
        if tensor_reduce(a, h) != tensor_reduce(b, h):
            return False, "reductions"
    return True, "reductions"


def regulator_axiom_iii(F: QuadField, n: int, ell: int) -> bool:
    """proj(h_n (R_n)_{ell,tr}) = (phi_fs (x) 1)(proj(h_{n/ell}(R_{n/ell})_ell))."""
    if n % ell or F.omega(ell) != 1:
        raise ValueError("axiom (iii) needs a split prime dividing the level")
    m = n // ell
    plus_n = tuple(F.split_primes(n))
    place = F.place_above(ell)
    # left side: transverse coefficients are the valuations at the place
    ul, _, quot, minors = _regulator_parts(F, n)
    hn = qf.h_n(F, n)
    lhs = quot.zero()
    for j, e in enumerate(ul.basis):
        o = qf.ord_at(e, place)
        if o:
            lhs = lhs + ((-1) ** j * hn * o) * minors[j]
    lhs = gr.proj_new(lhs, plus_n)
    # right side: finite residues at ell of the level-m basis, sent through
    # the finite-singular map and multiplied into the new part
    ul2, _, quot2, minors2 = _regulator_parts(F, m)
    hm = qf.h_n(F, m)
    plus_m = tuple(F.split_primes(m))
    rhs = quot.zero()
    sigma_inv_gen = gamma(ell).gens[ell] if ell > 2 else None
    for j, e in enumerate(ul2.basis):
        u = qf.unit_residue(e, place)
        sym = pow(u, -1, ell)
        fs_cls = aug_quot(n, 1).class_of(
            RingElt.gen_minus_one(n, gamma(n).embed_from(ell, sym)))
        pm = gr.proj_new(minors2[j], plus_m)
        term = gr.mult_classes(gr.embed_class(pm, n), fs_cls)
        rhs = rhs + ((-1) ** j * hm) * term
    return lhs == rhs


def regulator_axiom_iv(F: QuadField, n: int, ell: int) -> bool:
    """The finite-part identity with signed single-cycle permutation sums."""
    if n % ell or F.omega(ell) != 1:
        raise ValueError("axiom (iv) needs a split prime dividing the level")
    split = F.split_primes(n)
    plus_n = tuple(split)
    quot = aug_quot(n, len(split))
    ul, _, _, minors = _regulator_parts(F, n)
    hn = qf.h_n(F, n)
    lhs = quot.zero()
    for j, e in enumerate(ul.basis):
        a = _fpart_dlog(F, e, ell)
        if a:
            lhs = lhs + ((-1) ** j * hn * a) * minors[j]
    lhs = gr.proj_new(lhs, plus_n)
    rhs = quot.zero()
    for mp in gr.permutations_of(split):
        if mp[ell] == ell or not gr.single_orbit_nonfixed(mp):
            continue
        d_sigma = prod([p for p, q2 in mp.items() if p != q2])
        mlevel = n // d_sigma
        ulm, _, quotm, minorsm = _regulator_parts(F, mlevel)
        hm = qf.h_n(F, mlevel)
        plus_m = tuple(F.split_primes(mlevel))
        pi_cls = gr.perm_pi(gr.PermData(n, tuple(sorted(mp.items()))))
        inner = quotm.zero()
        for j, e in enumerate(ulm.basis):
            a = _fpart_dlog(F, e, ell)
            if a:
                inner = inner + ((-1) ** j * hm * a) * minorsm[j]
        inner = gr.proj_new(inner, plus_m)
        term = gr.mult_classes(gr.embed_class(inner, n), pi_cls)
        rhs = rhs - gr.perm_sign(mp) * term
    return lhs == rhs


def regulator_axiom_v(F: QuadField, n: int, ell: int) -> bool:
    """h_{n ell} proj(R_{n ell}) = h_n proj(R_n) for inert ell not dividing n."""
    if n % ell == 0 or F.omega(ell) != -1:
        raise ValueError("axiom (v) needs an inert prime not dividing the level")
    nl = n * ell
    lhs = regulator(F, nl).scale(qf.h_n(F, nl)).proj_new(tuple(F.split_primes(nl)))
    rhs = regulator(F, n).scale(qf.h_n(F, n)).proj_new(tuple(F.split_primes(n))).embed(nl)
    return lhs == rhs


def theta_axiom_ii(F: QuadField, n: int, ell: int, homs=None):
    """Exact norm relation, plus the projection identity under homs."""
    exact = cyclo.norm_relation_check(F, n, ell)
    m = n // ell
    homs = homs or [make_reduction_hom(F, n, q) for q in find_aux_primes(F, n, 3)]
    fr_cls = aug_quot(n, 1).class_of(-1 * gr._frob_lift(n, m, ell))
    ok = exact
    for h in homs:
        lhs = gr.pi_d(theta_class(F, n, h), m)
        th_m = theta_class(F, m, _hom_at_level(F, m, h))
        rhs = gr.mult_classes(gr.embed_class(th_m, n), fr_cls)
        if lhs != rhs:
            ok = False
    return ok, "exact+reductions"


def theta_axiom_v(F: QuadField, n: int, ell: int, homs=None):
    """proj(2^{-s(n)} theta~'_n) = proj(2^{-s(n/ell)} theta~'_{n/ell}) under homs."""
    if n % ell or F.omega(ell) != -1:
        raise ValueError("axiom (v) needs an inert prime dividing the level")
    m = n // ell
    plus = tuple(F.split_primes(n))
    homs = homs or [make_reduction_hom(F, n, q) for q in find_aux_primes(F, n, 3)]
    for h in homs:
        lhs = gr.proj_new(theta_class(F, n, h), plus)
        th_m = theta_class(F, m, _hom_at_level(F, m, h))
        rhs = 2 * gr.embed_class(gr.proj_new(th_m, plus), n)
        if lhs != rhs:
            return False, "reductions"
    return True, "reductions"


def theta_axiom_i(F: QuadField, n: int, ell: int) -> bool:
    """alpha-payloads are units above ell (ell not dividing n)."""
    if n % ell == 0:
        raise ValueError("axiom (i) concerns ell not dividing n")
    return ell not in _alpha_support(F, n)


def _alpha_support(F: QuadField, n: int) -> set[int]:
    """Primes at which alpha_n can fail to be a unit (via binomial norms)."""
    mf = n * F.conductor
    plus, minus = cyclo.alpha_exponents(F, n)
    support = set()
    for a in list(plus) + list(minus):
        k = mf // gcd(a, mf)
        fac = nt.prime_factors(k)
        if len(fac) == 1:
            support.add(fac[0])
    return support


def verify_preks_axiom(F: QuadField, system: str, axiom: str, n: int, ell: int,
                       num_primes: int = 3) -> dict:
    """Check one pre-Kolyvagin-system axiom for a concrete system.

    system: "regulator" (h_n R_n) or "theta" (2^{-s} theta~'_n).
    axiom: "i", "ii", "iii", "iv" (the primed form), or "v".
    """
    method = "exact"
    supported = True
    if system == "regulator":
        if axiom == "i":
            ok = regulator_axiom_i(F, n, ell)
        elif axiom == "ii":
            ok, method = regulator_axiom_ii(F, n, ell)
        elif axiom == "iii":
            ok = regulator_axiom_iii(F, n, ell)
        elif axiom == "iv":
            ok = regulator_axiom_iv(F, n, ell)
        elif axiom == "v":
            ok = regulator_axiom_v(F, n, ell)
        else:
            raise ValueError(f"unknown axiom {axiom!r}")
    elif system == "theta":
        if axiom == "i":
            ok = theta_axiom_i(F, n, ell)
        elif axiom == "ii":
            ok, method = theta_axiom_ii(F, n, ell)
        elif axiom == "v":
            ok, method = theta_axiom_v(F, n, ell)
        else:
            # the finite/transverse local data of the derivative classes is
            # inherited from the underlying Euler system construction and has
            # no independent computable surface here
            ok, method, supported = False, "unsupported", False
    else:
        raise ValueError(f"unknown system {system!r}")
    verdict = "pass" if ok else ("unsupported" if not supported else "fail")
    return {"system": system, "axiom": axiom, "level": n, "ell": ell,
            "method": method, "verdict": verdict}
