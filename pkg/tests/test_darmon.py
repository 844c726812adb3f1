"""Both sides of the congruence, reductions, and the axiom verifiers."""

import random

import pytest

from darmoncheck import cyclo, groupring as gr, nt
from darmoncheck import quadfield as qf
from darmoncheck.darmon import (TensorElt, beta_class_at, beta_value,
                                bordered_regulator, derived_class,
                                find_aux_primes, make_reduction_hom,
                                prop94_residual, regulator,
                                regulator_from_basis, tensor_reduce,
                                theta_class, verify_base_case, verify_darmon,
                                verify_preks_axiom, _hom_at_level,
                                _required_congruence)
from darmoncheck.groupring import AugClass, RingElt, aug_quot, gamma
from darmoncheck.quadfield import QuadNum, fundamental_unit, h_n, make_field, unit_basis

F5 = make_field(5)


def test_base_cases_exact():
    for d in (2, 5, 10):
        ok, sign = verify_base_case(make_field(d))
        assert ok, d


def test_reduction_hom_multiplicative():
    q = find_aux_primes(F5, 11, 1)[0]
    h = make_reduction_hom(F5, 11, q)
    rng = random.Random(0)
    vals = []
    for _ in range(100):
        x = QuadNum(5, rng.randrange(-9, 10), rng.randrange(-9, 10))
        y = QuadNum(5, rng.randrange(-9, 10), rng.randrange(-9, 10))
        if x.is_zero() or y.is_zero():
            continue
        try:
            assert (h.value(x) + h.value(y)) % h.modulus == h.value(x * y)
        except nt.BadAuxiliaryPrime:
            continue


def test_reduction_hom_zeta_order():
    q = find_aux_primes(F5, 11, 1)[0]
    h = make_reduction_hom(F5, 11, q)
    assert nt.multiplicative_order(h.zeta, q) == 55


def test_two_generators_same_verdicts():
    # homs built from different primitive roots agree on verdicts
    q = find_aux_primes(F5, 11, 1)[0]
    h1 = make_reduction_hom(F5, 11, q)
    g2 = next(g for g in range(h1.g + 1, q)
              if nt.multiplicative_order(g, q) == q - 1)
    from darmoncheck.darmon import ReductionHom
    zeta2 = pow(g2, (q - 1) // 55, q)
    from math import gcd
    sd = 0
    zf = pow(zeta2, 11, q)
    for a in range(1, 6):
        if gcd(a, 5) == 1:
            sd += F5.omega(a) * pow(zf, a, q)
    h2 = ReductionHom(F5, 11, q, g2, zeta2, sd % q)
    t1 = theta_class(F5, 11, h1)
    t2 = theta_class(F5, 11, h2)
    r1 = tensor_reduce(regulator(F5, 11), h1)
    r2 = tensor_reduce(regulator(F5, 11), h2)
    assert (t1 + r1).is_zero() == (t2 + r2).is_zero()


def test_regulator_shapes():
    r1 = regulator(F5, 1)
    assert r1.degree == 0 and len(r1.terms) == 1
    r11 = regulator(F5, 11)
    assert r11.degree == 1 and len(r11.terms) == 2


def test_regulator_2x2_expansion():
    # r = 1: R = e0 (x) del(e1) - e1 (x) del(e0)
    from darmoncheck.darmon import del_lift
    pd, ul = unit_basis(F5, 11)
    quot = aug_quot(11, 1)
    manual = TensorElt(quot)
    manual.add_term(ul.basis[0], quot.class_of(del_lift(F5, ul.basis[1], ul.places[0], 11)))
    manual.add_term(ul.basis[1], -1 * quot.class_of(del_lift(F5, ul.basis[0], ul.places[0], 11)))
    assert manual == regulator(F5, 11)


def test_regulator_basis_independence():
    # permuting the basis and reorienting yields the identical element
    pd, ul = unit_basis(F5, 209)
    perm = [ul.basis[0], ul.basis[2], ul.basis[1]]
    places = [ul.places[1], ul.places[0]]
    sign = qf.regulator_sign(F5, perm, places)
    assert sign != 0
    if sign < 0:
        perm[0] = QuadNum(5, 1) / perm[0]
    base = regulator(F5, 209)
    other = regulator_from_basis(F5, perm, places, 209)
    assert base == other
    # inverting one element (and compensating) also matches
    flipped = [ul.basis[0], QuadNum(5, 1) / ul.basis[1], ul.basis[2]]
    s2 = qf.regulator_sign(F5, flipped, ul.places)
    assert s2 < 0
    flipped[2] = QuadNum(5, 1) / flipped[2]
    assert qf.regulator_sign(F5, flipped, ul.places) > 0
    assert regulator_from_basis(F5, flipped, ul.places, 209) == base


def test_bordered_equals_regulator():
    assert bordered_regulator(F5, 11, 11) == regulator(F5, 11)
    b = bordered_regulator(F5, 11, 209)
    assert b.degree == 1 and b.level == 209
    with pytest.raises(ValueError):
        bordered_regulator(F5, 209, 11)


def test_finlem_no_transverse_part():
    # away from the level, every regulator payload is a unit
    _, ul = unit_basis(F5, 11)
    for ell in (19, 29, 31):
        if F5.omega(ell) != 1:
            continue
        pl = F5.place_above(ell)
        for e in ul.basis:
            assert qf.ord_at(e, pl) == 0 and qf.ord_at(e, pl.conj()) == 0


def test_theta_class_closed_form_rank_one():
    # at a split prime level: sum_a sigma^a(alpha) (x) (sigma^a - 1)
    q = find_aux_primes(F5, 11, 1)[0]
    h = make_reduction_hom(F5, 11, q)
    th = theta_class(F5, 11, h)
    G = gamma(11)
    quot = aug_quot(11, 1)
    thp = cyclo.theta_prime(F5, 11)
    acc = quot.zero()
    g = G.identity
    sigma = G.gens[11]
    for a in range(1, 10):
        g = G.mult(g, sigma)
        val = h.alpha_value(11, thp.twist_residue(g))
        acc = acc + val * quot.class_of(RingElt.gen_minus_one(11, g))
    assert acc == th


def test_theta_class_inert_closed_form():
    # theta~'_33 = 2 sum_a sigma^a(alpha_11) (x) (sigma^a-1) - alpha_1^2 (x) (Fr_3 - 1)
    q = find_aux_primes(F5, 33, 1)[0]
    h = make_reduction_hom(F5, 33, q)
    th = theta_class(F5, 33, h)
    G = gamma(33)
    quot = aug_quot(33, 1)
    h11 = _hom_at_level(F5, 11, h)
    thp = cyclo.theta_prime(F5, 11)
    acc = quot.zero()
    sigma11 = gamma(11).gens[11]
    g = 1
    for a in range(1, 10):
        g = g * sigma11 % 11
        val = h11.alpha_value(11, thp.twist_residue(g))
        acc = acc + (2 * val) * quot.class_of(
            RingElt.gen_minus_one(33, G.embed_from(11, g)))
    h1 = _hom_at_level(F5, 1, h)
    a1val = h1.alpha_value(1, 1)
    fr3 = gr._frob_lift(33, 3, 11)
    acc = acc - (2 * a1val) * quot.class_of(fr3)
    assert acc == th


def test_verify_darmon_pass():
    assert verify_darmon(F5, 1, num_primes=3).verdict == "pass"
    rep = verify_darmon(F5, 11, num_primes=5)
    assert rep.verdict == "pass" and len([p for p in rep.primes
                                          if p.verdict == "pass"]) >= 5
    assert verify_darmon(F5, 33, num_primes=3).verdict == "pass"


def test_verify_darmon_wrong_sign_canary():
    rep = verify_darmon(F5, 11, num_primes=5, wrong_sign=True)
    assert rep.verdict == "fail"


def test_verify_report_schema():
    rep = verify_darmon(F5, 11, num_primes=2)
    d = rep.as_dict()
    assert set(d) >= {"field", "level", "r", "s", "h_n", "primes", "verdict"}
    assert all(set(p) == {"q", "residual", "verdict"} for p in d["primes"])


def test_prop94_levels():
    for n in (11, 33):
        for q in find_aux_primes(F5, n, 3):
            h = make_reduction_hom(F5, n, q)
            assert prop94_residual(F5, n, h).is_zero()


def test_beta_depends_only_on_plus_part():
    # beta_{33+} = beta_11
    q = find_aux_primes(F5, 33, 1)[0]
    h = make_reduction_hom(F5, 33, q)
    h11 = _hom_at_level(F5, 11, h)
    v_from_33, cls33 = derived_class(F5, 33)
    v_from_11, cls11 = derived_class(F5, 11)
    assert v_from_33(h11) == v_from_11(h11)
    assert cls33.parent.level == 33 and cls11.parent.level == 11


def test_regreg1lem_exact():
    ok, method = verify_preks_axiom(F5, "regulator", "ii", 11, 11)["verdict"], None
    res = verify_preks_axiom(F5, "regulator", "ii", 11, 11)
    assert res["verdict"] == "pass" and res["method"] == "exact"


def test_axioms_battery():
    cases = [
        ("regulator", "ii", 11, 11), ("regulator", "iii", 11, 11),
        ("regulator", "iv", 11, 11), ("regulator", "v", 11, 3),
        ("regulator", "iii", 33, 11), ("regulator", "iv", 33, 11),
        ("theta", "ii", 11, 11), ("theta", "v", 33, 3),
        ("theta", "i", 11, 7), ("regulator", "i", 11, 19),
    ]
    for system, axiom, n, ell in cases:
        res = verify_preks_axiom(F5, system, axiom, n, ell)
        assert res["verdict"] == "pass", (system, axiom, n, ell, res)


def test_theta_local_axioms_unsupported():
    for axiom in ("iii", "iv"):
        res = verify_preks_axiom(F5, "theta", axiom, 11, 11)
        assert res["verdict"] == "unsupported"


def test_indstep_ii_identity():
    # h_n proj_{nl}(R_{n,nl} v) = proj_n(R_n) pi_l(v)
    #   - sum_q h_{n/q} proj_n(R_{n/q,n} v) pi_l(Fr_q - 1)
    n, ell = 11, 19
    nl = n * ell
    v = RingElt.gen_minus_one(n, gamma(n).gens[11])  # an element of I_n
    v_cls_l = aug_quot(nl, 1).class_of(v.embed(nl))
    plus_nl = tuple(F5.split_primes(nl))
    plus_n = tuple(F5.split_primes(n))
    hn = h_n(F5, n)
    lhs = bordered_regulator(F5, n, nl).mult_class(v_cls_l).proj_new(plus_nl).scale(hn)
    pi_l_v = aug_quot(nl, 1).class_of(v.embed(nl).pi(ell))
    term1 = regulator(F5, n).proj_new(plus_n).embed(nl).mult_class(pi_l_v)
    total = term1
    for q2 in F5.split_primes(n):
        m = n // q2
        hq = h_n(F5, m)
        fr_cls = aug_quot(nl, 1).class_of(gr._frob_lift(nl, ell, q2))
        v_cls_n = aug_quot(n, 1).class_of(v)
        inner = bordered_regulator(F5, m, n).mult_class(v_cls_n).proj_new(plus_n)
        total = total - inner.embed(nl).mult_class(fr_cls).scale(hq)
    assert lhs == total


def test_required_congruence_monotone():
    assert _required_congruence(F5, 1) == 5
    assert _required_congruence(F5, 11) % 55 == 0
    assert _required_congruence(F5, 209) % 1045 == 0


def test_tensor_elt_normalisation():
    quot = aug_quot(11, 1)
    x = QuadNum(5, 2, 1)
    c = AugClass(quot, tuple(1 if d > 1 else 0 for d in quot.invariants))
    t1 = TensorElt(quot, [(x, c)])
    t2 = TensorElt(quot, [(QuadNum(5, 1) / x, -1 * c)])
    assert t1 == t2  # x^{-1} (x) -v is normalised to x (x) v
    t3 = TensorElt(quot, [(x, c), (x, -1 * c)])
    assert t3.is_zero()


def test_vacuous_detection():
    # a level whose new component is 2-torsion only: gcd(l-1) a power of 2
    # use the quotient oddness helper directly
    from darmoncheck.darmon import _group_odd_trivial
    assert _group_odd_trivial(aug_quot(3, 1))  # Z/2
    assert not _group_odd_trivial(aug_quot(11, 1))
