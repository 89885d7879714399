import dataclasses
import math

import numpy as np
import pytest
from scipy.integrate import quad

from levy_occupation import lastpassage as lp
from levy_occupation.kernels import OccupationWindow
from levy_occupation.models import LevyModel
from levy_occupation.scale import ScaleEval

WINDOW = OccupationWindow(0.4, 1.1, -0.2, 0.3)
CORRIDOR = lp.Corridor(-1.0, 1.0)


def _query(model, x=0.3, kind=lp.SigmaKind.PLUS, lam=1.0):
    return lp.LastPassageQuery(model, WINDOW, CORRIDOR, lam, x, kind=kind)


# ---------------------------------------------------------------- classical

def test_exit_up_is_exponential(jd):
    assert lp.classical_exit(jd, 0.6, 0.2, "up", d=1.0) == pytest.approx(
        math.exp(-jd.phi(0.6) * 0.8), rel=1e-12)
    assert lp.classical_exit(jd, 0.6, 1.3, "up", d=1.0) == 1.0


def test_two_sided_exit_mass(bm):
    # driftless BM leaves any corridor with probability one, symmetrically
    up = lp.classical_exit(bm, 0.0, 0.0, "up_two", c=-1.0, d=1.0)
    dn = lp.classical_exit(bm, 0.0, 0.0, "down_two", c=-1.0, d=1.0)
    assert up == pytest.approx(0.5, rel=1e-12)
    assert up + dn == pytest.approx(1.0, rel=1e-12)


def test_one_sided_down_as_wide_corridor_limit(jd, bm):
    for m in (jd, bm):
        one = lp.classical_exit(m, 0.6, 0.2, "down", c=-1.0)
        two = lp.classical_exit(m, 0.6, 0.2, "down_two", c=-1.0, d=40.0)
        assert one == pytest.approx(two, rel=1e-10)
    # oscillating process passes below any level almost surely
    assert lp.classical_exit(bm, 0.0, 0.7, "down", c=0.0) == pytest.approx(
        1.0, rel=1e-12)


def test_creep_equals_down_without_jumps(bm, jd):
    # a continuous path can only cross downward by creeping
    assert lp.classical_exit(bm, 0.5, 0.7, "creep", c=0.0) == pytest.approx(
        lp.classical_exit(bm, 0.5, 0.7, "down", c=0.0), rel=1e-10)
    creep = lp.classical_exit(jd, 0.5, 0.7, "creep", c=0.0)
    down = lp.classical_exit(jd, 0.5, 0.7, "down", c=0.0)
    assert 0.0 < creep < down


def test_creep_vanishes_without_gaussian_part(cl):
    assert lp.classical_exit(cl, 0.5, 0.7, "creep", c=0.0) == 0.0


def test_overshoot_weight_factorizes(jd, bm):
    """With Exp(alpha) jumps the undershoot below c is Exp(alpha) and
    independent of the crossing data, so the v-weighted transform is
    creep + (jump part) * alpha/(alpha+v)."""
    q, x, c, d = 0.6, 0.2, -1.0, 1.0
    sc = ScaleEval(jd, q)
    creep2 = 0.5 * jd.sigma ** 2 * (
        sc.W_prime(x - c) - sc.W(x - c) * sc.W_prime(d - c) / sc.W(d - c))
    base = lp.classical_exit(jd, q, x, "down_two", c=c, d=d)
    al = jd.jumps.alpha
    for v in (0.5, 1.5, 3.0):
        got = lp.classical_exit(jd, q, x, "down_two", c=c, d=d, v=v)
        assert got == pytest.approx(
            creep2 + (base - creep2) * al / (al + v), rel=1e-10)
    # no jumps: the weight never applies
    assert lp.classical_exit(bm, q, x, "down_two", c=c, d=d, v=1.2) == \
        pytest.approx(lp.classical_exit(bm, q, x, "down_two", c=c, d=d),
                      rel=1e-12)


def test_point_hit_transform(bm, jd, cl):
    for m in (bm, jd):        # sigma > 0: free-resolvent ratio
        q, x, level = 0.8, 0.7, 0.0
        sc = ScaleEval(m, q)

        def ufree(a, b):
            return m.phi_prime(q) * math.exp(-m.phi(q) * (b - a)) - sc.W(a - b)

        assert lp.classical_exit(m, q, x, "hit", level=level) == pytest.approx(
            ufree(x, level) / ufree(level, level), rel=1e-10)
    # from below, hitting is just continuous up-passage
    assert lp.classical_exit(cl, 0.8, -0.5, "hit", level=0.0) == pytest.approx(
        math.exp(-cl.phi(0.8) * 0.5), rel=1e-12)


def test_killed_potential_mass_balance(jd):
    q, x = 0.6, 0.8
    tot, _ = quad(lambda y: lp.classical_potential_density(jd, q, x, y),
                  0.0, 60.0, limit=200)
    down = lp.classical_exit(jd, q, x, "down", c=0.0)
    assert q * tot + down == pytest.approx(1.0, abs=1e-8)


# ---------------------------------------------------------------- mu hat

def test_mu_hat_brownian_anchors(bm):
    # psi(s) = s^2/2, lam = 2, phi(2) = 2
    assert lp.mu_hat(bm, 2.0, 1.0) == pytest.approx(3.0, rel=1e-12)
    # the pole at s = phi(lam) is removable: value psi'(phi(lam))
    assert lp.mu_hat(bm, 2.0, 2.0) == pytest.approx(2.0, rel=1e-10)
    for eps in (1e-7, -1e-7):
        assert lp.mu_hat(bm, 2.0, 2.0 + eps) == pytest.approx(2.0, rel=1e-5)


def test_mu_measure_matches_transform(bm, jd):
    # BM: atom sigma^2 phi/2 plus flat density lam -> 1 + lam/s exactly
    mv = lp.mu_measure(bm, 2.0)
    assert mv.atom_at_zero == pytest.approx(1.0, rel=1e-12)
    for s in (0.5, 1.0, 4.0):
        assert mv.atom_at_zero + 2.0 / s == pytest.approx(
            lp.mu_hat(bm, 2.0, s), rel=1e-10)
    # with jumps the density picks up the tail mass of the jump measure
    mv = lp.mu_measure(jd, 1.0)
    for s in (1.0, 5.0):
        v, _ = quad(lambda y: math.exp(-s * y) * mv.density(y), 0.0, 80.0,
                    limit=200)
        assert mv.atom_at_zero + v == pytest.approx(lp.mu_hat(jd, 1.0, s),
                                                    abs=1e-8)


# ---------------------------------------------------------------- resolvents

def test_global_resolvent_equal_rates_is_free_resolvent(jd):
    w = OccupationWindow(0.7, 0.7, -0.2, 0.3)
    sc = ScaleEval(jd, 0.7)
    for x, y in ((0.4, -0.3), (-0.1, 0.2), (1.0, -2.0)):
        free = jd.phi_prime(0.7) * math.exp(-jd.phi(0.7) * (y - x)) \
            - sc.W(x - y)
        assert lp.global_resolvent_density(jd, w, x, y) == pytest.approx(
            free, rel=1e-9)


def test_wide_corridor_matches_global(bm, jd):
    wide = lp.Corridor(-30.0, 30.0)
    for m in (bm, jd):
        for x, y in ((0.3, -0.4), (-0.6, 0.1)):
            g = lp.global_resolvent_density(m, WINDOW, x, y)
            c = lp.corridor_resolvent_density(m, WINDOW, wide, x, y)
            assert c == pytest.approx(g, rel=1e-10)


def test_corridor_green_function_brownian(bm):
    # rate-free corridor occupation density for BM has the classical
    # tent shape 2 (x-c)(d-y)/(d-c) - 2 (x-y)^+  for y <= x side by symmetry
    w0 = OccupationWindow(0.0, 0.0, -0.2, 0.3)
    c, d = -1.0, 1.0
    for x, y in ((0.2, -0.5), (-0.3, 0.4), (0.5, 0.5)):
        expect = 2.0 * (x - c) * (d - y) / (d - c) - 2.0 * max(x - y, 0.0)
        got = lp.corridor_resolvent_density(bm, w0, CORRIDOR, x, y)
        assert got == pytest.approx(expect, abs=1e-10)


def test_corridor_apply_mass_balance(bm):
    w0 = OccupationWindow(0.0, 0.0, -0.2, 0.3)
    lam, x = 0.7, 0.2
    tot = lp.corridor_resolvent_apply(bm, w0, CORRIDOR, x,
                                      lambda y: np.ones_like(y), lam=lam)
    up = lp.classical_exit(bm, lam, x, "up_two", c=-1.0, d=1.0)
    dn = lp.classical_exit(bm, lam, x, "down_two", c=-1.0, d=1.0)
    assert lam * tot + up + dn == pytest.approx(1.0, abs=1e-9)


def test_first_passage_occupation_reductions(jd):
    w = OccupationWindow(0.7, 0.7, -0.2, 0.3)
    assert lp.first_passage_occupation(jd, w, 0.2, 1.0) == pytest.approx(
        lp.classical_exit(jd, 0.7, 0.2, "up", d=1.0), rel=1e-10)
    assert lp.first_passage_occupation(jd, w, 0.2, 1.0, c=-1.0) == \
        pytest.approx(lp.classical_exit(jd, 0.7, 0.2, "up_two",
                                        c=-1.0, d=1.0), rel=1e-10)
    # a lower barrier can only remove paths
    one = lp.first_passage_occupation(jd, WINDOW, 0.2, 1.0)
    two = lp.first_passage_occupation(jd, WINDOW, 0.2, 1.0, c=-1.0)
    assert 0.0 < two < one < 1.0
    assert lp.first_passage_occupation(jd, WINDOW, 1.0, 1.0) == 1.0


# ---------------------------------------------------------------- last times

def test_totals_decompose_into_creep_and_density(bm, jd):
    for m in (bm, jd):
        q = _query(m, kind=lp.SigmaKind.MINUS)
        v, _ = quad(lambda y: lp.last_down_density(q, y), -1.0, 0.0,
                    limit=200)
        assert lp.last_down_creep(q) + v == pytest.approx(
            lp.last_totals(q), abs=1e-8)
        qp = _query(m)
        mv = lp.last_up_measure(qp)
        vi, _ = quad(mv.density, mv.support[0], mv.support[1], limit=200)
        assert mv.atom_at_zero + vi == pytest.approx(
            lp.last_totals(qp), abs=1e-8)


def test_up_jump_component_needs_jumps(bm, jd):
    q = _query(bm)
    assert lp.last_up_jump_density(q, 0.2) == 0.0
    assert lp.last_up_jump_density(_query(jd), 0.2) > 0.0


def test_totals_vanish_from_lower_corner(bm, jd):
    for m in (bm, jd):
        for kind in lp.SigmaKind:
            assert lp.last_totals(_query(m, x=-1.0, kind=kind)) == \
                pytest.approx(0.0, abs=1e-12)


def test_hit_total_between_signed_totals(bm):
    tp = lp.last_totals(_query(bm))
    tm = lp.last_totals(_query(bm, kind=lp.SigmaKind.MINUS))
    th = lp.last_hit(_query(bm, kind=lp.SigmaKind.ZERO))
    assert min(tp, tm) < th < tp + tm
    # continuous paths change sign exactly when they touch the level
    assert th == pytest.approx(
        lp.last_totals(_query(bm, kind=lp.SigmaKind.ZERO)), rel=1e-12)


def _tail_completed(f, lo, hi):
    """Integrate f over (lo, hi) and append an exponential-tail estimate
    from the local decay rate at hi."""
    v, _ = quad(f, lo, hi, limit=300)
    fh, fh1 = f(hi), f(hi - 0.5)
    if fh > 0.0 and fh1 > fh:
        rate = 2.0 * math.log(fh1 / fh)
        v += fh / rate
    return v


def test_joint_densities_integrate_to_totals(bm, jd):
    for m in (bm, jd):
        qp = _query(m)
        qm = _query(m, kind=lp.SigmaKind.MINUS)
        qz = _query(m, kind=lp.SigmaKind.ZERO)
        up = _tail_completed(lp.joint_laws(qp, "up_creep"), 1e-12, 8.0)
        assert up == pytest.approx(lp.last_up_measure(qp).atom_at_zero,
                                   rel=1e-6)
        dn = _tail_completed(lp.joint_laws(qm, "down_creep"), 1e-12, 8.0)
        assert dn == pytest.approx(lp.last_down_creep(qm), rel=1e-6)
        f_hit = lp.joint_laws(qz, "hit")
        pos = _tail_completed(f_hit, 1e-12, 8.0)
        neg = _tail_completed(lambda u: f_hit(-u), 1e-12, 8.0)
        assert pos + neg == pytest.approx(lp.last_hit(qz), rel=1e-6)


def test_difference_joint_density(bm, jd):
    f = lp.joint_laws(_query(jd), "difference")
    assert f(0.5, 0.3, 0.4) > 0.0
    with pytest.raises(ValueError):
        f(-0.1, 0.3, 0.4)
    with pytest.raises(ValueError):
        f(0.5, 0.3, 1.5)
    assert lp.joint_laws(_query(bm), "difference")(0.5, 0.3, 0.4) == 0.0


def test_last_infty_dispatch():
    osc = LevyModel(sigma=1.0, drift=0.0)
    up = LevyModel(sigma=1.0, drift=1.0)
    dn = LevyModel(sigma=1.0, drift=-1.0)
    for kind in lp.SigmaKind:
        r = lp.last_infty(osc, WINDOW, CORRIDOR, 0.3, kind)
        assert r.value == 0.0 and not r.time_finite
    with pytest.raises(ValueError):
        lp.last_infty(up, WINDOW, CORRIDOR, 0.3, lp.SigmaKind.PLUS)
    with pytest.raises(ValueError):
        lp.last_infty(dn, WINDOW, CORRIDOR, 0.3, lp.SigmaKind.MINUS)
    # drift up: last time below is psi'(0) times the corridor density at 0
    r = lp.last_infty(up, WINDOW, CORRIDOR, 0.3, lp.SigmaKind.MINUS)
    u0 = lp.corridor_resolvent_density(up, WINDOW, CORRIDOR, 0.3, 0.0)
    assert r.time_finite
    assert r.value == pytest.approx(up.psi_prime0() * u0, rel=1e-10)
    # drift down: last sign change scales by psi'(phi(0)); here phi(0)=2
    r = lp.last_infty(dn, WINDOW, CORRIDOR, 0.3, lp.SigmaKind.ZERO)
    u0 = lp.corridor_resolvent_density(dn, WINDOW, CORRIDOR, 0.3, 0.0)
    assert dn.phi(0.0) == pytest.approx(2.0, rel=1e-12)
    assert r.value == pytest.approx(float(dn.psi_prime(2.0)) * u0, rel=1e-10)


def test_prob_sigma_zero_anchors(bm, jd):
    lam = 1.0
    # from the level itself every variant starts immediately
    for kind in lp.SigmaKind:
        assert lp.prob_sigma_zero(bm, lam, 0.0, kind) == 0.0
    # starting above zero there is always time above zero
    assert lp.prob_sigma_zero(bm, lam, 0.5, lp.SigmaKind.PLUS) == 0.0
    assert lp.prob_sigma_zero(jd, lam, 0.5, lp.SigmaKind.PLUS) == 0.0
    # no time below zero before the clock rings = never passing below
    for m in (bm, jd):
        expect = 1.0 - lp.classical_exit(m, lam, 0.5, "down", c=0.0)
        assert lp.prob_sigma_zero(m, lam, 0.5, lp.SigmaKind.MINUS) == \
            pytest.approx(expect, rel=1e-10)
    # BM reaches zero exactly when it crosses it
    assert lp.prob_sigma_zero(bm, lam, -0.5, lp.SigmaKind.PLUS) == \
        pytest.approx(1.0 - math.exp(-bm.phi(lam) * 0.5), rel=1e-10)
    assert lp.prob_sigma_zero(bm, lam, 0.5, lp.SigmaKind.ZERO) == \
        pytest.approx(1.0 - math.exp(-bm.phi(lam) * 0.5), rel=1e-10)


def test_equal_rate_examples(bm, jd):
    for m in (bm, jd):
        assert lp.example_pq_equal(m, 0.0, 1.0, 0.3, lp.SigmaKind.MINUS) == \
            pytest.approx(1.0, abs=1e-12)
        assert lp.example_pq_equal(m, 0.0, 1.0, 0.3, lp.SigmaKind.ZERO) == \
            pytest.approx(1.0, abs=1e-12)
        assert lp.example_pq_equal(m, 1e-7, 1.0, 0.3, lp.SigmaKind.PLUS) == \
            pytest.approx(1.0, abs=1e-5)
        v = lp.example_pq_equal(m, 0.8, 1.0, 0.3, lp.SigmaKind.PLUS)
        w = lp.example_pq_equal(m, 1.6, 1.0, 0.3, lp.SigmaKind.PLUS)
        assert 0.0 < w < v < 1.0


def test_query_validation(bm):
    with pytest.raises(ValueError):
        _query(bm, lam=-1.0)
    with pytest.raises(ValueError):
        _query(bm, x=1.5)
    with pytest.raises(ValueError):
        lp.LastPassageQuery(bm, WINDOW, lp.Corridor(-0.1, 1.0), 1.0, 0.0)
