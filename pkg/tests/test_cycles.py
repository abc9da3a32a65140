import math

import numpy as np
import pytest

from dsmlab import (
    AttractingCycle,
    CycleError,
    Parameter,
    TongueStatus,
    circle_dist,
    classify,
    distinguished_point,
    eval_circle,
    find_attracting_cycle,
    mod1,
    multiplier,
    orbit_type,
    semiconjugacy_phi,
)
from dsmlab.cycles import _phi_lift

from conftest import P_SYM, P_TWO


def test_symmetric_fixed_point_family():
    for b in (0.55, 0.6, 0.75, 0.9, 1.0):
        cyc = find_attracting_cycle(Parameter(0.5, b), 5)
        assert cyc is not None
        assert cyc.q == 1
        assert circle_dist(cyc.points[0], 0.5) < 1e-12
        assert abs(cyc.lam - (2.0 - 2.0 * b)) < 1e-9


def test_superattracting_multiplier_is_zero():
    cyc = find_attracting_cycle(Parameter(0.5, 1.0), 5)
    assert cyc is not None and cyc.q == 1
    assert cyc.lam == 0.0


def test_no_cycle_below_half():
    assert find_attracting_cycle(Parameter(0.5, 0.3), 10) is None
    assert classify(Parameter(0.5, 0.2), 10).status is TongueStatus.NO_ATTRACTING_CYCLE_FOUND
    assert classify(Parameter(0.0, 0.75), 10).status is TongueStatus.NO_ATTRACTING_CYCLE_FOUND


def test_multiplier_values_and_rotation_invariance(two_cycle):
    p = Parameter(0.5, 0.9)
    cyc = find_attracting_cycle(p, 5)
    assert abs(multiplier(p, cyc) - 0.2) < 1e-12
    lam0 = multiplier(P_TWO, two_cycle)
    rotated = AttractingCycle(
        q=two_cycle.q,
        points=two_cycle.points[1:] + two_cycle.points[:1],
        lam=two_cycle.lam,
        distinguished_index=0,
    )
    assert abs(multiplier(P_TWO, rotated) - lam0) < 1e-12


def test_multiplier_rejects_repelling():
    # x = 0 is a repelling fixed point of the a = 0 map
    p = Parameter(0.0, 0.8)
    fake = AttractingCycle(q=1, points=(0.0,), lam=3.6, distinguished_index=0)
    with pytest.raises(CycleError):
        multiplier(p, fake)


def test_phi_is_identity_for_doubling():
    rng = np.random.RandomState(2)
    p = Parameter(0.0, 0.0)
    for x in rng.uniform(0, 1, 20):
        assert abs(semiconjugacy_phi(p, x, 40) - x) < 1e-11


def test_phi_superattracting_fixed_point():
    got = semiconjugacy_phi(Parameter(0.5, 1.0), 0.5, 40)
    assert circle_dist(got, 0.0) < 1e-11


def test_phi_monotone_and_depth_consistent():
    p = Parameter(0.23, 0.91)
    xs = np.sort(np.random.RandomState(4).uniform(0, 1, 200))
    vals = [_phi_lift(p, x, 60) for x in xs]
    for v0, v1 in zip(vals, vals[1:]):
        assert v0 <= v1 + 1e-9
    bound = (0.5 + p.b / math.pi) / 2 ** 30
    for x in xs[::20]:
        assert abs(_phi_lift(p, x, 30) - _phi_lift(p, x, 90)) <= bound + 1e-15


def test_orbit_type_period_one():
    cls = classify(Parameter(0.5, 0.8), 5)
    assert cls.orbit_type.q == 1 and cls.orbit_type.k == 0
    assert cls.orbit_type.value == 0.0


def test_orbit_type_period_two_pair():
    cls = classify(P_TWO, 8)
    assert cls.orbit_type.q == 2
    mirror = classify(P_TWO.mirrored(), 8)
    assert mirror.orbit_type.q == 2
    assert {cls.orbit_type.k, mirror.orbit_type.k} == {1, 2}


def test_classification_mirror_symmetry():
    rng = np.random.RandomState(6)
    checked = 0
    for _ in range(60):
        p = Parameter(rng.uniform(-0.5, 0.5), rng.uniform(0.75, 1.0))
        cls = classify(p, 8)
        if cls.status is not TongueStatus.IN_TONGUE:
            continue
        mir = classify(p.mirrored(), 8)
        assert mir.status is TongueStatus.IN_TONGUE
        q, k = cls.orbit_type.q, cls.orbit_type.k
        assert mir.orbit_type.q == q
        assert mir.orbit_type.k == (2 ** q - 1 - k) % (2 ** q - 1)
        checked += 1
    assert checked >= 5


def test_cycle_ordering_and_margin(two_cycle):
    pts = two_cycle.points
    for i in range(two_cycle.q):
        nxt = eval_circle(P_TWO, pts[i])
        assert circle_dist(nxt, pts[(i + 1) % two_cycle.q]) < 1e-10
    assert 0.0 <= two_cycle.lam < 1.0


def test_type_stability_across_cycle_points(two_cycle):
    # the semi-conjugacy sends the whole cycle onto one doubling orbit
    ot = orbit_type(P_TWO, two_cycle)
    den = 2 ** two_cycle.q - 1
    i0 = two_cycle.distinguished_index
    for j in range(two_cycle.q):
        x = two_cycle.points[(i0 + j) % two_cycle.q]
        expect = (ot.k * 2 ** j) % den / den
        assert circle_dist(semiconjugacy_phi(P_TWO, x, 80), expect) < 1e-9


def test_distinguished_point_conventions(two_cycle):
    cyc = find_attracting_cycle(P_SYM, 5)
    assert cyc.distinguished_index == 0
    assert distinguished_point(P_SYM, cyc) == 0
    idx = distinguished_point(P_TWO, two_cycle)
    assert idx == two_cycle.distinguished_index
    # forward orbit of 1/2 at steps = 0 mod q lands on the distinguished point
    x = 0.5
    for _ in range(200 * two_cycle.q):
        x = eval_circle(P_TWO, x)
    assert circle_dist(x, two_cycle.points[idx]) < 1e-6


def test_classify_is_deterministic():
    a = classify(P_TWO, 8)
    b = classify(P_TWO, 8)
    assert a.cycle.points == b.cycle.points
    assert a.cycle.lam == b.cycle.lam
