import cmath
import math

import numpy as np
import pytest

from dsmlab import (
    DomainError,
    LinearizationError,
    Parameter,
    TongueStatus,
    classify,
    critical_angle,
    critical_points,
    eval_complex,
    invert_uniformization,
    koenigs_frame,
    koenigs_value,
    reflect,
    superattracting_parameters,
    trace_internal_ray,
    uniformize,
)
from dsmlab.cycles import AttractingCycle, circle_dist, eval_circle

from conftest import P_SYM, P_TWO

TWO_PI = 2.0 * math.pi


@pytest.fixture(scope="module")
def sym_frame(sym_cycle):
    return koenigs_frame(P_SYM, sym_cycle)


def test_koenigs_normalization(sym_frame):
    assert koenigs_value(sym_frame, sym_frame.x_star) == 0j
    h = 1e-5
    fd = (
        koenigs_value(sym_frame, sym_frame.x_star + h)
        - koenigs_value(sym_frame, sym_frame.x_star - h)
    ) / (2 * h)
    assert abs(fd - sym_frame.normalization) < 1e-6


def test_koenigs_functional_equation(sym_frame):
    rng = np.random.RandomState(8)
    for _ in range(20):
        x = rng.uniform(0.3, 0.7)
        r = rng.uniform(0.9, 1.1)
        z = r * cmath.exp(complex(0, TWO_PI * x))
        kz = koenigs_value(sym_frame, z)
        kgz = koenigs_value(sym_frame, eval_complex(P_SYM, z))
        assert abs(kgz - sym_frame.lam * kz) <= 1e-7 * max(1.0, abs(kz))


def test_koenigs_reflection_symmetry(sym_frame):
    rng = np.random.RandomState(9)
    for _ in range(30):
        x = rng.uniform(0.35, 0.65)
        r = rng.uniform(0.92, 1.08)
        z = r * cmath.exp(complex(0, TWO_PI * x))
        kz = koenigs_value(sym_frame, z)
        ke = koenigs_value(sym_frame, reflect(z))
        assert abs(ke - kz.conjugate()) < 1e-8 * max(1.0, abs(kz))


def test_koenigs_signals_outside_basin(sym_frame):
    # the repelling fixed point of the circle map is not attracted
    with pytest.raises(LinearizationError):
        koenigs_value(sym_frame, cmath.exp(complex(0, TWO_PI * 0.2619389696317057)))


def test_frame_rejects_window_violations():
    cyc = classify(Parameter(0.5, 1.0), 5).cycle  # superattracting
    with pytest.raises(LinearizationError):
        koenigs_frame(Parameter(0.5, 1.0), cyc)


def test_critical_angle_on_symmetry_line(sym_cycle):
    assert abs(critical_angle(P_SYM, sym_cycle) - math.pi / 2) < 1e-6
    p = Parameter(0.5, 0.9)
    cyc = classify(p, 5).cycle
    assert abs(critical_angle(p, cyc) - math.pi / 2) < 1e-6


def test_critical_angle_needs_b_below_one():
    p = Parameter(0.37, 1.0)
    cls = classify(p, 8)
    if cls.status is TongueStatus.IN_TONGUE:
        with pytest.raises(DomainError):
            critical_angle(p, cls.cycle)


def test_critical_angle_in_range_random():
    rng = np.random.RandomState(10)
    checked = 0
    for _ in range(40):
        p = Parameter(rng.uniform(-0.5, 0.5), rng.uniform(0.8, 0.995))
        cls = classify(p, 8)
        if cls.status is not TongueStatus.IN_TONGUE:
            continue
        if not 1e-4 < cls.cycle.lam < 1 - 1e-4:
            continue
        nu = critical_angle(p, cls.cycle)
        assert 0.0 < nu < math.pi
        checked += 1
    assert checked >= 5


def test_uniformize_symmetric_values():
    uv = uniformize(P_SYM)
    assert abs(uv.xi - (-0.5)) < 1e-6
    assert abs(abs(uv.xi) - uv.lam) < 1e-10
    assert abs(uv.nu - math.pi / 2) < 1e-6
    # the invariant never lands on the slit [0, 1)
    assert not (uv.xi.imag == 0.0 and uv.xi.real >= 0.0)
    uv2 = uniformize(P_TWO)
    assert 0.0 < uv2.nu < math.pi
    assert abs(abs(uv2.xi) - uv2.lam) < 1e-10


def test_uniformize_requires_tongue():
    with pytest.raises(DomainError):
        uniformize(Parameter(0.5, 0.2))


def test_invert_round_trip_fixed_point():
    p = invert_uniformization(P_SYM, complex(-0.5, 0.0))
    assert abs(p.a - P_SYM.a) < 1e-7
    assert abs(p.b - P_SYM.b) < 1e-7


def test_invert_symmetry_line_target():
    p = invert_uniformization(P_SYM, complex(-0.2, 0.0))
    assert circle_dist(p.a, 0.5) < 1e-6
    assert abs(p.b - 0.9) < 1e-6


def test_invert_random_targets_round_trip():
    rng = np.random.RandomState(12)
    for _ in range(3):
        lam = rng.uniform(0.2, 0.8)
        nu = rng.uniform(0.5, math.pi - 0.5)
        w = lam * cmath.exp(complex(0, 2 * nu))
        p = invert_uniformization(P_SYM, w)
        uv = uniformize(p)
        assert abs(uv.xi - w) < 1e-6


def test_invert_rejects_bad_targets():
    with pytest.raises(DomainError):
        invert_uniformization(P_SYM, complex(0.5, 0.0))  # on the slit
    with pytest.raises(DomainError):
        invert_uniformization(P_SYM, complex(1.2, 0.4))  # outside the disk


def test_ray_on_symmetry_angle():
    lams = [0.5, 0.4, 0.3, 0.2]
    params = trace_internal_ray(P_SYM, math.pi / 2, lams)
    for lam, p in zip(lams, params):
        assert circle_dist(p.a, 0.5) < 1e-6
        assert abs(p.b - (1.0 - lam / 2.0)) < 1e-6
    # moduli decrease strictly along the ray
    moduli = [abs(uniformize(p).xi) for p in params]
    assert all(m0 > m1 for m0, m1 in zip(moduli, moduli[1:]))


def test_rays_mirror_each_other():
    nu = 1.2
    lams = [0.5, 0.35]
    ray_a = trace_internal_ray(P_SYM, nu, lams)
    ray_b = trace_internal_ray(P_SYM, math.pi - nu, lams)
    for pa, pb in zip(ray_a, ray_b):
        assert circle_dist(pa.a, -pb.a) < 1e-6
        assert abs(pa.b - pb.b) < 1e-6


def test_ray_stays_in_one_tongue():
    params = trace_internal_ray(P_SYM, 1.9, [0.5, 0.4, 0.3])
    keys = set()
    for p in params:
        cls = classify(p, 8)
        assert cls.status is TongueStatus.IN_TONGUE
        keys.add((cls.orbit_type.q, cls.orbit_type.k))
    assert len(keys) == 1


def test_ray_input_validation():
    with pytest.raises(DomainError):
        trace_internal_ray(P_SYM, 0.0, [0.5, 0.4])
    with pytest.raises(DomainError):
        trace_internal_ray(P_SYM, 1.0, [0.4, 0.5])  # not descending


def test_superattracting_counts_and_residuals():
    for q, expected in ((1, 1), (2, 2), (3, 6)):
        entries = superattracting_parameters(q)
        assert len(entries) == expected
        for a, ot in entries:
            assert ot.q == q
            p = Parameter(a, 1.0)
            x = 0.5
            for _ in range(q):
                x = eval_circle(p, x)
            assert circle_dist(x, 0.5) < 1e-10


def test_superattracting_known_values():
    (a1, t1), = superattracting_parameters(1)
    assert a1 == -0.5 and t1.k == 0
    entries = superattracting_parameters(2)
    avals = sorted(a for a, _ in entries)
    assert abs(avals[0] + avals[1]) < 1e-12  # mirror pair
    assert abs(avals[1] - 0.1028001817) < 1e-9
    assert {ot.k for _, ot in entries} == {1, 2}


def test_superattracting_mirror_types():
    entries = superattracting_parameters(3)
    by_a = {round(a, 9): ot.k for a, ot in entries}
    for a, k in list(by_a.items()):
        if a == -0.5:
            continue
        assert by_a[round(-a, 9)] == 7 - k
