import cmath
import math

import numpy as np
import pytest

from dsmlab import (
    DomainError,
    Parameter,
    RangeError,
    circle_dist,
    critical_points,
    deriv_circle,
    deriv_complex,
    eval_circle,
    eval_complex,
    eval_lift,
    mod1,
    reflect,
)

TWO_PI = 2.0 * math.pi


def test_parameter_canonical_representative():
    assert Parameter(0.5, 0.3).a == -0.5
    assert Parameter(1.25, 0.3).a == 0.25
    assert Parameter(-0.5, 0.3).a == -0.5
    with pytest.raises(DomainError):
        Parameter(0.0, 1.5)
    with pytest.raises(DomainError):
        Parameter(0.0, -0.1)


def test_eval_circle_closed_form_points():
    assert eval_circle(Parameter(0.0, 0.7), 0.0) == 0.0
    got = eval_circle(Parameter(0.5, 1.0), 0.25)
    assert abs(got - (1.0 + 1.0 / math.pi) % 1.0) < 1e-14
    assert abs(eval_circle(Parameter(0.5, 1.0), 0.5) - 0.5) < 1e-14


def test_lift_degree_identity():
    rng = np.random.RandomState(7)
    p = Parameter(0.3, 0.8)
    for x in rng.uniform(-2, 2, 50):
        assert abs(eval_lift(p, x + 1.0) - eval_lift(p, x) - 2.0) < 1e-12


def test_lift_closed_forms():
    # a = 0.5 is stored as its canonical representative -0.5, which shifts
    # the lift by an integer: F(1/2) = 1 + a = 1.5 = 0.5 (mod 1)
    lifted = eval_lift(Parameter(0.5, 1.0), 0.5)
    assert abs(mod1(lifted - 1.5)) < 1e-14
    assert abs(lifted - 0.5) < 1e-14
    p0 = Parameter(0.0, 0.0)
    for x in (0.0, 0.3, 0.77):
        assert eval_lift(p0, x) == 2.0 * x


def test_deriv_circle_values_and_finite_difference():
    assert abs(deriv_circle(Parameter(0.0, 1.0), 0.5)) < 1e-14
    assert deriv_circle(Parameter(0.2, 0.0), 0.123) == 2.0
    rng = np.random.RandomState(11)
    p = Parameter(-0.21, 0.66)
    h = 1e-6
    for x in rng.uniform(0, 1, 100):
        fd = (eval_lift(p, x + h) - eval_lift(p, x - h)) / (2 * h)
        assert abs(fd - deriv_circle(p, x)) < 1e-8


def test_complex_restricts_to_circle():
    rng = np.random.RandomState(3)
    p = Parameter(0.37, 0.9)
    for x in rng.uniform(0, 1, 1000):
        z = cmath.exp(complex(0, TWO_PI * x))
        gz = eval_complex(p, z)
        assert abs(abs(gz) - 1.0) < 1e-12
        fx = eval_circle(p, x)
        assert abs(gz - cmath.exp(complex(0, TWO_PI * fx))) < 1e-10


def test_complex_quadratic_case():
    assert abs(eval_complex(Parameter(0.0, 0.0), 2.0 + 0j) - 4.0) < 1e-14


def test_complex_range_error_and_zero():
    p = Parameter(0.0, 1.0)
    with pytest.raises(RangeError):
        eval_complex(p, 800.0 + 0j)
    with pytest.raises(RangeError):
        eval_complex(p, -800.0 + 0j)  # |g| underflows along the negative axis
    with pytest.raises(DomainError):
        eval_complex(p, 0j)


def test_deriv_complex_vanishes_at_critical_points():
    for b in (0.4, 0.75, 0.99):
        p = Parameter(0.11, b)
        c1, c2 = critical_points(p)
        assert abs(deriv_complex(p, c1)) < 1e-10
        assert abs(deriv_complex(p, c2)) < 1e-10


def test_deriv_complex_quadratic_and_finite_difference():
    p0 = Parameter(0.3, 0.0)
    rng = np.random.RandomState(5)
    rot = cmath.exp(complex(0, TWO_PI * p0.a))
    for _ in range(20):
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        if abs(z) < 0.2:
            continue
        assert abs(deriv_complex(p0, z) - 2.0 * rot * z) < 1e-12
    p = Parameter(-0.4, 0.85)
    h = 1e-6
    for _ in range(20):
        z = complex(rng.uniform(0.5, 2), rng.uniform(-1, 1))
        fd = (eval_complex(p, z + h) - eval_complex(p, z - h)) / (2 * h)
        assert abs(fd - deriv_complex(p, z)) < 1e-6 * max(1.0, abs(deriv_complex(p, z)))


def test_critical_points_structure():
    c1, c2 = critical_points(Parameter(0.0, 1.0))
    assert c1 == c2 == -1.0
    c1, c2 = critical_points(Parameter(0.0, 0.5))
    assert abs(c1 - (-2.0 - math.sqrt(3))) < 1e-12
    assert abs(c2 - (-2.0 + math.sqrt(3))) < 1e-12
    rng = np.random.RandomState(13)
    for b in rng.uniform(0.05, 1.0, 50):
        c1, c2 = critical_points(Parameter(0.2, b))
        assert abs(c1 * c2 - 1.0) < 1e-12
        assert abs(c1) >= 1.0 >= abs(c2)
        assert c1.real <= -1.0 <= c2.real < 0.0
    with pytest.raises(DomainError):
        critical_points(Parameter(0.2, 0.0))


def test_reflection_properties():
    rng = np.random.RandomState(17)
    p = Parameter(0.28, 0.77)
    for _ in range(50):
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        if abs(z) < 0.3:
            continue
        assert abs(reflect(reflect(z)) - z) < 1e-12
        assert abs(eval_complex(p, reflect(z)) - reflect(eval_complex(p, z))) < 1e-10
    theta = 1.234
    w = cmath.exp(complex(0, theta))
    assert abs(reflect(w) - w) < 1e-15


def test_mirror_symmetry_of_circle_map():
    rng = np.random.RandomState(19)
    p = Parameter(0.31, 0.82)
    q = p.mirrored()
    for x in rng.uniform(0, 1, 200):
        lhs = eval_circle(q, mod1(-x))
        rhs = mod1(-eval_circle(p, x))
        assert circle_dist(lhs, rhs) < 1e-12
