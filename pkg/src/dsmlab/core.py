"""The double standard circle map, its lift, and its complex extension.

Real form on R/Z:       f(x) = 2x + a + (b/pi) sin(2 pi x)  mod 1
Lift on R:              F(x) = 2x + a + (b/pi) sin(2 pi x),  F(x+1) = F(x) + 2
Complex form on C*:     g(z) = e^{2 pi i a} z^2 exp(b z - b/z)

g restricts to f on the unit circle through z = e^{2 pi i x} and commutes
with the circle reflection eta(z) = 1/conj(z).  All functions here are pure.
"""

import cmath
import math
from dataclasses import dataclass

from .errors import DomainError, RangeError

TWO_PI = 2.0 * math.pi

# largest |log g| before exp() leaves double range
_EXP_LIMIT = 700.0


def mod1(x: float) -> float:
    """Reduce to [0, 1), guarding the round-up to 1.0 at the seam."""
    r = x - math.floor(x)
    if r >= 1.0:
        r -= 1.0
    return r


def center(x: float) -> float:
    """Reduce to the centered representative in [-1/2, 1/2)."""
    r = x - round(x)
    if r >= 0.5:
        r -= 1.0
    elif r < -0.5:
        r += 1.0
    return r


def circle_dist(x: float, y: float) -> float:
    """Distance on R/Z."""
    return abs(center(x - y))


@dataclass(frozen=True)
class Parameter:
    """A point (a, b) of the family.

    a is stored as its canonical representative in [-1/2, 1/2), so the lift
    displacement obeys |F(x) - 2x| <= 1/2 + b/pi uniformly; b must lie in [0, 1].
    """

    a: float
    b: float

    def __post_init__(self):
        b = float(self.b)
        if not 0.0 <= b <= 1.0:
            raise DomainError(f"b must lie in [0, 1], got {self.b}")
        object.__setattr__(self, "a", center(float(self.a)))
        object.__setattr__(self, "b", b)

    def mirrored(self) -> "Parameter":
        """The a -> -a mirror image (conjugate family member)."""
        return Parameter(-self.a, self.b)


def eval_lift(p: Parameter, x: float) -> float:
    """Lift value F(x), without mod-1 reduction."""
    return 2.0 * x + p.a + (p.b / math.pi) * math.sin(TWO_PI * x)


def eval_circle(p: Parameter, x: float) -> float:
    """f(x) in [0, 1); the input is reduced mod 1 first."""
    return mod1(eval_lift(p, mod1(x)))


def deriv_circle(p: Parameter, x: float) -> float:
    """f'(x) = 2 + 2 b cos(2 pi x); also the lift derivative."""
    return 2.0 + 2.0 * p.b * math.cos(TWO_PI * x)


def eval_complex(p: Parameter, z: complex) -> complex:
    """g(z) on the punctured plane.

    Raises RangeError when |g(z)| would over- or underflow the double range
    (the map has essential singularities at 0 and infinity); the result is
    never silently infinite or zero.
    """
    z = complex(z)
    if z == 0:
        raise DomainError("z = 0 is outside the domain; the map lives on C*")
    w = p.b * z - p.b / z
    log_mag = 2.0 * math.log(abs(z)) + w.real
    if abs(log_mag) > _EXP_LIMIT:
        raise RangeError(f"|g(z)| = exp({log_mag:.3g}) leaves double range at z = {z!r}")
    return cmath.exp(complex(0.0, TWO_PI * p.a)) * z * z * cmath.exp(w)


def _log_deriv(p: Parameter, z: complex) -> complex:
    # u = g'/g = 2/z + b + b/z^2
    return 2.0 / z + p.b + p.b / (z * z)


def deriv_complex(p: Parameter, z: complex) -> complex:
    """g'(z) = g(z) (2/z + b + b/z^2)."""
    z = complex(z)
    return eval_complex(p, z) * _log_deriv(p, z)


def deriv2_complex(p: Parameter, z: complex) -> complex:
    """g''(z), from the logarithmic derivative."""
    z = complex(z)
    u = _log_deriv(p, z)
    du = -2.0 / (z * z) - 2.0 * p.b / (z * z * z)
    return eval_complex(p, z) * (u * u + du)


def deriv3_complex(p: Parameter, z: complex) -> complex:
    """g'''(z), from the logarithmic derivative."""
    z = complex(z)
    u = _log_deriv(p, z)
    du = -2.0 / (z * z) - 2.0 * p.b / (z * z * z)
    d2u = 4.0 / (z * z * z) + 6.0 * p.b / (z * z * z * z)
    return eval_complex(p, z) * (u * u * u + 3.0 * u * du + d2u)


def critical_points(p: Parameter) -> tuple[complex, complex]:
    """The two critical points (-1 +- sqrt(1-b^2))/b of g, for b in (0, 1].

    Returns (c1, c2) with c1 <= -1 <= c2 < 0 real and c1*c2 = 1; both collapse
    to the double critical point -1 at b = 1.  b = 0 has no critical points
    and is signalled, not computed.
    """
    if p.b <= 0.0:
        raise DomainError("b = 0: the map degenerates to z^2 and has no critical points in C*")
    s = math.sqrt(max(0.0, (1.0 - p.b) * (1.0 + p.b)))
    c1 = -(1.0 + s) / p.b
    # rationalized form of (-1 + s)/b, stable for small b
    c2 = -p.b / (1.0 + s)
    return complex(c1), complex(c2)


def reflect(z: complex) -> complex:
    """Reflection in the unit circle, eta(z) = 1/conj(z)."""
    z = complex(z)
    if z == 0:
        raise DomainError("z = 0 has no circle reflection")
    return 1.0 / z.conjugate()
