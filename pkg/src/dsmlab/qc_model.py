"""Model maps for deforming multiplier and critical angle in the linearized plane.

Two explicit homeomorphisms, verified as a standalone utility:

  * the piecewise linear angle map h of [0, pi] with h(0)=0, h(nu0)=nu1,
    h(pi)=pi (two linear branches), and
  * the radial power map chi(r, theta) = (r^(1+alpha), h(theta)) on the closed
    upper half-plane, extended to C by Schwarz reflection.

chi conjugates w -> lam0 w to w -> lam0^(1+alpha) w, moves the marked angle
nu0 to nu1, and is quasiconformal with an explicit dilatation bound.
"""

import cmath
import math
from dataclasses import dataclass, field

from .errors import DomainError


@dataclass(frozen=True)
class AngleMap:
    """Increasing piecewise linear homeomorphism of [0, pi] with one knee at nu0."""

    nu0: float
    nu1: float
    s1: float = field(init=False)
    s2: float = field(init=False)
    s3: float = field(init=False)

    def __post_init__(self):
        if not (0.0 < self.nu0 < math.pi and 0.0 < self.nu1 < math.pi):
            raise DomainError("angle map knots must lie in (0, pi)")
        object.__setattr__(self, "s1", self.nu1 / self.nu0)
        object.__setattr__(self, "s2", (math.pi - self.nu1) / (math.pi - self.nu0))
        object.__setattr__(
            self, "s3", math.pi * (self.nu1 - self.nu0) / (math.pi - self.nu0)
        )

    def inverse(self) -> "AngleMap":
        return AngleMap(self.nu1, self.nu0)


def angle_map_eval(m: AngleMap, theta: float) -> float:
    """h(theta): s1*theta up to the knee, s2*theta + s3 from the knee to pi."""
    if not 0.0 <= theta <= math.pi:
        raise DomainError(f"theta = {theta} outside [0, pi]")
    if theta <= m.nu0:
        return m.s1 * theta
    return m.s2 * theta + m.s3


@dataclass(frozen=True)
class RadialPowerMap:
    """chi(r, theta) = (r^(1+alpha), h(theta)); Schwarz-reflected to all of C."""

    alpha: float
    angle_map: AngleMap

    def __post_init__(self):
        if self.alpha <= -1.0:
            raise DomainError("alpha must exceed -1")

    def inverse(self) -> "RadialPowerMap":
        return RadialPowerMap(
            1.0 / (1.0 + self.alpha) - 1.0, self.angle_map.inverse()
        )


def chi_eval(m: RadialPowerMap, z: complex) -> complex:
    """chi(z); fixes 0 by continuity and commutes with complex conjugation."""
    z = complex(z)
    if z == 0:
        return 0j
    r = abs(z)
    theta = cmath.phase(z)
    if theta < 0.0:
        w = chi_eval(m, z.conjugate())
        return w.conjugate()
    return r ** (1.0 + m.alpha) * cmath.exp(complex(0.0, angle_map_eval(m.angle_map, theta)))


def dilatation_bound(m: RadialPowerMap) -> float:
    """sup |mu_chi|: the larger of |1+a-s|/|1+a+s| over the two angular slopes."""
    oa = 1.0 + m.alpha
    v1 = abs(oa - m.angle_map.s1) / abs(oa + m.angle_map.s1)
    v2 = abs(oa - m.angle_map.s2) / abs(oa + m.angle_map.s2)
    return max(v1, v2)


def conjugated_multiplier(m: RadialPowerMap, lam0: float) -> float:
    """The multiplier after conjugation by chi: lam0^(1+alpha)."""
    if not 0.0 < lam0 < 1.0:
        raise DomainError("lam0 must lie in (0, 1)")
    return lam0 ** (1.0 + m.alpha)
