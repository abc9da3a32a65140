"""Attracting cycles on the circle and tongue classification.

The cycle search iterates the critical trace x = 1/2 (both critical points of
the complex map sit in one immediate-basin component whenever an attracting
cycle exists, so this orbit finds it), detects an approximate period, and
Newton-polishes the periodic point on the lift with an explicit deck integer.
The orbit type comes from the semi-conjugacy to the doubling map, evaluated
digit-by-digit so no 2^n-sized floats ever appear.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .core import TWO_PI, Parameter, circle_dist, eval_circle, deriv_circle, mod1
from .errors import CycleError, DomainError

BURN_IN = 2000           # iterations before period detection
DETECT_TOL = 1e-6        # approximate-recurrence threshold
LAMBDA_MARGIN = 1e-6     # declare a tongue only when lambda <= 1 - margin
NEWTON_STEPS = 60
PHI_DEPTH = 60           # default semi-conjugacy depth
PHI_DEPTH_MAX = 200
DEFAULT_QMAX = 12
PHASE_STEP_CAP = 60000


@dataclass
class AttractingCycle:
    """An attracting cycle: points ordered by the dynamics, points[i+1] = f(points[i])."""

    q: int
    points: tuple
    lam: float
    distinguished_index: int


@dataclass(frozen=True)
class OrbitType:
    """The cycle's image under the semi-conjugacy: the rational k/(2^q - 1)."""

    k: int
    q: int
    value: float


class TongueStatus(Enum):
    NO_ATTRACTING_CYCLE_FOUND = "NoAttractingCycleFound"
    IN_TONGUE = "InTongue"


@dataclass
class TongueClassification:
    status: TongueStatus
    cycle: Optional[AttractingCycle] = None
    orbit_type: Optional[OrbitType] = None


def _orbit_data(p: Parameter, x0: float, q: int):
    """One pass of q steps from x0 in [0,1): circle orbit, deck sum, derivative product.

    F^q(x0) = last + deck, and prod = (F^q)'(x0).
    """
    a, b = p.a, p.b
    bp = b / math.pi
    sin, cos = math.sin, math.cos
    xs = []
    y = x0
    deck = 0
    prod = 1.0
    for _ in range(q):
        xs.append(y)
        prod *= 2.0 + 2.0 * b * cos(TWO_PI * y)
        fy = 2.0 * y + a + bp * sin(TWO_PI * y)
        ny = fy % 1.0
        if ny >= 1.0:
            ny = 0.0
        deck = 2 * deck + round(fy - ny)
        y = ny
    return xs, y, deck, prod


def _fq_lift(p: Parameter, x: float, q: int):
    """(F^q(x), (F^q)'(x), circle orbit) for arbitrary real x."""
    k0 = math.floor(x)
    xs, y, deck, prod = _orbit_data(p, x - k0, q)
    return y + deck + (2 ** q) * k0, prod, xs


def _orbit_phase(p: Parameter, points, y: float, step_offset: int) -> int:
    """Index i such that the forward orbit of 1/2 visits points[i] at steps = 0 mod q.

    y is the orbit of 1/2 already advanced step_offset times (the caller's
    burn-in state), so the common case locks on immediately.
    """
    q = len(points)
    if q == 1:
        return 0
    gap = min(
        circle_dist(points[i], points[j]) for i in range(q) for j in range(i + 1, q)
    )
    eps = min(1e-4, gap / 4.0)
    if eps <= 1e-13:
        raise CycleError("cycle points are too close to separate phases")
    a, b = p.a, p.b
    bp = b / math.pi
    sin = math.sin
    for s in range(step_offset, step_offset + PHASE_STEP_CAP):
        for i in range(q):
            if circle_dist(y, points[i]) < eps:
                return (i - s) % q
        y = (2.0 * y + a + bp * sin(TWO_PI * y)) % 1.0
    raise CycleError("orbit of 1/2 failed to lock onto the cycle phase")


def find_attracting_cycle(
    p: Parameter, q_max: int = DEFAULT_QMAX, tol: float = DETECT_TOL
) -> Optional[AttractingCycle]:
    """Search for an attracting cycle of period <= q_max; None when not found.

    Not-found is not a proof of absence: parameters nearer neutrality than the
    attracting margin, or with period beyond q_max, also return None.
    """
    if q_max < 1:
        raise DomainError("q_max must be >= 1")
    if p.b <= 0.0:
        return None  # |f'| = 2 everywhere: nothing can attract

    a, b = p.a, p.b
    bp = b / math.pi
    sin = math.sin
    x = 0.5
    for _ in range(BURN_IN):
        x = (2.0 * x + a + bp * sin(TWO_PI * x)) % 1.0

    window = [x]
    for _ in range(q_max):
        x = (2.0 * x + a + bp * sin(TWO_PI * x)) % 1.0
        window.append(x)
    q = None
    for cand in range(1, q_max + 1):
        if circle_dist(window[cand], window[0]) < tol:
            q = cand
            break
    if q is None:
        return None

    # Newton on the lift: F^q(x) - x - m = 0 with a fixed deck integer m
    x0 = window[0]
    fq, _, _ = _fq_lift(p, x0, q)
    m = round(fq - x0)
    x = x0
    converged = False
    for _ in range(NEWTON_STEPS):
        fq, prod, _ = _fq_lift(p, x, q)
        g = fq - x - m
        dg = prod - 1.0
        if dg == 0.0:
            break
        step = g / dg
        x -= step
        if abs(x - x0) > 0.2:
            return None  # ran away from the seed
        if abs(step) < 1e-14:
            converged = True
            break
    if not converged:
        return None
    fq, prod, xs = _fq_lift(p, x, q)
    if abs(fq - x - m) > 1e-10:
        return None

    # reduce to the minimal period
    for d in range(1, q):
        if q % d == 0 and circle_dist(xs[d % q], xs[0]) < 1e-9:
            q = d
            xs = xs[:d]
            break
    lam = 1.0
    for pt in xs:
        lam *= deriv_circle(p, pt)
    if not 0.0 <= lam <= 1.0 - LAMBDA_MARGIN:
        return None
    if circle_dist(eval_circle(p, xs[-1]), xs[0]) > 1e-10:
        return None

    points = tuple(mod1(v) for v in xs)
    dist_idx = _orbit_phase(p, points, window[0], BURN_IN)
    return AttractingCycle(q=q, points=points, lam=lam, distinguished_index=dist_idx)


def multiplier(p: Parameter, cycle: AttractingCycle) -> float:
    """Product of f' over the cycle; raises when it is not attracting."""
    lam = 1.0
    for pt in cycle.points:
        lam *= deriv_circle(p, pt)
    if lam >= 1.0:
        raise CycleError(f"multiplier {lam} >= 1: cycle is not attracting")
    return lam


def _phi_lift(p: Parameter, x: float, n: int) -> float:
    """F^n(x)/2^n on the lift, accumulated digit-by-digit.

    Writing F^n(x) = x_n + sum_j d_j 2^{n-1-j} with the circle orbit x_j and
    integer digits d_j keeps every term well inside double precision; the
    value approximates the semi-conjugacy with error <= (1/2 + b/pi)/2^n.
    """
    x0 = mod1(x)
    a, b = p.a, p.b
    bp = b / math.pi
    sin = math.sin
    s = 0.0
    w = 0.5
    y = x0
    for _ in range(n):
        fy = 2.0 * y + a + bp * sin(TWO_PI * y)
        ny = fy % 1.0
        if ny >= 1.0:
            ny = 0.0
        s += round(fy - ny) * w
        w *= 0.5
        y = ny
    s += y * w * 2.0
    return s + (x - x0)


def semiconjugacy_phi(p: Parameter, x: float, n: int = PHI_DEPTH) -> float:
    """Approximate semi-conjugacy to the doubling map: F^n(x)/2^n mod 1."""
    if n < 1:
        raise DomainError("depth n must be >= 1")
    return mod1(_phi_lift(p, x, n))


def _doubling_period(k: int, q: int) -> int:
    """Exact period of k/(2^q - 1) under doubling."""
    den = 2 ** q - 1
    if den == 1 or k % den == 0:
        return 1
    k %= den
    cur = (2 * k) % den
    j = 1
    while cur != k:
        cur = (2 * cur) % den
        j += 1
        if j > q:
            break
    return j


def orbit_type(p: Parameter, cycle: AttractingCycle) -> OrbitType:
    """Type k/(2^q - 1) of the cycle, from the distinguished point.

    Evaluates the semi-conjugacy deep enough that the a-priori error is below
    a quarter of the grid gap, rounds, and verifies the rounded rational has
    exact doubling period q.  Ambiguous rounding raises after the depth ladder
    is exhausted.
    """
    q = cycle.q
    den = 2 ** q - 1
    x = cycle.points[cycle.distinguished_index]
    bound = 0.5 + p.b / math.pi
    n_req = int(math.ceil(math.log2(4.0 * bound * den))) + 2
    k = None
    for n in (max(PHI_DEPTH, n_req), 120, PHI_DEPTH_MAX):
        v = mod1(_phi_lift(p, x, n)) * den
        r = round(v)
        if abs(v - r) <= 0.25:
            k = r % den
            break
    if k is None:
        raise CycleError("orbit type rounding stayed ambiguous up to the depth cap")
    if _doubling_period(k, q) != q:
        raise CycleError(
            f"rounded type {k}/{den} does not have exact doubling period {q}"
        )
    return OrbitType(k=k, q=q, value=k / den)


def distinguished_point(p: Parameter, cycle: AttractingCycle, arcs=None) -> int:
    """Index of the cycle point nearest the critical pair (the arc holding 1/2).

    With immediate-basin arcs available, picks the arc containing x = 1/2;
    otherwise falls back to the phase of the forward orbit of 1/2.
    """
    if arcs is not None:
        for i, (lo, hi) in enumerate(arcs.arcs):
            # arc stored with lo < hi on a local lift
            for shift in (0.0, 1.0, -1.0):
                if lo < 0.5 + shift < hi:
                    return i
        raise CycleError("x = 1/2 lies in no immediate-basin arc")
    return _orbit_phase(p, cycle.points, 0.5, 0)


def classify(p: Parameter, q_max: int = DEFAULT_QMAX) -> TongueClassification:
    """Full classification: cycle search plus orbit type."""
    cycle = find_attracting_cycle(p, q_max)
    if cycle is None:
        return TongueClassification(TongueStatus.NO_ATTRACTING_CYCLE_FOUND)
    otype = orbit_type(p, cycle)
    return TongueClassification(TongueStatus.IN_TONGUE, cycle=cycle, orbit_type=otype)
