"""Linearizing coordinate at the attracting cycle and the tongue uniformization.

The linearizer kappa is normalized by kappa(x*) = 0, kappa'(x*) = i/x* at the
distinguished cycle point x* on the circle; with that normalization it
intertwines the circle reflection with complex conjugation.  The invariant

    Xi = lambda * e^{2 i nu} = lambda * kappa(c1) / kappa(c2)

(multiplier and critical angle together) identifies a parameter inside its
tongue and maps the tongue interior onto the slit disk D \\ [0, 1).  Xi is
inverted numerically by damped two-variable Newton with continuation, which
also yields internal-ray tracing.  The ceiling solver finds all parameters on
b = 1 whose critical orbit is periodic of a given exact period.
"""

import cmath
import math
from dataclasses import dataclass, field

from .core import (
    TWO_PI,
    Parameter,
    circle_dist,
    critical_points,
    deriv2_complex,
    deriv3_complex,
    deriv_circle,
    deriv_complex,
    eval_complex,
    mod1,
)
from .cycles import (
    AttractingCycle,
    OrbitType,
    TongueStatus,
    _fq_lift,
    classify,
    find_attracting_cycle,
    orbit_type,
)
from .errors import ContinuationError, DomainError, LinearizationError

LAMBDA_MIN = 1e-4        # linearization degenerates toward the superattracting end
LAMBDA_MARGIN = 1e-4     # and toward the parabolic end
KOENIGS_RTOL = 1e-10
TAYLOR_RADIUS = 1e-4     # switch to the local cubic model inside this distance
MAX_BLOCK_EVALS = 10 ** 5
CONT_STEP = 0.05         # continuation step bound in the target plane
NEWTON_HALVINGS = 20
DEFAULT_QMAX = 12


@dataclass
class KoenigsFrame:
    """Everything needed to evaluate the normalized linearizer at one parameter."""

    parameter: Parameter
    cycle: AttractingCycle
    x_star: complex
    lam: float
    normalization: complex   # i / x_star
    depth: int
    k2: complex = field(default=0j, repr=False)
    k3: complex = field(default=0j, repr=False)


def koenigs_frame(
    p: Parameter,
    cycle: AttractingCycle,
    lambda_min: float = LAMBDA_MIN,
    lambda_margin: float = LAMBDA_MARGIN,
) -> KoenigsFrame:
    """Build the linearization frame; the multiplier must sit inside the window.

    The frame carries the quadratic and cubic coefficients of the local
    inverse series of the linearizer, computed from the chain-rule derivatives
    of the q-fold composition along the cycle.  They let the limit be read off
    while the orbit is still ~1e-4 away from the fixed point, before the
    subtraction z_n - x* hits its cancellation noise floor.
    """
    lam = cycle.lam
    if not lambda_min < lam < 1.0 - lambda_margin:
        raise LinearizationError(
            f"multiplier {lam:.6g} outside the window ({lambda_min}, {1 - lambda_margin})"
        )
    q = cycle.q
    i0 = cycle.distinguished_index
    zs = [cmath.exp(complex(0.0, TWO_PI * cycle.points[(i0 + j) % q])) for j in range(q)]
    # chain-rule accumulation of (g^q)', (g^q)'', (g^q)''' at x*
    d1, d2, d3 = 1.0 + 0j, 0j, 0j
    for z in zs:
        g1 = deriv_complex(p, z)
        g2 = deriv2_complex(p, z)
        g3 = deriv3_complex(p, z)
        d3 = g3 * d1 ** 3 + 3.0 * g2 * d1 * d2 + g1 * d3
        d2 = g2 * d1 * d1 + g1 * d2
        d1 = g1 * d1
    lam_c = d1
    k2 = (d2 / 2.0) / (lam_c - lam_c * lam_c)
    k3 = (d3 / 6.0 + k2 * lam_c * d2) / (lam_c - lam_c ** 3)
    x_star = zs[0]
    return KoenigsFrame(
        parameter=p,
        cycle=cycle,
        x_star=x_star,
        lam=lam,
        normalization=1j / x_star,
        depth=max(64, MAX_BLOCK_EVALS // q),
        k2=k2,
        k3=k3,
    )


def koenigs_value(frame: KoenigsFrame, z: complex) -> complex:
    """kappa(z) for z in the basin of the distinguished point under g^q.

    Iterates in blocks of q steps and evaluates lambda^{-n} T(z_n - x*) with
    the cubic local model T once the orbit is inside the model radius;
    successive estimates must agree to KOENIGS_RTOL.  Divergence of the orbit
    (z outside the right basin component, or a multiplier too close to the
    window ends) is signalled.
    """
    p = frame.parameter
    q = frame.cycle.q
    lam = frame.lam
    x_star = frame.x_star
    z = complex(z)
    if z == 0:
        raise DomainError("z = 0 is outside the domain")
    if abs(z - x_star) < 1e-13:
        return 0j
    zc = z
    pw = 1.0
    est_prev = None
    best = None
    best_diff = math.inf
    for _ in range(frame.depth):
        d = zc - x_star
        ad = abs(d)
        az = abs(zc)
        if ad > 1e3 or az < 1e-6 or az > 1e6:
            raise LinearizationError("orbit escaped: z is not in the distinguished basin")
        if ad <= TAYLOR_RADIUS:
            est = pw * (d + frame.k2 * d * d + frame.k3 * d * d * d)
            if est_prev is not None:
                diff = abs(est - est_prev)
                if diff < best_diff:
                    best, best_diff = est, diff
                if best_diff <= KOENIGS_RTOL * abs(est):
                    break
            est_prev = est
            # below ~100 ulp the subtraction z_n - x* is pure noise and the
            # lambda^{-n} amplification only degrades the estimate
            if ad < 1e-13:
                break
        for _ in range(q):
            zc = eval_complex(p, zc)
        pw /= lam
        if pw > 1e280:
            break
    if best is None:
        raise LinearizationError("depth cap reached before the linearizer converged")
    if best_diff > max(1e-8 * abs(best), 1e-12):
        raise LinearizationError(
            f"linearizer settled only to {best_diff:.3g}: multiplier too near the window edge"
        )
    return frame.normalization * best


@dataclass(frozen=True)
class UniformizingValue:
    """The invariant Xi = lambda e^{2 i nu} together with its factors."""

    xi: complex
    lam: float
    nu: float


def _angle_data(p: Parameter, cycle: AttractingCycle):
    """Frame plus linearizer values at both critical points, with checks."""
    if p.b >= 1.0:
        raise DomainError("critical angle needs b < 1 (distinct critical points)")
    frame = koenigs_frame(p, cycle)
    c1, c2 = critical_points(p)
    k1 = koenigs_value(frame, c1)
    k2v = koenigs_value(frame, c2)
    if k1.imag <= 0.0:
        raise LinearizationError(
            "kappa(c1) is not in the upper half-plane: wrong distinguished point?"
        )
    nu = cmath.phase(k1)
    if abs(cmath.phase(k2v) + nu) > 1e-6:
        raise LinearizationError(
            "kappa(c2) is not the conjugate angle of kappa(c1): symmetry check failed"
        )
    return frame, k1, k2v, nu


def critical_angle(p: Parameter, cycle: AttractingCycle) -> float:
    """Angle nu in (0, pi) of the outer critical point in the linearizing plane."""
    return _angle_data(p, cycle)[3]


def _uniformize_from_cycle(p: Parameter, cycle: AttractingCycle) -> UniformizingValue:
    frame, k1, k2v, nu = _angle_data(p, cycle)
    xi = cycle.lam * cmath.exp(complex(0.0, 2.0 * nu))
    xi_quot = cycle.lam * k1 / k2v
    if abs(xi - xi_quot) > 1e-8:
        raise LinearizationError(
            f"polar and quotient forms of Xi disagree by {abs(xi - xi_quot):.3g}"
        )
    return UniformizingValue(xi=xi, lam=frame.lam, nu=nu)


def uniformize(p: Parameter, q_max: int = DEFAULT_QMAX) -> UniformizingValue:
    """Xi at a tongue parameter whose multiplier lies in the linearization window."""
    cls = classify(p, q_max)
    if cls.status is not TongueStatus.IN_TONGUE:
        raise DomainError(f"no attracting cycle found up to period {q_max}")
    return _uniformize_from_cycle(p, cls.cycle)


def _polish_cycle(p: Parameter, seed: AttractingCycle):
    """Continue an existing cycle to a nearby parameter by Newton on the lift."""
    q = seed.q
    x = seed.points[0]
    fq, _, _ = _fq_lift(p, x, q)
    m = round(fq - x)
    for _ in range(40):
        fq, prod, _ = _fq_lift(p, x, q)
        g = fq - x - m
        dg = prod - 1.0
        if dg == 0.0:
            return None
        step = g / dg
        x -= step
        if abs(step) < 1e-14:
            break
    else:
        return None
    fq, _, xs = _fq_lift(p, x, q)
    if abs(fq - x - m) > 1e-10:
        return None
    lam = 1.0
    for pt in xs:
        lam *= deriv_circle(p, pt)
    if not 0.0 < lam < 1.0:
        return None
    points = tuple(mod1(v) for v in xs)
    return AttractingCycle(
        q=q, points=points, lam=lam, distinguished_index=seed.distinguished_index
    )


def _xi_warm(p: Parameter, prev_cycle, q_max: int):
    """Xi evaluation that reuses a nearby cycle when one is supplied."""
    cycle = _polish_cycle(p, prev_cycle) if prev_cycle is not None else None
    if cycle is None:
        cycle = find_attracting_cycle(p, q_max)
        if cycle is None:
            raise LinearizationError("lost the attracting cycle during continuation")
    return _uniformize_from_cycle(p, cycle), cycle


def _on_slit(w: complex) -> bool:
    return w.imag == 0.0 and w.real >= 0.0


def _newton_solve(p, cycle, target, q_max, tol):
    """Damped 2-variable Newton for Xi(p) = target from a warm start."""
    uv, cycle = _xi_warm(p, cycle, q_max)
    err = abs(uv.xi - target)
    for _ in range(40):
        if err < tol:
            return p, cycle, uv
        h = 1e-7
        # forward differences, flipped at the b edges
        ha = h if p.a < 0.49 else -h
        hb = h if p.b < 1.0 - 1e-6 else -h
        uva, _ = _xi_warm(Parameter(p.a + ha, p.b), cycle, q_max)
        uvb, _ = _xi_warm(Parameter(p.a, p.b + hb), cycle, q_max)
        j11 = (uva.xi.real - uv.xi.real) / ha
        j21 = (uva.xi.imag - uv.xi.imag) / ha
        j12 = (uvb.xi.real - uv.xi.real) / hb
        j22 = (uvb.xi.imag - uv.xi.imag) / hb
        det = j11 * j22 - j12 * j21
        if det == 0.0 or not math.isfinite(det):
            raise ContinuationError("singular Jacobian in the Xi inversion", last_good=p)
        rx = uv.xi.real - target.real
        ry = uv.xi.imag - target.imag
        da = (-j22 * rx + j12 * ry) / det
        db = (j21 * rx - j11 * ry) / det
        scale = 1.0
        for _ in range(NEWTON_HALVINGS + 1):
            bn = p.b + scale * db
            if 0.0 < bn < 1.0:
                cand = Parameter(p.a + scale * da, bn)
                try:
                    uvn, cyn = _xi_warm(cand, cycle, q_max)
                except LinearizationError:
                    scale *= 0.5
                    continue
                if abs(uvn.xi - target) < err:
                    p, cycle, uv, err = cand, cyn, uvn, abs(uvn.xi - target)
                    break
            scale *= 0.5
        else:
            raise ContinuationError("Newton stalled in the Xi inversion", last_good=p)
    if err < tol:
        return p, cycle, uv
    raise ContinuationError("Newton did not reach tolerance", last_good=p)


def invert_uniformization(
    seed: Parameter,
    target: complex,
    q_max: int = DEFAULT_QMAX,
    tol: float = 1e-8,
    max_step: float = CONT_STEP,
) -> Parameter:
    """Parameter in the seed's tongue with Xi within tol of the target.

    Continues along the straight segment from Xi(seed) to the target in steps
    of at most max_step, solving at each node by damped Newton with a
    finite-difference Jacobian.  The path must stay inside the slit disk with
    modulus inside the multiplier window; leaving it, or a Newton stall, is
    signalled together with the last parameter that still worked.
    """
    target = complex(target)
    if _on_slit(target) or abs(target) >= 1.0:
        raise DomainError(f"target {target} is outside the slit disk")
    if not LAMBDA_MIN < abs(target) < 1.0 - LAMBDA_MARGIN:
        raise DomainError(f"|target| = {abs(target):.6g} outside the multiplier window")
    uv = uniformize(seed, q_max)
    cls = classify(seed, q_max)
    cycle = cls.cycle
    w0 = uv.xi
    p = seed
    n_nodes = max(1, int(math.ceil(abs(target - w0) / max_step)))
    for j in range(1, n_nodes + 1):
        w = w0 + (target - w0) * (j / n_nodes)
        if j == n_nodes:
            w = target
        if _on_slit(w) or not LAMBDA_MIN < abs(w) < 1.0 - LAMBDA_MARGIN:
            raise ContinuationError(
                f"continuation path left the slit disk window at node {j}", last_good=p
            )
        p, cycle, _ = _newton_solve(p, cycle, w, q_max, tol)
    return p


def trace_internal_ray(
    seed: Parameter, nu: float, lambdas, q_max: int = DEFAULT_QMAX
) -> list:
    """Parameters along the internal ray at angle nu, one per requested modulus.

    lambdas must be descending and inside the multiplier window; the trace is
    a continuation, so consecutive outputs vary continuously.
    """
    if not 0.0 < nu < math.pi:
        raise DomainError("ray angle must lie in (0, pi)")
    lams = list(lambdas)
    if any(l2 >= l1 for l1, l2 in zip(lams, lams[1:])):
        raise DomainError("lambdas must be strictly descending")
    if any(not LAMBDA_MIN < l < 1.0 - LAMBDA_MARGIN for l in lams):
        raise DomainError("all lambdas must lie inside the multiplier window")
    out = []
    p = seed
    for lam in lams:
        p = invert_uniformization(p, lam * cmath.exp(complex(0.0, 2.0 * nu)), q_max)
        out.append(p)
    return out


def _ceiling_lift(a: float, q: int):
    """F^q(1/2) and its a-derivative at b = 1, via the sensitivity recursion."""
    bp = 1.0 / math.pi
    sin, cos = math.sin, math.cos
    y = 0.5
    deck = 0
    dy = 0.0
    for _ in range(q):
        fp = 2.0 + 2.0 * cos(TWO_PI * y)
        fy = 2.0 * y + a + bp * sin(TWO_PI * y)
        ny = fy % 1.0
        if ny >= 1.0:
            ny = 0.0
        deck = 2 * deck + round(fy - ny)
        dy = fp * dy + 1.0
        y = ny
    return y + deck, dy


def superattracting_parameters(q: int) -> list:
    """All a in [-1/2, 1/2) whose ceiling map has 1/2 periodic of exact period q.

    On b = 1 the residual S(a) = F^q(1/2) - 1/2 is strictly increasing in a
    (dS/da >= 1) and gains 2^q - 1 over one period of a, so each integer level
    is hit exactly once; bisection plus Newton locates the roots and the exact
    period filter removes those whose orbit has a shorter period.  Returns
    (a, orbit type) pairs sorted by a.
    """
    if q < 1:
        raise DomainError("q must be >= 1")

    def resid(a: float) -> float:
        return _ceiling_lift(a, q)[0] - 0.5

    total = 2 ** q - 1
    s_left = resid(-0.5)
    roots = []
    m0 = round(s_left)
    if abs(s_left - m0) < 1e-12:
        roots.append(-0.5)
        levels = range(m0 + 1, m0 + total)
    else:
        m0 = math.ceil(s_left)
        levels = range(m0, m0 + total)
    for m in levels:
        lo, hi = -0.5, 0.5
        flo = s_left - m
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            fm = resid(mid) - m
            if (fm < 0.0) == (flo < 0.0):
                lo, flo = mid, fm
            else:
                hi = mid
        a = 0.5 * (lo + hi)
        for _ in range(30):
            val, dval = _ceiling_lift(a, q)
            g = val - 0.5 - m
            step = g / dval
            a -= step
            if abs(step) < 1e-15:
                break
        roots.append(a)

    out = []
    for a in roots:
        p = Parameter(a, 1.0)
        orbit = [0.5]
        y = 0.5
        for _ in range(q - 1):
            y = mod1(2.0 * y + p.a + (1.0 / math.pi) * math.sin(TWO_PI * y))
            orbit.append(y)
        if any(circle_dist(orbit[d], 0.5) < 1e-8 for d in range(1, q) if q % d == 0):
            continue  # exact period is a proper divisor of q
        lam = 1.0
        for pt in orbit:
            lam *= deriv_circle(p, pt)
        cycle = AttractingCycle(q=q, points=tuple(orbit), lam=abs(lam), distinguished_index=0)
        out.append((p.a, orbit_type(p, cycle)))
    out.sort(key=lambda pair: pair[0])
    return out
