"""Topological pressure, the Bowen root, dimension fields, and a smoothness probe.

The pressure of the potential t * (-log|f'|) over the cylinder coding is
estimated two ways:

  * pressure_bracket: the definition taken verbatim, (1/n) log of the rank-n
    cylinder sums, with the min/max derivative bounds giving an upper and a
    lower value.  These brackets shrink only like 1/n (the Birkhoff sums
    oscillate by O(1) inside every cylinder), which is fine for structural
    checks but hopeless for locating the pressure zero to 1e-2.
  * a Collatz-Wielandt quotient: for the positive transfer operator L_t on
    the coding space, c*h <= L_t h <= C*h pointwise implies the spectral
    radius e^P lies in [c, C].  Taking h = L_t^k 1 and bounding it piecewise
    over a rank-ell cylinder grid, with exact endpoint derivative quotients
    and Lipschitz inflation, gives certified brackets that tighten
    geometrically in k and ell.  bowen_dimension uses these for the root.

The Hausdorff dimension of the chaotic set is the unique zero of t -> P(t),
found by bisection on sign-certified brackets.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import TWO_PI, Parameter
from .cycles import TongueStatus, classify
from .errors import DomainError, DsmError
from .linearize import LAMBDA_MARGIN, LAMBDA_MIN, _uniformize_from_cycle
from .repeller import (
    MarkovPartition,
    _bounds_arrays,
    _extend_tree,
    _fprime_extrema,
    immediate_basin_arcs,
    markov_partition,
)

RANK_START = 8
RANK_CAP = 18
DEFAULT_QMAX = 12


@dataclass(frozen=True)
class PressureBracket:
    """Two-sided finite-rank pressure bounds at one parameter value t."""

    t: float
    rank: int
    lower: float
    upper: float


@dataclass(frozen=True)
class DimensionEstimate:
    """Bracketed Bowen root; certified means both ends carry pressure signs."""

    t_star: float
    t_lower: float
    t_upper: float
    rank: int
    certified: bool


def _logsumexp(a: np.ndarray) -> float:
    m = float(a.max())
    return m + math.log(float(np.exp(a - m).sum()))


def pressure_bracket(p: Parameter, part: MarkovPartition, t: float, rank: int) -> PressureBracket:
    """(1/n) log of the rank-n cylinder sums, with both derivative bounds.

    For t > 0 the sum over deriv_max underestimates and deriv_min
    overestimates; the roles swap for t < 0, so the two values are simply
    ordered.  Accumulation is log-sum-exp, in fixed cylinder order.

    The upper value bounds the pressure for every rank (subadditivity); the
    lower value is a certified bound only when the partition has a single
    interval (full shift), and a finite-rank estimate otherwise.
    """
    if rank < 2:
        raise DomainError("pressure bracket needs rank >= 2")
    dmin, dmax, _ = _bounds_arrays(p, part, rank)
    va = _logsumexp(-t * np.log(dmin)) / rank
    vb = _logsumexp(-t * np.log(dmax)) / rank
    return PressureBracket(t=t, rank=rank, lower=min(va, vb), upper=max(va, vb))


_POWER_BURNIN = 24   # power-method steps before the quotient is read off
_POWER_AVG = 8       # steps the Collatz-Wielandt quotient is averaged over


def _transfer_structure(p: Parameter, part: MarkovPartition, ell: int):
    """Sparse interval transfer matrix on the rank-ell cylinder grid.

    Each rank-(ell+1) cylinder J is one branch piece: f maps it onto the
    rank-ell cylinder J.img while J itself sits inside the rank-ell cylinder
    containers[J] (tracked during the pullback).  With the exact range of f'
    over J this bounds (L_t v)(x) = sum over branches of |f'(y)|^-t v(y)
    piecewise-constantly on the grid, for any t.  Cached per ell.
    """
    if ell in part._quotients:
        return part._quotients[ell]
    _extend_tree(p, part, ell + 1)
    fine = part._levels[ell + 1]
    n = len(fine)
    tgt = np.empty(n, dtype=np.int64)
    fmin = np.empty(n)
    fmax = np.empty(n)
    for i, node in enumerate(fine):
        tgt[i] = node.img
        fmin[i], fmax[i] = _fprime_extrema(p, node.left, node.right)
    src = part._containers[ell].copy()
    part._quotients[ell] = (tgt, src, fmin, fmax, len(part._levels[ell]))
    return part._quotients[ell]


def _pressure_quotient(
    p: Parameter,
    part: MarkovPartition,
    t: float,
    rank: int,
    burnin: int = _POWER_BURNIN,
    avg: int = _POWER_AVG,
):
    """Certified [lower, upper] for P(t) from a Collatz-Wielandt quotient.

    Iterates piecewise interval bounds of v -> L_t v on the rank-(rank-1)
    grid; with h = L_t^k 1 the pointwise inequality c h <= L_t^m h <= C h
    certifies the spectral radius e^P of the transfer operator between
    c^(1/m) and C^(1/m).  Tightens geometrically with the grid rank.
    """
    ell = rank - 1
    tgt, src, fmin, fmax, n_base = _transfer_structure(p, part, ell)
    wmin = fmax ** (-t)
    wmax = fmin ** (-t)
    umin = np.ones(n_base)
    umax = np.ones(n_base)
    log_scale = 0.0
    hold = None
    for step in range(burnin + avg):
        if step == burnin:
            hold = (umin.copy(), umax.copy())
            log_scale = 0.0
        nmin = np.zeros(n_base)
        nmax = np.zeros(n_base)
        np.add.at(nmin, tgt, wmin * umin[src])
        np.add.at(nmax, tgt, wmax * umax[src])
        sc = float(nmax.max())
        if sc <= 0.0 or not math.isfinite(sc):
            raise DomainError("transfer iteration degenerated")
        nmin /= sc
        nmax /= sc
        log_scale += math.log(sc)
        umin, umax = nmin, nmax
    hmin, hmax = hold
    lo = (math.log(float(np.min(umin / hmax))) + log_scale) / avg
    hi = (math.log(float(np.max(umax / hmin))) + log_scale) / avg
    return lo, hi


def _certified_bracket(p: Parameter, part: MarkovPartition, t: float, rank: int):
    """Certified pressure bounds used for the Bowen root.

    The quotient bounds are used on both sides.  The cylinder-sum values are
    not: their upper value is certified but much looser at equal rank, and
    their lower value relies on superadditivity, which holds for the full
    shift (one partition interval) but not in general.
    """
    return _pressure_quotient(p, part, t, rank)


def _build_partition(p: Parameter, q_max: int) -> tuple:
    cls = classify(p, q_max)
    if cls.status is not TongueStatus.IN_TONGUE:
        raise DomainError(f"no attracting cycle found up to period {q_max}")
    lam = cls.cycle.lam
    if not LAMBDA_MIN < lam < 1.0 - LAMBDA_MARGIN:
        raise DomainError(f"multiplier {lam:.6g} outside the linearization window")
    arcs = immediate_basin_arcs(p, cls.cycle)
    return cls, markov_partition(p, arcs)


def bowen_dimension(
    p: Parameter,
    tol: float = 1e-2,
    q_max: int = DEFAULT_QMAX,
    rank_start: int = RANK_START,
    rank_cap: int = RANK_CAP,
    part: Optional[MarkovPartition] = None,
) -> DimensionEstimate:
    """Hausdorff dimension of the chaotic set as the certified pressure zero.

    Bisection on t keeps a bracket whose ends carry certified pressure signs
    (positive at t_lower, negative at t_upper); whenever the certified bounds
    at the midpoint straddle zero the refinement rank doubles, up to the cap.
    If the cap is reached first, the widest certified bracket is returned
    with certified=False.
    """
    if part is None:
        _, part = _build_partition(p, q_max)
    rank = rank_start

    t_lo, t_hi = 0.0, 1.0
    certified = True
    # the count sum at t = 0 certifies positive pressure; certify the right end
    while True:
        _, hi = _certified_bracket(p, part, 1.0, rank)
        if hi < 0.0:
            break
        if rank >= rank_cap:
            certified = False
            break
        rank = min(2 * rank, rank_cap)

    while certified and t_hi - t_lo > tol:
        tm = 0.5 * (t_lo + t_hi)
        lo, hi = _certified_bracket(p, part, tm, rank)
        if lo > 0.0:
            t_lo = tm
        elif hi < 0.0:
            t_hi = tm
        else:
            if rank >= rank_cap:
                certified = False
                break
            rank = min(2 * rank, rank_cap)
    t_star = _refine_root(p, part, t_lo, t_hi, rank)
    return DimensionEstimate(t_star, t_lo, t_hi, rank, certified=certified)


def _refine_root(p: Parameter, part: MarkovPartition, t_lo: float, t_hi: float, rank: int) -> float:
    """Point estimate of the pressure zero inside a certified bracket.

    Bisects the midpoint of the quotient bound (whose upper/lower biases
    largely cancel); not certified, but far more accurate than the bracket
    center, which matters when the bracket is stuck at the rank cap.
    """

    def mid(t: float) -> float:
        lo, hi = _pressure_quotient(p, part, t, rank)
        return 0.5 * (lo + hi)

    lo, hi = t_lo, t_hi
    flo = mid(lo)
    fhi = mid(hi)
    if not (flo > 0.0 > fhi):
        return 0.5 * (t_lo + t_hi)
    for _ in range(40):
        tm = 0.5 * (lo + hi)
        fm = mid(tm)
        if fm > 0.0:
            lo = tm
        else:
            hi = tm
        if hi - lo < 1e-6:
            break
    return 0.5 * (lo + hi)


def box_counting_estimate(p: Parameter, part: MarkovPartition, rank: int = 14) -> float:
    """Box-counting dimension from the rank-n cylinder cover.

    Counts dyadic boxes meeting the cover at scales from 2^-4 down to the
    finest dyadic scale still at least four times the largest cylinder, and
    fits the log-log slope.  Independent of the pressure machinery.
    """
    _extend_tree(p, part, rank)
    nodes = part._levels[rank]
    max_diam = max(node.right - node.left for node in nodes)
    j_hi = int(math.floor(-math.log2(4.0 * max_diam)))
    j_lo = 4
    if j_hi - j_lo < 3:
        raise DomainError("cylinder cover too coarse for a box-counting fit")
    logs, counts = [], []
    for j in range(j_lo, j_hi + 1):
        m = 2 ** j
        boxes = set()
        for node in nodes:
            i0 = math.floor(node.left * m)
            i1 = math.floor(node.right * m)
            for i in range(i0, i1 + 1):
                boxes.add(i % m)
        logs.append(j * math.log(2.0))
        counts.append(math.log(len(boxes)))
    slope = np.polyfit(logs, counts, 1)[0]
    return float(slope)


@dataclass
class DimensionFieldRow:
    a: float
    b: float
    lam: Optional[float] = None
    nu: Optional[float] = None
    t_lower: Optional[float] = None
    t_star: Optional[float] = None
    t_upper: Optional[float] = None
    rank: Optional[int] = None
    status: str = "ok"


def dimension_row(p: Parameter, tol: float, q_max: int = DEFAULT_QMAX) -> DimensionFieldRow:
    """One dimension-field row; failures land in the status, never raise."""
    row = DimensionFieldRow(a=p.a, b=p.b)
    try:
        cls, part = _build_partition(p, q_max)
        uv = _uniformize_from_cycle(p, cls.cycle)
        row.lam = cls.cycle.lam
        row.nu = uv.nu
        est = bowen_dimension(p, tol=tol, q_max=q_max, part=part)
        row.t_lower = est.t_lower
        row.t_star = est.t_star
        row.t_upper = est.t_upper
        row.rank = est.rank
        if not est.certified:
            row.status = "rank-cap"
    except DsmError as exc:
        row.status = f"failed: {exc}"
    return row


def dimension_field(
    tongue_seed: Parameter, grid, tol: float = 1e-2, q_max: int = DEFAULT_QMAX
) -> list:
    """Dimension table over a parameter grid restricted to the seed's tongue.

    Rows whose classification differs from the seed's (period, type) are
    marked excluded; per-row failures are recorded and never abort the grid.
    """
    seed_cls = classify(tongue_seed, q_max)
    if seed_cls.status is not TongueStatus.IN_TONGUE:
        raise DomainError("seed parameter is not in a tongue")
    seed_key = (seed_cls.orbit_type.q, seed_cls.orbit_type.k)
    rows = []
    for p in grid:
        try:
            cls = classify(p, q_max)
        except DsmError as exc:
            rows.append(DimensionFieldRow(a=p.a, b=p.b, status=f"failed: {exc}"))
            continue
        if cls.status is not TongueStatus.IN_TONGUE:
            rows.append(DimensionFieldRow(a=p.a, b=p.b, status="not-in-tongue"))
            continue
        if (cls.orbit_type.q, cls.orbit_type.k) != seed_key:
            rows.append(DimensionFieldRow(a=p.a, b=p.b, status="different-tongue"))
            continue
        rows.append(dimension_row(p, tol, q_max))
    return rows


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return format(x, ".17g")


def write_dimension_csv(rows, fh) -> None:
    """Emit the dimension-field table with its declared header."""
    fh.write("a,b,lambda,nu,t_lower,t_star,t_upper,rank,status\n")
    for r in rows:
        fh.write(
            ",".join(
                [
                    _fmt(r.a),
                    _fmt(r.b),
                    _fmt(r.lam),
                    _fmt(r.nu),
                    _fmt(r.t_lower),
                    _fmt(r.t_star),
                    _fmt(r.t_upper),
                    _fmt(r.rank),
                    r.status,
                ]
            )
            + "\n"
        )


@dataclass
class SmoothnessReport:
    passed: bool
    residuals: list        # (degree, max residual) pairs
    median_width: float
    threshold: float


def smoothness_diagnostic(samples) -> SmoothnessReport:
    """Polynomial-fit residual probe for smooth parameter dependence.

    Fits t_star against arclength along the sample path by least squares for
    degrees 3..6 and passes when some fit's maximum residual stays within
    three median bracket widths.  A smoothness proxy, not a proof.
    """
    rows = [r for r in samples if r.status == "ok" and r.t_star is not None]
    if len(rows) < 8:
        raise DomainError(f"need at least 8 usable samples, got {len(rows)}")
    s = [0.0]
    for r0, r1 in zip(rows, rows[1:]):
        step = math.hypot(r1.a - r0.a, r1.b - r0.b)
        if step < 1e-15:
            raise DomainError("degenerate path: repeated parameters")
        s.append(s[-1] + step)
    s = np.asarray(s)
    s = s / s[-1]
    t = np.asarray([r.t_star for r in rows])
    widths = np.asarray([r.t_upper - r.t_lower for r in rows])
    threshold = 3.0 * float(np.median(widths))
    residuals = []
    for deg in range(3, 7):
        coeff = np.polyfit(s, t, deg)
        res = float(np.max(np.abs(np.polyval(coeff, s) - t)))
        residuals.append((deg, res))
    passed = any(res <= threshold for _, res in residuals)
    return SmoothnessReport(
        passed=passed,
        residuals=residuals,
        median_width=float(np.median(widths)),
        threshold=threshold,
    )
