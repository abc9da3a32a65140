"""Immediate-basin arcs, the Markov partition, and cylinder covers of the chaotic set.

The maximal chaotic set is the circle minus the total basin of the attracting
cycle.  Its natural cover starts from the closed arcs complementary to the
immediate basin (the coarse Markov partition) and refines by pulling those
arcs back through the monotone inverse branches of the lift.

Rank convention: a rank-n cylinder is the result of n inverse-branch
pullbacks, i.e. the set of points whose first n transitions are prescribed.
Its word is the vertex itinerary (length n+1), its derivative bounds control
|(f^n)'| on the interval, and there are exactly k * 2^n of them (every point
of the chaotic set has two preimages in it, so each cylinder has exactly two
children).  With k = 1 the coding is the full shift on two branch symbols.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .core import TWO_PI, Parameter, circle_dist, deriv_circle, eval_circle, eval_lift, mod1
from .cycles import AttractingCycle, LAMBDA_MARGIN, _fq_lift
from .errors import DomainError, MarkovError

_ENDPOINT_TOL = 1e-9     # slack when matching endpoints across the lift
_WALK_SEED = 1e-9        # first probe away from a cycle point


@dataclass
class BasinArcs:
    """One open arc (l_i, r_i) per cycle point, in a local lift with l < x < r."""

    arcs: list
    cycle: AttractingCycle

    def total_length(self) -> float:
        return sum(r - l for l, r in self.arcs)


class _Node:
    """One cylinder interval in the refinement tree.

    img points to the image cylinder one level down (f maps this node onto
    it, via the deck shift kk of the branch over R_sym); p_left/p_right are
    the exact derivative products of the full composition at the endpoints.
    """

    __slots__ = ("left", "right", "sym", "img", "kk", "p_left", "p_right")

    def __init__(self, left, right, sym, img, kk, p_left, p_right):
        self.left = left
        self.right = right
        self.sym = sym
        self.img = img
        self.kk = kk
        self.p_left = p_left
        self.p_right = p_right


@dataclass(eq=False)
class MarkovPartition:
    """Closed arcs complementary to the immediate basin, with transition data.

    matrix[i][j] = 1 iff f(R_i) covers R_j; multiplicity[i][j] counts the
    monotone branches of f on R_i lying over R_j (column sums are exactly 2).
    distortion is V = sup|f''| / inf f' over the partition hull, used to
    inflate sampled derivative bounds on cylinders.
    """

    parameter: Parameter
    intervals: list
    matrix: np.ndarray
    multiplicity: np.ndarray
    distortion: float
    arcs: BasinArcs
    _levels: list = field(default_factory=list, repr=False)
    _bounds: dict = field(default_factory=dict, repr=False)
    _quotients: dict = field(default_factory=dict, repr=False)
    _containers: list = field(default_factory=list, repr=False)
    _lastkeys: dict = field(default_factory=dict, repr=False)
    _f_images: list = field(default_factory=list, repr=False)


@dataclass(frozen=True)
class CylinderSet:
    """A rank-n cylinder: word of n+1 symbols, interval, and |(f^n)'| bounds."""

    word: tuple
    left: float
    right: float
    deriv_min: float
    deriv_max: float


def _first_fixed_point(p: Parameter, x: float, q: int, m: int, direction: int) -> float:
    """Nearest zero of F^q(y) - y - m on the given side of the cycle point x.

    Inside the basin arc the displacement has one sign, so the first sign
    change brackets the repelling endpoint; the walk step is capped well below
    the typical spacing of period-q points so no zero pair is skipped.
    """
    cap = min(1e-3, 2.0 ** (-q) / 8.0)

    def g(y: float) -> float:
        fq, _, _ = _fq_lift(p, y, q)
        return fq - y - m

    prev = x + direction * _WALK_SEED
    gprev = g(prev)
    step = 1e-6
    walked = 0.0
    while True:
        cur = prev + direction * step
        gcur = g(cur)
        if (gcur < 0.0) != (gprev < 0.0) or gcur == 0.0:
            break
        prev, gprev = cur, gcur
        walked += step
        step = min(step * 1.6, cap)
        if walked > 1.5:
            raise MarkovError("no repelling endpoint within one revolution")
    # first sign change inside the bracket, then bisection
    lo, hi = (prev, cur) if direction > 0 else (cur, prev)
    glo, ghi = (gprev, gcur) if direction > 0 else (gcur, gprev)
    n_sub = 32
    if direction > 0:
        xs = [lo + (hi - lo) * j / n_sub for j in range(1, n_sub)]
    else:
        xs = [hi - (hi - lo) * j / n_sub for j in range(1, n_sub)]
    ga, apt = glo if direction > 0 else ghi, prev
    for y in xs:
        gy = g(y)
        if (gy < 0.0) != (ga < 0.0):
            if direction > 0:
                lo, hi, glo, ghi = apt, y, ga, gy
            else:
                lo, hi, glo, ghi = y, apt, gy, ga
            break
        ga, apt = gy, y
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if (gm < 0.0) == (glo < 0.0):
            lo, glo = mid, gm
        else:
            hi, ghi = mid, gm
    y = 0.5 * (lo + hi)
    for _ in range(30):
        fq, prod, _ = _fq_lift(p, y, q)
        dg = prod - 1.0
        if dg == 0.0:
            break
        stepn = (fq - y - m) / dg
        y -= stepn
        if abs(stepn) < 1e-15:
            break
    fq, prod, _ = _fq_lift(p, y, q)
    if abs(fq - y - m) > 1e-11:
        raise MarkovError("endpoint polish did not converge to a period-q point")
    if prod <= 1.0:
        raise MarkovError(
            f"polished arc endpoint is not repelling ((f^q)' = {prod:.6g}); "
            "possibly a different period under boundary identification"
        )
    return y


def immediate_basin_arcs(p: Parameter, cycle: AttractingCycle) -> BasinArcs:
    """Maximal arc around each cycle point whose f^q-orbit converges to it.

    Endpoints are Newton-polished repelling fixed points of f^q on the lift.
    """
    if cycle.lam > 1.0 - LAMBDA_MARGIN:
        raise DomainError("cycle is not attracting within the declared margin")
    q = cycle.q
    arcs = []
    for x in cycle.points:
        fq, _, _ = _fq_lift(p, x, q)
        m = round(fq - x)
        left = _first_fixed_point(p, x, q, m, -1)
        right = _first_fixed_point(p, x, q, m, +1)
        if not left < x < right:
            raise MarkovError("arc endpoints do not straddle the cycle point")
        arcs.append((left, right))
    if sum(r - l for l, r in arcs) >= 1.0:
        raise MarkovError("basin arcs overlap: endpoint search failed")
    # the dynamics must send arc i onto arc i+1
    for i in range(q):
        l_i, r_i = arcs[i]
        l_n, r_n = arcs[(i + 1) % q]
        if (
            circle_dist(eval_circle(p, l_i), mod1(l_n)) > 1e-8
            or circle_dist(eval_circle(p, r_i), mod1(r_n)) > 1e-8
        ):
            raise MarkovError("basin arcs are not permuted by the dynamics")
    return BasinArcs(arcs=arcs, cycle=cycle)


def _fprime_extrema(p: Parameter, lo: float, hi: float):
    """Exact (min, max) of f' = 2 + 2b cos(2 pi x) over [lo, hi] on the lift."""
    cands = [lo, hi]
    k = math.floor(lo)
    while k <= hi:
        for c in (float(k), k + 0.5):
            if lo < c < hi:
                cands.append(c)
        k += 1
    vals = [deriv_circle(p, x) for x in cands]
    return min(vals), max(vals)


def _fsecond_max(p: Parameter, lo: float, hi: float) -> float:
    """Exact max of |f''| = 4 pi b |sin(2 pi x)| over [lo, hi]."""
    cands = [lo, hi]
    k = math.floor(lo)
    while k <= hi:
        for c in (k + 0.25, k + 0.75):
            if lo < c < hi:
                cands.append(c)
        k += 1
    return max(2.0 * TWO_PI * p.b * abs(math.sin(TWO_PI * x)) for x in cands)


def markov_partition(p: Parameter, arcs: BasinArcs) -> MarkovPartition:
    """Coarse Markov partition: the closed arcs between consecutive basin arcs."""
    q = len(arcs.arcs)
    circ = sorted((mod1(l), (r - l)) for l, r in arcs.arcs)
    intervals = []
    for j in range(q):
        l_j, len_j = circ[j]
        r_j = l_j + len_j
        l_next = circ[(j + 1) % q][0]
        gap = mod1(l_next - r_j)
        if gap < 1e-10 or gap >= 1.0 - 1e-12:
            raise MarkovError("degenerate partition interval between basin arcs")
        lo = mod1(r_j)
        intervals.append((lo, lo + gap))

    # Markov property: images of partition endpoints are partition endpoints
    endpoints = [mod1(e) for lo, hi in intervals for e in (lo, hi)]
    for e in endpoints:
        fe = eval_circle(p, e)
        if min(circle_dist(fe, e2) for e2 in endpoints) > _ENDPOINT_TOL:
            raise MarkovError("image of a partition endpoint misses every endpoint")

    k = len(intervals)
    mult = np.zeros((k, k), dtype=np.int64)
    f_images = []
    for i, (lo, hi) in enumerate(intervals):
        flo, fhi = eval_lift(p, lo), eval_lift(p, hi)
        f_images.append((flo, fhi))
        for j, (lo_j, hi_j) in enumerate(intervals):
            kk = math.ceil(flo - lo_j - _ENDPOINT_TOL)
            while hi_j + kk <= fhi + _ENDPOINT_TOL:
                if lo_j + kk >= flo - _ENDPOINT_TOL:
                    mult[i, j] += 1
                kk += 1
    col = mult.sum(axis=0)
    if not np.all(col == 2):
        raise MarkovError(f"branch count over the partition is {col.tolist()}, expected all 2")

    fmin = min(_fprime_extrema(p, lo, hi)[0] for lo, hi in intervals)
    fsec = max(_fsecond_max(p, lo, hi) for lo, hi in intervals)
    if fmin <= 0.0:
        raise MarkovError("f' vanishes on the partition hull: distortion unbounded")

    part = MarkovPartition(
        parameter=p,
        intervals=intervals,
        matrix=(mult > 0).astype(np.int64),
        multiplicity=mult,
        distortion=fsec / fmin,
        arcs=arcs,
    )
    part._f_images = f_images
    part._levels = [
        [_Node(lo, hi, s, -1, 0, 1.0, 1.0) for s, (lo, hi) in enumerate(intervals)]
    ]
    part._containers = []
    part._lastkeys = {}
    return part


def _invert_lift(p: Parameter, c: float, lo: float, hi: float, flo: float, fhi: float) -> float:
    """Solve F(x) = c on [lo, hi], where F is monotone increasing."""
    if c <= flo:
        return lo
    if c >= fhi:
        return hi
    a, b = p.a, p.b
    bp = b / math.pi
    sin, cos = math.sin, math.cos
    blo, bhi = lo, hi
    x = lo + (hi - lo) * (c - flo) / (fhi - flo)
    for _ in range(80):
        fx = 2.0 * x + a + bp * sin(TWO_PI * x)
        if fx < c:
            blo = x
        else:
            bhi = x
        d = 2.0 + 2.0 * b * cos(TWO_PI * x)
        xn = x - (fx - c) / d if d > 0.0 else 0.5 * (blo + bhi)
        if not blo <= xn <= bhi:
            xn = 0.5 * (blo + bhi)
        if abs(xn - x) < 1e-15:
            return xn
        x = xn
    return x


def _extend_tree(p: Parameter, part: MarkovPartition, rank: int) -> None:
    """Grow the refinement tree to the requested rank (levels are cached).

    Alongside the nodes, a container index is kept per level: the unique
    cylinder one rank coarser that contains each node.  The child of image I
    via branch (s, kk) sits inside the child of I's container via the same
    branch; that child always exists because branch images are unions of
    whole partition intervals.
    """
    while len(part._levels) <= rank:
        prev = part._levels[-1]
        level_no = len(part._levels)
        prev_cont = part._containers[-1] if part._containers else None
        prev_keys = part._lastkeys
        out = []
        keys = {}
        cont = []
        for s, (lo, hi) in enumerate(part.intervals):
            flo, fhi = part._f_images[s]
            for idx, node in enumerate(prev):
                u, v = node.left, node.right
                kk = math.ceil(flo - u - _ENDPOINT_TOL)
                while v + kk <= fhi + _ENDPOINT_TOL:
                    if u + kk >= flo - _ENDPOINT_TOL:
                        l = _invert_lift(p, u + kk, lo, hi, flo, fhi)
                        r = _invert_lift(p, v + kk, lo, hi, flo, fhi)
                        keys[(s, idx, kk)] = len(out)
                        if level_no == 1:
                            cont.append(s)
                        else:
                            ci = prev_keys.get((s, int(prev_cont[idx]), kk))
                            if ci is None:
                                raise MarkovError("container lookup failed in the pullback tree")
                            cont.append(ci)
                        out.append(
                            _Node(
                                l,
                                r,
                                s,
                                idx,
                                kk,
                                deriv_circle(p, l) * node.p_left,
                                deriv_circle(p, r) * node.p_right,
                            )
                        )
                    kk += 1
        if len(out) != 2 * len(prev):
            raise MarkovError(
                f"pullback produced {len(out)} children of {len(prev)} cylinders, expected x2"
            )
        part._levels.append(out)
        part._containers.append(np.asarray(cont, dtype=np.int64))
        part._lastkeys = keys


def _bounds_arrays(p: Parameter, part: MarkovPartition, rank: int):
    """(deriv_min, deriv_max, diam) arrays over all rank-n cylinders, cached.

    Bounds are endpoint/midpoint samples of |(f^n)'| inflated by the
    distortion factor exp(V * diam); two-sided in the rigorous style, not
    certified interval arithmetic.
    """
    if rank in part._bounds:
        return part._bounds[rank]
    _extend_tree(p, part, rank)
    nodes = part._levels[rank]
    a, b = p.a, p.b
    bp = b / math.pi
    sin, cos = math.sin, math.cos
    v_const = part.distortion
    n = len(nodes)
    dmin = np.empty(n)
    dmax = np.empty(n)
    diam = np.empty(n)
    for i, node in enumerate(nodes):
        y = 0.5 * (node.left + node.right)
        prod = 1.0
        for _ in range(rank):
            prod *= 2.0 + 2.0 * b * cos(TWO_PI * y)
            y = (2.0 * y + a + bp * sin(TWO_PI * y)) % 1.0
        w = node.right - node.left
        infl = math.exp(v_const * w)
        lo = min(node.p_left, node.p_right, prod)
        hi = max(node.p_left, node.p_right, prod)
        dmin[i] = lo / infl
        dmax[i] = hi * infl
        diam[i] = w
    part._bounds[rank] = (dmin, dmax, diam)
    return part._bounds[rank]


def _word_of(part: MarkovPartition, rank: int, index: int) -> tuple:
    """Vertex itinerary of a cylinder, reconstructed through the tree."""
    syms = []
    lvl = rank
    idx = index
    while lvl >= 0:
        node = part._levels[lvl][idx]
        syms.append(node.sym)
        idx = node.img
        lvl -= 1
    return tuple(syms)


def refine_cylinders(p: Parameter, part: MarkovPartition, n: int) -> list:
    """All rank-n cylinders (n inverse-branch pullbacks), in word order."""
    if n < 1:
        raise DomainError("rank must be >= 1")
    dmin, dmax, _ = _bounds_arrays(p, part, n)
    nodes = part._levels[n]
    return [
        CylinderSet(
            word=_word_of(part, n, i),
            left=node.left,
            right=node.right,
            deriv_min=float(dmin[i]),
            deriv_max=float(dmax[i]),
        )
        for i, node in enumerate(nodes)
    ]


def cover_length(cylinders: list) -> float:
    """Total length of a single-rank cylinder cover."""
    if not cylinders:
        return 0.0
    ranks = {len(c.word) for c in cylinders}
    if len(ranks) != 1:
        raise DomainError("cover_length expects cylinders of a single rank")
    return sum(c.right - c.left for c in cylinders)


def dump_cylinders_csv(cylinders: list, path) -> None:
    """Write cylinders as CSV rows (word, left, right, deriv_min, deriv_max)."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write("word,left,right,deriv_min,deriv_max\n")
        for c in cylinders:
            word = "-".join(str(s) for s in c.word)
            fh.write(
                f"{word},{c.left:.17g},{c.right:.17g},"
                f"{c.deriv_min:.17g},{c.deriv_max:.17g}\n"
            )
