"""Command-line surface: scans, classification, uniformization, rays, dimensions.

Single-result commands print one JSON object to stdout with a fixed key set
(a, b, period, type_k, lambda, nu, xi_re, xi_im, t_lower, t_star, t_upper,
status); grid commands write PPM or CSV files.  Exit codes: 0 success, 1
usage error, 2 signalled domain error (the JSON then carries the reason in
"status").  Scans are distributed over a worker pool by rows; output is
byte-identical for any worker count.
"""

import argparse
import cmath
import colorsys
import hashlib
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import Parameter
from .cycles import TongueStatus, classify
from .errors import DomainError, DsmError
from .linearize import (
    invert_uniformization,
    superattracting_parameters,
    trace_internal_ray,
    uniformize,
)
from .thermo import (
    bowen_dimension,
    dimension_field,
    dimension_row,
    smoothness_diagnostic,
    write_dimension_csv,
    DimensionFieldRow,
)

_JSON_KEYS = (
    "a",
    "b",
    "period",
    "type_k",
    "lambda",
    "nu",
    "xi_re",
    "xi_im",
    "t_lower",
    "t_star",
    "t_upper",
    "status",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so exit codes stay ours."""

    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class ScanConfig:
    """Pixel grid over a parameter window; pixels sample cell centers."""

    a_min: float
    a_max: float
    b_min: float
    b_max: float
    width: int
    height: int
    q_max: int = 10
    workers: int = 1

    def __post_init__(self):
        if not (self.a_max > self.a_min and self.b_max > self.b_min):
            raise DomainError("scan window is empty")
        if self.a_min < -0.5 - 1e-12 or self.a_max > 0.5 + 1e-12:
            raise DomainError("a-window must lie within [-1/2, 1/2]")
        if self.b_min < -1e-12 or self.b_max > 1.0 + 1e-12:
            raise DomainError("b-window must lie within [0, 1]")
        if self.width < 1 or self.height < 1:
            raise DomainError("scan needs positive pixel counts")
        if not 1 <= self.q_max <= 12:
            raise DomainError("q_max must lie in 1..12")
        if self.workers < 1:
            raise DomainError("workers must be >= 1")


@dataclass
class ScanResult:
    """Per-pixel classification codes; row j = 0 is the b_min edge.

    Code 0 means no attracting cycle was found; otherwise the period q and
    type index k are packed as (k << 4) | q.
    """

    codes: np.ndarray
    config: ScanConfig

    @property
    def content_hash(self) -> str:
        # worker count is an execution detail, not part of the result identity
        cfg = self.config
        key = (cfg.a_min, cfg.a_max, cfg.b_min, cfg.b_max, cfg.width, cfg.height, cfg.q_max)
        h = hashlib.sha256()
        h.update(repr(key).encode())
        h.update(self.codes.tobytes())
        return h.hexdigest()


def encode_class(q: int, k: int) -> int:
    return (k << 4) | q


def decode_class(code: int) -> tuple:
    return code & 15, code >> 4


def classify_code(a: float, b: float, q_max: int) -> int:
    """Pixel classification: 0 when nothing is found or anything signals."""
    try:
        cls = classify(Parameter(a, b), q_max)
    except DsmError:
        return 0
    if cls.status is not TongueStatus.IN_TONGUE:
        return 0
    return encode_class(cls.orbit_type.q, cls.orbit_type.k)


def _scan_rows(args) -> tuple:
    cfg_tuple, rows = args
    a_min, a_max, b_min, b_max, width, height, q_max = cfg_tuple
    da = (a_max - a_min) / width
    db = (b_max - b_min) / height
    out = []
    for j in rows:
        b = b_min + (j + 0.5) * db
        row = [classify_code(a_min + (i + 0.5) * da, b, q_max) for i in range(width)]
        out.append((j, row))
    return out


def scan_tongues(cfg: ScanConfig) -> ScanResult:
    """Classify every pixel center; deterministic for any worker count."""
    codes = np.zeros((cfg.height, cfg.width), dtype=np.int32)
    cfg_tuple = (cfg.a_min, cfg.a_max, cfg.b_min, cfg.b_max, cfg.width, cfg.height, cfg.q_max)
    rows = list(range(cfg.height))
    if cfg.workers == 1:
        chunks = [_scan_rows((cfg_tuple, rows))]
    else:
        batches = [rows[i :: 2 * cfg.workers] for i in range(2 * cfg.workers)]
        batches = [b for b in batches if b]
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunks = list(pool.map(_scan_rows, [(cfg_tuple, b) for b in batches]))
    for chunk in chunks:
        for j, row in chunk:
            codes[j, :] = row
    return ScanResult(codes=codes, config=cfg)


def palette(code: int) -> tuple:
    """Fixed color per (q, k): hue by period, brightness by type index."""
    if code == 0:
        return (0, 0, 0)
    q, k = decode_class(code)
    hue = (q * 0.618033988749895) % 1.0
    den = max(1, 2 ** q - 2)
    val = 1.0 - 0.55 * (k / den)
    r, g, b = colorsys.hsv_to_rgb(hue, 0.85, val)
    return (round(255 * r), round(255 * g), round(255 * b))


def render_ppm(result: ScanResult, path) -> None:
    """Binary PPM (P6, maxval 255), top row at b_max; byte-stable."""
    h, w = result.codes.shape
    lut = {}
    body = bytearray()
    for j in range(h - 1, -1, -1):
        for code in result.codes[j]:
            c = int(code)
            rgb = lut.get(c)
            if rgb is None:
                rgb = bytes(palette(c))
                lut[c] = rgb
            body += rgb
    try:
        with open(path, "wb") as fh:
            fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
            fh.write(bytes(body))
    except OSError as exc:
        raise DomainError(f"cannot write PPM to {path}: {exc}") from exc


def _fmt_value(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g")
    return '"' + str(v).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _emit_json(record: dict) -> None:
    parts = [f'"{k}": {_fmt_value(record.get(k))}' for k in _JSON_KEYS]
    sys.stdout.write("{" + ", ".join(parts) + "}\n")


def _record(p: Parameter = None, status: str = "") -> dict:
    rec = {k: None for k in _JSON_KEYS}
    if p is not None:
        rec["a"] = p.a
        rec["b"] = p.b
    rec["status"] = status
    return rec


def _fill_classification(rec: dict, p: Parameter, q_max: int, strict: bool) -> dict:
    cls = classify(p, q_max)
    rec["status"] = cls.status.value
    if cls.status is not TongueStatus.IN_TONGUE:
        if strict:
            raise DomainError(f"no attracting cycle found up to period {q_max}")
        return rec
    rec["period"] = cls.orbit_type.q
    rec["type_k"] = cls.orbit_type.k
    rec["lambda"] = cls.cycle.lam
    try:
        uv = uniformize(p, q_max)
    except DsmError:
        if strict:
            raise
        return rec
    rec["nu"] = uv.nu
    rec["xi_re"] = uv.xi.real
    rec["xi_im"] = uv.xi.imag
    return rec


def _cmd_classify(ns) -> int:
    p = Parameter(ns.a, ns.b)
    rec = _record(p)
    _fill_classification(rec, p, ns.qmax, strict=False)
    _emit_json(rec)
    return 0


def _cmd_uniformize(ns) -> int:
    p = Parameter(ns.a, ns.b)
    rec = _record(p)
    _fill_classification(rec, p, ns.qmax, strict=True)
    _emit_json(rec)
    return 0


def _cmd_invert(ns) -> int:
    seed = Parameter(ns.seed_a, ns.seed_b)
    target = complex(ns.target_re, ns.target_im)
    p = invert_uniformization(seed, target, ns.qmax)
    rec = _record(p)
    _fill_classification(rec, p, ns.qmax, strict=True)
    _emit_json(rec)
    return 0


def _cmd_dimension(ns) -> int:
    p = Parameter(ns.a, ns.b)
    rec = _record(p)
    _fill_classification(rec, p, ns.qmax, strict=True)
    est = bowen_dimension(p, tol=ns.tol, q_max=ns.qmax)
    rec["t_lower"] = est.t_lower
    rec["t_star"] = est.t_star
    rec["t_upper"] = est.t_upper
    if not est.certified:
        rec["status"] = "RankCapReached"
    _emit_json(rec)
    return 0


def _cmd_superattracting(ns) -> int:
    entries = superattracting_parameters(ns.q)
    items = ", ".join(
        "{" + f'"a": {format(a, ".17g")}, "type_k": {ot.k}' + "}" for a, ot in entries
    )
    sys.stdout.write("[" + items + "]\n")
    return 0


def _cmd_ray(ns) -> int:
    seed = Parameter(ns.seed_a, ns.seed_b)
    lams = [float(s) for s in ns.lambdas.split(",") if s]
    params = trace_internal_ray(seed, ns.nu, lams, ns.qmax)
    try:
        with open(ns.out, "w", encoding="ascii") as fh:
            fh.write("lambda,a,b,xi_re,xi_im\n")
            for lam, p in zip(lams, params):
                xi = lam * cmath.exp(complex(0.0, 2.0 * ns.nu))
                fh.write(
                    f"{lam:.17g},{p.a:.17g},{p.b:.17g},{xi.real:.17g},{xi.imag:.17g}\n"
                )
    except OSError as exc:
        raise DomainError(f"cannot write CSV to {ns.out}: {exc}") from exc
    sys.stdout.write(f'{{"status": "ok", "points": {len(params)}}}\n')
    return 0


def _cmd_scan(ns) -> int:
    cfg = ScanConfig(
        a_min=ns.amin,
        a_max=ns.amax,
        b_min=ns.bmin,
        b_max=ns.bmax,
        width=ns.width,
        height=ns.height,
        q_max=ns.qmax,
        workers=ns.workers,
    )
    result = scan_tongues(cfg)
    render_ppm(result, ns.out)
    nonzero = int(np.count_nonzero(result.codes))
    sys.stdout.write(
        f'{{"status": "ok", "nonzero_pixels": {nonzero}, '
        f'"content_hash": "{result.content_hash}"}}\n'
    )
    return 0


def _grid_parameters(ns) -> list:
    if ns.asteps == 1:
        avals = [0.5 * (ns.amin + ns.amax)]
    else:
        avals = [
            ns.amin + i * (ns.amax - ns.amin) / (ns.asteps - 1) for i in range(ns.asteps)
        ]
    if ns.bsteps == 1:
        bvals = [0.5 * (ns.bmin + ns.bmax)]
    else:
        bvals = [
            ns.bmin + j * (ns.bmax - ns.bmin) / (ns.bsteps - 1) for j in range(ns.bsteps)
        ]
    return [Parameter(a, b) for b in bvals for a in avals]


def _field_row(args) -> tuple:
    idx, a, b, tol, q_max, seed_key = args
    p = Parameter(a, b)
    try:
        cls = classify(p, q_max)
    except DsmError as exc:
        return idx, DimensionFieldRow(a=p.a, b=p.b, status=f"failed: {exc}")
    if cls.status is not TongueStatus.IN_TONGUE:
        return idx, DimensionFieldRow(a=p.a, b=p.b, status="not-in-tongue")
    if (cls.orbit_type.q, cls.orbit_type.k) != seed_key:
        return idx, DimensionFieldRow(a=p.a, b=p.b, status="different-tongue")
    return idx, dimension_row(p, tol, q_max)


def _cmd_dimension_field(ns) -> int:
    seed = Parameter(ns.seed_a, ns.seed_b)
    grid = _grid_parameters(ns)
    seed_cls = classify(seed, ns.qmax)
    if seed_cls.status is not TongueStatus.IN_TONGUE:
        raise DomainError("seed parameter is not in a tongue")
    seed_key = (seed_cls.orbit_type.q, seed_cls.orbit_type.k)
    if ns.workers == 1:
        rows = dimension_field(seed, grid, tol=ns.tol, q_max=ns.qmax)
    else:
        tasks = [
            (i, p.a, p.b, ns.tol, ns.qmax, seed_key) for i, p in enumerate(grid)
        ]
        rows = [None] * len(grid)
        with ProcessPoolExecutor(max_workers=ns.workers) as pool:
            for idx, row in pool.map(_field_row, tasks):
                rows[idx] = row
    try:
        with open(ns.out, "w", encoding="ascii") as fh:
            write_dimension_csv(rows, fh)
    except OSError as exc:
        raise DomainError(f"cannot write CSV to {ns.out}: {exc}") from exc
    n_ok = sum(1 for r in rows if r.status == "ok")
    sys.stdout.write(f'{{"status": "ok", "rows": {len(rows)}, "ok_rows": {n_ok}}}\n')
    return 0


def _read_field_csv(path) -> list:
    rows = []
    try:
        with open(path, "r", encoding="ascii") as fh:
            header = fh.readline().strip()
            if header != "a,b,lambda,nu,t_lower,t_star,t_upper,rank,status":
                raise DomainError(f"unexpected CSV header in {path}")
            for line in fh:
                parts = line.rstrip("\n").split(",")
                if len(parts) != 9:
                    continue
                row = DimensionFieldRow(a=float(parts[0]), b=float(parts[1]), status=parts[8])
                if parts[2]:
                    row.lam = float(parts[2])
                if parts[3]:
                    row.nu = float(parts[3])
                if parts[4]:
                    row.t_lower = float(parts[4])
                if parts[5]:
                    row.t_star = float(parts[5])
                if parts[6]:
                    row.t_upper = float(parts[6])
                if parts[7]:
                    row.rank = int(parts[7])
                rows.append(row)
    except OSError as exc:
        raise DomainError(f"cannot read CSV from {path}: {exc}") from exc
    return rows


def _cmd_smoothness(ns) -> int:
    rows = _read_field_csv(ns.input)
    rep = smoothness_diagnostic(rows)
    residuals = ", ".join(f"[{d}, {format(r, '.17g')}]" for d, r in rep.residuals)
    sys.stdout.write(
        f'{{"status": "{"PASS" if rep.passed else "FAIL"}", '
        f'"median_width": {format(rep.median_width, ".17g")}, '
        f'"threshold": {format(rep.threshold, ".17g")}, '
        f'"residuals": [{residuals}]}}\n'
    )
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="dsmlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_qmax(sp):
        sp.add_argument("--qmax", type=int, default=12)

    sp = sub.add_parser("classify", help="tongue classification at one parameter")
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--b", type=float, required=True)
    add_qmax(sp)
    sp.set_defaults(func=_cmd_classify)

    sp = sub.add_parser("uniformize", help="multiplier and critical angle invariant")
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--b", type=float, required=True)
    add_qmax(sp)
    sp.set_defaults(func=_cmd_uniformize)

    sp = sub.add_parser("invert", help="parameter with a prescribed invariant value")
    sp.add_argument("--seed-a", type=float, required=True)
    sp.add_argument("--seed-b", type=float, required=True)
    sp.add_argument("--target-re", type=float, required=True)
    sp.add_argument("--target-im", type=float, default=0.0)
    add_qmax(sp)
    sp.set_defaults(func=_cmd_invert)

    sp = sub.add_parser("ray", help="trace an internal ray to a CSV file")
    sp.add_argument("--seed-a", type=float, required=True)
    sp.add_argument("--seed-b", type=float, required=True)
    sp.add_argument("--nu", type=float, required=True)
    sp.add_argument("--lambdas", type=str, required=True, help="descending, comma separated")
    sp.add_argument("--out", type=str, required=True)
    add_qmax(sp)
    sp.set_defaults(func=_cmd_ray)

    sp = sub.add_parser("superattracting", help="ceiling parameters of one period")
    sp.add_argument("--q", type=int, required=True)
    sp.set_defaults(func=_cmd_superattracting)

    sp = sub.add_parser("dimension", help="Hausdorff dimension of the chaotic set")
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--b", type=float, required=True)
    sp.add_argument("--tol", type=float, default=1e-2)
    add_qmax(sp)
    sp.set_defaults(func=_cmd_dimension)

    sp = sub.add_parser("scan", help="tongue scan to a PPM image")
    sp.add_argument("--amin", type=float, required=True)
    sp.add_argument("--amax", type=float, required=True)
    sp.add_argument("--bmin", type=float, required=True)
    sp.add_argument("--bmax", type=float, required=True)
    sp.add_argument("--width", type=int, required=True)
    sp.add_argument("--height", type=int, required=True)
    sp.add_argument("--qmax", type=int, default=10)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out", type=str, required=True)
    sp.set_defaults(func=_cmd_scan)

    sp = sub.add_parser("dimension-field", help="dimension table over a grid, to CSV")
    sp.add_argument("--seed-a", type=float, required=True)
    sp.add_argument("--seed-b", type=float, required=True)
    sp.add_argument("--amin", type=float, required=True)
    sp.add_argument("--amax", type=float, required=True)
    sp.add_argument("--asteps", type=int, required=True)
    sp.add_argument("--bmin", type=float, required=True)
    sp.add_argument("--bmax", type=float, required=True)
    sp.add_argument("--bsteps", type=int, required=True)
    sp.add_argument("--tol", type=float, default=1e-2)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--out", type=str, required=True)
    add_qmax(sp)
    sp.set_defaults(func=_cmd_dimension_field)

    sp = sub.add_parser("smoothness", help="polynomial-fit probe on a dimension CSV")
    sp.add_argument("--input", type=str, required=True)
    sp.set_defaults(func=_cmd_smoothness)

    return parser


def run_subcommand(argv) -> int:
    """Dispatch one CLI invocation; returns the process exit code."""
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 1
    try:
        return ns.func(ns)
    except DsmError as exc:
        rec = _record(status=f"error: {exc}")
        _emit_json(rec)
        return 2


def main() -> None:
    sys.exit(run_subcommand(sys.argv[1:]))


if __name__ == "__main__":
    main()
