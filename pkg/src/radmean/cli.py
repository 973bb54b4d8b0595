"""Command-line driver.

Exit codes: 0 success (or certified convex), 2 a convexity check failed,
1 input or usage error. Run parameters go to stderr as ``# run:`` lines
and are embedded in JSON and SVG outputs; CSV files carry only their
column header.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .decomposition import decompose, intersection_point_check, sign_report
from .errors import RadmeanError
from .evaluator import NormEvaluator, boundary_sample_full
from .experiments import DiagonalPoint, determinant_check, matrix_norm_convexity_scan
from .geometry import load_polygon
from .oracle import check_p, norm_mc_radial, norm_xray_exact
from .parallel import pmap
from .verifier import CertifyConfig, certify, disc_convergence

DEFAULT_SEED = 20240601
DEFAULT_SAMPLES = 2048
DEFAULT_MC = 10**6


class UsageError(Exception):
    pass


def _vec(text: str) -> np.ndarray:
    try:
        parts = [float(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"expected 'a,b', got {text!r}") from None
    if len(parts) != 2:
        raise UsageError(f"expected 'a,b', got {text!r}")
    return np.array(parts)


def _run_header(args, **extra) -> dict:
    keys = (
        "polygon",
        "p",
        "x",
        "samples",
        "mc_samples",
        "seed",
        "delta",
        "extended_range",
        "normalization",
        "directions",
    )
    info = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    info.update(extra)
    info["version"] = __version__
    return info


def _announce(info: dict) -> None:
    for k in sorted(info):
        print(f"# run: {k}={info[k]}", file=sys.stderr)


def _out_path(args, name: str) -> Path | None:
    if args.out_dir is None:
        return None
    d = Path(args.out_dir)
    d.mkdir(parents=True, exist_ok=True)
    return d / name


def _emit(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


def _csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _check_p_arg(args) -> float:
    return check_p(args.p, extended=args.extended_range)


def _check_samples(n: int) -> int:
    if n < 3:
        raise UsageError(f"--samples must be at least 3, got {n}")
    return n


def cmd_decompose(args) -> int:
    K = load_polygon(args.polygon)
    D = decompose(K, _vec(args.x))
    out = D.to_json()
    out["sign_report"] = asdict(sign_report(D, strict=False))
    out["parallelogram_areas"] = intersection_point_check(D).parallelogram_areas.tolist()
    out["run"] = _run_header(args)
    _emit(json.dumps(out, indent=2, sort_keys=True) + "\n", _out_path(args, "decomposition.json"))
    return 0


def cmd_eval(args) -> int:
    p = _check_p_arg(args)
    ev = NormEvaluator(load_polygon(args.polygon), p, args.extended_range, args.normalization)
    print(f"{ev.norm(_vec(args.x)):.15g}")
    return 0


def cmd_boundary(args) -> int:
    p = _check_p_arg(args)
    n = _check_samples(args.samples)
    K = load_polygon(args.polygon)
    ev = NormEvaluator(K, p, args.extended_range, args.normalization)
    bs = boundary_sample_full(ev, n)
    _announce(_run_header(args))
    rows = [(float(a), float(x), float(y)) for a, (x, y) in zip(bs.angles, bs.points)]
    if args.format == "svg":
        _emit(_svg(K, bs.points, _run_header(args)), _out_path(args, "boundary.svg"))
    else:
        _emit(_csv(["angle", "x", "y"], rows), _out_path(args, "boundary.csv"))
    return 0


def cmd_certify(args) -> int:
    n = _check_samples(args.samples)
    config = CertifyConfig(samples=n, delta=args.delta, seed=args.seed, extended_range=args.extended_range)
    _check_p_arg(args)
    cert = certify(load_polygon(args.polygon), args.p, config)
    _emit(cert.to_json() + "\n", _out_path(args, "certificate.json"))
    return 0 if cert.verdict == "pass" else 2


def cmd_oracle_compare(args) -> int:
    p = _check_p_arg(args)
    K = load_polygon(args.polygon)
    ev = NormEvaluator(K, p, args.extended_range, args.normalization)
    if args.directions < 1:
        raise UsageError("--directions must be positive")
    if args.mc_samples < 0:
        raise UsageError("--mc-samples must be non-negative")
    _announce(_run_header(args))
    angles = np.pi * (np.arange(args.directions) + 0.5) / args.directions

    def row(item):
        j, a = item
        u = np.array([np.cos(a), np.sin(a)])
        closed, exact = ev.norm(u), norm_xray_exact(K, p, u, args.normalization)
        if args.mc_samples > 0:
            mc = norm_mc_radial(K, p, u, args.mc_samples, args.seed + j)
            if args.normalization == "radial":
                return (float(a), closed, exact, mc.radial_mean_norm, mc.radial_mean_stderr)
            return (float(a), closed, exact, mc.estimate, mc.stderr)
        return (float(a), closed, exact, float("nan"), float("nan"))

    rows = pmap(row, list(enumerate(angles)))
    worst = max(abs(r[1] - r[2]) / r[2] for r in rows)
    print(f"# max relative closed-form vs xray gap: {worst:.3e}", file=sys.stderr)
    header = ["direction", "closed_form", "xray_exact", "mc_estimate", "mc_stderr"]
    _emit(_csv(header, rows), _out_path(args, "oracle_compare.csv"))
    return 0


def cmd_approx_converge(args) -> int:
    try:
        ms = [int(t) for t in args.m_list.split(",")]
    except ValueError:
        raise UsageError(f"--m-list must be comma-separated integers, got {args.m_list!r}") from None
    table = disc_convergence(args.p, ms, args.directions)
    _announce(_run_header(args, m_list=args.m_list))
    rows = [(r.m, r.sup_abs_diff, r.sup_rel_diff, r.direction_spread) for r in table.rows]
    print(f"# non-increasing within 10%: {table.non_increasing}", file=sys.stderr)
    _emit(_csv(["m", "sup_abs_diff", "sup_rel_diff", "direction_spread"], rows), _out_path(args, "approx_converge.csv"))
    return 0


def cmd_matrix_norm(args) -> int:
    parts = args.grid.split(",")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except (ValueError, IndexError):
        raise UsageError(f"--grid must be 'lo,hi,n', got {args.grid!r}") from None
    if len(parts) != 3 or n < 1:
        raise UsageError(f"--grid must be 'lo,hi,n', got {args.grid!r}")
    rep = matrix_norm_convexity_scan(args.p, lo, hi, n, args.h)
    det = determinant_check(DiagonalPoint(2.0, 2.0))
    _announce(_run_header(args, grid=args.grid, h=args.h))
    print(f"# min eigenvalue {rep.min_eig:.6e} at {rep.worst_point}", file=sys.stderr)
    print(
        f"# p=-2 at (2,2): {det.value:.15g}; |det|^(1/2)={det.det_pow_plus:.15g}, "
        f"|det|^(-1/2)={det.det_pow_minus:.15g}",
        file=sys.stderr,
    )
    rows = [(float(a), float(b), float(rep.min_eig_grid[i, j])) for i, a in enumerate(rep.x1) for j, b in enumerate(rep.x2)]
    _emit(_csv(["x1", "x2", "min_eig"], rows), _out_path(args, "matrix_norm_scan.csv"))
    return 0


def _fmt(v: float) -> str:
    return f"{v:.6f}"


def _path(points: np.ndarray, box: tuple[float, float, float, float], panel: tuple[float, float, float]) -> str:
    """Closed SVG path of ``points`` mapped from ``box`` into a square panel (x0, y0, size)."""
    xmin, ymin, xmax, ymax = box
    x0, y0, size = panel
    s = size / max(xmax - xmin, ymax - ymin)
    cx, cy = 0.5 * (xmin + xmax), 0.5 * (ymin + ymax)
    pts = [(x0 + size / 2 + s * (x - cx), y0 + size / 2 - s * (y - cy)) for x, y in points]
    head = f"M {_fmt(pts[0][0])} {_fmt(pts[0][1])}"
    return head + "".join(f" L {_fmt(x)} {_fmt(y)}" for x, y in pts[1:]) + " Z"


def _bbox(points: np.ndarray) -> tuple[float, float, float, float]:
    lo, hi = points.min(axis=0), points.max(axis=0)
    return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])


def _svg(K, boundary: np.ndarray, info: dict) -> str:
    panel = 300.0
    pad = 20.0
    k_path = _path(K.vertices, _bbox(K.vertices), (pad, pad, panel))
    b_path = _path(boundary, _bbox(boundary), (2 * pad + panel, pad, panel))
    meta = json.dumps(info, sort_keys=True).replace("--", "- -")
    width = 3 * pad + 2 * panel
    height = 2 * pad + panel + 60
    ly = 2 * pad + panel
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.0f} {height:.0f}">\n'
        f"<!-- run: {meta} -->\n"
        f'<path id="polygon" d="{k_path}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>\n'
        f'<path id="radial-mean-body" d="{b_path}" fill="none" stroke="#d62728" stroke-width="1.5"/>\n'
        f'<g id="legend" font-family="sans-serif" font-size="12">\n'
        f'<rect x="{pad:.0f}" y="{ly:.0f}" width="12" height="12" fill="#1f77b4"/>\n'
        f'<text x="{pad + 18:.0f}" y="{ly + 11:.0f}">polygon K</text>\n'
        f'<rect x="{2 * pad + panel:.0f}" y="{ly:.0f}" width="12" height="12" fill="#d62728"/>\n'
        f'<text x="{2 * pad + panel + 18:.0f}" y="{ly + 11:.0f}">unit ball of the radial mean norm, p = {info["p"]}</text>\n'
        f"</g>\n</svg>\n"
    )


def cmd_render(args) -> int:
    p = _check_p_arg(args)
    n = _check_samples(args.samples)
    K = load_polygon(args.polygon)
    ev = NormEvaluator(K, p, args.extended_range, args.normalization)
    bs = boundary_sample_full(ev, n)
    info = _run_header(args)
    out = Path(args.out_dir or ".")
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "render.svg").write_text(_svg(K, bs.points, info))
        norms = 1.0 / np.hypot(bs.points[:, 0], bs.points[:, 1])
        rows = [(float(a), float(x), float(y), float(v)) for a, (x, y), v in zip(bs.angles, bs.points, norms)]
        (out / "render.csv").write_text(_csv(["angle", "bx", "by", "norm_value"], rows))
    except OSError as exc:
        raise UsageError(f"cannot write outputs to {out}: {exc}") from None
    _announce(info)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="radmean", description="Radial mean bodies of convex polygons.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, polygon=True, p=True):
        if polygon:
            sp.add_argument("polygon", help='polygon JSON file {"vertices": [[x, y], ...]}')
        if p:
            sp.add_argument("--p", type=float, required=True)
        sp.add_argument("--extended-range", action="store_true", help="allow p > 0")
        sp.add_argument(
            "--normalization",
            choices=("xray", "radial"),
            default="xray",
            help="xray: ((p+1) vol int X^(1+p))^(-1/p); radial: ((1/vol) int rho^p)^(-1/p)",
        )
        sp.add_argument("--out-dir", default=None)
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        return sp

    sp = common(sub.add_parser("decompose", help="alternating decomposition for a direction"), p=False)
    sp.add_argument("--x", required=True, help="direction 'a,b'")
    sp.set_defaults(func=cmd_decompose)

    sp = common(sub.add_parser("eval", help="norm of one vector"))
    sp.add_argument("--x", required=True, help="vector 'a,b'")
    sp.set_defaults(func=cmd_eval)

    sp = common(sub.add_parser("boundary", help="sampled unit sphere"))
    sp.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    sp.add_argument("--format", choices=("csv", "svg"), default="csv")
    sp.set_defaults(func=cmd_boundary)

    sp = common(sub.add_parser("certify", help="numerical convexity certificate"))
    sp.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    sp.add_argument("--delta", type=float, default=CertifyConfig.delta)
    sp.add_argument("--format", choices=("json",), default="json")
    sp.set_defaults(func=cmd_certify)

    sp = common(sub.add_parser("oracle-compare", help="closed form against the oracles"))
    sp.add_argument("--directions", type=int, default=16)
    sp.add_argument("--mc-samples", type=int, default=DEFAULT_MC)
    sp.add_argument("--format", choices=("csv",), default="csv")
    sp.set_defaults(func=cmd_oracle_compare)

    sp = common(sub.add_parser("approx-converge", help="inscribed m-gons of the unit disc"), polygon=False)
    sp.add_argument("--m-list", default="8,16,32,64")
    sp.add_argument("--directions", type=int, default=16)
    sp.add_argument("--format", choices=("csv",), default="csv")
    sp.set_defaults(func=cmd_approx_converge)

    sp = common(sub.add_parser("experiment-matrix-norm", help="Hessian scan of the matrix p-norm"), polygon=False)
    sp.add_argument("--grid", default="0.1,3,50", help="'lo,hi,n'")
    sp.add_argument("--h", type=float, default=1e-4)
    sp.add_argument("--format", choices=("csv",), default="csv")
    sp.set_defaults(func=cmd_matrix_norm)

    sp = common(sub.add_parser("render", help="SVG figure and CSV of the unit sphere"))
    sp.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    sp.add_argument("--format", choices=("svg",), default="svg")
    sp.set_defaults(func=cmd_render)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors with code 2
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except (RadmeanError, UsageError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
