"""Numerical convexity certificates for the unit ball of the radial-mean norm.

A certificate bundles four independent checks: the sampled level set is in
convex position, the finite-difference Hessian is PSD inside every sector,
the norm is C^1 across sector boundaries that are not parallel to a side
(and has convex kinks across those that are), and the closed form agrees
with the X-ray oracle.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import TooFewPoints
from .evaluator import TWO_PI, NormEvaluator, boundary_sample_full
from .geometry import ConvexPolygon, cross, general_position_report, is_parallel, perturb
from .oracle import check_p, norm_xray_exact


def turning_test(samples) -> tuple[float, int]:
    """Smallest normalised turn ``sin`` over consecutive (cyclic) triples, and where."""
    q = np.asarray(samples, dtype=float)
    if len(q) < 3:
        raise TooFewPoints(f"need at least 3 points, got {len(q)}")
    d1 = np.roll(q, -1, axis=0) - q
    d2 = np.roll(d1, -1, axis=0)
    den = np.hypot(d1[:, 0], d1[:, 1]) * np.hypot(d2[:, 0], d2[:, 1])
    t = cross(d1, d2) / den
    j = int(np.argmin(t))
    return float(t[j]), j


Increment = Callable[[np.ndarray, np.ndarray], np.ndarray]


def plain_increment(f: Callable[[np.ndarray], np.ndarray]) -> Increment:
    """Increment function ``f(X + dX) - f(X)`` for an arbitrary vectorised ``f``."""
    return lambda X, dX: f(X + dX) - f(X)


def _central_hessian(inc: Increment, x: np.ndarray, h: np.ndarray) -> np.ndarray:
    ld = np.longdouble

    def d(a, b):
        return inc(x, np.column_stack((a * h, b * h)))

    H = np.empty((len(x), 2, 2), dtype=ld)
    H[:, 0, 0] = (d(1, 0) + d(-1, 0)) / h**2
    H[:, 1, 1] = (d(0, 1) + d(0, -1)) / h**2
    H[:, 0, 1] = H[:, 1, 0] = (d(1, 1) - d(1, -1) - d(-1, 1) + d(-1, -1)) / (4 * h**2)
    return H


def fd_hessian(inc: Increment, x: np.ndarray, h, richardson: bool = True) -> np.ndarray:
    """Central-difference 2x2 Hessians at the rows of ``x`` (``h`` scalar or per row).

    The stencil is written in increments ``f(x + d) - f(x)`` so that callers
    can supply a cancellation-free increment, and is evaluated in extended
    precision. ``richardson`` combines steps ``h`` and ``h/2`` into the
    fourth-order central formula.
    """
    ld = np.longdouble
    x = np.atleast_2d(x).astype(ld)
    h = np.broadcast_to(np.asarray(h, dtype=ld), (len(x),))
    H = _central_hessian(inc, x, h)
    if richardson:
        H = (4 * _central_hessian(inc, x, h / 2) - H) / 3
    return H.astype(float)


@dataclass(frozen=True)
class HessianReport:
    min_eig: float
    worst_angle: float
    worst_sector: int
    n_points: int
    skipped_sectors: int  # too narrow to fit a point 10 h away from both ends


def hessian_scan(
    ev: NormEvaluator,
    per_cone_grid: int = 4,
    h: float = 1e-4,
    func: Callable[[np.ndarray], np.ndarray] | None = None,
) -> HessianReport:
    """Minimum Hessian eigenvalue over unit-radius grid points inside every sector.

    Points stay ``10 h`` (in angle) away from the sector ends; ``func``
    replaces the norm on the same grid (used to self-test the harness).
    Points have unit radius, so the step ``h |x|`` is ``h``; near a zero of
    some ``<n_i, .>`` it shrinks to a hundredth of the distance to it.
    """
    part = ev.partition
    worst = (np.inf, np.nan, -1)
    count = skipped = 0
    for k in range(part.k):
        lo, hi = part.sector(k)
        margin = 10.0 * h
        if hi - lo <= 2 * margin:
            skipped += 1
            continue
        th = lo + margin + (hi - lo - 2 * margin) * (np.arange(per_cone_grid) + 0.5) / per_cone_grid
        X = np.column_stack((np.cos(th), np.sin(th)))
        if func is not None:
            eig = np.linalg.eigvalsh(fd_hessian(plain_increment(func), X, h))[:, 0]
        else:
            # keep the stencil well inside the region where every <n_i, .> > 0
            N = ev.decomposition(k).n.astype(float)
            N = N * (-1.0 if ev.decomposition(k).flipped else 1.0)
            gap = np.min((X @ N.T) / np.hypot(N[:, 0], N[:, 1]), axis=1)
            h_loc = np.minimum(h, 1e-2 * gap)
            inc = lambda Y, dY, k=k: ev.norm_increment(k, Y, dY)
            eig = np.linalg.eigvalsh(fd_hessian(inc, X, h_loc))[:, 0]
        j = int(np.argmin(eig))
        count += len(th)
        if eig[j] < worst[0]:
            worst = (float(eig[j]), float(th[j]), k)
    return HessianReport(worst[0], worst[1], worst[2], count, skipped)


@dataclass(frozen=True)
class BoundaryCheck:
    angle: float
    side_parallel: bool
    tangential_jump: float  # g'(theta+) - g'(theta-)
    gradient_mismatch: float  # |grad+ - grad-|
    ok: bool


@dataclass(frozen=True)
class C1Report:
    checks: list[BoundaryCheck]
    c1_max_jump: float  # worst gradient mismatch over non-side directions
    min_kink_jump: float  # smallest tangential jump over side-parallel directions
    kink_signs_ok: bool

    @property
    def ok(self) -> bool:
        return self.kink_signs_ok and all(c.ok for c in self.checks)


def _side_directions(K: ConvexPolygon) -> np.ndarray:
    return K.edges


def c1_boundary_check(ev: NormEvaluator, h: float = 1e-6, eps_c1: float = 1e-5) -> C1Report:
    """One-sided gradients at every sector boundary, taken from both adjacent sectors.

    With ``g(theta) = ||(cos theta, sin theta)||`` the gradient on the unit
    circle is ``g r + g' t``; ``g'`` is estimated with second-order one-sided
    differences that stay inside each sector.
    """
    part = ev.partition
    sides = _side_directions(ev.polygon)
    checks = []
    for k in range(part.k):
        th = float(part.boundaries[k])
        below = (k - 1) % part.k
        lo_b, hi_b = part.sector(below)
        lo_a, hi_a = part.sector(k)
        hb = min(h, 0.25 * (hi_b - lo_b))
        ha = min(h, 0.25 * (hi_a - lo_a))

        ld = np.longdouble
        u0 = np.array([[np.cos(ld(th)), np.sin(ld(th))]])

        def slope(sector, step):
            # second-order one-sided g'(th) from g(th + j step) - g(th), j = 1, 2
            j = np.array([1, 2], dtype=ld)
            mid = ld(th) + 0.5 * j * step
            chord = 2 * np.sin(0.5 * j * step)
            dU = np.column_stack((-np.sin(mid) * chord, np.cos(mid) * chord))
            g1, g2 = ev.norm_increment(sector, np.repeat(u0, 2, axis=0), dU)
            return (4 * g1 - g2) / (2 * step)

        d_plus = slope(k, ld(ha))
        d_minus = slope(below, -ld(hb))
        g_plus = ev.norm_in_sector(k, u0, extended=True)[0]
        g_minus = ev.norm_in_sector(below, u0, extended=True)[0]
        mismatch = float(np.hypot(float(g_plus - g_minus), float(d_plus - d_minus)))
        u = np.array([np.cos(th), np.sin(th)])
        side = any(is_parallel(u, s) for s in sides)
        jump = float(d_plus - d_minus)
        ok = jump >= -eps_c1 if side else mismatch <= eps_c1
        checks.append(BoundaryCheck(th, side, jump, mismatch, ok))
    non_side = [c.gradient_mismatch for c in checks if not c.side_parallel]
    kinks = [c.tangential_jump for c in checks if c.side_parallel]
    return C1Report(
        checks,
        max(non_side) if non_side else 0.0,
        min(kinks) if kinks else np.inf,
        all(j >= -eps_c1 for j in kinks),
    )


@dataclass(frozen=True)
class CertifyConfig:
    samples: int = 2048
    delta: float = 1e-6
    seed: int = 20240601
    hessian_grid: int = 4
    hessian_h: float = 1e-5
    c1_h: float = 1e-6
    oracle_directions: int = 64
    eps_turn: float = 1e-8
    eps_hess: float = 1e-7
    eps_c1: float = 1e-5
    eps_oracle: float = 1e-9
    extended_range: bool = False


@dataclass(frozen=True)
class ConvexityCertificate:
    polygon: list[list[float]]
    p: float
    perturbation_applied: float
    turning_min: float
    turning_worst_angle: float
    hessian_min_eig: float
    c1_max_jump: float
    min_kink_jump: float
    kink_signs_ok: bool
    oracle_max_reldiff: float
    n_boundary_samples: int
    n_sectors: int
    thresholds: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    verdict: str = "fail"

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def oracle_agreement(ev: NormEvaluator, directions: int) -> float:
    """Worst relative gap to the X-ray oracle over sector midpoints and uniform angles."""
    part = ev.partition
    angles = [part.midpoint(k) for k in range(part.k)]
    angles += list(TWO_PI * (np.arange(directions) + 0.25) / directions)
    U = np.column_stack((np.cos(angles), np.sin(angles)))
    closed = ev.norm_many(U)
    ref = np.array([norm_xray_exact(ev.polygon, ev.p, u) for u in U])
    return float(np.max(np.abs(closed - ref) / ref))


def certify(K: ConvexPolygon, p: float, config: CertifyConfig = CertifyConfig()) -> ConvexityCertificate:
    p = check_p(p, extended=config.extended_range)
    applied = 0.0
    if not general_position_report(K).is_general_position:
        K = perturb(K, config.delta, config.seed)
        applied = config.delta
    ev = NormEvaluator(K, p, extended_range=config.extended_range).prebuild()

    bs = boundary_sample_full(ev, config.samples)
    t_min, j = turning_test(bs.points)
    hess = hessian_scan(ev, config.hessian_grid, config.hessian_h)
    c1 = c1_boundary_check(ev, config.c1_h, config.eps_c1)
    orc = oracle_agreement(ev, config.oracle_directions)

    passed = (
        t_min >= -config.eps_turn
        and hess.min_eig >= -config.eps_hess
        and c1.c1_max_jump <= config.eps_c1
        and c1.kink_signs_ok
        and orc <= config.eps_oracle
    )
    thresholds = {
        "eps_turn": config.eps_turn,
        "eps_hess": config.eps_hess,
        "eps_c1": config.eps_c1,
        "eps_oracle": config.eps_oracle,
    }
    return ConvexityCertificate(
        polygon=K.vertices.tolist(),
        p=p,
        perturbation_applied=applied,
        turning_min=t_min,
        turning_worst_angle=float(bs.angles[(j + 1) % len(bs.angles)]),
        hessian_min_eig=hess.min_eig,
        c1_max_jump=c1.c1_max_jump,
        min_kink_jump=float(c1.min_kink_jump),
        kink_signs_ok=c1.kink_signs_ok,
        oracle_max_reldiff=orc,
        n_boundary_samples=len(bs.points),
        n_sectors=ev.partition.k,
        thresholds=thresholds,
        config=asdict(config),
        verdict="pass" if passed else "fail",
    )


@dataclass(frozen=True)
class ConvergenceRow:
    m: int
    sup_abs_diff: float
    sup_rel_diff: float
    direction_spread: float  # (max - min) / mean of the m-th body's norms


@dataclass(frozen=True)
class ConvergenceTable:
    p: float
    rows: list[ConvergenceRow]
    slack: float = 0.10

    @property
    def non_increasing(self) -> bool:
        d = [r.sup_abs_diff for r in self.rows]
        return all(b <= (1.0 + self.slack) * a for a, b in zip(d, d[1:]))

    @property
    def strictly_decreasing(self) -> bool:
        d = [r.sup_abs_diff for r in self.rows]
        return all(b < a for a, b in zip(d, d[1:]))


def approximation_convergence(
    polygons: Callable[[int], ConvexPolygon],
    target: Callable[[np.ndarray], float],
    p: float,
    m_list: Sequence[int],
    directions: int,
) -> ConvergenceTable:
    """Sup-distance between the norms of ``polygons(m)`` and ``target`` over fixed directions.

    The polygon norms come from the X-ray oracle, which also handles the
    opposite parallel sides of even regular polygons.
    """
    p = check_p(p, extended=False)
    if list(m_list) != sorted(m_list):
        raise ValueError("m_list must be increasing")
    th = np.pi * (np.arange(directions) + 0.5) / directions
    U = np.column_stack((np.cos(th), np.sin(th)))
    ref = np.array([target(u) for u in U])
    rows = []
    for m in m_list:
        Km = polygons(m)
        vals = np.array([norm_xray_exact(Km, p, u) for u in U])
        diff = np.abs(vals - ref)
        rows.append(
            ConvergenceRow(
                m,
                float(diff.max()),
                float(np.max(diff / ref)),
                float((vals.max() - vals.min()) / vals.mean()),
            )
        )
    return ConvergenceTable(p, rows)


def disc_convergence(p: float, m_list: Sequence[int], directions: int = 16, radius: float = 1.0) -> ConvergenceTable:
    """Inscribed regular ``m``-gons of a disc against the disc's quadrature norm."""
    from .geometry import regular_polygon
    from .oracle import disc_profile, norm_chord_quadrature

    disc_value = norm_chord_quadrature(disc_profile(radius), np.pi * radius**2, p)
    return approximation_convergence(
        lambda m: regular_polygon(m, radius),
        lambda u: disc_value * float(np.hypot(*u)),
        p,
        m_list,
        directions,
    )
