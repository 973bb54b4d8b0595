"""Planar primitives: rotations, convex polygons, radial function and X-rays.

Vectors are plain ``numpy`` arrays of shape ``(2,)``. Polygons are immutable
and always stored counter-clockwise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Literal, Sequence

import numpy as np

from .errors import (
    ConvexityLost,
    DegenerateInput,
    PerturbationFailed,
    PointOutside,
    ZeroDirection,
)

EPS_REL = 1e-9
"""Relative geometric tolerance; absolute tolerances are ``EPS_REL * diameter``."""

PARALLEL_TOL = 1e-9
"""Tolerance on ``|cross(u, v)| / (|u| |v|)`` for calling two directions parallel."""

_L = np.array([[0.0, -1.0], [1.0, 0.0]])
_R = np.array([[0.0, 1.0], [-1.0, 0.0]])


def vec2(x: float, y: float | None = None) -> np.ndarray:
    """Build a finite 2-vector from two numbers or from one length-2 sequence."""
    v = np.asarray((x, y) if y is not None else x, dtype=float).reshape(2)
    if not np.all(np.isfinite(v)):
        raise ValueError(f"non-finite vector {v!r}")
    return v


def _floating(v) -> np.ndarray:
    """``v`` as an array, keeping an existing float width (e.g. longdouble)."""
    a = np.asarray(v)
    return a if np.issubdtype(a.dtype, np.floating) else a.astype(float)


def rotate(v, orientation: Literal["left", "right"]) -> np.ndarray:
    """Quarter turn: ``left`` is counter-clockwise, ``right`` clockwise."""
    v = _floating(v)
    if orientation == "left":
        return v @ _L.T
    if orientation == "right":
        return v @ _R.T
    raise ValueError(f"unknown orientation {orientation!r}")


def L(v) -> np.ndarray:
    return rotate(v, "left")


def R(v) -> np.ndarray:
    return rotate(v, "right")


def cross(u, v):
    """z-component of ``u x v``; broadcasts over leading axes."""
    u = _floating(u)
    v = _floating(v)
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def is_parallel(u, v, tol: float = PARALLEL_TOL) -> bool:
    nu = float(np.hypot(*u))
    nv = float(np.hypot(*v))
    return abs(float(cross(u, v))) <= tol * nu * nv


def _shoelace(vertices: np.ndarray) -> float:
    nxt = np.roll(vertices, -1, axis=0)
    return 0.5 * float(np.sum(cross(vertices, nxt)))


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """Counter-clockwise convex polygon; collinear vertices are allowed.

    Use :func:`polygon_normalize` to build one from arbitrary points; the
    constructor only validates.
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float, copy=True).reshape(-1, 2)
        if len(v) < 3:
            raise DegenerateInput("a polygon needs at least 3 vertices")
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite vertex coordinates")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        tol = EPS_REL * self.diameter
        if self.area <= tol * self.diameter:
            raise DegenerateInput("polygon has (numerically) zero area")
        edges = self.edges
        turns = cross(edges, np.roll(edges, -1, axis=0))
        lens = np.hypot(edges[:, 0], edges[:, 1])
        if np.any(lens <= tol):
            raise DegenerateInput("repeated consecutive vertices")
        if np.any(turns < -tol * np.roll(lens, -1)):
            raise ConvexityLost("vertex chain is not convex and counter-clockwise")

    def __len__(self) -> int:
        return len(self.vertices)

    def __eq__(self, other) -> bool:
        return isinstance(other, ConvexPolygon) and np.array_equal(self.vertices, other.vertices)

    __hash__ = None

    @cached_property
    def edges(self) -> np.ndarray:
        """Side vectors ``q_{i+1} - q_i``."""
        return np.roll(self.vertices, -1, axis=0) - self.vertices

    @cached_property
    def area(self) -> float:
        return _shoelace(self.vertices)

    @cached_property
    def diameter(self) -> float:
        d = self.vertices[:, None, :] - self.vertices[None, :, :]
        return float(np.max(np.hypot(d[..., 0], d[..., 1])))

    @cached_property
    def perimeter(self) -> float:
        return float(np.sum(np.hypot(self.edges[:, 0], self.edges[:, 1])))

    @property
    def tol(self) -> float:
        return EPS_REL * self.diameter

    def translate(self, t) -> ConvexPolygon:
        return ConvexPolygon(self.vertices + np.asarray(t, dtype=float))

    def scale(self, lam: float) -> ConvexPolygon:
        return ConvexPolygon(self.vertices * float(lam))

    def contains(self, pts, tol: float | None = None) -> np.ndarray:
        """Boolean mask of points inside (or within ``tol`` of) the polygon."""
        tol = self.tol if tol is None else tol
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        lens = np.hypot(self.edges[:, 0], self.edges[:, 1])
        c = cross(self.edges[None, :, :], pts[:, None, :] - self.vertices[None, :, :])
        return np.all(c >= -tol * lens[None, :], axis=1)

    def boundary_distance(self, pts) -> np.ndarray:
        """Distance from interior points to the boundary (min over side lines)."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        lens = np.hypot(self.edges[:, 0], self.edges[:, 1])
        c = cross(self.edges[None, :, :], pts[:, None, :] - self.vertices[None, :, :])
        return np.min(c / lens[None, :], axis=1)

    def to_json(self) -> dict:
        return {"vertices": [[float(x), float(y)] for x, y in self.vertices]}


def _dedupe(points: np.ndarray, tol: float) -> np.ndarray:
    order = np.lexsort((points[:, 1], points[:, 0]))
    kept: list[np.ndarray] = []
    for p in points[order]:
        if not any(np.hypot(*(p - q)) <= tol for q in kept):
            kept.append(p)
    return np.array(kept)


def _strict_hull(pts: np.ndarray, tol: float) -> list[int]:
    """Andrew's monotone chain on lexicographically sorted points, CCW, no collinear."""

    def build(indices):
        chain: list[int] = []
        for i in indices:
            while len(chain) >= 2:
                a, b = pts[chain[-2]], pts[chain[-1]]
                c = cross(b - a, pts[i] - b)
                if c <= tol * max(np.hypot(*(b - a)), np.hypot(*(pts[i] - b))):
                    chain.pop()
                else:
                    break
            chain.append(i)
        return chain

    idx = list(range(len(pts)))
    lower = build(idx)
    upper = build(idx[::-1])
    return lower[:-1] + upper[:-1]


def polygon_normalize(points: Iterable[Sequence[float]], keep_collinear: bool = False) -> ConvexPolygon:
    """Convex hull of ``points`` as a CCW chain starting at the lexicographic minimum.

    Duplicates closer than ``EPS_REL * diameter`` are merged. With
    ``keep_collinear`` the input points lying on hull sides are kept as
    (non-extreme) vertices.
    """
    pts = np.asarray([vec2(p) for p in points], dtype=float)
    if len(pts) < 3:
        raise DegenerateInput("need at least 3 points")
    spread = pts[:, None, :] - pts[None, :, :]
    diam = float(np.max(np.hypot(spread[..., 0], spread[..., 1])))
    if diam == 0.0:
        raise DegenerateInput("all points coincide")
    tol = EPS_REL * diam
    pts = _dedupe(pts, tol)
    if len(pts) < 3:
        raise DegenerateInput("fewer than 3 distinct points")
    hull = _strict_hull(pts, tol)
    if len(hull) < 3 or abs(_shoelace(pts[hull])) <= tol * diam:
        raise DegenerateInput("points are collinear: hull has zero area")

    if not keep_collinear:
        return ConvexPolygon(pts[hull])

    chain: list[np.ndarray] = []
    hull_set = set(hull)
    extra = [i for i in range(len(pts)) if i not in hull_set]
    for k, i in enumerate(hull):
        a, b = pts[i], pts[hull[(k + 1) % len(hull)]]
        e = b - a
        elen = float(np.hypot(*e))
        chain.append(a)
        on_side = []
        for j in extra:
            d = pts[j] - a
            s = float(np.dot(d, e)) / elen**2
            if abs(float(cross(e, d))) / elen <= tol and 0.0 < s < 1.0:
                on_side.append((s, j))
        chain.extend(pts[j] for _, j in sorted(on_side))
    return ConvexPolygon(np.array(chain))


def polygon_from_vertices(vertices, keep_collinear: bool = True) -> ConvexPolygon:
    return polygon_normalize(vertices, keep_collinear=keep_collinear)


def area(K: ConvexPolygon) -> float:
    return K.area


def _ray_bounds(K: ConvexPolygon, base: np.ndarray, v: np.ndarray):
    """Parameter interval ``[lo, hi]`` of ``base + s v`` inside ``K`` (vectorised over base).

    Cyrus-Beck clipping against every side half-plane.
    """
    base = np.atleast_2d(base)
    e = K.edges
    num = cross(e[None, :, :], base[:, None, :] - K.vertices[None, :, :])  # >= 0 inside
    den = cross(e, v)  # d/ds of the half-plane value
    lo = np.full(len(base), -np.inf)
    hi = np.full(len(base), np.inf)
    empty = np.zeros(len(base), dtype=bool)
    for k in range(len(e)):
        if den[k] > 0:
            lo = np.maximum(lo, -num[:, k] / den[k])
        elif den[k] < 0:
            hi = np.minimum(hi, -num[:, k] / den[k])
        else:
            empty |= num[:, k] < 0
    return lo, hi, empty


def radial_function(K: ConvexPolygon, x, v) -> float:
    """Largest ``lam >= 0`` with ``x + lam v`` in ``K``."""
    x = vec2(x)
    v = vec2(v)
    if not np.any(v):
        raise ZeroDirection("direction must be non-zero")
    if not K.contains(x)[0]:
        raise PointOutside(f"{x} lies outside the polygon")
    _, hi, _ = _ray_bounds(K, x, v)
    return max(0.0, float(hi[0]))


def radial_function_many(K: ConvexPolygon, pts: np.ndarray, v) -> np.ndarray:
    """Vectorised radial function for interior points (no containment check)."""
    _, hi, _ = _ray_bounds(K, np.asarray(pts, dtype=float), vec2(v))
    return np.maximum(hi, 0.0)


def xray_length(K: ConvexPolygon, v, t):
    """Length of ``K`` intersected with the line ``t R v + <v>``; ``v`` a unit vector.

    ``t`` may be a scalar or an array.
    """
    v = vec2(v)
    if abs(np.hypot(*v) - 1.0) > 1e-9:
        raise ValueError("xray_length expects a unit direction")
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    base = t_arr[:, None] * R(v)[None, :]
    lo, hi, empty = _ray_bounds(K, base, v)
    out = np.where(empty, 0.0, np.maximum(hi - lo, 0.0))
    return float(out[0]) if np.ndim(t) == 0 else out


def support_interval(K: ConvexPolygon, v) -> tuple[float, float]:
    """Range of ``t`` for which ``t R v + <v>`` meets ``K``."""
    levels = K.vertices @ R(vec2(v))
    return float(levels.min()), float(levels.max())


@dataclass(frozen=True)
class GeneralPositionReport:
    has_opposite_parallel_sides: bool
    opposite_parallel_side_pairs: list[tuple[int, int]]
    parallel_vertex_difference_pairs: list[tuple[tuple[int, int], tuple[int, int]]]

    @property
    def is_general_position(self) -> bool:
        return not self.has_opposite_parallel_sides and not self.parallel_vertex_difference_pairs


def vertex_difference_pairs(K: ConvexPolygon) -> list[tuple[int, int]]:
    n = len(K)
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def opposite_parallel_sides(K: ConvexPolygon) -> list[tuple[int, int]]:
    """Index pairs of parallel sides that lie on distinct lines."""
    e = K.edges
    lens = np.hypot(e[:, 0], e[:, 1])
    out = []
    n = len(K)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(float(cross(e[i], e[j]))) <= PARALLEL_TOL * lens[i] * lens[j]:
                offset = abs(float(cross(e[i], K.vertices[j] - K.vertices[i]))) / lens[i]
                if offset > K.tol:
                    out.append((i, j))
    return out


def general_position_report(K: ConvexPolygon) -> GeneralPositionReport:
    pairs = vertex_difference_pairs(K)
    d = np.array([K.vertices[j] - K.vertices[i] for i, j in pairs])
    lens = np.hypot(d[:, 0], d[:, 1])
    c = np.abs(cross(d[:, None, :], d[None, :, :]))
    bad = np.argwhere(np.triu(c <= PARALLEL_TOL * lens[:, None] * lens[None, :], k=1))
    par = [(pairs[a], pairs[b]) for a, b in bad]
    ops = opposite_parallel_sides(K)
    return GeneralPositionReport(bool(ops), ops, par)


def hausdorff_distance(A: ConvexPolygon, B: ConvexPolygon) -> float:
    """Hausdorff distance between two convex polygons.

    For convex sets the maximum is attained at a vertex of one of them, so
    vertex-to-boundary distances suffice.
    """

    def one_sided(P: ConvexPolygon, Q: ConvexPolygon) -> float:
        worst = 0.0
        inside = Q.contains(P.vertices, tol=0.0)
        for v, ins in zip(P.vertices, inside):
            if ins:
                continue
            a = Q.vertices
            e = Q.edges
            s = np.clip(np.einsum("ij,ij->i", v - a, e) / np.einsum("ij,ij->i", e, e), 0.0, 1.0)
            proj = a + s[:, None] * e
            worst = max(worst, float(np.min(np.hypot(*(v - proj).T))))
        return worst

    return max(one_sided(A, B), one_sided(B, A))


def perturb(K: ConvexPolygon, delta: float, seed: int, max_retries: int = 64) -> ConvexPolygon:
    """Seeded vertex jitter of size at most ``delta * diameter`` until general position.

    ``delta == 0`` returns ``K`` unchanged.
    """
    if delta < 0:
        raise ValueError("delta must be non-negative")
    if delta == 0:
        return K
    rng = np.random.default_rng(seed)
    radius = delta * K.diameter
    lost = 0
    for _ in range(max_retries):
        r = radius * np.sqrt(rng.uniform(0.0, 1.0, len(K)))
        phi = rng.uniform(0.0, 2.0 * np.pi, len(K))
        moved = K.vertices + np.column_stack((r * np.cos(phi), r * np.sin(phi)))
        try:
            Q = polygon_normalize(moved, keep_collinear=False)
        except DegenerateInput:
            lost += 1
            continue
        if len(Q) < len(K):
            lost += 1
            continue
        if general_position_report(Q).is_general_position:
            return Q
    if lost == max_retries:
        raise ConvexityLost(f"jitter of size {delta} never kept all {len(K)} vertices extreme")
    raise PerturbationFailed(f"no general-position polygon after {max_retries} attempts")


def load_polygon(path: str | Path) -> ConvexPolygon:
    """Read ``{"vertices": [[x, y], ...]}`` and normalise (collinear vertices kept)."""
    with open(path) as fh:
        data = json.load(fh)
    return polygon_from_json(data)


def polygon_from_json(data) -> ConvexPolygon:
    if not isinstance(data, dict) or "vertices" not in data:
        raise DegenerateInput('polygon JSON must be an object with a "vertices" list')
    return polygon_normalize(data["vertices"], keep_collinear=True)


def regular_polygon(m: int, radius: float = 1.0, phase: float = 0.0, center=(0.0, 0.0)) -> ConvexPolygon:
    k = np.arange(m)
    ang = phase + 2.0 * np.pi * k / m
    pts = np.column_stack((np.cos(ang), np.sin(ang))) * radius + np.asarray(center, dtype=float)
    return ConvexPolygon(pts)


def random_polygon(seed: int, n_min: int = 5, n_max: int = 12, general: bool = True) -> ConvexPolygon:
    """Seeded hull of uniform random points with ``n_min..n_max`` vertices.

    Points are uniform in angle and in radius over the annulus ``0.55 <= r <= 1``
    around ``(0.5, 0.5)`` (scaled by 1/2), so most of them end up extreme.
    Draws that miss the vertex range, or are not in general position when
    ``general`` is set, are rejected.
    """
    rng = np.random.default_rng(seed)
    while True:
        k = int(rng.integers(n_min, n_max + 1))
        ang = rng.uniform(0.0, 2.0 * np.pi, k)
        rad = rng.uniform(0.55, 1.0, k)
        pts = 0.5 + 0.5 * np.column_stack((rad * np.cos(ang), rad * np.sin(ang)))
        try:
            K = polygon_normalize(pts)
        except DegenerateInput:
            continue
        if not n_min <= len(K) <= n_max:
            continue
        if not general or general_position_report(K).is_general_position:
            return K
