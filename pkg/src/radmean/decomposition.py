"""Alternating-vector generation of a convex polygon for a direction class.

For a direction ``x`` not parallel to any vertex difference, the polygon is
translated so its lowest vertex (in the ``R x`` order) is the origin, and
its vertices are re-chained as ``p_0 = 0, p_1, ..., p_m`` in increasing
``<R x, .>`` so that consecutive chain vertices sit on opposite boundary
arcs. Synthetic vertices are inserted on sides wherever two consecutive
levels belong to the same arc. From the steps ``z_i = p_i - p_{i-1}`` the
normals ``n_i`` and the weights ``alpha_i`` of the closed form follow.

Indexing: Python lists are 0-based but the docstrings use the 1-based
names, e.g. ``z[0]`` is ``z_1`` and ``alpha[i - 1]`` is ``alpha_i``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DirectionOnConeBoundary,
    NotGeneralPosition,
    ParallelLines,
    SignStructureViolated,
    ZeroDirection,
)
from .geometry import ConvexPolygon, L, R, cross, opposite_parallel_sides, vec2

LEVEL_TOL = 1e-12
"""Relative gap (times diameter) below which two vertex levels count as tied."""


@dataclass(frozen=True, eq=False)
class Decomposition:
    z: np.ndarray  # (m, 2)
    vertex_chain: np.ndarray  # (m + 1, 2), p_0 = 0
    synthetic: tuple[bool, ...]  # per chain vertex
    w: np.ndarray  # (m - 1, 2)
    n: np.ndarray  # (m - 1, 2)
    a: np.ndarray  # (m,), a_1 = a_m = 0
    a_tilde: np.ndarray  # (m - 2,), indices 2..m-1
    b: np.ndarray  # (m - 2,)
    c: np.ndarray  # (m - 2,)
    alpha: np.ndarray  # (m - 1,)
    cone_closed: np.ndarray  # (2, 2) boundary normals of C_Z
    cone_open: np.ndarray  # == n, strict normals of C_Z'
    translation: np.ndarray
    direction: np.ndarray  # generating direction actually used (unit)
    flipped: bool
    area: float

    @property
    def m(self) -> int:
        return len(self.z)

    def turn(self, i: int) -> float:
        """``(-1)^{i+1} <L z_{i+1}, z_i>`` for 1-based ``i``: twice a triangle area."""
        return (-1) ** (i + 1) * float(L(self.z[i]) @ self.z[i - 1])

    def in_closed_cone(self, y, tol: float = 0.0) -> bool:
        lz = L(self.z)
        return bool(np.all(lz @ np.asarray(y, dtype=float) >= -tol))

    def in_open_cone(self, y) -> bool:
        return bool(np.all(self.n @ np.asarray(y, dtype=float) > 0))

    def to_json(self) -> dict:
        def arr(a):
            return (np.asarray(a, dtype=float) + 0.0).tolist()  # no negative zeros

        return {
            "m": self.m,
            "direction": arr(self.direction),
            "flipped": self.flipped,
            "translation": arr(self.translation),
            "area": self.area,
            "z": arr(self.z),
            "vertex_chain": arr(self.vertex_chain),
            "synthetic": list(self.synthetic),
            "w": arr(self.w),
            "n": arr(self.n),
            "a": arr(self.a),
            "a_tilde": arr(self.a_tilde),
            "b": arr(self.b),
            "c": arr(self.c),
            "alpha": arr(self.alpha),
            "cone_closed": arr(self.cone_closed),
            "cone_open": arr(self.cone_open),
        }


def _arcs(K: ConvexPolygon, levels: np.ndarray):
    """Split the CCW vertex cycle into the arcs between the lowest and highest level.

    Counter-clockwise from the bottom runs along the side opposite to ``x``
    (the right arc when looking along ``R x``); clockwise runs along the
    ``x`` side (left arc). Both returned lists include bottom and top.
    """
    n = len(K)
    bot = int(np.argmin(levels))
    top = int(np.argmax(levels))
    right = [bot]
    i = bot
    while i != top:
        i = (i + 1) % n
        right.append(i)
    left = [bot]
    i = bot
    while i != top:
        i = (i - 1) % n
        left.append(i)
    return left, right


def _point_on_arc(V: np.ndarray, levels: np.ndarray, arc: list[int], level: float) -> np.ndarray:
    lv = levels[arc]
    k = int(np.searchsorted(lv, level))
    k = min(max(k, 1), len(arc) - 1)
    a, b = V[arc[k - 1]], V[arc[k]]
    s = (level - lv[k - 1]) / (lv[k] - lv[k - 1])
    return a + s * (b - a)


def _chain(K: ConvexPolygon, g: np.ndarray, insert_first: bool):
    """Alternating chain for direction ``g`` or ``None`` if its first turn is wrong.

    With ``insert_first`` a synthetic vertex is placed on the left arc below
    the first right-arc vertex instead of giving up.
    """
    V = K.vertices.astype(np.longdouble)
    levels = K.vertices @ R(g)
    left, right = _arcs(K, levels)
    interior = [(levels[i], "L", i) for i in left[1:-1]] + [(levels[i], "R", i) for i in right[1:-1]]
    interior.sort()
    if interior and interior[0][1] == "R" and not insert_first:
        return None

    arcs = {"L": left, "R": right}
    bot, top = left[0], left[-1]
    chain = [V[bot]]
    synth = [False]
    prev_level, prev_arc = levels[bot], "R"
    for level, arc, idx in interior:
        if arc == prev_arc:
            other = "L" if arc == "R" else "R"
            mid = 0.5 * (prev_level + level)
            chain.append(_point_on_arc(V, levels, arcs[other], mid))
            synth.append(True)
        chain.append(V[idx])
        synth.append(False)
        prev_level, prev_arc = level, arc
    chain.append(V[top])
    synth.append(False)
    return np.array(chain), tuple(synth)


def decompose(K: ConvexPolygon, x) -> Decomposition:
    """Alternating generation of ``K`` oriented with ``x``.

    If the chain built for ``x`` would start with a left turn, it is rebuilt
    for ``-x`` (``flipped``); the norm is even so this is harmless. When both
    orientations start badly, a synthetic vertex is inserted at the bottom.
    """
    x = vec2(x)
    nx = float(np.hypot(*x))
    if nx == 0.0:
        raise ZeroDirection("direction must be non-zero")
    x = x / nx
    if opposite_parallel_sides(K):
        raise NotGeneralPosition("polygon has a pair of opposite parallel sides")
    levels = np.sort(K.vertices @ R(x))
    if np.min(np.diff(levels)) <= LEVEL_TOL * K.diameter:
        raise DirectionOnConeBoundary("direction is parallel to a vertex difference")

    flipped = False
    built = _chain(K, x, insert_first=False)
    if built is None:
        built = _chain(K, -x, insert_first=False)
        flipped = built is not None
        if built is None:
            built = _chain(K, x, insert_first=True)
    g = -x if flipped else x
    chain, synth = built
    translation = -chain[0]
    return _derive(chain + translation, synth, translation, g, flipped, K.area)


def _solve2(u, v, r):
    """Coefficients of ``r`` in the basis ``{u, v}`` by Cramer's rule."""
    det = cross(u, v)
    return cross(r, v) / det, cross(u, r) / det


def _derive(chain, synth, translation, g, flipped, area) -> Decomposition:
    """Coefficients in extended precision: nearly parallel normals make the
    2x2 solves ill-conditioned when the polygon is close to degenerate."""
    ld = np.longdouble
    chain = np.asarray(chain, dtype=ld)
    z = np.diff(chain, axis=0)
    m = len(z)
    Lz = L(z)
    w = z[:-1] + z[1:]
    Lw = L(w)
    sign = np.array([(-1) ** (i + 1) for i in range(1, m)], dtype=ld)
    n = (sign / np.einsum("ij,ij->i", Lw, z[:-1]))[:, None] * Lw

    a = np.zeros(m, dtype=ld)
    a_tilde = np.zeros(max(m - 2, 0), dtype=ld)
    b = np.zeros(max(m - 2, 0), dtype=ld)
    c = np.zeros(max(m - 2, 0), dtype=ld)
    for i in range(2, m):  # 1-based i = 2..m-1
        a[i - 1], a_tilde[i - 2] = _solve2(n[i - 2], n[i - 1], Lz[i - 1])
        b[i - 2], c[i - 2] = _solve2(n[i - 2], n[i - 1], Lz[i])

    turn1 = Lz[1] @ z[0]
    alpha = np.zeros(m - 1, dtype=ld)
    if m == 2:
        alpha[0] = turn1
    else:
        alpha[0] = -a[1] + turn1
        for i in range(2, m - 1):
            alpha[i - 1] = b[i - 1] + c[i - 2]  # b_{i+1} + c_i
        alpha[m - 2] = c[m - 3]

    # C_Z is cut out by the two extreme steps (smallest / largest angle about R g)
    rg = R(g)
    ang = np.arctan2(cross(rg, z), z @ rg)
    cone_closed = np.array([Lz[int(np.argmin(ang))], Lz[int(np.argmax(ang))]])
    return Decomposition(
        z=z,
        vertex_chain=chain,
        synthetic=synth,
        w=w,
        n=n,
        a=a,
        a_tilde=a_tilde,
        b=b,
        c=c,
        alpha=alpha,
        cone_closed=cone_closed,
        cone_open=n,
        translation=translation,
        direction=g,
        flipped=flipped,
        area=area,
    )


@dataclass(frozen=True)
class CoefficientReport:
    max_residual: float
    residuals: list[tuple[int, float, float, float]]  # (i, a~+a, b+a, c - turn - a)
    scale: float  # largest |a_i| or |turn_i| involved

    @property
    def ok(self) -> bool:
        return self.max_residual <= 1e-9 * self.scale


def verify_coefficient_relations(D: Decomposition) -> CoefficientReport:
    """Residuals of ``a~_i = -a_i``, ``b_i = -a_i`` and ``c_i = turn_i + a_i``."""
    rows = []
    worst = 0.0
    for i in range(2, D.m):
        ai = D.a[i - 1]
        r1 = D.a_tilde[i - 2] + ai
        r2 = D.b[i - 2] + ai
        r3 = D.c[i - 2] - (D.turn(i) + ai)
        rows.append((i, float(r1), float(r2), float(r3)))
        worst = max(worst, abs(float(r1)), abs(float(r2)), abs(float(r3)))
    scale = max([2.0 * D.area] + [abs(float(v)) for v in D.a] + [abs(D.turn(i)) for i in range(1, D.m)])
    return CoefficientReport(worst, rows, scale)


@dataclass(frozen=True)
class SignReport:
    i0: int
    positive_count: int
    alpha_sum: float
    area2: float


def sign_report(D: Decomposition, tol: float | None = None, strict: bool = True) -> SignReport:
    """Locate the single positive weight; ``strict`` raises if the pattern breaks."""
    area2 = 2.0 * D.area
    tol = 1e-9 * area2 if tol is None else tol
    pos = [i + 1 for i, v in enumerate(D.alpha.astype(float)) if v > tol]
    s = float(np.sum(D.alpha))
    rep = SignReport(pos[0] if len(pos) == 1 else -1, len(pos), s, area2)
    if strict and (len(pos) != 1 or abs(s - area2) > 1e-9 * area2):
        raise SignStructureViolated(f"alpha={D.alpha.astype(float).tolist()} sum={s} 2*area={area2}")
    return rep


@dataclass(frozen=True)
class IntersectionCheckReport:
    r: np.ndarray
    parallelogram_areas: np.ndarray
    max_mismatch: float


def _line_intersection(p, d, q, e) -> np.ndarray:
    den = float(cross(d, e))
    if abs(den) <= 1e-14 * np.hypot(*d) * np.hypot(*e):
        raise ParallelLines("side lines do not intersect")
    s = float(cross(q - p, e)) / den
    return p + s * d


def intersection_point_check(D: Decomposition) -> IntersectionCheckReport:
    """Compare ``|cross(r_{i+1} - r_i, z_i)|`` with ``|alpha_i|``.

    ``r_i`` is where the lines carrying ``w_{i-1}`` and ``w_i`` meet, with
    ``w_0 = z_1`` and ``w_m = z_m``. Mismatches are relative to
    ``max(|alpha_i|, 2 area)``.
    """
    m = D.m
    if m < 3:
        return IntersectionCheckReport(np.zeros((0, 2)), np.zeros(0), 0.0)
    P = D.vertex_chain
    # (anchor, direction) of w_0 .. w_m
    lines = [(P[0], D.z[0])] + [(P[i - 1], D.w[i - 1]) for i in range(1, m)] + [(P[m - 1], D.z[m - 1])]
    r = np.array([_line_intersection(*lines[i - 1], *lines[i]) for i in range(1, m + 1)])
    areas = np.abs(cross(r[1:] - r[:-1], D.z[:-1]))
    scale = np.maximum(np.abs(D.alpha), 2.0 * D.area)
    mismatch = float(np.max(np.abs(areas - np.abs(D.alpha)) / scale))
    return IntersectionCheckReport(r.astype(float), areas.astype(float), mismatch)
