"""Closed-form evaluation of the radial-mean norm over the whole plane.

Values follow the X-ray normalisation by default; ``normalization="radial"``
rescales to the radial-function definition (see :mod:`radmean.oracle`).

The lines through all vertex differences cut the plane into angular
sectors. Inside one sector a single :class:`Decomposition` (built at the
sector's angular midpoint) gives the norm as ``f_Z^{-1/p}`` with

    f_Z(x) = (p+1)/(p+2) * vol K * sum_i alpha_i <n_i, x>^{-p}.
"""

from __future__ import annotations

import bisect
import threading
from dataclasses import dataclass, field

import numpy as np

from .decomposition import Decomposition, decompose
from .errors import (
    BadSampleCount,
    ContinuityViolation,
    NotGeneralPosition,
    OutsideOpenCone,
    ZeroVector,
)
from .geometry import PARALLEL_TOL, ConvexPolygon, general_position_report, vec2
from .oracle import Normalization, check_p, normalization_scale

TWO_PI = 2.0 * np.pi
BOUNDARY_TOL = 1e-13  # radians
CONTINUITY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ConePartition:
    directions: np.ndarray  # (L, 2) unit vectors, angles in [0, pi)
    boundaries: np.ndarray  # (2L,) sorted angles in [0, 2 pi)
    polygon: ConvexPolygon

    @property
    def k(self) -> int:
        return len(self.boundaries)

    def sector(self, k: int) -> tuple[float, float]:
        """``[lo, hi)`` of sector ``k``; the last one wraps past ``2 pi``."""
        lo = self.boundaries[k]
        hi = self.boundaries[k + 1] if k + 1 < self.k else self.boundaries[0] + TWO_PI
        return float(lo), float(hi)

    def midpoint(self, k: int) -> float:
        lo, hi = self.sector(k)
        return 0.5 * (lo + hi)

    def locate(self, angle: float) -> int:
        """Sector owning ``angle``; each sector owns its lower endpoint."""
        a = float(np.mod(angle, TWO_PI))
        k = bisect.bisect_right(self.boundaries.tolist(), a) - 1
        return k if k >= 0 else self.k - 1

    def locate_many(self, angles: np.ndarray) -> np.ndarray:
        a = np.mod(angles, TWO_PI)
        k = np.searchsorted(self.boundaries, a, side="right") - 1
        return np.where(k < 0, self.k - 1, k)


def cone_partition(K: ConvexPolygon) -> ConePartition:
    rep = general_position_report(K)
    if not rep.is_general_position:
        raise NotGeneralPosition(
            f"parallel vertex differences {rep.parallel_vertex_difference_pairs[:3]}"
            + (" and opposite parallel sides" if rep.has_opposite_parallel_sides else "")
        )
    V = K.vertices
    n = len(V)
    ang = []
    for i in range(n):
        for j in range(i + 1, n):
            d = V[j] - V[i]
            ang.append(float(np.mod(np.arctan2(d[1], d[0]), np.pi)))
    ang = np.sort(np.array(ang))
    if np.any(np.diff(ang) <= PARALLEL_TOL) or ang[-1] - ang[0] >= np.pi - PARALLEL_TOL:
        raise NotGeneralPosition("two vertex differences share a direction")
    dirs = np.column_stack((np.cos(ang), np.sin(ang)))
    bounds = np.concatenate((ang, ang + np.pi))
    return ConePartition(dirs, bounds, K)


def _fz_coefficient(D: Decomposition, p: float) -> float:
    return (p + 1.0) / (p + 2.0) * D.area


def _active(D: Decomposition) -> np.ndarray:
    """Terms with non-negligible weight; zero weights occur exactly (b_{i+1} = -c_i)
    and their normals may vanish on the sector edge, where ``0^{-p}`` is infinite for p > 0."""
    a = np.abs(D.alpha.astype(float))
    return a > 1e-15 * a.max()


def f_Z_many(D: Decomposition, p: float, X: np.ndarray, clip: bool = False, dtype=np.float64) -> np.ndarray:
    """Vectorised ``f_Z`` on rows of ``X`` (sign-adjusted when ``D.flipped``).

    ``clip`` evaluates the one-sided limit on the closed cone: inner products
    that vanish up to rounding are treated as ``0``. ``dtype=np.longdouble``
    evaluates the same expression in extended precision, which finite
    differences need because the alternating sum cancels.
    """
    X = np.atleast_2d(np.asarray(X, dtype=dtype))
    if D.flipped:
        X = -X
    act = _active(D)
    n = D.n[act]
    xi = X @ n.T.astype(dtype)
    if clip:
        scale = np.hypot(n[:, 0], n[:, 1])[None, :] * np.hypot(X[:, 0], X[:, 1])[:, None]
        xi = np.where(np.abs(xi) <= 1e-12 * scale, 0.0, xi)
        bad = xi < 0
    else:
        bad = xi <= 0
    if np.any(bad):
        raise OutsideOpenCone("point outside the open cone C_Z' of this decomposition")
    return dtype(_fz_coefficient(D, p)) * (np.abs(xi) ** dtype(-p) @ D.alpha[act].astype(dtype))


def f_Z_eval(D: Decomposition, p: float, x, extended_range: bool = True) -> float:
    p = check_p(p, extended=extended_range)
    return float(f_Z_many(D, p, vec2(x)[None, :])[0])


@dataclass(eq=False)
class NormEvaluator:
    """Per-polygon, per-``p`` context with a lazily filled decomposition cache."""

    polygon: ConvexPolygon
    p: float
    extended_range: bool = False
    normalization: Normalization = "xray"
    partition: ConePartition = field(init=False)
    _cache: dict[int, Decomposition] = field(init=False, default_factory=dict, repr=False)
    _lock: threading.Lock = field(init=False, default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        self.p = check_p(self.p, extended=self.extended_range)
        self._scale = normalization_scale(self.polygon.area, self.p, self.normalization)
        self.partition = cone_partition(self.polygon)

    def decomposition(self, k: int) -> Decomposition:
        D = self._cache.get(k)
        if D is None:
            with self._lock:
                D = self._cache.get(k)
                if D is None:
                    th = self.partition.midpoint(k)
                    D = decompose(self.polygon, (np.cos(th), np.sin(th)))
                    self._cache[k] = D
        return D

    def prebuild(self) -> NormEvaluator:
        for k in range(self.partition.k):
            self.decomposition(k)
        return self

    def norm_in_sector(self, k: int, X, clip: bool = True, extended: bool = False) -> np.ndarray:
        """``f_Z^{-1/p}`` of sector ``k``'s decomposition (also just outside it).

        The sum is formed in extended precision; ``extended`` keeps that
        precision in the result instead of rounding to float64.
        """
        ld = np.longdouble
        f = f_Z_many(self.decomposition(k), self.p, X, clip=clip, dtype=ld)
        out = ld(self._scale) * f ** (ld(-1.0) / ld(self.p))
        return out if extended else out.astype(np.float64)

    def norm_increment(self, k: int, X, dX) -> np.ndarray:
        """``N(X + dX) - N(X)`` for sector ``k``'s closed form, without cancellation.

        Each power term is differenced through ``expm1``/``log1p``, so only the
        alternating sum of increments cancels, not the sum of values.
        """
        ld = np.longdouble
        D = self.decomposition(k)
        X = np.atleast_2d(np.asarray(X, dtype=ld))
        dX = np.atleast_2d(np.asarray(dX, dtype=ld))
        if D.flipped:
            X, dX = -X, -dX
        act = _active(D)
        n = D.n[act].T.astype(ld)
        xi = X @ n
        eta = dX @ n
        # inner products vanishing up to rounding sit on the closed cone's edge
        scale = np.hypot(n[0], n[1])[None, :] * np.hypot(X[:, 0], X[:, 1])[:, None]
        xi = np.where(np.abs(xi) <= 1e-12 * scale, ld(0), xi)
        if np.any(xi < 0) or np.any(xi + eta <= 0):
            raise OutsideOpenCone("point outside the open cone C_Z' of this decomposition")
        q = ld(-self.p)
        alpha = D.alpha[act].astype(ld)
        terms = xi**q
        F = ld(_fz_coefficient(D, self.p)) * (terms @ alpha)
        edge = xi == 0
        rel = np.where(edge, ld(0), eta / np.where(edge, ld(1), xi))
        dterms = np.where(edge, (xi + eta) ** q, terms * np.expm1(q * np.log1p(rel)))
        dF = ld(_fz_coefficient(D, self.p)) * (dterms @ alpha)
        s = ld(-1.0) / ld(self.p)
        return ld(self._scale) * F**s * np.expm1(s * np.log1p(dF / F))

    def norm(self, x) -> float:
        x = vec2(x)
        if not np.any(x):
            raise ZeroVector("norm of the zero vector is undefined here")
        th = float(np.mod(np.arctan2(x[1], x[0]), TWO_PI))
        k = self.partition.locate(th)
        val = float(self.norm_in_sector(k, x)[0])
        nb = self._neighbour_on_boundary(th, k)
        if nb is not None:
            other = float(self.norm_in_sector(nb, x)[0])
            if abs(other - val) > CONTINUITY_TOL * abs(val):
                raise ContinuityViolation(f"sectors {k} and {nb} disagree at angle {th}: {val} vs {other}")
        return val

    def _neighbour_on_boundary(self, th: float, k: int) -> int | None:
        lo, _ = self.partition.sector(k)
        if abs(th - lo) <= BOUNDARY_TOL or abs(th - lo - TWO_PI) <= BOUNDARY_TOL:
            return (k - 1) % self.partition.k
        return None

    def norm_many(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if np.any(~np.any(X != 0, axis=1)):
            raise ZeroVector("zero row in input")
        ks = self.partition.locate_many(np.arctan2(X[:, 1], X[:, 0]))
        out = np.empty(len(X))
        for k in np.unique(ks):
            sel = ks == k
            out[sel] = self.norm_in_sector(int(k), X[sel])
        return out


def norm(ev: NormEvaluator, x) -> float:
    return ev.norm(x)


@dataclass(frozen=True)
class BoundarySample:
    angles: np.ndarray
    points: np.ndarray
    is_kink: np.ndarray  # sample sits exactly on a sector boundary


def boundary_sample_full(ev: NormEvaluator, N: int) -> BoundarySample:
    """Unit-level-set points at ``N`` uniform angles plus every sector boundary.

    Uniform angles are offset by half a step; any of them closer than 1e-9
    rad to a boundary angle is dropped in favour of the boundary sample.
    """
    if N < 3:
        raise BadSampleCount(f"need at least 3 samples, got {N}")
    uni = TWO_PI * (np.arange(N) + 0.5) / N
    kinks = ev.partition.boundaries
    near = np.min(np.abs(np.mod(uni[:, None] - kinks[None, :] + np.pi, TWO_PI) - np.pi), axis=1) < 1e-9
    uni = uni[~near]
    angles = np.concatenate((uni, kinks))
    is_kink = np.concatenate((np.zeros(len(uni), dtype=bool), np.ones(len(kinks), dtype=bool)))
    order = np.argsort(angles, kind="stable")
    angles, is_kink = angles[order], is_kink[order]
    U = np.column_stack((np.cos(angles), np.sin(angles)))
    ks = ev.partition.locate_many(angles)
    # boundary angles come straight from the partition, so locate_many assigns
    # them to the sector that owns them as its lower endpoint
    vals = np.empty(len(angles))
    for k in np.unique(ks):
        sel = ks == k
        vals[sel] = ev.norm_in_sector(int(k), U[sel])
    return BoundarySample(angles, U / vals[:, None], is_kink)


def boundary_sample(ev: NormEvaluator, N: int) -> np.ndarray:
    return boundary_sample_full(ev, N).points
