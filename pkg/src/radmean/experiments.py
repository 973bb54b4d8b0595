"""The invariant matrix p-norm on 2x2 matrices, restricted to diagonal ones.

For singular values ``(x1, x2)`` the norm is the p-mean over the unit
circle of ``|A v| = (x1^2 v1^2 + x2^2 v2^2)^{1/2}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import InvalidP
from .quadrature import integrate

TRAPEZOID_NODES = 512


@dataclass(frozen=True)
class DiagonalPoint:
    x1: float
    x2: float

    def __post_init__(self):
        if not (np.isfinite(self.x1) and np.isfinite(self.x2)):
            raise ValueError(f"non-finite diagonal point ({self.x1}, {self.x2})")


def _check_p(p: float) -> float:
    p = float(p)
    if p == 0.0 or not np.isfinite(p):
        raise InvalidP(f"p must be finite and non-zero, got {p}")
    return p


def _mean_power(a: np.ndarray, b: np.ndarray, q: float, nodes: int, dtype=np.float64) -> np.ndarray:
    """Periodic trapezoid mean of ``(a cos^2 + b sin^2)^q`` over the circle (vectorised)."""
    th = np.pi * (np.arange(nodes, dtype=dtype) + dtype(0.5)) / nodes  # the integrand has period pi
    c2 = np.cos(th) ** 2
    s2 = 1.0 - c2
    return np.mean((a[..., None] * c2 + b[..., None] * s2) ** q, axis=-1)


def matrix_pnorm(
    pt: DiagonalPoint,
    p: float,
    method: Literal["adaptive", "trapezoid"] = "adaptive",
    nodes: int = TRAPEZOID_NODES,
) -> float:
    """``(mean over the circle of |A v|^p)^{1/p}`` for ``A = diag(x1, x2)``.

    ``adaptive`` integrates to 1e-12 relative with Gauss-Kronrod bisection;
    ``trapezoid`` is the periodic rule, spectrally accurate when both
    entries are non-zero.
    """
    p = _check_p(p)
    a, b = float(pt.x1) ** 2, float(pt.x2) ** 2
    if a == 0.0 and b == 0.0:
        return 0.0
    if min(a, b) == 0.0 and p <= -1.0:
        return 0.0  # the mean of |A v|^p diverges
    q = 0.5 * p
    if method == "trapezoid":
        mean = float(_mean_power(np.array(a), np.array(b), q, nodes))
    elif method == "adaptive":
        # symmetric about pi/2 and the period is pi: the quarter turn suffices
        scale = max(a, b) ** q if q > 0 else min(x for x in (a, b) if x > 0) ** q
        tol = 1e-12 * scale * 0.5 * np.pi
        if q < 0 and min(a, b) == 0.0:
            # |A v|^p ~ u^p at the zero of |A v|; with u = s^m, m = 1/(p+1), the
            # factors u^p and du/ds = m s^(m-1) cancel exactly
            c = max(a, b)
            m = 1.0 / (p + 1.0)
            f = lambda s: c**q * np.sinc(s**m / np.pi) ** (2.0 * q) * m
            val, _ = integrate(f, 0.0, (0.5 * np.pi) ** (1.0 / m), tol)
        else:
            f = lambda t: (a * np.cos(t) ** 2 + b * np.sin(t) ** 2) ** q
            val, _ = integrate(f, 0.0, 0.5 * np.pi, tol)
        mean = val / (0.5 * np.pi)
    else:
        raise ValueError(f"unknown method {method!r}")
    return mean ** (1.0 / p)


@dataclass(frozen=True)
class ScanReport:
    p: float
    min_eig: float
    worst_point: tuple[float, float]
    x1: np.ndarray
    x2: np.ndarray
    min_eig_grid: np.ndarray  # (n, n), rows follow x1


def matrix_norm_convexity_scan(
    p: float,
    lo: float = 0.1,
    hi: float = 3.0,
    n: int = 50,
    h: float = 1e-4,
    nodes: int = TRAPEZOID_NODES,
) -> ScanReport:
    """Central-difference Hessian of the norm on an ``n x n`` grid of ``[lo, hi]^2``.

    Steps scale with ``|x|``; values come from the periodic trapezoid rule so
    that the quadrature error is far below the difference quotients, and
    are kept in extended precision until the quotients are formed.
    """
    p = _check_p(p)
    if not 0 < lo < hi:
        raise ValueError("grid must lie in the open positive quadrant")
    ld = np.longdouble
    g = np.linspace(lo, hi, n)
    X1, X2 = (A.astype(ld) for A in np.meshgrid(g, g, indexing="ij"))
    habs = ld(h) * np.hypot(X1, X2)

    def f(d1, d2):
        y1 = X1 + d1 * habs
        y2 = X2 + d2 * habs
        return _mean_power(y1**2, y2**2, ld(p) / 2, nodes, ld) ** (ld(1) / ld(p))

    f0 = f(0, 0)
    fxx = (f(1, 0) - 2 * f0 + f(-1, 0)) / habs**2
    fyy = (f(0, 1) - 2 * f0 + f(0, -1)) / habs**2
    fxy = (f(1, 1) - f(1, -1) - f(-1, 1) + f(-1, -1)) / (4 * habs**2)
    H = np.stack((np.stack((fxx, fxy), -1), np.stack((fxy, fyy), -1)), -2).astype(float)
    eig = np.linalg.eigvalsh(H)[..., 0]
    i, j = np.unravel_index(int(np.argmin(eig)), eig.shape)
    return ScanReport(p, float(eig[i, j]), (float(g[i]), float(g[j])), g, g, eig)


@dataclass(frozen=True)
class DeterminantCheck:
    """The norm at ``p = -2`` against both candidate determinant powers."""

    value: float
    det_pow_plus: float  # |det A|^{1/2}
    det_pow_minus: float  # |det A|^{-1/2}

    @property
    def matches_plus(self) -> bool:
        return abs(self.value - self.det_pow_plus) <= 1e-10 * self.det_pow_plus

    @property
    def matches_minus(self) -> bool:
        return abs(self.value - self.det_pow_minus) <= 1e-10 * self.det_pow_minus


def determinant_check(pt: DiagonalPoint) -> DeterminantCheck:
    """For ``n = 2`` the mean of ``|A v|^{-2}`` is ``1/|det A|``, so ``p = -2`` gives ``|det A|^{1/2}``."""
    det = abs(pt.x1 * pt.x2)
    return DeterminantCheck(matrix_pnorm(pt, -2.0), det**0.5, det**-0.5)
