"""Independent evaluation paths for the radial-mean norm.

All values follow the X-ray normalisation ``((p+1) vol K int X^{1+p})^{-1/p}``
used by the closed form. Integrating the radial-function definition
directly gives the norm ``((1/vol K) int_K rho^p)^{-1/p}``, which differs
from it by the constant ``((p+1) vol K)^{-2/p}`` (see
:func:`xray_normalisation_factor`); the Monte-Carlo oracle reports both.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .errors import BadSampleCount, InvalidP, QuadratureNoConvergence
from .geometry import ConvexPolygon, R, radial_function_many, support_interval, vec2, xray_length
from .quadrature import integrate

PARALLEL_CHORD_TOL = 1e-12


def check_p(p: float, extended: bool = True) -> float:
    p = float(p)
    if not extended and not -1.0 < p < 0.0:
        raise InvalidP(f"p must lie in (-1,0), got {p}")
    if not np.isfinite(p) or p <= -1.0 or p == 0.0:
        raise InvalidP(f"p must satisfy p > -1 and p != 0, got {p}")
    return p


Normalization = Literal["xray", "radial"]


def xray_normalisation_factor(vol: float, p: float) -> float:
    """Ratio between the X-ray-normalised norm and the radial-mean definition."""
    return ((p + 1.0) * vol) ** (-2.0 / p)


def normalization_scale(vol: float, p: float, normalization: Normalization) -> float:
    """Factor turning an X-ray-normalised value into the requested normalisation."""
    if normalization == "xray":
        return 1.0
    if normalization == "radial":
        return 1.0 / xray_normalisation_factor(vol, p)
    raise ValueError(f"normalization must be 'xray' or 'radial', got {normalization!r}")


def _piece_integral(width: float, xa: float, xb: float, p: float) -> float:
    """Integral of ``X^{1+p}`` over a piece where ``X`` runs linearly from ``xa`` to ``xb``."""
    q = 2.0 + p
    lo, hi = min(xa, xb), max(xa, xb)
    if hi <= 0.0:
        return 0.0
    if hi - lo <= PARALLEL_CHORD_TOL * hi:
        return width * hi ** (1.0 + p)
    if lo <= 0.0:
        return width * hi ** (1.0 + p) / q
    # (hi^q - lo^q) / (q (hi - lo)) without cancellation
    r = np.log1p((hi - lo) / lo)
    return width * lo ** (q - 1.0) * np.expm1(q * r) / (q * np.expm1(r))


def xray_profile(K: ConvexPolygon, v) -> tuple[np.ndarray, np.ndarray]:
    """Vertex levels and chord lengths there (the profile is linear in between).

    Chords at the levels are extrapolated from two interior evaluations per
    piece, so no line is ever evaluated exactly through a vertex.
    """
    v = vec2(v)
    levels = np.unique(K.vertices @ R(v))
    keep = np.concatenate(([True], np.diff(levels) > 1e-14 * K.diameter))
    levels = levels[keep]
    left = np.empty(len(levels) - 1)
    right = np.empty(len(levels) - 1)
    widths = np.diff(levels)
    q1 = xray_length(K, v, levels[:-1] + 0.25 * widths)
    q3 = xray_length(K, v, levels[:-1] + 0.75 * widths)
    left[:] = np.maximum(1.5 * q1 - 0.5 * q3, 0.0)
    right[:] = np.maximum(1.5 * q3 - 0.5 * q1, 0.0)
    return levels, np.column_stack((left, right))


def norm_xray_exact(K: ConvexPolygon, p: float, x, normalization: Normalization = "xray") -> float:
    """Exact X-ray integral of the norm, piece by piece between vertex levels.

    Non-unit ``x`` is handled by homogeneity.
    """
    p = check_p(p)
    factor = normalization_scale(K.area, p, normalization)
    x = vec2(x)
    scale = float(np.hypot(*x))
    if scale == 0.0:
        raise ValueError("x must be non-zero")
    v = x / scale
    levels, ends = xray_profile(K, v)
    total = 0.0
    for width, (xa, xb) in zip(np.diff(levels), ends):
        total += _piece_integral(float(width), float(xa), float(xb), p)
    return factor * scale * ((p + 1.0) * K.area * total) ** (-1.0 / p)


@dataclass(frozen=True)
class MCEstimate:
    estimate: float  # X-ray normalisation, comparable with norm_xray_exact
    stderr: float
    radial_mean_norm: float  # ((1/vol) int_K rho^p)^{-1/p}
    radial_mean_stderr: float
    mean_rho_p: float
    n_samples: int
    shell_width: float
    shell_fraction: float  # share of draws rejected for lying in the boundary shell
    bias_bound: float  # bound on |estimate - exact| from excluding the shell


def _uniform_in_polygon(K: ConvexPolygon, n: int, rng: np.random.Generator, shell: float):
    lo = K.vertices.min(axis=0)
    hi = K.vertices.max(axis=0)
    out = np.empty((0, 2))
    drawn = in_shell = 0
    while len(out) < n:
        batch = max(1024, int(1.3 * (n - len(out)) * np.prod(hi - lo) / K.area))
        pts = rng.uniform(lo, hi, size=(batch, 2))
        d = K.boundary_distance(pts)
        inside = d >= 0.0
        drawn += int(inside.sum())
        ok = d >= shell
        in_shell += int((inside & ~ok).sum())
        out = np.concatenate((out, pts[ok]))
    return out[:n], in_shell / max(drawn, 1)


def norm_mc_radial(
    K: ConvexPolygon,
    p: float,
    x,
    n_samples: int,
    seed: int,
    chunk: int = 1 << 17,
) -> MCEstimate:
    """Monte-Carlo of the radial-function definition with a delta-method error.

    Points closer than ``EPS_REL * diameter`` to the boundary are redrawn: the
    integrand blows up there when ``p < 0``. The sampling is chunked with one
    spawned generator per chunk, so results do not depend on how chunks are
    scheduled.
    """
    p = check_p(p)
    if n_samples < 1:
        raise BadSampleCount("n_samples must be >= 1")
    v = vec2(x)
    scale = float(np.hypot(*v))
    v = v / scale
    shell = K.tol
    n_chunks = -(-n_samples // chunk)
    seeds = np.random.SeedSequence(seed).spawn(n_chunks)
    s1 = s2 = 0.0
    shell_frac = 0.0
    for k, ss in enumerate(seeds):
        size = min(chunk, n_samples - k * chunk)
        pts, frac = _uniform_in_polygon(K, size, np.random.default_rng(ss), shell)
        vals = radial_function_many(K, pts, v) ** p
        s1 += float(vals.sum())
        s2 += float((vals * vals).sum())
        shell_frac += frac * size
    mean = s1 / n_samples
    var = max(s2 / n_samples - mean * mean, 0.0)
    se_mean = np.sqrt(var / max(n_samples - 1, 1))
    raw = mean ** (-1.0 / p)
    raw_se = abs(-1.0 / p) * mean ** (-1.0 / p - 1.0) * se_mean
    factor = xray_normalisation_factor(K.area, p)
    # shell area <= perimeter * shell; inside it rho >= distance to the boundary
    # when p < 0 and rho <= diameter when p > 0
    per, vol = K.perimeter, K.area
    shell_int = per * shell ** (1.0 + p) / (1.0 + p) if p < 0 else per * shell * K.diameter**p
    mean_bias = (per * shell / vol) * mean + shell_int / vol
    bias = scale * factor * raw * mean_bias / (abs(p) * mean)
    return MCEstimate(
        estimate=scale * factor * raw,
        stderr=scale * factor * raw_se,
        radial_mean_norm=scale * raw,
        radial_mean_stderr=scale * raw_se,
        mean_rho_p=mean,
        n_samples=n_samples,
        shell_width=shell,
        shell_fraction=shell_frac / n_samples,
        bias_bound=bias,
    )


@dataclass(frozen=True)
class ChordProfile:
    t_min: float
    t_max: float
    chord: Callable[[np.ndarray], np.ndarray]
    exactness: Literal["piecewise_linear", "generic"] = "generic"
    max_chord: float | None = None
    breakpoints: tuple[float, ...] = ()  # interior kinks of the profile


def polygon_profile(K: ConvexPolygon, v) -> ChordProfile:
    v = vec2(v)
    t0, t1 = support_interval(K, v)
    levels = np.unique(K.vertices @ R(v))
    inner = tuple(float(t) for t in levels if t0 < t < t1)
    return ChordProfile(t0, t1, lambda t: xray_length(K, v, np.asarray(t)), "piecewise_linear", K.diameter, inner)


def disc_profile(radius: float = 1.0, center=(0.0, 0.0), v=(1.0, 0.0)) -> ChordProfile:
    """Chords of a disc; ``center`` shifts the support as seen from direction ``v``."""
    v = vec2(v)
    v = v / np.hypot(*v)
    c = float(np.asarray(center, dtype=float) @ R(v))

    def chord(t):
        s = np.asarray(t, dtype=float) - c
        return 2.0 * np.sqrt(np.maximum(radius * radius - s * s, 0.0))

    return ChordProfile(c - radius, c + radius, chord, "generic", 2.0 * radius)


def norm_chord_quadrature(
    profile: ChordProfile,
    vol: float,
    p: float,
    rel_tol: float = 1e-12,
    normalization: Normalization = "xray",
) -> float:
    """``((p+1) vol int chord^{1+p})^{-1/p}`` by adaptive Gauss-Kronrod bisection.

    The support is split at the profile's breakpoints first.
    """
    p = check_p(p)
    if vol <= 0:
        raise ValueError("vol must be positive")
    a, b = profile.t_min, profile.t_max
    if not b > a:
        raise QuadratureNoConvergence("chord profile has empty support")
    cmax = profile.max_chord
    if cmax is None:
        cmax = float(np.max(profile.chord(np.linspace(a, b, 257))))
    f = lambda t: np.maximum(profile.chord(t), 0.0) ** (1.0 + p)
    cuts = np.unique(np.clip(np.concatenate(([a], profile.breakpoints, [b])), a, b))
    integral = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi > lo:
            integral += integrate(f, lo, hi, rel_tol * (hi - lo) * cmax ** (1.0 + p))[0]
    return normalization_scale(vol, p, normalization) * ((p + 1.0) * vol * integral) ** (-1.0 / p)
