"""Quadrature back ends.

Two integrators live here:

* :func:`half_line_integral` -- smooth integrals over ``[0, inf)`` built on
  QUADPACK's adaptive Gauss-Kronrod rule, with the upper limit doubled until
  the last slab is negligible.
* :func:`sinc2_overlap` -- overlap integrals of the form
  ``tau * int_0^W sinc^2((w - c) tau / 2) g(w) dw`` with a rapidly oscillating
  kernel.  The region around the kernel centre is cut at the sinc zeros and
  integrated panel by panel with Gauss-Legendre rules (adaptive, vectorised);
  the far region, if it matters at all, is treated with QUADPACK's Fourier
  weights.
"""

from __future__ import annotations

import math
import warnings
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import IntegrabilityError, NumericalError

ArrayFunc = Callable[[np.ndarray], np.ndarray]

TWO_PI = 2.0 * math.pi


def _quad(f, a, b, rtol, atol=0.0, points=None, weight=None, wvar=None, limit=2000):
    """Run ``scipy.integrate.quad`` and turn its failure flags into exceptions."""
    kwargs = dict(epsabs=atol, epsrel=rtol, limit=limit, full_output=1)
    if weight is not None:
        kwargs.update(weight=weight, wvar=wvar)
    elif points is not None and len(points):
        kwargs["points"] = points
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(f, a, b, **kwargs)
    value, abserr, info = out[0], out[1], out[2]
    ier = 0 if len(out) < 4 else 1
    if ier and abserr > max(100.0 * rtol * abs(value), 100.0 * atol, 1e-300):
        raise IntegrabilityError(
            f"quadrature on [{a:g}, {b:g}] did not converge "
            f"(estimate {value:.6g} +/- {abserr:.3g}): {out[3] if len(out) > 3 else ''}"
        )
    return value, abserr


def half_line_integral(
    f: Callable[[float], float],
    scale: float,
    rtol: float = 1e-10,
    tail_rtol: float = 1e-12,
    points: Sequence[float] = (),
    max_doublings: int = 64,
) -> float:
    """Integrate ``f`` over ``[0, inf)``.

    The integral is first taken over ``[0, 8 * scale]`` and the upper limit is
    then doubled, one slab at a time, until the newest slab contributes less
    than ``tail_rtol`` of the running total.

    Raises
    ------
    IntegrabilityError
        If a slab fails to converge or the slabs never become negligible.
    """
    if not scale > 0:
        raise ValueError("scale must be positive")
    upper = 8.0 * scale
    inner = sorted(p for p in points if 0.0 < p < upper)
    total, _ = _quad(f, 0.0, upper, rtol, points=inner)
    for _ in range(max_doublings):
        slab_points = sorted(p for p in points if upper < p < 2 * upper)
        piece, _ = _quad(f, upper, 2.0 * upper, rtol, points=slab_points)
        total += piece
        upper *= 2.0
        if abs(piece) <= tail_rtol * abs(total) or (piece == 0.0 and total == 0.0):
            return total
    raise IntegrabilityError(
        f"integral over [0, inf) did not settle after extending to {upper:.3g}"
    )


@lru_cache(maxsize=8)
def _legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _panel_rule(f: ArrayFunc, a: np.ndarray, b: np.ndarray, n: int):
    """Gauss-Legendre estimates of order n and 2n on every panel [a_i, b_i].

    Returns ``(coarse, fine, noise)`` where ``noise`` estimates the rounding
    floor of each panel sum.
    """
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    xs, ws = _legendre(n)
    xf, wf = _legendre(2 * n)
    nodes = np.concatenate([xs, xf])
    vals = f(mid[:, None] + half[:, None] * nodes[None, :])
    coarse = half * (vals[:, :n] @ ws)
    fine_vals = vals[:, n:]
    fine = half * (fine_vals @ wf)
    noise = 64.0 * np.finfo(float).eps * np.abs(half) * (np.abs(fine_vals) @ wf)
    return coarse, fine, noise


def adaptive_panels(
    f: ArrayFunc,
    edges: np.ndarray,
    rtol: float,
    atol: float = 0.0,
    order: int = 8,
    max_iter: int = 60,
    max_panels: int = 4_000_000,
) -> tuple[float, float]:
    """Globally adaptive composite Gauss-Legendre quadrature.

    ``edges`` is a sorted array of panel boundaries.  Each panel is integrated
    with orders ``order`` and ``2 * order``; panels carrying the largest share
    of the error budget are bisected until the summed error estimate is below
    ``max(rtol * |total|, atol)``.  Returns ``(value, error_estimate)``.
    """
    a = np.asarray(edges[:-1], dtype=float)
    b = np.asarray(edges[1:], dtype=float)
    keep = b > a
    a, b = a[keep], b[keep]
    done_vals: list[float] = []
    done_err = 0.0
    for _ in range(max_iter):
        coarse, fine, noise = _panel_rule(f, a, b, order)
        err = np.abs(fine - coarse)
        err = np.where(err <= noise, noise, err)
        total = math.fsum(done_vals) + math.fsum(fine)
        tol = max(rtol * abs(total), atol)
        total_err = done_err + float(err.sum())
        if total_err <= tol or np.all(err <= noise):
            return total, total_err
        # bisect the largest errors until what is left unsplit fits in half the budget
        order_idx = np.argsort(err)
        cum = np.cumsum(err[order_idx])
        budget = 0.5 * max(tol - done_err, 0.0)
        n_keep = int(np.searchsorted(cum, budget, side="right"))
        settled = order_idx[:n_keep]
        split = order_idx[n_keep:]
        done_vals.extend(fine[settled].tolist())
        done_err += float(err[settled].sum())
        if split.size * 2 + len(done_vals) > max_panels:
            break
        mid = 0.5 * (a[split] + b[split])
        a = np.concatenate([a[split], mid])
        b = np.concatenate([mid, b[split]])
        srt = np.argsort(a)
        a, b = a[srt], b[srt]
    total = math.fsum(done_vals) + math.fsum(fine)
    rel = total_err / abs(total) if total else math.inf
    raise NumericalError(
        f"adaptive quadrature stopped at relative error {rel:.3g} (target {rtol:.3g})",
        achieved=rel,
    )


def sinc2(u: np.ndarray) -> np.ndarray:
    """``(sin u / u)**2`` with the removable singularity filled in."""
    u = np.asarray(u, dtype=float)
    out = np.ones_like(u)
    nz = u != 0.0
    s = np.sin(u[nz]) / u[nz]
    out[nz] = s * s
    return out


def sinc2_overlap(
    terms: Sequence[tuple[float, ArrayFunc]],
    tau: float,
    upper: float,
    mass: float,
    breakpoints: Sequence[float] = (),
    rtol: float = 1e-8,
    atol: float = 0.0,
    max_lobes: int = 100_000,
    order: int = 8,
) -> float:
    """Evaluate ``sum_i tau * int_0^upper sinc^2((w - c_i) tau / 2) g_i(w) dw``.

    Parameters
    ----------
    terms
        Pairs ``(c_i, g_i)`` of kernel centre and vectorised weight function.
        Passing two terms with opposite-sign weights integrates a difference
        of overlaps on a common set of panels.
    tau
        Kernel time scale; sinc zeros are spaced ``2 pi / tau`` apart.
    upper
        Upper end of the support of the weights.
    mass
        Upper bound on ``sum_i int |g_i|``; used to bound the far region.
    breakpoints
        Extra panel edges where the weights change character.
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    centres = [c for c, _ in terms]
    if mass == 0.0 or upper <= 0.0:
        return 0.0

    def integrand(w: np.ndarray) -> np.ndarray:
        acc = np.zeros_like(w)
        for c, g in terms:
            acc += sinc2(0.5 * tau * (w - c)) * g(w)
        return tau * acc

    spacing = TWO_PI / tau
    reach = max_lobes * spacing
    lo = max(0.0, min(centres) - reach)
    hi = min(upper, max(centres) + reach)
    if hi <= lo:
        inner = 0.0
    else:
        c0 = centres[0]
        m_lo = math.ceil((lo - c0) / spacing)
        m_hi = math.floor((hi - c0) / spacing)
        zeros = c0 + spacing * np.arange(m_lo, m_hi + 1, dtype=float)
        extra = [p for p in (*breakpoints, *centres) if lo < p < hi]
        edges = np.unique(np.concatenate([[lo, hi], zeros, extra]))
        edges = edges[(edges >= lo) & (edges <= hi)]
        inner, _ = adaptive_panels(integrand, edges, rtol=rtol, atol=atol, order=order)

    far = 0.0
    regions = [(r0, r1) for r0, r1 in ((0.0, lo), (hi, upper)) if r1 > r0]
    if regions:
        # sinc^2(x) <= 1/x^2, so the far region is bounded by 4 mass / (tau reach^2)
        bound = 4.0 * mass / (tau * reach * reach)
        if bound > 1e-12 * abs(inner):
            eps = 1e-3 * max(rtol * abs(inner), atol)
            far = sum(_far_overlap(terms, tau, r0, r1, rtol, eps) for r0, r1 in regions)
    return inner + far


def _far_overlap(terms, tau, a, b, rtol, atol):
    """Far-from-centre overlap using sin^2 = (1 - cos) / 2 and Fourier weights."""

    def smooth(w):
        return sum(float(g(np.array([w]))[0]) / (w - c) ** 2 for c, g in terms)

    def cos_amp(w):
        return sum(
            float(g(np.array([w]))[0]) * math.cos(c * tau) / (w - c) ** 2 for c, g in terms
        )

    def sin_amp(w):
        return sum(
            float(g(np.array([w]))[0]) * math.sin(c * tau) / (w - c) ** 2 for c, g in terms
        )

    # the integrals below are multiplied by 2 / tau afterwards
    eps = 0.5 * tau * atol
    base, _ = _quad(smooth, a, b, rtol, eps)
    osc_c, _ = _quad(cos_amp, a, b, rtol, eps, weight="cos", wvar=tau)
    osc_s, _ = _quad(sin_amp, a, b, rtol, eps, weight="sin", wvar=tau)
    return 2.0 / tau * (base - osc_c - osc_s)
