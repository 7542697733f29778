"""Rate curves over the measurement interval and Zeno/anti-Zeno classification.

``R/R0 < 1`` means measurements slow the decay (Zeno regime) and ``R/R0 > 1``
means they speed it up (anti-Zeno regime).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import optimize

from .errors import DomainError, NumericalError
from .rate import Approach, RatePoint, bare_rate, decay_rate, delta_R
from .renorm import AtomBathModel

__all__ = [
    "RateCurve",
    "RegimeReport",
    "ApproachComparison",
    "default_tau_grid",
    "sweep_rate_curve",
    "find_transition",
    "compare_approaches",
]

QAZE_TOL = 1e-9
CROSSING_TOL = 1e-6


@dataclass(frozen=True)
class RateCurve:
    """Rate samples for one model and one approach, ordered by ``tau``.

    ``delta_R`` holds ``|R - R_rwa|`` per point when it was requested, else
    NaN.  ``model`` is kept so that :func:`find_transition` can refine
    between grid points.
    """

    approach: Approach
    model_id: str
    points: tuple[RatePoint, ...]
    delta_R: np.ndarray = field(default=None, repr=False)
    model: Optional[AtomBathModel] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        taus = np.array([p.tau for p in self.points], dtype=float)
        if taus.size > 1 and np.any(np.diff(taus) <= 0):
            raise DomainError("tau values of a rate curve must be strictly increasing")
        if self.delta_R is None:
            object.__setattr__(self, "delta_R", np.full(taus.size, np.nan))

    def __len__(self) -> int:
        return len(self.points)

    @property
    def tau(self) -> np.ndarray:
        return np.array([p.tau for p in self.points], dtype=float)

    @property
    def R(self) -> np.ndarray:
        return np.array([p.R for p in self.points], dtype=float)

    @property
    def R0(self) -> np.ndarray:
        return np.array([p.R0 for p in self.points], dtype=float)

    @property
    def ratio(self) -> np.ndarray:
        return np.array([p.ratio for p in self.points], dtype=float)

    @classmethod
    def from_arrays(cls, tau, ratio, approach="I", model_id="synthetic"):
        """Build a curve from bare ratios (``R0 = 1``), e.g. for tests or stored data."""
        approach = Approach.parse(approach)
        pts = tuple(RatePoint(float(t), float(r), 1.0, approach) for t, r in zip(tau, ratio))
        return cls(approach, model_id, pts)


@dataclass(frozen=True)
class RegimeReport:
    """Where a rate curve crosses ``R/R0 = 1`` and where it peaks.

    ``tau_star`` is the smallest crossing (None if the curve never crosses).
    ``n_crossings`` and ``n_peaks`` count sign changes of ``ratio - 1`` and
    interior local maxima on the sampled grid.
    """

    tau_star: Optional[float]
    tau_peak: float
    peak_ratio: float
    qaze_present: bool
    n_crossings: int = 0
    n_peaks: int = 0


def default_tau_grid(omega_c: float, n: int = 200, lo: float = 1e-2, hi: float = 1e5) -> np.ndarray:
    """Log-spaced ``tau`` with ``tau * omega_c`` running from ``lo`` to ``hi``.

    The upper end reaches far enough for peaked spectra (cut-off hundreds of
    times the level spacing) to come back within 2% of the unmeasured rate.
    """
    if not omega_c > 0:
        raise DomainError("omega_c must be positive")
    if n < 1:
        raise DomainError("grid needs at least one point")
    return np.logspace(math.log10(lo), math.log10(hi), n) / omega_c


def sweep_rate_curve(
    model: AtomBathModel,
    approach,
    tau_grid: Sequence[float],
    with_delta: bool = False,
    rtol: float = 1e-8,
) -> RateCurve:
    """Evaluate the decay rate at every grid point.

    A failing point aborts the sweep; the exception message names its ``tau``.
    """
    approach = Approach.parse(approach)
    grid = np.asarray(tau_grid, dtype=float).ravel()
    if grid.size and (np.any(grid <= 0) or np.any(np.diff(grid) <= 0)):
        raise DomainError("tau grid must be positive and strictly increasing")
    points, deltas = [], []
    for tau in grid:
        try:
            points.append(decay_rate(model, float(tau), approach, rtol=rtol))
            if with_delta:
                deltas.append(delta_R(model, float(tau), approach))
        except NumericalError as exc:
            raise type(exc)(f"at tau = {tau:.6g}: {exc}", achieved=exc.achieved) from exc
        except ArithmeticError as exc:
            raise type(exc)(f"at tau = {tau:.6g}: {exc}") from exc
    dR = np.array(deltas, dtype=float) if with_delta else None
    return RateCurve(approach, model.name or type(model.spectrum).__name__, tuple(points), dR, model)


def _ratio_at(curve: RateCurve, log_tau: float) -> float:
    return decay_rate(curve.model, math.exp(log_tau), curve.approach).ratio


def _refine_crossing(curve: RateCurve, i: int) -> float:
    t, r = curve.tau, curve.ratio
    lo, hi = math.log(t[i]), math.log(t[i + 1])
    if curve.model is None:
        # interpolate linearly in log tau
        w = (r[i] - 1.0) / (r[i] - r[i + 1])
        return math.exp(lo + w * (hi - lo))
    f_lo = r[i] - 1.0
    mid = 0.5 * (lo + hi)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        f_mid = _ratio_at(curve, mid) - 1.0
        if abs(f_mid) < CROSSING_TOL or hi - lo < 1e-14:
            break
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return math.exp(mid)


def _refine_peak(curve: RateCurve, j: int) -> tuple[float, float]:
    t, r = curve.tau, curve.ratio
    if curve.model is None or j == 0 or j == len(t) - 1:
        return float(t[j]), float(r[j])
    bracket = (math.log(t[j - 1]), math.log(t[j]), math.log(t[j + 1]))
    res = optimize.minimize_scalar(
        lambda x: -_ratio_at(curve, x), bracket=bracket, method="golden", tol=1e-6
    )
    if -res.fun < r[j]:
        return float(t[j]), float(r[j])
    return float(math.exp(res.x)), float(-res.fun)


def find_transition(curve: RateCurve, tol: float = QAZE_TOL, refine: bool = True) -> RegimeReport:
    """Locate the Zeno/anti-Zeno crossing and the rate maximum of a curve.

    The crossing is bracketed on the grid and refined by bisection in
    ``log tau`` until ``|R/R0 - 1| < 1e-6``; the peak is refined by
    golden-section search around the discrete argmax.  Without an attached
    model (or with ``refine=False``) grid values and interpolation are used.
    """
    if len(curve) < 3:
        raise DomainError("need at least three points to classify a curve")
    r = curve.ratio
    if not np.all(np.isfinite(r)):
        raise DomainError("rate curve has undefined ratios (vanishing reference rate)")
    if not refine:
        curve = RateCurve(curve.approach, curve.model_id, curve.points, curve.delta_R)
    sign = np.sign(r - 1.0)
    changes = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    tau_star = _refine_crossing(curve, int(changes[0])) if changes.size else None
    interior = (r[1:-1] > r[:-2]) & (r[1:-1] >= r[2:])
    j = int(np.argmax(r))
    tau_peak, peak_ratio = _refine_peak(curve, j)
    return RegimeReport(
        tau_star=tau_star,
        tau_peak=tau_peak,
        peak_ratio=peak_ratio,
        qaze_present=bool(peak_ratio > 1.0 + tol),
        n_crossings=int(changes.size),
        n_peaks=int(interior.sum()),
    )


@dataclass(frozen=True)
class ApproachComparison:
    """Per-``tau`` rates for all three approaches and their RWA differences."""

    tau: np.ndarray
    R_I: np.ndarray
    R_II: np.ndarray
    R_rwa: np.ndarray
    delta_R_I: np.ndarray
    delta_R_II: np.ndarray
    R0_I: float
    R0_II: float
    R0_rwa: float

    def rows(self):
        return list(
            zip(self.tau, self.R_I, self.R_II, self.R_rwa, self.delta_R_I, self.delta_R_II)
        )

    def max_relative_delta(self) -> tuple[float, float]:
        """``max_tau dR_I / R0_I`` and ``max_tau dR_II / R0_II``."""
        a = float(np.max(self.delta_R_I)) / self.R0_I if self.R0_I > 0 else 0.0
        b = float(np.max(self.delta_R_II)) / self.R0_II if self.R0_II > 0 else 0.0
        return a, b


def compare_approaches(model: AtomBathModel, tau_grid: Sequence[float]) -> ApproachComparison:
    grid = np.asarray(tau_grid, dtype=float).ravel()
    cols = {
        a: sweep_rate_curve(model, a, grid).R for a in (Approach.I, Approach.II, Approach.RWA)
    }
    d1 = np.array([delta_R(model, t, Approach.I) for t in grid])
    d2 = np.array([delta_R(model, t, Approach.II) for t in grid])
    return ApproachComparison(
        tau=grid,
        R_I=cols[Approach.I],
        R_II=cols[Approach.II],
        R_rwa=cols[Approach.RWA],
        delta_R_I=d1,
        delta_R_II=d2,
        R0_I=bare_rate(model, Approach.I),
        R0_II=bare_rate(model, Approach.II),
        R0_rwa=bare_rate(model, Approach.RWA),
    )
