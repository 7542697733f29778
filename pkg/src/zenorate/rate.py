"""Decay rate of a periodically measured atom.

Between projective measurements spaced ``tau`` apart the survival probability
decays as ``exp(-R t)`` with

    R(tau) = 2 pi int_0^inf F(w, c, tau) G_eff(w) dw,
    F(w, c, tau) = tau / (2 pi) * sinc^2((w - c) tau / 2).

The kernel centre ``c`` and effective spectrum depend on how the
counter-rotating terms are handled:

=========  ===========  ===================  ====================
approach   centre       spectrum             reference rate R0
=========  ===========  ===================  ====================
RWA        Omega        G                    2 pi G(Omega)
I          Omega1       G                    2 pi G(Omega1)
II         Omega'       G' = f G             2 pi G'(Omega')
=========  ===========  ===================  ====================
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError
from .quadrature import TWO_PI, sinc2, sinc2_overlap
from .renorm import AtomBathModel
from .spectra import f_factor

__all__ = [
    "Approach",
    "MeasurementProtocol",
    "RatePoint",
    "kernel_F",
    "effective_spectrum",
    "bare_rate",
    "decay_rate",
    "delta_R",
    "rate_decomposition",
    "survival_probability",
]


class Approach(str, enum.Enum):
    RWA = "RWA"
    I = "I"  # noqa: E741
    II = "II"

    @classmethod
    def parse(cls, value) -> "Approach":
        """Accept an ``Approach`` or names such as ``"rwa"``, ``"I"``, ``"ApproachII"``, ``"2"``."""
        if isinstance(value, cls):
            return value
        key = str(value).strip().upper().replace("APPROACH", "").replace("_", "").replace("-", "")
        key = {"1": "I", "2": "II"}.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise DomainError(f"unknown approach {value!r}; use RWA, I or II") from None


@dataclass(frozen=True)
class MeasurementProtocol:
    """``n`` projective measurements at interval ``tau``; ``n = 0`` means none."""

    tau: float
    n: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.tau) and self.tau > 0):
            raise DomainError("tau must be positive and finite")
        if int(self.n) != self.n or self.n < 0:
            raise DomainError("n must be a non-negative integer")

    @property
    def total_time(self) -> float:
        return self.n * self.tau


@dataclass(frozen=True)
class RatePoint:
    tau: float
    R: float
    R0: float
    approach: Approach

    @property
    def ratio(self) -> float:
        """``R / R0``; NaN when the reference rate vanishes."""
        return self.R / self.R0 if self.R0 > 0 else math.nan


def kernel_F(omega, center: float, tau: float):
    """Measurement kernel ``(tau / 2 pi) sinc^2((w - center) tau / 2)``."""
    if not tau > 0:
        raise DomainError("tau must be positive")
    out = tau / TWO_PI * sinc2(0.5 * tau * (np.asarray(omega, dtype=float) - center))
    return float(out) if np.ndim(out) == 0 else out


def effective_spectrum(model: AtomBathModel, approach) -> tuple[float, Callable, float]:
    """Return ``(centre, G_eff, mass_bound)`` for an approach.

    ``mass_bound`` bounds ``int G_eff``; ``f <= 4`` on ``w >= 0``.
    """
    approach = Approach.parse(approach)
    spec = model.spectrum
    if approach is Approach.RWA:
        return model.omega0, spec, spec.total_weight
    if approach is Approach.I:
        return model.omega1, spec, spec.total_weight
    omega0, omega_p = model.omega0, model.omega_prime

    def modified(w):
        return f_factor(w, omega0, omega_p) * spec(w)

    return omega_p, modified, 4.0 * spec.total_weight


def bare_rate(model: AtomBathModel, approach) -> float:
    """``R0 = 2 pi G_eff(centre)``."""
    centre, g, _ = effective_spectrum(model, approach)
    return TWO_PI * float(g(np.array([centre]))[0])


def _overlap(model, terms, tau, mass, rtol, atol=0.0):
    spec = model.spectrum
    return sinc2_overlap(
        terms,
        tau,
        upper=spec.support_upper,
        mass=mass,
        breakpoints=spec.breakpoints(),
        rtol=rtol,
        atol=atol,
    )


def decay_rate(model: AtomBathModel, tau: float, approach="I", rtol: float = 1e-8) -> RatePoint:
    """Rate ``R(tau)`` and reference rate ``R0`` for one approach.

    Raises
    ------
    NumericalError
        If the overlap integral misses ``rtol``; ``achieved`` holds the
        tolerance that was reached.
    """
    approach = Approach.parse(approach)
    if not (math.isfinite(tau) and tau > 0):
        raise DomainError("tau must be positive and finite")
    centre, g, mass = effective_spectrum(model, approach)
    R0 = bare_rate(model, approach)
    if model.spectrum.is_zero:
        return RatePoint(tau, 0.0, R0, approach)
    R = _overlap(model, [(centre, g)], tau, mass, rtol)
    return RatePoint(tau, max(R, 0.0), R0, approach)


def delta_R(model: AtomBathModel, tau: float, approach="I", rtol: float = 1e-6) -> float:
    """``|R(approach) - R(RWA)|`` at equal ``tau``.

    The two overlaps differ by a relative 1e-6 or less for weak coupling, so
    the difference is integrated directly on one set of panels instead of
    subtracting two separately rounded rates.
    """
    approach = Approach.parse(approach)
    if approach is Approach.RWA or model.spectrum.is_zero:
        return 0.0
    spec = model.spectrum
    centre, g, mass = effective_spectrum(model, approach)

    def minus_g(w):
        return -spec(w)

    # absolute floor well below the size of either rate
    scale = min(tau * spec.total_weight, TWO_PI * spec.max_value)
    diff = _overlap(
        model,
        [(centre, g), (model.omega0, minus_g)],
        tau,
        mass + spec.total_weight,
        rtol,
        atol=1e-13 * scale,
    )
    return abs(diff)


def rate_decomposition(
    model: AtomBathModel,
    tau: float,
    omega_prime: float | None = None,
    rtol: float = 1e-10,
) -> tuple[float, float, float]:
    """Split the approach-II rate into ``R1 + R2 + R3``.

    With ``d = w - Omega'`` and ``q = w + Omega`` the three weights are
    ``G1 = (2 Omega / q)^2 G``, ``G2 = 4 Omega d / q^2 G`` and
    ``G3 = (d / q)^2 G``, which add up to ``f G``.  ``omega_prime`` overrides
    the model's value (the centre of the kernel moves with it).
    """
    if not tau > 0:
        raise DomainError("tau must be positive")
    if model.spectrum.is_zero:
        return 0.0, 0.0, 0.0
    spec = model.spectrum
    om = model.omega0
    op = model.omega_prime if omega_prime is None else float(omega_prime)

    def g1(w):
        return (2.0 * om / (w + om)) ** 2 * spec(w)

    def g2(w):
        return 4.0 * om * (w - op) / (w + om) ** 2 * spec(w)

    def g3(w):
        return ((w - op) / (w + om)) ** 2 * spec(w)

    mass = 4.0 * spec.total_weight
    R1 = _overlap(model, [(op, g1)], tau, mass, rtol)
    # R2 changes sign across the centre; anchor its tolerance to R1
    R2 = _overlap(model, [(op, g2)], tau, mass, rtol, atol=rtol * abs(R1))
    R3 = _overlap(model, [(op, g3)], tau, spec.total_weight, rtol, atol=rtol * abs(R1))
    return R1, R2, R3


def survival_probability(R: float, protocol: MeasurementProtocol) -> float:
    """``exp(-R n tau)``."""
    if R < 0 or not math.isfinite(R):
        raise DomainError("rate must be finite and non-negative")
    return math.exp(-R * protocol.total_time)
