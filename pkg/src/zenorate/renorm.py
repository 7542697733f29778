"""Level-spacing renormalisation by the counter-rotating terms.

Approach I eliminates only the counter-rotating coupling and shifts the
spacing to ``Omega1 = Omega + sum_k g_k^2 / (w_k + Omega)``.  Approach II
also mixes in the slow terms, giving ``Omega' = Omega - 2 Omega sum_k
g_k^2 / (w_k + Omega)^2`` and rescaled couplings ``g'_k = 2 Omega g_k /
(w_k + Omega)``.  The mode sums are evaluated as integrals over G(w).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DomainError
from .quadrature import half_line_integral
from .special import upper_incomplete_gamma
from .spectra import OhmicFamily, Spectrum

__all__ = [
    "AtomBathModel",
    "CouplingModifier",
    "compute_omega1",
    "compute_omega1_closed_form",
    "compute_omega_prime",
    "delta_omega_map",
    "upper_incomplete_gamma",
]


def _spectral_moment(spec: Spectrum, omega0: float, power: int) -> float:
    """``int_0^inf G(w) / (w + Omega)**power dw`` to 1e-10 relative."""
    if spec.is_zero:
        return 0.0
    return half_line_integral(
        lambda w: spec(w) / (w + omega0) ** power,
        spec.omega_c,
        rtol=1e-10,
        points=spec.breakpoints(),
    )


@dataclass(frozen=True)
class AtomBathModel:
    """A two-level atom with spacing ``omega0`` coupled to a spectrum.

    ``omega1`` and ``omega_prime`` are computed on first access and cached.
    """

    spectrum: Spectrum
    omega0: float = 1.0
    name: str = ""

    def __post_init__(self):
        if not self.omega0 > 0:
            raise DomainError("omega0 must be positive")

    @cached_property
    def omega1(self) -> float:
        return compute_omega1(self)

    @cached_property
    def omega_prime(self) -> float:
        return compute_omega_prime(self)

    @cached_property
    def sum_A_squared(self) -> float:
        """``sum_k A_k^2 = int G / (w + Omega)^2``."""
        return _spectral_moment(self.spectrum, self.omega0, 2)

    @property
    def shift1(self) -> float:
        """``(Omega1 - Omega) / Omega``."""
        return (self.omega1 - self.omega0) / self.omega0

    @property
    def shift_prime(self) -> float:
        """``(Omega - Omega') / Omega``."""
        return (self.omega0 - self.omega_prime) / self.omega0

    @property
    def coupling_modifier(self) -> "CouplingModifier":
        return CouplingModifier(self.omega0)


@dataclass(frozen=True)
class CouplingModifier:
    """The map ``g_k -> g'_k = 2 Omega / (w_k + Omega) * g_k`` as a function of w."""

    omega0: float = 1.0

    def __call__(self, omega):
        return 2.0 * self.omega0 / (np.asarray(omega, dtype=float) + self.omega0)


def compute_omega1(model: AtomBathModel) -> float:
    """``Omega + int_0^inf G(w) / (w + Omega) dw``."""
    return model.omega0 + _spectral_moment(model.spectrum, model.omega0, 1)


def compute_omega_prime(model: AtomBathModel) -> float:
    """``Omega - 2 Omega int_0^inf G(w) / (w + Omega)^2 dw``."""
    return model.omega0 - 2.0 * model.omega0 * model.sum_A_squared


def compute_omega1_closed_form(params: OhmicFamily, omega0: float = 1.0) -> float:
    """Closed-form ``Omega1`` for the Ohmic family.

    ``Omega1 = Omega + A omega_c^(1-s) Omega^s e^z Gamma(1+s) Gamma(-s, z)``
    with ``z = Omega / omega_c``.  The ``omega_c^(1-s)`` factor is what makes
    the shift carry the units of frequency; without it the expression only
    agrees with direct quadrature when ``omega_c = 1``.
    """
    if not params.s > 0:
        raise DomainError("closed form needs s > 0")
    if params.A == 0.0:
        return float(omega0)
    z = omega0 / params.omega_c
    shift = (
        params.A
        * params.omega_c ** (1.0 - params.s)
        * omega0**params.s
        * math.exp(z)
        * math.gamma(1.0 + params.s)
        * upper_incomplete_gamma(-params.s, z)
    )
    return omega0 + shift


def delta_omega_map(
    s_grid: Sequence[float],
    A_grid: Sequence[float],
    omega_c: float,
    omega0: float = 1.0,
) -> np.ndarray:
    """``Delta Omega = Omega1 - s omega_c`` on an (A, s) grid.

    Returns an array of shape ``(len(A_grid), len(s_grid))``.  The shift is
    linear in ``A``, so one quadrature per exponent at ``A = 1`` is scaled.
    """
    s_grid = list(s_grid)
    A_grid = list(A_grid)
    if not s_grid or not A_grid:
        raise DomainError("delta_omega_map needs non-empty grids")
    if not omega_c > 0:
        raise DomainError("omega_c must be positive")
    unit = np.array(
        [
            compute_omega1(AtomBathModel(OhmicFamily(1.0, s, omega_c), omega0)) - omega0
            for s in s_grid
        ]
    )
    A = np.asarray(A_grid, dtype=float)[:, None]
    s = np.asarray(s_grid, dtype=float)[None, :]
    return omega0 + A * unit[None, :] - s * omega_c
