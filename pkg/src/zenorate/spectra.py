"""Interacting spectral densities G(w).

All frequencies are dimensionless multiples of the bare level spacing
``Omega`` (so ``Omega == 1``) and times are in units of ``1/Omega``.  The
physical value of ``Omega`` in rad/s is carried as ``omega_scale`` purely for
reporting; nothing numerical depends on it.

Hydrogen amplitudes
-------------------
The dimensionless amplitudes ``eta`` (2p-1s) and ``eta'`` (3p-1s) multiply
``w`` measured in units of ``Omega``.  With this reading the 2p-1s preset
reproduces the published level shifts ``(Omega1 - Omega)/Omega = 1.71e-6``
and ``(Omega - Omega')/Omega = 5.69e-8`` to better than 0.5%.  Measuring
``w`` in units of ``omega_c`` instead would shrink both shifts by a factor of
``omega_c`` (~550) and reproduce neither.  The 3p-1s preset uses the same
reading and the printed ``eta' = 1.455e-9`` unchanged.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Union

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError
from .quadrature import _quad, half_line_integral

ArrayLike = Union[float, np.ndarray]

#: rad/s reference values listed alongside the hydrogen spectra
HYDROGEN_SI = {
    "2p1s": {"eta": 6.435e-9, "omega_c": 8.491e18, "omega0": 1.55e16},
    "3p1s": {"eta": 1.455e-9, "omega_c": 7.547e18, "omega0": 1.83e16},
}


class Spectrum:
    """Base class: a non-negative spectral density on ``w >= 0``.

    Subclasses implement :meth:`_density` for non-negative frequencies and
    expose ``omega_c`` (the characteristic cutoff) and ``omega_scale``.
    """

    kind: str = "abstract"
    omega_c: float
    omega_scale: float | None

    def _density(self, w: np.ndarray) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def __call__(self, omega: ArrayLike) -> ArrayLike:
        w = np.asarray(omega, dtype=float)
        if not np.all(np.isfinite(w)):
            raise DomainError("spectral density requested at a non-finite frequency")
        out = np.zeros_like(w)
        pos = w >= 0.0
        if np.any(pos):
            out[pos] = self._density(w[pos])
        if out.ndim == 0:
            return float(out)
        return out

    @property
    def is_zero(self) -> bool:
        return False

    def breakpoints(self) -> list[float]:
        """Panel edges that help quadrature resolve the shape of G."""
        return [self.omega_c * 2.0**k for k in range(-24, 10)]

    @cached_property
    def total_weight(self) -> float:
        """``int_0^inf G(w) dw``; see :func:`spectrum_total_weight`."""
        if self.is_zero:
            return 0.0
        return half_line_integral(
            lambda w: self(w), self.omega_c, rtol=1e-10, points=self.breakpoints()
        )

    @cached_property
    def support_upper(self) -> float:
        """Frequency beyond which less than 1e-14 of the weight remains."""
        if self.is_zero:
            return 64.0 * self.omega_c
        total = self.total_weight
        upper = 8.0 * self.omega_c
        for _ in range(80):
            tail, _ = _quad(lambda w: self(w), upper, 2.0 * upper, 1e-8)
            if tail <= 1e-15 * total:
                return 2.0 * upper
            upper *= 2.0
        return upper

    @cached_property
    def max_value(self) -> float:
        """Upper bound on ``max G`` (dense sampling plus a 5% margin)."""
        if self.is_zero:
            return 0.0
        grid = np.geomspace(self.omega_c * 1e-8, self.support_upper, 20001)
        return 1.05 * float(np.max(self(grid)))


@dataclass(frozen=True)
class Hydrogen2p1s(Spectrum):
    """``G(w) = eta w / [1 + (w/omega_c)^2]^4`` (hydrogen 2p-1s)."""

    eta: float = 6.435e-9
    omega_c: float = 550.0
    omega_scale: float | None = 1.55e16
    kind: str = field(default="Hydrogen2p1s", init=False)

    def __post_init__(self):
        if not self.eta > 0 or not self.omega_c > 0:
            raise DomainError("hydrogen spectra need eta > 0 and omega_c > 0")

    @classmethod
    def from_si(cls, eta: float, omega_c: float, omega0: float) -> "Hydrogen2p1s":
        """Build from a cutoff and a level spacing both given in rad/s."""
        return cls(eta=eta, omega_c=omega_c / omega0, omega_scale=omega0)

    def _density(self, w):
        x = w / self.omega_c
        return self.eta * w / (1.0 + x * x) ** 4

    @property
    def peak(self) -> float:
        return self.omega_c / math.sqrt(7.0)


@dataclass(frozen=True)
class Hydrogen3p1s(Spectrum):
    """``G(w) = eta' w [1 + 2 (w/omega_c')^2]^2 / [1 + (w/omega_c')^2]^6`` (hydrogen 3p-1s)."""

    eta: float = 1.455e-9
    omega_c: float = 412.0
    omega_scale: float | None = 1.83e16
    kind: str = field(default="Hydrogen3p1s", init=False)

    def __post_init__(self):
        if not self.eta > 0 or not self.omega_c > 0:
            raise DomainError("hydrogen spectra need eta > 0 and omega_c > 0")

    @classmethod
    def from_si(cls, eta: float, omega_c: float, omega0: float) -> "Hydrogen3p1s":
        return cls(eta=eta, omega_c=omega_c / omega0, omega_scale=omega0)

    def _density(self, w):
        x2 = (w / self.omega_c) ** 2
        return self.eta * w * (1.0 + 2.0 * x2) ** 2 / (1.0 + x2) ** 6


@dataclass(frozen=True)
class OhmicFamily(Spectrum):
    """``G(w) = A omega_c^(1-s) w^s exp(-w/omega_c)``.

    ``s < 1`` sub-Ohmic, ``s == 1`` Ohmic, ``s > 1`` super-Ohmic.  The peak
    sits at ``w = s omega_c``.
    """

    A: float
    s: float
    omega_c: float
    omega_scale: float | None = None
    kind: str = field(default="OhmicFamily", init=False)

    def __post_init__(self):
        if not self.A >= 0:
            raise DomainError("Ohmic amplitude A must be >= 0")
        if not self.s > 0:
            raise DomainError("Ohmic exponent s must be > 0")
        if not self.omega_c > 0:
            raise DomainError("Ohmic cutoff omega_c must be > 0")

    @property
    def is_zero(self) -> bool:
        return self.A == 0.0

    def _density(self, w):
        if self.A == 0.0:
            return np.zeros_like(w)
        with np.errstate(divide="ignore"):
            logs = self.s * np.log(w) - w / self.omega_c
        return self.A * self.omega_c ** (1.0 - self.s) * np.exp(logs)

    @property
    def peak(self) -> float:
        return self.s * self.omega_c

    def breakpoints(self) -> list[float]:
        return sorted({*super().breakpoints(), self.peak})


@dataclass(frozen=True, eq=False)
class TabulatedSpectrum(Spectrum):
    """Spectral density interpolated from samples.

    Between knots a monotone piecewise-cubic (PCHIP) interpolant is used, so
    non-negative samples never produce negative values.  Below the first knot
    G is zero; above the last knot it decays as
    ``G_last * exp(-(w - w_last) / tail_length)``.  ``tail_length`` defaults
    to the logarithmic slope of the last two samples when they decrease, and
    to the last knot spacing otherwise.
    """

    omega: np.ndarray
    values: np.ndarray
    omega_scale: float | None = None
    tail_length: float | None = None
    kind: str = field(default="Tabulated", init=False)

    def __post_init__(self):
        w = np.asarray(self.omega, dtype=float)
        g = np.asarray(self.values, dtype=float)
        if w.ndim != 1 or w.shape != g.shape or w.size < 2:
            raise DomainError("tabulated spectrum needs two equal-length 1-D columns")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(g))):
            raise DomainError("tabulated spectrum contains non-finite entries")
        if np.any(np.diff(w) <= 0):
            raise DomainError("tabulated abscissae must be strictly increasing")
        if w[0] < 0 or np.any(g < 0):
            raise DomainError("tabulated spectrum must be non-negative on w >= 0")
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "values", g)
        if self.tail_length is None:
            step = w[-1] - w[-2]
            if 0 < g[-1] < g[-2]:
                length = step / math.log(g[-2] / g[-1])
            else:
                length = step
            object.__setattr__(self, "tail_length", length)
        object.__setattr__(self, "_interp", PchipInterpolator(w, g, extrapolate=False))

    @property
    def is_zero(self) -> bool:
        return not np.any(self.values > 0)

    @property
    def omega_c(self) -> float:
        """Location of the largest sample (or the span, for a flat table)."""
        if self.is_zero:
            return float(self.omega[-1])
        return max(float(self.omega[np.argmax(self.values)]), float(self.omega[1]))

    def breakpoints(self) -> list[float]:
        return [float(self.omega[0]), float(self.omega[-1]), *super().breakpoints()]

    def _density(self, w):
        out = np.zeros_like(w)
        inside = (w >= self.omega[0]) & (w <= self.omega[-1])
        if np.any(inside):
            out[inside] = np.maximum(self._interp(w[inside]), 0.0)
        above = w > self.omega[-1]
        if np.any(above):
            out[above] = self.values[-1] * np.exp(-(w[above] - self.omega[-1]) / self.tail_length)
        return out


def eval_spectrum(spec: Spectrum, omega: ArrayLike) -> ArrayLike:
    """G(w); exactly zero for w < 0.  Raises DomainError for non-finite w."""
    return spec(omega)


def f_factor(omega: ArrayLike, omega0: float, omega_prime: float) -> ArrayLike:
    """Approach-II spectral reweighting ``((2 Omega + w - Omega') / (w + Omega))**2``.

    Algebraically equal to ``1 + (3 Omega - Omega' + 2 w)(Omega - Omega') / (w + Omega)**2``;
    the squared form is manifestly non-negative.
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w == -omega0):
        raise DomainError("f(w) has a pole at w = -Omega")
    out = ((2.0 * omega0 + w - omega_prime) / (w + omega0)) ** 2
    return float(out) if out.ndim == 0 else out


def eval_modified_spectrum(spec: Spectrum, omega: ArrayLike, model) -> ArrayLike:
    """``G'(w) = f(w) G(w)`` using the model's renormalised spacing ``Omega'``."""
    g = spec(omega)
    return f_factor(omega, model.omega0, model.omega_prime) * g


def spectrum_total_weight(spec: Spectrum) -> float:
    """``int_0^inf G(w) dw`` by adaptive quadrature (relative tolerance 1e-10).

    Raises IntegrabilityError if the integral does not converge.
    """
    return spec.total_weight


def zero_spectrum(omega_c: float = 500.0) -> OhmicFamily:
    """The uncoupled bath (``A = 0``)."""
    return OhmicFamily(A=0.0, s=1.0, omega_c=omega_c)


def hydrogen_preset(name: str) -> Spectrum:
    """``"2p1s"`` or ``"3p1s"`` in reduced units (``omega_c/Omega`` = 550, 412)."""
    if name == "2p1s":
        return Hydrogen2p1s()
    if name == "3p1s":
        return Hydrogen3p1s()
    raise KeyError(name)


_UNITS_RE = re.compile(r"#\s*units\s*:\s*(\S+)", re.IGNORECASE)
_SCALE_RE = re.compile(r"#\s*omega_scale\s*:\s*(\S+)", re.IGNORECASE)


def load_tabulated(path: Union[str, Path], omega_scale: float | None = None) -> TabulatedSpectrum:
    """Read a two-column ``w G`` text file.

    Lines starting with ``#`` are comments.  Frequencies are taken to be in
    units of ``Omega`` unless the file carries ``# units: rad/s``, in which
    case both columns are divided by ``Omega`` in rad/s, taken from
    ``omega_scale`` or a ``# omega_scale: <value>`` header line.
    """
    text = Path(path).read_text()
    units = "reduced"
    for line in text.splitlines():
        if m := _UNITS_RE.match(line.strip()):
            units = m.group(1).lower()
        if (m := _SCALE_RE.match(line.strip())) and omega_scale is None:
            omega_scale = float(m.group(1))
    rows = [ln.split("#", 1)[0].split() for ln in text.splitlines()]
    rows = [r for r in rows if r]
    if any(len(r) != 2 for r in rows):
        raise DomainError(f"{path}: expected two whitespace-delimited columns")
    try:
        data = np.array(rows, dtype=float)
    except ValueError as exc:
        raise DomainError(f"{path}: non-numeric entry ({exc})") from None
    if data.shape[0] < 2:
        raise DomainError(f"{path}: need at least two samples")
    w, g = data[:, 0], data[:, 1]
    if units in ("rad/s", "si"):
        if not omega_scale:
            raise DomainError(f"{path}: rad/s data needs omega_scale (Omega in rad/s)")
        w = w / omega_scale
        g = g / omega_scale
    elif units != "reduced":
        raise DomainError(f"{path}: unknown units {units!r}")
    return TabulatedSpectrum(w, g, omega_scale=omega_scale)


def tabulate(spec: Spectrum, omega: np.ndarray) -> TabulatedSpectrum:
    """Sample a spectrum onto a grid."""
    omega = np.asarray(omega, dtype=float)
    return TabulatedSpectrum(omega, np.asarray(spec(omega)), omega_scale=spec.omega_scale)

