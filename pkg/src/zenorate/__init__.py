"""Decay of a frequently measured two-level atom with and without the rotating-wave approximation.

Frequencies are in units of the bare level spacing and times in its inverse.
"""

__version__ = "0.1.0"

from .errors import (
    CoverageError,
    DivergenceError,
    DomainError,
    IntegrabilityError,
    IntegrationAccuracyError,
    NumericalError,
    ZenoRateError,
)
from .spectra import (
    Hydrogen2p1s,
    Hydrogen3p1s,
    OhmicFamily,
    Spectrum,
    TabulatedSpectrum,
    eval_modified_spectrum,
    eval_spectrum,
    f_factor,
    hydrogen_preset,
    load_tabulated,
    spectrum_total_weight,
    zero_spectrum,
)
from .renorm import (
    AtomBathModel,
    CouplingModifier,
    compute_omega1,
    compute_omega1_closed_form,
    compute_omega_prime,
    delta_omega_map,
    upper_incomplete_gamma,
)
from .rate import (
    Approach,
    MeasurementProtocol,
    RatePoint,
    bare_rate,
    decay_rate,
    delta_R,
    kernel_F,
    rate_decomposition,
    survival_probability,
)
from .analysis import (
    RateCurve,
    RegimeReport,
    compare_approaches,
    default_tau_grid,
    find_transition,
    sweep_rate_curve,
)
from .dynamics import (
    AmplitudeState,
    DiscretizedBath,
    discretize_bath,
    evolve_amplitudes,
    oracle_rate,
    second_approach_amplitude,
    survival_after_measurements,
)
