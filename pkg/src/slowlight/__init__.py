"""Single-excitation dynamics of moving atoms coupled to a slow-light lattice.

Working units throughout the dynamics modules: hbar = 1, energies in units of
the hopping J, lengths in units of the lattice constant a, times in 1/J,
velocities in J*a (so the maximal group velocity is cbar = 2 J a).  Photon
frequencies are measured from the band center.  The `platforms` module is the
only SI-unit surface.
"""

from .band import (
    BandParams,
    ComovingFrame,
    BandRoot,
    dispersion,
    group_velocity,
    tilted_dispersion,
    tilted_group_velocity,
    band_extremes,
    resonant_wavevectors,
    dos_comoving,
)
from .dynamics import (
    AtomSpec,
    EffectiveCoupling,
    FullCoupling,
    LatticeGrid,
    DisorderSpec,
    SimOutput,
    Snapshot,
    evolve_effective,
    evolve_full,
    to_position,
    sample_disorder,
    photon_sides,
    retardation_times,
)
from .emission import (
    RatePair,
    FitResult,
    FitError,
    emission_rates,
    directionality,
    validity_min_velocity,
    sideband_classifier,
    discrepancy,
    fit_decay,
)
from .spectral import (
    BoundState,
    BoundStateResult,
    CubicModelParams,
    bound_state_frequencies,
    diagonalize_comoving,
    cubic_I,
    cubic_scattering_state,
    cubic_decay,
    critical_rates,
)

__version__ = "0.1.0"
