"""Tight-binding photon band and its co-moving (tilted) counterpart.

The lattice band is omega_k = -2 J cos(k a), measured from the band center.
In the frame co-moving with an atom at velocity v the band appears tilted,
omega_tilde_k = omega_k - k v, and acquires the drive frequency
Omega = 2 pi |v| / a as the natural sideband spacing.

The Brillouin zone is the half-open interval (-pi/a, pi/a].  Wavevectors
outside it are rejected, never folded back, so that k and k + 2 pi/a stay
distinguishable in the tilted frame where they are *not* degenerate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

# residual targets for root finding / quadrature
_ROOT_RESIDUAL = 1e-10
_DOS_EPSREL = 1e-6
_DEGENERATE_VG = 1e-6  # in units of cbar


@dataclass(frozen=True)
class BandParams:
    """Photonic lattice parameters.

    Attributes
    ----------
    J : float
        Hopping rate between neighbouring cells (energy unit).
    a : float
        Lattice constant (length unit).
    gamma_p : float
        Uniform photon loss rate, used by the dynamics and rate modules.
    """

    J: float = 1.0
    a: float = 1.0
    gamma_p: float = 0.0

    def __post_init__(self) -> None:
        if self.J <= 0.0:
            raise ValueError(f"hopping J must be positive, got {self.J}")
        if self.a <= 0.0:
            raise ValueError(f"lattice constant a must be positive, got {self.a}")
        if self.gamma_p < 0.0:
            raise ValueError(f"photon loss gamma_p must be >= 0, got {self.gamma_p}")

    @property
    def cbar(self) -> float:
        """Maximal group velocity 2 J a, the effective speed of light."""
        return 2.0 * self.J * self.a

    @property
    def zone_edge(self) -> float:
        return np.pi / self.a


@dataclass(frozen=True)
class ComovingFrame:
    """A band viewed from a frame moving at constant velocity v."""

    band: BandParams
    v: float

    @property
    def Omega(self) -> float:
        """Sideband spacing 2 pi |v| / a of the periodically driven problem."""
        return 2.0 * np.pi * abs(self.v) / self.band.a


@dataclass(frozen=True)
class BandRoot:
    """One solution of omega_tilde_k = delta.

    multiplicity > 1 marks a degenerate root where the co-moving group
    velocity vanishes (3 at the cubic critical point, 2 at a band-edge
    tangency).
    """

    k: float
    vg_comoving: float
    multiplicity: int = 1


def _check_zone(k, a: float) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    edge = np.pi / a
    if np.any(k <= -edge) or np.any(k > edge):
        bad = np.atleast_1d(k)[(np.atleast_1d(k) <= -edge) | (np.atleast_1d(k) > edge)]
        raise ValueError(
            f"wavevector {bad[0]:g} outside the Brillouin zone (-pi/a, pi/a] "
            f"with a = {a:g}; fold it explicitly before calling"
        )
    return k


def dispersion(k, band: BandParams):
    """Band energy omega_k = -2 J cos(k a) for k inside the zone."""
    k = _check_zone(k, band.a)
    return -2.0 * band.J * np.cos(k * band.a)


def group_velocity(k, band: BandParams):
    """Lab-frame group velocity d omega / d k = 2 J a sin(k a)."""
    k = _check_zone(k, band.a)
    return 2.0 * band.J * band.a * np.sin(k * band.a)


def tilted_dispersion(k, frame: ComovingFrame):
    """Co-moving band omega_tilde_k = omega_k - k v."""
    return dispersion(k, frame.band) - frame.v * np.asarray(k, dtype=float)


def tilted_group_velocity(k, frame: ComovingFrame):
    """Co-moving group velocity vg_tilde = 2 J a sin(k a) - v."""
    return group_velocity(k, frame.band) - frame.v


def _tilted_raw(k, frame: ComovingFrame):
    # no zone check; used on the closed interval for extremum refinement
    return -2.0 * frame.band.J * np.cos(k * frame.band.a) - frame.v * k


def band_extremes(frame: ComovingFrame, n_scan: int = 4096) -> tuple[float, float]:
    """Extremes (omega_min, omega_max) of the tilted band.

    Taken over the closed interval [-pi/a, pi/a]; for v > 0 the maximum
    2 J + Omega/2 sits at the zone edge k = -pi/a.
    """
    a = frame.band.a
    kk = np.linspace(-np.pi / a, np.pi / a, n_scan + 1)
    ww = _tilted_raw(kk, frame)
    out = []
    for sign in (+1.0, -1.0):
        i = int(np.argmin(sign * ww))
        lo = kk[max(i - 1, 0)]
        hi = kk[min(i + 1, n_scan)]
        res = optimize.minimize_scalar(
            lambda k: sign * _tilted_raw(k, frame), bounds=(lo, hi), method="bounded",
            options={"xatol": 1e-13},
        )
        out.append(sign * min(res.fun, sign * ww[i]))
    return out[0], out[1]


def resonant_wavevectors(
    delta: float, frame: ComovingFrame, n_scan: int = 4096
) -> list[BandRoot]:
    """All zone wavevectors resonant with an atomic detuning delta.

    Solves omega_tilde_k = delta by a sign-change scan over ``n_scan`` grid
    cells followed by bisection, to |omega_tilde_k - delta| < 1e-10 J.

    Returns
    -------
    list of BandRoot, sorted by k.  Empty when delta lies outside the tilted
    band.  A root with |vg_comoving| < 1e-6 cbar is reported once with
    multiplicity 2 (band-edge tangency) or 3 (vanishing curvature, the
    critical point of the v = cbar cubic dispersion).
    """
    band = frame.band
    a, J = band.a, band.J
    edge = np.pi / a
    # bracket over the closed interval but never report the excluded -pi/a
    kk = np.linspace(-edge, edge, n_scan + 1)
    ff = _tilted_raw(kk, frame) - delta

    roots: list[float] = []
    for i in range(len(kk) - 1):
        f0, f1 = ff[i], ff[i + 1]
        if f0 == 0.0 and kk[i] > -edge:
            roots.append(kk[i])
        elif f0 * f1 < 0.0:
            k0 = optimize.bisect(
                lambda k: _tilted_raw(k, frame) - delta, kk[i], kk[i + 1],
                xtol=1e-14, rtol=8.9e-16,
            )
            if k0 > -edge:
                roots.append(k0)
    if ff[-1] == 0.0:
        roots.append(kk[-1])

    # deduplicate near-coincident brackets
    dedup: list[float] = []
    for k0 in sorted(roots):
        if not dedup or abs(k0 - dedup[-1]) > 1e-8 * (2.0 * edge):
            dedup.append(k0)

    out = []
    for k0 in dedup:
        res = abs(_tilted_raw(k0, frame) - delta)
        if res > _ROOT_RESIDUAL * J:
            raise RuntimeError(
                f"bisection stalled at k = {k0:.12g}, residual {res:.3e} J"
            )
        vg = tilted_group_velocity(k0, frame)
        mult = 1
        if abs(vg) < _DEGENERATE_VG * band.cbar:
            curv = 2.0 * J * a * a * np.cos(k0 * a)
            mult = 3 if abs(curv) < 1e-4 * J * a * a else 2
        out.append(BandRoot(k=float(k0), vg_comoving=float(vg), multiplicity=mult))
    return out


def dos_comoving(omega: float, frame: ComovingFrame, broadening: float) -> float:
    """Lorentzian-broadened density of states of the tilted band.

    rho(omega) = (a / 2 pi) Int_zone dk  L(omega - omega_tilde_k)

    with L a unit-area Lorentzian of FWHM ``broadening``.  Normalised to one
    state per unit cell: Int rho(omega) d omega = 1.

    As broadening -> 0 this tends to (a/2 pi) sum_roots 1/|vg_comoving|,
    which diverges at stationary points of the tilted band.
    """
    if broadening <= 0.0:
        raise ValueError(f"broadening must be positive, got {broadening}")
    a = frame.band.a
    half = 0.5 * broadening

    def integrand(k):
        x = omega - _tilted_raw(k, frame)
        return (half / np.pi) / (x * x + half * half)

    pts = [r.k for r in resonant_wavevectors(omega, frame)]
    val, _ = integrate.quad(
        integrand, -np.pi / a, np.pi / a,
        points=pts or None, limit=400, epsrel=_DOS_EPSREL, epsabs=0.0,
    )
    return val * a / (2.0 * np.pi)
