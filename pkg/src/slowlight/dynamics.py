"""Single-excitation dynamics of moving atoms coupled to the photon lattice.

Two propagators for the same physics:

* ``evolve_effective`` works in momentum space with the cell-averaged
  coupling gbar; the photon phases e^{-i omega_k t} are handled exactly
  (interaction picture) and only the atom-field exchange is integrated.
* ``evolve_full`` works in site space, where the atom couples to each cell
  through the localized Wannier envelope and the coupling therefore blinks
  as the atom crosses cells.  On-site disorder is diagonal here.

Both use fixed-step RK4.  Atoms follow classical trajectories
z_i(t) = z_init + v t; only field sites are discrete.  The periodic box must
be large enough that the light cone never wraps: cbar * t_max < L/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .band import BandParams, ComovingFrame, dispersion, resonant_wavevectors

_DT_MAX = 0.02  # in units of 1/J


@dataclass(frozen=True)
class AtomSpec:
    """One atom: detuning from the band center, trajectory, loss."""

    delta: float
    z_init: float = 0.0
    v: float = 0.0
    gamma_a: float = 0.0

    def __post_init__(self) -> None:
        if self.gamma_a < 0.0:
            raise ValueError(f"gamma_a must be >= 0, got {self.gamma_a}")

    def z(self, t):
        """Classical trajectory z_init + v*t (no recoil)."""
        return self.z_init + self.v * np.asarray(t, dtype=float)


@dataclass(frozen=True)
class EffectiveCoupling:
    """Cell-averaged atom-field coupling gbar."""

    gbar: float

    def __post_init__(self) -> None:
        if self.gbar < 0.0:
            raise ValueError(f"gbar must be >= 0, got {self.gbar}")


@dataclass(frozen=True)
class FullCoupling:
    """Local coupling g through a Gaussian cell envelope of width z0.

    The envelope w(x) = pi^(-1/4) sqrt(a/z0) exp(-x^2 / (2 z0^2)) is the
    per-cell mode profile; its cell average fixes the equivalent
    cell-averaged coupling gbar = g sqrt(2 z0 / a) pi^(1/4).
    """

    g: float
    z0: float

    def __post_init__(self) -> None:
        if self.g < 0.0:
            raise ValueError(f"g must be >= 0, got {self.g}")
        if self.z0 <= 0.0:
            raise ValueError(f"z0 must be positive, got {self.z0}")

    def gbar_equivalent(self, a: float) -> float:
        return self.g * np.sqrt(2.0 * self.z0 / a) * np.pi**0.25

    def envelope(self, x, a: float):
        """w(x), truncated beyond 6 z0 (relative tail < 1e-8)."""
        x = np.asarray(x, dtype=float)
        amp = np.pi**-0.25 * np.sqrt(a / self.z0)
        val = amp * np.exp(-(x * x) / (2.0 * self.z0**2))
        return np.where(np.abs(x) <= 6.0 * self.z0, val, 0.0)


@dataclass(frozen=True)
class LatticeGrid:
    """Periodic box of n_sites cells: sites z_n = n a, modes k_j = 2 pi j/L."""

    n_sites: int
    a: float = 1.0

    def __post_init__(self) -> None:
        if self.n_sites < 2 or self.n_sites % 2 != 0:
            raise ValueError(f"n_sites must be even and >= 2, got {self.n_sites}")
        if self.a <= 0.0:
            raise ValueError(f"lattice constant a must be positive, got {self.a}")

    @property
    def length(self) -> float:
        return self.n_sites * self.a

    @property
    def k(self) -> np.ndarray:
        """Momentum grid, ascending, j in {-N/2+1, ..., N/2}."""
        j = np.arange(-self.n_sites // 2 + 1, self.n_sites // 2 + 1)
        return 2.0 * np.pi * j / self.length

    @property
    def z(self) -> np.ndarray:
        return np.arange(self.n_sites) * self.a


@dataclass(frozen=True)
class DisorderSpec:
    """I.i.d. uniform on-site frequency offsets on [-epsilon/2, epsilon/2]."""

    epsilon: float
    seed: int = 0
    n_realizations: int = 1

    def __post_init__(self) -> None:
        if self.epsilon < 0.0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon}")


def sample_disorder(
    spec: DisorderSpec, grid: LatticeGrid, realization_index: int = 0
) -> np.ndarray:
    """Per-site offsets delta-omega_n, deterministic in (seed, index)."""
    rng = np.random.default_rng((spec.seed, realization_index))
    return rng.uniform(-0.5 * spec.epsilon, 0.5 * spec.epsilon, spec and grid.n_sites)


@dataclass(frozen=True)
class Snapshot:
    time: float
    c_e: np.ndarray
    psi_z: np.ndarray


@dataclass
class SimOutput:
    """Time series and snapshots of one evolution run."""

    times: np.ndarray
    p_e: np.ndarray  # shape (n_stored, n_atoms)
    norm: np.ndarray
    snapshots: list[Snapshot]
    manifest: dict
    band: BandParams = field(repr=False, default=None)
    atoms: tuple = field(repr=False, default=())
    grid: LatticeGrid = field(repr=False, default=None)


@dataclass(frozen=True)
class Observables:
    """Per-atom summary quantities extracted from a SimOutput."""

    atom_index: int
    times: np.ndarray
    p_e: np.ndarray
    snapshot_times: np.ndarray
    left_fraction: np.ndarray
    right_fraction: np.ndarray
    retardation: dict


def to_position(psi_k: np.ndarray, grid: LatticeGrid) -> np.ndarray:
    """Unitary transform to sites: psi(z_n) = N^{-1/2} sum_j psi_kj e^{i k_j z_n}."""
    n = grid.n_sites
    if psi_k.shape != (n,):
        raise ValueError(f"psi_k has shape {psi_k.shape}, expected ({n},)")
    j = np.arange(-n // 2 + 1, n // 2 + 1)
    buf = np.zeros(n, dtype=complex)
    buf[j % n] = psi_k
    return np.fft.ifft(buf, norm="ortho")


def _check_run(band: BandParams, grid: LatticeGrid, t_max: float, dt: float) -> int:
    if grid.a != band.a:
        raise ValueError(f"grid.a = {grid.a} differs from band.a = {band.a}")
    if dt <= 0.0 or dt > _DT_MAX / band.J:
        raise ValueError(f"dt = {dt} outside (0, {_DT_MAX / band.J}] (0.02/J cap)")
    if t_max <= 0.0:
        raise ValueError(f"t_max must be positive, got {t_max}")
    if band.cbar * t_max >= grid.length / 2.0:
        n_min = int(np.ceil(2.0 * band.cbar * t_max / grid.a)) + 2
        n_min += n_min % 2
        raise ValueError(
            f"light cone wraps around: cbar*t_max = {band.cbar * t_max:g} >= "
            f"L/2 = {grid.length / 2:g}; need n_sites >= {n_min}"
        )
    return int(round(t_max / dt))


def _snapshot_indices(snapshot_times, dt: float, n_steps: int) -> dict[int, float]:
    out: dict[int, float] = {}
    for t_s in snapshot_times:
        idx = int(round(t_s / dt))
        if idx < 0 or idx > n_steps:
            raise ValueError(f"snapshot time {t_s} outside [0, t_max]")
        out.setdefault(idx, idx * dt)
    return out


def _init_amplitudes(atoms, c_init) -> np.ndarray:
    if c_init is None:
        c = np.zeros(len(atoms), dtype=complex)
        c[0] = 1.0
        return c
    c = np.asarray(c_init, dtype=complex)
    if c.shape != (len(atoms),):
        raise ValueError(f"c_init has shape {c.shape}, expected ({len(atoms)},)")
    if np.sum(np.abs(c) ** 2) > 1.0 + 1e-12:
        raise ValueError("initial excitation norm exceeds 1")
    return c.copy()


def _atom_arrays(atoms):
    z0 = np.array([at.z_init for at in atoms], dtype=float)
    vs = np.array([at.v for at in atoms], dtype=float)
    de = np.array([at.delta for at in atoms], dtype=float)
    ga = np.array([at.gamma_a for at in atoms], dtype=float)
    return z0, vs, de, ga


def _base_manifest(model, band, atoms, coupling_dict, grid, t_max, dt, store_every):
    return {
        "model": model,
        "band": {"J": band.J, "a": band.a, "gamma_p": band.gamma_p},
        "atoms": [
            {"delta": at.delta, "z_init": at.z_init, "v": at.v, "gamma_a": at.gamma_a}
            for at in atoms
        ],
        "coupling": coupling_dict,
        "grid": {"n_sites": grid.n_sites, "a": grid.a},
        "run": {"t_max": t_max, "dt": dt, "store_every": store_every},
        "integrator": "rk4",
    }


def evolve_effective(
    band: BandParams,
    atoms,
    coupling: EffectiveCoupling,
    grid: LatticeGrid,
    t_max: float,
    dt: float = 0.01,
    snapshot_times=(),
    store_every: int = 1,
    c_init=None,
) -> SimOutput:
    """Propagate the cell-averaged (continuum) model in momentum space.

    Equations of motion, with kappa = gbar sqrt(a/L) and z_i(t) = z_i + v_i t:

        dc_i/dt   = -(i delta_i + gamma_a/2) c_i - i kappa sum_k e^{i k z_i(t)} psi_k
        dpsi_k/dt = -(i omega_k + gamma_p/2) psi_k - i kappa sum_i e^{-i k z_i(t)} c_i

    integrated by RK4 on the slowly varying phi_k = e^{i omega_k t} psi_k, so
    the free photon phases enter as exact factors.

    Parameters
    ----------
    atoms : sequence of AtomSpec
    t_max, dt : floats
        dt must not exceed 0.02/J; snapshot times are rounded to steps.
    snapshot_times : iterable of float
        Times at which psi(z_n) is stored (position space).
    store_every : int
        Thinning factor for the stored time series.

    Returns
    -------
    SimOutput
    """
    if not isinstance(coupling, EffectiveCoupling):
        raise TypeError("evolve_effective requires an EffectiveCoupling")
    if len(atoms) == 0:
        raise ValueError("need at least one atom")
    n_steps = _check_run(band, grid, t_max, dt)
    snaps = _snapshot_indices(snapshot_times, dt, n_steps)
    if store_every < 1:
        raise ValueError("store_every must be >= 1")

    kk = grid.k
    ww = dispersion(kk, band)
    kappa = coupling.gbar * np.sqrt(band.a / grid.length)
    z0s, vs, deltas, gammas = _atom_arrays(atoms)
    atom_damp = -1j * deltas - 0.5 * gammas
    gamma_p = band.gamma_p

    c = _init_amplitudes(atoms, c_init)
    phi = np.zeros(grid.n_sites, dtype=complex)

    def phases(t):
        zt = z0s + vs * t
        return np.exp(1j * (zt[:, None] * kk[None, :] - ww[None, :] * t))

    def rhs(c, phi, P):
        dc = atom_damp * c - 1j * kappa * (P @ phi)
        dphi = -0.5 * gamma_p * phi - 1j * kappa * (P.conj().T @ c)
        return dc, dphi

    stored = list(range(0, n_steps + 1, store_every))
    if stored[-1] != n_steps:
        stored.append(n_steps)
    store_at = {idx: row for row, idx in enumerate(stored)}
    times = np.array(stored, dtype=float) * dt
    p_e = np.empty((len(stored), len(atoms)))
    norm = np.empty(len(stored))
    snapshots: list[Snapshot] = []

    for i in range(n_steps + 1):
        t = i * dt
        if i in store_at:
            row = store_at[i]
            p_e[row] = np.abs(c) ** 2
            norm[row] = np.sum(np.abs(c) ** 2) + np.sum(np.abs(phi) ** 2)
        if i in snaps:
            psi_k = np.exp(-1j * ww * t) * phi
            snapshots.append(Snapshot(snaps[i], c.copy(), to_position(psi_k, grid)))
        if i == n_steps:
            break
        P0 = phases(t)
        Ph = phases(t + 0.5 * dt)
        P1 = phases(t + dt)
        k1c, k1p = rhs(c, phi, P0)
        k2c, k2p = rhs(c + 0.5 * dt * k1c, phi + 0.5 * dt * k1p, Ph)
        k3c, k3p = rhs(c + 0.5 * dt * k2c, phi + 0.5 * dt * k2p, Ph)
        k4c, k4p = rhs(c + dt * k3c, phi + dt * k3p, P1)
        c = c + (dt / 6.0) * (k1c + 2.0 * k2c + 2.0 * k3c + k4c)
        phi = phi + (dt / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)

    manifest = _base_manifest(
        "effective", band, atoms, {"kind": "effective", "gbar": coupling.gbar},
        grid, n_steps * dt, dt, store_every,
    )
    manifest["run"]["snapshot_times"] = sorted(snaps.values())
    return SimOutput(times, p_e, norm, snapshots, manifest,
                     band=band, atoms=tuple(atoms), grid=grid)


def evolve_full(
    band: BandParams,
    atoms,
    coupling: FullCoupling,
    grid: LatticeGrid,
    t_max: float,
    dt: float = 0.01,
    snapshot_times=(),
    disorder: np.ndarray | None = None,
    store_every: int = 1,
    c_init=None,
) -> SimOutput:
    """Propagate the full modulated-coupling model in site space.

        dpsi_n/dt = -i [delta-omega_n psi_n - J (psi_{n+1} + psi_{n-1})]
                    - (gamma_p/2) psi_n - i g sum_i w(z_i(t) - z_n) c_i
        dc_i/dt   = -(i delta_i + gamma_a/2) c_i - i g sum_n w(z_i(t) - z_n) psi_n

    with w the Gaussian cell envelope (minimal-image distance, truncated at
    6 z0).  Site energies are 0 on average so the band is -2J cos(ka),
    matching the momentum-space model; `disorder` adds per-site offsets.
    """
    if not isinstance(coupling, FullCoupling):
        raise TypeError("evolve_full requires a FullCoupling")
    if len(atoms) == 0:
        raise ValueError("need at least one atom")
    if coupling.z0 >= band.a / 2.0:
        raise ValueError(
            f"z0 = {coupling.z0} must be < a/2 = {band.a / 2} (tight-binding envelope)"
        )
    n_steps = _check_run(band, grid, t_max, dt)
    snaps = _snapshot_indices(snapshot_times, dt, n_steps)
    if store_every < 1:
        raise ValueError("store_every must be >= 1")

    n = grid.n_sites
    if disorder is None:
        domega = np.zeros(n)
    else:
        domega = np.asarray(disorder, dtype=float)
        if domega.shape != (n,):
            raise ValueError(
                f"disorder realization has length {domega.shape}, expected ({n},)"
            )

    z_sites = grid.z
    L = grid.length
    z0s, vs, deltas, gammas = _atom_arrays(atoms)
    atom_damp = -1j * deltas - 0.5 * gammas
    site_damp = -1j * domega - 0.5 * band.gamma_p
    J, g = band.J, coupling.g

    c = _init_amplitudes(atoms, c_init)
    psi = np.zeros(n, dtype=complex)

    def weights(t):
        x = (z0s + vs * t)[:, None] - z_sites[None, :]
        x = (x + 0.5 * L) % L - 0.5 * L  # minimal image
        return coupling.envelope(x, band.a)

    def rhs(c, psi, W):
        dpsi = 1j * J * (np.roll(psi, 1) + np.roll(psi, -1)) + site_damp * psi \
            - 1j * g * (W.T @ c)
        dc = atom_damp * c - 1j * g * (W @ psi)
        return dc, dpsi

    stored = list(range(0, n_steps + 1, store_every))
    if stored[-1] != n_steps:
        stored.append(n_steps)
    store_at = {idx: row for row, idx in enumerate(stored)}
    times = np.array(stored, dtype=float) * dt
    p_e = np.empty((len(stored), len(atoms)))
    norm = np.empty(len(stored))
    snapshots: list[Snapshot] = []

    for i in range(n_steps + 1):
        t = i * dt
        if i in store_at:
            row = store_at[i]
            p_e[row] = np.abs(c) ** 2
            norm[row] = np.sum(np.abs(c) ** 2) + np.sum(np.abs(psi) ** 2)
        if i in snaps:
            snapshots.append(Snapshot(snaps[i], c.copy(), psi.copy()))
        if i == n_steps:
            break
        W0 = weights(t)
        Wh = weights(t + 0.5 * dt)
        W1 = weights(t + dt)
        k1c, k1p = rhs(c, psi, W0)
        k2c, k2p = rhs(c + 0.5 * dt * k1c, psi + 0.5 * dt * k1p, Wh)
        k3c, k3p = rhs(c + 0.5 * dt * k2c, psi + 0.5 * dt * k2p, Wh)
        k4c, k4p = rhs(c + dt * k3c, psi + dt * k3p, W1)
        c = c + (dt / 6.0) * (k1c + 2.0 * k2c + 2.0 * k3c + k4c)
        psi = psi + (dt / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)

    manifest = _base_manifest(
        "full", band, atoms,
        {"kind": "full", "g": coupling.g, "z0": coupling.z0,
         "gbar_equivalent": coupling.gbar_equivalent(band.a)},
        grid, n_steps * dt, dt, store_every,
    )
    manifest["run"]["snapshot_times"] = sorted(snaps.values())
    manifest["disorder"] = None if disorder is None else {"applied": True}
    return SimOutput(times, p_e, norm, snapshots, manifest,
                     band=band, atoms=tuple(atoms), grid=grid)


def photon_sides(snapshot: Snapshot, atom_z: float, grid: LatticeGrid):
    """Photon weight fractions left/right of an atom position (periodic box)."""
    s = (grid.z - atom_z + 0.5 * grid.length) % grid.length - 0.5 * grid.length
    dens = np.abs(snapshot.psi_z) ** 2
    total = dens.sum()
    if total <= 0.0:
        return np.nan, np.nan
    return dens[s < 0.0].sum() / total, dens[s > 0.0].sum() / total


def retardation_times(band: BandParams, atoms, atom_index: int) -> dict:
    """Retardation tau_ij = |d_ij / (v_g(k_L) - v)| for the leftward resonance.

    k_L is the negative-k root of the resonance condition for the reference
    atom; None when no such root exists.
    """
    ref = atoms[atom_index]
    frame = ComovingFrame(band=band, v=ref.v)
    roots = [r for r in resonant_wavevectors(ref.delta, frame) if r.k < 0.0]
    out = {}
    for j, other in enumerate(atoms):
        if j == atom_index:
            continue
        if not roots:
            out[(atom_index, j)] = None
            continue
        best = max(roots, key=lambda r: abs(r.vg_comoving))
        rel = abs(best.vg_comoving)
        d = abs(ref.z_init - other.z_init)
        out[(atom_index, j)] = np.inf if rel == 0.0 else d / rel
    return out


def observables(out: SimOutput, atom_index: int) -> Observables:
    """Left/right photon fractions and retardation times for one atom.

    Fractions are measured relative to the instantaneous atom position at
    each snapshot time; requires at least one snapshot.
    """
    if not out.snapshots:
        raise ValueError("SimOutput has no snapshots; rerun with snapshot_times")
    if not 0 <= atom_index < len(out.atoms):
        raise IndexError(f"atom_index {atom_index} out of range")
    atom = out.atoms[atom_index]
    lefts, rights, st = [], [], []
    for snap in out.snapshots:
        z_at = (atom.z_init + atom.v * snap.time) % out.grid.length
        lf, rf = photon_sides(snap, z_at, out.grid)
        lefts.append(lf)
        rights.append(rf)
        st.append(snap.time)
    return Observables(
        atom_index=atom_index,
        times=out.times,
        p_e=out.p_e[:, atom_index],
        snapshot_times=np.array(st),
        left_fraction=np.array(lefts),
        right_fraction=np.array(rights),
        retardation=retardation_times(out.band, out.atoms, atom_index),
    )
