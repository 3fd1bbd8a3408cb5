"""Ensemble statistics of Loschmidt amplitudes and Haar baselines.

The diagnostic: a state family whose Loschmidt-amplitude variance matches
the Haar prediction (1 - SFF(t))/(d + 1) behaves as a 2-design for this
observable. Three families are supported: snapshots of one product state
along consecutive drive cycles, independently re-randomized product states
at a fixed cycle count, and Haar states. Exact Heisenberg evolution runs
through the cached dense eigensystem; a Trotterized evolver mirrors the
measured pipeline when requested, and every stats record names which one
produced it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import floquet as fl, statevector as sv, thermal
from .floquet import FloquetSpec
from .thermal import FilterSpec, HeisenbergSpec

KINDS = ("floquet_cycles", "floquet_fixed_m", "haar")


@dataclass(frozen=True)
class EnsembleSpec:
    """Which state family to draw, how many members, and the seed."""

    kind: str
    count: int = 1
    m: int = 0
    m_min: int = 0
    m_max: int = 0
    drive: FloquetSpec | None = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.kind == "floquet_cycles":
            if self.m_max <= self.m_min or self.m_min < 0:
                raise ValueError("need 0 <= m_min < m_max")
            if self.drive is None:
                raise ValueError("cycle ensembles need a drive spec")
        elif self.count < 1:
            raise ValueError("need count >= 1")
        if self.kind == "floquet_fixed_m" and self.drive is None:
            raise ValueError("fixed-m ensembles need a drive spec")

    @property
    def n_members(self) -> int:
        if self.kind == "floquet_cycles":
            return self.m_max - self.m_min
        return self.count


@dataclass
class SeriesStats:
    """Per-time mean and scatter of the amplitude over ensemble members."""

    times: np.ndarray
    mean: np.ndarray
    var_re: np.ndarray
    var_im: np.ndarray
    var_total: np.ndarray
    stderr_re: np.ndarray
    stderr_im: np.ndarray
    count: int
    evolver: str


def sff(spec: HeisenbergSpec, t) -> np.ndarray | float:
    """Spectral form factor |Tr U(t)|^2 / d^2 from the dense spectrum."""
    evals, _ = thermal.xxx_eigensystem(spec)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    trace = np.exp(-1j * np.outer(t_arr, evals)).sum(axis=1)
    out = np.abs(trace) ** 2 / float(evals.size) ** 2
    return float(out[0]) if np.isscalar(t) else out


def haar_variance(sff_value, d: int):
    """Amplitude variance over Haar states: (1 - SFF)/(d + 1)."""
    arr = np.asarray(sff_value, dtype=float)
    if np.any(arr < -1e-12) or np.any(arr > 1.0 + 1e-12):
        raise ValueError("spectral form factor outside [0, 1]")
    out = (1.0 - np.clip(arr, 0.0, 1.0)) / (d + 1)
    return float(out) if np.isscalar(sff_value) else out


def combined_stddev(sff_value, d: int, shots: int, r_states: int):
    """Standard error of the mean amplitude over r_states with finite shots.

    State-sampling and shot-sampling contributions add in quadrature; for
    d >> shots the shot term sqrt((2 - SFF)/(R * shots)) dominates.
    """
    if shots < 1 or r_states < 1 or d < 2:
        raise ValueError("need shots >= 1, r_states >= 1, d >= 2")
    arr = np.asarray(sff_value, dtype=float)
    state_term = (1.0 - arr) / (r_states * (d + 1))
    shot_term = (2.0 - 1.0 / (d + 1) - d * arr / (d + 1)) / (r_states * shots)
    out = np.sqrt(state_term + shot_term)
    return float(out) if np.isscalar(sff_value) else out


def _draw_members(ensemble: EnsembleSpec, n_sites: int) -> list[sv.QuantumState]:
    rng = np.random.default_rng(ensemble.seed)
    if ensemble.kind == "haar":
        return [sv.haar_state(n_sites, rng) for _ in range(ensemble.count)]
    drive = ensemble.drive
    if drive.n_sites != n_sites:
        raise ValueError("drive and probe chain lengths differ")
    if ensemble.kind == "floquet_fixed_m":
        members = []
        for _ in range(ensemble.count):
            psi = thermal.random_product_state(n_sites, rng)
            fl.evolve(psi, drive, ensemble.m)
            members.append(psi)
        return members
    # floquet_cycles: snapshots of one trajectory
    psi = thermal.random_product_state(n_sites, rng)
    fl.evolve(psi, drive, ensemble.m_min)
    members = [psi.copy()]
    for _ in range(ensemble.m_min + 1, ensemble.m_max):
        fl.evolve(psi, drive, 1)
        members.append(psi.copy())
    return members


def ensemble_series_stats(
    ensemble: EnsembleSpec,
    heisenberg: HeisenbergSpec,
    filt: FilterSpec,
    evolver: str = "exact",
) -> SeriesStats:
    """Loschmidt amplitude of every member on the filter time grid, aggregated.

    evolver 'exact' projects members onto the dense eigenbasis and sums
    exponentials; 'trotter' applies the single-step even/odd product per
    time point. Aggregation order over members is fixed, so results are
    reproducible bit for bit.
    """
    times = filt.times()
    members = _draw_members(ensemble, heisenberg.n_sites)
    if evolver == "exact":
        evals, evecs = thermal.xxx_eigensystem(heisenberg, vectors=True)
        weights = np.empty((len(members), evals.size))
        for r, psi in enumerate(members):
            coeffs = evecs.T @ psi.amplitudes
            weights[r] = np.abs(coeffs) ** 2
        phases = np.exp(-1j * np.outer(evals, times))
        amplitudes = weights @ phases
    elif evolver == "trotter":
        amplitudes = np.empty((len(members), times.size), dtype=np.complex128)
        for r, psi in enumerate(members):
            for k, t in enumerate(times):
                evolved = psi.copy()
                thermal.trotter_xxx(evolved, heisenberg, float(t))
                amplitudes[r, k] = sv.inner(psi, evolved)
    else:
        raise ValueError("evolver must be 'exact' or 'trotter'")
    count = len(members)
    mean = amplitudes.mean(axis=0)
    var_re = amplitudes.real.var(axis=0)
    var_im = amplitudes.imag.var(axis=0)
    return SeriesStats(
        times=times,
        mean=mean,
        var_re=var_re,
        var_im=var_im,
        var_total=var_re + var_im,
        stderr_re=np.sqrt(var_re / count),
        stderr_im=np.sqrt(var_im / count),
        count=count,
        evolver=evolver,
    )
