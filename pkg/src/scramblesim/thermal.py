"""Microcanonical expectation values from a single scrambled pure state.

Pipeline: prepare a random product state, scramble it with the kicked-Ising
drive, measure Loschmidt amplitudes of the isotropic Heisenberg ring on a
symmetric time grid (one first-order even/odd Trotter product per time
point), symmetrize, and Gaussian-filter-transform the series into a density
of states D(E) and an operator-weighted D_O(E). The ratio D_O/D estimates
the microcanonical expectation value at energy E.

Each Heisenberg bond term couples neighboring sites i, i+1 on a periodic
ring as (J/2)(XX + YY + ZZ + II); the bracket equals 2 * SWAP, so bond
gates and the dense Hamiltonian are built from J * SWAP operators. The II
piece is kept: it shifts the spectrum so the infinite-temperature energy
sits at N*J/2.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from . import statevector as sv
from .statevector import CapacityError, PauliString, QuantumState

DENSE_MAX_SITES = 12

_SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)
_EYE4 = np.eye(4, dtype=complex)


@dataclass(frozen=True)
class HeisenbergSpec:
    """Isotropic spin-1/2 Heisenberg ring; site count must be even."""

    n_sites: int
    coupling: float = 1.0

    def __post_init__(self):
        if self.n_sites < 2 or self.n_sites % 2:
            raise ValueError("need an even number of sites >= 2")

    def bonds_odd(self) -> list[tuple[int, int]]:
        n = self.n_sites
        return [(i, i % n + 1) for i in range(1, n + 1, 2)]

    def bonds_even(self) -> list[tuple[int, int]]:
        n = self.n_sites
        if n == 2:
            return []  # the single ring bond already sits in the odd layer
        return [(i, i % n + 1) for i in range(2, n + 1, 2)]


@dataclass(frozen=True)
class FilterSpec:
    """Gaussian filter width, target energies, and time-grid truncation."""

    sigma: float
    e_grid: tuple[float, ...]
    trunc_s: int = 40
    dt: float = 0.05

    def __post_init__(self):
        if self.sigma <= 0 or self.dt <= 0 or self.trunc_s < 1:
            raise ValueError("need sigma > 0, dt > 0, trunc_s >= 1")
        if len(self.e_grid) == 0:
            raise ValueError("empty energy grid")

    @classmethod
    def defaults(
        cls,
        spec: HeisenbergSpec,
        e_grid: Sequence[float] | None = None,
        trunc_s: int = 40,
    ) -> "FilterSpec":
        """Width from the infinite-temperature energy variance, dt = 0.05/J."""
        e_inf, var_h = xxx_moments(spec)
        sigma_h = np.sqrt(var_h)
        if e_grid is None:
            e_grid = np.linspace(e_inf - 2.5 * sigma_h, e_inf + 2.5 * sigma_h, 101)
        return cls(
            sigma=float(sigma_h / np.sqrt(2.0 * np.pi)),
            e_grid=tuple(float(e) for e in e_grid),
            trunc_s=trunc_s,
            dt=0.05 / spec.coupling,
        )

    def times(self) -> np.ndarray:
        return np.arange(-self.trunc_s, self.trunc_s + 1) * self.dt


@dataclass
class LoschmidtSeries:
    """Complex amplitudes on the symmetric time grid, plus shot errors."""

    times: np.ndarray
    values: np.ndarray
    values_op: np.ndarray | None = None
    stderr_re: np.ndarray | None = None
    stderr_im: np.ndarray | None = None
    stderr_op_re: np.ndarray | None = None
    stderr_op_im: np.ndarray | None = None
    sigma: float = 0.0
    dt: float = 0.0
    trunc_s: int = 0
    symmetrized: bool = False


@dataclass
class DosCurve:
    """Filtered density of states and the operator estimator over e_grid."""

    energies: np.ndarray
    d_values: np.ndarray
    d_op_values: np.ndarray | None
    estimator: np.ndarray | None
    valid: np.ndarray
    imag_residue: float = 0.0
    imag_residue_op: float = 0.0


def random_product_state(
    n: int,
    rng: np.random.Generator | None = None,
    angles: Sequence[float] | None = None,
) -> QuantumState:
    """Product of per-qubit Y rotations on |0...0>, angles uniform on [0, 4*pi).

    Passing angles explicitly pins the rotations (all zeros gives |0...0>,
    all pi gives |1...1>).
    """
    if angles is None:
        if rng is None:
            raise ValueError("need an rng when angles are not given")
        angles = rng.uniform(0.0, 4.0 * np.pi, size=n)
    elif len(angles) != n:
        raise ValueError("need one angle per qubit")
    state = sv.zero_state(n)
    for q, phi in enumerate(angles):
        sv.apply_gate(state, sv.ry(float(phi), q))
    return state


def _bond_gate(coupling: float, t: float) -> np.ndarray:
    # exp(-i * J * t * SWAP); SWAP is an involution
    theta = coupling * t
    return np.cos(theta) * _EYE4 - 1j * np.sin(theta) * _SWAP


def trotter_xxx(state: QuantumState, spec: HeisenbergSpec, t: float) -> None:
    """One first-order product step: odd-bond layer, then even-bond layer."""
    if state.n_qubits < spec.n_sites:
        raise ValueError("state too small for the chain")
    gate = _bond_gate(spec.coupling, t)
    for a, b in spec.bonds_odd():
        sv.apply_two_qubit(state, gate, a - 1, b - 1)
    for a, b in spec.bonds_even():
        sv.apply_two_qubit(state, gate, a - 1, b - 1)


def loschmidt_series(
    psi_m: QuantumState,
    spec: HeisenbergSpec,
    filt: FilterSpec,
    observable: PauliString | None = None,
    shots: int | None = None,
    rng: np.random.Generator | None = None,
) -> LoschmidtSeries:
    """Amplitudes <psi|U_trotter(s*dt)|psi> (and with the observable inserted).

    In shot mode the real and imaginary parts at every grid point, positive
    and negative times alike, are sampled independently as +/-1 binomials;
    symmetrization is a separate, later step, mirroring how measured data
    is processed.
    """
    if shots is not None and rng is None:
        raise ValueError("shot sampling needs an rng")
    times = filt.times()
    n_t = times.size
    values = np.empty(n_t, dtype=np.complex128)
    values_op = np.empty(n_t, dtype=np.complex128) if observable is not None else None
    op_bra = None
    if observable is not None:
        op_bra = psi_m.copy()
        sv.apply_pauli(op_bra, observable)
    for k, t in enumerate(times):
        evolved = psi_m.copy()
        trotter_xxx(evolved, spec, float(t))
        values[k] = sv.inner(psi_m, evolved)
        if op_bra is not None:
            values_op[k] = sv.inner(op_bra, evolved)
    series = LoschmidtSeries(
        times=times,
        values=values,
        values_op=values_op,
        sigma=filt.sigma,
        dt=filt.dt,
        trunc_s=filt.trunc_s,
    )
    if shots is None:
        return series
    series.values, series.stderr_re, series.stderr_im = _sample_series(values, shots, rng)
    if values_op is not None:
        series.values_op, series.stderr_op_re, series.stderr_op_im = _sample_series(
            values_op, shots, rng
        )
    return series


def _sample_series(values, shots, rng):
    n_t = values.size
    sampled = np.empty(n_t, dtype=np.complex128)
    se_re = np.empty(n_t)
    se_im = np.empty(n_t)
    for k in range(n_t):
        re, s_re = sv.sample_binary_mean((1.0 + values[k].real) / 2.0, shots, rng)
        im, s_im = sv.sample_binary_mean((1.0 + values[k].imag) / 2.0, shots, rng)
        sampled[k] = complex(re, im)
        se_re[k] = s_re
        se_im[k] = s_im
    return sampled, se_re, se_im


def symmetrize(series: LoschmidtSeries) -> LoschmidtSeries:
    """Make Re even and Im odd in t by averaging the two time signs."""
    times = series.times
    if not np.array_equal(times, -times[::-1]):
        raise ValueError("time grid is not symmetric about zero")

    def _sym(vals):
        re = 0.5 * (vals.real + vals.real[::-1])
        im = 0.5 * (vals.imag - vals.imag[::-1])
        return re + 1j * im

    def _sym_se(se):
        if se is None:
            return None
        return 0.5 * np.sqrt(se**2 + se[::-1] ** 2)

    out = replace(
        series,
        values=_sym(series.values),
        stderr_re=_sym_se(series.stderr_re),
        stderr_im=_sym_se(series.stderr_im),
        symmetrized=True,
    )
    if series.values_op is not None:
        out.values_op = _sym(series.values_op)
        out.stderr_op_re = _sym_se(series.stderr_op_re)
        out.stderr_op_im = _sym_se(series.stderr_op_im)
    return out


def dos_transform(
    series: LoschmidtSeries, filt: FilterSpec, validity_threshold: float = 1e-3
) -> DosCurve:
    """Gaussian-windowed Fourier sum of the series over the energy grid.

    D(E) = (sigma/sqrt(2 pi)) * sum_s dt * exp(-sigma^2 t_s^2 / 2)
           * exp(i E t_s) * L(t_s), and likewise for the operator series.
    The estimator D_O/D is flagged invalid wherever D(E) falls below
    validity_threshold times its grid maximum.
    """
    times = series.times
    if not np.array_equal(times, filt.times()):
        raise ValueError("series time grid does not match the filter grid")
    energies = np.asarray(filt.e_grid, dtype=float)
    weights = (
        filt.sigma / np.sqrt(2.0 * np.pi)
        * filt.dt
        * np.exp(-0.5 * (filt.sigma * times) ** 2)
    )
    phases = np.exp(1j * np.outer(energies, times))
    d_complex = phases @ (weights * series.values)
    d_values = d_complex.real
    residue = float(np.max(np.abs(d_complex.imag)))
    d_op_values = None
    estimator = None
    residue_op = 0.0
    d_max = float(np.max(d_values))
    valid = d_values >= validity_threshold * max(d_max, 0.0)
    if d_max <= 0.0:
        valid = np.zeros_like(d_values, dtype=bool)
    if series.values_op is not None:
        d_op_complex = phases @ (weights * series.values_op)
        d_op_values = d_op_complex.real
        residue_op = float(np.max(np.abs(d_op_complex.imag)))
        estimator = np.full_like(d_values, np.nan)
        np.divide(d_op_values, d_values, out=estimator, where=valid)
    return DosCurve(
        energies=energies,
        d_values=d_values,
        d_op_values=d_op_values,
        estimator=estimator,
        valid=valid,
        imag_residue=residue,
        imag_residue_op=residue_op,
    )


def xxx_moments(spec: HeisenbergSpec) -> tuple[float, float]:
    """(E_inf, var): mean and variance of the energy in the maximally mixed state.

    Each bond SWAP has normalized trace 1/2 and distinct bonds are
    uncorrelated at infinite temperature, so with the ring's b distinct
    bonds E_inf = b*J/2 and var = (3/4)*b*J^2; b = N except on the
    two-site ring, whose single bond gives (J/2, (3/4)*J^2).
    """
    bonds = len(spec.bonds_odd()) + len(spec.bonds_even())
    j = spec.coupling
    return 0.5 * bonds * j, 0.75 * bonds * j * j


def xxx_hamiltonian(spec: HeisenbergSpec) -> np.ndarray:
    """Dense Hamiltonian (real symmetric), built as J * sum of bond SWAPs."""
    if spec.n_sites > DENSE_MAX_SITES:
        raise CapacityError(
            f"dense Heisenberg operators are limited to {DENSE_MAX_SITES} sites"
        )
    n = spec.n_sites
    dim = 1 << n
    ham = np.zeros((dim, dim))
    idx = np.arange(dim)
    for a, b in spec.bonds_odd() + spec.bonds_even():
        qa, qb = a - 1, b - 1
        differs = ((idx >> qa) ^ (idx >> qb)) & 1
        swapped = idx ^ (differs << qa) ^ (differs << qb)
        np.add.at(ham, (swapped, idx), spec.coupling)
    return ham


_EIG_CACHE: dict[tuple[int, float, bool], tuple[np.ndarray, np.ndarray | None]] = {}


def xxx_eigensystem(
    spec: HeisenbergSpec, vectors: bool = False
) -> tuple[np.ndarray, np.ndarray | None]:
    """Cached (eigenvalues, eigenvectors or None) of the dense Hamiltonian."""
    key = (spec.n_sites, spec.coupling, vectors)
    full_key = (spec.n_sites, spec.coupling, True)
    if full_key in _EIG_CACHE:
        evals, evecs = _EIG_CACHE[full_key]
        return evals, (evecs if vectors else None)
    if key in _EIG_CACHE:
        return _EIG_CACHE[key]
    ham = xxx_hamiltonian(spec)
    if vectors:
        evals, evecs = np.linalg.eigh(ham)
        _EIG_CACHE[full_key] = (evals, evecs)
        return evals, evecs
    evals = np.linalg.eigvalsh(ham)
    _EIG_CACHE[key] = (evals, None)
    return evals, None


def filter_entropy_purity(
    spec: HeisenbergSpec, sigma: float, e: float
) -> tuple[float, float]:
    """Entropy log Tr[G] and purity Tr[G^2]/Tr[G]^2 of the Gaussian filter.

    Dense diagonalization only; the purity equals exp(S at sigma/sqrt(2)
    minus twice S at sigma), which doubles as a numerical cross-check.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    evals, _ = xxx_eigensystem(spec)
    shifted = (e - evals) ** 2
    entropy = float(logsumexp(-shifted / (2.0 * sigma**2)))
    entropy_narrow = float(logsumexp(-shifted / sigma**2))
    purity = float(np.exp(entropy_narrow - 2.0 * entropy))
    return entropy, purity
