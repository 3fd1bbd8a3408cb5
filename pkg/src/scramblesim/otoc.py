"""Out-of-time-ordered correlators for the kicked-Ising drive.

The correlator of a measurement operator O_a and a butterfly operator O_d
under m drive cycles U is <in| W O_a W O_a |in> with W = U^dag O_d U (all
operators here are Hermitian Pauli strings). Shot emulation computes the
exact interferometric-ancilla outcome probabilities and then samples them,
which is statistically identical to simulating the ancilla circuit shot by
shot; the literal ancilla construction is also provided so the two routes
can be checked against each other.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import floquet, statevector as sv
from .floquet import FloquetSpec
from .statevector import PauliString, QuantumState

NORM_THRESHOLD = 1e-6


@dataclass
class OtocPoint:
    butterfly_site: int
    cycles: int
    value: complex
    stderr: float | None = None
    valid: bool = True

    @property
    def real(self) -> float:
        return float(np.real(self.value))


def site_pauli(letter: str, site: int) -> PauliString:
    """Single-site Pauli on a 1-based chain site."""
    return PauliString({site - 1: letter})


def _butterfly_state(
    spec: FloquetSpec,
    cycles: int,
    butterfly: PauliString,
    start: QuantumState,
) -> QuantumState:
    """W|start> with W = U^dag O_d U."""
    state = start.copy()
    floquet.evolve(state, spec, cycles)
    sv.apply_pauli(state, butterfly)
    floquet.evolve(state, spec, cycles, inverse=True)
    return state


def otoc_exact(
    spec: FloquetSpec,
    cycles: int,
    measure: PauliString,
    butterfly: PauliString,
    input_state: QuantumState,
) -> complex:
    """Exact correlator value from two statevector passes."""
    if input_state.n_qubits != spec.n_sites:
        raise ValueError("input state size does not match the drive")
    u = _butterfly_state(spec, cycles, butterfly, input_state)
    v = input_state.copy()
    sv.apply_pauli(v, measure)
    v = _butterfly_state(spec, cycles, butterfly, v)
    sv.apply_pauli(u, measure)
    return sv.inner(u, v)


def otoc_shots(
    spec: FloquetSpec,
    cycles: int,
    measure: PauliString,
    butterfly: PauliString,
    input_state: QuantumState,
    shots: int,
    rng: np.random.Generator,
    butterfly_site: int = 0,
) -> OtocPoint:
    """Finite-shot estimate of the correlator.

    The ancilla X (and, when the exact value is complex, Y) outcome
    probabilities are computed exactly and sampled as +/-1 binomials with
    the given shot count each.
    """
    exact = otoc_exact(spec, cycles, measure, butterfly, input_state)
    re, se_re = sv.sample_binary_mean((1.0 + exact.real) / 2.0, shots, rng)
    if abs(exact.imag) > 1e-12:
        im, se_im = sv.sample_binary_mean((1.0 + exact.imag) / 2.0, shots, rng)
        return OtocPoint(
            butterfly_site,
            cycles,
            complex(re, im),
            float(np.hypot(se_re, se_im)),
        )
    return OtocPoint(butterfly_site, cycles, re, se_re)


def operator_averaged(
    spec: FloquetSpec,
    cycles: int,
    site_a: int,
    site_d: int,
    input_mode: str = "zero",
) -> float:
    """Correlator averaged over all 16 single-site Pauli pairs.

    input_mode 'zero' evaluates on the all-zeros state; 'mixed' emulates
    the maximally mixed input by uniform averaging over every computational
    basis state (dense capacity only: n_sites <= 12).
    """
    for site in (site_a, site_d):
        if not 1 <= site <= spec.n_sites:
            raise ValueError(f"site {site} outside [1, {spec.n_sites}]")
    if input_mode == "zero":
        inputs = [sv.zero_state(spec.n_sites)]
    elif input_mode == "mixed":
        if spec.n_sites > 12:
            raise sv.CapacityError("basis-state averaging is limited to 12 sites")
        inputs = [sv.basis_state(spec.n_sites, k) for k in range(1 << spec.n_sites)]
    else:
        raise ValueError("input_mode must be 'zero' or 'mixed'")
    letters = "IXYZ"
    total = 0.0
    for start in inputs:
        for la in letters:
            for ld in letters:
                val = otoc_exact(
                    spec,
                    cycles,
                    site_pauli(la, site_a),
                    site_pauli(ld, site_d),
                    start,
                )
                total += val.real
    return total / (16.0 * len(inputs))


def normalized(raw: OtocPoint, norm: OtocPoint) -> OtocPoint:
    """Divide a raw point by its butterfly-removed normalization run.

    Near-zero denominators are flagged unnormalizable instead of amplified:
    normalization trades bias for variance, and a vanishing reference has
    no information left to trade.
    """
    norm_mag = abs(norm.value)
    if norm_mag < NORM_THRESHOLD:
        return replace(raw, valid=False)
    value = raw.value / norm.value
    stderr = None
    if raw.stderr is not None or norm.stderr is not None:
        se_raw = raw.stderr or 0.0
        se_norm = norm.stderr or 0.0
        stderr = float(
            np.hypot(se_raw / norm_mag, abs(raw.value) * se_norm / norm_mag**2)
        )
    return OtocPoint(raw.butterfly_site, raw.cycles, value, stderr)


def interferometric_expectation(
    spec: FloquetSpec,
    cycles: int,
    measure: PauliString,
    butterfly: PauliString,
    input_state: QuantumState,
    include_initial_control: bool = True,
) -> complex:
    """Literal ancilla-circuit evaluation of the correlator.

    Builds the one-ancilla interferometer (ancilla in |+>, controlled
    measure operator, forward drive, butterfly, inverse drive, controlled
    measure operator) and returns <X> + i <Y> on the ancilla. This is the
    construction-level cross-check for otoc_exact; when the measure
    operator stabilizes the input state the initial controlled block is
    redundant and can be dropped.
    """
    n = spec.n_sites
    ancilla = n
    # ancilla is the top (most significant) qubit: |+> x |input>
    amps = np.concatenate([input_state.amplitudes, input_state.amplitudes])
    state = QuantumState(n + 1, amps * sv._INV_SQRT2)
    if include_initial_control:
        sv.apply_gate(state, sv.controlled_pauli(ancilla, measure))
    floquet.evolve(state, spec, cycles)
    sv.apply_pauli(state, butterfly)
    floquet.evolve(state, spec, cycles, inverse=True)
    sv.apply_gate(state, sv.controlled_pauli(ancilla, measure))
    x_val = sv.pauli_expectation(state, PauliString({ancilla: "X"}))
    y_val = sv.pauli_expectation(state, PauliString({ancilla: "Y"}))
    return complex(x_val, y_val)


def interferometric_two_qubit_count(
    spec: FloquetSpec,
    cycles: int,
    site_d: int,
    site_a: int = 1,
    include_initial_control: bool = False,
) -> int:
    """Two-qubit gates of the compiled interferometer connected to the readout.

    Two prunings model what light-cone compilation removes. First, bond
    gates of the forward block cancel against their partners in the inverse
    block unless they sit inside the causal cone of the butterfly site.
    Second, a surviving gate only counts if a backward walk from the
    measured ancilla (which meets the chain at the measurement site through
    the final controlled block) reaches it. Each controlled measure block
    adds one entangling gate; the initial one is omitted by default,
    matching circuits where the measure operator stabilizes the input.
    """
    if not 1 <= site_d <= spec.n_sites:
        raise ValueError(f"site {site_d} outside [1, {spec.n_sites}]")
    bonds = spec.bonds()
    forward = [b for _ in range(cycles) for b in bonds]
    cone = {site_d}
    keep = [False] * len(forward)
    for k in range(len(forward) - 1, -1, -1):
        a, b = forward[k]
        if a in cone or b in cone:
            keep[k] = True
            cone.update((a, b))
    survivors = [forward[k] for k in range(len(forward)) if keep[k]]
    count = 2 if include_initial_control else 1
    reached = {site_a}
    # inverse block walked backward is the surviving list in forward order
    for a, b in survivors:
        if a in reached or b in reached:
            count += 1
            reached.update((a, b))
    for a, b in reversed(survivors):
        if a in reached or b in reached:
            count += 1
            reached.update((a, b))
    return count
