"""Dense statevector engine.

States are complex128 vectors of length 2**n with little-endian qubit
indexing: qubit 0 is the least significant bit of the amplitude index.
Gates mutate states in place and preserve the norm; projective operations
return an explicit probability and renormalize.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels

MAX_QUBITS = 26
PROJECTION_EPS = 1e-14

_INV_SQRT2 = 1.0 / np.sqrt(2.0)

_FIXED_1Q = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "h": np.array([[_INV_SQRT2, _INV_SQRT2], [_INV_SQRT2, -_INV_SQRT2]], dtype=complex),
}

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": _FIXED_1Q["x"],
    "Y": _FIXED_1Q["y"],
    "Z": _FIXED_1Q["z"],
}


class CapacityError(Exception):
    """Requested register exceeds what dense simulation supports here."""


class PauliString:
    """Tensor product of single-qubit Paulis; identity on unlisted qubits."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[int, str] | Iterable[tuple[int, str]] = ()):
        if isinstance(terms, Mapping):
            items = terms.items()
        else:
            items = list(terms)
        seen: dict[int, str] = {}
        for qubit, letter in items:
            qubit = int(qubit)
            if letter not in "IXYZ":
                raise ValueError(f"unknown Pauli letter {letter!r}")
            if qubit < 0:
                raise ValueError(f"negative qubit index {qubit}")
            if qubit in seen:
                raise ValueError(f"duplicate qubit {qubit} in Pauli string")
            if letter != "I":
                seen[qubit] = letter
        self.terms: tuple[tuple[int, str], ...] = tuple(sorted(seen.items()))

    @classmethod
    def from_sites(cls, letters_at_sites: Mapping[int, str]) -> "PauliString":
        """Build from 1-based chain sites (site i acts on qubit i-1)."""
        return cls({site - 1: letter for site, letter in letters_at_sites.items()})

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.terms)

    def shifted(self, offset: int) -> "PauliString":
        return PauliString((q + offset, l) for q, l in self.terms)

    def is_identity(self) -> bool:
        return not self.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "PauliString(I)"
        return "PauliString(" + " ".join(f"{l}{q}" for q, l in self.terms) + ")"

    def __eq__(self, other) -> bool:
        return isinstance(other, PauliString) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)


@dataclass(frozen=True)
class Gate:
    """One gate descriptor: rx/ry/rz/h/x/y/z, zz, or a controlled Pauli."""

    kind: str
    qubits: tuple[int, ...]
    angle: float = 0.0
    pauli: PauliString | None = None

    def shifted(self, offset: int) -> "Gate":
        pauli = self.pauli.shifted(offset) if self.pauli is not None else None
        return Gate(self.kind, tuple(q + offset for q in self.qubits), self.angle, pauli)


def rx(angle: float, q: int) -> Gate:
    return Gate("rx", (q,), angle)


def ry(angle: float, q: int) -> Gate:
    return Gate("ry", (q,), angle)


def rz(angle: float, q: int) -> Gate:
    return Gate("rz", (q,), angle)


def zz(angle: float, q1: int, q2: int) -> Gate:
    return Gate("zz", (q1, q2), angle)


def h(q: int) -> Gate:
    return Gate("h", (q,))


def x(q: int) -> Gate:
    return Gate("x", (q,))


def y(q: int) -> Gate:
    return Gate("y", (q,))


def z(q: int) -> Gate:
    return Gate("z", (q,))


def controlled_pauli(control: int, pauli: PauliString) -> Gate:
    return Gate("cpauli", (control, *pauli.qubits), pauli=pauli)


class QuantumState:
    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits: int, amplitudes: np.ndarray):
        if amplitudes.shape != (1 << n_qubits,):
            raise ValueError(
                f"amplitude vector of length {amplitudes.shape} does not match "
                f"{n_qubits} qubits"
            )
        self.n_qubits = n_qubits
        self.amplitudes = np.ascontiguousarray(amplitudes, dtype=np.complex128)

    def copy(self) -> "QuantumState":
        return QuantumState(self.n_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def __repr__(self) -> str:
        return f"QuantumState(n_qubits={self.n_qubits})"


def _check_capacity(n: int) -> None:
    if not 1 <= n <= MAX_QUBITS:
        raise CapacityError(f"need 1 <= n_qubits <= {MAX_QUBITS}, got {n}")


def zero_state(n: int) -> QuantumState:
    """The all-zeros computational basis state on n qubits."""
    _check_capacity(n)
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    return QuantumState(n, amps)


def basis_state(n: int, index: int) -> QuantumState:
    _check_capacity(n)
    if not 0 <= index < (1 << n):
        raise ValueError(f"basis index {index} out of range for {n} qubits")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[index] = 1.0
    return QuantumState(n, amps)


def haar_state(n: int, rng: np.random.Generator) -> QuantumState:
    """Haar-random pure state: normalized vector of i.i.d. complex Gaussians."""
    _check_capacity(n)
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    amps /= np.linalg.norm(amps)
    return QuantumState(n, amps)


def _check_qubit(state: QuantumState, q: int) -> None:
    if not 0 <= q < state.n_qubits:
        raise ValueError(f"qubit {q} out of range for {state.n_qubits}-qubit state")


def _rotation_matrix(kind: str, angle: float) -> np.ndarray:
    c = np.cos(angle / 2.0)
    s = np.sin(angle / 2.0)
    if kind == "rx":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind == "ry":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "rz":
        return np.array([[np.exp(-0.5j * angle), 0], [0, np.exp(0.5j * angle)]], dtype=complex)
    raise ValueError(f"not a rotation kind: {kind}")


def apply_one_qubit(state: QuantumState, matrix: np.ndarray, q: int) -> None:
    """Apply an arbitrary 2x2 matrix to qubit q."""
    _check_qubit(state, q)
    m = np.asarray(matrix, dtype=np.complex128)
    _kernels.apply_1q(state.amplitudes, m[0, 0], m[0, 1], m[1, 0], m[1, 1], q)


def apply_two_qubit(state: QuantumState, matrix: np.ndarray, q1: int, q2: int) -> None:
    """Apply a 4x4 matrix; row index is (bit of q1 << 1) | bit of q2."""
    _check_qubit(state, q1)
    _check_qubit(state, q2)
    if q1 == q2:
        raise ValueError("two-qubit gate targets must be distinct")
    m = np.ascontiguousarray(matrix, dtype=np.complex128)
    _kernels.apply_2q(state.amplitudes, m, q1, q2)


def apply_gate(state: QuantumState, gate: Gate) -> None:
    """Apply one gate descriptor in place."""
    kind = gate.kind
    if kind in ("rx", "ry"):
        apply_one_qubit(state, _rotation_matrix(kind, gate.angle), gate.qubits[0])
    elif kind == "rz":
        q = gate.qubits[0]
        _check_qubit(state, q)
        half = np.exp(-0.5j * gate.angle)
        _kernels.apply_diag_1q(state.amplitudes, half, np.conj(half), q)
    elif kind in _FIXED_1Q:
        apply_one_qubit(state, _FIXED_1Q[kind], gate.qubits[0])
    elif kind == "zz":
        q1, q2 = gate.qubits
        _check_qubit(state, q1)
        _check_qubit(state, q2)
        if q1 == q2:
            raise ValueError("zz targets must be distinct")
        even = np.exp(-0.5j * gate.angle)
        _kernels.apply_zz_phase(state.amplitudes, even, np.conj(even), q1, q2)
    elif kind == "cpauli":
        _apply_controlled_pauli(state, gate.qubits[0], gate.pauli)
    else:
        raise ValueError(f"unknown gate kind {kind!r}")


def apply_pauli(state: QuantumState, pauli: PauliString) -> None:
    """Apply a Pauli string in place (single pass over the amplitudes)."""
    flip = 0
    sign = 0
    n_y = 0
    for q, letter in pauli.terms:
        _check_qubit(state, q)
        if letter in ("X", "Y"):
            flip |= 1 << q
        if letter in ("Z", "Y"):
            sign |= 1 << q
        if letter == "Y":
            n_y += 1
    phase = 1j ** (n_y % 4)
    _kernels.apply_pauli_string(state.amplitudes, flip, sign, complex(phase))


def _apply_controlled_pauli(state: QuantumState, control: int, pauli: PauliString) -> None:
    _check_qubit(state, control)
    if control in pauli.qubits:
        raise ValueError("control qubit overlaps the Pauli support")
    flip = 0
    sign = 0
    n_y = 0
    for q, letter in pauli.terms:
        _check_qubit(state, q)
        if letter in ("X", "Y"):
            flip |= 1 << q
        if letter in ("Z", "Y"):
            sign |= 1 << q
        if letter == "Y":
            n_y += 1
    # Restricting the single-pass Pauli kernel to the control = 1 subspace:
    # the control bit never flips and contributes no sign.
    phase = 1j ** (n_y % 4)
    hi = 1 << (state.n_qubits - 1 - control)
    lo = 1 << control
    view = state.amplitudes.reshape(hi, 2, lo)[:, 1, :]
    sub = np.ascontiguousarray(view).reshape(-1)
    flip_sub = _drop_bit(flip, control)
    sign_sub = _drop_bit(sign, control)
    _kernels.apply_pauli_string(sub, flip_sub, sign_sub, complex(phase))
    view[...] = sub.reshape(hi, lo)


def _drop_bit(mask: int, position: int) -> int:
    low = mask & ((1 << position) - 1)
    high = mask >> (position + 1)
    return (high << position) | low


def apply_gate_list(
    state: QuantumState,
    gates: Sequence[Gate],
    offset: int = 0,
    conjugate: bool = False,
    inverse: bool = False,
    control: int | None = None,
) -> None:
    """Replay a gate list, optionally conjugated, inverted, offset, or controlled.

    ``conjugate`` applies the elementwise complex conjugate of every gate,
    ``inverse`` the inverse circuit (reversed order, daggered gates), and
    ``control`` restricts the whole list to the control-qubit = 1 subspace.
    """
    if control is not None:
        _check_qubit(state, control)
        hi = 1 << (state.n_qubits - 1 - control)
        lo = 1 << control
        view = state.amplitudes.reshape(hi, 2, lo)[:, 1, :]
        sub = QuantumState(state.n_qubits - 1, np.ascontiguousarray(view).reshape(-1))
        remapped = []
        for gate in gates:
            shifted = gate.shifted(offset)
            if control in shifted.qubits:
                raise ValueError("controlled gate list touches its own control qubit")
            qubits = tuple(q if q < control else q - 1 for q in shifted.qubits)
            pauli = None
            if shifted.pauli is not None:
                pauli = PauliString(
                    (q if q < control else q - 1, l) for q, l in shifted.pauli.terms
                )
            remapped.append(Gate(shifted.kind, qubits, shifted.angle, pauli))
        apply_gate_list(sub, remapped, conjugate=conjugate, inverse=inverse)
        view[...] = sub.amplitudes.reshape(hi, lo)
        return

    ordered = reversed(gates) if inverse else gates
    for gate in ordered:
        gate = gate.shifted(offset)
        if inverse:
            gate = _daggered(gate)
        if conjugate:
            _apply_conjugated(state, gate)
        else:
            apply_gate(state, gate)


def _daggered(gate: Gate) -> Gate:
    if gate.kind in ("rx", "ry", "rz", "zz"):
        return Gate(gate.kind, gate.qubits, -gate.angle, gate.pauli)
    # h, x, y, z and controlled Paulis are involutions
    return gate


def _apply_conjugated(state: QuantumState, gate: Gate) -> None:
    kind = gate.kind
    if kind in ("rx", "rz", "zz"):
        apply_gate(state, Gate(kind, gate.qubits, -gate.angle))
    elif kind in ("ry", "h", "x", "z"):
        apply_gate(state, gate)  # real matrix
    elif kind == "y":
        apply_gate(state, gate)
        state.amplitudes *= -1.0
    elif kind == "cpauli":
        apply_gate(state, gate)
        n_y = sum(1 for _, l in gate.pauli.terms if l == "Y")
        if n_y % 2:
            # conj flips the sign of each Y; the phase lands on the
            # control = 1 branch only, i.e. a Z on the control.
            apply_gate(state, z(gate.qubits[0]))
    else:
        raise ValueError(f"unknown gate kind {kind!r}")


def inner(a: QuantumState, b: QuantumState) -> complex:
    """<a|b> with conjugation on a."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("inner product of states with different qubit counts")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def pauli_expectation(state: QuantumState, pauli: PauliString) -> float:
    """<state|P|state>; real for the Hermitian Pauli string P."""
    w = state.copy()
    apply_pauli(w, pauli)
    return float(np.vdot(state.amplitudes, w.amplitudes).real)


def _check_pairs(state: QuantumState, pairs: Sequence[tuple[int, int]]) -> list[tuple[int, int]]:
    used: set[int] = set()
    checked = []
    for a, b in pairs:
        _check_qubit(state, a)
        _check_qubit(state, b)
        if a == b or a in used or b in used:
            raise ValueError(f"overlapping qubits in Bell pairing near ({a}, {b})")
        used.add(a)
        used.add(b)
        checked.append((a, b))
    return checked


_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
# |EPR><EPR| on two qubits, basis order 00, 01, 10, 11
_EPR_PROJECTOR = 0.5 * np.array(
    [[1, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 1]], dtype=complex
)


def prepare_bell_pairs(state: QuantumState, pairs: Sequence[tuple[int, int]]) -> None:
    """Entangle each (a, b) pair into (|00> + |11>)/sqrt(2).

    Caller contract: the paired qubits are currently in |0>.
    """
    for a, b in _check_pairs(state, pairs):
        apply_gate(state, h(a))
        apply_two_qubit(state, _CNOT, a, b)


def project_bell_pairs(
    state: QuantumState, pairs: Sequence[tuple[int, int]]
) -> tuple[float, bool]:
    """Project every pair onto |EPR> and renormalize.

    Returns (probability, degenerate). When the probability falls below
    PROJECTION_EPS the state is left unnormalized and flagged degenerate
    instead of dividing by a near-zero norm.
    """
    for a, b in _check_pairs(state, pairs):
        apply_two_qubit(state, _EPR_PROJECTOR, a, b)
    prob = float(np.vdot(state.amplitudes, state.amplitudes).real)
    if prob < PROJECTION_EPS:
        return prob, True
    state.amplitudes /= np.sqrt(prob)
    return prob, False


def sample_binary_mean(
    p_plus: float, shots: int, rng: np.random.Generator
) -> tuple[float, float]:
    """Emulate shots of a +/-1 measurement with Pr[+1] = p_plus.

    Returns the sample mean and the standard error sqrt((1 - mean^2)/shots).
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if not -1e-12 <= p_plus <= 1.0 + 1e-12:
        raise ValueError(f"p_plus = {p_plus} outside [0, 1]")
    p = min(max(p_plus, 0.0), 1.0)
    k = int(rng.binomial(shots, p))
    mean = 2.0 * k / shots - 1.0
    stderr = np.sqrt(max(0.0, 1.0 - mean * mean) / shots)
    return mean, float(stderr)
