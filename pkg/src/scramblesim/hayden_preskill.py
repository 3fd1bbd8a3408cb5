"""Two-copy recovery circuit: post-selection probability and recovery fidelity.

The register holds a reference R, two N-site chain copies, and a mirror
reference R', in that order. Bell pairs wire R to the first n_a chain sites
(the input window A), every bath site B to its primed partner B', and R' to
A'. The forward drive acts on copy 1, its complex conjugate on copy 2;
projecting the last n_d sites of both copies (the decoding window D, D')
onto Bell pairs yields the post-selection probability, and the surviving
state's overlap with Bell pairs on R, R' is the recovery fidelity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import floquet, statevector as sv
from .floquet import FloquetSpec
from .statevector import QuantumState


@dataclass(frozen=True)
class HprLayout:
    """Register partition: n_a input sites, n_d decoded sites on an N-site chain."""

    n_sites: int
    n_a: int
    n_d: int

    def __post_init__(self):
        if not 1 <= self.n_a < self.n_sites:
            raise ValueError("need 1 <= n_a < n_sites")
        if not 1 <= self.n_d <= self.n_sites:
            raise ValueError("need 1 <= n_d <= n_sites")

    @property
    def n_b(self) -> int:
        return self.n_sites - self.n_a

    @property
    def d_a(self) -> int:
        return 1 << self.n_a

    @property
    def d_d(self) -> int:
        return 1 << self.n_d

    @property
    def n_qubits(self) -> int:
        return 2 * (self.n_sites + self.n_a)

    # Qubit index map: R = [0, n_a), copy 1 = [n_a, n_a + N),
    # copy 2 = [n_a + N, n_a + 2N), R' = [n_a + 2N, 2n_a + 2N).
    @property
    def copy1_offset(self) -> int:
        return self.n_a

    @property
    def copy2_offset(self) -> int:
        return self.n_a + self.n_sites

    def reference_pairs(self) -> list[tuple[int, int]]:
        return [(k, self.n_a + k) for k in range(self.n_a)]

    def bath_pairs(self) -> list[tuple[int, int]]:
        return [
            (self.n_a + i - 1, self.n_a + self.n_sites + i - 1)
            for i in range(self.n_a + 1, self.n_sites + 1)
        ]

    def mirror_pairs(self) -> list[tuple[int, int]]:
        base = self.n_a + 2 * self.n_sites
        return [(base + k, self.n_a + self.n_sites + k) for k in range(self.n_a)]

    def decode_pairs(self) -> list[tuple[int, int]]:
        d1 = self.n_a + self.n_sites - self.n_d
        d2 = self.n_a + 2 * self.n_sites - self.n_d
        return [(d1 + j, d2 + j) for j in range(self.n_d)]

    def recovery_pairs(self) -> list[tuple[int, int]]:
        base = self.n_a + 2 * self.n_sites
        return [(k, base + k) for k in range(self.n_a)]


@dataclass
class HprResult:
    p_epr: float
    f_epr: float | None
    degenerate: bool = False
    shots: int | None = None
    p_stderr: float | None = None
    f_stderr: float | None = None

    @property
    def f_available(self) -> bool:
        return self.f_epr is not None


def haar_baseline(d_a: int, d_d: int) -> tuple[float, float]:
    """Closed-form (P, F) when the drive is replaced by a Haar-random unitary."""
    for d in (d_a, d_d):
        if d < 2 or d & (d - 1):
            raise ValueError("dimensions must be powers of two >= 2")
    p = d_a**-2 + d_d**-2 - (d_a * d_d) ** -2
    return p, 1.0 / (d_a**2 * p)


def _build_state(
    spec: FloquetSpec, layout: HprLayout, cycles: int, conjugate_second_copy: bool
) -> QuantumState:
    if spec.n_sites != layout.n_sites:
        raise ValueError("drive and layout disagree on the chain length")
    state = sv.zero_state(layout.n_qubits)
    sv.prepare_bell_pairs(
        state,
        layout.reference_pairs() + layout.bath_pairs() + layout.mirror_pairs(),
    )
    floquet.evolve(state, spec, cycles, offset=layout.copy1_offset)
    floquet.evolve(
        state,
        spec,
        cycles,
        conjugated=conjugate_second_copy,
        offset=layout.copy2_offset,
    )
    return state


def run_exact(
    spec: FloquetSpec,
    layout: HprLayout,
    cycles: int,
    conjugate_second_copy: bool = True,
) -> HprResult:
    """Exact P and F from one statevector build.

    conjugate_second_copy exists as a consistency-check hook: disabling it
    applies the forward drive to both copies, which breaks the recovery
    identity and is useful only to demonstrate that it does.
    """
    state = _build_state(spec, layout, cycles, conjugate_second_copy)
    p, degenerate = sv.project_bell_pairs(state, layout.decode_pairs())
    if degenerate:
        return HprResult(p_epr=p, f_epr=None, degenerate=True)
    f, _ = sv.project_bell_pairs(state, layout.recovery_pairs())
    return HprResult(p_epr=p, f_epr=f)


def run_sampled(
    spec: FloquetSpec,
    layout: HprLayout,
    cycles: int,
    shots: int,
    rng: np.random.Generator,
) -> HprResult:
    """Finite-shot emulation of the measurement statistics.

    Draws Bernoulli outcomes for the decode projection at the exact
    probability P, and conditionally for the recovery projection at the
    exact F; reports empirical rates with binomial standard errors. If no
    shot survives post-selection, the fidelity estimate is unavailable.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    exact = run_exact(spec, layout, cycles)
    if exact.degenerate:
        return HprResult(
            p_epr=0.0, f_epr=None, degenerate=True, shots=shots, p_stderr=0.0
        )
    k_d = int(rng.binomial(shots, exact.p_epr))
    p_hat = k_d / shots
    p_se = float(np.sqrt(p_hat * (1.0 - p_hat) / shots))
    if k_d == 0:
        return HprResult(p_epr=p_hat, f_epr=None, shots=shots, p_stderr=p_se)
    k_r = int(rng.binomial(k_d, exact.f_epr))
    f_hat = k_r / k_d
    f_se = float(np.sqrt(f_hat * (1.0 - f_hat) / k_d))
    return HprResult(
        p_epr=p_hat, f_epr=f_hat, shots=shots, p_stderr=p_se, f_stderr=f_se
    )
