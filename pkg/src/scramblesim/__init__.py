"""Statevector simulation of kicked-Ising scrambling circuits.

Subsystems: a dense gate-kernel engine (statevector), the periodic drive and
its causal cones (floquet), two-copy recovery fidelities (hayden_preskill),
out-of-time-ordered correlators (otoc), the analytic depolarizing model and
its inversion (noise), microcanonical expectation values from scrambled pure
states (thermal), ensemble statistics against Haar baselines (ensembles),
and a CSV-producing experiment runner (cli).
"""

__version__ = "0.1.0"

from .floquet import FloquetSpec, evolve, floquet_cycle, lightcone_count, lightcone_sites
from .hayden_preskill import HprLayout, HprResult, haar_baseline, run_exact, run_sampled
from .noise import (
    DepolarizingF,
    NoiseModel,
    depolarizing_f,
    gate_infidelity,
    hpr_forward,
    mitigate_amplitude,
    mitigate_hpr,
    scrambling_diagnostic,
    shot_resource_estimate,
)
from .otoc import OtocPoint, normalized, operator_averaged, otoc_exact, otoc_shots, site_pauli
from .statevector import (
    CapacityError,
    Gate,
    PauliString,
    QuantumState,
    apply_gate,
    apply_gate_list,
    apply_pauli,
    haar_state,
    inner,
    pauli_expectation,
    prepare_bell_pairs,
    project_bell_pairs,
    sample_binary_mean,
    zero_state,
)
from .thermal import (
    DosCurve,
    FilterSpec,
    HeisenbergSpec,
    LoschmidtSeries,
    dos_transform,
    filter_entropy_purity,
    loschmidt_series,
    random_product_state,
    symmetrize,
    trotter_xxx,
    xxx_moments,
)
from .ensembles import (
    EnsembleSpec,
    SeriesStats,
    combined_stddev,
    ensemble_series_stats,
    haar_variance,
    sff,
)

__all__ = [name for name in dir() if not name.startswith("_")]
