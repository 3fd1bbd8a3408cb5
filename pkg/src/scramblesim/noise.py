"""Analytic depolarizing-noise model and mitigation inversions.

The forward model replaces each application of the scrambling unitary by a
global depolarizing channel with fidelity weight f; every map here is a
closed form, so mitigation is the exact algebraic inverse of the forward
model. Nothing in this module touches statevectors.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass


@dataclass(frozen=True)
class NoiseModel:
    """Two-qubit gate infidelity p_2q(theta) = p * (p_a * |theta| / pi + p_b)."""

    p: float
    p_a: float = 1.651
    p_b: float = 0.175
    label: str = "custom"

    def __post_init__(self):
        if self.p < 0 or self.p_a < 0 or self.p_b < 0:
            raise ValueError("noise parameters must be non-negative")


PRESETS = {
    "H1-1": NoiseModel(p=1.38e-3, p_a=1.651, p_b=0.175, label="H1-1"),
    "H1-2": NoiseModel(p=2.97e-3, p_a=1.651, p_b=0.175, label="H1-2"),
}


def preset(name: str) -> NoiseModel:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown machine preset {name!r}; have {sorted(PRESETS)}") from None


def load_model(path: str) -> NoiseModel:
    """Load {label, p, p_a, p_b} from a JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    return NoiseModel(
        p=float(raw["p"]),
        p_a=float(raw.get("p_a", 1.651)),
        p_b=float(raw.get("p_b", 0.175)),
        label=str(raw.get("label", "custom")),
    )


@dataclass(frozen=True)
class DepolarizingF:
    """Fidelity weight of the ideal branch of the depolarizing channel."""

    f: float

    def __post_init__(self):
        if not 0.0 <= self.f <= 1.0:
            raise ValueError(f"fidelity weight must lie in [0, 1], got {self.f}")


def gate_infidelity(model: NoiseModel, theta: float) -> float:
    """Average infidelity of one native two-qubit gate at angle theta."""
    if abs(theta) > 2 * math.pi:
        raise ValueError("two-qubit gate angle outside the +/- 2*pi sanity bound")
    return model.p * (model.p_a * abs(theta) / math.pi + model.p_b)


def depolarizing_f(model: NoiseModel, theta: float, n_2q: int) -> DepolarizingF:
    """f = (1 - p_ent(theta))**n_2q with entanglement infidelity (5/4) p_2q."""
    if n_2q < 0:
        raise ValueError("gate count must be >= 0")
    p_ent = 1.25 * gate_infidelity(model, theta)
    return DepolarizingF((1.0 - p_ent) ** n_2q)


def hpr_forward(
    p_ideal: float, f_ideal: float, f: DepolarizingF, d_a: int, d_d: int
) -> tuple[float, float]:
    """Noisy (post-selection probability, recovery fidelity) from ideal values."""
    f2 = f.f * f.f
    p_noisy = f2 * p_ideal + (1.0 - f2) / d_d**2
    f_noisy = (f2 + (1.0 - f2) / d_d**2) / (f2 / f_ideal + d_a**2 * (1.0 - f2) / d_d**2)
    return p_noisy, f_noisy


def mitigate_hpr(
    p_noisy: float, f_noisy: float, f: DepolarizingF, d_a: int, d_d: int
) -> tuple[float, float]:
    """Exact inverse of hpr_forward.

    Outputs may leave [0, 1] when the inputs are inconsistent with the
    model; callers wanting clamped values use clamp01 alongside the raw
    numbers, never instead of them.
    """
    if f.f <= 0.0:
        raise ValueError("cannot mitigate with fidelity weight f = 0")
    f2 = f.f * f.f
    leak = (1.0 - f2) / (d_d**2 * f2)
    p_mit = p_noisy / f2 - leak
    f_mit = 1.0 / ((1.0 / f_noisy) * (1.0 + leak) - d_a**2 * leak)
    return p_mit, f_mit


def clamp01(value: float) -> float:
    return min(max(value, 0.0), 1.0)


def scrambling_diagnostic(p: float, f_val: float, d_a: int) -> float:
    """d_a**2 * P * F: equals 1 noiselessly, f**2 + (1 - f**2)/d_d**2 under the model."""
    return d_a**2 * p * f_val


def mitigate_amplitude(value: complex, f: DepolarizingF) -> complex:
    """Rescale a noisy amplitude by the inverse fidelity weight."""
    if f.f <= 1e-9:
        raise ValueError("fidelity weight too small to invert")
    return value / f.f


def shot_resource_estimate(
    sigma: float, dt: float, op_norm: float, eps_prime: float
) -> int:
    """Order-of-magnitude shot count sigma*dt*|O|**2/eps'**2 (unit constant).

    Floors at one shot; treat the result as a planning number, not a
    guarantee.
    """
    if sigma <= 0 or dt <= 0 or eps_prime <= 0 or op_norm < 0:
        raise ValueError("sigma, dt, eps_prime must be positive and op_norm >= 0")
    return max(1, math.ceil(sigma * dt * op_norm**2 / eps_prime**2))
