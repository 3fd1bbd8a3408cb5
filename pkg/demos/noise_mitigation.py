"""Undoing global depolarizing noise on recovery probabilities.

A scrambling circuit converts local gate errors into global white noise, so
a single fidelity weight f = (1 - p_ent)^N2Q captures the damage, where
N2Q counts only the two-qubit gates causally connected to the measurement.
Because the noisy observables are exact closed forms in f, mitigation is
algebraic: push the measured values back through the inverse map.

This demo synthesizes "hardware" data from the exact recovery sweep and the
trapped-ion gate-error model, mitigates it, and tabulates the three curves.
It also shows the diagnostic d_a^2 * P * F, which reads the noise strength
straight off the data: 1 when clean, f^2 + (1 - f^2)/d_d^2 when noisy.
"""

import numpy as np

from scramblesim import FloquetSpec, HprLayout, lightcone_count, run_exact
from scramblesim.noise import depolarizing_f, hpr_forward, mitigate_hpr, preset, scrambling_diagnostic

N_SITES = 9
MACHINE = preset("H1-1")
JT = np.pi / 2

spec = FloquetSpec(N_SITES, jt=JT, bxt=JT, bzt=1.3 * JT, boundary="open")
layout = HprLayout(N_SITES, 1, 2)
decode_window = {N_SITES - 1, N_SITES}

print(f"machine {MACHINE.label}: p = {MACHINE.p}, two-qubit angle |theta| = JT = {JT:.3f}")
print(f"{'m':>3} {'N2Q':>4} {'f':>7} | {'P exact':>8} {'P noisy':>8} {'P mit':>8} | "
      f"{'F exact':>8} {'F noisy':>8} {'F mit':>8} | {'diag':>6}")

for m in (0, 2, 4, 6, 8, 10, 12, 14):
    exact = run_exact(spec, layout, m)
    n2q = lightcone_count(spec, m, decode_window)
    weight = depolarizing_f(MACHINE, JT, n2q)
    p_noisy, f_noisy = hpr_forward(exact.p_epr, exact.f_epr, weight, layout.d_a, layout.d_d)
    p_mit, f_mit = mitigate_hpr(p_noisy, f_noisy, weight, layout.d_a, layout.d_d)
    diag = scrambling_diagnostic(p_noisy, f_noisy, layout.d_a)
    print(f"{m:>3} {n2q:>4} {weight.f:>7.4f} | {exact.p_epr:>8.5f} {p_noisy:>8.5f} {p_mit:>8.5f} | "
          f"{exact.f_epr:>8.5f} {f_noisy:>8.5f} {f_mit:>8.5f} | {diag:>6.4f}")

print("\nmitigated columns reproduce the exact ones to machine precision;")
print("the diagnostic falls below 1 exactly as the gate count grows.")
