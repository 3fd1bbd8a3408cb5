"""Experiment runner: subcommands map protocols to plot-ready CSV/JSON output.

Every CSV starts with a '#'-prefixed comment line holding the resolved
configuration as JSON, so a file is reproducible from its own header.
Exit codes: 0 success, 2 configuration error, 3 capacity error.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__, ensembles, floquet, hayden_preskill as hpr, noise, otoc, thermal
from . import statevector as sv
from .statevector import CapacityError, PauliString


class ConfigError(ValueError):
    pass


def _parse_int_range(text: str) -> list[int]:
    """'0..14' (inclusive), '3', or '1,3,5'."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise ConfigError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    if "," in text:
        return [int(part) for part in text.split(",") if part.strip()]
    return [int(text)]


def _parse_sites(text: str) -> list[int]:
    return _parse_int_range(text)


_PAULI_TOKEN = re.compile(r"([IXYZ])(\d+)")


def _parse_pauli(text: str) -> PauliString:
    """'Z1,Z2' or 'Z1 X5': letters on 1-based sites."""
    tokens = _PAULI_TOKEN.findall(text.upper())
    joined = "".join(l + s for l, s in tokens)
    if joined != re.sub(r"[,\s]", "", text.upper()):
        raise ConfigError(f"cannot parse Pauli string {text!r}")
    sites = {}
    for letter, site in tokens:
        site = int(site)
        if site < 1 or site in sites:
            raise ConfigError(f"bad site {site} in Pauli string {text!r}")
        sites[site] = letter
    return PauliString.from_sites(sites)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path, command, config, columns, rows) -> None:
    header = {"command": command, "config": config, "version": __version__}
    lines = ["# " + json.dumps(header, sort_keys=True)]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _drive_spec(args) -> floquet.FloquetSpec:
    return floquet.FloquetSpec(
        n_sites=args.n,
        jt=args.jt,
        bxt=args.jt * args.bx_ratio,
        bzt=args.jt * args.bz_ratio,
        boundary=args.boundary,
    )


def _drive_config(args) -> dict:
    return {
        "n": args.n,
        "jt": args.jt,
        "bx_ratio": args.bx_ratio,
        "bz_ratio": args.bz_ratio,
        "boundary": args.boundary,
    }


def _add_drive_flags(parser, default_jt=np.pi / 2):
    parser.add_argument("--n", type=int, required=True, help="number of chain sites")
    parser.add_argument("--jt", type=float, default=default_jt, help="bond angle J*T")
    parser.add_argument("--bx-ratio", type=float, default=1.0, help="B_X/J")
    parser.add_argument("--bz-ratio", type=float, default=1.3, help="B_Z/J")
    parser.add_argument(
        "--boundary", choices=floquet.BOUNDARIES, default="open", help="chain boundary"
    )


def _pool_map(threads, fn, tasks):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, tasks))
    return [fn(task) for task in tasks]


def _cmd_hpr(args) -> int:
    spec = _drive_spec(args)
    layout = hpr.HprLayout(n_sites=args.n, n_a=args.na, n_d=args.nd)
    m_values = _parse_int_range(args.m)
    config = _drive_config(args) | {
        "na": args.na,
        "nd": args.nd,
        "m": m_values,
        "shots": None if args.exact else args.shots,
        "seed": args.seed,
    }

    def _point(m):
        if args.exact:
            return hpr.run_exact(spec, layout, m)
        rng = np.random.default_rng([args.seed, m])
        return hpr.run_sampled(spec, layout, m, args.shots, rng)

    results = _pool_map(args.threads, _point, m_values)
    rows = [
        (m, r.p_epr, r.f_epr, r.p_stderr, r.f_stderr)
        for m, r in zip(m_values, results)
    ]
    _write_csv(
        args.out, "hpr", config, ["m", "p_epr", "f_epr", "p_stderr", "f_stderr"], rows
    )
    return 0


def _cmd_otoc_common(args, grid: bool) -> int:
    spec = _drive_spec(args)
    sites = _parse_sites(args.site_d) if grid else [args.site_d]
    m_values = _parse_int_range(args.m) if grid else [args.m]
    config = _drive_config(args) | {
        "site_a": args.site_a,
        "site_d": sites if grid else sites[0],
        "m": m_values if grid else m_values[0],
        "shots": args.shots,
        "seed": args.seed,
    }
    measure = otoc.site_pauli("Z", args.site_a)

    def _point(task):
        site_d, m = task
        butterfly = otoc.site_pauli("X", site_d)
        start = sv.zero_state(spec.n_sites)
        if args.shots is None:
            value = otoc.otoc_exact(spec, m, measure, butterfly, start).real
            return (site_d, m, value, None, value, None)
        rng = np.random.default_rng([args.seed, site_d, m])
        raw = otoc.otoc_shots(spec, m, measure, butterfly, start, args.shots, rng, site_d)
        norm = otoc.otoc_shots(
            spec, m, measure, PauliString(), start, args.shots, rng, site_d
        )
        ratio = otoc.normalized(raw, norm)
        return (
            site_d,
            m,
            np.real(raw.value),
            raw.stderr,
            np.real(ratio.value) if ratio.valid else None,
            ratio.stderr if ratio.valid else None,
        )

    tasks = [(site_d, m) for site_d in sites for m in m_values]
    rows = _pool_map(args.threads, _point, tasks)
    rows.sort(key=lambda r: (r[0], r[1]))
    _write_csv(
        args.out,
        "otoc-grid" if grid else "otoc",
        config,
        ["n", "m", "value", "stderr", "normalized", "norm_stderr"],
        rows,
    )
    return 0


def _cmd_tpq(args) -> int:
    spec = thermal.HeisenbergSpec(n_sites=args.n, coupling=args.coupling)
    drive = floquet.FloquetSpec(
        n_sites=args.n,
        jt=args.jt,
        bxt=args.jt * args.bx_ratio,
        bzt=args.jt * args.bz_ratio,
        boundary="periodic",
    )
    e_inf, var_h = thermal.xxx_moments(spec)
    sigma_h = float(np.sqrt(var_h))
    sigma = args.sigma if args.sigma is not None else sigma_h / np.sqrt(2.0 * np.pi)
    dt = args.dt if args.dt is not None else 0.05 / args.coupling
    e_min = args.e_min if args.e_min is not None else e_inf - 2.5 * sigma_h
    e_max = args.e_max if args.e_max is not None else e_inf + 2.5 * sigma_h
    e_grid = np.linspace(e_min, e_max, args.e_points)
    filt = thermal.FilterSpec(
        sigma=sigma, e_grid=tuple(map(float, e_grid)), trunc_s=args.s, dt=dt
    )
    observable = _parse_pauli(args.observable)
    cycles = args.cycles if args.cycles is not None else args.n
    config = {
        "n": args.n,
        "coupling": args.coupling,
        "cycles": cycles,
        "jt": args.jt,
        "bx_ratio": args.bx_ratio,
        "bz_ratio": args.bz_ratio,
        "sigma": sigma,
        "dt": dt,
        "s": args.s,
        "e_min": e_min,
        "e_max": e_max,
        "e_points": args.e_points,
        "observable": args.observable,
        "instances": args.instances,
        "shots": args.shots,
        "seed": args.seed,
    }

    collected = []
    for instance in range(args.instances):
        rng = np.random.default_rng([args.seed, instance])
        psi = thermal.random_product_state(args.n, rng)
        floquet.evolve(psi, drive, cycles)
        collected.append(
            thermal.loschmidt_series(
                psi, spec, filt, observable=observable, shots=args.shots, rng=rng
            )
        )
    series = collected[0]
    if args.instances > 1:
        series = _average_series(collected)
    series = thermal.symmetrize(series)
    dos = thermal.dos_transform(series, filt)

    if args.series_out:
        rows = []
        for k in range(series.times.size):
            rows.append(
                (
                    series.times[k],
                    series.values[k].real,
                    series.values[k].imag,
                    series.values_op[k].real,
                    series.values_op[k].imag,
                    None if series.stderr_re is None else series.stderr_re[k],
                    None if series.stderr_im is None else series.stderr_im[k],
                    None if series.stderr_op_re is None else series.stderr_op_re[k],
                    None if series.stderr_op_im is None else series.stderr_op_im[k],
                )
            )
        _write_csv(
            args.series_out,
            "tpq",
            config,
            [
                "t",
                "re_l",
                "im_l",
                "re_l_op",
                "im_l_op",
                "stderr_re",
                "stderr_im",
                "stderr_op_re",
                "stderr_op_im",
            ],
            rows,
        )
    dos_rows = [
        (
            dos.energies[k],
            dos.d_values[k],
            dos.d_op_values[k],
            dos.estimator[k] if dos.valid[k] else None,
            bool(dos.valid[k]),
        )
        for k in range(dos.energies.size)
    ]
    _write_csv(
        args.dos_out,
        "tpq",
        config,
        ["e", "d", "d_op", "estimator", "valid"],
        dos_rows,
    )
    return 0


def _average_series(collected):
    base = collected[0]
    count = len(collected)
    values = np.mean([s.values for s in collected], axis=0)
    values_op = None
    if base.values_op is not None:
        values_op = np.mean([s.values_op for s in collected], axis=0)

    def _avg_se(attr):
        if getattr(base, attr) is None:
            return None
        stacked = np.stack([getattr(s, attr) for s in collected])
        return np.sqrt((stacked**2).sum(axis=0)) / count

    return thermal.LoschmidtSeries(
        times=base.times,
        values=values,
        values_op=values_op,
        stderr_re=_avg_se("stderr_re"),
        stderr_im=_avg_se("stderr_im"),
        stderr_op_re=_avg_se("stderr_op_re"),
        stderr_op_im=_avg_se("stderr_op_im"),
        sigma=base.sigma,
        dt=base.dt,
        trunc_s=base.trunc_s,
    )


def _cmd_ensemble_stats(args) -> int:
    heisenberg = thermal.HeisenbergSpec(n_sites=args.n, coupling=args.coupling)
    drive = None
    if args.kind != "haar":
        drive = floquet.FloquetSpec(
            n_sites=args.n,
            jt=args.jt,
            bxt=args.jt * args.bx_ratio,
            bzt=args.jt * args.bz_ratio,
            boundary="periodic",
        )
    ensemble = ensembles.EnsembleSpec(
        kind=args.kind,
        count=args.count,
        m=args.m,
        m_min=args.m_min,
        m_max=args.m_max,
        drive=drive,
        seed=args.seed,
    )
    dt = args.dt if args.dt is not None else 0.05 / args.coupling
    e_inf, var_h = thermal.xxx_moments(heisenberg)
    filt = thermal.FilterSpec(
        sigma=float(np.sqrt(var_h / (2.0 * np.pi))),
        e_grid=(e_inf,),
        trunc_s=args.s,
        dt=dt,
    )
    stats = ensembles.ensemble_series_stats(ensemble, heisenberg, filt, evolver=args.evolver)
    d = 1 << args.n
    haar_sd = np.sqrt(ensembles.haar_variance(ensembles.sff(heisenberg, stats.times), d))
    config = {
        "kind": args.kind,
        "n": args.n,
        "coupling": args.coupling,
        "count": args.count,
        "m": args.m,
        "m_min": args.m_min,
        "m_max": args.m_max,
        "jt": args.jt,
        "bx_ratio": args.bx_ratio,
        "bz_ratio": args.bz_ratio,
        "s": args.s,
        "dt": dt,
        "evolver": stats.evolver,
        "seed": args.seed,
    }
    rows = [
        (
            stats.times[k],
            stats.mean[k].real,
            stats.mean[k].imag,
            float(np.sqrt(stats.var_re[k])),
            float(np.sqrt(stats.var_im[k])),
            float(np.sqrt(stats.var_total[k])),
            float(haar_sd[k]),
        )
        for k in range(stats.times.size)
    ]
    _write_csv(
        args.out,
        "ensemble-stats",
        config,
        ["t", "mean_re", "mean_im", "sd_re", "sd_im", "sd_total", "haar_sd"],
        rows,
    )
    return 0


def _cmd_lightcone(args) -> int:
    boundary = "periodic" if args.periodic else "open"
    spec = floquet.FloquetSpec(
        n_sites=args.n, jt=0.0, bxt=0.0, bzt=0.0, boundary=boundary
    )
    seeds = _parse_sites(args.seed_sites)
    count = floquet.lightcone_count(spec, args.m, seeds)
    print(count)
    return 0


def _cmd_mitigate(args) -> int:
    if args.f is not None:
        f = noise.DepolarizingF(args.f)
    elif args.machine is not None and args.theta is not None and args.n2q is not None:
        f = noise.depolarizing_f(noise.preset(args.machine), args.theta, args.n2q)
    else:
        raise ConfigError("give either --f, or --machine with --theta and --n2q")
    out = {"fidelity_weight": f.f, "da": args.da, "dd": args.dd}
    if args.f_noisy is not None:
        p_mit, f_mit = noise.mitigate_hpr(args.p_noisy, args.f_noisy, f, args.da, args.dd)
        out["f_mitigated"] = f_mit
        out["f_mitigated_clamped"] = noise.clamp01(f_mit)
        out["diagnostic"] = noise.scrambling_diagnostic(args.p_noisy, args.f_noisy, args.da)
    else:
        # invert the forward map for P alone (F enters the P map nowhere)
        p_mit, _ = noise.mitigate_hpr(args.p_noisy, 0.5, f, args.da, args.dd)
    out["p_mitigated"] = p_mit
    out["p_mitigated_clamped"] = noise.clamp01(p_mit)
    print(json.dumps(out, sort_keys=True))
    return 0


def _cmd_resource_estimate(args) -> int:
    print(
        noise.shot_resource_estimate(args.sigma, args.dt, args.op_norm, args.eps)
    )
    return 0


def _cmd_circuit_dump(args) -> int:
    spec = _drive_spec(args)
    gates = floquet.floquet_cycle(spec) * args.cycles
    text = floquet.gates_to_json(gates)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scramblesim",
        description="Scrambling-circuit experiments on a dense statevector simulator",
    )
    parser.add_argument("--config", help="JSON file with default option values")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hpr", help="recovery probability and fidelity sweep")
    _add_drive_flags(p)
    p.add_argument("--na", type=int, default=1, help="input window size")
    p.add_argument("--nd", type=int, default=2, help="decoding window size")
    p.add_argument("--m", required=True, help="cycle counts, e.g. 0..14")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="exact probabilities")
    mode.add_argument("--shots", type=int, help="finite-shot emulation")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", help="CSV path (stdout if omitted)")
    p.set_defaults(func=_cmd_hpr)

    p = sub.add_parser("otoc", help="one correlator point")
    _add_drive_flags(p)
    p.add_argument("--site-a", type=int, default=1, help="measurement site (Z)")
    p.add_argument("--site-d", type=int, required=True, help="butterfly site (X)")
    p.add_argument("--m", type=int, required=True, help="cycle count")
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", help="CSV path (stdout if omitted)")
    p.set_defaults(func=lambda a: _cmd_otoc_common(a, grid=False))

    p = sub.add_parser("otoc-grid", help="correlator over a site x cycle grid")
    _add_drive_flags(p)
    p.add_argument("--site-a", type=int, default=1)
    p.add_argument("--site-d", required=True, help="butterfly sites, e.g. 1..12")
    p.add_argument("--m", required=True, help="cycle counts, e.g. 0..15")
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", help="CSV path (stdout if omitted)")
    p.set_defaults(func=lambda a: _cmd_otoc_common(a, grid=True))

    p = sub.add_parser("tpq", help="thermal expectation value pipeline")
    p.add_argument("--n", type=int, required=True, help="ring sites (even)")
    p.add_argument("--coupling", type=float, default=1.0, help="Heisenberg J")
    p.add_argument("--cycles", type=int, help="drive cycles (default: n)")
    p.add_argument("--jt", type=float, default=np.pi / 2)
    p.add_argument("--bx-ratio", type=float, default=1.0)
    p.add_argument("--bz-ratio", type=float, default=1.3)
    p.add_argument("--sigma", type=float, help="filter width (default from moments)")
    p.add_argument("--dt", type=float, help="time step (default 0.05/J)")
    p.add_argument("--s", type=int, default=40, help="time-grid truncation")
    p.add_argument("--e-min", type=float)
    p.add_argument("--e-max", type=float)
    p.add_argument("--e-points", type=int, default=101)
    p.add_argument("--observable", default="Z1,Z2")
    p.add_argument("--instances", type=int, default=1)
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--series-out", help="CSV path for the amplitude series")
    p.add_argument("--dos-out", help="CSV path for the filtered curve (stdout if omitted)")
    p.set_defaults(func=_cmd_tpq)

    p = sub.add_parser("ensemble-stats", help="amplitude scatter vs the Haar line")
    p.add_argument("--kind", choices=ensembles.KINDS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--coupling", type=float, default=1.0)
    p.add_argument("--count", type=int, default=1, help="members (fixed-m and haar)")
    p.add_argument("--m", type=int, default=0, help="cycles (fixed-m)")
    p.add_argument("--m-min", type=int, default=0)
    p.add_argument("--m-max", type=int, default=0)
    p.add_argument("--jt", type=float, default=np.pi / 2)
    p.add_argument("--bx-ratio", type=float, default=1.0)
    p.add_argument("--bz-ratio", type=float, default=1.3)
    p.add_argument("--s", type=int, default=100)
    p.add_argument("--dt", type=float)
    p.add_argument("--evolver", choices=("exact", "trotter"), default="exact")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV path (stdout if omitted)")
    p.set_defaults(func=_cmd_ensemble_stats)

    p = sub.add_parser("lightcone", help="two-qubit gates inside a causal cone")
    p.add_argument("--n", type=int, required=True)
    edge = p.add_mutually_exclusive_group()
    edge.add_argument("--open", action="store_true", default=True)
    edge.add_argument("--periodic", action="store_true")
    p.add_argument("--seed-sites", required=True, help="e.g. 8,9")
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=_cmd_lightcone)

    p = sub.add_parser("mitigate", help="invert the depolarizing forward model")
    p.add_argument("--p-noisy", type=float, required=True)
    p.add_argument("--f-noisy", type=float)
    p.add_argument("--f", type=float, help="fidelity weight")
    p.add_argument("--machine", help="noise preset, e.g. H1-1")
    p.add_argument("--theta", type=float, help="two-qubit gate angle")
    p.add_argument("--n2q", type=int, help="gates inside the causal cone")
    p.add_argument("--da", type=int, default=2)
    p.add_argument("--dd", type=int, required=True)
    p.set_defaults(func=_cmd_mitigate)

    p = sub.add_parser("resource-estimate", help="shot budget for one amplitude")
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--op-norm", type=float, default=1.0)
    p.add_argument("--eps", type=float, required=True)
    p.set_defaults(func=_cmd_resource_estimate)

    p = sub.add_parser("circuit-dump", help="gate list of the drive as JSON")
    _add_drive_flags(p)
    p.add_argument("--cycles", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_circuit_dump)

    return parser


def _apply_config_file(parser, argv):
    """Load --config JSON as subcommand defaults (flags still win)."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    try:
        path = argv[idx + 1]
    except IndexError:
        raise ConfigError("--config needs a path") from None
    try:
        with open(path, "r", encoding="utf-8") as fh:
            loaded = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    if not isinstance(loaded, dict):
        raise ConfigError("config file must hold a JSON object")
    rest = argv[:idx] + argv[idx + 2 :]
    # translate config keys into flags, inserted right after the subcommand
    # so explicit command-line flags override them on re-parse
    extra = []
    for key, value in sorted(loaded.items()):
        flag = "--" + key.replace("_", "-")
        if isinstance(value, bool):
            if value:
                extra.append(flag)
        else:
            extra.extend([flag, str(value)])
    if not rest:
        raise ConfigError("config file given without a subcommand")
    return [rest[0]] + extra + rest[1:]


def run(argv) -> int:
    """Parse argv (no program name) and execute; returns the exit code."""
    argv = list(argv)
    parser = build_parser()
    try:
        argv = _apply_config_file(parser, argv)
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return 0 if exc.code == 0 else 2
        rc = args.func(args)
        return rc
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
