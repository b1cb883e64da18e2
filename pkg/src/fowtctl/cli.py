"""Command-line interface: tune, analyze, simulate, bode, fatigue, campaign.

Every output file starts with comment lines embedding the tool version,
the config hash, the parameter-set names and the seed, so a result can
always be traced back to the exact configuration that produced it.
Identical configs (including seed) produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, export_gains, load_run_config
from .errors import FowtctlError
from .fatigue import (WohlerCurve, damage_equivalent_load, miner_damage,
                      rainflow)
from .freq import bode_gplt, bode_grot, damped_band, default_grid
from .gains import RotorTarget, synthesize
from .model import ControlGains, build_open_loop, close_loop
from .sim import DisturbanceSpec, TimeSeries, simulate
from .stability import (modal_report, nmpz_omega_condition, nmpz_phi_condition,
                        numerator_omega, numerator_phi, platform_summary,
                        rotor_summary)

STAT_CHANNELS = ("phi", "omega", "beta", "tower_moment")


def _header(cfg: RunConfig) -> list[str]:
    seed = cfg.seed if cfg.seed is not None else "none"
    return [
        f"fowtctl {__version__}",
        f"config_hash={cfg.config_hash}",
        f"structure={cfg.params_name} sensitivities={cfg.sens_name}",
        f"seed={seed}",
    ]


def _resolve_gains(cfg: RunConfig) -> ControlGains:
    if cfg.gains_override is not None:
        return cfg.gains_override
    return synthesize(cfg.params, cfg.sens,
                      RotorTarget(zeta_rot=cfg.zeta_rot, nu_rot=cfg.nu_rot),
                      strategy=cfg.strategy, zeta_plt=cfg.zeta_plt,
                      m_taug=cfg.m_taug)


def _out_dir(cfg: RunConfig, override: str | None) -> Path:
    out = Path(override if override is not None else cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_tune(cfg: RunConfig, out: Path) -> int:
    gains = _resolve_gains(cfg)
    rot = rotor_summary(cfg.params, cfg.sens, gains.kp, gains.ki)
    plt = platform_summary(cfg.params, cfg.sens, gains.kbeta)
    lines = _header(cfg) + [
        f"strategy={cfg.strategy}"
        + (f" zeta_plt={cfg.zeta_plt}" if cfg.zeta_plt is not None else ""),
        f"rotor: nu={rot.nu!r} rad/s zeta={rot.zeta!r} degenerate={rot.degenerate}",
        f"platform: nu={plt.nu!r} rad/s zeta={plt.zeta!r}",
    ]
    export_gains(gains, out / "gains.ini", header_lines=lines)
    print(f"kp = {gains.kp!r}")
    print(f"ki = {gains.ki!r}")
    print(f"kbeta = {gains.kbeta!r}")
    print(f"ktaug = {gains.ktaug!r}")
    print(f"rotor nu={rot.nu:.6g} rad/s zeta={rot.zeta:.6g}"
          + (" (degenerate)" if rot.degenerate else ""))
    print(f"platform nu={plt.nu:.6g} rad/s zeta={plt.zeta:.6g}")
    print(f"wrote {out / 'gains.ini'}")
    return 0


def cmd_analyze(cfg: RunConfig, out: Path) -> int:
    gains = _resolve_gains(cfg)
    ss = close_loop(build_open_loop(cfg.params, cfg.sens), gains)
    phi_cond = nmpz_phi_condition(cfg.sens)
    omega_cond = nmpz_omega_condition(cfg.params, cfg.sens, gains.ktaug)
    n_phi = numerator_phi(cfg.params, cfg.sens)
    n_omega = numerator_omega(cfg.params, cfg.sens, gains.ktaug)
    report = modal_report(ss.closed)
    verdict = "stable" if report.stable else "unstable"
    lo, hi = damped_band(cfg.params)

    txt = out / "analysis.txt"
    with open(txt, "w") as fh:
        for line in _header(cfg):
            fh.write(f"# {line}\n")
        fh.write(f"nmpz_phi_condition = {str(phi_cond).lower()}\n")
        fh.write(f"nmpz_omega_condition = {str(omega_cond).lower()}\n")
        fh.write(f"damped_band = [{lo!r}, {hi!r}] rad/s\n")
        fh.write(f"verdict = {verdict}\n")
    with open(out / "analysis.csv", "w", newline="") as fh:
        for line in _header(cfg):
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(["quantity", "value"])
        writer.writerow(["nmpz_phi_condition", str(phi_cond).lower()])
        writer.writerow(["nmpz_omega_condition", str(omega_cond).lower()])
        for i, r in enumerate(np.sort_complex(n_phi.roots())):
            writer.writerow([f"numerator_phi_root_{i}", f"{r:.12g}"])
        for i, r in enumerate(np.sort_complex(n_omega.roots())):
            writer.writerow([f"numerator_omega_root_{i}", f"{r:.12g}"])
        for i, lam in enumerate(report.eigenvalues):
            writer.writerow([f"eigenvalue_{i}", f"{lam:.12g}"])
        for i, mode in enumerate(report.modes):
            writer.writerow([f"mode_{i}_nu [rad/s]", f"{mode.nu:.12g}"])
            writer.writerow([f"mode_{i}_zeta [-]", f"{mode.zeta:.12g}"])
        writer.writerow(["stable", str(report.stable).lower()])
    print(f"phi-NMPZ: {phi_cond}  omega-NMPZ: {omega_cond}  verdict: {verdict}")
    print(f"wrote {txt} and {out / 'analysis.csv'}")
    return 0


def _run_simulation(cfg: RunConfig, gains: ControlGains) -> TimeSeries:
    ss = close_loop(build_open_loop(cfg.params, cfg.sens), gains)
    return simulate(ss, gains, cfg.params, cfg.sens, cfg.disturbances,
                    dt=cfg.dt, t_end=cfg.duration, method=cfg.method)


def cmd_simulate(cfg: RunConfig, out: Path) -> int:
    gains = _resolve_gains(cfg)
    ts = _run_simulation(cfg, gains)
    path = out / "timeseries.csv"
    header = _header(cfg)
    if "diverged_at" in ts.meta:
        header.append(f"diverged_at={ts.meta['diverged_at']!r}")
        print(f"warning: simulation diverged at t={ts.meta['diverged_at']} s",
              file=sys.stderr)
    ts.to_csv(path, header_lines=header)
    print(f"wrote {path} ({len(ts)} samples, {len(ts.channels)} channels)")
    return 0


def cmd_bode(cfg: RunConfig, out: Path) -> int:
    gains = _resolve_gains(cfg)
    grid = default_grid(cfg.params)
    responses = [
        bode_gplt(cfg.params, cfg.sens, gains.kbeta, grid, input_channel="wave"),
        bode_gplt(cfg.params, cfg.sens, gains.kbeta, grid, input_channel="wind"),
        bode_grot(cfg.params, cfg.sens, gains.kp, gains.ki, grid),
    ]
    for resp in responses:
        name = resp.label.replace("<-", "_from_")
        path = out / f"bode_{name}.csv"
        with open(path, "w", newline="") as fh:
            for line in _header(cfg):
                fh.write(f"# {line}\n")
            if resp.degenerate:
                fh.write("# degenerate: band-pass form refused, raw rational response\n")
            writer = csv.writer(fh)
            writer.writerow(["nu [rad/s]", "magnitude [dB]", "phase [deg]"])
            for nu, mag, ph in zip(resp.nu_grid, resp.magnitude, resp.phase):
                writer.writerow([f"{nu:.12g}", f"{20.0 * math.log10(mag):.12g}",
                                 f"{math.degrees(ph):.12g}"])
        print(f"wrote {path}")
    return 0


def cmd_fatigue(cfg: RunConfig, out: Path, series_file: str,
                channel: str = "tower_moment") -> int:
    ts = TimeSeries.from_csv(series_file)
    if channel not in ts.channels:
        raise FowtctlError(f"channel {channel!r} not in {series_file} "
                           f"(has {sorted(ts.channels)})")
    fs = cfg.fatigue
    cycles = rainflow(ts.channels[channel], hysteresis_frac=fs.hysteresis_frac)
    curve = WohlerCurve(kind=fs.curve_kind, m1=fs.m1, m2=fs.m2,
                        knee=fs.knee, stress_knee=fs.stress_knee)
    del_value = damage_equivalent_load(cycles, fs.m1, fs.n_ref) if cycles else 0.0
    damage = miner_damage(cycles, curve, fs.section_modulus, fs.lifetime_scale)

    with open(out / "cycles.csv", "w", newline="") as fh:
        for line in _header(cfg):
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(["range [N*m]", "mean [N*m]", "count [-]"])
        for c in cycles:
            writer.writerow([f"{c.range:.12g}", f"{c.mean:.12g}", f"{c.count:g}"])
    with open(out / "fatigue_summary.csv", "w", newline="") as fh:
        for line in _header(cfg):
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(["quantity", "value"])
        writer.writerow(["channel", channel])
        writer.writerow(["n_cycles", f"{sum(c.count for c in cycles):g}"])
        writer.writerow([f"del_m{fs.m1:g} [N*m]", f"{del_value:.12g}"])
        writer.writerow(["damage [-]", f"{damage:.12g}"])
    print(f"{channel}: {sum(c.count for c in cycles):g} cycles, "
          f"DEL={del_value:.6g}, damage={damage:.6g}")
    return 0


@dataclass
class CaseResult:
    case_id: str
    wind_speed: float
    strategy: str
    gains: ControlGains
    stable: bool
    diverged: bool
    stats: dict[str, tuple[float, float, float, float]]  # min, mean, max, std
    del_tower: float
    damage_tower: float


def _campaign_case(cfg: RunConfig, speed: float, strategy: tuple[str, float | None],
                   case_seed: int | None) -> CaseResult:
    from .config import load_sensitivities

    kind, zeta = strategy
    sens = cfg.sens
    if speed in cfg.campaign_sens:
        sens, _ = load_sensitivities(cfg.campaign_sens[speed])
    gains = synthesize(cfg.params, sens,
                       RotorTarget(zeta_rot=cfg.zeta_rot, nu_rot=cfg.nu_rot),
                       strategy=kind, zeta_plt=zeta, m_taug=cfg.m_taug)
    disturbances = []
    for spec in cfg.disturbances:
        if spec.kind == "jonswap-wave":
            disturbances.append(DisturbanceSpec(
                kind=spec.kind, amplitude=spec.amplitude, period=spec.period,
                onset=spec.onset, hs=spec.hs, gamma=spec.gamma, seed=case_seed))
        else:
            disturbances.append(spec)
    ss = close_loop(build_open_loop(cfg.params, sens), gains)
    ts = simulate(ss, gains, cfg.params, sens, disturbances,
                  dt=cfg.dt, t_end=cfg.duration, method=cfg.method)
    diverged = "diverged_at" in ts.meta
    t_skip = cfg.transient if cfg.transient < cfg.duration else 0.0
    post = ts.window(t_skip) if not diverged else ts
    stats = {}
    for name in STAT_CHANNELS:
        ch = post.channels[name]
        stats[name] = (float(np.min(ch)), float(np.mean(ch)),
                       float(np.max(ch)), float(np.std(ch)))
    fs = cfg.fatigue
    cycles = rainflow(post.channels["tower_moment"],
                      hysteresis_frac=fs.hysteresis_frac)
    curve = WohlerCurve(kind=fs.curve_kind, m1=fs.m1, m2=fs.m2,
                        knee=fs.knee, stress_knee=fs.stress_knee)
    del_tower = damage_equivalent_load(cycles, fs.m1, fs.n_ref) if cycles else 0.0
    damage = miner_damage(cycles, curve, fs.section_modulus, fs.lifetime_scale)
    label = kind if zeta is None else f"{kind}:{zeta:g}"
    return CaseResult(
        case_id=f"ws{speed:g}_{label}", wind_speed=speed, strategy=label,
        gains=gains, stable=modal_report(ss.closed).stable, diverged=diverged,
        stats=stats, del_tower=del_tower, damage_tower=damage)


def cmd_campaign(cfg: RunConfig, out: Path, jobs: int = 1) -> int:
    if not cfg.campaign_speeds or not cfg.campaign_strategies:
        raise FowtctlError("campaign needs [campaign] wind_speeds and strategies")
    grid = [(speed, strat) for speed in cfg.campaign_speeds
            for strat in cfg.campaign_strategies]
    seeds = [None if cfg.seed is None else cfg.seed + i for i in range(len(grid))]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_campaign_case, [cfg] * len(grid),
                                    [g[0] for g in grid], [g[1] for g in grid],
                                    seeds))
    else:
        results = [_campaign_case(cfg, s, st, sd)
                   for (s, st), sd in zip(grid, seeds)]
    results.sort(key=lambda r: (r.wind_speed, r.strategy))

    path = out / "campaign.csv"
    with open(path, "w", newline="") as fh:
        for line in _header(cfg):
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        head = ["case_id", "wind_speed [m/s]", "strategy",
                "kp [s]", "ki [-]", "kbeta [rad*s/rad]", "ktaug [N*m*s/rad]",
                "stable", "diverged"]
        for name in STAT_CHANNELS:
            unit = {"phi": "rad", "omega": "rad/s", "beta": "rad",
                    "tower_moment": "N*m"}[name]
            head += [f"{name}_{s} [{unit}]" for s in ("min", "mean", "max", "std")]
        head += ["del_tower [N*m]", "damage_tower [-]"]
        writer.writerow(head)
        for r in results:
            row = [r.case_id, f"{r.wind_speed:g}", r.strategy,
                   f"{r.gains.kp:.12g}", f"{r.gains.ki:.12g}",
                   f"{r.gains.kbeta:.12g}", f"{r.gains.ktaug:.12g}",
                   str(r.stable).lower(), str(r.diverged).lower()]
            for name in STAT_CHANNELS:
                row += [f"{v:.12g}" for v in r.stats[name]]
            row += [f"{r.del_tower:.12g}", f"{r.damage_tower:.12g}"]
            writer.writerow(row)
    n_div = sum(r.diverged for r in results)
    print(f"wrote {path} ({len(results)} cases, {n_div} diverged)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fowtctl",
        description="Coupled rotor/platform control analysis for floating "
                    "wind turbines")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="run configuration file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--params-dir", default=None,
                       help="extra directory searched for parameter sets")

    for name, doc in [("tune", "synthesize and export controller gains"),
                      ("analyze", "NMPZ conditions, eigenvalues, stability verdict"),
                      ("simulate", "time-domain simulation to CSV"),
                      ("bode", "frequency sweeps of the reduced filters"),
                      ("fatigue", "rainflow / DEL / damage of a series file"),
                      ("campaign", "grid of simulations with joined summary")]:
        p = sub.add_parser(name, help=doc)
        common(p)
        if name == "fatigue":
            p.add_argument("series", help="time-series CSV to analyze")
            p.add_argument("--channel", default="tower_moment")
        if name == "campaign":
            p.add_argument("--jobs", type=int, default=1,
                           help="parallel worker processes")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_run_config(args.config, search_dir=args.params_dir)
        if args.seed is not None:
            old_seed = cfg.seed
            cfg.seed = args.seed
            # disturbances that inherited the run seed follow the override
            cfg.disturbances = [
                DisturbanceSpec(kind=d.kind, amplitude=d.amplitude,
                                period=d.period, onset=d.onset, hs=d.hs,
                                gamma=d.gamma, seed=args.seed, path=d.path)
                if d.kind == "jonswap-wave" and d.seed == old_seed else d
                for d in cfg.disturbances]
        out = _out_dir(cfg, args.out)
        if args.command == "tune":
            return cmd_tune(cfg, out)
        if args.command == "analyze":
            return cmd_analyze(cfg, out)
        if args.command == "simulate":
            return cmd_simulate(cfg, out)
        if args.command == "bode":
            return cmd_bode(cfg, out)
        if args.command == "fatigue":
            return cmd_fatigue(cfg, out, args.series, channel=args.channel)
        if args.command == "campaign":
            return cmd_campaign(cfg, out, jobs=args.jobs)
        raise FowtctlError(f"unknown command {args.command!r}")
    except FowtctlError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
