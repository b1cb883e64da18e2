"""Run-configuration ingestion and parameter-set resolution.

Configs are INI-style key = value files.  A [structure] or
[sensitivities] section either carries its values inline or references a
named parameter set through `use = <name>`; named sets resolve against a
user-supplied directory first, then the packaged data files.  Sensitivity
sets may declare `units = kN` and are converted to strict SI on load, so
the stored fixtures can mirror published kN-based tables verbatim.
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ConfigError
from .model import AeroSensitivities, ControlGains, StructuralParams
from .sim import DisturbanceSpec

_STRUCT_KEYS = ("ng", "jr", "jt", "dt", "kt", "ht")
_SENS_KEYS = ("dta_domega", "dta_dv", "dta_dbeta",
              "dfa_domega", "dfa_dv", "dfa_dbeta", "dtw_dw")


def _data_dir() -> Path:
    return Path(str(resources.files("fowtctl").joinpath("data")))


def _resolve(section: str, name: str, search_dir: str | Path | None) -> Path:
    candidates = []
    if search_dir is not None:
        candidates.append(Path(search_dir) / section / f"{name}.ini")
        candidates.append(Path(search_dir) / f"{name}.ini")
    candidates.append(_data_dir() / section / f"{name}.ini")
    for path in candidates:
        if path.is_file():
            return path
    raise ConfigError(f"parameter set {name!r} not found (looked in "
                      f"{', '.join(str(c.parent) for c in candidates)})")


def _read_ini(path: Path) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    with open(path) as fh:
        cp.read_file(fh)
    return cp


def _section_floats(sec, keys, where: str) -> dict[str, float]:
    out = {}
    for key in keys:
        if key not in sec:
            raise ConfigError(f"missing key {key!r} in {where}")
        try:
            out[key] = float(sec[key])
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r} in {where}: {sec[key]!r}") from exc
    return out


def load_structure(name_or_sec, search_dir=None) -> tuple[StructuralParams, str]:
    """Structural parameters from a set name or a parsed config section.
    Returns (params, set_name)."""
    if isinstance(name_or_sec, str):
        path = _resolve("structure", name_or_sec, search_dir)
        sec = _read_ini(path)["structure"]
        name = name_or_sec
    else:
        sec = name_or_sec
        if "use" in sec:
            return load_structure(sec["use"], search_dir)
        name = "<inline>"
    vals = _section_floats(sec, _STRUCT_KEYS, f"structure set {name}")
    return StructuralParams(**vals), name


def load_sensitivities(name_or_sec, search_dir=None,
                       require_above_rated: bool = True) -> tuple[AeroSensitivities, str]:
    """Aerodynamic sensitivities from a set name or parsed section,
    converted to SI if the set declares kN units."""
    if isinstance(name_or_sec, str):
        path = _resolve("sensitivities", name_or_sec, search_dir)
        sec = _read_ini(path)["sensitivities"]
        name = name_or_sec
    else:
        sec = name_or_sec
        if "use" in sec:
            return load_sensitivities(sec["use"], search_dir, require_above_rated)
        name = "<inline>"
    vals = _section_floats(sec, _SENS_KEYS, f"sensitivity set {name}")
    units = sec.get("units", "si").strip().lower()
    if units == "kn":
        vals = {k: v * 1e3 for k, v in vals.items()}
    elif units != "si":
        raise ConfigError(f"unknown units {units!r} in sensitivity set {name}")
    sens = AeroSensitivities(**vals)
    if require_above_rated:
        sens.validate_above_rated()
    return sens, name


@dataclass
class FatigueSettings:
    curve_kind: str = "single"
    m1: float = 3.0
    m2: float | None = 5.0
    knee: float = 1e6
    stress_knee: float = 5.0e7   # Pa
    section_modulus: float = 6.5  # m^3, tower-base design value
    n_ref: float = 600.0
    lifetime_scale: float = 1.0
    hysteresis_frac: float = 1e-3


@dataclass
class RunConfig:
    """Everything one subcommand invocation needs, parsed and resolved."""

    params: StructuralParams
    sens: AeroSensitivities
    params_name: str
    sens_name: str
    strategy: str = "none"          # zeta-fixed | reference | none
    zeta_plt: float | None = None
    m_taug: float = 0.0
    zeta_rot: float = 0.6
    nu_rot: float = 0.01
    gains_override: ControlGains | None = None
    disturbances: list[DisturbanceSpec] = field(default_factory=list)
    dt: float = 0.05
    duration: float = 600.0
    method: str = "rk4"
    transient: float = 200.0
    seed: int | None = None
    out_dir: str = "."
    fatigue: FatigueSettings = field(default_factory=FatigueSettings)
    campaign_speeds: list[float] = field(default_factory=list)
    campaign_strategies: list[tuple[str, float | None]] = field(default_factory=list)
    campaign_sens: dict[float, str] = field(default_factory=dict)
    config_hash: str = ""
    taug_op: float = 0.0
    omega_op: float = 0.0


def _parse_strategy(text: str) -> tuple[str, float | None]:
    text = text.strip()
    if text.startswith("zeta-fixed"):
        _, _, arg = text.partition(":")
        if not arg:
            raise ConfigError("zeta-fixed strategy needs a value, e.g. zeta-fixed:0.10")
        return "zeta-fixed", float(arg)
    if text in ("reference", "none"):
        return text, None
    raise ConfigError(f"unknown strategy {text!r}")


def load_run_config(path, search_dir=None) -> RunConfig:
    path = Path(path)
    raw = path.read_bytes()
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.read_string(raw.decode())

    if "structure" not in cp:
        raise ConfigError("config needs a [structure] section")
    if "sensitivities" not in cp:
        raise ConfigError("config needs a [sensitivities] section")
    params, params_name = load_structure(cp["structure"], search_dir)
    sens, sens_name = load_sensitivities(cp["sensitivities"], search_dir)

    cfg = RunConfig(params=params, sens=sens,
                    params_name=params_name, sens_name=sens_name)
    cfg.config_hash = hashlib.sha256(raw).hexdigest()[:12]

    if "run" in cp:
        run = cp["run"]
        if "seed" in run:
            cfg.seed = int(run["seed"])
        cfg.out_dir = run.get("out", cfg.out_dir)

    if "rotor" in cp:
        cfg.zeta_rot = cp["rotor"].getfloat("zeta", cfg.zeta_rot)
        cfg.nu_rot = cp["rotor"].getfloat("nu", cfg.nu_rot)

    if "strategy" in cp:
        sec = cp["strategy"]
        kind = sec.get("kind", "none").strip()
        if kind == "zeta-fixed":
            if "zeta" not in sec:
                raise ConfigError("zeta-fixed strategy requires zeta")
            cfg.zeta_plt = float(sec["zeta"])
        elif kind not in ("reference", "none"):
            raise ConfigError(f"unknown strategy kind {kind!r}")
        cfg.strategy = kind
        cfg.m_taug = sec.getfloat("m_taug", 0.0)

    if "gains" in cp:
        g = cp["gains"]
        cfg.gains_override = ControlGains(
            kp=g.getfloat("kp", 0.0), ki=g.getfloat("ki", 0.0),
            kbeta=g.getfloat("kbeta", 0.0), ktaug=g.getfloat("ktaug", 0.0))

    if "simulation" in cp:
        sec = cp["simulation"]
        cfg.dt = sec.getfloat("dt", cfg.dt)
        cfg.duration = sec.getfloat("duration", cfg.duration)
        cfg.method = sec.get("method", cfg.method)
        cfg.transient = sec.getfloat("transient", cfg.transient)
        cfg.taug_op = sec.getfloat("taug_op", 0.0)
        cfg.omega_op = sec.getfloat("omega_op", 0.0)

    stochastic = False
    for name in sorted(s for s in cp.sections() if s.startswith("disturbance")):
        sec = cp[name]
        kind = sec.get("kind", "").strip()
        seed = sec.getint("seed") if "seed" in sec else None
        if kind == "jonswap-wave":
            stochastic = True
            if seed is None:
                seed = cfg.seed
            if seed is None:
                raise ConfigError("stochastic disturbance needs a seed "
                                  "([run] seed or per-disturbance)")
        cfg.disturbances.append(DisturbanceSpec(
            kind=kind,
            amplitude=sec.getfloat("amplitude", 0.0),
            period=sec.getfloat("period", 0.0),
            onset=sec.getfloat("onset", 0.0),
            hs=sec.getfloat("hs", 0.0),
            gamma=sec.getfloat("gamma", 1.0),
            seed=seed,
            path=sec.get("path", None),
        ))
    if stochastic and cfg.seed is None:
        raise ConfigError("[run] seed is mandatory with stochastic disturbances")

    if "fatigue" in cp:
        sec = cp["fatigue"]
        fs = cfg.fatigue
        fs.curve_kind = sec.get("curve", fs.curve_kind)
        fs.m1 = sec.getfloat("m1", fs.m1)
        fs.m2 = sec.getfloat("m2", fs.m2 if fs.m2 is not None else 5.0)
        fs.knee = sec.getfloat("knee", fs.knee)
        fs.stress_knee = sec.getfloat("stress_knee", fs.stress_knee)
        fs.section_modulus = sec.getfloat("section_modulus", fs.section_modulus)
        fs.n_ref = sec.getfloat("n_ref", fs.n_ref)
        fs.lifetime_scale = sec.getfloat("lifetime_scale", fs.lifetime_scale)
        fs.hysteresis_frac = sec.getfloat("hysteresis_frac", fs.hysteresis_frac)

    if "campaign" in cp:
        sec = cp["campaign"]
        if "wind_speeds" in sec:
            cfg.campaign_speeds = [float(s) for s in sec["wind_speeds"].split(",") if s.strip()]
        if "strategies" in sec:
            cfg.campaign_strategies = [_parse_strategy(s)
                                       for s in sec["strategies"].split(",") if s.strip()]
        for key, value in sec.items():
            if key.startswith("sens."):
                cfg.campaign_sens[float(key.split(".", 1)[1])] = value.strip()

    return cfg


def export_gains(gains: ControlGains, path, header_lines=None):
    """Write gains in the config format so they round-trip into later runs."""
    with open(path, "w") as fh:
        for line in header_lines or []:
            fh.write(f"# {line}\n")
        fh.write("[gains]\n")
        fh.write(f"kp = {gains.kp!r}\n")
        fh.write(f"ki = {gains.ki!r}\n")
        fh.write(f"kbeta = {gains.kbeta!r}\n")
        fh.write(f"ktaug = {gains.ktaug!r}\n")


def import_gains(path) -> ControlGains:
    cp = _read_ini(Path(path))
    g = cp["gains"]
    return ControlGains(kp=g.getfloat("kp"), ki=g.getfloat("ki"),
                        kbeta=g.getfloat("kbeta"), ktaug=g.getfloat("ktaug"))
