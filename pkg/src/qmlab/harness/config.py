"""Scenario configuration: a TOML document with one table per scenario kind."""

from __future__ import annotations

import dataclasses
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

import tomli_w

KINDS = ("measurement", "relstate", "oscillator", "x3p-eigen", "relpos")
SCENARIOS = KINDS + ("all",)

# Named tolerances; each can be overridden from the config or with --tol.
DEFAULT_TOLERANCES = {
    "exact": 1e-10,  # algebraic identities, unitarity, traces
    "closed_form": 1e-9,  # closed forms vs. oracles, measurement tables
    "dual": 1e-12,  # conditional expectation vs. Trace(A rho^theta)
    "counterexample": 1e-3,  # minimum discrepancy outside the commutant
    "moments_rel": 1e-6,
    "heisenberg": 1e-8,
    "x3p_rel": 1e-5,
    "gap_rel": 1e-6,
    "norm": 1e-8,
    "eigen_mean_rel": 1e-6,
    "eigen_p": 1e-8,
    "eigen_re": 1e-6,  # times hbar * lambda
    "eigen_im_rel": 1e-5,
    "eigen_residual": 1e-4,
    "witness_factor": 1e3,
    "cn_mean": 1e-3,  # times A
    "cn_norm": 1e-6,
    "cn_heisenberg": 1e-4,
    "asym_rel": 1e-6,
    "slope": 0.1,
    "parity": 1e-10,
    "conj_sym": 1e-12,
}


class ConfigError(ValueError):
    pass


def _require(ok: bool, name: str, msg: str) -> None:
    if not ok:
        raise ConfigError(f"{name}: {msg}")


@dataclass
class MeasurementConfig:
    theta: list = field(default_factory=lambda: [k * math.pi / 8 for k in range(5)])
    T_m: float = 1.0
    n_times: int = 33
    t_start: float = -0.25  # in units of T_m
    t_stop: float = 2.0
    H0_diag: list = field(default_factory=lambda: [0.0, 0.0])
    epr: bool = True

    def validate(self):
        _require(len(self.theta) >= 1, "measurement.theta", "needs at least one angle")
        for th in self.theta:
            _require(0 <= th < 2 * math.pi, "measurement.theta", f"{th} outside [0, 2pi)")
        _require(self.T_m > 0, "measurement.T_m", "must be positive")
        _require(2 <= self.n_times <= 10000, "measurement.n_times", "must be in [2, 10000]")
        _require(self.t_start < self.t_stop, "measurement.t_start", "must be below t_stop")
        _require(len(self.H0_diag) == 2, "measurement.H0_diag", "needs two entries (spin up, spin down)")


@dataclass
class RelstateConfig:
    n_samples: int = 200
    min_dim: int = 2
    max_dim: int = 16

    def validate(self):
        _require(1 <= self.n_samples <= 100000, "relstate.n_samples", "must be in [1, 100000]")
        _require(2 <= self.min_dim <= self.max_dim <= 64, "relstate.max_dim", "need 2 <= min_dim <= max_dim <= 64")


@dataclass
class OscillatorConfig:
    m: float = 1.0
    k: float = 1.0
    hbar: float = 1.0
    A_sigmas: float = 10.0  # packet amplitude in units of sigma
    n_times: int = 16
    spacing_sigmas: float = 0.02
    steps_per_period: int = 16000
    sigma_ratios: list = field(default_factory=lambda: [0.04, 0.01, 0.0025])  # sigma^2 / A^2
    series_points: int = 257  # 2 periods; 256 steps land on the sin 2wt peaks

    def validate(self):
        for name in ("m", "k", "hbar", "A_sigmas", "spacing_sigmas"):
            _require(getattr(self, name) > 0, f"oscillator.{name}", "must be positive")
        _require(self.spacing_sigmas <= 0.1, "oscillator.spacing_sigmas", "grid must resolve sigma/10")
        _require(1 <= self.n_times <= 1000, "oscillator.n_times", "must be in [1, 1000]")
        _require(200 <= self.steps_per_period <= 10**6, "oscillator.steps_per_period", "must be in [200, 1e6]")
        _require(all(0 < r < 1 for r in self.sigma_ratios), "oscillator.sigma_ratios", "entries must be in (0, 1)")
        _require(2 <= self.series_points <= 100000, "oscillator.series_points", "must be in [2, 100000]")


@dataclass
class X3pEigenConfig:
    lambdas: list = field(default_factory=lambda: [0.5, 1.0, 2.0])
    hbar: float = 1.0
    n_grid: int = 2**14 + 1
    matrix_grid: int = 1025
    energy_cutoffs: list = field(default_factory=lambda: [1e2, 1e4, 1e6])

    def validate(self):
        _require(all(lam > 0 for lam in self.lambdas) and self.lambdas, "x3p-eigen.lambdas", "must be positive")
        _require(self.hbar > 0, "x3p-eigen.hbar", "must be positive")
        _require(257 <= self.n_grid <= 2**20 + 1, "x3p-eigen.n_grid", "must be in [257, 2^20 + 1]")
        _require(65 <= self.matrix_grid <= 4097, "x3p-eigen.matrix_grid", "must be in [65, 4097]")


@dataclass
class RelposConfig:
    masses: list = field(default_factory=lambda: [1.0, 2.0, 4.0, 8.0, 16.0])
    p0: float = 1.0
    width: float = 1.0
    # pair whose momentum content stays well below every mass (slope fit)
    nr_p0: float = 0.1
    nr_width: float = 0.1
    heavy_masses: list = field(default_factory=lambda: [16.0, 32.0, 64.0, 128.0, 256.0])
    hbar: float = 1.0
    P: float = 16.0
    n_panels: int = 64
    order: int = 16
    n_random: int = 100

    def validate(self):
        for name in ("masses", "heavy_masses"):
            ms = getattr(self, name)
            _require(len(ms) >= 2 and all(m > 0 for m in ms), f"relpos.{name}", "need >= 2 positive masses")
            _require(all(b > a for a, b in zip(ms, ms[1:])), f"relpos.{name}", "must be ascending")
        for name in ("width", "nr_width", "hbar", "P"):
            _require(getattr(self, name) > 0, f"relpos.{name}", "must be positive")
        _require(1 <= self.n_panels <= 4096 and 2 <= self.order <= 64, "relpos.n_panels", "grid size out of range")
        _require(0 <= self.n_random <= 10000, "relpos.n_random", "must be in [0, 10000]")


_BLOCKS = {
    "measurement": MeasurementConfig,
    "relstate": RelstateConfig,
    "oscillator": OscillatorConfig,
    "x3p-eigen": X3pEigenConfig,
    "relpos": RelposConfig,
}


@dataclass
class ScenarioConfig:
    scenario: str = "all"
    seed: int = 0
    out_dir: str = "qmlab-out"
    plots: bool = True
    tolerances: dict = field(default_factory=dict)
    measurement: MeasurementConfig = field(default_factory=MeasurementConfig)
    relstate: RelstateConfig = field(default_factory=RelstateConfig)
    oscillator: OscillatorConfig = field(default_factory=OscillatorConfig)
    x3p_eigen: X3pEigenConfig = field(default_factory=X3pEigenConfig)
    relpos: RelposConfig = field(default_factory=RelposConfig)

    def validate(self) -> "ScenarioConfig":
        _require(self.scenario in SCENARIOS, "scenario", f"must be one of {', '.join(SCENARIOS)}")
        _require(isinstance(self.seed, int) and 0 <= self.seed < 2**64, "seed", "must be an unsigned 64-bit integer")
        for name, value in self.tolerances.items():
            _require(name in DEFAULT_TOLERANCES, f"tolerances.{name}", "unknown tolerance name")
            _require(isinstance(value, (int, float)) and value > 0, f"tolerances.{name}", "must be positive")
        for kind in KINDS:
            self.block(kind).validate()
        return self

    def block(self, kind: str):
        return getattr(self, kind.replace("-", "_"))

    def kinds(self) -> tuple[str, ...]:
        return KINDS if self.scenario == "all" else (self.scenario,)

    def tol(self, name: str) -> float:
        return float(self.tolerances.get(name, DEFAULT_TOLERANCES[name]))

    def to_dict(self) -> dict:
        d = {"scenario": self.scenario, "seed": self.seed, "out_dir": self.out_dir, "plots": self.plots,
             "tolerances": dict(sorted(self.tolerances.items()))}
        for kind in KINDS:
            d[kind] = dataclasses.asdict(self.block(kind))
        return d


def _coerce(name: str, default, value):
    if isinstance(default, bool):
        _require(isinstance(value, bool), name, "must be a boolean")
        return value
    if isinstance(default, int):
        _require(isinstance(value, int) and not isinstance(value, bool), name, "must be an integer")
        return value
    if isinstance(default, float):
        _require(isinstance(value, (int, float)) and not isinstance(value, bool), name, "must be a number")
        return float(value)
    if isinstance(default, str):
        _require(isinstance(value, str), name, "must be a string")
        return value
    if isinstance(default, list):
        _require(isinstance(value, list), name, "must be an array")
        out = []
        for v in value:
            _require(isinstance(v, (int, float)) and not isinstance(v, bool), name, "entries must be numbers")
            out.append(float(v))
        return out
    return value


def _build_block(kind: str, raw) -> object:
    cls = _BLOCKS[kind]
    _require(isinstance(raw, dict), kind, "must be a table")
    obj = cls()
    known = {f.name for f in dataclasses.fields(cls)}
    for key, value in raw.items():
        _require(key in known, f"{kind}.{key}", "unknown key")
        setattr(obj, key, _coerce(f"{kind}.{key}", getattr(obj, key), value))
    return obj


def config_from_dict(raw: dict) -> ScenarioConfig:
    cfg = ScenarioConfig()
    for key, value in raw.items():
        if key in _BLOCKS:
            setattr(cfg, key.replace("-", "_"), _build_block(key, value))
        elif key == "tolerances":
            _require(isinstance(value, dict), "tolerances", "must be a table")
            cfg.tolerances = {k: _coerce(f"tolerances.{k}", 1.0, v) for k, v in value.items()}
        elif key in ("scenario", "seed", "out_dir", "plots"):
            setattr(cfg, key, _coerce(key, getattr(cfg, key), value))
        else:
            raise ConfigError(f"{key}: unknown key")
    return cfg.validate()


def loads_config(text: str) -> ScenarioConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"parse error: {exc}") from exc
    return config_from_dict(raw)


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        return loads_config(text)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def dumps_config(cfg: ScenarioConfig) -> str:
    return tomli_w.dumps(cfg.to_dict())


def apply_tolerance_overrides(cfg: ScenarioConfig, items) -> ScenarioConfig:
    """Apply ``name=value`` strings (from --tol)."""
    for item in items or ():
        name, sep, value = item.partition("=")
        _require(bool(sep), "--tol", f"expected name=value, got {item!r}")
        try:
            cfg.tolerances[name.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"--tol: {value!r} is not a number") from None
    return cfg.validate()
