"""Experiment config files.

INI-style text with three sections::

    [system]
    M = 3
    N = 3
    K = 3
    L = 4
    alpha = 0.1, 0.5, 1.0
    R_eigenvalues = 1, 0.1, 0.05     ; or R = 1, 0, 0; 0, 0.1, 0; 0, 0, 0.05
    pc_db = 10                       ; or p_c = 10 (linear)
    ps_db = 0                        ; or p_s = 1 (linear)
    sic_order = C-SIC
    alpha_bw = 0.5

    [sweep]
    start_db = 10
    stop_db = 40
    step_db = 2.5
    rate_target = 5
    grid = 0, 0.05, 0.1              ; p or alpha grid (region)
    grid_points = 21                 ; evenly spaced grid on [0, 1] instead

    [run]
    trials = 100000
    seed = 2023
    workers = 1

Every key in [sweep] and [run] is optional; command defaults fill gaps.
R entries may be complex (``0.2+0.1j``).
"""
import configparser
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, StructuralError
from .model import SystemConfig, db_to_linear, validate_config

COMMANDS = ("op-curve", "ecr-curve", "sr-curve", "region", "asymptotics", "table1")

# (start_db, stop_db, step_db) per command, plus default trials
DEFAULT_SWEEPS = {
    "op-curve": (10.0, 40.0, 2.5),
    "ecr-curve": (0.0, 40.0, 5.0),
    "sr-curve": (0.0, 60.0, 5.0),
}
DEFAULT_TRIALS = {
    "op-curve": 1_000_000,
    "ecr-curve": 100_000,
    "sr-curve": 0,
    "region": 100_000,
    "asymptotics": 100_000,
    "table1": 0,
}
DEFAULT_SEED = 2023
DEFAULT_RATE_TARGET = 5.0
DEFAULT_GRID_POINTS = 21


@dataclass
class Sweep:
    start_db: float = None
    stop_db: float = None
    step_db: float = None
    rate_target: float = DEFAULT_RATE_TARGET
    grid: np.ndarray = None

    def db_grid(self):
        n = int(np.floor((self.stop_db - self.start_db) / self.step_db + 1e-9)) + 1
        return self.start_db + self.step_db * np.arange(n)


@dataclass
class ExperimentSpec:
    command: str
    cfg: SystemConfig
    sweep: Sweep = field(default_factory=Sweep)
    trials: int = 0
    seed: int = DEFAULT_SEED
    out_dir: Path = Path("out")
    workers: int = 1


def _floats(text, key):
    try:
        return [float(x) for x in text.replace(";", ",").split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse number list {text!r}") from exc


def _matrix(text, key):
    try:
        rows = [[complex(x.strip().replace(" ", "")) for x in row.split(",") if x.strip()]
                for row in text.split(";") if row.strip()]
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse matrix {text!r}") from exc
    if len({len(r) for r in rows}) != 1:
        raise ConfigError(f"{key}: rows have different lengths")
    return np.array(rows, dtype=np.complex128)


def _get(section, key, conv, default=None, required=False):
    if key not in section:
        if required:
            raise ConfigError(f"[{section.name}] missing required key {key!r}")
        return default
    raw = section[key]
    try:
        return conv(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section.name}] {key}: invalid value {raw!r}") from exc


def _power(section, lin_key, db_key):
    if lin_key in section and db_key in section:
        raise ConfigError(f"[system] give only one of {lin_key}, {db_key}")
    if db_key in section:
        return float(db_to_linear(_get(section, db_key, float)))
    return _get(section, lin_key, float, required=True)


def parse_system(section):
    ints = {k: _get(section, k, int, required=True) for k in ("M", "N", "K", "L")}
    alpha = tuple(_floats(_get(section, "alpha", str, required=True), "alpha"))
    if "R" in section and "R_eigenvalues" in section:
        raise ConfigError("[system] give only one of R, R_eigenvalues")
    if "R" in section:
        R = _matrix(section["R"], "R")
    elif "R_eigenvalues" in section:
        R = np.diag(_floats(section["R_eigenvalues"], "R_eigenvalues")).astype(np.complex128)
    else:
        raise ConfigError("[system] missing required key 'R_eigenvalues' (or 'R')")
    cfg = SystemConfig(
        R=R,
        alpha=alpha,
        p_c=_power(section, "p_c", "pc_db"),
        p_s=_power(section, "p_s", "ps_db"),
        sic_order=_get(section, "sic_order", str.strip, "C-SIC"),
        alpha_bw=_get(section, "alpha_bw", float, 0.5),
        **ints,
    )
    try:
        return validate_config(cfg)
    except StructuralError as exc:
        raise ConfigError(str(exc)) from exc


def load_spec(command, path, seed=None, trials=None, out_dir=None, workers=None):
    """Parse and validate a config file into an :class:`ExperimentSpec`."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    parser.optionxform = str  # keys are case-sensitive (M vs m)
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    if "system" not in parser:
        raise ConfigError("config has no [system] section")
    cfg = parse_system(parser["system"])

    sweep = Sweep()
    start, stop, step = DEFAULT_SWEEPS.get(command, (None, None, None))
    if "sweep" in parser:
        sec = parser["sweep"]
        start = _get(sec, "start_db", float, start)
        stop = _get(sec, "stop_db", float, stop)
        step = _get(sec, "step_db", float, step)
        sweep.rate_target = _get(sec, "rate_target", float, DEFAULT_RATE_TARGET)
        if "grid" in sec:
            sweep.grid = np.array(_floats(sec["grid"], "grid"))
        elif "grid_points" in sec:
            sweep.grid = np.linspace(0.0, 1.0, _get(sec, "grid_points", int))
    sweep.start_db, sweep.stop_db, sweep.step_db = start, stop, step
    if sweep.grid is None:
        sweep.grid = np.linspace(0.0, 1.0, DEFAULT_GRID_POINTS)

    run = parser["run"] if "run" in parser else parser[parser.default_section]
    spec = ExperimentSpec(
        command=command,
        cfg=cfg,
        sweep=sweep,
        trials=_get(run, "trials", int, DEFAULT_TRIALS[command]),
        seed=_get(run, "seed", int, DEFAULT_SEED),
        out_dir=Path(_get(run, "out_dir", str, "out")),
        workers=_get(run, "workers", int, 1),
    )
    if seed is not None:
        spec.seed = seed
    if trials is not None:
        spec.trials = trials
    if out_dir is not None:
        spec.out_dir = Path(out_dir)
    if workers is not None:
        spec.workers = workers
    validate_spec(spec)
    return spec


def validate_spec(spec):
    errs = []
    sw = spec.sweep
    if spec.command in DEFAULT_SWEEPS:
        if not sw.step_db or sw.step_db <= 0:
            errs.append(f"step > 0 violated: step_db={sw.step_db}")
        if sw.stop_db is None or sw.start_db is None or sw.stop_db < sw.start_db:
            errs.append(f"stop >= start violated: start_db={sw.start_db}, stop_db={sw.stop_db}")
    if spec.command in ("op-curve", "ecr-curve", "region", "asymptotics") and spec.trials < 1:
        errs.append(f"trials >= 1 violated: trials={spec.trials}")
    if sw.rate_target < 0:
        errs.append(f"rate_target >= 0 violated: rate_target={sw.rate_target}")
    g = np.asarray(sw.grid)
    if g.size == 0 or np.any(g < 0) or np.any(g > 1):
        errs.append("grid within [0, 1] violated")
    if spec.workers < 1:
        errs.append(f"workers >= 1 violated: workers={spec.workers}")
    if errs:
        raise ConfigError("; ".join(errs))
    return spec
