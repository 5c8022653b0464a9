"""Run configuration: a strict sectioned key-value file format and the
builders that materialize grid, cross-section, operators, and initial state.

Format rules: sections [physics], [grid], [solver], [output]; one `key =
value` pair per line; strings are double-quoted, booleans are true/false,
numbers are decimal or scientific; lists are comma-separated.  Unknown
sections or keys are errors, not warnings.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .grid import FullState, Grid, SigmaField
from .quadrature import FluxOperators, build_operators

__all__ = ["SolverConfig", "plane_source_initial", "parse_config", "serialize_config"]

SOLVERS = ("full", "dlra", "diffusion")
BOUNDARIES = ("periodic", "vacuum")
INITIALS = ("plane_source", "custom")

# section -> key -> (type tag, attribute name)
_SCHEMA: dict[str, dict[str, tuple[str, str]]] = {
    "physics": {
        "eps": ("float", "eps"),
        "sigma": ("float", "sigma"),
        "sigma_values": ("float_list", "sigma_values"),
        "initial": ("str", "initial"),
        "initial_std": ("float", "initial_std"),
        "initial_rho_file": ("str", "initial_rho_file"),
        "initial_g_file": ("str", "initial_g_file"),
    },
    "grid": {
        "x_left": ("float", "x_left"),
        "x_right": ("float", "x_right"),
        "nx": ("int", "nx"),
        "boundary": ("str", "boundary"),
    },
    "solver": {
        "kind": ("str", "solver"),
        "moments": ("int", "moments"),
        "rank": ("int", "rank"),
        "t_end": ("float", "t_end"),
        "cfl_safety": ("float", "cfl_safety"),
    },
    "output": {
        "directory": ("str", "out_dir"),
        "profile_times": ("float_list", "profile_times"),
        "energy_trace": ("bool", "energy_trace"),
    },
}

_NUMBER_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
_INT_RE = re.compile(r"^[+-]?\d+$")


@dataclass
class SolverConfig:
    """All physical and numerical parameters of one run.

    Defaults reproduce the plane-source benchmark at eps = 1.
    """

    eps: float = 1.0
    sigma: float = 1.0
    sigma_values: list[float] = field(default_factory=list)
    initial: str = "plane_source"
    initial_std: float = 0.03
    initial_rho_file: str = ""
    initial_g_file: str = ""
    x_left: float = -1.5
    x_right: float = 1.5
    nx: int = 502
    boundary: str = "vacuum"
    solver: str = "full"
    moments: int = 100
    rank: int = 20
    t_end: float = 1.0
    cfl_safety: float = 1.0
    out_dir: str = "out"
    profile_times: list[float] = field(default_factory=list)
    energy_trace: bool = True

    def validate(self) -> "SolverConfig":
        if self.eps <= 0:
            raise ConfigError(f"eps must be positive, got {self.eps}")
        if self.sigma <= 0 and not self.sigma_values:
            raise ConfigError(f"sigma must be positive, got {self.sigma}")
        if self.sigma_values and any(v <= 0 for v in self.sigma_values):
            raise ConfigError("sigma_values must be positive")
        if self.initial not in INITIALS:
            raise ConfigError(f"unknown initial condition {self.initial!r}")
        if self.initial == "plane_source" and self.initial_std <= 0:
            raise ConfigError(f"initial_std must be positive, got {self.initial_std}")
        if self.initial == "custom" and not self.initial_rho_file:
            raise ConfigError("custom initial condition requires initial_rho_file")
        if self.x_right <= self.x_left:
            raise ConfigError(f"empty domain [{self.x_left}, {self.x_right}]")
        if self.nx < 1:
            raise ConfigError(f"nx must be >= 1, got {self.nx}")
        if self.boundary not in BOUNDARIES:
            raise ConfigError(f"unknown boundary {self.boundary!r}")
        if self.solver not in SOLVERS:
            raise ConfigError(f"unknown solver {self.solver!r}")
        if self.moments < 1:
            raise ConfigError(f"moments must be >= 1, got {self.moments}")
        if self.t_end < 0:
            raise ConfigError(f"t_end must be >= 0, got {self.t_end}")
        if self.cfl_safety <= 0:
            raise ConfigError(f"cfl_safety must be positive, got {self.cfl_safety}")
        if self.solver == "dlra":
            n_if = self.nx if self.boundary == "periodic" else self.nx + 1
            if not 1 <= self.rank <= min(n_if, self.moments):
                raise ConfigError(
                    f"rank {self.rank} not in [1, {min(n_if, self.moments)}] "
                    f"for {self.moments} moments on {n_if} interfaces"
                )
        if any(t < 0 for t in self.profile_times):
            raise ConfigError("profile_times must be nonnegative")
        return self

    # -- builders ----------------------------------------------------------

    def make_grid(self) -> Grid:
        return Grid(self.x_left, self.x_right, self.nx, self.boundary)

    def make_sigma(self, grid: Grid) -> SigmaField:
        spec = np.asarray(self.sigma_values) if self.sigma_values else self.sigma
        try:
            return SigmaField.from_spec(spec, grid)
        except ValueError as err:
            raise ConfigError(str(err)) from err

    def make_operators(self) -> FluxOperators:
        return build_operators(self.moments)

    def initial_state(self, grid: Grid) -> FullState:
        if self.initial == "plane_source":
            return plane_source_initial(grid, self.initial_std, self.moments)
        rho = _read_rho_csv(self.initial_rho_file, grid)
        if self.initial_g_file:
            g = np.loadtxt(self.initial_g_file, delimiter=",", ndmin=2)
            if g.shape != (grid.n_interfaces, self.moments):
                raise ConfigError(
                    f"initial g has shape {g.shape}, expected "
                    f"({grid.n_interfaces}, {self.moments})"
                )
        else:
            g = np.zeros((grid.n_interfaces, self.moments))
        return FullState(rho=rho, g=g, time=0.0)

    # -- (de)serialization -------------------------------------------------

    @classmethod
    def parse(cls, text: str) -> "SolverConfig":
        return parse_config(text)

    @classmethod
    def from_file(cls, path: str | Path) -> "SolverConfig":
        try:
            text = Path(path).read_text()
        except OSError as err:
            raise ConfigError(f"cannot read config {path}: {err}") from err
        return parse_config(text)

    def serialize(self) -> str:
        return serialize_config(self)

    def with_updates(self, **kwargs) -> "SolverConfig":
        return replace(self, **kwargs).validate()


def plane_source_initial(grid: Grid, std: float, n_moments: int) -> FullState:
    """Isotropic Gaussian pulse: density on midpoints, zero microscopic field."""
    if std <= 0:
        raise ValueError(f"std must be positive, got {std}")
    x = grid.midpoints
    rho = np.exp(-(x * x) / (2.0 * std * std)) / (np.sqrt(2.0 * np.pi) * std)
    g = np.zeros((grid.n_interfaces, n_moments))
    return FullState(rho=rho, g=g, time=0.0)


def _read_rho_csv(path: str, grid: Grid) -> np.ndarray:
    """Read an `x,rho` profile CSV (as written by the run artifacts)."""
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except OSError as err:
        raise ConfigError(f"cannot read initial density {path}: {err}") from err
    if data.shape[1] != 2 or data.shape[0] != grid.nx:
        raise ConfigError(
            f"initial density {path} has shape {data.shape}, expected ({grid.nx}, 2)"
        )
    return data[:, 1].copy()


# -- parser ---------------------------------------------------------------


def _parse_scalar(raw: str, kind: str, where: str):
    if kind == "str":
        if len(raw) >= 2 and raw[0] == '"' and raw[-1] == '"':
            return raw[1:-1]
        raise ConfigError(f"{where}: string values must be double-quoted, got {raw}")
    if kind == "bool":
        if raw in ("true", "false"):
            return raw == "true"
        raise ConfigError(f"{where}: expected true or false, got {raw}")
    if kind == "int":
        if _INT_RE.match(raw):
            return int(raw)
        raise ConfigError(f"{where}: expected an integer, got {raw}")
    if kind == "float":
        if _NUMBER_RE.match(raw):
            return float(raw)
        raise ConfigError(f"{where}: expected a number, got {raw}")
    if kind == "float_list":
        if raw == '""' or raw == "":
            return []
        parts = [p.strip() for p in raw.split(",")]
        if not all(_NUMBER_RE.match(p) for p in parts):
            raise ConfigError(f"{where}: expected a comma-separated number list, got {raw}")
        return [float(p) for p in parts]
    raise AssertionError(f"unhandled kind {kind}")


def parse_config(text: str) -> SolverConfig:
    """Parse config text; unknown sections/keys and malformed values raise."""
    values: dict[str, object] = {}
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1].strip()
            if section not in _SCHEMA:
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key = value, got {stripped!r}")
        if section is None:
            raise ConfigError(f"line {lineno}: key outside of any section")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _SCHEMA[section]:
            raise ConfigError(f"line {lineno}: unknown key {key!r} in section [{section}]")
        kind, attr = _SCHEMA[section][key]
        if attr in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[attr] = _parse_scalar(raw, kind, f"line {lineno}, {section}.{key}")
    if "sigma" in values and "sigma_values" in values and values["sigma_values"]:
        raise ConfigError("give either sigma or sigma_values, not both")
    return SolverConfig(**values).validate()


def _fmt(value, kind: str) -> str:
    if kind == "str":
        return f'"{value}"'
    if kind == "bool":
        return "true" if value else "false"
    if kind == "int":
        return str(int(value))
    if kind == "float":
        return f"{float(value):.17g}"
    if kind == "float_list":
        return ",".join(f"{float(v):.17g}" for v in value)
    raise AssertionError(f"unhandled kind {kind}")


def serialize_config(config: SolverConfig) -> str:
    """Canonical text form; parse(serialize(c)) reproduces c exactly."""
    lines = []
    for section, keys in _SCHEMA.items():
        lines.append(f"[{section}]")
        for key, (kind, attr) in keys.items():
            lines.append(f"{key} = {_fmt(getattr(config, attr), kind)}")
        lines.append("")
    return "\n".join(lines)
