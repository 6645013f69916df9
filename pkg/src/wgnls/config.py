"""TOML run configuration.

Example::

    curve = { name = "circle", params = {} }
    eps_list = [0.2, 0.1, 0.05, 0.025]
    lambda = 1.0
    grid = { n1 = 64, n2 = 8 }
    dt_rule = "resolve"
    t_end = 1.0
    data_family = "tensor_plus_excited"
    output_dir = "out/circle"

Unknown keys are rejected.
"""

from dataclasses import dataclass, field
import os

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from .errors import ConfigError, WaveguideError
from .geometry import BUILTIN, CLOSED, OPEN, builtin_curve
from .solver2d import FAMILIES

DT_RULES = ("resolve", "stability")

_KEYS = {
    "curve", "domain_kind", "L_box", "eps_list", "lambda", "alpha", "grid", "dt", "dt_rule",
    "t_end", "snapshot_times", "n_snapshots", "data_family", "data_params", "output_dir",
    "seed", "eps0", "mass_drift_bound", "refine",
}


@dataclass
class SimConfig:
    curve_name: str
    curve_params: dict
    eps_list: list
    lam: float
    n1: int
    n2: int
    output_dir: str
    domain_kind: str = CLOSED
    L_box: float | None = None
    alpha: float = 1.0
    dt: float | None = None
    dt_rule: str | None = "resolve"
    t_end: float = 1.0
    snapshot_times: list = field(default_factory=list)
    n_snapshots: int = 21
    data_family: str = "tensor_smooth"
    data_params: dict = field(default_factory=dict)
    seed: int = 0
    eps0: float | None = None
    mass_drift_bound: float = 1e-6
    refine: bool = True
    source: str | None = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.alpha != 1:
            raise ConfigError(f"alpha must be 1 (the critical scaling), got {self.alpha}")
        if self.curve_name not in BUILTIN:
            raise ConfigError(f"unknown curve {self.curve_name!r}; built-ins are {sorted(BUILTIN)}")
        if self.domain_kind not in (CLOSED, OPEN):
            raise ConfigError(f"domain_kind must be {CLOSED!r} or {OPEN!r}")
        if self.domain_kind == OPEN and self.L_box is None:
            raise ConfigError("open curves need L_box")
        eps = np.asarray(self.eps_list, dtype=float)
        if eps.size == 0 or np.any(eps <= 0):
            raise ConfigError("eps_list must be a non-empty list of positive numbers")
        if np.any(np.diff(eps) >= 0):
            raise ConfigError("eps_list must be strictly decreasing")
        if (self.dt is None) == (self.dt_rule is None):
            raise ConfigError("give exactly one of dt and dt_rule")
        if self.dt is not None and not self.dt > 0:
            raise ConfigError("dt must be positive")
        if self.dt_rule is not None and self.dt_rule not in DT_RULES:
            raise ConfigError(f"dt_rule must be one of {DT_RULES}")
        if not self.t_end >= 0:
            raise ConfigError("t_end must be >= 0")
        if self.snapshot_times:
            ts = np.asarray(self.snapshot_times, dtype=float)
            if np.any(ts < 0) or np.any(ts > self.t_end) or np.any(np.diff(ts) < 0):
                raise ConfigError("snapshot_times must be sorted and inside [0, t_end]")
        elif self.n_snapshots < 1:
            raise ConfigError("n_snapshots must be >= 1")
        if self.data_family not in FAMILIES:
            raise ConfigError(f"data_family must be one of {FAMILIES}")
        if not self.mass_drift_bound > 0:
            raise ConfigError("mass_drift_bound must be positive")
        if not self.output_dir:
            raise ConfigError("output_dir is required")
        curve = self.curve()
        if curve.domain_kind != self.domain_kind:
            raise ConfigError(f"curve {self.curve_name!r} is {curve.domain_kind}, config says {self.domain_kind}")
        eps0 = curve.default_eps0(self.eps0)
        if eps[0] >= eps0:
            raise ConfigError(f"eps {eps[0]} is not below the geometry limit eps0={eps0:.6g}")

    def curve(self):
        try:
            return builtin_curve(self.curve_name, self.curve_params, self.L_box)
        except WaveguideError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def length1(self):
        return 2 * np.pi if self.domain_kind == CLOSED else float(self.L_box)

    def times(self):
        if self.snapshot_times:
            return [float(t) for t in self.snapshot_times]
        if self.n_snapshots == 1:
            return [float(self.t_end)]
        return list(np.linspace(0.0, self.t_end, self.n_snapshots))


def from_dict(data, source=None):
    unknown = set(data) - _KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("curve", "eps_list", "lambda", "grid", "output_dir"):
        if key not in data:
            raise ConfigError(f"missing required key {key!r}")
    curve = data["curve"]
    if isinstance(curve, str):
        curve = {"name": curve}
    if not isinstance(curve, dict) or set(curve) - {"name", "params"} or "name" not in curve:
        raise ConfigError("curve must be a table {name, params}")
    grid = data["grid"]
    if not isinstance(grid, dict) or set(grid) != {"n1", "n2"}:
        raise ConfigError("grid must be a table with exactly n1 and n2")
    dt = data.get("dt")
    dt_rule = data.get("dt_rule", None if dt is not None else "resolve")
    try:
        return SimConfig(
            curve_name=str(curve["name"]),
            curve_params=dict(curve.get("params", {})),
            eps_list=[float(e) for e in data["eps_list"]],
            lam=float(data["lambda"]),
            n1=int(grid["n1"]),
            n2=int(grid["n2"]),
            output_dir=str(data["output_dir"]),
            domain_kind=str(data.get("domain_kind", OPEN if "L_box" in data else CLOSED)),
            L_box=None if data.get("L_box") is None else float(data["L_box"]),
            alpha=float(data.get("alpha", 1)),
            dt=None if dt is None else float(dt),
            dt_rule=dt_rule,
            t_end=float(data.get("t_end", 1.0)),
            snapshot_times=[float(t) for t in data.get("snapshot_times", [])],
            n_snapshots=int(data.get("n_snapshots", 21)),
            data_family=str(data.get("data_family", "tensor_smooth")),
            data_params=dict(data.get("data_params", {})),
            seed=int(data.get("seed", 0)),
            eps0=None if data.get("eps0") is None else float(data["eps0"]),
            mass_drift_bound=float(data.get("mass_drift_bound", 1e-6)),
            refine=bool(data.get("refine", True)),
            source=source,
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad config value: {exc}") from exc


def load(path):
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    cfg = from_dict(data, source=os.path.abspath(path))
    if not os.path.isabs(cfg.output_dir):
        cfg.output_dir = os.path.join(os.path.dirname(os.path.abspath(path)), cfg.output_dir)
    return cfg
