"""
Scenario configuration: an INI file of flat ``key = value`` pairs.

Every key is optional; absent keys take the cold-atom defaults below (1e6
Rb-87 atoms at 30 uK, 1e14 photons/s detuned 1 GHz, 4 pi x 1e-10 m^2).

::

    [species]
    file = rb87_d2.ini            # relative to the config file; bundled if absent

    [beam]
    photon_flux = 1e14            # 1/s
    detuning_hz = 1e9             # from F=1 -> F'=0
    area_m2 = 1.2566370614359173e-09

    [atoms]
    number = 1e6
    temperature_k = 30e-6

    [layout]
    channels = 1
    atom_segments = 1             # longitudinal segments per channel
    atom_fractions = 1.0          # per channel, comma separated, sum 1
    light_fractions = 1.0
    area_fractions = 1.0

    [detector]
    kind = ideal                  # ideal | no_time_resolution | zero_dimensional_noise_after | ..._before
    theta = 0.0

    [noise]
    decoherence = true
    rho = 1.0
    photon_loss = false

    [mixing]
    enabled = false
    rate_per_t0 =                 # overrides the kinetic-theory rate
    sweep_per_t0 =                # fig4 grid; default 1e-3 .. 1e2, 6 log points

    [magnetic]
    bz_tesla = 0.0

    [run]
    tau_t0 = auto                 # step in units of t0, or auto
    tau_rel_tol = 1e-3
    total_time_t0 = 20
    steps =                       # overrides total_time_t0
    effect_order = interaction, loss, mixing, magnetic
    output =
"""

import configparser
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .measurement import DETECTOR_KINDS

EFFECTS = ("interaction", "loss", "mixing", "magnetic")


def _default_sweep():
    return tuple(np.logspace(-3.0, 2.0, 6))


@dataclass(frozen=True)
class ScenarioConfig:
    species_file: str = None
    photon_flux: float = 1e14
    detuning_hz: float = 1e9
    area_m2: float = 4.0 * np.pi * 1e-10
    atom_number: float = 1e6
    temperature_k: float = 30e-6
    channels: int = 1
    atom_segments: int = 1
    atom_fractions: tuple = None
    light_fractions: tuple = None
    area_fractions: tuple = None
    detector: str = "ideal"
    theta: float = 0.0
    decoherence: bool = True
    rho: float = 1.0
    photon_loss: bool = False
    mixing: bool = False
    mixing_rate_per_t0: float = None
    mixing_sweep_per_t0: tuple = field(default_factory=_default_sweep)
    bz_tesla: float = 0.0
    tau_t0: float = None
    tau_rel_tol: float = 1e-3
    total_time_t0: float = 20.0
    total_steps: int = None
    effect_order: tuple = EFFECTS
    output: str = None

    def __post_init__(self):
        k = self.channels
        for name in ("atom_fractions", "light_fractions", "area_fractions"):
            val = getattr(self, name)
            val = (1.0 / k,) * k if val is None else tuple(float(v) for v in val)
            object.__setattr__(self, name, val)
        self.validate()

    def validate(self):
        if self.channels < 1 or self.atom_segments < 1:
            raise ConfigError("layout.channels and layout.atom_segments must be >= 1")
        for name in ("atom_fractions", "light_fractions", "area_fractions"):
            val = getattr(self, name)
            if len(val) != self.channels:
                raise ConfigError(f"{name} needs one entry per channel ({self.channels})")
            if any(v < 0 for v in val):
                raise ConfigError(f"{name} must be non-negative")
            if abs(sum(val) - 1.0) > 1e-9:
                raise ConfigError(f"{name} must sum to 1, got {sum(val):.12g}")
        if any(v <= 0 for v in self.area_fractions):
            raise ConfigError("area_fractions must be positive")
        for name in ("photon_flux", "area_m2", "atom_number"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.temperature_k < 0:
            raise ConfigError("temperature_k must be non-negative")
        if self.detector not in DETECTOR_KINDS:
            raise ConfigError(f"detector.kind must be one of {DETECTOR_KINDS}")
        if not 0.0 <= self.theta < 2.0 * np.pi:
            raise ConfigError("detector.theta must lie in [0, 2 pi)")
        if not 0.0 <= self.rho <= 1.0:
            raise ConfigError("noise.rho must lie in [0, 1]")
        if not self.total_time_t0 > 0:
            raise ConfigError("run.total_time_t0 must be positive")
        if self.total_steps is not None and self.total_steps < 1:
            raise ConfigError("run.steps must be >= 1")
        if self.tau_t0 is not None and not self.tau_t0 > 0:
            raise ConfigError("run.tau_t0 must be positive")
        if not self.tau_rel_tol > 0:
            raise ConfigError("run.tau_rel_tol must be positive")
        if self.mixing_rate_per_t0 is not None and self.mixing_rate_per_t0 < 0:
            raise ConfigError("mixing.rate_per_t0 must be non-negative")
        if any(r < 0 for r in self.mixing_sweep_per_t0):
            raise ConfigError("mixing.sweep_per_t0 must be non-negative")
        order = tuple(self.effect_order)
        if len(set(order)) != len(order) or not set(order) <= set(EFFECTS):
            raise ConfigError(f"run.effect_order must list distinct effects from {EFFECTS}")


def _floats(text):
    text = text.strip()
    return tuple(float(v) for v in text.split(",")) if text else None


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt(conv):
    def parse(text):
        text = text.strip()
        return None if text == "" or text.lower() in ("auto", "none") else conv(text)
    return parse


def _words(text):
    return tuple(w.strip() for w in text.split(",") if w.strip())


# (section, key) -> (field name, parser)
_KEYS = {
    ("species", "file"): ("species_file", _opt(str)),
    ("beam", "photon_flux"): ("photon_flux", float),
    ("beam", "detuning_hz"): ("detuning_hz", float),
    ("beam", "area_m2"): ("area_m2", float),
    ("atoms", "number"): ("atom_number", float),
    ("atoms", "temperature_k"): ("temperature_k", float),
    ("layout", "channels"): ("channels", int),
    ("layout", "atom_segments"): ("atom_segments", int),
    ("layout", "atom_fractions"): ("atom_fractions", _floats),
    ("layout", "light_fractions"): ("light_fractions", _floats),
    ("layout", "area_fractions"): ("area_fractions", _floats),
    ("detector", "kind"): ("detector", str.strip),
    ("detector", "theta"): ("theta", float),
    ("noise", "decoherence"): ("decoherence", _bool),
    ("noise", "rho"): ("rho", float),
    ("noise", "photon_loss"): ("photon_loss", _bool),
    ("mixing", "enabled"): ("mixing", _bool),
    ("mixing", "rate_per_t0"): ("mixing_rate_per_t0", _opt(float)),
    ("mixing", "sweep_per_t0"): ("mixing_sweep_per_t0", _floats),
    ("magnetic", "bz_tesla"): ("bz_tesla", float),
    ("run", "tau_t0"): ("tau_t0", _opt(float)),
    ("run", "tau_rel_tol"): ("tau_rel_tol", float),
    ("run", "total_time_t0"): ("total_time_t0", float),
    ("run", "steps"): ("total_steps", _opt(int)),
    ("run", "effect_order"): ("effect_order", _words),
    ("run", "output"): ("output", _opt(str)),
}

def parse_config(text, source="<string>", base_dir=None):
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc

    values = {}
    for section in parser.sections():
        for key, raw in parser[section].items():
            try:
                name, conv = _KEYS[(section, key)]
            except KeyError:
                raise ConfigError(f"{source}: unknown key [{section}] {key}") from None
            try:
                val = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"{source}: [{section}] {key}: {exc}") from None
            if val is not None:
                values[name] = val
    if "species_file" in values and base_dir is not None:
        path = Path(values["species_file"])
        values["species_file"] = str(path if path.is_absolute() else Path(base_dir) / path)
    try:
        return ScenarioConfig(**values)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_config(path):
    """Read and validate a scenario file; missing keys get defaults."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, source=str(path), base_dir=path.parent)
