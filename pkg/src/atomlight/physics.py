"""
Atomic-physics coefficients from SI inputs.

Frequencies are angular (rad/s) inside this module; the species file and the
scenario config accept Hz.  The coupling returned by :func:`coupling_g` is the
dimensionless per-segment constant ``hbar^2 g`` that multiplies the
hbar = 1 angular momenta.
"""

import configparser
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
from scipy import constants

from .errors import ConfigError, InvalidInput, ResonancePole, TimeStepTooLarge

TWO_PI = 2.0 * np.pi

_SPECIES_KEYS = (
    "linewidth_hz",
    "wavelength_m",
    "splitting_f1_hz",
    "splitting_f2_hz",
    "mass_kg",
    "lande_gf",
)


class DetuningWarning(UserWarning):
    """Detuning is not large compared to the natural linewidth."""


@dataclass(frozen=True)
class AtomicSpecies:
    linewidth: float  # Gamma, rad/s
    wavelength: float  # m
    splittings: tuple  # (Delta_{0,0}, Delta_{0,1}, Delta_{0,2}), rad/s
    mass: float  # kg
    lande_gf: float
    name: str = ""

    def __post_init__(self):
        vals = (self.linewidth, self.wavelength, self.mass) + tuple(self.splittings[1:])
        if any(not np.isfinite(v) or v <= 0 for v in vals):
            raise InvalidInput("species parameters must be positive")
        if len(self.splittings) != 3 or self.splittings[0] != 0.0:
            raise InvalidInput("splittings must be (0, Delta_01, Delta_02)")


@dataclass(frozen=True)
class BeamParams:
    """Linearly x-polarized probe: photon flux (1/s), detuning (rad/s), area (m^2)."""

    flux: float
    detuning: float
    area: float

    def __post_init__(self):
        if not self.flux > 0 or not self.area > 0:
            raise InvalidInput("flux and area must be positive")
        if not np.isfinite(self.detuning):
            raise InvalidInput("detuning must be finite")


def load_species(path=None):
    """
    Read a species INI file (section ``[species]``).

    With no path the bundled Rb-87 D2 data are used.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        if path is None:
            text = resources.files("atomlight").joinpath("data/rb87_d2.ini").read_text()
            parser.read_string(text, source="rb87_d2.ini")
        else:
            with open(path) as fh:
                parser.read_file(fh, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read species file {path}: {exc}") from exc
    if "species" not in parser:
        raise ConfigError(f"{path}: missing [species] section")
    sec = parser["species"]
    missing = [k for k in _SPECIES_KEYS if k not in sec]
    if missing:
        raise ConfigError(f"{path}: missing species keys {missing}")
    try:
        vals = {k: sec.getfloat(k) for k in _SPECIES_KEYS}
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return AtomicSpecies(
        linewidth=TWO_PI * vals["linewidth_hz"],
        wavelength=vals["wavelength_m"],
        splittings=(0.0, TWO_PI * vals["splitting_f1_hz"], TWO_PI * vals["splitting_f2_hz"]),
        mass=vals["mass_kg"],
        lande_gf=vals["lande_gf"],
        name=sec.get("name", Path(path).stem if path else "Rb87 D2"),
    )


def _deltas(species, detuning):
    """``delta_F'(Delta) = 1 / (Delta + Delta_{0,F'})`` for F' = 0, 1, 2."""
    shifted = np.array([detuning + s for s in species.splittings])
    if np.any(shifted == 0.0):
        raise ResonancePole(f"detuning {detuning} rad/s hits an excited-state resonance")
    if np.any(np.abs(shifted) < 10.0 * species.linewidth):
        warnings.warn(
            "detuning within 10 linewidths of a resonance; far-detuned formulas are inaccurate",
            DetuningWarning,
            stacklevel=3,
        )
    return 1.0 / shifted


def coupling_g(species, beam, segment_area, detuning=None):
    """
    Dimensionless QND coupling of one segment.

    ``(1/A_seg) (Gamma lambda^2 / 16 pi) (-4 d0 - 5 d1 + 5 d2)``.  ``detuning``
    overrides the beam detuning for a segment (local light shift).
    """
    if not segment_area > 0:
        raise InvalidInput("segment area must be positive")
    d0, d1, d2 = _deltas(species, beam.detuning if detuning is None else detuning)
    pref = species.linewidth * species.wavelength**2 / (16.0 * np.pi)
    return pref * (-4.0 * d0 - 5.0 * d1 + 5.0 * d2) / segment_area


def scattering_cross_section(species, detuning):
    """Off-resonant scattering cross section (m^2) for far detuning."""
    d0, d1, d2 = _deltas(species, detuning)
    pref = species.wavelength**2 / TWO_PI * species.linewidth**2 / 32.0
    return pref * (4.0 * d0**2 + 5.0 * d1**2 + 7.0 * d2**2)


def scattering_probs(photons, atoms, area, sigma):
    """
    Per-step scattering probabilities ``(eta, eps)``.

    ``eta = N_L sigma / A`` is the probability for an atom to scatter a photon,
    ``eps = N_A sigma / A`` the probability for a photon to be scattered.
    """
    if photons < 0 or atoms < 0 or not area > 0 or sigma < 0:
        raise InvalidInput("scattering inputs must be non-negative, area positive")
    eta = photons * sigma / area
    eps = atoms * sigma / area
    if eta >= 1.0 or eps >= 1.0:
        raise TimeStepTooLarge(f"scattering probability >= 1 (eta={eta:.3g}, eps={eps:.3g})")
    return eta, eps


def characteristic_time(g_total, atoms, flux):
    """Time (s) at which the QND rotation signal equals photon shot noise."""
    if g_total == 0 or not atoms > 0 or not flux > 0:
        raise InvalidInput("coupling, atom number and flux must be nonzero/positive")
    return 4.0 / (g_total**2 * atoms * flux)


def rms_velocity(temperature, mass):
    return np.sqrt(3.0 * constants.k * temperature / mass)


def mixing_rate(temperature, mass, segment_area):
    """Rate (1/s) at which an ideal-gas atom crosses out of a segment of area ``A``."""
    if temperature < 0 or not mass > 0 or not segment_area > 0:
        raise InvalidInput("mixing inputs must be positive")
    return float(rms_velocity(temperature, mass) / np.sqrt(6.0 * np.pi * segment_area))


def mixing_probability(temperature, mass, segment_area, tau):
    """
    Probability per step that an atom leaves its segment, from kinetic gas theory.

    ``m = v_rms tau / sqrt(6 pi A)`` with ``v_rms = sqrt(3 kB T / m)``.
    """
    if not tau > 0:
        raise InvalidInput("tau must be positive")
    m = mixing_rate(temperature, mass, segment_area) * tau
    if m > 0.5:
        raise TimeStepTooLarge(f"mixing probability {m:.3g} exceeds 1/2")
    return float(m)


def rotation_angle(bz, lande_gf, tau):
    """Larmor rotation angle ``mu_B g_F B_z tau / hbar`` (rad)."""
    return constants.physical_constants["Bohr magneton"][0] * lande_gf * np.asarray(bz) * tau / constants.hbar
