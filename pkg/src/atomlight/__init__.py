"""
atomlight: covariance-matrix simulation of segmented atom-light interfaces.

Atoms and light are cut into small homogeneous segments, each described by
one canonical (y, z) pair.  Interaction, scattering, atomic motion and
homodyne detection act on the joint covariance matrix as Gaussian maps.
"""

from .config import ScenarioConfig, load_config, parse_config
from .errors import (
    AtomLightError,
    ConfigError,
    DegenerateMeasurement,
    InvalidInput,
    InvalidOperation,
    NoConvergence,
    ResonancePole,
    TimeStepTooLarge,
    UndefinedObservable,
)
from .maps import GaussianMap, apply_map, validate_gcp
from .measurement import DetectorModel, build_projector, conditional_update, detect
from .physics import AtomicSpecies, BeamParams, characteristic_time, coupling_g, load_species
from .scenarios import SCENARIOS, SeriesSet, run_scenario, write_series
from .scheduler import Experiment, StepPlan, run, select_tau, simulate
from .state import GaussianState, SegmentLayout, init_coherent, squeezing_parameter

__version__ = "0.1.0"
