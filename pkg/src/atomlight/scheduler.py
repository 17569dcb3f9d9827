"""
Time-stepped pipeline.

Each step of length ``tau`` injects one light segment of ``Phi_k tau``
photons per illuminated channel.  The segment crosses the atom segments of
its channel in longitudinal order, with the QND coupling and the photon
scattering interleaved per atom segment.  Mixing and magnetic rotation act
once per step.  After its transit the segment reaches the (large-area)
detector.
"""

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidInput, NoConvergence, TimeStepTooLarge
from .maps import gcp_min_eigenvalue, gcp_scale, interact, mix, rotate, scatter
from .measurement import DetectorModel, buffered_segments, detect, finish_pulse
from .physics import (
    BeamParams,
    characteristic_time,
    coupling_g,
    load_species,
    mixing_rate,
    scattering_cross_section,
    scattering_probs,
    TWO_PI,
)
from .state import (
    SegmentLayout,
    append_light_segment,
    init_coherent,
    is_valid_covariance,
    observable_variance,
    squeezing_parameter,
    total_jz,
)

#: per-step probabilities above this trigger a warning
SMALL_STEP = 0.1


class StepSizeWarning(UserWarning):
    """Per-step scattering or mixing probability is not small."""


@dataclass(frozen=True)
class Experiment:
    """Physical parameters of one run, in the units the pipeline uses."""

    layout: SegmentLayout
    atoms: np.ndarray  # (K, L) atom numbers
    flux: np.ndarray  # (K,) photons per second per channel
    coupling: np.ndarray  # (K,) dimensionless g per segment
    sigma: float  # scattering cross section, m^2
    t0: float
    decoherence: bool = True
    rho: float = 1.0
    photon_loss: bool = False
    mixing_rate: float = 0.0  # 1/s
    bz: float = 0.0
    lande_gf: float = 0.0
    g_total: float = 0.0

    @classmethod
    def from_config(cls, config):
        species = load_species(config.species_file)
        beam = BeamParams(config.photon_flux, TWO_PI * config.detuning_hz, config.area_m2)
        areas = tuple(f * config.area_m2 for f in config.area_fractions)
        layout = SegmentLayout(config.channels, config.atom_segments, areas)
        g_total = coupling_g(species, beam, config.area_m2)
        t0 = characteristic_time(g_total, config.atom_number, config.photon_flux)
        atoms = np.outer(config.atom_fractions, np.full(config.atom_segments, 1.0 / config.atom_segments))
        if not config.mixing:
            rate = 0.0
        elif config.mixing_rate_per_t0 is not None:
            rate = config.mixing_rate_per_t0 / t0
        else:
            # kinetic rate for one channel's cross section
            rate = mixing_rate(config.temperature_k, species.mass, min(areas))
        return cls(
            layout=layout,
            atoms=atoms * config.atom_number,
            flux=np.asarray(config.light_fractions) * config.photon_flux,
            coupling=np.array([coupling_g(species, beam, a) for a in areas]),
            sigma=scattering_cross_section(species, beam.detuning),
            t0=t0,
            decoherence=config.decoherence,
            rho=config.rho,
            photon_loss=config.photon_loss,
            mixing_rate=rate,
            bz=config.bz_tesla,
            lande_gf=species.lande_gf,
            g_total=g_total,
        )

    def initial_state(self):
        return init_coherent(self.layout, self.atoms)

    def mixing_probability(self, tau):
        m = self.mixing_rate * tau
        if m > 0.5:
            raise TimeStepTooLarge(f"mixing probability {m:.3g} per step exceeds 1/2")
        return m

    def eta(self, tau):
        """Atomic scattering probability per step in every illuminated channel."""
        return self.flux * tau * self.sigma / np.asarray(self.layout.channel_areas)


@dataclass(frozen=True)
class StepPlan:
    tau: float
    total_steps: int
    effect_order: tuple = ("interaction", "loss", "mixing", "magnetic")
    detector: DetectorModel = field(default_factory=DetectorModel)

    def __post_init__(self):
        if not self.tau > 0 or self.total_steps < 0:
            raise InvalidInput("tau must be positive and total_steps non-negative")
        order = tuple(self.effect_order)
        if len(set(order)) != len(order):
            raise InvalidInput("each effect may appear once per step")
        object.__setattr__(self, "effect_order", order)

    @property
    def noise_first(self):
        order = self.effect_order
        return "loss" in order and "interaction" in order and order.index("loss") < order.index("interaction")


@dataclass
class MapMonitor:
    """Counts complete-positivity and covariance checks made during a run."""

    rel_tol: float = 1e-9
    maps_checked: int = 0
    map_failures: list = field(default_factory=list)
    states_checked: int = 0
    state_failures: int = 0

    def check_map(self, gmap, label):
        self.maps_checked += 1
        lam = gcp_min_eigenvalue(gmap)
        if lam < -self.rel_tol * gcp_scale(gmap):
            self.map_failures.append((label, lam))

    def check_state(self, state):
        self.states_checked += 1
        if not is_valid_covariance(state, self.rel_tol):
            self.state_failures += 1

    @property
    def ok(self):
        return not self.map_failures and self.state_failures == 0


def _transit(state, exp, plan, segments, monitor):
    """Carry each channel's new light segment through its atom segments."""
    ops = ("loss", "interaction") if plan.noise_first else ("interaction", "loss")
    ops = [op for op in ops if op in plan.effect_order and (op != "loss" or exp.decoherence)]
    for k, light in segments.items():
        area = exp.layout.channel_areas[k]
        pos = light - state.n_atom_segments
        for a in np.flatnonzero(state.atom_channel == k):
            a = int(a)
            for op in ops:
                if op == "interaction":
                    state, gmap = interact(state, exp.coupling[k], a, light)
                else:
                    atoms = state.atom_number[a] if exp.photon_loss else 0.0
                    eta, eps = scattering_probs(state.light_number[pos], atoms, area, exp.sigma)
                    state, gmap = scatter(state, eta, eps, exp.rho, a, light)
                if monitor is not None:
                    monitor.check_map(gmap, op)
    return state


def step(state, plan, exp, step_index=0, monitor=None):
    """
    Advance the state by one time step.

    Returns the new state.  ``monitor`` (a :class:`MapMonitor`) receives every
    map that was applied and the resulting covariance.
    """
    segments = {}
    for k in range(exp.layout.channels):
        if exp.flux[k] > 0:
            state = append_light_segment(state, exp.flux[k] * plan.tau, k)
            segments[k] = state.n_atom_segments + state.n_light_segments - 1

    done_transit = False
    for effect in plan.effect_order:
        if effect in ("interaction", "loss"):
            if done_transit:
                continue
            done_transit = True
            state = _transit(state, exp, plan, segments, monitor)
        elif effect == "mixing":
            m = exp.mixing_probability(plan.tau)
            if m > 0:
                state = _mix_channels(state, m, monitor)
        elif effect == "magnetic" and exp.bz != 0.0:
            state = rotate(state, exp.bz, exp.lande_gf, plan.tau)

    if segments:
        state = detect(state, plan.detector, sorted(segments.values()))
    if monitor is not None:
        monitor.check_state(state)
    return state


def _mix_channels(state, m, monitor):
    """Mix atom segments with equal longitudinal index between neighbouring channels."""
    layout = state.layout
    L = layout.atom_segments
    cell = {}
    # atom segments are stored channel-major; recover (k, l) of each
    for k in range(layout.channels):
        for l, a in enumerate(np.flatnonzero(state.atom_channel == k)):
            cell[(k, l % L)] = int(a)
    for k in range(layout.channels - 1):
        for l in range(L):
            if (k, l) in cell and (k + 1, l) in cell:
                state, gmap = mix(state, m, cell[(k, l)], cell[(k + 1, l)])
                if monitor is not None:
                    monitor.check_map(gmap, "mixing")
    return state


@dataclass
class Trajectory:
    """Observables sampled after every step (index 0 is the initial state)."""

    label: str
    t: np.ndarray
    t0: float
    xi2_total: np.ndarray
    xi2_channels: np.ndarray  # (samples, K); nan where a channel holds no atoms
    var_jz_total: np.ndarray
    final_state: object = None
    monitor: MapMonitor = None

    @property
    def t_over_t0(self):
        return self.t / self.t0


def _observe(state, channels):
    xi_k = np.full(channels, np.nan)
    for k in range(channels):
        if np.any(state.atom_channel == k):
            xi_k[k] = squeezing_parameter(state, k)
    return squeezing_parameter(state), xi_k, observable_variance(state, total_jz(state))


def _observe_pulse_end(state, detector, channels):
    if buffered_segments(state).size:
        state = finish_pulse(state, detector)
    return _observe(state, channels)


def plan_warnings(exp, tau):
    eta = float(np.max(exp.eta(tau)))
    m = exp.mixing_rate * tau
    if (exp.decoherence and eta >= SMALL_STEP) or m >= SMALL_STEP:
        warnings.warn(
            f"tau={tau:.3g}s gives eta={eta:.3g}, m={m:.3g} per step; results depend on effect order",
            StepSizeWarning,
            stacklevel=3,
        )


def simulate(exp, plan, label="", check=False):
    """Run ``plan.total_steps`` steps from the coherent initial state."""
    plan_warnings(exp, plan.tau)
    state = exp.initial_state()
    K = exp.layout.channels
    monitor = MapMonitor() if check else None
    n = plan.total_steps + 1
    xi = np.empty(n)
    xik = np.empty((n, K))
    var = np.empty(n)
    xi[0], xik[0], var[0] = _observe(state, K)
    for i in range(plan.total_steps):
        state = step(state, plan, exp, i, monitor)
        xi[i + 1], xik[i + 1], var[i + 1] = _observe_pulse_end(state, plan.detector, K)
    state = finish_pulse(state, plan.detector)
    return Trajectory(label, plan.tau * np.arange(n), exp.t0, xi, xik, var, state, monitor)


def zero_dimensional(exp, times, noise_first, label="", check=False):
    """
    Pulse treated as one light segment interacting once (no longitudinal dynamics).

    For each pulse duration ``t`` the whole pulse couples to the atoms in one
    shot; scattering is applied after (``noise_first=False``) or before the
    interaction, then the pulse is measured.  The single-shot scattering
    probability is ``1 - exp(-N sigma / A)`` so that long pulses stay valid.
    """
    if exp.layout.channels != 1 or exp.layout.atom_segments != 1:
        raise InvalidInput("zero-dimensional model needs one channel and one atom segment")
    times = np.asarray(times, dtype=float)
    area = exp.layout.channel_areas[0]
    xi = np.empty(times.size)
    var = np.empty(times.size)
    monitor = MapMonitor() if check else None
    det = DetectorModel("ideal")
    for i, t in enumerate(times):
        state = exp.initial_state()
        if t > 0:
            state = append_light_segment(state, exp.flux[0] * t, 0)
            light = state.n_atom_segments
            ops = ("loss", "interaction") if noise_first else ("interaction", "loss")
            for op in ops:
                if op == "interaction":
                    state, gmap = interact(state, exp.coupling[0], 0, light)
                elif exp.decoherence:
                    eta = -np.expm1(-state.light_number[0] * exp.sigma / area)
                    eps = -np.expm1(-state.atom_number[0] * exp.sigma / area) if exp.photon_loss else 0.0
                    state, gmap = scatter(state, eta, eps, exp.rho, 0, light)
                else:
                    continue
                if monitor is not None:
                    monitor.check_map(gmap, op)
            state = detect(state, det, [light])
            if monitor is not None:
                monitor.check_state(state)
        xi[i], _, var[i] = _observe(state, 1)
    return Trajectory(label, times, exp.t0, xi, xi[:, None].copy(), var, None, monitor)


def resolve_steps(config, exp, tau):
    if config.total_steps is not None:
        return config.total_steps
    return max(1, int(round(config.total_time_t0 * exp.t0 / tau)))


def _ordered(config, noise_first):
    order = [e for e in config.effect_order if e not in ("interaction", "loss")]
    return tuple(["loss", "interaction"] if noise_first else ["interaction", "loss"]) + tuple(order)


def ordering_gap(config, tau, exp=None):
    """Relative difference of the final squeezing between the two effect orders."""
    exp = Experiment.from_config(config) if exp is None else exp
    steps = max(1, int(round(config.total_time_t0 * exp.t0 / tau)))
    det = DetectorModel(config.detector if config.detector in ("ideal", "no_time_resolution") else "ideal", config.theta)
    finals = []
    for noise_first in (False, True):
        plan = StepPlan(tau, steps, _ordered(config, noise_first), det)
        finals.append(simulate(exp, plan).xi2_total[-1])
    return abs(finals[0] - finals[1]) / abs(finals[0]), finals


def select_tau(config, rel_tol=None, tau_start_t0=0.1, max_halvings=20):
    """
    Halve tau until the two effect orders agree on the final squeezing.

    Starts from ``tau_start_t0`` (units of t0), first shrinking it until the
    per-step scattering and mixing probabilities are below 0.1.
    """
    rel_tol = config.tau_rel_tol if rel_tol is None else rel_tol
    if not rel_tol > 0:
        raise InvalidInput("rel_tol must be positive")
    exp = Experiment.from_config(config)
    tau = tau_start_t0 * exp.t0
    for _ in range(max_halvings + 1):
        eta = float(np.max(exp.eta(tau))) if exp.decoherence else 0.0
        if eta < SMALL_STEP and exp.mixing_rate * tau < SMALL_STEP:
            gap, _ = ordering_gap(config, tau, exp)
            if gap < rel_tol:
                return tau
        tau /= 2.0
    raise NoConvergence(f"effect order still matters after {max_halvings} halvings of tau")


def run(config, label=None, check=False):
    """
    Simulate one scenario configuration.

    Zero-dimensional detector kinds evaluate the single-shot model at every
    sample time of the pipeline's time grid.
    """
    exp = Experiment.from_config(config)
    tau = select_tau(config) if config.tau_t0 is None else config.tau_t0 * exp.t0
    steps = resolve_steps(config, exp, tau)
    label = config.detector if label is None else label
    if config.detector.startswith("zero_dimensional"):
        single = replace(config, channels=1, atom_segments=1, atom_fractions=(1.0,),
                         light_fractions=(1.0,), area_fractions=(1.0,))
        exp1 = Experiment.from_config(single)
        return zero_dimensional(exp1, tau * np.arange(steps + 1),
                                config.detector.endswith("before"), label, check)
    det = DetectorModel(config.detector, config.theta)
    plan = StepPlan(tau, steps, tuple(config.effect_order), det)
    return simulate(exp, plan, label, check)
