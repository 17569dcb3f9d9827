"""
Segmented joint atom-light Gaussian state.

Phase-space ordering: every segment contributes the pair ``(y, z)``.  Atom
segments come first (channel-major, longitudinal-minor), followed by the
in-flight light segments in emission order.  Segment ``i`` therefore owns
the covariance rows ``2*i`` and ``2*i + 1``.

Units are hbar = 1 throughout: angular momenta are plain numbers of the order
of the particle numbers.  A fully polarized coherent segment of ``N``
particles has ``Jx = N/2`` and ``var(Jy) = var(Jz) = N/4``.
"""

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidInput, InvalidOperation, UndefinedObservable
from .linalg import epsilon2, hermitian_min_eigenvalue, min_eigenvalue, symmetrize

#: populations below this emit a :class:`GroupContractionWarning`
MIN_SEGMENT_POPULATION = 100.0


class GroupContractionWarning(UserWarning):
    """A segment holds too few particles for the large-N (contracted) algebra."""


@dataclass(frozen=True)
class SegmentLayout:
    """K transverse channels with L longitudinal atom segments each.

    ``channel_areas`` are the interaction cross sections (m^2) of the
    channels; their sum is the total cross section.
    """

    channels: int
    atom_segments: int
    channel_areas: tuple

    def __post_init__(self):
        if self.channels < 1 or self.atom_segments < 1:
            raise InvalidInput("layout needs at least one channel and one atom segment")
        areas = tuple(float(a) for a in self.channel_areas)
        if len(areas) != self.channels:
            raise InvalidInput(
                f"{len(areas)} channel areas given for {self.channels} channels"
            )
        if any(not np.isfinite(a) or a <= 0 for a in areas):
            raise InvalidInput("channel areas must be positive")
        object.__setattr__(self, "channel_areas", areas)

    @classmethod
    def uniform(cls, total_area, channels=1, atom_segments=1):
        return cls(channels, atom_segments, (total_area / channels,) * channels)

    @property
    def total_area(self):
        return float(sum(self.channel_areas))


@dataclass(frozen=True)
class ObservableSpec:
    """Linear observable ``p . v`` over the phase-space vector."""

    coefficients: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.coefficients, dtype=float).ravel()
        if not np.any(p != 0):
            raise InvalidInput("observable needs at least one nonzero coefficient")
        object.__setattr__(self, "coefficients", p)


@dataclass
class GaussianState:
    """Mean vector, covariance matrix and classical amplitudes of all segments.

    Treat instances as values: module-level operations return new states.
    ``light_buffered`` marks segments that already reached a detector without
    time resolution and are held until the end of the pulse.
    """

    layout: SegmentLayout
    mean: np.ndarray
    cov: np.ndarray
    atom_channel: np.ndarray
    atom_number: np.ndarray
    jx: np.ndarray
    light_channel: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    light_number: np.ndarray = field(default_factory=lambda: np.zeros(0))
    sx: np.ndarray = field(default_factory=lambda: np.zeros(0))
    light_id: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    light_buffered: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=bool))
    next_light_id: int = 0

    @property
    def n_atom_segments(self):
        return len(self.jx)

    @property
    def n_light_segments(self):
        return len(self.sx)

    @property
    def dim(self):
        return 2 * (self.n_atom_segments + self.n_light_segments)

    def light_index(self, position):
        """Global segment index of the light segment at register ``position``."""
        if not 0 <= position < self.n_light_segments:
            raise InvalidInput(f"no light segment at position {position}")
        return self.n_atom_segments + position

    def atom_block(self):
        n = 2 * self.n_atom_segments
        return self.cov[:n, :n]

    def copy(self):
        return replace(
            self,
            mean=self.mean.copy(),
            cov=self.cov.copy(),
            atom_channel=self.atom_channel.copy(),
            atom_number=self.atom_number.copy(),
            jx=self.jx.copy(),
            light_channel=self.light_channel.copy(),
            light_number=self.light_number.copy(),
            sx=self.sx.copy(),
            light_id=self.light_id.copy(),
            light_buffered=self.light_buffered.copy(),
        )


def segment_dims(i):
    """Covariance indices ``[2i, 2i+1]`` of segment ``i``."""
    return np.array([2 * i, 2 * i + 1])


def _check_population(n, what):
    if not np.isfinite(n) or n <= 0:
        raise InvalidInput(f"{what} population must be positive, got {n}")
    if n < MIN_SEGMENT_POPULATION:
        warnings.warn(
            f"{what} segment holds only {n:g} particles; the large-N approximation "
            "needs many more",
            GroupContractionWarning,
            stacklevel=3,
        )


def init_coherent(layout, atoms_per_segment, photons_per_segment=(), light_channels=None):
    """
    Fully x-polarized coherent atoms (and optionally light) with zero mean.

    Parameters
    ----------
    layout : SegmentLayout
    atoms_per_segment : array_like, shape (K, L) or (K*L,)
        Atom number of every cell, channel-major.  A cell with exactly zero
        atoms is left out of the phase space (e.g. an empty channel).
    photons_per_segment : sequence of float
        Photon numbers of light segments already in flight.
    light_channels : sequence of int, optional
        Channel of each in-flight light segment (default channel 0).
    """
    cells = np.asarray(atoms_per_segment, dtype=float).reshape(-1)
    if cells.size != layout.channels * layout.atom_segments:
        raise InvalidInput(
            f"expected {layout.channels * layout.atom_segments} atom cells, got {cells.size}"
        )
    if np.any(~np.isfinite(cells)) or np.any(cells < 0):
        raise InvalidInput("atom populations must be non-negative and finite")
    occupied = np.flatnonzero(cells > 0)
    if occupied.size == 0:
        raise InvalidInput("at least one atom segment must be populated")
    for n in cells[occupied]:
        _check_population(n, "atom")
    atom_number = cells[occupied]
    atom_channel = occupied // layout.atom_segments

    state = GaussianState(
        layout=layout,
        mean=np.zeros(2 * occupied.size),
        cov=np.diag(np.repeat(atom_number / 4.0, 2)),
        atom_channel=atom_channel.astype(int),
        atom_number=atom_number.copy(),
        jx=atom_number / 2.0,
    )
    photons = list(photons_per_segment)
    channels = [0] * len(photons) if light_channels is None else list(light_channels)
    if len(channels) != len(photons):
        raise InvalidInput("light_channels must match photons_per_segment")
    for n, k in zip(photons, channels):
        state = append_light_segment(state, n, k)
    return state


def commutation_matrix(state):
    """
    Antisymmetric matrix ``Sigma`` with ``i*Sigma_ij = [v_i, v_j]``.

    Each segment contributes ``amp * [[0, 1], [-1, 0]]`` with ``amp`` its
    classical x amplitude; distinct segments commute.
    """
    amps = np.concatenate([state.jx, state.sx])
    return np.kron(np.diag(amps), epsilon2())


def append_light_segment(state, photons, channel=0):
    """Direct-sum a fresh coherent light segment of ``photons`` photons."""
    _check_population(float(photons), "light")
    if not 0 <= channel < state.layout.channels:
        raise InvalidInput(f"channel {channel} outside layout")
    d = state.dim
    cov = np.zeros((d + 2, d + 2))
    cov[:d, :d] = state.cov
    cov[d, d] = cov[d + 1, d + 1] = photons / 4.0
    return replace(
        state,
        mean=np.concatenate([state.mean, [0.0, 0.0]]),
        cov=cov,
        light_channel=np.append(state.light_channel, int(channel)),
        light_number=np.append(state.light_number, float(photons)),
        sx=np.append(state.sx, photons / 2.0),
        light_id=np.append(state.light_id, state.next_light_id),
        light_buffered=np.append(state.light_buffered, False),
        next_light_id=state.next_light_id + 1,
        atom_channel=state.atom_channel.copy(),
        atom_number=state.atom_number.copy(),
        jx=state.jx.copy(),
    )


def remove_segments(state, indices):
    """Drop light segments (global segment indices) from the state."""
    idx = np.unique(np.atleast_1d(np.asarray(indices, dtype=int)))
    na = state.n_atom_segments
    if np.any(idx < na):
        raise InvalidOperation("atom segments cannot be removed")
    if np.any(idx >= na + state.n_light_segments):
        raise InvalidInput("segment index out of range")
    drop = np.concatenate([segment_dims(i) for i in idx]) if idx.size else np.zeros(0, int)
    keep = np.setdiff1d(np.arange(state.dim), drop)
    lkeep = np.setdiff1d(np.arange(state.n_light_segments), idx - na)
    return replace(
        state,
        mean=state.mean[keep],
        cov=state.cov[np.ix_(keep, keep)],
        light_channel=state.light_channel[lkeep],
        light_number=state.light_number[lkeep],
        sx=state.sx[lkeep],
        light_id=state.light_id[lkeep],
        light_buffered=state.light_buffered[lkeep],
        atom_channel=state.atom_channel.copy(),
        atom_number=state.atom_number.copy(),
        jx=state.jx.copy(),
    )


def _coefficients(state, spec):
    p = spec.coefficients if isinstance(spec, ObservableSpec) else np.asarray(spec, float)
    if p.shape != (state.dim,):
        raise InvalidInput(f"observable has {p.size} coefficients, state dim is {state.dim}")
    return p


def observable_variance(state, spec):
    """Variance ``p^T cov p`` of a linear observable."""
    p = _coefficients(state, spec)
    return float(p @ state.cov @ p)


def total_jz(state, channel=None):
    """Observable summing ``Jz`` over all atom segments (optionally one channel)."""
    p = np.zeros(state.dim)
    for i, k in enumerate(state.atom_channel):
        if channel is None or k == channel:
            p[2 * i + 1] = 1.0
    return ObservableSpec(p)


def squeezing_parameter(state, channel=None):
    """``2 var(sum Jz) / sum Jx`` over all atoms, or over one channel."""
    sel = np.ones(state.n_atom_segments, bool) if channel is None else state.atom_channel == channel
    jx = float(np.sum(state.jx[sel]))
    if not sel.any() or jx <= 0:
        raise UndefinedObservable("squeezing parameter needs a positive Jx")
    return 2.0 * observable_variance(state, total_jz(state, channel)) / jx


def covariance_scale(state):
    return float(np.trace(state.cov))


def is_valid_covariance(state, rel_tol=1e-9):
    """Covariance PSD within ``rel_tol * trace``."""
    return min_eigenvalue(state.cov) >= -rel_tol * covariance_scale(state)


def uncertainty_min_eigenvalue(state):
    """Smallest eigenvalue of ``cov + (i/2) Sigma``; non-negative for physical states."""
    return hermitian_min_eigenvalue(state.cov, 0.5 * commutation_matrix(state))


def symmetrized(state):
    out = state.copy()
    out.cov = symmetrize(out.cov)
    return out
