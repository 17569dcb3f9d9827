"""
Projective homodyne measurement of light quadratures.

A measurement of ``S_theta = cos(theta) Sy + sin(theta) Sz`` summed over a set
of light segments conditions the Gaussian state by the Schur complement

    cov' = cov - cov (P cov P)^- cov

with ``P`` the rank-one projector onto the measured direction and ``^-`` the
Moore-Penrose pseudoinverse.  Measured values are not sampled; only the
second moments (and optionally the mean, given an outcome) are updated.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMeasurement, InvalidInput, InvalidOperation
from .linalg import PINV_RCOND, pseudoinverse, symmetrize
from .state import ObservableSpec, remove_segments

DETECTOR_KINDS = (
    "ideal",
    "no_time_resolution",
    "zero_dimensional_noise_after",
    "zero_dimensional_noise_before",
)


@dataclass(frozen=True)
class DetectorModel:
    """Which detector is simulated and which quadrature it measures.

    ``merge_buffer`` (no-time-resolution only) folds every buffered segment
    into one running-sum mode.  Later dynamics never touch exited light, so
    the sum carries exactly the information the final measurement uses, and
    the covariance stays small however long the pulse is.
    """

    kind: str = "ideal"
    theta: float = 0.0
    merge_buffer: bool = True

    def __post_init__(self):
        if self.kind not in DETECTOR_KINDS:
            raise InvalidInput(f"unknown detector kind {self.kind!r}; expected one of {DETECTOR_KINDS}")
        if not 0.0 <= self.theta < 2.0 * np.pi:
            raise InvalidInput("theta must lie in [0, 2 pi)")

    @property
    def resolves_segments(self):
        return self.kind != "no_time_resolution"


@dataclass(frozen=True)
class Projector:
    """Rank-one projector onto a measured light quadrature."""

    spec: ObservableSpec

    @property
    def basis(self):
        p = self.spec.coefficients
        return (p / np.linalg.norm(p))[:, None]

    @property
    def matrix(self):
        u = self.basis
        return u @ u.T


def _light_positions(state, segment_indices):
    idx = np.atleast_1d(np.asarray(segment_indices, dtype=int))
    if idx.size == 0:
        raise InvalidInput("empty segment set")
    pos = idx - state.n_atom_segments
    if np.any(pos < 0) or np.any(pos >= state.n_light_segments):
        raise InvalidInput("measured segments must be in-flight light segments")
    return idx, pos


def build_projector(state, segment_indices, theta=0.0):
    """Projector for ``sum_i S_theta^(i)`` over the given light segments."""
    idx, _ = _light_positions(state, segment_indices)
    p = np.zeros(state.dim)
    for i in idx:
        p[2 * i] += np.cos(theta)
        p[2 * i + 1] += np.sin(theta)
    return Projector(ObservableSpec(p))


def conditional_update(state, projector, outcome=None):
    """
    Condition the state on measuring the projected observable.

    ``projector`` is a :class:`Projector` (fast path: the pseudoinverse is taken
    on its range) or any symmetric projection matrix (literal formula with a
    full-size pseudoinverse).  With ``outcome`` the mean is conditioned too,
    otherwise it is left at its prior value.
    """
    cov = state.cov
    scale = max(float(np.trace(cov)), np.finfo(float).tiny)
    out = state.copy()
    if isinstance(projector, Projector):
        U = projector.basis
        if U.shape[0] != state.dim:
            raise InvalidInput("projector dimension does not match state")
        G = U.T @ cov
        S = symmetrize(G @ U)
        w, V = np.linalg.eigh(S)
        if w.size == 0 or w[-1] <= 1e-14 * scale:
            raise DegenerateMeasurement("measured observable has zero variance")
        keep = w >= PINV_RCOND * w[-1]
        F = (V[:, keep] / np.sqrt(w[keep])).T @ G
        out.cov = symmetrize(cov - F.T @ F)
        if outcome is not None:
            resid = np.atleast_1d(outcome) - U.T @ state.mean
            gain = G.T @ (V[:, keep] / w[keep]) @ V[:, keep].T
            out.mean = state.mean + gain @ resid
        return out

    P = np.asarray(projector, dtype=float)
    if P.shape != cov.shape:
        raise InvalidInput("projector dimension does not match state")
    PgP = P @ cov @ P
    if np.max(np.abs(PgP)) <= 1e-14 * scale:
        raise DegenerateMeasurement("measured observable has zero variance")
    pinv = pseudoinverse(PgP)
    out.cov = symmetrize(cov - cov @ pinv @ cov.T)
    if outcome is not None:
        out.mean = state.mean + cov @ pinv @ (np.asarray(outcome, float) - P @ state.mean)
    return out


def _merge_into(state, target, source):
    """Replace light segment ``target`` by the sum ``target + source`` and drop ``source``."""
    out = state.copy()
    a, s = 2 * target, 2 * source
    for off in (0, 1):
        out.cov[a + off, :] += out.cov[s + off, :]
        out.cov[:, a + off] += out.cov[:, s + off]
        out.mean[a + off] += out.mean[s + off]
    na = state.n_atom_segments
    out.sx[target - na] += out.sx[source - na]
    out.light_number[target - na] += out.light_number[source - na]
    return remove_segments(out, [source])


def detect(state, detector, segment_indices):
    """
    Hand exiting light segments to the detector.

    Several indices are detected together, as a large-area detector adds the
    channels at one longitudinal position.  A resolving detector conditions
    and removes them at once; a detector without time resolution buffers them
    until :func:`finish_pulse`.
    """
    idx, pos = _light_positions(state, segment_indices)
    if np.any(state.light_buffered[pos]):
        raise InvalidOperation("segment already detected")
    if detector.resolves_segments:
        proj = build_projector(state, idx, detector.theta)
        return remove_segments(conditional_update(state, proj), idx)

    out = state.copy()
    out.light_buffered[pos] = True
    if not detector.merge_buffer:
        return out
    held = np.flatnonzero(out.light_buffered) + out.n_atom_segments
    target = int(held[0])
    # merging from the back keeps the remaining indices valid
    for source in sorted(held[1:], reverse=True):
        out = _merge_into(out, target, int(source))
    return out


def buffered_segments(state):
    return np.flatnonzero(state.light_buffered) + state.n_atom_segments


def finish_pulse(state, detector):
    """Measure the summed buffered segments (end of pulse) and remove them."""
    held = buffered_segments(state)
    if held.size == 0:
        return state
    proj = build_projector(state, held, detector.theta)
    return remove_segments(conditional_update(state, proj), held)
