"""
Gaussian maps ``cov -> M cov M^T + N`` for the physical processes.

Maps are stored locally: ``indices`` lists the covariance rows they touch and
``M``, ``N`` act on that sub-block only (identity / zero elsewhere).  Every map
also carries the commutation blocks before and after, so it can be checked
against the complete-positivity bound.

The covariance here is the symmetrized second moment, for which a physical
state obeys ``cov + (i/2) Sigma >= 0``.  Accordingly a map is completely
positive iff ``N + (i/2)(Sigma' - M Sigma M^T) >= 0`` and the smallest
admissible noise is ``|(i/2)(Sigma' - M Sigma M^T)|``.  With that weight the
minimal noise of pure loss is exactly ``eta (1 - eta) N / 4``.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, InvalidOperation
from .linalg import antisymmetric_abs, epsilon2, hermitian_min_eigenvalue, symmetrize
from .physics import rotation_angle
from .state import segment_dims

#: weight of the commutator term in the complete-positivity bound
COMMUTATOR_WEIGHT = 0.5

#: small-angle limit for magnetic rotations
MAX_ROTATION = 0.1


class LargeRotationWarning(UserWarning):
    """Magnetic rotation per step leaves the small-angle regime."""


@dataclass(frozen=True)
class GaussianMap:
    indices: np.ndarray
    M: np.ndarray
    N: np.ndarray
    sigma_in: np.ndarray
    sigma_out: np.ndarray

    def embed(self, dim):
        """Full ``(M, N)`` acting on a ``dim``-dimensional phase space."""
        M = np.eye(dim)
        N = np.zeros((dim, dim))
        ix = np.ix_(self.indices, self.indices)
        M[ix] = self.M
        N[ix] = self.N
        return M, N


def _blocks(amplitudes):
    return np.kron(np.diag(np.asarray(amplitudes, dtype=float)), epsilon2())


def _dims(*segments):
    return np.concatenate([segment_dims(s) for s in segments])


def qnd_interaction_map(g, sx, jx, atom_segment, light_segment):
    """
    Linear transform of one QND step between an atom and a light segment.

    ``Sy <- Sy + g Sx Jz`` and ``Jy <- Jy + g Jx Sz``; both z components are
    untouched.  Returned as a noiseless map on ``[jy, jz, sy, sz]``.
    """
    T = np.eye(4)
    T[2, 1] = g * sx
    T[0, 3] = g * jx
    sigma = _blocks([jx, sx])
    return GaussianMap(_dims(atom_segment, light_segment), T, np.zeros((4, 4)), sigma, sigma)


def loss_decoherence_map(eta, eps, rho, atoms, photons, atom_segment, light_segment=None,
                         jx=None, sx=None):
    """
    Scattering map for one atom segment and (optionally) the light segment crossing it.

    ``M = (1-eta) I2 (+) (1-eps) I2``; noise ``eta(1-eta) N_A/4 + rho eta N_A/4``
    on the atoms and ``eps(1-eps) N_L/4`` on the light.  ``jx``/``sx`` are the
    current classical amplitudes (default: fully polarized, ``N/2``); the
    caller must scale them by ``1-eta`` / ``1-eps`` afterwards.
    """
    if not (0.0 <= eta < 1.0 and 0.0 <= eps < 1.0 and 0.0 <= rho <= 1.0):
        raise InvalidInput(f"probabilities out of range (eta={eta}, eps={eps}, rho={rho})")
    jx = atoms / 2.0 if jx is None else jx
    a_noise = (eta * (1.0 - eta) + rho * eta) * atoms / 4.0
    if light_segment is None:
        return GaussianMap(
            _dims(atom_segment),
            (1.0 - eta) * np.eye(2),
            a_noise * np.eye(2),
            _blocks([jx]),
            _blocks([(1.0 - eta) * jx]),
        )
    sx = photons / 2.0 if sx is None else sx
    l_noise = eps * (1.0 - eps) * photons / 4.0
    return GaussianMap(
        _dims(atom_segment, light_segment),
        np.diag([1.0 - eta, 1.0 - eta, 1.0 - eps, 1.0 - eps]),
        np.diag([a_noise, a_noise, l_noise, l_noise]),
        _blocks([jx, sx]),
        _blocks([(1.0 - eta) * jx, (1.0 - eps) * sx]),
    )


def mixing_matrix(m):
    return np.array([[1.0 - m, m], [m, 1.0 - m]])


def mixing_map(m, atoms, segments, jx=None):
    """
    Incoherent exchange of atoms between two segments with probability ``m``.

    ``atoms`` are the populations of the two segments; the noise scales with
    their sum so that two uncorrelated coherent segments stay coherent.
    """
    if not 0.0 <= m <= 0.5:
        raise InvalidInput(f"mixing probability {m} outside [0, 1/2]")
    atoms = np.asarray(atoms, dtype=float)
    jx = atoms / 2.0 if jx is None else np.asarray(jx, dtype=float)
    W = mixing_matrix(m)
    M = np.kron(W, np.eye(2))
    N = m * (1.0 - m) * atoms.sum() / 4.0 * np.kron(np.array([[1.0, -1.0], [-1.0, 1.0]]), np.eye(2))
    return GaussianMap(_dims(*segments), M, N, _blocks(jx), _blocks(W @ jx))


def minimal_noise(M, sigma, sigma_out):
    """Smallest symmetric noise making ``(M, N)`` completely positive."""
    M = np.asarray(M, dtype=float)
    diff = np.asarray(sigma_out, float) - M @ np.asarray(sigma, float) @ M.T
    return antisymmetric_abs(COMMUTATOR_WEIGHT * diff)


def gcp_min_eigenvalue(gmap):
    diff = gmap.sigma_out - gmap.M @ gmap.sigma_in @ gmap.M.T
    return hermitian_min_eigenvalue(gmap.N, COMMUTATOR_WEIGHT * diff)


def gcp_scale(gmap):
    return float(np.trace(gmap.N) + np.trace(antisymmetric_abs(gmap.sigma_out)))


def validate_gcp(gmap, tol=None):
    """
    Check the complete-positivity bound of a map.

    ``tol`` defaults to ``1e-9 * (tr N + tr|i Sigma'|)``.
    """
    if tol is None:
        tol = 1e-9 * gcp_scale(gmap)
    return gcp_min_eigenvalue(gmap) >= -tol


def apply_map(state, gmap):
    """Apply ``(M, N)`` to the covariance and ``M`` to the mean (new state)."""
    idx = gmap.indices
    out = state.copy()
    cov = out.cov
    cov[idx, :] = gmap.M @ cov[idx, :]
    cov[:, idx] = cov[:, idx] @ gmap.M.T
    cov[np.ix_(idx, idx)] += gmap.N
    out.cov = symmetrize(cov)
    out.mean[idx] = gmap.M @ out.mean[idx]
    return out


def _check_light(state, light_segment):
    pos = light_segment - state.n_atom_segments
    if not 0 <= pos < state.n_light_segments:
        raise InvalidInput(f"segment {light_segment} is not an in-flight light segment")
    return pos


def interact(state, g, atom_segment, light_segment):
    """QND step between atom and light segments of the same channel."""
    pos = _check_light(state, light_segment)
    if not 0 <= atom_segment < state.n_atom_segments:
        raise InvalidInput(f"segment {atom_segment} is not an atom segment")
    if state.atom_channel[atom_segment] != state.light_channel[pos]:
        raise InvalidOperation("atom and light segments belong to different channels")
    gmap = qnd_interaction_map(g, state.sx[pos], state.jx[atom_segment], atom_segment, light_segment)
    return apply_map(state, gmap), gmap


def scatter(state, eta, eps, rho, atom_segment, light_segment=None):
    """Apply loss/decoherence and decay the classical amplitudes accordingly."""
    if light_segment is None:
        gmap = loss_decoherence_map(
            eta, 0.0, rho, state.atom_number[atom_segment], 0.0, atom_segment,
            jx=state.jx[atom_segment],
        )
    else:
        pos = _check_light(state, light_segment)
        gmap = loss_decoherence_map(
            eta, eps, rho, state.atom_number[atom_segment], state.light_number[pos],
            atom_segment, light_segment, jx=state.jx[atom_segment], sx=state.sx[pos],
        )
    out = apply_map(state, gmap)
    out.jx[atom_segment] *= 1.0 - eta
    out.atom_number[atom_segment] *= 1.0 - (1.0 - rho) * eta
    if light_segment is not None:
        out.sx[pos] *= 1.0 - eps
        out.light_number[pos] *= 1.0 - eps
    return out, gmap


def mix(state, m, first, second):
    """Exchange atoms between two atom segments; populations and Jx mix too."""
    na = state.n_atom_segments
    if not (0 <= first < na and 0 <= second < na) or first == second:
        raise InvalidInput("mixing needs two distinct atom segments")
    pair = [first, second]
    gmap = mixing_map(m, state.atom_number[pair], pair, jx=state.jx[pair])
    out = apply_map(state, gmap)
    W = mixing_matrix(m)
    out.jx[pair] = W @ state.jx[pair]
    out.atom_number[pair] = W @ state.atom_number[pair]
    return out, gmap


def magnetic_displacement(bz, lande_gf, tau, jx):
    """
    Shift of the mean ``Jy`` per atom segment from a field ``B_z`` (tesla).

    The rotation generator is linear in ``Jz`` with a c-number commutator, so
    only first moments move: ``<Jy> += theta Jx``.
    """
    jx = np.asarray(jx, dtype=float)
    theta = np.broadcast_to(rotation_angle(bz, lande_gf, tau), jx.shape)
    if np.any(np.abs(theta) > MAX_ROTATION):
        warnings.warn(
            f"rotation angle up to {np.max(np.abs(theta)):.3g} rad per step",
            LargeRotationWarning,
            stacklevel=2,
        )
    return theta * jx


def rotate(state, bz, lande_gf, tau):
    out = state.copy()
    out.mean[0:2 * state.n_atom_segments:2] += magnetic_displacement(bz, lande_gf, tau, state.jx)
    return out
