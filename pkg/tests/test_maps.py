import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from atomlight.errors import InvalidInput, InvalidOperation
from atomlight.linalg import is_psd
from atomlight.maps import (
    GaussianMap,
    LargeRotationWarning,
    apply_map,
    gcp_min_eigenvalue,
    gcp_scale,
    interact,
    loss_decoherence_map,
    magnetic_displacement,
    minimal_noise,
    mix,
    mixing_map,
    qnd_interaction_map,
    rotate,
    scatter,
    validate_gcp,
)
from atomlight.state import (
    SegmentLayout,
    init_coherent,
    is_valid_covariance,
    observable_variance,
    total_jz,
    uncertainty_min_eigenvalue,
)

AREA = 4 * np.pi * 1e-10
NA, NL = 1e6, 1e8


def coherent_pair():
    return init_coherent(SegmentLayout.uniform(AREA), [NA], [NL])


def random_psd(rng, n):
    a = rng.normal(size=(n, n))
    return a @ a.T * rng.uniform(0.1, 1e6)


def test_qnd_zero_coupling_is_identity():
    gmap = qnd_interaction_map(0.0, NL / 2, NA / 2, 0, 1)
    np.testing.assert_array_equal(gmap.M, np.eye(4))
    assert not np.any(gmap.N)


def test_qnd_single_step_variances():
    g = 3e-8
    s, _ = interact(coherent_pair(), g, 0, 1)
    assert s.cov[2, 2] == pytest.approx(NL / 4 * (1 + g**2 * NA / 4 * NL), rel=1e-14)
    # z quadratures untouched exactly
    assert s.cov[1, 1] == NA / 4
    assert s.cov[3, 3] == NL / 4
    assert is_valid_covariance(s)
    assert uncertainty_min_eigenvalue(s) >= -1e-9 * np.trace(s.cov)


def test_qnd_cross_channel_rejected():
    s = init_coherent(SegmentLayout.uniform(AREA, 2, 1), [NA / 2, NA / 2], [NL], light_channels=[1])
    with pytest.raises(InvalidOperation):
        interact(s, 1e-8, 0, 2)
    interact(s, 1e-8, 1, 2)


def test_qnd_preserves_commutators():
    gmap = qnd_interaction_map(1e-7, NL / 2, NA / 2, 0, 1)
    np.testing.assert_allclose(gmap.M @ gmap.sigma_in @ gmap.M.T, gmap.sigma_in, atol=1e-6)
    assert validate_gcp(gmap)


def test_loss_map_trivial_and_arithmetic():
    gmap = loss_decoherence_map(0.0, 0.0, 1.0, NA, NL, 0, 1)
    np.testing.assert_array_equal(gmap.M, np.eye(4))
    assert not np.any(gmap.N)
    gmap = loss_decoherence_map(0.1, 0.0, 1.0, NA, 0.0, 0)
    np.testing.assert_allclose(gmap.N, 4.75e4 * np.eye(2), rtol=1e-14)


def test_minimal_noise_examples():
    sig = (NA / 2) * np.array([[0.0, 1.0], [-1.0, 0.0]])
    np.testing.assert_array_equal(minimal_noise(np.eye(2), sig, sig), np.zeros((2, 2)))
    eta = 0.1
    n = minimal_noise((1 - eta) * np.eye(2), sig, (1 - eta) * sig)
    # minimal admissible noise of pure loss equals the loss noise eta (1 - eta) N / 4
    np.testing.assert_allclose(n, eta * (1 - eta) * NA / 4 * np.eye(2), rtol=1e-12)
    loss = loss_decoherence_map(eta, 0.0, 0.0, NA, 0.0, 0)
    np.testing.assert_allclose(loss.N, n, rtol=1e-12)


def test_validate_gcp_examples():
    sig = np.array([[0.0, 1.0], [-1.0, 0.0]])
    ident = GaussianMap(np.array([0, 1]), np.eye(2), np.zeros((2, 2)), sig, sig)
    assert validate_gcp(ident)
    loss = loss_decoherence_map(0.2, 0.1, 0.5, NA, NL, 0, 1)
    assert validate_gcp(loss)
    noiseless = GaussianMap(loss.indices, loss.M, np.zeros((4, 4)), loss.sigma_in, loss.sigma_out)
    assert not validate_gcp(noiseless)


@settings(max_examples=300, deadline=None)
@given(
    st.floats(0.0, 0.99),
    st.floats(0.0, 0.99),
    st.floats(0.0, 1.0),
    st.floats(1e2, 1e8),
    st.floats(1e2, 1e10),
)
def test_loss_maps_are_completely_positive(eta, eps, rho, na, nl):
    gmap = loss_decoherence_map(eta, eps, rho, na, nl, 0, 1)
    assert validate_gcp(gmap)
    assert is_psd(minimal_noise(gmap.M, gmap.sigma_in, gmap.sigma_out), 1e-9 * max(na, nl))


@settings(max_examples=300, deadline=None)
@given(st.floats(0.0, 0.5), st.floats(1e2, 1e8), st.floats(1e2, 1e8))
def test_mixing_maps_are_completely_positive(m, n1, n2):
    gmap = mixing_map(m, [n1, n2], [0, 1])
    assert gcp_min_eigenvalue(gmap) >= -1e-9 * gcp_scale(gmap)


def test_mixing_map_examples():
    gmap = mixing_map(0.0, [NA / 2, NA / 2], [0, 1])
    np.testing.assert_array_equal(gmap.M, np.eye(4))
    assert not np.any(gmap.N)
    gmap = mixing_map(0.5, [NA / 2, NA / 2], [0, 1])
    np.testing.assert_array_equal(gmap.M, 0.5 * np.kron(np.ones((2, 2)), np.eye(2)))
    np.testing.assert_allclose(gmap.N, NA / 16 * np.kron([[1, -1], [-1, 1]], np.eye(2)))
    with pytest.raises(InvalidInput):
        mixing_map(0.6, [1e3, 1e3], [0, 1])


@settings(max_examples=1000, deadline=None)
@given(st.floats(0.0, 0.5), st.integers(0, 2**32 - 1))
def test_mixing_conserves_total_variance(m, seed):
    rng = np.random.default_rng(seed)
    n1, n2 = rng.uniform(1e2, 1e7, 2)
    gamma = random_psd(rng, 4)
    gmap = mixing_map(m, [n1, n2], [0, 1])
    out = gmap.M @ gamma @ gmap.M.T + gmap.N
    for comp in (0, 1):
        p = np.zeros(4)
        p[[comp, comp + 2]] = 1.0
        before, after = p @ gamma @ p, p @ out @ p
        assert abs(after - before) <= 1e-12 * abs(before)


def test_mixing_keeps_coherent_segments_coherent():
    s = init_coherent(SegmentLayout.uniform(AREA, 2, 1), [3e5, 7e5])
    out, _ = mix(s, 0.3, 0, 1)
    n = out.atom_number
    np.testing.assert_allclose(n, [0.7 * 3e5 + 0.3 * 7e5, 0.3 * 3e5 + 0.7 * 7e5])
    np.testing.assert_allclose(out.cov, np.diag(np.repeat(n / 4, 2)), atol=1e-9 * NA)
    np.testing.assert_allclose(out.jx, n / 2)


def test_mixing_matches_atom_hopping_monte_carlo():
    """Atoms hop independently with probability m; compare segment covariances."""
    rng = np.random.default_rng(11)
    n_seg, samples, m = 40, 40000, 0.3
    # correlated spin-1/2 atoms: signs of a shared latent plus individual noise
    chol = np.linalg.cholesky(np.array([[1.0, 0.6], [0.6, 1.0]]))
    atoms = np.empty((samples, 2 * n_seg, 2))
    for comp, weight in ((0, 0.05), (1, 0.15)):
        latent = rng.normal(size=(samples, 2)) @ chol.T
        shared = np.repeat(latent, n_seg, axis=1)
        atoms[:, :, comp] = 0.5 * np.sign(weight * shared + rng.normal(size=(samples, 2 * n_seg)))
    home = np.repeat([0, 1], n_seg)
    hop = rng.random((samples, 2 * n_seg)) < m
    where = np.where(hop, 1 - home, home)

    def segment_sums(location):
        out = np.empty((samples, 4))
        for seg in (0, 1):
            mask = (location == seg)[:, :, None]
            out[:, 2 * seg:2 * seg + 2] = np.sum(atoms * mask, axis=1)
        return out

    before = segment_sums(np.broadcast_to(home, where.shape))
    after = segment_sums(where)
    gamma = np.cov(before, rowvar=False)
    empirical = np.cov(after, rowvar=False)
    gmap = mixing_map(m, [n_seg, n_seg], [0, 1])
    predicted = gmap.M @ gamma @ gmap.M.T + gmap.N
    scale = np.max(np.abs(predicted))
    assert np.max(np.abs(empirical - predicted)) < 0.02 * scale
    # the noise term is not negligible in this regime
    assert np.max(np.abs(gmap.N)) > 0.1 * scale


def test_scatter_decays_amplitudes():
    s = coherent_pair()
    out, gmap = scatter(s, 0.1, 0.05, 0.5, 0, 1)
    assert out.jx[0] == pytest.approx(0.9 * NA / 2)
    assert out.atom_number[0] == pytest.approx(NA * (1 - 0.5 * 0.1))
    assert out.sx[0] == pytest.approx(0.95 * NL / 2)
    assert out.light_number[0] == pytest.approx(0.95 * NL)
    assert validate_gcp(gmap)
    assert uncertainty_min_eigenvalue(out) >= -1e-9 * np.trace(out.cov)


def test_apply_map_touches_only_its_block():
    rng = np.random.default_rng(3)
    s = init_coherent(SegmentLayout.uniform(AREA, 1, 3), [[1e5, 2e5, 3e5]])
    s.cov = random_psd(rng, 6)
    gmap = mixing_map(0.2, [1e5, 3e5], [0, 2])
    out = apply_map(s, gmap)
    M, N = gmap.embed(6)
    np.testing.assert_allclose(out.cov, M @ s.cov @ M.T + N, rtol=1e-12, atol=1e-9)


def test_magnetic_displacement():
    jx = np.array([5e5, 2e5])
    assert not np.any(magnetic_displacement(0.0, -0.5, 1e-8, jx))
    bz = np.array([1e-7, 3e-7])
    shift = magnetic_displacement(bz, -0.5, 1e-8, jx)
    np.testing.assert_allclose(shift / jx, bz / bz[0] * shift[0] / jx[0])
    s = init_coherent(SegmentLayout.uniform(AREA, 1, 2), [[1e6, 4e5]])
    out = rotate(s, bz, -0.5, 1e-8)
    np.testing.assert_array_equal(out.cov, s.cov)
    assert out.mean[0] != 0 and out.mean[1] == 0
    assert observable_variance(out, total_jz(out)) == observable_variance(s, total_jz(s))
    with pytest.warns(LargeRotationWarning):
        magnetic_displacement(1.0, -0.5, 1e-3, jx)
