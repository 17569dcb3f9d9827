"""Interaction, scattering and mixing as Gaussian maps, with the complete-positivity check."""
import numpy as np

from atomlight.maps import (
    gcp_min_eigenvalue,
    interact,
    loss_decoherence_map,
    minimal_noise,
    mix,
    scatter,
    validate_gcp,
)
from atomlight.state import SegmentLayout, init_coherent, observable_variance, total_jz

layout = SegmentLayout.uniform(4 * np.pi * 1e-10)
state = init_coherent(layout, [1e6], photons_per_segment=[1e8])
print("coherent covariance (jy, jz, sy, sz):\n", state.cov)

# QND step: Sy picks up Jz, Jy picks up Sz, z quadratures untouched
state, qnd = interact(state, 2e-8, 0, 1)
print("after interaction:\n", np.round(state.cov, 1))

# spontaneous scattering: damping plus the noise that keeps the map physical
state, loss = scatter(state, eta=0.05, eps=0.0, rho=1.0, atom_segment=0, light_segment=1)
print("loss map noise:", np.diag(loss.N), " passes GCP:", validate_gcp(loss))

# the smallest admissible loss noise is eta (1 - eta) N / 4
bare = loss_decoherence_map(0.05, 0.0, 0.0, 1e6, 0.0, 0)
print("minimal noise:", np.diag(minimal_noise(bare.M, bare.sigma_in, bare.sigma_out)),
      " model noise:", np.diag(bare.N))

# removing the noise breaks complete positivity
from atomlight.maps import GaussianMap
bad = GaussianMap(bare.indices, bare.M, 0 * bare.N, bare.sigma_in, bare.sigma_out)
print("noiseless loss min eigenvalue:", gcp_min_eigenvalue(bad))

# atoms hopping between two transverse cells leave the total variance alone
two = init_coherent(SegmentLayout.uniform(4 * np.pi * 1e-10, 2, 1), [3e5, 7e5])
two.cov[1, 1] *= 0.4  # pretend cell 1 is squeezed
before = observable_variance(two, total_jz(two))
mixed, _ = mix(two, 0.3, 0, 1)
print(f"total var(Jz) before {before:.1f}, after mixing {observable_variance(mixed, total_jz(mixed)):.1f}")
print("cell variances before", np.diag(two.cov)[1::2], "after", np.round(np.diag(mixed.cov)[1::2], 1))
