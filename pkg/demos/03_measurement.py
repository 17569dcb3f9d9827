"""Homodyne detection of light segments and the conditional covariance update."""
import numpy as np

from atomlight.maps import interact
from atomlight.measurement import DetectorModel, build_projector, conditional_update, detect, finish_pulse
from atomlight.state import SegmentLayout, append_light_segment, init_coherent, squeezing_parameter

layout = SegmentLayout.uniform(4 * np.pi * 1e-10)
g, na, nl = 2e-8, 1e6, 1e8

# one interaction then a measurement of Sy
s = init_coherent(layout, [na], [nl])
s, _ = interact(s, g, 0, 1)
post = conditional_update(s, build_projector(s, [1]))
kappa = g * nl / 2
print("var(Jz) after measuring Sy:", post.cov[1, 1])
print("closed form vJ vS / (vS + kappa^2 vJ):", (na / 4) * (nl / 4) / (nl / 4 + kappa**2 * na / 4))


def pulse(detector, n):
    s = init_coherent(layout, [na])
    for _ in range(n):
        s = append_light_segment(s, nl)
        light = s.n_atom_segments + s.n_light_segments - 1
        s, _ = interact(s, g, 0, light)
        s = detect(s, detector, [light])
    return finish_pulse(s, detector)


# without decoherence a detector that only sees the summed pulse loses nothing
for n in (1, 2, 10, 50):
    a = squeezing_parameter(pulse(DetectorModel("ideal"), n))
    b = squeezing_parameter(pulse(DetectorModel("no_time_resolution"), n))
    print(f"n = {n:>2}: xi2 ideal {a:.6f}   no time resolution {b:.6f}")
