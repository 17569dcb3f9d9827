"""Coupling constant, scattering cross section and the characteristic time t0."""
import numpy as np

from atomlight.physics import (
    BeamParams,
    TWO_PI,
    characteristic_time,
    coupling_g,
    load_species,
    scattering_cross_section,
)

# Rb-87 D2 data ship with the package; any species file with the same keys works
rb = load_species()
print(rb.name, "linewidth/2pi =", rb.linewidth / TWO_PI / 1e6, "MHz")

# 1e14 photons/s, 1 GHz blue of F=1 -> F'=0, beam area 4 pi x 1e-10 m^2
area = 4 * np.pi * 1e-10
beam = BeamParams(flux=1e14, detuning=TWO_PI * 1e9, area=area)
g = coupling_g(rb, beam, area)
sigma = scattering_cross_section(rb, beam.detuning)
t0 = characteristic_time(g, 1e6, beam.flux)
print(f"g = {g:.4e}   sigma = {sigma:.4e} m^2   t0 = {t0 * 1e6:.4f} us")

# cutting the beam into smaller cells raises the per-cell coupling as 1/A
for k in (1, 2, 4):
    print(f"{k} channels: g per channel = {coupling_g(rb, beam, area / k):.4e}")

# far from resonance both quantities approach their 1/Delta and 1/Delta^2 tails
for ghz in (0.5, 1, 2, 4, 8):
    d = TWO_PI * ghz * 1e9
    print(f"Delta = {ghz:>4} GHz   g*Delta = {coupling_g(rb, beam, area, d) * d:.4e}"
          f"   sigma*Delta^2 = {scattering_cross_section(rb, d) * d**2:.4e}")
