"""Atomic motion between an illuminated and a dark channel, swept over mixing rates."""
import warnings

import numpy as np

from atomlight import ScenarioConfig, run_scenario
from atomlight.scheduler import StepSizeWarning

# at the fastest rate a third of the atoms swap per step; the warning says so, and
# the sweep is still within 1% of the homogeneous limit, so we silence it here
warnings.simplefilter("ignore", StepSizeWarning)

config = ScenarioConfig(tau_t0=1 / 320, total_time_t0=4.0)
fig4 = run_scenario("fig4", config)
homog = run_scenario("fig3", config)["homogeneous"]

i = int(np.argmin(homog.xi2_total))
print(f"reference: homogeneous xi2 = {homog.xi2_total[i]:.4f} at {homog.t_over_t0[i]:.2f} t0")
print(f"{'rate':>24}  {'total':>8}  {'illuminated':>11}  {'dark':>8}")
for label, c in fig4.curves.items():
    print(f"{label:>24}  {c.xi2_total[i]:8.4f}  {c.xi2_channels[i, 0]:11.4f}  {c.xi2_channels[i, 1]:8.4f}")

# the kinetic-theory rate for the default cold cloud is far below 1/t0
from dataclasses import replace
from atomlight.scheduler import Experiment

cold = Experiment.from_config(replace(config, channels=2, atom_fractions=(0.5, 0.5),
                                      light_fractions=(1.0, 0.0), area_fractions=(0.5, 0.5), mixing=True))
print(f"30 uK Rb-87: mixing rate x t0 = {cold.mixing_rate * cold.t0:.2e}")
