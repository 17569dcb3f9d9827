"""Squeezing versus time for four detector models (time-resolved, pulse-integrated, one-shot)."""
import sys

import numpy as np

from atomlight import ScenarioConfig, run_scenario, write_series

# a fixed step keeps the demo quick; leave tau_t0 unset to let select_tau certify one
config = ScenarioConfig(tau_t0=0.01, total_time_t0=20.0)
series = run_scenario("fig2", config)

t = series["ideal"].t_over_t0
print("t/t0   " + "  ".join(f"{label:>22}" for label in series.curves))
for tt in (0.5, 1, 2, 4, 8, 12, 20):
    i = int(np.argmin(np.abs(t - tt)))
    print(f"{t[i]:5.1f}  " + "  ".join(f"{c.xi2_total[i]:22.4f}" for c in series.curves.values()))

best = series["ideal"]
i = int(np.argmin(best.xi2_total))
print(f"ideal detector: best xi2 = {best.xi2_total[i]:.4f} at t = {best.t_over_t0[i]:.2f} t0")

if len(sys.argv) > 1:
    write_series(series, sys.argv[1])
    print("wrote", sys.argv[1])
