"""How the time step controls the dependence on the order of interaction and scattering."""
from atomlight import ScenarioConfig, select_tau
from atomlight.scheduler import Experiment, ordering_gap

config = ScenarioConfig(total_time_t0=20.0)
exp = Experiment.from_config(config)

# the two orders differ at first order in tau
for k in range(5):
    tau = exp.t0 * 0.1 / 2**k
    gap, (last, first) = ordering_gap(config, tau, exp)
    print(f"tau = t0/{exp.t0 / tau:<5.0f} noise last {last:.5f}  noise first {first:.5f}  rel. gap {gap:.2e}")

tau = select_tau(config, rel_tol=1e-3)
print(f"select_tau(rel_tol=1e-3) -> t0/{exp.t0 / tau:.0f}")
