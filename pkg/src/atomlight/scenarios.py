"""
Preset studies and CSV output.

* ``fig2`` -- detector time resolution: ideal, no time resolution and the two
  zero-dimensional single-shot models.
* ``fig3`` -- two equal channels: homogeneous, light in one channel, atoms in
  one channel.
* ``fig4`` -- light in one channel with atomic motion, one curve per mixing
  rate; channel 1 is the illuminated segment, channel 2 the dark one.
* ``homogeneity`` -- a homogeneous ensemble cut into 1, 2 and 4 longitudinal
  segments.

All curves of one preset share the same time step so they can be compared
sample by sample.
"""

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .config import ScenarioConfig
from .errors import InvalidInput
from .scheduler import Experiment, run, select_tau

SCENARIOS = ("fig2", "fig3", "fig4", "homogeneity")

FIG2_CURVES = (
    ("ideal", "ideal"),
    ("no_time_resolution", "no_time_resolution"),
    ("zero_dim_noise_after", "zero_dimensional_noise_after"),
    ("zero_dim_noise_before", "zero_dimensional_noise_before"),
)

HOMOGENEITY_SEGMENTS = (1, 2, 4)


@dataclass
class SeriesSet:
    """Labelled trajectories of one scenario."""

    name: str
    curves: dict = field(default_factory=dict)
    tau: float = None
    notes: dict = field(default_factory=dict)

    @property
    def channels(self):
        return max((c.xi2_channels.shape[1] for c in self.curves.values()), default=1)

    def __getitem__(self, label):
        return self.curves[label]


def two_channel(config, atoms, light):
    return replace(
        config,
        channels=2,
        area_fractions=(0.5, 0.5),
        atom_fractions=tuple(atoms),
        light_fractions=tuple(light),
        detector="ideal",
    )


def fig3_variants(config):
    return {
        "homogeneous": two_channel(config, (0.5, 0.5), (0.5, 0.5)),
        "light_in_one_channel": two_channel(config, (0.5, 0.5), (1.0, 0.0)),
        "atoms_in_one_channel": two_channel(config, (1.0, 0.0), (0.5, 0.5)),
    }


def mixing_label(rate):
    return f"mixing_rate_{rate:.3g}_per_t0"


def scenario_variants(name, config):
    """Labelled configurations making up a preset, in curve order."""
    if name == "fig2":
        return {label: replace(config, detector=kind) for label, kind in FIG2_CURVES}
    if name == "fig3":
        return fig3_variants(config)
    if name == "fig4":
        base = fig3_variants(config)["light_in_one_channel"]
        return {
            mixing_label(r): replace(base, mixing=True, mixing_rate_per_t0=float(r))
            for r in config.mixing_sweep_per_t0
        }
    if name == "homogeneity":
        return {
            f"L={n}": replace(config, atom_segments=n, detector="ideal")
            for n in HOMOGENEITY_SEGMENTS
        }
    raise InvalidInput(f"unknown scenario {name!r}; choose from {SCENARIOS}")


def _run_one(args):
    config, label, check = args
    return run(config, label=label, check=check)


def run_scenario(name, config=None, check=False, workers=None):
    """
    Run every curve of a preset.

    With ``tau_t0 = auto`` the step is certified once, on the first curve of
    the preset, and then shared.  ``workers > 1`` runs curves in separate
    processes; results do not depend on it.
    """
    config = ScenarioConfig() if config is None else config
    variants = scenario_variants(name, config)
    tau = None
    if config.tau_t0 is None:
        ref = next(iter(variants.values()))
        if ref.detector.startswith("zero_dimensional"):
            ref = replace(ref, detector="ideal")
        tau = select_tau(replace(ref, mixing=False))
        tau_t0 = tau / Experiment.from_config(ref).t0
        variants = {k: replace(v, tau_t0=tau_t0) for k, v in variants.items()}
    jobs = [(cfg, label, check) for label, cfg in variants.items()]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    out = SeriesSet(name, dict(zip(variants, results)))
    out.tau = float(results[0].t[1] - results[0].t[0]) if results[0].t.size > 1 else tau
    if name == "homogeneity":
        ref = results[0].var_jz_total
        out.notes["max_rel_deviation"] = max(
            float(np.max(np.abs(r.var_jz_total - ref) / np.abs(ref))) for r in results
        )
    return out


def _fmt(x):
    return "nan" if math.isnan(x) else format(float(x), ".17g")


def write_series(series, path):
    """
    Write trajectories as CSV, rows ordered by curve label then time.

    ``series`` is a :class:`SeriesSet`, a mapping ``label -> Trajectory`` or an
    iterable of trajectories.
    """
    if isinstance(series, SeriesSet):
        curves = series.curves
    elif hasattr(series, "items"):
        curves = dict(series)
    else:
        curves = {c.label: c for c in series}
    K = max((c.xi2_channels.shape[1] for c in curves.values()), default=1)
    header = (
        ["t_over_t0", "curve_label", "xi2_total"]
        + [f"xi2_channel_{k + 1}" for k in range(K)]
        + ["var_jz_total", "t_seconds"]
    )
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for label in sorted(curves):
                c = curves[label]
                xik = c.xi2_channels
                for i in range(c.t.size):
                    chans = [_fmt(xik[i, k]) if k < xik.shape[1] else "" for k in range(K)]
                    w.writerow(
                        [_fmt(c.t_over_t0[i]), label, _fmt(c.xi2_total[i])]
                        + chans
                        + [_fmt(c.var_jz_total[i]), _fmt(c.t[i])]
                    )
    except OSError as exc:
        raise OSError(f"cannot write series to {path}: {exc.strerror or exc}") from exc
    return path
