"""
Figure presets. Each preset is a function returning the `SweepConfig` that regenerates one result figure as a CSV
dataset; the per-curve densities are plain defaults and can be edited in the returned config.
"""
from __future__ import annotations

from typing import Optional

from ..configs import SweepConfig
from ..constants import SweepAxis, SweepMode
from ..registry import presets_registry, register_preset
from ..scenario import REFERENCE_SCENARIO


__all__ = ["figure_preset"]

DISTANCES_KM = [2.0, 5.0, 8.0, 10.0, 20.0, 30.0, 40.0, 50.0]
MODEL_DISTANCES_KM = [5.0, 10.0, 20.0, 30.0]
REGIME_DENSITIES = [0.004, 0.005, 0.01]


def _base(**changes):
    return {**REFERENCE_SCENARIO, **changes}


def _density_series(densities):
    return [{"label": f"rho2={rho2:g}", "scenario": {"rho2_veh_per_m": rho2}} for rho2 in densities]


@register_preset("fig4a", description="Infrastructure-limited throughput versus d, analytic and simulated")
def fig4a() -> SweepConfig:
    return SweepConfig(
        label="fig4a",
        base=_base(wI_mbps=1.0),
        axis=SweepAxis.D,
        values=DISTANCES_KM,
        modes=[SweepMode.ANALYTIC, SweepMode.SAMPLED, SweepMode.EVENT],
        series=_density_series(REGIME_DENSITIES),
        description="w_I = 1 Mb/s, throughput grows with d",
    )


@register_preset("fig4b", description="V2V-limited throughput versus d, analytic and simulated")
def fig4b() -> SweepConfig:
    return SweepConfig(
        label="fig4b",
        base=_base(wI_mbps=6.0),
        axis=SweepAxis.D,
        values=DISTANCES_KM,
        modes=[SweepMode.ANALYTIC, SweepMode.SAMPLED, SweepMode.EVENT],
        series=_density_series(REGIME_DENSITIES),
        description="w_I = 6 Mb/s, throughput falls with d",
    )


@register_preset("fig4c", description="Transitional bounds versus d with the simulated optimum")
def fig4c() -> SweepConfig:
    return SweepConfig(
        label="fig4c",
        base=_base(wI_mbps=2.0),
        axis=SweepAxis.D,
        values=DISTANCES_KM,
        modes=[SweepMode.ANALYTIC, SweepMode.SAMPLED],
        series=_density_series([0.004, 0.005]),
        description="w_I = 2 Mb/s, eta_lower/eta_upper bracket the per-cycle optimum in eta_sampled",
    )


@register_preset("fig5", description="Cooperative versus non-cooperative throughput over w_I")
def fig5() -> SweepConfig:
    return SweepConfig(
        label="fig5",
        base=_base(d_km=15.0),
        axis=SweepAxis.W_I,
        values=[0.5 * i for i in range(1, 17)],
        modes=[SweepMode.ANALYTIC],
        series=_density_series([0.1, 0.02, 0.005, 0.002, 0.0]),
        description="ratio_noncoop is the gain over direct V2I only; transitional rows use the lower bound",
    )


@register_preset("fig7", description="Constant versus Gaussian speeds, infrastructure-limited")
def fig7() -> SweepConfig:
    return SweepConfig(
        label="fig7",
        base=_base(wI_mbps=1.0),
        axis=SweepAxis.D,
        values=MODEL_DISTANCES_KM,
        modes=[SweepMode.ANALYTIC, SweepMode.EVENT],
        series=[
            {"label": "constant", "models": {"mobility": "constant"}},
            {
                "label": "gaussian",
                "models": {"mobility": {"name": "gaussian", "sigma1": 2.0, "sigma2": 2.0, "tau": 5.0}},
            },
        ],
    )


@register_preset("fig8", description="Unit disk versus log-normal connection, V2V-limited")
def fig8() -> SweepConfig:
    return SweepConfig(
        label="fig8",
        base=_base(wI_mbps=6.0),
        axis=SweepAxis.D,
        values=MODEL_DISTANCES_KM,
        modes=[SweepMode.ANALYTIC, SweepMode.EVENT],
        series=[
            {"label": "unit_disk", "models": {"connection": "unit_disk"}},
            {"label": "log_normal", "models": {"connection": {"name": "log_normal", "alpha": 2.0, "sigma": 4.0}}},
        ],
    )


@register_preset("fig10", description="Rayleigh/path-loss channel versus constant rates at its measured means")
def fig10() -> SweepConfig:
    rayleigh = {"name": "rayleigh_path_loss"}
    return SweepConfig(
        label="fig10",
        base=_base(),
        axis=SweepAxis.D,
        values=MODEL_DISTANCES_KM,
        modes=[SweepMode.ANALYTIC, SweepMode.EVENT],
        series=[
            {"label": "rayleigh", "models": {"channel": rayleigh}, "average_rates_of": rayleigh},
            {"label": "constant_equivalent", "models": {"channel": "constant_rate"}, "average_rates_of": rayleigh},
        ],
        description="both series use the measured mean rates as w_I, w_V; only the first simulates the fading",
    )


@register_preset("eval_approx", description="Analytic E[D_V1] against the sampled per-cycle mean")
def eval_approx() -> SweepConfig:
    return SweepConfig(
        label="eval_approx",
        base=_base(wI_mbps=1.0),
        axis=SweepAxis.D,
        values=[2.0, 5.0, 10.0, 20.0, 30.0, 50.0],
        modes=[SweepMode.APPROX],
        description="eta_analytic and eta_sampled hold V2V bits per cycle, not bit/s",
    )


def figure_preset(name: str, n_cycles: Optional[int] = None, master_seed: Optional[int] = None) -> SweepConfig:
    """
    Build the sweep of a registered figure preset.

    Args:
        name: Preset name, e.g. `fig5`
        n_cycles: Override of the cycles per simulated estimate
        master_seed: Override of the master seed

    Returns:
        A SweepConfig
    """
    from ..utils import list_available_presets

    available = list_available_presets()
    if name not in available:
        raise ValueError(f"Unknown preset: `{name}`!\nAvailable presets: {available}")
    spec = presets_registry[name].module_class()
    if n_cycles is not None:
        spec.n_cycles = int(n_cycles)
    if master_seed is not None:
        spec.master_seed = int(master_seed)
    return spec
