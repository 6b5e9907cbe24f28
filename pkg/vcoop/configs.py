"""
Every tunable part of vcoop takes its parameters as a config container which is an instance of `Config` or one of its
derivatives. A `Config` is a Python dataclass with auxiliary methods for loading and saving through OmegaConf, so the
same objects can be written as JSON or YAML files and read back.

Examples:
    >>> from vcoop.configs import ModelConfig
    >>> models = ModelConfig.from_dict({"mobility": "gaussian", "connection": {"name": "log_normal", "sigma": 4}})
    >>> models.save("runs/fig8", filename="models.yaml")

    >>> from vcoop.configs import SweepConfig
    >>> sweep = SweepConfig.load("sweeps/d_sweep.yaml")
"""
from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field, fields
from enum import Enum
from pprint import pformat
from typing import Any, Dict, List, Optional

from omegaconf import DictConfig, OmegaConf

from .constants import (
    DEFAULT_LP_CAP,
    DEFAULT_N_CYCLES,
    DEFAULT_NUM_INFRA,
    ChannelType,
    ConfigType,
    ConnectionType,
    MobilityType,
    OptimumSolver,
    RegistryType,
    SweepAxis,
    SweepMode,
)
from .utils import Logger, get_module_config_class


__all__ = [
    "Config",
    "ScenarioConfig",
    "MobilityConfig",
    "ConnectionConfig",
    "ChannelConfig",
    "ModelConfig",
    "SweepConfig",
]

logger = Logger(__name__)

CONFIG_CLASS_VARS = ["name", "config_type"]


@dataclass
class Config:
    """
    Base class for all configs in vcoop.

    All configs are simple dataclasses that have some customized functionalities to manage their attributes, plus
    `load` and `save` for files.
    """

    name: str = field(init=False, default=None)
    config_type: str = field(init=False, default=ConfigType.BASE)

    def __post_init__(self):
        # Class variables cannot be init-able
        fields_dict = {f.name: f for f in fields(self)}
        for attr in CONFIG_CLASS_VARS:
            if fields_dict[attr].init == True:  # noqa
                raise ValueError(
                    f"The parameter `{attr}` in a config should be either non-initable or unannotated! "
                    f"\nYou should define it as either:\n"
                    f"`{attr} = '{getattr(self, attr)}'`"
                    f" or "
                    f"`{attr}: str = field(default='{getattr(self, attr)}', init=False)`"
                )

        # Convert enums to values
        for param in self.dict():
            if isinstance(getattr(self, param), Enum):
                setattr(self, param, str(getattr(self, param)))

    def __str__(self):
        return pformat(self.dict())

    def __getitem__(self, item):
        try:
            return self.dict()[item]
        except KeyError:
            raise AttributeError(f"`{self.__class__.__name__}` does not have the parameter `{item}`!")

    def __len__(self):
        return len(self.dict())

    def __iter__(self):
        return iter(self.dict())

    @classmethod
    def fields(cls):
        return cls.__dataclass_fields__

    def dict(self):
        """
        Returns the config object as a dictionary (works on nested dataclasses too)
        """
        return asdict(self)

    def keys(self):
        return list(self.dict().keys())

    def get(self, key, default=None):
        return getattr(self, key, default)

    def update(self, d: dict = None, **kwargs):
        """
        Update config with a given dictionary or keyword arguments. If a key does not exist in the attributes, logs a
        warning and skips it.

        Returns:
            The config object itself but the operation happens in-place anyway
        """
        d = dict(d or {})
        d.update(kwargs)
        for k, v in d.items():
            if k not in self.fields() or not self.fields()[k].init:
                logger.warning(f"`{str(self.__class__.__name__)}` does not take `{k}` as a config parameter!")
                continue
            setattr(self, k, v)
        return self

    @classmethod
    def load(cls, path: str | os.PathLike, **kwargs) -> "Config":
        """
        Load config from a local JSON or YAML file (JSON is read as a YAML subset by OmegaConf)

        Args:
            path: Path to the config file
            **kwargs: Manual config parameters to override

        Returns:
            A Config instance
        """
        if not os.path.isfile(path):
            raise FileNotFoundError(f"Config file `{path}` does not exist!")
        dict_config = OmegaConf.to_container(OmegaConf.load(path))
        if not isinstance(dict_config, dict):
            raise ValueError(f"Config file `{path}` must contain a mapping at the top level!")
        config_type = dict_config.pop("config_type", None)
        if config_type is not None and config_type != cls.config_type:
            raise ValueError(
                f"The `config_type` for `{cls.__name__}` is `{cls.config_type}` "
                f"which is different from the `config_type` parameter in `{path}` which is `{config_type}`!"
            )
        return cls.from_dict(dict_config, **kwargs)

    @classmethod
    def from_dict(cls, dict_config: Dict | DictConfig, **kwargs):
        """
        Load config from a dict-like object. Nested configs are also recursively converted to their classes if possible.
        """
        if isinstance(dict_config, DictConfig):
            dict_config = OmegaConf.to_container(dict_config)
        dict_config = dict(dict_config)
        dict_config.update(**kwargs)

        for k, v in dict_config.items():
            if isinstance(v, dict) and "name" in v and v.get("config_type") in RegistryType.list():
                config_cls = get_module_config_class(v["name"], v["config_type"])
                if config_cls is not None:
                    dict_config[k] = config_cls.from_dict(v)

        unknown = [k for k in dict_config if k not in cls.fields() and k not in CONFIG_CLASS_VARS]
        if unknown:
            logger.warning(f"`{cls.__name__}` ignores unknown parameters: {unknown}")
        dict_config = {k: v for k, v in dict_config.items() if k in cls.fields() and cls.fields()[k].init}

        return cls(**dict_config)  # noqa

    def save(self, save_dir: str | os.PathLike, filename: str, skip_none_fields: bool = True):
        """
        Save the config to `save_dir/filename`, YAML or JSON depending on the file extension

        Args:
             save_dir: Save directory path
             filename: Config file name
             skip_none_fields: Whether to skip saving None values or not
        """
        config = self.dict()
        if skip_none_fields:
            config = {k: v for k, v in config.items() if v is not None}

        os.makedirs(save_dir, exist_ok=True)
        save_path = os.path.join(save_dir, filename)
        if filename.endswith(".json"):
            import json

            with open(save_path, "w") as f:
                json.dump(config, f, indent=2, sort_keys=True)
        else:
            OmegaConf.save(config, save_path)

        return save_path


@dataclass
class ScenarioConfig(Config):
    """
    File-level mirror of a scenario, in the units of the scenario file keys. Conversion to SI and validation happen in
    `vcoop.scenario.validate_scenario`.

    Args:
        d_km: Distance between neighbouring infrastructure points in km
        rI_m: Infrastructure radio range in m
        r0_m: Vehicle radio range in m
        wI_mbps: V2I rate in Mb/s
        wV_mbps: V2V rate in Mb/s
        v1_mps: Speed of the vehicle of interest in m/s
        v2_mps: Speed of the opposite-direction helpers in m/s
        rho2_veh_per_m: Helper density in vehicles per meter
        rho1_veh_per_m: Same-direction density, stored but never used
        num_infra: Number of infrastructure points in an event-driven run
    """

    name = "scenario"
    config_type: str = field(init=False, default=ConfigType.SCENARIO)
    d_km: float = None
    rI_m: float = None
    r0_m: float = None
    wI_mbps: float = None
    wV_mbps: float = None
    v1_mps: float = None
    v2_mps: float = None
    rho2_veh_per_m: float = None
    rho1_veh_per_m: float = 0.0
    num_infra: int = DEFAULT_NUM_INFRA

    @classmethod
    def required_keys(cls) -> List[str]:
        return [
            f.name for f in fields(cls) if f.init and f.name not in ("rho1_veh_per_m", "num_infra")
        ]

    def file_dict(self) -> Dict[str, Any]:
        """
        The scenario as written in a scenario file (no `name` / `config_type` entries)
        """
        return {k: v for k, v in self.dict().items() if k not in CONFIG_CLASS_VARS}


@dataclass
class MobilityConfig(Config):
    """
    Base dataclass for all mobility model configs
    """

    name: str = field(init=False, default=None)
    config_type: str = field(init=False, default=ConfigType.MOBILITY)


@dataclass
class ConnectionConfig(Config):
    """
    Base dataclass for all connection model configs
    """

    name: str = field(init=False, default=None)
    config_type: str = field(init=False, default=ConfigType.CONNECTION)


@dataclass
class ChannelConfig(Config):
    """
    Base dataclass for all channel model configs
    """

    name: str = field(init=False, default=None)
    config_type: str = field(init=False, default=ConfigType.CHANNEL)


_model_slots = {
    "mobility": (RegistryType.MOBILITY, MobilityType.CONSTANT),
    "connection": (RegistryType.CONNECTION, ConnectionType.UNIT_DISK),
    "channel": (RegistryType.CHANNEL, ChannelType.CONSTANT_RATE),
}


def _resolve_model_slot(slot: str, value) -> Config:
    registry_type, default_name = _model_slots[slot]
    if value is None:
        value = str(default_name)
    if isinstance(value, Config):
        return value
    if isinstance(value, str):
        value = {"name": value}
    if not isinstance(value, dict) or "name" not in value:
        raise ValueError(f"`{slot}` must be a model name or a mapping with a `name` key, got `{value}`!")

    params = {k: v for k, v in value.items() if k not in CONFIG_CLASS_VARS}
    config_cls = get_module_config_class(value["name"], registry_type)
    if config_cls is None:
        from .utils.registry_utils import _get_registry_from_type

        available = sorted(_get_registry_from_type(registry_type).keys())
        raise ValueError(f"Unknown {slot} model: `{value['name']}`!\nAvailable {slot} models: {available}")
    return config_cls.from_dict(params)


@dataclass
class ModelConfig(Config):
    """
    Selection of the pluggable simulation models. Each slot is a registered sub-config; a plain name string selects the
    model with default parameters.

    Args:
        mobility: Speed model of all vehicles, `constant` or `gaussian`
        connection: Link model, `unit_disk` or `log_normal`
        channel: Rate model, `constant_rate` or `rayleigh_path_loss`
    """

    name = "models"
    config_type: str = field(init=False, default=ConfigType.MODELS)
    mobility: MobilityConfig | str | Dict = None
    connection: ConnectionConfig | str | Dict = None
    channel: ChannelConfig | str | Dict = None

    def __post_init__(self):
        super().__post_init__()
        for slot in _model_slots:
            setattr(self, slot, _resolve_model_slot(slot, getattr(self, slot)))

    def summary(self) -> str:
        return f"mobility={self.mobility.name}, connection={self.connection.name}, channel={self.channel.name}"


@dataclass
class SweepConfig(Config):
    """
    A parameter sweep: one base scenario, one swept axis and the estimators to run at every axis value.

    Args:
        label: Name of the sweep, used for output file names and provenance
        base: Base scenario in scenario-file keys
        models: Simulation models shared by all series unless a series overrides them
        axis: Swept parameter, one of `d` (values in km), `w_I` (Mb/s) or `rho2` (veh/m)
        values: Strictly increasing axis values
        modes: Subset of `analytic`, `sampled`, `event`, `approx`
        n_cycles: Retained cycles per simulated estimate
        master_seed: Seed every random stream of the sweep is derived from
        series: Optional labelled variants, each a mapping with `label` and any of `scenario` (overrides in file keys),
            `models` (a model config mapping) and `average_rates_of` (a channel mapping whose measured mean rates
            replace w_I and w_V)
        lp_cap: Largest cycle the dense simplex handles when `optimum_solver` is `simplex`
        optimum_solver: How sampled transitional cycles are solved exactly, `cut` or `simplex`
    """

    name = "sweep"
    config_type: str = field(init=False, default=ConfigType.SWEEP)
    label: str = "sweep"
    base: Dict[str, Any] = field(default_factory=dict)
    models: ModelConfig | Dict = None
    axis: str = SweepAxis.D
    values: List[float] = field(default_factory=list)
    modes: List[str] = field(default_factory=lambda: [str(SweepMode.ANALYTIC)])
    n_cycles: int = DEFAULT_N_CYCLES
    master_seed: int = 0
    series: List[Dict[str, Any]] = field(default_factory=list)
    lp_cap: int = DEFAULT_LP_CAP
    optimum_solver: str = OptimumSolver.CUT
    description: Optional[str] = None

    def __post_init__(self):
        super().__post_init__()
        if self.models is None or isinstance(self.models, dict):
            self.models = ModelConfig.from_dict(self.models or {})
        if self.axis not in SweepAxis.list():
            raise ValueError(f"Invalid sweep axis `{self.axis}`. Available options are {SweepAxis.list()}")
        self.modes = [str(m) for m in self.modes]
        invalid_modes = [m for m in self.modes if m not in SweepMode.list()]
        if invalid_modes or not self.modes:
            raise ValueError(f"Invalid sweep modes {invalid_modes}. Available options are {SweepMode.list()}")
        if self.optimum_solver not in OptimumSolver.list():
            raise ValueError(
                f"Invalid optimum solver `{self.optimum_solver}`. Available options are {OptimumSolver.list()}"
            )
        self.values = [float(v) for v in self.values]
        if not self.values:
            raise ValueError("A sweep needs at least one axis value!")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError(f"Sweep axis values must be strictly increasing, got {self.values}")
        labels = [s.get("label") for s in self.series]
        if any(lbl is None for lbl in labels) or len(set(labels)) != len(labels):
            raise ValueError(f"Every sweep series needs a unique `label`, got {labels}")
