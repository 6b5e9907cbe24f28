r"""
vcoop uses a registry system so that every pluggable simulation model (mobility, connection, channel) and every
figure preset has an entry in its specific registry. These registries are simple python dictionaries that map a
module's name to its class (or builder function) and its config class. They are filled automatically when the
corresponding modules are imported.

Examples:
    >>> from vcoop.registry import mobility_registry
    >>> print(mobility_registry["gaussian"].config_class)
    <class 'vcoop.sim.mobility.GaussianMobilityConfig'>

    >>> from vcoop.sim.mobility import Mobility
    >>> @register_mobility("my_mobility", config_class=MyMobilityConfig, description="My mobility model")
    >>> class MyMobility(Mobility):
    ...     ...

Registries usually don't need to be used directly, see `vcoop.builders` for the builder functions.

Note: In case of adding a new registry container, make sure to add to `__all__` below!
"""

from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Dict, Optional, Type


if TYPE_CHECKING:
    from .configs import ChannelConfig, Config, ConnectionConfig, MobilityConfig

from .utils import Logger


__all__ = [
    "register_mobility",
    "register_connection",
    "register_channel",
    "register_preset",
    "Registry",
    "mobility_registry",
    "connection_registry",
    "channel_registry",
    "presets_registry",
]

logger = Logger(__name__)


@dataclass
class Registry:
    module_class: type
    config_class: type = None
    description: Optional[str] = None


mobility_registry: Dict[str, Registry] = {}
connection_registry: Dict[str, Registry] = {}
channel_registry: Dict[str, Registry] = {}
presets_registry: Dict[str, Registry] = {}


def _register_module(
    cls: Type,
    registry: Dict[str, Registry],
    module_name: str,
    config_class: Optional[Type["Config"]],
    description: str = None,
):
    """
    Add module to the registry.

    Args:
        cls: The module class (or a builder function for presets)
        registry: Module's registry container
        module_name: Module's registry name (key)
        config_class: Module's config class, whose `name` must equal the registry name
        description: Optional description for the module
    """
    if module_name in registry:
        logger.warning(f"`{module_name}` is already registered. Overwriting...")

    if config_class is not None and config_class.name != module_name:
        raise ValueError(
            f"Module's registry name and `config.name` are not compatible for `{cls.__name__}`\n"
            f"Registry name: {module_name}\n"
            f"{config_class.__name__}.name: {config_class.name}"
        )
    registry[module_name] = Registry(module_class=cls, config_class=config_class, description=description)


def register_mobility(mobility_name: str, config_class: Type["MobilityConfig"], description: str = None):
    """
    A class decorator that adds the mobility model class and its config class to the `mobility_registry`

    Args:
        mobility_name: Registry name e.g, `gaussian`
        config_class: The config class itself, not an instance
        description: Optional description
    """

    def register(cls):
        _register_module(cls, mobility_registry, mobility_name, config_class, description)
        return cls

    return register


def register_connection(connection_name: str, config_class: Type["ConnectionConfig"], description: str = None):
    """
    A class decorator that adds the connection model class and its config class to the `connection_registry`
    """

    def register(cls):
        _register_module(cls, connection_registry, connection_name, config_class, description)
        return cls

    return register


def register_channel(channel_name: str, config_class: Type["ChannelConfig"], description: str = None):
    """
    A class decorator that adds the channel model class and its config class to the `channel_registry`
    """

    def register(cls):
        _register_module(cls, channel_registry, channel_name, config_class, description)
        return cls

    return register


def register_preset(preset_name: str, description: str = None):
    """
    A function decorator that adds a figure preset builder (a function returning a `SweepConfig`) to the
    `presets_registry`
    """

    def register(func: Callable):
        _register_module(func, presets_registry, preset_name, None, description)
        return func

    return register
