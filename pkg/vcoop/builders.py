r"""
Builder functions create an instance of a pluggable simulation model without having to import its class manually.
They use the registries to do so. Every builder gets a name and an optional config or config kwargs.

Examples:

    >>> from vcoop.builders import build_mobility
    >>> mobility = build_mobility("gaussian", sigma1=2.0, tau=5.0)
    >>> print(mobility.config)

"""
from typing import Optional

from .configs import ChannelConfig, ConnectionConfig, MobilityConfig
from .registry import channel_registry, connection_registry, mobility_registry


__all__ = [
    "build_mobility",
    "build_connection",
    "build_channel",
]


def build_mobility(name: str, config: Optional[MobilityConfig] = None, **kwargs):
    """
    Build a mobility model using its registry name. If config is None then the default config is used.

    Args:
        name (str): name of the mobility model in the registry
        config (MobilityConfig): a MobilityConfig instance
        **kwargs: extra config parameters

    Returns:
        A Mobility instance
    """
    from .utils import list_available_mobility_models

    available = list_available_mobility_models()
    if name not in available:
        raise ValueError(f"Unknown mobility model: `{name}`!\nAvailable mobility models: {available}")
    config = config or mobility_registry[name].config_class()
    return mobility_registry[name].module_class(config, **kwargs)


def build_connection(name: str, config: Optional[ConnectionConfig] = None, **kwargs):
    """
    Build a connection model using its registry name. If config is None then the default config is used.
    """
    from .utils import list_available_connection_models

    available = list_available_connection_models()
    if name not in available:
        raise ValueError(f"Unknown connection model: `{name}`!\nAvailable connection models: {available}")
    config = config or connection_registry[name].config_class()
    return connection_registry[name].module_class(config, **kwargs)


def build_channel(name: str, config: Optional[ChannelConfig] = None, **kwargs):
    """
    Build a channel model using its registry name. If config is None then the default config is used.
    """
    from .utils import list_available_channel_models

    available = list_available_channel_models()
    if name not in available:
        raise ValueError(f"Unknown channel model: `{name}`!\nAvailable channel models: {available}")
    config = config or channel_registry[name].config_class()
    return channel_registry[name].module_class(config, **kwargs)
