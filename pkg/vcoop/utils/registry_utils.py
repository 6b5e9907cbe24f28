from ..constants import RegistryType


__all__ = [
    "list_available_mobility_models",
    "list_available_connection_models",
    "list_available_channel_models",
    "list_available_presets",
    "get_module_config_class",
]


def list_available_mobility_models():
    registry = _get_registry_from_type(RegistryType.MOBILITY)

    return sorted(registry.keys())


def list_available_connection_models():
    registry = _get_registry_from_type(RegistryType.CONNECTION)

    return sorted(registry.keys())


def list_available_channel_models():
    registry = _get_registry_from_type(RegistryType.CHANNEL)

    return sorted(registry.keys())


def list_available_presets():
    registry = _get_registry_from_type(RegistryType.PRESET)

    return sorted(registry.keys())


def _get_registry_from_type(registry_type: RegistryType):
    if registry_type == RegistryType.MOBILITY:
        from ..registry import mobility_registry  # noqa
        from ..sim import mobility  # noqa

        registry = mobility_registry

    elif registry_type == RegistryType.CONNECTION:
        from ..registry import connection_registry  # noqa
        from ..sim import connection  # noqa

        registry = connection_registry

    elif registry_type == RegistryType.CHANNEL:
        from ..registry import channel_registry  # noqa
        from ..sim import channel  # noqa

        registry = channel_registry

    elif registry_type == RegistryType.PRESET:
        from ..experiments import presets  # noqa
        from ..registry import presets_registry  # noqa

        registry = presets_registry

    else:
        raise ValueError(f"Invalid `registry_type`: {registry_type}!")

    return registry


def get_module_config_class(name: str, registry_type: RegistryType):
    """
    Get the config class for a given module based on its registry name, or None if the name is not registered.
    """
    registry = _get_registry_from_type(registry_type)

    if name not in registry:
        return None

    return registry[name].config_class
