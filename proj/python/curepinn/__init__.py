"""Coupled exothermic heat-conduction / resin-cure PINN toolkit."""

from curepinn._core import (
    ArtifactError,
    Config,
    ConfigError,
    Fields,
    Model,
    NumericsError,
    __version__,
    air_temperature,
    cure_rate,
    eval_surrogate,
    exotherm,
    init_model,
    isothermal_cure,
    load_model,
    preset_names,
    solve_fd,
    thermal_lag,
    train,
)

__all__ = [
    "ArtifactError",
    "Config",
    "ConfigError",
    "Fields",
    "Model",
    "NumericsError",
    "__version__",
    "air_temperature",
    "cure_rate",
    "eval_surrogate",
    "exotherm",
    "init_model",
    "isothermal_cure",
    "load_model",
    "preset_names",
    "solve_fd",
    "thermal_lag",
    "train",
]
