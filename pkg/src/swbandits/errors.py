"""Exception types raised across the package."""


class ParameterError(ValueError):
    """A numeric argument lies outside the domain of the function."""


class ConfigurationError(ValueError):
    """An experiment, policy or environment configuration is invalid."""


class ContractError(ValueError):
    """A policy received data that violates its modelling assumptions."""
