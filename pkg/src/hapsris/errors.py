"""Exception types shared across the simulator."""


class ConfigurationError(ValueError):
    """Invalid scenario, channel, RIS or campaign parameters."""


class GeometryError(ValueError):
    """Degenerate endpoint geometry (e.g. coincident points)."""
