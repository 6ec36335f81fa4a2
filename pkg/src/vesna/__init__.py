"""Natural-language scene building: chat commands in, collision-checked 3D placements out."""

__version__ = "0.1.0"
