"""cineforge: author 3D box/camera scenes, render depth/ID condition maps,
auto-label clips from external perception outputs, and score controllability."""

__version__ = "0.1.0"
