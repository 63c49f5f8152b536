from . import analysis, bounds, rip, sharpness, solver

__all__ = ["analysis", "bounds", "rip", "sharpness", "solver"]
