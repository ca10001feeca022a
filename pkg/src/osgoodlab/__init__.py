"""osgoodlab: desk-scale experiments on conditional stability of backward
parabolic evolution with time-dependent coefficients."""

__version__ = "0.1.0"
