"""Sharp constants and symmetry of optimizers for spinorial weighted
interpolation inequalities in three dimensions."""

__version__ = "0.1.0"
