"""Spectra, stationary profiles and stability thresholds for a pier-supported beam."""

__version__ = "0.1.0"

from .beam import BeamMode, beam_spectrum
from .torsion import TorsionMode, torsion_spectrum

__all__ = ["BeamMode", "beam_spectrum", "TorsionMode", "torsion_spectrum", "__version__"]
