"""Generalised Thue-Morse sequences: words, autocorrelation, diffraction and topology."""

from gtm.params import Params

__all__ = ["Params"]
__version__ = "0.1.0"
