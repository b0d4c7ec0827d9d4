"""Split perfect discrete Morse functions on connected sums of 3-manifolds."""
from __future__ import annotations

from .cellcomplex import Complex, Region
from .errors import MorseSumError
from .homology import betti
from .morse import GradientField, MorseFunction

__all__ = ["Complex", "Region", "MorseSumError", "betti", "GradientField", "MorseFunction"]
__version__ = "0.1.0"
