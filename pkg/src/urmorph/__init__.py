"""Decide uniform recurrence of morphic words psi(phi^inf(a1))."""
from .pipeline import Decision, decide, decide_system
from .rulefile import RuleFile, load, parse
from .words import Alphabet, MorphicSystem, Morphism

__version__ = "0.1.0"

__all__ = ["Alphabet", "Decision", "MorphicSystem", "Morphism", "RuleFile", "decide",
           "decide_system", "load", "parse"]
