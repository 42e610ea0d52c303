"""Finite posets: fixed point property, retracts, and forbidden-retract families."""

__version__ = "0.1.0"
