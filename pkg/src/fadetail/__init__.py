"""Outage tails of fading channel models: exact CDFs, power-law approximations, diversity."""

__version__ = "0.1.0"
