"""Thermohaline circulation stability and dynamic transition analysis package."""

__version__ = "0.1.0"
