"""Synthetic longitudinal work-life and wellbeing data generator."""

__version__ = "0.1.0"
