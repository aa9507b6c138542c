"""Toxicity-attraction and controversiality analytics for conversation threads."""

__version__ = "0.1.0"
