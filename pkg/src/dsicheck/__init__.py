"""Deformed shape invariance checks for position-dependent-mass models."""
