"""Experiment report persistence."""
