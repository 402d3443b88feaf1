"""Core services module."""
