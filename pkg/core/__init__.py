"""Core graph-limit logic: domain model, use cases and services."""

__version__ = "0.1.0"
