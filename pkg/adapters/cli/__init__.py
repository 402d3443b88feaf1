"""CLI adapters package."""
