"""Adapters: command line, files and reports."""
