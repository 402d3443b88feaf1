"""Graphs, canonical ball keys, normed values and report models."""
