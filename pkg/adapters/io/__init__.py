"""Graph and document file formats."""
