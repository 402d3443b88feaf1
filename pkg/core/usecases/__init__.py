"""Use cases: statistics, distances, partitions, functionals, spectra and sequences."""
