"""Settings and configuration checks for graphlim."""
