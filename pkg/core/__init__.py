"""Package marker for core."""
