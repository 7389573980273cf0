"""Package marker for engine."""
