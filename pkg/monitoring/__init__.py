"""Package marker for monitoring."""
