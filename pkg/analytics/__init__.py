"""Package marker for analytics."""
