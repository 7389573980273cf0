"""Package marker for infra."""
