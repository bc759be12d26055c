"""Application layer - algorithms and use cases."""
