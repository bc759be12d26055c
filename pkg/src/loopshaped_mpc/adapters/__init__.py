"""Adapters layer - configuration, persistence and runtime integrations."""
